"""Short-time Fourier, cross-Wigner and ambiguity transforms.

Grid conventions for a signal grid ``(n, delta)`` with extent ``L``:

* STFT and ambiguity outputs default to ``x`` on the signal grid and ``xi``
  on the dual grid (spacing ``1/L``).
* Cross-Wigner outputs default to ``x`` on the signal grid and ``xi`` on a
  grid of ``n`` nodes with spacing ``1/(2L)``.  The Wigner integral runs over
  ``t`` with step ``2 delta``, so ``x +- t/2`` stays on the signal grid and
  no interpolation is needed.

Custom output grids are accepted.  The integration variable is then placed
on the dual of the requested frequency grid and the signals are evaluated
through their analytic tags or, for purely sampled signals, on the half grid
via band-limited interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Tuple

import numpy as np

from .errors import (GridMismatch, InputError, LatticeTooLarge,
                     NonSquareGrid, ProbeOutOfRange, ZeroWindow)
from .signals import (AxisGrid, SampledSignal, TfArray, bandlimited_upsample,
                      cfft, evaluate)

__all__ = [
    "stft",
    "stft_at",
    "cross_wigner",
    "ambiguity",
    "symplectic_rotation",
    "fourier_transform_2d",
    "wigner_from_ambiguity",
    "Lattice4D",
    "stft2d",
    "iter_stft2d",
    "default_lattice",
    "stft_of_wigner_factored",
    "wigner_grid",
    "MAX_LATTICE_SIDE",
]

MAX_LATTICE_SIDE = 64
_ROW_CHUNK = 256


class _Evaluator:
    """Evaluates a signal at arbitrary points, caching the interpolant."""

    def __init__(self, f: SampledSignal):
        self.f = f
        self._fine = None

    def __call__(self, t: np.ndarray) -> np.ndarray:
        f = self.f
        if f.tag is not None:
            return f.tag(t)
        g = f.grid
        if g.on_grid(t):
            idx = np.rint(np.asarray(t) / g.delta).astype(int) + g.n // 2
            inside = (idx >= 0) & (idx < g.n)
            out = np.zeros(np.shape(t), dtype=complex)
            out[inside] = f.samples[idx[inside]]
            return out
        if self._fine is None:
            self._fine = bandlimited_upsample(f.samples)
        half = g.delta / 2
        r = np.asarray(t) / half
        k = np.rint(r)
        if np.any(np.abs(r - k) > 1e-9 * max(1.0, float(np.max(np.abs(r), initial=0)))):
            # defer to the shared error path for the message
            return evaluate(f, t)
        idx = k.astype(int) + g.n
        inside = (idx >= 0) & (idx < 2 * g.n)
        out = np.zeros(np.shape(t), dtype=complex)
        out[inside] = self._fine[idx[inside]]
        return out


def wigner_grid(grid: AxisGrid) -> Tuple[AxisGrid, AxisGrid]:
    """Default ``(x, xi)`` grids of a cross-Wigner output."""
    return grid, AxisGrid(grid.n, 1.0 / (2 * grid.extent))


def _check_window(g: SampledSignal):
    if g.tag is None and not np.any(g.samples):
        raise ZeroWindow("the window vanishes identically")


# ---------------------------------------------------------------- STFT
def stft(f: SampledSignal, g: SampledSignal, xgrid: Optional[AxisGrid] = None,
         xigrid: Optional[AxisGrid] = None) -> TfArray:
    """``V_g f(x, xi) = int f(t) conj(g(t - x)) exp(-2 pi i xi t) dt``.

    Parameters
    ----------
    f, g : SampledSignal
        Signal and window.  An untagged window must share ``f``'s grid and
        ``xgrid`` must then consist of multiples of its spacing.
    xgrid, xigrid : AxisGrid, optional
        Output nodes.  ``xigrid`` must be a sub-lattice of the dual grid of
        ``f.grid`` (typically a decimation); defaults are the signal grid and
        its dual.
    """
    _check_window(g)
    grid = f.grid
    if g.tag is None and g.grid != grid:
        raise GridMismatch("an untagged window must share the signal grid")
    xgrid = grid if xgrid is None else xgrid
    dual = grid.dual()
    xi_idx = None if xigrid is None else dual.sub_indices(xigrid)
    xigrid = dual if xigrid is None else xigrid
    t = grid.nodes
    xs = xgrid.nodes
    if g.tag is None:
        shifts = grid.index_of(xs) - grid.n // 2
    out = np.empty((xgrid.n, xigrid.n), dtype=complex)
    for lo in range(0, xgrid.n, _ROW_CHUNK):
        hi = min(lo + _ROW_CHUNK, xgrid.n)
        if g.tag is not None:
            win = g.tag(t[None, :] - xs[lo:hi, None])
        else:
            win = np.zeros((hi - lo, grid.n), dtype=complex)
            for r, s in enumerate(shifts[lo:hi]):
                if s >= 0:
                    win[r, s:] = g.samples[: grid.n - s]
                else:
                    win[r, : grid.n + s] = g.samples[-s:]
        rows = cfft(f.samples[None, :] * np.conj(win), axes=1) * grid.delta
        out[lo:hi] = rows if xi_idx is None else rows[:, xi_idx]
    return TfArray(xgrid, xigrid, out)


def stft_at(f: SampledSignal, g: SampledSignal, x, xi) -> np.ndarray:
    """STFT at arbitrary points by direct Riemann sums over the signal grid."""
    _check_window(g)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    x, xi = np.broadcast_arrays(x, xi)
    grid = f.grid
    t = grid.nodes
    ev = _Evaluator(g)
    out = np.empty(x.shape, dtype=complex)
    flat_x, flat_xi, flat_out = x.ravel(), xi.ravel(), out.reshape(-1)
    for lo in range(0, flat_x.size, _ROW_CHUNK):
        hi = min(lo + _ROW_CHUNK, flat_x.size)
        win = ev(t[None, :] - flat_x[lo:hi, None])
        kern = np.exp(-2j * np.pi * flat_xi[lo:hi, None] * t[None, :])
        flat_out[lo:hi] = np.sum(f.samples[None, :] * np.conj(win) * kern, axis=1) * grid.delta
    return out


# ---------------------------------------------------------------- Wigner / ambiguity
def _integration_grid(xigrid: AxisGrid) -> AxisGrid:
    return xigrid.dual()


def cross_wigner(f1: SampledSignal, f2: SampledSignal, xgrid: Optional[AxisGrid] = None,
                 xigrid: Optional[AxisGrid] = None) -> TfArray:
    """``W(f1, f2)(x, xi) = int f1(x + t/2) conj(f2(x - t/2)) exp(-2 pi i xi t) dt``."""
    if f1.grid != f2.grid and (f1.tag is None or f2.tag is None):
        raise GridMismatch("signals must share a grid unless both are tagged")
    dx, dxi = wigner_grid(f1.grid)
    xgrid = dx if xgrid is None else xgrid
    xigrid = dxi if xigrid is None else xigrid
    tgrid = _integration_grid(xigrid)
    t = tgrid.nodes
    e1, e2 = _Evaluator(f1), _Evaluator(f2)
    out = np.empty((xgrid.n, xigrid.n), dtype=complex)
    xs = xgrid.nodes
    for lo in range(0, xgrid.n, _ROW_CHUNK):
        hi = min(lo + _ROW_CHUNK, xgrid.n)
        x = xs[lo:hi, None]
        prod = e1(x + t / 2) * np.conj(e2(x - t / 2))
        out[lo:hi] = cfft(prod, axes=1) * tgrid.delta
    return TfArray(xgrid, xigrid, out)


def ambiguity(f1: SampledSignal, f2: SampledSignal, xgrid: Optional[AxisGrid] = None,
              xigrid: Optional[AxisGrid] = None) -> TfArray:
    """``A(f1, f2)(x, xi) = int f1(t + x/2) conj(f2(t - x/2)) exp(-2 pi i t xi) dt``."""
    if f1.grid != f2.grid and (f1.tag is None or f2.tag is None):
        raise GridMismatch("signals must share a grid unless both are tagged")
    xgrid = f1.grid if xgrid is None else xgrid
    xigrid = f1.grid.dual() if xigrid is None else xigrid
    tgrid = _integration_grid(xigrid)
    t = tgrid.nodes
    e1, e2 = _Evaluator(f1), _Evaluator(f2)
    out = np.empty((xgrid.n, xigrid.n), dtype=complex)
    xs = xgrid.nodes
    for lo in range(0, xgrid.n, _ROW_CHUNK):
        hi = min(lo + _ROW_CHUNK, xgrid.n)
        x = xs[lo:hi, None]
        prod = e1(t + x / 2) * np.conj(e2(t - x / 2))
        out[lo:hi] = cfft(prod, axes=1) * tgrid.delta
    return TfArray(xgrid, xigrid, out)


def symplectic_rotation(F: TfArray) -> TfArray:
    """``U F(x, xi) = F(xi, -x)`` by index permutation.

    Negation maps node ``k`` to ``(n - k) mod n``, i.e. the edge node
    ``-n/2`` is identified with ``+n/2``; this keeps ``U`` a permutation with
    ``U^4 = I`` exactly.
    """
    if F.xgrid != F.xigrid:
        raise NonSquareGrid("rotation needs identical x and xi grids")
    n = F.xgrid.n
    neg = (-np.arange(n)) % n
    return F.with_values(F.values.T[neg, :])


def fourier_transform_2d(F: TfArray) -> TfArray:
    """Phase-space Fourier transform ``int int F(y, eta) exp(-2 pi i (x y + xi eta))``."""
    values = cfft(F.values, axes=(0, 1)) * F.cell
    return TfArray(F.xgrid.dual(), F.xigrid.dual(), values)


def wigner_from_ambiguity(f1: SampledSignal, f2: SampledSignal,
                          grid: Optional[AxisGrid] = None) -> TfArray:
    """Cross-Wigner distribution as the Fourier transform of the rotated ambiguity.

    The ambiguity function is sampled on the square grid ``grid x grid``
    (default: the signal grid when ``n delta^2 = 1``, otherwise spacing
    ``n^{-1/2}``); the output lives on the dual square grid.
    """
    if grid is None:
        g = f1.grid
        grid = g if abs(g.n * g.delta ** 2 - 1) < 1e-12 else AxisGrid(g.n, g.n ** -0.5)
    A = ambiguity(f1, f2, grid, grid)
    return fourier_transform_2d(symplectic_rotation(A))


# ---------------------------------------------------------------- 4D STFT
@dataclass(frozen=True, eq=False)
class Lattice4D:
    """Samples of ``V_G F(z, zeta)`` with ``values[i1, i2, j1, j2]``."""

    values: np.ndarray
    zgrids: Tuple[AxisGrid, AxisGrid]
    zetagrids: Tuple[AxisGrid, AxisGrid]

    @property
    def axes(self):
        return [g.nodes for g in (*self.zgrids, *self.zetagrids)]


def _lattice_stride(n: int, side: int) -> int:
    return max(1, n // side)


def default_lattice(F: TfArray, side: int = 32):
    """Default ``(zgrids, zetagrids)``: decimations to at most ``side`` nodes."""
    zg = tuple(g.decimated(_lattice_stride(g.n, side)) for g in (F.xgrid, F.xigrid))
    zeta = tuple(g.dual().decimated(_lattice_stride(g.n, side)) for g in (F.xgrid, F.xigrid))
    return zg, zeta


def _extended_window(F: TfArray, G: TfArray) -> np.ndarray:
    """Window sampled on the doubled grid so every on-grid shift is a slice."""
    n1, n2 = F.values.shape
    big1, big2 = AxisGrid(2 * n1, F.xgrid.delta), AxisGrid(2 * n2, F.xigrid.delta)
    if G.tag is not None:
        x, xi = np.meshgrid(big1.nodes, big2.nodes, indexing="ij")
        return np.asarray(G.tag(x, xi), dtype=complex)
    ext = np.zeros((2 * n1, 2 * n2), dtype=complex)
    ext[n1 // 2: n1 // 2 + n1, n2 // 2: n2 // 2 + n2] = G.values
    return ext


def iter_stft2d(F: TfArray, G: TfArray, zgrids, batch: int = 64
                ) -> Iterator[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Stream ``V_G F`` over the z-lattice.

    Yields ``(i1, i2, V)`` where ``i1, i2`` index the z-lattice and ``V`` has
    shape ``(len(i1), n1, n2)`` holding the full dual-grid values.
    """
    if not F.same_grid(G):
        raise GridMismatch("window and function must share the phase-space grid")
    if G.tag is None and not np.any(G.values):
        raise ZeroWindow("the window vanishes identically")
    n1, n2 = F.values.shape
    ext = _extended_window(F, G)
    k1 = F.xgrid.sub_indices(zgrids[0])
    k2 = F.xigrid.sub_indices(zgrids[1])
    pairs = [(a, b) for a in range(len(k1)) for b in range(len(k2))]
    cell = F.cell
    for lo in range(0, len(pairs), batch):
        chunk = pairs[lo: lo + batch]
        i1 = np.array([p[0] for p in chunk])
        i2 = np.array([p[1] for p in chunk])
        win = np.empty((len(chunk), n1, n2), dtype=complex)
        for r, (a, b) in enumerate(chunk):
            s1, s2 = n1 - k1[a], n2 - k2[b]
            win[r] = ext[s1: s1 + n1, s2: s2 + n2]
        yield i1, i2, cfft(F.values[None] * np.conj(win), axes=(1, 2)) * cell


def stft2d(F: TfArray, G: TfArray, zgrids=None, zetagrids=None,
           max_side: int = MAX_LATTICE_SIDE) -> Lattice4D:
    """Brute-force 4D STFT of a phase-space function on a capped lattice.

    ``zgrids`` must be sub-lattices of ``F``'s grids and ``zetagrids``
    sub-lattices of their duals; by default both are decimated to at most 32
    nodes per axis.  Any side above ``max_side`` raises ``LatticeTooLarge``.
    """
    dz, dzeta = default_lattice(F)
    zgrids = dz if zgrids is None else tuple(zgrids)
    zetagrids = dzeta if zetagrids is None else tuple(zetagrids)
    sides = [g.n for g in (*zgrids, *zetagrids)]
    if max(sides) > max_side:
        raise LatticeTooLarge(f"lattice sides {sides} exceed {max_side}")
    j1 = F.xgrid.dual().sub_indices(zetagrids[0])
    j2 = F.xigrid.dual().sub_indices(zetagrids[1])
    out = np.empty(tuple(sides), dtype=complex)
    for i1, i2, V in iter_stft2d(F, G, zgrids):
        out[i1, i2] = V[:, j1][:, :, j2]
    return Lattice4D(out, tuple(zgrids), tuple(zetagrids))


# ---------------------------------------------------------------- factored identity
def stft_of_wigner_factored(f1: SampledSignal, f2: SampledSignal, g: SampledSignal,
                            probes: Iterable[Sequence[float]]) -> np.ndarray:
    """``V_{W(g,g)} W(f1, f2)`` at probe points via products of 1D STFTs.

    Each probe is ``(z1, z2, zeta1, zeta2)``.  The value is

        exp(-2 pi i z2 zeta2) * conj(V_g f2(z1 + zeta2/2, z2 - zeta1/2))
                              * V_g f1(z1 - zeta2/2, z2 + zeta1/2).

    The 1D STFTs are evaluated by direct sums at the exact (generally
    off-grid) points, which requires a tagged window.
    """
    if g.tag is None:
        raise InputError("the factored identity needs an analytically tagged window")
    P = np.asarray(list(probes), dtype=float).reshape(-1, 4)
    z1, z2, s1, s2 = P.T
    xa, xia = z1 + s2 / 2, z2 - s1 / 2
    xb, xib = z1 - s2 / 2, z2 + s1 / 2
    for f in (f1, f2):
        gx, dual = f.grid, f.grid.dual()
        xs = np.concatenate([xa, xb])
        xis = np.concatenate([xia, xib])
        if (xs.min() < gx.lo or xs.max() > gx.hi or xis.min() < dual.lo or xis.max() > dual.hi):
            raise ProbeOutOfRange("probe requires STFT values outside the sampled region")
    va = stft_at(f2, g, xa, xia)
    vb = stft_at(f1, g, xb, xib)
    return np.exp(-2j * np.pi * z2 * s2) * np.conj(va) * vb
