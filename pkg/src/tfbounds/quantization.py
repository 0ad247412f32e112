"""Weyl operators, localization operators and the symbol bridge between them.

Operators act on sample vectors of a signal grid ``(n, delta)`` and are
stored as matrices ``M`` with ``(L f)(y_i) = sum_j M[i, j] f(t_j)``, i.e.
``M = K * delta`` for the integral kernel ``K``.  With the delta-weighted
inner product the adjoint is the conjugate transpose.

Weyl kernel.  ``L_sigma f(y) = int k(y, t) f(t) dt`` with
``k(y, t) = kt((y + t)/2, y - t)`` and
``kt(x, u) = int sigma(x, xi) exp(2 pi i u xi) dxi``.  For nodes ``y_i``,
``t_j`` the midpoint sits on the half grid ``(2n, delta/2)`` at index
``i + j`` and the lag on ``(2n, delta)`` at index ``i - j + n``.  Analytic
symbols are sampled on the half grid times the frequency grid
``(2n, 1/(2L))``, which is the exact DFT partner of the lag grid.  Sampled
symbols are interpolated to the half grid in ``x`` and transformed with an
explicit DFT over their own frequency nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Tuple, Union

import numpy as np

from .errors import EmptyFamily, GridMismatch, InputError, MidpointUnavailable
from .norms import MixedNormSpec, modulation_norm
from .signals import (AxisGrid, ConstantSymbol, SampledSignal, TfArray, bandlimited_upsample,
                      centered_convolve, cifft, gaussian, inner_product)
from .transforms import _Evaluator, cross_wigner, stft, wigner_grid

__all__ = [
    "OperatorMatrix",
    "weyl_matrix",
    "weyl_apply",
    "localization_matrix",
    "localization_apply",
    "localization_weyl_symbol",
    "weak_pairing",
    "weak_identity_residuals",
    "operator_norm_lower_bound",
    "probe_family",
]

Symbol = Union[TfArray, Callable]


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Matrix of a linear operator on sample vectors of ``grid``."""

    grid: AxisGrid
    matrix: np.ndarray
    provenance: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.grid.n, self.grid.n):
            raise InputError(f"operator matrix shape {m.shape} does not match grid size {self.grid.n}")
        if not np.all(np.isfinite(m)):
            raise InputError("operator matrix has non-finite entries")
        object.__setattr__(self, "matrix", m)

    def apply(self, f: SampledSignal) -> SampledSignal:
        if f.grid != self.grid:
            raise GridMismatch("signal and operator live on different grids")
        return SampledSignal(self.grid, self.matrix @ f.samples)

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.grid, self.matrix.conj().T, self.provenance + "-adjoint")

    def scaled(self, c: complex) -> "OperatorMatrix":
        return OperatorMatrix(self.grid, c * self.matrix, self.provenance)


# ---------------------------------------------------------------- Weyl
def _symbol_callable(sigma) -> Optional[Callable]:
    if isinstance(sigma, TfArray):
        return sigma.tag
    if isinstance(sigma, (int, float, complex)):
        return ConstantSymbol(sigma)
    if callable(sigma):
        return sigma
    raise InputError("a symbol must be a TfArray, a callable (x, xi) or a constant")


def _lag_transform_analytic(tag: Callable, grid: AxisGrid) -> np.ndarray:
    half = grid.refined()
    xi = AxisGrid(2 * grid.n, 1.0 / (2 * grid.extent))
    x, w = np.meshgrid(half.nodes, xi.nodes, indexing="ij")
    vals = np.asarray(tag(x, w), dtype=complex)
    return cifft(vals, axes=1) * (2 * grid.n) * xi.delta


def _lag_transform_sampled(sigma: TfArray, grid: AxisGrid) -> np.ndarray:
    xg = sigma.xgrid
    if xg == grid:
        vals = bandlimited_upsample(sigma.values, axis=0)
    elif xg == grid.refined():
        vals = np.asarray(sigma.values)
    elif abs(xg.extent - grid.extent) < 1e-12 * grid.extent and xg.delta > grid.delta:
        raise MidpointUnavailable("symbol x-grid is too coarse to reach the midpoints")
    else:
        raise GridMismatch("symbol x-grid must be the signal grid or its refinement")
    lags = AxisGrid(2 * grid.n, grid.delta).nodes
    xis = sigma.xigrid.nodes
    dft = np.exp(2j * np.pi * np.outer(xis, lags)) * sigma.xigrid.delta
    return vals @ dft


def weyl_matrix(sigma: Symbol, grid: AxisGrid) -> OperatorMatrix:
    """Matrix of the Weyl operator with symbol ``sigma`` on ``grid``."""
    tag = _symbol_callable(sigma)
    kt = _lag_transform_analytic(tag, grid) if tag is not None else _lag_transform_sampled(sigma, grid)
    n = grid.n
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    kernel = kt[i + j, i - j + n]
    return OperatorMatrix(grid, kernel * grid.delta, "weyl")


def weyl_apply(sigma: Symbol, f: SampledSignal) -> SampledSignal:
    """``L_sigma f`` on the grid of ``f``."""
    return weyl_matrix(sigma, f.grid).apply(f)


def weak_pairing(sigma: Symbol, g: SampledSignal, f: SampledSignal) -> complex:
    """``<sigma, W(g, f)>`` as a Riemann sum on the Wigner grid of ``f``."""
    W = cross_wigner(g, f)
    tag = _symbol_callable(sigma)
    if tag is not None:
        x, xi = W.mesh
        vals = np.asarray(tag(x, xi), dtype=complex)
    else:
        if not sigma.same_grid(W):
            raise GridMismatch("sampled symbols must live on the Wigner grid for the weak pairing")
        vals = sigma.values
    return complex(np.sum(vals * np.conj(W.values)) * W.cell)


def weak_identity_residuals(sigma: Symbol, pairs: Iterable[Tuple[SampledSignal, SampledSignal]],
                            sup_norm: Optional[float] = None) -> List[dict]:
    """Residual table of ``<L_sigma f, g> = <sigma, W(g, f)>`` over ``(f, g)`` pairs.

    Each row carries the raw residual and its scale
    ``||sigma||_inf ||f|| ||g||``.
    """
    cache = {}
    rows = []
    for f, g in pairs:
        M = cache.get(f.grid)
        if M is None:
            M = cache[f.grid] = weyl_matrix(sigma, f.grid)
        lhs = inner_product(M.apply(f), g)
        rhs = weak_pairing(sigma, g, f)
        if sup_norm is None:
            sup_norm = _symbol_sup(sigma, f.grid)
        scale = sup_norm * f.norm() * g.norm()
        rows.append({"lhs": lhs, "rhs": rhs, "residual": abs(lhs - rhs), "scale": scale})
    return rows


def _symbol_sup(sigma: Symbol, grid: AxisGrid) -> float:
    if isinstance(sigma, TfArray) and sigma.tag is None:
        return float(np.max(np.abs(sigma.values)))
    xg, xig = wigner_grid(grid)
    x, xi = np.meshgrid(xg.nodes, xig.nodes, indexing="ij")
    return float(np.max(np.abs(_symbol_callable(sigma)(x, xi))))


# ---------------------------------------------------------------- localization
def _stft_grid(grid: AxisGrid) -> Tuple[AxisGrid, AxisGrid]:
    return grid, grid.dual()


def _symbol_on(a: Symbol, xgrid: AxisGrid, xigrid: AxisGrid) -> np.ndarray:
    tag = _symbol_callable(a)
    if tag is not None:
        x, xi = np.meshgrid(xgrid.nodes, xigrid.nodes, indexing="ij")
        return np.asarray(tag(x, xi), dtype=complex)
    if a.xgrid != xgrid or a.xigrid != xigrid:
        raise GridMismatch("sampled localization symbols must live on the STFT grid")
    return np.asarray(a.values)


def _check_windows(grid: AxisGrid, *windows: SampledSignal):
    for w in windows:
        if w.tag is None and w.grid != grid:
            raise GridMismatch("untagged windows must share the signal grid")


def _window_diffs(w: SampledSignal, grid: AxisGrid) -> np.ndarray:
    """``w`` at ``t_i - x_k`` for all node pairs, shape ``(n, n)`` indexed ``[i, k]``."""
    d = grid.nodes[:, None] - grid.nodes[None, :]
    return _Evaluator(w)(d)


def localization_matrix(a: Symbol, phi1: SampledSignal, phi2: SampledSignal,
                        grid: AxisGrid) -> OperatorMatrix:
    """Matrix of ``f -> sum a V_{phi1} f M_xi T_x phi2 dx dxi`` on ``grid``.

    Entry ``[t, s]`` is ``delta * sum_x phi2(t - x) conj(phi1(s - x)) ahat(x, t - s) dx``
    with ``ahat(x, u) = sum_xi a(x, xi) exp(2 pi i u xi) dxi`` over the dual grid.
    """
    _check_windows(grid, phi1, phi2)
    xg, xig = _stft_grid(grid)
    av = _symbol_on(a, xg, xig)
    n = grid.n
    # ahat on the lag nodes (i - n/2) delta; periodic with period L
    ahat = cifft(av, axes=1) * n * xig.delta
    p2 = _window_diffs(phi2, grid)
    p1c = np.conj(_window_diffs(phi1, grid))
    lag = (np.arange(n)[:, None] - np.arange(n)[None, :] + n // 2) % n
    M = np.zeros((n, n), dtype=complex)
    for k in range(n):
        M += np.outer(p2[:, k], p1c[:, k]) * ahat[k][lag]
    M *= grid.delta * xg.delta
    return OperatorMatrix(grid, M, "localization-direct")


def localization_apply(a: Symbol, phi1: SampledSignal, phi2: SampledSignal,
                       f: SampledSignal) -> SampledSignal:
    """Direct quadrature of the localization operator applied to ``f``."""
    grid = f.grid
    _check_windows(grid, phi1, phi2)
    xg, xig = _stft_grid(grid)
    V = stft(f, phi1, xg, xig)
    av = _symbol_on(a, xg, xig)
    # G[x, t] = sum_xi a V exp(2 pi i xi t) dxi, t on the signal grid
    G = cifft(av * V.values, axes=1) * grid.n * xig.delta
    p2 = _window_diffs(phi2, grid)
    out = np.sum(G.T * p2, axis=1) * xg.delta
    return SampledSignal(grid, out)


def localization_weyl_symbol(a: Symbol, phi1: SampledSignal, phi2: SampledSignal,
                             xgrid: Optional[AxisGrid] = None,
                             xigrid: Optional[AxisGrid] = None) -> TfArray:
    """Weyl symbol ``a * W(phi2, phi1)`` by FFT convolution on the phase plane.

    Output defaults: ``x`` on the signal grid, ``xi`` on the Wigner frequency
    grid for analytic ``a`` and on ``a``'s own grid for sampled ``a``.  An
    analytic ``a`` is sampled on a grid of twice the extent so that every
    node of the output sees its full contribution.
    """
    grid = phi1.grid
    tag = _symbol_callable(a)
    if tag is None:
        xgrid = a.xgrid if xgrid is None else xgrid
        xigrid = a.xigrid if xigrid is None else xigrid
        if a.xgrid.delta != xgrid.delta or a.xigrid.delta != xigrid.delta:
            raise GridMismatch("output grid spacing must match the symbol's")
        av = np.asarray(a.values)
    else:
        xgrid = grid if xgrid is None else xgrid
        xigrid = wigner_grid(grid)[1] if xigrid is None else xigrid
        big_x = AxisGrid(2 * xgrid.n, xgrid.delta)
        big_xi = AxisGrid(2 * xigrid.n, xigrid.delta)
        x, xi = np.meshgrid(big_x.nodes, big_xi.nodes, indexing="ij")
        av = np.asarray(tag(x, xi), dtype=complex)
    W = cross_wigner(phi2, phi1, xgrid, xigrid)
    cell = xgrid.delta * xigrid.delta
    vals = centered_convolve(av, W.values, (xgrid.n, xigrid.n)) * cell
    return TfArray(xgrid, xigrid, vals)


# ---------------------------------------------------------------- operator norms
def probe_family(grid: AxisGrid, trials: int, seed: int = 0) -> List[SampledSignal]:
    """``trials`` time-frequency shifted, dilated Gaussians; the first is ``phi``.

    Shifts stay within a quarter of the grid extent in time and a quarter of
    the Nyquist band in frequency so the probes are resolved.
    """
    if trials < 10:
        raise EmptyFamily("the probe family needs at least 10 members")
    rng = np.random.default_rng(seed)
    xmax = grid.extent / 4
    ximax = 1.0 / (8 * grid.delta)
    out = [gaussian(1.0, grid)]
    for _ in range(trials - 1):
        lam = 2.0 ** rng.uniform(-1.5, 1.5)
        out.append(gaussian(lam, grid, rng.uniform(-xmax, xmax), rng.uniform(-ximax, ximax)))
    return out


def operator_norm_lower_bound(op: OperatorMatrix, src: MixedNormSpec, dst: MixedNormSpec,
                              trials: int = 16, seed: int = 0) -> float:
    """Largest ``||op f||_{M^dst} / ||f||_{M^src}`` over :func:`probe_family`.

    This is a lower bound for the operator norm between the two modulation
    spaces; no upper bound is claimed.
    """
    best = 0.0
    for f in probe_family(op.grid, trials, seed):
        num = modulation_norm(op.apply(f), dst.p, dst.q, dst.s)
        den = modulation_norm(f, src.p, src.q, src.s)
        best = max(best, num / den)
    return best
