"""Weighted mixed norms, modulation and Wiener amalgam norms.

Windows: signals use ``phi(t) = exp(-pi t^2)``; phase-space functions use
``Phi = W(phi, phi) = sqrt(2) exp(-2 pi (x^2 + xi^2))``.  The amalgam norm
defaults to the Fourier image of ``Phi``, ``2^{-1/2} exp(-pi (x^2 + xi^2)/2)``,
which is invariant under the symplectic rotation.  With that pairing the
modulation norm of ``W(f1, f2)`` and the amalgam norm of ``A(f1, f2)`` are
equal, not merely equivalent.

All integrals are Riemann sums on uniform grids and infinite exponents are
grid maxima.  Wigner norms are computed through the convolution identity

    ||W(f1, f2)||_{M^{p,q}_{1 (x) v_s}}
        = || |V f2|^p * |(V f1)^*|^p ||_{L^{q/p}_{v_{ps}}}^{1/p},

which follows from the factorization of the STFT of a Wigner distribution
and needs only 1D STFTs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.signal import fftconvolve

from .errors import (ExponentOrder, ExponentOutOfRange, InfinitePowerPath, InputError,
                     LatticeTooLarge)
from .exponents import INF, ExtReal
from .oracles import GenGaussian
from .signals import AxisGrid, SampledSignal, TfArray, gaussian
from .transforms import (MAX_LATTICE_SIDE, Lattice4D, ambiguity, iter_stft2d, stft)

__all__ = [
    "ExtReal",
    "INF",
    "MixedNormSpec",
    "weight_vs",
    "mixed_norm",
    "modulation_norm",
    "modulation_norm_phase_space",
    "modulation_norms_phase_space",
    "amalgam_norm",
    "wigner_mod_norm_conv",
    "wigner_mod_norm",
    "factored_wigner_norm",
    "lieb_bound_check",
    "lebesgue_norm",
    "PHASE_WINDOW",
    "AMALGAM_WINDOW",
]

PHASE_WINDOW = GenGaussian(2.0, 2.0, 0.0, 2.0 ** 0.5)
AMALGAM_WINDOW = GenGaussian(0.5, 0.5, 0.0, 2.0 ** -0.5)

# FFT convolution leaves absolute noise near 1e-16 of the peak; fractional
# powers would amplify it, so values below this relative floor are zeroed.
_CONV_FLOOR = 1e-13
_SUP_WORK_CAP = 4e8


@dataclass(frozen=True)
class MixedNormSpec:
    """Exponents ``(p, q)``, weight order ``s`` and weight placement.

    ``placement="full"`` weighs every variable (``v_s`` on signals' phase
    space); ``placement="second"`` weighs only the outer block (``1 (x) v_s``).
    """

    p: ExtReal
    q: ExtReal
    s: float = 0.0
    placement: str = "full"

    def __post_init__(self):
        object.__setattr__(self, "p", ExtReal.parse(self.p))
        object.__setattr__(self, "q", ExtReal.parse(self.q))
        object.__setattr__(self, "s", float(self.s))
        if self.placement not in ("full", "second"):
            raise InputError(f"unknown weight placement {self.placement!r}")


def weight_vs(z, s: float) -> np.ndarray:
    """``(1 + |z|^2)^{s/2}``; the last axis of ``z`` holds the components."""
    z = np.asarray(z, dtype=float)
    sq = z * z if z.ndim == 0 else np.sum(z * z, axis=-1)
    return (1.0 + sq) ** (s / 2)


def _vs_from_sq(sq: np.ndarray, s: float) -> np.ndarray:
    return np.ones_like(sq) if s == 0 else (1.0 + sq) ** (s / 2)


def _power_sum(a: np.ndarray, r: ExtReal, axes, cell: float) -> np.ndarray:
    """``(sum a^r * cell)^{1/r}`` over ``axes``, or the maximum when ``r`` is infinite."""
    if r.is_inf:
        return np.max(a, axis=axes)
    rf = float(r)
    return (np.sum(a ** rf, axis=axes) * cell) ** (1.0 / rf)


def lebesgue_norm(values: np.ndarray, r, cell: float) -> float:
    """Riemann-sum ``L^r`` norm of an array of any shape."""
    return float(_power_sum(np.abs(values).ravel(), ExtReal.parse(r), 0, cell))


def _mixed_core(absvals, inner_axes, cell_in, cell_out, p, q, weight=None) -> float:
    a = absvals if weight is None else absvals * weight
    inner = _power_sum(a, p, inner_axes, cell_in)
    return float(_power_sum(np.ravel(inner), q, 0, cell_out))


def mixed_norm(F: Union[TfArray, Lattice4D], spec: MixedNormSpec) -> float:
    """Inner ``L^p`` over the first half of the variables, outer ``L^q`` over the rest."""
    if isinstance(F, TfArray):
        x, xi = F.mesh
        sq = xi * xi if spec.placement == "second" else x * x + xi * xi
        w = None if spec.s == 0 else _vs_from_sq(sq, spec.s)
        return _mixed_core(np.abs(F.values), 0, F.xgrid.delta, F.xigrid.delta, spec.p, spec.q, w)
    if isinstance(F, Lattice4D):
        z1, z2, s1, s2 = np.meshgrid(*F.axes, indexing="ij", sparse=True)
        sq = s1 * s1 + s2 * s2
        if spec.placement == "full":
            sq = sq + z1 * z1 + z2 * z2
        w = None if spec.s == 0 else _vs_from_sq(sq, spec.s)
        cz = F.zgrids[0].delta * F.zgrids[1].delta
        czeta = F.zetagrids[0].delta * F.zetagrids[1].delta
        return _mixed_core(np.abs(F.values), (0, 1), cz, czeta, spec.p, spec.q, w)
    raise InputError("mixed_norm expects a TfArray or a Lattice4D")


def _default_window(f: SampledSignal) -> SampledSignal:
    return gaussian(1.0, f.grid)


def modulation_norm(f: SampledSignal, p, q, s: float = 0.0, window: Optional[SampledSignal] = None,
                    xgrid: Optional[AxisGrid] = None, xigrid: Optional[AxisGrid] = None) -> float:
    """``||f||_{M^{p,q}_{v_s}}``: mixed norm of ``V_phi f`` with ``v_s(x, xi)``."""
    V = stft(f, _default_window(f) if window is None else window, xgrid, xigrid)
    return mixed_norm(V, MixedNormSpec(p, q, s, "full"))


# ---------------------------------------------------------------- phase space
def _phase_window(F: TfArray, window) -> TfArray:
    if window is None:
        window = PHASE_WINDOW
    if isinstance(window, TfArray):
        return window
    return TfArray.from_tag(window, F.xgrid, F.xigrid)


def _zlattice(F: TfArray, lattice: int):
    if lattice > MAX_LATTICE_SIDE:
        raise LatticeTooLarge(f"z-lattice side {lattice} exceeds {MAX_LATTICE_SIDE}")
    out = []
    for g in (F.xgrid, F.xigrid):
        side = min(lattice, g.n)
        out.append(g.decimated(g.n // side))
    return tuple(out)


def _dual_sq(F: TfArray) -> np.ndarray:
    d1, d2 = F.xgrid.dual().nodes, F.xigrid.dual().nodes
    return d1[:, None] ** 2 + d2[None, :] ** 2


def modulation_norm_phase_space(F: TfArray, p, q, s: float = 0.0, window=None,
                                lattice: int = 32) -> float:
    """``||F||_{M^{p,q}_{1 (x) v_s}}`` by a streamed 4D STFT.

    The inner ``L^p`` runs over a ``lattice x lattice`` decimation of the
    z-plane and the outer ``L^q`` over the full dual grid of ``F``.
    """
    return modulation_norms_phase_space(F, [(p, q)], s, window, lattice)[0]


def modulation_norms_phase_space(F: TfArray, pairs, s: float = 0.0, window=None,
                                 lattice: int = 32) -> list:
    """Several ``(p, q)`` modulation norms from a single pass over the 4D STFT."""
    pairs = [(ExtReal.parse(p), ExtReal.parse(q)) for p, q in pairs]
    G = _phase_window(F, window)
    zg = _zlattice(F, lattice)
    cz = zg[0].delta * zg[1].delta
    czeta = F.xgrid.dual().delta * F.xigrid.dual().delta
    inner_exps = sorted({p for p, _ in pairs}, key=lambda e: e.reciprocal)
    acc = {p: np.zeros(F.values.shape) for p in inner_exps}
    for _, _, V in iter_stft2d(F, G, zg):
        a = np.abs(V)
        for p in inner_exps:
            if p.is_inf:
                acc[p] = np.maximum(acc[p], a.max(axis=0))
            else:
                acc[p] += np.sum(a ** float(p), axis=0)
    weight = _vs_from_sq(_dual_sq(F), s) if s else None
    out = []
    for p, q in pairs:
        inner = acc[p] if p.is_inf else (acc[p] * cz) ** (1.0 / float(p))
        if weight is not None:
            inner = inner * weight
        out.append(float(_power_sum(inner.ravel(), q, 0, czeta)))
    return out


def amalgam_norm(F: TfArray, p, q, s: float = 0.0, window=None, lattice: int = 32) -> float:
    """``||F||_{W(FL^p, L^q_{v_s})}``: inner over frequency shifts, outer over z.

    The default window is the Fourier image of the modulation-norm window
    (see the module docstring).
    """
    p, q = ExtReal.parse(p), ExtReal.parse(q)
    G = _phase_window(F, AMALGAM_WINDOW if window is None else window)
    zg = _zlattice(F, lattice)
    cz = zg[0].delta * zg[1].delta
    czeta = F.xgrid.dual().delta * F.xigrid.dual().delta
    outer = np.zeros((zg[0].n, zg[1].n))
    for i1, i2, V in iter_stft2d(F, G, zg):
        outer[i1, i2] = _power_sum(np.abs(V).reshape(len(i1), -1), p, 1, czeta)
    if s:
        z1, z2 = zg[0].nodes, zg[1].nodes
        outer = outer * _vs_from_sq(z1[:, None] ** 2 + z2[None, :] ** 2, s)
    return float(_power_sum(outer.ravel(), q, 0, cz))


# ---------------------------------------------------------------- Wigner norms
def _sup_correlation(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``C[u] = max_w A[w] B[w - u]`` for every integer offset ``u``."""
    n1, n2 = A.shape
    if (2 * n1 - 1) * (2 * n2 - 1) * n1 * n2 > _SUP_WORK_CAP:
        raise LatticeTooLarge("supremum correlation grid is too large; decimate the STFT grid")
    C = np.zeros((2 * n1 - 1, 2 * n2 - 1))
    for k1 in range(-(n1 - 1), n1):
        a1 = slice(max(0, k1), n1 + min(0, k1))
        b1 = slice(max(0, -k1), n1 - max(0, k1))
        for k2 in range(-(n2 - 1), n2):
            a2 = slice(max(0, k2), n2 + min(0, k2))
            b2 = slice(max(0, -k2), n2 - max(0, k2))
            C[k1 + n1 - 1, k2 + n2 - 1] = np.max(A[a1, a2] * B[b1, b2])
    return C


def factored_wigner_norm(v1: np.ndarray, v2: np.ndarray, hx: float, hxi: float, p, q,
                         s: float = 0.0) -> float:
    """Wigner modulation norm from ``|V f1|`` and ``|V f2|`` on a common grid.

    Works for every ``p`` (infinite ``p`` uses a supremum correlation).  The
    offset variable ``u`` is the rotated frequency shift of the 4D STFT;
    ``v_s`` is rotation invariant so it is applied to ``u`` directly.
    """
    p, q = ExtReal.parse(p), ExtReal.parse(q)
    n1, n2 = v1.shape
    if p.is_inf:
        if q.is_inf and s == 0:
            return float(v1.max() * v2.max())
        C = _sup_correlation(v2, v1)
    else:
        pf = float(p)
        C = fftconvolve(v2 ** pf, (v1 ** pf)[::-1, ::-1]) * (hx * hxi)
        C[C < _CONV_FLOOR * C.max()] = 0.0
        C = C ** (1.0 / pf)
    if s:
        u1 = (np.arange(2 * n1 - 1) - (n1 - 1)) * hx
        u2 = (np.arange(2 * n2 - 1) - (n2 - 1)) * hxi
        C = C * _vs_from_sq(u1[:, None] ** 2 + u2[None, :] ** 2, s)
    return float(_power_sum(C.ravel(), q, 0, hx * hxi))


def _wigner_tables(f1, f2, window, xgrid, xigrid):
    if f1.grid != f2.grid:
        raise InputError("both signals must share a grid")
    g = _default_window(f1) if window is None else window
    V1 = stft(f1, g, xgrid, xigrid)
    V2 = stft(f2, g, xgrid, xigrid)
    return np.abs(V1.values), np.abs(V2.values), V1.xgrid.delta, V1.xigrid.delta


def wigner_mod_norm_conv(f1: SampledSignal, f2: SampledSignal, p, q, s: float = 0.0,
                         window: Optional[SampledSignal] = None, xgrid: Optional[AxisGrid] = None,
                         xigrid: Optional[AxisGrid] = None) -> float:
    """``||W(f1, f2)||_{M^{p,q}_{1 (x) v_s}}`` by FFT convolution (``p <= q``, ``p`` finite).

    The phase-space window is ``W(g, g)`` for the 1D window ``g`` (default
    ``phi``), so the result equals :func:`modulation_norm_phase_space` of
    ``W(f1, f2)`` with no calibration constant.
    """
    p, q = ExtReal.parse(p), ExtReal.parse(q)
    if p.is_inf:
        raise InfinitePowerPath("p = inf needs the supremum route (wigner_mod_norm)")
    if p > q:
        raise ExponentOrder(f"the convolution route needs p <= q, got p={p}, q={q}")
    v1, v2, hx, hxi = _wigner_tables(f1, f2, window, xgrid, xigrid)
    return factored_wigner_norm(v1, v2, hx, hxi, p, q, s)


def wigner_mod_norm(f1: SampledSignal, f2: SampledSignal, p, q, s: float = 0.0,
                    window: Optional[SampledSignal] = None, xgrid: Optional[AxisGrid] = None,
                    xigrid: Optional[AxisGrid] = None) -> float:
    """Like :func:`wigner_mod_norm_conv` but for every ``(p, q)``."""
    v1, v2, hx, hxi = _wigner_tables(f1, f2, window, xgrid, xigrid)
    return factored_wigner_norm(v1, v2, hx, hxi, p, q, s)


def lieb_bound_check(f1: SampledSignal, f2: SampledSignal, q) -> float:
    """``||A(f1, f2)||_{L^q} / (||f1||_2 ||f2||_2)`` for ``q >= 2``."""
    q = ExtReal.parse(q)
    if q < 2:
        raise ExponentOutOfRange("the ambiguity bound is only claimed for q >= 2")
    A = ambiguity(f1, f2)
    return lebesgue_norm(A.values, q, A.cell) / (f1.norm() * f2.norm())
