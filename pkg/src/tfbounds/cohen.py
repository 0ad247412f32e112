"""Cohen-class distributions ``M(f, f) = W(f, f) * sigma``.

Kernels are sampled on the spacings of the Wigner grid of ``f``: the
``tau`` kernels and custom analytic kernels on a grid of twice the extent,
so each output node sees the whole of ``W(f, f)``; the Born-Jordan kernel
by exact cell averages, which absorb its logarithmic singularity on the
axes; the grid delta as a single node of mass ``1 / cell``.

Point samples of the ``tau`` chirp alias on the Wigner grid unless
``|2 tau - 1|`` is close to 1.  The default ``"auto"`` sampling keeps
point samples when the mass identity ``int M = ||f||^2`` holds and
otherwise switches to exact cell averages of the chirp.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import (IndexConditionViolated, InputError, NegativeWeightOrder,
                     NonPositiveArgument, TauHalf)
from .exponents import ExtReal
from .norms import modulation_norm, modulation_norm_phase_space
from .signals import AxisGrid, SampledSignal, TfArray, centered_convolve
from .transforms import cross_wigner, wigner_grid

__all__ = [
    "cosine_integral",
    "sine_integral",
    "born_jordan_cell_average",
    "tau_kernel",
    "tau_cell_average",
    "born_jordan_kernel_d1",
    "MaskedKernel",
    "CohenKernel",
    "cohen_distribution",
    "cohen_condition_holds",
    "cohen_bound_check",
    "SERIES_CUTOFF",
]

SERIES_CUTOFF = 8.0
_EULER_GAMMA = 0.57721566490153286060651209
_SERIES_TERMS = 40
_CF_MAX_ITER = 500
_CF_EPS = 1e-16


def _series(t: np.ndarray):
    t2 = t * t
    term_c = np.ones_like(t)
    term_s = t.copy()
    acc_c = np.zeros_like(t)
    acc_s = t.copy()
    for k in range(1, _SERIES_TERMS + 1):
        term_c = term_c * (-t2) / ((2 * k - 1) * (2 * k))
        term_s = term_s * (-t2) / ((2 * k) * (2 * k + 1))
        acc_c += term_c / (2 * k)
        acc_s += term_s / (2 * k + 1)
    return acc_s, _EULER_GAMMA + np.log(t) + acc_c, -acc_c


def _si_cin(t: np.ndarray):
    """``Si(t)`` and ``Cin(t) = gamma + ln t - Ci(t)`` for ``t >= 0``."""
    flat = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    si = np.zeros_like(flat)
    cin = np.zeros_like(flat)
    low = (flat > 0) & (flat <= SERIES_CUTOFF)
    high = flat > SERIES_CUTOFF
    if np.any(low):
        si[low], _, cin[low] = _series(flat[low])
    if np.any(high):
        si[high], ci = _continued_fraction(flat[high])
        cin[high] = _EULER_GAMMA + np.log(flat[high]) - ci
    return si.reshape(np.shape(t)), cin.reshape(np.shape(t))


def _continued_fraction(t: np.ndarray):
    # E1(i t) = -Ci(t) + i (Si(t) - pi/2), by the modified Lentz continued fraction
    b = 1 + 1j * t
    c = np.full(t.shape, 1e300 + 0j)
    d = 1 / b
    h = d.copy()
    for i in range(2, _CF_MAX_ITER):
        a = -float((i - 1) ** 2)
        b = b + 2
        d = 1 / (a * d + b)
        c = b + a / c
        step = c * d
        h = h * step
        if np.all(np.abs(step - 1) < _CF_EPS):
            break
    e1 = (np.cos(t) - 1j * np.sin(t)) * h
    return np.pi / 2 + e1.imag, -e1.real


def _si_ci(t: np.ndarray):
    flat = np.atleast_1d(t).ravel()
    si = np.empty_like(flat)
    ci = np.empty_like(flat)
    low = flat <= SERIES_CUTOFF
    if np.any(low):
        si[low], ci[low], _ = _series(flat[low])
    if np.any(~low):
        si[~low], ci[~low] = _continued_fraction(flat[~low])
    return si.reshape(np.shape(t)), ci.reshape(np.shape(t))


def _positive(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(~(arr > 0)) or np.any(~np.isfinite(arr)):
        raise NonPositiveArgument("the cosine integral needs finite t > 0")
    return arr


def cosine_integral(t):
    """``Ci(t) = -int_t^inf cos(u)/u du`` for ``t > 0``.

    Power series up to ``t = 8``; beyond, the continued fraction of the
    exponential integral ``E1(i t)``.  Absolute error is below ``1e-12``.
    """
    arr = _positive(t)
    out = _si_ci(arr)[1]
    return float(out) if np.ndim(arr) == 0 else out


def sine_integral(t):
    """``Si(t) = int_0^t sin(u)/u du`` for ``t > 0``, same branches as :func:`cosine_integral`."""
    arr = _positive(t)
    out = _si_ci(arr)[0]
    return float(out) if np.ndim(arr) == 0 else out


# ---------------------------------------------------------------- kernels
def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not 0.0 <= tau <= 1.0:
        raise InputError(f"tau must lie in [0, 1], got {tau}")
    if tau == 0.5:
        raise TauHalf("the tau kernel degenerates at tau = 1/2")
    return tau


def _tau_function(tau: float) -> Callable:
    c = 2.0 / (2 * tau - 1)
    amp = 2.0 / abs(2 * tau - 1)

    def sigma(x, xi):
        return amp * np.exp(2j * np.pi * c * np.asarray(x) * np.asarray(xi))

    return sigma


def tau_kernel(tau: float, xgrid: AxisGrid, xigrid: Optional[AxisGrid] = None) -> TfArray:
    """``sigma_tau(x, xi) = 2/|2 tau - 1| exp(2 pi i (2/(2 tau - 1)) x xi)``."""
    fun = _tau_function(_check_tau(tau))
    return TfArray.from_tag(fun, xgrid, xigrid)


def tau_cell_average(tau: float, xgrid: AxisGrid, xigrid: Optional[AxisGrid] = None) -> TfArray:
    """Mean of ``sigma_tau`` over each grid cell.

    With ``kappa = 4 pi / (2 tau - 1)`` the double antiderivative of
    ``exp(i kappa x xi)`` depends on ``P = a b`` only and equals
    ``(-Cin(|kappa P|) + i sgn(kappa P) Si(|kappa P|)) / (i kappa)``.
    """
    tau = _check_tau(tau)
    xigrid = xgrid if xigrid is None else xigrid
    return TfArray(xgrid, xigrid, _tau_cell_values(tau, xgrid, xigrid))


@lru_cache(maxsize=8)
def _tau_cell_values(tau: float, xgrid: AxisGrid, xigrid: AxisGrid) -> np.ndarray:
    kappa = 4 * np.pi / (2 * tau - 1)
    amp = 2.0 / abs(2 * tau - 1)
    hx, hy = xgrid.delta, xigrid.delta
    cx = np.append(xgrid.nodes - hx / 2, xgrid.nodes[-1] + hx / 2)
    cy = np.append(xigrid.nodes - hy / 2, xigrid.nodes[-1] + hy / 2)
    z = kappa * np.outer(cx, cy)
    si, cin = _si_cin(np.abs(z))
    prim = (-cin + 1j * np.sign(z) * si) / (1j * kappa)
    total = prim[1:, 1:] - prim[:-1, 1:] - prim[1:, :-1] + prim[:-1, :-1]
    out = amp * total / (hx * hy)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class MaskedKernel:
    """Phase-space samples with masked (undefined) nodes."""

    xgrid: AxisGrid
    xigrid: AxisGrid
    values: np.ma.MaskedArray

    def filled(self) -> TfArray:
        """Replace masked nodes by the mean of their unmasked 4-neighbors.

        Nodes without unmasked 4-neighbors (the origin of a cross-shaped
        mask) use the unmasked diagonal neighbors instead.
        """
        v = np.ma.getdata(self.values).astype(complex)
        mask = np.ma.getmaskarray(self.values)
        good = ~mask
        vals = np.where(good, v, 0)
        out = vals.copy()

        def neighbor_mean(offsets):
            total = np.zeros_like(vals)
            count = np.zeros(vals.shape)
            for di, dj in offsets:
                total += _shift(vals, di, dj)
                count += _shift(good.astype(float), di, dj)
            return total, count

        total, count = neighbor_mean([(1, 0), (-1, 0), (0, 1), (0, -1)])
        diag_total, diag_count = neighbor_mean([(1, 1), (1, -1), (-1, 1), (-1, -1)])
        use4 = mask & (count > 0)
        use8 = mask & (count == 0) & (diag_count > 0)
        if np.any(mask & ~use4 & ~use8):
            raise InputError("a masked node has no unmasked neighbors")
        out[use4] = total[use4] / count[use4]
        out[use8] = diag_total[use8] / diag_count[use8]
        return TfArray(self.xgrid, self.xigrid, out)


def _shift(a: np.ndarray, di: int, dj: int) -> np.ndarray:
    out = np.zeros_like(a)
    n0, n1 = a.shape
    src0 = slice(max(0, di), n0 + min(0, di))
    dst0 = slice(max(0, -di), n0 + min(0, -di))
    src1 = slice(max(0, dj), n1 + min(0, dj))
    dst1 = slice(max(0, -dj), n1 + min(0, -dj))
    out[dst0, dst1] = a[src0, src1]
    return out


def born_jordan_kernel_d1(xgrid: AxisGrid, xigrid: Optional[AxisGrid] = None) -> MaskedKernel:
    """``-2 Ci(4 pi |zeta1 zeta2|)`` with the axis nodes masked."""
    xigrid = xgrid if xigrid is None else xigrid
    z1, z2 = np.meshgrid(xgrid.nodes, xigrid.nodes, indexing="ij")
    arg = 4 * np.pi * np.abs(z1 * z2)
    mask = arg == 0
    vals = np.zeros(arg.shape)
    vals[~mask] = -2.0 * cosine_integral(arg[~mask])
    return MaskedKernel(xgrid, xigrid, np.ma.MaskedArray(vals, mask=mask))


def _ci_area(P: np.ndarray) -> np.ndarray:
    """``int_0^a int_0^b Ci(4 pi s t) ds dt`` as a function of ``P = a b >= 0``."""
    out = np.zeros_like(P)
    m = P > 0
    k = 4 * np.pi * P[m]
    si, ci = _si_ci(k)
    out[m] = P[m] * ci - (np.sin(k) + si) / (4 * np.pi)
    return out


def born_jordan_cell_average(xgrid: AxisGrid, xigrid: Optional[AxisGrid] = None) -> TfArray:
    """Mean of ``-2 Ci(4 pi |zeta1 zeta2|)`` over each grid cell.

    Uses the closed-form double antiderivative
    ``P Ci(4 pi P) - (sin(4 pi P) + Si(4 pi P)) / (4 pi)`` with ``P = a b``,
    so cells on the axes get their exact (finite) average.
    """
    xigrid = xgrid if xigrid is None else xigrid
    return TfArray(xgrid, xigrid, _cell_average_values(xgrid, xigrid))


@lru_cache(maxsize=8)
def _cell_average_values(xgrid: AxisGrid, xigrid: AxisGrid) -> np.ndarray:
    hx, hy = xgrid.delta, xigrid.delta
    cx = np.append(xgrid.nodes - hx / 2, xgrid.nodes[-1] + hx / 2)
    cy = np.append(xigrid.nodes - hy / 2, xigrid.nodes[-1] + hy / 2)
    prim = np.outer(np.sign(cx), np.sign(cy)) * _ci_area(np.abs(np.outer(cx, cy)))
    total = prim[1:, 1:] - prim[:-1, 1:] - prim[1:, :-1] + prim[:-1, :-1]
    out = -2.0 * total / (hx * hy)
    out.setflags(write=False)
    return out


_SAMPLINGS = {"tau": ("auto", "point", "cell"), "born-jordan": ("cell", "neighbor")}
_MASS_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class CohenKernel:
    """A Cohen kernel: ``tau``, ``born-jordan``, ``delta`` or ``custom``.

    ``custom`` takes either a callable ``(x, xi)`` or a :class:`TfArray`
    whose spacings match the Wigner grid of the signal.  The Born-Jordan
    kernel is sampled by cell averages (``sampling="cell"``, the default)
    or by point values with neighbor-filled axes (``"neighbor"``).  The
    ``tau`` kernels take ``"point"``, ``"cell"`` or ``"auto"`` (default).
    """

    kind: str
    tau: Optional[float] = None
    custom: Optional[object] = None
    sampling: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("tau", "born-jordan", "delta", "custom"):
            raise InputError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "tau":
            object.__setattr__(self, "tau", _check_tau(self.tau if self.tau is not None else -1))
        allowed = _SAMPLINGS.get(self.kind, (None,))
        if self.sampling is None:
            object.__setattr__(self, "sampling", allowed[0])
        if self.sampling not in allowed:
            raise InputError(f"sampling {self.sampling!r} is not available for {self.kind} kernels")
        if self.kind == "custom" and self.custom is None:
            raise InputError("a custom kernel needs a callable or a TfArray")

    @classmethod
    def parse(cls, text: str) -> "CohenKernel":
        """``tau:<value>``, ``bj`` or ``delta``."""
        s = text.strip().lower()
        if s.startswith("tau:"):
            try:
                return cls("tau", float(s[4:]))
            except ValueError as exc:
                raise InputError(f"bad tau value in {text!r}") from exc
        if s in ("bj", "born-jordan"):
            return cls("born-jordan")
        if s == "delta":
            return cls("delta")
        raise InputError(f"unknown kernel {text!r}")

    def label(self) -> str:
        return f"tau:{self.tau!r}" if self.kind == "tau" else self.kind

    def sampled(self, xgrid: AxisGrid, xigrid: AxisGrid, sampling: Optional[str] = None) -> np.ndarray:
        """Centered kernel samples with the spacings of ``xgrid x xigrid``.

        ``sampling`` overrides the kernel's own mode; ``"auto"`` yields
        point samples here and is resolved by :func:`cohen_distribution`.
        """
        sampling = self.sampling if sampling is None else sampling
        cell = xgrid.delta * xigrid.delta
        if self.kind == "delta":
            return np.full((1, 1), 1.0 / cell, dtype=complex)
        if self.kind == "custom" and isinstance(self.custom, TfArray):
            k = self.custom
            if k.xgrid.delta != xgrid.delta or k.xigrid.delta != xigrid.delta:
                raise InputError("custom kernel spacings must match the Wigner grid")
            return np.asarray(k.values)
        big_x = AxisGrid(2 * xgrid.n, xgrid.delta)
        big_xi = AxisGrid(2 * xigrid.n, xigrid.delta)
        if self.kind == "born-jordan":
            if sampling == "neighbor":
                return np.asarray(born_jordan_kernel_d1(big_x, big_xi).filled().values)
            return np.asarray(born_jordan_cell_average(big_x, big_xi).values)
        if self.kind == "tau" and sampling == "cell":
            return np.asarray(tau_cell_average(self.tau, big_x, big_xi).values)
        fun = _tau_function(self.tau) if self.kind == "tau" else self.custom
        return np.asarray(TfArray.from_tag(fun, big_x, big_xi).values)


def cohen_distribution(f: SampledSignal, kernel: CohenKernel,
                       xgrid: Optional[AxisGrid] = None,
                       xigrid: Optional[AxisGrid] = None) -> TfArray:
    """``W(f, f) * sigma`` as a Riemann-sum convolution on the Wigner grid.

    With ``"auto"`` sampling of a ``tau`` kernel the point-sampled result
    is kept when its mass matches that of ``W(f, f)`` to a relative
    ``1e-6``; otherwise the cell-averaged kernel is used.
    """
    dx, dxi = wigner_grid(f.grid)
    xgrid = dx if xgrid is None else xgrid
    xigrid = dxi if xigrid is None else xigrid
    W = cross_wigner(f, f, xgrid, xigrid)
    if kernel.kind == "delta":
        return W
    k = kernel.sampled(xgrid, xigrid)
    vals = centered_convolve(k, W.values, W.values.shape) * W.cell
    if kernel.sampling == "auto":
        mass = np.sum(W.values).real
        if abs(np.sum(vals) - mass) > _MASS_RTOL * abs(mass):
            k = kernel.sampled(xgrid, xigrid, "cell")
            vals = centered_convolve(k, W.values, W.values.shape) * W.cell
    return TfArray(xgrid, xigrid, vals)


def cohen_condition_holds(p1, q1, p, q) -> bool:
    """``2 min(1/p1, 1/q1) >= 1/p + 1/q``."""
    p1, q1, p, q = (ExtReal.parse(v) for v in (p1, q1, p, q))
    return 2 * min(p1.reciprocal, q1.reciprocal) >= p.reciprocal + q.reciprocal


def cohen_bound_check(f: SampledSignal, kernel: CohenKernel, p1, q1, p, q, s: float = 0.0,
                      lattice: int = 32) -> float:
    """``||M(f, f)||_{M^{p,q}_{1 (x) v_s}} / ||f||^2_{M^{p1,q1}_{v_s}}``."""
    if s < 0:
        raise NegativeWeightOrder("the Cohen bound needs s >= 0")
    if not cohen_condition_holds(p1, q1, p, q):
        raise IndexConditionViolated("2 min(1/p1, 1/q1) >= 1/p + 1/q fails")
    M = cohen_distribution(f, kernel)
    num = modulation_norm_phase_space(M, p, q, s, lattice=lattice)
    den = modulation_norm(f, p1, q1, s) ** 2
    return num / den
