"""Index conditions for Wigner boundedness and dilation experiments.

Three Gaussian witness families are swept over a geometric range of ``lam``:

* ``diag``: ``W(phi_lam, phi_lam)`` against ``||phi_lam||_{p1,q1} ||phi_lam||_{p2,q2}``;
* ``off``: ``W(phi, phi_lam)`` against ``||phi||_{p1,q1} ||phi_lam||_{p2,q2}``;
* ``off-conj``: ``W(phi_lam, phi)`` against ``||phi_lam||_{p1,q1} ||phi||_{p2,q2}``.

The diagonal family detects the two sum conditions, the off-diagonal
families the four ``<= q`` conditions.  Log-log slopes of the ratio at both
ends of the range are fitted by least squares and compared with the exact
rational predictions.

Each ``lam`` gets its own signal grid, sized so both Gaussians and their
STFTs fit with tails below ``exp(-pi C^2)``.  STFT magnitudes are sampled on
a phase-plane lattice of spacing ``1/(8 r)`` for resolution ``r``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (IndexConditionViolated, InputError, NegativeWeightOrder, NonPositiveLambda,
                     ResolutionInsufficient)
from .exponents import ExtReal
from .norms import _mixed_core, factored_wigner_norm, modulation_norm, wigner_mod_norm
from .oracles import gaussian_norm_slopes, wigner_norm_slopes
from .signals import AxisGrid, SampledSignal, gaussian
from .transforms import stft

__all__ = [
    "IndexTuple",
    "ConditionReport",
    "SweepReport",
    "FAMILIES",
    "check_conditions",
    "predicted_ratio_slopes",
    "default_lambdas",
    "off_diagonal_wigner_norm",
    "sweep",
    "verify_symmetric_weighted_bound",
    "regression_tuples",
    "SLOPE_TOL",
    "MAX_GRID",
]

FAMILIES = ("diag", "off", "off-conj")
SLOPE_TOL = 0.05
MAX_GRID = 2 ** 15
_TAIL = 4.5
_BASE_STEP = 1.0 / 8


@dataclass(frozen=True)
class IndexTuple:
    """The six exponents ``(p1, q1, p2, q2, p, q)``."""

    p1: ExtReal
    q1: ExtReal
    p2: ExtReal
    q2: ExtReal
    p: ExtReal
    q: ExtReal

    def __post_init__(self):
        for name in ("p1", "q1", "p2", "q2", "p", "q"):
            object.__setattr__(self, name, ExtReal.parse(getattr(self, name)))

    @classmethod
    def parse(cls, text) -> "IndexTuple":
        """From ``"p1,q1,p2,q2,p,q"`` (``inf`` and ``4/3`` accepted) or a sequence."""
        parts = text.replace(";", ",").split(",") if isinstance(text, str) else list(text)
        if len(parts) != 6:
            raise InputError(f"expected six exponents, got {len(parts)}")
        return cls(*(ExtReal.parse(p) for p in parts))

    def as_tuple(self) -> tuple:
        return (self.p1, self.q1, self.p2, self.q2, self.p, self.q)

    def __str__(self) -> str:
        return ",".join(str(e) for e in self.as_tuple())


@dataclass(frozen=True)
class ConditionReport:
    bounded: bool
    failures: Tuple[str, ...]


def check_conditions(t: IndexTuple) -> ConditionReport:
    """Evaluate the four ``<= q`` conditions and the two reciprocal-sum conditions."""
    r = {k: getattr(t, k).reciprocal for k in ("p1", "q1", "p2", "q2", "p", "q")}
    target = r["p"] + r["q"]
    clauses = [
        ("p1 <= q", t.p1 <= t.q),
        ("q1 <= q", t.q1 <= t.q),
        ("p2 <= q", t.p2 <= t.q),
        ("q2 <= q", t.q2 <= t.q),
        ("1/p1 + 1/p2 >= 1/p + 1/q", r["p1"] + r["p2"] >= target),
        ("1/q1 + 1/q2 >= 1/p + 1/q", r["q1"] + r["q2"] >= target),
    ]
    failures = tuple(name for name, ok in clauses if not ok)
    return ConditionReport(not failures, failures)


def predicted_ratio_slopes(t: IndexTuple, family: str) -> Tuple[Fraction, Fraction]:
    """Exact ``(slope as lam -> 0, slope as lam -> inf)`` of the family's norm ratio."""
    if family == "diag":
        r = [e.reciprocal for e in t.as_tuple()]
        rp1, rq1, rp2, rq2, rp, rq = r
        return ((rp1 + rp2 - rp - rq) / 2, (rp + rq - rq1 - rq2) / 2)
    num0, numinf = wigner_norm_slopes(t.p, t.q)
    if family == "off":
        den0, deninf = gaussian_norm_slopes(t.p2, t.q2)
    elif family == "off-conj":
        den0, deninf = gaussian_norm_slopes(t.p1, t.q1)
    else:
        raise InputError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return (num0 - den0, numinf - deninf)


# ---------------------------------------------------------------- grids and tables
def _pow2_ceil(x: float) -> int:
    return 1 << max(3, math.ceil(math.log2(max(x, 1.0))))


def _pow2_floor(x: float) -> float:
    return 2.0 ** math.floor(math.log2(x))


@dataclass(frozen=True)
class _Plan:
    grid: AxisGrid
    xgrid: AxisGrid
    xigrid: AxisGrid


def _plan(pairs: Sequence[Tuple[float, float]], resolution: float) -> _Plan:
    """Signal grid and phase-plane lattice covering ``|V_{phi_b} phi_a|`` for every ``(a, b)``.

    ``|V_{phi_b} phi_a|`` is a Gaussian with time half-width
    ``C sqrt(1/a + 1/b)`` and frequency half-width ``C sqrt(a + b)``.
    """
    h = _BASE_STEP / resolution
    X = max(_TAIL * math.sqrt(1 / a + 1 / b) for a, b in pairs)
    Xi = max(_TAIL * math.sqrt(a + b) for a, b in pairs)
    tx = max(_TAIL / math.sqrt(v) for pair in pairs for v in pair)
    delta = _pow2_floor(min(h, 1 / (2 * Xi)))
    half = max(tx, X, 1 / (2 * h))
    n = _pow2_ceil(2 * half / delta)
    if n > MAX_GRID:
        raise ResolutionInsufficient(
            f"dilation range needs a {n}-point grid (cap {MAX_GRID}); narrow the lambda range"
        )
    grid = AxisGrid(n, delta)
    sx = max(1, int(round(_pow2_floor(h) / delta)))
    nx = min(_pow2_ceil(2 * X / (sx * delta)), n // sx)
    L = grid.extent
    sxi = max(1, int(round(_pow2_floor(h * L))))
    nxi = min(_pow2_ceil(2 * Xi / (sxi / L)), n // sxi)
    return _Plan(grid, AxisGrid(nx, sx * delta), AxisGrid(nxi, sxi / L))


def _magnitude(plan: _Plan, lam: float, window_lam: float) -> np.ndarray:
    f = gaussian(lam, plan.grid)
    g = gaussian(window_lam, plan.grid)
    return np.abs(stft(f, g, plan.xgrid, plan.xigrid).values)


@lru_cache(maxsize=32)
def _offdiag_tables(lam: float, resolution: float):
    plan = _plan([(1.0, 1.0), (lam, 1.0)], resolution)
    return (plan.xgrid.delta, plan.xigrid.delta,
            _magnitude(plan, 1.0, 1.0), _magnitude(plan, lam, 1.0))


@lru_cache(maxsize=96)
def _dilation_table(mu: float, window_lam: float, resolution: float):
    plan = _plan([(mu, window_lam)], resolution)
    return plan.xgrid.delta, plan.xigrid.delta, _magnitude(plan, mu, window_lam)


def _table_norm(table, p: ExtReal, q: ExtReal) -> float:
    hx, hxi, a = table
    return _mixed_core(a, 0, hx, hxi, p, q)


@lru_cache(maxsize=4096)
def _offdiag_numerator(lam: float, resolution: float, p: ExtReal, q: ExtReal, conj: bool) -> float:
    hx, hxi, a0, al = _offdiag_tables(lam, resolution)
    v1, v2 = (al, a0) if conj else (a0, al)
    return factored_wigner_norm(v1, v2, hx, hxi, p, q)


@lru_cache(maxsize=4096)
def _gaussian_norm(lam: float, resolution: float, p: ExtReal, q: ExtReal) -> float:
    return _table_norm(_dilation_table(lam, 1.0, resolution), p, q)


def off_diagonal_wigner_norm(lam: float, p, q, resolution: float = 1.0,
                             conjugate: bool = False) -> float:
    """``||W(phi, phi_lam)||_{M^{p,q}}`` (``W(phi_lam, phi)`` if ``conjugate``) on an adaptive grid."""
    p, q = ExtReal.parse(p), ExtReal.parse(q)
    if p.is_inf and not q.is_inf:
        raise InputError("p = inf with finite q is outside the sweep's numerator route")
    if not lam > 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    return _offdiag_numerator(float(lam), float(resolution), p, q, bool(conjugate))


def _diag_numerator(lam: float, resolution: float, p: ExtReal, q: ExtReal) -> float:
    # W(phi_lam, phi_lam) = sqrt(2) lam^{-1/2} phi_{2 lam} (x) phi_{2/lam} and
    # W(phi, phi) = sqrt(2) phi_2 (x) phi_2, so the 4D STFT factorizes.
    n1 = _table_norm(_dilation_table(2 * lam, 2.0, resolution), p, q)
    n2 = _table_norm(_dilation_table(2 / lam, 2.0, resolution), p, q)
    return 2.0 * lam ** -0.5 * n1 * n2


def _ratio(t: IndexTuple, family: str, lam: float, resolution: float) -> float:
    if family == "diag":
        num = _diag_numerator(lam, resolution, t.p, t.q)
        den = _gaussian_norm(lam, resolution, t.p1, t.q1) * _gaussian_norm(lam, resolution, t.p2, t.q2)
    elif family == "off":
        num = _offdiag_numerator(lam, resolution, t.p, t.q, False)
        den = _gaussian_norm(1.0, resolution, t.p1, t.q1) * _gaussian_norm(lam, resolution, t.p2, t.q2)
    else:
        num = _offdiag_numerator(lam, resolution, t.p, t.q, True)
        den = _gaussian_norm(lam, resolution, t.p1, t.q1) * _gaussian_norm(1.0, resolution, t.p2, t.q2)
    return num / den


# ---------------------------------------------------------------- sweeps
@dataclass(frozen=True)
class SweepReport:
    family: str
    indices: IndexTuple
    lambdas: Tuple[float, ...]
    ratios: Tuple[float, ...]
    slope0: float
    slope_inf: float
    predicted: Tuple[Fraction, Fraction]
    verdict: str
    unbounded_ends: Tuple[str, ...] = field(default=())
    resolution: float = 1.0

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "indices": str(self.indices),
            "lambdas": list(self.lambdas),
            "ratios": list(self.ratios),
            "slope0": self.slope0,
            "slope_inf": self.slope_inf,
            "predicted_slope0": str(self.predicted[0]),
            "predicted_slope_inf": str(self.predicted[1]),
            "verdict": self.verdict,
            "unbounded_ends": list(self.unbounded_ends),
            "resolution": self.resolution,
        }


def default_lambdas(kmin: int = -10, kmax: int = 10) -> List[float]:
    return [2.0 ** k for k in range(kmin, kmax + 1)]


def _validate_lambdas(lams: Sequence[float]) -> List[float]:
    lams = sorted(float(v) for v in lams)
    if len(lams) < 6:
        raise InputError("a sweep needs at least 6 lambda values")
    if lams[0] <= 0:
        raise InputError("lambda values must be positive")
    logs = np.log(lams)
    steps = np.diff(logs)
    if np.any(steps <= 0) or np.ptp(steps) > 1e-6 * steps.mean():
        raise InputError("lambda values must form a geometric progression")
    if lams[-1] / lams[0] < 2 ** 10 * (1 - 1e-12):
        raise InputError("the lambda range must span at least 2^10")
    return lams


def _fit_slope(lams, ratios) -> float:
    return float(np.polyfit(np.log(lams), np.log(ratios), 1)[0])


def sweep(t: IndexTuple, family: str, lambdas: Optional[Sequence[float]] = None,
          resolution: float = 1.0, tail: int = 3) -> SweepReport:
    """Numeric dilation sweep of one witness family.

    The tail slopes are least-squares fits over the ``tail`` smallest and the
    ``tail`` largest ``lam``.  A slope below ``-SLOPE_TOL`` at the lower end or
    above ``SLOPE_TOL`` at the upper end marks the ratio as unbounded there.
    """
    if family not in FAMILIES:
        raise InputError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if t.p.is_inf and not t.q.is_inf:
        raise InputError("p = inf with finite q is outside the sweep's numerator route")
    lams = default_lambdas() if lambdas is None else _validate_lambdas(lambdas)
    tail = max(3, tail)
    ratios = [_ratio(t, family, lam, float(resolution)) for lam in lams]
    s0 = _fit_slope(lams[:tail], ratios[:tail])
    sinf = _fit_slope(lams[-tail:], ratios[-tail:])
    ends = []
    if s0 < -SLOPE_TOL:
        ends.append("zero")
    if sinf > SLOPE_TOL:
        ends.append("infinity")
    verdict = ("UnboundedAtZero" if "zero" in ends else
               "UnboundedAtInfinity" if ends else "Bounded")
    return SweepReport(family, t, tuple(lams), tuple(ratios), s0, sinf,
                       predicted_ratio_slopes(t, family), verdict, tuple(ends), float(resolution))


def regression_tuples(per_category: int = 6, n_bounded: int = 10, seed: int = 7) -> List[IndexTuple]:
    """Deterministic regression set over exponents ``{1, 4/3, 2, 4, inf}``.

    Contains satisfying tuples, ``per_category`` tuples for each single
    violated clause, and a few tuples violating several clauses.  Tuples with
    ``p = inf < q`` are left out (no convolution route for the numerator).
    """
    values = [ExtReal.parse(v) for v in ("1", "4/3", "2", "4", "inf")]
    by_failure = {}
    for combo in itertools.product(values, repeat=6):
        t = IndexTuple(*combo)
        if t.p.is_inf and not t.q.is_inf:
            continue
        by_failure.setdefault(check_conditions(t).failures, []).append(t)
    rng = random.Random(seed)
    picked = []
    for key in sorted(by_failure, key=lambda k: (len(k), k)):
        pool = sorted(by_failure[key], key=str)
        rng.shuffle(pool)
        if len(key) == 0:
            picked += pool[:n_bounded]
        elif len(key) == 1:
            picked += pool[:per_category]
    multi = sorted((k for k in by_failure if len(k) >= 2), key=lambda k: (len(k), k))
    for key in multi[:: max(1, len(multi) // 4)][:4]:
        picked.append(sorted(by_failure[key], key=str)[0])
    return picked


# ---------------------------------------------------------------- weighted bound
def verify_symmetric_weighted_bound(f1: SampledSignal, f2: SampledSignal, t: IndexTuple,
                                    s: float, max_side: int = 128) -> float:
    """Ratio of the weighted Wigner norm to the symmetric product of weighted norms."""
    if s < 0:
        raise NegativeWeightOrder("the symmetric bound needs s >= 0")
    rep = check_conditions(t)
    if not rep.bounded:
        raise IndexConditionViolated("index conditions fail: " + "; ".join(rep.failures))
    grid = f1.grid
    side = 64 if t.p.is_inf and not (t.q.is_inf and s == 0) else max_side
    xg = grid.decimated(max(1, grid.n // side))
    xig = grid.dual().decimated(max(1, grid.n // side))
    num = wigner_mod_norm(f1, f2, t.p, t.q, s, xgrid=xg, xigrid=xig)
    a0 = modulation_norm(f1, t.p1, t.q1, 0)
    a1 = modulation_norm(f1, t.p1, t.q1, s)
    b0 = modulation_norm(f2, t.p2, t.q2, 0)
    b1 = modulation_norm(f2, t.p2, t.q2, s)
    return num / (a0 * b1 + a1 * b0)
