"""Closed-form Gaussian formulas used as ground truth.

Conventions: ``phi(t) = exp(-pi t^2)``, ``phi_lam(t) = exp(-pi lam t^2)`` and
the phase-space window ``Phi0(x, xi) = exp(-pi (x^2 + xi^2))``.  Exponents
are :class:`~tfbounds.norms.ExtReal` values or anything it can parse; all
exponent algebra for slopes is done with :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InputError, NonPositiveLambda
from .exponents import ExtReal

__all__ = [
    "GenGaussian",
    "WignerGaussCoeffs",
    "wigner_gaussian_pair",
    "wigner_gaussian_diag",
    "stft_gen_gaussian",
    "mod_norm_gen_gaussian",
    "gen_gaussian_norm_exact",
    "wigner_mixed_norm_asymptotic",
    "gaussian_mod_norm_asymptotic",
    "wigner_norm_slopes",
    "gaussian_norm_slopes",
    "log_slope",
    "PHI0",
]


@dataclass(frozen=True)
class GenGaussian:
    """``amplitude * exp(-pi a x^2) exp(-pi b xi^2) exp(2 pi i c x xi)``.

    Optional centers ``(x0, xi0)`` translate the function in phase space; the
    closed forms below assume a centered function.
    """

    a: float
    b: float
    c: float = 0.0
    amplitude: float = 1.0
    d: int = 1
    x0: float = 0.0
    xi0: float = 0.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise InputError("generalized Gaussians need a, b > 0")
        if not self.amplitude > 0:
            raise InputError("amplitude must be positive")
        if int(self.d) != self.d or self.d < 1:
            raise InputError("dimension must be a positive integer")

    def __call__(self, x, xi) -> np.ndarray:
        x = np.asarray(x, dtype=float) - self.x0
        xi = np.asarray(xi, dtype=float) - self.xi0
        return self.amplitude * np.exp(
            -np.pi * (self.a * x * x + self.b * xi * xi) + 2j * np.pi * self.c * x * xi
        )

    @property
    def centered(self) -> bool:
        return self.x0 == 0 and self.xi0 == 0


PHI0 = GenGaussian(1.0, 1.0, 0.0, 1.0)


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not lam > 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    return lam


@dataclass(frozen=True)
class WignerGaussCoeffs:
    """Coefficients of ``W(phi, phi_lam)`` as a generalized Gaussian."""

    lam: float
    a: float
    b: float
    c: float
    amplitude: float

    @classmethod
    def from_lambda(cls, lam: float, d: int = 1) -> "WignerGaussCoeffs":
        lam = _check_lambda(lam)
        return cls(
            lam,
            4 * lam / (1 + lam),
            4 / (1 + lam),
            2 * (1 - lam) / (1 + lam),
            2.0 ** d / (1 + lam) ** (d / 2),
        )


def wigner_gaussian_pair(lam: float, d: int = 1) -> GenGaussian:
    """``W(phi, phi_lam)`` in closed form."""
    k = WignerGaussCoeffs.from_lambda(lam, d)
    return GenGaussian(k.a, k.b, k.c, k.amplitude, d)


def wigner_gaussian_diag(lam: float, d: int = 1) -> GenGaussian:
    """``W(phi_lam, phi_lam) = 2^{d/2} lam^{-d/2} phi_{2 lam}(x) phi_{2/lam}(xi)``.

    Returned as a separable generalized Gaussian (``c = 0``): ``a = 2 lam``
    is the time factor, ``b = 2/lam`` the frequency factor.
    """
    lam = _check_lambda(lam)
    return GenGaussian(2 * lam, 2 / lam, 0.0, 2.0 ** (d / 2) * lam ** (-d / 2), d)


def stft_gen_gaussian(G: GenGaussian, z, zeta) -> np.ndarray:
    """``V_Phi0 G(z, zeta)`` for a centered generalized Gaussian.

    ``z = (z1, z2)`` and ``zeta = (zeta1, zeta2)`` broadcast as arrays (for
    ``d > 1`` each component carries a trailing axis of length ``d``).  The
    Gaussian integral is evaluated in closed form; with
    ``D = (a+1)(b+1) + c^2`` the result is

        D^{-d/2} exp(-pi Q / D) exp(2 pi i P / D),
        Q = (a(b+1)+c^2) z1^2 + ((a+1)b+c^2) z2^2 + (b+1) zeta1^2
            + (a+1) zeta2^2 - 2c (z1 zeta2 + z2 zeta1),
        P = c (z1 z2 - zeta1 zeta2) - (b+1) z1 zeta1 - (a+1) z2 zeta2.
    """
    if not G.centered:
        raise InputError("the closed form covers centered generalized Gaussians")
    a, b, c, d = G.a, G.b, G.c, G.d
    z1, z2 = (np.asarray(v, dtype=float) for v in z)
    s1, s2 = (np.asarray(v, dtype=float) for v in zeta)
    D = (a + 1) * (b + 1) + c * c

    def dot(u, v):
        return np.sum(u * v, axis=-1) if d > 1 else u * v

    quad = ((a * (b + 1) + c * c) * dot(z1, z1) + ((a + 1) * b + c * c) * dot(z2, z2)
            + (b + 1) * dot(s1, s1) + (a + 1) * dot(s2, s2)
            - 2 * c * (dot(z1, s2) + dot(z2, s1)))
    phase = (c * (dot(z1, z2) - dot(s1, s2)) - (b + 1) * dot(z1, s1) - (a + 1) * dot(z2, s2))
    return G.amplitude * D ** (-d / 2) * np.exp(-np.pi * quad / D + 2j * np.pi * phase / D)


def _recips(p, q):
    return ExtReal.parse(p).reciprocal, ExtReal.parse(q).reciprocal


def mod_norm_gen_gaussian(G: GenGaussian, p, q) -> float:
    """Closed-form representative of ``||G||_{M^{p,q}}`` up to a constant.

    The amplitude is ignored (callers scale externally).  See
    :func:`gen_gaussian_norm_exact` for the exact value with window Phi0.
    """
    ip, iq = (float(v) for v in _recips(p, q))
    a, b, c, d = G.a, G.b, G.c, G.d
    D = (a + 1) * (b + 1) + c * c
    P = (c * c + a * b + a) * (c * c + a * b + b)
    den1 = b * b * (a + 1) + b * (c * c + a + 1)
    den2 = a * a * (b + 1) + a * (c * c + b + 1)
    return (D ** (d * ip + d * iq - d / 2) * P ** (d * iq / 2 - d * ip / 2)
            / (den1 ** (d * iq / 2) * den2 ** (d * iq / 2)))


def gen_gaussian_norm_exact(G: GenGaussian, p, q) -> float:
    """Exact ``||V_Phi0 G||_{L^{p,q}}``: the closed form times ``p^{-d/p} q^{-d/q}``.

    The two bracketed denominators of the closed form simplify to ``b D``
    and ``a D``, after which the Gaussian integrals can be done exactly.
    """
    ip, iq = (float(v) for v in _recips(p, q))
    const = (ip ** (G.d * ip) if ip else 1.0) * (iq ** (G.d * iq) if iq else 1.0)
    return G.amplitude * const * mod_norm_gen_gaussian(G, p, q)


def wigner_mixed_norm_asymptotic(lam: float, p, q, d: int = 1) -> float:
    """Size of ``||W(phi, phi_lam)||_{M^{p,q}}`` up to a lam-independent constant."""
    lam = _check_lambda(lam)
    ip, iq = (float(v) for v in _recips(p, q))
    return (((2 * lam + 1) * (lam + 2)) ** (d * iq / 2 - d * ip / 2)
            / (lam ** (d * iq / 2) * (1 + lam) ** (d / 2 - d * ip)))


def gaussian_mod_norm_asymptotic(lam: float, r, s, d: int = 1) -> float:
    """Size of ``||phi_lam||_{M^{r,s}}`` up to a lam-independent constant."""
    lam = _check_lambda(lam)
    ir, is_ = (float(v) for v in _recips(r, s))
    return lam ** (-d * ir / 2) * (lam + 1) ** (-(d / 2) * (1 - ir - is_))


def wigner_norm_slopes(p, q, d: int = 1) -> tuple:
    """Exact log-log slopes ``(lam -> 0, lam -> inf)`` of the Wigner asymptotic."""
    ip, iq = _recips(p, q)
    d = Fraction(d)
    return (-d * iq / 2, d * (iq / 2 - Fraction(1, 2)))


def gaussian_norm_slopes(r, s, d: int = 1) -> tuple:
    """Exact log-log slopes ``(lam -> 0, lam -> inf)`` of ``||phi_lam||_{M^{r,s}}``."""
    ir, is_ = _recips(r, s)
    d = Fraction(d)
    return (-d * ir / 2, -d / 2 + d * is_ / 2)


def log_slope(fun, lam1: float, lam2: float) -> float:
    """Finite-difference slope of ``log fun`` against ``log lam``."""
    return (math.log(fun(lam2)) - math.log(fun(lam1))) / (math.log(lam2) - math.log(lam1))
