"""Self-check suites run by ``tfbounds verify``.

Each suite returns a list of checks ``{"name", "value", "tolerance",
"passed"}``; ``value`` is the measured discrepancy (or statistic) that is
compared against ``tolerance``.
"""

from __future__ import annotations

from typing import Callable, Dict, List

import numpy as np

from .cohen import CohenKernel, cohen_distribution, cosine_integral
from .norms import amalgam_norm, modulation_norm_phase_space
from .oracles import (PHI0, GenGaussian, gen_gaussian_norm_exact, stft_gen_gaussian,
                      wigner_gaussian_pair, wigner_norm_slopes)
from .sharpness import off_diagonal_wigner_norm
from .quantization import weak_identity_residuals, weyl_matrix
from .signals import AxisGrid, DEFAULT_GRID, TfArray, gaussian, inner_product
from .transforms import ambiguity, cross_wigner, stft2d

__all__ = ["SUITES", "run_suite"]

CI_ONE = 0.337403922900968


def _check(name: str, value: float, tol: float, *, upper: bool = True) -> dict:
    value = float(value)
    passed = value <= tol if upper else value >= tol
    return {"name": name, "value": value, "tolerance": tol, "passed": bool(passed)}


def _pairs(grid: AxisGrid):
    fs = [gaussian(1.0, grid), gaussian(2.0, grid, 1.0, -1.0), gaussian(0.5, grid, -1.5, 2.0)]
    return [(a, b) for a in fs for b in fs]


def suite_moyal(grid: AxisGrid = DEFAULT_GRID) -> List[dict]:
    out = []
    for k, (f1, f2) in enumerate(_pairs(grid)):
        W = cross_wigner(f1, f2)
        rel = abs(W.l2_norm() / (f1.norm() * f2.norm()) - 1)
        out.append(_check(f"moyal pair {k}", rel, 1e-7))
    return out


def suite_gaussian_oracles(grid: AxisGrid = DEFAULT_GRID) -> List[dict]:
    out = []
    phi = gaussian(1.0, grid)
    for lam in (0.25, 1.0, 4.0):
        W = cross_wigner(phi, gaussian(lam, grid))
        x, xi = W.mesh
        err = np.max(np.abs(W.values - wigner_gaussian_pair(lam)(x, xi)))
        out.append(_check(f"cross-Wigner closed form lam={lam}", err, 1e-8))
    pgrid = AxisGrid(128, 1.0 / 16)
    G = GenGaussian(2.0, 3.0, 1.0)
    F = TfArray.from_tag(G, pgrid)
    win = TfArray.from_tag(PHI0, pgrid)
    zg = (pgrid.decimated(16), pgrid.decimated(16))
    zeta = (pgrid.dual().decimated(16), pgrid.dual().decimated(16))
    V = stft2d(F, win, zg, zeta)
    z1, z2, s1, s2 = np.meshgrid(*V.axes, indexing="ij")
    ref = stft_gen_gaussian(G, (z1, z2), (s1, s2))
    err = np.max(np.abs(V.values - ref)) / np.max(np.abs(ref))
    out.append(_check("generalized Gaussian STFT closed form", err, 1e-6))
    pgrid = AxisGrid(64, 1.0 / 8)
    for a, b, c in ((1.0, 1.0, 0.0), (2.0, 1.0, 1.0)):
        G = GenGaussian(a, b, c)
        num = modulation_norm_phase_space(TfArray.from_tag(G, pgrid), 2, 2, window=PHI0, lattice=32)
        out.append(_check(f"M^2 norm closed form (a,b,c)=({a},{b},{c})",
                          abs(num / gen_gaussian_norm_exact(G, 2, 2) - 1), 0.02))
    s0, sinf = wigner_norm_slopes(2, 2)
    lo = [2.0 ** k for k in (-10, -9, -8)]
    hi = [2.0 ** k for k in (8, 9, 10)]
    for label, lams, pred in (("lam -> 0", lo, s0), ("lam -> inf", hi, sinf)):
        vals = [off_diagonal_wigner_norm(lam, 2, 2) for lam in lams]
        slope = np.polyfit(np.log(lams), np.log(vals), 1)[0]
        out.append(_check(f"Wigner M^2 norm slope {label}", abs(slope - float(pred)), 0.05))
    return out


def suite_lemma41(grid: AxisGrid = AxisGrid(64, 1.0 / 8)) -> List[dict]:
    out = []
    pairs = [(gaussian(1.0, grid), gaussian(1.0, grid)),
             (gaussian(2.0, grid), gaussian(1.0, grid, 0.5, 0.5))]
    for k, (f1, f2) in enumerate(pairs):
        W = cross_wigner(f1, f2, grid, grid)
        A = ambiguity(f1, f2, grid, grid)
        m = modulation_norm_phase_space(W, 2, 2, lattice=32)
        w = amalgam_norm(A, 2, 2, lattice=32)
        out.append(_check(f"modulation vs amalgam pair {k}", abs(m / w - 1), 0.02))
    return out


def suite_weak_identity(grid: AxisGrid = DEFAULT_GRID) -> List[dict]:
    out = []
    for label, sigma in (("gen-gaussian", GenGaussian(1.0, 0.5, 0.3)),
                         ("wigner-phi", GenGaussian(2.0, 2.0, 0.0, 2 ** 0.5))):
        rows = weak_identity_residuals(sigma, _pairs(grid))
        worst = max(r["residual"] / r["scale"] for r in rows)
        out.append(_check(f"weak identity {label}", worst, 1e-5))
    ident = weyl_matrix(1.0, grid)
    out.append(_check("constant symbol gives identity", np.max(np.abs(ident.matrix - np.eye(grid.n))), 1e-6))
    phi = gaussian(1.0, grid)
    P = weyl_matrix(GenGaussian(2.0, 2.0, 0.0, 2 ** 0.5), grid)
    err = 0.0
    for f, _ in _pairs(grid)[::3]:
        err = max(err, np.max(np.abs(P.apply(f).samples - inner_product(f, phi) * phi.samples)))
    out.append(_check("Wigner symbol gives rank-one operator", err, 1e-6))
    return out


def suite_cohen(grid: AxisGrid = DEFAULT_GRID) -> List[dict]:
    out = []
    phi = gaussian(1.0, grid)
    W = cross_wigner(phi, phi)
    M = cohen_distribution(phi, CohenKernel("delta"))
    out.append(_check("delta kernel reproduces W", np.max(np.abs(M.values - W.values)), 0.0))
    out.append(_check("Ci(1)", abs(cosine_integral(1.0) - CI_ONE), 1e-12))
    seam = abs(cosine_integral(8.0) - cosine_integral(np.nextafter(8.0, 9.0)))
    out.append(_check("Ci branch seam at 8", seam, 1e-11))
    M0 = cohen_distribution(phi, CohenKernel("tau", 0.0))
    M1 = cohen_distribution(phi, CohenKernel("tau", 1.0))
    out.append(_check("tau / 1 - tau conjugate symmetry", np.max(np.abs(M0.values - np.conj(M1.values))), 1e-9))
    x, xi = M0.mesh
    ref = np.exp(-np.pi * (x * x + xi * xi) - 2j * np.pi * x * xi)
    out.append(_check("tau = 0 closed form", np.max(np.abs(M0.values - ref)), 1e-9))
    return out


SUITES: Dict[str, Callable[[], List[dict]]] = {
    "moyal": suite_moyal,
    "gaussian-oracles": suite_gaussian_oracles,
    "lemma41": suite_lemma41,
    "weak-identity": suite_weak_identity,
    "cohen": suite_cohen,
}


def run_suite(name: str) -> dict:
    """Run one suite; the report's ``passed`` is true iff every check passed."""
    checks = SUITES[name]()
    return {"suite": name, "checks": checks, "passed": all(c["passed"] for c in checks)}
