import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tfbounds.errors import InputError, NonPositiveLambda
from tfbounds.norms import modulation_norm, modulation_norm_phase_space
from tfbounds.oracles import (PHI0, GenGaussian, WignerGaussCoeffs, gaussian_mod_norm_asymptotic,
                              gaussian_norm_slopes, gen_gaussian_norm_exact, log_slope,
                              mod_norm_gen_gaussian, stft_gen_gaussian, wigner_gaussian_diag,
                              wigner_gaussian_pair, wigner_mixed_norm_asymptotic,
                              wigner_norm_slopes)
from tfbounds.signals import AxisGrid, DEFAULT_GRID, TfArray, gaussian
from tfbounds.transforms import cross_wigner, stft2d

pos = st.floats(0.1, 10.0)
exps = st.sampled_from(["1", "4/3", "2", "4", "inf"])


def test_wigner_pair_coefficients():
    k = WignerGaussCoeffs.from_lambda(1.0)
    assert (k.a, k.b, k.c) == (2.0, 2.0, 0.0) and k.amplitude == pytest.approx(2 ** 0.5)
    G = wigner_gaussian_pair(3.0)
    assert (G.a, G.b, G.c, G.amplitude) == (3.0, 1.0, -1.0, 1.0)
    assert WignerGaussCoeffs.from_lambda(1.0, d=2).amplitude == pytest.approx(2.0)


@pytest.mark.parametrize("lam", [0.25, 1.0, 4.0])
def test_wigner_pair_matches_fft(lam):
    W = cross_wigner(gaussian(1.0), gaussian(lam))
    x, xi = W.mesh
    assert np.max(np.abs(W.values - wigner_gaussian_pair(lam)(x, xi))) <= 1e-8


def test_nonpositive_lambda():
    for fn in (wigner_gaussian_pair, wigner_gaussian_diag):
        with pytest.raises(NonPositiveLambda):
            fn(0.0)
    with pytest.raises(NonPositiveLambda):
        wigner_mixed_norm_asymptotic(-1.0, 2, 2)
    with pytest.raises(InputError):
        GenGaussian(-1.0, 1.0)


def test_wigner_diag_examples():
    assert wigner_gaussian_diag(1.0)(0.0, 0.0) == pytest.approx(2 ** 0.5)
    f = gaussian(2.0)
    W = cross_wigner(f, f)
    x, xi = W.mesh
    assert np.max(np.abs(W.values - wigner_gaussian_diag(2.0)(x, xi))) <= 1e-8
    G = wigner_gaussian_diag(2.0)
    mass = G.amplitude / math.sqrt(G.a * G.b)
    assert mass == pytest.approx(0.5)
    assert np.sum(W.values).real * W.cell == pytest.approx(0.5, abs=1e-10)


def test_stft_gen_gaussian_origin():
    assert stft_gen_gaussian(PHI0, (0.0, 0.0), (0.0, 0.0)) == pytest.approx(0.5)


@given(pos, pos, st.floats(-3, 3), st.tuples(*[st.floats(-2, 2)] * 4))
def test_stft_gen_gaussian_joint_negation(a, b, c, z):
    G = GenGaussian(a, b, c)
    z1, z2, s1, s2 = z
    v = stft_gen_gaussian(G, (z1, z2), (s1, s2))
    w = stft_gen_gaussian(G, (-z1, -z2), (-s1, -s2))
    assert abs(v) == pytest.approx(abs(w), rel=1e-12, abs=1e-300)


def test_stft_gen_gaussian_matches_numeric():
    g = AxisGrid(128, 1.0 / 16)
    G = GenGaussian(2.0, 3.0, 1.0)
    V = stft2d(TfArray.from_tag(G, g, g), TfArray.from_tag(PHI0, g, g),
               (g.decimated(8),) * 2, (g.dual().decimated(8),) * 2)
    z1, z2, s1, s2 = np.meshgrid(*V.axes, indexing="ij")
    ref = stft_gen_gaussian(G, (z1, z2), (s1, s2))
    assert np.max(np.abs(V.values - ref)) <= 1e-6 * np.max(np.abs(ref))


def test_stft_gen_gaussian_two_dimensional():
    G = GenGaussian(1.0, 1.0, 0.0, 1.0, 2)
    v = stft_gen_gaussian(G, (np.zeros(2), np.zeros(2)), (np.zeros(2), np.zeros(2)))
    assert v == pytest.approx(0.25)


def test_mod_norm_formula_examples():
    assert mod_norm_gen_gaussian(PHI0, 2, 2) == pytest.approx(1.0)
    for a, b, c in [(1, 1, 0), (2, 3, 1), (4, 1, 2)]:
        G = GenGaussian(a, b, c)
        D = (a + 1) * (b + 1) + c * c
        assert mod_norm_gen_gaussian(G, "inf", "inf") == pytest.approx(D ** -0.5)
        assert abs(stft_gen_gaussian(G, (0, 0), (0, 0))) == pytest.approx(D ** -0.5)


@given(pos, pos, st.floats(-3, 3), st.floats(0.1, 5), exps, exps)
def test_mod_norm_formula_ignores_amplitude(a, b, c, amp, p, q):
    assert mod_norm_gen_gaussian(GenGaussian(a, b, c, amp), p, q) == pytest.approx(
        mod_norm_gen_gaussian(GenGaussian(a, b, c), p, q), rel=1e-14)


@pytest.mark.slow
def test_mod_norm_ratio_constant_on_lattice():
    g = AxisGrid(128, 1.0 / 16)
    ratios = []
    for a in (1, 2, 4):
        for b in (1, 2, 4):
            for c in (1, 2, 4):
                G = GenGaussian(a, b, c)
                num = modulation_norm_phase_space(TfArray.from_tag(G, g, g), 2, 2, window=PHI0)
                ratios.append(num / mod_norm_gen_gaussian(G, 2, 2))
    assert max(ratios) / min(ratios) <= 1.02
    assert np.mean(ratios) == pytest.approx(0.5, rel=0.02)


@pytest.mark.parametrize("p,q", [("2", "2"), ("1", "inf"), ("inf", "1"), ("4/3", "4")])
def test_exact_norm_constant(p, q):
    # the formula's constant is p^{-1/p} q^{-1/q}, checked on the Gaussian window itself
    ip = Fraction(0) if p == "inf" else 1 / Fraction(p)
    iq = Fraction(0) if q == "inf" else 1 / Fraction(q)
    const = (float(ip) ** float(ip) if ip else 1.0) * (float(iq) ** float(iq) if iq else 1.0)
    assert gen_gaussian_norm_exact(PHI0, p, q) == pytest.approx(const * mod_norm_gen_gaussian(PHI0, p, q))


def test_wigner_asymptotic_examples():
    for p in (1, 2, 4):
        assert wigner_mixed_norm_asymptotic(1.0, p, p) == pytest.approx(2 ** (1 / p - 0.5))
    R = lambda lam: wigner_mixed_norm_asymptotic(lam, 2, 2)
    assert log_slope(R, 2.0 ** 10, 2.0 ** 12) == pytest.approx(-0.25, abs=1e-3)
    assert log_slope(R, 2.0 ** -12, 2.0 ** -10) == pytest.approx(-0.25, abs=1e-3)


@given(st.floats(0.01, 100), st.sampled_from([1, 2, 4, "inf"]), st.integers(1, 3))
def test_wigner_asymptotic_inversion(lam, p, d):
    # for p = q the algebra gives R(lam) / R(1/lam) = lam^{-d/2}
    r = wigner_mixed_norm_asymptotic(lam, p, p, d) / wigner_mixed_norm_asymptotic(1 / lam, p, p, d)
    assert r == pytest.approx(lam ** (-d / 2), rel=1e-10)


@pytest.mark.parametrize("p,q", [(1, 1), (2, 2), (1, "inf"), (2, 4), ("inf", 1), (4, "4/3")])
def test_slope_tables_match_formula(p, q):
    s0, sinf = wigner_norm_slopes(p, q)
    R = lambda lam: wigner_mixed_norm_asymptotic(lam, p, q)
    assert log_slope(R, 2.0 ** 30, 2.0 ** 32) == pytest.approx(float(sinf), abs=1e-8)
    assert log_slope(R, 2.0 ** -32, 2.0 ** -30) == pytest.approx(float(s0), abs=1e-8)
    r0, rinf = gaussian_norm_slopes(p, q)
    N = lambda lam: gaussian_mod_norm_asymptotic(lam, p, q)
    assert log_slope(N, 2.0 ** 30, 2.0 ** 32) == pytest.approx(float(rinf), abs=1e-8)
    assert log_slope(N, 2.0 ** -32, 2.0 ** -30) == pytest.approx(float(r0), abs=1e-8)
    assert all(isinstance(v, Fraction) for v in (s0, sinf, r0, rinf))


def test_gaussian_asymptotic_at_one():
    for r, s in [(2, 2), (1, "inf"), (4, 4)]:
        ir = 1 / r
        is_ = 0 if s == "inf" else 1 / s
        assert gaussian_mod_norm_asymptotic(1.0, r, s) == pytest.approx(2 ** (-(1 - ir - is_) / 2))
    assert gaussian_mod_norm_asymptotic(1.0, 2, 2) == pytest.approx(1.0)


def test_gaussian_norm_numeric_slopes():
    fine = AxisGrid(2048, 1.0 / 128)
    lams = [2.0 ** k for k in (6, 7, 8)]
    vals = [modulation_norm(gaussian(lam, fine), 2, 2) for lam in lams]
    assert np.polyfit(np.log(lams), np.log(vals), 1)[0] == pytest.approx(-0.25, abs=0.05)
    wide = AxisGrid(2048, 1.0 / 16)
    lams = [2.0 ** k for k in (-8, -7, -6)]
    vals = [modulation_norm(gaussian(lam, wide), "inf", 2) for lam in lams]
    assert np.polyfit(np.log(lams), np.log(vals), 1)[0] == pytest.approx(0.0, abs=0.05)


def test_gaussian_norm_exact_values():
    # ||phi_lam||_{M^{2,2}} = ||phi_lam||_2 ||phi||_2 = (2 lam)^{-1/4} 2^{-1/4}
    for lam in (0.25, 1.0, 4.0):
        v = modulation_norm(gaussian(lam, DEFAULT_GRID), 2, 2)
        assert v == pytest.approx((4 * lam) ** -0.25, rel=1e-9)
