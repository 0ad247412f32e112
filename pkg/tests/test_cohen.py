"""Cohen-class kernels, the cosine integral and Cohen distributions."""

from fractions import Fraction

import mpmath
import numpy as np
import pytest
import scipy.integrate as sint
import scipy.special as ssp
from hypothesis import given, strategies as st

from tfbounds.cohen import (SERIES_CUTOFF, CohenKernel, born_jordan_cell_average,
                            born_jordan_kernel_d1, cohen_bound_check,
                            cohen_distribution, cosine_integral, sine_integral,
                            tau_cell_average, tau_kernel)
from tfbounds.errors import (IndexConditionViolated, InputError, NegativeWeightOrder,
                             NonPositiveArgument, TauHalf)
from tfbounds.norms import modulation_norm_phase_space
from tfbounds.signals import DEFAULT_GRID, AxisGrid, cfft, cifft, gaussian
from tfbounds.transforms import cross_wigner

CI_ONE = 0.337403922900968


def ci_series_exact(t: Fraction, terms: int = 30) -> float:
    """``Ci(t) - gamma - ln t`` summed with exact rational coefficients."""
    acc = Fraction(0)
    fact = 1
    for k in range(1, terms + 1):
        fact *= (2 * k - 1) * (2 * k)
        acc += Fraction((-1) ** k) * t ** (2 * k) / (2 * k * fact)
    return float(acc)


def fourier_cohen(W, kernel_hat):
    """``W * sigma`` through the transform of the kernel, ``kernel_hat(u, v)``."""
    u, v = W.xgrid.dual().nodes, W.xigrid.dual().nodes
    return cifft(cfft(W.values, axes=(0, 1)) * kernel_hat(np.outer(u, v)), axes=(0, 1))


def tau_hat(tau):
    return lambda uv: np.exp(-1j * np.pi * (2 * tau - 1) * uv)


def bj_hat(uv):
    return np.sinc(uv)


@pytest.fixture(scope="module")
def phi_w():
    phi = gaussian(1.0, DEFAULT_GRID)
    return phi, cross_wigner(phi, phi)


# ------------------------------------------------------------- tau kernels
def test_tau_zero_kernel():
    g = AxisGrid(16, 0.25)
    K = tau_kernel(0.0, g)
    x, xi = K.mesh
    assert K.values[8, 8] == pytest.approx(2.0)
    np.testing.assert_allclose(K.values, 2 * np.exp(-4j * np.pi * x * xi), atol=1e-14)


@given(st.floats(0.0, 1.0).filter(lambda t: abs(t - 0.5) > 1e-3))
def test_tau_kernel_modulus_and_conjugate_pair(tau):
    g = AxisGrid(16, 0.25)
    K = tau_kernel(tau, g).values
    np.testing.assert_allclose(np.abs(K), 2 / abs(2 * tau - 1), rtol=1e-12)
    np.testing.assert_allclose(K, np.conj(tau_kernel(1 - tau, g).values), rtol=1e-9, atol=1e-9)


def test_tau_kernel_errors():
    g = AxisGrid(16, 0.25)
    with pytest.raises(TauHalf):
        tau_kernel(0.5, g)
    for bad in (-0.1, 1.5):
        with pytest.raises(InputError):
            tau_kernel(bad, g)


def test_tau_cell_average_matches_quadrature():
    g = AxisGrid(8, 0.5)
    tau = 0.3
    T = tau_cell_average(tau, g).values
    k = 2 / (2 * tau - 1)
    for i, j in ((4, 4), (6, 5), (1, 7)):
        x0, y0 = g.nodes[i], g.nodes[j]
        lims = (x0 - 0.25, x0 + 0.25, y0 - 0.25, y0 + 0.25)
        re = sint.dblquad(lambda y, x: np.cos(2 * np.pi * k * x * y), *lims, epsabs=1e-13)[0]
        im = sint.dblquad(lambda y, x: np.sin(2 * np.pi * k * x * y), *lims, epsabs=1e-13)[0]
        assert abs(T[i, j] - 2 / abs(2 * tau - 1) * (re + 1j * im) / 0.25) < 1e-10


# ---------------------------------------------------------- cosine integral
def test_ci_one_against_exact_series():
    gamma = float(mpmath.euler)
    oracle = gamma + 0.0 + ci_series_exact(Fraction(1))
    assert oracle == pytest.approx(CI_ONE, abs=1e-14)
    assert abs(cosine_integral(1.0) - CI_ONE) < 1e-12


def test_ci_decay_and_seam():
    assert abs(cosine_integral(100.0)) < 0.011
    left = cosine_integral(SERIES_CUTOFF)
    right = cosine_integral(np.nextafter(SERIES_CUTOFF, 9.0))
    assert abs(left - right) < 1e-11
    assert abs(sine_integral(SERIES_CUTOFF) - sine_integral(np.nextafter(SERIES_CUTOFF, 9.0))) < 1e-11


def test_ci_si_against_references():
    t = np.concatenate([np.geomspace(1e-6, 7.9, 40), np.geomspace(8.1, 1e4, 40)])
    si_ref, ci_ref = ssp.sici(t)
    np.testing.assert_allclose(cosine_integral(t), ci_ref, atol=1e-12, rtol=0)
    np.testing.assert_allclose(sine_integral(t), si_ref, atol=1e-12, rtol=0)
    for v in (0.5, 3.0, 8.0, 20.0, 250.0):
        assert abs(cosine_integral(v) - float(mpmath.ci(v))) < 1e-12
        assert abs(sine_integral(v) - float(mpmath.si(v))) < 1e-12


@pytest.mark.parametrize("bad", [0.0, -1.0, np.inf, np.nan])
def test_ci_rejects_nonpositive(bad):
    with pytest.raises(NonPositiveArgument):
        cosine_integral(bad)


# ----------------------------------------------------------- Born-Jordan
def test_born_jordan_value_and_symmetry():
    # zeta1 zeta2 = 1/(4 pi) at the node (1/2, 1/(2 pi))
    g1 = AxisGrid(8, 0.5)
    g2 = AxisGrid(8, 0.5 / np.pi)
    K = born_jordan_kernel_d1(g1, g2)
    assert K.values[5, 5] == pytest.approx(-0.674807845801936, abs=1e-12)
    assert -2 * CI_ONE == pytest.approx(-0.674807845801936, abs=1e-15)
    g = AxisGrid(16, 0.25)
    v = np.ma.getdata(born_jordan_kernel_d1(g).values)
    # node 0 is -L with no mirror; nodes 1..n-1 are symmetric about the center
    np.testing.assert_allclose(v[1:, 1:], v[1:, 1:][::-1, :], atol=1e-15)
    np.testing.assert_allclose(v[1:, 1:], v[1:, 1:][:, ::-1], atol=1e-15)
    mask = np.ma.getmaskarray(born_jordan_kernel_d1(g).values)
    assert mask[8, :].all() and mask[:, 8].all() and mask.sum() == 31


def test_born_jordan_decay():
    assert abs(-2 * cosine_integral(4 * np.pi * 10)) < abs(-2 * cosine_integral(4 * np.pi * 1))


def test_masked_fill_uses_neighbor_mean():
    g = AxisGrid(8, 0.5)
    filled = born_jordan_kernel_d1(g).filled().values
    v = np.ma.getdata(born_jordan_kernel_d1(g).values)
    assert filled[4, 6] == pytest.approx((v[3, 6] + v[5, 6]) / 2)
    assert filled[4, 4] == pytest.approx((v[3, 3] + v[3, 5] + v[5, 3] + v[5, 5]) / 4)
    assert np.all(np.isfinite(filled))


def test_born_jordan_cell_average_beats_neighbor_fill(phi_w):
    phi, W = phi_w
    ref = fourier_cohen(W, bj_hat)
    scale = np.max(np.abs(ref))
    cell = cohen_distribution(phi, CohenKernel("born-jordan")).values
    fill = cohen_distribution(phi, CohenKernel("born-jordan", sampling="neighbor")).values
    err_cell = np.max(np.abs(cell - ref)) / scale
    err_fill = np.max(np.abs(fill - ref)) / scale
    assert err_cell < 0.01
    assert err_fill > err_cell


def test_cell_average_is_finite_on_axes():
    g = AxisGrid(16, 0.25)
    A = born_jordan_cell_average(g).values
    assert np.all(np.isfinite(A))
    assert A[8, 8].real > 0


# ------------------------------------------------------- distributions
def test_delta_kernel_is_identity(phi_w):
    phi, W = phi_w
    M = cohen_distribution(phi, CohenKernel("delta"))
    np.testing.assert_array_equal(M.values, W.values)


def test_tau_zero_closed_form(phi_w):
    phi, _ = phi_w
    M = cohen_distribution(phi, CohenKernel("tau", 0.0))
    x, xi = M.mesh
    ref = np.exp(-np.pi * (x * x + xi * xi) - 2j * np.pi * x * xi)
    assert np.max(np.abs(M.values - ref)) < 1e-9


@pytest.mark.parametrize("tau", [0.0, 0.1, 0.25, 0.4, 0.75, 1.0])
def test_tau_distribution_against_fourier_route(phi_w, tau):
    phi, W = phi_w
    ref = fourier_cohen(W, tau_hat(tau))
    M = cohen_distribution(phi, CohenKernel("tau", tau))
    err = np.max(np.abs(M.values - ref)) / np.max(np.abs(ref))
    # point samples are exact away from aliasing; cell averages carry a few percent
    assert err < (1e-8 if tau in (0.0, 0.1, 1.0) else 0.03)
    assert np.sum(M.values).real * M.cell == pytest.approx(phi.norm() ** 2, rel=1e-3)


def test_point_sampling_aliases_in_the_middle(phi_w):
    phi, _ = phi_w
    M = cohen_distribution(phi, CohenKernel("tau", 0.25, sampling="point"))
    assert abs(np.sum(M.values).real * M.cell / phi.norm() ** 2 - 1) > 1.0


@pytest.mark.parametrize("tau", [0.0, 1.0])
def test_tau_mass(phi_w, tau):
    phi, _ = phi_w
    M = cohen_distribution(phi, CohenKernel("tau", tau))
    assert np.sum(M.values).real * M.cell == pytest.approx(2 ** -0.5, abs=1e-12)


@pytest.mark.parametrize("tau", [0.0, 0.2, 0.35])
def test_conjugate_pair_sum_is_real(phi_w, tau):
    phi, _ = phi_w
    a = cohen_distribution(phi, CohenKernel("tau", tau)).values
    b = cohen_distribution(phi, CohenKernel("tau", 1 - tau)).values
    assert np.max(np.abs((a + b).imag)) < 1e-9
    assert np.max(np.abs(a - np.conj(b))) < 1e-9


@pytest.mark.parametrize("sampling", ["point", "cell"])
def test_fft_convolution_against_direct_sum(sampling):
    g = AxisGrid(64, 1.0 / 8)
    f = gaussian(1.0, g, 0.5, 0.25)
    kern = CohenKernel("tau", 0.25, sampling=sampling)
    M = cohen_distribution(f, kern)
    W = cross_wigner(f, f)
    n0, n1 = W.values.shape
    K = kern.sampled(W.xgrid, W.xigrid)
    err = 0.0
    for i, j in ((32, 32), (30, 40), (20, 25), (40, 10)):
        # kernel index of offset (i - a, j - b) is (i - a + n0, j - b + n1)
        a = np.arange(n0)[:, None]
        b = np.arange(n1)[None, :]
        direct = np.sum(W.values * K[i - a + n0, j - b + n1]) * W.cell
        err = max(err, abs(direct - M.values[i, j]))
    assert err < 1e-9


@pytest.mark.parametrize("name", ["tau0", "bj"])
def test_kernel_m1inf_norm_stable_under_refinement(name):
    def kern(g):
        return tau_kernel(0.0, g) if name == "tau0" else born_jordan_cell_average(g)
    coarse, fine = (modulation_norm_phase_space(kern(g), 1, "inf")
                    for g in (AxisGrid(64, 1.0 / 16), AxisGrid(128, 1.0 / 32)))
    assert np.isfinite(coarse) and np.isfinite(fine)
    assert abs(fine / coarse - 1) < 0.01


# ----------------------------------------------------------- kernel parse
def test_parse_and_label():
    assert CohenKernel.parse("tau:0.25").tau == 0.25
    assert CohenKernel.parse("tau:0").label() == "tau:0.0"
    assert CohenKernel.parse("bj").kind == "born-jordan"
    assert CohenKernel.parse("delta").label() == "delta"
    assert CohenKernel.parse("tau:0").sampling == "auto"
    assert CohenKernel.parse("bj").sampling == "cell"
    for bad in ("tau:x", "wigner", "tau:0.5"):
        with pytest.raises(InputError):
            CohenKernel.parse(bad)
    with pytest.raises(InputError):
        CohenKernel("born-jordan", sampling="point")


# -------------------------------------------------------------- bound check
def test_delta_bound_ratio():
    phi = gaussian(1.0, AxisGrid(64, 1.0 / 8))
    r = cohen_bound_check(phi, CohenKernel("delta"), 2, 2, 2, 2)
    assert r == pytest.approx(1.0, rel=0.01)


def test_bound_check_guards():
    phi = gaussian(1.0, AxisGrid(64, 1.0 / 8))
    with pytest.raises(IndexConditionViolated):
        cohen_bound_check(phi, CohenKernel("delta"), 1, 4, 2, 2)
    with pytest.raises(NegativeWeightOrder):
        cohen_bound_check(phi, CohenKernel("delta"), 2, 2, 2, 2, s=-1.0)
