import numpy as np
import pytest
from hypothesis import given, strategies as st

from tfbounds.errors import GridMismatch, InputError, NonGridShift
from tfbounds.signals import (AxisGrid, DEFAULT_GRID, SampledSignal, TfArray, centered_convolve,
                              evaluate, fourier_transform, gaussian, inner_product,
                              inverse_fourier_transform, modulate, translate, upsample2)

lams = st.floats(0.25, 4.0)
shifts = st.integers(-24, 24).map(lambda k: k / 16)
freqs = st.floats(-2.0, 2.0)


def _untagged(f):
    return SampledSignal(f.grid, f.samples)


def test_grid_validation():
    with pytest.raises(InputError):
        AxisGrid(100, 0.1)
    with pytest.raises(InputError):
        AxisGrid(64, 0.0)
    g = AxisGrid(16, 0.5)
    assert g.nodes[g.n // 2] == 0.0
    assert g.dual().delta == pytest.approx(1 / 8)
    assert g.refined() == AxisGrid(32, 0.25)


def test_default_grid_matches_design():
    assert DEFAULT_GRID.n == 256 and DEFAULT_GRID.delta == 1 / 16
    assert abs(gaussian(1.0).samples[0]) < 1e-80


def test_fourier_fixed_point():
    phi = gaussian(1.0)
    ph = fourier_transform(_untagged(phi))
    t = ph.grid.nodes
    sel = np.abs(t) <= 4
    assert np.max(np.abs(ph.samples[sel] - np.exp(-np.pi * t[sel] ** 2))) <= 1e-10


def test_fourier_dilation_at_zero():
    ph = fourier_transform(_untagged(gaussian(4.0)))
    assert ph.samples[ph.grid.n // 2] == pytest.approx(0.5, abs=1e-12)


def test_shift_becomes_modulation():
    phi = gaussian(1.0)
    lhs = fourier_transform(_untagged(translate(phi, 1.0)))
    xi = lhs.grid.nodes
    rhs = np.exp(-2j * np.pi * xi) * np.exp(-np.pi * xi ** 2)
    assert np.max(np.abs(lhs.samples - rhs)) <= 1e-9


@given(lams, shifts, freqs)
def test_plancherel_and_round_trip(lam, x0, xi0):
    f = _untagged(gaussian(lam, DEFAULT_GRID, x0, xi0))
    fh = fourier_transform(f)
    assert fh.norm() == pytest.approx(f.norm(), rel=1e-10)
    back = inverse_fourier_transform(fh)
    assert np.max(np.abs(back.samples - f.samples)) <= 1e-10 * np.max(np.abs(f.samples))


@given(lams, lams, shifts, freqs)
def test_plancherel_inner_product(l1, l2, x0, xi0):
    f = _untagged(gaussian(l1))
    g = _untagged(gaussian(l2, DEFAULT_GRID, x0, xi0))
    lhs = inner_product(f, g)
    rhs = inner_product(fourier_transform(f), fourier_transform(g))
    assert abs(lhs - rhs) <= 1e-9 * f.norm() * g.norm()


def test_translate_modulate_examples():
    phi = gaussian(1.0)
    assert np.allclose(translate(phi, 0.0).samples, phi.samples)
    m = modulate(phi, 1.7)
    assert np.allclose(np.abs(m.samples), np.abs(phi.samples), atol=1e-15)
    t1 = translate(phi, 1.0)
    assert evaluate(t1, 1.0) == pytest.approx(1.0)
    assert t1.samples[np.argmin(np.abs(t1.grid.nodes - 1.0))] == pytest.approx(1.0)


def test_off_grid_shift_of_sampled_signal_raises():
    f = _untagged(gaussian(1.0))
    with pytest.raises(NonGridShift):
        translate(f, 0.03)
    # tagged signals translate exactly
    g = translate(gaussian(1.0), 0.03)
    assert evaluate(g, 0.03) == pytest.approx(1.0)


def test_inner_product_examples():
    phi = gaussian(1.0)
    assert inner_product(phi, phi) == pytest.approx(2 ** -0.5, abs=1e-9)
    m5 = modulate(phi, 5.0)
    assert inner_product(phi, m5) == pytest.approx(np.conj(inner_product(m5, phi)))
    with pytest.raises(GridMismatch):
        inner_product(phi, gaussian(1.0, AxisGrid(128, 1 / 8)))


@given(lams, shifts, freqs)
def test_inner_product_self_real_nonnegative(lam, x0, xi0):
    f = gaussian(lam, DEFAULT_GRID, x0, xi0)
    v = inner_product(f, f)
    assert abs(v.imag) <= 1e-15 and v.real >= 0


def test_tag_consistent_on_refined_grid():
    f = gaussian(2.0, DEFAULT_GRID, 0.5, 1.0)
    fine = DEFAULT_GRID.refined()
    assert np.max(np.abs(f.tag(fine.nodes) - SampledSignal.from_tag(f.tag, fine).samples)) <= 1e-12


def test_bandlimited_half_grid_interpolation():
    f = gaussian(1.0, DEFAULT_GRID, 0.25, 0.5)
    up = upsample2(_untagged(f))
    assert np.max(np.abs(up.samples - f.tag(up.grid.nodes))) <= 1e-10


def test_tfarray_helpers():
    g = AxisGrid(32, 0.25)
    F = TfArray.from_tag(lambda x, xi: np.exp(-np.pi * (x * x + xi * xi)), g, g)
    assert F.value_at(0.0, 0.0) == pytest.approx(1.0)
    assert F.l2_norm() == pytest.approx(2 ** -0.5, rel=1e-6)


def test_centered_convolve_delta_is_identity(rng):
    a = rng.normal(size=(16, 8))
    k = np.zeros((5, 3))
    k[2, 1] = 1.0
    assert np.allclose(centered_convolve(k, a, a.shape), a)
    assert np.allclose(centered_convolve(a, k, a.shape), a)
