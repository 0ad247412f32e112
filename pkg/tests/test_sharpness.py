from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tfbounds.cohen import cohen_condition_holds
from tfbounds.errors import (IndexConditionViolated, InputError, NegativeWeightOrder,
                             ResolutionInsufficient)
from tfbounds.exponents import ExtReal
from tfbounds.norms import modulation_norm, wigner_mod_norm
from tfbounds.sharpness import (FAMILIES, IndexTuple, check_conditions, off_diagonal_wigner_norm,
                                predicted_ratio_slopes, regression_tuples, sweep,
                                verify_symmetric_weighted_bound)
from tfbounds.signals import DEFAULT_GRID, gaussian
from tfbounds.oracles import wigner_norm_slopes

VALUES = ["1", "4/3", "2", "4", "inf"]
exps = st.sampled_from(VALUES)
tuples = st.tuples(*[exps] * 6).map(IndexTuple.parse)


def T(text):
    return IndexTuple.parse(text)


# ---------------------------------------------------------------- classifier
def test_condition_examples():
    assert check_conditions(T("2,2,2,2,2,2")).bounded
    assert check_conditions(T("2,2,2,2,4/3,4")).bounded
    rep = check_conditions(T("2,2,inf,2,2,2"))
    assert not rep.bounded and "p2 <= q" in rep.failures
    # 1/2 + 0 < 1/2 + 1/2, so the reciprocal clause fails as well
    assert set(rep.failures) == {"p2 <= q", "1/p1 + 1/p2 >= 1/p + 1/q"}


def test_index_tuple_parse():
    t = T("1;4/3;2;4;inf;2")
    assert str(t) == "1,4/3,2,4,inf,2"
    with pytest.raises(InputError):
        T("1,2,3")
    with pytest.raises(InputError):
        T("0.5,2,2,2,2,2")


@given(tuples)
def test_conditions_match_definition(t):
    r = [e.reciprocal for e in t.as_tuple()]
    rp1, rq1, rp2, rq2, rp, rq = r
    expect = (rp1 >= rq and rq1 >= rq and rp2 >= rq and rq2 >= rq
              and rp1 + rp2 >= rp + rq and rq1 + rq2 >= rp + rq)
    rep = check_conditions(t)
    assert rep.bounded == expect
    assert rep.bounded == (len(rep.failures) == 0)


@given(exps, exps, exps, exps)
def test_cohen_predicate_matches_classifier_when_p_le_q(p1, q1, p, q):
    # with f1 = f2 the classifier reduces to the Cohen index condition whenever p <= q
    if ExtReal.parse(p) > ExtReal.parse(q):
        return
    t = IndexTuple.parse([p1, q1, p1, q1, p, q])
    assert check_conditions(t).bounded == cohen_condition_holds(p1, q1, p, q)


# ---------------------------------------------------------------- exact slopes
def test_predicted_slope_examples():
    assert predicted_ratio_slopes(T("2,2,2,2,2,2"), "off") == (0, 0)
    s0, _ = predicted_ratio_slopes(T("2,2,inf,2,2,2"), "off")
    assert s0 == Fraction(-1, 4)
    n0, _ = wigner_norm_slopes(2, 2)
    assert n0 == Fraction(-1, 4)


@given(exps, st.sampled_from(FAMILIES))
def test_equal_exponents_give_flat_slopes(e, family):
    assert predicted_ratio_slopes(IndexTuple.parse([e] * 6), family) == (0, 0)


@given(tuples, st.sampled_from(FAMILIES))
def test_slopes_are_exact_rationals(t, family):
    assert all(isinstance(v, Fraction) for v in predicted_ratio_slopes(t, family))


def test_unknown_family():
    with pytest.raises(InputError):
        predicted_ratio_slopes(T("2,2,2,2,2,2"), "nope")


# ---------------------------------------------------------------- sweeps
def test_sweep_rejects_short_range():
    # 2^-4..2^4 spans only 2^8, below the required 2^10
    with pytest.raises(InputError):
        sweep(T("2,2,2,2,2,2"), "off", [2.0 ** k for k in range(-4, 5)])
    with pytest.raises(InputError):
        sweep(T("2,2,2,2,2,2"), "off", [1, 2, 4])
    with pytest.raises(InputError):
        sweep(T("2,2,2,2,2,2"), "off", [1, 3, 4, 100, 1e3, 1e4, 1e5])


def test_sweep_bounded_example():
    rep = sweep(T("2,2,2,2,2,2"), "off", [2.0 ** k for k in range(-5, 6)])
    assert rep.verdict == "Bounded"
    assert abs(rep.slope0) < 0.05 and abs(rep.slope_inf) < 0.05


def test_sweep_unbounded_at_zero():
    rep = sweep(T("2,2,inf,2,2,2"), "off")
    assert rep.verdict == "UnboundedAtZero"
    assert rep.slope0 == pytest.approx(-0.25, abs=0.05)


def test_sweep_diagonal_reciprocal_violation():
    t = T("inf,inf,inf,inf,1,1")
    assert "1/p1 + 1/p2 >= 1/p + 1/q" in check_conditions(t).failures
    rep = sweep(t, "diag")
    # both reciprocal clauses fail, so the ratio blows up at both ends
    assert rep.predicted == (-1, 1)
    assert rep.verdict == "UnboundedAtZero" and rep.unbounded_ends == ("zero", "infinity")
    assert rep.slope0 == pytest.approx(-1, abs=0.05) and rep.slope_inf == pytest.approx(1, abs=0.05)


def test_sweep_report_dict():
    rep = sweep(T("2,2,2,2,2,2"), "diag")
    d = rep.to_dict()
    assert d["predicted_slope0"] == "0" and len(d["ratios"]) == 21
    assert d["family"] == "diag"


def test_sweep_resolution_guard():
    with pytest.raises(ResolutionInsufficient):
        sweep(T("2,2,2,2,2,2"), "off", np.geomspace(2.0 ** -30, 2.0 ** 30, 7))


def test_sweep_rejects_inf_p_with_finite_q():
    with pytest.raises(InputError):
        sweep(T("2,2,2,2,inf,2"), "off")


@pytest.mark.slow
@pytest.mark.parametrize("text", ["1,1,2,4,4/3,4", "2,2,inf,2,2,2"])
@pytest.mark.parametrize("family", FAMILIES)
def test_slopes_resolution_stable(text, family):
    a = sweep(T(text), family)
    b = sweep(T(text), family, resolution=2.0)
    assert abs(a.slope0 - b.slope0) < 0.01 and abs(a.slope_inf - b.slope_inf) < 0.01


def test_off_diagonal_norm_matches_direct():
    # adaptive grids against a direct convolution on the default grid
    phi = gaussian(1.0)
    for lam in (0.5, 1.0, 2.0):
        direct = wigner_mod_norm(phi, gaussian(lam), 1, 2)
        assert off_diagonal_wigner_norm(lam, 1, 2) == pytest.approx(direct, rel=1e-3)


def test_conjugate_family_symmetry():
    for lam in (0.25, 4.0):
        a = off_diagonal_wigner_norm(lam, 2, 4)
        b = off_diagonal_wigner_norm(lam, 2, 4, conjugate=True)
        assert a == pytest.approx(b, rel=1e-6)


def test_regression_set_shape():
    ts = regression_tuples()
    assert len(ts) >= 40 and len(set(map(str, ts))) == len(ts)
    singles = {check_conditions(t).failures for t in ts if len(check_conditions(t).failures) == 1}
    assert len(singles) == 6
    assert sum(check_conditions(t).bounded for t in ts) >= 10


def test_regression_sample_agrees():
    for t in regression_tuples()[::7]:
        reps = [sweep(t, fam) for fam in FAMILIES]
        assert check_conditions(t).bounded == all(r.verdict == "Bounded" for r in reps)


# ---------------------------------------------------------------- weighted bound
def test_weighted_bound_s0_is_half_plain():
    f1, f2 = gaussian(1.0), gaussian(2.0, DEFAULT_GRID, 0.5, 0.0)
    t = T("2,2,2,2,2,2")
    plain = wigner_mod_norm(f1, f2, 2, 2) / (modulation_norm(f1, 2, 2) * modulation_norm(f2, 2, 2))
    assert verify_symmetric_weighted_bound(f1, f2, t, 0) == pytest.approx(plain / 2, rel=1e-9)


def test_weighted_bound_swap_stable():
    f1, f2 = gaussian(1.0), gaussian(1.0, DEFAULT_GRID, 2.0, 2.0)
    t = T("2,2,2,2,2,2")
    a = verify_symmetric_weighted_bound(f1, f2, t, 1)
    b = verify_symmetric_weighted_bound(f2, f1, t, 1)
    assert np.isfinite(a) and a == pytest.approx(b, rel=0.2)


def test_weighted_bound_shift_family():
    t = T("2,2,2,2,2,2")
    r = [verify_symmetric_weighted_bound(gaussian(1.0), gaussian(1.0, DEFAULT_GRID, x0, 0.0), t, 2)
         for x0 in (0.0, 2.0, 4.0)]
    assert max(r) / min(r) < 3


def test_weighted_bound_errors():
    phi = gaussian(1.0)
    with pytest.raises(NegativeWeightOrder):
        verify_symmetric_weighted_bound(phi, phi, T("2,2,2,2,2,2"), -1)
    with pytest.raises(IndexConditionViolated):
        verify_symmetric_weighted_bound(phi, phi, T("2,2,inf,2,2,2"), 0)
