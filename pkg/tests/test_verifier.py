import math

import pytest

from hypineq import constants, verifier as V
from hypineq.constants import Params
from hypineq.corpus import bump_profile, standard_corpus, tent_profile
from hypineq.errors import DomainError
from hypineq.rearrangement import RadialProfile, Tail, scale_profile
from hypineq.sharpness import truncated_bubble, untruncated_bubble


def test_poincare_deficit_positive():
    D, err = V.poincare_deficit(tent_profile(1.0, 1.0), 4, 8.0 / 3.0)
    assert D > 0.0
    assert err < 1e-6 * D


def test_poincare_sobolev_passes_on_samples():
    for v in (tent_profile(1.0, 1.0), bump_profile(1.0, 4.0),
              truncated_bubble(4, 8.0 / 3.0, 0.3, 2.0)):
        rep = V.poincare_sobolev(v, 4, 8.0 / 3.0)
        assert rep.passes(1e-9), v.label
        assert rep.deficit > 0.0


def test_poincare_sobolev_range():
    with pytest.raises(DomainError):
        V.poincare_sobolev(tent_profile(1.0, 1.0), 3, 2.5)
    with pytest.raises(DomainError):
        V.poincare_sobolev(tent_profile(1.0, 1.0), 4, 4.5)


def test_constant_scale_falsifies():
    v = truncated_bubble(4, 8.0 / 3.0, 1e-4, 1.0)
    good = V.poincare_sobolev(v, 4, 8.0 / 3.0)
    bad = V.poincare_sobolev(v, 4, 8.0 / 3.0, constant_scale=1.5)
    assert good.deficit > 0.0
    assert bad.deficit < 0.0 and not bad.passes()


def test_gn_bridges_to_poincare_sobolev_at_endpoint():
    n, p = 4, 8.0 / 3.0
    amax = n / (n - p)
    for v in (tent_profile(1.0, 1.0), bump_profile(3.0, 2.0)):
        ps = V.poincare_sobolev(v, n, p)
        gn = V.gagliardo_nirenberg(v, n, p, amax)
        # same inequality, both sides multiplied by GN^p = S^-p
        assert gn.lhs / gn.rhs == pytest.approx(ps.lhs / ps.rhs, rel=1e-9)


def test_gn_both_branches_pass():
    v = bump_profile(1.0, 1.0)
    hi = V.gagliardo_nirenberg(v, 4, 8.0 / 3.0, 2.0)
    assert hi.passes(1e-9)
    lo = V.gagliardo_nirenberg(v, 4, 8.0 / 3.0, 0.5)
    assert lo.passes(1e-9)


def test_morrey_needs_compact_support():
    v = standard_corpus()[10]  # an exponential profile
    with pytest.raises(DomainError):
        V.morrey_sobolev(v, 2, 4.0)


def test_morrey_passes_on_compact():
    for v in (tent_profile(1.0, 1.0), bump_profile(0.7, 0.8)):
        rep = V.morrey_sobolev(v, 2, 4.0)
        assert rep.passes(1e-9), v.label


def test_linfty_passes_and_extremal_is_tight():
    for v in (tent_profile(1.0, 1.0), bump_profile(1.0, 4.0)):
        rep = V.linfty_inequality(v, 2, 4.0)
        assert rep.passes(1e-9)
    ex = V.extremal_linfty_profile(2, 4.0)
    rep = V.linfty_inequality(ex, 2, 4.0)
    assert abs(rep.relative_margin) < 1e-8


def test_extremal_linfty_profile_second_pair():
    ex = V.extremal_linfty_profile(3, 5.0)
    rep = V.linfty_inequality(ex, 3, 5.0)
    assert abs(rep.relative_margin) < 1e-8


def test_log_sobolev_passes_and_is_scale_invariant():
    n, p = 4, 8.0 / 3.0
    v = bump_profile(1.0, 1.0)
    rep = V.log_sobolev(v, n, p)
    assert rep.passes(1e-8)
    # the normalization is algebraic, so rescaling the profile must leave
    # both sides unchanged
    rep3 = V.log_sobolev(scale_profile(v, 3.0), n, p)
    assert rep3.lhs == pytest.approx(rep.lhs, rel=1e-9)
    assert rep3.rhs == pytest.approx(rep.rhs, rel=1e-7, abs=1e-9)


def test_log_sobolev_variants():
    n, p = 4, 8.0 / 3.0
    v = bump_profile(1.0, 1.0)
    rp = V.log_sobolev(v, n, p, variant="p")
    rn = V.log_sobolev(v, n, p, variant="n")
    # the printed-display coefficient subtracts less, so its deficit term
    # is larger and the lhs larger
    assert rn.lhs > rp.lhs
    assert rn.passes(1e-8)
    with pytest.raises(DomainError):
        V.log_sobolev(v, n, p, variant="q")


def test_mugelli_talenti_sum():
    for n, p in [(3, 2.0), (2, 1.5), (4, 2.5)]:
        rep = V.mugelli_talenti_sum(tent_profile(1.0, 1.0), n, p)
        assert rep.passes(1e-9), (n, p)


def test_mugelli_talenti_p1_needs_closure():
    rep = V.mugelli_talenti_sum(bump_profile(1.0, 1.0), 3, 1.0)
    assert rep.passes(1e-9)
    bare = RadialProfile([0.0, 0.5, 1.0], [1.0, 0.5, 0.0], Tail("compact", 1.0))
    with pytest.raises(DomainError):
        V.mugelli_talenti_sum(bare, 3, 1.0)


def test_euclidean_rayleigh_equals_sharp_constant_on_bubble():
    for n, p in [(4, 8.0 / 3.0), (5, 2.5), (3, 2.0)]:
        target = constants.sobolev_constant(Params(n, p)) ** p
        for lam in (1.0, 0.1):
            v = untruncated_bubble(n, p, lam)
            assert V.euclidean_rayleigh_ratio(v, n, p) == pytest.approx(
                target, rel=1e-8), (n, p, lam)


def test_step_profile_reports_flagged():
    v = RadialProfile([0.0, 1.0], [1.0, 1.0], Tail("compact", 2.0), step=True)
    rep = V.poincare_sobolev(v, 4, 8.0 / 3.0)
    assert "step-profile" in rep.flags
    assert math.isinf(rep.lhs)
