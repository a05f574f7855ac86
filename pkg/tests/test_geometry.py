import math

import mpmath as mp
import numpy as np
import pytest

from hypineq import geometry as G
from hypineq.constants import boundary_exponent, unit_ball_volume
from hypineq.errors import DomainError


def _phi_mp(n, t, dps=40):
    with mp.workdps(dps):
        return mp.quad(lambda u: n * mp.sinh(u) ** (n - 1), [0, mp.mpf(t)])


def test_volume_map_n2_closed_form():
    for t in np.geomspace(1e-3, 25.0, 30):
        ref = math.expm1(t) + math.expm1(-t)  # 2(cosh t - 1), cancellation-free
        assert G.phi(2, float(t)) == pytest.approx(ref, rel=1e-12)


def test_volume_map_n3_closed_form():
    for t in np.geomspace(1e-3, 25.0, 30):
        with mp.workdps(40):
            tt = mp.mpf(float(t))
            ref = float(mp.mpf(3) / 8 * (mp.exp(2 * tt) - mp.exp(-2 * tt) - 4 * tt))
        assert G.phi(3, float(t)) == pytest.approx(ref, rel=1e-12)


def test_volume_map_matches_quadrature_general_n():
    for n in (4, 5, 6, 7):
        for t in (0.01, 0.3, 1.0, 4.0, 12.0):
            ref = float(_phi_mp(n, t))
            assert G.phi(n, t) == pytest.approx(ref, rel=1e-12), (n, t)
            qv = G.phi_quadrature(n, t)
            assert qv == pytest.approx(ref, rel=1e-10)


def test_volume_map_derivative():
    for n in (2, 3, 5):
        for t in (0.1, 1.0, 8.0):
            assert G.phi_deriv(n, t) == pytest.approx(
                n * math.sinh(t) ** (n - 1), rel=1e-13)


def test_log_phi_matches_phi():
    for n in (2, 4, 6):
        for t in (0.01, 1.0, 20.0):
            assert G._log_phi(n, t) == pytest.approx(
                math.log(G.phi(n, t)), rel=1e-12)
    # beyond double overflow the log form keeps going
    big = G._log_phi(5, 300.0)
    assert big == pytest.approx((5 - 1) * 300.0 + math.log(5.0 / 4.0)
                                + (1 - 5) * math.log(2.0), rel=1e-10)


def test_inverse_roundtrip():
    for n in (2, 3, 5, 7):
        for s in np.geomspace(1e-12, 1e12, 25):
            t = G.phi_inv(n, float(s))
            assert G.phi(n, t) == pytest.approx(float(s), rel=1e-11), (n, s)
    assert G.phi_inv(4, 0.0) == 0.0


def test_log_sinh():
    for t in (1e-8, 0.5, 5.0, 400.0):
        with mp.workdps(30):
            ref = float(mp.log(mp.sinh(t)))
        assert G.log_sinh(t) == pytest.approx(ref, rel=1e-13)


def test_kernel_gap_nonnegative_and_growing():
    vals = [G.kernel_gap(4, 8.0 / 3.0, s) for s in (0.1, 1.0, 10.0, 100.0)]
    assert all(v >= 0.0 for v in vals)
    assert vals == sorted(vals)


def test_margin_zero_at_n2_p2():
    for t in (0.1, 1.0, 5.0, 20.0):
        assert abs(G.radial_margin_scaled(2, 2.0, t)) < 1e-12


def test_scaled_margin_consistent_with_raw():
    for n, p in [(4, 8.0 / 3.0), (3, 3.0), (5, 2.6)]:
        for t in (0.3, 1.0, 3.0, 8.0):
            raw = G.radial_margin(n, p, t)
            scale = 1.0 + G.phi(n, t) ** p
            assert G.radial_margin_scaled(n, p, t) == pytest.approx(
                raw / scale, rel=1e-10)


def test_scaled_margin_precise_path_agrees():
    for n, p, t in [(4, 8.0 / 3.0, 6.0), (5, 2.5, 15.0), (3, 3.0, 10.0)]:
        fast = G.radial_margin_scaled(n, p, t)
        slow = G.radial_margin_scaled(n, p, t, precise=True)
        assert fast == pytest.approx(slow, rel=1e-9, abs=1e-14)


def test_margin_nonnegative_at_boundary():
    for n in (3, 4, 5, 6):
        p = boundary_exponent(n)
        for t in np.geomspace(1e-3, 25.0, 40):
            assert G.radial_margin_scaled(n, p, float(t)) >= -1e-12, (n, t)


def test_asymptotic_form_matches_margin():
    # beyond the crossover the closed asymptotic form tracks the precise
    # margin to a fraction of a percent
    for n, p, t in [(4, 2.5, 35.0), (5, 2.4, 30.0), (6, 2.2, 30.0)]:
        exact = G.radial_margin_scaled(n, p, t, precise=True)
        scale_log = p * G._log_phi(n, t)
        asym = G.radial_margin_asymptotic(n, p, t)
        ratio = asym / (exact * math.exp(scale_log))
        assert ratio == pytest.approx(1.0, rel=5e-3), (n, p, ratio)


def test_violation_onset_brackets_sign_change():
    for n, p in [(4, 2.5), (5, 2.4), (6, 2.3)]:
        t0 = G.violation_onset(n, p)
        before = G.radial_margin_scaled(n, p, 0.8 * t0, precise=True)
        after = G.radial_margin_scaled(n, p, 1.5 * t0, precise=True)
        assert before > 0.0 > after, (n, p, t0)
    with pytest.raises(DomainError):
        G.violation_onset(4, 3.0)
    with pytest.raises(DomainError):
        G.violation_onset(2, 1.5)


def test_slope_factor_positive_above_boundary():
    for n in (3, 4, 6):
        p = boundary_exponent(n) + 0.3
        for t in (0.2, 1.0, 5.0, 15.0):
            assert G.margin_slope_factor(n, p, t) > 0.0


def test_ball_volume_scaling():
    sigma = unit_ball_volume(3)
    assert G.ball_volume(3, 2.0) == pytest.approx(sigma * G.phi(3, 2.0), rel=1e-13)


def test_sinh_phi_inv_roundtrip():
    for n in (2, 4):
        for s in (0.5, 3.0, 50.0):
            t = G.phi_inv(n, s)
            assert G.sinh_phi_inv(n, s) == pytest.approx(math.sinh(t), rel=1e-11)


def test_isoperimetric_tail_integral_oracle():
    # independent radial-coordinate evaluation in mpmath
    for n, p in [(2, 4.0), (3, 5.0)]:
        a = (n - 1.0) / (p - 1.0)
        with mp.workdps(30):
            ref = float(mp.quad(lambda t: mp.sinh(t) ** (-a), [0, 1, mp.inf]))
        sigma = unit_ball_volume(n)
        val, err = G.isoperimetric_tail_integral(n, p)
        assert val == pytest.approx(n * sigma * ref, rel=1e-9), (n, p)


def test_isoperimetric_tail_integral_shifted():
    # integral over (r, inf) drops as r grows and stays positive
    v0, _ = G.isoperimetric_tail_integral(2, 4.0)
    v1, _ = G.isoperimetric_tail_integral(2, 4.0, r=1.0)
    assert 0.0 < v1 < v0


def test_negative_radius_rejected():
    with pytest.raises(DomainError):
        G.phi(3, -1.0)
    with pytest.raises(DomainError):
        G.radial_margin_scaled(4, 3.0, -0.5)
