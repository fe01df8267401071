"""Warping profiles, the mollified step, cutoffs, and mean curvature."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diraclab.errors import InvalidProfileError, ResolutionError, UsageError
from diraclab.profiles import (WarpingProfile, constant_profile,
                               exponential_profile, make_cutoffs,
                               mean_curvature, smooth_step)


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

def test_exponential_profile_closed_form():
    # rho(u) = exp(-u / (2(m-1))); derivatives just multiply by the rate
    for m in (2, 3, 4, 7):
        p = exponential_profile(m, 5.0)
        rate = -1.0 / (2.0 * (m - 1))
        u = np.linspace(0.0, 5.0, 41)
        for d in range(4):
            np.testing.assert_allclose(p.rho(u, d), rate**d * np.exp(rate * u),
                                       rtol=1e-13)


def test_exponential_rho_sq_is_exponential_in_its_own_right():
    p = exponential_profile(4, 3.0)
    r2 = p.rho_sq_fn()
    u = np.linspace(0.0, 3.0, 17)
    np.testing.assert_allclose(r2(u), p.rho(u) ** 2, rtol=1e-13)
    np.testing.assert_allclose(r2(u, 1), 2 * p.rho(u) * p.rho(u, 1),
                               rtol=1e-13)


def test_constant_profile():
    p = constant_profile(0.7, 2.0)
    assert p.rho(1.3) == 0.7
    assert p.rho(0.2, 1) == 0.0
    mc = mean_curvature(p)
    assert mc.h(1.0) == 0.0 and mc.h_prime(1.5) == 0.0


def test_profile_validation():
    with pytest.raises(InvalidProfileError):
        exponential_profile(1, 2.0)         # m must be >= 2
    with pytest.raises(InvalidProfileError):
        exponential_profile(3, -1.0)
    with pytest.raises(InvalidProfileError):
        constant_profile(0.0, 1.0)
    with pytest.raises(InvalidProfileError):
        WarpingProfile.from_dict({"kind": "sampled", "domain_length": 1.0,
                                  "knots": [0.0, 0.5, 1.0],
                                  "values": [1.0, -0.2, 0.5]})


def test_sampled_profile_matches_source_function():
    # sample exp(-u/4) densely; the quintic spline should reproduce value and
    # first two derivatives well inside the knot range
    knots = np.linspace(0.0, 1.0, 33)
    doc = {"kind": "sampled", "domain_length": 1.0, "knots": list(knots),
           "values": list(np.exp(-knots / 4.0)), "order": 5}
    p = WarpingProfile.from_dict(doc)
    u = np.linspace(0.05, 0.95, 19)
    np.testing.assert_allclose(p.rho(u), np.exp(-u / 4), rtol=1e-9)
    np.testing.assert_allclose(p.rho(u, 1), -0.25 * np.exp(-u / 4), rtol=1e-6)
    with pytest.raises(ResolutionError):
        p.rho(0.5, 9)  # beyond the spline order


def test_profile_round_trip():
    for p in (exponential_profile(3, 2.5), constant_profile(1.2, 4.0)):
        q = WarpingProfile.from_dict(p.to_dict())
        u = np.linspace(0.0, p.domain_length, 9)
        np.testing.assert_allclose(q.rho(u), p.rho(u), rtol=0, atol=0)


# ---------------------------------------------------------------------------
# mollified step
# ---------------------------------------------------------------------------

def test_smooth_step_plateaus_and_midpoint():
    assert smooth_step(-2.0) == 0.0
    assert smooth_step(0.0) == 0.0
    assert smooth_step(1.0) == 1.0
    assert smooth_step(3.0) == 1.0
    assert smooth_step(0.5) == pytest.approx(0.5, abs=1e-12)


def test_smooth_step_derivatives_vanish_at_plateaus():
    for d in range(1, 5):
        assert smooth_step(-0.5, d) == 0.0
        assert smooth_step(1.5, d) == 0.0
        # C-infinity flatness: derivatives approach 0 at the joints
        assert abs(smooth_step(1e-4, d)) < 1e-3
        assert abs(smooth_step(1.0 - 1e-4, d)) < 1e-3


def test_smooth_step_first_derivative_matches_fd():
    x = np.linspace(0.1, 0.9, 17)
    h = 1e-6
    fd = (smooth_step(x + h) - smooth_step(x - h)) / (2 * h)
    np.testing.assert_allclose(smooth_step(x, 1), fd, rtol=1e-7, atol=1e-9)


@given(st.floats(min_value=-3.0, max_value=3.0))
@settings(max_examples=200, deadline=None)
def test_smooth_step_range_and_symmetry(x):
    s = float(smooth_step(x))
    assert 0.0 <= s <= 1.0
    # the gluing is symmetric about x = 1/2
    assert s + float(smooth_step(1.0 - x)) == pytest.approx(1.0, abs=1e-12)


@given(st.floats(min_value=-2.0, max_value=2.0),
       st.floats(min_value=1e-6, max_value=0.5))
@settings(max_examples=100, deadline=None)
def test_smooth_step_monotone(x, dx):
    assert float(smooth_step(x + dx)) >= float(smooth_step(x)) - 1e-12


# ---------------------------------------------------------------------------
# cutoffs
# ---------------------------------------------------------------------------

def test_cutoff_plateaus():
    t = 3.0
    cs = make_cutoffs(t)
    # psi ramps up over [-1, 0]
    assert cs.psi(-1.0) == 0.0 and cs.psi(-1.7) == 0.0
    assert cs.psi(0.0) == 1.0 and cs.psi(t / 2) == 1.0
    # chi ramps up over [t, t+1]
    assert cs.chi(t) == 0.0 and cs.chi(0.5) == 0.0
    assert cs.chi(t + 1.0) == 1.0 and cs.chi(t + 2.0) == 1.0


def test_phi_cutoffs():
    t = 3.0
    cs = make_cutoffs(t)
    for u in (-1.0, -2.0, 2.0, 5.0):
        assert cs.phi_inf(u) == 1.0
        assert cs.phi_t(u) == 1.0
    for u in (0.0, 0.25, 0.5, 1.0):
        assert cs.phi_inf(u) == 0.0
        assert cs.phi_t(u) == pytest.approx(math.exp(-t), rel=1e-13)
    # interpolation formula everywhere, not only on the plateaus
    u = np.linspace(-2.0, 3.0, 101)
    np.testing.assert_allclose(
        cs.phi_t(u), 1.0 - (1.0 - math.exp(-t)) * (1.0 - cs.phi_inf(u)),
        rtol=0, atol=1e-14)


def test_cutoffs_are_smooth_at_the_joints():
    cs = make_cutoffs(2.0)
    for fn in (cs.psi, cs.chi, cs.phi_inf, cs.phi_t):
        for d in (1, 2, 3):
            vals = fn(np.linspace(-2.5, 4.5, 281), d)
            assert np.all(np.isfinite(vals))


# ---------------------------------------------------------------------------
# mean curvature
# ---------------------------------------------------------------------------

def test_mean_curvature_exponential_is_constant():
    for m in (2, 3, 5, 9):
        mc = mean_curvature(exponential_profile(m, 4.0))
        u = np.linspace(0.0, 4.0, 21)
        np.testing.assert_allclose(mc.h(u), 1.0 / (2 * (m - 1)), rtol=1e-13)
        np.testing.assert_allclose(mc.h_prime(u), 0.0, atol=1e-13)


def test_mean_curvature_matches_finite_differences():
    # sampled non-trivial profile: rho = 1 + 0.3 sin(u)
    knots = np.linspace(0.0, 2.0, 65)
    p = WarpingProfile.from_dict({
        "kind": "sampled", "domain_length": 2.0, "knots": list(knots),
        "values": list(1.0 + 0.3 * np.sin(knots)), "order": 5})
    mc = mean_curvature(p)
    u = np.linspace(0.2, 1.8, 9)
    rho = 1.0 + 0.3 * np.sin(u)
    rho_p = 0.3 * np.cos(u)
    rho_pp = -0.3 * np.sin(u)
    np.testing.assert_allclose(mc.h(u), -rho_p / rho, rtol=1e-6)
    np.testing.assert_allclose(mc.h_prime(u), -rho_pp / rho + (rho_p / rho) ** 2,
                               rtol=1e-4)


def test_cutoff_argument_validation():
    with pytest.raises(UsageError):
        make_cutoffs(0.0)
    with pytest.raises(UsageError):
        make_cutoffs(-1.0)
