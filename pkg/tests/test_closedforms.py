import math

import numpy as np
import pytest

from kostlab.closedforms import (
    ellipsoid_quadric,
    expected_log_norm,
    genus_plane_curve,
    harnack_bound_plane,
    hyperboloid,
    log_rho_integral,
    maximality_threshold,
    moment_bound,
    projective_space,
    slice_tau,
    tau_phi_norm,
    GeometryTag,
)
from kostlab.polycore import tau_norm

EULER_GAMMA = 0.5772156649015329


def test_log_rho_integral_is_minus_gamma():
    assert log_rho_integral() == pytest.approx(-EULER_GAMMA, abs=1e-9)


@pytest.mark.parametrize("m, k, tau, want", [(1, 1, 0.0, 8.0), (2, 1, 0.0, 16.0), (1, 1, 3 / 5, 20.0)])
def test_moment_bound_examples(m, k, tau, want):
    assert moment_bound(m, k, tau) == pytest.approx(want, rel=1e-14)


def test_moment_bound_void_on_real_points():
    with pytest.raises(ValueError):
        moment_bound(1, 1, 1.0)
    with pytest.raises(ValueError):
        moment_bound(0, 1, 0.5)


def test_slice_tau_at_half():
    assert slice_tau(0.5) == pytest.approx(0.6, abs=1e-15)


def test_expected_log_norm_examples():
    assert expected_log_norm(1, 0.0) == pytest.approx(-EULER_GAMMA, abs=1e-9)
    assert expected_log_norm(1, 1.0) == pytest.approx(-1.2703628, abs=1e-7)
    assert expected_log_norm(3, 0.0) == pytest.approx(log_rho_integral() + math.log(2), abs=1e-15)


def test_monotone_in_tau():
    taus = np.linspace(0, 0.99, 50)
    e = [expected_log_norm(2, t) for t in taus]
    b = [moment_bound(2, 2, t) for t in taus]
    assert all(y <= x for x, y in zip(e, e[1:]))
    assert all(y >= x for x, y in zip(b, b[1:]))


def test_tau_phi_projective_identity():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(1, 4))
        z = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
        d = int(rng.integers(1, 11))
        assert abs(tau_phi_norm(projective_space(n), z, d) - tau_norm(z) ** d) <= 1e-12


def test_tau_phi_real_points_are_one():
    assert tau_phi_norm(projective_space(2), [1.0, -2.0, 0.5], 7) == pytest.approx(1.0, abs=1e-15)
    # x0^2 = x1^2 + x2^2 + x3^2 at a real point
    assert tau_phi_norm(ellipsoid_quadric(2), [3.0, 1.0, 2.0, 2.0], 5) == 1.0
    assert tau_phi_norm(hyperboloid(2, 3), ([1.0, 2.0], [-1.0, 0.5]), 4) == pytest.approx(1.0, abs=1e-15)


def test_tau_phi_isotropic_point():
    assert tau_phi_norm(projective_space(1), [1.0, 1j], 3) == 0.0


def test_tau_phi_off_ellipsoid_rejected():
    with pytest.raises(ValueError):
        tau_phi_norm(ellipsoid_quadric(1), [1.0, 0.0, 0.0], 2)


def test_geometry_tag_validation():
    with pytest.raises(ValueError):
        GeometryTag("torus")
    with pytest.raises(ValueError):
        hyperboloid(0, 1)


@pytest.mark.parametrize("d, g, bound", [(1, 0, 1), (4, 3, 4), (6, 10, 11)])
def test_genus_and_harnack(d, g, bound):
    assert genus_plane_curve(d) == g
    assert harnack_bound_plane(d) == bound


@pytest.mark.parametrize("d, a, want", [(4, 1, 0), (10, 1, 27), (10, "1/2", 32), (6, "1/2", 8), (6, 1, 5)])
def test_maximality_threshold(d, a, want):
    assert maximality_threshold(d, a) == want


def test_maximality_threshold_needs_positive_a():
    with pytest.raises(ValueError):
        maximality_threshold(4, 0)
