import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vortexflow import sphere
from vortexflow.energy import (VortexConfiguration, grad_W, grad_W_all, perp,
                               renormalized_energy_chart, renormalized_energy_chordal,
                               skew_grad_W, skew_grad_W_all)
from vortexflow.errors import CoincidentVortices

from conftest import random_configuration


def pair(q):
    return VortexConfiguration([[q, 0], [-q, 0]], [1, -1])


def test_chart_energy_equatorial_pair():
    assert renormalized_energy_chart(pair(1.0)) == pytest.approx(2 * np.pi * np.log(2))


@pytest.mark.parametrize("q", [0.3, 1.0, 2.5])
def test_chart_energy_origin_pair(q):
    cfg = VortexConfiguration([[0, 0], [q, 0]], [1, -1])
    expected = 2 * np.pi * np.log(2) + 2 * np.pi * np.log(q) - np.pi * np.log(1 + q * q)
    assert renormalized_energy_chart(cfg) == pytest.approx(expected, rel=1e-14)


def test_relabeling_invariance(rng):
    cfg = random_configuration(rng, 3)
    perm = rng.permutation(cfg.n)
    other = VortexConfiguration(cfg.positions[perm], cfg.degrees[perm])
    assert renormalized_energy_chart(other) == pytest.approx(renormalized_energy_chart(cfg), abs=1e-12)


def test_chordal_examples():
    antipodal = VortexConfiguration.from_sphere([[1, 0, 0], [-1, 0, 0]], [1, -1])
    assert renormalized_energy_chordal(antipodal) == pytest.approx(2 * np.pi * np.log(2))
    # chordal separation 1 on the equator: 60 degrees apart
    unit = VortexConfiguration.from_sphere(
        [[1, 0, 0], [0.5, np.sqrt(3) / 2, 0]], [1, -1])
    assert renormalized_energy_chordal(unit) == pytest.approx(0.0, abs=1e-14)


def test_chart_equals_chordal_bulk(rng):
    worst = 0.0
    for _ in range(1000):
        cfg = random_configuration(rng, rng.integers(1, 5), max_x3=0.9, min_sep=1e-3)
        worst = max(worst, abs(renormalized_energy_chart(cfg) - renormalized_energy_chordal(cfg)))
    assert worst < 1e-10


def test_coincident_vortices_rejected():
    cfg = VortexConfiguration([[0.2, 0.1], [0.2, 0.1]], [1, -1])
    with pytest.raises(CoincidentVortices):
        renormalized_energy_chart(cfg)
    with pytest.raises(CoincidentVortices):
        grad_W(cfg, 0)


def fd_metric_gradient(cfg, i, step=1e-6):
    g = np.zeros(2)
    for k in range(2):
        plus, minus = cfg.copy(), cfg.copy()
        plus.positions[i, k] += step
        minus.positions[i, k] -= step
        g[k] = (renormalized_energy_chart(plus) - renormalized_energy_chart(minus)) / (2 * step)
    return sphere.metric_gradient_from_euclidean(cfg.positions[i], g)


def test_gradient_at_equilibrium_pair():
    np.testing.assert_allclose(grad_W(pair(1.0), 0), [0, 0], atol=1e-14)


def test_gradient_half_pair_flow_value():
    flow_value = -grad_W(pair(0.5), 0) / np.pi
    np.testing.assert_allclose(flow_value, [-0.46875, 0], atol=1e-14)


@pytest.mark.parametrize("npairs", [1, 2, 3, 4])
def test_gradient_matches_finite_differences(rng, npairs):
    for _ in range(10):
        cfg = random_configuration(rng, npairs, max_x3=0.5, min_sep=0.2)
        G = grad_W_all(cfg)
        for i in range(cfg.n):
            fd = fd_metric_gradient(cfg, i)
            assert np.linalg.norm(G[i] - fd) <= 1e-5 * max(np.linalg.norm(G[i]), 1.0)


def test_skew_gradient_is_rotation(rng):
    np.testing.assert_allclose(perp([3.0, -2.0]), [-2.0, -3.0])
    np.testing.assert_allclose(skew_grad_W(pair(1.0), 1), [0, 0], atol=1e-14)
    cfg = random_configuration(rng, 3)
    G, S = grad_W_all(cfg), skew_grad_W_all(cfg)
    np.testing.assert_allclose(np.sum(G * S, axis=1), 0, atol=1e-10)
    np.testing.assert_allclose(S[:, 0], G[:, 1])
    np.testing.assert_allclose(S[:, 1], -G[:, 0])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 2 * np.pi))
def test_rotation_equivariance(seed, angle):
    cfg = random_configuration(np.random.default_rng(seed), 2, min_sep=1e-2)
    rotated = VortexConfiguration.from_sphere(
        sphere.rotate_about_x3(cfg.sphere_points, angle), cfg.degrees)
    assert renormalized_energy_chart(rotated) == pytest.approx(renormalized_energy_chart(cfg), abs=1e-10)
    assert renormalized_energy_chordal(rotated) == pytest.approx(renormalized_energy_chordal(cfg), abs=1e-10)


def test_validate_rejects_bad_degrees():
    with pytest.raises(ValueError):
        VortexConfiguration([[0, 0], [1, 0]], [1, 1]).validate()
    with pytest.raises(ValueError):
        VortexConfiguration([[0, 0], [1, 0]], [2, -2]).validate()
