import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from vortexflow import sphere
from vortexflow.errors import PoleSingularity


def test_project_examples():
    np.testing.assert_allclose(sphere.stereo_project([0, 0, -1]), [0, 0])
    np.testing.assert_allclose(sphere.stereo_project([1, 0, 0]), [1, 0])
    with pytest.raises(PoleSingularity):
        sphere.stereo_project([0, 0, 1])


def test_unproject_examples():
    np.testing.assert_allclose(sphere.stereo_unproject([0, 0]), [0, 0, -1])
    np.testing.assert_allclose(sphere.stereo_unproject([1, 0]), [1, 0, 0])
    np.testing.assert_allclose(sphere.stereo_unproject([3, 0]), [0.6, 0, 0.8], atol=1e-15)


def test_conformal_exponent_examples():
    assert sphere.conformal_exponent([0, 0]) == pytest.approx(np.log(2))
    assert sphere.conformal_exponent([1, 0]) == pytest.approx(0.0, abs=1e-15)
    assert sphere.conformal_exponent([3, 0]) == pytest.approx(-np.log(5))


def test_chordal_examples():
    assert sphere.chordal_distance([1, 0, 0], [1, 0, 0]) == 0
    assert sphere.chordal_distance([0, 0, 1], [0, 0, -1]) == pytest.approx(2)
    assert sphere.chordal_distance([1, 0, 0], [0, 1, 0]) == pytest.approx(np.sqrt(2))


def test_metric_gradient_examples():
    np.testing.assert_allclose(sphere.metric_gradient_from_euclidean([0, 0], [1, 0]), [0.25, 0])
    np.testing.assert_allclose(sphere.metric_gradient_from_euclidean([1, 0], [0, 1]), [0, 1])
    np.testing.assert_allclose(sphere.metric_gradient_from_euclidean([2, 1], [0, 0]), [0, 0])


def test_round_trip_bulk(rng):
    P = sphere.sample_sphere(rng, 10_000, max_x3=0.99)
    back = sphere.stereo_unproject(sphere.stereo_project(P))
    assert np.max(np.linalg.norm(back - P, axis=-1)) < 1e-12


def test_unproject_lies_on_sphere(rng):
    p = rng.normal(scale=5.0, size=(1000, 2))
    assert np.max(np.abs(np.linalg.norm(sphere.stereo_unproject(p), axis=-1) - 1)) < 1e-12


coord = st.floats(-20, 20, allow_nan=False)


@settings(max_examples=300)
@given(coord, coord, coord, coord)
def test_chordal_chart_identity(a, b, c, d):
    p, q = np.array([a, b]), np.array([c, d])
    P, Q = sphere.stereo_unproject(p), sphere.stereo_unproject(q)
    lhs = np.sum((P - Q) ** 2)
    rhs = 4 * np.sum((p - q) ** 2) / ((1 + p @ p) * (1 + q @ q))
    assert abs(lhs - rhs) < 1e-12
    assert sphere.chordal_distance_chart(p, q) == pytest.approx(np.sqrt(lhs), abs=1e-12)


@pytest.mark.parametrize("R", [5.0, 20.0, 100.0])
def test_conformal_area_converges(R):
    # 2 pi int_0^R e^{2f} r dr by adaptive quadrature vs the closed form 4 pi R^2/(1+R^2)
    val, _ = integrate.quad(lambda r: sphere.conformal_weight([r, 0.0]) * 2 * np.pi * r, 0, R)
    assert val == pytest.approx(4 * np.pi * R**2 / (1 + R**2), rel=1e-10)
    assert abs(val - 4 * np.pi) < 4 * np.pi / R**2 * 1.01


def test_pushforward_matches_finite_difference(rng):
    p = rng.normal(size=2)
    v = rng.normal(size=2)
    h = 1e-6
    fd = (sphere.stereo_unproject(p + h * v) - sphere.stereo_unproject(p - h * v)) / (2 * h)
    np.testing.assert_allclose(sphere.chart_pushforward(p, v), fd, atol=1e-8)


def test_cap_sampling_stays_in_cap(rng):
    P = sphere.sample_cap(rng, 5000, 0.6)
    assert np.all(P[:, 2] <= -0.8 + 1e-15)
    np.testing.assert_allclose(np.linalg.norm(P, axis=1), 1.0)
