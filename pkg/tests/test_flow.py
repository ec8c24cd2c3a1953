import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from vortexflow import flow, sphere
from vortexflow.energy import VortexConfiguration, grad_W_all, renormalized_energy_chart
from vortexflow.errors import CapAssumptionViolated, DegreeAssumptionViolated, NearCollision

from conftest import random_configuration


def pair(q):
    return VortexConfiguration([[q, 0], [-q, 0]], [1, -1])


def test_gradient_velocity_examples():
    np.testing.assert_allclose(flow.flow_rhs(pair(1.0)), 0, atol=1e-14)
    np.testing.assert_allclose(flow.flow_rhs(pair(0.5)), [[-0.46875, 0], [0.46875, 0]], atol=1e-14)
    # the ODE is -(1/pi) grad_g W
    cfg = random_configuration(np.random.default_rng(1), 2)
    np.testing.assert_allclose(flow.flow_rhs(cfg), -grad_W_all(cfg) / np.pi, atol=1e-12)


def test_hamiltonian_velocity_is_rotated_gradient(rng):
    cfg = random_configuration(rng, 2)
    g = flow.flow_rhs(cfg, "gradient")
    h = flow.flow_rhs(cfg, "hamiltonian")
    np.testing.assert_allclose(h, cfg.degrees[:, None] * np.c_[g[:, 1], -g[:, 0]])


def test_near_collision_raises():
    with pytest.raises(NearCollision):
        flow.flow_rhs(pair(1e-5), collision_radius=1e-3)


def test_flowspec_validation():
    with pytest.raises(ValueError):
        flow.FlowSpec(kind="other")
    with pytest.raises(ValueError):
        flow.FlowSpec(rk_rel_tol=-1.0)


@pytest.mark.parametrize("q0", [1 / 3, 0.5, 0.9, 1.1, 2.0])
def test_explicit_pair_solution(q0):
    T = flow.explicit_pair_end_time(q0)
    trace = flow.integrate(pair(q0), flow.FlowSpec(max_time=0.9 * T, output_stride=0.9 * T / 50))
    assert trace.samples[-1].time == pytest.approx(0.9 * T)
    for s in trace.samples:
        q = s.config.positions[0, 0]
        assert abs(q - flow.explicit_pair_q(q0, s.time)) <= 1e-6 * flow.explicit_pair_q(q0, s.time)
        np.testing.assert_allclose(s.config.positions[1], [-q, 0], atol=1e-12)


def test_explicit_solution_agrees_with_scalar_ode():
    # scalar reduction q' = (1+q^2)^2/2 (q/(1+q^2) - 1/(2q)) integrated independently
    rhs = lambda t, q: (1 + q * q) ** 2 / 2 * (q / (1 + q * q) - 1 / (2 * q))
    sol = solve_ivp(rhs, (0, 0.2), [1 / 3], rtol=1e-12, atol=1e-14, dense_output=True)
    for t in np.linspace(0, 0.2, 7):
        assert sol.sol(t)[0] == pytest.approx(flow.explicit_pair_q(1 / 3, t), rel=1e-9)


def test_equatorial_pair_stationary():
    trace = flow.integrate(pair(1.0), flow.FlowSpec(max_time=2.0))
    for s in trace.samples:
        np.testing.assert_allclose(s.config.positions, [[1, 0], [-1, 0]], atol=1e-12)
    diag = flow.diagnostics(trace)
    assert diag["r1"] == 0 and diag["r3"] < 1e-12


def test_collision_and_annihilation_at_origin():
    trace = flow.integrate(pair(1 / 3), flow.FlowSpec(max_time=1.0))
    assert trace.final.n == 0
    assert len(trace.collisions) == 1
    ev = trace.collisions[0]
    assert ev.action == "annihilate" and ev.net_degree == 0
    assert abs(ev.time - np.log(1.25)) < 1e-3
    np.testing.assert_allclose(ev.location, [0, 0, -1], atol=1e-3)
    assert trace.annihilation_time == ev.time


def test_resolve_collision_examples():
    assert flow.resolve_collision([([0.1, 0], 1), ([-0.1, 0], -1)]) is None
    pos, deg = flow.resolve_collision([([0.1, 0], 1), ([-0.1, 0], -1), ([0, 0.1], 1)])
    assert deg == 1
    expected = sphere.stereo_project(sphere.normalize(
        sphere.stereo_unproject(np.array([[0.1, 0], [-0.1, 0], [0, 0.1]])).mean(axis=0)))
    np.testing.assert_allclose(pos, expected)
    with pytest.raises(DegreeAssumptionViolated):
        flow.resolve_collision([([0.1, 0], 1), ([-0.1, 0], 1)])


def test_collision_admissibility():
    assert flow.collision_admissible([1, -1])
    assert flow.collision_admissible([1, -1, 1])
    assert flow.collision_admissible([1, 1, 1, -1])
    assert not flow.collision_admissible([1, 1, 1, 1, -1])
    assert not flow.collision_admissible([1, 1])


def test_three_vortex_merge_keeps_degree():
    # a -1 at the origin pulls two +1 vortices in symmetrically
    cfg = VortexConfiguration([[0.06, 0], [0, 0], [-0.06, 0], [0, 3.0]], [1, -1, 1, -1])
    trace = flow.integrate(cfg, flow.FlowSpec(max_time=0.05, collision_radius=0.05))
    ev = trace.collisions[0]
    assert ev.action == "merge" and ev.net_degree == 1
    assert sorted(ev.participant_ids) == [0, 1, 2]
    after = trace.segment_starts[1].config
    assert after.n == 2 and after.degrees.sum() == 0
    assert flow.diagnostics(trace)["collisions_admissible"]


def test_center_of_mass_and_pair_sum_laws(rng):
    spec = flow.FlowSpec(max_time=0.5, rk_rel_tol=1e-10, rk_abs_tol=1e-12,
                         output_stride=1e-3, continue_after_collision=False)
    for k in range(12):
        cfg = random_configuration(rng, 1 + k % 3, max_x3=0.3, min_sep=0.3)
        trace = flow.integrate(cfg, spec)
        if trace.collisions:
            continue
        d = flow.diagnostics(trace)
        assert d["r1_rel"] <= 1e-6
        assert d["r3"] <= 1e-5


def test_pair_sum_identity(rng):
    cfg = random_configuration(rng, 3)
    P = cfg.sphere_points
    direct = sum(np.sum((P[i] - P[j]) ** 2) for i in range(cfg.n) for j in range(i + 1, cfg.n))
    assert flow.pair_sum(cfg) == pytest.approx(direct, rel=1e-12)
    assert direct == pytest.approx(cfg.n ** 2 - np.sum(flow.V0(cfg) ** 2), rel=1e-12)


def test_W_decreases_along_gradient_flow(rng):
    cfg = random_configuration(rng, 2, max_x3=0.3, min_sep=0.3)
    trace = flow.integrate(cfg, flow.FlowSpec(max_time=0.3, continue_after_collision=False))
    d = flow.diagnostics(trace)
    assert d["W_increase"] <= 1e-10


def test_hamiltonian_conserves_W(rng):
    spec = flow.FlowSpec(kind="hamiltonian", max_time=1.0, rk_rel_tol=1e-11, rk_abs_tol=1e-13)
    for _ in range(3):
        cfg = random_configuration(rng, 2, max_x3=0.3, min_sep=0.3)
        W0 = renormalized_energy_chart(cfg)
        trace = flow.integrate(cfg, spec)
        if trace.collisions:
            continue
        assert flow.diagnostics(trace)["W_drift"] <= 1e-6 * max(abs(W0), np.pi)


def test_sphere_and_chart_formulations_agree(rng):
    cfg = random_configuration(rng, 2, max_x3=0.2, min_sep=0.4)
    t_eval = np.linspace(0, 0.05, 6)
    trace = flow.integrate(cfg, flow.FlowSpec(max_time=0.05, output_stride=0.01,
                                              rk_rel_tol=1e-11, rk_abs_tol=1e-13))
    _, Ps = flow.integrate_on_sphere(cfg.sphere_points, cfg.degrees, 0.05, t_eval=t_eval)
    for s, P in zip(trace.samples, Ps):
        np.testing.assert_allclose(s.config.sphere_points, P, atol=1e-8)


def test_sphere_velocity_is_pushforward_of_chart_velocity(rng):
    cfg = random_configuration(rng, 2)
    v = flow.flow_rhs(cfg)
    push = np.array([sphere.chart_pushforward(p, w) for p, w in zip(cfg.positions, v)])
    np.testing.assert_allclose(flow.sphere_gradient_velocity(cfg.sphere_points, cfg.degrees),
                               push, atol=1e-10)


def test_annihilation_bound_values():
    kappa, T = flow.annihilation_bound(1, 0.6)
    assert kappa == pytest.approx(0.8) and T == pytest.approx(np.log(1.25))
    kappa, T = flow.annihilation_bound(2, np.sqrt(1 - 0.81))
    assert kappa == pytest.approx(0.8)
    with pytest.raises(CapAssumptionViolated):
        flow.annihilation_bound(2, 0.9)


def test_small_annihilation_scan_is_reproducible():
    s = np.sqrt(1 - 0.81)
    a = flow.annihilation_scan(2, s, 4, seed=7)
    b = flow.annihilation_scan(2, s, 4, seed=7)
    np.testing.assert_array_equal(a.completion_times, b.completion_times)
    assert a.fraction_within == 1.0


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95))
def test_pair_q_is_monotone_to_collision(q0):
    T = flow.explicit_pair_end_time(q0)
    t = np.linspace(0, 0.99 * T, 20)
    q = flow.explicit_pair_q(q0, t)
    assert np.all(np.diff(q) < 0)
    assert flow.explicit_pair_q(q0, 0.0) == pytest.approx(q0)
