"""Point-vortex dynamics on the sphere with collision continuation.

Vortices move in the stereographic chart under either the gradient flow
``b_i' = -(1/pi) (grad_g)_{b_i} W`` or the Hamiltonian flow
``d_i b_i' = -(1/pi) (grad_g^perp)_{b_i} W``.  When two or more vortices
come within the collision radius (chordal distance) the integration stops,
the cluster is annihilated (net degree 0) or merged into a single vortex
(net degree +/-1), and the integration restarts from the collision time.
"""
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.integrate import solve_ivp
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import sphere
from .energy import (VortexConfiguration, interaction_sums, perp,
                     renormalized_energy_chart)
from .errors import (CapAssumptionViolated, DegreeAssumptionViolated,
                     NearCollision, PoleEscape)

KINDS = ("gradient", "hamiltonian")


@dataclass
class FlowSpec:
    kind: str = "gradient"
    rk_rel_tol: float = 1e-10
    rk_abs_tol: float = 1e-12
    collision_radius: float = 1e-3
    max_time: float = 10.0
    output_stride: float = 0.01
    # Hamiltonian runs halt at the first collision unless this is set.
    continue_after_collision: bool = None
    pole_margin: float = 1e-6
    method: str = "DOP853"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError("kind must be one of %s" % (KINDS,))
        for name in ("rk_rel_tol", "rk_abs_tol"):
            tol = getattr(self, name)
            if not 0.0 < tol <= 1e-2:
                raise ValueError("%s must lie in (0, 1e-2]" % name)
        if not 0.0 < self.collision_radius <= 0.1:
            raise ValueError("collision_radius must lie in (0, 0.1]")
        if self.output_stride <= 0.0 or self.max_time < 0.0:
            raise ValueError("output_stride must be positive, max_time non-negative")
        if self.continue_after_collision is None:
            self.continue_after_collision = self.kind == "gradient"


@dataclass
class CollisionEvent:
    time: float
    location: np.ndarray
    participant_ids: list
    net_degree: int
    action: str
    new_id: int = None


@dataclass
class Sample:
    time: float
    config: VortexConfiguration
    W: float
    V0: np.ndarray
    pair_sum: float
    segment: int


@dataclass
class TrajectoryTrace:
    kind: str
    samples: list = field(default_factory=list)
    collisions: list = field(default_factory=list)
    # Post-collision state at the start of every segment (segment 0 = initial data).
    segment_starts: list = field(default_factory=list)
    final: VortexConfiguration = None

    @property
    def times(self):
        return np.array([s.time for s in self.samples])

    @property
    def annihilation_time(self):
        """Time of the last collision when it removed every vortex, else None."""
        if self.final is not None and self.final.n == 0 and self.collisions:
            return self.collisions[-1].time
        return None


def gradient_velocity(b, d):
    """Right-hand side of the planar gradient system for +/-1 degrees.

    ``p_i' = ((1 + r_i^2)^2 / 2) (p_i / (1 + r_i^2) + d_i sum_j d_j (p_i - p_j)/|p_i - p_j|^2)``
    """
    one_r2 = 1.0 + np.sum(b * b, axis=-1)
    S = interaction_sums(b, d)
    # d_i^2 kept so that the expression is -(1/pi) grad_g W verbatim
    return (one_r2**2 / 2.0)[:, None] * ((d * d / one_r2)[:, None] * b + S)


def hamiltonian_velocity(b, d):
    return d[:, None] * perp(gradient_velocity(b, d))


def _velocity(kind):
    return gradient_velocity if kind == "gradient" else hamiltonian_velocity


def pairwise_chordal(b):
    P = sphere.stereo_unproject(b)
    diff = P[:, None, :] - P[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def flow_rhs(cfg, kind="gradient", collision_radius=1e-3):
    """Chart velocities of every vortex, shape ``(n, 2)``."""
    if kind not in KINDS:
        raise ValueError("kind must be one of %s" % (KINDS,))
    b, d = cfg.positions, cfg.degrees
    if len(d) > 1:
        dist = pairwise_chordal(b)
        np.fill_diagonal(dist, np.inf)
        if dist.min() < collision_radius / 10.0:
            raise NearCollision("vortices within %g (chordal)" % (collision_radius / 10.0))
    return _velocity(kind)(b, d)


def V0(cfg):
    """Sum of the sphere positions of all vortices."""
    if cfg.n == 0:
        return np.zeros(3)
    return cfg.sphere_points.sum(axis=0)


def pair_sum(cfg):
    """Sum over unordered pairs of squared chordal distances."""
    if cfg.n < 2:
        return 0.0
    P = cfg.sphere_points
    diff = P[:, None, :] - P[None, :, :]
    return float(0.5 * np.sum(diff * diff))


def _energy(cfg):
    return renormalized_energy_chart(cfg) if cfg.n else 0.0


def _sample(cfg, segment):
    return Sample(cfg.time, cfg, _energy(cfg), V0(cfg), pair_sum(cfg), segment)


def cluster_vortices(cfg, radius):
    """Groups (index arrays) of vortices linked by chordal distance < radius."""
    if cfg.n < 2:
        return []
    dist = pairwise_chordal(cfg.positions)
    adj = dist < radius
    np.fill_diagonal(adj, False)
    ncomp, labels = connected_components(csr_matrix(adj), directed=False)
    groups = [np.flatnonzero(labels == k) for k in range(ncomp)]
    return [g for g in groups if len(g) > 1]


def resolve_collision(cluster):
    """Continuation rule for a colliding cluster.

    ``cluster`` is a sequence of ``(chart_position, degree)``.  Returns None
    when the cluster annihilates (net degree 0), otherwise ``(position,
    degree)`` of the merged vortex placed at the normalised chordal
    centroid of the participants.
    """
    if len(cluster) < 2:
        raise ValueError("a collision needs at least two vortices")
    pos = np.array([c[0] for c in cluster], dtype=float)
    deg = np.array([c[1] for c in cluster], dtype=int)
    net = int(deg.sum())
    if net not in (-1, 0, 1):
        raise DegreeAssumptionViolated(
            "cluster with degrees %s has net degree %d" % (deg.tolist(), net))
    if net == 0:
        return None
    centroid = sphere.normalize(sphere.stereo_unproject(pos).mean(axis=0))
    return sphere.stereo_project(centroid), net


def collision_admissible(degrees):
    """Check C(k,2) + C(k+l,2) - k(k+l) < 1 for a cluster with k of the minority sign."""
    degrees = np.asarray(degrees)
    plus = int(np.sum(degrees > 0))
    minus = int(np.sum(degrees < 0))
    k, kl = min(plus, minus), max(plus, minus)
    return comb(k, 2) + comb(kl, 2) - k * kl < 1


def _pair_event(i, j, radius):
    def event(t, y):
        b = y.reshape(-1, 2)
        p, q = b[i], b[j]
        d2 = (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2
        rp = 1.0 + p[0] ** 2 + p[1] ** 2
        rq = 1.0 + q[0] ** 2 + q[1] ** 2
        return np.sqrt(4.0 * d2 / (rp * rq)) - radius
    event.terminal = True
    event.direction = -1
    return event


def _pole_event(margin):
    # x3 = (r^2 - 1)/(r^2 + 1) >= 1 - margin  <=>  r^2 >= (2 - margin)/margin
    r2max = (2.0 - margin) / margin

    def event(t, y):
        b = y.reshape(-1, 2)
        return r2max - np.max(np.sum(b * b, axis=1))
    event.terminal = True
    event.direction = -1
    return event


def _stride_times(t0, t1, stride):
    k0 = np.floor(t0 / stride + 1e-9) + 1
    k1 = np.ceil(t1 / stride - 1e-9) - 1
    if k1 < k0:
        return np.empty(0)
    return np.arange(k0, k1 + 1) * stride


def integrate(cfg0, spec=None):
    """Integrate a vortex configuration with collision continuation.

    Returns a TrajectoryTrace.  The integration ends when no vortices remain,
    at ``spec.max_time``, or (Hamiltonian default) at the first collision.
    """
    spec = spec or FlowSpec()
    cfg = cfg0.copy().validate()
    velocity = _velocity(spec.kind)
    trace = TrajectoryTrace(spec.kind)
    next_id = int(cfg.ids.max()) + 1 if cfg.n else 0
    segment = 0
    t_end = spec.max_time

    def restart_state(cfg, t):
        nonlocal next_id
        # Resolve clusters already inside the collision radius before integrating.
        while True:
            groups = cluster_vortices(cfg, spec.collision_radius)
            if not groups:
                return cfg
            cfg = _apply_collisions(cfg, groups, t, trace, next_id)
            next_id += len(groups)

    cfg = restart_state(cfg, cfg.time)
    trace.segment_starts.append(_sample(cfg, segment))
    trace.samples.append(trace.segment_starts[-1])
    t = cfg.time
    while cfg.n > 0 and t < t_end:
        d = cfg.degrees.copy()
        ids = cfg.ids.copy()
        n = len(d)
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        events = [_pair_event(i, j, spec.collision_radius) for i, j in pairs]
        events.append(_pole_event(spec.pole_margin))

        def rhs(_t, y, d=d):
            # rejected trial steps near a collision may overflow; the step is then shrunk
            with np.errstate(over="ignore", invalid="ignore"):
                return velocity(y.reshape(-1, 2), d).ravel()

        sol = solve_ivp(rhs, (t, t_end), cfg.positions.ravel(), method=spec.method,
                        rtol=spec.rk_rel_tol, atol=spec.rk_abs_tol, events=events,
                        dense_output=True)
        if sol.status == -1:
            raise RuntimeError("integrator failed: %s" % sol.message)
        t_stop = float(sol.t[-1])
        for ts in _stride_times(t, t_stop, spec.output_stride):
            c = VortexConfiguration(sol.sol(ts).reshape(-1, 2), d, float(ts), ids)
            trace.samples.append(_sample(c, segment))
        end_cfg = VortexConfiguration(sol.y[:, -1].reshape(-1, 2), d, t_stop, ids)
        if t_stop > t:
            trace.samples.append(_sample(end_cfg, segment))
        t = t_stop
        cfg = end_cfg
        if sol.status != 1:
            break
        if len(sol.t_events[-1]):
            trace.final = cfg
            raise PoleEscape("vortex reached x3 >= 1 - %g at t=%.6g"
                             % (spec.pole_margin, t), trace)
        if not spec.continue_after_collision:
            groups = cluster_vortices(cfg, spec.collision_radius * (1 + 1e-6))
            for g in groups:
                trace.collisions.append(CollisionEvent(
                    t, sphere.normalize(cfg.sphere_points[g].mean(axis=0)),
                    ids[g].tolist(), int(d[g].sum()), "halt"))
            break
        groups = cluster_vortices(cfg, spec.collision_radius * (1 + 1e-6))
        cfg = _apply_collisions(cfg, groups, t, trace, next_id)
        next_id += len(groups)
        cfg = restart_state(cfg, t)
        segment += 1
        trace.segment_starts.append(_sample(cfg, segment))
    trace.final = cfg
    return trace


def _apply_collisions(cfg, groups, t, trace, next_id):
    keep = np.ones(cfg.n, dtype=bool)
    new_pos, new_deg, new_ids = [], [], []
    for k, g in enumerate(groups):
        cluster = [(cfg.positions[i], cfg.degrees[i]) for i in g]
        net = int(cfg.degrees[g].sum())
        P_star = sphere.normalize(cfg.sphere_points[g].mean(axis=0))
        merged = resolve_collision(cluster)
        event = CollisionEvent(t, P_star, cfg.ids[g].tolist(), net,
                               "annihilate" if merged is None else "merge")
        if merged is not None:
            event.new_id = next_id + k
            new_pos.append(merged[0])
            new_deg.append(merged[1])
            new_ids.append(event.new_id)
        trace.collisions.append(event)
        keep[g] = False
    pos = np.concatenate([cfg.positions[keep], np.reshape(new_pos, (-1, 2))])
    deg = np.concatenate([cfg.degrees[keep], np.asarray(new_deg, dtype=int)])
    ids = np.concatenate([cfg.ids[keep], np.asarray(new_ids, dtype=int)])
    return VortexConfiguration(pos, deg, t, ids)


# -- sphere-side formulation -------------------------------------------------

def sphere_gradient_velocity(P, d):
    """-(1/pi) grad_{S^2} W using the chordal form of W, for points in R^3."""
    diff = P[:, None, :] - P[None, :, :]
    r2 = np.sum(diff * diff, axis=-1)
    np.fill_diagonal(r2, np.inf)
    G = 2.0 * np.einsum("ij,ijk->ik", (d[:, None] * d[None, :]) / r2, diff)
    # G is -(1/pi) times the ambient gradient; project onto the tangent plane
    return G - np.sum(G * P, axis=1)[:, None] * P


def integrate_on_sphere(P0, degrees, t_final, rtol=1e-11, atol=1e-13, t_eval=None):
    """Integrate the gradient flow directly in R^3 (no collision handling)."""
    d = np.asarray(degrees, dtype=int)

    def rhs(_t, y):
        return sphere_gradient_velocity(y.reshape(-1, 3), d).ravel()

    sol = solve_ivp(rhs, (0.0, t_final), np.asarray(P0, float).ravel(), method="DOP853",
                    rtol=rtol, atol=atol, t_eval=t_eval)
    return sol.t, sol.y.T.reshape(len(sol.t), -1, 3)


# -- diagnostics -------------------------------------------------------------

def diagnostics(trace):
    """Residuals of the centre-of-mass and pair-sum laws along a trace.

    Returns a dict with the maximal residuals

    * ``r1``: |V0(t) - e^{t - t0} V0(t0)| within each collision-free segment
      (``r1_rel`` divides by |V0(t0)| e^{t - t0} where nonzero),
    * ``r2``: drift of the direction of V0 when V0(t0) != 0,
    * ``r3``: |d/dt pair_sum + 2 |V0|^2| by centred differences,
    * ``W_increase`` / ``W_drift``: largest per-sample increase and largest
      deviation from the segment's initial value of W,

    plus degree bookkeeping and the collision admissibility check.
    """
    if not trace.samples:
        raise ValueError("empty trace")
    r1 = r1_rel = r2 = r3 = w_inc = w_drift = 0.0
    by_segment = {}
    for s in trace.samples:
        by_segment.setdefault(s.segment, []).append(s)
    for seg, samples in by_segment.items():
        start = trace.segment_starts[seg]
        t0, v0 = start.time, start.V0
        nv0 = np.linalg.norm(v0)
        Ws = [start.W]
        for s in samples:
            pred = np.exp(s.time - t0) * v0
            err = np.linalg.norm(s.V0 - pred)
            r1 = max(r1, err)
            if nv0 > 0:
                r1_rel = max(r1_rel, err / np.linalg.norm(pred))
                nv = np.linalg.norm(s.V0)
                if nv > 0:
                    r2 = max(r2, np.linalg.norm(s.V0 / nv - v0 / nv0))
            Ws.append(s.W)
        Ws = np.array(Ws)
        w_inc = max(w_inc, float(np.max(np.diff(Ws), initial=0.0)))
        w_drift = max(w_drift, float(np.max(np.abs(Ws - start.W))))
        if len(samples) >= 3:
            t = np.array([s.time for s in samples])
            ps = np.array([s.pair_sum for s in samples])
            v2 = np.array([s.V0 @ s.V0 for s in samples])
            keep = np.diff(t) > 0
            t, ps, v2 = t[np.r_[True, keep]], ps[np.r_[True, keep]], v2[np.r_[True, keep]]
            if len(t) >= 3:
                deriv = np.gradient(ps, t, edge_order=2)[1:-1]
                r3 = max(r3, float(np.max(np.abs(deriv + 2.0 * v2[1:-1]))))
    bookkeeping = all(s.config.degrees.sum() == 0 and s.config.n % 2 == 0
                      for s in trace.segment_starts)
    return {
        "r1": r1, "r1_rel": r1_rel, "r2": r2, "r3": r3,
        "W_increase": w_inc, "W_drift": w_drift,
        "degree_bookkeeping": bookkeeping,
        "collisions_admissible": all(_event_admissible(trace, e) for e in trace.collisions),
        "n_collisions": len(trace.collisions),
    }


def _event_admissible(trace, event):
    degrees = {}
    for s in trace.segment_starts + trace.samples:
        for i, deg in zip(s.config.ids, s.config.degrees):
            degrees[int(i)] = int(deg)
    d = [degrees[i] for i in event.participant_ids]
    return collision_admissible(d)


# -- annihilation scan -------------------------------------------------------

@dataclass
class ScanReport:
    n: int
    s: float
    kappa: float
    bound: float
    slack: float
    completion_times: np.ndarray
    n_collisions: np.ndarray

    @property
    def trials(self):
        return len(self.completion_times)

    @property
    def within_bound(self):
        return int(np.sum(self.completion_times <= self.bound + self.slack))

    @property
    def fraction_within(self):
        return self.within_bound / self.trials if self.trials else float("nan")

    @property
    def max_completion_time(self):
        return float(np.max(self.completion_times)) if self.trials else float("nan")


def annihilation_bound(n, s):
    """Return (kappa, ln(1/kappa)) for 2n vortices in the cap A_s."""
    c = np.sqrt(1.0 - s * s)
    if not 0.0 <= s < 1.0 or not c > (n - 1) / n:
        raise CapAssumptionViolated(
            "need sqrt(1 - s^2) > (n - 1)/n, got s=%g, n=%d" % (s, n))
    kappa = n * c - (n - 1)
    return kappa, float(np.log(1.0 / kappa))


def alternating_degrees(n):
    """+1 for odd (1-based) index, -1 for even."""
    return np.tile([1, -1], n)


def sample_cap_configuration(rng, n, s, min_separation):
    while True:
        P = sphere.sample_cap(rng, 2 * n, s)
        diff = P[:, None, :] - P[None, :, :]
        dist = np.sqrt(np.sum(diff * diff, axis=-1))
        np.fill_diagonal(dist, np.inf)
        if dist.min() >= min_separation:
            return VortexConfiguration.from_sphere(P, alternating_degrees(n))


def _scan_trial(args):
    n, s, seed, trial, spec = args
    rng = np.random.default_rng([seed, trial])
    cfg = sample_cap_configuration(rng, n, s, 10.0 * spec.collision_radius)
    trace = integrate(cfg, spec)
    t_ann = trace.annihilation_time
    return (np.inf if t_ann is None else t_ann), len(trace.collisions)


def annihilation_scan(n, s, trials, seed=0, spec=None, slack=None, workers=None):
    """Sample 2n alternating-degree vortices in A_s and time their annihilation.

    Each trial draws its generator from ``(seed, trial)`` so the result does
    not depend on how trials are scheduled across ``workers``.
    """
    kappa, bound = annihilation_bound(n, s)
    if spec is None:
        spec = FlowSpec(max_time=2.0 * bound + 1.0)
    if spec.kind != "gradient":
        raise ValueError("annihilation scan uses the gradient flow")
    slack = 10.0 * spec.collision_radius if slack is None else slack
    if workers is None:
        workers = int(os.environ.get("VORTEXFLOW_THREADS", os.cpu_count() or 1))
    jobs = [(n, s, seed, k, spec) for k in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_trial, jobs))
    else:
        results = [_scan_trial(j) for j in jobs]
    times = np.array([r[0] for r in results], dtype=float)
    ncol = np.array([r[1] for r in results], dtype=int)
    return ScanReport(n, s, kappa, bound, slack, times, ncol)


def explicit_pair_q(q0, t):
    """q(t) = sqrt((1 + c e^t)/(1 - c e^t)), c = (q0^2 - 1)/(q0^2 + 1)."""
    c = (q0 * q0 - 1.0) / (q0 * q0 + 1.0)
    x = c * np.exp(t)
    return np.sqrt((1.0 + x) / (1.0 - x))


def explicit_pair_end_time(q0):
    """Collision time (q0 < 1) or escape time to the north pole (q0 > 1)."""
    if q0 == 1.0:
        return np.inf
    return float(np.log(abs((1.0 + q0 * q0) / (1.0 - q0 * q0))))
