"""Cross-check tracked PDE vortices against the point-vortex ODE."""
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import linear_sum_assignment

from .. import flow as pv
from .. import sphere
from ..errors import TrackingLoss
from .analysis import energy, locate_vortices
from .field import build_well_prepared
from .stepping import gp_flow_step, heat_flow_step


@dataclass
class ComparisonReport:
    flow: str
    epsilon: float
    h: float
    pde_times: np.ndarray
    ode_times: np.ndarray
    degrees: np.ndarray
    tracked: np.ndarray     # (samples, n, 2) chart positions
    predicted: np.ndarray   # (samples, n, 2)
    energies: np.ndarray

    @property
    def deviations(self):
        """Largest chordal distance between tracked and predicted vortices per sample."""
        d = sphere.chordal_distance_chart(self.tracked, self.predicted)
        return d.max(axis=1)

    @property
    def max_deviation(self):
        return float(self.deviations.max())

    @property
    def max_drift(self):
        """Largest chart displacement of a tracked vortex from its start."""
        return float(np.max(np.linalg.norm(self.tracked - self.tracked[0], axis=-1)))

    @property
    def direction_cosines(self):
        """Cosine between tracked and predicted net displacement, per vortex."""
        a = self.tracked[-1] - self.tracked[0]
        b = self.predicted[-1] - self.predicted[0]
        na, nb = np.linalg.norm(a, axis=1), np.linalg.norm(b, axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.sum(a * b, axis=1) / (na * nb)

    @property
    def energy_increase(self):
        return float(np.max(np.diff(self.energies), initial=-np.inf))


def _match(reference, degrees, found):
    """Order located vortices like ``reference`` (same degree, least total distance)."""
    if len(found) != len(reference):
        raise TrackingLoss("expected %d vortices, found %d" % (len(reference), len(found)))
    pos = np.array([p for p, _ in found])
    deg = np.array([d for _, d in found])
    cost = np.linalg.norm(reference[:, None] - pos[None], axis=-1)
    cost[degrees[:, None] != deg[None]] = np.inf
    try:
        rows, cols = linear_sum_assignment(cost)
    except ValueError:
        raise TrackingLoss("tracked degrees %s do not match %s"
                           % (sorted(deg.tolist()), sorted(degrees.tolist())))
    out = np.empty_like(reference)
    out[rows] = pos[cols]
    return out


def _ode_positions(positions, degrees, kind, times):
    vel = pv.gradient_velocity if kind == "gradient" else pv.hamiltonian_velocity

    def rhs(_t, y):
        return vel(y.reshape(-1, 2), degrees).ravel()

    sol = solve_ivp(rhs, (0.0, times[-1]), positions.ravel(), method="DOP853",
                    rtol=1e-10, atol=1e-12, t_eval=times)
    if sol.status != 0:
        raise RuntimeError("ODE integration failed: %s" % sol.message)
    return sol.y.T.reshape(len(times), -1, 2)


def compare_to_ode(positions, degrees, epsilon, grid, horizon, flow="heat", dt=None,
                   n_samples=10, method="strang"):
    """Evolve well-prepared data and compare tracked vortices with the ODE.

    ``horizon`` is in ODE time.  The heat flow is compared with the gradient
    ODE after rescaling PDE time by |ln eps|; Gross-Pitaevskii is compared
    with the Hamiltonian ODE on the same time axis.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    degrees = np.asarray(degrees, dtype=int)
    if flow == "heat":
        scale, kind, step = abs(np.log(epsilon)), "gradient", heat_flow_step
        dt = dt or 0.4 * epsilon**2
    elif flow == "gp":
        scale, kind, step = 1.0, "hamiltonian", gp_flow_step
        dt = dt or 0.01 * epsilon**2
    else:
        raise ValueError("flow must be 'heat' or 'gp'")
    steps = max(int(round(horizon * scale / dt)), 1)
    every = max(steps // n_samples, 1)
    u = build_well_prepared(positions, degrees, epsilon, grid)
    tracked = [_match(positions, degrees, locate_vortices(u))]
    pde_times, energies = [0.0], [energy(u).E]
    for k in range(1, steps + 1):
        u = step(u, dt, method)
        if k % every == 0 or k == steps:
            tracked.append(_match(tracked[-1], degrees, locate_vortices(u)))
            pde_times.append(k * dt)
            energies.append(energy(u).E)
    pde_times = np.array(pde_times)
    ode_times = pde_times / scale
    predicted = _ode_positions(positions, degrees, kind, ode_times)
    return ComparisonReport(flow, epsilon, grid.h, pde_times, ode_times, degrees,
                            np.array(tracked), predicted, np.array(energies))
