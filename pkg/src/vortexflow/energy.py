"""Renormalized energy of +/-1 vortices on the sphere and its gradients."""
from dataclasses import dataclass, field

import numpy as np

from . import sphere
from .errors import CoincidentVortices

COINCIDENCE_TOL = 1e-14


@dataclass
class VortexConfiguration:
    """Chart positions ``(n, 2)`` with degrees ``(n,)`` at a given time."""

    positions: np.ndarray
    degrees: np.ndarray
    time: float = 0.0
    ids: np.ndarray = field(default=None)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        self.degrees = np.asarray(self.degrees, dtype=int).reshape(-1)
        if len(self.positions) != len(self.degrees):
            raise ValueError("positions and degrees differ in length")
        if self.ids is None:
            self.ids = np.arange(len(self.degrees))
        else:
            self.ids = np.asarray(self.ids, dtype=int).reshape(-1)

    @classmethod
    def from_sphere(cls, points, degrees, time=0.0, ids=None):
        return cls(sphere.stereo_project(points), degrees, time, ids)

    @property
    def n(self):
        return len(self.degrees)

    @property
    def sphere_points(self):
        return sphere.stereo_unproject(self.positions)

    def validate(self):
        if np.any(np.abs(self.degrees) != 1):
            raise ValueError("vortex degrees must be +1 or -1")
        if self.degrees.sum() != 0:
            raise ValueError("degrees must sum to zero")
        _check_distinct(self.positions)
        return self

    def copy(self):
        return VortexConfiguration(self.positions.copy(), self.degrees.copy(),
                                   self.time, self.ids.copy())


def _check_distinct(b):
    n = len(b)
    if n < 2:
        return
    diff = b[:, None, :] - b[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    dist[np.diag_indices(n)] = np.inf
    if dist.min() < COINCIDENCE_TOL:
        raise CoincidentVortices("two vortices closer than %g" % COINCIDENCE_TOL)


def renormalized_energy_chart(cfg, f=sphere.conformal_exponent):
    """W = pi sum d_i^2 f(b_i) - pi sum_{i != j} d_i d_j ln|b_i - b_j|."""
    b, d = cfg.positions, cfg.degrees
    _check_distinct(b)
    W = np.pi * np.sum(d * d * f(b))
    n = len(d)
    for i in range(n):
        for j in range(i + 1, n):
            W -= 2.0 * np.pi * d[i] * d[j] * np.log(np.linalg.norm(b[i] - b[j]))
    return float(W)


def renormalized_energy_chordal(cfg):
    """W = -pi sum_{i != j} d_i d_j ln|P_i - P_j| with ambient R^3 distances."""
    _check_distinct(cfg.positions)
    P, d = cfg.sphere_points, cfg.degrees
    W = 0.0
    n = len(d)
    for i in range(n):
        for j in range(i + 1, n):
            W -= 2.0 * np.pi * d[i] * d[j] * np.log(np.linalg.norm(P[i] - P[j]))
    return float(W)


def interaction_sums(b, d):
    """Row ``i`` holds ``d_i sum_{j != i} d_j (b_i - b_j) / |b_i - b_j|^2``."""
    diff = b[:, None, :] - b[None, :, :]
    r2 = np.sum(diff * diff, axis=-1)
    np.fill_diagonal(r2, np.inf)
    if np.sqrt(r2.min(initial=np.inf)) < COINCIDENCE_TOL:
        raise CoincidentVortices("two vortices closer than %g" % COINCIDENCE_TOL)
    w = (d[:, None] * d[None, :]) / r2
    return np.einsum("ij,ijk->ik", w, diff)


def euclidean_grad_W(cfg):
    """Euclidean chart gradient of W with respect to every vortex, shape (n, 2)."""
    b, d = cfg.positions, cfg.degrees
    S = interaction_sums(b, d)
    return np.pi * ((d * d)[:, None] * sphere.grad_conformal_exponent(b) - 2.0 * S)


def grad_W_all(cfg):
    """Metric gradients (grad_g)_{b_i} W for all vortices."""
    return sphere.metric_gradient_from_euclidean(cfg.positions, euclidean_grad_W(cfg))


def grad_W(cfg, i):
    return grad_W_all(cfg)[i]


def perp(v):
    """Rotate by J = [[0, 1], [-1, 0]], i.e. (a, b) -> (b, -a)."""
    v = np.asarray(v, dtype=float)
    return np.stack([v[..., 1], -v[..., 0]], axis=-1)


def skew_grad_W_all(cfg):
    return perp(grad_W_all(cfg))


def skew_grad_W(cfg, i):
    return skew_grad_W_all(cfg)[i]
