"""Stereographic chart of the unit sphere.

The chart sends the south pole (0, 0, -1) to the origin and the north pole
to infinity::

    P = (2 p / (1 + r^2), (r^2 - 1) / (1 + r^2)),   r = |p|

All functions are vectorised over leading axes: a sphere point is an array
with trailing dimension 3, a chart point one with trailing dimension 2.
"""
import numpy as np

from .errors import PoleSingularity

POLE_CUTOFF = 1e-9


def stereo_project(P):
    """Map sphere point(s) to the chart, ``p = (x1, x2) / (1 - x3)``."""
    P = np.asarray(P, dtype=float)
    x3 = P[..., 2]
    if np.any(x3 >= 1.0 - POLE_CUTOFF):
        raise PoleSingularity("point within %g of the north pole" % POLE_CUTOFF)
    return P[..., :2] / (1.0 - x3)[..., None]


def stereo_unproject(p):
    p = np.asarray(p, dtype=float)
    r2 = np.sum(p * p, axis=-1)
    denom = 1.0 + r2
    out = np.empty(p.shape[:-1] + (3,))
    out[..., :2] = 2.0 * p / denom[..., None]
    out[..., 2] = (r2 - 1.0) / denom
    return out


def conformal_exponent(p):
    """f(p) = ln(2 / (1 + |p|^2)); the round metric is e^{2f} |dp|^2."""
    p = np.asarray(p, dtype=float)
    return np.log(2.0 / (1.0 + np.sum(p * p, axis=-1)))


def conformal_weight(p):
    """e^{2f} = 4 / (1 + |p|^2)^2, the area density of the chart."""
    p = np.asarray(p, dtype=float)
    return 4.0 / (1.0 + np.sum(p * p, axis=-1)) ** 2


def grad_conformal_exponent(p):
    p = np.asarray(p, dtype=float)
    return -2.0 * p / (1.0 + np.sum(p * p, axis=-1))[..., None]


def chordal_distance(P, Q):
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    return np.linalg.norm(P - Q, axis=-1)


def chordal_distance_chart(p, q):
    """Chordal distance between the sphere images of two chart points."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d2 = np.sum((p - q) ** 2, axis=-1)
    rp = 1.0 + np.sum(p * p, axis=-1)
    rq = 1.0 + np.sum(q * q, axis=-1)
    return np.sqrt(4.0 * d2 / (rp * rq))


def metric_gradient_from_euclidean(p, v):
    """Convert a Euclidean chart gradient into the round-metric gradient.

    The metric gradient is ``e^{-2f} v = ((1 + r^2)^2 / 4) v``.
    """
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    scale = (1.0 + np.sum(p * p, axis=-1)) ** 2 / 4.0
    return scale[..., None] * v


def chart_pushforward(p, v):
    """Push a chart tangent vector ``v`` at ``p`` to an R^3 tangent vector of S^2."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    r2 = np.sum(p * p, axis=-1)
    pv = np.sum(p * v, axis=-1)
    denom = 1.0 + r2
    out = np.empty(p.shape[:-1] + (3,))
    out[..., :2] = 2.0 * v / denom[..., None] - (4.0 * pv / denom**2)[..., None] * p
    out[..., 2] = 4.0 * pv / denom**2
    return out


def normalize(P):
    P = np.asarray(P, dtype=float)
    return P / np.linalg.norm(P, axis=-1, keepdims=True)


def rotate_about_x3(P, angle):
    c, s = np.cos(angle), np.sin(angle)
    R = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return np.asarray(P, dtype=float) @ R.T


def sample_cap(rng, size, s):
    """Uniform samples on the cap ``{x3 <= -sqrt(1 - s^2)}``.

    Uniformity on a spherical cap is uniformity of ``x3`` (Archimedes) and of
    the azimuth.
    """
    top = -np.sqrt(1.0 - s * s)
    x3 = rng.uniform(-1.0, top, size)
    phi = rng.uniform(0.0, 2.0 * np.pi, size)
    rho = np.sqrt(np.clip(1.0 - x3 * x3, 0.0, None))
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), x3], axis=-1)


def sample_sphere(rng, size, max_x3=1.0):
    """Uniform samples on the sphere restricted to ``x3 <= max_x3``."""
    x3 = rng.uniform(-1.0, max_x3, size)
    phi = rng.uniform(0.0, 2.0 * np.pi, size)
    rho = np.sqrt(np.clip(1.0 - x3 * x3, 0.0, None))
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), x3], axis=-1)
