"""Energies, weighted energies, currents and vortex detection for chart fields."""
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .. import sphere
from ..errors import UnresolvedCore


@dataclass
class EnergyReport:
    E: float
    F: np.ndarray        # weighted energies F1, F2, F3
    moments: np.ndarray  # int x_i V(u) dv_g
    mass_defect: float   # int (1 - |u|^2)^2 dv_g

    @property
    def F1(self):
        return float(self.F[0])

    @property
    def F2(self):
        return float(self.F[1])

    @property
    def F3(self):
        return float(self.F[2])


def potential(u, epsilon):
    """V(u) = (1 - |u|^2)^2 / (4 eps^2)."""
    return (1.0 - np.abs(u) ** 2) ** 2 / (4.0 * epsilon**2)


def sphere_weights(points):
    """(1 - x_i)/2 for i = 1, 2, 3, stacked on the last axis."""
    return (1.0 - points) / 2.0


def _edge_terms(u):
    """|forward differences|^2 along both grid axes (the h^2 cancels)."""
    dx = np.abs(u[1:, :] - u[:-1, :]) ** 2
    dy = np.abs(u[:, 1:] - u[:, :-1]) ** 2
    return dx, dy


def energy(field):
    """Ginzburg-Landau energy and the weighted energies of a chart field.

    The Dirichlet term is conformally invariant and summed over grid edges,
    ``0.5 sum |u_b - u_a|^2``; potential terms carry the area weight
    ``4/(1 + r^2)^2``.  Weighted gradient terms use the weight at edge
    midpoints.
    """
    grid, u = field.grid, field.values
    h2 = grid.h**2
    dx, dy = _edge_terms(u)
    V = potential(u, field.epsilon)
    dv = grid.area_weight * h2
    E = 0.5 * (dx.sum() + dy.sum()) + np.sum(V * dv)
    F = np.empty(3)
    Px = sphere.stereo_unproject(grid.edge_midpoints(0))
    Py = sphere.stereo_unproject(grid.edge_midpoints(1))
    wx, wy = sphere_weights(Px), sphere_weights(Py)
    wn = sphere_weights(grid.sphere_coords)
    for i in range(3):
        F[i] = 0.5 * (np.sum(wx[..., i] * dx) + np.sum(wy[..., i] * dy)) \
            + np.sum(wn[..., i] * V * dv)
    moments = np.array([np.sum(grid.sphere_coords[..., i] * V * dv) for i in range(3)])
    defect = float(np.sum((1.0 - np.abs(u) ** 2) ** 2 * dv))
    return EnergyReport(float(E), F, moments, defect)


def weighted_identity_residual(before, after, dt):
    """Discrete residual of the weighted dissipation identities.

    ``res_i = (F_i(after) - F_i(before))/dt + int ((1 - x_i)/2) |u_t|^2 dv_g
    + int x_i V(u_mid) dv_g`` with ``u_t = (after - before)/dt`` and
    ``u_mid`` the average of the two fields.  ``after`` must come from a
    heat-flow step of ``before``.
    """
    grid = before.grid
    ut = (after.values - before.values) / dt
    mid = 0.5 * (after.values + before.values)
    dv = grid.area_weight * grid.h**2
    X = grid.sphere_coords
    w = sphere_weights(X)
    Vm = potential(mid, before.epsilon)
    dF = (energy(after).F - energy(before).F) / dt
    res = np.empty(3)
    for i in range(3):
        res[i] = dF[i] + np.sum(w[..., i] * np.abs(ut) ** 2 * dv) \
            + np.sum(X[..., i] * Vm * dv)
    return res


def current_and_jacobian(field):
    """Current j = (iu).grad u = Im(conj(u) grad u) and Jacobian J = curl(j)/2.

    Derivatives are centred differences; J is set to zero on the two
    outermost rings where the stencil is incomplete.
    """
    u, h = field.values, field.grid.h
    du1, du2 = np.gradient(u, h, h)
    j = np.stack([np.imag(np.conj(u) * du1), np.imag(np.conj(u) * du2)], axis=-1)
    J = np.zeros(u.shape)
    J[1:-1, 1:-1] = 0.5 * ((j[2:, 1:-1, 1] - j[:-2, 1:-1, 1])
                           - (j[1:-1, 2:, 0] - j[1:-1, :-2, 0])) / (2.0 * h)
    J[:2, :] = J[-2:, :] = J[:, :2] = J[:, -2:] = 0.0
    return j, J


def jacobian_mass(field, mask=None, J=None):
    """Integral of the Jacobian (flat chart measure) over ``mask``."""
    if J is None:
        J = current_and_jacobian(field)[1]
    if mask is None:
        return float(J.sum() * field.grid.h**2)
    return float(J[mask].sum() * field.grid.h**2)


def disk_mask(grid, center, radius):
    d2 = np.sum((grid.coords - np.asarray(center, float)) ** 2, axis=-1)
    return d2 < radius * radius


def plaquette_winding(u):
    """Integer winding of the phase around every grid cell, shape (N-1, N-1).

    Cells are traversed counter-clockwise in (p1, p2).
    """
    a, b = u[:-1, :-1], u[1:, :-1]
    c, d = u[1:, 1:], u[:-1, 1:]
    total = (np.angle(b * np.conj(a)) + np.angle(c * np.conj(b))
             + np.angle(d * np.conj(c)) + np.angle(a * np.conj(d)))
    return np.rint(total / (2.0 * np.pi)).astype(int)


def _bilinear_zero(c00, c10, c11, c01):
    """Zero of the bilinear interpolant on the unit cell by Newton's method."""
    s = t = 0.5
    for _ in range(30):
        val = (1 - s) * (1 - t) * c00 + s * (1 - t) * c10 + s * t * c11 + (1 - s) * t * c01
        ds = (1 - t) * (c10 - c00) + t * (c11 - c01)
        dt = (1 - s) * (c01 - c00) + s * (c11 - c10)
        M = np.array([[ds.real, dt.real], [ds.imag, dt.imag]])
        try:
            step = np.linalg.solve(M, [-val.real, -val.imag])
        except np.linalg.LinAlgError:
            return None
        s, t = s + step[0], t + step[1]
        if abs(step[0]) + abs(step[1]) < 1e-12:
            break
    if -0.5 <= s <= 1.5 and -0.5 <= t <= 1.5:
        return s, t
    return None


def locate_vortices(field, core_modulus=0.5):
    """Vortices as cells with nonzero phase winding.

    Adjacent vortex cells of the same sign are merged.  Each vortex is
    placed at the zero of the bilinear interpolant of its cell (falling back
    to the (1 - |u|)-weighted corner average).  Returns a list of
    ``(position, degree)``.
    """
    u, grid = field.values, field.grid
    w = plaquette_winding(u)
    out = []
    for sign in (1, -1):
        labels, count = ndimage.label(w * sign > 0, structure=np.ones((3, 3)))
        for k in range(1, count + 1):
            cells = np.argwhere(labels == k)
            degree = int(w[labels == k].sum())
            pts = []
            for i, j in cells:
                corners = np.array([u[i, j], u[i + 1, j], u[i + 1, j + 1], u[i, j + 1]])
                if np.min(np.abs(corners)) > core_modulus:
                    raise UnresolvedCore("winding at cell (%d, %d) with |u| > %g"
                                         % (i, j, core_modulus))
                st = _bilinear_zero(*corners)
                if st is None:
                    wts = 1.0 - np.abs(corners)
                    offs = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
                    st = wts @ offs / wts.sum()
                pts.append(grid.coords[i, j] + grid.h * np.asarray(st))
            out.append((np.mean(pts, axis=0), degree))
    return out
