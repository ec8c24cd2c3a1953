"""Time stepping for the chart forms of the heat flow and Gross-Pitaevskii.

Heat flow:  u_t = a(x) Lap u + (1 - |u|^2) u / eps^2
GP:         u_t = -i [a(x) Lap u + (1 - |u|^2) u / eps^2]

with ``a = (1 + r^2)^2 / 4``.  Interior nodes use the 5-point Laplacian;
nodes of the boundary ring carry no diffusion and follow the pointwise
reaction only, so a unit-modulus far field stays fixed while spatially
constant data evolve uniformly.

Default schemes are Strang splittings: the reaction is solved exactly
(modulus relaxation for the heat flow, phase rotation for GP) around an
implicit linear step, TR-BDF2 for diffusion and Crank-Nicolson for
dispersion.  Sparse factorisations are cached per (grid, coefficient).
"""
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..errors import BlowUp

BLOWUP_MODULUS = 1.1


def laplacian(u, h):
    """5-point Laplacian on interior nodes, zero on the boundary ring."""
    out = np.zeros_like(u)
    out[1:-1, 1:-1] = (u[2:, 1:-1] + u[:-2, 1:-1] + u[1:-1, 2:] + u[1:-1, :-2]
                       - 4.0 * u[1:-1, 1:-1]) / (h * h)
    return out


def reaction(u, epsilon):
    return (1.0 - np.abs(u) ** 2) * u / epsilon**2


def heat_rhs(u, grid, epsilon):
    return grid.diffusivity * laplacian(u, grid.h) + reaction(u, epsilon)


def gp_rhs(u, grid, epsilon):
    return -1j * heat_rhs(u, grid, epsilon)


def reaction_exact(u, epsilon, dt):
    """Exact flow of u_t = (1 - |u|^2) u / eps^2 (phase fixed, modulus relaxes)."""
    tau = 2.0 * dt / epsilon**2
    m2 = np.abs(u) ** 2
    return u / np.sqrt(np.exp(-tau) - m2 * np.expm1(-tau))


def rotation_exact(u, epsilon, dt):
    """Exact flow of u_t = -i (1 - |u|^2) u / eps^2 (modulus fixed)."""
    return u * np.exp(-1j * (1.0 - np.abs(u) ** 2) * dt / epsilon**2)


def _interior_laplacian(n, h):
    e = np.ones(n)
    T = sp.diags([e[:-1], -2.0 * e, e[:-1]], [-1, 0, 1])
    I = sp.identity(n)
    return ((sp.kron(T, I) + sp.kron(I, T)) / (h * h)).tocsc()


GAMMA = 2.0 - np.sqrt(2.0)
# TR-BDF2 with gamma = 2 - sqrt(2): both stages share the coefficient below.
_TRBDF2_C = GAMMA / 2.0


@lru_cache(maxsize=8)
def _factor(grid, coef):
    """LU factors of ``A^{-1} - coef * Lap`` on the interior (coef may be complex)."""
    n = grid.N - 2
    lap = _interior_laplacian(n, grid.h)
    M = sp.diags(grid.area_weight[1:-1, 1:-1].ravel()) - coef * lap
    if np.iscomplexobj(coef):
        M = M.astype(complex)
    return splu(M.tocsc(), permc_spec="MMD_AT_PLUS_A")


def _ring_source(u, h):
    """Contribution of the boundary ring to the interior Laplacian."""
    ring = u.copy()
    ring[1:-1, 1:-1] = 0.0
    return laplacian(ring, h)[1:-1, 1:-1]


def _solve(lu, rhs, real_operator):
    if real_operator:
        sol = lu.solve(np.stack([rhs.real.ravel(), rhs.imag.ravel()], axis=1))
        return (sol[:, 0] + 1j * sol[:, 1]).reshape(rhs.shape)
    return lu.solve(rhs.ravel()).reshape(rhs.shape)


def _diffusion_trbdf2(u, grid, dt):
    """TR-BDF2 step of u_t = a Lap u on the interior, ring held fixed (L-stable)."""
    g = GAMMA
    coef = _TRBDF2_C * dt
    lu = _factor(grid, coef)
    w = grid.area_weight[1:-1, 1:-1]
    src = _ring_source(u, grid.h)
    lap0 = laplacian(u, grid.h)[1:-1, 1:-1]
    # trapezoidal stage to t + gamma dt
    rhs = w * u[1:-1, 1:-1] + coef * (lap0 + src)
    ug = _solve(lu, rhs, True)
    # BDF2 stage to t + dt
    c1 = 1.0 / (g * (2.0 - g))
    c0 = (1.0 - g) ** 2 / (g * (2.0 - g))
    rhs = w * (c1 * ug - c0 * u[1:-1, 1:-1]) + coef * src
    out = u.copy()
    out[1:-1, 1:-1] = _solve(lu, rhs, True)
    return out


def _dispersion_cn(u, grid, dt):
    """Crank-Nicolson step of u_t = -i a Lap u on the interior, ring held fixed.

    The step conserves the discrete Dirichlet energy and the weighted L2 norm.
    """
    coef = -0.5j * dt
    lu = _factor(grid, coef)
    w = grid.area_weight[1:-1, 1:-1]
    src = _ring_source(u, grid.h)
    lap0 = laplacian(u, grid.h)[1:-1, 1:-1]
    rhs = w * u[1:-1, 1:-1] + coef * (lap0 + src)
    out = u.copy()
    out[1:-1, 1:-1] = _solve(lu, rhs, False)
    return out


def _check(u):
    if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > BLOWUP_MODULUS:
        raise BlowUp("|u| exceeded %g" % BLOWUP_MODULUS)


def stable_explicit_dt(grid, safety=0.2):
    """Explicit step bound 0.2 h^2 / max(a) used by the RK4 schemes."""
    return safety * grid.h**2 / float(np.max(grid.diffusivity))


def _rk4(f, u, dt):
    k1 = f(u)
    k2 = f(u + 0.5 * dt * k1)
    k3 = f(u + 0.5 * dt * k2)
    k4 = f(u + dt * k3)
    return u + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def heat_flow_step(field, dt, method="strang"):
    """Advance the Ginzburg-Landau heat flow by ``dt``.

    ``method="strang"``: half reaction, TR-BDF2 diffusion, half reaction
    (L-stable, second order).  ``method="rk4"``:
    classical explicit RK4, requires ``dt <= 0.2 h^2 / max a``.
    """
    u, grid, eps = field.values, field.grid, field.epsilon
    if method == "strang":
        v = reaction_exact(u, eps, 0.5 * dt)
        v = _diffusion_trbdf2(v, grid, dt)
        v = reaction_exact(v, eps, 0.5 * dt)
    elif method == "rk4":
        if dt > stable_explicit_dt(grid) * (1 + 1e-12):
            raise ValueError("dt=%g exceeds explicit bound %g" % (dt, stable_explicit_dt(grid)))
        v = _rk4(lambda w: heat_rhs(w, grid, eps), u, dt)
    else:
        raise ValueError("unknown method %r" % method)
    _check(v)
    return field.with_values(v, field.time + dt)


def gp_flow_step(field, dt, method="strang"):
    """Advance Gross-Pitaevskii ``i u_t - Lap_M u = u (1 - |u|^2)/eps^2`` by ``dt``.

    ``method="strang"``: half exact rotation, Crank-Nicolson for the linear
    part (which conserves the discrete Dirichlet energy), half rotation.
    ``method="rk4"``: explicit RK4 on the full right-hand side.
    """
    u, grid, eps = field.values, field.grid, field.epsilon
    if method == "strang":
        v = rotation_exact(u, eps, 0.5 * dt)
        v = _dispersion_cn(v, grid, dt)
        v = rotation_exact(v, eps, 0.5 * dt)
    elif method == "rk4":
        if dt > stable_explicit_dt(grid) * (1 + 1e-12):
            raise ValueError("dt=%g exceeds explicit bound %g" % (dt, stable_explicit_dt(grid)))
        v = _rk4(lambda w: gp_rhs(w, grid, eps), u, dt)
    else:
        raise ValueError("unknown method %r" % method)
    _check(v)
    return field.with_values(v, field.time + dt)


def evolve(field, dt, steps, flow="heat", method="strang", callback=None, every=1):
    step = heat_flow_step if flow == "heat" else gp_flow_step
    if callback is not None:
        callback(field)
    for k in range(steps):
        field = step(field, dt, method)
        if callback is not None and (k + 1) % every == 0:
            callback(field)
    return field


def relax_to_stationary(field, tol=1e-8, max_newton=30, presteps=0, dt=None):
    """Polish a field to a stationary solution of the heat flow.

    Optionally runs ``presteps`` heat-flow steps, then applies Newton's
    method to ``a Lap u + (1 - |u|^2) u / eps^2 = 0`` on the interior (ring
    fixed) until the sup norm of the right-hand side is below ``tol``.
    Newton converges to nearby unstable equilibria as well, which is
    needed for symmetric configurations that the flow itself would leave.
    Returns ``(field, residual_history)``.
    """
    if presteps:
        dt = dt or field.epsilon**2
        field = evolve(field, dt, presteps)
    grid, eps = field.grid, field.epsilon
    n = grid.N - 2
    lap = _interior_laplacian(n, grid.h)
    w = grid.area_weight[1:-1, 1:-1].ravel()
    u = field.values.copy()
    history = []
    for _ in range(max_newton):
        res = heat_rhs(u, grid, eps)
        norm = float(np.max(np.abs(res[1:-1, 1:-1])))
        history.append(norm)
        if norm < tol:
            break
        v = u[1:-1, 1:-1].real.ravel()
        y = u[1:-1, 1:-1].imag.ravel()
        # F/a = Lap u + e^{2f} N(u): symmetric Jacobian
        m = 1.0 - v * v - y * y
        jvv = w * (m - 2.0 * v * v) / eps**2
        jvy = w * (-2.0 * v * y) / eps**2
        jyy = w * (m - 2.0 * y * y) / eps**2
        J = sp.bmat([[lap + sp.diags(jvv), sp.diags(jvy)],
                     [sp.diags(jvy), lap + sp.diags(jyy)]]).tocsc()
        rhs = (res[1:-1, 1:-1] * grid.area_weight[1:-1, 1:-1]).ravel()
        delta = splu(J, permc_spec="MMD_AT_PLUS_A").solve(
            -np.concatenate([rhs.real, rhs.imag]))
        u[1:-1, 1:-1] += (delta[: n * n] + 1j * delta[n * n:]).reshape(n, n)
    _check(u)
    return field.with_values(u, field.time), history
