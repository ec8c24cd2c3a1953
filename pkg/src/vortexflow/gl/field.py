"""Complex order parameter sampled on a square stereographic chart grid."""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .. import sphere
from ..errors import ResolutionError, SeparationError


@dataclass(frozen=True)
class Grid:
    """Cell-centred grid on [-L, L]^2 with N points per side, spacing 2L/N.

    Arrays are indexed ``[i, j]`` with ``i`` along p1 and ``j`` along p2.
    The outermost ring of nodes is the far-field boundary.
    """

    L: float = 6.0
    N: int = 256

    def __post_init__(self):
        if self.N < 16 or self.N % 2:
            raise ValueError("N must be even and at least 16")
        if self.L <= 0:
            raise ValueError("L must be positive")

    @property
    def h(self):
        return 2.0 * self.L / self.N

    @cached_property
    def axis(self):
        return -self.L + (np.arange(self.N) + 0.5) * self.h

    @cached_property
    def coords(self):
        """Node coordinates, shape (N, N, 2)."""
        X1, X2 = np.meshgrid(self.axis, self.axis, indexing="ij")
        return np.stack([X1, X2], axis=-1)

    @cached_property
    def r2(self):
        return np.sum(self.coords**2, axis=-1)

    @cached_property
    def area_weight(self):
        """e^{2f} = 4/(1 + r^2)^2 at the nodes."""
        return 4.0 / (1.0 + self.r2) ** 2

    @cached_property
    def diffusivity(self):
        """e^{-2f} = (1 + r^2)^2 / 4: Laplace-Beltrami = diffusivity * flat Laplacian."""
        return (1.0 + self.r2) ** 2 / 4.0

    @cached_property
    def sphere_coords(self):
        return sphere.stereo_unproject(self.coords)

    @cached_property
    def interior(self):
        m = np.zeros((self.N, self.N), dtype=bool)
        m[1:-1, 1:-1] = True
        return m

    def edge_midpoints(self, axis):
        c = self.coords
        if axis == 0:
            return 0.5 * (c[1:, :] + c[:-1, :])
        return 0.5 * (c[:, 1:] + c[:, :-1])


@dataclass
class ComplexField:
    values: np.ndarray
    grid: Grid
    epsilon: float
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.N, self.grid.N):
            raise ValueError("values must have shape (N, N)")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.grid.h >= self.epsilon:
            raise ResolutionError("grid spacing %g does not resolve epsilon=%g"
                                  % (self.grid.h, self.epsilon))

    def copy(self):
        return ComplexField(self.values.copy(), self.grid, self.epsilon, self.time)

    def with_values(self, values, time):
        return ComplexField(values, self.grid, self.epsilon, time)

    @classmethod
    def constant(cls, c, grid, epsilon):
        return cls(np.full((grid.N, grid.N), c, dtype=complex), grid, epsilon)


def build_well_prepared(positions, degrees, epsilon, grid, far_field="ansatz"):
    """Vortex initial data with prescribed chart positions and +/-1 degrees.

    ``u0 = prod_i ((x - b_i)/|x - b_i|)^{d_i} * prod_i tanh(|x - b_i| e^{f(b_i)} / eps)``

    ``far_field`` selects the boundary ring: ``"ansatz"`` keeps the phase of
    the ansatz with unit modulus, ``"unit"`` sets it to 1.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    degrees = np.asarray(degrees, dtype=int).reshape(-1)
    if len(positions) != len(degrees):
        raise ValueError("positions and degrees differ in length")
    if np.any(np.abs(degrees) != 1) or degrees.sum() != 0:
        raise ValueError("degrees must be +/-1 and sum to zero")
    if grid.h >= epsilon / 2.0:
        raise ResolutionError("need h < eps/2, got h=%g, eps=%g" % (grid.h, epsilon))
    if np.any(np.abs(positions) >= grid.L / 2.0):
        raise SeparationError("vortices must lie inside |p| < L/2")
    if len(degrees) > 1:
        dist = sphere.chordal_distance_chart(positions[:, None, :], positions[None, :, :])
        np.fill_diagonal(dist, np.inf)
        if dist.min() < 10.0 * epsilon:
            raise SeparationError("vortices closer than 10*eps (chordal)")
    z = grid.coords[..., 0] + 1j * grid.coords[..., 1]
    u = np.ones_like(z)
    for b, d in zip(positions, degrees):
        w = z - (b[0] + 1j * b[1])
        r = np.abs(w)
        phase = np.where(r > 0, w / np.where(r > 0, r, 1.0), 1.0)
        u *= phase if d > 0 else np.conj(phase)
        u *= np.tanh(r * np.exp(sphere.conformal_exponent(b)) / epsilon)
    if far_field == "ansatz":
        ring = ~grid.interior
        mod = np.abs(u[ring])
        u[ring] = np.where(mod > 0, u[ring] / np.where(mod > 0, mod, 1.0), 1.0)
    elif far_field == "unit":
        u[~grid.interior] = 1.0
    else:
        raise ValueError("far_field must be 'ansatz' or 'unit'")
    return ComplexField(u, grid, epsilon)
