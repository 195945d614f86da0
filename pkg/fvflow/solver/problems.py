import numpy as np
import pandas as pd

from fvflow.data.config import ConfigError
from fvflow.data.mesh import load_mesh
from fvflow.fluxes.boundary import (PressureBoundarySpec, nonreflecting_flux,
                                    wall_flux)
from fvflow.fluxes.roe import entropy_fixed_flux, rotated_flux
from fvflow.physics.gas import (GasModel, InadmissibleState, check_admissible,
                                conserved_from_primitive, eigenvalues,
                                primitive_from_conserved)
from fvflow.physics.linear import (AcousticsModel, ReflectionBoundary,
                                   acoustic_interface_flux, acoustics_exact,
                                   advect_exact, reflection_boundary_flux,
                                   upwind_flux_scalar)
from fvflow.ops.scatter import scatter_sum
from fvflow.reconstruction.gradient import MeshReconstruction, wall_mean
from fvflow.reconstruction.limiters import Limiter, reconstruct_line
from fvflow.utils.logging import log


class FaceStates:
    """
    States on both sides of every face. On boundary faces, the missing side
    holds the same state as the interior side.

    **Arguments**

    - `left`: np.array of shape `(n_faces, n_components)`;
    - `right`: np.array of shape `(n_faces, n_components)`;
    """
    def __init__(self, left, right):
        self.left = left
        self.right = right

    def __repr__(self):
        return 'FaceStates(n_faces={})'.format(self.left.shape[0])


class Problem:
    """
    Base class for the discretization of a scenario: cells with their volumes,
    faces with the cells on each side (`-1` outside the domain) and their
    lengths, and the numerical fluxes.

    Subclasses implement `initial_values`, `reconstruct`, `face_flux`,
    `max_dt`, `frame` and optionally `exact`.
    """
    name = None
    columns = ()

    def __init__(self, volumes, face_left, face_right, face_lengths):
        self.volumes = volumes
        self.face_left = face_left
        self.face_right = face_right
        self.face_lengths = face_lengths

    @property
    def n_cells(self):
        return self.volumes.shape[0]

    @property
    def n_faces(self):
        return self.face_left.shape[0]

    @property
    def boundary_faces(self):
        return np.flatnonzero((self.face_left < 0) | (self.face_right < 0))

    def _adjacent_cells(self):
        left = np.where(self.face_left >= 0, self.face_left, self.face_right)
        right = np.where(self.face_right >= 0, self.face_right, self.face_left)
        return left, right

    def initial_values(self):
        raise NotImplementedError

    def reconstruct(self, values):
        """
        :param values: cell values, shape `(n_cells, n_components)`;
        :return: a FaceStates.
        """
        raise NotImplementedError

    def face_flux(self, faces, index, t):
        """
        :param faces: a FaceStates;
        :param index: np.array of face indices;
        :param t: time at which boundary data is sampled;
        :return: np.array of shape `(len(index), n_components)`, the fluxes
        from the left to the right side of the faces.
        """
        raise NotImplementedError

    def max_dt(self, values, cfl):
        raise NotImplementedError

    def check(self, values, time=None):
        """
        Raises InadmissibleState if the values cannot be evolved further.
        """
        values = np.asarray(values)
        bad = ~np.all(np.isfinite(values), axis=-1)
        if np.any(bad):
            index = int(np.flatnonzero(bad)[0])
            raise InadmissibleState('Non-finite value in cell {} (t={})'
                                    .format(index, time), index=index,
                                    time=time)

    def frame(self, values):
        """
        :return: a pd.DataFrame with one row per cell, in cell order.
        """
        raise NotImplementedError

    def exact(self, t):
        """
        :return: the exact solution at the cell centers, in the same variables
        as `frame` (without coordinates), or None when it is unknown.
        """
        return None


class LineProblem(Problem):
    """
    A uniform grid of `cells` cells on `[0, length]`. Face `j` lies at
    `x = j dx`; on a periodic grid, face 0 joins the last and the first cell.

    **Arguments**

    - `length`: length of the domain;
    - `cells`: number of cells;
    - `periodic`: whether the grid is periodic;
    - `order`: 1 or 2;
    - `limiter`: a Limiter, for second order;
    """
    def __init__(self, length, cells, periodic=False, order=1, limiter=None):
        self.length = float(length)
        self.dx = self.length / cells
        self.x = (np.arange(cells) + 0.5) * self.dx
        self.periodic = periodic
        self.order = order
        self.limiter = limiter if limiter is not None else Limiter('sts')
        j = np.arange(cells + (0 if periodic else 1))
        if periodic:
            face_left, face_right = (j - 1) % cells, j
        else:
            face_left = j - 1
            face_right = np.where(j < cells, j, -1)
        super().__init__(np.full(cells, self.dx), face_left, face_right,
                         np.ones(j.shape[0]))

    def to_fields(self, values):
        return values

    def from_fields(self, fields):
        return fields

    def reconstruct(self, values):
        values = np.asarray(values, dtype=float)
        if self.order == 1 or self.limiter.is_first_order:
            left, right = self._adjacent_cells()
            return FaceStates(values[left], values[right])
        zl, zr = reconstruct_line(self.to_fields(values), self.limiter,
                                  periodic=self.periodic)
        left, right = self.from_fields(zl), self.from_fields(zr)
        if self.periodic:
            return FaceStates(np.roll(left, 1, axis=0),
                              np.roll(right, 1, axis=0))
        # Boundary faces are first order
        left = np.concatenate((values[:1], left, values[-1:]))
        right = np.concatenate((values[:1], right, values[-1:]))
        return FaceStates(left, right)

    def interior_flux(self, Wl, Wr):
        raise NotImplementedError

    def boundary_flux(self, side, W_adjacent, t):
        raise NotImplementedError

    def face_flux(self, faces, index, t):
        index = np.asarray(index, dtype=int)
        flux = self.interior_flux(faces.left[index], faces.right[index])
        if self.periodic:
            return flux
        for position in np.flatnonzero(index == 0):
            flux[position] = self.boundary_flux('left', faces.right[0], t)
        last = self.n_faces - 1
        for position in np.flatnonzero(index == last):
            flux[position] = self.boundary_flux('right', faces.left[last], t)
        return flux


class AdvectionProblem(LineProblem):
    """
    Scalar advection `dw/dt + a dw/dx = 0`, with periodic boundaries or an
    inflow profile upstream and a free output downstream.

    **Arguments**

    - `velocity`: the nonzero celerity `a`;
    - `initial`: callable `initial(x, length)` returning shape `(n, 1)`;
    - `inflow`: callable `inflow(t)`, the upstream data (non periodic only);
    - `**kwargs`: passed to LineProblem;
    """
    name = 'advection'
    columns = ('w', )

    def __init__(self, velocity, initial, inflow=None, **kwargs):
        super().__init__(**kwargs)
        if velocity == 0:
            raise ValueError('The advection velocity must be nonzero')
        if not self.periodic and inflow is None:
            raise ValueError('A non periodic advection problem needs inflow '
                             'data')
        self.velocity = float(velocity)
        self.initial = initial
        self.inflow = inflow

    def initial_values(self):
        return np.asarray(self.initial(self.x, self.length), dtype=float)

    def interior_flux(self, Wl, Wr):
        return upwind_flux_scalar(self.velocity, Wl, Wr)

    def boundary_flux(self, side, W_adjacent, t):
        upstream = 'left' if self.velocity > 0 else 'right'
        if side == upstream:
            outer = np.full_like(W_adjacent, float(self.inflow(t)))
        else:
            outer = W_adjacent
        if side == 'left':
            return upwind_flux_scalar(self.velocity, outer, W_adjacent)
        return upwind_flux_scalar(self.velocity, W_adjacent, outer)

    def max_dt(self, values, cfl):
        return cfl * self.dx / abs(self.velocity)

    def frame(self, values):
        return pd.DataFrame({'x': self.x, 'w': np.asarray(values)[:, 0]})

    def exact(self, t):
        def u0(x):
            return self.initial(x, self.length)[:, 0]
        if self.periodic:
            foot = np.mod(self.x - self.velocity * t, self.length)
            return u0(foot)[:, None]
        return advect_exact(u0, self.inflow, self.velocity, self.length,
                            self.x, t)[:, None]


class AcousticsProblem(LineProblem):
    """
    Linear acoustics for `(p, u)` with upwind fluxes. Each end takes one of:

    - `pressure`: imposed pressure `profile(t)`;
    - `reflection`: `phi_in = profile(t) + S phi_out`;
    - `nonreflecting`: the ingoing characteristic keeps its initial value.

    **Arguments**

    - `model`: an AcousticsModel;
    - `initial`: callable `initial(x, length)` returning shape `(n, 2)`;
    - `bc`: tuple of boundary kinds `(left, right)`;
    - `profiles`: tuple of callables (or None) `(left, right)`;
    - `reflections`: tuple of reflection coefficients `(left, right)`;
    - `**kwargs`: passed to LineProblem;
    """
    name = 'acoustics'
    columns = ('p', 'u')

    def __init__(self, model, initial, bc=('pressure', 'nonreflecting'),
                 profiles=(None, None), reflections=(0., 0.), **kwargs):
        super().__init__(**kwargs)
        self.model = model
        self.system = model.system()
        self.initial = initial
        self.bc = dict(zip(('left', 'right'), bc))
        self.boundaries = {}
        for side, kind, profile, S in zip(('left', 'right'), bc, profiles,
                                          reflections):
            if kind == 'pressure':
                self.boundaries[side] = ReflectionBoundary.pressure(profile,
                                                                    side=side)
            elif kind == 'reflection':
                self.boundaries[side] = ReflectionBoundary(side, profile, [[S]])
            elif kind != 'nonreflecting':
                raise ValueError('Unknown acoustic boundary {}'.format(kind))
        self.pressure_profile = profiles[0] if bc[0] == 'pressure' else None
        self.W0 = self.initial_values()

    def initial_values(self):
        return np.asarray(self.initial(self.x, self.length), dtype=float)

    def interior_flux(self, Wl, Wr):
        return acoustic_interface_flux(self.model, Wl, Wr)

    def boundary_flux(self, side, W_adjacent, t):
        if side in self.boundaries:
            return reflection_boundary_flux(self.system, self.boundaries[side],
                                            W_adjacent, t)
        if side == 'left':
            return acoustic_interface_flux(self.model, self.W0[0], W_adjacent)
        return acoustic_interface_flux(self.model, W_adjacent, self.W0[-1])

    def max_dt(self, values, cfl):
        return cfl * self.dx / self.model.c0

    def frame(self, values):
        values = np.asarray(values)
        return pd.DataFrame({'x': self.x, 'p': values[:, 0],
                             'u': values[:, 1]})

    def exact(self, t):
        if self.bc['left'] != 'pressure' or self.bc['right'] != 'nonreflecting' \
                or t < self.length / self.model.c0:
            return None
        W_end = self.initial(np.array([self.length]), self.length)[0]

        def p0(x):
            return W_end[0]

        def u0(x):
            return W_end[1]

        p, u = acoustics_exact(self.model, p0, u0, self.pressure_profile,
                               self.length, self.x, t)
        return np.stack((p, u), axis=-1)


class Euler1DProblem(LineProblem):
    """
    One-dimensional Euler equations in a pipe, with the entropy-corrected Roe
    flux inside, and an imposed pressure or a free output at each end.
    Second order reconstruction works on the primitive variables.

    **Arguments**

    - `gas`: a GasModel;
    - `initial`: callable `initial(x, length)` returning primitive states,
    shape `(n, 3)`;
    - `bc`: tuple of boundary kinds `(left, right)`, 'pressure' or
    'nonreflecting';
    - `profiles`: tuple of imposed pressures (callables or None);
    - `**kwargs`: passed to LineProblem;
    """
    name = 'euler1d'
    columns = ('rho', 'u', 'p')

    def __init__(self, gas, initial, bc=('pressure', 'nonreflecting'),
                 profiles=(None, None), **kwargs):
        super().__init__(**kwargs)
        self.gas = gas
        self.initial = initial
        self.boundaries = {}
        for side, kind, profile in zip(('left', 'right'), bc, profiles):
            if kind == 'pressure':
                self.boundaries[side] = PressureBoundarySpec(profile, side)
            elif kind != 'nonreflecting':
                raise ValueError('Unknown gas boundary {}'.format(kind))

    def initial_values(self):
        P = np.asarray(self.initial(self.x, self.length), dtype=float)
        return conserved_from_primitive(P, self.gas)

    def to_fields(self, values):
        return primitive_from_conserved(values, self.gas)

    def from_fields(self, fields):
        return conserved_from_primitive(fields, self.gas)

    def interior_flux(self, Wl, Wr):
        return entropy_fixed_flux(Wl, Wr, self.gas)

    def boundary_flux(self, side, W_adjacent, t):
        if side in self.boundaries:
            return self.boundaries[side].flux(W_adjacent, t, self.gas)
        return nonreflecting_flux(W_adjacent, self.gas)

    def max_dt(self, values, cfl):
        speed = np.max(np.abs(eigenvalues(values, self.gas)))
        return cfl * self.dx / speed if speed > 0 else np.inf

    def check(self, values, time=None):
        super().check(values, time)
        check_admissible(values, self.gas, time=time)

    def frame(self, values):
        P = primitive_from_conserved(values, self.gas)
        return pd.DataFrame({'x': self.x, 'rho': P[:, 0], 'u': P[:, 1],
                             'p': P[:, 2]})


def fields_from_conserved(W, gas):
    """
    The reconstructed fields of the 2D scheme, `(rho, rho u, rho v, p)`.
    """
    p = check_admissible(W, gas)
    return np.concatenate((W[..., :3], p[..., None]), axis=-1)


def conserved_from_fields(Z, gas):
    Z = np.asarray(Z, dtype=float)
    P = Z.copy()
    P[..., 1:3] = Z[..., 1:3] / Z[..., :1]
    return conserved_from_primitive(P, gas)


class Euler2DProblem(Problem):
    """
    Two-dimensional Euler equations on an unstructured mesh. Boundary faces
    follow their markers: `wall` (pressure only), `fluid` and `outflow` (free
    output), `inflow` (imposed pressure along the face normal).

    With second order, the fields `(rho, rho u, rho v, p)` are reconstructed
    with limited Green gradients; the largest violation of the limiter
    constraint over the last reconstruction is kept in
    `constraint_residual`.

    **Arguments**

    - `mesh`: an UnstructuredMesh;
    - `gas`: a GasModel;
    - `initial`: callable `initial(points, length)` returning primitive
    states, shape `(n, 4)`;
    - `order`: 1 or 2;
    - `k`: limiting strength, None for unlimited gradients;
    - `inflow`: callable, imposed pressure on inflow faces;
    """
    name = 'euler2d'
    columns = ('rho', 'u', 'v', 'p')

    def __init__(self, mesh, gas, initial, order=1, k=0.75, inflow=None):
        super().__init__(mesh.areas, mesh.face_left, mesh.face_right,
                         mesh.face_lengths)
        self.mesh = mesh
        self.gas = gas
        self.initial = initial
        self.order = order
        self.k = k
        self.reconstruction = MeshReconstruction(k=k, mode='wall')
        markers = mesh.face_markers
        self.walls = np.flatnonzero(markers == 'wall')
        self.outputs = np.flatnonzero((markers == 'fluid')
                                      | (markers == 'outflow'))
        self.inflows = np.flatnonzero(markers == 'inflow')
        if self.inflows.size and inflow is None:
            raise ConfigError('The mesh has inflow faces but no inflow '
                              'pressure is given')
        self.inflow = PressureBoundarySpec(inflow) if inflow is not None \
            else None
        self.constraint_residual = 0.

    def initial_values(self):
        P = np.asarray(self.initial(self.mesh.barycenters, 1.), dtype=float)
        return conserved_from_primitive(P, self.gas)

    def reconstruct(self, values):
        values = np.asarray(values, dtype=float)
        if self.order == 1:
            left, right = self._adjacent_cells()
            return FaceStates(values[left], values[right])
        mesh = self.mesh
        z = fields_from_conserved(values, self.gas)
        walls = mesh.wall_faces
        wall_values = wall_mean(z[mesh.face_left[walls]],
                                mesh.face_normals[walls])
        rec = self.reconstruction(mesh, z, wall_values=wall_values)
        self.constraint_residual = rec.constraint_residual(self.k)
        zl = rec.left_values
        zr = np.where(np.isnan(rec.right_values), zl, rec.right_values)
        return FaceStates(conserved_from_fields(zl, self.gas),
                          conserved_from_fields(zr, self.gas))

    def face_flux(self, faces, index, t):
        index = np.asarray(index, dtype=int)
        normals = self.mesh.face_normals[index]
        Wl = faces.left[index]
        flux = rotated_flux(Wl, faces.right[index], normals, self.gas)
        for faces_of_kind, fn in ((self.walls, self._wall),
                                  (self.outputs, self._output),
                                  (self.inflows, self._inflow)):
            mask = np.isin(index, faces_of_kind)
            if np.any(mask):
                flux[mask] = fn(Wl[mask], normals[mask], t)
        return flux

    def _wall(self, W, normals, t):
        return wall_flux(W, normals, self.gas)

    def _output(self, W, normals, t):
        return nonreflecting_flux(W, self.gas, normal=normals)

    def _inflow(self, W, normals, t):
        return self.inflow.flux_2d(W, normals, t, self.gas)

    def max_dt(self, values, cfl):
        values = np.asarray(values, dtype=float)
        P = primitive_from_conserved(values, self.gas)
        c = np.sqrt(self.gas.gamma * P[:, 3] / P[:, 0])
        mesh = self.mesh
        n = mesh.face_normals

        def speeds(cells):
            valid = np.where(cells >= 0, cells, 0)
            un = np.abs(np.sum(P[valid, 1:3] * n, axis=-1))
            return mesh.face_lengths * (un + c[valid])

        total = scatter_sum(speeds(mesh.face_left), mesh.face_left,
                            self.n_cells) \
            + scatter_sum(speeds(mesh.face_right), mesh.face_right,
                          self.n_cells)
        return cfl * float(np.min(mesh.areas / total))

    def check(self, values, time=None):
        super().check(values, time)
        check_admissible(values, self.gas, time=time)

    def frame(self, values):
        P = primitive_from_conserved(values, self.gas)
        x, y = self.mesh.barycenters.T
        return pd.DataFrame({'x': x, 'y': y, 'rho': P[:, 0], 'u': P[:, 1],
                             'v': P[:, 2], 'p': P[:, 3]})


def build_problem(config, cells=None):
    """
    Creates the discretization of the scenario described by a configuration.
    :param config: a SolverConfig;
    :param cells: overrides the number of cells (1D only);
    :return: a Problem.
    """
    gas = GasModel(config.gamma)
    if config.problem == 'euler2d':
        mesh = load_mesh(config.mesh)
        log('Loaded {}'.format(mesh), print_string=False)
        k = config.limiter.k if not config.limiter.is_first_order else None
        order = 1 if config.limiter.is_first_order else config.order
        return Euler2DProblem(mesh, gas, config.initial, order=order, k=k,
                              inflow=config.inflow)
    line = dict(length=config.length,
                cells=cells if cells is not None else config.cells,
                periodic=config.bc_left == 'periodic', order=config.order,
                limiter=config.limiter)
    bc = (config.bc_left, config.bc_right)
    profiles = (config.profile_left, config.profile_right)
    if config.problem == 'advection':
        upstream = profiles[0] if config.velocity > 0 else profiles[1]
        return AdvectionProblem(config.velocity, config.initial,
                                inflow=upstream, **line)
    if config.problem == 'acoustics':
        return AcousticsProblem(AcousticsModel(config.rho0, config.c0),
                                config.initial, bc=bc, profiles=profiles,
                                reflections=(config.reflection_left,
                                             config.reflection_right), **line)
    return Euler1DProblem(gas, config.initial, bc=bc, profiles=profiles,
                          **line)
