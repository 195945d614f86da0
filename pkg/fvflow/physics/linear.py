import numpy as np
import scipy.linalg as sla

# Condition number above which an eigenbasis is considered singular
COND_MAX = 1e12


class SingularEigenbasis(ValueError):
    pass


class RegimeNotReached(ValueError):
    pass


class LinearSystem:
    """
    A diagonalizable linear hyperbolic system `dW/dt + A dW/dx = 0` with
    `A = R diag(lambdas) R^-1`.

    The inverse of `R` is never formed explicitly for decompositions: the LU
    factorization of `R` (partial pivoting) is computed once and reused.
    Instances are read-only after construction.

    States can have any number of leading axes; the last axis holds the `dim`
    components.

    **Arguments**

    - `lambdas`: the `dim` real wave speeds;
    - `right_vectors`: np.array of shape `(dim, dim)`, column `j` is the
    eigenvector `r_j` associated to `lambdas[j]`;
    """
    def __init__(self, lambdas, right_vectors):
        lambdas = np.array(lambdas, dtype=float).ravel()
        right_vectors = np.array(right_vectors, dtype=float)
        m = lambdas.shape[0]
        if right_vectors.shape != (m, m):
            raise ValueError('right_vectors must have shape {}, got {}'
                             .format((m, m), right_vectors.shape))
        cond = np.linalg.cond(right_vectors)
        if not np.isfinite(cond) or cond > COND_MAX:
            raise SingularEigenbasis(
                'Eigenvector matrix is numerically singular (condition '
                'number {:.3g})'.format(cond))
        self._lu = sla.lu_factor(right_vectors)
        lambdas.setflags(write=False)
        right_vectors.setflags(write=False)
        self.lambdas = lambdas
        self.right_vectors = right_vectors

    @classmethod
    def from_matrix(cls, A):
        """
        Builds the system from its matrix, sorting the wave speeds.
        :param A: np.array of shape `(dim, dim)` with real eigenvalues;
        :return: a LinearSystem.
        """
        A = np.asarray(A, dtype=float)
        w, R = np.linalg.eig(A)
        scale = max(1., np.max(np.abs(w)))
        if np.any(np.abs(w.imag) > 1e-12 * scale):
            raise ValueError('The matrix has complex eigenvalues')
        order = np.argsort(w.real)
        return cls(w.real[order], R.real[:, order])

    @property
    def dim(self):
        return self.lambdas.shape[0]

    @property
    def inverse(self):
        return sla.lu_solve(self._lu, np.eye(self.dim))

    @property
    def matrix(self):
        return self.right_vectors @ np.diag(self.lambdas) @ self.inverse

    def flux(self, W):
        return np.asarray(W, dtype=float) @ self.matrix.T

    def decompose(self, W):
        W = np.asarray(W, dtype=float)
        flat = W.reshape(-1, self.dim).T
        return sla.lu_solve(self._lu, flat).T.reshape(W.shape)

    def reconstruct(self, phi):
        return np.asarray(phi, dtype=float) @ self.right_vectors.T

    def __repr__(self):
        return 'LinearSystem(dim={}, lambdas={})'.format(self.dim,
                                                         list(self.lambdas))


class AcousticsModel:
    """
    Linear acoustics around a gas at rest, for the state `W = (p, u)`:
    `A = [[0, rho0 c0^2], [1 / rho0, 0]]`.
    The characteristic variables are `p -/+ rho0 c0 u`, moving at `-/+ c0`.

    **Arguments**

    - `rho0`: reference density;
    - `c0`: reference sound celerity;
    """
    def __init__(self, rho0=1., c0=1.):
        self.rho0 = float(rho0)
        self.c0 = float(c0)
        if not (self.rho0 > 0 and self.c0 > 0):
            raise ValueError('rho0 and c0 must be positive, got {} and {}'
                             .format(rho0, c0))

    @property
    def impedance(self):
        return self.rho0 * self.c0

    def system(self):
        z = self.impedance
        R = [[0.5, 0.5],
             [-0.5 / z, 0.5 / z]]
        return LinearSystem([-self.c0, self.c0], R)

    def flux(self, W):
        W = np.asarray(W, dtype=float)
        return np.stack((self.rho0 * self.c0 ** 2 * W[..., 1],
                         W[..., 0] / self.rho0), axis=-1)

    def __repr__(self):
        return 'AcousticsModel(rho0={}, c0={})'.format(self.rho0, self.c0)


class ReflectionBoundary:
    """
    Boundary condition written on the characteristic variables: the ingoing
    ones are an affine function of the outgoing ones,
    `phi_in = g(t) + S phi_out`.

    Ingoing characteristics are those with positive speed on the left side and
    negative speed on the right side; a zero speed counts as outgoing.

    **Arguments**

    - `side`: 'left' or 'right';
    - `g`: callable `g(t)` or constant, shape `(n_in, )`;
    - `S`: np.array of shape `(n_in, n_out)`;
    """
    def __init__(self, side, g, S):
        if side not in ('left', 'right'):
            raise ValueError('side must be "left" or "right", got {}'
                             .format(side))
        self.side = side
        self.g = g
        self.S = np.atleast_2d(np.asarray(S, dtype=float))

    @classmethod
    def pressure(cls, Pi, side='left'):
        """
        Imposed pressure for acoustics: `p = Pi(t)` at the boundary, i.e. the
        ingoing characteristic is `2 Pi - phi_out`.
        :param Pi: callable, the imposed pressure;
        :param side: 'left' or 'right';
        :return: a ReflectionBoundary.
        """
        return cls(side, lambda t: 2. * np.asarray(Pi(t)), [[-1.]])

    def ingoing(self, lambdas):
        if self.side == 'left':
            return lambdas > 0
        return lambdas < 0

    def offset(self, t):
        g = self.g(t) if callable(self.g) else self.g
        return np.atleast_1d(np.asarray(g, dtype=float))

    def __repr__(self):
        return 'ReflectionBoundary(side={}, S={})'.format(self.side,
                                                         self.S.tolist())


def upwind_flux_scalar(a, wl, wr):
    """
    First order upstream-centered flux of the advection equation.
    :param a: advection celerity;
    :param wl: value on the left of the interface;
    :param wr: value on the right of the interface;
    :return: `a wl` if `a >= 0`, `a wr` otherwise.
    """
    return np.where(np.asarray(a) >= 0, a * np.asarray(wl, dtype=float),
                    a * np.asarray(wr, dtype=float))


def advect_exact(u0, bc, a, L, x, t):
    """
    Exact solution of the advection equation `du/dt + a du/dx = 0` on
    `[0, L]`, with initial datum `u0` and datum `bc` imposed on the inflow
    boundary (x = 0 when `a > 0`, x = L when `a < 0`).
    When the characteristic foot falls exactly on a corner of the domain the
    initial datum is used.
    :param u0: callable, the initial profile (vectorized);
    :param bc: callable, the boundary profile (vectorized), or None if the
    solution is only queried where the initial datum determines it;
    :param a: nonzero celerity;
    :param L: domain length;
    :param x: position(s) in `[0, L]`;
    :param t: time(s), t >= 0;
    :return: the solution, with the broadcast shape of x and t.
    """
    if a == 0:
        raise ValueError('The advection celerity must be nonzero')
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float),
                               np.asarray(t, dtype=float))
    shape = x.shape
    x, t = x.ravel(), t.ravel()
    foot = x - a * t
    if a > 0:
        inside = foot >= 0
        trace = t - x / a
    else:
        inside = foot <= L
        trace = t + (L - x) / a
    output = np.empty(x.shape)
    output[inside] = u0(foot[inside])
    if np.any(~inside):
        if bc is None:
            raise ValueError('A boundary profile is needed at these points')
        output[~inside] = bc(trace[~inside])
    output = output.reshape(shape)
    return output if output.ndim else float(output)


def characteristic_decompose(sys, W):
    """
    Characteristic variables `phi = R^-1 W`.
    :param sys: a LinearSystem;
    :param W: state(s), shape `(..., dim)`;
    :return: np.array of the same shape as W.
    """
    return sys.decompose(W)


def characteristic_reconstruct(sys, phi):
    """
    Physical state `W = R phi`.
    :param sys: a LinearSystem;
    :param phi: characteristic variables, shape `(..., dim)`;
    :return: np.array of the same shape as phi.
    """
    return sys.reconstruct(phi)


def advect_characteristics(sys, W0, x, t):
    """
    Exact solution of a linear system on the whole line: each characteristic
    variable is transported at its own speed, `phi_j(x, t) = phi_j(x -
    lambda_j t, 0)`.
    :param sys: a LinearSystem;
    :param W0: callable, the initial state profile, returning shape
    `x.shape + (dim, )`;
    :param x: position(s);
    :param t: time;
    :return: np.array of shape `x.shape + (dim, )`.
    """
    x = np.asarray(x, dtype=float)
    phi = np.empty(x.shape + (sys.dim,))
    for j, lam in enumerate(sys.lambdas):
        phi[..., j] = sys.decompose(W0(x - lam * t))[..., j]
    return sys.reconstruct(phi)


def matrix_abs(sys):
    """
    Absolute value of the system matrix, `|A| = R |Lambda| R^-1`.
    :param sys: a LinearSystem;
    :return: np.array of shape `(dim, dim)`.
    """
    return sys.right_vectors @ np.diag(np.abs(sys.lambdas)) @ sys.inverse


def linear_upwind_flux(sys, Wl, Wr):
    """
    First order upwind flux of a linear system, in the centered form
    `(A Wl + A Wr) / 2 - |A| (Wr - Wl) / 2`.
    A zero wave speed contributes the centered value.
    :param sys: a LinearSystem;
    :param Wl: left state(s);
    :param Wr: right state(s);
    :return: the numerical flux(es).
    """
    Wl = np.asarray(Wl, dtype=float)
    Wr = np.asarray(Wr, dtype=float)
    return 0.5 * (sys.flux(Wl) + sys.flux(Wr)) \
        - 0.5 * (Wr - Wl) @ matrix_abs(sys).T


def upwind_flux_left(sys, Wl, Wr):
    """
    Upwind flux written from the left state,
    `A Wl + sum_j min(lambda_j, 0) (phi_j(Wr) - phi_j(Wl)) r_j`.
    """
    Wl = np.asarray(Wl, dtype=float)
    dphi = sys.decompose(np.asarray(Wr, dtype=float) - Wl)
    return sys.flux(Wl) + sys.reconstruct(np.minimum(sys.lambdas, 0.) * dphi)


def upwind_flux_right(sys, Wl, Wr):
    """
    Upwind flux written from the right state,
    `A Wr - sum_j max(lambda_j, 0) (phi_j(Wr) - phi_j(Wl)) r_j`.
    """
    Wr = np.asarray(Wr, dtype=float)
    dphi = sys.decompose(Wr - np.asarray(Wl, dtype=float))
    return sys.flux(Wr) - sys.reconstruct(np.maximum(sys.lambdas, 0.) * dphi)


def acoustics_exact(model, p0, u0, Pi, L, x, t):
    """
    Exact solution of the acoustic equations on `[0, L]` with pressure `Pi(t)`
    imposed at x = 0 and a right boundary that lets waves out, once the
    characteristics coming from the left boundary have swept the domain
    (`t >= L / c0`).
    :param model: an AcousticsModel;
    :param p0: callable, initial pressure profile;
    :param u0: callable, initial velocity profile;
    :param Pi: callable, imposed pressure at x = 0;
    :param L: domain length;
    :param x: position(s) in `[0, L]`;
    :param t: time;
    :return: tuple `(pressure, velocity)`.
    """
    if t < L / model.c0:
        raise RegimeNotReached('The closed form holds for t >= L / c0 = {}, '
                               'got t = {}'.format(L / model.c0, t))
    x = np.asarray(x, dtype=float)
    p = np.asarray(Pi(t - x / model.c0), dtype=float)
    u = u0(L) + (p - p0(L)) / model.impedance
    return p, u


def acoustic_interface_flux(model, Wl, Wr):
    """
    Upwind flux of the acoustic equations at an interior interface,
    `(rho0 c0^2 (ul + ur) / 2 - c0 (pr - pl) / 2,
    (pl + pr) / (2 rho0) - c0 (ur - ul) / 2)`.
    """
    Wl = np.asarray(Wl, dtype=float)
    Wr = np.asarray(Wr, dtype=float)
    pl, ul = Wl[..., 0], Wl[..., 1]
    pr, ur = Wr[..., 0], Wr[..., 1]
    rho0, c0 = model.rho0, model.c0
    return np.stack((0.5 * rho0 * c0 ** 2 * (ul + ur) - 0.5 * c0 * (pr - pl),
                     0.5 * (pl + pr) / rho0 - 0.5 * c0 * (ur - ul)), axis=-1)


def acoustic_boundary_fluxes(model, Pi_half, W_first, W_last, W_init_last):
    """
    Boundary fluxes of the upwind scheme for acoustics in a pipe with an
    imposed pressure on the left and a free output on the right.

    On the left, the pressure is imposed and the outgoing characteristic
    `p - rho0 c0 u` is extrapolated from the first cell. On the right, the
    ingoing characteristic is frozen to its initial value, which amounts to
    using the initial state of the last cell as the right state of the
    interior formula.
    :param model: an AcousticsModel;
    :param Pi_half: imposed pressure at the half time step;
    :param W_first: state `(p, u)` of the first cell;
    :param W_last: state of the last cell;
    :param W_init_last: initial state of the last cell;
    :return: tuple `(left_flux, right_flux)`.
    """
    W_first = np.asarray(W_first, dtype=float)
    p, u = W_first[..., 0], W_first[..., 1]
    rho0, c0 = model.rho0, model.c0
    Pi_half = np.asarray(Pi_half, dtype=float)
    left = np.stack(np.broadcast_arrays(
        rho0 * c0 ** 2 * u + c0 * (Pi_half - p), Pi_half / rho0), axis=-1)
    right = acoustic_interface_flux(model, W_last, W_init_last)
    return left, right


def reflection_boundary_flux(sys, rb, W_interior, t):
    """
    Boundary flux `sum_j lambda_j phi_j r_j`, where the outgoing
    characteristics are taken from the adjacent cell and the ingoing ones
    follow the reflection law `phi_in = g(t) + S phi_out`.
    :param sys: a LinearSystem;
    :param rb: a ReflectionBoundary;
    :param W_interior: state(s) of the cell(s) adjacent to the boundary;
    :param t: time at which `g` is evaluated;
    :return: the boundary flux(es).
    """
    ingoing = rb.ingoing(sys.lambdas)
    outgoing = ~ingoing
    n_in, n_out = int(ingoing.sum()), int(outgoing.sum())
    if rb.S.size == 0 and n_in == 0:
        S = np.zeros((0, n_out))
    else:
        S = rb.S
    if S.shape != (n_in, n_out):
        raise ValueError('Reflection matrix must have shape {} for the {} '
                         'side, got {}'.format((n_in, n_out), rb.side,
                                               S.shape))
    g = rb.offset(t)
    if n_in and g.shape[-1] != n_in:
        raise ValueError('Offset must have {} components, got {}'
                         .format(n_in, g.shape[-1]))
    phi = sys.decompose(W_interior)
    phi_b = phi.copy()
    phi_b[..., ingoing] = g + phi[..., outgoing] @ S.T
    return sys.reconstruct(sys.lambdas * phi_b)
