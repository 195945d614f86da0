import numpy as np

# Admissibility thresholds, in scenario units
RHO_FLOOR = 1e-12
P_FLOOR = 1e-12


class InadmissibleState(ValueError):
    """
    Raised when a state has non-positive density or pressure. `index` is the
    position of the first offending state (cell or face index, None for a
    single state) and `time` the simulation time, when known.
    """
    def __init__(self, message, index=None, time=None):
        super().__init__(message)
        self.index = index
        self.time = time


class NonPositiveDensity(InadmissibleState):
    pass


class NonPositivePressure(InadmissibleState):
    pass


class GasModel:
    """
    A polytropic ideal gas, `p = (gamma - 1) * rho * e`.

    All functions of this module take states as np.arrays whose last axis
    holds the components, so that a single call can process one state or
    an array of them:

    - conserved states are `(rho, q, epsilon)` in 1D and
    `(rho, q_x, q_y, epsilon)` in 2D, with `q` the momentum density and
    `epsilon` the total energy density;
    - primitive states are `(rho, u, p)` in 1D and `(rho, u, v, p)` in 2D.

    **Arguments**

    - `gamma`: ratio of specific heats, must be greater than 1;
    """
    def __init__(self, gamma=1.4):
        gamma = float(gamma)
        if not gamma > 1:
            raise ValueError('gamma must be > 1, got {}'.format(gamma))
        self.gamma = gamma

    def __repr__(self):
        return 'GasModel(gamma={})'.format(self.gamma)


class EigenStructure:
    """
    Wave speeds and right eigenvectors of the Euler flux Jacobian.
    Eigenvectors are unnormalized and stored as the columns of
    `right_vectors`, so `right_vectors[..., :, j]` is `r_j`.

    **Arguments**

    - `lambdas`: np.array of shape `(..., n_waves)`, increasing wave speeds;
    - `right_vectors`: np.array of shape `(..., n_waves, n_waves)`;
    """
    def __init__(self, lambdas, right_vectors):
        self.lambdas = lambdas
        self.right_vectors = right_vectors

    @property
    def n_waves(self):
        return self.lambdas.shape[-1]

    def __repr__(self):
        return 'EigenStructure(n_waves={})'.format(self.n_waves)


def _first_index(mask):
    if mask.ndim == 0:
        return None
    index = tuple(int(i) for i in np.argwhere(mask)[0])
    return index[0] if len(index) == 1 else index


def _split(W):
    W = np.asarray(W, dtype=float)
    return W, W[..., 0], W[..., 1:-1], W[..., -1]


def pressure(W, gas):
    """
    Pressure law of the polytropic gas, `(gamma - 1)(epsilon - |q|^2 / 2rho)`.
    No admissibility check is made.
    :param W: conserved state(s);
    :param gas: a GasModel;
    :return: np.array of pressures, shape `W.shape[:-1]`.
    """
    W, rho, q, eps = _split(W)
    return (gas.gamma - 1.) * (eps - 0.5 * np.sum(q ** 2, axis=-1) / rho)


def admissible(W, gas):
    """
    :param W: conserved state(s);
    :param gas: a GasModel;
    :return: boolean np.array, True where density and pressure are above the
    admissibility floors.
    """
    W, rho, _, _ = _split(W)
    with np.errstate(divide='ignore', invalid='ignore'):
        p = pressure(W, gas)
    return (rho > RHO_FLOOR) & (p > P_FLOOR)


def check_admissible(W, gas, time=None):
    """
    Checks that all the given conserved states are admissible.
    :param W: conserved state(s);
    :param gas: a GasModel;
    :param time: simulation time, reported in the error;
    :return: the pressures of the states.
    """
    W, rho, _, _ = _split(W)
    bad = ~(rho > RHO_FLOOR)
    if np.any(bad):
        index = _first_index(bad)
        raise NonPositiveDensity(
            'Non-positive density {} at index {} (t={})'
            .format(rho[index] if index is not None else rho, index, time),
            index=index, time=time)
    p = pressure(W, gas)
    bad = ~(p > P_FLOOR)
    if np.any(bad):
        index = _first_index(bad)
        raise NonPositivePressure(
            'Non-positive pressure {} at index {} (t={})'
            .format(p[index] if index is not None else p, index, time),
            index=index, time=time)
    return p


def primitive_from_conserved(W, gas):
    """
    Converts conserved states to primitive states.
    :param W: conserved state(s), `(rho, q[, q_y], epsilon)`;
    :param gas: a GasModel;
    :return: primitive state(s), `(rho, u[, v], p)`.
    """
    W, rho, q, _ = _split(W)
    p = check_admissible(W, gas)
    u = q / rho[..., None]
    return np.concatenate((rho[..., None], u, p[..., None]), axis=-1)


def conserved_from_primitive(P, gas):
    """
    Converts primitive states to conserved states.
    :param P: primitive state(s), `(rho, u[, v], p)`;
    :param gas: a GasModel;
    :return: conserved state(s), `(rho, q[, q_y], epsilon)`.
    """
    P = np.asarray(P, dtype=float)
    rho, u, p = P[..., 0], P[..., 1:-1], P[..., -1]
    bad = ~(rho > RHO_FLOOR)
    if np.any(bad):
        raise NonPositiveDensity('Non-positive density in primitive state',
                                 index=_first_index(bad))
    bad = ~(p > P_FLOOR)
    if np.any(bad):
        raise NonPositivePressure('Non-positive pressure in primitive state',
                                  index=_first_index(bad))
    q = rho[..., None] * u
    eps = p / (gas.gamma - 1.) + 0.5 * rho * np.sum(u ** 2, axis=-1)
    return np.concatenate((rho[..., None], q, eps[..., None]), axis=-1)


def physical_flux(W, gas, normal=None):
    """
    Physical flux of the Euler equations, `(rho u, rho u^2 + p, rho u H)` in
    1D. For 2D states, the flux along the unit vector `normal` is returned,
    i.e., `F(W) . n` (defaults to the x direction).
    :param W: conserved state(s);
    :param gas: a GasModel;
    :param normal: np.array of shape `(..., 2)`, unit normals (2D only);
    :return: np.array with the same shape as W.
    """
    W, rho, q, eps = _split(W)
    p = check_admissible(W, gas)
    u = q / rho[..., None]
    dim = q.shape[-1]
    if normal is None or dim == 1:
        n = np.eye(dim)[0]
    else:
        n = np.asarray(normal, dtype=float)
    un = np.sum(u * n, axis=-1)
    mass = rho * un
    momentum = q * un[..., None] + p[..., None] * n
    energy = (eps + p) * un
    mass, energy = np.broadcast_arrays(mass, energy)
    return np.concatenate((mass[..., None], momentum, energy[..., None]),
                          axis=-1)


def sound_speed(P, gas):
    """
    Sound celerity `c = sqrt(gamma p / rho)`.
    :param P: primitive state(s);
    :param gas: a GasModel;
    :return: np.array of celerities.
    """
    P = np.asarray(P, dtype=float)
    return np.sqrt(gas.gamma * P[..., -1] / P[..., 0])


def total_enthalpy(W, gas):
    """
    Specific total enthalpy `H = (epsilon + p) / rho`.
    :param W: conserved state(s);
    :param gas: a GasModel;
    :return: np.array of enthalpies.
    """
    W, rho, _, eps = _split(W)
    p = check_admissible(W, gas)
    return (eps + p) / rho


def flux_jacobian(W, gas):
    """
    Jacobian matrix dF(W) of the one-dimensional Euler flux, written with the
    velocity and total enthalpy only.
    :param W: 1D conserved state(s), shape `(..., 3)`;
    :param gas: a GasModel;
    :return: np.array of shape `(..., 3, 3)`.
    """
    W = np.asarray(W, dtype=float)
    if W.shape[-1] != 3:
        raise ValueError('flux_jacobian expects 1D states with 3 components, '
                         'got {}'.format(W.shape[-1]))
    H = total_enthalpy(W, gas)
    return jacobian_from_velocity(W[..., 1] / W[..., 0], H, gas)


def jacobian_from_velocity(u, H, gas):
    """
    The 1D flux Jacobian only depends on the velocity and total enthalpy.
    :param u: velocity;
    :param H: specific total enthalpy;
    :param gas: a GasModel;
    :return: np.array of shape `(..., 3, 3)`.
    """
    g = gas.gamma
    u, H = np.broadcast_arrays(np.asarray(u, dtype=float),
                               np.asarray(H, dtype=float))
    zero, one = np.zeros_like(u), np.ones_like(u)
    rows = [
        [zero, one, zero],
        [0.5 * (g - 3.) * u ** 2, (3. - g) * u, (g - 1.) * one],
        [0.5 * (g - 1.) * u ** 3 - u * H, H - (g - 1.) * u ** 2, g * u],
    ]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def eigenstructure(u, c, H, v=None):
    """
    Eigenvalues and right eigenvectors of the Euler flux Jacobian, given the
    velocity, celerity and total enthalpy.
    If the tangential velocity `v` is given, returns the structure of the 2D
    system written in the normal frame, with a doubly degenerate contact:
    `(u - c, u, u, u + c)` and eigenvectors `(1, u - c, v, H - uc)`,
    `(1, u, v, (u^2 + v^2)/2)`, `(0, 0, 1, v)`, `(1, u + c, v, H + uc)`.
    :param u: (normal) velocity;
    :param c: sound celerity, must be positive;
    :param H: specific total enthalpy;
    :param v: tangential velocity (2D only);
    :return: an EigenStructure.
    """
    u, c, H = np.broadcast_arrays(*[np.asarray(a, dtype=float)
                                    for a in (u, c, H)])
    if np.any(~(c > 0)):
        raise ValueError('The sound celerity must be positive')
    one, zero = np.ones_like(u), np.zeros_like(u)
    if v is None:
        lambdas = [u - c, u, u + c]
        vectors = [
            [one, u - c, H - u * c],
            [one, u, 0.5 * u ** 2],
            [one, u + c, H + u * c],
        ]
    else:
        v = np.broadcast_to(np.asarray(v, dtype=float), u.shape)
        lambdas = [u - c, u, u, u + c]
        vectors = [
            [one, u - c, v, H - u * c],
            [one, u, v, 0.5 * (u ** 2 + v ** 2)],
            [zero, zero, one, v],
            [one, u + c, v, H + u * c],
        ]
    lambdas = np.stack(lambdas, axis=-1)
    right_vectors = np.stack([np.stack(r, axis=-1) for r in vectors], axis=-1)
    return EigenStructure(lambdas, right_vectors)


def eigenvalues(W, gas):
    """
    Wave speeds of conserved state(s): `(u - c, u, u + c)` in 1D, and
    `(u - c, u, u, u + c)` for 2D states in the normal frame (`u` is the
    first velocity component). No admissibility check is made.
    :param W: conserved state(s);
    :param gas: a GasModel;
    :return: np.array of shape `W.shape[:-1] + (n_waves, )`.
    """
    W, rho, q, _ = _split(W)
    u = q[..., 0] / rho
    c = np.sqrt(gas.gamma * pressure(W, gas) / rho)
    if q.shape[-1] == 1:
        return np.stack((u - c, u, u + c), axis=-1)
    return np.stack((u - c, u, u, u + c), axis=-1)


def rotate_to_normal(W, normal):
    """
    Writes 2D states (or fluxes) in the frame of the unit vector `n`:
    `(rho, q . n, q . t, epsilon)` with `t = (-n_y, n_x)`.
    :param W: np.array of shape `(..., 4)`;
    :param normal: np.array of shape `(..., 2)`;
    :return: np.array of shape `(..., 4)`.
    """
    W = np.asarray(W, dtype=float)
    n = np.asarray(normal, dtype=float)
    nx, ny = n[..., 0], n[..., 1]
    qn = W[..., 1] * nx + W[..., 2] * ny
    qt = -W[..., 1] * ny + W[..., 2] * nx
    rho, eps, qn, qt = np.broadcast_arrays(W[..., 0], W[..., 3], qn, qt)
    return np.stack((rho, qn, qt, eps), axis=-1)


def rotate_from_normal(F, normal):
    """
    Inverse of `rotate_to_normal`.
    :param F: np.array of shape `(..., 4)` in the normal frame;
    :param normal: np.array of shape `(..., 2)`;
    :return: np.array of shape `(..., 4)` in the Cartesian frame.
    """
    F = np.asarray(F, dtype=float)
    n = np.asarray(normal, dtype=float)
    nx, ny = n[..., 0], n[..., 1]
    fx = F[..., 1] * nx - F[..., 2] * ny
    fy = F[..., 1] * ny + F[..., 2] * nx
    f0, f3, fx, fy = np.broadcast_arrays(F[..., 0], F[..., 3], fx, fy)
    return np.stack((f0, fx, fy, f3), axis=-1)
