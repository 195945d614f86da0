import numpy as np

# Limiting strength of each kind (None for kinds outside the k-family)
LIMITERS = {
    'none': None,
    'firstorder': None,
    'minmod': 0.5,
    'sts': 0.75,
    'towards4': 1.,
}


class Limiter:
    """
    A slope limiter `phi(r)` for MUSCL extrapolation, where `r` is the ratio
    of consecutive differences.

    Available kinds:

    - `none`: `phi(r) = (1 + r) / 2`, the centered slope (unstable with
    forward Euler);
    - `firstorder`: `phi(r) = 0`;
    - `minmod`, `sts`, `towards4`: members of the k-family with `k = 1/2`,
    `3/4` and `1`, i.e., `phi_k(r) = 0` for `r <= 0` and
    `phi_k(r) = min((1 + r) / 2, 2k min(1, r))` otherwise.

    All limited kinds satisfy `phi(1) = 1` and `phi(r) = r phi(1 / r)`.

    **Arguments**

    - `kind`: string, one of the keys of `LIMITERS`;
    - `k`: limiting strength in [1/2, 1], overrides the default of the kind
    (only for k-family kinds);
    """
    def __init__(self, kind='sts', k=None):
        if kind not in LIMITERS:
            raise ValueError('Unknown limiter {}, available: {}'
                             .format(kind, list(LIMITERS.keys())))
        if LIMITERS[kind] is None and k is not None:
            raise ValueError('Limiter {} takes no k parameter'.format(kind))
        if k is None:
            k = LIMITERS[kind]
        elif not 0.5 <= k <= 1.:
            raise ValueError('k must be in [0.5, 1], got {}'.format(k))
        self.kind = kind
        self.k = None if k is None else float(k)

    @property
    def is_first_order(self):
        return self.kind == 'firstorder'

    def __call__(self, r):
        return limiter_value(self, r)

    def __repr__(self):
        return 'Limiter(kind={}, k={})'.format(self.kind, self.k)


def deserialize_limiter(limiter):
    if isinstance(limiter, Limiter):
        return limiter
    if isinstance(limiter, str):
        return Limiter(limiter)
    raise ValueError('limiter must be a Limiter or string in: {}.'
                     .format(list(LIMITERS.keys())))


def _sts(r):
    return np.select([r <= 0., r <= 0.5, r <= 2.],
                     [np.zeros_like(r), 1.5 * r, 0.5 * (1. + r)], 1.5)


def _k_family(r, k):
    phi = np.minimum(0.5 * (1. + r), 2. * k * np.minimum(1., r))
    return np.where(r <= 0., 0., phi)


def limiter_value(lim, r):
    """
    Evaluates a limiter.
    :param lim: a Limiter;
    :param r: np.array of slope ratios;
    :return: np.array of limited slope factors.
    """
    r = np.asarray(r, dtype=float)
    if lim.kind == 'firstorder':
        return np.zeros_like(r)
    if lim.kind == 'none':
        return 0.5 * (1. + r)
    if lim.kind == 'sts' and lim.k == 0.75:
        return _sts(r)
    return _k_family(r, lim.k)


def muscl_extrapolate(z_mm, z_m, z_p, z_pp, lim):
    """
    Limited extrapolation of cell averages to the interface between the cells
    holding `z_m` (left) and `z_p` (right):

    - `z_minus = z_m + phi((z_m - z_mm) / (z_p - z_m)) (z_p - z_m) / 2`;
    - `z_plus = z_p - phi((z_pp - z_p) / (z_p - z_m)) (z_p - z_m) / 2`.

    When `z_p == z_m` both increments are zero.
    :param z_mm: value(s) left of the left cell;
    :param z_m: value(s) of the left cell;
    :param z_p: value(s) of the right cell;
    :param z_pp: value(s) right of the right cell;
    :param lim: a Limiter;
    :return: tuple `(z_minus, z_plus)`.
    """
    z_mm, z_m, z_p, z_pp = np.broadcast_arrays(
        *[np.asarray(z, dtype=float) for z in (z_mm, z_m, z_p, z_pp)])
    d = z_p - z_m
    nonzero = d != 0.
    safe = np.where(nonzero, d, 1.)
    inc_minus = 0.5 * limiter_value(lim, (z_m - z_mm) / safe) * d
    inc_plus = 0.5 * limiter_value(lim, (z_pp - z_p) / safe) * d
    z_minus = z_m + np.where(nonzero, inc_minus, 0.)
    z_plus = z_p - np.where(nonzero, inc_plus, 0.)
    return z_minus, z_plus


def reconstruct_line(values, lim, periodic=False):
    """
    MUSCL extrapolation at the interfaces of a uniform 1D grid. Outside the
    grid, ghost cells copy the edge cells, or wrap around when periodic.
    :param values: np.array of shape `(J, ...)`, cell values (any number of
    trailing component axes);
    :param lim: a Limiter or limiter name;
    :param periodic: whether the grid is periodic;
    :return: tuple `(left_values, right_values)` on the interfaces: `J - 1`
    interior interfaces, or `J` when periodic (interface `j` lies between
    cells `j` and `(j + 1) mod J`).
    """
    lim = deserialize_limiter(lim)
    values = np.asarray(values, dtype=float)
    J = values.shape[0]
    trailing = [(0, 0)] * (values.ndim - 1)
    if periodic:
        padded = np.pad(values, [(1, 2)] + trailing, mode='wrap')
        n = J
    else:
        padded = np.pad(values, [(1, 1)] + trailing, mode='edge')
        n = J - 1
    if lim.is_first_order:
        return padded[1:n + 1].copy(), padded[2:n + 2].copy()
    return muscl_extrapolate(padded[:n], padded[1:n + 1], padded[2:n + 2],
                             padded[3:n + 3], lim)


def amplification_factor(xi, sigma):
    """
    Amplification factor of the unlimited MUSCL scheme with forward Euler
    time stepping for linear advection:
    `g = 1 - sigma/2 (1 - cos xi)^2 - i sigma/2 sin xi (3 - cos xi)`.
    :param xi: nondimensional wave number `k dx`;
    :param sigma: Courant number `a dt / dx`;
    :return: complex np.array.
    """
    xi = np.asarray(xi, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    real = 1. - 0.5 * sigma * (1. - np.cos(xi)) ** 2
    imag = -0.5 * sigma * np.sin(xi) * (3. - np.cos(xi))
    return real + 1j * imag


def amplification_modulus(xi, sigma):
    """
    :return: `|g(xi, sigma)|`; values above 1 are growing modes.
    """
    return np.abs(amplification_factor(xi, sigma))
