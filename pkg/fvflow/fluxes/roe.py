import numpy as np

from fvflow.physics.gas import (InadmissibleState, admissible,
                                check_admissible, eigenstructure, eigenvalues,
                                jacobian_from_velocity, physical_flux,
                                rotate_from_normal, rotate_to_normal)
from fvflow.utils.logging import log


class IntermediateStateInadmissible(InadmissibleState):
    pass


class RoeAverage:
    """
    The intermediate state of the Roe linearization between two states, with
    the eigenstructure of the flux Jacobian evaluated on it.

    Works with 1D states and with 2D states written in the frame of a face
    normal (see `fvflow.physics.rotate_to_normal`), in which case
    `velocity` has two components and the first one is normal to the face.

    **Arguments**

    - `rho`: `sqrt(rho_l rho_r)`;
    - `velocity`: sqrt(rho)-weighted mean velocity, shape `(..., dim)`;
    - `H`: sqrt(rho)-weighted mean total enthalpy;
    - `c`: sound celerity of the intermediate state;
    """
    def __init__(self, rho, velocity, H, c):
        self.rho = rho
        self.velocity = velocity
        self.H = H
        self.c = c
        v = velocity[..., 1] if velocity.shape[-1] > 1 else None
        self.eigen = eigenstructure(velocity[..., 0], c, H, v=v)

    @property
    def u(self):
        return self.velocity[..., 0]

    @property
    def lambdas(self):
        return self.eigen.lambdas

    @property
    def right_vectors(self):
        return self.eigen.right_vectors

    def __repr__(self):
        return 'RoeAverage(shape={}, n_waves={})'.format(
            np.shape(self.rho), self.eigen.n_waves)


class WaveDecomposition:
    """
    Decomposition of a state jump on the eigenvectors of the Roe matrix,
    `Wr - Wl = sum_j alphas[j] r_j`.

    **Arguments**

    - `alphas`: wave strengths, shape `(..., n_waves)`;
    - `lambdas`: wave speeds of the Roe matrix;
    - `vectors`: eigenvectors of the Roe matrix (as columns);
    """
    def __init__(self, alphas, lambdas, vectors):
        self.alphas = alphas
        self.lambdas = lambdas
        self.vectors = vectors

    def combine(self, coefficients):
        """
        :param coefficients: np.array of shape `(..., n_waves)`;
        :return: `sum_j coefficients[j] alphas[j] r_j`.
        """
        return np.einsum('...ij,...j->...i', self.vectors,
                         coefficients * self.alphas)

    @property
    def jump(self):
        return self.combine(np.ones_like(self.alphas))

    def __repr__(self):
        return 'WaveDecomposition(n_waves={})'.format(self.alphas.shape[-1])


class SonicData:
    """
    Intermediate states of the Roe decomposition and the waves across which
    a characteristic speed changes sign from negative to positive.

    **Arguments**

    - `states`: `W^0 = Wl, W^1, W^2, W^3 = Wr`, shape `(..., 4, m)`;
    - `sonic`: boolean np.array of shape `(..., m)`, True for sonic waves;
    - `admissible`: boolean np.array, False where an intermediate state is
    not admissible (the entropy correction is then skipped);
    - `lambda_before`: speed of each wave on the state before it;
    - `lambda_after`: speed of each wave on the state after it;
    """
    def __init__(self, states, sonic, admissible, lambda_before, lambda_after):
        self.states = states
        self.sonic = sonic
        self.admissible = admissible
        self.lambda_before = lambda_before
        self.lambda_after = lambda_after

    @property
    def sonic_set(self):
        """
        The set of sonic wave indices (starting from 1) of a single pair.
        """
        if self.sonic.ndim != 1:
            raise ValueError('sonic_set is only defined for a single pair')
        return {int(j) + 1 for j in np.flatnonzero(self.sonic)}

    @property
    def n_fallbacks(self):
        return int(np.sum(~self.admissible))

    def __repr__(self):
        return 'SonicData(n_sonic={}, n_fallbacks={})'.format(
            int(np.sum(self.sonic)), self.n_fallbacks)


def _velocity(W):
    return W[..., 1:-1] / W[..., :1]


def roe_average(Wl, Wr, gas):
    """
    Roe intermediate state: `rho* = sqrt(rho_l rho_r)`, velocity and total
    enthalpy averaged with weights `sqrt(rho)`, and
    `c*^2 = (gamma - 1)(H* - |u*|^2 / 2)`.
    :param Wl: left conserved state(s);
    :param Wr: right conserved state(s);
    :param gas: a GasModel;
    :return: a RoeAverage.
    """
    Wl = np.asarray(Wl, dtype=float)
    Wr = np.asarray(Wr, dtype=float)
    pl = check_admissible(Wl, gas)
    pr = check_admissible(Wr, gas)
    sl = np.sqrt(Wl[..., 0])
    sr = np.sqrt(Wr[..., 0])
    Hl = (Wl[..., -1] + pl) / Wl[..., 0]
    Hr = (Wr[..., -1] + pr) / Wr[..., 0]
    weight = (sl / (sl + sr))[..., None]
    velocity = weight * _velocity(Wl) + (1. - weight) * _velocity(Wr)
    H = (sl * Hl + sr * Hr) / (sl + sr)
    c2 = (gas.gamma - 1.) * (H - 0.5 * np.sum(velocity ** 2, axis=-1))
    if np.any(~(c2 > 0)):
        raise InadmissibleState('Roe average has non-positive celerity')
    return RoeAverage(sl * sr, velocity, H, np.sqrt(c2))


def roe_celerity_explicit(Wl, Wr, gas):
    """
    Celerity of the Roe state written without the enthalpy (1D):
    `c*^2 = [(gamma - 1)/2 rho* (ur - ul)^2 + (rho_l + rho*) cl^2 +
    (rho* + rho_r) cr^2] / (sqrt(rho_l) + sqrt(rho_r))^2`.
    The bracket is a sum of nonnegative terms, so c* is always real.
    """
    Wl = np.asarray(Wl, dtype=float)
    Wr = np.asarray(Wr, dtype=float)
    pl = check_admissible(Wl, gas)
    pr = check_admissible(Wr, gas)
    rl, rr = Wl[..., 0], Wr[..., 0]
    rho = np.sqrt(rl * rr)
    cl2 = gas.gamma * pl / rl
    cr2 = gas.gamma * pr / rr
    du = Wr[..., 1] / rr - Wl[..., 1] / rl
    num = 0.5 * (gas.gamma - 1.) * rho * du ** 2 + (rl + rho) * cl2 \
        + (rho + rr) * cr2
    return np.sqrt(num) / (np.sqrt(rl) + np.sqrt(rr))


def roe_matrix(Wl, Wr, gas):
    """
    Roe matrix of the 1D Euler equations, i.e. the flux Jacobian evaluated on
    the Roe intermediate state.
    :param Wl: left conserved state(s);
    :param Wr: right conserved state(s);
    :param gas: a GasModel;
    :return: np.array of shape `(..., 3, 3)`.
    """
    if np.shape(Wl)[-1] != 3:
        raise ValueError('roe_matrix expects 1D states')
    avg = roe_average(Wl, Wr, gas)
    return jacobian_from_velocity(avg.u, avg.H, gas)


def wave_strengths(Wl, Wr, avg, gas):
    """
    Strengths of the waves of the Roe decomposition:
    `alpha_1 = [(pr - rho* c* ur) - (pl - rho* c* ul)] / 2c*^2`,
    `alpha_2 = -[(pr - c*^2 rho_r) - (pl - c*^2 rho_l)] / c*^2`,
    `alpha_3 = [(pr + rho* c* ur) - (pl + rho* c* ul)] / 2c*^2`.
    For 2D states in a normal frame, the shear wave `rho* (vr - vl)` is
    inserted after the entropy wave.
    :param Wl: left conserved state(s);
    :param Wr: right conserved state(s);
    :param avg: the RoeAverage of the pair;
    :param gas: a GasModel;
    :return: a WaveDecomposition.
    """
    Wl = np.asarray(Wl, dtype=float)
    Wr = np.asarray(Wr, dtype=float)
    dp = check_admissible(Wr, gas) - check_admissible(Wl, gas)
    dvel = _velocity(Wr) - _velocity(Wl)
    drho = Wr[..., 0] - Wl[..., 0]
    rho, c = avg.rho, avg.c
    c2 = c ** 2
    alphas = [(dp - rho * c * dvel[..., 0]) / (2. * c2),
              -(dp - c2 * drho) / c2]
    if dvel.shape[-1] > 1:
        alphas.append(rho * dvel[..., 1])
    alphas.append((dp + rho * c * dvel[..., 0]) / (2. * c2))
    alphas = np.stack(np.broadcast_arrays(*alphas), axis=-1)
    return WaveDecomposition(alphas, avg.lambdas, avg.right_vectors)


def _decompose(Wl, Wr, gas):
    avg = roe_average(Wl, Wr, gas)
    return avg, wave_strengths(Wl, Wr, avg, gas)


def roe_flux_left(Wl, Wr, gas):
    """
    Roe flux written from the left state,
    `F(Wl) + sum_j min(lambda_j, 0) alpha_j r_j`.
    """
    avg, waves = _decompose(Wl, Wr, gas)
    return physical_flux(Wl, gas) + waves.combine(np.minimum(avg.lambdas, 0.))


def roe_flux_right(Wl, Wr, gas):
    """
    Roe flux written from the right state,
    `F(Wr) - sum_j max(lambda_j, 0) alpha_j r_j`.
    """
    avg, waves = _decompose(Wl, Wr, gas)
    return physical_flux(Wr, gas) - waves.combine(np.maximum(avg.lambdas, 0.))


def roe_flux_centered(Wl, Wr, gas):
    """
    Roe flux written as a centered flux with upwind viscosity,
    `(F(Wl) + F(Wr)) / 2 - sum_j |lambda_j| alpha_j r_j / 2`.
    """
    avg, waves = _decompose(Wl, Wr, gas)
    return _centered(physical_flux(Wl, gas), physical_flux(Wr, gas), avg,
                     waves)


def _centered(Fl, Fr, avg, waves):
    return 0.5 * (Fl + Fr) - 0.5 * waves.combine(np.abs(avg.lambdas))


def _roe_flux(Fl, Fr, avg, waves):
    lam = avg.lambdas
    slow, fast, u = lam[..., 0], lam[..., -1], avg.u
    ones = np.ones_like(lam)
    first = ones * (np.arange(lam.shape[-1]) == 0)
    last = ones * (np.arange(lam.shape[-1]) == lam.shape[-1] - 1)

    # u* = 0 is the only tie where the one-sided cases differ in floating
    # point, it falls back to the centered form
    flux = _centered(Fl, Fr, avg, waves)
    flux = np.where(((slow < 0) & (u > 0))[..., None],
                    Fl + waves.combine(first * lam), flux)
    flux = np.where(((u < 0) & (fast > 0))[..., None],
                    Fr - waves.combine(last * lam), flux)
    flux = np.where((slow >= 0)[..., None], Fl, flux)
    flux = np.where((fast <= 0)[..., None], Fr, flux)
    return flux


def roe_flux(Wl, Wr, gas):
    """
    Roe flux between two states:

    - `F(Wl)` if `u* - c* >= 0`;
    - `F(Wl) + (u* - c*) alpha_1 r_1` if `u* - c* < 0 < u*`;
    - `F(Wr) - (u* + c*) alpha_3 r_3` if `u* < 0 < u* + c*`;
    - `F(Wr)` if `u* + c* <= 0`;

    and the centered form when `u* = 0`.
    :param Wl: left conserved state(s);
    :param Wr: right conserved state(s);
    :param gas: a GasModel;
    :return: the numerical flux(es).
    """
    avg, waves = _decompose(Wl, Wr, gas)
    return _roe_flux(physical_flux(Wl, gas), physical_flux(Wr, gas), avg,
                     waves)


def _intermediate_states(Wl, Wr, waves):
    Wl = np.asarray(Wl, dtype=float)
    Wr = np.asarray(Wr, dtype=float)
    # contributions[..., :, j] = alpha_j r_j
    contributions = waves.vectors * waves.alphas[..., None, :]
    m = waves.alphas.shape[-1]
    # The waves moving at u* (entropy, and shear in 2D) are crossed in a
    # single step, so the states do not depend on their ordering
    states = [Wl, Wl + contributions[..., :, 0],
              Wr - contributions[..., :, m - 1], Wr]
    before = np.array([0] + [1] * (m - 2) + [2])
    return np.stack(np.broadcast_arrays(*states), axis=-2), before


def sonic_indices(Wl, Wr, gas, strict=True):
    """
    Finds the sonic waves of the Roe decomposition: a wave is sonic if its
    characteristic speed is negative on the state before it and positive on
    the state after it. The intermediate states are `W^0 = Wl`,
    `W^1 = Wl + alpha_1 r_1`, `W^2 = Wr - alpha_m r_m` and `W^3 = Wr`, the
    waves moving at `u*` all lying between `W^1` and `W^2`. Waves with zero
    strength are never sonic.
    :param Wl: left conserved state(s);
    :param Wr: right conserved state(s);
    :param gas: a GasModel;
    :param strict: raise IntermediateStateInadmissible if an intermediate
    state is not admissible; otherwise, flag the pair in `admissible`;
    :return: a SonicData.
    """
    Wl = np.asarray(Wl, dtype=float)
    Wr = np.asarray(Wr, dtype=float)
    _, waves = _decompose(Wl, Wr, gas)
    return _sonic(Wl, Wr, waves, gas, strict)


def _sonic(Wl, Wr, waves, gas, strict):
    states, before = _intermediate_states(Wl, Wr, waves)
    ok = np.all(admissible(states[..., 1:-1, :], gas), axis=-1)
    if strict and np.any(~ok):
        raise IntermediateStateInadmissible(
            'Intermediate state of the Roe decomposition is not admissible '
            '(strong wave)')
    safe = np.where(ok[..., None, None], states, states[..., :1, :])
    lam = eigenvalues(safe, gas)
    index = np.arange(before.size)
    lambda_before = lam[..., before, index]
    lambda_after = lam[..., before + 1, index]
    sonic = (lambda_before < 0) & (lambda_after > 0) \
        & (waves.alphas != 0) & ok[..., None]
    return SonicData(states, sonic, ok, lambda_before, lambda_after)


def sonic_cubic(lambda_left, lambda_star, lambda_right):
    """
    Coefficients of the Hermite cubic used by the entropy correction, written
    in the reduced variable `s = xi / alpha`:
    `p(xi) / alpha = A s^3 + B s^2 + lambda_left s`, with
    `p(0) = 0`, `p(alpha) = lambda_star alpha`, `p'(0) = lambda_left` and
    `p'(alpha) = lambda_right`.
    :return: tuple `(A, B, lambda_left)`.
    """
    A = lambda_right + lambda_left - 2. * lambda_star
    B = 3. * lambda_star - 2. * lambda_left - lambda_right
    return A, B, lambda_left


def hermite_cubic(lambda_left, lambda_star, lambda_right, alpha):
    """
    The Hermite cubic `p` and its derivative as functions of `xi`.
    :return: tuple of callables `(p, dp)`.
    """
    A, B, l0 = sonic_cubic(lambda_left, lambda_star, lambda_right)

    def p(xi):
        s = xi / alpha
        return alpha * (((A * s + B) * s + l0) * s)

    def dp(xi):
        s = xi / alpha
        return (3. * A * s + 2. * B) * s + l0

    return p, dp


def sonic_minimum(lambda_left, lambda_star, lambda_right):
    """
    Minimum of the Hermite cubic over the wave, for `lambda_left < 0 <
    lambda_right`. The minimizer is the root of `p'(xi) = 0` inside the wave,
    `s* = -lambda_left / (B + sqrt(B^2 - 3 A lambda_left))`, whose
    denominator is always positive.
    :return: tuple `(s*, p(xi*) / alpha)` with `xi* = s* alpha`.
    """
    A, B, l0 = sonic_cubic(lambda_left, lambda_star, lambda_right)
    s = -l0 / (B + np.sqrt(B ** 2 - 3. * A * l0))
    return s, ((A * s + B) * s + l0) * s


def sonic_minimum_closed_form(lambda_left, lambda_star, lambda_right):
    """
    Same minimizer as `sonic_minimum`, written with
    `C = 3 lambda_star - lambda_left - lambda_right` under the radical:
    `s* = -lambda_left / (3 lambda_star - 2 lambda_left - lambda_right +
    sqrt(C^2 - lambda_left lambda_right))`.
    """
    C = 3. * lambda_star - lambda_left - lambda_right
    B = C - lambda_left
    return -lambda_left / (B + np.sqrt(C ** 2 - lambda_left * lambda_right))


def entropy_fixed_flux(Wl, Wr, gas):
    """
    Roe flux with the entropy correction on sonic waves:
    `Phi + sum_{j in S} max(p_j(xi*_j) / alpha_j,
    p_j(xi*_j) / alpha_j - lambda*_j) alpha_j r_j`.
    The correction coefficients are nonpositive, i.e., the correction adds
    numerical viscosity. Where no wave is sonic, the result is the Roe flux
    bit for bit. Pairs with an inadmissible intermediate state get the plain
    Roe flux (the number of such pairs is logged).
    :param Wl: left conserved state(s);
    :param Wr: right conserved state(s);
    :param gas: a GasModel;
    :return: the numerical flux(es).
    """
    Wl = np.asarray(Wl, dtype=float)
    Wr = np.asarray(Wr, dtype=float)
    avg, waves = _decompose(Wl, Wr, gas)
    flux = _roe_flux(physical_flux(Wl, gas), physical_flux(Wr, gas), avg,
                     waves)
    sonic = _sonic(Wl, Wr, waves, gas, strict=False)
    if sonic.n_fallbacks:
        log('Entropy fix skipped on {} pair(s) with inadmissible intermediate '
            'states'.format(sonic.n_fallbacks), print_string=False)
    mask = sonic.sonic
    if not np.any(mask):
        return flux
    l0 = np.where(mask, sonic.lambda_before, -1.)
    l1 = np.where(mask, sonic.lambda_after, 1.)
    lstar = np.where(mask, avg.lambdas, 0.)
    _, q = sonic_minimum(l0, lstar, l1)
    coefficients = np.where(mask, np.maximum(q, q - lstar), 0.)
    corrected = flux + waves.combine(coefficients)
    return np.where(np.any(mask, axis=-1)[..., None], corrected, flux)


def rotated_flux(Wl, Wr, normal, gas, entropy_fix=True):
    """
    Numerical flux through a face of a 2D mesh: both states are written in
    the frame of the unit normal `n` (pointing from left to right), the 1D
    flux is computed with the tangential momentum advected by the contact
    wave, and the result is written back in the Cartesian frame.
    :param Wl: left conserved state(s), shape `(..., 4)`;
    :param Wr: right conserved state(s), shape `(..., 4)`;
    :param normal: unit normal(s), shape `(..., 2)`;
    :param gas: a GasModel;
    :param entropy_fix: whether to use `entropy_fixed_flux` or `roe_flux`;
    :return: the numerical flux(es), shape `(..., 4)`.
    """
    flux_fn = entropy_fixed_flux if entropy_fix else roe_flux
    flux = flux_fn(rotate_to_normal(Wl, normal), rotate_to_normal(Wr, normal),
                   gas)
    return rotate_from_normal(flux, normal)
