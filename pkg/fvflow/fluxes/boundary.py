import numpy as np

from fvflow.data.profiles import deserialize_profile
from fvflow.fluxes.roe import entropy_fixed_flux
from fvflow.physics.gas import (check_admissible, conserved_from_primitive,
                                physical_flux, rotate_from_normal,
                                rotate_to_normal)


class PressureBoundarySpec:
    """
    A pressure imposed on one end of a pipe. The boundary state is the one
    that is connected to the adjacent cell by the ingoing acoustic wave only.

    **Arguments**

    - `Pi`: the imposed pressure (must be positive), as a callable `Pi(t)`,
    a constant or a profile token such as `sine:1,0.1,2`;
    - `side`: 'left' or 'right', the end of the domain where it is imposed;
    """
    def __init__(self, Pi, side='left'):
        if side not in ('left', 'right'):
            raise ValueError('side must be "left" or "right", got {}'
                             .format(side))
        self.Pi = deserialize_profile(Pi)
        self.side = side

    def pressure(self, t):
        value = np.asarray(self.Pi(t), dtype=float)
        if np.any(~(value > 0)):
            raise ValueError('Imposed pressure must be positive, got {} at '
                             't={}'.format(value, t))
        return value

    def flux(self, W_adjacent, t_half, gas):
        return pressure_boundary_flux(self, W_adjacent, t_half, gas)

    def flux_2d(self, W_adjacent, normal, t_half, gas):
        return pressure_boundary_flux_2d(self, W_adjacent, normal, t_half, gas)

    def __repr__(self):
        return 'PressureBoundarySpec(side={})'.format(self.side)


def _mirror(W):
    W = np.array(W, dtype=float)
    W[..., 1] = -W[..., 1]
    return W


def pressure_boundary_state(Pi, Wr, gas, side='left'):
    """
    Boundary state with pressure `Pi` connected to the interior state by a
    single ingoing acoustic wave (a pure 3-wave of the Roe decomposition on
    the left end):

    - `rho_l = rho_r ((g + 1) Pi + (g - 1) pr) / ((g - 1) Pi + (g + 1) pr)`;
    - `u_l = u_r + (Pi - pr) sqrt(2 / (rho_r ((g + 1) Pi + (g - 1) pr)))`;
    - `p_l = Pi`.

    On the right end, velocities are mirrored before and after the
    construction. For 2D states in a normal frame, the tangential velocity is
    carried over unchanged.
    :param Pi: imposed pressure(s);
    :param Wr: conserved state(s) of the adjacent cell;
    :param gas: a GasModel;
    :param side: 'left' or 'right';
    :return: the boundary conserved state(s).
    """
    if side == 'right':
        return _mirror(pressure_boundary_state(Pi, _mirror(Wr), gas))
    Wr = np.asarray(Wr, dtype=float)
    Pi = np.asarray(Pi, dtype=float)
    pr = check_admissible(Wr, gas)
    rho_r = Wr[..., 0]
    velocity = Wr[..., 1:-1] / rho_r[..., None]
    g = gas.gamma
    compression = (g + 1.) * Pi + (g - 1.) * pr
    rho_l = rho_r * compression / ((g - 1.) * Pi + (g + 1.) * pr)
    # Hugoniot jump of the 3-wave: rho* c* = sqrt(rho_r compression / 2)
    u_l = velocity[..., 0] + (Pi - pr) * np.sqrt(2. / (rho_r * compression))
    tangential = np.moveaxis(velocity[..., 1:], -1, 0)
    fields = np.broadcast_arrays(rho_l, u_l, *tangential, Pi)
    Wl = conserved_from_primitive(np.stack(fields, axis=-1), gas)
    # The construction is the identity when the pressure already matches
    return np.where((Pi == pr)[..., None], Wr, Wl)


def pressure_boundary_flux(boundary, W_adjacent, t_half, gas):
    """
    Flux through a boundary with imposed pressure: the entropy-corrected Roe
    flux between the pressure boundary state and the adjacent cell.
    :param boundary: a PressureBoundarySpec;
    :param W_adjacent: conserved state of the cell next to the boundary;
    :param t_half: time at which the pressure is sampled (middle of the step);
    :param gas: a GasModel;
    :return: the boundary flux.
    """
    W_adjacent = np.asarray(W_adjacent, dtype=float)
    W_b = pressure_boundary_state(boundary.pressure(t_half), W_adjacent, gas,
                                  side=boundary.side)
    if boundary.side == 'left':
        return entropy_fixed_flux(W_b, W_adjacent, gas)
    return entropy_fixed_flux(W_adjacent, W_b, gas)


def pressure_boundary_flux_2d(boundary, W_adjacent, normal, t_half, gas):
    """
    Imposed pressure on faces of a 2D mesh. The state is written in the frame
    of the outward normal, where the interior lies on the left, and the right
    end construction of `pressure_boundary_state` is used.
    :param boundary: a PressureBoundarySpec (its side is ignored);
    :param W_adjacent: conserved state(s) on the interior side, shape
    `(..., 4)`;
    :param normal: outward unit normal(s), shape `(..., 2)`;
    :param t_half: time at which the pressure is sampled;
    :param gas: a GasModel;
    :return: the boundary flux(es) in the Cartesian frame.
    """
    W_n = rotate_to_normal(W_adjacent, normal)
    W_b = pressure_boundary_state(boundary.pressure(t_half), W_n, gas,
                                  side='right')
    return rotate_from_normal(entropy_fixed_flux(W_n, W_b, gas), normal)


def nonreflecting_flux(W_adjacent, gas, normal=None):
    """
    Free output: the physical flux of the adjacent state, which is also the
    Roe flux between that state and itself.
    :param W_adjacent: conserved state(s) of the cell(s) next to the boundary;
    :param gas: a GasModel;
    :param normal: outward unit normal(s), for 2D states;
    :return: the boundary flux(es).
    """
    return physical_flux(W_adjacent, gas, normal=normal)


def wall_flux(W_face, normal, gas):
    """
    Flux through a rigid wall, where only the pressure acts:
    `(0, p n_x, p n_y, 0)`.
    :param W_face: conserved state(s) on the interior side of the wall;
    :param normal: outward unit normal(s);
    :param gas: a GasModel;
    :return: the wall flux(es), shape `(..., 4)`.
    """
    p = check_admissible(W_face, gas)
    n = np.asarray(normal, dtype=float)
    momentum = p[..., None] * n
    zero = np.zeros(momentum.shape[:-1])
    return np.concatenate((zero[..., None], momentum, zero[..., None]),
                          axis=-1)
