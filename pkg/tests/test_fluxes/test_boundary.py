import numpy as np
import pytest

from fvflow.fluxes.boundary import (PressureBoundarySpec, nonreflecting_flux,
                                    pressure_boundary_flux,
                                    pressure_boundary_flux_2d,
                                    pressure_boundary_state, wall_flux)
from fvflow.fluxes.roe import roe_average, wave_strengths
from fvflow.physics.gas import (GasModel, conserved_from_primitive,
                                physical_flux, pressure)
from fvflow.utils.misc import random_normals, random_states

gas = GasModel(1.4)
N_SAMPLES = 200


def _assert_all_close(actual, expected, **kwargs):
    assert np.allclose(actual, expected, **kwargs), \
        'max difference {}'.format(np.max(np.abs(np.asarray(actual)
                                                 - np.asarray(expected))))


def _mirror(W):
    W = np.array(W)
    W[..., 1] *= -1.
    return W


def test_pressure_boundary_state():
    rng = np.random.default_rng(0)
    Wr = random_states(rng, N_SAMPLES, gas)
    Pi = rng.uniform(0.1, 10., size=N_SAMPLES)
    Wl = pressure_boundary_state(Pi, Wr, gas)
    _assert_all_close(pressure(Wl, gas), Pi)

    # Only the ingoing acoustic wave connects the two states
    alphas = wave_strengths(Wl, Wr, roe_average(Wl, Wr, gas), gas).alphas
    _assert_all_close(alphas[:, :2] / (1. + np.abs(alphas[:, 2:])), 0.,
                      atol=1e-10)

    # Matching pressure gives the interior state back, exactly
    assert np.array_equal(pressure_boundary_state(pressure(Wr, gas), Wr, gas),
                          Wr)


def test_pressure_boundary_state_right():
    rng = np.random.default_rng(1)
    Wl = random_states(rng, N_SAMPLES, gas)
    Pi = rng.uniform(0.1, 10., size=N_SAMPLES)
    Wb = pressure_boundary_state(Pi, Wl, gas, side='right')
    _assert_all_close(Wb, _mirror(pressure_boundary_state(Pi, _mirror(Wl),
                                                          gas)))
    _assert_all_close(pressure(Wb, gas), Pi)
    # The outgoing wave is now the first one
    alphas = wave_strengths(Wl, Wb, roe_average(Wl, Wb, gas), gas).alphas
    _assert_all_close(alphas[:, 1:] / (1. + np.abs(alphas[:, :1])), 0.,
                      atol=1e-10)


def test_pressure_boundary_velocity_jump():
    rng = np.random.default_rng(2)
    Wr = random_states(rng, N_SAMPLES, gas, dim=2)
    Pi = rng.uniform(0.1, 10., size=N_SAMPLES)
    Wl = pressure_boundary_state(Pi, Wr, gas)
    avg = roe_average(Wl, Wr, gas)
    # Across the ingoing wave, pr - Pi = rho* c* (ur - ul)
    du = Wr[:, 1] / Wr[:, 0] - Wl[:, 1] / Wl[:, 0]
    _assert_all_close(avg.rho * avg.c * du, pressure(Wr, gas) - Pi,
                      rtol=1e-10, atol=1e-10)
    _assert_all_close(Wl[:, 2] / Wl[:, 0], Wr[:, 2] / Wr[:, 0])
    alphas = wave_strengths(Wl, Wr, avg, gas).alphas
    _assert_all_close(alphas[:, :3] / (1. + np.abs(alphas[:, 3:])), 0.,
                      atol=1e-10)


def test_pressure_boundary_flux():
    # Gas at rest with the matching pressure: only the pressure acts
    W = conserved_from_primitive(np.array([1.3, 0., 2.]), gas)
    for side in ('left', 'right'):
        boundary = PressureBoundarySpec(lambda t: 2., side=side)
        _assert_all_close(boundary.flux(W, 0., gas), [0., 2., 0.])
    boundary = PressureBoundarySpec(3., side='left')
    assert boundary.flux(W, 0., gas)[0] > 0.
    boundary = PressureBoundarySpec(3., side='right')
    assert boundary.flux(W, 0., gas)[0] < 0.


def test_pressure_boundary_settings():
    with pytest.raises(ValueError):
        PressureBoundarySpec(1., side='top')
    boundary = PressureBoundarySpec(lambda t: 1. - t)
    assert boundary.pressure(0.5) == 0.5
    with pytest.raises(ValueError):
        boundary.pressure(1.)

    # Constants and profile tokens
    assert PressureBoundarySpec(2).pressure(0.3) == 2.
    boundary = PressureBoundarySpec('sine:2,1,1', side='right')
    assert boundary.pressure(0.25) == pytest.approx(3.)
    with pytest.raises(ValueError):
        PressureBoundarySpec([1., 2.])


def test_pressure_boundary_flux_2d():
    # A left end seen as a face with outward normal (-1, 0)
    rng = np.random.default_rng(2)
    W = random_states(rng, N_SAMPLES, gas)
    Pi = rng.uniform(0.1, 10., size=N_SAMPLES)
    boundary = PressureBoundarySpec(lambda t: Pi)
    expected = pressure_boundary_flux(boundary, W, 0., gas)
    W_2d = np.insert(W, 2, 0., axis=-1)
    normal = np.tile([-1., 0.], (N_SAMPLES, 1))
    flux = pressure_boundary_flux_2d(boundary, W_2d, normal, 0., gas)
    _assert_all_close(flux[:, [0, 1, 3]], -expected, rtol=1e-10, atol=1e-10)
    _assert_all_close(flux[:, 2], 0.)


def test_nonreflecting_flux():
    rng = np.random.default_rng(3)
    W = random_states(rng, N_SAMPLES, gas)
    assert np.array_equal(nonreflecting_flux(W, gas), physical_flux(W, gas))
    W = random_states(rng, N_SAMPLES, gas, dim=2)
    n = random_normals(rng, N_SAMPLES)
    assert np.array_equal(nonreflecting_flux(W, gas, normal=n),
                          physical_flux(W, gas, normal=n))


def test_wall_flux():
    rng = np.random.default_rng(4)
    W = random_states(rng, N_SAMPLES, gas, dim=2)
    n = random_normals(rng, N_SAMPLES)
    flux = wall_flux(W, n, gas)
    p = pressure(W, gas)
    assert np.all(flux[:, [0, 3]] == 0.)
    _assert_all_close(flux[:, 1:3], p[:, None] * n)
