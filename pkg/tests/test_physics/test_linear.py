import numpy as np
import pytest

from fvflow.data.profiles import SineProfile
from fvflow.physics.linear import (AcousticsModel, LinearSystem,
                                   ReflectionBoundary, RegimeNotReached,
                                   SingularEigenbasis, acoustic_boundary_fluxes,
                                   acoustic_interface_flux, acoustics_exact,
                                   advect_characteristics, advect_exact,
                                   characteristic_decompose,
                                   characteristic_reconstruct,
                                   linear_upwind_flux, matrix_abs,
                                   reflection_boundary_flux, upwind_flux_left,
                                   upwind_flux_right, upwind_flux_scalar)
from fvflow.utils.misc import random_diagonalizable

N_SAMPLES = 100
TOL = 1e-10
model = AcousticsModel(rho0=1.2, c0=340.)


def _assert_all_close(actual, expected, **kwargs):
    assert np.allclose(actual, expected, **kwargs), \
        'max difference {}'.format(np.max(np.abs(np.asarray(actual)
                                                 - np.asarray(expected))))


def test_linear_system():
    rng = np.random.default_rng(0)
    lambdas, R = random_diagonalizable(rng, dim=3)
    sys = LinearSystem(lambdas, R)
    assert sys.dim == 3
    A = R @ np.diag(lambdas) @ np.linalg.inv(R)
    _assert_all_close(sys.matrix, A)

    # From the matrix, speeds are sorted
    other = LinearSystem.from_matrix(A[::-1, ::-1])
    assert np.all(np.diff(other.lambdas) > 0)
    _assert_all_close(other.lambdas, lambdas)

    W = rng.normal(size=(N_SAMPLES, 3))
    phi = characteristic_decompose(sys, W)
    _assert_all_close(characteristic_reconstruct(sys, phi), W)
    _assert_all_close(W @ A.T, sys.flux(W))


def test_linear_system_errors():
    with pytest.raises(SingularEigenbasis):
        LinearSystem([0., 1.], [[1., 1.], [1., 1.]])
    with pytest.raises(ValueError):
        LinearSystem([0., 1.], np.eye(3))
    with pytest.raises(ValueError):
        # Rotation: complex eigenvalues
        LinearSystem.from_matrix([[0., -1.], [1., 0.]])


def test_upwind_flux_forms():
    rng = np.random.default_rng(1)
    sys = LinearSystem(*random_diagonalizable(rng, dim=3))
    Wl = rng.normal(size=(N_SAMPLES, 3))
    Wr = rng.normal(size=(N_SAMPLES, 3))
    centered = linear_upwind_flux(sys, Wl, Wr)
    _assert_all_close(upwind_flux_left(sys, Wl, Wr), centered, rtol=TOL,
                      atol=TOL)
    _assert_all_close(upwind_flux_right(sys, Wl, Wr), centered, rtol=TOL,
                      atol=TOL)
    assert np.array_equal(linear_upwind_flux(sys, Wl, Wl), sys.flux(Wl))

    # |A| has the absolute values of the speeds as eigenvalues
    eig = np.sort(np.linalg.eigvals(matrix_abs(sys)).real)
    _assert_all_close(eig, np.sort(np.abs(sys.lambdas)))


def test_upwind_flux_scalar():
    assert upwind_flux_scalar(2., 1., 3.) == 2.
    assert upwind_flux_scalar(-2., 1., 3.) == -6.


def test_advect_exact():
    def u0(x):
        return np.sin(2 * np.pi * x)

    def bc(t):
        return 10. + t

    # Inside the domain of dependence of the initial datum
    assert advect_exact(u0, bc, 1., 1., 0.75, 0.5) == pytest.approx(u0(0.25))
    # Fed by the inflow boundary
    assert advect_exact(u0, bc, 1., 1., 0.25, 0.5) == pytest.approx(10.25)
    assert advect_exact(u0, bc, -1., 1., 0.75, 0.5) == pytest.approx(10.25)
    # Characteristic foot on the corner: initial datum
    assert advect_exact(u0, bc, 1., 1., 0.5, 0.5) == pytest.approx(u0(0.))
    with pytest.raises(ValueError):
        advect_exact(u0, None, 1., 1., 0.25, 0.5)
    with pytest.raises(ValueError):
        advect_exact(u0, bc, 0., 1., 0.25, 0.5)


def test_advect_characteristics():
    sys = model.system()

    def W0(x):
        return np.stack((np.exp(-x ** 2), np.zeros_like(x)), axis=-1)

    x = np.linspace(-1., 1., 11)
    t = 1e-3
    W = advect_characteristics(sys, W0, x, t)
    # The initial pulse splits into two halves moving at -c0 and +c0
    expected_p = 0.5 * (np.exp(-(x + model.c0 * t) ** 2)
                        + np.exp(-(x - model.c0 * t) ** 2))
    _assert_all_close(W[:, 0], expected_p)


def test_acoustics_system():
    sys = model.system()
    rho0, c0 = model.rho0, model.c0
    _assert_all_close(sys.matrix, [[0., rho0 * c0 ** 2], [1. / rho0, 0.]])
    _assert_all_close(sys.lambdas, [-c0, c0])
    rng = np.random.default_rng(2)
    Wl = rng.normal(size=(N_SAMPLES, 2))
    Wr = rng.normal(size=(N_SAMPLES, 2))
    _assert_all_close(acoustic_interface_flux(model, Wl, Wr),
                      linear_upwind_flux(sys, Wl, Wr), rtol=1e-9, atol=1e-6)


def test_pressure_boundary_cross_check():
    # The pressure boundary written as a reflection law gives the same flux
    Pi = SineProfile(1e5, 10., 100.)
    rb = ReflectionBoundary.pressure(Pi, side='left')
    rng = np.random.default_rng(3)
    W_first = np.stack((1e5 + rng.normal(size=N_SAMPLES),
                        rng.normal(size=N_SAMPLES) * 1e-2), axis=-1)
    t = 0.0123
    left, _ = acoustic_boundary_fluxes(model, Pi(t), W_first, W_first,
                                       W_first)
    _assert_all_close(reflection_boundary_flux(model.system(), rb, W_first, t),
                      left, rtol=1e-9, atol=1e-6)


def test_reflection_boundary():
    sys = model.system()
    W = np.array([2., 0.01])
    # A rigid end (S = 1) reflects the outgoing wave: zero velocity flux term
    rigid = ReflectionBoundary('right', 0., [[1.]])
    flux = reflection_boundary_flux(sys, rigid, W, 0.)
    assert flux[0] == pytest.approx(0., abs=1e-9)
    # An open end (S = -1) keeps the pressure at g / 2
    open_end = ReflectionBoundary('right', 0., [[-1.]])
    flux = reflection_boundary_flux(sys, open_end, W, 0.)
    assert flux[1] == pytest.approx(0., abs=1e-9)

    with pytest.raises(ValueError):
        reflection_boundary_flux(sys, ReflectionBoundary('left', 0.,
                                                         [[1., 1.]]), W, 0.)
    with pytest.raises(ValueError):
        ReflectionBoundary('top', 0., [[1.]])


def test_acoustics_exact():
    L = 1.

    def p0(x):
        return 1e5

    def u0(x):
        return 0.

    Pi = SineProfile(1e5, 10., 1000.)
    x = np.linspace(0., L, 5)
    t = 2 * L / model.c0
    p, u = acoustics_exact(model, p0, u0, Pi, L, x, t)
    _assert_all_close(p, Pi(t - x / model.c0))
    _assert_all_close(u, (p - 1e5) / model.impedance)
    with pytest.raises(RegimeNotReached):
        acoustics_exact(model, p0, u0, Pi, L, x, 0.5 * L / model.c0)
