"""
Randomized verification of the numerical building blocks. Each property
draws its samples from its own seeded generator and returns the largest
residual found, which is compared to a tolerance.
"""
import numpy as np
import pandas as pd
from tqdm import tqdm

from fvflow.data.mesh import build_mesh, rectangle_mesh_text
from fvflow.data.profiles import ConstantProfile, InitialCondition, SineProfile
from fvflow.fluxes.boundary import pressure_boundary_state
from fvflow.fluxes.roe import (entropy_fixed_flux, hermite_cubic, roe_average,
                               roe_flux, roe_flux_centered, roe_flux_left,
                               roe_flux_right, roe_matrix, sonic_cubic,
                               sonic_indices, sonic_minimum,
                               sonic_minimum_closed_form,
                               wave_strengths)
from fvflow.physics.gas import (GasModel, eigenstructure,
                                jacobian_from_velocity, physical_flux,
                                pressure, primitive_from_conserved,
                                sound_speed, total_enthalpy)
from fvflow.physics.linear import (AcousticsModel, LinearSystem,
                                   linear_upwind_flux, upwind_flux_left,
                                   upwind_flux_right)
from fvflow.reconstruction.limiters import LIMITERS, Limiter, limiter_value
from fvflow.solver.integrator import DynamicState, integrate, stable_dt
from fvflow.solver.problems import (AcousticsProblem, AdvectionProblem,
                                    Euler1DProblem, Euler2DProblem)
from fvflow.utils.logging import log
from fvflow.utils.misc import random_diagonalizable, random_states

GAMMA = 1.4
CONSERVATION_STEPS = 20
SONIC_GRID = 2001


def _inf(x):
    return np.max(np.abs(x), axis=-1)


def _flux_scale(Wl, Wr, gas):
    return np.maximum(1., np.maximum(_inf(physical_flux(Wl, gas)),
                                     _inf(physical_flux(Wr, gas))))


def _pairs(rng, samples, gas):
    return random_states(rng, samples, gas), random_states(rng, samples, gas)


def check_roe_property(rng, samples):
    """
    `F(Wr) - F(Wl) = A* (Wr - Wl)` with the Roe matrix `A*`.
    """
    gas = GasModel(GAMMA)
    Wl, Wr = _pairs(rng, samples, gas)
    A = roe_matrix(Wl, Wr, gas)
    jump = physical_flux(Wr, gas) - physical_flux(Wl, gas)
    residual = jump - np.einsum('nij,nj->ni', A, Wr - Wl)
    return np.max(_inf(residual) / _flux_scale(Wl, Wr, gas)), 1e-11


def check_roe_flux_forms(rng, samples):
    """
    The left, right and centered forms of the Roe flux, and its case
    formula, agree.
    """
    gas = GasModel(GAMMA)
    Wl, Wr = _pairs(rng, samples, gas)
    centered = roe_flux_centered(Wl, Wr, gas)
    residual = np.zeros(samples)
    for fn in (roe_flux_left, roe_flux_right, roe_flux):
        residual = np.maximum(residual, _inf(fn(Wl, Wr, gas) - centered))
    return np.max(residual / _flux_scale(Wl, Wr, gas)), 1e-12


def check_linear_flux_forms(rng, samples):
    """
    Same as `check_roe_flux_forms` for random diagonalizable 3x3 systems.
    """
    residual = 0.
    for _ in range(max(1, samples // 100)):
        sys = LinearSystem(*random_diagonalizable(rng, dim=3))
        Wl = rng.normal(size=(100, 3))
        Wr = rng.normal(size=(100, 3))
        centered = linear_upwind_flux(sys, Wl, Wr)
        scale = np.maximum(1., np.maximum(_inf(sys.flux(Wl)),
                                          _inf(sys.flux(Wr))))
        for fn in (upwind_flux_left, upwind_flux_right):
            residual = max(residual, np.max(_inf(fn(sys, Wl, Wr) - centered)
                                            / scale))
    return residual, 1e-12


def check_consistency(rng, samples):
    """
    `Phi(W, W) = F(W)` for the Roe, entropy-corrected and linear upwind
    fluxes.
    """
    gas = GasModel(GAMMA)
    W = random_states(rng, samples, gas)
    F = physical_flux(W, gas)
    scale = np.maximum(1., _inf(F))
    residual = max(np.max(_inf(roe_flux(W, W, gas) - F) / scale),
                   np.max(_inf(entropy_fixed_flux(W, W, gas) - F) / scale))
    sys = LinearSystem(*random_diagonalizable(rng, dim=3))
    V = rng.normal(size=(samples, 3))
    residual = max(residual, np.max(np.abs(linear_upwind_flux(sys, V, V)
                                           - sys.flux(V))))
    return residual, 1e-14


def check_entropy_fix(rng, samples):
    """
    Without sonic waves the corrected flux is the Roe flux bit for bit; with
    sonic waves the correction coefficients are nonpositive.
    """
    gas = GasModel(GAMMA)
    Wl, Wr = _pairs(rng, samples, gas)
    sonic = sonic_indices(Wl, Wr, gas, strict=False)
    plain = ~np.any(sonic.sonic, axis=-1) & sonic.admissible
    residual = 0.
    if np.any(plain):
        difference = entropy_fixed_flux(Wl[plain], Wr[plain], gas) \
            - roe_flux(Wl[plain], Wr[plain], gas)
        residual = float(np.max(np.abs(difference)))
    mask = sonic.sonic
    if np.any(mask):
        lstar = roe_average(Wl, Wr, gas).lambdas[mask]
        _, q = sonic_minimum(sonic.lambda_before[mask], lstar,
                             sonic.lambda_after[mask])
        coefficients = np.maximum(q, q - lstar)
        residual = max(residual, float(np.max(np.maximum(coefficients, 0.))))
    return residual, 0.


def check_sonic_cubic(rng, samples):
    """
    Hermite conditions of the entropy correction cubic, agreement of the two
    expressions of its minimizer, and comparison with the minimum of the
    cubic sampled on a regular grid of the wave.
    """
    l0 = rng.uniform(-2., -0.1, size=samples)
    l1 = rng.uniform(0.1, 2., size=samples)
    lstar = rng.uniform(-2., 2., size=samples)
    alpha = rng.choice([-1., 1.], size=samples) * rng.uniform(0.1, 2.,
                                                              size=samples)
    p, dp = hermite_cubic(l0, lstar, l1, alpha)
    zero = np.zeros(samples)
    residual = np.max(np.abs(np.stack((p(zero), p(alpha) - lstar * alpha,
                                       dp(zero) - l0, dp(alpha) - l1))))
    s, q = sonic_minimum(l0, lstar, l1)
    s_closed = sonic_minimum_closed_form(l0, lstar, l1)
    residual = max(residual, np.max(np.abs(s - s_closed)),
                   np.max(np.abs(dp(s * alpha))))

    # The sampled minimum lies within one grid step of s*, and above q
    grid = np.linspace(0., 1., SONIC_GRID)
    A, B, _ = sonic_cubic(l0, lstar, l1)
    sampled = ((A[:, None] * grid + B[:, None]) * grid + l0[:, None]) * grid
    nearest = grid[np.argmin(sampled, axis=-1)]
    residual = max(residual,
                   np.max(np.maximum(np.abs(s - nearest) - grid[1], 0.)),
                   np.max(np.maximum(q - np.min(sampled, axis=-1), 0.)))
    return residual, 1e-12


def check_eigenstructure(rng, samples):
    """
    `A r_j = lambda_j r_j` for the 1D flux Jacobian.
    """
    gas = GasModel(GAMMA)
    W = random_states(rng, samples, gas)
    P = primitive_from_conserved(W, gas)
    u, c, H = P[:, 1], sound_speed(P, gas), total_enthalpy(W, gas)
    A = jacobian_from_velocity(u, H, gas)
    es = eigenstructure(u, c, H)
    R = es.right_vectors
    residual = A @ R - R * es.lambdas[:, None, :]
    scale = np.maximum(1., np.max(np.abs(A), axis=(1, 2))
                       * np.max(np.abs(R), axis=(1, 2)))
    return np.max(np.max(np.abs(residual), axis=(1, 2)) / scale), 1e-12


def check_limiters(rng, samples):
    """
    For every limited kind and random strengths `k`: `phi(r) = 0` for
    `r <= 0`, `phi(1) = 1`, `phi(r) = r phi(1/r)` and `0 <= phi(r) <= 2 min(1,
    r)`.
    """
    r = np.concatenate((rng.uniform(-5., 5., size=samples), [0., 1.]))
    limiters = [Limiter(kind) for kind, k in LIMITERS.items() if k is not None]
    limiters += [Limiter('sts', k=k) for k in rng.uniform(0.5, 1., size=3)]
    residual = 0.
    for lim in limiters:
        phi = limiter_value(lim, r)
        positive = r > 0
        rp = r[positive]
        bound = 2. * np.minimum(1., np.maximum(r, 0.))
        residual = max(
            residual,
            np.max(np.abs(phi[~positive])),
            abs(float(limiter_value(lim, 1.)) - 1.),
            np.max(np.abs(phi[positive] - rp * limiter_value(lim, 1. / rp))),
            np.max(np.maximum(-phi, 0.)),
            np.max(np.maximum(phi - bound, 0.)))
    return residual, 1e-14


def check_pressure_boundary(rng, samples):
    """
    The pressure boundary state has the imposed pressure and is connected to
    the interior by the ingoing acoustic wave only; it is the interior state
    when the pressures match.
    """
    gas = GasModel(GAMMA)
    Wr = random_states(rng, samples, gas)
    Pi = rng.uniform(0.1, 10., size=samples)
    Wl = pressure_boundary_state(Pi, Wr, gas)
    residual = np.max(np.abs(pressure(Wl, gas) - Pi) / Pi)
    same = pressure_boundary_state(pressure(Wr, gas), Wr, gas)
    residual = max(residual, np.max(np.abs(same - Wr)))
    return residual, 1e-12


def check_pressure_waves(rng, samples):
    """
    Strengths of the outgoing and entropy waves between the pressure boundary
    state and the interior, relative to the ingoing one.
    """
    gas = GasModel(GAMMA)
    Wr = random_states(rng, samples, gas)
    Pi = rng.uniform(0.1, 10., size=samples)
    Wl = pressure_boundary_state(Pi, Wr, gas)
    alphas = wave_strengths(Wl, Wr, roe_average(Wl, Wr, gas), gas).alphas
    residual = np.max(np.abs(alphas[:, :2]), axis=-1) \
        / (np.abs(alphas[:, 2]) + 1.)
    return np.max(residual), 1e-10


def _conservation_problems():
    gas = GasModel(GAMMA)
    line = dict(length=1., cells=50, order=2, limiter=Limiter('sts'))
    euler = Euler1DProblem(
        gas, InitialCondition('euler1d', 'step', [0.5, 1., 0., 1., 0.125, 0.,
                                                  0.1]),
        bc=('pressure', 'nonreflecting'),
        profiles=(SineProfile(1., 0.1, 2.), None), **line)
    acoustics = AcousticsProblem(
        AcousticsModel(1., 1.),
        InitialCondition('acoustics', 'sine', [0., 0.1, 1.]),
        bc=('pressure', 'reflection'),
        profiles=(SineProfile(0., 0.05, 1.), ConstantProfile(0.)),
        reflections=(0., 0.5), **line)
    advection = AdvectionProblem(
        1., InitialCondition('advection', 'sine', [1., 0.5, 1.]),
        inflow=SineProfile(1., 0.5, -1.), **line)
    mesh = build_mesh(rectangle_mesh_text(
        8, 6, markers={'left': 'inflow', 'right': 'outflow'}, jitter=0.1,
        seed=1))
    channel = Euler2DProblem(
        mesh, gas,
        InitialCondition('euler2d', 'step',
                         [0.5, 1., 0.2, 0., 1., 0.5, 0., 0.1, 0.4]),
        order=2, k=0.75, inflow=SineProfile(1., 0.1, 2.))
    return euler, acoustics, advection, channel


def check_conservation(rng, samples):
    """
    Per step global balance `sum |K| dW + dt sum_boundary |f| Phi = 0`.
    """
    residual = 0.
    for problem in _conservation_problems():
        state = DynamicState(problem.initial_values())
        totals = [state.total(problem.volumes)]
        balances = []

        def record(new):
            after = new.total(problem.volumes)
            scale = max(1., np.max(np.abs(totals[-1])))
            balances.append(np.max(np.abs(after - totals[-1]
                                          + new.boundary_flux)) / scale)
            totals.append(after)

        dt = stable_dt(state, problem, 0.4)
        integrate(problem, state, CONSERVATION_STEPS * dt, cfl=None,
                  scheme='heun', fixed_dt=dt, callback=record)
        residual = max(residual, max(balances))
    return residual, 1e-12


CHECKS = {
    'roe_property': check_roe_property,
    'roe_flux_forms': check_roe_flux_forms,
    'linear_flux_forms': check_linear_flux_forms,
    'consistency': check_consistency,
    'entropy_fix': check_entropy_fix,
    'sonic_cubic': check_sonic_cubic,
    'eigenstructure': check_eigenstructure,
    'limiters': check_limiters,
    'pressure_boundary': check_pressure_boundary,
    'pressure_waves': check_pressure_waves,
    'conservation': check_conservation,
}


def run_checks(seed=0, samples=1000, verbose=True):
    """
    Runs the whole property suite. The same seed gives the same report.
    :param seed: seed of the random generators;
    :param samples: number of random samples per property;
    :param verbose: whether to print the report;
    :return: pd.DataFrame with columns `property, residual, tolerance,
    passed`.
    """
    rows = []
    for i, (name, fn) in enumerate(tqdm(CHECKS.items(), ncols=80,
                                        disable=not verbose)):
        rng = np.random.default_rng([seed, i])
        residual, tolerance = fn(rng, samples)
        rows.append({'property': name, 'residual': float(residual),
                     'tolerance': tolerance,
                     'passed': bool(residual <= tolerance)})
    report = pd.DataFrame(rows, columns=['property', 'residual', 'tolerance',
                                         'passed'])
    log(report, print_string=verbose)
    return report
