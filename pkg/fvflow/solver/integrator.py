import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from fvflow.ops.scatter import scatter_sum

# A step is stretched onto a target time when it falls short of it by less
# than LANDING_TOL * max(1, |target|)
LANDING_TOL = 1e-9


class DynamicState:
    """
    The cell values of a problem at a given time.

    **Arguments**

    - `values`: np.array of shape `(n_cells, n_components)`;
    - `time`: the current time;
    - `boundary_flux`: time-integrated net outward flux through the boundary
    over the last step, shape `(n_components, )`;
    - `steps`: number of steps taken so far;
    """
    def __init__(self, values, time=0., boundary_flux=None, steps=0):
        self.values = np.asarray(values, dtype=float)
        self.time = float(time)
        if boundary_flux is None:
            boundary_flux = np.zeros(self.values.shape[-1])
        self.boundary_flux = boundary_flux
        self.steps = steps

    def total(self, volumes):
        """
        :param volumes: cell volumes;
        :return: the integral of the values over the domain.
        """
        return np.sum(volumes[:, None] * self.values, axis=0)

    def __repr__(self):
        return 'DynamicState(time={}, steps={})'.format(self.time, self.steps)


class Residual:
    """
    Result of the spatial discretization: `dW/dt` in every cell and the net
    outward flux through the boundary of the domain.

    **Arguments**

    - `values`: np.array of shape `(n_cells, n_components)`;
    - `boundary_flux`: np.array of shape `(n_components, )`;
    """
    def __init__(self, values, boundary_flux):
        self.values = values
        self.boundary_flux = boundary_flux

    def __repr__(self):
        return 'Residual(n_cells={})'.format(self.values.shape[0])


def assemble_rhs(state, problem, t, threads=1):
    """
    Computes `dW/dt = (sum_f |f| Phi_in - sum_f |f| Phi_out) / |K|` for all
    cells. Face states are reconstructed from the whole state first, then
    face fluxes are computed in `threads` contiguous blocks of faces.
    :param state: a DynamicState (or an array of cell values);
    :param problem: a Problem;
    :param t: time at which boundary data is sampled;
    :param threads: number of threads for the face fluxes;
    :return: a Residual.
    """
    values = state.values if isinstance(state, DynamicState) else state
    faces = problem.reconstruct(values)
    index = np.arange(problem.n_faces)
    if threads > 1:
        blocks = np.array_split(index, threads)
        fluxes = Parallel(n_jobs=threads, prefer='threads')(
            delayed(problem.face_flux)(faces, block, t) for block in blocks)
        flux = np.concatenate(fluxes)
    else:
        flux = problem.face_flux(faces, index, t)
    flux = problem.face_lengths[:, None] * flux

    n = problem.n_cells
    rhs = scatter_sum(flux, problem.face_right, n) \
        - scatter_sum(flux, problem.face_left, n)
    rhs /= problem.volumes[:, None]

    outgoing = problem.face_right < 0
    incoming = problem.face_left < 0
    boundary_flux = np.sum(flux[outgoing], axis=0) \
        - np.sum(flux[incoming], axis=0)
    return Residual(rhs, boundary_flux)


def euler_step(state, dt, problem, threads=1):
    """
    Forward Euler step, with boundary data sampled at `t + dt / 2`.
    :param state: a DynamicState;
    :param dt: time step;
    :param problem: a Problem;
    :param threads: number of threads for the face fluxes;
    :return: the new DynamicState.
    """
    res = assemble_rhs(state, problem, state.time + 0.5 * dt, threads)
    values = state.values + dt * res.values
    problem.check(values, state.time + dt)
    return DynamicState(values, state.time + dt, dt * res.boundary_flux,
                        state.steps + 1)


def heun_step(state, dt, problem, threads=1):
    """
    Heun step, `W^{n+1} = (W^n + W~~) / 2` with two Euler substeps. Boundary
    data is sampled at `t + dt / 4` in the first substep and `t + 3 dt / 4`
    in the second one.
    :param state: a DynamicState;
    :param dt: time step;
    :param problem: a Problem;
    :param threads: number of threads for the face fluxes;
    :return: the new DynamicState.
    """
    t = state.time
    res_1 = assemble_rhs(state, problem, t + 0.25 * dt, threads)
    predicted = state.values + dt * res_1.values
    problem.check(predicted, t + dt)
    res_2 = assemble_rhs(predicted, problem, t + 0.75 * dt, threads)
    values = 0.5 * (state.values + predicted + dt * res_2.values)
    problem.check(values, t + dt)
    boundary_flux = 0.5 * dt * (res_1.boundary_flux + res_2.boundary_flux)
    return DynamicState(values, t + dt, boundary_flux, state.steps + 1)


STEPPERS = {
    'euler': euler_step,
    'heun': heun_step,
}


def deserialize_stepper(scheme):
    if isinstance(scheme, str) and scheme in STEPPERS:
        return STEPPERS[scheme]
    elif callable(scheme):
        return scheme
    else:
        raise ValueError('scheme must be callable or str in: {}.'
                         .format(list(STEPPERS.keys())))


def stable_dt(state, problem, cfl):
    """
    Largest time step allowed by the CFL condition of the problem.
    :param state: a DynamicState;
    :param problem: a Problem;
    :param cfl: CFL number;
    :return: float, possibly `np.inf` when no wave moves.
    """
    return float(problem.max_dt(state.values, cfl))


def integrate(problem, state, t_end, cfl, scheme='euler', fixed_dt=None,
              snapshots=(), callback=None, threads=1, progress=False):
    """
    Advances a state to `t_end`. The last step before each snapshot time (and
    before `t_end`) is shortened so that the time lands exactly on it.
    :param problem: a Problem;
    :param state: the initial DynamicState;
    :param t_end: final time;
    :param cfl: CFL number, used when `fixed_dt` is None;
    :param scheme: 'euler', 'heun' or a step function;
    :param fixed_dt: constant time step, overrides the CFL condition;
    :param snapshots: times at which the state is recorded;
    :param callback: callable `callback(state)` called after every step;
    :param threads: number of threads for the face fluxes;
    :param progress: whether to show a progress bar;
    :return: tuple `(final_state, recorded_states)`, where `recorded_states`
    holds one DynamicState per snapshot time (t_end included).
    """
    step = deserialize_stepper(scheme)
    targets = sorted({float(s) for s in snapshots
                      if state.time < s <= t_end} | {float(t_end)})
    recorded = []
    with tqdm(total=t_end - state.time, ncols=80, disable=not progress) as bar:
        for target in targets:
            while state.time < target:
                remaining = target - state.time
                dt = fixed_dt if fixed_dt is not None \
                    else stable_dt(state, problem, cfl)
                if not dt > 0:
                    raise ValueError('Invalid time step {} at t={}'
                                     .format(dt, state.time))
                landing = remaining - dt <= LANDING_TOL * max(1., abs(target))
                if landing:
                    dt = remaining
                previous = state.time
                state = step(state, dt, problem, threads)
                if landing:
                    state.time = target
                bar.update(state.time - previous)
                if callback is not None:
                    callback(state)
            recorded.append(state)
    return state, recorded
