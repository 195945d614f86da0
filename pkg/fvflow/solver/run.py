import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from fvflow.data.config import ConfigError
from fvflow.solver.integrator import DynamicState, integrate
from fvflow.solver.problems import build_problem
from fvflow.utils.io import dump_csv, snapshot_filename
from fvflow.utils.logging import log, tic, toc


class Snapshot:
    """
    The primitive fields of a run at a given time, one row per cell in cell
    order.

    **Arguments**

    - `time`: snapshot time;
    - `frame`: pd.DataFrame with the cell-center coordinates (`x`, or `x, y`)
    followed by the primitive fields;
    """
    def __init__(self, time, frame):
        self.time = time
        self.frame = frame

    @property
    def n_cells(self):
        return self.frame.shape[0]

    def filename(self, prefix):
        return snapshot_filename(prefix, self.time)

    def write(self, prefix):
        filename = self.filename(prefix)
        dump_csv(self.frame, filename, index=False)
        return filename

    def __repr__(self):
        return 'Snapshot(time={}, n_cells={})'.format(self.time, self.n_cells)


def simulate(config, cells=None, callback=None, verbose=False):
    """
    Builds the problem described by a configuration and integrates it up to
    `t_end`.
    :param config: a SolverConfig;
    :param cells: overrides the number of cells (1D only);
    :param callback: callable `callback(problem, state)` called after every
    step;
    :param verbose: whether to show a progress bar;
    :return: tuple `(problem, final_state, recorded_states)`.
    """
    problem = build_problem(config, cells=cells)
    state = DynamicState(problem.initial_values())
    problem.check(state.values, state.time)
    step_callback = None
    if callback is not None:
        def step_callback(s):
            callback(problem, s)
    final, recorded = integrate(problem, state, config.t_end, config.cfl,
                                scheme=config.time, fixed_dt=config.fixed_dt,
                                snapshots=config.snapshots,
                                callback=step_callback,
                                threads=config.threads, progress=verbose)
    return problem, final, recorded


def run(config, verbose=True):
    """
    Runs a simulation and writes one csv file per snapshot time, named
    `<output>_t<time>.csv` (nothing is written if `config.output` is empty).
    :param config: a SolverConfig;
    :param verbose: whether to print progress information;
    :return: list of Snapshot.
    """
    tic('Running {}'.format(config), print_string=verbose)
    problem, final, recorded = simulate(config, verbose=verbose)
    snapshots = [Snapshot(s.time, problem.frame(s.values)) for s in recorded]
    if config.output:
        for snapshot in snapshots:
            filename = snapshot.write(config.output)
            log('Wrote {}'.format(filename), print_string=verbose)
    toc('Reached t={} in {} steps'.format(final.time, final.steps),
        print_string=verbose)
    return snapshots


def l1_error(config, cells):
    """
    L1 error of the first field at `t_end` against the exact solution,
    `sum_K |K| |w_K - w(x_K, t_end)|`.
    :param config: a SolverConfig;
    :param cells: number of cells;
    :return: float.
    """
    problem, final, _ = simulate(config.copy(snapshots=[config.t_end]),
                                 cells=cells)
    exact = problem.exact(final.time)
    if exact is None:
        raise ConfigError('No exact solution is known for this {} setup'
                          .format(config.problem))
    return float(np.sum(problem.volumes * np.abs(final.values[:, 0]
                                                 - exact[:, 0])))


def convergence(config, grids, n_jobs=1, verbose=True):
    """
    Measures the L1 error on a sequence of grids, with the observed order
    `log(e_{i-1} / e_i) / log(J_i / J_{i-1})` between consecutive grids.
    Writes `<output>_convergence.csv` unless `config.output` is empty.
    :param config: a SolverConfig with an exact solution (advection, or
    acoustics with a pressure inlet and a free output, for `t_end >= L / c0`);
    :param grids: list of numbers of cells, in increasing order;
    :param n_jobs: number of parallel jobs (one grid per job);
    :param verbose: whether to print progress information;
    :return: pd.DataFrame with columns `J, dx, l1_error, order`.
    """
    if config.is_2d:
        raise ConfigError('Convergence studies need a 1D problem')
    grids = [int(J) for J in grids]
    if len(grids) < 2 or any(b <= a for a, b in zip(grids, grids[1:])):
        raise ConfigError('Convergence needs at least two increasing grids, '
                          'got {}'.format(grids))
    if build_problem(config, cells=grids[0]).exact(config.t_end) is None:
        raise ConfigError('No exact solution is known for this {} setup'
                          .format(config.problem))
    errors = Parallel(n_jobs=n_jobs)(
        delayed(l1_error)(config, J)
        for J in tqdm(grids, ncols=80, disable=not verbose))
    errors = np.array(errors)
    J = np.array(grids, dtype=float)
    order = np.full(len(grids), np.nan)
    order[1:] = np.log(errors[:-1] / errors[1:]) / np.log(J[1:] / J[:-1])
    table = pd.DataFrame({'J': grids, 'dx': config.length / J,
                          'l1_error': errors, 'order': order})
    log(table, print_string=verbose)
    if config.output:
        filename = '{}_convergence.csv'.format(config.output)
        dump_csv(table, filename, index=False)
        log('Wrote {}'.format(filename), print_string=verbose)
    return table
