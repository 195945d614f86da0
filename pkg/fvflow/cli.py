import argparse
import sys

from fvflow.data.config import ConfigError, load_config
from fvflow.data.mesh import MalformedMesh
from fvflow.physics.gas import InadmissibleState
from fvflow.solver.check import run_checks
from fvflow.solver.run import convergence, run
from fvflow.utils.logging import close_logging, init_logging, log

# Exit codes
EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_CHECK = 3


class _Parser(argparse.ArgumentParser):
    # Usage errors share the exit code of configuration errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, '{}: error: {}\n'.format(self.prog, message))


def _grids(value):
    try:
        grids = [int(J) for J in value.split(',') if J.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError('expected a comma separated list of '
                                         'integers, got {}'.format(value))
    if len(grids) < 2:
        raise argparse.ArgumentTypeError('at least two grids are needed')
    return grids


def build_parser():
    parser = _Parser(prog='fvflow',
                     description='Finite volume solver for hyperbolic '
                                 'conservation laws.')
    parser.add_argument('--log', metavar='NAME', default=None,
                        help='also write the output to ./logs/NAME/log.txt')
    parser.add_argument('--quiet', action='store_true',
                        help='only print errors')
    commands = parser.add_subparsers(dest='command', metavar='command',
                                     parser_class=_Parser)
    commands.required = True

    p = commands.add_parser('run', help='run a simulation')
    p.add_argument('config', help='path to the configuration file')

    p = commands.add_parser('convergence',
                            help='measure the L1 error on several grids')
    p.add_argument('config', help='path to the configuration file')
    p.add_argument('grids', type=_grids, help='numbers of cells, e.g. '
                                              '50,100,200,400')
    p.add_argument('--jobs', type=int, default=1,
                   help='number of grids computed in parallel')

    p = commands.add_parser('check', help='run the property suite')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--samples', type=int, default=1000)
    return parser


def main(argv=None):
    """
    Entry point of the `fvflow` command.
    :param argv: list of arguments (defaults to `sys.argv[1:]`);
    :return: the exit code.
    """
    args = build_parser().parse_args(argv)
    if args.log is not None:
        init_logging(args.log)
    try:
        return _dispatch(args, verbose=not args.quiet)
    except InadmissibleState as e:
        log('Numerical failure: {}'.format(e), print_string=False)
        print('Numerical failure: {}'.format(e), file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, MalformedMesh, ValueError, OSError) as e:
        log('Error: {}'.format(e), print_string=False)
        print('Error: {}'.format(e), file=sys.stderr)
        return EXIT_CONFIG
    finally:
        close_logging()


def _dispatch(args, verbose):
    if args.command == 'check':
        report = run_checks(seed=args.seed, samples=args.samples,
                            verbose=verbose)
        return EXIT_OK if report['passed'].all() else EXIT_CHECK
    config = load_config(args.config)
    if args.command == 'run':
        run(config, verbose=verbose)
    else:
        convergence(config, args.grids, n_jobs=args.jobs, verbose=verbose)
    return EXIT_OK
