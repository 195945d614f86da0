import os

from fvflow.data.profiles import parse_initial, parse_profile
from fvflow.reconstruction.limiters import LIMITERS, Limiter
from fvflow.utils.io import strip_lines

PROBLEMS = ('advection', 'acoustics', 'euler1d', 'euler2d')
TIME_SCHEMES = ('euler', 'heun')
# Boundary kinds available on each end of a 1D domain
BOUNDARY_KINDS = {
    'advection': ('periodic', 'inflow_profile', 'nonreflecting'),
    'acoustics': ('pressure', 'nonreflecting', 'reflection'),
    'euler1d': ('pressure', 'nonreflecting'),
    'euler2d': (),
}
DEFAULT_BOUNDARIES = {
    'advection': ('periodic', 'periodic'),
    'acoustics': ('pressure', 'nonreflecting'),
    'euler1d': ('pressure', 'nonreflecting'),
    'euler2d': (None, None),
}
DEFAULT_CFL = {1: 0.9, 2: 0.45}


class ConfigError(ValueError):
    pass


class SolverConfig:
    """
    A container for the settings of a simulation. Keyword arguments are
    stored as attributes; `parse_config` and `load_config` fill in every key
    with its default value, so that all keys below are always available:

    - `problem`: 'advection', 'acoustics', 'euler1d' or 'euler2d';
    - `t_end`: final time;
    - `gamma`: ratio of specific heats;
    - `length`, `cells`: length and number of cells of 1D domains;
    - `mesh`: path to the mesh file (euler2d);
    - `order`: 1 or 2, `limiter`: a Limiter, `time`: 'euler' or 'heun';
    - `cfl`, `fixed_dt`: time step control;
    - `velocity`: advection celerity, `rho0`, `c0`: acoustic reference state;
    - `bc_left`, `bc_right`, `profile_left`, `profile_right`,
    `reflection_left`, `reflection_right`: 1D boundary conditions;
    - `inflow`: imposed pressure on faces marked inflow (euler2d);
    - `initial`: an InitialCondition;
    - `output`: prefix of the csv files ('' to write nothing);
    - `snapshots`: sorted list of output times, ending with `t_end`;
    - `threads`: number of threads used for face fluxes;

    **Arguments**

    - `**kwargs`: settings to store;
    """
    def __init__(self, **kwargs):
        for k, v in kwargs.items():
            self[k] = v

    def __setitem__(self, key, value):
        setattr(self, key, value)

    def __getitem__(self, key):
        return getattr(self, key, None)

    def __contains__(self, key):
        return key in self.keys

    def __repr__(self):
        return 'SolverConfig(problem={}, order={}, t_end={})'.format(
            self.problem, self.order, self.t_end)

    @property
    def keys(self):
        return [key for key in self.__dict__.keys()
                if self[key] is not None and not key.startswith('__')]

    @property
    def is_2d(self):
        return self.problem == 'euler2d'

    @property
    def dx(self):
        if self.is_2d:
            return None
        return self.length / self.cells

    @property
    def default_cfl(self):
        return DEFAULT_CFL[self.order]

    def copy(self, **kwargs):
        """
        :return: a new SolverConfig with the same settings, updated with
        `kwargs`.
        """
        settings = dict(self.__dict__)
        settings.update(kwargs)
        return SolverConfig(**settings)


def _number(cast, lower=None, strict=True, upper=None):
    def parse(value):
        value = cast(value)
        if lower is not None and (value <= lower if strict else value < lower):
            raise ValueError('must be {} {}'.format('>' if strict else '>=',
                                                    lower))
        if upper is not None and value > upper:
            raise ValueError('must be <= {}'.format(upper))
        return value
    return parse


def _choice(*choices):
    def parse(value):
        if value not in choices:
            raise ValueError('must be one of {}'.format(list(choices)))
        return value
    return parse


def _float_list(value):
    return [float(v) for v in value.split(',') if v.strip()]


# Parser of each key; values are kept as strings when they need other keys
KEYS = {
    'problem': _choice(*PROBLEMS),
    't_end': _number(float, 0.),
    'gamma': _number(float, 1.),
    'length': _number(float, 0.),
    'cells': _number(int, 2, strict=False),
    'mesh': str,
    'order': _number(int, 1, strict=False, upper=2),
    'reconstruction': _choice('first', 'second'),
    'limiter': _choice(*LIMITERS.keys()),
    'limiter_k': float,
    'time': _choice(*TIME_SCHEMES),
    'cfl': _number(float, 0., upper=1.),
    'fixed_dt': _number(float, 0.),
    'velocity': float,
    'rho0': _number(float, 0.),
    'c0': _number(float, 0.),
    'bc_left': str,
    'bc_right': str,
    'profile_left': str,
    'profile_right': str,
    'reflection_left': float,
    'reflection_right': float,
    'inflow': str,
    'initial': str,
    'output': str,
    'snapshots': _float_list,
    'threads': _number(int, 1, strict=False),
}
REQUIRED = ('problem', 't_end', 'initial')


def _read_pairs(text):
    pairs = {}
    for line_no, line in strip_lines(text):
        key, sep, value = line.partition('=')
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError('Line {}: expected "key=value", got "{}"'
                              .format(line_no, line))
        if key not in KEYS:
            raise ConfigError('Line {}: unknown key "{}"'.format(line_no, key))
        if key in pairs:
            raise ConfigError('Line {}: key "{}" is set twice'
                              .format(line_no, key))
        try:
            pairs[key] = KEYS[key](value)
        except ValueError as e:
            raise ConfigError('Line {}: invalid value "{}" for {} ({})'
                              .format(line_no, value, key, e))
    return pairs


def _resolve(path, root):
    if root is not None and not os.path.isabs(path):
        return os.path.join(root, path)
    return path


def _profile(token, key, root):
    try:
        return parse_profile(token, root=root)
    except (ValueError, OSError) as e:
        raise ConfigError('Invalid profile for {}: {}'.format(key, e))


def parse_config(text, root=None):
    """
    Parses the `key=value` configuration format (one setting per line, `#`
    comments, blank lines ignored).
    :param text: string, the content of a configuration file;
    :param root: directory against which relative paths are resolved;
    :return: a SolverConfig.
    """
    pairs = _read_pairs(text)
    for key in REQUIRED:
        if key not in pairs:
            raise ConfigError('Missing required key "{}"'.format(key))
    problem = pairs['problem']
    c = SolverConfig(problem=problem, t_end=pairs['t_end'],
                     gamma=pairs.get('gamma', 1.4),
                     length=pairs.get('length', 1.),
                     cells=pairs.get('cells', 100),
                     velocity=pairs.get('velocity', 1.),
                     rho0=pairs.get('rho0', 1.),
                     c0=pairs.get('c0', 1.),
                     output=pairs.get('output', 'output/run'),
                     threads=pairs.get('threads', 1),
                     fixed_dt=pairs.get('fixed_dt'))

    # Space and time discretization
    if 'order' in pairs and 'reconstruction' in pairs:
        expected = {'first': 1, 'second': 2}[pairs['reconstruction']]
        if pairs['order'] != expected:
            raise ConfigError('order={} contradicts reconstruction={}'
                              .format(pairs['order'],
                                      pairs['reconstruction']))
    if 'order' in pairs:
        c.order = pairs['order']
    else:
        c.order = {'first': 1, 'second': 2}[pairs.get('reconstruction',
                                                      'first')]
    kind = pairs.get('limiter', 'sts')
    try:
        c.limiter = Limiter(kind, k=pairs.get('limiter_k'))
    except ValueError as e:
        raise ConfigError('Invalid limiter: {}'.format(e))
    c.time = pairs.get('time', 'euler' if c.order == 1 else 'heun')
    c.cfl = pairs.get('cfl', c.default_cfl)
    if problem == 'advection' and c.velocity == 0:
        raise ConfigError('The advection velocity must be nonzero')

    # Geometry
    if problem == 'euler2d':
        if 'mesh' not in pairs:
            raise ConfigError('Key "mesh" is required for euler2d')
        c.mesh = _resolve(pairs['mesh'], root)
        if not os.path.isfile(c.mesh):
            raise ConfigError('Mesh file {} does not exist'.format(c.mesh))
        c.inflow = _profile(pairs['inflow'], 'inflow', root) \
            if 'inflow' in pairs else None
    else:
        if 'mesh' in pairs or 'inflow' in pairs:
            raise ConfigError('Keys "mesh" and "inflow" only apply to euler2d')
        c.mesh = None
        c.inflow = None

    # Boundary conditions
    kinds = BOUNDARY_KINDS[problem]
    for i, side in enumerate(('left', 'right')):
        bc = pairs.get('bc_' + side, DEFAULT_BOUNDARIES[problem][i])
        if problem == 'euler2d':
            if 'bc_' + side in pairs:
                raise ConfigError('euler2d boundaries are set by the mesh '
                                  'markers, not by bc_{}'.format(side))
        elif bc not in kinds:
            raise ConfigError('Invalid bc_{}={} for {}, available: {}'
                              .format(side, bc, problem, list(kinds)))
        c['bc_' + side] = bc
        token = pairs.get('profile_' + side)
        if bc in ('inflow_profile', 'pressure') and token is None:
            raise ConfigError('bc_{}={} needs profile_{}'.format(side, bc,
                                                                 side))
        if bc == 'reflection' and token is None:
            token = 'constant:0'
        c['profile_' + side] = None if token is None \
            else _profile(token, 'profile_' + side, root)
        c['reflection_' + side] = pairs.get('reflection_' + side, 0.)
    if (c.bc_left == 'periodic') != (c.bc_right == 'periodic'):
        raise ConfigError('Periodic boundaries must be set on both sides')
    if problem == 'advection' and c.bc_left != 'periodic':
        upstream, downstream = ('left', 'right') if c.velocity > 0 \
            else ('right', 'left')
        if c['bc_' + upstream] != 'inflow_profile' \
                or c['bc_' + downstream] != 'nonreflecting':
            raise ConfigError('Advection needs bc_{}=inflow_profile upstream '
                              'and bc_{}=nonreflecting downstream'
                              .format(upstream, downstream))

    # Initial condition and output times
    try:
        c.initial = parse_initial(pairs['initial'], problem)
    except ValueError as e:
        raise ConfigError('Invalid initial condition: {}'.format(e))
    snapshots = sorted(set(pairs.get('snapshots', [])) | {c.t_end})
    if snapshots[0] <= 0 or snapshots[-1] > c.t_end:
        raise ConfigError('Snapshot times must be in (0, t_end]')
    c.snapshots = snapshots
    return c


def load_config(filename):
    """
    Reads a configuration file. Relative paths in the file are resolved
    against its directory.
    :param filename: path to the configuration file;
    :return: a SolverConfig.
    """
    try:
        with open(filename, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise ConfigError('Cannot read {}: {}'.format(filename, e))
    root = os.path.dirname(os.path.abspath(filename))
    return parse_config(text, root=root)
