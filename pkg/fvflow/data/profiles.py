import os

import numpy as np

from fvflow.utils.io import load_txt


class Profile:
    """
    A scalar function of time, used for boundary data (inflow values,
    imposed pressures, reflection offsets). Profiles are parsed from tokens
    of the form `<kind>:<params>` with `parse_profile`.
    """
    def __call__(self, t):
        raise NotImplementedError


class ConstantProfile(Profile):
    """
    **Arguments**

    - `value`: the constant value;
    """
    def __init__(self, value):
        self.value = float(value)

    def __call__(self, t):
        return np.full(np.shape(t), self.value)

    def __repr__(self):
        return 'ConstantProfile({})'.format(self.value)


class SineProfile(Profile):
    """
    `mean + amplitude * sin(2 pi frequency t)`.

    **Arguments**

    - `mean`: mean value;
    - `amplitude`: amplitude of the oscillation;
    - `frequency`: frequency (in inverse time units);
    """
    def __init__(self, mean, amplitude, frequency):
        self.mean = float(mean)
        self.amplitude = float(amplitude)
        self.frequency = float(frequency)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.mean + self.amplitude * np.sin(2 * np.pi * self.frequency
                                                   * t)

    def __repr__(self):
        return 'SineProfile(mean={}, amplitude={}, frequency={})'.format(
            self.mean, self.amplitude, self.frequency)


class TableProfile(Profile):
    """
    Piecewise linear interpolation of tabulated values, constant outside the
    table.

    **Arguments**

    - `times`: strictly increasing np.array of times;
    - `values`: np.array of values, same shape as `times`;
    """
    def __init__(self, times, values):
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape or times.size == 0:
            raise ValueError('A table needs two columns of equal length')
        if np.any(np.diff(times) <= 0):
            raise ValueError('Table times must be strictly increasing')
        self.times = times
        self.values = values

    @classmethod
    def from_file(cls, filename):
        """
        Reads a two-column `time,value` file (comma separated, `#` comments).
        """
        data = load_txt(filename, delimiter=',', ndmin=2)
        if data.shape[1] != 2:
            raise ValueError('{}: expected two columns, got {}'
                             .format(filename, data.shape[1]))
        return cls(data[:, 0], data[:, 1])

    def __call__(self, t):
        return np.interp(t, self.times, self.values)

    def __repr__(self):
        return 'TableProfile(n_points={})'.format(self.times.size)


PROFILES = {
    'constant': (ConstantProfile, 1),
    'sine': (SineProfile, 3),
    'table': (TableProfile, None),
}


def _split_token(token):
    kind, sep, params = token.partition(':')
    kind = kind.strip()
    if not sep or not params.strip():
        raise ValueError('Expected "<kind>:<params>", got "{}"'.format(token))
    return kind, params.strip()


def _floats(params, token, n=None):
    try:
        values = [float(p) for p in params.split(',')]
    except ValueError:
        raise ValueError('Invalid number in "{}"'.format(token))
    if n is not None and len(values) != n:
        raise ValueError('"{}" expects {} parameters, got {}'
                         .format(token.split(':')[0], n, len(values)))
    if not np.all(np.isfinite(values)):
        raise ValueError('Non-finite parameter in "{}"'.format(token))
    return values


def parse_profile(token, root=None):
    """
    Parses a profile token: `constant:<value>`,
    `sine:<mean>,<amplitude>,<frequency>` or `table:<path>`.
    :param token: the string to parse;
    :param root: directory against which relative table paths are resolved;
    :return: a Profile.
    """
    kind, params = _split_token(token)
    if kind not in PROFILES:
        raise ValueError('Unknown profile "{}", available: {}'
                         .format(kind, list(PROFILES.keys())))
    cls, n = PROFILES[kind]
    if kind == 'table':
        path = params
        if root is not None and not os.path.isabs(path):
            path = os.path.join(root, path)
        return cls.from_file(path)
    return cls(*_floats(params, token, n))


def deserialize_profile(profile, root=None):
    if isinstance(profile, str):
        return parse_profile(profile, root=root)
    elif callable(profile):
        return profile
    elif np.isscalar(profile):
        return ConstantProfile(profile)
    else:
        raise ValueError('profile must be callable, a number or a string in: '
                         '{}.'.format(list(PROFILES.keys())))


# Number of parameters of each initial condition, per problem
INITIAL_CONDITIONS = {
    'advection': {'constant': 1, 'sine': 3, 'step': 3},
    'acoustics': {'constant': 2, 'sine': 3, 'step': 5},
    'euler1d': {'constant': 3, 'sine': 5, 'step': 7},
    'euler2d': {'constant': 4, 'step': 9},
}


class InitialCondition:
    """
    Initial field of a problem, as a function of the position. Values are
    the primitive fields of the problem: `w` for advection, `(p, u)` for
    acoustics, `(rho, u, p)` for euler1d and `(rho, u, v, p)` for euler2d.

    - `constant`: the given values everywhere;
    - `sine`: `mean + amplitude sin(2 pi periods x / length)` on the first
    field (advection, acoustics pressure, euler1d density; the other euler1d
    fields are the last two parameters, acoustic velocity is 0);
    - `step`: values `left` for `x < x0` and `right` otherwise.

    **Arguments**

    - `problem`: one of the keys of `INITIAL_CONDITIONS`;
    - `kind`: 'constant', 'sine' or 'step';
    - `params`: list of floats;
    """
    def __init__(self, problem, kind, params):
        if problem not in INITIAL_CONDITIONS:
            raise ValueError('Unknown problem {}'.format(problem))
        kinds = INITIAL_CONDITIONS[problem]
        if kind not in kinds:
            raise ValueError('Unknown initial condition "{}" for {}, '
                             'available: {}'.format(kind, problem,
                                                    list(kinds.keys())))
        if len(params) != kinds[kind]:
            raise ValueError('Initial condition "{}" for {} expects {} '
                             'parameters, got {}'.format(kind, problem,
                                                         kinds[kind],
                                                         len(params)))
        self.problem = problem
        self.kind = kind
        self.params = [float(p) for p in params]

    @property
    def n_fields(self):
        return {'advection': 1, 'acoustics': 2, 'euler1d': 3,
                'euler2d': 4}[self.problem]

    def __call__(self, x, length=1.):
        """
        :param x: np.array of positions, shape `(n, )` in 1D or `(n, 2)` in
        2D (steps are along the first coordinate);
        :param length: domain length, for sine initial conditions;
        :return: np.array of shape `(n, n_fields)`.
        """
        x = np.asarray(x, dtype=float)
        if x.ndim == 2:
            x = x[:, 0]
        n, p = x.shape[0], self.params
        if self.kind == 'constant':
            return np.tile(np.array(p), (n, 1))
        if self.kind == 'step':
            x0, values = p[0], np.array(p[1:]).reshape(2, -1)
            return np.where((x < x0)[:, None], values[0], values[1])
        # sine
        mean, amplitude, periods = p[:3]
        wave = mean + amplitude * np.sin(2 * np.pi * periods * x / length)
        others = {'advection': [], 'acoustics': [0.], 'euler1d': p[3:]}
        columns = [wave] + [np.full(n, v) for v in others[self.problem]]
        return np.stack(columns, axis=-1)

    def __repr__(self):
        return 'InitialCondition({}, {}:{})'.format(
            self.problem, self.kind, ','.join(str(p) for p in self.params))


def parse_initial(token, problem):
    """
    Parses an initial condition token `<kind>:<params>` for a problem.
    :param token: the string to parse;
    :param problem: problem name;
    :return: an InitialCondition.
    """
    kind, params = _split_token(token)
    return InitialCondition(problem, kind, _floats(params, token))
