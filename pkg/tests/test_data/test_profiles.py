import numpy as np
import pytest

from fvflow.data.profiles import (ConstantProfile, InitialCondition,
                                  SineProfile, TableProfile,
                                  deserialize_profile, parse_initial,
                                  parse_profile)

T = np.linspace(0., 2., 9)


def _assert_all_close(actual, expected, **kwargs):
    assert np.allclose(actual, expected, **kwargs), \
        'max difference {}'.format(np.max(np.abs(np.asarray(actual)
                                                 - np.asarray(expected))))


def test_profiles():
    constant = parse_profile('constant:2.5')
    assert isinstance(constant, ConstantProfile)
    _assert_all_close(constant(T), 2.5)
    assert constant(T).shape == T.shape

    sine = parse_profile('sine: 1, 0.5, 2')
    assert isinstance(sine, SineProfile)
    _assert_all_close(sine(T), 1. + 0.5 * np.sin(4 * np.pi * T))
    assert sine(0.125) == pytest.approx(1.5)


def test_table_profile(tmp_path):
    filename = str(tmp_path / 'table.csv')
    with open(filename, 'w') as f:
        f.write('# time,value\n0,1\n1,3\n2,2\n')
    table = parse_profile('table:table.csv', root=str(tmp_path))
    assert isinstance(table, TableProfile)
    _assert_all_close(table([0.5, 1.5]), [2., 2.5])
    # Constant outside the table
    _assert_all_close(table([-1., 5.]), [1., 2.])
    assert parse_profile('table:' + filename).times.size == 3

    with open(filename, 'w') as f:
        f.write('0,1,2\n1,3,4\n')
    with pytest.raises(ValueError):
        TableProfile.from_file(filename)
    with pytest.raises(ValueError):
        TableProfile([0., 1., 1.], [0., 1., 2.])
    with pytest.raises(ValueError):
        TableProfile([0., 1.], [0.])


@pytest.mark.parametrize('token', [
    'constant', 'constant:', 'ramp:1', 'constant:1,2', 'sine:1,2',
    'constant:abc', 'constant:inf',
])
def test_invalid_profile(token):
    with pytest.raises(ValueError):
        parse_profile(token)


def test_deserialize_profile():
    assert deserialize_profile('constant:1')(0.) == 1.
    assert deserialize_profile(3.)(0.) == 3.

    def fn(t):
        return 2. * t

    assert deserialize_profile(fn) is fn
    with pytest.raises(ValueError):
        deserialize_profile([1., 2.])


def test_initial_conditions():
    x = np.linspace(0., 1., 5)
    ic = parse_initial('step:0.5,1,0,1,0.125,0,0.1', 'euler1d')
    assert ic.n_fields == 3
    values = ic(x)
    assert values.shape == (5, 3)
    _assert_all_close(values[:2], [[1., 0., 1.]] * 2)
    _assert_all_close(values[2:], [[0.125, 0., 0.1]] * 3)

    ic = parse_initial('sine:1,0.2,2,0.5,1', 'euler1d')
    values = ic(x, length=2.)
    _assert_all_close(values[:, 0], 1. + 0.2 * np.sin(2 * np.pi * x))
    _assert_all_close(values[:, 1:], [[0.5, 1.]] * 5)

    values = parse_initial('sine:0,1,1', 'acoustics')(x)
    _assert_all_close(values[:, 1], 0.)

    ic = parse_initial('constant:1,0.3,0,1', 'euler2d')
    points = np.stack((x, 1. - x), axis=-1)
    _assert_all_close(ic(points), [[1., 0.3, 0., 1.]] * 5)
    ic = parse_initial('step:0.3,1,0,0,1,2,0,0,2', 'euler2d')
    _assert_all_close(ic(points)[:, 0], [1., 1., 2., 2., 2.])


@pytest.mark.parametrize('token, problem', [
    ('sine:1,0.2,2', 'euler2d'),
    ('constant:1', 'acoustics'),
    ('step:0.5,1,2', 'euler1d'),
    ('ramp:1', 'advection'),
    ('constant:1', 'heat'),
    ('constant', 'advection'),
])
def test_invalid_initial(token, problem):
    with pytest.raises(ValueError):
        parse_initial(token, problem)
