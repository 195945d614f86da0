import os

import pytest

from fvflow import cli
from fvflow.solver import check

ADVECTION = """
problem = advection
t_end = 0.5
cells = 40
initial = sine:0,1,1
output = out/advection
"""

SOD = """
problem = euler1d
t_end = 0.2
initial = step:0.5,1,0,1,0.125,0,0.1
bc_left = nonreflecting
output = out/sod
"""


def _write(tmp_path, name, text):
    filename = str(tmp_path / name)
    with open(filename, 'w') as f:
        f.write(text)
    return filename


def test_run(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(str(tmp_path))
    filename = _write(tmp_path, 'advection.cfg', ADVECTION)
    assert cli.main(['--quiet', 'run', filename]) == cli.EXIT_OK
    # Output prefixes are relative to the working directory
    assert os.path.isfile(str(tmp_path / 'out' / 'advection_t0.500000.csv'))
    assert capsys.readouterr().err == ''


def test_convergence(tmp_path, monkeypatch):
    monkeypatch.chdir(str(tmp_path))
    filename = _write(tmp_path, 'advection.cfg', ADVECTION)
    assert cli.main(['--quiet', 'convergence', filename, '20,40,80']) == \
        cli.EXIT_OK
    assert os.path.isfile(str(tmp_path / 'out' / 'advection_convergence.csv'))


def test_check(capsys):
    code = cli.main(['check', '--seed', '1', '--samples', '100'])
    assert code == cli.EXIT_OK
    assert 'roe_property' in capsys.readouterr().out


def test_check_failure(monkeypatch):
    def broken(rng, samples):
        return 1., 0.

    monkeypatch.setitem(check.CHECKS, 'broken', broken)
    assert cli.main(['--quiet', 'check', '--samples', '10']) == cli.EXIT_CHECK


def test_config_errors(tmp_path, capsys):
    assert cli.main(['run', str(tmp_path / 'missing.cfg')]) == cli.EXIT_CONFIG
    assert 'Error' in capsys.readouterr().err

    filename = _write(tmp_path, 'bad.cfg', ADVECTION + 'cfl = 2\n')
    assert cli.main(['run', filename]) == cli.EXIT_CONFIG
    assert 'cfl' in capsys.readouterr().err

    # No exact solution for the Euler equations
    filename = _write(tmp_path, 'sod.cfg', SOD)
    assert cli.main(['convergence', filename, '20,40']) == cli.EXIT_CONFIG

    filename = _write(tmp_path, 'channel.cfg',
                      'problem = euler2d\nt_end = 1\nmesh = bad.mesh\n'
                      'initial = constant:1,0,0,1\n')
    _write(tmp_path, 'bad.mesh', 'vertices 1\n0 0\n')
    assert cli.main(['run', filename]) == cli.EXIT_CONFIG


@pytest.mark.parametrize('argv', [
    [],
    ['simulate', 'a.cfg'],
    ['run'],
    ['convergence', 'a.cfg'],
    ['convergence', 'a.cfg', '50'],
    ['convergence', 'a.cfg', '50,x'],
    ['check', '--seed', 'x'],
])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == cli.EXIT_CONFIG


def test_numerical_failure(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(str(tmp_path))
    filename = _write(tmp_path, 'sod.cfg', SOD + 'fixed_dt = 0.1\n')
    assert cli.main(['--quiet', 'run', filename]) == cli.EXIT_NUMERICAL
    assert 'Numerical failure' in capsys.readouterr().err


def test_log_file(tmp_path, monkeypatch):
    monkeypatch.chdir(str(tmp_path))
    filename = _write(tmp_path, 'advection.cfg', ADVECTION)
    assert cli.main(['--log', 'advection', 'run', filename]) == cli.EXIT_OK
    with open(str(tmp_path / 'logs' / 'advection' / 'log.txt')) as f:
        content = f.read()
    assert 'Wrote' in content
    assert 'Reached t=0.5' in content

    filename = _write(tmp_path, 'sod.cfg', SOD + 'fixed_dt = 0.1\n')
    assert cli.main(['--quiet', '--log', 'sod', 'run', filename]) == \
        cli.EXIT_NUMERICAL
    with open(str(tmp_path / 'logs' / 'sod' / 'log.txt')) as f:
        assert 'Numerical failure' in f.read()
