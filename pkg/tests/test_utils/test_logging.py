import os

import pandas as pd

from fvflow.utils import logging


def test_log_to_file(tmp_path, capsys):
    log_dir = logging.init_logging('run', root=str(tmp_path))
    assert log_dir == os.path.join(str(tmp_path), 'run')
    try:
        logging.log('first message')
        logging.log({'cells': 100}, print_string=False)
        logging.log(pd.DataFrame({'J': [50, 100], 'order': [0.91, 0.95]}))
    finally:
        logging.close_logging()
    logging.log('not written')

    with open(os.path.join(log_dir, 'log.txt')) as f:
        content = f.read()
    assert 'first message' in content
    assert "{'cells': 100}" in content
    assert 'order' in content and '0.95' in content
    assert 'not written' not in content
    out = capsys.readouterr().out
    assert 'first message' in out
    assert 'cells' not in out


def test_tic_toc(capsys):
    del logging.TIME_STACK[:]
    logging.tic('start')
    elapsed = logging.toc('done', print_string=False)
    assert elapsed >= 0.
    assert logging.toc() is None
    assert 'tic() before' in capsys.readouterr().out
