import os

import numpy as np
import pandas as pd


def load_csv(filename, **kwargs):
    """
    Loads a csv file with pandas.
    :param filename: a string or file-like object
    :return: the loaded csv
    """
    return pd.read_csv(filename, **kwargs)


def dump_csv(df, filename, convert=False, **kwargs):
    """
    Dumps a pd.DataFrame to csv. Missing parent directories are created.
    :param df: the pd.DataFrame to save or equivalent object
    :param filename: a string or file-like object
    :param convert: whether to attempt to convert the given object to
    pd.DataFrame before saving the csv.
    """
    if convert:
        df = pd.DataFrame(df)
    assert hasattr(df, 'to_csv'), \
        'Trying to dump object of class {} to csv while pd.DataFrame is ' \
        'expected. To attempt automatic conversion, set ' \
        'convert=True.'.format(df.__class__)
    if isinstance(filename, str):
        folder = os.path.dirname(filename)
        if folder and not os.path.isdir(folder):
            os.makedirs(folder)
    df.to_csv(filename, **kwargs)


def load_txt(filename, **kwargs):
    """
    Loads a txt file using np.loadtxt.
    :param filename: a string or file-like object
    :return: the loaded object
    """
    return np.loadtxt(filename, **kwargs)


def strip_lines(text, comment='#'):
    """
    Returns the non-empty lines of a text, with comments and surrounding
    whitespace removed.
    :param text: a string;
    :param comment: the character that starts a comment;
    :return: a list of (line_number, stripped line) tuples, line numbers
    starting from 1.
    """
    output = []
    for i, line in enumerate(text.splitlines()):
        line = line.split(comment, 1)[0].strip()
        if line:
            output.append((i + 1, line))
    return output


def snapshot_filename(prefix, time):
    """
    Name of the csv file holding the snapshot at the given time.
    :param prefix: output prefix from the configuration;
    :param time: snapshot time;
    :return: `<prefix>_t<time>.csv`, time printed with 6 decimals.
    """
    return '{}_t{:.6f}.csv'.format(prefix, time)
