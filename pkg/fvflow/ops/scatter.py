import numpy as np


def _valid(updates, indices):
    updates = np.asarray(updates, dtype=float)
    indices = np.asarray(indices, dtype=int)
    mask = indices >= 0
    return updates[mask], indices[mask]


def scatter_sum(updates, indices, N):
    """
    Sums updates along the first dimension according to the indices, returns
    an array of the same rank as updates with shape `(N, ...)`.
    If the result is empty for a given index `i`, `output[i] = 0`.
    If a given index `i` is negative, the value is ignored (boundary faces
    have no cell on one side).
    Updates are accumulated in the order in which they are given, so the
    result is reproducible bit by bit.
    :param updates: a np.array.
    :param indices: a np.array of integers, one per row of updates.
    :param N: first dimension of the output (i.e., total number of segments).
    :return: a np.array of shape `(N, ) + updates.shape[1:]`.
    """
    updates, indices = _valid(updates, indices)
    output = np.zeros((N,) + updates.shape[1:])
    np.add.at(output, indices, updates)
    return output


def scatter_max(updates, indices, N):
    """
    Max-reduces updates along the first dimension according to the indices,
    returns an array of shape `(N, ...)`.
    If the result is empty for a given index `i`, `output[i] = -inf`.
    If a given index `i` is negative, the value is ignored.
    :param updates: a np.array.
    :param indices: a np.array of integers, one per row of updates.
    :param N: first dimension of the output (i.e., total number of segments).
    :return: a np.array of shape `(N, ) + updates.shape[1:]`.
    """
    updates, indices = _valid(updates, indices)
    output = np.full((N,) + updates.shape[1:], -np.inf)
    np.maximum.at(output, indices, updates)
    return output


def scatter_min(updates, indices, N):
    """
    Min-reduces updates along the first dimension according to the indices,
    returns an array of shape `(N, ...)`.
    If the result is empty for a given index `i`, `output[i] = inf`.
    If a given index `i` is negative, the value is ignored.
    :param updates: a np.array.
    :param indices: a np.array of integers, one per row of updates.
    :param N: first dimension of the output (i.e., total number of segments).
    :return: a np.array of shape `(N, ) + updates.shape[1:]`.
    """
    updates, indices = _valid(updates, indices)
    output = np.full((N,) + updates.shape[1:], np.inf)
    np.minimum.at(output, indices, updates)
    return output
