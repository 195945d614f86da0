import numpy as np

from fvflow.ops.scatter import scatter_max, scatter_min, scatter_sum

N = 4
updates = np.array([[1., 10.], [2., 20.], [3., 30.], [4., 40.], [5., 50.]])
indices = np.array([0, 2, 0, -1, 2])


def _check_op(op, expected):
    output = op(updates, indices, N)
    assert output.shape == (N, 2)
    assert np.array_equal(output, expected)


def test_scatter_ops():
    _check_op(scatter_sum, [[4., 40.], [0., 0.], [7., 70.], [0., 0.]])
    _check_op(scatter_max, [[3., 30.], [-np.inf, -np.inf], [5., 50.],
                            [-np.inf, -np.inf]])
    _check_op(scatter_min, [[1., 10.], [np.inf, np.inf], [2., 20.],
                            [np.inf, np.inf]])


def test_scatter_sum_faces():
    # Face fluxes added to the right cell and removed from the left cell
    rng = np.random.default_rng(0)
    left = rng.integers(0, 10, size=50)
    right = np.where(rng.uniform(size=50) < 0.2, -1, rng.integers(0, 10,
                                                                  size=50))
    flux = rng.normal(size=(50, 3))
    balance = scatter_sum(flux, right, 10) - scatter_sum(flux, left, 10)
    boundary = right < 0
    total = np.sum(balance, axis=0)
    assert np.allclose(total, -np.sum(flux[boundary], axis=0))


def test_scatter_sum_order():
    # Accumulated in the order of the updates, so repeated calls agree bit
    # for bit
    rng = np.random.default_rng(1)
    values = rng.normal(size=(1000,)) * 10. ** rng.integers(-8, 8, size=1000)
    idx = rng.integers(0, 3, size=1000)
    expected = np.zeros(3)
    for v, i in zip(values, idx):
        expected[i] += v
    assert np.array_equal(scatter_sum(values, idx, 3), expected)
