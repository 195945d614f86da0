import numpy as np

from fvflow.physics.gas import conserved_from_primitive

# Sampling ranges of random admissible states
RHO_RANGE = (0.1, 10.)
U_RANGE = (-5., 5.)
P_RANGE = (0.1, 10.)


def random_primitive(rng, n, dim=1):
    """
    Draws primitive states uniformly in the sampling ranges.
    :param rng: a np.random.Generator;
    :param n: number of states;
    :param dim: 1 for `(rho, u, p)`, 2 for `(rho, u, v, p)`;
    :return: np.array of shape `(n, dim + 2)`.
    """
    rho = rng.uniform(*RHO_RANGE, size=(n, 1))
    velocity = rng.uniform(*U_RANGE, size=(n, dim))
    p = rng.uniform(*P_RANGE, size=(n, 1))
    return np.concatenate((rho, velocity, p), axis=-1)


def random_states(rng, n, gas, dim=1):
    """
    Draws admissible conserved states.
    :param rng: a np.random.Generator;
    :param n: number of states;
    :param gas: a GasModel;
    :param dim: 1 or 2;
    :return: np.array of shape `(n, dim + 2)`.
    """
    return conserved_from_primitive(random_primitive(rng, n, dim=dim), gas)


def random_normals(rng, n):
    """
    :return: np.array of `n` random unit vectors, shape `(n, 2)`.
    """
    angles = rng.uniform(0., 2. * np.pi, size=n)
    return np.stack((np.cos(angles), np.sin(angles)), axis=-1)


def random_diagonalizable(rng, dim=3, max_cond=100.):
    """
    Draws a real diagonalizable matrix with distinct sorted eigenvalues and a
    well conditioned eigenbasis.
    :param rng: a np.random.Generator;
    :param dim: size of the matrix;
    :param max_cond: largest condition number accepted for the eigenbasis;
    :return: tuple `(lambdas, R)`.
    """
    while True:
        R = rng.normal(size=(dim, dim))
        if np.linalg.cond(R) < max_cond:
            break
    lambdas = np.sort(rng.uniform(-2., 2., size=dim))
    return lambdas, R
