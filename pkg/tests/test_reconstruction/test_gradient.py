import numpy as np
import pytest

from fvflow.data.mesh import build_mesh, neighbor_set, rectangle_mesh_text
from fvflow.reconstruction.gradient import (MeshReconstruction,
                                            extrapolate_to_faces, face_mean,
                                            green_gradient,
                                            limiting_coefficient, wall_mean)

cartesian = build_mesh(rectangle_mesh_text(6, 5, split_every=0))
mixed = build_mesh(rectangle_mesh_text(8, 6, split_every=3, jitter=0.15,
                                       seed=1))


def _assert_all_close(actual, expected, **kwargs):
    assert np.allclose(actual, expected, **kwargs), \
        'max difference {}'.format(np.max(np.abs(np.asarray(actual)
                                                 - np.asarray(expected))))


def _random_fields(mesh, seed):
    rng = np.random.default_rng(seed)
    n = mesh.n_cells
    return np.stack((rng.uniform(0.5, 2., n), rng.normal(size=n),
                     rng.normal(size=n), rng.uniform(0.5, 2., n)), axis=-1)


def _wall_values(mesh, values):
    walls = mesh.wall_faces
    return wall_mean(values[mesh.face_left[walls]], mesh.face_normals[walls])


def _interior_cells(mesh):
    boundary = np.zeros(mesh.n_cells, dtype=bool)
    boundary[mesh.face_left[mesh.boundary_faces]] = True
    return np.flatnonzero(~boundary)


def test_wall_mean():
    rng = np.random.default_rng(0)
    fields = rng.normal(size=(20, 4))
    theta = rng.uniform(0., 2 * np.pi, size=20)
    n = np.stack((np.cos(theta), np.sin(theta)), axis=-1)
    mean = wall_mean(fields, n)
    _assert_all_close(np.sum(mean[:, 1:3] * n, axis=-1), 0.)
    assert np.array_equal(mean[:, [0, 3]], fields[:, [0, 3]])
    # The tangential momentum is kept
    t = np.stack((-n[:, 1], n[:, 0]), axis=-1)
    _assert_all_close(np.sum(mean[:, 1:3] * t, axis=-1),
                      np.sum(fields[:, 1:3] * t, axis=-1))


def test_linear_field_gradient():
    x = cartesian.barycenters
    values = (1. + 2. * x[:, 0] - 3. * x[:, 1])[:, None]
    rec = MeshReconstruction(k=None, mode='fluid')(cartesian, values)
    interior = _interior_cells(cartesian)
    assert interior.size > 0
    _assert_all_close(rec.gradient[interior, 0], [2., -3.])
    assert np.all(rec.alpha == 1.)
    assert rec.constraint_residual(None) == 0.


def test_uniform_field():
    # A uniform field is reconstructed exactly on every face
    values = np.tile([1., 0.3, -0.2, 2.], (mixed.n_cells, 1))
    rec = MeshReconstruction(mode='fluid')(mixed, values)
    assert np.array_equal(rec.left_values, values[mixed.face_left])
    internal = mixed.internal_faces
    assert np.array_equal(rec.right_values[internal],
                          values[mixed.face_right[internal]])
    assert np.all(np.isnan(rec.right_values[mixed.boundary_faces]))


def test_mesh_reconstruction_per_cell():
    # The vectorized reconstruction matches the cell by cell formulas
    values = _random_fields(mixed, 2)
    k = 0.75
    wall_values = _wall_values(mixed, values)
    rec = MeshReconstruction(k=k, mode='wall')(mixed, values, wall_values)

    for K in range(mixed.n_cells):
        faces = mixed.cell_faces[K]
        means = []
        for f in faces:
            if mixed.face_right[f] >= 0:
                L = mixed.face_left[f] if mixed.face_right[f] == K \
                    else mixed.face_right[f]
                means.append(face_mean(mixed, K, f, values[K], values[L]))
            elif mixed.face_markers[f] == 'wall':
                means.append(face_mean(mixed, K, f, values[K],
                                       boundary_kind='wall',
                                       wall_data=values[K]))
            else:
                means.append(face_mean(mixed, K, f, values[K],
                                       boundary_kind='fluid'))
        gradient = green_gradient(mixed, K, np.stack(means))
        _assert_all_close(rec.gradient[K], gradient, rtol=1e-10, atol=1e-12)

        cells, walls = neighbor_set(mixed, K, mode='wall')
        neighbors = np.concatenate(
            (values[cells], wall_mean(values[K], mixed.face_normals[walls])))
        for i in range(values.shape[1]):
            alpha = limiting_coefficient(mixed, K, values[K, i], gradient[i],
                                         neighbors[:, i], k=k, mode='wall')
            assert rec.alpha[K, i] == pytest.approx(alpha, rel=1e-9,
                                                    abs=1e-12)
            face_values = extrapolate_to_faces(mixed, K, values[K, i],
                                               gradient[i], alpha)
            mine = mixed.face_left[faces] == K
            _assert_all_close(rec.left_values[faces[mine], i],
                              face_values[mine], rtol=1e-9, atol=1e-12)


def test_limited_constraint():
    values = _random_fields(mixed, 3)
    wall_values = _wall_values(mixed, values)
    for k in (0.5, 0.75, 1.):
        rec = MeshReconstruction(k=k)(mixed, values, wall_values)
        assert rec.constraint_residual(k) <= 1e-12
        assert np.all((rec.alpha >= 0.) & (rec.alpha <= 1.))
        # Cells holding an extremum of their neighborhood are not extrapolated
        m, M = rec.bounds
        extremum = (values <= m) | (values >= M)
        assert np.all(rec.alpha[extremum] == 0.)


def test_unlimited_constraint_violation():
    # Unlimited gradients overshoot the neighbor bounds on random data
    values = _random_fields(mixed, 4)
    wall_values = _wall_values(mixed, values)
    unlimited = MeshReconstruction(k=None)(mixed, values, wall_values)
    assert np.all(unlimited.alpha == 1.)
    assert unlimited.constraint_residual(0.75) > 1e-3


def test_reconstruction_errors():
    with pytest.raises(ValueError):
        MeshReconstruction(k=0.3)
    with pytest.raises(ValueError):
        MeshReconstruction(mode='inflow')
    values = _random_fields(mixed, 5)
    with pytest.raises(ValueError):
        MeshReconstruction(mode='wall')(mixed, values)

    f = mixed.internal_faces[0]
    K = mixed.face_left[f]
    with pytest.raises(ValueError):
        face_mean(mixed, K, f, values[K])
    with pytest.raises(ValueError):
        face_mean(mixed, K, f, values[K], boundary_kind='inflow')
    other = [c for c in range(mixed.n_cells)
             if c not in (mixed.face_left[f], mixed.face_right[f])][0]
    with pytest.raises(ValueError):
        face_mean(mixed, other, f, values[other], values[K])
