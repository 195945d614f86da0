import os

import numpy as np
import pytest

from fvflow.data.mesh import (MalformedMesh, build_mesh, interface_point,
                              load_mesh, neighbor_set, rectangle_mesh_text)

SQUARE = """
# unit square cut along its diagonal
vertices 4
0 0
1 0
1 1
0 1
cells 2
3 0 1 2
3 0 2 3
boundary 4
0 1 wall
1 2 fluid
2 3 inflow
3 0 outflow
"""

# Two triangles whose barycenters are not joined through the shared face
SKEWED = """
vertices 4
0 0
0 1
-1 5
1 5
cells 2
3 0 1 2
3 0 3 1
boundary 4
1 2 wall
2 0 wall
0 3 wall
3 1 wall
"""


def _assert_all_close(actual, expected, **kwargs):
    assert np.allclose(actual, expected, **kwargs), \
        'max difference {}'.format(np.max(np.abs(np.asarray(actual)
                                                 - np.asarray(expected))))


def _check_mesh(mesh):
    assert np.all(mesh.areas > 0)
    _assert_all_close(mesh.closure_residual(), 0., atol=1e-13)
    _assert_all_close(np.linalg.norm(mesh.face_normals, axis=-1), 1.)
    assert np.all(mesh.face_markers[mesh.boundary_faces] != '')
    assert np.all(mesh.face_markers[mesh.internal_faces] == '')
    assert (mesh.adjacency != mesh.adjacency.T).nnz == 0
    theta = mesh.face_theta[mesh.internal_faces]
    assert np.all((theta > 0.) & (theta < 1.))
    assert np.all(np.isnan(mesh.face_theta[mesh.boundary_faces]))


def test_build_mesh():
    mesh = build_mesh(SQUARE)
    _check_mesh(mesh)
    assert mesh.n_cells == 2
    assert mesh.n_faces == 5
    assert mesh.total_area == pytest.approx(1.)
    _assert_all_close(mesh.barycenters, [[2. / 3., 1. / 3.],
                                         [1. / 3., 2. / 3.]])
    _assert_all_close(mesh.perimeters(), 2. + np.sqrt(2.))

    f = mesh.internal_faces[0]
    assert (mesh.face_left[f], mesh.face_right[f]) == (0, 1)
    assert mesh.face_theta[f] == pytest.approx(0.5)
    _assert_all_close(mesh.face_points[f], [0.5, 0.5])
    # From the left cell towards the right cell
    _assert_all_close(mesh.face_normals[f], np.array([-1., 1.]) / np.sqrt(2.))
    _assert_all_close(mesh.outward_normal(1, f), -mesh.face_normals[f])
    assert sorted(mesh.face_markers[mesh.boundary_faces]) == \
        ['fluid', 'inflow', 'outflow', 'wall']
    assert mesh.wall_faces.size == 1
    assert 'areas' in mesh
    assert mesh['nothing'] is None


def test_interface_point():
    mesh = build_mesh(SQUARE)
    f = mesh.internal_faces[0]
    point, theta = interface_point(mesh, 0, f)
    _assert_all_close(point, [0.5, 0.5])
    _, theta_right = interface_point(mesh, 1, f)
    assert theta + theta_right == pytest.approx(1.)
    with pytest.raises(ValueError):
        interface_point(mesh, 0, mesh.boundary_faces[0])


def test_neighbor_set():
    mesh = build_mesh(SQUARE)
    cells, walls = neighbor_set(mesh, 0)
    assert cells.tolist() == [1]
    assert walls.size == 0
    cells, walls = neighbor_set(mesh, 0, mode='wall')
    assert walls.tolist() == mesh.wall_faces.tolist()
    cells, walls = neighbor_set(mesh, 1, mode='wall')
    assert cells.tolist() == [0]
    assert walls.size == 0
    with pytest.raises(ValueError):
        neighbor_set(mesh, 0, mode='inflow')


def test_skewed_interface(capsys):
    mesh = build_mesh(SKEWED)
    _check_mesh(mesh)
    f = mesh.internal_faces[0]
    assert mesh.face_theta[f] == pytest.approx(0.5)
    _assert_all_close(mesh.face_points[f], [0., 0.5])
    assert 'Mesh quality warning' in capsys.readouterr().out


def test_rectangle_mesh():
    mesh = build_mesh(rectangle_mesh_text(16, 10, jitter=0.1, seed=3))
    _check_mesh(mesh)
    assert mesh.n_cells == 200
    assert mesh.total_area == pytest.approx(1.)
    assert mesh.wall_faces.size == 32
    assert np.sum(mesh.face_markers == 'fluid') == 20

    mesh = build_mesh(rectangle_mesh_text(
        4, 3, width=2., height=3., split_every=0,
        markers={'left': 'inflow', 'right': 'outflow'}))
    assert mesh.n_cells == 12
    _assert_all_close(mesh.areas, 0.5)
    assert np.sum(mesh.face_markers == 'inflow') == 3
    assert np.sum(mesh.face_markers == 'outflow') == 3

    mesh = build_mesh(rectangle_mesh_text(3, 3, split_every=1))
    assert mesh.n_cells == 18


def test_load_mesh(tmp_path):
    filename = str(tmp_path / 'square.mesh')
    with open(filename, 'w') as f:
        f.write(SQUARE)
    assert load_mesh(filename).n_cells == 2

    with open(filename, 'w') as f:
        f.write(SQUARE.replace('3 0 2 3', '3 0 3 2'))
    with pytest.raises(MalformedMesh) as info:
        load_mesh(filename)
    assert filename in str(info.value)


@pytest.mark.parametrize('old, new', [
    ('3 0 2 3', '3 0 3 2'),                  # clockwise
    ('3 0 2 3', '3 0 2 2'),                  # repeated vertex
    ('3 0 2 3', '3 0 2 7'),                  # vertex out of range
    ('3 0 2 3', '3 0 2'),                    # wrong vertex count
    ('3 0 2 3', '3 0 a 3'),                  # not an integer
    ('cells 2', 'cells 3'),                  # count mismatch
    ('vertices 4', 'vertex 4'),              # bad header
    ('0 1 wall', '0 1 door'),                # unknown marker
    ('0 1 wall', '0 2 wall'),                # internal edge
    ('3 0 outflow', '1 0 wall'),             # marked twice, one unmarked
    ('3 0 outflow\n', '3 0 outflow\n0 0\n'),  # trailing content
    ('3 0 outflow\n', ''),                   # missing boundary line
    ('1 1\n', 'nan 1\n'),                    # non finite vertex
])
def test_malformed_mesh(old, new):
    assert old in SQUARE
    with pytest.raises(MalformedMesh):
        build_mesh(SQUARE.replace(old, new, 1))


def test_malformed_cells():
    quad = 'vertices 4\n0 0\n1 0\n1 1\n0 1\ncells {}\n{}\nboundary 0\n'
    with pytest.raises(MalformedMesh):
        build_mesh(quad.format(0, ''))
    with pytest.raises(MalformedMesh):
        # Degenerate
        build_mesh('vertices 3\n0 0\n1 0\n2 0\ncells 1\n3 0 1 2\nboundary 0\n')
    with pytest.raises(MalformedMesh):
        # Not convex
        build_mesh('vertices 4\n0 0\n2 0\n0.5 0.5\n0 2\ncells 1\n4 0 1 2 3\n'
                   'boundary 0\n')
    with pytest.raises(MalformedMesh):
        # The same edge used twice in the same direction
        build_mesh('vertices 4\n0 0\n1 0\n1 1\n0 1\ncells 2\n3 0 1 2\n'
                   '3 1 2 3\nboundary 0\n')


def test_sample_mesh():
    filename = os.path.join(os.path.dirname(__file__), '..', '..', 'configs',
                            'channel.mesh')
    mesh = load_mesh(filename)
    _check_mesh(mesh)
    assert mesh.n_cells == 6
    assert mesh.total_area == pytest.approx(3.)
    assert np.sum(mesh.face_markers == 'inflow') == 2
    assert np.sum(mesh.face_markers == 'outflow') == 2
