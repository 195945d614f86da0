import numpy as np

from fvflow.data.mesh import neighbor_set
from fvflow.ops.scatter import scatter_max, scatter_min, scatter_sum

# Default limiting strength (STS)
DEFAULT_K = 0.75


def wall_mean(fields, normal):
    """
    Face mean of the fields `(rho, rho u, rho v, p)` on a rigid wall: density
    and pressure are copied and the normal component of the momentum is
    removed, `rho (u - (u . n) n)`.
    :param fields: np.array of shape `(..., 4)`;
    :param normal: unit normal(s) of the wall, shape `(..., 2)`;
    :return: np.array of shape `(..., 4)`.
    """
    fields = np.asarray(fields, dtype=float)
    n = np.asarray(normal, dtype=float)
    momentum = fields[..., 1:3]
    tangential = momentum - np.sum(momentum * n, axis=-1, keepdims=True) * n
    rho, mx, my, p = np.broadcast_arrays(fields[..., 0], tangential[..., 0],
                                         tangential[..., 1], fields[..., 3])
    return np.stack((rho, mx, my, p), axis=-1)


def face_mean(mesh, K, f, z_K, z_neighbor=None, boundary_kind='none',
              wall_data=None):
    """
    Face mean `z_{K,f}` used by the Green formula.
    :param mesh: an UnstructuredMesh;
    :param K: cell index;
    :param f: index of a face of K;
    :param z_K: value(s) in K;
    :param z_neighbor: value(s) in the other cell of an internal face;
    :param boundary_kind: 'none' (internal face), 'fluid' or 'wall';
    :param wall_data: the fields `(rho, rho u, rho v, p)` of K, for walls;
    :return: `(1 - theta) z_K + theta z_L` on internal faces, `z_K` on fluid
    boundaries, the wall mean of `wall_data` on walls.
    """
    if boundary_kind == 'none':
        if z_neighbor is None:
            raise ValueError('An internal face needs the neighbor value')
        if K not in (mesh.face_left[f], mesh.face_right[f]):
            raise ValueError('Face {} is not a face of cell {}'.format(f, K))
        # Always weighted from the left cell so both sides agree bit for bit
        if mesh.face_left[f] == K:
            z_l, z_r = np.asarray(z_K), np.asarray(z_neighbor)
        else:
            z_l, z_r = np.asarray(z_neighbor), np.asarray(z_K)
        theta_l = float(mesh.face_theta[f])
        return (1. - theta_l) * z_l + theta_l * z_r
    if boundary_kind == 'fluid':
        return np.asarray(z_K, dtype=float)
    if boundary_kind == 'wall':
        if wall_data is None:
            raise ValueError('A wall face needs the cell fields')
        return wall_mean(wall_data, mesh.outward_normal(K, f))
    raise ValueError('boundary_kind must be "none", "fluid" or "wall", got {}'
                     .format(boundary_kind))


def green_gradient(mesh, K, face_means):
    """
    Gradient of a field in cell K from its face means,
    `(1 / |K|) sum_f |f| z_{K,f} n_f` with outward normals.
    :param mesh: an UnstructuredMesh;
    :param K: cell index;
    :param face_means: np.array with one row per face of K (in the order of
    `mesh.cell_faces[K]`), shape `(n_faces_K, ...)`;
    :return: np.array of shape `face_means.shape[1:] + (2, )`.
    """
    faces = mesh.cell_faces[K]
    face_means = np.asarray(face_means, dtype=float)
    normals = np.stack([mesh.outward_normal(K, f) for f in faces])
    weights = mesh.face_lengths[faces]
    weighted = face_means[..., None] * normals.reshape(
        (len(faces),) + (1,) * (face_means.ndim - 1) + (2,))
    weighted = weighted * weights.reshape((-1,) + (1,) * (weighted.ndim - 1))
    return np.sum(weighted, axis=0) / mesh.areas[K]


def _alpha(z, m, M, den, k):
    if k is None:
        return np.ones_like(z)
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = k * np.minimum(M - z, z - m) / den
    limited = np.where((z <= m) | (z >= M), 0., np.minimum(1., ratio))
    return np.where(den > 0, limited, 1.)


def limiting_coefficient(mesh, K, z_K, gradient, neighbor_values, k=DEFAULT_K,
                         mode='fluid'):
    """
    Limiting coefficient of a scalar field in cell K:
    `alpha = min(1, k min(M - z_K, z_K - m) / max_f |grad z . (y_f - x_K)|)`,
    where `m` and `M` are the extreme values over the neighbor set and the
    maximum runs over the faces leading to a neighbor (internal faces, and wall
    faces in wall mode). `alpha = 1` when that maximum is zero, otherwise
    `alpha = 0` when `z_K <= m` or `z_K >= M`.
    :param mesh: an UnstructuredMesh;
    :param K: cell index;
    :param z_K: value of the field in K;
    :param gradient: np.array of shape `(2, )`;
    :param neighbor_values: values of the field on the neighbor set, i.e.,
    neighbor cells (and wall pseudo-values in wall mode);
    :param k: limiting strength in [1/2, 1], None for no limitation;
    :param mode: 'fluid' or 'wall';
    :return: float, the limiting coefficient.
    """
    _, wall_faces = neighbor_set(mesh, K, mode=mode)
    faces = mesh.cell_faces[K]
    constrained = [f for f in faces
                   if mesh.face_right[f] >= 0 or f in wall_faces]
    x_K = mesh.barycenters[K]
    den = max([abs(np.dot(gradient, mesh.face_points[f] - x_K))
               for f in constrained] + [0.])
    neighbor_values = np.asarray(neighbor_values, dtype=float)
    m = np.min(neighbor_values) if neighbor_values.size else np.inf
    M = np.max(neighbor_values) if neighbor_values.size else -np.inf
    return float(_alpha(np.float64(z_K), m, M, np.float64(den), k))


def extrapolate_to_faces(mesh, K, z_K, gradient, alpha):
    """
    Face values `z_K + alpha grad z . (y_f - x_K)` for every face of K.
    :param mesh: an UnstructuredMesh;
    :param K: cell index;
    :param z_K: value of the field in K;
    :param gradient: np.array of shape `(2, )`;
    :param alpha: limiting coefficient;
    :return: np.array with one value per face of K (order of
    `mesh.cell_faces[K]`).
    """
    faces = mesh.cell_faces[K]
    offsets = mesh.face_points[faces] - mesh.barycenters[K]
    return z_K + alpha * (offsets @ np.asarray(gradient, dtype=float))


class CellReconstruction:
    """
    Result of a second order reconstruction on all cells of a mesh.

    **Arguments**

    - `values`: the reconstructed cell values, shape `(n_cells, n_fields)`;
    - `gradient`: np.array of shape `(n_cells, n_fields, 2)`;
    - `alpha`: limiting coefficients, shape `(n_cells, n_fields)`;
    - `left_values`: values on the left side of each face, shape
    `(n_faces, n_fields)`;
    - `right_values`: values on the right side (NaN on boundary faces);
    - `bounds`: tuple `(m, M)` of neighbor minima and maxima;
    - `increments`: list of `(cells, values)` pairs with the limited
    increments `alpha grad z . (y - x)` on the constrained faces;
    """
    def __init__(self, values, gradient, alpha, left_values, right_values,
                 bounds, increments):
        self.values = values
        self.gradient = gradient
        self.alpha = alpha
        self.left_values = left_values
        self.right_values = right_values
        self.bounds = bounds
        self.increments = increments

    def constraint_residual(self, k):
        """
        Largest violation of `-k (z_K - m) <= alpha grad z . (y - x) <=
        k (M - z_K)` over all constrained faces with a nonzero increment.
        :param k: the limiting strength used for the reconstruction;
        :return: float, 0 when the constraint holds.
        """
        if k is None:
            return 0.
        m, M = self.bounds
        z_minus_m, M_minus_z = self.values - m, M - self.values
        residual = 0.
        for cells, increment in self.increments:
            active = increment != 0
            upper = increment - k * M_minus_z[cells]
            lower = -k * z_minus_m[cells] - increment
            violation = np.where(active, np.maximum(upper, lower), 0.)
            if violation.size:
                residual = max(residual, float(np.max(violation)))
        return residual

    def __repr__(self):
        return 'CellReconstruction(n_cells={}, n_fields={})'.format(
            *self.alpha.shape)


class MeshReconstruction:
    """
    Second order reconstruction of cell fields on an unstructured mesh, for
    all cells and fields at once. All gradients and limiting coefficients are
    computed from the given cell values before any face value is formed.

    Face means are the theta-weighted means on internal faces and the cell
    values on boundary faces, except on walls (in wall mode) where the given
    wall values are used; wall values also act as neighbor values for the
    limitation.

    **Arguments**

    - `k`: limiting strength in [1/2, 1], or None for unlimited gradients;
    - `mode`: 'wall' to treat faces marked wall as pseudo-neighbors, 'fluid'
    to treat every boundary face as a fluid boundary;
    """
    def __init__(self, k=DEFAULT_K, mode='wall'):
        if k is not None and not 0.5 <= k <= 1.:
            raise ValueError('k must be in [0.5, 1], got {}'.format(k))
        if mode not in ('fluid', 'wall'):
            raise ValueError('mode must be "fluid" or "wall", got {}'
                             .format(mode))
        self.k = k
        self.mode = mode

    def __call__(self, mesh, values, wall_values=None):
        """
        :param mesh: an UnstructuredMesh;
        :param values: np.array of shape `(n_cells, n_fields)`;
        :param wall_values: np.array of shape `(n_wall_faces, n_fields)`,
        face means on the faces listed by `mesh.wall_faces` (wall mode only);
        :return: a CellReconstruction.
        """
        values = np.asarray(values, dtype=float)
        n_cells = mesh.n_cells
        left, right = mesh.face_left, mesh.face_right
        internal = mesh.internal_faces
        walls = mesh.wall_faces if self.mode == 'wall' else np.array([], int)
        if walls.size and wall_values is None:
            raise ValueError('Wall mode needs the wall face values')

        # Face means
        theta = mesh.face_theta[internal][:, None]
        means = values[left].copy()
        means[internal] = (1. - theta) * values[left[internal]] \
            + theta * values[right[internal]]
        if walls.size:
            means[walls] = wall_values

        # Green gradients
        weighted = (mesh.face_lengths[:, None] * mesh.face_normals)[:, None, :] \
            * means[:, :, None]
        gradient = scatter_sum(weighted, left, n_cells) \
            - scatter_sum(weighted, right, n_cells)
        gradient /= mesh.areas[:, None, None]

        # Neighbor bounds
        neighbors = np.concatenate((values[right[internal]],
                                    values[left[internal]]))
        owners = np.concatenate((left[internal], right[internal]))
        if walls.size:
            neighbors = np.concatenate((neighbors, wall_values))
            owners = np.concatenate((owners, left[walls]))
        m = scatter_min(neighbors, owners, n_cells)
        M = scatter_max(neighbors, owners, n_cells)

        # Unlimited increments grad z . (y - x) on every (cell, face) pair
        def increments(cells, faces):
            offsets = mesh.face_points[faces] - mesh.barycenters[cells]
            return np.einsum('nfd,nd->nf', gradient[cells], offsets)

        d_left = increments(left, np.arange(mesh.n_faces))
        d_right = increments(right[internal], internal)
        constrained = np.concatenate((internal, walls))
        den = scatter_max(np.abs(np.concatenate((d_left[constrained],
                                                 d_right))),
                          np.concatenate((left[constrained],
                                          right[internal])), n_cells)
        den = np.maximum(den, 0.)
        alpha = _alpha(values, m, M, den, self.k)

        left_values = values[left] + alpha[left] * d_left
        right_values = np.full_like(left_values, np.nan)
        right_values[internal] = values[right[internal]] \
            + alpha[right[internal]] * d_right

        return CellReconstruction(
            values, gradient, alpha, left_values, right_values, (m, M),
            [(left[constrained], alpha[left[constrained]] * d_left[constrained]),
             (right[internal], alpha[right[internal]] * d_right)])

    def __repr__(self):
        return 'MeshReconstruction(k={}, mode={})'.format(self.k, self.mode)
