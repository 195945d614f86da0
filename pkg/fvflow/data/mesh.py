import numpy as np
import scipy.sparse as sp

from fvflow.ops.scatter import scatter_sum
from fvflow.utils.io import strip_lines
from fvflow.utils.logging import log

MARKERS = ('wall', 'fluid', 'inflow', 'outflow')
# Interface parameter range used when the barycenter segment misses the face
THETA_CLAMP = (0.05, 0.95)


class MalformedMesh(ValueError):
    pass


class UnstructuredMesh:
    """
    A cell-centered 2D mesh made of triangles and quadrangles. The data is
    stored in flat arrays so that face and cell loops can be vectorized:

    - `vertices`: np.array of shape `(n_vertices, 2)`;
    - `cells`: list of np.arrays of vertex indices (counterclockwise);
    - `areas`: np.array of shape `(n_cells, )`;
    - `barycenters`: area centroids, shape `(n_cells, 2)`;
    - `face_vertices`: np.array of shape `(n_faces, 2)`;
    - `face_left`, `face_right`: cells on each side of the faces, the
    normal pointing from left to right (`face_right = -1` on the boundary);
    - `face_lengths`: np.array of shape `(n_faces, )`;
    - `face_normals`: unit normals, shape `(n_faces, 2)`;
    - `face_points`: the interface points `y`, on the segment joining the
    barycenters for internal faces, the face midpoints on the boundary;
    - `face_theta`: `y = (1 - theta) x_left + theta x_right` (NaN on the
    boundary);
    - `face_markers`: np.array of strings, '' for internal faces;
    - `cell_faces`: list of np.arrays, the faces of each cell in polygon order;
    - `adjacency`: scipy.sparse matrix of shape `(n_cells, n_cells)`.

    Meshes are meant to be created with `build_mesh` or `load_mesh`.
    Any additional `kwargs` passed to the constructor are assigned as
    attributes.
    """
    def __init__(self, vertices=None, cells=None, **kwargs):
        self.vertices = vertices
        self.cells = cells
        for k, v in kwargs.items():
            self[k] = v

    def __setitem__(self, key, value):
        setattr(self, key, value)

    def __getitem__(self, key):
        return getattr(self, key, None)

    def __contains__(self, key):
        return key in self.keys

    def __repr__(self):
        return 'UnstructuredMesh(n_cells={}, n_faces={}, n_boundary_faces={})'\
               .format(self.n_cells, self.n_faces, len(self.boundary_faces))

    @property
    def keys(self):
        return [key for key in self.__dict__.keys()
                if self[key] is not None and not key.startswith('__')]

    @property
    def n_cells(self):
        return len(self.cells)

    @property
    def n_faces(self):
        return self.face_left.shape[0]

    @property
    def internal_faces(self):
        return np.flatnonzero(self.face_right >= 0)

    @property
    def boundary_faces(self):
        return np.flatnonzero(self.face_right < 0)

    @property
    def wall_faces(self):
        return np.flatnonzero(self.face_markers == 'wall')

    @property
    def total_area(self):
        return float(np.sum(self.areas))

    def outward_normal(self, K, f):
        """
        :return: the unit normal of face `f` pointing out of cell `K`.
        """
        if self.face_left[f] == K:
            return self.face_normals[f]
        if self.face_right[f] == K:
            return -self.face_normals[f]
        raise ValueError('Face {} is not a face of cell {}'.format(f, K))

    def closure_residual(self):
        """
        Per-cell sum of `|f| n_f` over the faces of the cell, with outward
        normals. It vanishes for closed polygons.
        :return: np.array of shape `(n_cells, 2)`.
        """
        weighted = self.face_lengths[:, None] * self.face_normals
        return scatter_sum(weighted, self.face_left, self.n_cells) \
            - scatter_sum(weighted, self.face_right, self.n_cells)

    def perimeters(self):
        return scatter_sum(self.face_lengths, self.face_left, self.n_cells) \
            + scatter_sum(self.face_lengths, self.face_right, self.n_cells)


def _cross(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _polygon_geometry(points):
    nxt = np.roll(points, -1, axis=0)
    cross = _cross(points, nxt)
    area = 0.5 * np.sum(cross)
    if area == 0:
        return area, None
    centroid = np.sum((points + nxt) * cross[:, None], axis=0) / (6. * area)
    return area, centroid


def _is_convex(points):
    edges = np.roll(points, -1, axis=0) - points
    turns = _cross(edges, np.roll(edges, -1, axis=0))
    return np.all(turns > 0)


def _parse_header(lines, position, keyword):
    if position >= len(lines):
        raise MalformedMesh('Missing "{} <count>" section'.format(keyword))
    line_no, line = lines[position]
    tokens = line.split()
    if len(tokens) != 2 or tokens[0] != keyword:
        raise MalformedMesh('Line {}: expected "{} <count>", got "{}"'
                            .format(line_no, keyword, line))
    try:
        count = int(tokens[1])
    except ValueError:
        raise MalformedMesh('Line {}: invalid count "{}"'
                            .format(line_no, tokens[1]))
    if count < 0 or position + 1 + count > len(lines):
        raise MalformedMesh('Line {}: section "{}" announces {} lines'
                            .format(line_no, keyword, count))
    return count, lines[position + 1:position + 1 + count]


def _parse_vertices(block):
    vertices = []
    for line_no, line in block:
        tokens = line.split()
        try:
            xy = [float(t) for t in tokens]
        except ValueError:
            xy = []
        if len(xy) != 2 or not np.all(np.isfinite(xy)):
            raise MalformedMesh('Line {}: expected "x y", got "{}"'
                                .format(line_no, line))
        vertices.append(xy)
    return np.array(vertices, dtype=float).reshape(-1, 2)


def _parse_cells(block, vertices):
    cells = []
    for line_no, line in block:
        try:
            tokens = [int(t) for t in line.split()]
        except ValueError:
            raise MalformedMesh('Line {}: expected integers, got "{}"'
                                .format(line_no, line))
        if len(tokens) < 1 or tokens[0] not in (3, 4) \
                or len(tokens) != tokens[0] + 1:
            raise MalformedMesh('Line {}: cells must be "3 i j k" or '
                                '"4 i j k l", got "{}"'.format(line_no, line))
        ids = np.array(tokens[1:], dtype=int)
        if np.any(ids < 0) or np.any(ids >= vertices.shape[0]):
            raise MalformedMesh('Line {}: vertex index out of range'
                                .format(line_no))
        if len(set(ids.tolist())) != len(ids):
            raise MalformedMesh('Line {}: repeated vertex in cell'
                                .format(line_no))
        cells.append((line_no, ids))
    return cells


def _interface(x_left, x_right, a, b):
    """
    Intersection of the segment [x_left, x_right] with the face [a, b].
    :return: tuple `(theta, point)`, or None when they do not intersect.
    """
    d = x_right - x_left
    e = b - a
    den = _cross(d, e)
    if den == 0:
        return None
    w = a - x_left
    theta = _cross(w, e) / den
    s = _cross(w, d) / den
    if not (0. < theta < 1. and 0. <= s <= 1.):
        return None
    return theta, x_left + theta * d


def build_mesh(text):
    """
    Builds an UnstructuredMesh from the text format:

        vertices N
        x y            (N lines)
        cells M
        k i1 ... ik    (M lines, k in {3, 4}, 0-based, counterclockwise)
        boundary B
        i j marker     (B lines, marker in wall|fluid|inflow|outflow)

    Everything after a `#` is a comment. Every boundary edge must be marked.
    :param text: string, the content of a mesh file;
    :return: an UnstructuredMesh.
    """
    lines = strip_lines(text)
    n_v, block = _parse_header(lines, 0, 'vertices')
    vertices = _parse_vertices(block)
    position = 1 + n_v
    n_c, block = _parse_header(lines, position, 'cells')
    cells = _parse_cells(block, vertices)
    position += 1 + n_c
    n_b, markers_block = _parse_header(lines, position, 'boundary')
    position += 1 + n_b
    if position != len(lines):
        raise MalformedMesh('Line {}: unexpected content after the boundary '
                            'section'.format(lines[position][0]))
    if n_c == 0:
        raise MalformedMesh('The mesh has no cells')

    # Cell geometry
    areas = np.zeros(n_c)
    barycenters = np.zeros((n_c, 2))
    for K, (line_no, ids) in enumerate(cells):
        area, centroid = _polygon_geometry(vertices[ids])
        if area == 0:
            raise MalformedMesh('Line {}: cell {} has zero area'
                                .format(line_no, K))
        if area < 0:
            raise MalformedMesh('Line {}: cell {} is not counterclockwise'
                                .format(line_no, K))
        if not _is_convex(vertices[ids]):
            raise MalformedMesh('Line {}: cell {} is not a convex polygon'
                                .format(line_no, K))
        areas[K] = area
        barycenters[K] = centroid

    # Faces, oriented from the first cell that references them
    edge_index = {}
    face_vertices, face_left, face_right = [], [], []
    cell_faces = []
    for K, (line_no, ids) in enumerate(cells):
        faces = []
        for a, b in zip(ids.tolist(), np.roll(ids, -1).tolist()):
            key = (min(a, b), max(a, b))
            if key not in edge_index:
                edge_index[key] = len(face_vertices)
                face_vertices.append((a, b))
                face_left.append(K)
                face_right.append(-1)
            else:
                f = edge_index[key]
                # A shared edge is traversed in opposite directions
                if face_right[f] != -1 or face_vertices[f] != (b, a):
                    raise MalformedMesh('Line {}: duplicate face ({}, {})'
                                        .format(line_no, a, b))
                face_right[f] = K
            faces.append(edge_index[key])
        cell_faces.append(np.array(faces, dtype=int))
    face_vertices = np.array(face_vertices, dtype=int)
    face_left = np.array(face_left, dtype=int)
    face_right = np.array(face_right, dtype=int)
    n_f = face_vertices.shape[0]

    # Boundary markers
    face_markers = np.full(n_f, '', dtype=object)
    for line_no, line in markers_block:
        tokens = line.split()
        if len(tokens) != 3:
            raise MalformedMesh('Line {}: expected "i j marker", got "{}"'
                                .format(line_no, line))
        try:
            a, b = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise MalformedMesh('Line {}: invalid vertex indices'
                                .format(line_no))
        marker = tokens[2]
        if marker not in MARKERS:
            raise MalformedMesh('Line {}: unknown marker {}, available: {}'
                                .format(line_no, marker, list(MARKERS)))
        f = edge_index.get((min(a, b), max(a, b)))
        if f is None or face_right[f] != -1:
            raise MalformedMesh('Line {}: ({}, {}) is not a boundary edge'
                                .format(line_no, a, b))
        if face_markers[f]:
            raise MalformedMesh('Line {}: boundary edge ({}, {}) is marked '
                                'twice'.format(line_no, a, b))
        face_markers[f] = marker
    unmarked = np.flatnonzero((face_right < 0) & (face_markers == ''))
    if unmarked.size:
        a, b = face_vertices[unmarked[0]]
        raise MalformedMesh('Boundary edge ({}, {}) has no marker ({} '
                            'unmarked edges)'.format(a, b, unmarked.size))

    # Face geometry
    start = vertices[face_vertices[:, 0]]
    end = vertices[face_vertices[:, 1]]
    edges = end - start
    face_lengths = np.linalg.norm(edges, axis=-1)
    # Counterclockwise cells: the outward normal is the edge rotated clockwise
    face_normals = np.stack((edges[:, 1], -edges[:, 0]), axis=-1) \
        / face_lengths[:, None]
    face_points = 0.5 * (start + end)
    face_theta = np.full(n_f, np.nan)
    for f in np.flatnonzero(face_right >= 0):
        x_left = barycenters[face_left[f]]
        x_right = barycenters[face_right[f]]
        found = _interface(x_left, x_right, start[f], end[f])
        if found is None:
            d = x_right - x_left
            theta = np.dot(face_points[f] - x_left, d) / np.dot(d, d)
            theta = float(np.clip(theta, *THETA_CLAMP))
            log('Mesh quality warning: the barycenters of cells {} and {} are '
                'not joined through face {}, using the face midpoint '
                '(theta={:.3f})'.format(face_left[f], face_right[f], f, theta))
        else:
            theta, face_points[f] = found
        face_theta[f] = theta

    internal = face_right >= 0
    row = np.concatenate((face_left[internal], face_right[internal]))
    col = np.concatenate((face_right[internal], face_left[internal]))
    adjacency = sp.csr_matrix((np.ones_like(row, dtype=float), (row, col)),
                              shape=(n_c, n_c))

    return UnstructuredMesh(
        vertices=vertices,
        cells=[ids for _, ids in cells],
        areas=areas,
        barycenters=barycenters,
        face_vertices=face_vertices,
        face_left=face_left,
        face_right=face_right,
        face_lengths=face_lengths,
        face_normals=face_normals,
        face_points=face_points,
        face_theta=face_theta,
        face_markers=face_markers.astype(str),
        cell_faces=cell_faces,
        adjacency=adjacency,
    )


def load_mesh(filename):
    """
    Reads a mesh file (see `build_mesh` for the format).
    :param filename: path to the mesh file;
    :return: an UnstructuredMesh.
    """
    with open(filename, 'r', encoding='utf-8') as f:
        text = f.read()
    try:
        return build_mesh(text)
    except MalformedMesh as e:
        raise MalformedMesh('{}: {}'.format(filename, e))


def interface_point(mesh, K, f):
    """
    The interface point of an internal face, seen from one of its cells.
    :param mesh: an UnstructuredMesh;
    :param K: index of a cell adjacent to `f`;
    :param f: index of an internal face;
    :return: tuple `(point, theta)` with `point = (1 - theta) x_K + theta x_L`,
    where `L` is the other cell of the face.
    """
    if mesh.face_right[f] < 0:
        raise ValueError('Face {} is a boundary face'.format(f))
    point = mesh.face_points[f].copy()
    if mesh.face_left[f] == K:
        return point, float(mesh.face_theta[f])
    if mesh.face_right[f] == K:
        return point, 1. - float(mesh.face_theta[f])
    raise ValueError('Face {} is not a face of cell {}'.format(f, K))


def neighbor_set(mesh, K, mode='fluid'):
    """
    Cells sharing a face with `K` and, in wall mode, the wall faces of `K`
    that act as pseudo-neighbors.
    :param mesh: an UnstructuredMesh;
    :param K: cell index;
    :param mode: 'fluid' or 'wall';
    :return: tuple `(cells, wall_faces)` of sorted np.arrays.
    """
    if mode not in ('fluid', 'wall'):
        raise ValueError('mode must be "fluid" or "wall", got {}'.format(mode))
    cells = np.sort(mesh.adjacency[K].indices)
    if mode == 'fluid':
        return cells, np.array([], dtype=int)
    faces = mesh.cell_faces[K]
    return cells, np.sort(faces[mesh.face_markers[faces] == 'wall'])


def rectangle_mesh_text(nx, ny, width=1., height=1., split_every=4,
                        markers=None, jitter=0., seed=0):
    """
    Writes a mesh of the rectangle `[0, width] x [0, height]` in the text
    format of `build_mesh`. The `nx * ny` quadrangles of a regular grid are
    kept, except those with `(i + j) % split_every == 0`, which are cut into
    two triangles along alternating diagonals.
    :param nx: number of columns;
    :param ny: number of rows;
    :param width: width of the rectangle;
    :param height: height of the rectangle;
    :param split_every: period of the split quadrangles (0 for none, 1 for
    all);
    :param markers: dict with the markers of the 'bottom', 'right', 'top' and
    'left' sides (default: walls at the bottom and top, fluid elsewhere);
    :param jitter: random displacement of the interior vertices, as a fraction
    of the grid step (must stay below 0.25 to keep cells convex);
    :param seed: seed of the displacement;
    :return: string, the mesh file content.
    """
    sides = {'bottom': 'wall', 'right': 'fluid', 'top': 'wall',
             'left': 'fluid'}
    if markers is not None:
        sides.update(markers)
    x, y = np.meshgrid(np.linspace(0., width, nx + 1),
                       np.linspace(0., height, ny + 1))
    points = np.stack((x.ravel(), y.ravel()), axis=-1)
    if jitter:
        rng = np.random.default_rng(seed)
        step = min(width / nx, height / ny)
        interior = ((x > 0) & (x < width) & (y > 0) & (y < height)).ravel()
        points[interior] += jitter * step * rng.uniform(
            -1., 1., size=(int(interior.sum()), 2))

    def v(i, j):
        return j * (nx + 1) + i

    cells = []
    for j in range(ny):
        for i in range(nx):
            a, b, c, d = v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)
            if split_every and (i + j) % split_every == 0:
                if (i // split_every) % 2:
                    cells += [(a, b, d), (b, c, d)]
                else:
                    cells += [(a, b, c), (a, c, d)]
            else:
                cells.append((a, b, c, d))

    boundary = [(v(i, 0), v(i + 1, 0), sides['bottom']) for i in range(nx)]
    boundary += [(v(nx, j), v(nx, j + 1), sides['right']) for j in range(ny)]
    boundary += [(v(i + 1, ny), v(i, ny), sides['top']) for i in range(nx)]
    boundary += [(v(0, j + 1), v(0, j), sides['left']) for j in range(ny)]

    lines = ['vertices {}'.format(len(points))]
    lines += ['{!r} {!r}'.format(float(px), float(py)) for px, py in points]
    lines.append('cells {}'.format(len(cells)))
    lines += ['{} {}'.format(len(c), ' '.join(str(k) for k in c))
              for c in cells]
    lines.append('boundary {}'.format(len(boundary)))
    lines += ['{} {} {}'.format(*edge) for edge in boundary]
    return '\n'.join(lines) + '\n'
