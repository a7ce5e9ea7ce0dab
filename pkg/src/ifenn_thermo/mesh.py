"""Meshes of linear intervals and triangles, quadrature, and a text format.

A mesh is immutable after construction: the node/element arrays are marked
read-only and every invariant (index ranges, positive element measures,
facet references) is checked up front so downstream assembly never has to.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Mesh",
    "QuadratureRule",
    "MeshFormatError",
    "build_interval_mesh",
    "build_rect_mesh",
    "load_mesh",
    "default_rule",
    "quadrature_points",
    "element_measures",
    "element_gradients",
    "boundary_nodes",
    "facet_geometry",
    "find_elements",
]


class MeshFormatError(ValueError):
    """Raised for malformed mesh files; message carries the line number."""


@dataclass(frozen=True)
class QuadratureRule:
    """Integration points in reference coordinates with reference weights.

    Reference domains: the unit interval [0, 1] and the unit triangle with
    vertices (0,0), (1,0), (0,1). Weights sum to the reference measure.
    """

    dim: int
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", np.atleast_2d(np.asarray(self.points, dtype=float)))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if self.points.shape[0] != self.weights.shape[0]:
            raise ValueError("quadrature points and weights disagree in count")

    @property
    def n_points(self):
        return self.weights.shape[0]


def _gauss_interval(n):
    # Gauss-Legendre on [-1, 1] mapped to [0, 1]
    xs, ws = np.polynomial.legendre.leggauss(n)
    return QuadratureRule(1, ((xs + 1.0) / 2.0)[:, None], ws / 2.0)


def _triangle_rule(n):
    if n == 1:
        pts = np.array([[1.0 / 3.0, 1.0 / 3.0]])
        wts = np.array([0.5])
    elif n == 3:
        pts = np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]], dtype=float)
        wts = np.full(3, 1.0 / 6.0)
    else:
        raise ValueError(f"no triangle rule with {n} points (have 1 and 3)")
    return QuadratureRule(2, pts, wts)


def default_rule(dim, n_points=None):
    """Quadrature rule for element dimension ``dim``.

    Defaults exceed the minimum order by one (2-point interval, 3-point
    triangle) so products of linear shape functions integrate exactly.
    """
    if dim == 1:
        return _gauss_interval(2 if n_points is None else n_points)
    if dim == 2:
        return _triangle_rule(3 if n_points is None else n_points)
    raise ValueError(f"unsupported dimension {dim}")


@dataclass(frozen=True)
class Mesh:
    """Nodes, simplex elements and tagged boundary facets.

    1-D facets are single node ids; 2-D facets are 2-node edges.
    """

    dim: int
    nodes: np.ndarray
    elements: np.ndarray
    facets: dict = field(default_factory=dict)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float).reshape(-1, self.dim)
        elements = np.asarray(self.elements, dtype=np.int64).reshape(-1, self.dim + 1)
        facets = {
            tag: np.asarray(f, dtype=np.int64).reshape(-1, self.dim)
            for tag, f in self.facets.items()
        }
        if self.dim not in (1, 2):
            raise ValueError(f"unsupported dimension {self.dim}")
        if elements.size and (elements.min() < 0 or elements.max() >= len(nodes)):
            raise ValueError("element references a node id out of range")
        for tag, f in facets.items():
            if f.size and (f.min() < 0 or f.max() >= len(nodes)):
                raise ValueError(f"facet group '{tag}' references a node id out of range")
        meas = _measures(self.dim, nodes, elements)
        if np.any(meas <= 0.0):
            bad = int(np.argmin(meas))
            raise ValueError(f"element {bad} has non-positive measure {meas[bad]:g}")
        for arr in (nodes, elements, *facets.values()):
            arr.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "facets", facets)

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_elements(self):
        return self.elements.shape[0]


def _measures(dim, nodes, elements):
    if dim == 1:
        return nodes[elements[:, 1], 0] - nodes[elements[:, 0], 0]
    p0 = nodes[elements[:, 0]]
    p1 = nodes[elements[:, 1]]
    p2 = nodes[elements[:, 2]]
    return 0.5 * ((p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1]) - (p2[:, 0] - p0[:, 0]) * (p1[:, 1] - p0[:, 1]))


def element_measures(mesh):
    """Lengths (1-D) or areas (2-D) per element."""
    return _measures(mesh.dim, mesh.nodes, mesh.elements)


def build_interval_mesh(n_elements, length=1.0):
    """Uniform mesh of ``n_elements`` segments on [0, length]."""
    if n_elements < 1:
        raise ValueError("need at least one element")
    xs = np.linspace(0.0, length, n_elements + 1)[:, None]
    elems = np.column_stack([np.arange(n_elements), np.arange(1, n_elements + 1)])
    facets = {"left": np.array([[0]]), "right": np.array([[n_elements]])}
    return Mesh(1, xs, elems, facets)


def build_rect_mesh(nx, ny, lx=1.0, ly=1.0):
    """Structured triangulation of [0,lx] x [0,ly]; every cell is split along
    the same diagonal (lower-left to upper-right)."""
    if nx < 1 or ny < 1:
        raise ValueError("need at least one cell per direction")
    xs = np.linspace(0.0, lx, nx + 1)
    ys = np.linspace(0.0, ly, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    def nid(i, j):
        return j * (nx + 1) + i

    tris = []
    for j in range(ny):
        for i in range(nx):
            v00, v10 = nid(i, j), nid(i + 1, j)
            v01, v11 = nid(i, j + 1), nid(i + 1, j + 1)
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))
    facets = {
        "bottom": np.array([[nid(i, 0), nid(i + 1, 0)] for i in range(nx)]),
        "top": np.array([[nid(i, ny), nid(i + 1, ny)] for i in range(nx)]),
        "left": np.array([[nid(0, j), nid(0, j + 1)] for j in range(ny)]),
        "right": np.array([[nid(nx, j), nid(nx, j + 1)] for j in range(ny)]),
    }
    return Mesh(2, nodes, np.array(tris), facets)


def load_mesh(path):
    """Read the text mesh format.

    Lines: ``dim <1|2>``, ``node <id> <x> [<y>]``, ``elem <id> <n0> <n1> [<n2>]``,
    ``facet <tag> <n0> [<n1>]``; ``#`` starts a comment; ids are 0-based and
    dense. Triangles given clockwise are reoriented. Malformed input raises
    :class:`MeshFormatError` with the offending line number.
    """
    dim = None
    node_rows = {}
    elem_rows = {}
    facet_rows = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            kind = parts[0]
            try:
                if kind == "dim":
                    dim = int(parts[1])
                    if dim not in (1, 2):
                        raise ValueError
                elif kind == "node":
                    if dim is None:
                        raise MeshFormatError(f"line {lineno}: 'node' before 'dim'")
                    if len(parts) != 2 + dim:
                        raise ValueError
                    node_rows[int(parts[1])] = [float(v) for v in parts[2:]]
                elif kind == "elem":
                    if dim is None:
                        raise MeshFormatError(f"line {lineno}: 'elem' before 'dim'")
                    if len(parts) != 3 + dim:
                        raise ValueError
                    elem_rows[int(parts[1])] = [int(v) for v in parts[2:]]
                elif kind == "facet":
                    if dim is None:
                        raise MeshFormatError(f"line {lineno}: 'facet' before 'dim'")
                    if len(parts) != 2 + dim:
                        raise ValueError
                    facet_rows.setdefault(parts[1], []).append([int(v) for v in parts[2:]])
                else:
                    raise MeshFormatError(f"line {lineno}: unknown record '{kind}'")
            except MeshFormatError:
                raise
            except (ValueError, IndexError):
                raise MeshFormatError(f"line {lineno}: malformed '{kind}' record: {line!r}") from None
    if dim is None:
        raise MeshFormatError("missing 'dim' record")
    if not node_rows or not elem_rows:
        raise MeshFormatError("mesh needs at least one node and one element")
    n = len(node_rows)
    if sorted(node_rows) != list(range(n)):
        raise MeshFormatError("node ids must be dense and 0-based")
    if sorted(elem_rows) != list(range(len(elem_rows))):
        raise MeshFormatError("elem ids must be dense and 0-based")
    nodes = np.array([node_rows[i] for i in range(n)])
    elements = np.array([elem_rows[i] for i in range(len(elem_rows))], dtype=np.int64)
    if dim == 2:
        signed = _measures(2, nodes, elements)
        flip = signed < 0.0
        if np.any(flip):
            elements[flip] = elements[flip][:, [0, 2, 1]]
    facets = {tag: np.array(rows, dtype=np.int64) for tag, rows in facet_rows.items()}
    return Mesh(dim, nodes, elements, facets)


def element_gradients(mesh):
    """Global shape-function gradients, constant per linear element.

    Returns an array (n_elements, n_local_nodes, dim).
    """
    nodes, elems = mesh.nodes, mesh.elements
    if mesh.dim == 1:
        h = nodes[elems[:, 1], 0] - nodes[elems[:, 0], 0]
        g = np.empty((len(elems), 2, 1))
        g[:, 0, 0] = -1.0 / h
        g[:, 1, 0] = 1.0 / h
        return g
    p0, p1, p2 = nodes[elems[:, 0]], nodes[elems[:, 1]], nodes[elems[:, 2]]
    det = (p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1]) - (p2[:, 0] - p0[:, 0]) * (p1[:, 1] - p0[:, 1])
    g = np.empty((len(elems), 3, 2))
    g[:, 1, 0] = (p2[:, 1] - p0[:, 1]) / det
    g[:, 1, 1] = -(p2[:, 0] - p0[:, 0]) / det
    g[:, 2, 0] = -(p1[:, 1] - p0[:, 1]) / det
    g[:, 2, 1] = (p1[:, 0] - p0[:, 0]) / det
    g[:, 0, :] = -(g[:, 1, :] + g[:, 2, :])
    return g


def shape_values(dim, ref_points):
    """Linear shape functions evaluated at reference points, (Q, n_local)."""
    ref_points = np.atleast_2d(ref_points)
    if dim == 1:
        xi = ref_points[:, 0]
        return np.column_stack([1.0 - xi, xi])
    xi, eta = ref_points[:, 0], ref_points[:, 1]
    return np.column_stack([1.0 - xi - eta, xi, eta])


def quadrature_points(mesh, rule=None):
    """Global coordinates and weights of every integration point.

    Returns
    -------
    coords : ndarray (n_elements, n_qp, dim)
    weights : ndarray (n_elements, n_qp)
        Reference weights scaled by the element Jacobian, so summing
        ``weights`` gives the domain measure.
    """
    rule = rule or default_rule(mesh.dim)
    if rule.dim != mesh.dim:
        raise ValueError("quadrature rule dimension does not match the mesh")
    N = shape_values(mesh.dim, rule.points)  # (Q, n_local)
    elem_coords = mesh.nodes[mesh.elements]  # (E, n_local, dim)
    coords = np.einsum("qa,ead->eqd", N, elem_coords)
    jac = element_measures(mesh) / (1.0 if mesh.dim == 1 else 0.5)
    weights = rule.weights[None, :] * jac[:, None]
    return coords, weights


def boundary_nodes(mesh, tag):
    """Sorted unique node ids of a facet group."""
    if tag not in mesh.facets:
        raise KeyError(f"mesh has no facet group '{tag}'; available: {sorted(mesh.facets)}")
    return np.unique(mesh.facets[tag])


def _facet_elements(mesh, facet):
    """Element adjacent to each facet row (lowest id when shared)."""
    owners = np.full(len(facet), -1, dtype=np.int64)
    elem_sets = [set(row) for row in mesh.elements]
    for i, f in enumerate(facet):
        want = set(f.tolist() if hasattr(f, "tolist") else f)
        for e, s in enumerate(elem_sets):
            if want <= s:
                owners[i] = e
                break
        if owners[i] < 0:
            raise ValueError(f"facet {f} is not an edge of any element")
    return owners


def facet_geometry(mesh, tag):
    """Measure, midpoint, endpoints and outward unit normal per facet.

    Returns a dict of arrays keyed by "measure", "midpoint", "normal" and
    (2-D only) "points". 1-D facet measure is 1 and the normal is the sign
    pointing out of the adjacent element.
    """
    facet = mesh.facets[tag] if tag in mesh.facets else None
    if facet is None:
        raise KeyError(f"mesh has no facet group '{tag}'; available: {sorted(mesh.facets)}")
    owners = _facet_elements(mesh, facet)
    centroids = mesh.nodes[mesh.elements[owners]].mean(axis=1)
    if mesh.dim == 1:
        x = mesh.nodes[facet[:, 0], 0]
        normal = np.sign(x - centroids[:, 0])[:, None]
        return {
            "measure": np.ones(len(facet)),
            "midpoint": x[:, None],
            "normal": normal,
            "owner": owners,
        }
    p0 = mesh.nodes[facet[:, 0]]
    p1 = mesh.nodes[facet[:, 1]]
    tangent = p1 - p0
    length = np.linalg.norm(tangent, axis=1)
    normal = np.column_stack([tangent[:, 1], -tangent[:, 0]]) / length[:, None]
    mid = 0.5 * (p0 + p1)
    # flip normals that point toward the owning element
    inward = np.einsum("fd,fd->f", normal, centroids - mid) > 0.0
    normal[inward] *= -1.0
    return {
        "measure": length,
        "midpoint": mid,
        "normal": normal,
        "points": np.stack([p0, p1], axis=1),
        "owner": owners,
    }


def find_elements(mesh, points, tol=1e-10):
    """Containing element id for each query point (lowest id wins on ties).

    Raises ValueError if a point lies outside every element by more than
    ``tol`` in barycentric terms.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != mesh.dim:
        raise ValueError("query points have the wrong dimension")
    out = np.full(len(points), -1, dtype=np.int64)
    if mesh.dim == 1:
        x0 = mesh.nodes[mesh.elements[:, 0], 0]
        x1 = mesh.nodes[mesh.elements[:, 1], 0]
        order = np.argsort(x0, kind="stable")
        for i, p in enumerate(points[:, 0]):
            inside = np.nonzero((x0 - tol <= p) & (p <= x1 + tol))[0]
            if inside.size == 0:
                raise ValueError(f"point {p!r} lies outside the mesh")
            out[i] = inside.min()
        return out
    from scipy.spatial import cKDTree

    centroids = mesh.nodes[mesh.elements].mean(axis=1)
    tree = cKDTree(centroids)
    grads = element_gradients(mesh)  # barycentric gradients
    p0 = mesh.nodes[mesh.elements[:, 0]]
    k = min(8, mesh.n_elements)
    for i, p in enumerate(points):
        found = -1
        kk = k
        while found < 0:
            _, cand = tree.query(p, k=kk)
            cand = np.atleast_1d(cand)
            hits = []
            for e in cand:
                d = p - p0[e]
                l1 = grads[e, 1] @ d
                l2 = grads[e, 2] @ d
                l0 = 1.0 - l1 - l2
                if l0 >= -tol and l1 >= -tol and l2 >= -tol:
                    hits.append(e)
            if hits:
                found = min(hits)
            elif kk >= mesh.n_elements:
                raise ValueError(f"point {p} lies outside the mesh")
            else:
                kk = min(mesh.n_elements, kk * 4)
        out[i] = found
    return out
