"""Triangle surface meshes and the edge-based surface-current basis.

Meshes are closed, consistently oriented triangle surfaces.  Each interior
edge carries one vector basis function describing current flowing from the
free vertex of one adjacent triangle to the free vertex of the other
(continuous normal component across the edge, piecewise-constant surface
divergence).
"""

from dataclasses import dataclass, field

import numpy as np


class MeshFormatError(ValueError):
    """Raised for malformed MSH input, with a line number where possible."""


class MeshValidationError(ValueError):
    """Raised when a mesh is not a valid closed oriented triangle surface."""


class TriangleMesh:
    """Watertight oriented triangle surface.

    vertices: (V, 3) float array; panels: (F, 3) int array, counterclockwise
    as seen from outside.  Per-panel area, centroid, unit normal and diameter
    (longest edge) are precomputed.  Instances are immutable.
    """

    def __init__(self, vertices, panels, validate=True):
        self.vertices = np.ascontiguousarray(vertices, dtype=np.float64)
        self.panels = np.ascontiguousarray(panels, dtype=np.int64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise MeshValidationError("vertices must be an (V, 3) array")
        if self.panels.ndim != 2 or self.panels.shape[1] != 3:
            raise MeshValidationError("panels must be an (F, 3) array")
        if len(self.panels) and (
            self.panels.min() < 0 or self.panels.max() >= len(self.vertices)
        ):
            raise MeshValidationError("panel vertex index out of range")
        self._compute_panel_data()
        if validate:
            self._validate()
        self.vertices.setflags(write=False)
        self.panels.setflags(write=False)

    def _compute_panel_data(self):
        v = self.vertices[self.panels]  # (F, 3, 3)
        e1 = v[:, 1] - v[:, 0]
        e2 = v[:, 2] - v[:, 0]
        cross = np.cross(e1, e2)
        norms = np.linalg.norm(cross, axis=1)
        self.areas = 0.5 * norms
        with np.errstate(invalid="ignore", divide="ignore"):
            self.normals = cross / norms[:, None]
        self.centroids = v.mean(axis=1)
        edge_lens = np.stack(
            [
                np.linalg.norm(v[:, 1] - v[:, 0], axis=1),
                np.linalg.norm(v[:, 2] - v[:, 1], axis=1),
                np.linalg.norm(v[:, 0] - v[:, 2], axis=1),
            ],
            axis=1,
        )
        self.diameters = edge_lens.max(axis=1)

    def _validate(self):
        if len(self.panels) < 4:
            raise MeshValidationError("a closed surface needs at least 4 panels")
        if self.panels.min() < 0 or self.panels.max() >= len(self.vertices):
            raise MeshValidationError("panel vertex index out of range")
        bbox = self.vertices.max(axis=0) - self.vertices.min(axis=0)
        diag = float(np.linalg.norm(bbox))
        # duplicate vertices
        order = np.lexsort(self.vertices.T)
        sv = self.vertices[order]
        close = np.linalg.norm(np.diff(sv, axis=0), axis=1) <= 1e-12 * diag
        if close.any():
            i = int(np.argmax(close))
            raise MeshValidationError(
                f"duplicate vertices {order[i]} and {order[i + 1]}"
            )
        # degenerate panels
        bad = self.areas < 1e-12 * self.diameters**2
        if bad.any():
            raise MeshValidationError(f"degenerate panel {int(np.argmax(bad))}")
        # watertightness and orientation
        for (v1, v2), adj in self.edge_map.items():
            if len(adj) != 2:
                raise MeshValidationError(
                    f"edge ({v1}, {v2}) is shared by {len(adj)} panels, expected 2"
                )
            if adj[0][1] == adj[1][1]:
                raise MeshValidationError(
                    f"inconsistent orientation across edge ({v1}, {v2})"
                )

    @property
    def edge_map(self):
        """dict (v1, v2) with v1 < v2 -> list of (panel, direction).

        direction is +1 if the panel traverses the edge as v1 -> v2 in its
        counterclockwise vertex order, else -1.
        """
        try:
            return self._edge_map
        except AttributeError:
            pass
        emap = {}
        for f, (a, b, c) in enumerate(self.panels):
            for u, w in ((a, b), (b, c), (c, a)):
                key = (int(u), int(w)) if u < w else (int(w), int(u))
                emap.setdefault(key, []).append((f, 1 if u < w else -1))
        self._edge_map = emap
        return emap

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_panels(self):
        return len(self.panels)

    @property
    def n_edges(self):
        return len(self.edge_map)

    def panel_vertices(self):
        """(F, 3, 3) array of panel corner coordinates."""
        return self.vertices[self.panels]

    def with_vertices(self, vertices):
        """Same topology with new vertex coordinates (rigid transforms)."""
        return TriangleMesh(vertices, self.panels, validate=False)

    def __eq__(self, other):
        return (
            isinstance(other, TriangleMesh)
            and np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.panels, other.panels)
        )


@dataclass(frozen=True)
class RwgEdge:
    """One edge basis function f(x) = +-l/(2A) (x - p) on its two panels."""

    v1: int
    v2: int
    plus_panel: int
    plus_free_vertex: int
    minus_panel: int
    minus_free_vertex: int
    length: float


@dataclass
class RwgBasisSet:
    """All interior-edge basis functions of one mesh, in deterministic order."""

    mesh: TriangleMesh
    edges: list = field(repr=False)
    # per-panel scatter tables, slot j <-> the edge whose free vertex is local
    # vertex j of the panel; coef = sign * l / (2A), div_coef = sign * l / A
    basis_index: np.ndarray = field(repr=False)  # (F, 3) int64
    coef: np.ndarray = field(repr=False)  # (F, 3)
    div_coef: np.ndarray = field(repr=False)  # (F, 3)

    @property
    def size(self):
        return len(self.edges)


def build_rwg_basis(mesh):
    """Construct the edge basis of a validated closed mesh.

    Edges are ordered by sorted vertex pair (v1 < v2, lexicographic); the
    plus panel is the one traversing the edge as v1 -> v2 counterclockwise.
    """
    edges = []
    F = mesh.n_panels
    basis_index = np.full((F, 3), -1, dtype=np.int64)
    coef = np.zeros((F, 3))
    div_coef = np.zeros((F, 3))
    panels = mesh.panels
    for n, (key, adj) in enumerate(sorted(mesh.edge_map.items())):
        v1, v2 = key
        (fa, da), (fb, db) = adj
        plus, minus = (fa, fb) if da == 1 else (fb, fa)
        length = float(np.linalg.norm(mesh.vertices[v2] - mesh.vertices[v1]))
        free = {}
        for f, sign in ((plus, 1.0), (minus, -1.0)):
            (slot,) = [j for j in range(3) if panels[f, j] not in (v1, v2)]
            free[f] = int(panels[f, slot])
            basis_index[f, slot] = n
            coef[f, slot] = sign * length / (2.0 * mesh.areas[f])
            div_coef[f, slot] = sign * length / mesh.areas[f]
        edges.append(
            RwgEdge(v1, v2, plus, free[plus], minus, free[minus], length)
        )
    return RwgBasisSet(mesh, edges, basis_index, coef, div_coef)


# ---------------------------------------------------------------------------
# MSH 2.2 ASCII parsing
# ---------------------------------------------------------------------------


def parse_msh(text):
    """Parse an MSH 2.2 ASCII stream into a validated TriangleMesh.

    Only 3-node triangle elements (type 2) are consumed; points and lines are
    skipped.  Node ids may be non-contiguous; unreferenced nodes are dropped.
    """
    if hasattr(text, "read"):
        text = text.read()
    lines = text.splitlines()

    def fail(i, msg):
        raise MeshFormatError(f"line {i + 1}: {msg}")

    i = 0
    nodes = {}
    tris = []
    seen_format = False
    while i < len(lines):
        line = lines[i].strip()
        if not line:
            i += 1
            continue
        if line == "$MeshFormat":
            if i + 2 >= len(lines):
                fail(i, "truncated $MeshFormat section")
            parts = lines[i + 1].split()
            if not parts or parts[0] != "2.2":
                fail(i + 1, f"unsupported MSH version {parts[:1] or '??'}")
            if lines[i + 2].strip() != "$EndMeshFormat":
                fail(i + 2, "expected $EndMeshFormat")
            seen_format = True
            i += 3
        elif line == "$Nodes":
            try:
                count = int(lines[i + 1])
            except (IndexError, ValueError):
                fail(i + 1, "expected node count")
            for k in range(count):
                parts = lines[i + 2 + k].split()
                if len(parts) < 4:
                    fail(i + 2 + k, "expected 'id x y z'")
                try:
                    nodes[int(parts[0])] = [float(p) for p in parts[1:4]]
                except ValueError:
                    fail(i + 2 + k, "malformed node line")
            if lines[i + 2 + count].strip() != "$EndNodes":
                fail(i + 2 + count, "expected $EndNodes")
            i += 3 + count
        elif line == "$Elements":
            try:
                count = int(lines[i + 1])
            except (IndexError, ValueError):
                fail(i + 1, "expected element count")
            for k in range(count):
                parts = lines[i + 2 + k].split()
                if len(parts) < 3:
                    fail(i + 2 + k, "malformed element line")
                etype = int(parts[1])
                if etype != 2:
                    continue  # skip points, lines, etc.
                ntags = int(parts[2])
                conn = parts[3 + ntags:]
                if len(conn) != 3:
                    fail(i + 2 + k, "triangle element needs 3 vertices")
                tris.append([int(c) for c in conn])
            if lines[i + 2 + count].strip() != "$EndElements":
                fail(i + 2 + count, "expected $EndElements")
            i += 3 + count
        else:
            if line.startswith("$") and not line.startswith("$End"):
                # unknown section: skip to its end marker
                end = "$End" + line[1:]
                j = i + 1
                while j < len(lines) and lines[j].strip() != end:
                    j += 1
                if j == len(lines):
                    fail(i, f"unterminated section {line}")
                i = j + 1
            else:
                fail(i, f"unexpected content {line!r}")
    if not seen_format:
        raise MeshFormatError("missing $MeshFormat section")
    if not tris:
        raise MeshFormatError("no triangle elements found")

    used = sorted({v for t in tris for v in t})
    missing = [v for v in used if v not in nodes]
    if missing:
        raise MeshFormatError(f"element references unknown node {missing[0]}")
    remap = {old: new for new, old in enumerate(used)}
    vertices = np.array([nodes[v] for v in used])
    panels = np.array([[remap[v] for v in t] for t in tris])
    return TriangleMesh(vertices, panels)


# ---------------------------------------------------------------------------
# Shape generators
# ---------------------------------------------------------------------------


def _orient_outward(vertices, panels, interior_point):
    """Flip panels whose normal points toward an interior point (convex)."""
    vertices = np.asarray(vertices, float)
    panels = np.asarray(panels, int).copy()
    v = vertices[panels]
    normals = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
    outward = np.einsum("fk,fk->f", normals, v.mean(axis=1) - interior_point)
    flip = outward < 0
    panels[flip] = panels[flip][:, [0, 2, 1]]
    return vertices, panels


_ICO_T = (1.0 + np.sqrt(5.0)) / 2.0
_ICO_VERTS = np.array(
    [
        (-1, _ICO_T, 0), (1, _ICO_T, 0), (-1, -_ICO_T, 0), (1, -_ICO_T, 0),
        (0, -1, _ICO_T), (0, 1, _ICO_T), (0, -1, -_ICO_T), (0, 1, -_ICO_T),
        (_ICO_T, 0, -1), (_ICO_T, 0, 1), (-_ICO_T, 0, -1), (-_ICO_T, 0, 1),
    ],
    dtype=float,
)
_ICO_FACES = np.array(
    [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
)


def _subdivide(vertices, panels):
    """Split every triangle into 4 by edge midpoints."""
    vertices = list(map(tuple, vertices))
    index = {}

    def midpoint(a, b):
        key = (a, b) if a < b else (b, a)
        if key not in index:
            va, vb = np.array(vertices[a]), np.array(vertices[b])
            vertices.append(tuple(0.5 * (va + vb)))
            index[key] = len(vertices) - 1
        return index[key]

    out = []
    for a, b, c in panels:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        out += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
    return np.array(vertices), np.array(out)


def generate_sphere(radius, subdivisions):
    """Icosphere: icosahedron faces 4-way subdivided, vertices projected."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    if subdivisions < 0:
        raise ValueError("subdivisions must be >= 0")
    verts, faces = _ICO_VERTS.copy(), _ICO_FACES.copy()
    for _ in range(subdivisions):
        verts, faces = _subdivide(verts, faces)
    verts = radius * verts / np.linalg.norm(verts, axis=1)[:, None]
    verts, faces = _orient_outward(verts, faces, np.zeros(3))
    return TriangleMesh(verts, faces)


def generate_tetrahedron(edge, subdivisions):
    """Regular tetrahedron, apex on +z, base parallel to xy with one vertex
    on the +x side; faces stay planar under subdivision."""
    if edge <= 0:
        raise ValueError("edge must be positive")
    if subdivisions < 0:
        raise ValueError("subdivisions must be >= 0")
    rb = edge / np.sqrt(3.0)
    height = edge * np.sqrt(2.0 / 3.0)
    base = [
        (rb * np.cos(a), rb * np.sin(a), 0.0)
        for a in (0.0, 2 * np.pi / 3, 4 * np.pi / 3)
    ]
    verts = np.array(base + [(0.0, 0.0, height)])
    faces = np.array([(0, 1, 2), (0, 1, 3), (1, 2, 3), (2, 0, 3)])
    for _ in range(subdivisions):
        verts, faces = _subdivide(verts, faces)
    centroid = np.array([0.0, 0.0, height / 4.0])
    verts, faces = _orient_outward(verts, faces, centroid)
    return TriangleMesh(verts, faces)


def tetrahedron_apex_height(edge):
    """z-coordinate of the apex as generated (base sits at z = 0)."""
    return edge * np.sqrt(2.0 / 3.0)


def generate_capsule(radius, total_length, resolution):
    """Cylinder with hemispherical endcaps, axis along z, centered at origin.

    total_length includes the caps; total_length == 2*radius degenerates to a
    sphere.  resolution is the azimuthal panel count; rings are spaced to
    keep panels near-square (height ~ 2*pi*R/resolution).
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if total_length < 2 * radius:
        raise ValueError("total_length must be >= 2*radius")
    if resolution < 3:
        raise ValueError("resolution must be >= 3")
    R, res = float(radius), int(resolution)
    half_cyl = total_length / 2.0 - R
    target = 2 * np.pi * R / res
    n_cyl = max(1, round(2 * half_cyl / target)) if half_cyl > 0 else 0
    n_cap = max(1, round(res / 4))

    phis = 2 * np.pi * np.arange(res) / res
    rings = []  # (z, ring_radius); poles handled separately
    for j in range(n_cap - 1, -1, -1):  # bottom cap, pole side first
        lat = (np.pi / 2) * j / n_cap
        rings.append((-half_cyl - R * np.sin(lat), R * np.cos(lat)))
    for i in range(1, n_cyl):
        rings.append((-half_cyl + 2 * half_cyl * i / n_cyl, R))
    for j in range(0 if n_cyl else 1, n_cap + 1):  # top cap (skip dup equator)
        lat = (np.pi / 2) * j / n_cap
        rings.append((half_cyl + R * np.sin(lat), R * np.cos(lat)))
    # drop the degenerate top ring (radius ~ 0) in favor of the pole vertex
    rings = rings[:-1]

    verts = [(0.0, 0.0, -total_length / 2.0)]  # bottom pole
    ring_start = []
    for z, rr in rings:
        ring_start.append(len(verts))
        verts += [(rr * np.cos(p), rr * np.sin(p), z) for p in phis]
    top_pole = len(verts)
    verts.append((0.0, 0.0, total_length / 2.0))

    faces = []
    first = ring_start[0]
    for k in range(res):  # bottom fan
        faces.append((0, first + k, first + (k + 1) % res))
    for a, b in zip(ring_start[:-1], ring_start[1:]):
        for k in range(res):
            k2 = (k + 1) % res
            faces.append((a + k, b + k, b + k2))
            faces.append((a + k, b + k2, a + k2))
    last = ring_start[-1]
    for k in range(res):  # top fan
        faces.append((last + k, top_pole, last + (k + 1) % res))

    verts, faces = _orient_outward(np.array(verts), np.array(faces), np.zeros(3))
    return TriangleMesh(verts, faces)
