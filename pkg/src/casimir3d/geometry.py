"""Rigid-body placement of meshed objects and multi-object configurations."""

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import mesh as meshmod
from .mesh import TriangleMesh, build_rwg_basis

_AXES = {"x": np.array([1.0, 0.0, 0.0]),
         "y": np.array([0.0, 1.0, 0.0]),
         "z": np.array([0.0, 0.0, 1.0])}


class OverlapError(ValueError):
    """Raised when two objects in a configuration touch or overlap."""


class GeometryFileError(ValueError):
    """Raised for malformed geometry description files."""


@dataclass(frozen=True)
class RigidTransform:
    rotation: np.ndarray  # (3, 3), orthogonal, det +1
    translation: np.ndarray  # (3,)

    def __post_init__(self):
        R = np.asarray(self.rotation, float)
        t = np.asarray(self.translation, float)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)
        if np.abs(R.T @ R - np.eye(3)).max() > 1e-12:
            raise ValueError("rotation matrix is not orthogonal")
        if np.linalg.det(R) < 0:
            raise ValueError("rotation matrix must have det +1")

    @staticmethod
    def identity():
        return RigidTransform(np.eye(3), np.zeros(3))

    @staticmethod
    def translation_of(vec):
        return RigidTransform(np.eye(3), np.asarray(vec, float))

    @staticmethod
    def rotation_deg(axis, degrees, pivot=None):
        """Rotation by `degrees` about a coordinate axis ('x'|'y'|'z') or an
        arbitrary unit vector, optionally about a pivot point."""
        if isinstance(axis, str):
            axis = _AXES[axis]
        axis = np.asarray(axis, float)
        axis = axis / np.linalg.norm(axis)
        th = np.deg2rad(degrees)
        K = np.array([
            [0, -axis[2], axis[1]],
            [axis[2], 0, -axis[0]],
            [-axis[1], axis[0], 0],
        ])
        R = np.eye(3) + np.sin(th) * K + (1 - np.cos(th)) * (K @ K)
        t = np.zeros(3)
        if pivot is not None:
            p = np.asarray(pivot, float)
            t = p - R @ p
        return RigidTransform(R, t)

    def apply(self, points):
        return np.asarray(points, float) @ self.rotation.T + self.translation

    def inverse(self):
        return RigidTransform(self.rotation.T, -self.rotation.T @ self.translation)


def compose(outer, inner):
    """Transform applying `inner` first, then `outer`."""
    return RigidTransform(
        outer.rotation @ inner.rotation,
        outer.rotation @ inner.translation + outer.translation,
    )


def tetrahedron_pivot(edge):
    """Rotation origin for the orientation sweeps of a generated tetrahedron.

    Sits on the symmetry axis, an offset of sqrt(3)*edge/4 below the apex
    (half the nominal height sqrt(3)*edge/2).
    """
    apex_z = meshmod.tetrahedron_apex_height(edge)
    return np.array([0.0, 0.0, apex_z - np.sqrt(3.0) * edge / 4.0])


class ObjectInstance:
    """A mesh placed in the world by a rigid transform.

    Basis topology refers to the untransformed mesh; world-frame vertex
    coordinates are cached eagerly.
    """

    def __init__(self, label, mesh, transform=None, basis=None):
        self.label = label
        self.mesh = mesh
        self.transform = transform or RigidTransform.identity()
        self.basis = basis if basis is not None else build_rwg_basis(mesh)
        self.world_vertices = self.transform.apply(mesh.vertices)
        self.world_mesh = mesh.with_vertices(self.world_vertices)

    def with_transform(self, transform):
        return ObjectInstance(self.label, self.mesh, transform, self.basis)

    @property
    def n_basis(self):
        return self.basis.size


class Configuration:
    """Ordered collection of placed objects; rejects touching/overlapping
    pairs at construction."""

    def __init__(self, objects):
        labels = [o.label for o in objects]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate object labels in {labels}")
        self.objects = list(objects)
        self.offsets = []
        off = 0
        for o in self.objects:
            self.offsets.append(off)
            off += o.n_basis
        self.n_basis = off
        for i in range(len(objects)):
            for j in range(i + 1, len(objects)):
                if self.min_separation(i, j) <= 0:
                    raise OverlapError(
                        f"objects {objects[i].label!r} and {objects[j].label!r}"
                        " touch or overlap"
                    )

    def __getitem__(self, i):
        return self.objects[i]

    def __len__(self):
        return len(self.objects)

    def index_of(self, label):
        for i, o in enumerate(self.objects):
            if o.label == label:
                return i
        raise KeyError(f"no object labeled {label!r}")

    def block(self, i):
        """(offset, size) of object i in the interaction matrix layout."""
        return self.offsets[i], self.objects[i].n_basis

    def min_separation(self, i, j):
        """Lower bound on the surface-surface distance between objects i, j,
        exact to within one panel diameter."""
        if i == j:
            raise ValueError("need two distinct objects")
        a, b = self.objects[i], self.objects[j]
        ma, mb = a.world_mesh, b.world_mesh
        dists = np.linalg.norm(
            ma.centroids[:, None, :] - mb.centroids[None, :, :], axis=2
        )
        pad = ma.diameters[:, None] + mb.diameters[None, :]
        coarse = float((dists - pad).min())
        # refine panel pairs that could attain the minimum
        cand = np.argwhere(dists - pad <= coarse + pad.min())
        best = np.inf
        for fa, fb in cand:
            ta = ma.vertices[ma.panels[fa]]
            tb = mb.vertices[mb.panels[fb]]
            for p in ta:
                best = min(best, _point_triangle_distance(p, tb))
            for p in tb:
                best = min(best, _point_triangle_distance(p, ta))
        return float(best)

    def min_separation_all(self):
        n = len(self.objects)
        return min(
            self.min_separation(i, j) for i in range(n) for j in range(i + 1, n)
        )

    def transformed(self, transform):
        """Apply an additional global transform to every object."""
        return Configuration(
            [o.with_transform(compose(transform, o.transform)) for o in self.objects]
        )


def _point_triangle_distance(p, tri):
    """Euclidean distance from point p to triangle tri (3, 3)."""
    a, b, c = tri
    ab, ac, ap = b - a, c - a, p - a
    d1, d2 = ab @ ap, ac @ ap
    if d1 <= 0 and d2 <= 0:
        return np.linalg.norm(ap)
    bp = p - b
    d3, d4 = ab @ bp, ac @ bp
    if d3 >= 0 and d4 <= d3:
        return np.linalg.norm(bp)
    cp = p - c
    d5, d6 = ab @ cp, ac @ cp
    if d6 >= 0 and d5 <= d6:
        return np.linalg.norm(cp)
    vc = d1 * d4 - d3 * d2
    if vc <= 0 <= d1 and d3 <= 0:
        v = d1 / (d1 - d3)
        return np.linalg.norm(ap - v * ab)
    vb = d5 * d2 - d1 * d6
    if vb <= 0 <= d2 and d6 <= 0:
        w = d2 / (d2 - d6)
        return np.linalg.norm(ap - w * ac)
    va = d3 * d6 - d5 * d4
    if va <= 0 and d4 - d3 >= 0 and d5 - d6 >= 0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return np.linalg.norm(p - (b + w * (c - b)))
    denom = va + vb + vc
    v = vb / denom
    w = vc / denom
    return np.linalg.norm(p - (a + v * ab + w * ac))


# ---------------------------------------------------------------------------
# Geometry description files
# ---------------------------------------------------------------------------

_GEN_RE = re.compile(r"^(sphere|capsule|tetrahedron)\(([^)]*)\)$")


def _build_generator(spec):
    m = _GEN_RE.match(spec)
    if not m:
        raise GeometryFileError(f"unknown mesh source {spec!r}")
    name = m.group(1)
    args = [float(a) for a in m.group(2).split(",") if a.strip()]
    if name == "sphere":
        return meshmod.generate_sphere(args[0], int(args[1]))
    if name == "capsule":
        return meshmod.generate_capsule(args[0], args[1], int(args[2]))
    return meshmod.generate_tetrahedron(args[0], int(args[1]))


def parse_geometry(text, base_dir="."):
    """Parse a geometry description into a Configuration.

    One object per line:
      object <label> mesh <path> | <generator>(args) [pivot x y z]
          [rot <deg> <x|y|z>]... [move dx dy dz]...
    Clauses apply left to right; '#' starts a comment.
    """
    if hasattr(text, "read"):
        text = text.read()
    objects = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] != "object" or len(tokens) < 3:
            raise GeometryFileError(f"line {lineno}: expected 'object <label> ...'")
        label = tokens[1]
        if tokens[2] == "mesh":
            if len(tokens) < 4:
                raise GeometryFileError(f"line {lineno}: 'mesh' needs a path")
            path = Path(base_dir) / tokens[3]
            mesh = meshmod.parse_msh(path.read_text())
            rest = tokens[4:]
        else:
            try:
                mesh = _build_generator(tokens[2])
            except (ValueError, IndexError) as exc:
                raise GeometryFileError(f"line {lineno}: {exc}") from exc
            rest = tokens[3:]

        transform = RigidTransform.identity()
        pivot = None
        k = 0
        while k < len(rest):
            word = rest[k]
            try:
                if word == "pivot":
                    pivot = np.array([float(v) for v in rest[k + 1:k + 4]])
                    k += 4
                elif word == "rot":
                    step = RigidTransform.rotation_deg(
                        rest[k + 2], float(rest[k + 1]),
                        pivot=None if pivot is None else transform.apply(pivot),
                    )
                    transform = compose(step, transform)
                    k += 3
                elif word == "move":
                    vec = [float(v) for v in rest[k + 1:k + 4]]
                    if len(vec) != 3:
                        raise ValueError("move needs 3 components")
                    transform = compose(RigidTransform.translation_of(vec), transform)
                    k += 4
                else:
                    raise ValueError(f"unknown clause {word!r}")
            except (ValueError, IndexError, KeyError) as exc:
                raise GeometryFileError(f"line {lineno}: {exc}") from exc
        objects.append(ObjectInstance(label, mesh, transform))
    if not objects:
        raise GeometryFileError("no objects defined")
    return Configuration(objects)
