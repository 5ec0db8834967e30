"""Dense object-blocked interaction matrices over all basis pairs.

Assembled matrices carry a uniform kappa^2 conditioning scale (the
divergence-divergence term otherwise dominates at small kappa); the log-det
ratio and the force trace are invariant under it.
"""

from dataclasses import dataclass

import numpy as np

from . import backend, kernel, quadrature
from .kernel import PanelPairClass

MAX_BASIS_DIM = 6000

_DIR = {"x": np.array([1.0, 0.0, 0.0]),
        "y": np.array([0.0, 1.0, 0.0]),
        "z": np.array([0.0, 0.0, 1.0])}


class AssemblyError(RuntimeError):
    pass


@dataclass
class InteractionMatrix:
    matrix: np.ndarray  # (N, N) symmetric, kappa^2-scaled
    blocks: list  # (label, offset, size) per object
    kappa: float
    is_inf: bool = False

    @property
    def n(self):
        return self.matrix.shape[0]

    def scaled(self, c):
        """Uniformly scaled copy (log-det ratios are invariant)."""
        return InteractionMatrix(c * self.matrix, self.blocks, self.kappa, self.is_inf)

    def block_slice(self, i):
        _, off, size = self.blocks[i]
        return slice(off, off + size)


@dataclass
class MatrixDerivative:
    """d(kappa^2 M)/ds for a rigid displacement of one object along a unit
    direction; only the blocks coupling that object are nonzero."""

    matrix: np.ndarray
    blocks: list
    kappa: float
    object_index: int
    direction: np.ndarray

    @property
    def n(self):
        return self.matrix.shape[0]

    def block_slice(self, i):
        _, off, size = self.blocks[i]
        return slice(off, off + size)


class _Side:
    """Per-object panel tables in the layout the accumulation kernel wants."""

    def __init__(self, inst, offset):
        mesh = inst.mesh
        self.inst = inst
        self.tri = np.ascontiguousarray(inst.world_vertices[mesh.panels])
        self.coef = np.ascontiguousarray(inst.basis.coef)
        self.div = np.ascontiguousarray(inst.basis.div_coef)
        idx = inst.basis.basis_index.copy()
        idx[idx >= 0] += offset
        self.idx = np.ascontiguousarray(idx, dtype=np.int64)
        self.centroids = inst.world_mesh.centroids
        self.diameters = inst.world_mesh.diameters

    def gather(self, panels, perms=None):
        """(tri, coef, div, idx) for the given panels, optionally with a
        per-pair local vertex permutation applied."""
        tri = self.tri[panels]
        coef = self.coef[panels]
        div = self.div[panels]
        idx = self.idx[panels]
        if perms is not None:
            tri = np.take_along_axis(tri, perms[:, :, None], axis=1)
            coef = np.take_along_axis(coef, perms, axis=1)
            div = np.take_along_axis(div, perms, axis=1)
            idx = np.take_along_axis(idx, perms, axis=1)
        return (
            np.ascontiguousarray(tri),
            np.ascontiguousarray(coef),
            np.ascontiguousarray(div),
            np.ascontiguousarray(idx),
        )


def _run_batch(side_a, panels_a, perms_a, side_b, panels_b, perms_b,
               rule, kappa, ff_scale, div_scale, deriv, direction, mirror, out):
    if len(panels_a) == 0:
        return
    tri_a, coef_a, div_a, idx_a = side_a.gather(panels_a, perms_a)
    tri_b, coef_b, div_b, idx_b = side_b.gather(panels_b, perms_b)
    bary, wts = rule
    backend.accumulate(
        tri_a, coef_a, div_a, tri_a, idx_a,
        tri_b, coef_b, div_b, tri_b, idx_b,
        bary, wts, kappa, ff_scale, div_scale,
        deriv, direction, mirror, out,
    )


def _diagonal_block(side, quad, kappa, ff_scale, div_scale, out):
    """All unordered panel pairs of one object, mirrored into both triangles
    of the matrix."""
    inst = side.inst
    mesh = inst.mesh
    F = mesh.n_panels
    nodir = np.zeros(3)

    # self pairs
    pp = np.arange(F)
    _run_batch(side, pp, None, side, pp, None,
               kernel.pair_rule(PanelPairClass.SELF, quad),
               kappa, ff_scale, div_scale, 0, nodir, 0, out)

    handled = {}
    # edge-adjacent pairs, one per interior edge
    for (v1, v2), adj in mesh.edge_map.items():
        (fa, _), (fb, _) = adj
        p, q = (fa, fb) if fa < fb else (fb, fa)
        la = [i for i in range(3) if mesh.panels[p, i] in (v1, v2)]
        lb = [i for i in range(3) if mesh.panels[q, i] in (v1, v2)]
        # match shared-vertex order between the two triangles
        if mesh.panels[p, la[0]] != mesh.panels[q, lb[0]]:
            lb = [lb[1], lb[0]]
        handled[(p, q)] = (
            (la[0], la[1], 3 - la[0] - la[1]),
            (lb[0], lb[1], 3 - lb[0] - lb[1]),
        )
    edge_pairs = sorted(handled)
    edge_perms = [handled[k] for k in edge_pairs]
    if edge_pairs:
        arr = np.array(edge_pairs)
        pa = np.array([p[0] for p in edge_perms])
        pb = np.array([p[1] for p in edge_perms])
        _run_batch(side, arr[:, 0], pa, side, arr[:, 1], pb,
                   kernel.pair_rule(PanelPairClass.COMMON_EDGE, quad),
                   kappa, ff_scale, div_scale, 0, nodir, 1, out)

    # vertex-adjacent pairs (sharing exactly one vertex)
    vstar = {}
    for f in range(F):
        for slot in range(3):
            vstar.setdefault(int(mesh.panels[f, slot]), []).append((f, slot))
    vert = {}
    for v, members in vstar.items():
        for i, (fa, la) in enumerate(members):
            for fb, lb in members[i + 1:]:
                p, q, lp, lq = (
                    (fa, fb, la, lb) if fa < fb else (fb, fa, lb, la)
                )
                if (p, q) in handled or (p, q) in vert:
                    continue
                rest_p = [x for x in range(3) if x != lp]
                rest_q = [x for x in range(3) if x != lq]
                vert[(p, q)] = ((lp, *rest_p), (lq, *rest_q))
    vert_pairs = sorted(vert)
    if vert_pairs:
        arr = np.array(vert_pairs)
        pa = np.array([vert[k][0] for k in vert_pairs])
        pb = np.array([vert[k][1] for k in vert_pairs])
        _run_batch(side, arr[:, 0], pa, side, arr[:, 1], pb,
                   kernel.pair_rule(PanelPairClass.COMMON_VERTEX, quad),
                   kappa, ff_scale, div_scale, 0, nodir, 1, out)
    singular = handled.keys() | vert.keys()

    # remaining pairs: near/far by centroid distance
    dists = np.linalg.norm(
        side.centroids[:, None, :] - side.centroids[None, :, :], axis=2
    )
    limit = 3.0 * np.maximum(side.diameters[:, None], side.diameters[None, :])
    iu, ju = np.triu_indices(F, k=1)
    if singular:
        sing = np.array(sorted(singular))
        mask = np.ones((F, F), dtype=bool)
        mask[sing[:, 0], sing[:, 1]] = False
        keep = mask[iu, ju]
        iu, ju = iu[keep], ju[keep]
    near = dists[iu, ju] < limit[iu, ju]
    for sel, cls in ((near, PanelPairClass.NEAR), (~near, PanelPairClass.FAR)):
        _run_batch(side, iu[sel], None, side, ju[sel], None,
                   kernel.pair_rule(cls, quad),
                   kappa, ff_scale, div_scale, 0, nodir, 1, out)


def _cross_block(side_a, side_b, quad, kappa, ff_scale, div_scale,
                 deriv, direction, out):
    dists = np.linalg.norm(
        side_a.centroids[:, None, :] - side_b.centroids[None, :, :], axis=2
    )
    limit = 3.0 * np.maximum(
        side_a.diameters[:, None], side_b.diameters[None, :]
    )
    near = dists < limit
    for sel, cls in ((near, PanelPairClass.NEAR), (~near, PanelPairClass.FAR)):
        ia, ib = np.nonzero(sel)
        _run_batch(side_a, ia, None, side_b, ib, None,
                   kernel.pair_rule(cls, quad),
                   kappa, ff_scale, div_scale, deriv, direction, 1, out)


def _sides(config):
    return [_Side(o, config.offsets[i]) for i, o in enumerate(config.objects)]


def _blocks(config):
    return [
        (o.label, config.offsets[i], o.n_basis)
        for i, o in enumerate(config.objects)
    ]


def _check(config, kappa):
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if config.n_basis > MAX_BASIS_DIM:
        raise AssemblyError(
            f"basis dimension {config.n_basis} exceeds the dense-path cap "
            f"{MAX_BASIS_DIM}"
        )


def assemble(config, kappa, quad=None):
    """Full interaction matrix at imaginary wavenumber kappa."""
    quad = quad or quadrature.QuadratureSpec()
    _check(config, kappa)
    out = np.zeros((config.n_basis, config.n_basis))
    sides = _sides(config)
    k2 = kappa * kappa
    for side in sides:
        _diagonal_block(side, quad, kappa, k2, 1.0, out)
    for i in range(len(sides)):
        for j in range(i + 1, len(sides)):
            _cross_block(sides[i], sides[j], quad, kappa, k2, 1.0,
                         0, np.zeros(3), out)
    m = InteractionMatrix(out, _blocks(config), kappa)
    asym = np.abs(out - out.T).max()
    if asym > 1e-10 * max(np.abs(out).max(), 1e-300):
        raise AssemblyError(f"assembled matrix asymmetry {asym:g}")
    return m


def assemble_inf(config, kappa, quad=None, base=None):
    """Infinite-separation variant: inter-object blocks exactly zero.

    When `base` is the matching assemble() result, its self blocks are
    reused instead of recomputed.
    """
    quad = quad or quadrature.QuadratureSpec()
    _check(config, kappa)
    if base is not None:
        if base.kappa != kappa:
            raise ValueError("base matrix was assembled at a different kappa")
        out = np.zeros_like(base.matrix)
        for i in range(len(config)):
            s = base.block_slice(i)
            out[s, s] = base.matrix[s, s]
    else:
        out = np.zeros((config.n_basis, config.n_basis))
        for side in _sides(config):
            _diagonal_block(side, quad, kappa, kappa * kappa, 1.0, out)
    return InteractionMatrix(out, _blocks(config), kappa, is_inf=True)


def assemble_dz(config, object_index, kappa, quad=None, direction="z"):
    """Displacement derivative of the (kappa^2-scaled) interaction matrix
    for moving `object_index` along `direction`."""
    quad = quad or quadrature.QuadratureSpec()
    _check(config, kappa)
    if len(config) < 2:
        raise ValueError("derivative needs at least two objects")
    if not 0 <= object_index < len(config):
        raise IndexError("object_index out of range")
    if isinstance(direction, str):
        direction = _DIR[direction]
    direction = np.asarray(direction, float)
    direction = direction / np.linalg.norm(direction)
    out = np.zeros((config.n_basis, config.n_basis))
    sides = _sides(config)
    for j in range(len(sides)):
        if j == object_index:
            continue
        # x lives on the displaced object; the mirrored entries are equal
        _cross_block(sides[object_index], sides[j], quad, kappa,
                     kappa * kappa, 1.0, 1, direction, out)
    return MatrixDerivative(
        out, _blocks(config), kappa, object_index, direction
    )
