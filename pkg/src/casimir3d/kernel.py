"""Screened kernel evaluation and panel-pair classification.

The interaction kernel between surface-current elements is the weak-form
pairing  II [ f_a.f_b + (1/kappa^2)(div f_a)(div f_b) ] g_kappa(|x - y|)
with g_kappa(r) = exp(-kappa r)/(4 pi r); derivatives of the original
tensor kernel are moved onto the basis divergences, which is exact for
edge functions on a closed mesh (no line charges).
"""

import enum

import numpy as np

from . import backend, quadrature


class PanelPairClass(enum.Enum):
    SELF = "self"
    COMMON_EDGE = "edge"
    COMMON_VERTEX = "vertex"
    NEAR = "near"
    FAR = "far"


def scalar_green(kappa, r):
    """exp(-kappa r) / (4 pi r)."""
    if np.any(np.asarray(r) <= 0):
        raise ValueError("scalar_green requires r > 0")
    return np.exp(-kappa * r) / (4.0 * np.pi * r)


def scalar_green_dz(kappa, x, xp, direction=(0.0, 0.0, 1.0)):
    """Derivative of g_kappa(|x + s*dir - xp|) w.r.t. s at s = 0."""
    x = np.asarray(x, float)
    xp = np.asarray(xp, float)
    d = x - xp
    r = np.linalg.norm(d, axis=-1)
    if np.any(r == 0):
        raise ValueError("coincident points")
    dd = d @ np.asarray(direction, float)
    return -dd / r * (kappa + 1.0 / r) * scalar_green(kappa, r)


def classify_pair(inst_a, panel_a, inst_b, panel_b):
    """Classify a panel pair and return (cls, shared local-vertex pairs).

    Singular classes arise only within one instance; Near/Far is decided by
    centroid distance against 3x the larger panel diameter.
    """
    if inst_a is inst_b:
        if panel_a == panel_b:
            return PanelPairClass.SELF, [(0, 0), (1, 1), (2, 2)]
        va = inst_a.mesh.panels[panel_a]
        vb = inst_b.mesh.panels[panel_b]
        shared = [
            (ia, ib) for ia in range(3) for ib in range(3) if va[ia] == vb[ib]
        ]
        if len(shared) == 2:
            return PanelPairClass.COMMON_EDGE, shared
        if len(shared) == 1:
            return PanelPairClass.COMMON_VERTEX, shared
    ma, mb = inst_a.world_mesh, inst_b.world_mesh
    dist = np.linalg.norm(ma.centroids[panel_a] - mb.centroids[panel_b])
    limit = 3.0 * max(ma.diameters[panel_a], mb.diameters[panel_b])
    cls = PanelPairClass.NEAR if dist < limit else PanelPairClass.FAR
    return cls, []


def pair_permutations(cls, shared):
    """Local vertex orders putting shared vertices first, as the singular
    rules expect (shared edge -> local 0,1 of both, same order; shared
    vertex -> local 0)."""
    if cls is PanelPairClass.SELF:
        return (0, 1, 2), (0, 1, 2)
    if cls is PanelPairClass.COMMON_EDGE:
        (a1, b1), (a2, b2) = shared
        pa = (a1, a2, 3 - a1 - a2)
        pb = (b1, b2, 3 - b1 - b2)
        return pa, pb
    if cls is PanelPairClass.COMMON_VERTEX:
        ((a1, b1),) = shared
        rest_a = [i for i in range(3) if i != a1]
        rest_b = [i for i in range(3) if i != b1]
        return (a1, *rest_a), (b1, *rest_b)
    return (0, 1, 2), (0, 1, 2)


def pair_rule(cls, quad):
    """Quadrature rule (bary, weights) for a classified panel pair."""
    if cls is PanelPairClass.SELF:
        return quadrature.singular_rule("self", quad.duffy_order)
    if cls is PanelPairClass.COMMON_EDGE:
        return quadrature.singular_rule("edge", quad.duffy_order)
    if cls is PanelPairClass.COMMON_VERTEX:
        return quadrature.singular_rule("vertex", quad.duffy_order)
    if cls is PanelPairClass.NEAR:
        return quadrature.product_rule(quad.near_points, quad.near_points)
    return quadrature.product_rule(quad.far_points, quad.far_points)


def rwg_pair_integral(inst_a, edge_a, inst_b, edge_b, kappa, quad=None):
    """Galerkin integral between two edge basis functions.

    Sums the contributions of the 2x2 panel pairs of the two supports, each
    routed through the rule matching its classification.  Returns the
    unscaled weak-form value (including the 1/kappa^2 divergence term).
    """
    if quad is None:
        quad = quadrature.QuadratureSpec()
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    ea = inst_a.basis.edges[edge_a]
    eb = inst_b.basis.edges[edge_b]
    out = np.zeros((1, 1))
    for fa in (ea.plus_panel, ea.minus_panel):
        for fb in (eb.plus_panel, eb.minus_panel):
            cls, shared = classify_pair(inst_a, fa, inst_b, fb)
            perm_a, perm_b = pair_permutations(cls, shared)
            bary, wts = pair_rule(cls, quad)
            tri_a, coef_a, div_a, idx_a = _single_panel(
                inst_a, fa, perm_a, edge_a
            )
            tri_b, coef_b, div_b, idx_b = _single_panel(
                inst_b, fb, perm_b, edge_b
            )
            backend.accumulate(
                tri_a, coef_a, div_a, tri_a, idx_a,
                tri_b, coef_b, div_b, tri_b, idx_b,
                bary, wts, kappa, 1.0, 1.0 / kappa**2,
                0, np.zeros(3), 0, out,
            )
    return float(out[0, 0])


def _single_panel(inst, f, perm, edge_index):
    perm = list(perm)
    tri = inst.world_vertices[inst.mesh.panels[f]][perm][None]
    coef = inst.basis.coef[f][perm][None]
    div = inst.basis.div_coef[f][perm][None]
    bidx = inst.basis.basis_index[f][perm]
    idx = np.where(bidx == edge_index, 0, -1).astype(np.int64)[None]
    return (
        np.ascontiguousarray(tri),
        np.ascontiguousarray(coef),
        np.ascontiguousarray(div),
        np.ascontiguousarray(idx),
    )
