"""Quadrature rules for triangle-pair surface integrals.

Points on a triangle are expressed in reference coordinates (xi, eta) on the
unit triangle {xi >= 0, eta >= 0, xi + eta <= 1}; the physical point is
v0 + xi*(v1 - v0) + eta*(v2 - v0).  Pair rules are arrays of shape (Q, 4)
holding (xi_a, eta_a, xi_b, eta_b) with weights normalized so that a constant
kernel integrates to 1/4 (the product of the two reference-triangle areas);
the physical integral is obtained by multiplying with 4*A_a*A_b.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class QuadratureSpec:
    """Numerical settings: the imaginary-wavenumber rule (mapped
    Gauss-Legendre with n_points nodes and scale kappa_scale, defaulting to
    the inverse minimum separation) and the triangle-pair orders."""

    n_points: int = 24
    kappa_scale: float | None = None  # 1/length; None -> 1/d_min
    far_points: int = 6
    near_points: int = 16
    duffy_order: int = 5

    def __post_init__(self):
        if self.n_points < 4:
            raise ValueError("n_points must be >= 4")
        if self.kappa_scale is not None and self.kappa_scale <= 0:
            raise ValueError("kappa_scale must be positive")

    def halved(self):
        return QuadratureSpec(
            max(4, self.n_points // 2), self.kappa_scale,
            self.far_points, self.near_points, self.duffy_order,
        )

# Symmetric triangle Gauss rules (barycentric orbits), weights sum to 1.
# 6 points, exact through degree 4.
_TRI6 = [
    (0.223381589678011, (0.108103018168070, 0.445948490915965, 0.445948490915965)),
    (0.109951743655322, (0.816847572980459, 0.091576213509771, 0.091576213509771)),
]
# 16 points, exact through degree 8.
_TRI16 = [
    (0.14431560767777396, (1 / 3, 1 / 3, 1 / 3)),
    (0.09509163426729272, (0.08141482341456895, 0.45929258829271552, 0.45929258829271552)),
    (0.10321737053471909, (0.65886138449649550, 0.17056930775175225, 0.17056930775175225)),
    (0.03245849762319900, (0.89890554336593750, 0.05054722831703125, 0.05054722831703125)),
    (0.02723031417443227, (0.00839477740994723, 0.26311282963466137, 0.72849239295539140)),
]


def _expand_orbits(orbits):
    pts, wts = [], []
    for w, bary in orbits:
        seen = []
        for perm in ((0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (2, 1, 0), (1, 0, 2)):
            p = tuple(bary[i] for i in perm)
            if any(np.allclose(p, q, atol=1e-14) for q in seen):
                continue
            seen.append(p)
            pts.append(p)
            wts.append(w)
    return np.asarray(pts), np.asarray(wts)


@lru_cache(maxsize=None)
def triangle_rule(n_points):
    """Return (points, weights) of a symmetric triangle rule.

    Points are (xi, eta) on the unit triangle; weights sum to 1/2 (the
    reference-triangle area).  Supported: n_points in {6, 16}.
    """
    if n_points == 6:
        bary, w = _expand_orbits(_TRI6)
    elif n_points == 16:
        bary, w = _expand_orbits(_TRI16)
    else:
        raise ValueError(f"no {n_points}-point triangle rule available")
    # barycentric (l0, l1, l2) -> xi = l1, eta = l2
    pts = bary[:, 1:3].copy()
    return pts, 0.5 * w


@lru_cache(maxsize=None)
def gauss_legendre_01(n):
    """Gauss-Legendre nodes/weights on (0, 1)."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def product_rule(n_a, n_b):
    """Tensor rule over a pair of well-separated triangles: (Q, 4) + weights."""
    pa, wa = triangle_rule(n_a)
    pb, wb = triangle_rule(n_b)
    qa = len(wa)
    qb = len(wb)
    bary = np.empty((qa * qb, 4))
    bary[:, 0:2] = np.repeat(pa, qb, axis=0)
    bary[:, 2:4] = np.tile(pb, (qa, 1))
    wts = (wa[:, None] * wb[None, :]).ravel()
    return np.ascontiguousarray(bary), np.ascontiguousarray(wts)


def _tensor4(order):
    x, w = gauss_legendre_01(order)
    g = np.meshgrid(x, x, x, x, indexing="ij")
    xsi, eta1, eta2, eta3 = (a.ravel() for a in g)
    gw = np.meshgrid(w, w, w, w, indexing="ij")
    w4 = gw[0].ravel() * gw[1].ravel() * gw[2].ravel() * gw[3].ravel()
    return xsi, eta1, eta2, eta3, w4


@lru_cache(maxsize=None)
def singular_rule(kind, order):
    """Regularized rule for panel pairs sharing geometry.

    kind: 'self' (identical panels), 'edge' (two shared vertices, which must
    be local vertices 0 and 1 of BOTH triangles, in the same order), or
    'vertex' (one shared vertex, local vertex 0 of both).

    The 1/r singularity is removed by splitting the 4D parameter domain into
    subdomains and collapsing each with a Duffy-type change of variables, so
    plain tensor Gauss-Legendre of the given order converges rapidly.
    Returns (bary (Q, 4), weights) in the same convention as product_rule.
    """
    xsi, eta1, eta2, eta3, w4 = _tensor4(order)
    regions = []  # tuples (xt, yt, xs, ys, w) in "collapsed" coordinates
    if kind == "self":
        w = w4 * xsi**3 * eta1**2 * eta2
        e12 = eta1 * eta2
        e123 = eta1 * eta2 * eta3
        regions = [
            (xsi, xsi * (1 - eta1 + e12), xsi * (1 - e123), xsi * (1 - eta1), w),
            (xsi * (1 - e123), xsi * (1 - eta1), xsi, xsi * (1 - eta1 + e12), w),
            (xsi, xsi * (eta1 - e12 + e123), xsi * (1 - e12), xsi * (eta1 - e12), w),
            (xsi * (1 - e12), xsi * (eta1 - e12), xsi, xsi * (eta1 - e12 + e123), w),
            (xsi * (1 - e123), xsi * (eta1 - e123), xsi, xsi * (eta1 - e12), w),
            (xsi, xsi * (eta1 - e12), xsi * (1 - e123), xsi * (eta1 - e123), w),
        ]
    elif kind == "edge":
        w = w4 * xsi**3 * eta1**2
        e12 = eta1 * eta2
        e123 = eta1 * eta2 * eta3
        regions = [
            (xsi, xsi * eta1 * eta3, xsi * (1 - e12), xsi * eta1 * (1 - eta2), w),
            (xsi, xsi * eta1, xsi * (1 - e123), xsi * e12 * (1 - eta3), w * eta2),
            (xsi * (1 - e12), xsi * eta1 * (1 - eta2), xsi, xsi * e123, w * eta2),
            (xsi * (1 - e123), xsi * e12 * (1 - eta3), xsi, xsi * eta1, w * eta2),
            (xsi * (1 - e123), xsi * eta1 * (1 - eta2 * eta3), xsi, xsi * e12, w * eta2),
        ]
    elif kind == "vertex":
        w = w4 * xsi**3 * eta2
        regions = [
            (xsi, xsi * eta1, xsi * eta2, xsi * eta2 * eta3, w),
            (xsi * eta2, xsi * eta2 * eta3, xsi, xsi * eta1, w),
        ]
    else:
        raise ValueError(f"unknown singular rule kind {kind!r}")

    bary_parts, wt_parts = [], []
    for xt, yt, xs, ys, w in regions:
        b = np.empty((len(w), 4))
        # collapsed coords live on {0 <= y <= x <= 1}; shear to the unit triangle
        b[:, 0] = xt - yt
        b[:, 1] = yt
        b[:, 2] = xs - ys
        b[:, 3] = ys
        bary_parts.append(b)
        wt_parts.append(w)
    bary = np.vstack(bary_parts)
    wts = np.concatenate(wt_parts)
    return np.ascontiguousarray(bary), np.ascontiguousarray(wts)
