"""Pure-numpy implementation of the panel-pair accumulation kernel.

Slower drop-in replacement for the compiled extension; selected automatically
at import when the extension is unavailable (see backend.py).
"""

import numpy as np

_CHUNK = 512


def accumulate(
    tri_a, coef_a, div_a, free_a, idx_a,
    tri_b, coef_b, div_b, free_b, idx_b,
    bary, wts, kappa, ff_scale, div_scale,
    deriv, direction, mirror, out,
):
    """Add the weak-form contributions of a batch of panel pairs to `out`.

    For each pair p and each slot combination (ia, ib), adds

        ff_scale * coef_a*coef_b * II[(x - pa).(y - pb) g]
      + div_scale * div_a*div_b * II[g]

    at (idx_a, idx_b), where g = exp(-kappa r)/(4 pi r), or its directional
    displacement derivative when deriv is true.  The paired rule (bary, wts)
    holds reference coordinates on both triangles; physical integrals include
    the 4*A_a*A_b Jacobian.  Slots with index < 0 are skipped; with mirror,
    the transposed entry receives the same value.
    """
    P = tri_a.shape[0]
    for lo in range(0, P, _CHUNK):
        hi = min(lo + _CHUNK, P)
        _accumulate_chunk(
            tri_a[lo:hi], coef_a[lo:hi], div_a[lo:hi], free_a[lo:hi], idx_a[lo:hi],
            tri_b[lo:hi], coef_b[lo:hi], div_b[lo:hi], free_b[lo:hi], idx_b[lo:hi],
            bary, wts, kappa, ff_scale, div_scale, deriv, direction, mirror, out,
        )


def _accumulate_chunk(
    tri_a, coef_a, div_a, free_a, idx_a,
    tri_b, coef_b, div_b, free_b, idx_b,
    bary, wts, kappa, ff_scale, div_scale,
    deriv, direction, mirror, out,
):
    ea1 = tri_a[:, 1] - tri_a[:, 0]
    ea2 = tri_a[:, 2] - tri_a[:, 0]
    eb1 = tri_b[:, 1] - tri_b[:, 0]
    eb2 = tri_b[:, 2] - tri_b[:, 0]
    area_a = 0.5 * np.linalg.norm(np.cross(ea1, ea2), axis=1)
    area_b = 0.5 * np.linalg.norm(np.cross(eb1, eb2), axis=1)

    # quadrature points, shifted by the first vertex of panel a per pair
    x = (bary[None, :, 0, None] * ea1[:, None, :]
         + bary[None, :, 1, None] * ea2[:, None, :])
    shift_b = tri_b[:, 0] - tri_a[:, 0]
    y = (shift_b[:, None, :]
         + bary[None, :, 2, None] * eb1[:, None, :]
         + bary[None, :, 3, None] * eb2[:, None, :])

    d = x - y
    r = np.linalg.norm(d, axis=2)
    g = np.exp(-kappa * r) / (4.0 * np.pi * r)
    if deriv:
        g = -(d @ direction) / r * (kappa + 1.0 / r) * g
    gw = g * wts[None, :] * (4.0 * area_a * area_b)[:, None]

    m0 = gw.sum(axis=1)
    mx = np.einsum("pq,pqk->pk", gw, x)
    my = np.einsum("pq,pqk->pk", gw, y)
    mt = np.einsum("pq,pq->p", gw, np.einsum("pqk,pqk->pq", x, y))

    pa = free_a - tri_a[:, 0][:, None, :]  # (P, 3slots, 3)
    pb = free_b - tri_a[:, 0][:, None, :]
    # II (x - pa).(y - pb) g for every slot pair
    ff = (mt[:, None, None]
          - np.einsum("pjk,pk->pj", pb, mx)[:, None, :]
          - np.einsum("pik,pk->pi", pa, my)[:, :, None]
          + np.einsum("pik,pjk->pij", pa, pb) * m0[:, None, None])
    val = (ff_scale * coef_a[:, :, None] * coef_b[:, None, :] * ff
           + div_scale * div_a[:, :, None] * div_b[:, None, :] * m0[:, None, None])

    rows = np.broadcast_to(idx_a[:, :, None], val.shape).ravel()
    cols = np.broadcast_to(idx_b[:, None, :], val.shape).ravel()
    flat = val.ravel()
    keep = (rows >= 0) & (cols >= 0)
    rows, cols, flat = rows[keep], cols[keep], flat[keep]
    np.add.at(out, (rows, cols), flat)
    if mirror:
        np.add.at(out, (cols, rows), flat)
