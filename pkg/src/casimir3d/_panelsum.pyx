# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled panel-pair accumulation kernel.

Semantics match casimir3d._panelsum_py.accumulate; see that module for the
contract.  This version runs the quadrature and scatter loops in C.
"""

from libc.math cimport exp, sqrt

import numpy as np


def accumulate(
    double[:, :, ::1] tri_a, double[:, ::1] coef_a, double[:, ::1] div_a,
    double[:, :, ::1] free_a, long long[:, ::1] idx_a,
    double[:, :, ::1] tri_b, double[:, ::1] coef_b, double[:, ::1] div_b,
    double[:, :, ::1] free_b, long long[:, ::1] idx_b,
    double[:, ::1] bary, double[::1] wts,
    double kappa, double ff_scale, double div_scale,
    int deriv, double[::1] direction, int mirror, double[:, ::1] out,
):
    cdef Py_ssize_t P = tri_a.shape[0]
    cdef Py_ssize_t Q = wts.shape[0]
    cdef Py_ssize_t p, q, k, ia, ib
    cdef double a0[3]
    cdef double ea1[3]
    cdef double ea2[3]
    cdef double eb1[3]
    cdef double eb2[3]
    cdef double b0[3]
    cdef double cx[3]
    cdef double x[3]
    cdef double y[3]
    cdef double mx[3]
    cdef double my[3]
    cdef double pa[3]
    cdef double pb[3]
    cdef double dirv[3]
    cdef double m0, mt, area_a, area_b, jac, w, g, r, r2, dd
    cdef double xi_a, eta_a, xi_b, eta_b, dx, dy, dz, ff, val, padotpb, inv4pi
    cdef long long row, col

    inv4pi = 1.0 / (16.0 * np.arctan(1.0))
    for k in range(3):
        dirv[k] = direction[k]

    for p in range(P):
        for k in range(3):
            a0[k] = tri_a[p, 0, k]
            ea1[k] = tri_a[p, 1, k] - a0[k]
            ea2[k] = tri_a[p, 2, k] - a0[k]
            b0[k] = tri_b[p, 0, k] - a0[k]
            eb1[k] = tri_b[p, 1, k] - tri_b[p, 0, k]
            eb2[k] = tri_b[p, 2, k] - tri_b[p, 0, k]
        cx[0] = ea1[1] * ea2[2] - ea1[2] * ea2[1]
        cx[1] = ea1[2] * ea2[0] - ea1[0] * ea2[2]
        cx[2] = ea1[0] * ea2[1] - ea1[1] * ea2[0]
        area_a = 0.5 * sqrt(cx[0] * cx[0] + cx[1] * cx[1] + cx[2] * cx[2])
        cx[0] = eb1[1] * eb2[2] - eb1[2] * eb2[1]
        cx[1] = eb1[2] * eb2[0] - eb1[0] * eb2[2]
        cx[2] = eb1[0] * eb2[1] - eb1[1] * eb2[0]
        area_b = 0.5 * sqrt(cx[0] * cx[0] + cx[1] * cx[1] + cx[2] * cx[2])
        jac = 4.0 * area_a * area_b

        m0 = 0.0
        mt = 0.0
        for k in range(3):
            mx[k] = 0.0
            my[k] = 0.0
        for q in range(Q):
            xi_a = bary[q, 0]
            eta_a = bary[q, 1]
            xi_b = bary[q, 2]
            eta_b = bary[q, 3]
            for k in range(3):
                x[k] = xi_a * ea1[k] + eta_a * ea2[k]
                y[k] = b0[k] + xi_b * eb1[k] + eta_b * eb2[k]
            dx = x[0] - y[0]
            dy = x[1] - y[1]
            dz = x[2] - y[2]
            r2 = dx * dx + dy * dy + dz * dz
            r = sqrt(r2)
            g = exp(-kappa * r) * inv4pi / r
            if deriv:
                dd = dx * dirv[0] + dy * dirv[1] + dz * dirv[2]
                g = -dd / r * (kappa + 1.0 / r) * g
            w = wts[q] * g
            m0 += w
            mt += w * (x[0] * y[0] + x[1] * y[1] + x[2] * y[2])
            for k in range(3):
                mx[k] += w * x[k]
                my[k] += w * y[k]
        m0 *= jac
        mt *= jac
        for k in range(3):
            mx[k] *= jac
            my[k] *= jac

        for ia in range(3):
            row = idx_a[p, ia]
            if row < 0:
                continue
            for k in range(3):
                pa[k] = free_a[p, ia, k] - a0[k]
            for ib in range(3):
                col = idx_b[p, ib]
                if col < 0:
                    continue
                padotpb = 0.0
                ff = mt
                for k in range(3):
                    pb[k] = free_b[p, ib, k] - a0[k]
                    ff -= pb[k] * mx[k] + pa[k] * my[k]
                    padotpb += pa[k] * pb[k]
                ff += padotpb * m0
                val = (ff_scale * coef_a[p, ia] * coef_b[p, ib] * ff
                       + div_scale * div_a[p, ia] * div_b[p, ib] * m0)
                out[row, col] += val
                if mirror:
                    out[col, row] += val
