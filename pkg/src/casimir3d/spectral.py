"""Log-determinant ratios and force traces of interaction matrices.

Production paths factorize (Cholesky); full eigendecompositions are kept as
independent cross-checks.  Matrices are expected symmetric positive definite
at imaginary wavenumber; an indefinite fallback exists only to produce a
diagnosable error.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

EIG_PATH_MAX_DIM = 1000
_CLAMP = 1e-15


class FactorizationError(RuntimeError):
    pass


@dataclass
class IntegrandSample:
    kappa: float
    energy_integrand: float  # log det M / det M_inf
    force_integrand: float | None  # Tr{M^-1 dM/dz}
    min_pivot: float
    condition_estimate: float


def _logdet_spd(a):
    """(logdet, min pivot, cond estimate) via Cholesky; raises on failure."""
    try:
        c = la.cholesky(a, lower=True, check_finite=False)
    except la.LinAlgError as exc:
        raise la.LinAlgError(str(exc)) from exc
    d = np.diag(c)
    return 2.0 * np.log(d).sum(), float(d.min() ** 2), float((d.max() / d.min()) ** 2)


def _logdet_sym(a):
    """log|det| and determinant sign of a symmetric matrix.

    Cholesky first; on a non-positive pivot falls back to a symmetric
    indefinite LDL^T factorization with sign tracking.
    """
    try:
        ld, piv, cond = _logdet_spd(a)
        return ld, 1, piv, cond
    except la.LinAlgError:
        pass
    lu, d, _ = la.ldl(a)
    ld = 0.0
    sign = 1
    i = 0
    n = a.shape[0]
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0.0:  # 2x2 block
            det = d[i, i] * d[i + 1, i + 1] - d[i + 1, i] * d[i, i + 1]
            i += 2
        else:
            det = d[i, i]
            i += 1
        if det == 0.0:
            raise FactorizationError("singular matrix in log-det fallback")
        if det < 0:
            sign = -sign
        ld += np.log(abs(det))
    return ld, sign, 0.0, np.inf


def _require_layout(m, m_inf):
    if m.matrix.shape != m_inf.matrix.shape or m.blocks != m_inf.blocks:
        raise ValueError("matrix layouts differ")
    if m.kappa != m_inf.kappa:
        raise ValueError("matrices assembled at different kappa")
    if not m_inf.is_inf:
        raise ValueError("second argument must be the infinite-separation variant")


def logdet_ratio(m, m_inf):
    """log det M - log det M_inf via factorization pivots."""
    _require_layout(m, m_inf)
    if len(m.blocks) == 1:
        return 0.0
    ld_m, s_m, _, _ = _logdet_sym(m.matrix)
    ld_i, s_i, _, _ = _logdet_sym(m_inf.matrix)
    if s_m * s_i != 1:
        raise FactorizationError(
            "negative determinant ratio: assembly or quadrature defect"
        )
    return ld_m - ld_i


def logdet_ratio_eig(m, m_inf):
    """Eigenvalue-sum cross-check of logdet_ratio (dimension-capped)."""
    _require_layout(m, m_inf)
    if m.n > EIG_PATH_MAX_DIM:
        raise ValueError("eigenvalue path capped at N <= 1000")
    if len(m.blocks) == 1:
        return 0.0
    w = la.eigh(m.matrix, eigvals_only=True)
    w_inf = la.eigh(m_inf.matrix, eigvals_only=True)
    if w.min() <= 0 or w_inf.min() <= 0:
        raise FactorizationError("non-positive eigenvalue")
    return float(np.log(w).sum() - np.log(w_inf).sum())


def force_trace(m, dm):
    """Tr{M^-1 dM} via one factorization and N solves."""
    if m.matrix.shape != dm.matrix.shape:
        raise ValueError("matrix layouts differ")
    if m.kappa != dm.kappa:
        raise ValueError("matrices assembled at different kappa")
    try:
        c = la.cho_factor(m.matrix, lower=True, check_finite=False)
    except la.LinAlgError as exc:
        raise FactorizationError(f"matrix not positive definite: {exc}") from exc
    x = la.cho_solve(c, dm.matrix, check_finite=False)
    return float(np.trace(x))


def force_eigs(m, dm):
    """All eigenvalues of the pencil dM v = alpha M v; their sum equals
    force_trace (dimension-capped cross-check)."""
    if m.n > EIG_PATH_MAX_DIM:
        raise ValueError("eigenvalue path capped at N <= 1000")
    sym = 0.5 * (dm.matrix + dm.matrix.T)
    try:
        return la.eigh(sym, m.matrix, eigvals_only=True)
    except la.LinAlgError as exc:
        raise FactorizationError(str(exc)) from exc


def integrand_sample(m, m_inf, dm=None):
    """Energy (and optional force) integrand with one factorization of M.

    Values below 1e-15 in magnitude are clamped to zero to avoid integrating
    log-of-rounding noise.
    """
    _require_layout(m, m_inf)
    try:
        c = la.cholesky(m.matrix, lower=True, check_finite=False)
    except la.LinAlgError as exc:
        raise FactorizationError(f"matrix not positive definite: {exc}") from exc
    d = np.diag(c)
    ld_m = 2.0 * np.log(d).sum()
    if len(m.blocks) == 1:
        energy = 0.0
    else:
        ld_i = 0.0
        for i in range(len(m.blocks)):
            s = m_inf.block_slice(i)
            ld_i += _logdet_spd(m_inf.matrix[s, s])[0]
        energy = ld_m - ld_i
    if abs(energy) < _CLAMP:
        energy = 0.0
    force = None
    if dm is not None:
        x = la.cho_solve((c, True), dm.matrix, check_finite=False)
        force = float(np.trace(x))
        if abs(force) < _CLAMP:
            force = 0.0
    return IntegrandSample(
        m.kappa, energy, force,
        float(d.min() ** 2), float((d.max() / d.min()) ** 2),
    )
