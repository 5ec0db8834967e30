"""Semi-infinite imaginary-wavenumber integration of energy and force.

Units: hbar = c = 1; lengths in the mesh unit, energies in hbar*c per unit
length, forces in hbar*c per unit length squared.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import assembly, spectral
from .quadrature import QuadratureSpec, gauss_legendre_01


@dataclass
class SweepResult:
    param_name: str
    param_value: float
    energy: float
    force: float | None
    error_estimate: float
    n_basis: int
    wall_seconds: float
    status: str = "ok"


def kappa_nodes(spec, d_min=None):
    """Mapped Gauss-Legendre nodes/weights for integrals over (0, inf).

    u in (0,1) maps to kappa = kappa0 * u/(1-u); endpoints are interior so
    kappa = 0 and kappa = inf are never evaluated.
    """
    kappa0 = spec.kappa_scale
    if kappa0 is None:
        if d_min is None or d_min <= 0:
            raise ValueError("need a positive d_min to scale the kappa rule")
        kappa0 = 1.0 / d_min
    u, w = gauss_legendre_01(spec.n_points)
    kap = kappa0 * u / (1.0 - u)
    wts = w * kappa0 / (1.0 - u) ** 2
    return list(zip(kap.tolist(), wts.tolist()))


def _sample(config, kap, quad, object_index, direction):
    m = assembly.assemble(config, kap, quad)
    m_inf = assembly.assemble_inf(config, kap, quad, base=m)
    dm = None
    if object_index is not None:
        dm = assembly.assemble_dz(config, object_index, kap, quad, direction)
    return spectral.integrand_sample(m, m_inf, dm)


def _integrate(config, spec, object_index, direction, workers):
    nodes = kappa_nodes(spec, d_min=_dmin(config))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_sample, config, kap, spec, object_index, direction)
                for kap, _ in nodes
            ]
            samples = [f.result() for f in futures]
    else:
        samples = [
            _sample(config, kap, spec, object_index, direction)
            for kap, _ in nodes
        ]
    # fixed-order accumulation for reproducibility
    energy = sum(w * s.energy_integrand for (_, w), s in zip(nodes, samples))
    energy /= 2.0 * np.pi
    force = None
    if object_index is not None:
        force = -sum(w * s.force_integrand for (_, w), s in zip(nodes, samples))
        force /= 2.0 * np.pi
    return energy, force


def _dmin(config):
    if len(config) < 2:
        return None
    return config.min_separation_all()


def integrate_energy(config, spec=None, workers=1, error_estimate=False,
                     param_name="", param_value=0.0):
    """Casimir interaction energy of a configuration, in hbar*c/length."""
    spec = spec or QuadratureSpec()
    start = time.perf_counter()
    if len(config) < 2:
        return SweepResult(param_name, param_value, 0.0, None, 0.0,
                           config.n_basis, time.perf_counter() - start)
    energy, _ = _integrate(config, spec, None, None, workers)
    err = np.nan
    if error_estimate:
        coarse, _ = _integrate(config, spec.halved(), None, None, workers)
        err = abs(energy - coarse)
    return SweepResult(param_name, param_value, energy, None, err,
                       config.n_basis, time.perf_counter() - start)


def integrate_force(config, object_index, spec=None, direction="z",
                    workers=1, error_estimate=False,
                    param_name="", param_value=0.0):
    """Force on one object along `direction` (and the energy as a
    by-product), in hbar*c/length^2."""
    spec = spec or QuadratureSpec()
    start = time.perf_counter()
    energy, force = _integrate(config, spec, object_index, direction, workers)
    err = np.nan
    if error_estimate:
        _, coarse = _integrate(config, spec.halved(), object_index,
                               direction, workers)
        err = abs(force - coarse)
    res = SweepResult(param_name, param_value, energy, force, err,
                      config.n_basis, time.perf_counter() - start)
    return res
