"""Acceptance suite: one test per top-level correctness criterion.

Each test prints a single PASS/FAIL line (visible in verbose runs via its
outcome) and carries the measured numbers in its assertion message so a
failure documents exactly what was observed.
"""

import numpy as np
import pytest

import oracles
from casimir3d import (
    Configuration, ObjectInstance, QuadratureSpec, RigidTransform, assemble,
    assemble_dz, assemble_inf, force_eigs, force_trace, generate_sphere,
    generate_tetrahedron, integrate_energy, integrate_force, logdet_ratio,
    logdet_ratio_eig,
)
from casimir3d.cli import preset_crossed_capsules, preset_sphere_pair
from casimir3d.kernel import (
    PanelPairClass, classify_pair, pair_permutations, pair_rule,
)
from casimir3d.xi import kappa_nodes


def _report(num, label, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {label}"
    if detail:
        line += f" ({detail})"
    print(line)
    return ok


def _sphere_pair(d, subdiv, radius=1.0):
    """Two R=1 icospheres at center distance d."""
    m = generate_sphere(radius, subdiv)
    return Configuration([
        ObjectInstance("a", m),
        ObjectInstance("b", m, RigidTransform.translation_of([0, 0, d])),
    ])


def _tet_pair(d, subdiv=1):
    m = generate_tetrahedron(1.0, subdiv)
    return Configuration([
        ObjectInstance("a", m),
        ObjectInstance("b", m, RigidTransform.translation_of([0, d, 0])),
    ])


# ---------------------------------------------------------------------------
# 1. dual-path spectral equivalence
# ---------------------------------------------------------------------------

def test_criterion_01_dual_path_spectral_equivalence():
    quad = QuadratureSpec()
    worst_ld, worst_tr = 0.0, 0.0
    for cfg in (_sphere_pair(4.0, 1), _tet_pair(2.13)):
        assert cfg.n_basis <= 500
        d = cfg.min_separation_all()
        for c in (0.5, 1.0, 2.0):
            kap = c / d
            m = assemble(cfg, kap, quad)
            m_inf = assemble_inf(cfg, kap, quad, base=m)
            dm = assemble_dz(cfg, 1, kap, quad, "z" if cfg[1].transform
                             .translation[2] else "y")
            ld = logdet_ratio(m, m_inf)
            worst_ld = max(worst_ld, abs(ld - logdet_ratio_eig(m, m_inf)))
            tr = force_trace(m, dm)
            worst_tr = max(
                worst_tr, abs(tr - force_eigs(m, dm).sum()) / abs(tr))
    ok = worst_ld <= 1e-9 and worst_tr <= 1e-8
    _report(1, "dual-path log-det and trace equivalence", ok,
            f"logdet diff {worst_ld:.2e}, trace rel diff {worst_tr:.2e}")
    assert worst_ld <= 1e-9, f"logdet path disagreement {worst_ld:.3e}"
    assert worst_tr <= 1e-8, f"trace path disagreement {worst_tr:.3e}"


# ---------------------------------------------------------------------------
# 2 + 3. energy-force consistency and Newton's third law (shared run)
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def sphere_force_run():
    d, h = 4.0, 4e-3  # s = 2 spheres, central difference at 1e-3 * d
    quad = QuadratureSpec()
    f_b = integrate_force(_sphere_pair(d, 2), 1, quad, direction="z")
    f_a = integrate_force(_sphere_pair(d, 2), 0, quad, direction="z")
    e_plus = integrate_energy(_sphere_pair(d + h, 2), quad).energy
    e_minus = integrate_energy(_sphere_pair(d - h, 2), quad).energy
    return f_a, f_b, (e_plus - e_minus) / (2 * h)


def test_criterion_02_energy_force_consistency(sphere_force_run):
    _, f_b, dE = sphere_force_run
    rel = abs(f_b.force + dE) / abs(dE)
    ok = rel <= 1e-2
    _report(2, "force equals -dE/dz at d = 4R", ok,
            f"F {f_b.force:.6e}, -dE/dz {-dE:.6e}, rel {rel:.2e}")
    assert ok, f"force {f_b.force:.6e} vs -dE/dz {-dE:.6e}: rel {rel:.3e}"


def test_criterion_03_newtons_third_law(sphere_force_run):
    f_a, f_b, _ = sphere_force_run
    rel = abs(f_a.force + f_b.force) / max(abs(f_a.force), abs(f_b.force))
    ok = rel <= 1e-6
    _report(3, "pair forces cancel", ok, f"residual {rel:.2e}")
    assert ok, f"F_a {f_a.force:.6e} + F_b {f_b.force:.6e}: rel {rel:.3e}"


# ---------------------------------------------------------------------------
# 4. large-separation sphere asymptote vs dipole-scattering oracle
# ---------------------------------------------------------------------------

def test_criterion_04_large_separation_asymptote():
    dists = (6.0, 8.0, 10.0)
    levels = (1, 2, 3)
    quad = QuadratureSpec()
    scaled = {}  # (s, d) -> E * d^7
    for s in levels:
        for d in dists:
            e = integrate_energy(_sphere_pair(d, s), quad).energy
            scaled[(s, d)] = e * d**7
    const = {
        d: oracles.richardson([scaled[(s, d)] for s in levels]) for d in dists
    }
    oracle = oracles.dipole_asymptote(radius=1.0, d=100.0)
    rel = abs(const[10.0] - oracle) / abs(oracle)
    approaching = abs(const[10.0] - const[8.0]) < abs(const[8.0] - const[6.0])
    ok = rel <= 0.15 and approaching
    _report(4, "E*d^7 constant matches dipole oracle within 15%", ok,
            f"extrapolated {const[10.0]:.4f}, oracle {oracle:.4f}, "
            f"rel {rel:.3f}")
    assert rel <= 0.15, (
        f"constants {const}, oracle {oracle:.4f}, rel {rel:.3f}")
    assert approaching, f"constants not approaching a limit: {const}"


# ---------------------------------------------------------------------------
# 5. short-distance proximity-force trend
# ---------------------------------------------------------------------------

def test_criterion_05_pfa_trend():
    gaps = (0.25, 0.5, 1.0)
    quad = QuadratureSpec()
    ratios = []
    for gap in gaps:
        e = integrate_energy(preset_sphere_pair(gap, 2), quad).energy
        ratios.append(e / oracles.pfa_sphere_pair(1.0, gap))
    monotone = ratios[0] > ratios[1] > ratios[2]
    in_band = all(0.3 < r < 1.2 for r in ratios)
    ok = monotone and in_band
    _report(5, "E/E_PFA monotone toward 1 and inside (0.3, 1.2)", ok,
            "ratios " + ", ".join(f"{g}:{r:.3f}" for g, r in zip(gaps, ratios)))
    assert monotone, f"ratios not monotone toward 1: {ratios}"
    assert in_band, (
        f"E/E_PFA outside (0.3, 1.2): "
        + ", ".join(f"gap {g}: {r:.3f}" for g, r in zip(gaps, ratios))
        + "; the gap = 1.0 ratio is mesh-converged near 0.27 -- see the"
        " discussion shipped with the repository notes"
    )


# ---------------------------------------------------------------------------
# 6. sphere / crossed / parallel energy ordering
# ---------------------------------------------------------------------------

def test_criterion_06_capsule_sphere_ordering():
    from casimir3d.cli import preset_parallel_capsules
    quad = QuadratureSpec()
    res, subdiv, L = 12, 2, 6.0

    def trio(gap):
        return (
            integrate_energy(preset_sphere_pair(gap, subdiv), quad).energy,
            integrate_energy(
                preset_crossed_capsules(gap, L, res), quad).energy,
            integrate_energy(
                preset_parallel_capsules(gap, L, res), quad).energy,
        )

    e_sph1, e_cross1, e_par1 = trio(1.0)
    e_sph6, e_cross6, e_par6 = trio(6.0)
    ordered = e_par1 < e_cross1 < e_sph1 < 0
    cross_near_spheres = abs(e_cross1 - e_sph1) <= 0.25 * abs(e_sph1)
    parallel_dominates = abs(e_par1) >= 2.0 * abs(e_cross1)
    far_vals = (e_sph6, e_cross6, e_par6)
    far_close = (max(abs(v) for v in far_vals)
                 - min(abs(v) for v in far_vals)) <= 0.2 * max(
                     abs(v) for v in far_vals)
    ok = ordered and cross_near_spheres and parallel_dominates and far_close
    _report(6, "crossed capsules interpolate between spheres and parallel",
            ok, f"z=R: sph {e_sph1:.3e}, cross {e_cross1:.3e}, "
            f"par {e_par1:.3e}; z=6R: sph {e_sph6:.3e}, cross {e_cross6:.3e}, "
            f"par {e_par6:.3e}")
    assert ordered, (
        f"ordering violated at z=R: par {e_par1:.3e}, cross {e_cross1:.3e}, "
        f"spheres {e_sph1:.3e}")
    assert cross_near_spheres and parallel_dominates and far_close, (
        f"z=R: spheres {e_sph1:.3e}, crossed {e_cross1:.3e}, parallel "
        f"{e_par1:.3e}; z=6R: spheres {e_sph6:.3e}, crossed {e_cross6:.3e}, "
        f"parallel {e_par6:.3e}; the stated closeness tolerances are not "
        "reachable for these shapes -- see the repository notes"
    )


# ---------------------------------------------------------------------------
# 7. crossed-capsule force growth with length
# ---------------------------------------------------------------------------

def test_criterion_07_capsule_length_saturation():
    lengths = (4.0, 6.0, 8.0, 10.0, 12.0)
    quad = QuadratureSpec(n_points=20)
    res = 10
    forces = {}
    for Z in (2.0, 4.0):
        forces[Z] = [
            integrate_force(
                preset_crossed_capsules(Z, L, res), 1, quad, direction="z"
            ).force
            for L in lengths
        ]
    mag = [abs(f) for f in forces[2.0]]
    increasing = all(b > a for a, b in zip(mag, mag[1:]))
    increments = np.diff(mag)
    saturating = all(b < a for a, b in zip(increments, increments[1:]))
    # a + b/L fit through the last three points
    x = 1.0 / np.array(lengths[-3:])
    coeffs, res_sq = np.polyfit(x, mag[-3:], 1, full=True)[:2]
    a_fit = coeffs[1]
    resid = float(np.sqrt(res_sq[0])) if len(res_sq) else 0.0
    fit_ok = resid < 0.02 * abs(a_fit)
    closer_stronger = all(
        abs(f2) > abs(f4) for f2, f4 in zip(forces[2.0], forces[4.0]))
    ok = increasing and saturating and fit_ok and closer_stronger
    _report(7, "|F| grows and saturates with capsule length", ok,
            f"|F|(Z=2R) = {['%.3e' % m for m in mag]}, a = {a_fit:.3e}")
    assert increasing, f"|F| not increasing: {mag}"
    assert saturating, f"increments not shrinking: {increments}"
    assert fit_ok, f"tail fit residual {resid:.2e} vs a = {a_fit:.3e}"
    assert closer_stronger, f"Z=2R vs Z=4R: {forces}"


# ---------------------------------------------------------------------------
# 8. tetrahedron orientation minimum
# ---------------------------------------------------------------------------

def test_criterion_08_orientation_minimum():
    from casimir3d.cli import preset_tetrahedra
    quad = QuadratureSpec(n_points=16)
    thetas = np.linspace(-60.0, 60.0, 7)
    phis = np.linspace(0.0, 120.0, 7)
    grid = np.empty((7, 7))
    for i, th in enumerate(thetas):
        for j, ph in enumerate(phis):
            grid[i, j] = integrate_energy(
                preset_tetrahedra(th, ph, 1), quad).energy
    i0, j0 = np.unravel_index(np.argmin(grid), grid.shape)
    at_minimum = (thetas[i0], phis[j0]) == (0.0, 60.0)
    # the geometry is mirror symmetric: E(theta, phi) = E(-theta, 120 - phi)
    sym = np.abs(grid - grid[::-1, ::-1]).max() / np.abs(grid).max()
    ok = at_minimum and sym < 1e-6
    _report(8, "orientation grid minimum at (0, 60 deg)", ok,
            f"argmin ({thetas[i0]:g}, {phis[j0]:g}), symmetry {sym:.1e}")
    assert at_minimum, f"grid argmin at ({thetas[i0]:g}, {phis[j0]:g})"
    assert sym < 1e-6, f"mirror symmetry violated: {sym:.3e}"


# ---------------------------------------------------------------------------
# 9. invariant suite
# ---------------------------------------------------------------------------

def _production_pair(inst_a, fa, inst_b, fb, kappa, quad):
    from casimir3d import backend

    cls, shared = classify_pair(inst_a, fa, inst_b, fb)
    pa, pb = pair_permutations(cls, shared)
    bary, wts = pair_rule(cls, quad)

    def arrs(inst, f, perm):
        perm = list(perm)
        tri = inst.world_vertices[inst.mesh.panels[f]][perm]
        return (tri, inst.basis.coef[f][perm], inst.basis.div_coef[f][perm])

    ta, ca, da = arrs(inst_a, fa, pa)
    tb, cb, db = arrs(inst_b, fb, pb)
    out = np.zeros((3, 3))
    idx = np.array([[0, 1, 2]], dtype=np.int64)
    backend.accumulate(
        ta[None], ca[None], da[None], ta[None], idx,
        tb[None], cb[None], db[None], tb[None], idx,
        bary, wts, kappa, 1.0, 1.0, 0, np.zeros(3), 0, out,
    )
    return cls, out, (ta, ca, da), (tb, cb, db)


def test_criterion_09_invariant_suite():
    quad = QuadratureSpec()
    checks = {}

    # matrix symmetry
    cfg = _tet_pair(2.13)
    m = assemble(cfg, 1.1, quad)
    checks["symmetry"] = (
        np.abs(m.matrix - m.matrix.T).max() / np.abs(m.matrix).max(), 1e-10)

    # global rigid-motion invariance of the energy
    spec = QuadratureSpec(n_points=12)
    sph = _sphere_pair(3.0, 1)
    e0 = integrate_energy(sph, spec).energy
    moved = sph.transformed(RigidTransform(
        RigidTransform.rotation_deg([1.0, 2.0, 0.5], 73.0).rotation,
        np.array([0.3, -1.7, 2.9])))
    e1 = integrate_energy(moved, spec).energy
    checks["rigid motion"] = (abs(e1 - e0) / abs(e0), 1e-8)

    # uniform scaling of the stored matrix leaves the log-det ratio alone
    m_inf = assemble_inf(cfg, 1.1, quad, base=m)
    ld = logdet_ratio(m, m_inf)
    checks["scale invariance"] = (
        abs(logdet_ratio(m.scaled(37.0), m_inf.scaled(37.0)) - ld), 1e-12)

    # single object: exactly zero
    single = Configuration([ObjectInstance("a", generate_tetrahedron(1.0, 1))])
    e_single = integrate_energy(single, spec).energy
    checks["single object"] = (abs(e_single), 0.0)

    # kappa quadrature against closed forms
    d = 1.5
    nodes = kappa_nodes(QuadratureSpec(), d_min=d)
    v1 = sum(w * np.exp(-2 * d * k) for k, w in nodes)
    v2 = sum(w * k**2 * np.exp(-4 * d * k) for k, w in nodes)
    err = max(abs(v1 - 1 / (2 * d)) * 2 * d,
              abs(v2 - 2 / (4 * d) ** 3) * (4 * d) ** 3 / 2)
    checks["kappa quadrature"] = (err, 1e-9)

    # singular rule vs adaptive reference on a shared-edge pair
    a = ObjectInstance("a", generate_tetrahedron(1.0, 1))
    kap = 0.9
    pair = None
    for fa in range(a.mesh.n_panels):
        for fb in range(a.mesh.n_panels):
            if classify_pair(a, fa, a, fb)[0] is PanelPairClass.COMMON_EDGE:
                pair = (fa, fb)
                break
        if pair:
            break
    _, prod, (ta, ca, da), (tb, cb, db) = _production_pair(
        a, pair[0], a, pair[1], kap, quad)
    ref = oracles.adaptive_pair_integral(ta, tb, ta, tb, ca, cb, da, db, kap)
    checks["edge pair oracle"] = (
        np.abs(prod - ref).max() / np.abs(ref).max(), 1e-5)

    # smooth far rule vs adaptive reference on a well-separated pair
    m2 = generate_tetrahedron(1.0, 2)
    b2 = ObjectInstance("b", m2, RigidTransform.translation_of([0, 0, 4.0]))
    a2 = ObjectInstance("a", m2)
    kap_far = 0.5
    cls, prod, (ta, ca, da), (tb, cb, db) = _production_pair(
        a2, 0, b2, 0, kap_far, quad)
    assert cls is PanelPairClass.FAR
    ref = oracles.adaptive_pair_integral(
        ta, tb, ta, tb, ca, cb, da, db, kap_far)
    checks["far pair oracle"] = (
        np.abs(prod - ref).max() / np.abs(ref).max(), 1e-8)

    ok = all(v <= tol for v, tol in checks.values())
    _report(9, "invariant suite", ok,
            "; ".join(f"{k} {v:.1e}<={tol:g}" for k, (v, tol) in checks.items()))
    for name, (v, tol) in checks.items():
        assert v <= tol, f"{name}: {v:.3e} > {tol:g}"


# ---------------------------------------------------------------------------
# 10. mesh convergence of the sphere-pair energy
# ---------------------------------------------------------------------------

def test_criterion_10_mesh_convergence():
    quad = QuadratureSpec()
    e = {s: integrate_energy(_sphere_pair(4.0, s), quad).energy
         for s in (1, 2, 3)}
    step_32 = abs(e[3] - e[2])
    step_21 = abs(e[2] - e[1])
    converged = step_32 < 0.05 * abs(e[2])
    shrinking = step_32 < step_21
    ok = converged and shrinking
    _report(10, "sphere-pair energy mesh convergence at d = 4R", ok,
            f"E = {e[1]:.4e}, {e[2]:.4e}, {e[3]:.4e}, "
            f"contraction {step_32 / step_21:.2f}")
    assert shrinking, f"steps not shrinking: {step_21:.3e} -> {step_32:.3e}"
    assert converged, (
        f"|E3 - E2| = {step_32:.3e} is {step_32 / abs(e[2]):.1%} of "
        f"|E2| = {abs(e[2]):.3e} (threshold 5%); successive changes do "
        f"contract (ratio {step_32 / step_21:.2f}) -- see the repository "
        "notes on the measured convergence rate"
    )
