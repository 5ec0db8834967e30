"""Command-line driver: energies, forces, parameter sweeps, figure presets.

Output is CSV with the columns
param_name,param_value,energy_hbar_c_per_l,force_hbar_c_per_l2,error_estimate,N_basis,wall_seconds,status
Angles are degrees, lengths are the mesh unit.
"""

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from . import assembly, mesh, xi
from .geometry import (
    Configuration, ObjectInstance, RigidTransform, compose, parse_geometry,
    tetrahedron_pivot,
)
from .quadrature import QuadratureSpec

CSV_COLUMNS = [
    "param_name", "param_value", "energy_hbar_c_per_l",
    "force_hbar_c_per_l2", "error_estimate", "N_basis", "wall_seconds",
    "status",
]


def _add_common(p):
    p.add_argument("--geometry", help="geometry description file")
    p.add_argument("--xi-points", type=int, default=24,
                   help="kappa-quadrature node count")
    p.add_argument("--workers", type=int, default=os.cpu_count(),
                   help="concurrent kappa samples (1 = reproducibility mode)")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--dump-matrix", help="debug: dump M at the first kappa node")
    p.add_argument("--error-estimate", action="store_true",
                   help="rerun at half the node count for an error estimate")


def _parser():
    p = argparse.ArgumentParser(
        prog="casimir",
        description="Casimir energies and forces between conducting objects",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("energy", help="interaction energy of a configuration")
    _add_common(pe)

    pf = sub.add_parser("force", help="force on one object")
    _add_common(pf)
    pf.add_argument("--object", required=True, help="label of the target object")
    pf.add_argument("--direction", choices="xyz", default="z")

    ps = sub.add_parser("sweep", help="translate or rotate one object over a range")
    _add_common(ps)
    ps.add_argument("--object", required=True)
    ps.add_argument("--mode", choices=["energy", "force"], default="energy")
    ps.add_argument("--direction", choices="xyz", default="z",
                    help="force direction (force mode)")
    ps.add_argument("--axis", choices="xyz",
                    help="translation axis (translation sweep)")
    ps.add_argument("--from", dest="start", type=float)
    ps.add_argument("--to", dest="stop", type=float)
    ps.add_argument("--steps", type=int, default=1)
    ps.add_argument("--theta", help="rotation sweep: from:to:steps in degrees")
    ps.add_argument("--phi", help="rotation sweep: from:to:steps in degrees")
    ps.add_argument("--pivot", help="rotation origin 'x,y,z' in the object frame")

    pp = sub.add_parser("preset", help="canned sweeps reproducing the figure data")
    pp.add_argument("name", choices=["fig2", "fig3", "fig4"])
    pp.add_argument("--scale", choices=["coarse", "fine"], default="coarse")
    pp.add_argument("--out", default=".", help="output directory for the CSV set")
    pp.add_argument("--xi-points", type=int, default=24)
    pp.add_argument("--workers", type=int, default=os.cpu_count())
    return p


def _spec(args):
    return QuadratureSpec(n_points=args.xi_points)


def _load_config(args):
    if not args.geometry:
        raise SystemExit("error: --geometry is required")
    path = Path(args.geometry)
    return parse_geometry(path.read_text(), base_dir=path.parent)


def _writer(path):
    handle = open(path, "w", newline="") if path else sys.stdout
    w = csv.writer(handle)
    w.writerow(CSV_COLUMNS)
    return handle, w


def _emit(w, handle, res):
    w.writerow([
        res.param_name, f"{res.param_value:.12g}",
        f"{res.energy:.12e}" if res.energy is not None else "",
        f"{res.force:.12e}" if res.force is not None else "",
        "" if res.error_estimate is None or np.isnan(res.error_estimate)
        else f"{res.error_estimate:.3e}",
        res.n_basis, f"{res.wall_seconds:.3f}", res.status,
    ])
    handle.flush()


def _dump_matrix(config, spec, path):
    d = config.min_separation_all() if len(config) > 1 else 1.0
    kap = xi.kappa_nodes(spec, d_min=d)[0][0]
    m = assembly.assemble(config, kap, spec)
    np.savetxt(path, m.matrix, fmt="%.17e")


def _run_energy(args):
    config = _load_config(args)
    spec = _spec(args)
    if args.dump_matrix:
        _dump_matrix(config, spec, args.dump_matrix)
    res = xi.integrate_energy(config, spec, workers=args.workers,
                              error_estimate=args.error_estimate,
                              param_name="none")
    handle, w = _writer(args.out)
    _emit(w, handle, res)
    if handle is not sys.stdout:
        handle.close()
    return 0


def _run_force(args):
    config = _load_config(args)
    spec = _spec(args)
    if args.dump_matrix:
        _dump_matrix(config, spec, args.dump_matrix)
    idx = config.index_of(args.object)
    res = xi.integrate_force(config, idx, spec, direction=args.direction,
                             workers=args.workers,
                             error_estimate=args.error_estimate,
                             param_name="none")
    handle, w = _writer(args.out)
    _emit(w, handle, res)
    if handle is not sys.stdout:
        handle.close()
    return 0


def _parse_range(text):
    lo, hi, n = text.split(":")
    return np.linspace(float(lo), float(hi), int(n))


def _sweep_points(args, base_config):
    """Yield (param_name, param_value, transformed configuration)."""
    idx = base_config.index_of(args.object)
    obj = base_config[idx]
    if args.theta or args.phi:
        thetas = _parse_range(args.theta) if args.theta else np.array([0.0])
        phis = _parse_range(args.phi) if args.phi else np.array([0.0])
        if not args.pivot:
            raise SystemExit("error: rotation sweeps need --pivot x,y,z")
        pivot_local = np.array([float(v) for v in args.pivot.split(",")])
        pivot = obj.transform.apply(pivot_local)
        for th in thetas:
            for ph in phis:
                rot = compose(
                    RigidTransform.rotation_deg("y", th, pivot=pivot),
                    RigidTransform.rotation_deg("z", ph, pivot=pivot),
                )
                objects = list(base_config.objects)
                objects[idx] = obj.with_transform(compose(rot, obj.transform))
                yield (f"theta={th:g};phi={ph:g}", ph, objects)
    else:
        if args.axis is None or args.start is None or args.stop is None:
            raise SystemExit(
                "error: sweep needs --axis/--from/--to or --theta/--phi"
            )
        for t in np.linspace(args.start, args.stop, args.steps):
            shift = RigidTransform.translation_of(
                t * {"x": np.r_[1.0, 0, 0], "y": np.r_[0, 1.0, 0],
                     "z": np.r_[0, 0, 1.0]}[args.axis]
            )
            objects = list(base_config.objects)
            objects[idx] = obj.with_transform(compose(shift, obj.transform))
            yield (f"move_{args.axis}", t, objects)


def _run_sweep(args):
    base = _load_config(args)
    spec = _spec(args)
    idx = base.index_of(args.object)
    handle, w = _writer(args.out)
    failed = False
    for name, value, objects in _sweep_points(args, base):
        try:
            config = Configuration(objects)
            if args.mode == "force":
                res = xi.integrate_force(
                    config, idx, spec, direction=args.direction,
                    workers=args.workers, error_estimate=args.error_estimate,
                    param_name=name, param_value=value,
                )
            else:
                res = xi.integrate_energy(
                    config, spec, workers=args.workers,
                    error_estimate=args.error_estimate,
                    param_name=name, param_value=value,
                )
        except Exception as exc:  # flush a failure row, keep sweeping
            failed = True
            res = xi.SweepResult(name, value, np.nan, None, np.nan,
                                 base.n_basis, 0.0,
                                 status=f"failed: {exc}")
            res.energy = None
        _emit(w, handle, res)
    if handle is not sys.stdout:
        handle.close()
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# Figure presets
# ---------------------------------------------------------------------------

_PRESET_MESH = {
    # (sphere subdivisions, capsule azimuthal resolution, tetra subdivisions)
    "coarse": (2, 12, 2),
    "fine": (3, 20, 3),
}


def preset_sphere_pair(gap, subdiv, radius=1.0):
    """Two spheres with surface-surface gap along z."""
    m = mesh.generate_sphere(radius, subdiv)
    return Configuration([
        ObjectInstance("s1", m),
        ObjectInstance(
            "s2", m, RigidTransform.translation_of([0, 0, 2 * radius + gap])
        ),
    ])


def preset_parallel_capsules(gap, length, res, radius=1.0):
    """Axes along x, separated along z by surface gap `gap`."""
    m = mesh.generate_capsule(radius, length, res)
    along_x = RigidTransform.rotation_deg("y", 90.0)
    lift = compose(
        RigidTransform.translation_of([0, 0, 2 * radius + gap]), along_x
    )
    return Configuration([
        ObjectInstance("c1", m, along_x),
        ObjectInstance("c2", m, lift),
    ])


def preset_crossed_capsules(gap, length, res, radius=1.0):
    """One axis along x, the other along y, separated along z."""
    m = mesh.generate_capsule(radius, length, res)
    along_x = RigidTransform.rotation_deg("y", 90.0)
    along_y = compose(
        RigidTransform.translation_of([0, 0, 2 * radius + gap]),
        RigidTransform.rotation_deg("x", 90.0),
    )
    return Configuration([
        ObjectInstance("c1", m, along_x),
        ObjectInstance("c2", m, along_y),
    ])


def preset_tetrahedra(theta_deg, phi_deg, subdiv, edge=1.0):
    """Identical tetrahedra, pivots 2*edge apart along y; the displaced one
    gets rot-z(phi) then rot-y(theta) about its pivot.

    Both are pre-rotated 90 deg about z so a base vertex faces the partner
    at phi = 60 and the phi = 0 placement is mirror-symmetric.
    """
    m = mesh.generate_tetrahedron(edge, subdiv)
    setup = RigidTransform.rotation_deg("z", 90.0)
    pivot = tetrahedron_pivot(edge)
    protocol = compose(
        RigidTransform.rotation_deg("y", theta_deg, pivot=pivot),
        RigidTransform.rotation_deg("z", phi_deg, pivot=pivot),
    )
    moved = compose(
        RigidTransform.translation_of([0, 2 * edge, 0]),
        compose(protocol, setup),
    )
    return Configuration([
        ObjectInstance("t1", m, setup),
        ObjectInstance("t2", m, moved),
    ])


def run_figure_presets(name, scale="coarse", out_dir=".", xi_points=24,
                       workers=1):
    """Write the CSV set for one canned figure sweep; returns the paths."""
    subdiv, res, tsub = _PRESET_MESH[scale]
    spec = QuadratureSpec(n_points=xi_points)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []

    def write(fname, rows):
        path = out_dir / fname
        handle, w = _writer(path)
        for r in rows:
            _emit(w, handle, r)
        handle.close()
        paths.append(path)

    if name == "fig2":
        gaps = [1.0, 2.0, 3.0, 4.0, 6.0]
        for label, maker in (
            ("spheres", lambda g: preset_sphere_pair(g, subdiv)),
            ("parallel", lambda g: preset_parallel_capsules(g, 6.0, res)),
            ("crossed", lambda g: preset_crossed_capsules(g, 6.0, res)),
        ):
            rows = [
                xi.integrate_energy(maker(g), spec, workers=workers,
                                    param_name="surface_gap", param_value=g)
                for g in gaps
            ]
            write(f"fig2_{label}.csv", rows)
    elif name == "fig3":
        lengths = [4.0, 6.0, 8.0, 10.0, 12.0]
        for gap in (2.0, 4.0):
            rows = [
                xi.integrate_force(
                    preset_crossed_capsules(gap, L, res), 1, spec,
                    direction="z", workers=workers,
                    param_name="capsule_length", param_value=L,
                )
                for L in lengths
            ]
            write(f"fig3_Z{gap:g}R.csv", rows)
    elif name == "fig4":
        rows = []
        for th in np.linspace(-60, 60, 7):
            for ph in np.linspace(0, 120, 7):
                rows.append(xi.integrate_energy(
                    preset_tetrahedra(th, ph, tsub), spec, workers=workers,
                    param_name=f"theta={th:g};phi={ph:g}", param_value=ph,
                ))
        write("fig4.csv", rows)
    else:
        raise ValueError(f"unknown preset {name!r}")
    return paths


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "energy":
            return _run_energy(args)
        if args.command == "force":
            return _run_force(args)
        if args.command == "sweep":
            return _run_sweep(args)
        run_figure_presets(args.name, args.scale, args.out,
                           args.xi_points, args.workers)
        return 0
    except BrokenPipeError:
        return 1
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
