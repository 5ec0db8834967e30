"""Benchmark the compiled panel-summation kernel against the numpy fallback.

Runs the raw accumulation kernel on synthetic batches and a full interaction-
matrix assembly on a sphere pair, once per backend, and prints a summary:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from casimir3d import (
    Configuration, ObjectInstance, QuadratureSpec, RigidTransform,
    _panelsum_py, assemble, backend, generate_sphere,
)
from casimir3d.quadrature import product_rule


def _batch(rng, P):
    tri_a = rng.normal(size=(P, 3, 3))
    tri_b = rng.normal(size=(P, 3, 3)) + np.array([0, 0, 4.0])
    coef = lambda: rng.normal(size=(P, 3))
    idx = lambda: rng.integers(0, 64, size=(P, 3)).astype(np.int64)
    return (tri_a, coef(), coef(), tri_a.copy(), idx(),
            tri_b, coef(), coef(), tri_b.copy(), idx())


def bench_accumulate(fn, P=4096, repeats=5):
    rng = np.random.default_rng(0)
    args = _batch(rng, P)
    bary, wts = product_rule(16, 16)
    out = np.zeros((64, 64))
    fn(*args, bary, wts, 0.9, 1.0, 1.0, 0, np.zeros(3), 0, out)  # warm up
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args, bary, wts, 0.9, 1.0, 1.0, 0, np.zeros(3), 0, out)
        best = min(best, time.perf_counter() - t0)
    evals = P * len(wts)
    return best, evals / best


def bench_assemble(fn):
    orig = backend.accumulate
    backend.accumulate = fn
    try:
        m = generate_sphere(1.0, 2)
        cfg = Configuration([
            ObjectInstance("a", m),
            ObjectInstance("b", m, RigidTransform.translation_of([0, 0, 4.0])),
        ])
        quad = QuadratureSpec()
        t0 = time.perf_counter()
        assemble(cfg, 0.7, quad)
        return time.perf_counter() - t0, cfg.n_basis
    finally:
        backend.accumulate = orig


def main():
    impls = [("numpy", _panelsum_py.accumulate)]
    if backend.COMPILED:
        from casimir3d import _panelsum
        impls.append(("compiled", _panelsum.accumulate))
    else:
        print("warning: compiled extension not available")

    print(f"active backend: {backend.backend_name()}\n")
    print("raw accumulation kernel (4096 pairs, 256-point rule):")
    base = None
    for name, fn in impls:
        t, rate = bench_accumulate(fn)
        base = base or t
        print(f"  {name:>8}: {t * 1e3:8.2f} ms  "
              f"({rate / 1e6:6.1f} M kernel evals/s, {base / t:4.1f}x)")

    print("\nfull assembly (sphere pair, s = 2):")
    base = None
    for name, fn in impls:
        t, n = bench_assemble(fn)
        base = base or t
        print(f"  {name:>8}: {t:8.2f} s   (N = {n}, {base / t:4.1f}x)")


if __name__ == "__main__":
    main()
