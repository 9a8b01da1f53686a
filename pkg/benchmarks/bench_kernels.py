"""Timing harness for the paired kernel implementations.

Every hot kernel ships twice: a jitted variant and a plain numpy one that
doubles as the fallback when the accelerator is unavailable or disabled.
This script times both sides of each pair on sized-up workloads and
prints the ratio, so a regression in either lane is visible at a glance.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --quick
"""

import argparse
import time

import numpy as np

from risktext import accel, kernels


def best_of(fn, repeats):
    timings = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        timings.append(time.perf_counter() - start)
    return min(timings)


def bench_pair(name, nb_fn, np_fn, args, repeats):
    nb_fn(*args)    # first call pays the compile, keep it out of the clock
    np_fn(*args)
    jitted = best_of(lambda: nb_fn(*args), repeats)
    plain = best_of(lambda: np_fn(*args), repeats)
    print(f"{name:<22} jitted {jitted * 1e3:9.2f} ms   "
          f"numpy {plain * 1e3:9.2f} ms   x{plain / jitted:6.1f}")


def concentration_args(rng, n):
    points = rng.normal(size=(n, 2))
    centers0 = points[rng.choice(n, size=8, replace=False)].copy()
    return points, centers0, n // 20, 300


def spherical_args(rng, n):
    points = rng.normal(size=(n, 3)) + 4.0
    points /= np.linalg.norm(points, axis=1, keepdims=True)
    centers0 = points[rng.choice(n, size=8, replace=False)].copy()
    return points, centers0, 300


def adjust_args(rng, n_docs, n_terms):
    weights = rng.integers(0, 3, size=(n_docs, n_terms)).astype(np.float64)
    sim = np.eye(n_terms)
    for _ in range(n_terms // 4):
        i, j = rng.choice(n_terms, size=2, replace=False)
        sim[i, j] = sim[j, i] = 0.9
    return weights, sim


def silhouette_args(rng, n):
    points = rng.normal(size=(n, 2))
    labels = rng.integers(0, 6, size=n)
    return points, labels, 6


def lda_args(rng, n_docs, tokens_per_doc, n_terms):
    doc_of = np.repeat(np.arange(n_docs), tokens_per_doc)
    word_of = rng.integers(0, n_terms, size=doc_of.size)
    return (doc_of.astype(np.int64), word_of.astype(np.int64),
            n_docs, n_terms, 5, 0.1, 0.05, 200, 100, 0)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quick", action="store_true",
                        help="smaller workloads, single repeat")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args(argv)

    scale = 0.2 if args.quick else 1.0
    repeats = 1 if args.quick else args.repeats
    rng = np.random.default_rng(0)

    print(f"numba available: {accel.HAVE_NUMBA}, "
          f"jit in use by the package: {accel.USE_NUMBA}")
    if not accel.HAVE_NUMBA:
        print("numba missing; both columns below run plain numpy")
    print()

    bench_pair("concentration", kernels.concentration_single_nb,
               kernels.concentration_single_np,
               concentration_args(rng, int(20000 * scale)), repeats)
    bench_pair("spherical", kernels.spherical_single_nb,
               kernels.spherical_single_np,
               spherical_args(rng, int(20000 * scale)), repeats)
    bench_pair("semantic_adjust", kernels.semantic_adjust_nb,
               kernels.semantic_adjust_np,
               adjust_args(rng, int(2000 * scale), 400), repeats)
    bench_pair("silhouette", kernels.silhouette_nb,
               kernels.silhouette_np,
               silhouette_args(rng, int(4000 * scale)), repeats)
    bench_pair("lda_gibbs", kernels.lda_gibbs_nb,
               kernels.lda_gibbs_np,
               lda_args(rng, int(500 * scale), 20, 300), repeats)


if __name__ == "__main__":
    main()
