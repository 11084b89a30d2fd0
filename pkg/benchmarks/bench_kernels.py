"""Compare the compiled and pure-Python collapse kernels on the same inputs.

    python benchmarks/bench_kernels.py --n 20000 --repeat 3
"""
import argparse
import time

import numpy as np

from hypercollapse import kernels
from hypercollapse.mixing import MixingDistribution
from hypercollapse.rng import make_rng
from hypercollapse.sampler import sample_static


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(n, seed):
    rng = make_rng(seed, 0)
    h = sample_static(MixingDistribution((0.2, 0.5, 0.3)).scaled(1.2), n, rng)
    uniforms = rng.random(n)
    stops = np.linspace(0, h.num_edges, 11).astype(np.int64)
    k = 4
    offsets = (rng.random((n, k)) * (n - np.arange(k))).astype(np.int64)
    return {
        "incidence": lambda b: b.incidence(n, h.ptr, h.verts),
        "collapse/lowest": lambda b: b.collapse(n, h.ptr, h.verts, kernels.LOWEST_INDEX, np.zeros(0)),
        "collapse/uniform": lambda b: b.collapse(n, h.ptr, h.verts, kernels.UNIFORM_TOKEN, uniforms),
        "collapse_stream": lambda b: b.collapse_stream(n, h.ptr, h.verts, stops),
        "resolve_subsets": lambda b: b.resolve_subsets(n, offsets),
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=20000)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=12345)
    args = p.parse_args(argv)

    py = kernels.get_backend("python")
    try:
        cy = kernels.get_backend("cython")
    except ImportError:
        cy = None
        print("compiled extension not built; timing the Python fallback only")

    print(f"{'kernel':<18} {'python s':>10} {'cython s':>10} {'speedup':>8}  agree")
    for name, fn in cases(args.n, args.seed).items():
        tp, op = _best(lambda: fn(py), args.repeat)
        if cy is None:
            print(f"{name:<18} {tp:>10.4f} {'-':>10} {'-':>8}  -")
            continue
        tc, oc = _best(lambda: fn(cy), args.repeat)
        print(f"{name:<18} {tp:>10.4f} {tc:>10.4f} {tp / tc:>8.1f}  {_same(op, oc)}")


if __name__ == "__main__":
    main()
