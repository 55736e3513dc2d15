"""Compare the compiled Wigner kernel against the NumPy fallback.

    python3 benchmarks/bench_wigner.py [--dims 30 50 81] [--points 20000] [--repeat 3]
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from magnonadd import _backend
from magnonadd.channels import heralded_add
from magnonadd.fock import coherent_state


def _inputs(dim: int, n_points: int, seed: int = 0):
    beta = max(0.0, np.sqrt(dim) - 5.0)
    rho = heralded_add(coherent_state(beta, dim), 0.99)[0].elements
    rng = np.random.default_rng(seed)
    radius = np.sqrt(dim) - 3.0
    r = radius * np.sqrt(rng.random(n_points))
    alphas = r * np.exp(2j * np.pi * rng.random(n_points))
    return rho, alphas


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", type=int, nargs="+", default=[30, 50, 81])
    parser.add_argument("--points", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    kernels = {"numpy": _backend.python_wigner_points}
    if _backend.compiled_wigner_points is not None:
        kernels["cython"] = _backend.compiled_wigner_points
    else:
        print("compiled kernel not built; timing the NumPy fallback only")

    print(f"{'dim':>5} {'points':>8} " + " ".join(f"{k + ' (s)':>12}" for k in kernels) + f" {'speedup':>8} {'max|diff|':>10}")
    for dim in args.dims:
        rho, alphas = _inputs(dim, args.points)
        times, outs = {}, {}
        for name, fn in kernels.items():
            outs[name] = fn(rho, alphas)
            times[name] = min(timeit.repeat(lambda: fn(rho, alphas), number=1, repeat=args.repeat))
        cols = " ".join(f"{times[k]:12.4f}" for k in kernels)
        if "cython" in kernels:
            speedup = times["numpy"] / times["cython"]
            diff = float(np.max(np.abs(outs["numpy"] - outs["cython"])))
            print(f"{dim:5d} {args.points:8d} {cols} {speedup:8.1f} {diff:10.2e}")
        else:
            print(f"{dim:5d} {args.points:8d} {cols}")


if __name__ == "__main__":
    main()
