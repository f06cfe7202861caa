"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_backends.py [--repeat 3] [--seed 0]

Times the three hot kernels plus an end-to-end solve on each backend and
checks that both backends return identical results.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fairmsr._kernels import available_backends
from fairmsr.instances import gaussian_planted
from fairmsr.solver import SolveOptions, solve


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(rng):
    pts = rng.random((300, 8))
    P, _, _ = gaussian_planted(rng, 14, 2, 2, 3.0)
    Q, _, _ = gaussian_planted(rng, 10, 3, 3, 4.0)
    return [
        ("pairwise_distances n=300 d=8", lambda k: k.pairwise_distances(pts), None),
        ("bc_meb n=300 d=8 iters=400", lambda k: k.bc_meb(pts, 400)[1], None),
        ("solve n=14 k=2 eps=0.3", None, (P, 2, 0.3)),
        ("solve n=10 k=3 eps=0.3", None, (Q, 3, 0.3)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only the Python fallback is available")
    names = sorted(backends)
    print(f"{'case':34s}" + "".join(f"{n:>12s}" for n in names) + "     speedup  same")
    for label, kern, inst in cases(np.random.default_rng(args.seed)):
        times, outs = [], []
        for name in names:
            if kern is not None:
                t, out = best_of(lambda: kern(backends[name]), args.repeat)
                out = np.asarray(out).tobytes()
            else:
                P, k, eps = inst
                t, sol = best_of(lambda: solve(P, k, eps, options=SolveOptions(backend=name)),
                                 args.repeat)
                out = (sol.clusters, sol.refined_cost)
            times.append(t)
            outs.append(out)
        speed = times[names.index("python")] / times[0] if len(names) > 1 else 1.0
        same = all(o == outs[0] for o in outs)
        print(f"{label:34s}" + "".join(f"{t:12.4f}" for t in times) + f"{speed:11.1f}x  {same}")


if __name__ == "__main__":
    main()
