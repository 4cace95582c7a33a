"""Time the compiled and pure-Python colored-walk kernels on the same uniforms.

    python3 benchmarks/bench_walk.py --steps 200000 --repeat 3
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from markex import kernels, specfile

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"


def bench(backend, compiled, u, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        path, _, _ = kernels.run_colored_walk(compiled, 0, u, target=0, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, path


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--spec", default=str(DATA / "cerrw4.json"))
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    graph = specfile.load(args.spec).graph(exact=False)
    u = np.random.default_rng(args.seed).random(2 * args.steps)
    backends = ["python"] + (["cython"] if kernels._compiled is not None else [])
    results = {}
    for b in backends:
        results[b] = bench(b, graph.compiled, u, args.repeat)
        secs = results[b][0]
        print(f"{b:>7}: {secs:8.4f} s  {args.steps / secs / 1e6:8.3f} Msteps/s")
    if len(results) == 2:
        same = np.array_equal(results["python"][1], results["cython"][1])
        print(f"speedup: {results['python'][0] / results['cython'][0]:.1f}x, identical paths: {same}")
        return 0 if same else 1
    print("compiled kernel not built; only the fallback was timed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
