"""Compare the gmpy2 and Fraction arithmetic backends on the hot kernels.

The backend is fixed at import time by FRACTALCOPULA_BACKEND, so each
measurement runs in a child interpreter. Results are best-of-N wall times
for the kernels that dominate real use: deep iteration, one exact Sobolev
step distance on the depth-5 mesh, the star product of the depth-4 factor
iterates, and a 243x243 render.

Usage: python benchmarks/backend_bench.py [--repeat N] [--backends a,b]
"""

import argparse
import json
import os
import subprocess
import sys

PAYLOAD = r"""
import json, time
import fractalcopula as fc
from fractalcopula import catalog as cat, copula as cop, factorize as fac
from fractalcopula import io as fio, patch

def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)

repeat = int(__import__("sys").argv[1])
pi = cop.independence()
c4 = patch.iterate(cat.A2, pi, 4)
c5 = patch.apply(cat.A2, c4)
cl, cr, _ = fac.factor_fixpoints(cat.A2, 4)
out = {
    "backend": fc.BACKEND,
    "iterate-depth5": best_of(repeat, lambda: patch.iterate(cat.A2, pi, 5)),
    "step-distance": best_of(repeat, lambda: cop.sobolev_distance(c4, c5)),
    "star-factors": best_of(repeat, lambda: cop.star(cl, cr)),
    "render-243": best_of(repeat, lambda: fio.render_pgm(c5, 243, 243)),
}
print(json.dumps(out))
"""


def run_backend(backend: str, repeat: int) -> dict:
    env = dict(os.environ, FRACTALCOPULA_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, "-c", PAYLOAD, str(repeat)],
        env=env,
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        raise RuntimeError(
            "backend %r failed:\n%s" % (backend, proc.stderr.strip())
        )
    return json.loads(proc.stdout)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3, help="best of N runs")
    parser.add_argument(
        "--backends",
        default="gmpy2,fraction",
        help="comma separated backend names (default gmpy2,fraction)",
    )
    args = parser.parse_args(argv)

    results = []
    for backend in args.backends.split(","):
        backend = backend.strip()
        try:
            results.append(run_backend(backend, args.repeat))
        except RuntimeError as exc:
            print("skipping %s: %s" % (backend, exc), file=sys.stderr)
    if not results:
        print("no backend produced results", file=sys.stderr)
        return 1

    kernels = ["iterate-depth5", "step-distance", "star-factors", "render-243"]
    header = ["kernel"] + [r["backend"] for r in results]
    if len(results) == 2:
        header.append("speedup")
    print("  ".join("%-16s" % h for h in header))
    for kernel in kernels:
        row = ["%-16s" % kernel]
        for r in results:
            row.append("%-16s" % ("%.3fs" % r[kernel]))
        if len(results) == 2:
            slow = max(results[0][kernel], results[1][kernel])
            fast = min(results[0][kernel], results[1][kernel])
            row.append("%.1fx" % (slow / fast))
        print("  ".join(row))
    return 0


if __name__ == "__main__":
    sys.exit(main())
