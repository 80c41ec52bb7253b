"""Compare the compiled and pure-Python elimination kernels on real matrices.

Run with ``python benchmarks/bench_snf.py [--repeat N]``.  Both kernels
must produce identical pivots and operation logs; the script checks that
before timing.
"""

from __future__ import annotations

import argparse
import random
import time

from transgress import _snf_py
from transgress.exactcoeff import BACKEND, IntMatrix
from transgress.fixtures import lens, rp3_24cell
from transgress.groupcoh import FiniteGroup, coboundary_matrix

try:
    from transgress import _snf_ext
except ImportError:  # pragma: no cover
    _snf_ext = None


def workloads():
    L5 = lens(5, 1).complex
    R = rp3_24cell().complex
    yield "lens(5,1) d1", L5.coboundary_matrix(1)
    yield "lens(5,1) d2", L5.coboundary_matrix(2)
    yield "rp3_24cell d1", R.coboundary_matrix(1)
    yield "rp3_24cell d2", R.coboundary_matrix(2)
    g = FiniteGroup.product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(4))
    yield "bar Z2xZ4 p=2", coboundary_matrix(g, 2)
    rng = random.Random(7)
    rows = [{c: rng.randint(-9, 9) for c in rng.sample(range(120), 6)} for _ in range(150)]
    yield "random 150x120", IntMatrix(150, 120, rows)


def run(kernel, m: IntMatrix, repeat: int):
    best = float("inf")
    out = None
    for _ in range(repeat):
        rows = [dict(r) for r in m.rows()]
        t = time.perf_counter()
        out = kernel.eliminate(rows, m.ncols)
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"active backend: {BACKEND}")
    print(f"{'matrix':<18}{'shape':>14}{'nnz':>8}{'python s':>11}{'compiled s':>12}{'speedup':>9}")
    for name, m in workloads():
        tp, outp = run(_snf_py, m, args.repeat)
        if _snf_ext is not None:
            tc, outc = run(_snf_ext, m, args.repeat)
            if outc != outp:
                raise SystemExit(f"{name}: kernels disagree")
            cols = f"{tc:>12.4f}{tp / tc:>8.1f}x"
        else:
            cols = f"{'n/a':>12}{'':>9}"
        shape = f"{m.nrows}x{m.ncols}"
        print(f"{name:<18}{shape:>14}{m.nnz():>8}{tp:>11.4f}{cols}")


if __name__ == "__main__":
    main()
