"""Compare the numba kernels with the pure-numpy fallback.

Each backend runs in its own interpreter because ``QEIG_BACKEND`` is read at
import time.  The first call in each child is a warm-up (numba compiles or
loads its cache there) and is not timed.

    python benchmarks/bench_backends.py --sizes 16,32,64 --repeat 3
"""
import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
import qeig
from qeig import fullrand, schur_decompose
sizes, repeat, aed = json.loads(sys.argv[1])
schur_decompose(fullrand(16, 0), use_aed=aed)
out = {"backend": qeig.BACKEND, "cells": []}
for n in sizes:
    A = fullrand(n, 1)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        d = schur_decompose(A, use_aed=aed)
        best = min(best, time.perf_counter() - t)
    out["cells"].append({"n": n, "seconds": best, "sweeps": d.sweeps})
print(json.dumps(out))
"""


def run(backend, sizes, repeat, aed):
    env = dict(os.environ, QEIG_BACKEND=backend)
    res = subprocess.run([sys.executable, "-c", CHILD, json.dumps([sizes, repeat, aed])],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="16,32,64")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--no-aed", action="store_true")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    aed = not args.no_aed

    nb = run("numba", sizes, args.repeat, aed)
    npy = run("numpy", sizes, args.repeat, aed)
    if nb["backend"] != "numba":
        print("numba not importable; both runs used numpy", file=sys.stderr)
    print(f"{'n':>5} {'numba s':>10} {'numpy s':>10} {'speedup':>8} {'sweeps':>13}")
    for a, b in zip(nb["cells"], npy["cells"]):
        print(f"{a['n']:>5} {a['seconds']:>10.4f} {b['seconds']:>10.4f} "
              f"{b['seconds'] / a['seconds']:>8.1f} {a['sweeps']:>6}/{b['sweeps']:<6}")


if __name__ == "__main__":
    main()
