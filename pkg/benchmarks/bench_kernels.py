"""Compiled vs pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Times each kernel on realistic input sizes, then one full default p sweep under
each backend (in a subprocess, since the backend is chosen at import).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from condcoding import _pykernels

try:
    from condcoding import _ckernels
except ImportError:
    _ckernels = None

SWEEP = (
    "import time; from condcoding.experiments import sweep_p, SweepConfig; "
    "t = time.perf_counter(); sweep_p(SweepConfig()); print(time.perf_counter() - t)"
)


def cases(rng):
    joint = rng.random((256, 256))
    joint /= joint.sum()
    flat = joint.ravel()
    a = rng.integers(0, 256, 10**6)
    b = rng.integers(0, 511, 10**6)
    return {
        "entropy_bits (65536)": lambda k: k.entropy_bits(flat),
        "compensated_sum (65536)": lambda k: k.compensated_sum(flat),
        "shear_residual (256x256)": lambda k: k.shear_residual(joint),
        "count_pairs (1e6 pairs)": lambda k: k.count_pairs(a, b, 256, 511),
    }


def sweep_time(pure):
    env = dict(os.environ)
    if pure:
        env["CONDCODING_PURE_PYTHON"] = "1"
    else:
        env.pop("CONDCODING_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", SWEEP], env=env, capture_output=True,
                         text=True, check=True)
    return float(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the fallback is timed", file=sys.stderr)
    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speed-up':>9s}")
    for name, fn in cases(rng).items():
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{name:28s} {t_py:12.3f} {'-':>12s} {'-':>9s}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:28s} {t_py:12.3f} {t_c:12.3f} {t_py / t_c:8.1f}x")
    t_py = sweep_time(pure=True)
    line = f"{'sweep-p default (101 pts)':28s} {t_py * 1e3:12.1f}"
    if _ckernels is not None:
        t_c = sweep_time(pure=False)
        line += f" {t_c * 1e3:12.1f} {t_py / t_c:8.1f}x"
    print(line)


if __name__ == "__main__":
    main()
