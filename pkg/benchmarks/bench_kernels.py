"""Benchmark the numba-jitted convolution kernel against the numpy fallback.

The fallback is selected by LATCONV_PURE_NUMPY=1; this script runs itself in a
subprocess with the flag set so both paths are measured in one invocation:

    python3 benchmarks/bench_kernels.py
"""

import os
import subprocess
import sys
import time


def run_cases():
    import numpy as np

    import latconv
    from latconv import examples
    from latconv._kernels import USING_NUMBA

    label = "numba" if USING_NUMBA else "numpy fallback"
    cases = [
        ("direct power, intro (d=2, 11 pts), n=96",
         lambda: latconv.power(examples.intro(), 96, method="direct")),
        ("direct power, ex73 (d=2, 7 pts), n=128",
         lambda: latconv.power(examples.ex73(), 128, method="direct")),
        ("direct power, srw:3 (d=3), n=24",
         lambda: latconv.power(examples.srw(3), 24, method="direct")),
    ]
    rows = []
    for name, fn in cases:
        fn()  # warm: jit compilation / allocator
        t0 = time.perf_counter()
        fn()
        rows.append((name, time.perf_counter() - t0))
    print(f"kernel path: {label}")
    for name, dt in rows:
        print(f"  {name:48s} {dt * 1e3:10.1f} ms")
    return rows


def main():
    if os.environ.get("_BENCH_CHILD"):
        run_cases()
        return
    here = os.path.abspath(__file__)
    for flag in ("0", "1"):
        env = dict(os.environ, LATCONV_PURE_NUMPY=flag, _BENCH_CHILD="1")
        subprocess.run([sys.executable, here], env=env, check=True)


if __name__ == "__main__":
    main()
