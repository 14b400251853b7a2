#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot kernels (grid Dijkstra, component labeling) on random
occupancy grids, plus one end-to-end Monte-Carlo trial, for both
implementations. The two are bit-identical by contract; this shows what
the extension buys.

Usage: python benchmarks/bench_kernels.py [--sizes 30,60,120] [--repeat 20]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from covplan import _kernels_py

try:
    from covplan import _kernels_c
except ImportError:
    _kernels_c = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(sizes, repeat):
    impls = [("python", _kernels_py)]
    if _kernels_c is not None:
        impls.append(("cython", _kernels_c))
    print(f"{'kernel':<22}{'size':>6}" + "".join(f"{name:>12}" for name, _ in impls)
          + ("     speedup" if len(impls) == 2 else ""))
    rng = np.random.default_rng(0)
    for side in sizes:
        grid = (rng.random((side, side)) < 0.2).astype(np.uint8)
        free = np.argwhere(grid == 0)
        sy, sx = map(int, free[0])
        rows = [
            ("dijkstra_grid", lambda impl: impl.dijkstra_grid(grid, sx, sy, 8)),
            ("label_components", lambda impl: impl.label_components(grid, 8)),
        ]
        for name, call in rows:
            times = [timeit(lambda impl=impl: call(impl), repeat) for _, impl in impls]
            line = f"{name:<22}{side:>4}x{side:<3}" + "".join(f"{t * 1e3:>10.3f}ms" for t in times)
            if len(times) == 2 and times[1] > 0:
                line += f"{times[0] / times[1]:>10.1f}x"
            print(line)


def bench_trial(repeat):
    import os
    import subprocess
    import sys

    code = (
        "import time\n"
        "from covplan import EnvArm, PlanConfig, TrialConfig, run_trial\n"
        "import covplan\n"
        "cfg = TrialConfig(width=30, height=30,\n"
        "    arm=EnvArm(0.3, 0.3, 0.1, 0.75),\n"
        "    plan_config=PlanConfig(sample_spacing=4), trial_index=0, master_seed=1)\n"
        "run_trial(cfg)\n"
        "t0 = time.perf_counter()\n"
        f"for i in range({repeat}):\n"
        "    run_trial(cfg)\n"
        f"print(covplan.KERNEL_IMPLEMENTATION, (time.perf_counter() - t0) / {repeat})\n"
    )
    print("\nend-to-end trial (30x30, thin obstacles, spacing 4):")
    for force in ("py", "c" if _kernels_c is not None else None):
        if force is None:
            continue
        env = dict(os.environ, COVPLAN_KERNELS=force)
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True)
        if out.returncode != 0:
            print(f"  {force}: failed\n{out.stderr}")
            continue
        impl, seconds = out.stdout.split()
        print(f"  {impl:<8}{float(seconds) * 1e3:>10.2f} ms/trial")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="30,60,120")
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    if _kernels_c is None:
        print("note: compiled kernels unavailable, timing pure Python only")
    bench_kernels(sizes, args.repeat)
    bench_trial(max(3, args.repeat // 4))


if __name__ == "__main__":
    main()
