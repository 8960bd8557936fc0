"""Compare compiled and pure-Python Euler kernels.

    python3 benchmarks/bench_kernels.py [--repeat 2000] [--end-to-end]

Prints per-call microseconds for each kernel at the default lookahead
(100 inner steps), and optionally the wall time of one pendulum closed-loop
run in a subprocess with and without ``NRFLOW_DISABLE_NUMBA``.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from nrflow import kernels
from nrflow.integration import DIVERGENCE_GUARD

STEPS = 100


def _cases():
    x2 = np.array([0.3, -0.1])
    u1 = np.array([0.7])
    A = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-1.0, -2.0, -1.5]])
    bu = np.array([0.0, 0.0, 0.4])
    return {
        "position": (-1.0, 2.0, x2, u1, 0.01, STEPS, DIVERGENCE_GUARD),
        "pendulum": (1.0, 0.2, x2, u1, 0.01, STEPS, DIVERGENCE_GUARD),
        "integrator": (x2, np.array([1.0, -0.5]), 0.006, STEPS, DIVERGENCE_GUARD),
        "lti": (A, bu, np.zeros(3), 0.01, STEPS, DIVERGENCE_GUARD),
    }


def _time(fn, args, repeat):
    fn(*args)  # compile / warm caches
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat * 1e6


def bench_kernels(repeat):
    fast = kernels.compiled()
    rows = []
    for name, args in _cases().items():
        ref, _ = kernels.PURE[name](*args)
        got, _ = fast[name](*args)
        assert np.allclose(ref, got, rtol=1e-12, atol=1e-14), name
        py = _time(kernels.PURE[name], args, repeat)
        nb = _time(fast[name], args, repeat)
        rows.append((name, py, nb))
    print(f"{'kernel':<12}{'pure us':>12}{'numba us':>12}{'speedup':>10}")
    for name, py, nb in rows:
        print(f"{name:<12}{py:12.2f}{nb:12.2f}{py / nb:10.1f}")
    return rows


_E2E = (
    "import time;from nrflow.scenarios.experiments import fig4_spec;"
    "from nrflow.scenarios.simulate import simulate_closed_loop;"
    "simulate_closed_loop(fig4_spec(2.0, duration=0.5));"
    "t=time.perf_counter();simulate_closed_loop(fig4_spec(2.0));"
    "print(time.perf_counter()-t)"
)


def bench_end_to_end():
    for flag in ("0", "1"):
        env = dict(os.environ, NRFLOW_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", _E2E], env=env, check=True,
                             capture_output=True, text=True).stdout.strip()
        label = "pure" if flag == "1" else "numba"
        print(f"pendulum 60 s closed loop ({label}): {float(out):.3f} s")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=2000)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args()
    bench_kernels(args.repeat)
    if args.end_to_end:
        bench_end_to_end()


if __name__ == "__main__":
    main()
