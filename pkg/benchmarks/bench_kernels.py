#!/usr/bin/env python3
"""Benchmark the compiled kernel extension against the pure-Python path.

Times the raw equation-of-motion kernels (the hot inner loop of every
integration) and one full steady-circle run per backend:

    python3 benchmarks/bench_kernels.py
"""

import math
import time

import numpy as np

from spherebot import control, model, simulate
from spherebot._backend import available_backends
from spherebot.dynamics import kernel_params

PARAMS = model.DEFAULT_PARAMS
N_DERIV = 20000
N_AFFINE = 8000
RUN_SECONDS = 20.0


def bench_kernel_calls(kernels, rng):
    x = np.ascontiguousarray(rng.uniform(-0.5, 0.5, 12))
    kp = kernel_params(PARAMS)
    out = np.empty(12)
    f = np.empty(6)
    gs = np.empty(6)
    gp = np.empty(6)

    t0 = time.perf_counter()
    for _ in range(N_DERIV):
        kernels.derivative(x, 0.3, -0.2, kp, out)
    t_deriv = (time.perf_counter() - t0) / N_DERIV

    t0 = time.perf_counter()
    for _ in range(N_AFFINE):
        kernels.affine_eom(x, kp, f, gs, gp)
    t_affine = (time.perf_counter() - t0) / N_AFFINE
    return t_deriv, t_affine


def bench_integration(backend_name):
    import os
    import subprocess
    import sys

    # A fresh interpreter pins the backend via the environment switch.
    code = (
        "import time, math\n"
        "from spherebot import model, simulate, control\n"
        "import spherebot\n"
        "p = model.DEFAULT_PARAMS\n"
        "x0 = simulate.steady_circle_state(math.radians(15), -1.0, p)\n"
        "hold = control.make_hold_source(p)\n"
        "t0 = time.perf_counter()\n"
        f"traj = simulate.integrate(x0, hold, {RUN_SECONDS}, p,\n"
        "    simulate.IntegratorConfig(rtol=1e-8, atol=1e-10))\n"
        "print(time.perf_counter() - t0, spherebot.BACKEND_NAME)\n"
    )
    env = dict(os.environ, SPHEREBOT_BACKEND=backend_name)
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True,
        check=True,
    )
    wall, used = out.stdout.split()
    assert used == backend_name, f"expected {backend_name}, got {used}"
    return float(wall)


def main():
    rng = np.random.default_rng(42)
    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    print()
    rows = {}
    for name, kernels in backends.items():
        t_deriv, t_affine = bench_kernel_calls(kernels, rng)
        t_run = bench_integration(name)
        rows[name] = (t_deriv, t_affine, t_run)
        print(
            f"{name:>9}: derivative {t_deriv * 1e6:8.2f} us   "
            f"affine {t_affine * 1e6:8.2f} us   "
            f"{RUN_SECONDS:.0f}s steady-circle run {t_run:6.2f} s"
        )
    if len(rows) == 2:
        py = rows["python"]
        cy = rows["compiled"]
        print()
        print(
            f" speedups: derivative {py[0] / cy[0]:5.1f}x   "
            f"affine {py[1] / cy[1]:5.1f}x   run {py[2] / cy[2]:5.1f}x"
        )


if __name__ == "__main__":
    main()
