#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python reference.

Runs each hot kernel on a representative workload per backend and reports
wall times and speedups.  Usage: ``python benchmarks/bench_kernels.py``.
"""

import math
import time

import numpy as np

from paraep._kernels import (DRIVE_AM, DRIVE_CONSTANT, DRIVE_LOOP,
                             available_backends, get_backend)

PARS_FIELDS = (0.25, 0.25, 0.0, 0.3, 0.3, 1.0, 1.0, 0.0)


def bench_fields(backend):
    c = (1.5, 0.4, 0.0, 0.0, 0.0, 0.0)
    out = backend.integrate_fields(PARS_FIELDS, DRIVE_CONSTANT, c,
                                   (1e-6, 2e-6, -1e-6, 5e-7), 0.0, 3000.0,
                                   4096, 1e-9, 1e-12, 10 ** 8)
    assert out[3] == 0
    return out[1]


def bench_quadrature(backend):
    c = (1.2, 5.0, 10.0, 1.2, 0.0, 1.0)
    steps = 0
    for _ in range(20):
        out = backend.propagate_quadrature(0.25, 1.0, 1.0, 0.0, DRIVE_AM, c,
                                           np.eye(4), 0.0, 2 * math.pi / 10.0,
                                           1e-12, 1e-14, 10 ** 8)
        assert out[3] == 0
        steps += out[1]
    return steps


def bench_field_linear(backend):
    c = (1.0, 0.2, 2 * math.pi / 3000.0, 0.0, 0.0, 0.0)
    pars = (0.25, 0.25, 0.0, 1.0, 1.0, 0.0)
    v0 = np.array([0.5, 0.1, 0.5, -0.1, 0.3, 0.2, 0.3, -0.2])
    out = backend.propagate_field_linear(pars, DRIVE_LOOP, c, v0, 2000.0,
                                         5000.0, 256, 1e-11, 1e-13, 10 ** 8)
    assert out[4] == 0
    return out[2]


def bench_euler_maruyama(backend):
    rng = np.random.default_rng(0)
    q = np.array([[0.8, 0, 0, -1.0], [0, -1.0, 1.0, 0],
                  [0, -1.0, 0.8, 0], [1.0, 0, 0, -1.0]]) - 0.1 * np.eye(4)
    n = 400_000
    dw_ex = rng.normal(0, math.sqrt(0.005), (n, 4))
    dw_i = rng.normal(0, math.sqrt(0.005), (n, 4))
    y = np.empty((n, 4))
    backend.euler_maruyama(q, 0.42, 0.14, 0.005, dw_ex, dw_i, y)
    return n


BENCHES = [
    ("coupled-mode integration (3000 rt)", bench_fields),
    ("quadrature monodromy x 20", bench_quadrature),
    ("linear loop transport (256 windows)", bench_field_linear),
    ("Euler-Maruyama (400k steps)", bench_euler_maruyama),
]


def run(repeat=3):
    names = available_backends()
    print(f"backends: {', '.join(names)}\n")
    header = f"{'kernel':<38}" + "".join(f"{n:>14}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, fn in BENCHES:
        times = []
        for name in names:
            backend = get_backend(name)
            fn(backend)  # warm up
            best = min(
                (lambda t0: (fn(backend), time.perf_counter() - t0)[1])(
                    time.perf_counter())
                for _ in range(repeat))
            times.append(best)
        row = f"{label:<38}" + "".join(f"{t * 1e3:>11.1f} ms" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    run()
