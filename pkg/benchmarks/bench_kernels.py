"""Compare the compiled and numpy kernels on representative workloads.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from sspdc import load_crystal
from sspdc._kernels import compiled_backend, python_backend
from sspdc.dispersion import Axis


def workloads(model):
    ce = model.coefficients(Axis.EXTRAORDINARY)
    co = model.coefficients(Axis.ORDINARY)
    f = model.thermal_parameter(81.8)
    x = np.linspace(0.4, 5.0, 4601)
    lam_s = np.linspace(0.9, 1.06, 321)
    lam_p = np.linspace(0.4858, 0.4906, 2000)
    w = np.full(lam_p.size, 1.0 / lam_p.size)
    return {
        "sellmeier_index (4601 pts)": lambda k: k.sellmeier_index(ce, f, x),
        "condition_values (4601 pts)": lambda k: k.condition_values(ce, co, f, x),
        "bisect_level (1 root)": lambda k: k.bisect_level(ce, co, f, 1.919e-4, 0.95, 0.96),
        "pump_averaged_intensity (321 x 2000)": lambda k: k.pump_averaged_intensity(
            co, ce, co, f, lam_s, lam_p, w, 2 * np.pi / 6.06, 5500.0, 0.4, 5.0),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled_backend is None:
        print("compiled extension not available; only the numpy backend can run")
    model = load_crystal("ppslt")
    print(f"{'kernel':40s} {'numpy [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>8s}")
    for name, fn in workloads(model).items():
        t_py = min(timeit.repeat(lambda: fn(python_backend), number=1, repeat=args.repeat))
        if compiled_backend is None:
            print(f"{name:40s} {t_py * 1e3:12.3f} {'-':>14s} {'-':>8s}")
            continue
        t_c = min(timeit.repeat(lambda: fn(compiled_backend), number=1, repeat=args.repeat))
        print(f"{name:40s} {t_py * 1e3:12.3f} {t_c * 1e3:14.3f} {t_py / t_c:8.1f}x")


if __name__ == "__main__":
    main()
