"""Compare the compiled rectangle-sum kernel against the numpy fallback.

Run after installing the package:

    python benchmarks/bench_kernels.py

Times both backends on the bundled trap geometry (85 electrodes) over point
grids of increasing size and prints a table with the speedup. Both backends
are also cross-checked for agreement at each size.
"""

import time

import numpy as np

from trapqa.electrostatics import paper_trap_geometry
from trapqa.kernels import rect_np

try:
    from trapqa.kernels import _rect_cy
except ImportError:
    _rect_cy = None


def _grid(n):
    side = int(round(n ** (1.0 / 3.0)))
    xs = np.linspace(-200e-6, 200e-6, side)
    ys = np.linspace(20e-6, 80e-6, side)
    zs = np.linspace(40e-6, 200e-6, side)
    pts = np.array([(x, y, z) for x in xs for y in ys for z in zs])
    return np.ascontiguousarray(pts)


def _time(fn, *args, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    geometry = paper_trap_geometry()
    volts = {eid: 1.0 for eid in geometry.ids()}
    rects, v = geometry.rect_arrays(volts)
    rects = np.ascontiguousarray(rects)
    v = np.ascontiguousarray(v)
    print(f"geometry: {len(v)} rectangles")
    if _rect_cy is None:
        print("compiled kernel not available; nothing to compare")
        return

    header = f"{'points':>8} {'kind':>9} {'numpy [ms]':>12} {'cython [ms]':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in (64, 512, 4096, 32768):
        pts = _grid(n)
        for kind, f_np, f_cy in (
            ("phi", rect_np.rect_potential_sum, _rect_cy.rect_potential_sum),
            ("field", rect_np.rect_field_sum, _rect_cy.rect_field_sum),
        ):
            a = f_np(rects, v, pts)
            b = f_cy(rects, v, pts)
            # summation order differs between the einsum path and the loop,
            # so agreement is to roundoff, not bit-exact
            np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12)
            t_np = _time(f_np, rects, v, pts)
            t_cy = _time(f_cy, rects, v, pts)
            print(
                f"{len(pts):>8} {kind:>9} {t_np * 1e3:>12.3f} {t_cy * 1e3:>12.3f} "
                f"{t_np / t_cy:>8.2f}"
            )


if __name__ == "__main__":
    main()
