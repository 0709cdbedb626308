"""Time the energy/gradient kernel: compiled extension vs numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 16 48 128] [--repeat 20]
"""
import argparse
import timeit

import numpy as np

from elastica2d import kernels
from elastica2d.elasticity import geometry
from elastica2d.mesh import disk_mesh


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 48, 128])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    names = sorted(kernels.BACKENDS)
    print(f"backends: {', '.join(names)} (active: {kernels.BACKEND})")
    print(f"{'triangles':>10} " + " ".join(f"{n + ' [ms]':>14}" for n in names) + f" {'speedup':>8}")
    for res in args.sizes:
        m = disk_mesh(1.0, res)
        geo = geometry(m)
        pos = 1.1 * m.vertices + 0.01 * (rng.normal(size=m.n_vertices) + 1j * rng.normal(size=m.n_vertices))
        times = {}
        for name in names:
            fn = kernels.BACKENDS[name]
            call = lambda: fn(geo.alpha, geo.beta, geo.area, geo.tris, pos, 1.0, 1e-10, True)  # noqa: E731
            call()
            times[name] = min(timeit.repeat(call, number=1, repeat=args.repeat)) * 1e3
        speed = times["numpy"] / times["cython"] if "cython" in times else float("nan")
        print(f"{m.n_triangles:>10} " + " ".join(f"{times[n]:>14.3f}" for n in names) + f" {speed:>8.2f}")


if __name__ == "__main__":
    main()
