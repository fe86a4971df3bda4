"""Compare the compiled and pure-python mass-integral kernels.

Run:  python3 benchmarks/bench_masskernel.py [--subdivisions N] [--repeats R]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from scenebridge.core.meshes import icosphere
from scenebridge.dynamics import available_backends, integrate_triangles


def time_backend(name: str, vertices, triangles, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        integrate_triangles(vertices, triangles, backend=name)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--subdivisions", type=int, default=6)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; only pure-python timings below")

    print(f"{'triangles':>10}  " + "  ".join(f"{n:>14}" for n in sorted(backends)))
    for sub in range(2, args.subdivisions + 1):
        mesh = icosphere(1.0, sub)
        times = {n: time_backend(n, mesh.vertices, mesh.triangles, args.repeats) for n in backends}
        row = f"{len(mesh.triangles):>10}  " + "  ".join(
            f"{times[n] * 1e3:>12.3f}ms" for n in sorted(backends)
        )
        if "compiled" in times and "pure-python" in times:
            row += f"  ({times['pure-python'] / times['compiled']:.1f}x)"
        print(row)

    # Sanity: both backends must agree to machine precision.
    mesh = icosphere(1.0, 4)
    results = [integrate_triangles(mesh.vertices, mesh.triangles, backend=n) for n in sorted(backends)]
    for a, b in zip(results, results[1:]):
        assert np.allclose(a, b, rtol=1e-12, atol=1e-15), "backends disagree"
    print("backends agree on icosphere integrals")


if __name__ == "__main__":
    main()
