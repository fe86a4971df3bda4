"""Generate the frozen Monte-Carlo reference values for random convex solids.

Run from the tests directory:  python3 make_hull_oracle.py

Writes data/hull_oracle.json with, per hull seed, the MC estimate of mass,
center of mass, and inertia about the center of mass at density 1000 from
ten million rejection samples.  The values are frozen here once; the test
suite compares the exact polyhedral computation against them at 1%.
"""
from __future__ import annotations

import json
import pathlib
import time

from oracles.hulls import random_hull
from oracles.montecarlo import estimate_mass_properties

SAMPLES = 10_000_000
DENSITY = 1000.0
HULL_SEEDS = list(range(1, 21))
SAMPLE_SEED_BASE = 5000


def main() -> None:
    records = []
    for seed in HULL_SEEDS:
        vertices, triangles = random_hull(seed)
        start = time.perf_counter()
        mass, com, inertia, volume, n_inside = estimate_mass_properties(
            vertices, triangles, DENSITY, SAMPLES, seed=SAMPLE_SEED_BASE + seed
        )
        elapsed = time.perf_counter() - start
        records.append(
            {
                "hull_seed": seed,
                "sample_seed": SAMPLE_SEED_BASE + seed,
                "samples": SAMPLES,
                "density": DENSITY,
                "n_inside": n_inside,
                "mass": mass,
                "volume": volume,
                "center_of_mass": com.tolist(),
                "inertia_about_com": inertia.tolist(),
            }
        )
        print(f"hull {seed:2d}: mass={mass:12.4f} inside={n_inside} ({elapsed:.1f}s)")

    out = pathlib.Path(__file__).parent / "data" / "hull_oracle.json"
    out.parent.mkdir(exist_ok=True)
    out.write_text(json.dumps({"samples": SAMPLES, "density": DENSITY, "hulls": records}, indent=1))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
