"""Rewrite the scenario files shipped inside the package from their builders."""

from pathlib import Path

from coarsealg.scenario import (cycle_equivariant, dump_scenario, path3_kernel, random_idempotent,
                                random_scenario, zball_kernel)

OUT = Path(__file__).resolve().parent.parent / "src" / "coarsealg" / "data" / "scenarios"

BUILDERS = [
    path3_kernel,
    cycle_equivariant,
    lambda: cycle_equivariant(broken=True),
    lambda: random_idempotent(0),
    lambda: random_scenario(0),
    lambda: zball_kernel(8),
]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for build in BUILDERS:
        sc = build()
        path = OUT / f"{sc.name}.json"
        path.write_text(dump_scenario(sc))
        print(path.name)


if __name__ == "__main__":
    main()
