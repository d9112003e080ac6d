"""Tracked-radius table for the lean decomposition pipelines on zball(32) and z2ball(8)."""

from coarsealg.suites import run_suite

COLUMNS = ["n", "radii", "mesh", "max_certified_radius", "max_tracked_radius", "claimed_bound", "tracker_bound",
           "all_steps_guaranteed"]


def main():
    res = run_suite("cvbbcc")
    pipes = res.details["pipelines"]
    print("pipeline".ljust(16) + "".join(c.ljust(21) for c in COLUMNS))
    for name, det in pipes.items():
        print(name.ljust(16) + "".join(str(det.get(c)).ljust(21) for c in COLUMNS))
    print()
    for name, det in pipes.items():
        print(f"{name}: per-element (summands, tracked, certified)")
        rows = [(r["summands"], r["max_tracked_radius"], r["certified_radius"]) for r in det["table"]]
        for i in range(0, len(rows), 8):
            print("  " + "  ".join(f"{i + j:>3}:{s}/{t}/{c}" for j, (s, t, c) in enumerate(rows[i:i + 8])))
    print(f"{'pass' if res.ok else 'fail'} in {res.seconds:.1f}s")


if __name__ == "__main__":
    main()
