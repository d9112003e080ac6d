"""Command line entry point: ``coarsealg check | gen | suite``.

Exit codes: 0 when everything passes, 1 when a check or suite fails,
2 for unreadable or invalid input (the message names the field).
"""

from __future__ import annotations

import argparse
import inspect
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .checks import run_scenario
from .filtered import Caps
from .scenario import GENERATORS, ScenarioError, dump_scenario, generate_example, load_scenario
from .suites import SUITES, run_suite, shipped_path, shipped_scenarios

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _short(detail: dict, limit: int = 100) -> str:
    keep = {k: v for k, v in detail.items() if not isinstance(v, (list, dict)) or len(json.dumps(v)) < 60}
    text = json.dumps(keep, ensure_ascii=False)
    return text if len(text) <= limit else text[: limit - 3] + "..."


def _write_json(path: Optional[str], payload) -> None:
    if path is None:
        return
    text = json.dumps(payload, indent=1, ensure_ascii=False) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _resolve_path(arg: str) -> Path:
    p = Path(arg)
    if p.exists() or arg.endswith(".json"):
        return p
    if arg in shipped_scenarios():
        return Path(str(shipped_path(arg)))
    return p


def _caps(args, base: Caps) -> Caps:
    caps = Caps.parse(args.caps) if args.caps else base
    if args.seed is not None:
        caps = replace(caps, seed=args.seed)
    return caps


def cmd_check(args) -> int:
    path = _resolve_path(args.scenario)
    if not path.exists():
        print(f"error: scenario: no such file or shipped scenario {args.scenario!r}", file=sys.stderr)
        return EXIT_INPUT
    sc = load_scenario(path)
    if args.mode == "sampled" and args.seed is None and not sc.seed_declared and "seed" not in (args.caps or ""):
        raise ScenarioError("caps.seed", "a seed is required when sampled mode is requested")
    caps = _caps(args, sc.caps)
    timings: list = []
    report = run_scenario(sc, args.mode, caps, timings)
    print(f"scenario {report['scenario']}  space {report['space']} ({report['points']} points)  "
          f"ring {report['ring']}  mode {report['mode']}")
    if "notice" in report:
        print(f"  notice: {report['notice']}")
    for res, sec in zip(report["checks"], timings):
        print(f"  {res['outcome']:<5} {res['check']:<22} {sec:7.2f}s  {_short({k: v for k, v in res.items() if k not in ('check', 'outcome')})}")
    print(f"outcome: {report['outcome']}")
    _write_json(args.json_out, report)
    return EXIT_PASS if report["outcome"] == "pass" else EXIT_FAIL


def _params(items: Sequence[str]) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise ScenarioError("params", f"expected key=value, got {item!r}")
        out[key] = value
    return out


def cmd_gen(args) -> int:
    params = _params(args.params)
    if args.seed is not None:
        if "seed" not in inspect.signature(GENERATORS.get(args.kind)).parameters:
            raise ScenarioError("--seed", f"{args.kind} is not randomized")
        params.setdefault("seed", str(args.seed))
    try:
        sc = generate_example(args.kind, **params)
    except (TypeError, ValueError) as e:
        raise ScenarioError("params", str(e)) from None
    text = dump_scenario(sc)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}", file=sys.stderr)
    return EXIT_PASS


def cmd_suite(args) -> int:
    names = list(SUITES) if args.name == "all" else [args.name]
    results = []
    for name in names:
        kw = {"seed": args.seed} if args.seed is not None and name not in ("cvbbcc", "game", "equivariance",
                                                                           "resolution") else {}
        res = run_suite(name, **kw)
        results.append(res)
        print(f"{'PASS' if res.ok else 'FAIL'}  {res.name:<14} {res.seconds:7.1f}s  {res.summary}")
    _write_json(args.json_out, [r.to_json() for r in sorted(results, key=lambda r: r.name)])
    return EXIT_PASS if all(r.ok for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coarsealg", description="Exact checks for filtered modules over finite metric spaces.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run the checks of a scenario file (or a shipped scenario name)")
    c.add_argument("scenario")
    c.add_argument("--mode", default="auto", choices=["auto", "exhaustive", "generator-reduced", "sampled"])
    c.add_argument("--caps", help="e.g. subset=14,pair=10,trials=64,seed=0")
    c.add_argument("--seed", type=int)
    c.add_argument("--json-out", help="write the JSON report here ('-' for stdout)")
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("gen", help="emit a built-in example scenario")
    g.add_argument("kind", choices=sorted(GENERATORS))
    g.add_argument("params", nargs="*", help="key=value generator parameters")
    g.add_argument("--seed", type=int)
    g.add_argument("-o", "--output", help="output file (default stdout)")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("suite", help="run a seeded batch suite")
    s.add_argument("name", choices=sorted(SUITES) + ["all"])
    s.add_argument("--seed", type=int)
    s.add_argument("--json-out")
    s.set_defaults(func=cmd_suite)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as e:
        print(f"input error at {e.where}: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
