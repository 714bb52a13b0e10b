"""Command-line front end: check, fmt, classify, graph, simulate.

Diagnostics go to stderr as ``<file>:<line>:<col>: <severity> <code>:
<message>``; data goes to stdout. Exit status 0 means success with no
error diagnostics, 1 means the input had errors (or a format drift under
``--checkonly``), 2 means a usage or I/O problem. In-model simulation
failures are results, not tool errors, and still exit 0.
"""

import argparse
import sys

from .analyzer import classify_network, dependency_graph, resolve
from .formatter import format_network
from .model import Diagnostic, Severity, TaxonomyClass
from .parser import parse
from .scenario import load_scenario
from .simulator import render_trace, run_simulation


def _print_diagnostics(path: str, diagnostics: list[Diagnostic], quiet: bool = False) -> None:
    ordered = sorted(diagnostics, key=lambda d: (d.span.start_line, d.span.start_col))
    for d in ordered:
        if quiet and d.severity is Severity.NOTE:
            continue
        print(
            f"{path}:{d.span.start_line}:{d.span.start_col}: {d.severity} {d.code}: {d.message}",
            file=sys.stderr,
        )


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _load_resolved(path: str, quiet: bool = False):
    """Parse and resolve a network file; returns (resolved, exit code)."""
    try:
        source = _read(path)
    except OSError as exc:
        print(f"{path}: error: {exc.strerror or exc}", file=sys.stderr)
        return None, 2
    result = parse(source)
    if result.network is None:
        _print_diagnostics(path, result.diagnostics, quiet)
        return None, 1
    resolved, diagnostics = resolve(result.network)
    _print_diagnostics(path, result.diagnostics + diagnostics, quiet)
    if resolved is None:
        return None, 1
    return resolved, 0


def cmd_check(args) -> int:
    _, status = _load_resolved(args.path, args.quiet)
    return status


def cmd_fmt(args) -> int:
    try:
        source = _read(args.path)
    except OSError as exc:
        print(f"{args.path}: error: {exc.strerror or exc}", file=sys.stderr)
        return 2
    result = parse(source)
    if result.network is None:
        _print_diagnostics(args.path, result.diagnostics)
        return 1
    canonical = format_network(result.network)
    if args.checkonly:
        if source != canonical:
            print(f"{args.path}: not in canonical form", file=sys.stderr)
            return 1
        return 0
    if args.write:
        try:
            with open(args.path, "w", encoding="utf-8") as handle:
                handle.write(canonical)
        except OSError as exc:
            print(f"{args.path}: error: {exc.strerror or exc}", file=sys.stderr)
            return 2
        return 0
    sys.stdout.write(canonical)
    return 0


def cmd_classify(args) -> int:
    resolved, status = _load_resolved(args.path)
    if resolved is None:
        return status
    classes = classify_network(resolved)
    for name, cls in classes.items():
        print(f"{name}: {cls}")
    if args.summary:
        counts = {cls: 0 for cls in TaxonomyClass}
        for cls in classes.values():
            counts[cls] += 1
        print("summary: " + " ".join(f"{cls}={n}" for cls, n in counts.items()))
    return 0


def cmd_graph(args) -> int:
    resolved, status = _load_resolved(args.path)
    if resolved is None:
        return status
    graph = dependency_graph(resolved)
    _print_diagnostics(args.path, list(graph.warnings))
    classes = resolved.per_machine_class
    lines = [f'digraph "{resolved.spec.name}" {{']
    for machine in resolved.spec.machines:
        lines.append(f'    "{machine.name}" [label="{machine.name}\\n{classes[machine.name]}"];')
    for src, dst in graph.edges:
        lines.append(f'    "{src}" -> "{dst}";')
    lines.append("}")
    text = "\n".join(lines) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(text)
        except OSError as exc:
            print(f"{args.out}: error: {exc.strerror or exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 0


def cmd_simulate(args) -> int:
    resolved, status = _load_resolved(args.path)
    if resolved is None:
        return status
    try:
        scenario_text = _read(args.scenario)
    except OSError as exc:
        print(f"{args.scenario}: error: {exc.strerror or exc}", file=sys.stderr)
        return 2
    scenario, diagnostics = load_scenario(
        scenario_text, resolved, seed=args.seed, horizon=args.horizon
    )
    _print_diagnostics(args.scenario, diagnostics)
    if scenario is None:
        return 1

    records, report = run_simulation(resolved, scenario)

    if args.trace:
        try:
            with open(args.trace, "w", encoding="utf-8") as handle:
                handle.write(render_trace(records, scenario.config))
        except OSError as exc:
            print(f"{args.trace}: error: {exc.strerror or exc}", file=sys.stderr)
            return 2
    if args.report:
        try:
            with open(args.report, "w", encoding="utf-8") as handle:
                handle.write(report.to_text())
        except OSError as exc:
            print(f"{args.report}: error: {exc.strerror or exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(report.to_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smadl", description="SMADL network toolchain: validate, format, classify, simulate."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="parse and validate a network file")
    check.add_argument("path")
    check.add_argument("--quiet", action="store_true", help="suppress note diagnostics")
    check.set_defaults(func=cmd_check)

    fmt = sub.add_parser("fmt", help="print (or rewrite) the canonical form")
    fmt.add_argument("path")
    mode = fmt.add_mutually_exclusive_group()
    mode.add_argument("--write", action="store_true", help="rewrite the file in place")
    mode.add_argument(
        "--checkonly", action="store_true", help="exit 1 if the file is not canonical"
    )
    fmt.set_defaults(func=cmd_fmt)

    classify = sub.add_parser("classify", help="print each machine's taxonomy class")
    classify.add_argument("path")
    classify.add_argument("--summary", action="store_true", help="append per-class counts")
    classify.set_defaults(func=cmd_classify)

    graph = sub.add_parser("graph", help="export the consumes graph as DOT")
    graph.add_argument("path")
    graph.add_argument("--out", help="write to a file instead of stdout")
    graph.set_defaults(func=cmd_graph)

    simulate = sub.add_parser("simulate", help="run a scenario against a network")
    simulate.add_argument("path")
    simulate.add_argument("--scenario", required=True, help="scenario script file")
    simulate.add_argument("--seed", type=int, default=0, help="seed recorded in the trace header")
    simulate.add_argument("--horizon", type=int, default=None, help="last scheduled tick")
    simulate.add_argument("--trace", help="write the event trace to this file")
    simulate.add_argument("--report", help="write the run report to this file instead of stdout")
    simulate.set_defaults(func=cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
