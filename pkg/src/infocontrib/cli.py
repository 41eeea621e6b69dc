"""Command-line front end.

Exit status: 0 success, 1 usage error, 2 parse error, 3 convergence
failure, 4 oracle mismatch.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings

from . import __version__
from .corpus import get_example, list_examples
from .decomposition import information_contribution, verify_result
from .distribution import kl_divergence, load_distribution
from .errors import (
    AbsoluteContinuityError,
    ConstraintInconsistencyError,
    ConvergenceError,
    DistributionError,
    LatticeError,
    ParseError,
)
from .lattice import (
    DEFAULT_CAP,
    default_input_names,
    enumerate_lattice,
    format_complex,
    format_face,
    format_node,
    parse_node,
)
from .projection import P_FLOOR, Q_FLOOR, IpfOptions, split_distribution
from .shapley import oracle_check

EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_CONVERGENCE = 3
EXIT_ORACLE = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_input(p):
    p.add_argument("input", nargs="?", help="distribution file (.tsv or .json)")
    p.add_argument("--example", "-e", help="built-in example name instead of a file")
    p.add_argument("--format", choices=["tsv", "json"], help="input format (default: from extension)")
    p.add_argument("--target", help="name of the target variable (default: last TSV column)")
    p.add_argument("--lenient", action="store_true", help="renormalize tables that do not sum to 1")


def _add_ipf(p):
    p.add_argument("--tol", type=float, default=1e-10, help="max L1 marginal gap (default 1e-10)")
    p.add_argument("--max-sweeps", type=int, default=100_000)
    p.add_argument("--base", choices=["2", "e"], default="2", help="logarithm base")
    p.add_argument("--workers", type=int, default=1, help="threads for node projections")
    p.add_argument("--json", action="store_true", help="emit JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="infocontrib", description="Information contributions of predictor sets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", help="contribution of every predictor to I(X;Y)")
    _add_input(p)
    _add_ipf(p)

    p = sub.add_parser("constraint-info", help="D(p || p_S) for one constraint node")
    _add_input(p)
    p.add_argument("--node", required=True, help='facet notation, e.g. "(Z1Z3)(Z2Z3)"')
    _add_ipf(p)

    p = sub.add_parser("lattice", help="print the input lattice")
    p.add_argument("-n", type=int, required=True, help="number of inputs")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("oracle-check", help="compare chain sums with the Shapley formula")
    _add_input(p)
    _add_ipf(p)

    p = sub.add_parser("examples", help="list built-in distributions")
    p.add_argument("--arity", type=int, help="only examples with this many inputs")
    p.add_argument("--json", action="store_true")
    return parser


def _options(args) -> IpfOptions:
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    if args.max_sweeps < 1:
        raise UsageError("--max-sweeps must be at least 1")
    return IpfOptions(args.tol, args.max_sweeps, math.e if args.base == "e" else 2)


def _load(args):
    if (args.input is None) == (args.example is None):
        raise UsageError("give exactly one of a distribution file or --example")
    if args.example is not None:
        try:
            d = get_example(args.example)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        if args.target:
            d = d.with_target(args.target)
        return d, f"example:{args.example.lower()}"
    try:
        d = load_distribution(args.input, args.format, strict=not args.lenient, target=args.target)
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
    return d, args.input


def _fmt(x: float) -> str:
    return f"{x:.8f}"


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False)


def _base_label(base) -> str:
    return "bits" if base == 2 else "nats"


def cmd_decompose(args, out) -> int:
    d, source = _load(args)
    r = information_contribution(d, _options(args), workers=args.workers)
    shown = r.by_label(clamp=True)
    unit = _base_label(r.base)
    if args.json:
        doc = {
            "source": source,
            "inputs": list(r.input_names),
            "target": r.target_name,
            "unit": unit,
            "contributions": shown,
            "total": r.total_mi,
            "residual": r.residual,
            "raw_contributions": r.by_label(clamp=False),
            "diagnostics": {
                "nodes": [
                    {"node": format_complex(s, r.input_names), "divergence": r.node_divergences[s], "sweeps": r.sweeps[s]}
                    for s in r.node_divergences
                ],
                "checks": [
                    {"property": c.name, "passed": c.passed, "slack": c.slack}
                    for c in verify_result(r)
                ],
            },
        }
        print(_dump(doc), file=out)
        return 0
    width = max(len("predictor"), max(len(k) for k in shown))
    print(f"{'predictor':<{width}}  contribution ({unit})", file=out)
    for label, value in shown.items():
        print(f"{label:<{width}}  {_fmt(value)}", file=out)
    print(f"{'total':<{width}}  {_fmt(r.total_mi)}", file=out)
    for c in verify_result(r):
        if not c.passed:
            print(f"warning: {c.name} check failed ({c.detail})", file=sys.stderr)
    return 0


def cmd_constraint_info(args, out) -> int:
    d, source = _load(args)
    opts = _options(args)
    try:
        node = parse_node(args.node, d.names)
    except LatticeError as exc:
        raise ParseError(str(exc)) from None
    split = split_distribution(d, node, opts)
    value = kl_divergence(d, split.distribution, opts.base, q_floor=Q_FLOOR, p_floor=P_FLOOR)
    unit = _base_label(opts.base)
    if args.json:
        print(_dump({"source": source, "node": format_node(node, d.names), "unit": unit,
                     "information": value, "sweeps": split.sweeps_used,
                     "final_gap": split.final_gap}), file=out)
        return 0
    print(f"node         {format_node(node, d.names)}", file=out)
    print(f"information  {_fmt(value)} {unit}", file=out)
    print(f"sweeps       {split.sweeps_used}", file=out)
    print(f"final gap    {split.final_gap:.3e}", file=out)
    return 0


def cmd_lattice(args, out) -> int:
    lat = enumerate_lattice(args.n, args.cap)
    names = default_input_names(args.n)
    if args.json:
        doc = {
            "n": lat.n,
            "nodes": [
                {"node": format_complex(s, names), "chains_from_bottom": lat.chains_from_bottom[s],
                 "chains_to_top": lat.chains_to_top[s]}
                for s in lat.nodes
            ],
            "edges": [
                {"lower": format_complex(e.lower, names), "upper": format_complex(e.upper, names),
                 "adds": format_face(e.face, names), "chains": lat.chains_through(e),
                 "weight": str(lat.edge_weight(e))}
                for e in lat.edges
            ],
            "maximal_chains": lat.total_chains,
        }
        print(_dump(doc), file=out)
        return 0
    print(f"input lattice over {args.n} inputs", file=out)
    print(f"nodes: {len(lat.nodes)}", file=out)
    for s in lat.nodes:
        print(f"  {format_complex(s, names)}", file=out)
    print(f"hasse edges: {len(lat.edges)}", file=out)
    for e in lat.edges:
        print(f"  {format_complex(e.lower, names)} -> {format_complex(e.upper, names)}"
              f"  adds {format_face(e.face, names)}  chains {lat.chains_through(e)}", file=out)
    print(f"maximal chains: {lat.total_chains}", file=out)
    return 0


def cmd_oracle_check(args, out) -> int:
    d, source = _load(args)
    report = oracle_check(d, _options(args), workers=args.workers)
    names = tuple(d.names[i] for i in d.input_indices)
    if args.json:
        print(_dump({
            "source": source,
            "chain_sum": {format_face(a, names): v for a, v in report.chain_sum.items()},
            "shapley": {format_face(a, names): v for a, v in report.shapley.items()},
            "max_discrepancy": report.max_discrepancy,
            "tolerance": report.tolerance,
            "passed": report.passed,
        }), file=out)
    else:
        print(f"max discrepancy  {report.max_discrepancy:.3e}", file=out)
        print(f"oracle check     {'PASS' if report.passed else 'FAIL'} (tolerance {report.tolerance:g})",
              file=out)
    return 0 if report.passed else EXIT_ORACLE


def cmd_examples(args, out) -> int:
    items = list_examples(args.arity)
    if args.json:
        print(_dump([{"name": e.key, "title": e.title, "inputs": e.arity, "description": e.description}
                     for e in items]), file=out)
        return 0
    for e in items:
        print(f"{e.key:<14}{e.arity} inputs  {e.title}: {e.description}", file=out)
    return 0


COMMANDS = {
    "decompose": cmd_decompose,
    "constraint-info": cmd_constraint_info,
    "lattice": cmd_lattice,
    "oracle-check": cmd_oracle_check,
    "examples": cmd_examples,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"infocontrib: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LatticeError as exc:
        print(f"infocontrib: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, AbsoluteContinuityError, ConstraintInconsistencyError) as exc:
        print(f"infocontrib: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ParseError, DistributionError) as exc:
        print(f"infocontrib: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
