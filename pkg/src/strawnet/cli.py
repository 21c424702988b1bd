"""Command-line interface.

Exit codes: 0 success, 1 invalid input or usage, 2 internal error,
3 conflict found when ``--exit-on-conflict`` is given.
"""

from __future__ import annotations

import argparse
import sys

from .exceptions import NetworkError
from .formats import (
    bundled_network_text,
    parse_findings,
    parse_network,
    serialize_network,
)
from .harness import NetSpec, run_detection_experiment, surprise_bound_check
from .inference import posterior_marginal, prob_of_evidence
from .network import Evidence, Network, as_evidence, validate_network
from .straw import StrawKind, build_straw, conflict_report

EXIT_OK, EXIT_INVALID, EXIT_INTERNAL, EXIT_CONFLICT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _read_network_text(path: str) -> str:
    if path.startswith("@"):
        return bundled_network_text(path[1:])
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(args) -> Network:
    return parse_network(_read_network_text(args.network), renormalize=args.renormalize)


def _findings(args, net: Network) -> Evidence:
    found: dict[str, str] = {}
    if getattr(args, "findings", None):
        with open(args.findings, encoding="utf-8") as fh:
            found.update(parse_findings(fh.read(), net))
    seen = set()
    for pair in args.ev or []:
        if "=" not in pair:
            raise UsageError(f"--ev expects VAR=STATE, got {pair!r}")
        var, state = (s.strip() for s in pair.split("=", 1))
        if var in seen:
            raise UsageError(f"duplicate --ev for {var!r}")
        seen.add(var)
        if var in found and found[var] != state:
            print(
                f"warning: --ev {var}={state} overrides {var}={found[var]} from "
                f"{args.findings}",
                file=sys.stderr,
            )
        found[var] = state
    return as_evidence(net, found)


def _kinds(value: str) -> list[StrawKind]:
    if value == "both":
        return [StrawKind.BIPARTITE, StrawKind.INDEPENDENT]
    try:
        return [StrawKind(v.strip()) for v in value.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"invalid kind {value!r}; use bipartite, independent or both"
        ) from None


def _floats(value: str) -> list[float]:
    try:
        return [float(v) for v in value.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value!r}")


def cmd_validate(args) -> int:
    text = _read_network_text(args.network)
    try:
        net = parse_network(text, renormalize=args.renormalize)
    except NetworkError as exc:
        print(f"invalid: {exc}")
        return EXIT_INVALID
    report = validate_network(net)
    print(f"{net.name}: {report}")
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_query(args) -> int:
    net = _load(args)
    e = _findings(args, net)
    print(f"P(e) = {prob_of_evidence(net, e):.4g}")
    for name in args.marginal or []:
        dist = posterior_marginal(net, name, e)
        states = net.variable(name).states
        body = "  ".join(f"{s}={p:.4g}" for s, p in zip(states, dist))
        print(f"P({name} | e): {body}")
    return EXIT_OK


def cmd_straw(args) -> int:
    net = _load(args)
    straw = build_straw(net, args.kind)
    for note in straw.warnings:
        print(f"warning: {note}", file=sys.stderr)
    text = serialize_network(straw)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_conflict(args) -> int:
    net = _load(args)
    e = _findings(args, net)
    report = conflict_report(net, e, args.kind, threshold=args.threshold)
    print(report.format())
    if args.exit_on_conflict and report.any_conflict():
        return EXIT_CONFLICT
    return EXIT_OK


def cmd_experiment(args) -> int:
    spec = NetSpec(
        n_target=args.targets,
        n_evidence=args.evidence,
        n_other=args.other,
        states_per_var=args.states,
        edge_density=args.density,
        seed=args.seed,
    )
    result = run_detection_experiment(
        spec,
        strength=args.strength,
        epsilon=args.epsilon,
        n=args.cases,
        seed=args.seed,
        threshold=args.threshold,
        perturb_roles=args.perturb_roles.split(",") if args.perturb_roles else None,
    )
    sys.stdout.write(result.to_table())
    return EXIT_OK


def cmd_check_bound(args) -> int:
    net = _load(args)
    for i, kind in enumerate(args.kind):
        check = surprise_bound_check(net, kind, args.K, args.cases, args.seed)
        table = check.to_table()
        sys.stdout.write(table if i == 0 else table.split("\n", 1)[1])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="strawnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def net_command(name, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("network", help="network file, or @cancer for the bundled example")
        p.add_argument("--renormalize", action="store_true", help="rescale CPT rows to sum to 1")
        return p

    def with_findings(p):
        p.add_argument("--ev", action="append", metavar="VAR=STATE", help="a finding (repeatable)")
        p.add_argument("--findings", metavar="FILE", help="findings document")

    p = net_command("validate", "print the validation report")
    p.set_defaults(func=cmd_validate)

    p = net_command("query", "probability of findings and posterior marginals")
    with_findings(p)
    p.add_argument("--marginal", action="append", metavar="VAR")
    p.set_defaults(func=cmd_query)

    p = net_command("straw", "build and write a straw model")
    p.add_argument("--kind", required=True, choices=[k.value for k in StrawKind])
    p.add_argument("--out", required=True, help="output file, or - for stdout")
    p.set_defaults(func=cmd_straw)

    p = net_command("conflict", "conflict indices for a set of findings")
    with_findings(p)
    p.add_argument("--kind", type=_kinds, default=_kinds("bipartite"),
                   help="bipartite, independent or both")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--exit-on-conflict", action="store_true",
                   help="exit with status 3 when any verdict is Conflict")
    p.set_defaults(func=cmd_conflict)

    p = sub.add_parser("experiment", help="detection rates on a synthetic mixture world")
    p.add_argument("--targets", type=int, required=True)
    p.add_argument("--evidence", type=int, required=True)
    p.add_argument("--other", type=int, required=True)
    p.add_argument("--strength", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--cases", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--states", type=int, default=2)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--perturb-roles", metavar="ROLES",
                   help="comma-separated roles whose CPTs are perturbed (default: all)")
    p.set_defaults(func=cmd_experiment)

    p = net_command("check-bound", "empirical exceedance of the surprise bound")
    p.add_argument("--kind", type=_kinds, default=_kinds("both"),
                   help="comma-separated straw kinds, or both")
    p.add_argument("--K", type=_floats, default=[1.0, 2.0, 3.0, 4.0],
                   help="comma-separated thresholds (default 1,2,3,4)")
    p.add_argument("--cases", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_check_bound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NetworkError, UsageError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # pragma: no cover
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
