"""Command-line front end.

Subcommands operate on factor-graph files (native JSON or UAI) and print a
JSON result document to stdout (or ``--output``). Diagnostics go to stderr
as single-line JSON objects so they are easy to collect from scripts.

Exit codes:

====  =========================================================
   0  success
   1  usage error (bad flags, bad flag combinations)
   2  parse or validation failure (including non-tree input to
      tree-only operations)
   3  schedule finished without converging
   4  contradiction: some wire carries an all-zero message
   5  a size cap was exceeded (tensor, oracle, or clique)
====  =========================================================
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from .algebra import SEMIRINGS, get_semiring
from .checks import run_all_checks
from .engine import (
    RunConfig,
    contraction_value,
    decode_map,
    dual_seed,
    evaluate_assignment,
    run_bp,
)
from .errors import (
    ContradictionError,
    NotATreeError,
    ParseError,
    TooLargeError,
    ValidationError,
)
from .formats import parse_native, parse_uai, serialize_native, serialize_uai
from .graph import GraphMode
from .jtree import run_junction_tree
from .oracle import exact_contraction, exact_marginal

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_NOT_CONVERGED = 3
EXIT_CONTRADICTION = 4
EXIT_TOO_LARGE = 5


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of calling sys.exit."""

    def error(self, message):
        raise _UsageError(message)


def _diag(level, message, **extra):
    record = {"level": level, "message": message}
    record.update(extra)
    sys.stderr.write(json.dumps(record) + "\n")


def _build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--input", help="path to the factor-graph file")
    common.add_argument(
        "--format",
        choices=("native", "uai"),
        default="native",
        help="input file format (default: native)",
    )
    common.add_argument(
        "--semiring",
        choices=tuple(SEMIRINGS),
        default=None,
        help="semiring to run under (default: from the file, else prob)",
    )
    common.add_argument(
        "--schedule",
        choices=("sync", "tree"),
        default="sync",
        help="message schedule (default: sync)",
    )
    common.add_argument("--max-iters", type=int, default=1000)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--damping", type=float, default=0.0)
    common.add_argument(
        "--no-normalize",
        action="store_true",
        help="keep messages unnormalized (required for contraction values)",
    )
    common.add_argument("--output", help="write the result document here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")

    parser = _Parser(prog="spiderbp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    sub.add_parser("run", parents=[common], help="run belief propagation")
    sub.add_parser("exact", parents=[common], help="brute-force contraction and marginals")
    sub.add_parser("jtree", parents=[common], help="junction-tree marginals on loopy graphs")
    sub.add_parser("map", parents=[common], help="max-times decoding of a best assignment")
    grad = sub.add_parser("grad", parents=[common], help="derivative of the contraction value")
    grad.add_argument("--factor", type=int, required=True, help="factor id to differentiate")
    grad.add_argument(
        "--entry",
        type=int,
        required=True,
        help="flat row-major index of the entry within the factor table",
    )
    sub.add_parser("check", parents=[common], help="self-test the algebra and tensor laws")
    sub.add_parser("convert", parents=[common], help="convert between native and uai formats")

    return parser


def _load_graph(args, semiring_name):
    """Parse the input file; returns (graph, semiring). Warnings become diags."""
    if not args.input:
        raise _UsageError(f"{args.command} requires --input")
    try:
        with open(args.input, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as err:
        raise ParseError(f"cannot read {args.input}: {err}") from err
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if args.format == "uai":
            graph, semiring = parse_uai(text, semiring=semiring_name or "prob")
        else:
            graph, semiring = parse_native(text, semiring=semiring_name)
    for w in caught:
        _diag("warning", str(w.message))
    return graph, semiring


def _emit(args, document):
    payload = json.dumps(document, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(payload)
    else:
        sys.stdout.write(payload)


def _values_json(semiring, values):
    return [semiring.value_to_json(v) for v in values.reshape(-1).tolist()]


def _beliefs_document(g, semiring, result, z=None):
    doc = {
        "converged": bool(result.converged),
        "iterations": int(result.iterations),
        "residual": float(result.residual),
        "semiring": semiring.name,
        "beliefs": [
            {"id": vid, "values": _values_json(semiring, belief.values)}
            for vid, belief in sorted(result.variable_beliefs.items())
        ],
    }
    if z is not None:
        doc["contraction_value"] = semiring.value_to_json(z)
    return doc


def _config(args, semiring_name, normalize=None):
    return RunConfig(
        semiring=semiring_name,
        schedule=args.schedule,
        max_iters=args.max_iters,
        tol=args.tol,
        damping=args.damping,
        normalize=(not args.no_normalize) if normalize is None else normalize,
        seed=args.seed,
    )


def _cmd_run(args):
    g, semiring = _load_graph(args, args.semiring)
    cfg = _config(args, semiring.name)
    result = run_bp(g, cfg)
    z = None
    if args.no_normalize and args.schedule == "tree":
        z = contraction_value(g, cfg)
    _emit(args, _beliefs_document(g, semiring, result, z))
    if result.contradiction:
        _diag("error", "contradiction: an all-zero message was produced",
              wire=list(result.contradiction_wire) if result.contradiction_wire else None)
        return EXIT_CONTRADICTION
    if not result.converged:
        _diag("error", f"did not converge in {result.iterations} iterations "
              f"(residual {result.residual:.3e})")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _cmd_exact(args):
    g, semiring = _load_graph(args, args.semiring)
    z = exact_contraction(g, semiring)
    doc = {
        "semiring": semiring.name,
        "contraction_value": semiring.value_to_json(z),
    }
    if g.mode is GraphMode.SPIDER:
        marginals = []
        for v in g.variables:
            values = exact_marginal(g, semiring, v.id)
            marginals.append({"id": v.id, "values": _values_json(semiring, values)})
        doc["marginals"] = marginals
    _emit(args, doc)
    return EXIT_OK


def _cmd_jtree(args):
    g, semiring = _load_graph(args, args.semiring)
    cfg = _config(args, semiring.name)
    jt = run_junction_tree(g, cfg)
    doc = {
        "converged": True,
        "iterations": 1,
        "residual": 0.0,
        "semiring": semiring.name,
        "beliefs": [
            {"id": vid, "values": _values_json(semiring, belief.values)}
            for vid, belief in sorted(jt.variable_beliefs.items())
        ],
        "contraction_value": semiring.value_to_json(jt.contraction_value),
        "cliques": [
            {"id": c.id, "members": list(c.members)} for c in jt.tree.cliques
        ],
    }
    _emit(args, doc)
    if jt.contradiction:
        _diag("error", "contradiction: the model admits no satisfying state")
        return EXIT_CONTRADICTION
    return EXIT_OK


def _cmd_map(args):
    if args.semiring not in (None, "maxtimes"):
        raise _UsageError("map decodes under maxtimes; drop --semiring")
    g, _ = _load_graph(args, "maxtimes")
    semiring = get_semiring("maxtimes")
    cfg = _config(args, "maxtimes")
    result = run_bp(g, cfg)
    if result.contradiction:
        _diag("error", "contradiction: an all-zero message was produced")
        return EXIT_CONTRADICTION
    if not result.converged:
        _diag("error", f"did not converge in {result.iterations} iterations")
        return EXIT_NOT_CONVERGED
    assignment = decode_map(g, result.state, semiring)
    value = evaluate_assignment(g, semiring, assignment)
    doc = {
        "semiring": "maxtimes",
        "converged": True,
        "iterations": int(result.iterations),
        "assignment": [{"id": vid, "state": int(s)} for vid, s in sorted(assignment.items())],
        "value": semiring.value_to_json(value),
    }
    _emit(args, doc)
    return EXIT_OK


def _cmd_grad(args):
    if args.semiring not in (None, "dual"):
        raise _UsageError("grad runs under the dual semiring; drop --semiring")
    g, _ = _load_graph(args, "prob")
    lifted = dual_seed(g, args.factor, args.entry)
    cfg = RunConfig(
        semiring="dual",
        schedule="tree",
        max_iters=args.max_iters,
        tol=args.tol,
        normalize=False,
        seed=args.seed,
    )
    z = contraction_value(lifted, cfg)
    doc = {
        "semiring": "dual",
        "factor": args.factor,
        "entry": args.entry,
        "value": float(z.real),
        "derivative": float(z.eps),
    }
    _emit(args, doc)
    return EXIT_OK


def _cmd_check(args):
    reports = run_all_checks(samples=1000, seed=args.seed)
    doc = {
        "ok": all(r.ok for r in reports),
        "suites": [
            {
                "name": r.name,
                "checks": r.checks,
                "failures": list(r.failures),
            }
            for r in reports
        ],
    }
    _emit(args, doc)
    if not doc["ok"]:
        _diag("error", "self-checks failed")
        return EXIT_USAGE
    return EXIT_OK


def _cmd_convert(args):
    g, semiring = _load_graph(args, args.semiring)
    if args.format == "uai":
        payload = serialize_native(g, semiring)
    else:
        payload = serialize_uai(g, semiring)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(payload)
    else:
        sys.stdout.write(payload)
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "exact": _cmd_exact,
    "jtree": _cmd_jtree,
    "map": _cmd_map,
    "grad": _cmd_grad,
    "check": _cmd_check,
    "convert": _cmd_convert,
}


def cli_dispatch(argv):
    """Run one CLI invocation; returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a command is required (run, exact, jtree, map, grad, check, convert)")
        if not 0.0 <= args.damping < 1.0:
            raise _UsageError("--damping must lie in [0, 1)")
        return _COMMANDS[args.command](args)
    except _UsageError as err:
        _diag("error", f"usage: {err}")
        return EXIT_USAGE
    except TooLargeError as err:
        _diag("error", str(err))
        return EXIT_TOO_LARGE
    except (ParseError, ValidationError, NotATreeError) as err:
        _diag("error", str(err))
        return EXIT_PARSE
    except ContradictionError as err:
        _diag("error", str(err))
        return EXIT_CONTRADICTION
    except ValueError as err:
        _diag("error", f"usage: {err}")
        return EXIT_USAGE


def main():
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
