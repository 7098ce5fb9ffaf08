"""
Command line interface: ``rdmkit <command> ...`` or ``python -m rdmkit``.

Every command prints one JSON ``RunReport`` (to standard output or the
``--json`` file) and a short summary to standard error. Exit codes: 0 on
success, 2 for query or data errors, 3 when resilience is undefined, 4 when
a solver, expansion or oracle limit is exceeded, 1 for any other failure.
"""

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from .classify import classification_to_dict, predict_complexity
from .decorators import timed
from .errors import (
    BudgetExceededError,
    DataError,
    ExpansionLimitError,
    NodeLimitError,
    QueryError,
    RDMException,
    UndefinedResilienceError,
)
from .factorize import (
    build_minfac_model,
    enumerate_plans,
    prune_dominated_plans,
    read_once_factorize,
    solve_minfac,
)
from .instance import load_instance, random_instance, save_instance
from .interventions import (
    build_resilience_model,
    build_responsibility_model,
    result_to_dict,
    solve_resilience,
    solve_responsibility,
)
from .lpcore import rational_to_dict, to_lp_format
from .oracle import brute_minfac, brute_resilience, brute_responsibility
from .qlang import load_query
from .witness import enumerate_witnesses, provenance_dnf

__all__ = (
    "RunReport",
    "build_parser",
    "main",
    "exit_code",
    "cmd_resilience",
    "cmd_responsibility",
    "cmd_factorize",
    "cmd_classify",
    "cmd_oracle",
    "cmd_gen",
)

logger = logging.getLogger(__name__)


def _version() -> str:
    try:
        from . import __version__

        return __version__
    except ImportError:
        return "unknown"


@dataclass
class RunReport:
    """
    Machine-readable result of one command.

    ``result`` is the problem payload, or a list of per-directory payloads
    when several data directories were given.
    """

    command: str
    query: Optional[str]
    data: Union[None, str, list[str]]
    semantics: Optional[str]
    result: Any
    lp_bound: Optional[dict] = None
    lp_integral: Optional[bool] = None
    stats: Optional[dict] = None
    timings: dict = field(default_factory=dict)
    version: str = field(default_factory=_version)
    summary: str = field(default="", repr=False)

    def to_dict(self) -> dict:
        report = asdict(self)
        del report["summary"]
        return report

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def exit_code(error: BaseException) -> int:
    """Process exit status for an exception raised by a command."""
    if isinstance(error, UndefinedResilienceError):
        return 3
    if isinstance(error, (NodeLimitError, ExpansionLimitError, BudgetExceededError)):
        return 4
    if isinstance(error, (QueryError, DataError)):
        return 2
    return 1


class CommandFailed(Exception):
    """Failure inside a batch worker, carried back as plain text."""

    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _semantics(args) -> str:
    return "bag" if getattr(args, "bag", False) else "set"


def _solve_one(command: str, query_path: str, data_dir: str, semantics: str, options: dict) -> dict:
    """Run one command on one data directory. Errors come back as a dict so
    the call can cross a process boundary."""
    try:
        q = load_query(query_path)
        inst = load_instance(data_dir, semantics, query=q)
        if command == "resilience":
            result, ms = timed(solve_resilience)(q, inst, semantics, options["mode"])
            payload = result_to_dict(result)
        elif command == "responsibility":
            result, ms = timed(solve_responsibility)(
                q, inst, options["target"], semantics, options["mode"]
            )
            payload = result_to_dict(result)
        elif command == "factorize":
            plans = enumerate_plans(q)
            result, ms = timed(solve_minfac)(q, inst, plans, options["prune"])
            payload = {
                "problem": "factorize",
                "semantics": semantics,
                "length": result.length,
                "value": rational_to_dict(result.length),
                "lp_bound": rational_to_dict(result.lp_bound),
                "lp_integral": result.lp_integral,
                "plans": list(result.plans),
                "assignment": [
                    {"witness": sorted(term), "plan": plan}
                    for term, plan in zip(result.dnf.terms, result.assignment)
                ],
                "stats": {"iterations": result.stats.iterations, "nodes": result.stats.nodes},
            }
            if options["emit_expr"]:
                expression = result.expression
                read_once = read_once_factorize(result.dnf) if result.dnf else None
                payload["expression"] = expression.to_text() if expression is not None else ""
                payload["expression_tree"] = expression.to_dict() if expression is not None else None
                payload["read_once"] = read_once is not None
        elif command == "oracle-resilience":
            value, ms = timed(brute_resilience)(q, inst, semantics)
            payload = {"problem": "resilience", "semantics": semantics, "value": rational_to_dict(value)}
        elif command == "oracle-responsibility":
            cost, ms = timed(brute_responsibility)(q, inst, options["target"], semantics)
            payload = {
                "problem": "responsibility",
                "semantics": semantics,
                "target": options["target"],
                "value": rational_to_dict(cost),
                "responsibility": rational_to_dict(0 if cost is None else 1 / (1 + cost)),
            }
        elif command == "oracle-factorize":
            length, ms = timed(brute_minfac)(q, inst)
            payload = {"problem": "factorize", "length": length}
            if options.get("length") is not None:
                payload["claimed"] = options["length"]
                payload["matches"] = options["length"] == length
        else:
            raise ValueError(f"Unknown command {command}")
    except RDMException as error:
        error = {"type": type(error).__name__, "message": str(error), "exit": exit_code(error)}
        return {"data": data_dir, "error": error}
    return {"data": data_dir, "payload": payload, "solve_ms": ms}


def _run(command: str, args, options: dict) -> RunReport:
    start = time.perf_counter()
    semantics = _semantics(args)
    data_dirs = [str(d) for d in args.data]
    if getattr(args, "dump_model", None):
        if len(data_dirs) != 1:
            raise CommandFailed(2, "--dump-model needs exactly one data directory")
        _dump_model(command, args, semantics, options)
    if len(data_dirs) > 1 and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [
                pool.submit(_solve_one, command, str(args.query), d, semantics, options)
                for d in data_dirs
            ]
            runs = [f.result() for f in futures]
    else:
        runs = [_solve_one(command, str(args.query), d, semantics, options) for d in data_dirs]
    for run in runs:
        if "error" in run:
            error = run["error"]
            raise CommandFailed(error["exit"], f"{run['data']}: {error['type']}: {error['message']}")
    timings = {
        "solve_ms": sum(run["solve_ms"] for run in runs),
        "total_ms": (time.perf_counter() - start) * 1000.0,
    }
    if len(runs) == 1:
        payload = runs[0]["payload"]
        return RunReport(
            command,
            str(args.query),
            data_dirs[0],
            semantics,
            payload,
            payload.get("lp_bound"),
            payload.get("lp_integral"),
            payload.get("stats"),
            timings,
        )
    return RunReport(
        command,
        str(args.query),
        data_dirs,
        semantics,
        [{"data": run["data"], **run["payload"]} for run in runs],
        timings=timings,
    )


def _dump_model(command: str, args, semantics: str, options: dict):
    q = load_query(args.query)
    inst = load_instance(args.data[0], semantics, query=q)
    if command == "resilience":
        model = build_resilience_model(q, inst, semantics)
    elif command == "responsibility":
        model = build_responsibility_model(q, inst, options["target"], semantics)
    else:
        plans = enumerate_plans(q)
        if options["prune"]:
            plans = prune_dominated_plans(q, plans)
        model = build_minfac_model(q, provenance_dnf(enumerate_witnesses(q, inst)), plans)
    Path(args.dump_model).write_text(to_lp_format(model), encoding="utf-8")
    logger.info("Wrote %s model to %s", command, args.dump_model)


def _value_text(payload: dict) -> str:
    value = payload.get("value")
    return "undefined" if value is None else value["decimal"]


def cmd_resilience(args) -> RunReport:
    report = _run("resilience", args, {"mode": args.mode})
    if isinstance(report.result, dict):
        report.summary = f"resilience = {_value_text(report.result)}"
    return report


def cmd_responsibility(args) -> RunReport:
    report = _run("responsibility", args, {"mode": args.mode, "target": args.target})
    if isinstance(report.result, dict):
        report.summary = (
            f"responsibility of {args.target} = {report.result['responsibility']['decimal']} "
            f"({report.result['status']})"
        )
    return report


def cmd_factorize(args) -> RunReport:
    report = _run(
        "factorize", args, {"emit_expr": args.emit_expr, "prune": not args.all_plans}
    )
    if isinstance(report.result, dict):
        report.summary = f"minimal factorization length = {report.result['length']}"
    return report


def cmd_classify(args) -> RunReport:
    q = load_query(args.query)
    classification, ms = timed(predict_complexity)(q)
    payload = classification_to_dict(classification)
    report = RunReport("classify", str(args.query), None, None, payload, timings={"solve_ms": ms})
    report.summary = ", ".join(
        f"{problem} {p['complexity']}" for problem, p in payload["predictions"].items()
    )
    return report


def cmd_oracle(args) -> RunReport:
    options = {"target": getattr(args, "target", None), "length": getattr(args, "length", None)}
    report = _run(f"oracle-{args.problem}", args, options)
    if isinstance(report.result, dict):
        shown = report.result.get("length", None)
        report.summary = f"oracle {args.problem} = " + (
            str(shown) if shown is not None else _value_text(report.result)
        )
    return report


def cmd_gen(args) -> RunReport:
    q = load_query(args.query)
    semantics = _semantics(args)
    inst, ms = timed(random_instance)(q, args.tuples, args.domain, args.seed, semantics)
    save_instance(inst, args.out)
    payload = {
        "out": str(args.out),
        "seed": args.seed,
        "relations": {name: len(rows) for name, rows in inst.relations.items()},
    }
    report = RunReport("gen", str(args.query), str(args.out), semantics, payload, timings={"solve_ms": ms})
    report.summary = f"wrote {len(inst)} tuples to {args.out}"
    return report


def _add_common(parser: argparse.ArgumentParser, data: bool = True, model: bool = True):
    parser.add_argument("-q", "--query", required=True, type=Path, help="query file (.dl)")
    if data:
        parser.add_argument(
            "-d", "--data", required=True, nargs="+", type=Path, help="data directory (CSV files)"
        )
        parser.add_argument("--bag", action="store_true", help="use bag semantics")
        parser.add_argument(
            "--jobs", type=int, default=1, help="worker processes for several data directories"
        )
        if model:
            parser.add_argument("--dump-model", type=Path, help="write the model in LP format")
    parser.add_argument("--json", type=Path, help="write the JSON report here instead of stdout")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logging"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdmkit",
        description="Resilience, causal responsibility and minimal factorization of "
        "conjunctive query answers.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("resilience", help="minimum deletions that make the query false")
    _add_common(p)
    p.add_argument("--mode", choices=("lp", "ilp", "auto"), default="auto")
    p.set_defaults(handler=cmd_resilience)

    p = commands.add_parser("responsibility", help="causal responsibility of one tuple")
    _add_common(p)
    p.add_argument("-t", "--target", required=True, help="tuple id, e.g. Oscar:1")
    p.add_argument("--mode", choices=("milp", "ilp"), default="milp")
    p.set_defaults(handler=cmd_responsibility)

    p = commands.add_parser("factorize", help="minimal factorization of the provenance")
    _add_common(p)
    p.add_argument("--emit-expr", action="store_true", help="include the factorized expression")
    p.add_argument("--all-plans", action="store_true", help="do not prune dominated plans")
    p.set_defaults(handler=cmd_factorize)

    p = commands.add_parser("classify", help="predict the complexity of each problem")
    _add_common(p, data=False)
    p.set_defaults(handler=cmd_classify)

    p = commands.add_parser("oracle", help="brute-force reference values")
    problems = p.add_subparsers(dest="problem", required=True)
    o = problems.add_parser("resilience")
    _add_common(o, model=False)
    o = problems.add_parser("responsibility")
    _add_common(o, model=False)
    o.add_argument("-t", "--target", required=True)
    o = problems.add_parser("factorize")
    _add_common(o, model=False)
    o.add_argument("--length", type=int, help="claimed minimal length to check")
    p.set_defaults(handler=cmd_oracle)

    p = commands.add_parser("gen", help="write a seeded random instance")
    _add_common(p, data=False)
    p.add_argument("--tuples", type=int, required=True, help="tuples per relation")
    p.add_argument("--domain", type=int, required=True, help="values per column")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--bag", action="store_true", help="draw multiplicities 1..3")
    p.set_defaults(handler=cmd_gen)
    return parser


def _configure_logging(verbosity: int):
    if verbosity <= 0:
        return
    logging.basicConfig(
        level=logging.DEBUG if verbosity > 1 else logging.INFO,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the ``rdmkit`` console script; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        report = args.handler(args)
    except CommandFailed as error:
        print(f"rdmkit {args.command}: {error}", file=sys.stderr)
        return error.code
    except RDMException as error:
        print(f"rdmkit {args.command}: {type(error).__name__}: {error}", file=sys.stderr)
        return exit_code(error)
    text = report.to_json()
    if args.json:
        Path(args.json).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if report.summary:
        print(report.summary, file=sys.stderr)
    return 0
