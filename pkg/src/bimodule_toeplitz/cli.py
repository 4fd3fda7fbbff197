"""Command-line entry point: ``bimodule-toeplitz <command> --model ...``.

Exit status 0 means every check passed, 1 that a check failed, 2 that the
input could not be used.  Failures print a JSON error record on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bimodule import validate_bimodule
from .crossed_product import convergence_report, lambda_rep, synthesize_section
from .errors import AxiomViolationError, BimoduleError, NotToeplitzError, StructuralError
from .fileio import (
    explicit_bimodule,
    load_model,
    load_operator,
    load_section,
    resolve_spec,
    save_operator,
    save_section,
    write_json,
)
from .ladder import build_ladder
from .l2 import is_toeplitz
from .models import build_bimodule
from .suite import report_dict, run_suite, timing_dict


class InputError(Exception):
    """Raised for anything the caller has to fix in the invocation."""


def _levels_report(reports) -> dict:
    return {
        str(n): {
            "passed": rep.passed,
            "failed": rep.failed,
            "residuals": {r.name: repr(r.value) for r in rep.items},
        }
        for n, rep in reports.items()
    }


def cmd_validate(args) -> int:
    spec = resolve_spec(args.model)
    X = build_bimodule(spec)
    tol = spec.tol("arithmetic")
    base = validate_bimodule(X, tol)
    if not base.passed:
        write_json({"model": spec.name, "passed": False, "levels": _levels_report({1: base})}, args.out)
        return 1
    ladder = build_ladder(X, spec.window, validate=False, tol=tol)
    reports = ladder.validate(tol)
    ok = all(r.passed for r in reports.values())
    write_json({"model": spec.name, "passed": ok, "levels": _levels_report(reports)}, args.out)
    return 0 if ok else 1


def cmd_power(args) -> int:
    _, _, ladder = load_model(args.model)
    Y = ladder.level(args.n)
    out = {"level": args.n, "dim": Y.dim, "blocks": list(ladder.algebra.block_dims)}
    out.update(explicit_bimodule(Y))
    write_json(out, args.out)
    return 0


def cmd_toeplitz_check(args) -> int:
    _, _, ladder = load_model(_need(args, "model"))
    M = load_operator(_need(args, "operator"), ladder)
    res = is_toeplitz(M, args.tol)
    write_json(
        {
            "is_toeplitz": res.is_toeplitz,
            "tol": args.tol,
            "max_residual": repr(res.max_residual),
            "worst_index": res.worst_index,
            "offending_index": res.offending_index,
            "residuals": [{"i": i, "j": j, "residual": repr(v)} for (i, j), v in sorted(res.residuals.items())],
        },
        args.out,
    )
    return 0 if res.is_toeplitz else 1


def cmd_lambda(args) -> int:
    model = load_model(_need(args, "model"))
    f = load_section(_need(args, "section"), model.ladder)
    save_operator(lambda_rep(f, model.spec.window, model.ladder), args.out)
    return 0


def cmd_synthesize(args) -> int:
    model = load_model(_need(args, "model"))
    ladder = model.ladder
    M = load_operator(_need(args, "operator"), ladder)
    radius = args.radius if args.radius is not None else 2 * M.radius
    f, rep = synthesize_section(M, radius, ladder, tol=model.spec.tol("toeplitz"), strict=False)
    save_section(f, args.out)
    probes = [(v, j) for j in range(-M.radius, M.radius + 1) for v in ladder.level(j).basis()]
    rows = convergence_report(M, f, probes)
    record = {
        "consistent": rep.consistent,
        "radius": radius,
        "max_spread": repr(rep.max_spread),
        "worst_diagonal": rep.worst_diagonal,
        "spreads": {str(k): repr(v) for k, v in sorted(rep.spreads.items())},
        "seminorms": [
            {"j": r.j, "basis_index": idx, "seminorm": repr(r.seminorm)}
            for idx, r in _indexed(rows)
        ],
        "max_seminorm": repr(max(r.seminorm for r in rows)),
    }
    text = json.dumps(record, indent=1, sort_keys=True)
    if args.out is None or args.out == "-":
        print(text, file=sys.stderr)
    else:
        Path(_sidecar(args.out, "synthesis")).write_text(text + "\n")
    return 0 if rep.consistent else 1


def _indexed(rows):
    seen: dict[int, int] = {}
    for r in rows:
        idx = seen.get(r.j, 0)
        seen[r.j] = idx + 1
        yield idx, r


def _sidecar(path: str, tag: str) -> str:
    p = Path(path)
    return str(p.with_name(f"{p.stem}.{tag}.json"))


def cmd_report(args) -> int:
    model = load_model(_need(args, "model"))
    results = run_suite(
        model.ladder,
        args.seed,
        window=model.spec.window,
        tol=model.spec.tol("arithmetic"),
        toeplitz_tol=model.spec.tol("toeplitz"),
    )
    report = report_dict(model.spec.name, args.seed, model.spec.window, results)
    write_json(report, args.out)
    timing = json.dumps(timing_dict(results), indent=1, sort_keys=True)
    if args.out is None or args.out == "-":
        print(timing, file=sys.stderr)
    else:
        Path(_sidecar(args.out, "timing")).write_text(timing + "\n")
    return 0 if report["passed"] else 1


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise InputError(f"--{name} is required for {args.command}")
    return value


COMMANDS = {
    "validate": cmd_validate,
    "power": cmd_power,
    "toeplitz-check": cmd_toeplitz_check,
    "lambda": cmd_lambda,
    "synthesize": cmd_synthesize,
    "report": cmd_report,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bimodule-toeplitz", description="Toeplitz matrices over imprimitivity bimodules")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--model", required=True, help="model.json path or builtin name")
    p.add_argument("--operator")
    p.add_argument("--section")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--radius", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file; stdout when omitted")
    return p


def _error_record(exc: BaseException, status: int) -> dict:
    rec = {"error": type(exc).__name__, "message": str(exc), "exit_status": status}
    if isinstance(exc, AxiomViolationError):
        rec["failed"] = exc.failed
    if isinstance(exc, NotToeplitzError):
        rec["max_spread"] = repr(exc.report.max_spread)
    return rec


INPUT_ERRORS = (
    InputError,
    OSError,
    json.JSONDecodeError,
    KeyError,
    TypeError,
    StructuralError,
    AxiomViolationError,
    IndexError,
    ValueError,
)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except INPUT_ERRORS as exc:
        record = _error_record(exc, 2)
    except BimoduleError as exc:
        record = _error_record(exc, 1)
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    return record["exit_status"]


if __name__ == "__main__":
    sys.exit(main())
