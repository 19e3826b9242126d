"""Command-line front end.

Subcommands: ``validate``, ``kemeny``, ``complete``, ``feasible``.  States
are printed 1-based.  Exit codes: 0 success, 2 parse error, 3 validation
error, 4 infeasible / structural error, 5 budget exceeded, 6 numerical
breakdown.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import matrix_io
from .diagonal import solve_diagonal
from .errors import (
    Infeasible,
    KemenyError,
    NumericalError,
    ShapeMismatch,
    ValidationError,
)
from .markov import (
    VALIDATION_TOL,
    essential_structure,
    kemeny_eigen,
    kemeny_grounded,
    kemeny_trace,
    validate_stochastic,
)
from .oracle import DEFAULT_BUDGET, sparse_enumeration_min
from .partial import (
    PartialStochasticMatrix,
    feasible_single_class,
    find_violating_subsets,
    pattern_count,
    validate_partial,
)
from .row import row_spec_from_row, solve_row
from .solution import CompletionSolution

VERIFY_TOL = 1e-9
VERIFY_ORACLE_MAX_N = 6
SUBSET_MAX_N = 12


def _is_free(cell) -> bool:
    return cell is None


def _states(ix) -> list[int]:
    return [int(j) + 1 for j in sorted(ix)]


def _matrix_rows(a) -> list[list[float]]:
    return [[float(v) for v in row] for row in np.asarray(a)]


def _emit(report: dict, as_json: bool, out=None) -> None:
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(report) + "\n")
        return
    for key, val in report["outputs"].items():
        if key == "witness":
            out.write("witness:\n" + matrix_io.dumps_text(val))
        elif isinstance(val, float):
            out.write(f"{key}: {val!r}\n")
        else:
            out.write(f"{key}: {val}\n")
    for key, val in report["diagnostics"].items():
        out.write(f"# {key}: {val}\n")


# -- shape detection ------------------------------------------------------


def diagonal_shape(P: PartialStochasticMatrix) -> Optional[np.ndarray]:
    """Diagonal vector (0 where unspecified) if every specified cell is on
    the diagonal, rows fixed to an absorbing state excepted."""
    n = P.n
    d = np.zeros(n)
    for j in range(n):
        spec = ~P.free[j]
        if spec.all():
            if P.values[j, j] == 1.0:
                d[j] = 1.0
                continue
            return None
        off = spec.copy()
        off[j] = False
        if off.any():
            return None
        if spec[j]:
            d[j] = P.values[j, j]
    return d


def row_shape(P: PartialStochasticMatrix) -> Optional[int]:
    """Index of the single fully specified row when every other cell is free."""
    specified = np.flatnonzero((~P.free).any(axis=1))
    if specified.size != 1:
        return None
    i = int(specified[0])
    return i if not P.free[i].any() else None


def solve_partial(
    P: PartialStochasticMatrix, strategy: str = "auto", budget: int = DEFAULT_BUDGET
) -> CompletionSolution:
    if not feasible_single_class(P):
        raise Infeasible("no completion has a single essential class")
    d = diagonal_shape(P)
    i = row_shape(P)
    if strategy == "auto":
        strategy = "diag" if d is not None else "row" if i is not None else "oracle"
    if strategy == "diag":
        if d is None:
            raise ShapeMismatch("specified cells are not confined to the diagonal")
        return solve_diagonal(d)
    if strategy == "row":
        if i is None:
            raise ShapeMismatch("specified cells do not form a single full row")
        return solve_row(row_spec_from_row(P.values[i], state=i))
    rep = sparse_enumeration_min(P, budget)
    pattern = [[j + 1, k + 1] for j, k in rep.detail["pattern"].assignment]
    return CompletionSolution(
        rep.best_value,
        rep.best_completion,
        "oracle-sparse",
        {
            "note": "oracle-only",
            "pattern": pattern,
            "patterns_examined": rep.patterns_examined,
            "patterns_feasible": rep.patterns_feasible,
        },
    )


# -- subcommands ----------------------------------------------------------


def cmd_validate(args) -> dict:
    grid = matrix_io.load_grid(args.path)
    if grid and all(len(r) == len(grid) for r in grid) and not any(
        _is_free(c) for r in grid for c in r
    ):
        T = validate_stochastic(grid, args.tol)
        st = essential_structure(T)
        outputs = {
            "valid": True,
            "kind": "stochastic",
            "n": T.n,
            "essential_classes": len(st.terminal_sccs),
        }
    else:
        P = validate_partial(grid)
        outputs = {
            "valid": True,
            "kind": "partial",
            "n": P.n,
            "free_cells": int(P.free.sum()),
        }
    return {"inputs": {"path": str(args.path)}, "outputs": outputs, "diagnostics": {}}


def _read_stochastic(path, tol):
    grid = matrix_io.load_grid(path)
    if any(_is_free(c) for r in grid for c in r):
        raise ValidationError("matrix has free cells; use 'complete' for partial matrices")
    return validate_stochastic(grid, tol)


def cmd_kemeny(args) -> dict:
    T = _read_stochastic(args.path, args.tol)
    methods = {"trace": kemeny_trace, "eigen": kemeny_eigen, "grounded": kemeny_grounded}
    chosen = list(methods) if args.method == "all" else [args.method]
    values = {m: methods[m](T) for m in chosen}
    outputs: dict = {"kemeny": values[chosen[0]]}
    diagnostics: dict = {"method": args.method}
    if args.method == "all":
        outputs.update({f"kemeny_{m}": v for m, v in values.items()})
        vals = list(values.values())
        outputs["max_discrepancy"] = max(abs(a - b) for a in vals for b in vals)
    return {
        "inputs": matrix_io.to_json_obj(T),
        "outputs": outputs,
        "diagnostics": diagnostics,
    }


def _verify(P: PartialStochasticMatrix, sol: CompletionSolution, budget: int) -> dict:
    a = sol.witness.entries
    spec = ~P.free
    if np.any(np.abs(a[spec] - P.values[spec]) > 1e-12):
        raise NumericalError("witness does not match the specified entries")
    k = kemeny_trace(sol.witness)
    if abs(k - sol.value) > VERIFY_TOL:
        raise NumericalError(f"witness Kemeny {k!r} differs from reported {sol.value!r}")
    result = {"witness_kemeny": k}
    if P.n <= VERIFY_ORACLE_MAX_N and pattern_count(P) <= budget:
        rep = sparse_enumeration_min(P, budget)
        if abs(rep.best_value - sol.value) > VERIFY_TOL:
            raise NumericalError(
                f"oracle minimum {rep.best_value!r} differs from {sol.value!r}"
            )
        result["oracle_value"] = rep.best_value
    else:
        result["oracle_value"] = "skipped"
    return result


def cmd_complete(args) -> dict:
    P = matrix_io.read_partial(args.path)
    t0 = time.perf_counter()
    sol = solve_partial(P, args.strategy, args.budget)
    outputs = {"m": sol.value, "method": sol.method, "witness": sol.witness.entries}
    diagnostics = {"strategy": args.strategy, "structure": sol.structure}
    if sol.unique is not None:
        diagnostics["unique"] = sol.unique
    if sol.method == "oracle-sparse":
        print("note: no closed form for this shape; oracle result", file=sys.stderr)
    if args.verify:
        diagnostics["verify"] = _verify(P, sol, args.budget)
    diagnostics["seconds"] = time.perf_counter() - t0
    return {"inputs": matrix_io.to_json_obj(P), "outputs": outputs, "diagnostics": diagnostics}


def cmd_feasible(args) -> dict:
    P = matrix_io.read_partial(args.path)
    ok = feasible_single_class(P)
    outputs: dict = {"feasible": ok}
    diagnostics: dict = {}
    if P.n <= SUBSET_MAX_N:
        pair = find_violating_subsets(P, SUBSET_MAX_N)
        diagnostics["subset_check"] = pair is None
        if pair is not None:
            outputs["violating_subset"] = _states(pair[0])
            outputs["disjoint_closed_subset"] = _states(pair[1])
    return {
        "inputs": matrix_io.to_json_obj(P),
        "outputs": outputs,
        "diagnostics": diagnostics,
        "exit": 0 if ok else Infeasible.exit_code,
    }


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return _matrix_rows(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("path", help="matrix file (text or JSON format)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument(
        "--tol", type=float, default=VALIDATION_TOL,
        help="row-sum tolerance for stochastic matrices (default %(default)g)",
    )
    common.add_argument(
        "--budget", type=int, default=DEFAULT_BUDGET,
        help="maximum number of sparse patterns the oracle may scan (default %(default)d)",
    )
    common.add_argument("--seed", type=int, default=0, help="random seed (default %(default)d)")

    parser = argparse.ArgumentParser(
        prog="kemeny",
        description="Kemeny's constant and Kemeny-minimizing stochastic completions.",
        epilog="exit codes: 0 ok, 2 parse, 3 validation, 4 infeasible, 5 budget, 6 numeric",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a (partial) stochastic matrix")
    p = sub.add_parser("kemeny", parents=[common], help="Kemeny's constant of a stochastic matrix")
    p.add_argument("--method", choices=["trace", "eigen", "grounded", "all"], default="trace")
    p = sub.add_parser("complete", parents=[common], help="minimize Kemeny's constant over completions")
    p.add_argument("--strategy", choices=["auto", "diag", "row", "oracle"], default="auto")
    p.add_argument("--verify", action="store_true", help="re-check the witness and, for n <= 6, the oracle")
    sub.add_parser("feasible", parents=[common], help="can some completion have one essential class?")
    return parser


COMMANDS = {
    "validate": cmd_validate,
    "kemeny": cmd_kemeny,
    "complete": cmd_complete,
    "feasible": cmd_feasible,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except KemenyError as exc:
        err = {"type": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        if args.json:
            print(json.dumps({"command": args.command, "error": err}))
        print(f"error: {err['type']}: {exc}", file=sys.stderr)
        return exc.exit_code
    code = report.pop("exit", 0)
    report = {"command": args.command, **_jsonable(report)}
    _emit(report, args.json)
    return code


if __name__ == "__main__":
    sys.exit(main())
