"""Command-line front end: every analysis as a subcommand over JSON input.

Reports are deterministic JSON (sorted keys); big integers and rationals are
emitted as decimal strings.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Any, Iterable, List, Optional

from . import bounds as bnd
from . import dagreduce, markov
from .conditionals import ConditionalSpec, Positivity
from .diophantine import (
    DEFAULT_CAP,
    approx_count_solutions,
    build_equation,
    count_solutions,
    iter_solutions,
)
from .errors import CondFiberError, InvariantError, ResourceLimitError, ValidationError
from .exactnum import format_rational
from .tablespace import (
    approx_count_fiber,
    count_fiber,
    enumerate_fiber,
    fiber_total,
    margin_from_solution,
)

SCHEMA_VERSION = "1"
SUBCOMMANDS = ("solve", "count", "bounds", "moves", "verify", "enumerate", "dag")

EXIT_OK, EXIT_VALIDATION, EXIT_RESOURCE, EXIT_INVARIANT = 0, 2, 3, 4


@dataclass
class RunConfig:
    subcommand: str
    input: Optional[str]
    positivity: Positivity
    cap: int
    output: str
    jobs: int
    approx: bool = False

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ValidationError(f"unknown subcommand {self.subcommand!r}")
        if self.cap < 1:
            raise ValidationError("--cap must be >= 1")
        if self.jobs < 1:
            raise ValidationError("--jobs must be >= 1")


def _load(path: Optional[str]) -> Any:
    try:
        if path is None or path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"input is not valid JSON: {exc}") from None
    except OSError as exc:
        raise ValidationError(f"cannot read input: {exc}") from None


def _spec(data) -> ConditionalSpec:
    if not isinstance(data, dict):
        raise ValidationError("problem JSON must be an object")
    return ConditionalSpec.from_json(data)


def _ints(values: Iterable[int]) -> List[str]:
    return [str(v) for v in values]


def cmd_solve(spec: ConditionalSpec, cfg: RunConfig) -> dict:
    eq = build_equation(spec)
    n = count_solutions(eq, cfg.positivity)
    report = {
        "coefficients": list(eq.coeffs),
        "N": spec.N,
        "feasible": n > 0,
        "count": str(n),
        "approx_count": format_rational(approx_count_solutions(eq)),
    }
    if n <= cfg.cap:
        sols = list(iter_solutions(eq, cfg.positivity))
        report["solutions"] = [list(x) for x in sols]
        report["margins"] = [[list(r) for r in margin_from_solution(spec, x).s] for x in sols]
    else:
        report["solutions"] = None
        report["truncated"] = True
    return report


def cmd_count(spec: ConditionalSpec, cfg: RunConfig) -> dict:
    if cfg.approx:
        return {"mode": "approx", "count": repr(approx_count_fiber(spec))}
    n_margins = count_solutions(build_equation(spec), cfg.positivity)
    per_margin = n_margins <= cfg.cap
    fc = count_fiber(spec, cfg.positivity, per_margin=per_margin, cap=cfg.cap, jobs=cfg.jobs)
    report = {"mode": "exact", "count": str(fc.total), "margin_count": str(n_margins)}
    if per_margin:
        report["per_margin"] = [
            {"margin": [list(r) for r in mg.s], "count": str(c)} for mg, c in fc.per_margin
        ]
    return report


def cmd_bounds(spec: ConditionalSpec, cfg: RunConfig) -> dict:
    out = {
        "relaxation": bnd.relaxation_cell_bounds(spec).to_json(),
        "margin_bounds": bnd.margin_bounds_thm(spec).to_json(),
    }
    try:
        out["decomposition"] = bnd.decomposition_cell_bounds(spec, cfg.positivity).to_json()
        out["decomposition_margins"] = bnd.decomposition_margin_bounds(spec, cfg.positivity).to_json()
    except ValidationError:
        out["decomposition"] = None
        out["decomposition_margins"] = None
    return out


def _moves_json(moves: markov.MoveSet) -> dict:
    return {
        "count": len(moves),
        "counts": moves.counts,
        "moves": [{"tag": mv.tag, "delta": list(mv.delta)} for mv in moves],
    }


def cmd_moves(spec: ConditionalSpec, cfg: RunConfig) -> dict:
    moves = markov.candidate_basis(spec)
    out = _moves_json(moves)
    out["conjectured_size"] = markov.conjectured_basis_size(spec)
    return out


def cmd_verify(spec: ConditionalSpec, cfg: RunConfig) -> dict:
    rep = markov.conjecture_check(spec, cfg.positivity, cfg.cap)
    conn = rep.connectivity
    return {
        "conjectured_size": rep.conjectured_size,
        "candidate_size": rep.candidate_size,
        "candidate_counts": rep.candidate_counts,
        "size_matches": rep.size_matches,
        "full_conditional": rep.full_conditional,
        "fiber_size": str(conn.fiber_size),
        "component_count": conn.component_count,
        "component_sizes": _ints(conn.component_sizes),
        "connected": conn.connected,
    }


def cmd_enumerate(spec: ConditionalSpec, cfg: RunConfig):
    total = fiber_total(spec, cfg.positivity)
    tables = enumerate_fiber(spec, cfg.positivity, cfg.cap)
    return total, ({"table": [[list(c) for c in row] for row in t.s]} for t in tables)


def cmd_dag(data, cfg: RunConfig) -> dict:
    ev = dagreduce.EvidenceSet.from_json(data)
    g = dagreduce.build_dag(ev)
    moral = dagreduce.moralize(g)
    red = dagreduce.reduce_to_margins(ev, cfg.positivity)
    out = {
        "nodes": list(g.nodes),
        "edges": [list(e) for e in g.edges],
        "moral_edges": sorted(sorted(e) for e in moral.edges),
        "wermuth": dagreduce.wermuth_check(g),
        "reducible": red.reducible,
        "margins": [list(m) for m in red.margins],
        "reason": red.reason,
        "common_margin_count": None if red.common_margin_count is None else str(red.common_margin_count),
        "common_margin": None if red.common_margin is None else list(red.common_margin),
    }
    if ev.conditionals:
        cmp = dagreduce.compare_fibers(ev, cfg.cap, positivity=cfg.positivity)
        out["conditional_fiber_size"] = str(cmp.conditional_size)
        out["margins_fiber_size"] = None if cmp.margins_size is None else str(cmp.margins_size)
        out["reference_margin"] = None if cmp.reference_margin is None else list(cmp.reference_margin)
        out["sizes_equal"] = cmp.equal
    return out


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="condfiber", description="Fibers of tables consistent with observed conditionals.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("input", nargs="?", default=None, help="JSON file (default: stdin)")
    p.add_argument("--positivity", choices=[m.value for m in Positivity], default="strict")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="enumeration cap (default 10^7)")
    p.add_argument("--approx", action="store_true", help="approximate count (count only)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for per-margin counting")
    p.add_argument("--output", choices=["json", "jsonl"], default="json")
    return p


def run(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_intermixed_args(argv)
    try:
        cfg = RunConfig(
            subcommand=args.subcommand,
            input=args.input,
            positivity=Positivity.coerce(args.positivity),
            cap=args.cap,
            output=args.output,
            jobs=args.jobs,
            approx=args.approx,
        )
        data = _load(cfg.input)
        header = {"schema_version": SCHEMA_VERSION, "command": cfg.subcommand}
        if cfg.subcommand == "dag":
            if not isinstance(data, dict):
                raise ValidationError("evidence JSON must be an object")
            body = cmd_dag(data, cfg)
        elif cfg.subcommand == "enumerate":
            total, rows = cmd_enumerate(_spec(data), cfg)
            if cfg.output == "jsonl":
                out.write(_dump({**header, "count": str(total)}) + "\n")
                for row in rows:
                    out.write(_dump(row) + "\n")
                return EXIT_OK
            body = {"count": str(total), "tables": [r["table"] for r in rows]}
        else:
            handler = {
                "solve": cmd_solve,
                "count": cmd_count,
                "bounds": cmd_bounds,
                "moves": cmd_moves,
                "verify": cmd_verify,
            }[cfg.subcommand]
            body = handler(_spec(data), cfg)
        out.write(_dump({**header, **body}) + "\n")
        return EXIT_OK
    except ResourceLimitError as exc:
        _error(exc, "resource_limit", getattr(exc, "count", None))
        return EXIT_RESOURCE
    except InvariantError as exc:
        _error(exc, "invariant")
        return EXIT_INVARIANT
    except ValidationError as exc:
        _error(exc, "validation")
        return EXIT_VALIDATION
    except CondFiberError as exc:
        _error(exc, "unsupported")
        return EXIT_VALIDATION


def _error(exc, kind, count=None):
    rec = {"schema_version": SCHEMA_VERSION, "error": kind, "message": str(exc)}
    if count is not None:
        rec["count"] = str(count)
    sys.stderr.write(_dump(rec) + "\n")


def main() -> None:
    sys.exit(run())
