"""Command-line front end: JSON job files in, deterministic JSON or text reports out.

Job files store every integer as a decimal string.  A job looks like::

    {"schema_version": "1",
     "fan": {"rays": [["1", "0"], ["0", "1"], ["-1", "0"], ["0", "-1"]],
             "cones": [["0", "1"], ["1", "2"], ["2", "3"], ["3", "0"]]},
     "lattice_map": [["2", "0"], ["0", "3"]],
     "options": {"strategy": "exhaustive", "branch_cap": "256"}}

Entropy jobs may instead give ``matrix`` and optionally ``cone_rays`` (a ray list
or the string "irrational").
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

import jsonschema

from toridyn.certificates import DENSE, UNKNOWN, density_certificate, fibration_obstruction, propagate_difficulty
from toridyn.dynamics import analyze
from toridyn.entropy import (
    IRRATIONAL,
    ConePreservingAuto,
    EntropyCrossCheckError,
    auto_from_fan_symmetry,
    dx_membership_data,
    positive_entropy,
)
from toridyn.errors import BranchCapExceeded, InputError, ToridynError
from toridyn.geometry.algebraic import AlgebraicNumber
from toridyn.geometry.cones import Fan
from toridyn.mmp import DEFAULT_BRANCH_CAP, MMPTrace, PrimordialDegrees, primordial_degrees, run_mmp
from toridyn.toric import ToricVariety, build_variety, canonical_class, pullback, validate_morphism

SCHEMA_VERSION = "1"
COMMANDS = ("analyze", "mmp", "preper", "difficulty", "entropy")

_INT = {"type": "string", "pattern": "^-?[0-9]+$"}
_NAT = {"type": "string", "pattern": "^[0-9]+$"}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _INT}}

JOB_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "fan": {
            "type": "object",
            "additionalProperties": False,
            "required": ["rays", "cones"],
            "properties": {
                "rank": _NAT,
                "rays": _MATRIX,
                "cones": {"type": "array", "items": {"type": "array", "items": _NAT}},
            },
        },
        "lattice_map": _MATRIX,
        "matrix": _MATRIX,
        "cone_rays": {"oneOf": [_MATRIX, {"const": IRRATIONAL}]},
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "strategy": {"enum": ["exhaustive", "first_ray"]},
                "branch_cap": _NAT,
                "difficulty": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "base": {"oneOf": [_NAT, {"const": UNKNOWN}]},
                        "relative": {
                            "type": "object",
                            "propertyNames": {"pattern": "^[0-9]+$"},
                            "additionalProperties": _NAT,
                        },
                    },
                },
                "d2_bound": _NAT,
            },
        },
    },
}


# --- job parsing ----------------------------------------------------------------------


def load_job(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read job file: {exc}") from None
    try:
        job = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"job file is not valid JSON: {exc}") from None
    validate_job(job)
    return job


def validate_job(job: Any) -> None:
    try:
        jsonschema.validate(job, JOB_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"job schema violation at {where}: {exc.message}") from None


def _ints(rows) -> tuple:
    return tuple(tuple(int(x) for x in row) for row in rows)


def parse_fan(data: dict) -> Fan:
    rays = _ints(data["rays"])
    if "rank" in data:
        rank_ = int(data["rank"])
    elif rays:
        rank_ = len(rays[0])
    else:
        raise InputError("a fan without rays needs an explicit rank")
    return Fan.from_data(rank_, rays, [[int(i) for i in c] for c in data["cones"]])


def _require(job: dict, key: str, command: str):
    if key not in job:
        raise InputError(f"{command} job needs '{key}'")
    return job[key]


def _variety_and_map(job: dict, command: str):
    x = build_variety(parse_fan(_require(job, "fan", command)))
    rows = _ints(_require(job, "lattice_map", command))
    f = validate_morphism(rows, x, x, require_surjective=True)
    return x, f


def _options(job: dict, args) -> dict:
    opts = dict(job.get("options", {}))
    strategy = args.strategy or opts.get("strategy", "exhaustive")
    cap = args.branch_cap if args.branch_cap is not None else int(opts.get("branch_cap", DEFAULT_BRANCH_CAP))
    if cap < 1:
        raise InputError("branch cap must be positive")
    return {"strategy": strategy, "branch_cap": cap, "difficulty": opts.get("difficulty"),
            "d2_bound": int(opts.get("d2_bound", 1))}


# --- serialization --------------------------------------------------------------------


def _num(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _vec(v) -> list:
    return [_num(x) for x in v]


def _mat(m) -> list:
    return [_vec(row) for row in m]


def algebraic_json(a: Optional[AlgebraicNumber]):
    if a is None:
        return None
    lo, hi = a.isolating_interval
    return {
        "minimal_polynomial": str(a.minimal_polynomial),
        "coefficients": _vec(a.minimal_polynomial.coefficients),
        "interval": [_num(lo), _num(hi)],
        "approx": a.approx(),
    }


def fan_json(fan: Fan) -> dict:
    return {"rank": str(fan.rank), "rays": _mat(fan.rays), "cones": [[str(i) for i in c] for c in fan.cones]}


def variety_json(x: ToricVariety) -> dict:
    return {
        "fan": fan_json(x.fan),
        "class_rank": str(x.class_rank),
        "torsion": _vec(x.torsion),
        "canonical_class": _vec(canonical_class(x).vector),
        "mori_generators": _mat(x.mori_generators),
        "nef_rays": _mat(x.nef_rays),
    }


def trace_json(trace: MMPTrace) -> dict:
    steps = []
    for s in trace.steps:
        steps.append({
            "kind": s.kind,
            "curve_class": _vec(s.ray.curve_class),
            "relation": _vec(s.ray.relation),
            "source_dim": str(s.source_dim),
            "result_dim": str(s.result_dim),
            "iterate_exponent": str(s.iterate_exponent),
            "descended_map": _mat(s.descended_map.lattice_map.matrix),
            "result_fan": fan_json(s.result.fan),
        })
    return {
        "steps": steps,
        "endpoint": trace.endpoint_note,
        "endpoint_dim": str(trace.endpoint.dim),
        "tractable": trace.tractable,
        "standard": trace.standard,
        "per_step_degrees": [{"dim": str(d), "lambda1": algebraic_json(lam)} for d, lam in trace.per_step_degrees],
    }


def primordial_json(p: PrimordialDegrees) -> dict:
    return {"under": algebraic_json(p.under), "over": algebraic_json(p.over), "infinite": p.infinite}


def _entropy_json(report) -> dict:
    return {
        "lambda1": algebraic_json(report.lambda1),
        "positive_entropy": report.positive_entropy,
        "infinite_order_in_action": report.infinite_order_in_action,
        "d1": None if report.d1 is None else str(report.d1),
        "lin_diagonal": None if report.lin_diagonal is None else [algebraic_json(a) for a in report.lin_diagonal],
        "note": report.note,
    }


# --- commands -----------------------------------------------------------------------------


def cmd_analyze(job: dict, opts: dict) -> dict:
    x, f = _variety_and_map(job, "analyze")
    rep = analyze(f)
    pol = rep.polarization
    return {
        "variety": variety_json(x),
        "pullback": _mat(pullback(f).matrix),
        "lambda1": algebraic_json(rep.lambda1),
        "int_amplified": rep.is_int_amplified,
        "polarized": pol is not None,
        "polarization": None if pol is None else {"q": _num(pol.q), "witness": _vec(pol.witness)},
        "amplified": rep.is_amplified,
        "amplified_witness": None if rep.amplified_witness is None else _vec(rep.amplified_witness),
        "amplified_obstruction": None if rep.amplified_obstruction is None else _vec(rep.amplified_obstruction),
        "det_pullback": _num(rep.det_pullback),
    }


def _traces(x, f, opts):
    return run_mmp(x, f, strategy=opts["strategy"], branch_cap=opts["branch_cap"])


def cmd_mmp(job: dict, opts: dict) -> dict:
    x, f = _variety_and_map(job, "mmp")
    traces = _traces(x, f, opts)
    return {
        "traces": [trace_json(t) for t in traces],
        "primordial": primordial_json(primordial_degrees(x, f, traces)),
    }


def cmd_preper(job: dict, opts: dict) -> dict:
    x, f = _variety_and_map(job, "preper")
    certs = []
    for t in _traces(x, f, opts):
        c = density_certificate(t)
        certs.append({
            "verdict": c.verdict,
            "trace": trace_json(t),
            "per_fibering_evidence": [
                {"step": str(i), "kind": e.kind, "q": None if e.q is None else _num(e.q),
                 "iterate": str(e.iterate), "diagnostic": e.diagnostic}
                for i, e in c.per_fibering_evidence
            ],
            "fibration_obstruction": fibration_obstruction(t),
        })
    verdict = DENSE if any(c["verdict"] == DENSE for c in certs) else UNKNOWN
    return {"verdict": verdict, "certificates": certs}


def cmd_difficulty(job: dict, opts: dict) -> dict:
    ann = opts["difficulty"]
    if not ann or "base" not in ann:
        raise InputError("difficulty job needs options.difficulty.base")
    base = None if ann["base"] == UNKNOWN else int(ann["base"])
    relative = {int(k): int(v) for k, v in ann.get("relative", {}).items()}
    x, f = _variety_and_map(job, "difficulty")
    bounds = []
    for t in _traces(x, f, opts):
        b = propagate_difficulty(t, base, relative)
        bounds.append({"value": str(b.value), "provenance": list(b.provenance), "trace": trace_json(t)})
    known = [int(b["value"]) for b in bounds if b["value"] != UNKNOWN]
    return {"bound": str(min(known)) if known else UNKNOWN, "per_trace": bounds}


def cmd_entropy(job: dict, opts: dict) -> dict:
    if "matrix" in job:
        if "fan" in job or "lattice_map" in job:
            raise InputError("entropy job takes either a matrix or a fan with lattice_map, not both")
        cone = job.get("cone_rays")
        auto = ConePreservingAuto(_ints(job["matrix"]), cone if cone == IRRATIONAL else (_ints(cone) if cone else None))
    else:
        x = build_variety(parse_fan(_require(job, "fan", "entropy")))
        auto = auto_from_fan_symmetry(x, _ints(_require(job, "lattice_map", "entropy")))
    out = {"matrix": _mat(auto.matrix), "entropy": _entropy_json(positive_entropy(auto))}
    if auto.rational_cone is not None:
        dx = dx_membership_data([auto], opts["d2_bound"])
        out["dx"] = {"d1": str(dx.d1), "d2_bound": str(dx.d2_bound), "d": str(dx.d), "provenance": list(dx.provenance)}
    return out


HANDLERS = {
    "analyze": cmd_analyze,
    "mmp": cmd_mmp,
    "preper": cmd_preper,
    "difficulty": cmd_difficulty,
    "entropy": cmd_entropy,
}


def run_job(command: str, job: dict, strategy: Optional[str] = None, branch_cap: Optional[int] = None) -> dict:
    """Validate a parsed job and run one command; returns the report dict."""
    validate_job(job)
    opts = _options(job, argparse.Namespace(strategy=strategy, branch_cap=branch_cap))
    return {"command": command, "schema_version": SCHEMA_VERSION, "result": HANDLERS[command](job, opts)}


# --- output -----------------------------------------------------------------------------------


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _text_lines(obj, prefix: str = "") -> list[str]:
    if isinstance(obj, dict):
        if set(obj) >= {"minimal_polynomial", "approx"}:
            return [f"{prefix}: {obj['approx']} (root of {obj['minimal_polynomial']})"]
        out = []
        for k in sorted(obj):
            out += _text_lines(obj[k], f"{prefix}.{k}" if prefix else k)
        return out
    if isinstance(obj, list):
        if all(isinstance(v, str) for v in obj):
            return [f"{prefix}: [{', '.join(obj)}]"]
        if all(isinstance(v, list) and all(isinstance(w, str) for w in v) for v in obj):
            return [f"{prefix}: [{'; '.join(', '.join(v) for v in obj)}]"]
        out = []
        for i, v in enumerate(obj):
            out += _text_lines(v, f"{prefix}[{i}]")
        return out
    if obj is None:
        return [f"{prefix}: none"]
    if isinstance(obj, bool):
        return [f"{prefix}: {'yes' if obj else 'no'}"]
    return [f"{prefix}: {obj}"]


def to_text(report: dict) -> str:
    return "\n".join(_text_lines(report)) + "\n"


def _render(report: dict, fmt: str) -> str:
    return to_json(report) if fmt == "json" else to_text(report)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toridyn", description="Dynamics of toric endomorphisms and cone automorphisms.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--job", required=True, help="JSON job file")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--strategy", choices=("exhaustive", "first_ray"))
    p.add_argument("--branch-cap", type=int)
    p.add_argument("--format", choices=("json", "text"), default="json")
    return p


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = load_job(args.job)
        report = run_job(args.command, job, args.strategy, args.branch_cap)
    except BranchCapExceeded as exc:
        partial = {"command": args.command, "schema_version": SCHEMA_VERSION, "partial": True,
                   "error": str(exc), "result": {"traces": [trace_json(t) for t in exc.partial]}}
        _emit(_render(partial, args.format), args.out)
        print(f"toridyn: {exc}", file=sys.stderr)
        return exc.exit_code
    except EntropyCrossCheckError as exc:
        failed = {"command": args.command, "schema_version": SCHEMA_VERSION,
                  "error": str(exc), "result": {"entropy": _entropy_json(exc.report)}}
        _emit(_render(failed, args.format), args.out)
        print(f"toridyn: {exc}", file=sys.stderr)
        return exc.exit_code
    except ToridynError as exc:
        print(f"toridyn: {exc}", file=sys.stderr)
        return exc.exit_code
    _emit(_render(report, args.format), args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
