"""Command-line front end.

Every command builds a ``Request`` (command, payload, backend, jet order),
validates the payload, dispatches to the library and prints a JSON report.
Exit codes: 0 success, 2 bad input, 3 mathematical degeneracy, 4 jets too
short even after the retry; ``batch`` exits 1 when any case fails.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .errors import DegeneracyError, InputError, Rank2Error, TruncationExceeded

COMMANDS = ("invariants", "curvatures", "classify", "equiv", "model", "jacobi", "frame", "batch")
BACKENDS = ("exact", "float")
MODES = ("velocity", "wilczynski")

EXIT_OK, EXIT_BATCH_FAIL, EXIT_INPUT, EXIT_DEGENERATE, EXIT_TRUNCATION = 0, 1, 2, 3, 4

# payload keys each command requires / accepts
SCHEMA: Dict[str, Tuple[set, set]] = {
    "invariants": ({"ode"}, set()),
    "curvatures": ({"ode"}, {"mode"}),
    "classify": ({"tuple"}, set()),
    "equiv": ({"tuples"}, set()),
    "model": ({"n", "r"}, {"point"}),
    "jacobi": ({"n", "r"}, {"mode", "point"}),
    "frame": ({"n", "r"}, set()),
}


@dataclass
class Request:
    command: str
    payload: Dict[str, Any] = field(default_factory=dict)
    backend: str = "exact"
    jet_order: Optional[int] = None

    @classmethod
    def from_json(cls, data) -> "Request":
        if not isinstance(data, dict) or "command" not in data:
            raise InputError("a request is an object with a 'command' key")
        req = cls(
            data["command"],
            dict(data.get("payload", {})),
            data.get("backend", "exact"),
            data.get("jet_order"),
        )
        req.validate()
        return req

    def validate(self) -> None:
        if self.command not in SCHEMA:
            raise InputError(f"unknown command {self.command!r}")
        if self.backend not in BACKENDS:
            raise InputError(f"unknown backend {self.backend!r}")
        if self.jet_order is not None and (not isinstance(self.jet_order, int) or self.jet_order < 1):
            raise InputError("jet_order must be a positive integer")
        required, optional = SCHEMA[self.command]
        keys = set(self.payload)
        missing = required - keys
        if missing:
            raise InputError(f"{self.command}: missing {sorted(missing)}")
        extra = keys - required - optional
        if extra:
            raise InputError(f"{self.command}: unexpected {sorted(extra)}")
        p = self.payload
        if "n" in p and (not isinstance(p["n"], int) or isinstance(p["n"], bool)):
            raise InputError("n must be an integer")
        for key in ("r", "tuple", "point"):
            if key in p and not isinstance(p[key], list):
                raise InputError(f"{key} must be a JSON array")
        if "tuples" in p and not (isinstance(p["tuples"], list) and len(p["tuples"]) == 2):
            raise InputError("equiv needs exactly two tuples")
        if "mode" in p and p["mode"] not in MODES:
            raise InputError(f"mode must be one of {MODES}")
        if "ode" in p and not isinstance(p["ode"], dict):
            raise InputError("ode must be a JSON object {m, B, param_tag}")


def _scalars(xs, backend: str) -> list:
    from .exactalg.scalars import convert

    return [convert(x, backend) for x in xs]


# -- command implementations -----------------------------------------------------

def _invariants(req: Request) -> dict:
    from .projcurve import CurveODE, projective_normalize, self_dual_test, wilczynski, wilczynski_forms

    c = CurveODE.from_json(req.payload["ode"], req.backend)
    proj, v = projective_normalize(c)
    W = wilczynski(proj)
    forms = wilczynski_forms(c)
    dual, witness = self_dual_test(proj)
    js = lambda j: [_tj(x) for x in j]
    return {
        "m": c.m,
        "projective_ode": proj.to_json(),
        "projective_parameter": js(v),
        "wilczynski_projective": {str(i): js(W[i]) for i in W.indices()},
        "wilczynski_forms": {str(i): js(forms[i]) for i in forms.indices()},
        "self_dual": dual,
        "odd_witness": witness,
    }


def _curvatures(req: Request) -> dict:
    from .projcurve import (
        CurveODE,
        canonical_parametrization,
        invariant_symplectic_form,
        semi_canonicalize,
        symplectic_curvatures,
    )

    c = CurveODE.from_json(req.payload["ode"], req.backend)
    report: Dict[str, Any] = {"m": c.m}
    if req.payload.get("mode") == "wilczynski":
        c, v, i0, eps = canonical_parametrization(c)
        report.update(i0=i0, epsilon=eps, parameter=[_tj(x) for x in v])
    else:
        c = semi_canonicalize(c)
    form = invariant_symplectic_form(c)
    rho = symplectic_curvatures(c)
    report["symplectic_form"] = [[_tj(x) for x in row] for row in form.matrix]
    report["curvatures"] = [[_tj(x) for x in r] for r in rho.rho]
    report["constant"] = rho.is_constant()
    return report


def _classify(req: Request) -> dict:
    from .classify import moduli_report

    t = _scalars(req.payload["tuple"], req.backend)
    return moduli_report(t, req.backend).to_json()


def _equiv(req: Request) -> dict:
    from .classify import equivalent_tuples

    a, b = (_scalars(t, req.backend) for t in req.payload["tuples"])
    eq = equivalent_tuples(a, b)
    if eq is None:
        return {"equivalent": False}
    return {"equivalent": True, "c": _tj(eq.c), "c_pow": _tj(eq.c_pow), "g": eq.g}


def _model(req: Request) -> dict:
    from .models import build_model, cotangent_lift, default_point, growth_vector, regular_point_test

    spec = build_model(req.payload["n"], req.payload["r"])
    cs = cotangent_lift(spec, q=[0] * spec.n)
    point = req.payload.get("point") or default_point(cs)
    point = _scalars(point, "exact")
    reg = regular_point_test(cs, point)
    return {
        "model": spec.to_json(),
        "growth_vector": growth_vector(spec.X1, spec.X2, point[: spec.n]),
        "cotangent": cs.to_json(),
        "point": [_tj(x) for x in point],
        "regularity": reg.to_json(),
    }


def _jacobi(req: Request) -> dict:
    from .jacobi import curvature_roundtrip

    p = req.payload
    point = _scalars(p["point"], "exact") if p.get("point") else None
    rt = curvature_roundtrip(p["n"], p["r"], p.get("mode", "velocity"), req.backend, req.jet_order, point)
    return rt.to_json()


def _frame(req: Request) -> dict:
    from .jacobi import verify_frame_relations

    if req.backend != "exact":
        raise InputError("frame relations are checked on the exact backend only")
    return verify_frame_relations(req.payload["n"], req.payload["r"], req.jet_order).to_json()


HANDLERS = {
    "invariants": _invariants,
    "curvatures": _curvatures,
    "classify": _classify,
    "equiv": _equiv,
    "model": _model,
    "jacobi": _jacobi,
    "frame": _frame,
}


def _tj(x):
    from .exactalg.scalars import to_json

    return to_json(x)


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, TruncationExceeded):
        return EXIT_TRUNCATION
    if isinstance(exc, DegeneracyError):
        return EXIT_DEGENERATE
    return EXIT_INPUT


def run(req: Request) -> Tuple[int, dict]:
    """Dispatch one validated request; library errors become exit codes."""
    try:
        req.validate()
        return EXIT_OK, HANDLERS[req.command](req)
    except (Rank2Error, ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        return exit_code_for(exc), {"error": type(exc).__name__, "message": str(exc)}


def _run_case(item) -> dict:
    try:
        req = Request.from_json(item)
    except (Rank2Error, ValueError, TypeError) as exc:
        return {"exit_code": EXIT_INPUT, "report": {"error": type(exc).__name__, "message": str(exc)}}
    code, report = run(req)
    return {"command": req.command, "exit_code": code, "report": report}


def batch(cases: list, jobs: int = 1) -> Tuple[int, dict]:
    if not isinstance(cases, list):
        return EXIT_INPUT, {"error": "InputError", "message": "batch file must hold a JSON array"}
    if jobs > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_case, cases))
    else:
        results = [_run_case(c) for c in cases]
    for i, res in enumerate(results):
        res["index"] = i
    failed = sum(1 for r in results if r["exit_code"] != 0)
    summary = {"cases": len(results), "passed": len(results) - failed, "failed": failed}
    return (EXIT_BATCH_FAIL if failed else EXIT_OK), {"summary": summary, "results": results}


# -- argument parsing -------------------------------------------------------------

def _json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON for {what}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rank2dist", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=BACKENDS, default="exact")
    common.add_argument("--jet-order", type=int, default=None)
    out = common.add_mutually_exclusive_group()
    out.add_argument("--json", dest="pretty", action="store_false", help="JSON report (default)")
    out.add_argument("--pretty", dest="pretty", action="store_true", help="indented text report")
    common.add_argument("--timings", action="store_true", help="keep wall-clock timings in the report")
    common.set_defaults(pretty=False)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", parents=[common], help="Wilczynski invariants of a curve ODE")
    p.add_argument("--ode", required=True, help='JSON {"m": .., "B": [[..], ..], "param_tag": ..}')
    p = sub.add_parser("curvatures", parents=[common], help="symplectic curvatures of a self-dual ODE")
    p.add_argument("--ode", required=True)
    p.add_argument("--mode", choices=MODES, default="velocity",
                   help="velocity: keep the parameter; wilczynski: canonical parameter first")
    p = sub.add_parser("classify", parents=[common], help="classify a constant curvature tuple")
    p.add_argument("--tuple", required=True)
    p = sub.add_parser("equiv", parents=[common], help="scaling equivalence of two tuples")
    p.add_argument("--tuple", required=True, action="append", help="give twice")
    for name, text in (("model", "model system statics"), ("jacobi", "Jacobi curve round trip"),
                       ("frame", "canonical frame structure equations")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--r", required=True)
        if name != "frame":
            p.add_argument("--point", default=None, help="JSON array (q, p) of length 2n")
        if name == "jacobi":
            p.add_argument("--mode", choices=MODES, default="velocity")
    p = sub.add_parser("batch", parents=[common], help="run a JSON array of requests")
    p.add_argument("file", nargs="?", default=None)
    p.add_argument("--batch", dest="batch_file", default=None)
    p.add_argument("--jobs", type=int, default=1)
    return ap


def request_from_args(args) -> Request:
    cmd = args.command
    payload: Dict[str, Any] = {}
    if cmd in ("invariants", "curvatures"):
        payload["ode"] = _json_arg(args.ode, "--ode")
        if cmd == "curvatures":
            payload["mode"] = args.mode
    elif cmd == "classify":
        payload["tuple"] = _json_arg(args.tuple, "--tuple")
    elif cmd == "equiv":
        if len(args.tuple) != 2:
            raise InputError("equiv needs --tuple twice")
        payload["tuples"] = [_json_arg(t, "--tuple") for t in args.tuple]
    else:
        payload["n"] = args.n
        payload["r"] = _json_arg(args.r, "--r")
        if getattr(args, "point", None):
            payload["point"] = _json_arg(args.point, "--point")
        if cmd == "jacobi":
            payload["mode"] = args.mode
    req = Request(cmd, payload, args.backend, args.jet_order)
    req.validate()
    return req


def _strip_timings(obj):
    if isinstance(obj, dict):
        return {k: _strip_timings(v) for k, v in obj.items() if k != "timings"}
    if isinstance(obj, list):
        return [_strip_timings(v) for v in obj]
    return obj


def _pretty(obj, indent: int = 0) -> List[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines += _pretty(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            lines.append(f"{pad}- [{i}]")
            lines += _pretty(v, indent + 1)
    else:
        lines.append(f"{pad}{json.dumps(obj)}")
    return lines


def emit(report: dict, pretty: bool, timings: bool, stream=None) -> None:
    stream = stream or sys.stdout
    if not timings:
        report = _strip_timings(report)
    if pretty:
        stream.write("\n".join(_pretty(report)) + "\n")
    else:
        stream.write(json.dumps(report, sort_keys=True) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_INPUT if exc.code else EXIT_OK
    pretty = bool(getattr(args, "pretty", False))
    timings = bool(getattr(args, "timings", False))
    if args.command == "batch":
        path = args.batch_file or args.file
        if path is None:
            emit({"error": "InputError", "message": "batch needs a file"}, pretty, timings)
            return EXIT_INPUT
        try:
            with open(path) as fh:
                cases = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            emit({"error": type(exc).__name__, "message": str(exc)}, pretty, timings)
            return EXIT_INPUT
        code, report = batch(cases, args.jobs)
        emit(report, pretty, timings)
        return code
    try:
        req = request_from_args(args)
    except (Rank2Error, ValueError) as exc:
        emit({"error": type(exc).__name__, "message": str(exc)}, pretty, timings)
        return EXIT_INPUT
    code, report = run(req)
    emit(report, pretty, timings)
    return code


if __name__ == "__main__":
    sys.exit(main())
