"""Command-line driver: run scenario files and verification suites.

Exit codes: 0 success, 1 a verification failed, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable, Mapping, Optional

import numpy as np

from . import config
from .geometry import (
    WHOLE_SPHERE,
    GeometryError,
    Space,
    dual_ball_extreme_points,
    dual_norm,
    facets,
    is_simplexoid_dual,
    is_strictly_convex_dual,
    minimal_face,
    primal_norm,
)
from .lp import LinearProgram, LPFormatError, solve
from .measures import (
    AtomicMeasure,
    MeasureError,
    ProbabilityAtoms,
    VectorMeasure,
    barycenter,
    disintegrate,
    integrate,
    mass,
    pair,
    total_variation,
)
from .ordering import (
    ConvexPL,
    HypothesisError,
    choquet_leq,
    enumerate_minimal,
    is_maximal,
    is_minimal,
    maximalize,
    minimalize,
    mokobodzki_maximal,
    prec_b,
    prec_d_report,
    sublinear_order_test,
    upper_envelope_at,
)
from .suites import SUITES, UnknownSuiteError, verify
from .transfer import (
    DFunction,
    density_h,
    eval_pf,
    hustad,
    is_in_N,
    tilde,
    transfer_K,
    variation_density,
)

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Malformed scenario, unresolved reference or violated hypothesis."""


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    if obj is WHOLE_SPHERE:
        return "whole sphere"
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_json"):
        return _jsonable(obj.to_json())
    return float(obj)  # Fraction and other real numbers


# ---------------------------------------------------------------------------
# scenario loading
# ---------------------------------------------------------------------------


class Scenario:
    """Parsed scenario: one space, named measures and test functions, and a command list."""

    def __init__(self, data: Any):
        if not isinstance(data, Mapping):
            raise InputError("top level: expected a JSON object")
        if data.get("schema") != 1:
            raise InputError(f"schema: expected 1, got {data.get('schema')!r}")
        try:
            self.space = Space.from_json(data.get("space"))
        except (GeometryError, ValueError, TypeError) as exc:
            raise InputError(f"space: {exc}") from None
        self.vector_measures = self._section(data, "vector_measures", lambda v: VectorMeasure.from_json(self.space, v))
        self.atomic_measures = self._section(data, "atomic_measures", lambda v: AtomicMeasure.from_json(self.space, v))
        self.dfunctions = self._section(data, "dfunctions", DFunction.from_json)
        cmds = data.get("commands", [])
        if not isinstance(cmds, list) or not all(isinstance(c, Mapping) and "op" in c for c in cmds):
            raise InputError("commands: expected a list of objects with an 'op' field")
        self.commands = cmds

    @staticmethod
    def _section(data: Mapping, key: str, build: Callable) -> dict:
        raw = data.get(key, {})
        if not isinstance(raw, Mapping):
            raise InputError(f"{key}: expected an object of named entries")
        out = {}
        for name, value in raw.items():
            try:
                out[name] = build(value)
            except (MeasureError, GeometryError, ValueError, TypeError) as exc:
                raise InputError(f"{key}.{name}: {exc}") from None
        return out


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read scenario: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return Scenario(data)


# ---------------------------------------------------------------------------
# command execution
# ---------------------------------------------------------------------------


class _Ctx:
    def __init__(self, sc: Scenario, cmd: Mapping, index: int, seed: int, trials: Optional[int]):
        self.sc, self.cmd, self.index, self.seed, self.trials = sc, cmd, index, seed, trials

    def field(self, key: str):
        if key not in self.cmd:
            raise InputError(f"commands[{self.index}]: missing field {key!r}")
        return self.cmd[key]

    def _named(self, key: str, table: dict, kind: str):
        name = self.field(key)
        if not isinstance(name, str) or name not in table:
            raise InputError(f"commands[{self.index}].{key}: unresolved {kind} reference {name!r}")
        return table[name]

    def vector(self, key: str = "measure") -> VectorMeasure:
        return self._named(key, self.sc.vector_measures, "vector measure")

    def atomic(self, key: str = "measure") -> AtomicMeasure:
        return self._named(key, self.sc.atomic_measures, "atomic measure")

    def dfunc(self, key: str = "f") -> DFunction:
        return self._named(key, self.sc.dfunctions, "D-function")

    def point(self, key: str) -> np.ndarray:
        try:
            return self.sc.space.check_vector(self.field(key))
        except (GeometryError, ValueError, TypeError) as exc:
            raise InputError(f"commands[{self.index}].{key}: {exc}") from None

    def probability(self, key: str) -> ProbabilityAtoms:
        try:
            p = ProbabilityAtoms.from_json(self.field(key))
        except (MeasureError, ValueError, TypeError) as exc:
            raise InputError(f"commands[{self.index}].{key}: {exc}") from None
        if p.dim != self.sc.space.dim:
            raise InputError(f"commands[{self.index}].{key}: points must have length {self.sc.space.dim}")
        return p

    def convex(self, key: str = "f") -> ConvexPL:
        try:
            return ConvexPL.from_json(self.field(key))
        except ValueError as exc:
            raise InputError(f"commands[{self.index}].{key}: {exc}") from None


def _op_transfer(c: _Ctx) -> dict:
    mu = c.vector()
    kmu = transfer_K(mu)
    resid = hustad(kmu).max_abs_diff(mu)
    ok = resid <= config.eps_geo() and abs(float(mass(kmu)) - total_variation(mu)) <= config.eps_geo() * max(1.0, total_variation(mu))
    return {"value": kmu, "roundtrip": {"holds": ok, "residual": resid}, "passed": ok}


def _op_choquet_leq(c: _Ctx) -> dict:
    ok, wit = choquet_leq(c.probability("p"), c.probability("q"), c.sc.space)
    return {"value": ok, "witness": wit, "witness_residual": wit.residual() if wit else None}


def _op_maximalize(c: _Ctx) -> dict:
    out, wit = maximalize(c.probability("p"), c.sc.space, return_witness=True)
    return {"value": out, "witness": wit}


def _op_prec_d(c: _Ctx) -> dict:
    rep = prec_d_report(c.atomic("nu1"), c.atomic("nu2"))
    return {"value": rep["holds"], "reason": rep["reason"], "fibers": {t: w for t, w in rep["fibers"].items() if w is not None}}


def _op_enumerate(c: _Ctx) -> dict:
    res = enumerate_minimal(c.vector())
    return {"value": len(res.measures), "measures": res.measures, "truncated": res.truncated}


def _op_solve(c: _Ctx) -> dict:
    raw = c.field("lp")
    try:
        def bounds(key, default):
            v = raw.get(key)
            return None if v is None else [default if b is None else b for b in v]

        lp = LinearProgram(
            raw["c"], A_eq=raw.get("A_eq"), b_eq=raw.get("b_eq"), A_ub=raw.get("A_ub"), b_ub=raw.get("b_ub"),
            lb=bounds("lb", -np.inf), ub=bounds("ub", np.inf), sense=raw.get("sense", "min"),
        )
    except (KeyError, TypeError, AttributeError, LPFormatError) as exc:
        raise InputError(f"commands[{c.index}].lp: {exc}") from None
    out = solve(lp, exact=bool(raw.get("exact", False)))
    return {"value": out.status.value, "x": out.x, "objective": out.value}


def _op_verify(c: _Ctx) -> dict:
    name = c.field("suite")
    trials = c.cmd.get("trials", c.trials)
    try:
        rep = verify(name, seed=int(c.cmd.get("seed", c.seed)), trials=trials, space=c.sc.space)
    except UnknownSuiteError:
        raise InputError(f"commands[{c.index}].suite: unknown suite {name!r}") from None
    return {"value": rep["status"], "report": rep, "passed": rep["status"] != "fail", "anchor": rep["anchor"]}


def _op_facets(c: _Ctx) -> dict:
    if not sp(c).is_polytope:
        raise InputError(f"commands[{c.index}]: facets need a polytope ball")
    return {"value": [{"normal": a, "offset": b} for a, b in facets(sp(c).ball, sp(c).dim)]}


def _pf(c: _Ctx) -> dict:
    return {"value": eval_pf(c.dfunc(), c.vector("mu"))}


def _pair(c: _Ctx) -> dict:
    f = c.field("f")
    if not isinstance(f, Mapping):
        raise InputError(f"commands[{c.index}].f: expected an object mapping labels to vectors")
    return {"value": pair(c.vector(), f)}


sp = lambda c: c.sc.space  # noqa: E731

OPS: dict[str, tuple[str, Callable[[_Ctx], dict]]] = {
    "primal_norm": ("gauge of the primal unit ball", lambda c: {"value": primal_norm(sp(c), c.point("x"))}),
    "dual_norm": ("dual norm as support function of the primal ball", lambda c: {"value": dual_norm(sp(c), c.point("xstar"))}),
    "dual_ball_extreme_points": ("extreme points of the dual ball", lambda c: {"value": dual_ball_extreme_points(sp(c))}),
    "facets": ("facets of the primal ball", _op_facets),
    "minimal_face": ("smallest face of the dual ball containing a sphere point", lambda c: {"value": _face_json(minimal_face(sp(c), c.point("xstar")))}),
    "is_strictly_convex_dual": ("every dual sphere point is extreme", lambda c: {"value": is_strictly_convex_dual(sp(c))}),
    "is_simplexoid_dual": ("every proper face of the dual ball is a simplex", lambda c: {"value": is_simplexoid_dual(sp(c))}),
    "total_variation": ("total variation norm of a vector measure", lambda c: {"value": total_variation(c.vector())}),
    "pair": ("pairing of a vector measure with a primal-valued function", _pair),
    "mass": ("total mass of a positive measure", lambda c: {"value": mass(c.atomic())}),
    "integrate": ("integral of a D-function against an atomic measure", lambda c: {"value": integrate(c.atomic(), c.dfunc())}),
    "disintegrate": ("disintegration into base measure and fiber probabilities", lambda c: {"value": _kernel_json(disintegrate(c.atomic()))}),
    "barycenter": ("barycenter of a probability", lambda c: {"value": barycenter(c.probability("p"))}),
    "hustad": ("Hustad image of an atomic measure", lambda c: {"value": hustad(c.atomic())}),
    "density_h": ("weak* density of the Hustad image", lambda c: {"value": dict(density_h(c.atomic()).values)}),
    "variation_density": ("density of the variation of the Hustad image", lambda c: {"value": variation_density(c.atomic())}),
    "tilde": ("sphere normalisation of the fiber barycenters", lambda c: {"value": tilde(c.atomic())}),
    "transfer": ("canonical transfer operator K mu with Hustad roundtrip", _op_transfer),
    "is_in_N": ("membership in N(mu): positive, represents mu, minimal norm", lambda c: {"value": is_in_N(c.atomic("nu"), c.vector("mu"))}),
    "eval_pf": ("p_f(mu) computed through K mu", _pf),
    "choquet_leq": ("Choquet order decided by the dilation LP", _op_choquet_leq),
    "is_maximal": ("maximal probabilities are carried by extreme points", lambda c: {"value": is_maximal(c.probability("p"), sp(c))}),
    "upper_envelope_at": ("upper envelope of a convex function", lambda c: {"value": upper_envelope_at(c.convex(), c.point("xstar"), sp(c))}),
    "mokobodzki_maximal": ("Mokobodzki maximality test", lambda c: {"value": mokobodzki_maximal(c.probability("p"), sp(c), samples=int(c.cmd.get("samples", 8)), rng=np.random.default_rng(c.seed))}),
    "maximalize": ("maximal dilation by extreme-point decomposition", _op_maximalize),
    "precD": ("<_D on N(mu) is the reversed fiberwise Choquet order", _op_prec_d),
    "is_minimal": ("<_D-minimal iff every fiber is maximal", lambda c: {"value": is_minimal(c.atomic("nu"), c.vector("mu"))}),
    "minimalize": ("minimal measure below nu by maximalizing fibers", lambda c: {"value": minimalize(c.atomic("nu"), c.vector("mu"))}),
    "enumerate_minimal": ("all <_D-minimal measures in N(mu)", _op_enumerate),
    "sublinear_order_test": ("sublinear domination with sphere barycenter", lambda c: {"value": sublinear_order_test(c.probability("p"), c.probability("q"), sp(c), samples=int(c.cmd.get("samples", 200)), rng=np.random.default_rng(c.seed))}),
    "precB": ("the sublinear-functional order collapses to equality", lambda c: {"value": prec_b(c.vector("mu1"), c.vector("mu2"))}),
    "solve": ("two-phase simplex with Bland's rule", _op_solve),
    "verify": ("verification suite", _op_verify),
}


def _face_json(face) -> dict:
    return {"vertices": face.vertices, "dim": face.dim, "is_simplex": face.is_simplex}


def _kernel_json(kern) -> dict:
    return {t: {"sigma": kern.sigma[t], "kernel": kern.kernels[t]} for t in kern.labels}


def _values_equal(got: Any, want: Any, tol: float) -> bool:
    if isinstance(want, bool) or isinstance(got, bool):
        return got is want or got == want
    if isinstance(want, (int, float)) and isinstance(got, (int, float)):
        return abs(got - want) <= tol * max(1.0, abs(want))
    if isinstance(want, list) and isinstance(got, list) and len(want) == len(got):
        return all(_values_equal(g, w, tol) for g, w in zip(got, want))
    return got == want


def execute(sc: Scenario, seed: int = 0, trials: Optional[int] = None) -> tuple[list[dict], int]:
    """Run all commands; returns the report entries and the exit code."""
    entries, code = [], EXIT_OK
    for i, cmd in enumerate(sc.commands):
        op = cmd["op"]
        entry: dict[str, Any] = {"index": i, "op": op}
        if op not in OPS:
            entry.update(status="error", error=f"commands[{i}].op: unknown operation {op!r}", anchor="")
            entries.append(entry)
            code = EXIT_INPUT
            continue
        anchor, fn = OPS[op]
        entry["anchor"] = anchor
        try:
            out = fn(_Ctx(sc, cmd, i, seed, trials))
        except (InputError, HypothesisError, MeasureError, GeometryError, LPFormatError, ValueError) as exc:
            entry.update(status="error", error=str(exc))
            entries.append(entry)
            code = EXIT_INPUT
            continue
        passed = out.pop("passed", True)
        entry["anchor"] = out.pop("anchor", anchor)
        entry.update(_jsonable(out))
        if "expect" in cmd:
            entry["expect"] = cmd["expect"]
            passed = passed and _values_equal(entry["value"], cmd["expect"], float(cmd.get("tol", 1e-9)))
        entry["status"] = "ok" if passed else "fail"
        if not passed and code == EXIT_OK:
            code = EXIT_FAILED
        entries.append(entry)
    return entries, code


# ---------------------------------------------------------------------------
# text rendering
# ---------------------------------------------------------------------------


def _short(v: Any, limit: int = 160) -> str:
    s = json.dumps(v, sort_keys=True)
    return s if len(s) <= limit else s[: limit - 3] + "..."


def render_suite(rep: dict) -> list[str]:
    lines = [
        f"[{rep['status'].upper()}] {rep['suite']}: {rep['anchor']}",
        f"  trials={rep['trials']} max_violation={rep['max_violation']:.3e} tolerance={rep['tolerance']:.1e}",
    ]
    for k, v in rep["counts"].items():
        lines.append(f"  {k}: {_short(v)}")
    lines += [f"  note: {n}" for n in rep["notes"]]
    for w in rep["witnesses"]:
        lines.append(f"  witness: {_short(w, 400)}")
    return lines


def render_entries(entries: list[dict]) -> list[str]:
    lines = []
    for e in entries:
        head = f"#{e['index']} {e['op']} [{e['status']}]"
        if e["status"] == "error":
            lines.append(f"{head} {e['error']}")
            continue
        if e["op"] == "verify":
            lines.append(head)
            lines += ["  " + s for s in render_suite(e["report"])]
            continue
        lines.append(f"{head} {e['anchor']}")
        lines.append(f"  value: {_short(e['value'], 400)}")
        for k in ("roundtrip", "reason", "truncated", "objective", "witness_residual", "expect"):
            if k in e:
                lines.append(f"  {k}: {_short(e[k])}")
    return lines


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _write_json(path: Optional[str], payload: dict) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(_jsonable(payload), fh, sort_keys=True, indent=2)
            fh.write("\n")


def _cmd_run(args) -> int:
    try:
        sc = load_scenario(args.scenario)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    entries, code = execute(sc, seed=args.seed, trials=args.trials)
    for line in render_entries(entries):
        print(line)
    print(f"exit code {code}")
    _write_json(args.json, {"schema": 1, "seed": args.seed, "tolerance": config.eps_geo(), "results": entries, "exit_code": code})
    return code


def _cmd_verify(args) -> int:
    if args.suite not in SUITES:
        print(f"input error: unknown suite {args.suite!r}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_INPUT
    space = None
    if args.space:
        try:
            with open(args.space, encoding="utf-8") as fh:
                space = Space.from_json(json.load(fh))
        except (OSError, json.JSONDecodeError, GeometryError, ValueError, TypeError) as exc:
            print(f"input error: space file: {exc}", file=sys.stderr)
            return EXIT_INPUT
    rep = verify(args.suite, seed=args.seed, trials=args.trials, space=space)
    for line in render_suite(rep):
        print(line)
    code = EXIT_FAILED if rep["status"] == "fail" else EXIT_OK
    _write_json(args.json, {"schema": 1, "seed": args.seed, "tolerance": config.eps_geo(), "report": rep, "exit_code": code})
    return code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="also write a JSON report to PATH")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--trials", type=int, default=None, help="trial count for verification suites")
    common.add_argument("--tol", type=float, default=None, help="geometric tolerance (default 1e-9)")
    common.add_argument("--cap", type=int, default=None, help="enumeration cap for minimal measures")
    parser = argparse.ArgumentParser(prog="vchoquet", description="Choquet-order tools for vector measures.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="execute a scenario file")
    run.add_argument("scenario")
    ver = sub.add_parser("verify", parents=[common], help="run a verification suite")
    ver.add_argument("suite", help=", ".join(SUITES))
    ver.add_argument("--space", metavar="PATH", help="JSON space to run the suite on")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.trials is not None and args.trials < 0:
        print("input error: --trials must be nonnegative", file=sys.stderr)
        return EXIT_INPUT
    try:
        with config.tolerance(eps=args.tol, cap=args.cap):
            return _cmd_run(args) if args.command == "run" else _cmd_verify(args)
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
