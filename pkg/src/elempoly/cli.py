"""Command-line entry point.

Every subcommand produces one envelope ``{status, command, payload,
diagnostics}``. ``--json`` prints it as sorted JSON; otherwise a short
human rendering is printed. The exit code is 0 exactly when the status is
``ok``. Set ``ELEMPOLY_COLOR=0`` to turn off ANSI styling.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import oracle, sgm, theorems
from .elementary import ReductionError, run_reduction
from .parser import ParseError, parse_root_script, parse_term
from .terms import (
    Mode,
    TermError,
    capabilities,
    connectivity,
    dimension,
    flags,
    is_contractible,
    reduced_homology,
    render,
    simple_connectivity,
)

CHECK_KINDS = ("mt1", "mt2", "corollary", "freeh", "dim5", "sgm-r2")


@dataclass
class OutputEnvelope:
    status: str
    command: str
    payload: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)

    def __post_init__(self):
        if self.status not in ("ok", "error"):
            raise ValueError(f"bad status {self.status!r}")
        if self.status == "error" and not self.diagnostics:
            raise ValueError("an error envelope needs at least one diagnostic")

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "command": self.command,
            "payload": self.payload,
            "diagnostics": self.diagnostics,
        }


def _ok(command: str, payload: dict) -> OutputEnvelope:
    return OutputEnvelope("ok", command, payload, [])


def _fail(command: str, diagnostics: list, payload: dict | None = None) -> OutputEnvelope:
    return OutputEnvelope("error", command, payload or {}, diagnostics)


def _diag(exc: Exception) -> dict:
    out = {"kind": type(exc).__name__, "message": getattr(exc, "message", None) or str(exc)}
    span = getattr(exc, "span", None)
    if span is not None:
        out["line"], out["column"] = span.line, span.column
    clause = getattr(exc, "clause", None)
    if clause is not None:
        out["clause"] = clause
    step = getattr(exc, "step_index", None)
    if step is not None:
        out["step"] = step
    return out


# exceptions that describe bad input rather than a bug
_USER_ERRORS = (ParseError, TermError, ReductionError, ValueError, OSError)


def _caps_record(t) -> dict:
    caps = capabilities(t)

    def codims(s):
        return [{"codim": a, "trivial_normal": tr} for a, tr in sorted(s)]

    return {
        "immerse_codims": codims(caps.immerse_codims),
        "embed_codims": codims(caps.embed_codims),
        "immerses_into": min(caps.immerses_into_Rn, default=None),
        "embeds_into": min(caps.embeds_into_Rn, default=None),
    }


def eval_record(text: str) -> dict:
    t = parse_term(text)
    sc, why = simple_connectivity(t)
    f = flags(t)
    rec = {
        "term": render(t),
        "dimension": dimension(t),
        "homology": {str(d): str(g) for d, g in sorted(reduced_homology(t).items())},
        "contractible": is_contractible(t),
        "simply_connected": sc,
        "connectivity": connectivity(t) if sc and not is_contractible(t) else None,
        "connectivity_note": None if sc else why,
        "flags": {
            "manifold": f.is_manifold,
            "closed": f.is_closed,
            "boundary": f.has_boundary,
            "orientable": f.is_orientable,
        },
        "capabilities": _caps_record(t),
    }
    return rec


def _guard(command: str, fn, *args) -> OutputEnvelope:
    try:
        return fn(*args)
    except _USER_ERRORS as exc:
        return _fail(command, [_diag(exc)])


def _eval_one(text: str) -> OutputEnvelope:
    try:
        return _ok("eval", eval_record(text))
    except _USER_ERRORS as exc:
        return _fail("eval", [_diag(exc)])


def _batch(command: str, fn, inputs: list, jobs: int, labels: list | None = None) -> OutputEnvelope:
    if jobs > 1 and len(inputs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(fn, inputs))
    else:
        results = [fn(x) for x in inputs]
    if len(results) == 1:
        return results[0]
    labels = labels or inputs
    payload = {"results": [{"input": x, **r.to_dict()} for x, r in zip(labels, results)]}
    diags = [{"input": x, **d} for x, r in zip(labels, results) for d in r.diagnostics]
    if all(r.ok for r in results):
        return _ok(command, payload)
    return _fail(command, diags, payload)


def cmd_eval(args) -> OutputEnvelope:
    return _batch("eval", _eval_one, args.exprs, args.jobs)


def _read_script(path: str):
    return parse_root_script(Path(path).read_text(encoding="utf-8"))


def cmd_reduce(args) -> OutputEnvelope:
    def run():
        root, steps = _read_script(args.script)
        res = run_reduction(root, steps)
        return _ok(
            "reduce",
            {
                "root": [str(v) for v in root],
                "result": str(res.result),
                "result_fields": res.result.to_dict(),
                "trace": [e.to_dict() for e in res.trace],
                "audit": [e.to_dict() for e in res.steps],
            },
        )

    return _guard("reduce", run)


def _params(args) -> theorems.TheoremParams:
    return theorems.TheoremParams(args.n, args.k, args.a)


def _check_script(kind: str, path: str, args) -> OutputEnvelope:
    command = f"check {kind}"
    mode = Mode(args.mode.upper())
    root, steps = _read_script(path)
    if kind == "corollary":
        params = theorems.TheoremParams(7, 2, args.a)
    else:
        params = _params(args)
    try:
        if kind == "mt1":
            w = theorems.check_main_theorem_1(root, steps, params, mode)
            return _ok(command, {"input": path, "witness": w.to_dict()})
        dec = theorems.decompose_main_theorem_2(run_reduction(root, steps), params, mode)
    except theorems.HypothesisFailure as exc:
        diags = [{"kind": k, "message": d} for k, d in exc.failures]
        return _fail(command, diags, {"input": path})
    except theorems.DecompositionError as exc:
        diags = [{"kind": "piece", "piece": render(t), "message": why} for t, why in exc.failures]
        return _fail(command, diags, {"input": path})
    if kind == "mt2":
        return _ok(command, {"input": path, "decomposition": dec.to_dict()})
    report = theorems.check_main_corollary(dec, mode)
    payload = {"input": path, "decomposition": dec.to_dict(), "report": report.to_dict()}
    if report.ok:
        return _ok(command, payload)
    diags = [
        {"kind": "piece", "piece": render(v.piece.term), "message": r}
        for v in report.verdicts
        for r in v.reasons
    ]
    return _fail(command, diags, payload)


def _check_term(kind: str, text: str, args) -> OutputEnvelope:
    command = f"check {kind}"
    t = parse_term(text)
    if kind == "freeh":
        verdict = theorems.check_free_h(t, args.k)
        label = f"H_{args.k - 2} is free" if verdict else f"H_{args.k - 2} has torsion"
    elif kind == "dim5":
        verdict = theorems.classify_dim5(t, args.n)
        label = f"admits a special generic map into R^{args.n}" if verdict else f"does not admit one into R^{args.n}"
    else:
        verdict = theorems.classify_sgm_r2(t)
        label = "admits a special generic map into R^2" if verdict else "does not admit one into R^2"
    payload = {"input": render(t), "verdict": verdict, "summary": label}
    if verdict:
        return _ok(command, payload)
    return _fail(command, [{"kind": "verdict", "message": label}], payload)


def _check_one(job) -> OutputEnvelope:
    kind, item, args = job
    fn = _check_script if kind in ("mt1", "mt2", "corollary") else _check_term
    return _guard(f"check {kind}", fn, kind, item, args)


def cmd_check(args) -> OutputEnvelope:
    jobs = [(args.kind, x, args) for x in args.inputs]
    return _batch(f"check {args.kind}", _check_one, jobs, args.jobs, labels=args.inputs)


def cmd_sgm(args) -> OutputEnvelope:
    def run():
        d = sgm.construct_from_handles(args.m, args.n, args.handles)
        holds = sgm.verify_homology_relation(d)
        payload = {"descriptor": d.to_dict(), "rendering": d.render(), "homology_relation": holds}
        if holds:
            return _ok("sgm", payload)
        return _fail("sgm", [{"kind": "relation", "message": "homology relation fails"}], payload)

    return _guard("sgm", run)


def cmd_oracle(args) -> OutputEnvelope:
    def run():
        c = oracle.read_complex(args.complex)
        degrees = [args.deg] if args.deg is not None else range(c.dimension + 1)
        groups = {str(i): str(oracle.homology(c, i, reduced=args.reduced)) for i in degrees}
        return _ok(
            "oracle",
            {"complex": args.complex, "f_vector": c.f_vector(), "reduced": args.reduced, "homology": groups},
        )

    return _guard("oracle", run)


# --- rendering --------------------------------------------------------------


def _use_color(stream) -> bool:
    if os.environ.get("ELEMPOLY_COLOR", "1").lower() in ("0", "false", "no", "off"):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _style(text: str, code: str, color: bool) -> str:
    return f"\x1b[{code}m{text}\x1b[0m" if color else text


def _human_lines(payload, indent: str = "") -> list[str]:
    lines = []
    if isinstance(payload, dict):
        for key, value in payload.items():
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{indent}{key}:")
                lines += _human_lines(value, indent + "  ")
            else:
                lines.append(f"{indent}{key}: {_scalar(value)}")
    elif isinstance(payload, list):
        for item in payload:
            if isinstance(item, (dict, list)):
                sub = _human_lines(item, indent + "  ")
                if sub:
                    lines.append(f"{indent}- {sub[0].lstrip()}")
                    lines += sub[1:]
            else:
                lines.append(f"{indent}- {_scalar(item)}")
    return lines


def _scalar(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v == {} or v == []:
        return "none"
    return str(v)


def render_human(env: OutputEnvelope, color: bool = False) -> str:
    head = _style(env.status.upper(), "32" if env.ok else "31", color)
    lines = [f"{head} {env.command}"]
    lines += _human_lines(env.payload, "  ")
    for d in env.diagnostics:
        where = f" at {d['line']}:{d['column']}" if "line" in d else ""
        lines.append(_style(f"  error[{d.get('kind', 'error')}]{where}: {d.get('message', '')}", "31", color))
    return "\n".join(lines)


def render_json(env: OutputEnvelope) -> str:
    return json.dumps(env.to_dict(), sort_keys=True, indent=2)


# --- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="elempoly", description="Elementary polyhedra and special generic maps.")
    p.add_argument("--json", action="store_true", help="print the structured envelope as JSON")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="invariants of one or more terms")
    e.add_argument("exprs", nargs="+", metavar="TERM")
    e.add_argument("--jobs", type=int, default=1)
    e.set_defaults(func=cmd_eval)

    r = sub.add_parser("reduce", help="run a root script")
    r.add_argument("script")
    r.set_defaults(func=cmd_reduce)

    c = sub.add_parser("check", help="theorem hypothesis checks and classifications")
    c.add_argument("kind", choices=CHECK_KINDS)
    c.add_argument("inputs", nargs="+", help="script paths (mt1, mt2, corollary) or terms")
    c.add_argument("--n", type=int, default=7)
    c.add_argument("--k", type=int, default=2)
    c.add_argument("--a", type=int, default=1)
    c.add_argument("--mode", choices=("sie", "see"), default="sie")
    c.add_argument("--jobs", type=int, default=1)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("sgm", help="round-handle special generic map descriptor")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--handles", type=int, nargs="*", default=[])
    s.set_defaults(func=cmd_sgm)

    o = sub.add_parser("oracle", help="simplicial homology of a complex file")
    o.add_argument("complex")
    o.add_argument("--deg", type=int, default=None)
    o.add_argument("--reduced", action="store_true")
    o.set_defaults(func=cmd_oracle)
    return p


def run(argv: list[str] | None = None) -> OutputEnvelope:
    args = build_parser().parse_args(argv)
    return args.func(args)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    env = args.func(args)
    if args.json:
        print(render_json(env))
    else:
        print(render_human(env, _use_color(sys.stdout)))
    return 0 if env.ok else 1


if __name__ == "__main__":
    sys.exit(main())
