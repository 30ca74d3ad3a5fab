"""Command-line front end.

  tdlab analyze --spec module.json --s 3 --t 5
  tdlab qstrings decompose omega.json
  tdlab qstrings classify module.json --s 3
  tdlab grid --config grid.json --out report.json
  tdlab verify --spec module.json --s 3

Every command prints one JSON report (sorted keys).  The exit code is 0 when
every requested check passed, 1 when a check failed, and the error's own
code for parse, field-extension, cap and other failures.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .analysis import (drinfeld, drinfeld_closed_form, norton_irreducible, shape_generating_function,
                       sigma_sequence, td_pair_verify, weight_decomposition)
from .errors import ParseError, TdlabError, UsageError
from .field import FieldConfig
from .grid import GridConfig, admissible_t, run_grid
from .loopmod import AlgebraKind, ModuleSpec, build_module, verify_loop_relations
from .qstrings import ScalarMultiset, classify_module, decompose, decompose_symmetric
from .tdalg import iota_t, phi_s, st_equivalents, theta_sequences, verify_a_relations, verify_t_relations

SESSION_KEYS = {"q", "D", "i_max", "kind", "s", "t", "seed", "grid"}


def _read_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


class Session:
    """Field, kind, s, t and seed resolved from --config, flags and TDLAB_SEED."""

    def __init__(self, args):
        cfg = _read_json(args.config) if getattr(args, "config", None) else {}
        if not isinstance(cfg, dict):
            raise ParseError("config must be a JSON object")
        unknown = sorted(set(cfg) - SESSION_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        self.raw = cfg
        q = str(cfg.get("q", "2"))
        D = int(cfg.get("D", 0))
        self.field = FieldConfig(q, D, cfg["i_max"]) if "i_max" in cfg else FieldConfig(q, D)
        kind = getattr(args, "kind", None) or cfg.get("kind")
        self.kind = AlgebraKind.parse(kind) if kind is not None else None
        s = getattr(args, "s", None) or cfg.get("s")
        t = getattr(args, "t", None) or cfg.get("t")
        self.s = self.field.parse(str(s)) if s is not None else None
        self.t = self.field.parse(str(t)) if t is not None else None
        seed = args.seed if getattr(args, "seed", None) is not None else cfg.get("seed", 0)
        env = os.environ.get("TDLAB_SEED")
        if env is not None and env.strip():
            try:
                seed = int(env)
            except ValueError as exc:
                raise UsageError(f"TDLAB_SEED must be an integer, got {env!r}") from exc
        self.seed = int(seed)

    def spec(self, path: str) -> ModuleSpec:
        data = _read_json(path)
        if not isinstance(data, dict):
            raise ParseError("module spec must be a JSON object")
        try:
            return ModuleSpec.from_json(data, self.field, kind=self.kind)
        except (KeyError, TypeError) as exc:
            raise ParseError(f"{path}: malformed module spec ({exc})") from exc

    def require_s(self):
        if self.s is None:
            raise UsageError("this command needs the type s (--s or config key 's')")
        return self.s


# commands -------------------------------------------------------------------

def _relations_json(report) -> dict:
    return {"passed": report.passed, "failed": report.failed(),
            "residuals": [r.to_json() for r in report.residuals]}


def cmd_analyze(args, session: Session) -> tuple[dict, bool]:
    spec = session.spec(args.spec)
    f = session.field
    s = session.require_s()
    t = session.t
    rep = build_module(spec, f)
    loop = verify_loop_relations(rep)
    tm = phi_s(rep, s)
    trel = verify_t_relations(tm)
    wd = weight_decomposition(tm)
    sigma = sigma_sequence(tm)
    poly = drinfeld(tm)
    closed = drinfeld_closed_form(spec, field=f)
    norton = norton_irreducible(tm, session.seed)
    cls = classify_module(spec, s, t, f)
    out = {
        "spec": spec.to_json(),
        "dim": tm.dim,
        "d": tm.d,
        "loop_relations": _relations_json(loop),
        "t_relations": _relations_json(trel),
        "weights": wd.to_json(),
        "shape_generating_function": shape_generating_function(tm).to_json(),
        "sigma": sigma.to_json(),
        "drinfeld": poly.to_json(),
        "drinfeld_str": str(poly),
        "drinfeld_closed_form": closed.to_json(),
        "drinfeld_matches_closed_form": poly == closed,
        "norton": norton.to_json(),
        "classification": cls.to_json(),
        "criteria_agree": norton.irreducible == cls.irreducible_as_T_module,
    }
    ok = loop.passed and trel.passed and poly == closed and out["criteria_agree"]
    if t is not None:
        cand = iota_t(tm, t)
        arel = verify_a_relations(cand)
        out["a_relations"] = _relations_json(arel)
        out["theta"] = theta_sequences(s, t, tm.d, spec.kind, f).to_json()
        out["st_equivalents"] = [[str(a), str(b)] for a, b in st_equivalents(s, t, spec.kind)]
        td = td_pair_verify(cand, session.seed)
        out["td_pair"] = td.to_json()
        ok = ok and arel.passed
        if norton.irreducible and admissible_t(spec, s, [t], f, closed) is not None:
            ok = ok and td.is_td_pair and td.split_matches_weights and bool(td.E0star_identity)
    return out, ok


def cmd_qstrings(args, session: Session) -> tuple[dict, bool]:
    f = session.field
    if args.op == "classify":
        spec = session.spec(args.input)
        rep = classify_module(spec, session.require_s(), session.t, f)
        return {"classification": rep.to_json(), "spec": spec.to_json()}, True
    data = _read_json(args.input)
    try:
        omega = ScalarMultiset.from_json(data, f)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{args.input}: malformed scalar multiset ({exc})") from exc
    if args.op == "decompose":
        ms = decompose(omega)
    else:
        ms = decompose_symmetric(omega)
    return {"omega": omega.to_json(), "strings": ms.to_json()}, True


def cmd_grid(args, session: Session) -> tuple[dict, bool]:
    data = dict(session.raw.get("grid", {}))
    for key in ("q", "D"):
        if key in session.raw:
            data.setdefault(key, session.raw[key])
    if args.kind:
        data["kinds"] = [AlgebraKind.parse(args.kind).to_json()]
    data["seed"] = session.seed
    if args.jobs:
        data["jobs"] = args.jobs
    cfg = GridConfig.from_json(data)
    report = run_grid(cfg)
    timings = report.pop("_timings")
    if args.timing:
        report["check_seconds"] = timings
    return report, report["summary"]["passed"]


def cmd_verify(args, session: Session) -> tuple[dict, bool]:
    spec = session.spec(args.spec)
    rep = build_module(spec, session.field)
    loop = verify_loop_relations(rep)
    out = {"spec": spec.to_json(), "loop_relations": _relations_json(loop)}
    ok = loop.passed
    if session.s is not None:
        tm = phi_s(rep, session.s)
        trel = verify_t_relations(tm)
        out["t_relations"] = _relations_json(trel)
        ok = ok and trel.passed
        if session.t is not None:
            arel = verify_a_relations(iota_t(tm, session.t))
            out["a_relations"] = _relations_json(arel)
            ok = ok and arel.passed
    return out, ok


COMMANDS = {"analyze": cmd_analyze, "qstrings": cmd_qstrings, "grid": cmd_grid, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tdlab", description="Exact TD-algebra modules, Drinfel'd polynomials "
                                 "and q-string criteria.")
    ap.add_argument("--version", action="version", version=f"tdlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="session config JSON (q, D, kind, s, t, seed, grid)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=None, help="oracle seed (TDLAB_SEED overrides)")
    common.add_argument("--kind", default=None, help="algebra kind: 1,1 | 1,0 | 0,0")
    common.add_argument("--s", default=None, help="type s, e.g. 3 or 1/2")
    common.add_argument("--t", default=None, help="parameter t of the embedding")
    common.add_argument("--timing", action="store_true", help="add wall-clock timings to the report")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="full analysis of one module")
    p.add_argument("--spec", required=True, help="module spec JSON")

    p = sub.add_parser("qstrings", parents=[common], help="q-string operations")
    p.add_argument("op", choices=["decompose", "decompose-symmetric", "classify"])
    p.add_argument("input", help="scalar multiset JSON, or a module spec for classify")

    p = sub.add_parser("grid", parents=[common], help="exhaustive small-grid run")
    p.add_argument("--jobs", type=int, default=0, help="worker processes (default 1)")

    p = sub.add_parser("verify", parents=[common], help="relation suites for one module")
    p.add_argument("--spec", required=True, help="module spec JSON")
    return ap


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "timing") and v is not None}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        session = Session(args)
        results, ok = COMMANDS[args.command](args, session)
    except TdlabError as exc:
        print(f"tdlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    report = {"command": _echo(args), "results": results, "passed": bool(ok), "version": __version__}
    if args.seed is not None or os.environ.get("TDLAB_SEED"):
        report["command"]["seed"] = session.seed
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - t0, 3)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
