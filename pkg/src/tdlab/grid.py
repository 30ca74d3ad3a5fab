"""Exhaustive small-grid runner: every check on every module spec up to a diameter bound."""
from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from math import comb

from .analysis import (drinfeld, drinfeld_closed_form, expected_shape, norton_irreducible, shape_generating_function,
                       sigma_recursion_check, sigma_sequence, special_value, td_pair_verify, weight_decomposition)
from .errors import CapExceededError, UsageError
from .field import FieldConfig
from .loopmod import ALL_KINDS, AlgebraKind, EvalFactor, ModuleSpec, build_module, verify_loop_relations
from .qstrings import classify_module
from .tdalg import iota_t, phi_s, theta_sequences, verify_a_relations, verify_t_relations

DEFAULT_A = ["2", "3", "1/2", "-1", "5"]
DEFAULT_S = ["1", "3"]
DEFAULT_T = ["5", "7", "11", "13", "17", "19", "23"]

# Boundary cases the parameter lists do not reach on their own: a = -s^2 and
# a = -s^{-2} for s = 3, adjacency that only appears after inverting one
# string, and a repeated negative string.
DEFAULT_EXTRAS = [
    [{"ell": 1, "a": "-9"}],
    [{"ell": 1, "a": "-1/9"}],
    [{"ell": 2, "a": "-18"}],
    [{"ell": 2, "a": "-1/18"}],
    [{"ell": 1, "a": "3"}, {"ell": 1, "a": "-9"}],
    [{"ell": 1, "a": "2"}, {"ell": 1, "a": "-1/9"}],
    [{"ell": 2, "a": "4"}, {"ell": 1, "a": "1/32"}],
    [{"ell": 1, "a": "4"}, {"ell": 1, "a": "1"}],
    [{"ell": 1, "a": "-2"}, {"ell": 1, "a": "-2"}],
]


@dataclass
class GridConfig:
    q: str = "2"
    D: int = 0
    a_values: list = dc_field(default_factory=lambda: list(DEFAULT_A))
    s_values: list = dc_field(default_factory=lambda: list(DEFAULT_S))
    t_values: list = dc_field(default_factory=lambda: list(DEFAULT_T))
    kinds: list = dc_field(default_factory=lambda: [k.to_json() for k in ALL_KINDS])
    max_diameter: int = 6
    max_factors: int = 3
    leading_ells: list = dc_field(default_factory=lambda: [0, 1, 2])
    cap: int = 64
    recursion_max_diameter: int = 4
    td_pair: bool = True
    extras: list = dc_field(default_factory=lambda: [list(e) for e in DEFAULT_EXTRAS])
    seed: int = 0
    jobs: int = 1

    @classmethod
    def from_json(cls, data: dict) -> GridConfig:
        if not isinstance(data, dict):
            raise UsageError("grid config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise UsageError(f"unknown grid config keys: {', '.join(unknown)}")
        cfg = cls(**data)
        cfg.q = str(cfg.q)
        return cfg

    def to_json(self) -> dict:
        return {n: getattr(self, n) for n in self.__dataclass_fields__ if n != "jobs"}

    def field(self) -> FieldConfig:
        f = FieldConfig(self.q, self.D)
        return FieldConfig(f.q, self.D, i_max=max(f.i_max, 4 * self.max_diameter + 8))


def enumerate_specs(cfg: GridConfig, field: FieldConfig) -> list[ModuleSpec]:
    """All specs in lexicographic order of (kind, factor count, ell-composition, parameter indices)."""
    a_vals = [field.parse(str(a)) for a in cfg.a_values]
    pairs = [(ell, i) for ell in range(1, cfg.max_diameter + 1) for i in range(len(a_vals))]
    out = []
    for kind_json in cfg.kinds:
        kind = AlgebraKind.parse(kind_json)
        leads = sorted(cfg.leading_ells) if kind.is_borel else [None]
        for n in range(0, cfg.max_factors + 1):
            for combo in itertools.combinations_with_replacement(pairs, n):
                total = sum(p[0] for p in combo)
                for lead in leads:
                    diam = total + (lead or 0)
                    if diam > cfg.max_diameter or diam == 0:
                        continue
                    if n == 0 and lead is None:
                        continue
                    factors = [EvalFactor(ell, a_vals[i]) for ell, i in combo]
                    out.append(ModuleSpec(kind, factors, lead))
        for extra in cfg.extras:
            factors = [EvalFactor(int(f["ell"]), field.parse(str(f["a"]))) for f in extra]
            out.append(ModuleSpec(kind, factors, 0 if kind.is_borel else None))
    for spec in out:
        if spec.dim > cfg.cap:
            raise CapExceededError(f"spec {spec} has dimension {spec.dim} > cap {cfg.cap}")
    return out


def admissible_t(spec: ModuleSpec, s, candidates, field: FieldConfig, poly=None):
    """First t with distinct theta, theta* and P_V(t^2 + eps eps* t^-2) != 0."""
    kind = spec.kind
    poly = poly or drinfeld_closed_form(spec, field=field)
    for t in candidates:
        t = field.parse(str(t))
        th = theta_sequences(s, t, spec.diameter, kind, field)
        if not (th.theta_distinct and th.theta_star_distinct):
            continue
        lam = t * t
        if kind.epsilon and kind.epsilon_star:
            lam = lam + (t * t).inverse()
        if poly(lam):
            return t
    return None


def _timed(timings, key, fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    timings[key] = timings.get(key, 0.0) + time.perf_counter() - t0
    return out


def run_spec(spec: ModuleSpec, cfg: GridConfig, field: FieldConfig) -> tuple[list[dict], dict]:
    """Every check for one spec and each configured s; returns records and timings."""
    timings: dict = {}
    rep = build_module(spec, field)
    loop_ok = _timed(timings, "relations", verify_loop_relations, rep).passed
    closed = drinfeld_closed_form(spec, field=field)
    a_vals = [field.parse(str(a)) for a in cfg.a_values]
    records = []
    for s_text in cfg.s_values:
        s = field.parse(str(s_text))
        tm = phi_s(rep, s)
        t = admissible_t(spec, s, cfg.t_values, field, closed)
        t_rel = t if t is not None else field.parse(str(cfg.t_values[0]))
        t0 = time.perf_counter()
        t_ok = verify_t_relations(tm).passed
        a_ok = verify_a_relations(iota_t(tm, t_rel)).passed
        timings["relations"] = timings.get("relations", 0.0) + time.perf_counter() - t0

        wd = weight_decomposition(tm)
        sigma = sigma_sequence(tm)
        poly = drinfeld(tm)
        q_d = field.constants.q_d_norm(tm.d)
        special_ok = poly(special_value(spec.kind, s)) == sigma[tm.d] / q_d
        sigma_ok = sigma[0] == field.one and special_ok
        recursion = None
        if tm.d <= cfg.recursion_max_diameter:
            recursion = _timed(timings, "recursion", lambda: all(
                w.passed for a in a_vals for w in sigma_recursion_check(tm, a)))

        cls = classify_module(spec, s, t, field)
        norton = _timed(timings, "norton", norton_irreducible, tm, cfg.seed)
        irreducible = norton.irreducible
        dims = wd.dims
        shape_ok = all(dims[i] <= comb(tm.d, i) for i in range(tm.d + 1))
        gen_ok = None
        if irreducible:
            gen_ok = (shape_generating_function(tm) == expected_shape(spec, field)
                      and dims == dims[::-1])

        td = None
        if cfg.td_pair and irreducible and t is not None:
            r = _timed(timings, "td_pair", td_pair_verify, iota_t(tm, t), cfg.seed)
            td = bool(r.is_td_pair and r.split_matches_weights and r.filtration_matches
                      and r.E0star_identity and not r.E0star_V0_zero)

        rec = {
            "id": f"{spec.kind}|{spec}|s={s}",
            "kind": spec.kind.to_json(),
            "spec": spec.to_json(),
            "s": str(s),
            "t": None if t is None else str(t),
            "d": tm.d,
            "dim": tm.dim,
            "relations": bool(loop_ok and t_ok and a_ok),
            "drinfeld": str(poly),
            "drinfeld_matches_closed_form": poly == closed,
            "sigma_identities": bool(sigma_ok),
            "recursion": recursion,
            "classify_irreducible": cls.irreducible_as_T_module,
            "failed_conditions": list(cls.failed_conditions),
            "m_sdt_member": cls.m_sdt_member,
            "norton_irreducible": irreducible,
            "norton_witness_dim": None if norton.witness is None else norton.witness.dim,
            "criteria_agree": cls.irreducible_as_T_module == irreducible,
            "shape": list(dims),
            "shape_bound": shape_ok,
            "generating_function": gen_ok,
            "td_pair": td,
        }
        rec["passed"] = _record_passed(rec)
        records.append(rec)
    return records, timings


CHECKS = ("relations", "drinfeld_matches_closed_form", "sigma_identities", "recursion", "criteria_agree",
          "shape_bound", "generating_function", "td_pair")


def _record_passed(rec: dict) -> bool:
    # None means the check does not apply to this instance
    return all(rec[c] is not False for c in CHECKS)


def _run_chunk(args):
    indexed, cfg = args
    field = cfg.field()
    return [(i, run_spec(spec, cfg, field)) for i, spec in indexed]


def run_grid(cfg: GridConfig) -> dict:
    """Run the grid and assemble a deterministic summary (timings kept under a separate key)."""
    field = cfg.field()
    specs = enumerate_specs(cfg, field)
    indexed = list(enumerate(specs))
    if cfg.jobs > 1:
        results = []
        chunks = [indexed[i::cfg.jobs] for i in range(cfg.jobs)]
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            for part in ex.map(_run_chunk, [(c, cfg) for c in chunks]):
                results.extend(part)
    else:
        results = [(i, run_spec(spec, cfg, field)) for i, spec in indexed]
    # results are keyed by spec index, so assembly does not depend on scheduling
    results.sort(key=lambda item: item[0])
    records = []
    timings: dict = {}
    for _, (recs, tim) in results:
        records.extend(recs)
        for k, v in tim.items():
            timings[k] = timings.get(k, 0.0) + v

    counts = {}
    for c in CHECKS:
        vals = [r[c] for r in records if r[c] is not None]
        counts[c] = {"checked": len(vals), "failed": sum(1 for v in vals if not v)}
    failures = [r for r in records if not r["passed"]]
    summary = {
        "instances": len(records),
        "specs": len(specs),
        "passed": not failures,
        "failed_instances": len(failures),
        "checks": counts,
        "irreducible_instances": sum(1 for r in records if r["norton_irreducible"]),
        "first_counterexample": failures[0] if failures else None,
    }
    return {"config": cfg.to_json(), "summary": summary, "instances": records,
            "_timings": {k: round(v, 3) for k, v in sorted(timings.items())}}

