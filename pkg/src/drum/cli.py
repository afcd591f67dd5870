"""Command-line entry point.

Exit status: 0 when the data pass the requested check, 1 when they fail it
(reports and any certificate are written first), 2 on input errors.

Flags fall back to environment variables: ``DRUM_CONTINUOUS_DEMAND``
(1/true/yes/on), ``DRUM_SEED``, ``DRUM_MAX_COLUMNS`` and ``DRUM_REPORT_DIR``.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from drum import io
from drum._exact import fmt
from drum.axioms import (check_intensity_monotonicity, check_monotonicity, check_sarpd, check_stability,
                         slice_period, test_rum_static)
from drum.feasibility import test_drum
from drum.geometry import SIDE_NAMES
from drum.pooling import build_pooled_patches, pool, test_rum_pooled
from drum.rationality import ColumnLimitError, enumerate_rational_types, profile_matrix
from drum.simulation import random_instance, random_spec, simulate_panel

DEFAULT_REPORT_DIR = "drum-reports"
_TRUE = {"1", "true", "yes", "on"}


class InputError(Exception):
    pass


def _env_int(name: str) -> int | None:
    v = os.environ.get(name)
    if v is None or v == "":
        return None
    try:
        return int(v)
    except ValueError:
        raise InputError(f"{name}={v!r} is not an integer") from None


def _settings(args) -> argparse.Namespace:
    env_cd = os.environ.get("DRUM_CONTINUOUS_DEMAND")
    cd = True if args.continuous_demand else (env_cd.strip().lower() in _TRUE if env_cd else None)
    seed = args.seed if args.seed is not None else _env_int("DRUM_SEED")
    cap = args.max_columns if args.max_columns is not None else _env_int("DRUM_MAX_COLUMNS")
    report_dir = Path(args.report_dir or os.environ.get("DRUM_REPORT_DIR") or DEFAULT_REPORT_DIR)
    return argparse.Namespace(continuous_demand=cd, seed=0 if seed is None else seed, max_columns=cap,
                              report_dir=report_dir)


def _out(cfg, name: str) -> Path:
    cfg.report_dir.mkdir(parents=True, exist_ok=True)
    return cfg.report_dir / name


def _load(args, cfg):
    ds = io.load_dataset(args.dataset)
    return ds, ds.patch_sets(cfg.continuous_demand), Path(args.dataset).stem


def _matrix(ds, pss, cfg):
    if not ds.observed:
        raise InputError("the dataset lists no observed budget paths")
    A = profile_matrix(pss, ds.observed)
    if cfg.max_columns is not None and A.n_columns > cfg.max_columns:
        raise ColumnLimitError(f"{A.n_columns} profile columns exceed --max-columns {cfg.max_columns}")
    return A


def _need_rho(ds):
    if ds.rho is None:
        raise InputError("the dataset has no demand entries")
    return ds.rho


def cmd_patches(args, cfg) -> int:
    ds, pss, stem = _load(args, cfg)
    rec = []
    for ps in pss:
        print(f"period {ps.period}")
        for p in ps.all_patches():
            signs = ", ".join(f"{SIDE_NAMES[s]} B{k}" for k, s in p.sign_vector.items())
            rep = "(" + ", ".join(map(fmt, p.representative)) + ")"
            twin = f" same as {p.same_as}" if p.same_as else ""
            print(f"  {p.label}: {signs or 'no other budgets'}; representative {rep}{twin}")
            rec.append({"period": ps.period, "budget": p.owner, "patch": p.index, "label": p.label,
                        "signs": {str(k): SIDE_NAMES[s] for k, s in p.sign_vector.items()},
                        "intersection": p.is_intersection, "representative": [fmt(v) for v in p.representative]})
        pairs = sorted(ps.dominance)
        print("  dominance: " + (", ".join(f"x_{{{a[1]}|{a[0]}}} > x_{{{b[1]}|{b[0]}}}" for a, b in pairs) or "none"))
    io.write_json(rec, _out(cfg, f"{stem}-patches.json"))
    return 0


def cmd_types(args, cfg) -> int:
    ds, pss, stem = _load(args, cfg)
    rec = {}
    for ps in pss:
        ts = enumerate_rational_types(ps)
        print(f"period {ps.period}: {len(ts)} rational types")
        for th in ts:
            print("  " + th.label + "  " + ", ".join(f"B{k} -> patch {i}" for k, i in zip(th.owners, th.choice)))
        rec[str(ps.period)] = [list(th.choice) for th in ts]
    io.write_json(rec, _out(cfg, f"{stem}-types.json"))
    return 0


def cmd_matrix(args, cfg) -> int:
    ds, pss, stem = _load(args, cfg)
    A = _matrix(ds, pss, cfg)
    sys.stdout.write(io.format_matrix(A))
    cfg.report_dir.mkdir(parents=True, exist_ok=True)
    io.write_matrix(A, cfg.report_dir, f"{stem}-matrix")
    return 0


def cmd_test(args, cfg) -> int:
    ds, pss, stem = _load(args, cfg)
    rho = _need_rho(ds)
    A = _matrix(ds, pss, cfg)
    v = test_drum(A, rho)
    print(f"{v.status} ({A.n_rows} x {A.n_columns}, {v.pivots} pivots, verified {v.verified})")
    print(f"runtime {v.runtime_s:.3f}s", file=sys.stderr)
    io.write_json(io.verdict_record(v, A), _out(cfg, f"{stem}-verdict.json"))
    if not v.feasible:
        cert = io.verdict_record(v, A)
        io.write_json({k: cert[k] for k in ("certificate", "certificate_rows", "adsrp_sequence")},
                      _out(cfg, f"{stem}-certificate.json"))
        return 1
    return 0


def cmd_axioms(args, cfg) -> int:
    ds, pss, stem = _load(args, cfg)
    rho = _need_rho(ds)
    reports = [f(rho, pss) for f in (check_stability, check_monotonicity, check_intensity_monotonicity, check_sarpd)]
    for r in reports:
        print(r.summary())
    io.write_json(io.axiom_records(reports), _out(cfg, f"{stem}-axioms.json"))
    return 1 if any(not r.passed for r in reports) else 0


def cmd_slice(args, cfg) -> int:
    ds, pss, stem = _load(args, cfg)
    rho = _need_rho(ds)
    periods = [args.period] if args.period else range(1, len(pss) + 1)
    out, ok = [], True
    for t in periods:
        if not 1 <= t <= len(pss):
            raise InputError(f"no period {t}")
        m = slice_period(rho, pss, t)
        rec = io.marginal_record(m)
        if m.well_defined:
            v = test_rum_static(m, pss[t - 1])
            rec["rum"] = io.verdict_record(v)
            verdicts = {(): v}
        else:
            verdicts = {ctx: test_rum_static(m, pss[t - 1], ctx) for ctx in m.by_context}
            rec["rum_by_family"] = [{"other_budgets": list(c), **io.verdict_record(v)} for c, v in verdicts.items()]
        state = "well defined" if m.well_defined else "differs across the other periods' budgets"
        print(f"period {t}: marginal {state}")
        for ctx, fam in m.by_context.items():
            vals = ", ".join(f"x_{{{i}|{j}}}={fmt(v)}" for (j, i), v in fam.items())
            print(f"  given other budgets {ctx}: {vals}")
        for ctx, v in verdicts.items():
            print(f"  static RUM{' given ' + str(ctx) if ctx else ''}: {v.status}")
            ok &= v.feasible
        out.append(rec)
    io.write_json(out, _out(cfg, f"{stem}-slices.json"))
    return 0 if ok else 1


def cmd_sarpd(args, cfg) -> int:
    ds, pss, stem = _load(args, cfg)
    rho = _need_rho(ds)
    bp = tuple(int(x) for x in args.path.split(",")) if args.path else None
    try:
        r = check_sarpd(rho, pss, bp)
    except ValueError as e:
        raise InputError(str(e)) from None
    print(r.summary())
    io.write_json(r.to_record(), _out(cfg, f"{stem}-sarpd.json"))
    return 0 if r.passed else 1


def cmd_pool(args, cfg) -> int:
    ds, pss, stem = _load(args, cfg)
    panel = io.read_panel_csv(args.panel) if args.panel else ds.panel
    if panel is None:
        raise InputError("pooling needs point-level choices; a patch-level demand cannot be pooled "
                         "(add a 'panel' to the dataset or pass --panel FILE.csv)")
    pooled = build_pooled_patches(ds.budgets, continuous_demand=bool(cfg.continuous_demand or ds.continuous_demand))
    pd = pool(panel, pooled, args.weighting)
    v = test_rum_pooled(pd, pooled)
    for (owner, k), val in pd.entries.items():
        print(f"  xi^{owner[0]}_{{{k}|{owner[1]}}} = {fmt(val)}")
    print(f"pooled static RUM: {v.status}")
    rec = {"pooled_demand": {f"{o[0]}:{o[1]}:{k}": fmt(val) for (o, k), val in pd.entries.items()},
           "verdict": io.verdict_record(v)}
    io.write_json(rec, _out(cfg, f"{stem}-pool.json"))
    return 0 if v.feasible else 1


def cmd_simulate(args, cfg) -> int:
    if args.spec:
        spec, ds = io.load_spec(args.spec)
        stem = Path(args.spec).stem
        pss = ds.patch_sets(cfg.continuous_demand)
    else:
        rng = np.random.default_rng(cfg.seed)
        pss, paths = random_instance(rng, continuous_demand=bool(cfg.continuous_demand))
        spec = random_spec(rng, pss[0].budgets[1].n_goods, len(pss), args.mode)
        ds = io.Dataset([b for ps in pss for b in ps.budgets.values()], paths,
                        continuous_demand=bool(cfg.continuous_demand))
        stem = f"random-seed{cfg.seed}"
    panel, rho = simulate_panel(spec, pss, ds.observed)
    out = io.Dataset(ds.budgets, list(ds.observed), rho, panel, pss[0].continuous_demand, f"simulated {stem}",
                     list(panel.notes))
    path = Path(args.out) if args.out else _out(cfg, f"{stem}-simulated.json")
    io.save_dataset(out, path)
    cfg.report_dir.mkdir(parents=True, exist_ok=True)
    io.write_panel_csv(panel, _out(cfg, f"{stem}-panel.csv"))
    print(f"wrote {path} ({len(panel.rows)} panel rows, {len(rho.support())} positive choice paths)")
    return 0


COMMANDS = {
    "patches": (cmd_patches, "list patches, representatives and dominance pairs"),
    "types": (cmd_types, "enumerate rational demand types per period"),
    "matrix": (cmd_matrix, "build the profile matrix and export it"),
    "test": (cmd_test, "decide DRUM consistency; certificate on failure"),
    "axioms": (cmd_axioms, "stability, monotonicity, intensity monotonicity and SARPD"),
    "slice": (cmd_slice, "per-period marginals and their static RUM tests"),
    "sarpd": (cmd_sarpd, "dominance cycles on positive-probability choice paths"),
    "pool": (cmd_pool, "pool all periods into one cross-section and test static RUM"),
    "simulate": (cmd_simulate, "simulate a Cobb-Douglas panel from a spec or at random"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--continuous-demand", action="store_true",
                        help="drop intersection patches from choices and types")
    common.add_argument("--seed", type=int, default=None, help="random seed (simulate)")
    common.add_argument("--max-columns", type=int, default=None, help="refuse profile matrices wider than this")
    common.add_argument("--report-dir", default=None, help=f"where reports go (default {DEFAULT_REPORT_DIR})")
    parser = argparse.ArgumentParser(prog="drum", description="Nonparametric tests of dynamic random utility.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_)
        if name == "simulate":
            p.add_argument("spec", nargs="?", help="simulation spec JSON; omit for a random instance")
            p.add_argument("--out", help="where to write the simulated dataset")
            p.add_argument("--mode", choices=["constant", "independent", "custom"], default="constant")
            continue
        p.add_argument("dataset", help="dataset JSON")
        if name == "slice":
            p.add_argument("--period", type=int, help="only this period (1-based)")
        elif name == "sarpd":
            p.add_argument("--path", help="only this budget path, e.g. 1,2")
        elif name == "pool":
            p.add_argument("--panel", help="panel CSV overriding the dataset's panel")
            p.add_argument("--weighting", choices=["observation", "agent"], default="observation")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _settings(args)
        return COMMANDS[args.command][0](args, cfg)
    except (InputError, ValueError, ColumnLimitError, OSError) as e:
        # dataset, geometry, normalization, panel and simulation errors are all ValueErrors
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
