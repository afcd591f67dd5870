"""Dataset files, panel files and report writers.

Datasets are JSON documents validated against ``data/dataset.schema.json``.
Every number is a ``"num/den"`` string (plain integers are accepted too)
so that nothing passes through a float.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

import jsonschema

from drum._exact import as_fraction, fmt
from drum.axioms import AxiomReport, MarginalDemand
from drum.feasibility import DynamicStochasticDemand, Verdict, adsrp_multiplicities
from drum.geometry import Budget, PatchSet, build_patches
from drum.rationality import BudgetPath, ChoicePath, ProfileMatrix
from drum.simulation import Panel, PanelRow, UtilityProcessSpec


class DatasetError(ValueError):
    """A dataset or spec file that does not validate."""


def _schema(name: str) -> dict:
    return json.loads(resources.files("drum.data").joinpath(name).read_text())


def _validate(doc, schema_name: str, source: str) -> None:
    validator = jsonschema.Draft202012Validator(_schema(schema_name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        lines = [f"{source}: {e.json_path}: {e.message}" for e in errors[:10]]
        raise DatasetError("\n".join(lines))


def _num(s) -> Fraction:
    try:
        return as_fraction(s)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise DatasetError(f"not an exact rational: {s!r}") from e


@dataclass
class Dataset:
    budgets: list[Budget]
    observed: list[BudgetPath]
    rho: DynamicStochasticDemand | None = None
    panel: Panel | None = None
    continuous_demand: bool = False
    name: str = ""
    notes: list[str] = field(default_factory=list)

    @property
    def n_periods(self) -> int:
        return max(b.period for b in self.budgets)

    def patch_sets(self, continuous_demand: bool | None = None) -> list[PatchSet]:
        cd = self.continuous_demand if continuous_demand is None else continuous_demand
        return [build_patches([b for b in self.budgets if b.period == t], continuous_demand=cd)
                for t in range(1, self.n_periods + 1)]


def _panel_from_records(records) -> Panel:
    return Panel(tuple(
        PanelRow(str(r["agent"]), r["period"], r["budget"], tuple(_num(v) for v in r["point"]),
                 _num(r["weight"]) if "weight" in r else None)
        for r in records
    ))


def parse_dataset(doc: dict, source: str = "<dataset>") -> Dataset:
    _validate(doc, "dataset.schema.json", source)
    budgets = [Budget(b["period"], b["index"], tuple(_num(p) for p in b["prices"]), _num(b["expenditure"]))
               for b in doc["budgets"]]
    keys = [b.key for b in budgets]
    if len(set(keys)) != len(keys):
        raise DatasetError(f"{source}: duplicate (period, index) among budgets")
    T = max(b.period for b in budgets)
    for t in range(1, T + 1):
        if not any(b.period == t for b in budgets):
            raise DatasetError(f"{source}: period {t} has no budgets")
    observed = [tuple(bp) for bp in doc.get("observed_paths", [])]
    for bp in observed:
        if len(bp) != T:
            raise DatasetError(f"{source}: budget path {list(bp)} needs {T} entries")
        for t, j in enumerate(bp, start=1):
            if (t, j) not in keys:
                raise DatasetError(f"{source}: budget path {list(bp)} names missing budget {j} of period {t}")
    rho = None
    if "demand" in doc:
        entries = {}
        for n, e in enumerate(doc["demand"]):
            cp = ChoicePath(tuple(e["budgets"]), tuple(e["patches"]))
            if cp in entries:
                raise DatasetError(f"{source}: $.demand[{n}] repeats choice path {cp.label()}")
            entries[cp] = _num(e["probability"])
        rho = DynamicStochasticDemand(entries, observed=observed or None)
        if not observed:
            observed = list(rho.observed)
    panel = _panel_from_records(doc["panel"]) if "panel" in doc else None
    ds = Dataset(budgets, observed, rho, panel, bool(doc.get("continuous_demand", False)),
                 doc.get("name", ""), list(doc.get("notes", [])))
    if rho is not None:
        pss = ds.patch_sets()
        for cp in rho.entries:
            for ps, j, i in zip(pss, cp.budgets, cp.patches):
                if not 1 <= i <= len(ps.patches[j]):
                    raise DatasetError(f"{source}: {cp.label()} names patch {i}, budget {j} of period "
                                       f"{ps.period} has {len(ps.patches[j])}")
    return ds


def load_dataset(path: str | Path) -> Dataset:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise DatasetError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e
    return parse_dataset(doc, str(path))


def dataset_to_dict(ds: Dataset) -> dict:
    doc: dict = {}
    if ds.name:
        doc["name"] = ds.name
    doc["continuous_demand"] = ds.continuous_demand
    doc["budgets"] = [
        {"period": b.period, "index": b.index, "prices": [fmt(p) for p in b.prices], "expenditure": fmt(b.expenditure)}
        for b in sorted(ds.budgets, key=lambda b: b.key)
    ]
    doc["observed_paths"] = [list(bp) for bp in ds.observed]
    if ds.rho is not None:
        doc["demand"] = [
            {"budgets": list(cp.budgets), "patches": list(cp.patches), "probability": fmt(v)}
            for cp, v in sorted(ds.rho.entries.items(), key=lambda kv: kv[0].key)
        ]
    if ds.panel is not None:
        doc["panel"] = panel_records(ds.panel)
    if ds.notes:
        doc["notes"] = list(ds.notes)
    return doc


def save_dataset(ds: Dataset, path: str | Path) -> None:
    Path(path).write_text(json.dumps(dataset_to_dict(ds), indent=2) + "\n")


def panel_records(panel: Panel) -> list[dict]:
    out = []
    for r in panel.rows:
        rec = {"agent": r.agent, "period": r.period, "budget": r.budget, "point": [fmt(v) for v in r.point]}
        if r.weight is not None:
            rec["weight"] = fmt(r.weight)
        out.append(rec)
    return out


def write_panel_csv(panel: Panel, path: str | Path) -> None:
    """Comma-separated ``agent,period,budget,weight,y1..yK`` with exact rationals."""
    K = max((len(r.point) for r in panel.rows), default=0)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["agent", "period", "budget", "weight"] + [f"y{k}" for k in range(1, K + 1)])
        for r in panel.rows:
            w.writerow([r.agent, r.period, r.budget, "" if r.weight is None else fmt(r.weight)]
                       + [fmt(v) for v in r.point])


def read_panel_csv(path: str | Path) -> Panel:
    rows = []
    with open(path, newline="") as fh:
        for n, rec in enumerate(csv.DictReader(fh), start=2):
            try:
                ys = [rec[k] for k in sorted((k for k in rec if k.startswith("y")), key=lambda k: int(k[1:]))]
                rows.append(PanelRow(rec["agent"], int(rec["period"]), int(rec["budget"]),
                                     tuple(_num(v) for v in ys), _num(rec["weight"]) if rec.get("weight") else None))
            except (KeyError, ValueError, TypeError) as e:
                raise DatasetError(f"{path}: line {n}: {e}") from e
    return Panel(tuple(rows))


def load_spec(path: str | Path) -> tuple[UtilityProcessSpec, Dataset]:
    """A simulation spec: a dataset (budgets and paths) plus utility types."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise DatasetError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e
    _validate(doc, "spec.schema.json", str(path))
    ds = parse_dataset({k: v for k, v in doc.items() if k != "utility"}, str(path))
    u = doc["utility"]
    T = ds.n_periods
    if u["mode"] == "constant":
        spec = UtilityProcessSpec.constant([_num(t["weight"]) for t in u["types"]],
                                           [[_num(a) for a in t["alpha"]] for t in u["types"]], T)
    elif u["mode"] == "independent":
        spec = UtilityProcessSpec.independent(
            [[(_num(t["weight"]), [_num(a) for a in t["alpha"]]) for t in per] for per in u["periods"]])
    else:
        spec = UtilityProcessSpec.custom(
            [(_num(t["weight"]), [[_num(a) for a in al] for al in t["alphas"]]) for t in u["types"]])
    return spec, ds


# ---------------------------------------------------------------- reports

def verdict_record(v: Verdict, A: ProfileMatrix | None = None) -> dict:
    """Deterministic record of a verdict; timing is kept out so reruns match byte for byte."""
    rec: dict = {"status": v.status, "verified": v.verified, "pivots": v.pivots}
    if v.weights is not None:
        rec["weights"] = {str(c): fmt(w) for c, w in v.support().items()}
        if A is not None:
            rec["profiles"] = {str(c): A.column_label(c) for c in v.support()}
    if v.certificate is not None:
        rec["certificate"] = [fmt(d) for d in v.certificate]
        if A is not None:
            rec["certificate_rows"] = [r.label() for r in A.rows]
            rec["adsrp_sequence"] = [
                {"path": cp.label(), "repetitions": n} for cp, n in adsrp_multiplicities(A, v.certificate).items()
            ]
    if v.notes:
        rec["notes"] = list(v.notes)
    return rec


def axiom_records(reports: Sequence[AxiomReport]) -> list[dict]:
    return [r.to_record() for r in reports]


def marginal_record(m: MarginalDemand) -> dict:
    return {
        "period": m.period,
        "well_defined": m.well_defined,
        "families": [
            {"other_budgets": list(ctx), "entries": {f"{j}:{i}": fmt(v) for (j, i), v in fam.items()}}
            for ctx, fam in m.by_context.items()
        ],
        "unobserved_patches": [f"{j}:{i}" for j, i in m.unobserved],
    }


def write_json(obj, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=False) + "\n")


def write_matrix(A: ProfileMatrix, directory: str | Path, stem: str = "matrix") -> list[Path]:
    """Sparse triplets ``row column 1`` (1-based) plus row and column legends."""
    d = Path(directory)
    M = A.dense()
    trip = d / f"{stem}.triplets.txt"
    with open(trip, "w") as fh:
        fh.write(f"# {A.n_rows} rows, {A.n_columns} columns\n")
        for i in range(A.n_rows):
            for c in range(A.n_columns):
                if M[i, c]:
                    fh.write(f"{i + 1} {c + 1} 1\n")
    rows = d / f"{stem}.rows.txt"
    rows.write_text("".join(f"{i + 1} {r.label()}\n" for i, r in enumerate(A.rows)))
    cols = d / f"{stem}.columns.txt"
    cols.write_text("".join(f"{c + 1} {A.column_label(c)}\n" for c in range(A.n_columns)))
    dense = d / f"{stem}.txt"
    dense.write_text(format_matrix(A))
    return [trip, rows, cols, dense]


def format_matrix(A: ProfileMatrix) -> str:
    M = A.dense()
    return "".join(" ".join(str(int(x)) for x in M[i]) + "\n" for i in range(A.n_rows))


def read_triplets(path: str | Path) -> tuple[tuple[int, int], set[tuple[int, int]]]:
    entries = set()
    shape = (0, 0)
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            parts = line[1:].split()
            shape = (int(parts[0]), int(parts[2]))
            continue
        r, c, v = line.split()
        if v != "1":
            raise DatasetError(f"{path}: non-unit entry {line!r}")
        entries.add((int(r), int(c)))
    return shape, entries
