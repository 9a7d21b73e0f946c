"""Serialization of reports to JSON, CSV and text.

Conventions: rationals are always ``"p/q"`` strings; floats use the shortest
decimal that round-trips; integer counts that can grow without bound are
strings; levels and small indices stay JSON numbers. JSON objects carry
``"schema": "densitylab/1"``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .core import CheckReport, DensityEstimate, MeasurabilityReport, PreservationReport, RiemannSum
from .divisor import CountResult, InvarianceReport, UdmWeylReport
from .errors import InvalidParameters
from .exact import fmt_float, fmt_rational
from .udtest import BudReport, ContinuityReport, UDReport

SCHEMA = "densitylab/1"
FORMATS = ("json", "csv", "text")


@dataclass
class Table:
    """A report flattened to named columns.

    ``single`` tables hold exactly one record and serialize to a flat JSON
    object; others serialize as ``{"schema", "kind", **meta, "rows": [...]}``.
    """

    kind: str
    columns: list[str]
    rows: list[list]
    meta: dict = field(default_factory=dict)
    single: bool = False
    text: str | None = None


def _json_value(v):
    if isinstance(v, Fraction):
        return fmt_rational(v)
    if isinstance(v, float):
        return v  # json uses repr, the shortest round-trip form
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return fmt_rational(v)
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_csv_value(x) for x in v)
    return str(v)


def emit_table(table: Table, fmt: str) -> str:
    if fmt == "json":
        if table.single:
            obj = {"schema": SCHEMA, "kind": table.kind}
            obj.update({k: _json_value(v) for k, v in table.meta.items()})
            obj.update({c: _json_value(v) for c, v in zip(table.columns, table.rows[0])})
        else:
            obj = {"schema": SCHEMA, "kind": table.kind}
            obj.update({k: _json_value(v) for k, v in table.meta.items()})
            obj["rows"] = [{c: _json_value(v) for c, v in zip(table.columns, row)} for row in table.rows]
        return json.dumps(obj, ensure_ascii=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if table.single:
            cols = list(table.meta) + table.columns
            w.writerow(cols)
            w.writerow([_csv_value(v) for v in list(table.meta.values()) + table.rows[0]])
        else:
            w.writerow(table.columns)
            for row in table.rows:
                w.writerow([_csv_value(v) for v in row])
        return buf.getvalue()
    if fmt == "text":
        if table.text is not None:
            return table.text.rstrip("\n") + "\n"
        lines = [f"{k}: {_csv_value(v)}" for k, v in table.meta.items()]
        if table.single:
            lines += [f"{c}: {_csv_value(v)}" for c, v in zip(table.columns, table.rows[0])]
        else:
            cells = [table.columns] + [[_csv_value(v) for v in row] for row in table.rows]
            widths = [max(len(r[i]) for r in cells) for i in range(len(table.columns))]
            lines += ["  ".join(s.ljust(wd) for s, wd in zip(r, widths)).rstrip() for r in cells]
        return "\n".join(lines) + "\n"
    raise InvalidParameters(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


# -- report adapters --------------------------------------------------------------------


def _single(kind, fields: dict, text: str | None = None) -> Table:
    return Table(kind, list(fields), [list(fields.values())], single=True, text=text)


def density_table(est: DensityEstimate) -> Table:
    fields = {
        "value": est.value,
        "value_float": float(est.value),
        "level": est.level,
        "mode": est.mode,
        "is_upper_approximation": est.is_upper_approximation,
    }
    if est.samples is not None:
        fields["samples"] = est.samples
        fields["seed"] = est.seed
    text = f"{fmt_rational(est.value)} = {fmt_float(float(est.value))} at level {est.level} ({est.mode})"
    return _single("density", fields, text)


def measurability_table(rep: MeasurabilityReport) -> Table:
    fields = {
        "outer": rep.outer.value,
        "complement_outer": rep.complement_outer.value,
        "defect": rep.defect,
        "defect_float": float(rep.defect),
        "level": rep.outer.level,
        "mode": rep.outer.mode,
        "verdict": rep.verdict,
        "complement_limit": rep.complement_limit,
    }
    return _single("measurability", fields)


def count_table(res: CountResult) -> Table:
    fields = {
        "count": str(res.count),
        "total": str(res.total),
        "ratio": res.ratio,
        "ratio_float": res.ratio_float,
        "n": res.n,
        "counted": res.kind,
        "mode": res.mode,
    }
    if res.seed is not None:
        fields["seed"] = res.seed
    text = f"{res.count}/{res.total} = {fmt_float(res.ratio_float)} ({res.mode})"
    return _single("count", fields, text)


def ud_table(rep: UDReport) -> Table:
    rows = [[r.modulus, r.residue, r.deviation] for r in rep.rows]
    meta = {"driver": rep.driver, "n": rep.count, "max_deviation": rep.max_deviation}
    return Table("ud-in-z", ["modulus", "residue", "deviation"], rows, meta)


def bud_table(rep: BudReport) -> Table:
    cols = ["driver", "set", "empirical", "level_density", "deviation", "verdict"]
    rows = [[r.driver, r.set_label, r.empirical, r.level_density, r.deviation, r.verdict] for r in rep.rows]
    meta = {"n": rep.count, "level": rep.level, "tolerance": rep.tolerance, "verdict": rep.verdict}
    return Table("bud", cols, rows, meta)


def preservation_table(rep: PreservationReport) -> Table:
    rows = [[r.cell, r.mass, r.image_outer, r.slack] for r in rep.rows]
    meta = {
        "map": rep.map_name,
        "level": rep.level,
        "target_level": rep.target_level,
        "passed": rep.passed,
        "worst_slack": rep.worst_slack,
        "max_slack": rep.max_slack,
    }
    return Table("preservation", ["cell", "mass", "image_outer", "slack"], rows, meta)


def check_table(rep: CheckReport) -> Table:
    fields = {"check": rep.name, "passed": rep.passed, "checked": rep.checked, "violations": list(rep.violations)}
    fields.update(rep.details)
    return _single("check", fields)


def riemann_table(rs: RiemannSum) -> Table:
    fields = {"value": rs.value, "value_float": float(rs.value), "level": rs.level, "lower": rs.lower, "upper": rs.upper}
    return _single("riemann-sum", fields)


def continuity_table(rep: ContinuityReport) -> Table:
    rows = [[lv, m] for lv, m in zip(rep.levels, rep.maxima)]
    return Table("uniform-continuity", ["level", "max_mass"], rows, {"decreasing": rep.decreasing})


def udm_table(rep: UdmWeylReport) -> Table:
    rows = [[h, m] for h, m in rep.magnitudes]
    meta = {"n": rep.n, "domain": rep.domain, "points": rep.points, "grid_bits": rep.grid, "interval_deviation": rep.interval_deviation}
    return Table("udm-weyl", ["h", "magnitude"], rows, meta)


def invariance_table(rep: InvarianceReport) -> Table:
    rows = [[r.n, str(r.count), str(r.transformed_count), str(r.total)] for r in rep.rows]
    meta = {"transform": rep.transform, "counted": rep.kind, "invariant": rep.invariant}
    return Table("invariance", ["n", "count", "transformed_count", "total"], rows, meta)


_ADAPTERS = [
    (DensityEstimate, density_table),
    (MeasurabilityReport, measurability_table),
    (CountResult, count_table),
    (UDReport, ud_table),
    (BudReport, bud_table),
    (PreservationReport, preservation_table),
    (CheckReport, check_table),
    (RiemannSum, riemann_table),
    (ContinuityReport, continuity_table),
    (UdmWeylReport, udm_table),
    (InvarianceReport, invariance_table),
]


def to_table(report) -> Table:
    if isinstance(report, Table):
        return report
    for cls, fn in _ADAPTERS:
        if isinstance(report, cls):
            return fn(report)
    raise InvalidParameters(f"no table layout for {type(report).__name__}")


def render(report, fmt: str) -> str:
    return emit_table(to_table(report), fmt)


__all__ = ["SCHEMA", "FORMATS", "Table", "emit_table", "to_table", "render"]
