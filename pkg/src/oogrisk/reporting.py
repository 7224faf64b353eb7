"""Structured report documents and flat delimited tables.

Every report is a plain JSON document validated against a schema shipped
with the package.  Infinity is a first-class value and serializes as the
literal token "inf" so unbounded samples survive round-trips.  Canonical
mode drops timing fields so identical runs produce byte-identical output.
"""

import csv
import importlib.resources
import json
import math

import jsonschema
import numpy as np

from .errors import ValidationError

__all__ = [
    "jsonable",
    "from_token",
    "validate_document",
    "write_report",
    "impact_report",
    "risk_report",
    "allocation_report",
    "zeros_report",
    "oracle_report",
    "error_document",
    "write_samples_csv",
    "write_var_curve_csv",
    "write_ledger_csv",
    "write_zeros_csv",
]

REPORT_VERSION = 1


def jsonable(obj):
    """Recursively convert to JSON-safe values; non-finite floats to tokens."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    return obj


def from_token(value):
    """Inverse of the non-finite token convention."""
    if value == "inf":
        return math.inf
    if value == "-inf":
        return -math.inf
    if value == "nan":
        return math.nan
    return value


def _schema(kind):
    ref = importlib.resources.files("oogrisk") / "schemas" / f"{kind}.schema.json"
    return json.loads(ref.read_text())


def validate_document(doc):
    """Validate a report against the shipped schema for its kind."""
    kind = doc.get("kind")
    if not kind:
        raise ValidationError("report document has no 'kind' field")
    try:
        jsonschema.validate(doc, _schema(kind))
    except FileNotFoundError:
        raise ValidationError(f"no schema shipped for report kind {kind!r}")
    except jsonschema.ValidationError as exc:
        raise ValidationError(f"report fails its schema: {exc.message}")
    return doc


def write_report(doc, path):
    """Validate and write a report document with stable key order."""
    validate_document(doc)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _base(kind, model_name, canonical):
    doc = {"kind": kind, "report_version": REPORT_VERSION, "model": model_name}
    doc["canonical"] = bool(canonical)
    return doc


def _classification(cls):
    out = {
        "verdict": cls.verdict,
        "degraded": cls.degraded,
        "tol_circle": cls.tol_circle,
        "tol_share": cls.tol_share,
    }
    if cls.witness is not None:
        out["witness"] = {
            "z": jsonable(complex(cls.witness.z)),
            "direction": jsonable(cls.witness.direction),
        }
    return out


def impact_report(model_name, delta, result, fdi=None, classification=None,
                  canonical=False):
    doc = _base("impact", model_name, canonical)
    doc["delta"] = jsonable(list(delta))
    doc["status"] = result.status
    doc["gamma"] = jsonable(result.gamma)
    doc["solver"] = jsonable(result.solver_stats)
    if fdi is not None:
        doc["fdi"] = jsonable(fdi)
    if classification is not None:
        doc["boundedness"] = jsonable(_classification(classification))
    return doc


def risk_report(rep, curve=None, canonical=False, model_name=""):
    doc = _base("risk", model_name, canonical)
    doc.update(
        var_value=jsonable(rep.var_value),
        beta=rep.beta,
        epsilon1=rep.epsilon1,
        beta1=rep.beta1,
        N1=rep.N1,
        seed=rep.seed,
        bounded_count=rep.bounded_count,
        failure_count=rep.failure_count,
        samples=[
            {
                "index": s.index,
                "delta": jsonable(list(s.delta)),
                "gamma": jsonable(s.gamma),
                "status": s.status,
            }
            for s in rep.samples
        ],
    )
    if curve is not None:
        doc["var_curve"] = [
            {"beta": jsonable(b), "var": jsonable(v)} for b, v in curve
        ]
    if not canonical:
        doc["timing_s"] = rep.timing
    return doc


def _ledger_rows(var_res, nom_res):
    nom = {}
    if nom_res is not None:
        nom = {e.subset: e.value for e in nom_res.ledger}
    rows = []
    for e in var_res.ledger:
        row = {"subset": list(e.subset), "value": jsonable(e.value)}
        if e.bounded_count is not None:
            row["bounded_count"] = e.bounded_count
        row["failure_count"] = e.failure_count
        if e.subset in nom:
            row["nominal_value"] = jsonable(nom[e.subset])
        rows.append(row)
    return rows


def allocation_report(var_res, nom_res=None, canonical=False, model_name=""):
    doc = _base("allocation", model_name, canonical)
    doc.update(
        metric=var_res.metric,
        best_set=list(var_res.best_set),
        best_value=jsonable(var_res.best_value),
        seed=var_res.seed,
        ledger=_ledger_rows(var_res, nom_res),
    )
    if nom_res is not None:
        doc["nominal_best_set"] = list(nom_res.best_set)
        doc["nominal_best_value"] = jsonable(nom_res.best_value)
    return doc


def zeros_report(records, classification=None, canonical=False, model_name=""):
    doc = _base("zeros", model_name, canonical)
    doc["zeros"] = [
        {
            "z": jsonable(complex(r.z)),
            "abs_z": jsonable(abs(r.z)),
            "direction": jsonable(r.direction),
            "on_unit_circle": r.on_unit_circle,
            "shared_with_performance": r.shared_with_performance,
            "degraded": r.degraded,
        }
        for r in records
    ]
    if classification is not None:
        doc["boundedness"] = jsonable(_classification(classification))
    return doc


def oracle_report(model_name, sdp_result, oracle_result, check,
                  horizons, canonical=False):
    doc = _base("oracle", model_name, canonical)
    doc.update(
        sdp_status=sdp_result.status,
        sdp_gamma=jsonable(sdp_result.gamma),
        oracle_status=oracle_result.status,
        oracle_bound=jsonable(oracle_result.bound),
        tail_estimate=jsonable(oracle_result.tail_estimate),
        attack_horizon=horizons[0],
        evaluation_horizon=horizons[1],
        attack_check=jsonable(check) if check is not None else None,
    )
    if (sdp_result.status == "bounded"
            and oracle_result.status == "ok"
            and sdp_result.gamma > 0):
        doc["coverage"] = jsonable(oracle_result.bound / sdp_result.gamma)
    return doc


def error_document(exc):
    """Machine-readable failure description for the CLI."""
    return {
        "kind": "error",
        "report_version": REPORT_VERSION,
        "error_type": type(exc).__name__,
        "message": str(exc),
        "exit_code": getattr(exc, "exit_code", 1),
    }


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _token(x):
    v = jsonable(float(x))
    return v


def write_samples_csv(rep, path):
    """Per-sample flat table with an above/below-VaR flag."""
    dim = len(rep.samples[0].delta) if rep.samples else 0
    header = ["index"] + [f"delta_{i}" for i in range(dim)] + [
        "gamma", "status", "above_var",
    ]
    rows = []
    for s in rep.samples:
        above = (s.status != "numerical_failure"
                 and s.gamma > rep.var_value)
        rows.append([s.index, *[repr(d) for d in s.delta],
                     _token(s.gamma), s.status, str(bool(above)).lower()])
    _write_rows(path, header, rows)


def write_var_curve_csv(curve, path):
    _write_rows(path, ["beta", "var"],
                [[repr(float(b)), _token(v)] for b, v in curve])


def write_ledger_csv(var_res, path, nom_res=None):
    """Allocation ledger keyed by subset; grouped-bar plot data."""
    rows = _ledger_rows(var_res, nom_res)
    header = ["subset", "value", "nominal_value"]
    _write_rows(path, header, [
        ["+".join(r["subset"]) if r["subset"] else "none",
         r["value"], r.get("nominal_value", "")]
        for r in rows
    ])


def write_zeros_csv(records, path):
    _write_rows(path, ["re_z", "im_z", "abs_z", "on_unit_circle",
                       "shared_with_performance", "degraded"], [
        [repr(r.z.real), repr(r.z.imag), repr(abs(r.z)),
         str(r.on_unit_circle).lower(),
         str(r.shared_with_performance).lower(),
         str(r.degraded).lower()]
        for r in records
    ])
