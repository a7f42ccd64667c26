"""Codebook JSON, CSV tables and run manifests.

Every file is written to a temporary sibling and renamed into place, so a
failed run never leaves a truncated output behind.
"""

import csv
import io
import json
import os
import tempfile
from datetime import datetime, timezone

import numpy as np

from .codebook import CodebookSet
from .factorgraph import FactorGraph
from .metrics import TABLE_CONVENTION, MetricsReport
from .udcg import DesignError, DesignParams

try:
    from importlib.metadata import version as _pkg_version
    TOOL_VERSION = _pkg_version("artifact")
except Exception:  # not installed
    TOOL_VERSION = "0+unknown"

_PLACEHOLDER = "__CODEBOOK_ARRAY__"


def atomic_write_text(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def make_manifest(command, parameters, inputs=(), outputs=(), seed=None):
    return {
        "command": command,
        "parameters": parameters,
        "inputs": [os.path.abspath(p) for p in inputs],
        "outputs": [os.path.abspath(p) for p in outputs],
        "seed": seed,
        "tool_version": TOOL_VERSION,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def write_manifest_beside(path, manifest):
    atomic_write_text(path + ".manifest.json", json.dumps(manifest, indent=2) + "\n")


def _render_books(books):
    # 17 significant digits round-trip IEEE doubles exactly
    def num(x):
        return format(float(x), ".17g")

    users = []
    for book in books:
        rows = []
        for row in book:
            rows.append("[" + ", ".join(f"[{num(z.real)}, {num(z.imag)}]" for z in row) + "]")
        users.append("[\n      " + ",\n      ".join(rows) + "\n    ]")
    return "[\n    " + ",\n    ".join(users) + "\n  ]"


def codebook_to_json(cbs, manifest=None):
    meta = {
        "name": cbs.name,
        "params": cbs.params.to_dict() if cbs.params is not None else None,
        "normalization": float(cbs.normalization),
        "interleaved": bool(cbs.interleaved),
    }
    if cbs.report is not None:
        meta["metrics"] = cbs.report.to_dict()
    doc = {
        "K": cbs.K, "J": cbs.J, "M": cbs.M,
        "factor_graph": cbs.graph.to_bitstrings(),
        "codebooks": _PLACEHOLDER,
        "meta": meta,
    }
    if manifest is not None:
        doc["manifest"] = manifest
    text = json.dumps(doc, indent=2)
    return text.replace(f'"{_PLACEHOLDER}"', _render_books(cbs.books)) + "\n"


def codebook_from_json(text, name=None):
    """Parse the codebook JSON schema; external codebooks need no ``meta``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DesignError(f"codebook file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DesignError("codebook file must hold a JSON object")
    for key in ("K", "J", "M", "factor_graph", "codebooks"):
        if key not in doc:
            raise DesignError(f"codebook file lacks the {key!r} field")
    graph = FactorGraph.from_bitstrings(doc["factor_graph"])
    try:
        arr = np.asarray(doc["codebooks"], dtype=float)
    except (TypeError, ValueError):
        raise DesignError("codebooks must be a J x K x M x [re, im] numeric array") from None
    expected = (doc["J"], doc["K"], doc["M"], 2)
    if arr.shape != expected:
        raise DesignError(f"codebooks array has shape {arr.shape}, expected {expected}")
    books = arr[..., 0] + 1j * arr[..., 1]
    meta = doc.get("meta") or {}
    try:
        params = DesignParams.from_dict(meta["params"]) if meta.get("params") else None
        report = MetricsReport.from_dict(meta["metrics"]) if meta.get("metrics") else None
    except (KeyError, TypeError) as exc:
        raise DesignError(f"malformed codebook meta block: {exc!r}") from None
    return CodebookSet(books=books, graph=graph, params=params,
                       normalization=float(meta.get("normalization", 1.0)),
                       interleaved=bool(meta.get("interleaved", False)),
                       name=name or meta.get("name", "imported"), report=report)


def save_codebook(path, cbs, manifest=None):
    atomic_write_text(path, codebook_to_json(cbs, manifest))


def load_codebook(path):
    with open(path) as fh:
        text = fh.read()
    return codebook_from_json(text, name=None)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_trace_csv(path, trace):
    atomic_write_text(path, _csv_text(["t", "gain"], [(repr(t), repr(g)) for t, g in trace]))


def write_ber_csv(path, curve):
    rows = [(repr(e), b, err, repr(ber), seed) for e, b, err, ber, seed in curve.to_rows()]
    atomic_write_text(path, _csv_text(["ebno_db", "bits", "errors", "ber", "seed"], rows))


def read_ber_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def med_table_rows(named_reports):
    """Rows of the per-resource MED table, one per scheme.

    ``d_k_min`` lists exact distances of the stored (unit average energy)
    codebooks; ``table`` uses the unit total energy convention at 4 decimals.
    """
    rows = []
    for name, M, report in named_reports:
        rows.append((name, M,
                     "/".join(repr(float(d)) for d in report.per_rn_med),
                     "/".join(f"{d:.4f}" for d in report.per_rn_med_table)))
    return rows


def write_med_table_csv(path, named_reports):
    header = ["scheme", "M", "d_k_min", "table"]
    text = _csv_text(header, med_table_rows(named_reports))
    atomic_write_text(path, text)


def write_metrics_json(path, report, manifest=None):
    doc = {"metrics": report.to_dict(), "table_convention": TABLE_CONVENTION}
    if manifest is not None:
        doc["manifest"] = manifest
    atomic_write_text(path, json.dumps(doc, indent=2) + "\n")
