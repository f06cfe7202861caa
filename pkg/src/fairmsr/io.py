"""Instance files, result documents and plot data."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import TextIO

import numpy as np

from .constraints import ColorTable, ConstraintSpec, parse_constraint
from .geometry import UsageError, exact_meb

SCHEMA = 1


class InstanceError(UsageError):
    """Malformed instance or table file; the message carries the line number."""


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def parse_instance(text: str, source: str = "<input>"):
    """Parse CSV points with an optional color column.

    Colors come either from a header naming a ``color`` column or from a
    final field written ``color:<label>``. Blank lines and ``#`` comments are
    skipped. Returns ``(points, colors or None)``.
    """
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        fields = [f.strip() for f in row]
        if not fields or all(f == "" for f in fields) or fields[0].startswith("#"):
            continue
        rows.append((lineno, fields))
    if not rows:
        raise InstanceError(f"{source}: no data rows")

    color_col = None
    header = None
    lineno, first = rows[0]
    if not all(_is_number(f) or f.lower().startswith("color:") for f in first):
        header = [f.lower() for f in first]
        if "color" in header:
            color_col = header.index("color")
        rows = rows[1:]
        if not rows:
            raise InstanceError(f"{source}:{lineno}: header without data rows")

    width = len(header) if header else len(rows[0][1])
    coords, labels = [], []
    for lineno, fields in rows:
        if len(fields) != width:
            raise InstanceError(f"{source}:{lineno}: expected {width} fields, got {len(fields)}")
        lab = None
        if color_col is not None:
            lab = fields[color_col]
            nums = fields[:color_col] + fields[color_col + 1:]
        elif fields[-1].lower().startswith("color:"):
            lab = fields[-1].split(":", 1)[1].strip()
            nums = fields[:-1]
        else:
            nums = fields
        if lab is not None and lab == "":
            raise InstanceError(f"{source}:{lineno}: empty color label")
        try:
            vals = [float(f) for f in nums]
        except ValueError as exc:
            raise InstanceError(f"{source}:{lineno}: {exc}") from None
        if not vals:
            raise InstanceError(f"{source}:{lineno}: no coordinates")
        if not all(math.isfinite(v) for v in vals):
            raise InstanceError(f"{source}:{lineno}: non-finite coordinate")
        coords.append(vals)
        labels.append(lab)
    has = [lab is not None for lab in labels]
    if any(has) and not all(has):
        bad = next(i for i, h in enumerate(has) if h != has[0])
        raise InstanceError(f"{source}:{rows[bad][0]}: color column present on some rows only")
    colors = ColorTable.from_labels(labels) if all(has) else None
    return np.array(coords, dtype=float), colors


def read_instance(path: str | Path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InstanceError(f"{path}: {exc.strerror}") from None
    return parse_instance(text, str(path))


def format_instance(points, colors: ColorTable | None = None) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    for i, p in enumerate(np.asarray(points, dtype=float)):
        row = [repr(float(v)) for v in p]
        if colors is not None:
            row.append(f"color:{colors.labels[colors.color_of[i]]}")
        w.writerow(row)
    return out.getvalue()


def read_range_table(path: str | Path, colors: ColorTable | None) -> dict:
    """Lines ``label,alpha,beta``; returns color id -> (alpha, beta)."""
    if colors is None:
        raise InstanceError("range-balance needs a colored instance")
    ids = {lab: i for i, lab in enumerate(colors.labels)}
    table = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InstanceError(f"{path}: {exc.strerror}") from None
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        fields = [f.strip() for f in row]
        if not fields or fields == [""] or fields[0].startswith("#"):
            continue
        if len(fields) != 3:
            raise InstanceError(f"{path}:{lineno}: expected label,alpha,beta")
        lab, a, b = fields
        if lab not in ids:
            raise InstanceError(f"{path}:{lineno}: unknown color {lab!r}")
        try:
            table[ids[lab]] = (Fraction(a), Fraction(b))
        except (ValueError, ZeroDivisionError):
            raise InstanceError(f"{path}:{lineno}: alpha and beta must be numbers") from None
    return table


def load_constraint(text: str, colors: ColorTable | None) -> ConstraintSpec:
    name, _, arg = text.partition(":")
    if name.strip().lower() == "range-balance":
        return parse_constraint("range-balance", read_range_table(arg.strip(), colors))
    return parse_constraint(text)


def digest(points, colors: ColorTable | None = None) -> str:
    h = hashlib.sha256()
    arr = np.ascontiguousarray(points, dtype="<f8")
    h.update(repr(arr.shape).encode())
    h.update(arr.tobytes())
    if colors is not None:
        h.update(repr(colors.color_of).encode())
    return h.hexdigest()[:16]


def _cluster_records(points, clusters) -> list:
    out = []
    for j, c in enumerate(clusters):
        if not c:
            continue
        b = exact_meb(np.asarray(points)[list(c)])
        out.append({"id": j + 1, "points": list(c), "center": list(b.center),
                    "radius": b.radius})
    return out


def solve_document(points, colors, solution, input_name: str | None = None) -> dict:
    doc = {
        "schema": SCHEMA,
        "command": "solve",
        "instance": {"digest": digest(points, colors), "n": len(points),
                     "d": int(np.asarray(points).shape[1]), "source": input_name},
        "feasible": solution.feasible,
        "parameters": solution.params,
        "clusters": _cluster_records(points, solution.clusters) if solution.feasible else [],
        "outliers": list(solution.outliers),
        "balls": [None if b is None else b.to_dict() for b in solution.balls],
        "reported_cost": solution.reported_cost if solution.feasible else None,
        "refined_cost": solution.refined_cost if solution.feasible else None,
        "guarantee_factor": solution.params.get("guarantee_factor"),
        "diagnostics": solution.diagnostics,
    }
    return doc


def oracle_document(points, colors, k: int, spec: ConstraintSpec, result,
                    input_name: str | None = None) -> dict:
    return {
        "schema": SCHEMA,
        "command": "oracle",
        "instance": {"digest": digest(points, colors), "n": len(points),
                     "d": int(np.asarray(points).shape[1]), "source": input_name},
        "feasible": result.feasible,
        "parameters": {"k": k, "constraint": spec.describe()},
        "clusters": _cluster_records(points, result.clusters) if result.feasible else [],
        "outliers": list(result.outliers),
        "refined_cost": result.cost if result.feasible else None,
        "diagnostics": {"enumerated": result.enumerated, "pruned": result.pruned},
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def validate_document(doc: dict, points, tol: float = 1e-9) -> None:
    """Check a result document against its instance; raises UsageError."""
    if doc.get("schema") != SCHEMA:
        raise UsageError(f"unsupported schema {doc.get('schema')!r}")
    pts = np.asarray(points, dtype=float)
    if not doc["feasible"]:
        return
    seen = []
    for c in doc["clusters"]:
        seen.extend(c["points"])
    seen.extend(doc.get("outliers", []))
    if sorted(seen) != list(range(len(pts))):
        raise UsageError("clusters and outliers do not partition the point indices")
    total = math.fsum(exact_meb(pts[c["points"]]).radius for c in doc["clusters"])
    if abs(total - doc["refined_cost"]) > tol * max(1.0, total):
        raise UsageError(f"refined cost {doc['refined_cost']} does not match clusters ({total})")
    for c in doc["clusters"]:
        r = exact_meb(pts[c["points"]]).radius
        if abs(r - c["radius"]) > tol * max(1.0, r):
            raise UsageError(f"cluster {c['id']} radius does not match its points")


def write_plot_data(out: TextIO, points, clusters, colors: ColorTable | None) -> None:
    """One row per point: coordinates, cluster id (0 for outliers), color label."""
    pts = np.asarray(points, dtype=float)
    lab = [0] * len(pts)
    for j, c in enumerate(clusters):
        for i in c:
            lab[i] = j + 1
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f"x{a}" for a in range(pts.shape[1])] + ["cluster", "color"])
    for i, p in enumerate(pts):
        col = colors.labels[colors.color_of[i]] if colors is not None else ""
        w.writerow([repr(float(v)) for v in p] + [lab[i], col])
