"""Rendering of isolation reports: matrix-lab style text listing, a stable
JSON document, and CSV tables for the benchmark runner.

JSON floats for box endpoints use the directed 17-digit decimal rendering,
so a parsed-back report reproduces every certificate endpoint bit for bit.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Optional

from .interval import format_endpoint
from .isolate import IsolationReport
from .poly import PolySystem


def render_text(
    report: IsolationReport, system: PolySystem, phase_timing: bool = False
) -> str:
    """Human-readable listing: one ``intval`` block per certified box,
    the variable order, and the real-root count."""
    endpoint_rows = []
    for cert in report.certificates:
        rows = []
        for comp in cert.box:
            rows.append(
                (format_endpoint(comp.lo, "down"), format_endpoint(comp.hi, "up"))
            )
        endpoint_rows.append(rows)
    width = 2 + max(
        (len(s) for rows in endpoint_rows for pair in rows for s in pair),
        default=0,
    )

    lines: list[str] = []
    for rows in endpoint_rows:
        lines.append("intval  =")
        for lo, hi in rows:
            lines.append(f"[{lo:>{width}}, {hi:>{width}}]")
    lines.append("The order of variables:")
    for name in system.var_names:
        lines.append(f"    '{name}'")
    lines.append(f"The number of real roots: {report.nreal}")

    for zero, reason in report.unverified:
        center = ", ".join(repr(v.real) for v in zero.point)
        lines.append(f"Unverified candidate (path {zero.path_id}, {reason}): {center}")
    for warning in report.warnings:
        lines.append(f"Warning: {warning}")
    if phase_timing:
        lines.extend(_timing_lines(report))
    return "\n".join(lines) + "\n"


def _timing_lines(report: IsolationReport) -> list[str]:
    t = report.timings
    parts = ", ".join(
        f"{name} {t[name]:.3f}"
        for name in ("homotopy", "certify_verify", "disjoint", "narrowing")
        if name in t
    )
    lines = [f"Phase times (seconds): {parts}"]
    ratio = _interval_ratio(t)
    if ratio is not None:
        lines.append(f"Certification/homotopy time ratio: {ratio:.3f}")
    return lines


def _interval_ratio(timings: dict[str, float]) -> Optional[float]:
    homotopy = timings.get("homotopy", 0.0)
    if homotopy <= 0.0:
        return None
    interval_time = sum(
        timings.get(name, 0.0) for name in ("certify_verify", "disjoint", "narrowing")
    )
    return interval_time / homotopy


# ----------------------------------------------------------------------
# JSON
# ----------------------------------------------------------------------


class _Raw(str):
    """Pre-rendered JSON fragment (used for directed decimal numbers)."""


def _json_float(value: Optional[float]) -> Any:
    if value is None:
        return None
    value = float(value)  # numpy scalars repr with a type wrapper
    if not math.isfinite(value):
        return None
    return _Raw(repr(value))


def _dump(obj: Any, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, _Raw):
        return str(obj)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        text = repr(obj)
        return text if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(k)}: {_dump(v, indent + 1)}" for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_dump(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot render {type(obj)!r} as JSON")


def report_document(
    report: IsolationReport, system: PolySystem, phase_timing: bool = False
) -> dict:
    """The report as a JSON-ready tree (endpoints as raw directed decimals)."""
    roots = []
    for cert in report.certificates:
        roots.append(
            {
                "box": [
                    [
                        _Raw(format_endpoint(c.lo, "down")),
                        _Raw(format_endpoint(c.hi, "up")),
                    ]
                    for c in cert.box
                ],
                "center": [_json_float(v) for v in cert.box.mid()],
                "bisections": cert.bisections_used,
                "krawczyk_steps": cert.krawczyk_steps,
                "tolerance_met": cert.tolerance_met,
            }
        )
    unverified = [
        {
            "path": zero.path_id,
            "center": [_json_float(v.real) for v in zero.point],
            "reason": reason,
        }
        for zero, reason in report.unverified
    ]
    diagnostics = []
    for diag in report.diagnostics:
        entry: dict[str, Any] = {
            "path": diag.path_id,
            "outcome": diag.outcome,
            "empirical_radius": _json_float(diag.empirical_rad),
        }
        if diag.kantorovich is not None:
            data = diag.kantorovich
            entry.update(
                {
                    "inverse_jacobian_norm": _json_float(data.inv_jac_norm),
                    "lipschitz": _json_float(data.lipschitz),
                    "newton_step_norm": _json_float(data.newton_step_norm),
                    "h": _json_float(data.h),
                    "radius": _json_float(data.radius),
                    "newton_iters": data.newton_iters,
                }
            )
        if phase_timing:
            entry["verify_seconds"] = _json_float(diag.verify_seconds)
        diagnostics.append(entry)

    doc: dict[str, Any] = {
        "vars": list(system.var_names),
        "tau": _json_float(report.tau),
        "nreal": report.nreal,
        "total_candidates": report.total_candidates,
        "rejected_nonreal": report.rejected_nonreal,
        "roots": roots,
        "unverified": unverified,
        "warnings": list(report.warnings),
        "diagnostics": diagnostics,
    }
    if phase_timing:
        timings: dict[str, Any] = {
            name: _json_float(value) for name, value in report.timings.items()
        }
        ratio = _interval_ratio(report.timings)
        timings["interval_to_homotopy_ratio"] = _json_float(ratio)
        doc["timings"] = timings
    return doc


def render_json(
    report: IsolationReport, system: PolySystem, phase_timing: bool = False
) -> str:
    return _dump(report_document(report, system, phase_timing), 0) + "\n"


# ----------------------------------------------------------------------
# benchmark tables
# ----------------------------------------------------------------------

BENCH_COLUMNS = [
    "system",
    "paths",
    "total_zeros",
    "real_roots",
    "filtered_nonreal",
    "unverified",
    "avg_verify_ms",
    "max_verify_ms",
    "avg_initial_radius",
    "avg_final_radius",
    "homotopy_seconds",
    "interval_to_homotopy_ratio",
    "error",
]


def bench_row(name: str, report: IsolationReport, paths: int) -> dict[str, Any]:
    verify_times = [
        d.verify_seconds for d in report.diagnostics if d.outcome == "verified"
    ]
    init_radii = [
        d.kantorovich.radius
        for d in report.diagnostics
        if d.outcome == "verified" and d.kantorovich is not None
    ]
    final_radii = [float(max(c.box.rad_outer())) for c in report.certificates]
    ratio = _interval_ratio(report.timings)
    return {
        "system": name,
        "paths": paths,
        "total_zeros": report.total_candidates,
        "real_roots": report.nreal,
        "filtered_nonreal": report.rejected_nonreal,
        "unverified": len(report.unverified),
        "avg_verify_ms": _mean(verify_times, 1e3),
        "max_verify_ms": max(verify_times) * 1e3 if verify_times else None,
        "avg_initial_radius": _mean(init_radii),
        "avg_final_radius": _mean(final_radii),
        "homotopy_seconds": report.timings.get("homotopy"),
        "interval_to_homotopy_ratio": ratio,
        "error": None,
    }


def bench_error_row(name: str, message: str) -> dict[str, Any]:
    row: dict[str, Any] = {column: None for column in BENCH_COLUMNS}
    row["system"] = name
    row["error"] = message
    return row


def _mean(values: list[float], scale: float = 1.0) -> Optional[float]:
    if not values:
        return None
    return scale * math.fsum(values) / len(values)


def render_bench_csv(rows: list[dict[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        formatted = {}
        for key in BENCH_COLUMNS:
            value = row.get(key)
            if isinstance(value, float):
                value = f"{value:.6g}"
            formatted[key] = "" if value is None else value
        writer.writerow(formatted)
    return buffer.getvalue()


def render_bench_json(rows: list[dict[str, Any]]) -> str:
    cleaned = []
    for row in rows:
        entry = {}
        for key in BENCH_COLUMNS:
            value = row.get(key)
            if isinstance(value, float):
                value = _json_float(value)
            entry[key] = value
        cleaned.append(entry)
    return _dump(cleaned, 0) + "\n"


def render_bench_text(rows: list[dict[str, Any]]) -> str:
    """Fixed-width human table for terminal output."""
    headers = [
        "system",
        "total",
        "real",
        "filtered",
        "unverified",
        "avg_ms",
        "max_ms",
        "ratio",
    ]
    table = [headers]
    for row in rows:
        if row.get("error"):
            table.append([str(row["system"]), "error: " + str(row["error"])] + [""] * 6)
            continue
        table.append(
            [
                str(row["system"]),
                str(row["total_zeros"]),
                str(row["real_roots"]),
                str(row["filtered_nonreal"]),
                str(row["unverified"]),
                _fmt(row["avg_verify_ms"]),
                _fmt(row["max_verify_ms"]),
                _fmt(row["interval_to_homotopy_ratio"]),
            ]
        )
    widths = [max(len(r[i]) if i < len(r) else 0 for r in table) for i in range(8)]
    lines = []
    for r in table:
        cells = [c.ljust(widths[i]) for i, c in enumerate(r)]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.3g}"
