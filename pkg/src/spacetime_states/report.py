"""Check records and deterministic JSON/CSV serialization of reports."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .lattice import Hypersurface, Region
from .qstate import DensityOperator, LinearOperator, StateVector

SCHEMA_VERSION = 1
SIG_DIGITS = 12


@dataclass
class Check:
    name: str
    expected: Any
    actual: Any
    distance: float
    passed: bool

    @classmethod
    def within(cls, name: str, expected, actual, distance: float, tol: float) -> "Check":
        return cls(name, expected, actual, float(distance), bool(distance < tol))

    @classmethod
    def at_least(cls, name: str, expected, actual, value: float, bound: float) -> "Check":
        return cls(name, expected, actual, float(value), bool(value >= bound))

    def to_dict(self) -> dict:
        return {
            "actual": self.actual,
            "distance": self.distance,
            "expected": self.expected,
            "name": self.name,
            "pass": self.passed,
        }


@dataclass
class ReportEnvelope:
    command: str
    parameters: dict
    section: str
    results: dict
    checks: list[Check] = field(default_factory=list)

    @property
    def overall_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "checks": [c.to_dict() for c in self.checks],
            "command": self.command,
            "overall_pass": self.overall_pass,
            "parameters": self.parameters,
            "results": self.results,
            "schema_version": SCHEMA_VERSION,
            "section": self.section,
        }


def fmt_real(x: float) -> float | None:
    """Round to 12 significant digits; NaN and infinities become None."""
    x = float(x)
    if not math.isfinite(x):
        return None
    r = float(f"{x:.{SIG_DIGITS}g}")
    return 0.0 if r == 0 else r


def jsonable(obj: Any) -> Any:
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt_real(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"im": fmt_real(obj.imag), "re": fmt_real(obj.real)}
    if isinstance(obj, DensityOperator):
        return _matrix(obj.matrix)
    if isinstance(obj, LinearOperator):
        return _matrix(obj.matrix)
    if isinstance(obj, StateVector):
        return _matrix(obj.amplitudes)
    if isinstance(obj, Hypersurface):
        return obj.to_list()
    if isinstance(obj, Region):
        return list(obj.sites)
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return _matrix(obj)
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _matrix(a: np.ndarray) -> dict:
    a = np.asarray(a)
    return {"im": jsonable(np.real(a.imag)), "re": jsonable(np.real(a.real))}


def to_json(envelope: ReportEnvelope) -> str:
    return json.dumps(jsonable(envelope.to_dict()), sort_keys=True, indent=2, allow_nan=False) + "\n"


def to_text(envelope: ReportEnvelope) -> str:
    lines = [f"{envelope.command} [{envelope.section}]"]
    for c in envelope.checks:
        d = fmt_real(c.distance)
        lines.append(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  distance={d}")
    lines.append(f"overall: {'PASS' if envelope.overall_pass else 'FAIL'}")
    return "\n".join(lines) + "\n"


def emit_csv(profile: Sequence[float], header: Sequence[str] = ("surface_index", "distance")) -> str:
    """One row per surface: index and distance, preceded by a header row."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for k, d in enumerate(profile):
        writer.writerow([k, _csv_real(d)])
    return buf.getvalue()


def checks_csv(checks: Sequence[Check]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "distance", "pass"])
    for c in checks:
        writer.writerow([c.name, _csv_real(c.distance), "true" if c.passed else "false"])
    return buf.getvalue()


def _csv_real(x: float) -> str:
    r = fmt_real(x)
    return "nan" if r is None else repr(r)
