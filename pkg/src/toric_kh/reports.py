"""Fan files and report serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, is_dataclass
from enum import Enum
from fractions import Fraction
from typing import Any

from .fan import Cone, Fan, check_fan, make_wps_fan


class FanParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


def _int_list(value, what: str) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise FanParseError(f"{what} must be a list of integers, got {value!r}")
    return value


def parse_fan(text: str) -> Fan:
    """Parse and validate a fan file (JSON with dim/rays/max_cones, or a "wps" weight list)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FanParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise FanParseError("fan file must hold a JSON object")
    label = doc.get("label")
    if "wps" in doc:
        fan = make_wps_fan(_int_list(doc["wps"], "wps"))
        if label:
            fan = Fan(fan.dim, fan.rays, fan.max_cones, label, fan.warnings)
        return fan
    for key in ("dim", "rays", "max_cones"):
        if key not in doc:
            raise FanParseError(f"missing key {key!r}")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise FanParseError("dim must be an integer")
    if not isinstance(doc["rays"], list) or not isinstance(doc["max_cones"], list):
        raise FanParseError("rays and max_cones must be lists")
    rays = [_int_list(r, f"ray {i}") for i, r in enumerate(doc["rays"])]
    cones = [_int_list(c, f"max cone {i}") for i, c in enumerate(doc["max_cones"])]
    return check_fan(Fan.build(dim, rays, cones, label=label))


def fan_to_text(fan: Fan) -> str:
    return json.dumps(fan.to_dict(), sort_keys=True)


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, Cone):
        return list(obj.ray_indices)
    if isinstance(obj, Fan):
        return obj.to_dict()
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    return obj


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    assumptions: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"command": self.command, "inputs": to_jsonable(self.inputs),
                "results": to_jsonable(self.results), "warnings": list(self.warnings),
                "assumptions": list(self.assumptions)}

    @classmethod
    def from_dict(cls, d: dict) -> Report:
        return cls(d["command"], d.get("inputs", {}), d.get("results", {}),
                   list(d.get("warnings", [])), list(d.get("assumptions", [])))


def _fmt(v: Any) -> str:
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True, ensure_ascii=False)
    if v is None:
        return "-"
    return str(v)


def _table(rows: list[dict]) -> list[str]:
    cols = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    cells = [[_fmt(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    out = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip(),
           "  ".join("-" * w for w in widths)]
    out += ["  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() for row in cells]
    return out


def _human_block(d: dict, indent: str = "") -> list[str]:
    lines = []
    scalars = [(k, v) for k, v in d.items()
               if not isinstance(v, dict) and not (isinstance(v, list) and v and all(isinstance(x, dict) for x in v))]
    width = max((len(k) for k, _ in scalars), default=0)
    for k, v in scalars:
        lines.append(f"{indent}{k.ljust(width)} : {_fmt(v)}")
    for k, v in d.items():
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.extend(_human_block(v, indent + "  "))
        elif isinstance(v, list) and v and all(isinstance(x, dict) for x in v):
            lines.append(f"{indent}{k}:")
            lines.extend(indent + "  " + row for row in _table(v))
    return lines


def emit_report(report: Report, fmt: str = "machine") -> str:
    d = report.to_dict()
    if fmt == "machine":
        return json.dumps(d, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    if fmt != "human":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"== {d['command']} =="]
    if d["inputs"]:
        lines.append("inputs:")
        lines.extend(_human_block(d["inputs"], "  "))
    lines.append("results:")
    lines.extend(_human_block(d["results"], "  "))
    lines.append("warnings: " + ("none" if not d["warnings"] else ""))
    lines.extend(f"  - {w}" for w in d["warnings"])
    if d["assumptions"]:
        lines.append("assumptions:")
        lines.extend(f"  - {a}" for a in d["assumptions"])
    return "\n".join(lines)


def parse_report(text: str) -> Report:
    return Report.from_dict(json.loads(text))
