"""Result tables with a metadata block, written as CSV or JSON."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

FORMATS = ("csv", "json")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.16e}"
    return str(value)


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return _fmt(value)
    return value


@dataclass
class ResultTable:
    columns: list[tuple[str, str]]  # (name, unit)
    rows: list[list] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values, schema has {len(self.columns)}")
        self.rows.append(list(values))

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.columns]

    def column(self, name: str) -> list:
        i = self.names.index(name)
        return [row[i] for row in self.rows]

    def stamp(self, command: str, config: dict, version: str):
        self.metadata = {"command": command, "tool_version": version, "config": config,
                         "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in ("command", "tool_version", "timestamp"):
            if key in self.metadata:
                buf.write(f"# {key}: {self.metadata[key]}\n")
        if "config" in self.metadata:
            buf.write(f"# config: {json.dumps(self.metadata['config'], sort_keys=True)}\n")
        buf.write("# units: " + ",".join(unit for _, unit in self.columns) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.names)
        for row in self.rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"metadata": self.metadata,
               "columns": [{"name": n, "unit": u} for n, u in self.columns],
               "rows": [[_jsonable(v) for v in row] for row in self.rows]}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")

    @classmethod
    def from_json(cls, text: str) -> "ResultTable":
        doc = json.loads(text)
        return cls([(c["name"], c["unit"]) for c in doc["columns"]], doc["rows"], doc["metadata"])
