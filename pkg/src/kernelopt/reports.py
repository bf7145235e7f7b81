"""Delimited-text and JSON writers for run artifacts.

Floats are written with 17 significant digits so every CSV parses back to
the exact in-memory double it came from.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_matrix_csv(path: Path, values: np.ndarray) -> None:
    """Plain comma-separated matrix, one row per spatial index."""
    with open(path, "w") as fh:
        for row in np.asarray(values):
            fh.write(",".join(fmt(v) for v in row))
            fh.write("\n")


def write_table_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) if isinstance(v, float) else str(v) for v in row))
            fh.write("\n")


@dataclass
class RunReport:
    """What a CLI command produced: artifact paths plus summary payload."""

    scenario: str
    command: str
    timing_seconds: float
    artifacts: dict[str, str] = field(default_factory=dict)
    payload: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        doc = {
            "scenario": self.scenario,
            "command": self.command,
            "timing_seconds": self.timing_seconds,
            "artifacts": self.artifacts,
        }
        doc.update(self.payload)
        return doc

    def write(self, path: Path) -> None:
        self.artifacts["report"] = str(path)
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")
