"""CSV/JSON emission shared by all modules.

CSV: header row, RFC-4180 quoting, '\n' endings, floats at 17 significant
digits so round-trips are bit-exact. Row order is the caller's; emitters
never reorder.
"""
from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field as dfield, asdict
from pathlib import Path


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return v


def emit_table(rows, schema, destination) -> Path:
    """Write rows (sequences matching schema column names) to a CSV file."""
    destination = Path(destination)
    try:
        with open(destination, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(schema)
            for row in rows:
                if len(row) != len(schema):
                    raise ValueError(
                        f"row width {len(row)} != schema width {len(schema)}")
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write table {destination}: {exc}") from exc
    return destination


def append_rows(rows, schema, destination) -> int:
    """Append rows, writing the header first if the file does not exist."""
    destination = Path(destination)
    new_file = not destination.exists()
    with open(destination, "a", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if new_file:
            writer.writerow(schema)
        count = 0
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
            count += 1
    return count


def count_data_rows(destination) -> int:
    destination = Path(destination)
    if not destination.exists():
        return 0
    with open(destination, newline="") as fh:
        return max(0, sum(1 for _ in csv.reader(fh)) - 1)


def read_table(path):
    """(schema, rows-as-strings); inverse of emit_table up to parsing."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        schema = next(reader)
        return schema, [row for row in reader]


@dataclass
class RunManifest:
    command: str
    config_hash: str
    outputs: list = dfield(default_factory=list)
    wall_time: float = 0.0
    versions: str = ""

    def write(self, path) -> Path:
        path = Path(path)
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


class Stopwatch:
    def __init__(self):
        self.start = time.monotonic()

    def elapsed(self) -> float:
        return time.monotonic() - self.start
