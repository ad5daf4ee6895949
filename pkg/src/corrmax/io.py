"""CSV ingestion, JSON/CSV report writing and run configuration files."""

import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .corr_core import DataMatrix
from .errors import CorrmaxError, InsufficientData, InvalidConfig, ParseError, ShapeError

SCHEMA_VERSION = 1


def _is_number(token):
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_csv(path):
    """Read a comma-separated matrix; rows are observations.

    A first row containing any non-numeric token is treated as a header.
    Blank lines are skipped. Line numbers in errors are 1-based file lines.
    """
    rows, lines = [], []
    header_checked = False
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, raw in enumerate(csv.reader(fh), start=1):
            if not raw or all(not c.strip() for c in raw):
                continue
            cells = [c.strip() for c in raw]
            if not header_checked:
                header_checked = True
                if not all(_is_number(c) for c in cells):
                    continue
            rows.append(cells)
            lines.append(lineno)
    if not rows:
        raise InsufficientData(f"{path}: no data rows")
    width = len(rows[0])
    data = np.empty((len(rows), width))
    for r, (cells, lineno) in enumerate(zip(rows, lines)):
        if len(cells) != width:
            raise ShapeError(lineno, f"line {lineno}: expected {width} cells, got {len(cells)}")
        for c, tok in enumerate(cells):
            try:
                v = float(tok)
            except ValueError:
                raise ParseError(lineno, c + 1, tok) from None
            if not math.isfinite(v):
                raise ParseError(lineno, c + 1, tok)
            data[r, c] = v
    n, p = data.shape
    if n < 2 or p < 2:
        raise InsufficientData(f"{path}: need at least 2 rows and 2 columns, got {n}x{p}")
    return DataMatrix(data)


def jsonable(obj):
    """Convert reports to plain JSON types; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def report_document(report, kind, **kwargs):
    body = report.to_dict(**kwargs) if hasattr(report, "to_dict") else dict(report)
    return jsonable({"schema_version": SCHEMA_VERSION, "kind": kind, **body})


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_report(report, path, kind="report", values_csv=None, **kwargs):
    """Write ``report`` as JSON; optionally mirror statistic arrays to CSV.

    Output is byte-identical for identical reports (sorted keys, repr floats).
    """
    doc = report_document(report, kind, **kwargs)
    try:
        Path(path).write_text(dumps(doc), encoding="utf-8")
    except OSError as exc:
        raise CorrmaxError(f"cannot write {path}: {exc}") from exc
    if values_csv is not None:
        write_values_csv(report.values, values_csv)
    return doc


def write_values_csv(values, path):
    names = list(values)
    cols = [np.asarray(values[k]) for k in names]
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["replication", *names])
            for r in range(len(cols[0])):
                w.writerow([r, *(repr(float(c[r])) for c in cols)])
    except OSError as exc:
        raise CorrmaxError(f"cannot write {path}: {exc}") from exc


def read_report(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


@dataclass
class RunConfig:
    """Everything a CLI run needs; stored as JSON."""

    command: str = "simulate"
    dist: str = "normal"
    standardized: bool = False
    n: int = 200
    p: int = 200
    reps: int = 1000
    seed: int = 1
    threads: int = 1
    mode: str = "test_stat"
    lemma: str = None
    thresholds: list = field(default_factory=list)
    block: int = 64
    n_grid: list = field(default_factory=lambda: [10, 20, 40, 80, 160, 320])
    x_grid: list = field(default_factory=lambda: [3.0, 10.0, 30.0, 100.0, 300.0, 1000.0])
    series_n_max: int = None
    skip_degenerate: bool = False
    decay_factor: float = 10.0
    floor: float = 1e-3
    input: str = None
    output: str = None

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def save_config(cfg, path):
    Path(path).write_text(dumps(cfg.to_dict()), encoding="utf-8")


def load_config(path):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
    return RunConfig.from_dict(data)
