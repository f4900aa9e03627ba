"""Persistence of experiment records: JSON plus a flat CSV, written atomically."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

from .experiments import ExperimentRecord


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to a temp file next to ``path`` and rename it into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def payload_bytes(record: ExperimentRecord) -> bytes:
    """Canonical bytes of everything except run metadata; equal for reproducible reruns."""
    body = {k: v for k, v in record.to_json().items() if k != "meta"}
    return json.dumps(body, sort_keys=True, separators=(",", ":"), allow_nan=False).encode()


def csv_text(record: ExperimentRecord) -> str:
    head, rows = record.csv_rows()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(head)
    w.writerows(rows)
    return buf.getvalue()


def write_record(record: ExperimentRecord, path) -> tuple[Path, Path]:
    """Write ``path`` (JSON) and the same stem with ``.csv``; returns both paths."""
    path = Path(path)
    csv_path = path.with_suffix(".csv")
    atomic_write_text(path, dumps(record.to_json()))
    atomic_write_text(csv_path, csv_text(record))
    return path, csv_path


def read_record(path) -> ExperimentRecord:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    return ExperimentRecord(obj["kind"], obj["seed"], obj["config"], obj["payload"], obj.get("meta", {}))
