"""Readers for spinchaos output files: commented-header CSVs and scan manifests.

plotkit never recomputes physics; it consumes only the files the simulation
CLI emits. Every rendered figure records the sha256 of the manifest (or, for
free-standing files, of the commented header block) so an image can be traced
back to the exact run that produced it.
"""

import csv
import hashlib
import io as _io
import json
from pathlib import Path


class SchemaMismatch(ValueError):
    """Input file is missing required columns (or is empty)."""


def read_csv(path):
    """Parse a spinchaos CSV into (header_lines, list-of-dict rows with floats)."""
    text = Path(path).read_text()
    header = [ln for ln in text.splitlines() if ln.startswith("#")]
    body = "\n".join(ln for ln in text.splitlines() if not ln.startswith("#"))
    rows = list(csv.DictReader(_io.StringIO(body)))
    if not rows:
        raise SchemaMismatch(f"{path}: no data rows")
    for row in rows:
        for k, v in row.items():
            if v is None:
                raise SchemaMismatch(f"{path}: ragged row")
            try:
                row[k] = float(v)
            except ValueError:
                pass
    return header, rows


def require_columns(path, rows, columns):
    missing = [c for c in columns if c not in rows[0]]
    if missing:
        raise SchemaMismatch(f"{path}: missing columns {missing}")


def column(rows, name):
    import numpy as np
    return np.array([r[name] for r in rows])


def manifest_hash(input_path):
    """sha256 of the run provenance: manifest.json beside the input, else its header block."""
    p = Path(input_path)
    for candidate in (p.parent / "manifest.json", p.parent.parent / "manifest.json"):
        if candidate.is_file():
            return hashlib.sha256(candidate.read_bytes()).hexdigest()
    header = "\n".join(ln for ln in p.read_text().splitlines() if ln.startswith("#"))
    return hashlib.sha256(header.encode()).hexdigest()


def read_manifest(scan_dir):
    return json.loads((Path(scan_dir) / "manifest.json").read_text())
