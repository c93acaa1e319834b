"""Deterministic CSV/JSON writers.

Every file starts with (CSV) or contains (JSON, key ``"meta"``) the package
version and a hash of the canonical config, and floats are written with
``repr`` so identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_default)


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()[:16]


def _default(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if hasattr(x, "tolist"):
        return x.tolist()
    if isinstance(x, Path):
        return str(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v) or math.isinf(v):
        return str(v)
    return repr(v)


def header_line(chash: str) -> str:
    return f"# nlsdtn {__version__} config {chash}"


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence], chash: str):
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(header_line(chash) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def complex_columns(names: Sequence[str]):
    out = []
    for nm in names:
        out += [f"re_{nm}", f"im_{nm}"]
    return out


def write_json(path: Path, payload: dict, chash: str):
    path = Path(path)
    doc = dict(payload, meta={"version": __version__, "config_hash": chash})
    path.write_text(json.dumps(doc, sort_keys=True, indent=2, default=_default) + "\n")
    return path


def read_table_csv(path: Path):
    """Read ``t, re[, im]`` rows; comment lines and one header line are skipped."""
    rows = []
    with Path(path).open() as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = [p.strip() for p in s.split(",")]
            try:
                vals = [float(p) for p in parts]
            except ValueError:
                if not rows and all(p and not _is_number(p) for p in parts):
                    continue  # header
                raise ValueError(f"{path}:{lineno}: non-numeric entry in {s!r}")
            if len(vals) not in (2, 3):
                raise ValueError(f"{path}:{lineno}: expected 2 or 3 columns, got {len(vals)}")
            rows.append(vals + [0.0] * (3 - len(vals)))
    if len(rows) < 4:
        raise ValueError(f"{path}: need at least 4 data rows, found {len(rows)}")
    return rows


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False
