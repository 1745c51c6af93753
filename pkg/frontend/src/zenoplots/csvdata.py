"""Reader for the simulator's self-describing CSV files.

Files carry `# key=value` metadata lines, then a column header row, then data
rows.  Columns are typed per-column: fully numeric columns become float
arrays, anything else stays as strings (e.g. the spectrum's sector labels).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

# metadata keys every simulator CSV is expected to carry
REQUIRED_META = ("L", "sector", "perturbation", "lambda", "V")


class SchemaError(ValueError):
    """Input file does not conform to the expected CSV schema."""


@dataclass
class Curve:
    path: Path
    meta: dict[str, str]
    columns: list[str]
    numeric: dict[str, np.ndarray]
    text: dict[str, list[str]]

    def column(self, name: str) -> np.ndarray:
        if name not in self.numeric:
            raise SchemaError(f"{self.path}: missing numeric column {name!r}")
        return self.numeric[name]

    def text_column(self, name: str) -> list[str]:
        if name not in self.text:
            raise SchemaError(f"{self.path}: missing text column {name!r}")
        return self.text[name]

    @property
    def lam(self) -> float:
        return float(self.meta["lambda"])

    @property
    def V(self) -> float:
        return float(self.meta["V"])

    def label(self) -> str:
        bits = [f"λ={self.meta.get('lambda', '?')}", f"V={self.meta.get('V', '?')}"]
        if self.meta.get("sector"):
            bits.append(self.meta["sector"])
        eps = self.meta.get("epsilon")
        if eps and float(eps) != 0.0:
            bits.append(f"ε={eps}")
        return ", ".join(bits)


def read_curve(path: str | Path) -> Curve:
    path = Path(path)
    meta: dict[str, str] = {}
    columns: list[str] | None = None
    rows: list[list[str]] = []
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        if raw.startswith("#"):
            key, sep, value = raw[1:].strip().partition("=")
            if not sep:
                raise SchemaError(f"{path}:{lineno}: metadata line without '='")
            meta[key.strip()] = value.strip()
            continue
        if columns is None:
            columns = [c.strip() for c in raw.split(",")]
            continue
        rows.append(raw.split(","))
    if columns is None or not rows:
        raise SchemaError(f"{path}: no data rows")
    for key in REQUIRED_META:
        if key not in meta:
            raise SchemaError(f"{path}: missing metadata key {key!r}")
    width = len(columns)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise SchemaError(
                f"{path}: row {i + 1} has {len(row)} fields, expected {width}"
            )
    numeric: dict[str, np.ndarray] = {}
    strings: dict[str, list[str]] = {}
    for j, name in enumerate(columns):
        cells = [row[j].strip() for row in rows]
        try:
            numeric[name] = np.array([float(v) for v in cells])
        except ValueError:
            strings[name] = cells
    return Curve(path=path, meta=meta, columns=columns, numeric=numeric, text=strings)


def load_glob(pattern: str, base: Path | None = None) -> list[Curve]:
    """Load every file matching a glob, sorted by name; empty match is an error."""
    pat = Path(pattern)
    if pat.is_absolute():
        matches = sorted(pat.parent.glob(pat.name))
    else:
        matches = sorted((base or Path(".")).glob(pattern))
    if not matches:
        raise SchemaError(f"no input files match {pattern!r}")
    return [read_curve(p) for p in matches]


def check_shared(curves: list[Curve], keys: tuple[str, ...]) -> None:
    """Overlay sanity: every curve must agree on the given metadata keys."""
    for key in keys:
        values = {c.meta.get(key) for c in curves}
        if len(values) != 1:
            raise SchemaError(
                f"overlay inputs disagree on {key!r}: {sorted(str(v) for v in values)}"
            )
