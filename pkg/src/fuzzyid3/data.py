"""Project datasets: schemas, CSV loading/writing and a synthetic generator."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class DataError(Exception):
    """Base class for problems with input data (CLI exit status 2)."""


class EmptyFileError(DataError):
    pass


class SchemaMismatchError(DataError):
    def __init__(self, missing: Sequence[str]):
        self.missing = list(missing)
        super().__init__(f"schema mismatch: missing column(s) {', '.join(self.missing)}")


class NonNumericCellError(DataError):
    def __init__(self, row: int, column: str, value: str):
        self.row, self.column, self.value = row, column, value
        super().__init__(f"non-numeric value {value!r} at row {row}, column {column!r}")


class MissingValueError(DataError):
    def __init__(self, row: int, column: str):
        self.row, self.column = row, column
        super().__init__(f"missing value at row {row}, column {column!r}")


class NonPositiveEffortError(DataError):
    def __init__(self, row: int, value: float):
        self.row, self.value = row, value
        super().__init__(f"non-positive effort {value!r} at row {row}")


@dataclass(frozen=True)
class ProjectRecord:
    attributes: dict
    effort: float
    row: int | None = None

    def __post_init__(self):
        if not self.effort > 0:
            raise ValueError(f"effort must be positive, got {self.effort!r}")
        for name, v in self.attributes.items():
            if not math.isfinite(v):
                raise ValueError(f"attribute {name!r} is not finite: {v!r}")

    def vector(self, names: Sequence[str]) -> list[float]:
        return [self.attributes[n] for n in names]


@dataclass(frozen=True)
class DatasetSchema:
    name: str
    attributes: tuple[str, ...]
    effort_column: str = "Effort"
    set_counts: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        if len(set(self.attributes)) != len(self.attributes):
            raise ValueError(f"schema {self.name!r} has duplicate attribute names")
        if self.effort_column in self.attributes:
            raise ValueError(f"effort column {self.effort_column!r} is also listed as an attribute")
        unknown = set(self.set_counts) - set(self.attributes)
        if unknown:
            raise ValueError(f"set-count overrides for unknown attributes: {sorted(unknown)}")

    def __len__(self):
        return len(self.attributes)


TUKUTUKU = DatasetSchema(
    "tukutuku",
    ("TeamExp", "DevTeam", "TotWP", "TextPages", "TotImg", "Anim", "AV", "TotHigh", "TotNHigh"),
    "TotEff",
)

COCOMO81 = DatasetSchema(
    "cocomo81",
    ("SIZE", "DATA", "VIRTMIN", "VIRTMAJ", "TIME", "STOR", "TURN",
     "ACAP", "AEXP", "PCAP", "VEXP", "LEXP", "SCED"),
    "Effort",
)


def builtin_schemas() -> dict[str, DatasetSchema]:
    return {"tukutuku": TUKUTUKU, "cocomo81": COCOMO81}


def load_schema_file(path) -> DatasetSchema:
    """Read a schema override file.

    JSON object with keys ``attributes`` (list), ``effort`` (column name),
    optional ``name`` and optional ``set_counts`` (attribute -> 2..7).
    """
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"schema file {path}: invalid JSON ({exc})") from None
    try:
        return DatasetSchema(
            name=d.get("name", Path(path).stem),
            attributes=tuple(d["attributes"]),
            effort_column=d.get("effort", "Effort"),
            set_counts={k: int(v) for k, v in d.get("set_counts", {}).items()},
        )
    except KeyError as exc:
        raise DataError(f"schema file {path}: missing key {exc}") from None
    except ValueError as exc:
        raise DataError(f"schema file {path}: {exc}") from None


def resolve_schema(spec: str) -> DatasetSchema:
    """Builtin schema by name, or a schema file by path."""
    schemas = builtin_schemas()
    if spec in schemas:
        return schemas[spec]
    if os.path.exists(spec):
        return load_schema_file(spec)
    raise ValueError(f"unknown schema {spec!r} (builtin: {', '.join(schemas)}; or a schema file path)")


def parse_cell(text: str, row: int, column: str) -> float:
    s = text.strip()
    if s == "":
        raise MissingValueError(row, column)
    try:
        v = float(s)
    except ValueError:
        raise NonNumericCellError(row, column, text) from None
    if not math.isfinite(v):
        raise NonNumericCellError(row, column, text)
    return v


def load_csv(path, schema: DatasetSchema) -> list[ProjectRecord]:
    """Load and validate project records; ``row`` is the 1-based data row number."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or not any(h.strip() for h in header):
            raise EmptyFileError(f"{path}: file is empty")
        header = [h.strip() for h in header]
        wanted = list(schema.attributes) + [schema.effort_column]
        missing = [c for c in wanted if c not in header]
        if missing:
            raise SchemaMismatchError(missing)
        pos = {c: header.index(c) for c in wanted}
        records = []
        for rownum, cells in enumerate(reader, start=1):
            if not cells or all(not c.strip() for c in cells):
                continue
            def cell(col):
                i = pos[col]
                return parse_cell(cells[i] if i < len(cells) else "", rownum, col)
            attrs = {a: cell(a) for a in schema.attributes}
            effort = cell(schema.effort_column)
            if effort <= 0:
                raise NonPositiveEffortError(rownum, effort)
            records.append(ProjectRecord(attrs, effort, rownum))
    if not records:
        raise EmptyFileError(f"{path}: no data rows")
    return records


def format_csv(records: Sequence[ProjectRecord], schema: DatasetSchema) -> str:
    """CSV text with full-precision (round-trip exact) numbers."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(schema.attributes) + [schema.effort_column])
    for r in records:
        w.writerow([repr(float(r.attributes[a])) for a in schema.attributes] + [repr(float(r.effort))])
    return buf.getvalue()


def write_csv(records: Sequence[ProjectRecord], path, schema: DatasetSchema) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(format_csv(records, schema))


def to_arrays(records: Sequence[ProjectRecord], names: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    X = np.array([[r.attributes[n] for n in names] for r in records], dtype=float).reshape(len(records), len(names))
    y = np.array([r.effort for r in records], dtype=float)
    return X, y


# --- synthetic projects -------------------------------------------------------

@dataclass(frozen=True)
class AttributeRange:
    low: float
    high: float
    integer: bool = False
    levels: tuple[float, ...] | None = None
    log: bool = False

    def draw(self, rng: np.random.Generator) -> float:
        if self.levels is not None:
            return float(self.levels[int(rng.integers(len(self.levels)))])
        if self.integer:
            return float(rng.integers(int(self.low), int(self.high) + 1))
        if self.log:
            v = math.exp(rng.uniform(math.log(self.low), math.log(self.high)))
            return round(v, 1)
        return float(rng.uniform(self.low, self.high))


# Tukutuku-shaped: counts of web artefacts and team descriptors.
TUKUTUKU_RANGES = {
    "TeamExp": AttributeRange(1, 10, integer=True),
    "DevTeam": AttributeRange(1, 8, integer=True),
    "TotWP": AttributeRange(1, 600, integer=True),
    "TextPages": AttributeRange(0, 800, integer=True),
    "TotImg": AttributeRange(0, 1000, integer=True),
    "Anim": AttributeRange(0, 50, integer=True),
    "AV": AttributeRange(0, 20, integer=True),
    "TotHigh": AttributeRange(0, 40, integer=True),
    "TotNHigh": AttributeRange(0, 40, integer=True),
}

# COCOMO'81-shaped: KDSI size plus effort multipliers at their rating levels.
COCOMO81_RANGES = {
    "SIZE": AttributeRange(2.0, 1150.0, log=True),
    "DATA": AttributeRange(0.94, 1.16, levels=(0.94, 1.0, 1.08, 1.16)),
    "VIRTMIN": AttributeRange(0.87, 1.30, levels=(0.87, 1.0, 1.15, 1.30)),
    "VIRTMAJ": AttributeRange(0.87, 1.30, levels=(0.87, 1.0, 1.15, 1.30)),
    "TIME": AttributeRange(1.0, 1.66, levels=(1.0, 1.11, 1.30, 1.66)),
    "STOR": AttributeRange(1.0, 1.56, levels=(1.0, 1.06, 1.21, 1.56)),
    "TURN": AttributeRange(0.87, 1.15, levels=(0.87, 1.0, 1.07, 1.15)),
    "ACAP": AttributeRange(0.71, 1.46, levels=(1.46, 1.19, 1.0, 0.86, 0.71)),
    "AEXP": AttributeRange(0.82, 1.29, levels=(1.29, 1.13, 1.0, 0.91, 0.82)),
    "PCAP": AttributeRange(0.70, 1.42, levels=(1.42, 1.17, 1.0, 0.86, 0.70)),
    "VEXP": AttributeRange(0.90, 1.21, levels=(1.21, 1.10, 1.0, 0.90)),
    "LEXP": AttributeRange(0.95, 1.14, levels=(1.14, 1.07, 1.0, 0.95)),
    "SCED": AttributeRange(1.0, 1.23, levels=(1.23, 1.08, 1.0, 1.04, 1.10)),
}

TUKUTUKU_WEIGHTS = {
    "DevTeam": 15.0, "TotWP": 0.8, "TextPages": 0.3, "TotImg": 0.1,
    "Anim": 4.0, "AV": 6.0, "TotHigh": 12.0, "TotNHigh": 3.0,
}

DEFAULT_RANGE = AttributeRange(0.0, 100.0)


def linear_effort(attrs: dict, schema: DatasetSchema) -> float:
    """``20 + sum(w_a * x_a)``; unit weights for non-builtin schemas.

    For Tukutuku-shaped data the team-experience term is ``5 * (10 - TeamExp)``,
    so effort falls as experience grows and stays above 20.
    """
    if schema.attributes == TUKUTUKU.attributes:
        e = 20.0 + 5.0 * (10.0 - attrs["TeamExp"])
        for name, w in TUKUTUKU_WEIGHTS.items():
            e += w * attrs[name]
        return e
    return 20.0 + sum(abs(attrs[a]) for a in schema.attributes)


def cocomo_effort(attrs: dict, schema: DatasetSchema) -> float:
    """Intermediate COCOMO semi-detached form: ``3.0 * SIZE**1.12 * prod(multipliers)``."""
    e = 3.0 * attrs["SIZE"] ** 1.12
    for a in schema.attributes:
        if a != "SIZE":
            e *= attrs[a]
    return e


EFFORT_MODELS = {"linear": linear_effort, "cocomo": cocomo_effort}


def attribute_ranges(schema: DatasetSchema) -> dict[str, AttributeRange]:
    if schema.attributes == TUKUTUKU.attributes:
        return dict(TUKUTUKU_RANGES)
    if schema.attributes == COCOMO81.attributes:
        return dict(COCOMO81_RANGES)
    return {a: DEFAULT_RANGE for a in schema.attributes}


def generate_synthetic(schema: DatasetSchema, n: int, seed: int = 0,
                       effort_model: str = "auto", noise: float = 0.1) -> list[ProjectRecord]:
    """Seeded synthetic projects with learnable effort structure.

    Draws use numpy's PCG64 generator: for every record, each attribute in
    schema order, then one standard-normal noise draw. Effort is
    ``model(attrs) * exp(noise * z)``, so ``noise=0`` gives the model exactly.
    ``effort_model="auto"`` picks ``cocomo`` for the COCOMO'81 schema and
    ``linear`` otherwise.
    """
    if n < 2:
        raise ValueError(f"need at least 2 records, got n={n}")
    if noise < 0:
        raise ValueError("noise must be non-negative")
    if effort_model == "auto":
        effort_model = "cocomo" if schema.attributes == COCOMO81.attributes else "linear"
    if effort_model not in EFFORT_MODELS:
        raise ValueError(f"unknown effort model {effort_model!r} (choose from {', '.join(EFFORT_MODELS)})")
    if effort_model == "cocomo" and "SIZE" not in schema.attributes:
        raise ValueError("cocomo effort model needs a SIZE attribute")
    model = EFFORT_MODELS[effort_model]
    ranges = attribute_ranges(schema)
    rng = np.random.default_rng(np.random.PCG64(seed))
    out = []
    for i in range(n):
        attrs = {a: ranges[a].draw(rng) for a in schema.attributes}
        z = float(rng.standard_normal())
        effort = model(attrs, schema) * math.exp(noise * z)
        out.append(ProjectRecord(attrs, effort, i + 1))
    return out
