"""Loading and preparing the benchmark tables.

Nothing here downloads data. UCI files are read from an explicit path or
from ``$ADTM_DATA_DIR`` (default ``./data``) under their usual names:

=============  ================================
bankruptcy     Qualitative_Bankruptcy.data.txt
balance-scale  balance-scale.data
breast-cancer  breast-cancer.data
liver          bupa.data
heart          heart.dat
=============  ================================

Balance Scale is the full factorial of four weights and distances in 1..5,
so when its file is absent the table is regenerated exactly.

Prepared datasets keep typed feature columns. Binarization happens after
the train/test split so thresholds never see test rows.
"""
from __future__ import annotations

import csv
import hashlib
import itertools
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Schema:
    columns: tuple[tuple[str, type], ...]
    delimiter: Optional[str] = ","
    missing: Optional[str] = "?"

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.columns]


@dataclass
class RawTable:
    names: list[str]
    rows: list[list]
    source: str = "<memory>"
    sha256: Optional[str] = None

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> list:
        j = self.names.index(name)
        return [row[j] for row in self.rows]


@dataclass
class Dataset:
    name: str
    X: np.ndarray
    y: np.ndarray
    feature_names: list[str]
    categorical: list[int] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.int64)
        if len(self.X) != len(self.y):
            raise DatasetError(f"{self.name}: {len(self.X)} rows but {len(self.y)} labels")
        if not np.isin(self.y, (0, 1)).all():
            raise DatasetError(f"{self.name}: labels must be 0 or 1")

    def __len__(self):
        return len(self.y)

    @property
    def label_counts(self) -> dict[int, int]:
        return {c: int(np.sum(self.y == c)) for c in (0, 1)}

    def subset(self, idx, suffix: str) -> "Dataset":
        return replace(self, name=f"{self.name}{suffix}", X=self.X[idx], y=self.y[idx], notes=dict(self.notes))


def load_csv(path, schema: Schema) -> RawTable:
    """Read a delimited file into typed rows; missing markers become ``None``."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"data file not found: {path}")
    data = path.read_bytes()
    text = data.decode("utf-8-sig")
    rows = []
    ncol = len(schema.columns)
    if schema.delimiter is None:
        records = (line.split() for line in text.splitlines())
    else:
        records = csv.reader(text.splitlines(), delimiter=schema.delimiter)
    for lineno, record in enumerate(records, start=1):
        record = [cell.strip() for cell in record]
        if not record or record == [""]:
            continue
        if len(record) != ncol:
            raise DatasetError(f"{path}:{lineno}: expected {ncol} columns, found {len(record)}")
        row = []
        for cell, (name, typ) in zip(record, schema.columns):
            if schema.missing is not None and cell == schema.missing:
                row.append(None)
                continue
            try:
                row.append(typ(cell))
            except ValueError:
                raise DatasetError(f"{path}:{lineno}: column {name!r} cannot parse {cell!r}") from None
        rows.append(row)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    return RawTable(schema.names, rows, str(path), hashlib.sha256(data).hexdigest())


def _require_raw(raw, what: str) -> RawTable:
    if isinstance(raw, Dataset):
        raise DatasetError(f"{what}: input is already a prepared dataset")
    if not isinstance(raw, RawTable):
        raise DatasetError(f"{what}: expected a RawTable, got {type(raw).__name__}")
    return raw


def _require_columns(raw: RawTable, schema: Schema, what: str) -> None:
    if raw.names != schema.names:
        raise DatasetError(f"{what}: columns {raw.names} do not match {schema.names}")


def _notes(raw: RawTable, **extra) -> dict:
    return {"source": raw.source, "sha256": raw.sha256, "raw_rows": len(raw), **extra}


# Bankruptcy ---------------------------------------------------------------

BANKRUPTCY_SCHEMA = Schema(tuple((c, str) for c in ("IR", "MR", "FF", "CR", "CO", "OP", "Class")))


def prepare_bankruptcy(raw: RawTable) -> Dataset:
    """Six P/A/N risk ratings, one-hot encoded; bankruptcy (``B``) is class 1."""
    raw = _require_raw(raw, "bankruptcy")
    _require_columns(raw, BANKRUPTCY_SCHEMA, "bankruptcy")
    if len(raw) != 250:
        raise DatasetError(f"bankruptcy: expected 250 companies, found {len(raw)}")
    labels = raw.column("Class")
    if not set(labels) <= {"B", "NB"}:
        raise DatasetError(f"bankruptcy: unexpected classes {sorted(set(labels) - {'B', 'NB'})}")
    X = np.array([row[:6] for row in raw.rows], dtype=object)
    if any(v not in ("P", "A", "N") for v in X.ravel()):
        raise DatasetError("bankruptcy: ratings must be P, A or N")
    y = np.array([lab == "B" for lab in labels], dtype=np.int64)
    return Dataset("bankruptcy", X, y, raw.names[:6], categorical=list(range(6)), notes=_notes(raw))


# Balance Scale -------------------------------------------------------------

BALANCE_SCALE_SCHEMA = Schema((("Class", str), ("LW", int), ("LD", int), ("RW", int), ("RD", int)))


def balance_scale_table() -> RawTable:
    """The full 625-row table: tip to the side with the larger weight x distance."""
    rows = []
    for lw, ld, rw, rd in itertools.product(range(1, 6), repeat=4):
        left, right = lw * ld, rw * rd
        label = "L" if left > right else "R" if right > left else "B"
        rows.append([label, lw, ld, rw, rd])
    return RawTable(BALANCE_SCALE_SCHEMA.names, rows, source="<generated balance-scale>")


def prepare_balance_scale(raw: RawTable) -> Dataset:
    """Drop the balanced class; right tip is class 1."""
    raw = _require_raw(raw, "balance-scale")
    _require_columns(raw, BALANCE_SCALE_SCHEMA, "balance-scale")
    rows = [row for row in raw.rows if row[0] != "B"]
    if not rows:
        raise DatasetError("balance-scale: no rows left after removing the balanced class")
    if len(rows) != 576:
        raise DatasetError(f"balance-scale: expected 576 rows after removing class B, found {len(rows)}")
    if any(row[0] not in ("L", "R") for row in rows):
        raise DatasetError("balance-scale: classes must be L, R or B")
    X = np.array([row[1:] for row in rows], dtype=float)
    y = np.array([row[0] == "R" for row in rows], dtype=np.int64)
    return Dataset("balance-scale", X, y, raw.names[1:], notes=_notes(raw, dropped_balanced=len(raw) - len(rows)))


# Breast Cancer -------------------------------------------------------------

BREAST_CANCER_SCHEMA = Schema((
    ("Class", str), ("age", str), ("menopause", str), ("tumor-size", str), ("inv-nodes", str),
    ("node-caps", str), ("deg-malig", int), ("breast", str), ("breast-quad", str), ("irradiat", str),
))
_BREAST_ORDINAL = ("age", "tumor-size", "inv-nodes")
_BREAST_NOMINAL = ("menopause", "breast", "breast-quad")
_YES_NO = {"yes": 1, "no": 0}


def _range_low(cell: str, column: str) -> float:
    try:
        return float(cell.split("-")[0])
    except ValueError:
        raise DatasetError(f"breast-cancer: column {column!r} has non-range value {cell!r}") from None


def prepare_breast_cancer(raw: RawTable) -> Dataset:
    """Drop rows with missing values; recurrence is class 1.

    Range-valued columns become their lower bound, yes/no columns 1/0, and
    menopause, side and quadrant stay nominal.
    """
    raw = _require_raw(raw, "breast-cancer")
    _require_columns(raw, BREAST_CANCER_SCHEMA, "breast-cancer")
    names = raw.names[1:]
    kept = [row for row in raw.rows if None not in row]
    X, y = [], []
    for row in kept:
        record = dict(zip(raw.names, row))
        label = record["Class"]
        if label not in ("recurrence-events", "no-recurrence-events"):
            raise DatasetError(f"breast-cancer: unexpected class {label!r}")
        y.append(label == "recurrence-events")
        feats = []
        for name in names:
            value = record[name]
            if name in _BREAST_ORDINAL:
                value = _range_low(value, name)
            elif name in ("node-caps", "irradiat"):
                if value not in _YES_NO:
                    raise DatasetError(f"breast-cancer: {name!r} must be yes/no, got {value!r}")
                value = _YES_NO[value]
            feats.append(value)
        X.append(feats)
    if not X:
        raise DatasetError("breast-cancer: no complete rows")
    y = np.array(y, dtype=np.int64)
    raw_labels = raw.column("Class")
    notes = _notes(
        raw,
        raw_recurrence=sum(lab == "recurrence-events" for lab in raw_labels),
        raw_no_recurrence=sum(lab == "no-recurrence-events" for lab in raw_labels),
        dropped_missing=len(raw) - len(kept),
        recurrence=int(y.sum()),
        no_recurrence=int(len(y) - y.sum()),
    )
    categorical = [names.index(n) for n in _BREAST_NOMINAL]
    return Dataset("breast-cancer", np.array(X, dtype=object), y, names, categorical, notes)


# Liver Disorders -----------------------------------------------------------

LIVER_SCHEMA = Schema(tuple((c, float) for c in ("mcv", "alkphos", "sgpt", "sgot", "gammagt", "drinks", "selector")))


def prepare_liver(raw: RawTable) -> Dataset:
    """Five blood tests as features; class 1 when drinks >= 3. The selector column is discarded."""
    raw = _require_raw(raw, "liver")
    _require_columns(raw, LIVER_SCHEMA, "liver")
    table = np.array(raw.rows, dtype=float)
    y = (table[:, 5] >= 3).astype(np.int64)
    return Dataset("liver", table[:, :5], y, raw.names[:5], notes=_notes(raw))


# Heart Disease -------------------------------------------------------------

HEART_SCHEMA = Schema(tuple((c, float) for c in (
    "age", "sex", "chest_pain", "resting_bp", "cholesterol", "fasting_bs", "resting_ecg",
    "max_heart_rate", "exercise_angina", "oldpeak", "slope", "vessels", "thal", "class",
)), delimiter=None)
HEART_REAL = ("age", "resting_bp", "cholesterol", "max_heart_rate", "oldpeak", "vessels")
HEART_BINARY = ("sex", "fasting_bs", "exercise_angina")
HEART_NOMINAL = ("chest_pain", "resting_ecg", "thal")
HEART_ORDERED = ("slope",)


def prepare_heart(raw: RawTable) -> Dataset:
    """Statlog heart table; class 1 is presence of disease.

    The Statlog file codes absence as 1 and presence as 2; files that code
    absence as 0 and severity as 1..4 are also accepted.
    """
    raw = _require_raw(raw, "heart")
    _require_columns(raw, HEART_SCHEMA, "heart")
    names = raw.names[:-1]
    if len(names) != 13:
        raise DatasetError(f"heart: expected 13 features, found {len(names)}")
    table = np.array(raw.rows, dtype=float)
    labels = table[:, -1]
    y = (labels == 2) if set(np.unique(labels)) <= {1.0, 2.0} else (labels > 0)
    categorical = [names.index(n) for n in HEART_NOMINAL]
    X = table[:, :-1].astype(object)
    for j in categorical:
        X[:, j] = X[:, j].astype(int)
    return Dataset("heart", X, y.astype(np.int64), names, categorical, _notes(raw))


# Registry ------------------------------------------------------------------

DEFAULT_FILES = {
    "bankruptcy": "Qualitative_Bankruptcy.data.txt",
    "balance-scale": "balance-scale.data",
    "breast-cancer": "breast-cancer.data",
    "liver": "bupa.data",
    "heart": "heart.dat",
}
_LOADERS = {
    "bankruptcy": (BANKRUPTCY_SCHEMA, prepare_bankruptcy),
    "balance-scale": (BALANCE_SCALE_SCHEMA, prepare_balance_scale),
    "breast-cancer": (BREAST_CANCER_SCHEMA, prepare_breast_cancer),
    "liver": (LIVER_SCHEMA, prepare_liver),
    "heart": (HEART_SCHEMA, prepare_heart),
}
DATASETS = tuple(DEFAULT_FILES) + ("xor",)


def data_dir() -> Path:
    return Path(os.environ.get("ADTM_DATA_DIR", "data"))


def default_path(name: str) -> Path:
    return data_dir() / DEFAULT_FILES[name]


def load_dataset(name: str, path=None, seed: int = 0) -> Dataset:
    """Load and prepare a benchmark by name (``xor`` yields 400 noise-free rows)."""
    if name == "xor":
        return make_xor(400, 0.0, seed)
    if name not in _LOADERS:
        raise KeyError(f"unknown dataset {name!r}; known: {', '.join(DATASETS)}")
    schema, prepare = _LOADERS[name]
    path = Path(path) if path is not None else default_path(name)
    if name == "balance-scale" and not path.is_file():
        return prepare(balance_scale_table())
    return prepare(load_csv(path, schema))


# Synthetic -----------------------------------------------------------------

def make_xor(n: int, noise: float = 0.0, seed: Optional[int] = None) -> Dataset:
    """``y = x1 xor x2`` over balanced copies of the four input patterns, labels flipped with prob ``noise``."""
    if n < 4:
        raise DatasetError("make_xor needs n >= 4")
    if not 0.0 <= noise <= 1.0:
        raise DatasetError("noise must be a probability")
    rng = np.random.default_rng(seed)
    patterns = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.uint8)
    X = np.tile(patterns, (-(-n // 4), 1))[:n]
    X = X[rng.permutation(n)]
    y = X[:, 0] ^ X[:, 1]
    flips = rng.random(n) < noise
    y = np.where(flips, 1 - y, y).astype(np.int64)
    return Dataset("xor", X, y, ["x1", "x2"], notes={"noise": noise, "seed": seed, "flipped": int(flips.sum())})


# Splitting -----------------------------------------------------------------

def split(dataset: Dataset, ratio: float = 0.8, seed: Optional[int] = None) -> tuple[Dataset, Dataset]:
    """Stratified split keeping ``round(ratio * n_c)`` rows of each class for training."""
    if not 0.0 < ratio < 1.0:
        raise DatasetError(f"split ratio must lie strictly between 0 and 1, got {ratio}")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in (0, 1):
        idx = np.flatnonzero(dataset.y == c)
        if idx.size == 0:
            continue
        idx = idx[rng.permutation(idx.size)]
        k = int(round(ratio * idx.size))
        if k == 0 or k == idx.size:
            raise DatasetError(f"{dataset.name}: class {c} ({idx.size} rows) leaves an empty side at ratio {ratio}")
        train.append(idx[:k])
        test.append(idx[k:])
    train_idx = np.sort(np.concatenate(train))
    test_idx = np.sort(np.concatenate(test))
    tr = dataset.subset(train_idx, "[train]")
    te = dataset.subset(test_idx, "[test]")
    for part in (tr, te):
        part.notes.update(split_seed=seed, split_ratio=ratio)
    return tr, te


# Bit-matrix files ----------------------------------------------------------

def write_bits(path, X, y, feature_names: Optional[Sequence[str]] = None) -> None:
    """Write a 0/1 matrix with labels; header lines carry row count, width and label counts."""
    X = np.asarray(X, dtype=np.uint8)
    y = np.asarray(y, dtype=np.int64)
    lines = [
        "# adtm-bits v1",
        f"# rows={X.shape[0]} o={X.shape[1]} labels=0:{int(np.sum(y == 0))},1:{int(np.sum(y == 1))}",
    ]
    if feature_names is not None:
        lines.append("# features=" + "\t".join(feature_names))
    lines += ["".join(map(str, row)) + f" {label}" for row, label in zip(X.tolist(), y.tolist())]
    Path(path).write_text("\n".join(lines) + "\n")


def read_bits(path) -> tuple[np.ndarray, np.ndarray]:
    text = Path(path).read_text().splitlines()
    if not text or text[0] != "# adtm-bits v1":
        raise DatasetError(f"{path}: not an adtm bit-matrix file")
    header = dict(item.split("=", 1) for item in text[1][2:].split())
    body = [line for line in text if not line.startswith("#")]
    X = np.array([[int(c) for c in line.split()[0]] for line in body], dtype=np.uint8).reshape(len(body), -1)
    y = np.array([int(line.split()[1]) for line in body], dtype=np.int64)
    if X.shape != (int(header["rows"]), int(header["o"])):
        raise DatasetError(f"{path}: header says {header['rows']}x{header['o']}, body is {X.shape[0]}x{X.shape[1]}")
    return X, y
