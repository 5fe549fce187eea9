"""Threshold (thermometer) and one-hot encoding of tabular features.

For an ordered column the thresholds are its sorted distinct training
values, and a value encodes as ``[value <= t for t in thresholds]``. A
column with exactly two distinct training values collapses to the single
bit ``value <= low``. Nominal columns are one-hot encoded over the
categories seen in training; an unseen category encodes as all zeros.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted


def fit_thresholds(values, max_thresholds: Optional[int] = None) -> list:
    """Sorted distinct values of a training column, optionally thinned to ``max_thresholds``."""
    values = np.asarray(values)
    if values.size == 0:
        raise ValueError("cannot fit thresholds on an empty column")
    thresholds = np.unique(values)
    if max_thresholds is not None and len(thresholds) > max_thresholds:
        if max_thresholds < 1:
            raise ValueError("max_thresholds must be >= 1")
        # evenly spaced picks over the sorted unique values, always keeping both ends
        picks = np.unique(np.round(np.linspace(0, len(thresholds) - 1, max_thresholds)).astype(int))
        thresholds = thresholds[picks]
    return thresholds.tolist()


def thermometer(value, thresholds) -> np.ndarray:
    return (value <= np.asarray(thresholds)).astype(np.uint8)


@dataclass
class FeatureCode:
    """Encoding of one raw column."""

    name: str
    kind: str  # "thermometer", "binary" or "onehot"
    values: list = field(default_factory=list)

    @property
    def width(self) -> int:
        return 1 if self.kind == "binary" else len(self.values)

    def encode(self, column) -> np.ndarray:
        column = np.asarray(column)
        if self.kind == "onehot":
            return (column[:, None] == np.asarray(self.values, dtype=object)[None, :]).astype(np.uint8)
        col = column.astype(float)
        if self.kind == "binary":
            return (col <= self.values[0])[:, None].astype(np.uint8)
        return (col[:, None] <= np.asarray(self.values, dtype=float)[None, :]).astype(np.uint8)

    def bit_names(self) -> list[str]:
        if self.kind == "onehot":
            return [f"{self.name}=={v}" for v in self.values]
        if self.kind == "binary":
            return [f"{self.name}<={self.values[0]}"]
        return [f"{self.name}<={v}" for v in self.values]


class ThermometerBinarizer(TransformerMixin, BaseEstimator):
    """Fit per-column codes on training rows, then emit a 0/1 matrix.

    ``categorical`` lists column indices to one-hot encode. All other
    columns must be numeric. ``max_thresholds`` caps the thermometer width
    of high-cardinality numeric columns.
    """

    def __init__(self, categorical: Sequence[int] = (), max_thresholds: Optional[int] = None,
                 feature_names: Optional[Sequence[str]] = None):
        self.categorical = categorical
        self.max_thresholds = max_thresholds
        self.feature_names = feature_names

    def fit(self, X, y=None):
        X = _as_table(X)
        if X.shape[0] == 0:
            raise ValueError("cannot fit a binarizer on an empty table")
        names = list(self.feature_names) if self.feature_names is not None else [f"x{j}" for j in range(X.shape[1])]
        if len(names) != X.shape[1]:
            raise ValueError(f"{len(names)} feature names for {X.shape[1]} columns")
        categorical = set(self.categorical)
        codes = []
        for j in range(X.shape[1]):
            col = X[:, j]
            if j in categorical:
                cats = sorted(set(col.tolist()), key=str)
                codes.append(FeatureCode(names[j], "onehot", cats))
                continue
            values = fit_thresholds(col.astype(float), self.max_thresholds)
            if len(np.unique(col.astype(float))) == 2:
                codes.append(FeatureCode(names[j], "binary", values[:1]))
            else:
                codes.append(FeatureCode(names[j], "thermometer", values))
        self.codes_ = codes
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "codes_")
        X = _as_table(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"table has {X.shape[1]} columns, binarizer was fitted on {self.n_features_in_}")
        if X.shape[0] == 0:
            raise ValueError("cannot encode an empty table")
        return np.hstack([code.encode(X[:, j]) for j, code in enumerate(self.codes_)])

    @property
    def n_bits_(self) -> int:
        check_is_fitted(self, "codes_")
        return sum(code.width for code in self.codes_)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "codes_")
        return np.array([name for code in self.codes_ for name in code.bit_names()], dtype=object)

    def to_json(self) -> str:
        check_is_fitted(self, "codes_")
        return json.dumps({
            "version": 1,
            "codes": [{"name": c.name, "kind": c.kind, "values": c.values} for c in self.codes_],
        }, indent=1, default=_jsonable)

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def from_json(cls, text: str) -> "ThermometerBinarizer":
        raw = json.loads(text)
        codes = [FeatureCode(c["name"], c["kind"], c["values"]) for c in raw["codes"]]
        out = cls(categorical=[j for j, c in enumerate(codes) if c.kind == "onehot"],
                  feature_names=[c.name for c in codes])
        out.codes_ = codes
        out.n_features_in_ = len(codes)
        return out

    @classmethod
    def load(cls, path) -> "ThermometerBinarizer":
        return cls.from_json(Path(path).read_text())


def _as_table(X) -> np.ndarray:
    X = np.asarray(X, dtype=object) if not isinstance(X, np.ndarray) else X
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D table, got {X.ndim} dimensions")
    return X


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"cannot serialize {type(value).__name__}")
