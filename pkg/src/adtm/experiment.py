"""One train/test run and seed sweeps over determinism settings."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .binarizer import ThermometerBinarizer
from .datasets import Dataset, split
from .machine import ADTMClassifier, evaluate

BASELINE = "tm"

# Hyperparameters per benchmark; epochs are not stated for any of them and
# are this package's choice.
DATASET_DEFAULTS = {
    "bankruptcy": dict(n_clauses=100, T=10, s=3, n_states=100, epochs=100),
    "balance-scale": dict(n_clauses=100, T=10, s=3, n_states=100, epochs=100),
    "breast-cancer": dict(n_clauses=100, T=10, s=5, n_states=100, epochs=100),
    "liver": dict(n_clauses=20, T=10, s=3, n_states=100, epochs=100),
    "heart": dict(n_clauses=100, T=10, s=3, n_states=100, epochs=100),
    "xor": dict(n_clauses=20, T=10, s=3, n_states=100, epochs=200),
}


@dataclass
class RunResult:
    d: object
    seed: int
    scores: dict
    history: list
    model: ADTMClassifier
    binarizer: ThermometerBinarizer


def machine_params(d) -> dict:
    """Estimator keywords for a sweep entry: ``"tm"`` selects the classic baseline."""
    if d == BASELINE:
        return {"regime": "tm", "d": 1}
    return {"regime": "adtm", "d": d}


def run_once(dataset: Dataset, d, seed: int, ratio: float = 0.8, epochs: Optional[int] = None,
             max_thresholds: Optional[int] = None, **params) -> RunResult:
    """Stratified split, fit the binarizer on the training rows, train and score."""
    train, test = split(dataset, ratio, seed)
    if dataset.name == "xor":
        binarizer = None
        X_train, X_test = train.X, test.X
    else:
        binarizer = ThermometerBinarizer(categorical=dataset.categorical, max_thresholds=max_thresholds,
                                         feature_names=dataset.feature_names).fit(train.X)
        X_train, X_test = binarizer.transform(train.X), binarizer.transform(test.X)
    kw = dict(DATASET_DEFAULTS.get(dataset.name, {}))
    kw.update(params)
    if epochs is not None:
        kw["epochs"] = epochs
    kw.update(machine_params(d))
    model = ADTMClassifier(random_state=seed, **kw)
    model.fit(X_train, train.y, eval_set=(X_test, test.y))
    return RunResult(d, seed, evaluate(model, X_test, test.y), model.history_, model, binarizer)


def sweep(dataset: Dataset, d_values: Iterable, seeds: Iterable[int], **kw) -> list[dict]:
    """Mean and spread of test F1 / accuracy per determinism setting."""
    rows = []
    for d in d_values:
        runs = [run_once(dataset, d, seed, **kw) for seed in seeds]
        f1 = np.array([r.scores["f1"] for r in runs])
        acc = np.array([r.scores["accuracy"] for r in runs])
        rows.append({
            "d": d_label(d),
            "f1_mean": float(f1.mean()), "f1_std": float(f1.std()),
            "acc_mean": float(acc.mean()), "acc_std": float(acc.std()),
            "seeds": len(runs),
            "f1_per_seed": f1.tolist(), "acc_per_seed": acc.tolist(),
        })
    return rows


def d_label(d) -> str:
    if d == BASELINE:
        return BASELINE
    if isinstance(d, float) and np.isinf(d) or str(d).lower() in ("inf", "infinity"):
        return "inf"
    return str(int(d))


def format_sweep(name: str, rows: list[dict]) -> str:
    """Text table laid out like the usual TM-vs-d comparison: one column per setting."""
    heads = ["TM" if r["d"] == BASELINE else f"d={r['d']}" for r in rows]
    width = max(14, *(len(h) + 2 for h in heads))
    lines = [name, " " * 6 + "".join(h.rjust(width) for h in heads)]
    for label, key in (("F1", "f1"), ("Acc.", "acc")):
        cells = [f"{r[key + '_mean']:.3f}±{r[key + '_std']:.3f}" for r in rows]
        lines.append(label.ljust(6) + "".join(c.rjust(width) for c in cells))
    return "\n".join(lines)
