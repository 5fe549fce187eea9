"""Two-class Tsetlin machine with multi-step, arbitrarily deterministic automata.

Each of the ``m`` clauses owns one automaton per literal. The first half
of the clauses vote +1, the second half -1, and the prediction is
``1 if v >= 0 else 0`` for the vote sum ``v``.

Random draws within one training sample happen in a fixed order, which
keeps a run reproducible from its seed:

1. one uniform per clause, in clause order, deciding whether the clause
   receives feedback (skipped when ``select_all`` is set);
2. one uniform per random automaton update, in row-major (clause,
   literal) order over the clauses that were selected. Under the ADTM
   regime a coin comes up heads when the uniform is below 0.5.
"""
from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .automata import INFINITY, Action, Strength, check_period
from .energy import RngAccounting


class Regime(str, enum.Enum):
    ADTM = "adtm"
    CLASSIC_TM = "tm"


@dataclass(frozen=True)
class TmConfig:
    n_features: int
    n_clauses: int = 100
    T: int = 10
    s: float = 3
    d: float | int = 1
    n_states: int = 100
    regime: Regime = Regime.ADTM
    positive_class: int = 1

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        object.__setattr__(self, "d", check_period(self.d))
        if self.n_features < 1:
            raise ValueError(f"n_features must be >= 1, got {self.n_features}")
        if self.n_clauses < 2 or self.n_clauses % 2:
            raise ValueError(f"number of clauses m must be a positive even number, got {self.n_clauses}")
        if self.T < 1 or int(self.T) != self.T:
            raise ValueError(f"vote target T must be an integer >= 1, got {self.T}")
        if self.s < 1:
            raise ValueError(f"step size s must be >= 1, got {self.s}")
        if self.regime is Regime.ADTM and int(self.s) != self.s:
            raise ValueError(f"ADTM step size s must be an integer, got {self.s}")
        if self.n_states < 1:
            raise ValueError(f"states per action N must be >= 1, got {self.n_states}")
        if self.positive_class not in (0, 1):
            raise ValueError("positive_class must be 0 or 1")

    @property
    def n_literals(self) -> int:
        return 2 * self.n_features


def literals(X) -> np.ndarray:
    """Append the negation of every feature: ``[x_1..x_o, not x_1..not x_o]``."""
    X = np.asarray(X, dtype=np.uint8)
    return np.concatenate([X, 1 - X], axis=-1)


def evaluate_clause(include, L, learning: bool) -> int:
    """AND of the included literals; an empty clause is 1 while learning, 0 otherwise."""
    include = np.asarray(include, dtype=bool)
    L = np.asarray(L)
    if include.shape != L.shape:
        raise ValueError(f"literal vector has length {L.shape[-1]}, clause expects {include.shape[-1]}")
    if not include.any():
        return int(learning)
    return int(np.all(L[include] == 1))


def class_sum(outputs, polarity) -> int:
    return int(np.dot(np.asarray(outputs, dtype=np.int64), np.asarray(polarity, dtype=np.int64)))


def classify(v) -> int:
    return 1 if v >= 0 else 0


def type_i_probability(v, T) -> float:
    return (T - max(-T, min(T, v))) / (2 * T)


def type_ii_probability(v, T) -> float:
    return (T + max(-T, min(T, v))) / (2 * T)


def type_i_events(clause_output: int, L) -> list[tuple[int, Action, Strength]]:
    """Type Ia (strong include) where clause and literal are 1, Type Ib (weak exclude) elsewhere."""
    events = []
    for k, lit in enumerate(L):
        if clause_output and lit:
            events.append((k, Action.INCLUDE, Strength.STRONG))
        else:
            events.append((k, Action.EXCLUDE, Strength.WEAK))
    return events


def type_ii_events(clause_output: int, L) -> list[tuple[int, Action, Strength]]:
    if not clause_output:
        return []
    return [(k, Action.INCLUDE, Strength.STRONG) for k, lit in enumerate(L) if not lit]


def _as_generator(random_state) -> np.random.Generator:
    if isinstance(random_state, np.random.Generator):
        return random_state
    return np.random.default_rng(random_state)


class TsetlinMachine:
    """Mutable automaton state of one machine plus its training step.

    ``states`` holds every automaton state as an ``(m, 2o)`` matrix,
    ``attempts`` and ``coins`` count update attempts and coins consumed per
    automaton. All teams start at state N, the most shallow exclude state.
    """

    def __init__(self, config: TmConfig, random_state=None, select_all: bool = False):
        self.config = config
        self.rng = _as_generator(random_state)
        self.select_all = select_all
        shape = (config.n_clauses, config.n_literals)
        self.states = np.full(shape, config.n_states, dtype=np.int64)
        self.attempts = np.zeros(shape, dtype=np.int64)
        self.coins = np.zeros(shape, dtype=np.int64)
        half = config.n_clauses // 2
        self.polarity = np.concatenate([np.ones(half), -np.ones(half)]).astype(np.int64)
        self.accounting = RngAccounting()

    @property
    def included(self) -> np.ndarray:
        return self.states > self.config.n_states

    def clause_outputs(self, L, learning: bool = False) -> np.ndarray:
        """Clause outputs for literal vectors ``L`` of shape ``(2o,)`` or ``(n, 2o)``."""
        L = np.asarray(L, dtype=np.uint8)
        if L.shape[-1] != self.config.n_literals:
            raise ValueError(f"expected {self.config.n_literals} literals, got {L.shape[-1]}")
        inc = self.included.astype(np.int64)
        violations = (1 - L).astype(np.int64) @ inc.T
        out = violations == 0
        if not learning:
            out &= inc.any(axis=1)
        return out

    def vote(self, L, learning: bool = False):
        return self.clause_outputs(L, learning).astype(np.int64) @ self.polarity

    def _to_internal(self, y):
        return y if self.config.positive_class == 1 else 1 - y

    def predict(self, X) -> np.ndarray:
        v = self.vote(literals(X), learning=False)
        return self._to_internal((v >= 0).astype(np.int64))

    def train_sample(self, x, y) -> RngAccounting:
        """Apply one round of Type I / Type II feedback for sample ``(x, y)``."""
        if y not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {y!r}")
        cfg = self.config
        L = literals(x)
        if L.shape != (cfg.n_literals,):
            raise ValueError(f"expected {cfg.n_features} features, got {np.shape(x)}")
        target = self._to_internal(int(y))

        out = self.clause_outputs(L, learning=True)
        v = int(out.astype(np.int64) @ self.polarity)
        if self.select_all:
            selected = np.ones(cfg.n_clauses, dtype=bool)
            draws = 0
        else:
            p = type_i_probability(v, cfg.T) if target == 1 else type_ii_probability(v, cfg.T)
            selected = self.rng.random(cfg.n_clauses) < p
            draws = cfg.n_clauses

        rows = np.flatnonzero(selected)
        if rows.size == 0:
            delta = RngAccounting(0, draws, 0)
            self.accounting += delta
            return delta

        type_i = self.polarity[rows] == (1 if target == 1 else -1)
        lit = L.astype(bool)[None, :]
        fires = out[rows, None] & lit
        zero_lit = out[rows, None] & ~lit
        if cfg.regime is Regime.ADTM:
            step, active, coins = self._adtm_steps(rows, type_i, fires, zero_lit)
        else:
            step, active, coins = self._classic_steps(rows, type_i, fires, zero_lit)

        self.attempts[rows] += active
        n = cfg.n_states
        self.states[rows] = np.clip(self.states[rows] + step, 1, 2 * n)
        delta = RngAccounting(coins, draws, int(active.sum()))
        self.accounting += delta
        return delta

    def _adtm_steps(self, rows, type_i, fires, zero_lit):
        s = int(self.config.s)
        ti = type_i[:, None]
        step = np.where(ti, np.where(fires, s, -1), np.where(zero_lit, s, 0))
        active = ti | zero_lit
        d = self.config.d
        if math.isinf(d):
            return step, active, 0
        stochastic = active & ((self.attempts[rows] + 1) % d == 0)
        k = int(stochastic.sum())
        if k:
            heads = self.rng.random(k) < 0.5
            step[stochastic] = np.where(heads, step[stochastic], 0)
            self.coins[rows] += stochastic
        return step, active, k

    def _classic_steps(self, rows, type_i, fires, zero_lit):
        s = float(self.config.s)
        ti = type_i[:, None]
        step = np.where(~ti & zero_lit, 1, 0)
        active = ti | zero_lit
        n_i = int(type_i.sum())
        if n_i:
            u = self.rng.random((n_i, fires.shape[1]))
            f = fires[type_i]
            step[type_i] = np.where(f, (u < (s - 1) / s).astype(np.int64), -(u < 1 / s).astype(np.int64))
            self.coins[rows[type_i]] += 1
        return step, active, n_i * fires.shape[1]

    # serialization -------------------------------------------------------

    _MAGIC = b"ADTM"
    _VERSION = 1
    _HEADER = struct.Struct("<4sHIIIdQIBB")

    def to_bytes(self) -> bytes:
        cfg = self.config
        d = 0 if math.isinf(cfg.d) else int(cfg.d)
        regime = 0 if cfg.regime is Regime.ADTM else 1
        header = self._HEADER.pack(self._MAGIC, self._VERSION, cfg.n_features, cfg.n_clauses,
                                   int(cfg.T), float(cfg.s), d, cfg.n_states, regime, cfg.positive_class)
        return b"".join([
            header,
            self.states.astype("<u4").tobytes(),
            self.attempts.astype("<u8").tobytes(),
            self.coins.astype("<u8").tobytes(),
        ])

    @classmethod
    def from_bytes(cls, data: bytes, random_state=None) -> "TsetlinMachine":
        size = cls._HEADER.size
        if len(data) < size:
            raise ValueError("truncated model file")
        magic, version, o, m, T, s, d, n, regime, positive = cls._HEADER.unpack_from(data)
        if magic != cls._MAGIC:
            raise ValueError("not an ADTM model file")
        if version != cls._VERSION:
            raise ValueError(f"unsupported model file version {version}")
        cfg = TmConfig(n_features=o, n_clauses=m, T=T, s=int(s) if s.is_integer() else s,
                       d=INFINITY if d == 0 else d, n_states=n,
                       regime=Regime.ADTM if regime == 0 else Regime.CLASSIC_TM,
                       positive_class=positive)
        count = m * 2 * o
        expected = size + count * (4 + 8 + 8)
        if len(data) != expected:
            raise ValueError(f"model file has {len(data)} bytes, expected {expected}")
        tm = cls(cfg, random_state)
        off = size
        tm.states = np.frombuffer(data, "<u4", count, off).reshape(m, 2 * o).astype(np.int64)
        off += count * 4
        tm.attempts = np.frombuffer(data, "<u8", count, off).reshape(m, 2 * o).astype(np.int64)
        off += count * 8
        tm.coins = np.frombuffer(data, "<u8", count, off).reshape(m, 2 * o).astype(np.int64)
        if tm.states.min() < 1 or tm.states.max() > 2 * n:
            raise ValueError("model file holds automaton states out of range")
        return tm

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path, random_state=None) -> "TsetlinMachine":
        return cls.from_bytes(Path(path).read_bytes(), random_state)


def binary_scores(y_true, y_pred) -> dict:
    """F1 (positive class 1), accuracy and confusion counts."""
    y_true = np.asarray(y_true).astype(int)
    y_pred = np.asarray(y_pred).astype(int)
    if y_true.size == 0:
        raise ValueError("cannot score an empty set")
    if y_true.shape != y_pred.shape:
        raise ValueError("y_true and y_pred differ in shape")
    tp = int(np.sum((y_pred == 1) & (y_true == 1)))
    fp = int(np.sum((y_pred == 1) & (y_true == 0)))
    tn = int(np.sum((y_pred == 0) & (y_true == 0)))
    fn = int(np.sum((y_pred == 0) & (y_true == 1)))
    denom = 2 * tp + fp + fn
    return {
        "f1": 2 * tp / denom if denom else 0.0,
        "accuracy": (tp + tn) / y_true.size,
        "tp": tp, "fp": fp, "tn": tn, "fn": fn,
    }


def evaluate(model, X, y) -> dict:
    return binary_scores(y, model.predict(X))


def _check_binary(X, n_features: Optional[int] = None) -> np.ndarray:
    X = check_array(X, dtype=None, ensure_min_samples=1)
    if not np.isin(X, (0, 1)).all():
        raise ValueError("features must be binary (0/1); binarize them first")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"X has {X.shape[1]} features, model was fitted with {n_features}")
    return X.astype(np.uint8)


def _check_labels(y, n_samples: int) -> np.ndarray:
    y = np.asarray(y).ravel()
    if y.shape[0] != n_samples:
        raise ValueError(f"{n_samples} samples but {y.shape[0]} labels")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    return y.astype(np.int64)


class ADTMClassifier(ClassifierMixin, BaseEstimator):
    """Scikit-learn style wrapper around :class:`TsetlinMachine`.

    ``fit`` runs ``epochs`` passes over the data, optionally shuffled each
    epoch. Pass ``eval_set=(X_test, y_test)`` to record test accuracy in
    ``history_`` next to training accuracy. ``select_all=True`` bypasses the
    per-clause selection draws so every clause gets feedback on every sample.
    """

    def __init__(self, n_clauses=100, T=10, s=3, d=1, n_states=100, regime="adtm",
                 epochs=100, shuffle=True, select_all=False, positive_class=1, random_state=None):
        self.n_clauses = n_clauses
        self.T = T
        self.s = s
        self.d = d
        self.n_states = n_states
        self.regime = regime
        self.epochs = epochs
        self.shuffle = shuffle
        self.select_all = select_all
        self.positive_class = positive_class
        self.random_state = random_state

    def _init_machine(self, n_features: int) -> None:
        cfg = TmConfig(n_features=n_features, n_clauses=self.n_clauses, T=self.T, s=self.s,
                       d=self.d, n_states=self.n_states, regime=self.regime,
                       positive_class=self.positive_class)
        tm_seed, order_seed = np.random.SeedSequence(self.random_state).spawn(2)
        self.tm_ = TsetlinMachine(cfg, np.random.default_rng(tm_seed), select_all=self.select_all)
        self._order_rng = np.random.default_rng(order_seed)
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = n_features
        self.history_ = []

    def fit(self, X, y, eval_set=None):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        X = _check_binary(X)
        y = _check_labels(y, X.shape[0])
        self._init_machine(X.shape[1])
        for _ in range(self.epochs):
            self._epoch(X, y, eval_set)
        return self

    def partial_fit(self, X, y, eval_set=None):
        """One more epoch over ``(X, y)``, initialising the machine if needed."""
        X = _check_binary(X, getattr(self, "n_features_in_", None))
        y = _check_labels(y, X.shape[0])
        if not hasattr(self, "tm_"):
            self._init_machine(X.shape[1])
        self._epoch(X, y, eval_set)
        return self

    def _epoch(self, X, y, eval_set) -> None:
        order = self._order_rng.permutation(len(y)) if self.shuffle else np.arange(len(y))
        tm = self.tm_
        for i in order:
            tm.train_sample(X[i], y[i])
        record = {"epoch": len(self.history_) + 1,
                  "train_acc": float(np.mean(tm.predict(X) == y))}
        if eval_set is not None:
            X_test, y_test = eval_set
            record["test_acc"] = float(np.mean(self.predict(X_test) == np.asarray(y_test)))
        self.history_.append(record)

    def decision_function(self, X) -> np.ndarray:
        """Inference-mode vote sum ``v`` per sample (``v >= 0`` predicts the positive-polarity class)."""
        check_is_fitted(self, "tm_")
        X = _check_binary(X, self.n_features_in_)
        return self.tm_.vote(literals(X), learning=False)

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "tm_")
        X = _check_binary(X, self.n_features_in_)
        return self.tm_.predict(X)

    @property
    def accounting_(self) -> RngAccounting:
        check_is_fitted(self, "tm_")
        return self.tm_.accounting

    def save(self, path) -> None:
        check_is_fitted(self, "tm_")
        self.tm_.save(path)
