"""Two-action finite-state learning automata.

States run from 1 to 2N. States 1..N select EXCLUDE and N+1..2N select
INCLUDE, so state 1 is the most confident exclude and 2N the most
confident include.

The classic Tsetlin automaton and its Krinsky and Krylov relatives are
kept here as reference implementations driven by a two-armed environment
simulator. The multi-step variable-structure automaton (``MvfAutomaton``)
is the one the classifier uses.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

INFINITY = math.inf


class Action(enum.IntEnum):
    EXCLUDE = 0
    INCLUDE = 1


class Response(enum.IntEnum):
    PENALTY = 0
    REWARD = 1


class Strength(enum.IntEnum):
    WEAK = 0
    STRONG = 1


class Kind(str, enum.Enum):
    TA = "ta"
    KRINSKY = "krinsky"
    KRYLOV = "krylov"


def check_period(d) -> float | int:
    """Validate a determinism period: a positive integer or ``INFINITY``."""
    if isinstance(d, str):
        token = d.strip().lower()
        if token in ("inf", "infinity"):
            return INFINITY
        try:
            d = int(token)
        except ValueError:
            raise ValueError(f"d must be a positive integer or 'inf', got {d!r}") from None
    if isinstance(d, float) and math.isinf(d) and d > 0:
        return INFINITY
    if isinstance(d, bool) or not math.isfinite(d) or int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer or 'inf', got {d!r}")
    return int(d)


def _check_state(state: int, n: int) -> None:
    if n < 1:
        raise ValueError(f"N must be >= 1, got {n}")
    if not 1 <= state <= 2 * n:
        raise ValueError(f"state {state} outside [1, {2 * n}]")


def action_of(state: int, n: int) -> Action:
    _check_state(state, n)
    return Action.EXCLUDE if state <= n else Action.INCLUDE


def ta_transition(state: int, response: Response, n: int) -> int:
    """One Tsetlin automaton step.

    A reward moves one state deeper into the current action, a penalty one
    state toward the centre, crossing over from N to N+1 and back.
    """
    _check_state(state, n)
    exclude = state <= n
    if response == Response.REWARD:
        return max(state - 1, 1) if exclude else min(state + 1, 2 * n)
    return state + 1 if exclude else state - 1


def krinsky_transition(state: int, response: Response, n: int) -> int:
    _check_state(state, n)
    if response == Response.REWARD:
        return 1 if state <= n else 2 * n
    return ta_transition(state, response, n)


def krylov_transition(state: int, response: Response, n: int, coin: bool) -> int:
    """Tsetlin step on reward; on penalty the step happens only if ``coin``."""
    _check_state(state, n)
    if response == Response.PENALTY and not coin:
        return state
    return ta_transition(state, response, n)


@dataclass(frozen=True)
class MvfAutomaton:
    """Multi-step automaton whose every d'th update is a coin flip.

    ``attempts`` counts feedback applications, including those a coin
    flip cancelled. An attempt is stochastic when ``attempts % d == 0``
    after incrementing, so T attempts consume exactly ``floor(T / d)``
    coins.
    """

    state: int
    n: int
    s: int = 1
    d: float | int = 1
    attempts: int = 0

    def __post_init__(self):
        _check_state(self.state, self.n)
        if self.s < 1:
            raise ValueError(f"s must be >= 1, got {self.s}")
        object.__setattr__(self, "d", check_period(self.d))
        if self.attempts < 0:
            raise ValueError("attempts must be non-negative")

    @property
    def action(self) -> Action:
        return action_of(self.state, self.n)

    def is_stochastic_turn(self, attempts: Optional[int] = None) -> bool:
        """Whether attempt number ``attempts`` (1-based) flips a coin."""
        if attempts is None:
            attempts = self.attempts + 1
        return not math.isinf(self.d) and attempts % self.d == 0

    def reinforce(
        self,
        target: Action,
        strength: Strength,
        coin_source: Optional[Callable[[], bool]] = None,
    ) -> tuple["MvfAutomaton", int]:
        """Move toward the deep end of ``target``; returns ``(automaton, coins_used)``."""
        attempts = self.attempts + 1
        coins = 0
        move = True
        if self.is_stochastic_turn(attempts):
            if coin_source is None:
                raise ValueError("stochastic turn needs a coin_source")
            move = bool(coin_source())
            coins = 1
        state = self.state
        if move:
            step = self.s if strength == Strength.STRONG else 1
            if target == Action.INCLUDE:
                state = min(state + step, 2 * self.n)
            else:
                state = max(state - step, 1)
        return replace(self, state=state, attempts=attempts), coins


def simulate_two_armed(
    kind: Kind | str,
    reward_probs: tuple[float, float],
    steps: int,
    trials: int = 100,
    n: int = 100,
    seed: Optional[int] = None,
) -> dict:
    """Run ``trials`` independent automata against a two-armed environment.

    Arm 0 is chosen in states 1..N, arm 1 in N+1..2N. Every trial starts at
    a random boundary state (N or N+1). Returns the fraction of trials whose
    final action is the arm with the higher reward probability.
    """
    kind = Kind(kind)
    p = np.asarray(reward_probs, dtype=float)
    if p.shape != (2,) or np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise ValueError(f"reward_probs must be two probabilities in [0, 1], got {reward_probs!r}")
    if steps < 1 or trials < 1 or n < 1:
        raise ValueError("steps, trials and n must all be >= 1")

    rng = np.random.default_rng(seed)
    state = np.where(rng.random(trials) < 0.5, n, n + 1).astype(np.int64)
    for _ in range(steps):
        arm1 = state > n
        rewarded = rng.random(trials) < np.where(arm1, p[1], p[0])
        if kind == Kind.KRYLOV:
            # drawn every step so the stream layout does not depend on the responses
            coin = rng.random(trials) < 0.5
        deeper = np.where(arm1, np.minimum(state + 1, 2 * n), np.maximum(state - 1, 1))
        toward_centre = np.where(arm1, state - 1, state + 1)
        if kind == Kind.KRINSKY:
            deeper = np.where(arm1, 2 * n, 1)
        if kind == Kind.KRYLOV:
            toward_centre = np.where(coin, toward_centre, state)
        state = np.where(rewarded, deeper, toward_centre)

    best = int(np.argmax(p))
    final = (state > n).astype(int)
    return {
        "kind": kind.value,
        "reward_probs": [float(p[0]), float(p[1])],
        "steps": steps,
        "trials": trials,
        "n": n,
        "seed": seed,
        "optimal_arm": best,
        "optimal_fraction": float(np.mean(final == best)),
    }
