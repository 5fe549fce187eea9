"""Random-number accounting and a two-point PRNG power model.

Power figures produced here are modelled, calibrated on measured training
power per datapoint at d=1 and d=5000. Modelled power is

    P(d) = P_base + S / d

with S the switching power of the PRNGs at d=1. At d=inf the PRNGs are
removed altogether, which also removes their leakage share.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional

from .automata import INFINITY, check_period

CALIBRATION_D = 5000
DEFAULT_SWEEP = (1, 10, 100, 500, 1000, 5000, INFINITY)
MODEL_LABEL = "modeled (calibrated to measured d=1/d=5000 power)"


@dataclass
class RngAccounting:
    """Counts of random draws consumed during training.

    ``ta_update_coins`` are draws spent on automaton updates,
    ``clause_selection_draws`` the per-clause feedback selection draws and
    ``transition_attempts`` every automaton update attempted.
    """

    ta_update_coins: int = 0
    clause_selection_draws: int = 0
    transition_attempts: int = 0

    def __add__(self, other: "RngAccounting") -> "RngAccounting":
        return RngAccounting(
            self.ta_update_coins + other.ta_update_coins,
            self.clause_selection_draws + other.clause_selection_draws,
            self.transition_attempts + other.transition_attempts,
        )

    def __iadd__(self, other: "RngAccounting") -> "RngAccounting":
        self.ta_update_coins += other.ta_update_coins
        self.clause_selection_draws += other.clause_selection_draws
        self.transition_attempts += other.transition_attempts
        return self

    @property
    def stochastic_fraction(self) -> float:
        if self.transition_attempts == 0:
            return 0.0
        return self.ta_update_coins / self.transition_attempts

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PowerProfile:
    name: str
    p_d1: float
    p_d5000: float
    switching_fraction_d1: float = 0.07
    leakage_fraction: float = 0.32

    def __post_init__(self):
        for field in ("p_d1", "p_d5000"):
            value = getattr(self, field)
            if value is None or not math.isfinite(value) or value <= 0:
                raise ValueError(f"profile {self.name!r} is not calibrated: {field}={value!r}")
        if not self.p_d5000 < self.p_d1:
            raise ValueError(f"profile {self.name!r}: p_d5000 must be below p_d1")
        for field in ("switching_fraction_d1", "leakage_fraction"):
            if not 0.0 <= getattr(self, field) <= 1.0:
                raise ValueError(f"profile {self.name!r}: {field} must lie in [0, 1]")

    @property
    def switching_power(self) -> float:
        """PRNG switching power at d=1, in mW."""
        return (self.p_d1 - self.p_d5000) / (1.0 - 1.0 / CALIBRATION_D)

    @property
    def base_power(self) -> float:
        return self.p_d1 - self.switching_power

    @property
    def leakage_power(self) -> float:
        return self.leakage_fraction * self.p_d1


def switching_fraction(d, share_d1: float = 0.07) -> float:
    """Share of total system power spent switching the PRNGs at period ``d``."""
    d = check_period(d)
    return 0.0 if math.isinf(d) else share_d1 / d


def estimate_power(profile: Optional[PowerProfile], d) -> float:
    """Modelled training power per datapoint in mW."""
    if profile is None:
        raise ValueError("an uncalibrated profile cannot estimate power")
    d = check_period(d)
    if math.isinf(d):
        return profile.base_power - profile.leakage_power
    return profile.base_power + profile.switching_power / d


def load_profiles(path: str | Path | None = None) -> dict[str, PowerProfile]:
    if path is None:
        text = resources.files("adtm").joinpath("data/power_profiles.json").read_text()
    else:
        text = Path(path).read_text()
    raw = json.loads(text)
    shared = {
        "switching_fraction_d1": raw.get("switching_fraction_d1", 0.07),
        "leakage_fraction": raw.get("leakage_fraction", 0.32),
    }
    return {
        name: PowerProfile(name=name, p_d1=entry.get("p_d1"), p_d5000=entry.get("p_d5000"), **shared)
        for name, entry in raw["profiles"].items()
    }


def get_profile(name: str, profiles: Optional[Mapping[str, PowerProfile]] = None) -> PowerProfile:
    profiles = load_profiles() if profiles is None else profiles
    try:
        return profiles[name]
    except KeyError:
        raise KeyError(f"no power profile for {name!r}; known: {', '.join(sorted(profiles))}") from None


def _d_key(d) -> str:
    return "inf" if math.isinf(d) else str(int(d))


def power_table(profile: PowerProfile, d_values: Iterable = DEFAULT_SWEEP) -> list[dict]:
    rows = []
    for d in d_values:
        d = check_period(d)
        rows.append({
            "d": _d_key(d),
            "power_mw": estimate_power(profile, d),
            "switching_fraction": switching_fraction(d, profile.switching_fraction_d1),
        })
    return rows


def report(accounting: RngAccounting, config, profile: Optional[PowerProfile] = None,
           sweep: Iterable = DEFAULT_SWEEP) -> dict:
    """Summarise a training run's random draws and its modelled power."""
    d = check_period(config.d)
    out = {
        "d": _d_key(d),
        "regime": getattr(getattr(config, "regime", "adtm"), "value", "adtm"),
        "accounting": accounting.as_dict(),
        "stochastic_transition_fraction": accounting.stochastic_fraction,
        "switching_fraction": switching_fraction(d),
    }
    if profile is not None:
        out["power_label"] = MODEL_LABEL
        out["profile"] = profile.name
        out["power_mw"] = estimate_power(profile, d)
        out["sweep"] = power_table(profile, sweep)
    return out


def format_power_table(profile: PowerProfile, rows: list[dict]) -> str:
    lines = [f"{profile.name}: {MODEL_LABEL}", f"{'d':>6}  {'power [mW]':>11}  {'switching':>10}"]
    for row in rows:
        lines.append(f"{row['d']:>6}  {row['power_mw']:>11.4f}  {100 * row['switching_fraction']:>9.4f}%")
    return "\n".join(lines)
