"""Arbitrarily deterministic Tsetlin machine with PRNG accounting."""
from .automata import INFINITY, Action, MvfAutomaton, Strength
from .energy import PowerProfile, RngAccounting, estimate_power
from .machine import ADTMClassifier, Regime, TmConfig, TsetlinMachine
from .binarizer import ThermometerBinarizer

__all__ = [
    "INFINITY",
    "Action",
    "MvfAutomaton",
    "Strength",
    "PowerProfile",
    "RngAccounting",
    "estimate_power",
    "ADTMClassifier",
    "Regime",
    "TmConfig",
    "TsetlinMachine",
    "ThermometerBinarizer",
]
