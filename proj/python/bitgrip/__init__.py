"""Python front end for the bitgrip simulation core."""

import json

from ._core import BitgripError, accuracy_pct, score_ikura, score_spaghetti
from ._core import _pack, _simulate_drop, _tool_change

__all__ = [
    "BitgripError",
    "accuracy_pct",
    "score_spaghetti",
    "score_ikura",
    "simulate_drop",
    "pack",
    "tool_change",
]


def simulate_drop(food, targets, trials=10, seed=0, mode=None, config_path=None):
    """Weight-class experiment. Returns the JSON summary as a dict, with the
    per-trial CSV under "csv"."""
    return json.loads(_simulate_drop(food, list(targets), trials, seed, mode, config_path))


def pack(seed=0, config_path=None):
    """Plans and executes the config's order (or the two-box demo)."""
    return json.loads(_pack(seed, config_path))


def tool_change(cycles=10, seed=0, misalignment_mm=0.0):
    """Alternating full tool changes; stops at the first fault."""
    return json.loads(_tool_change(cycles, seed, misalignment_mm))
