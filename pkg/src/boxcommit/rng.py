"""Counter-based RNG streams derived from one master seed."""

from __future__ import annotations

import numpy as np


def parse_seed(text: str | int) -> int:
    """Accept an int or a hex string (with or without ``0x``)."""
    if isinstance(text, int):
        return text
    return int(text, 16)


def stream(master: int, *counters: int) -> np.random.Generator:
    """Independent generator for the given counter path under ``master``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master, spawn_key=tuple(counters))))
