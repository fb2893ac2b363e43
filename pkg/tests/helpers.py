"""Shared desk parameters for protocol-level tests."""

from fractions import Fraction as F
from functools import lru_cache

from boxcommit.box import correlated_bit, pr_box
from boxcommit.protocol import schedule_protocol1, schedule_protocol2
from boxcommit.rng import stream

DESK1 = {"k": 2, "epsilon": F(1, 4), "d": 5, "l": 2, "dim": 1, "keep_best": 50}
DESK2 = {"k1": 2, "epsilon": F(1, 4), "d": 7, "l": 2}


@lru_cache(maxsize=None)
def desk1():
    return schedule_protocol1(correlated_bit(F(1, 10)), (0, 0), 12, DESK1, rng=stream(0, 1))


@lru_cache(maxsize=None)
def desk2():
    return schedule_protocol2(pr_box(), 0, 1, 12, DESK2, rng=stream(0, 3))
