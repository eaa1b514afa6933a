"""Carriers of the seven value spaces."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .dyadic import ONE, ZERO, Dyadic

INF = math.inf


class ThreePoint(Enum):
    """Nondeterminism: no success possible, success possible, success certain."""

    BOT = 0
    DIAMOND = 1
    TOP = 2

    def __str__(self):
        return {0: "bot", 1: "diamond", 2: "top"}[self.value]


@dataclass(frozen=True)
class FlatExc:
    """Flat exception lattice: ``bot`` below every ``raise[e]`` below ``top``."""

    kind: str  # "bot" | "raise" | "top"
    exc: str | None = None

    def __post_init__(self):
        if self.kind not in ("bot", "raise", "top"):
            raise ValueError(f"bad exception value kind {self.kind!r}")
        if (self.kind == "raise") != (self.exc is not None):
            raise ValueError("raise values carry exactly one exception name")

    def __str__(self):
        return f"raise[{self.exc}]" if self.kind == "raise" else self.kind


EXC_BOT = FlatExc("bot")
EXC_TOP = FlatExc("top")


def raised(e: str) -> FlatExc:
    return FlatExc("raise", e)


@dataclass(frozen=True)
class Interval:
    """Lower/upper probability pair ``(lo, hi)`` with ``0 <= lo <= hi <= 1``."""

    lo: Dyadic
    hi: Dyadic

    def __post_init__(self):
        lo, hi = Dyadic.of(self.lo), Dyadic.of(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if not (ZERO <= lo <= hi <= ONE):
            raise ValueError(f"invalid interval ({lo}, {hi})")

    def __str__(self):
        return f"({self.lo}, {self.hi})"


def check_unit_dyadic(v: Dyadic) -> Dyadic:
    v = Dyadic.of(v)
    if not ZERO <= v <= ONE:
        raise ValueError(f"probability {v} outside [0, 1]")
    return v
