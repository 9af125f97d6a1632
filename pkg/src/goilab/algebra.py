"""Static dynamic-algebra weights and the level-tracking label-to-weight map.

Weights are free words over levelled constants; no algebraic equations are
applied, so equality is plain word equality after unit elision and zero
normalisation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .labels import Atomic, Label, Marker, Over, Under

CONSTANTS = ("p", "q", "r", "s", "t", "d")


class LevelUnderflowError(Exception):
    """A label marker asked for a box level below zero."""


class ForeignMarkerError(Exception):
    """P/Q markers are only legal in the output of the bracketing map."""


@dataclass(frozen=True)
class WAtom:
    base: str
    star: bool = False
    level: int = 0

    def __post_init__(self):
        if self.base not in CONSTANTS:
            raise ValueError(f"unknown constant {self.base!r}")
        if self.level < 0:
            raise ValueError("negative level")

    def inv(self) -> "WAtom":
        return WAtom(self.base, not self.star, self.level)

    def bumped(self, k: int = 1) -> "WAtom":
        return WAtom(self.base, self.star, self.level + k)


@dataclass(frozen=True)
class Weight:
    """A word of atoms; ``atoms is None`` encodes the absorbing zero."""

    atoms: Optional[tuple] = ()

    @property
    def is_zero(self) -> bool:
        return self.atoms is None

    @property
    def is_one(self) -> bool:
        return self.atoms == ()


ZERO = Weight(None)
ONE = Weight(())


def watom(base: str, level: int = 0, star: bool = False) -> Weight:
    return Weight((WAtom(base, star, level),))


def compose(*ws: Weight) -> Weight:
    out = []
    for w in ws:
        if w.is_zero:
            return ZERO
        out.extend(w.atoms)
    return Weight(tuple(out))


def involute(w: Weight) -> Weight:
    if w.is_zero:
        return ZERO
    return Weight(tuple(a.inv() for a in reversed(w.atoms)))


def bang(w: Weight, k: int = 1) -> Weight:
    if w.is_zero:
        return ZERO
    return Weight(tuple(a.bumped(k) for a in w.atoms))


def weight_equal(a: Weight, b: Weight) -> bool:
    if a.is_zero or b.is_zero:
        return a.is_zero and b.is_zero
    return a.atoms == b.atoms


@dataclass(frozen=True)
class LevelledWeight:
    weight: Weight
    out_level: int


def lw(label: Label, in_level: int) -> LevelledWeight:
    """Translate a label into a weight, threading the box level left to right.

    Level-preserving markers map to their constant at the current level,
    auxiliary-door and principal-door markers shift the level, and over- and
    underlines wrap the inner translation in q/p at the opening and closing
    levels respectively.  W markers yield the absorbing zero.
    """
    level = in_level
    parts = []
    zero = False
    for a in label:
        if isinstance(a, Atomic):
            continue
        if isinstance(a, Over) or isinstance(a, Under):
            base = "q" if isinstance(a, Over) else "p"
            inner = lw(a.inner, level)
            parts.append(watom(base, level))
            parts.append(inner.weight)
            parts.append(watom(base, inner.out_level, star=True))
            if inner.weight.is_zero:
                zero = True
            level = inner.out_level
            continue
        kind, right = a.kind, a.direction == "right"
        if kind in ("P", "Q"):
            raise ForeignMarkerError(f"marker {kind} is not translatable")
        if kind == "W":
            zero = True
            continue
        if kind in ("R", "S", "D"):
            base = {"R": "r", "S": "s", "D": "d"}[kind]
            parts.append(watom(base, level, star=not right))
            continue
        if kind == "?":
            if right:
                if level < 1:
                    raise LevelUnderflowError("?-marker at level 0")
                parts.append(watom("t", level - 1, star=True))
                level -= 1
            else:
                parts.append(watom("t", level))
                level += 1
            continue
        if kind == "!":
            if right:
                if level < 1:
                    raise LevelUnderflowError("!-marker at level 0")
                level -= 1
            else:
                level += 1
            continue
        raise AssertionError(kind)
    if zero:
        return LevelledWeight(ZERO, level)
    return LevelledWeight(compose(*parts), level)


def entry_level_needed(label: Label) -> int:
    """Smallest input level at which ``lw`` does not underflow."""
    level = 0
    lowest = 0

    def scan(lab):
        nonlocal level, lowest
        for a in lab:
            if isinstance(a, (Over, Under)):
                scan(a.inner)
            elif isinstance(a, Marker) and a.kind in ("?", "!"):
                if a.direction == "right":
                    level -= 1
                    lowest = min(lowest, level)
                else:
                    level += 1

    scan(label)
    return -lowest


def format_watom(a: WAtom) -> str:
    core = a.base + ("*" if a.star else "")
    if a.level == 0:
        return core
    if a.level == 1:
        return f"!({core})"
    return f"!^{a.level}({core})"


def format_weight(w: Weight) -> str:
    if w.is_zero:
        return "0"
    if w.is_one:
        return "1"
    return ".".join(format_watom(a) for a in w.atoms)
