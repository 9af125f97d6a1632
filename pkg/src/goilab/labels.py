"""Reduction-trace labels: atomic names, directed exponential markers, over/underlining.

A label is a non-empty tuple of atoms.  Over- and underlined sub-labels nest,
so labels are trees, but concatenation at the top level is plain tuple
concatenation.  The printed syntax is dotted: ``a.<b>._(c).D>.<!`` where
``<...>`` is an overline, ``_(...)`` an underline, ``E>`` / ``<E`` a
right/left marker.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

MARKER_KINDS = ("D", "!", "?", "R", "S", "W")
# P and Q exist only in the output of the bracketing function f; the
# label-to-weight translation rejects them.
EXTENDED_KINDS = MARKER_KINDS + ("P", "Q")

RIGHT = "right"
LEFT = "left"


@dataclass(frozen=True)
class Atomic:
    name: str


@dataclass(frozen=True)
class Over:
    inner: "Label"


@dataclass(frozen=True)
class Under:
    inner: "Label"


@dataclass(frozen=True)
class Marker:
    direction: str  # RIGHT or LEFT
    kind: str

    def __post_init__(self):
        if self.direction not in (RIGHT, LEFT):
            raise ValueError(f"bad marker direction {self.direction!r}")
        if self.kind not in EXTENDED_KINDS:
            raise ValueError(f"bad marker kind {self.kind!r}")


Atom = Union[Atomic, Over, Under, Marker]
Label = tuple  # tuple[Atom, ...], non-empty for labelled constructs


def atomic(name: str) -> Label:
    return (Atomic(name),)


def over(*atoms_or_labels) -> Label:
    return (Over(concat(*atoms_or_labels)),)


def under(*atoms_or_labels) -> Label:
    return (Under(concat(*atoms_or_labels)),)


def mark(direction: str, kind: str) -> Label:
    return (Marker(direction, kind),)


def concat(*parts) -> Label:
    """Concatenate labels (or bare atoms) left to right."""
    out = []
    for p in parts:
        if isinstance(p, (Atomic, Over, Under, Marker)):
            out.append(p)
        else:
            out.extend(p)
    return tuple(out)


def reverse(label: Label) -> Label:
    """Label reversal: anti-homomorphism that swaps marker directions."""
    out = []
    for a in reversed(label):
        if isinstance(a, Atomic):
            out.append(a)
        elif isinstance(a, Over):
            out.append(Over(reverse(a.inner)))
        elif isinstance(a, Under):
            out.append(Under(reverse(a.inner)))
        else:
            out.append(Marker(LEFT if a.direction == RIGHT else RIGHT, a.kind))
    return tuple(out)


def f_multiplicative(label: Label) -> Label:
    """Expose the multiplicative bracketing: overlines become Q-marker pairs,
    underlines P-marker pairs; everything else is unchanged."""
    out = []
    for a in label:
        if isinstance(a, Over):
            out.append(Marker(RIGHT, "Q"))
            out.extend(f_multiplicative(a.inner))
            out.append(Marker(LEFT, "Q"))
        elif isinstance(a, Under):
            out.append(Marker(RIGHT, "P"))
            out.extend(f_multiplicative(a.inner))
            out.append(Marker(LEFT, "P"))
        else:
            out.append(a)
    return tuple(out)


def strip_lines(label: Label) -> tuple:
    """Atom sequence with all over/underlines erased (keeps nesting order)."""
    out = []
    for a in label:
        if isinstance(a, (Over, Under)):
            out.extend(strip_lines(a.inner))
        else:
            out.append(a)
    return tuple(out)


def strip_pq(label: Label) -> tuple:
    return tuple(a for a in label if not (isinstance(a, Marker) and a.kind in ("P", "Q")))


def format_atom(a: Atom) -> str:
    if isinstance(a, Atomic):
        return a.name
    if isinstance(a, Over):
        return "<(" + format_label(a.inner) + ")>"
    if isinstance(a, Under):
        return "_(" + format_label(a.inner) + ")"
    return a.kind + ">" if a.direction == RIGHT else "<" + a.kind


def format_label(label: Label) -> str:
    return ".".join(format_atom(a) for a in label)


def parse_label(text: str) -> Label:
    """Inverse of format_label: ``a.<(b)>._(c).D>.<!`` style.

    Overlines carry inner parentheses (``<(...)>``) so the syntax stays
    deterministic next to the ``<D`` / ``D>`` marker forms; atomic names
    start lowercase.
    """
    n = len(text)
    pos = 0

    def error(msg: str):
        raise ValueError(f"label syntax error at {pos}: {msg}")

    def atom() -> Atom:
        nonlocal pos
        if pos >= n:
            error("unexpected end")
        c = text[pos]
        if c.isalpha() and c.islower():
            end = pos
            while end < n and (text[end].isalnum() or text[end] == "_"):
                end += 1
            name = text[pos:end]
            pos = end
            return Atomic(name)
        if c in EXTENDED_KINDS:
            if pos + 1 >= n or text[pos + 1] != ">":
                error("expected '>' after marker kind")
            pos += 2
            return Marker(RIGHT, c)
        if c == "<":
            if pos + 1 < n and text[pos + 1] == "(":
                pos += 2
                inner = seq()
                if not text.startswith(")>", pos):
                    error("expected ')>'")
                pos += 2
                return Over(inner)
            if pos + 1 < n and text[pos + 1] in EXTENDED_KINDS:
                kind = text[pos + 1]
                pos += 2
                return Marker(LEFT, kind)
            error("expected '(' or marker kind after '<'")
        if c == "_":
            if pos + 1 >= n or text[pos + 1] != "(":
                error("expected '('")
            pos += 2
            inner = seq()
            if pos >= n or text[pos] != ")":
                error("expected ')'")
            pos += 1
            return Under(inner)
        error(f"unexpected {c!r}")
        raise AssertionError

    def seq() -> Label:
        nonlocal pos
        atoms = [atom()]
        while pos < n and text[pos] == ".":
            pos += 1
            atoms.append(atom())
        return tuple(atoms)

    label = seq()
    if pos != n:
        raise ValueError(f"label syntax error at {pos}: trailing input")
    return label


def atoms_flat(label: Label):
    """All atoms, recursing under over/underlines, in reading order."""
    for a in label:
        yield a
        if isinstance(a, (Over, Under)):
            yield from atoms_flat(a.inner)


def first_top_atom(label: Label) -> Atom:
    return label[0]


def last_top_atom(label: Label) -> Atom:
    return label[-1]
