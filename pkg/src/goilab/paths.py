"""Straight paths over nets, path weights, observable weight sets, and the
weight-invariance checks for single reduction steps.

A step traverses one edge towards one of its endpoints.  Straightness is
encoded entirely by the per-node transition table: premise/conclusion
transitions preserve direction, axiom and cut links flip it, and no node
admits a premise-to-premise crossing.  Paths start at interface edges; the
observable weight set keeps those that also end at the interface.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .algebra import ONE, WAtom, Weight, compose, format_weight, involute
from .nets import Net, PREMISE_LIKE, TRANSITIONS


class SearchBudgetError(Exception):
    pass


@dataclass(frozen=True)
class Step:
    edge: int
    to_end: int  # endpoint index the traversal moves towards

    def direction(self, net: Net) -> str:
        """Forward moves towards a premise port, Backward towards a
        conclusion (or the interface)."""
        end = net.edges[self.edge].ends[self.to_end]
        if end is not None and end[0] == "node":
            nid, port = end[1], end[2]
            if (net.nodes[nid], port) in PREMISE_LIKE:
                return "forward"
        return "backward"


@dataclass(frozen=True)
class Path:
    steps: tuple

    def __len__(self) -> int:
        return len(self.steps)

    def reversed(self) -> "Path":
        return Path(tuple(Step(s.edge, 1 - s.to_end) for s in reversed(self.steps)))


def step_weight(net: Net, step: Step) -> Weight:
    edge = net.edges[step.edge]
    return edge.weight if step.to_end == 1 else involute(edge.weight)


def path_weight(path: Path, net: Net) -> Weight:
    return compose(*(step_weight(net, s) for s in path.steps))


def _interface_starts(net: Net) -> list:
    starts = []
    for eid, e in net.edges.items():
        for i, end in enumerate(e.ends):
            if end is not None and end[0] in ("root", "free"):
                starts.append((eid, 1 - i))  # traverse away from the interface
    return starts


def _continuations(net: Net, pm: dict, eid: int, to_end: int) -> list:
    """Steps that may follow arriving at ``ends[to_end]`` of ``eid``."""
    end = net.edges[eid].ends[to_end]
    if end is None or end[0] != "node":
        return []
    nid, port = end[1], end[2]
    out = []
    for a, b in TRANSITIONS[net.nodes[nid]]:
        nxt = b if port == a else a if port == b else None
        if nxt is None:
            continue
        e2, idx = pm[(nid, nxt)]
        out.append(Step(e2, 1 - idx))
    return out


def enumerate_straight(net: Net, max_steps: int,
                       max_expansions: int = 2_000_000) -> list:
    """All straight paths of at most ``max_steps`` steps between interface
    edges, both orientations included."""
    pm = net.port_map()
    found = []
    budget = [max_expansions]

    def is_interface(eid: int, end_index: int) -> bool:
        end = net.edges[eid].ends[end_index]
        return end is not None and end[0] in ("root", "free")

    def walk(prefix: list, eid: int, to_end: int):
        if budget[0] <= 0:
            raise SearchBudgetError("straight-path enumeration budget exceeded")
        budget[0] -= 1
        prefix.append(Step(eid, to_end))
        if is_interface(eid, to_end):
            found.append(Path(tuple(prefix)))
        if len(prefix) < max_steps:
            for step in _continuations(net, pm, eid, to_end):
                walk(prefix, step.edge, step.to_end)
        prefix.pop()

    for eid, to_end in _interface_starts(net):
        walk([], eid, to_end)
    return found


def weight_key(w: Weight):
    if w.is_zero:
        return None
    return tuple((a.base, a.star, a.level) for a in w.atoms)


def weight_set(net: Net, max_steps: int,
               max_expansions: int = 2_000_000,
               length_cap: Optional[int] = None) -> set:
    """Weights of interface-to-interface straight paths, zero excluded.

    Computed by a depth-first traversal that folds weights on the fly, so
    only the set of words is accumulated.  With ``length_cap`` the search is
    pruned once a word exceeds that many atoms; words only ever grow, so
    the capped set is exact.
    """
    pm = net.port_map()
    out = set()
    budget = [max_expansions]

    def is_interface(eid: int, end_index: int) -> bool:
        end = net.edges[eid].ends[end_index]
        return end is not None and end[0] in ("root", "free")

    def walk(depth: int, weight: Weight, eid: int, to_end: int):
        if budget[0] <= 0:
            raise SearchBudgetError("weight-set enumeration budget exceeded")
        budget[0] -= 1
        weight = compose(weight, step_weight(net, Step(eid, to_end)))
        if weight.is_zero:
            return  # killed paths are tracked through the erased set instead
        if length_cap is not None and len(weight.atoms) > length_cap:
            return
        if is_interface(eid, to_end):
            out.add(weight_key(weight))
        if depth < max_steps:
            for step in _continuations(net, pm, eid, to_end):
                walk(depth + 1, weight, step.edge, step.to_end)

    for eid, to_end in _interface_starts(net):
        walk(1, ONE, eid, to_end)
    return out


def weight_member(net: Net, target: Weight, max_steps: Optional[int] = None,
                  max_expansions: int = 2_000_000) -> bool:
    """Is ``target`` the weight of some straight path from the root?

    The path may end anywhere in the net (the label of a normal form leads
    from the root to the subnet of the result, not to an interface).  The
    search is pruned by prefix matching against the target word.
    """
    if target.is_zero:
        return False
    goal = target.atoms
    if max_steps is None:
        max_steps = 4 * len(goal) + 16
    pm = net.port_map()
    budget = [max_expansions]

    root_end = None
    e = net.edges[net.root]
    for i, end in enumerate(e.ends):
        if end is not None and end[0] == "root":
            root_end = (net.root, 1 - i)
    if root_end is None:
        return False

    def walk(depth: int, matched: int, eid: int, to_end: int) -> bool:
        if budget[0] <= 0:
            raise SearchBudgetError("membership search budget exceeded")
        budget[0] -= 1
        w = step_weight(net, Step(eid, to_end))
        if w.is_zero:
            return False
        atoms = w.atoms
        if goal[matched:matched + len(atoms)] != atoms:
            return False
        matched += len(atoms)
        if matched == len(goal):
            return True
        if depth >= max_steps:
            return False
        return any(walk(depth + 1, matched, s.edge, s.to_end)
                   for s in _continuations(net, pm, eid, to_end))

    if not goal:
        return True  # the empty path has weight 1
    return walk(1, 0, *root_end)


def format_weight_key(key) -> str:
    if key is None:
        return "0"
    return format_weight(Weight(tuple(WAtom(b, s, l) for b, s, l in key)))


def check_invariance(net_left: Net, net_right: Net,
                     max_steps: Optional[int] = None,
                     max_expansions: int = 2_000_000,
                     length_cap: Optional[int] = None) -> dict:
    """Compare bounded observable weight sets of two nets.

    The default step bound is four times the edge count of the larger net;
    the comparison is exact word equality.  Because reduction fuses edges,
    the same path may need more steps on one side than on the other, so by
    default words are additionally capped at the larger edge count: within
    the step bound both nets realise every word up to that length, which
    makes the bounded approximation stable across a reduction step.
    """
    edges = max(len(net_left.edges), len(net_right.edges))
    if max_steps is None:
        max_steps = 4 * edges
    if length_cap is None:
        length_cap = edges
    left = weight_set(net_left, max_steps, max_expansions, length_cap)
    right = weight_set(net_right, max_steps, max_expansions, length_cap)
    return {
        "bound": max_steps,
        "length_cap": length_cap,
        "left_only": sorted(format_weight_key(k) for k in left - right),
        "right_only": sorted(format_weight_key(k) for k in right - left),
        "common_count": len(left & right),
        "equal": left == right,
    }
