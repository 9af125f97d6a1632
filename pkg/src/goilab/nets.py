"""Weighted proof-nets with boxes, the call-by-value and call-by-name
translations of labelled terms, closed cut elimination, and net isomorphism.

Edges are oriented for weight bookkeeping only: traversing an edge from
``ends[0]`` to ``ends[1]`` reads its weight, the other way its involution.
Straightness and direction semantics live in the paths module.

Conventions fixed by the label/weight correspondence (certified by the
invariance suites rather than assumed):

* application: tensor whose right premise is the result edge, carrying the
  node label composed with q at the label's output level; the conclusion is
  cut against the function, through a dereliction (call-by-value) or
  directly (call-by-name); the argument enters the left premise behind p*.
* abstraction: par of (variable edge behind p, body behind q*), boxed with
  auxiliary doors for free variables in call-by-value, unboxed in
  call-by-name.
* copy is a fan whose premises carry r (left target) and s (right target);
  erase is a weakening with an absorbing weight.
* substitution is a cut; in call-by-name the argument sits in a box behind
  a dereliction on the variable side, and the argument label up to its
  trailing box marker is read on the box's external edge.
* every variable is an axiom link (two half-wires through an axiom node);
  in call-by-name each variable additionally ends in a dereliction, the
  physical counterpart of the D marker emitted by the Var rule.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .algebra import (ONE, ZERO, LevelledWeight, LevelUnderflowError, WAtom,
                      Weight, compose, entry_level_needed, involute,
                      format_weight, lw, watom)
from .labels import LEFT, RIGHT, Label, Marker, Under
from .labelled import label_of
from .terms import Abs, App, Copy, Erase, Subst, Term, Var

PORTS = {
    "ax": ("a", "b"),
    "cut": ("a", "b"),
    "tensor": ("left", "right", "out"),
    "par": ("left", "right", "out"),
    "fan": ("left", "right", "out"),
    "bang": ("in", "out"),
    "whynot": ("in", "out"),
    "derelict": ("in", "out"),
    "weaken": ("out",),
}

# port pairs a straight path may connect through a node
TRANSITIONS = {
    "ax": (("a", "b"),),
    "cut": (("a", "b"),),
    "tensor": (("left", "out"), ("right", "out")),
    "par": (("left", "out"), ("right", "out")),
    "fan": (("left", "out"), ("right", "out")),
    "bang": (("in", "out"),),
    "whynot": (("in", "out"),),
    "derelict": (("in", "out"),),
    "weaken": (),
}

# arriving at one of these ports counts as moving towards a premise;
# direction changes are legal only at axiom and cut nodes
PREMISE_LIKE = {
    ("tensor", "left"), ("tensor", "right"), ("par", "left"), ("par", "right"),
    ("fan", "left"), ("fan", "right"), ("bang", "in"), ("whynot", "in"),
    ("derelict", "in"), ("cut", "a"), ("cut", "b"),
}

TURN_NODES = ("ax", "cut")


class NetError(Exception):
    pass


class NotACutError(NetError):
    pass


class NotClosedError(NetError):
    pass


class TranslationError(NetError):
    pass


@dataclass
class Edge:
    ends: list
    weight: Weight = ONE

    def weight_from(self, end_index: int) -> Weight:
        return self.weight if end_index == 0 else involute(self.weight)

    def compose_incoming(self, end_index: int, w: Weight) -> None:
        """Traversals entering at ``end_index`` read ``w`` first."""
        if end_index == 0:
            self.weight = compose(w, self.weight)
        else:
            self.weight = compose(self.weight, involute(w))

    def compose_outgoing(self, end_index: int, w: Weight) -> None:
        """Traversals leaving through ``end_index`` read ``w`` last."""
        if end_index == 1:
            self.weight = compose(self.weight, w)
        else:
            self.weight = compose(involute(w), self.weight)


@dataclass
class Box:
    principal: int
    auxiliaries: tuple
    contents: set


class Net:
    def __init__(self):
        self.nodes: dict[int, str] = {}
        self.edges: dict[int, Edge] = {}
        self.boxes: dict[int, Box] = {}
        self.root: Optional[int] = None
        self.free: dict[str, int] = {}
        self._next = 0

    def new_id(self) -> int:
        self._next += 1
        return self._next

    def new_node(self, kind: str) -> int:
        nid = self.new_id()
        self.nodes[nid] = kind
        return nid

    def new_edge(self, end0=None, end1=None, weight: Weight = ONE) -> int:
        eid = self.new_id()
        self.edges[eid] = Edge([end0, end1], weight)
        return eid

    def attach(self, eid: int, end_index: int, end) -> None:
        self.edges[eid].ends[end_index] = end

    def port_map(self) -> dict:
        ports = {}
        for eid, e in self.edges.items():
            for i, end in enumerate(e.ends):
                if end is not None and end[0] == "node":
                    ports[(end[1], end[2])] = (eid, i)
        return ports

    def node_depth(self, nid: int) -> int:
        return sum(1 for b in self.boxes.values() if nid in b.contents)

    def edge_depth(self, eid: int) -> int:
        ends = self.edges[eid].ends
        count = 0
        for b in self.boxes.values():
            if all(e is not None and e[0] == "node" and e[1] in b.contents for e in ends):
                count += 1
        return count

    def box_of_principal(self, nid: int) -> Optional[int]:
        for bid, b in self.boxes.items():
            if b.principal == nid:
                return bid
        return None

    def box_of_auxiliary(self, nid: int) -> Optional[int]:
        for bid, b in self.boxes.items():
            if nid in b.auxiliaries:
                return bid
        return None

    def copy(self) -> "Net":
        out = Net()
        out.nodes = dict(self.nodes)
        out.edges = {eid: Edge(list(e.ends), e.weight) for eid, e in self.edges.items()}
        out.boxes = {bid: Box(b.principal, tuple(b.auxiliaries), set(b.contents))
                     for bid, b in self.boxes.items()}
        out.root = self.root
        out.free = dict(self.free)
        out._next = self._next
        return out


# ---------------------------------------------------------------------------
# validation

def validate(net: Net, strict_levels: bool = False) -> list:
    """Structural violations as strings; empty means well-formed."""
    problems = []
    ports = {}
    for eid, e in net.edges.items():
        if len(e.ends) != 2:
            problems.append(f"edge {eid} lacks two endpoints")
            continue
        for i, end in enumerate(e.ends):
            if end is None:
                problems.append(f"edge {eid} has a dangling endpoint")
            elif end[0] == "node":
                _, nid, port = end
                if nid not in net.nodes:
                    problems.append(f"edge {eid} references missing node {nid}")
                elif port not in PORTS[net.nodes[nid]]:
                    problems.append(f"edge {eid} uses bad port {port} on {net.nodes[nid]}")
                else:
                    key = (nid, port)
                    if key in ports:
                        problems.append(f"port {key} attached twice")
                    ports[key] = (eid, i)
            elif end[0] == "root":
                if net.root != eid:
                    problems.append(f"edge {eid} claims the root interface")
            elif end[0] == "free":
                if net.free.get(end[1]) != eid:
                    problems.append(f"edge {eid} claims free variable {end[1]}")
            else:
                problems.append(f"edge {eid} has unknown endpoint {end}")
    for nid, kind in net.nodes.items():
        for port in PORTS[kind]:
            if (nid, port) not in ports:
                problems.append(f"{kind} node {nid} has empty port {port}")
    for name, eid in net.free.items():
        if eid not in net.edges:
            problems.append(f"free edge for {name} missing")
    if net.root is not None and net.root not in net.edges:
        problems.append("root edge missing")
    for bid, b in net.boxes.items():
        if net.nodes.get(b.principal) != "bang":
            problems.append(f"box {bid} principal is not an of-course node")
        for a in b.auxiliaries:
            if net.nodes.get(a) != "whynot":
                problems.append(f"box {bid} auxiliary {a} is not a why-not node")
        doors = {b.principal, *b.auxiliaries}
        if not doors <= b.contents:
            problems.append(f"box {bid} doors must belong to the box")
        for nid in b.contents:
            if nid not in net.nodes:
                problems.append(f"box {bid} contains missing node {nid}")
    for b1, box1 in net.boxes.items():
        for b2, box2 in net.boxes.items():
            if b1 < b2:
                inter = box1.contents & box2.contents
                if inter and not (box1.contents <= box2.contents
                                  or box2.contents <= box1.contents):
                    problems.append(f"boxes {b1},{b2} overlap without nesting")
    for bid, b in net.boxes.items():
        for eid, e in net.edges.items():
            if len(e.ends) != 2 or any(end is None for end in e.ends):
                continue
            sides = [end[0] == "node" and end[1] in b.contents for end in e.ends]
            if sides[0] != sides[1]:
                inside = e.ends[0] if sides[0] else e.ends[1]
                _, nid, port = inside
                if not (nid in (b.principal, *b.auxiliaries) and port == "out"):
                    problems.append(f"edge {eid} crosses box {bid} away from a door")
    for eid, e in net.edges.items():
        if not e.weight.is_zero:
            for a in e.weight.atoms:
                if a.level < 0:
                    problems.append(f"edge {eid} carries a negative level")
                elif strict_levels and a.level != net.edge_depth(eid):
                    problems.append(
                        f"edge {eid} atom level {a.level} != box depth {net.edge_depth(eid)}")
    return problems


# ---------------------------------------------------------------------------
# translation

@dataclass
class _Sub:
    root: int
    free: dict
    levels: dict


class _Translator:
    def __init__(self, net: Net, cbn: bool, weighted: bool):
        self.net = net
        self.cbn = cbn
        self.weighted = weighted
        self.box_stack: list[set] = []

    def node(self, kind: str) -> int:
        nid = self.net.new_node(kind)
        for contents in self.box_stack:
            contents.add(nid)
        return nid

    def lw_here(self, label: Optional[Label], level: int) -> LevelledWeight:
        if not self.weighted:
            return LevelledWeight(ONE, 0)
        if label is None:
            return LevelledWeight(ONE, level)
        return lw(label, level)

    def const(self, base: str, level: int, star: bool = False) -> Weight:
        if not self.weighted:
            return ONE
        return watom(base, level, star)

    def go(self, term: Term, level: int, override: Optional[Label] = None) -> _Sub:
        net = self.net
        match term:
            case Var(name, label):
                r = self.lw_here(override if override is not None else label, level)
                ax = self.node("ax")
                e_body = net.new_edge(None, ("node", ax, "a"), r.weight)
                e_var = net.new_edge(("node", ax, "b"), None, ONE)
                out_level = r.out_level
                if self.cbn:
                    d = self.node("derelict")
                    net.attach(e_var, 1, ("node", d, "in"))
                    e_d = net.new_edge(("node", d, "out"), None,
                                       self.const("d", out_level))
                    free_edge = e_d
                else:
                    free_edge = e_var
                return _Sub(e_body, {name: free_edge}, {name: out_level})

            case Abs(binder, body, label):
                r = self.lw_here(override if override is not None else label, level)
                o = r.out_level
                if self.cbn:
                    sub = self.go(body, o)
                    par = self.node("par")
                    self._bind(sub, binder, par, o)
                    e_root = net.new_edge(None, ("node", par, "out"), r.weight)
                    return _Sub(e_root, sub.free, sub.levels)
                contents: set = set()
                self.box_stack.append(contents)
                sub = self.go(body, o + 1)
                par = self.node("par")
                self._bind(sub, binder, par, o + 1)
                bang = self.node("bang")
                net.new_edge(("node", par, "out"), ("node", bang, "in"), ONE)
                free, levels, auxiliaries = self._aux_doors(sub)
                self.box_stack.pop()
                net.boxes[net.new_id()] = Box(bang, tuple(auxiliaries), contents)
                e_root = net.new_edge(None, ("node", bang, "out"), r.weight)
                return _Sub(e_root, free, levels)

            case App(fun, arg, label):
                r = self.lw_here(override if override is not None else label, level)
                o = r.out_level
                fsub = self.go(fun, o)
                tensor = self.node("tensor")
                cut = self.node("cut")
                e_root = net.new_edge(None, ("node", tensor, "right"),
                                      compose(r.weight, self.const("q", o)))
                if self.cbn:
                    net.new_edge(("node", tensor, "out"), ("node", cut, "a"), ONE)
                    net.attach(fsub.root, 0, ("node", cut, "b"))
                    ext, afree, alevels = self._arg_box(
                        arg, o, self.const("p", o, star=True), split=False)
                    net.attach(ext, 0, ("node", tensor, "left"))
                else:
                    der = self.node("derelict")
                    net.new_edge(("node", tensor, "out"), ("node", der, "in"), ONE)
                    net.new_edge(("node", der, "out"), ("node", cut, "a"),
                                 self.const("d", o))
                    net.attach(fsub.root, 0, ("node", cut, "b"))
                    asub = self.go(arg, o)
                    net.edges[asub.root].compose_incoming(
                        0, self.const("p", o, star=True))
                    net.attach(asub.root, 0, ("node", tensor, "left"))
                    ext, afree, alevels = asub.root, asub.free, asub.levels
                self._merge_check(fsub.free, afree)
                return _Sub(e_root, {**fsub.free, **afree},
                            {**fsub.levels, **alevels})

            case Erase(binder, body):
                sub = self.go(body, level, override)
                weaken = self.node("weaken")
                e_x = net.new_edge(("node", weaken, "out"), None,
                                   ZERO if self.weighted else ONE)
                free = {**sub.free, binder: e_x}
                levels = {**sub.levels, binder: level if self.weighted else 0}
                return _Sub(sub.root, free, levels)

            case Copy(source, left, right, body):
                sub = self.go(body, level, override)
                fan = self.node("fan")
                ly, lz = sub.levels[left], sub.levels[right]
                if self.weighted and ly != lz:
                    raise TranslationError(
                        f"copy targets at different levels ({ly} vs {lz})")
                net.edges[sub.free[left]].compose_outgoing(1, self.const("r", ly))
                net.attach(sub.free[left], 1, ("node", fan, "left"))
                net.edges[sub.free[right]].compose_outgoing(1, self.const("s", lz))
                net.attach(sub.free[right], 1, ("node", fan, "right"))
                e_x = net.new_edge(("node", fan, "out"), None, ONE)
                free = {k: v for k, v in sub.free.items() if k not in (left, right)}
                levels = {k: v for k, v in sub.levels.items() if k not in (left, right)}
                free[source] = e_x
                levels[source] = ly
                return _Sub(sub.root, free, levels)

            case Subst(body, arg, target):
                sub = self.go(body, level, override)
                lx = sub.levels[target]
                cut = self.node("cut")
                if self.cbn:
                    net.attach(sub.free[target], 1, ("node", cut, "a"))
                    ext, afree, alevels = self._arg_box(arg, lx, ONE, split=True)
                    net.attach(ext, 0, ("node", cut, "b"))
                else:
                    net.attach(sub.free[target], 1, ("node", cut, "a"))
                    asub = self.go(arg, self._arg_level(arg, lx))
                    net.attach(asub.root, 0, ("node", cut, "b"))
                    afree, alevels = asub.free, asub.levels
                free = {k: v for k, v in sub.free.items() if k != target}
                levels = {k: v for k, v in sub.levels.items() if k != target}
                self._merge_check(free, afree)
                return _Sub(sub.root, {**free, **afree}, {**levels, **alevels})

        raise AssertionError

    def _bind(self, sub: _Sub, binder: str, par: int, inner_level: int) -> None:
        net = self.net
        if binder not in sub.free:
            raise TranslationError(f"binder {binder} unused (term not linear)")
        e_x = sub.free.pop(binder)
        sub.levels.pop(binder)
        net.edges[e_x].compose_outgoing(1, self.const("p", inner_level))
        net.attach(e_x, 1, ("node", par, "left"))
        net.edges[sub.root].compose_incoming(
            0, self.const("q", inner_level, star=True))
        net.attach(sub.root, 0, ("node", par, "right"))

    def _aux_doors(self, sub: _Sub):
        # free edges dangle at ends[1]; leaving through the door reads t*,
        # so entering the box reads t at the outer level
        net = self.net
        auxiliaries = []
        free = {}
        levels = {}
        for name in sorted(sub.free):
            why = self.node("whynot")
            net.attach(sub.free[name], 1, ("node", why, "in"))
            ly = sub.levels[name]
            if self.weighted and ly < 1:
                raise LevelUnderflowError(f"auxiliary door for {name} at level 0")
            e_aux = net.new_edge(("node", why, "out"), None,
                                 self.const("t", max(ly - 1, 0), star=True))
            auxiliaries.append(why)
            free[name] = e_aux
            levels[name] = ly - 1 if self.weighted else 0
        return free, levels, auxiliaries

    def _arg_level(self, arg: Term, entry: int) -> int:
        """Entry level for a substitution argument.

        A substitution onto an erased binder loses the level its variable
        occupied; the argument's own label still records the descent, so
        raise the entry just enough for its translation to stay above zero.
        """
        if not self.weighted:
            return entry
        try:
            need = entry_level_needed(label_of(arg))
        except Exception:
            return entry
        return max(entry, need)

    def _arg_box(self, arg: Term, entry: int, prefix: Weight, split: bool):
        """Box the translation of an argument.

        With ``split`` (substitution arguments) the label prefix up to and
        including its trailing box marker is read on the external edge and
        the remainder stays on the interior root; otherwise (application
        arguments) the label is read inside and the door itself raises the
        level.
        """
        net = self.net
        override = None
        ext_weight = prefix
        if split and self.weighted:
            outside, inside = split_argument_label(label_of(arg))
            entry = max(entry, entry_level_needed(outside))
            r = lw(outside, entry)
            ext_weight = compose(prefix, r.weight)
            interior_entry = r.out_level
            override = inside
        else:
            interior_entry = entry + 1 if self.weighted else 0
        contents: set = set()
        self.box_stack.append(contents)
        sub = self.go(arg, interior_entry, override)
        bang = self.node("bang")
        net.attach(sub.root, 0, ("node", bang, "in"))
        free, levels, auxiliaries = self._aux_doors(sub)
        self.box_stack.pop()
        net.boxes[net.new_id()] = Box(bang, tuple(auxiliaries), contents)
        e_ext = net.new_edge(None, ("node", bang, "out"), ext_weight)
        return e_ext, free, levels

    @staticmethod
    def _merge_check(a: dict, b: dict) -> None:
        shared = set(a) & set(b)
        if shared:
            raise TranslationError(f"free variables not linear: {sorted(shared)}")


def split_argument_label(label: Label) -> tuple[Label, Label]:
    """Split an argument label into (markers + underline + box marker, rest).

    Reachable substitution arguments have labels of this shape; anything
    else is rejected.
    """
    i = 0
    while i < len(label) and isinstance(label[i], Marker) and label[i].direction == RIGHT:
        i += 1
    if i >= len(label) or not isinstance(label[i], Under):
        raise TranslationError("argument label lacks an underlined block")
    i += 1
    if i >= len(label) or label[i] != Marker(LEFT, "!"):
        raise TranslationError("argument label lacks its box marker")
    i += 1
    if i >= len(label):
        raise TranslationError("argument label ends at its box marker")
    return label[:i], label[i:]


def _translate(term: Term, level: int, cbn: bool, weighted: bool) -> Net:
    net = Net()
    tr = _Translator(net, cbn, weighted)
    sub = tr.go(term, level)
    net.attach(sub.root, 0, ("root",))
    net.root = sub.root
    for name in sorted(sub.free):
        net.attach(sub.free[name], 1, ("free", name))
        net.free[name] = sub.free[name]
    problems = validate(net)
    if problems:
        raise TranslationError("; ".join(problems))
    return net


def translate_cbv(term: Term, level: int = 0, weighted: bool = True) -> Net:
    return _translate(term, level, cbn=False, weighted=weighted)


def translate_cbn(term: Term, level: int = 0, weighted: bool = True) -> Net:
    return _translate(term, level, cbn=True, weighted=weighted)


# ---------------------------------------------------------------------------
# closed cut elimination

def remove_binary_node(net: Net, nid: int, port_a: str, port_b: str) -> int:
    """Delete a two-port node, fusing its edges into one oriented edge.

    The fused edge reads (edge at port_a towards the node) then (edge at
    port_b away from the node).
    """
    pm = net.port_map()
    ea, ia = pm[(nid, port_a)]
    eb, ib = pm[(nid, port_b)]
    if ea == eb:
        raise NetError("cannot fuse a self-loop")
    edge_a, edge_b = net.edges[ea], net.edges[eb]
    outer_a = edge_a.ends[1 - ia]
    outer_b = edge_b.ends[1 - ib]
    weight = compose(edge_a.weight_from(1 - ia), edge_b.weight_from(ib))
    fused = net.new_edge(outer_a, outer_b, weight)
    for old in (ea, eb):
        net.edges.pop(old)
        if net.root == old:
            net.root = fused
        for name, fe in list(net.free.items()):
            if fe == old:
                net.free[name] = fused
    net.nodes.pop(nid)
    for b in net.boxes.values():
        b.contents.discard(nid)
    return fused


def _box_closed(box: Box) -> bool:
    return len(box.auxiliaries) == 0


def _classify_cut(net: Net, cut: int):
    if net.nodes.get(cut) != "cut":
        raise NotACutError(f"node {cut} is not a cut")
    pm = net.port_map()
    fars = []
    for port in ("a", "b"):
        eid, idx = pm[(cut, port)]
        far = net.edges[eid].ends[1 - idx]
        if far is None or far[0] != "node":
            raise NetError("cut against the interface cannot fire")
        fars.append(far)
    far_a, far_b = fars
    ka, kb = net.nodes[far_a[1]], net.nodes[far_b[1]]
    if ka == "ax":
        return ("ax", far_a[1])
    if kb == "ax":
        return ("ax", far_b[1])
    if {ka, kb} == {"tensor", "par"}:
        if far_a[2] != "out" or far_b[2] != "out":
            raise NetError("multiplicative cut away from conclusions")
        tensor = far_a[1] if ka == "tensor" else far_b[1]
        par = far_a[1] if ka == "par" else far_b[1]
        return ("mult", tensor, par)

    def principal_box(far):
        if net.nodes[far[1]] == "bang" and far[2] == "out":
            return net.box_of_principal(far[1])
        return None

    box_a, box_b = principal_box(far_a), principal_box(far_b)
    for kind, name in (("derelict", "derelict"), ("fan", "fan"), ("weaken", "weaken")):
        if ka == kind and box_b is not None:
            if kind != "weaken" and far_a[2] != "out":
                raise NetError(f"{kind} cut away from its conclusion")
            return (name, far_a[1], far_b[1], box_b)
        if kb == kind and box_a is not None:
            if kind != "weaken" and far_b[2] != "out":
                raise NetError(f"{kind} cut away from its conclusion")
            return (name, far_b[1], far_a[1], box_a)

    def aux_box(far):
        if net.nodes[far[1]] == "whynot" and far[2] == "out":
            return net.box_of_auxiliary(far[1])
        return None

    if box_a is not None and aux_box(far_b) is not None:
        return ("commute", far_a[1], far_b[1], box_a, aux_box(far_b))
    if box_b is not None and aux_box(far_a) is not None:
        return ("commute", far_b[1], far_a[1], box_b, aux_box(far_a))
    raise NetError("cut is not reducible by closed elimination")


def eligible_cuts(net: Net) -> list:
    """Cut nodes where a closed elimination step applies, in id order."""
    out = []
    for nid, kind in net.nodes.items():
        if kind != "cut":
            continue
        try:
            info = _classify_cut(net, nid)
        except NetError:
            continue
        if info[0] in ("derelict", "fan", "weaken"):
            if not _box_closed(net.boxes[info[3]]):
                continue
        if info[0] == "commute" and not _box_closed(net.boxes[info[3]]):
            continue
        out.append(nid)
    return sorted(out)


def closed_cut_step(net: Net, cut: int) -> Net:
    """One step of closed cut elimination at the given cut node."""
    info = _classify_cut(net, cut)
    net = net.copy()
    rule = info[0]
    if rule == "ax":
        ax = info[1]
        remove_binary_node(net, cut, "a", "b")
        remove_binary_node(net, ax, "a", "b")
        return net
    if rule == "mult":
        return _mult_step(net, cut, info[1], info[2])
    if rule == "derelict":
        return _derelict_step(net, cut, info[1], info[2], info[3])
    if rule == "fan":
        return _fan_step(net, cut, info[1], info[2], info[3])
    if rule == "weaken":
        return _weaken_step(net, cut, info[1], info[2], info[3])
    if rule == "commute":
        return _commute_step(net, cut, info[1], info[2], info[3], info[4])
    raise AssertionError(rule)


def _cut_edges(net: Net, cut: int):
    pm = net.port_map()
    return pm[(cut, "a")], pm[(cut, "b")]


def _crossing_weight(net: Net, cut: int, from_node: int) -> Weight:
    """Weight read crossing the cut starting on ``from_node``'s side."""
    (ea, ia), (eb, ib) = _cut_edges(net, cut)
    edge_a, edge_b = net.edges[ea], net.edges[eb]
    far_a = edge_a.ends[1 - ia]
    if far_a is not None and far_a[0] == "node" and far_a[1] == from_node:
        return compose(edge_a.weight_from(1 - ia), edge_b.weight_from(ib))
    return compose(edge_b.weight_from(1 - ib), edge_a.weight_from(ia))


def _boxes_of_node(net: Net, nid: int) -> list:
    return [bid for bid, b in net.boxes.items() if nid in b.contents]


def _mult_step(net: Net, cut: int, tensor: int, par: int) -> Net:
    u = _crossing_weight(net, cut, tensor)
    pm = net.port_map()
    enclosing = _boxes_of_node(net, cut)
    (ea, _), (eb, _) = _cut_edges(net, cut)
    net.edges.pop(ea)
    net.edges.pop(eb)
    for side in ("left", "right"):
        te, ti = pm[(tensor, side)]
        pe, pi = pm[(par, side)]
        c = net.new_node("cut")
        for bid in enclosing:
            net.boxes[bid].contents.add(c)
        net.edges[te].ends[ti] = ("node", c, "a")
        net.edges[pe].ends[pi] = ("node", c, "b")
        net.edges[pe].compose_incoming(pi, u)
    for nid in (tensor, par, cut):
        net.nodes.pop(nid)
        for b in net.boxes.values():
            b.contents.discard(nid)
    return net


def _derelict_step(net: Net, cut: int, der: int, bang: int, bid: int) -> Net:
    if not _box_closed(net.boxes[bid]):
        raise NotClosedError("dereliction cut needs a box with no auxiliary doors")
    remove_binary_node(net, cut, "a", "b")
    remove_binary_node(net, der, "in", "out")
    remove_binary_node(net, bang, "in", "out")
    net.boxes.pop(bid)
    return net


def _weaken_step(net: Net, cut: int, weaken: int, bang: int, bid: int) -> Net:
    box = net.boxes[bid]
    if not _box_closed(box):
        raise NotClosedError("weakening cut needs a box with no auxiliary doors")
    doomed = set(box.contents) | {weaken, cut}
    for eid, e in list(net.edges.items()):
        if any(end is not None and end[0] == "node" and end[1] in doomed
               for end in e.ends):
            net.edges.pop(eid)
    for nid in doomed:
        net.nodes.pop(nid, None)
    for b2, bx in list(net.boxes.items()):
        if bx.contents <= box.contents:
            net.boxes.pop(b2, None)
    for b in net.boxes.values():
        b.contents -= doomed
    return net


def _copy_closed_box(net: Net, bid: int, enclosing: list) -> int:
    """Duplicate a closed box in place; returns the new principal node."""
    box = net.boxes[bid]
    mapping = {}
    for nid in sorted(box.contents):
        mapping[nid] = net.new_node(net.nodes[nid])
    for eid, e in sorted(net.edges.items()):
        ins = [end is not None and end[0] == "node" and end[1] in mapping
               for end in e.ends]
        if all(ins):
            net.new_edge(("node", mapping[e.ends[0][1]], e.ends[0][2]),
                         ("node", mapping[e.ends[1][1]], e.ends[1][2]),
                         e.weight)
    for b2, bx in sorted(net.boxes.items()):
        if bx.contents <= box.contents:
            net.boxes[net.new_id()] = Box(
                mapping[bx.principal],
                tuple(mapping[a] for a in bx.auxiliaries),
                {mapping[n] for n in bx.contents})
    new_nodes = set(mapping.values())
    for bid2 in enclosing:
        if bid2 in net.boxes:
            net.boxes[bid2].contents |= new_nodes
    return mapping[box.principal]


def _fan_step(net: Net, cut: int, fan: int, bang: int, bid: int) -> Net:
    box = net.boxes[bid]
    if not _box_closed(box):
        raise NotClosedError("contraction cut needs a box with no auxiliary doors")
    pm = net.port_map()
    (ea, ia), (eb, ib) = _cut_edges(net, cut)
    if net.edges[ea].ends[1 - ia][1] == fan:
        fan_edge, ext_edge = ea, eb
    else:
        fan_edge, ext_edge = eb, ea
    u = _crossing_weight(net, cut, fan)
    enclosing = _boxes_of_node(net, cut)
    new_bangs = [_copy_closed_box(net, bid, enclosing) for _ in range(2)]
    # drop the original box, its contents, interior edges, and the cut pair
    doomed = set(box.contents)
    for eid, e in list(net.edges.items()):
        if eid in (fan_edge, ext_edge):
            continue
        if any(end is not None and end[0] == "node" and end[1] in doomed
               for end in e.ends):
            net.edges.pop(eid)
    for nid in doomed:
        net.nodes.pop(nid, None)
    for b2, bx in list(net.boxes.items()):
        if bx.contents and bx.contents <= doomed:
            net.boxes.pop(b2, None)
    net.boxes.pop(bid, None)
    for b in net.boxes.values():
        b.contents -= doomed
    net.edges.pop(fan_edge)
    net.edges.pop(ext_edge)
    for side, new_bang in zip(("left", "right"), new_bangs):
        pe, pi = pm[(fan, side)]
        c = net.new_node("cut")
        for bid2 in enclosing:
            if bid2 in net.boxes:
                net.boxes[bid2].contents.add(c)
        net.edges[pe].ends[pi] = ("node", c, "a")
        # traversal premise -> cut -> new box reads the old crossing weight
        net.new_edge(("node", new_bang, "out"), ("node", c, "b"), involute(u))
    for nid in (fan, cut):
        net.nodes.pop(nid)
        for b in net.boxes.values():
            b.contents.discard(nid)
    return net


def _commute_step(net: Net, cut: int, bang: int, whynot: int,
                  moving_bid: int, target_bid: int) -> Net:
    box1 = net.boxes[moving_bid]
    if not _box_closed(box1):
        raise NotClosedError("commutative cut needs a closed moving box")
    box2 = net.boxes[target_bid]
    remove_binary_node(net, whynot, "in", "out")
    box2.auxiliaries = tuple(a for a in box2.auxiliaries if a != whynot)
    box2.contents |= set(box1.contents) | {cut}
    return net


# ---------------------------------------------------------------------------
# isomorphism

def contracted(net: Net) -> Net:
    """Copy with axiom and cut nodes spliced out (they only carry linking)."""
    out = net.copy()
    changed = True
    while changed:
        changed = False
        for nid, kind in list(out.nodes.items()):
            if kind in ("ax", "cut"):
                pm = out.port_map()
                ea, _ = pm[(nid, "a")]
                eb, _ = pm[(nid, "b")]
                if ea == eb:
                    continue  # closed loop: keep, nothing to compare against
                remove_binary_node(out, nid, "a", "b")
                changed = True
                break
    return out


def _explore(net: Net, pm: dict, seeds, edge_ids: dict, node_ids: dict,
             first_end: Optional[int] = None) -> None:
    """Deterministic breadth-first numbering of edges and nodes from seeds."""
    queue = deque()
    for eid in seeds:
        if eid not in edge_ids:
            edge_ids[eid] = len(edge_ids)
            queue.append(eid)
    first = True
    while queue:
        eid = queue.popleft()
        ends = net.edges[eid].ends

        def rank(item):
            i, end = item
            if end is None or end[0] != "node":
                return (0, 0)
            if first and first_end is not None:
                return (1, 0 if i == first_end else 1)
            return (1, 0) if end[1] in node_ids else (2, 0)

        for _, end in sorted(enumerate(ends), key=rank):
            if end is None or end[0] != "node":
                continue
            nid = end[1]
            if nid in node_ids:
                continue
            node_ids[nid] = len(node_ids)
            for port in PORTS[net.nodes[nid]]:
                e2, _ = pm[(nid, port)]
                if e2 not in edge_ids:
                    edge_ids[e2] = len(edge_ids)
                    queue.append(e2)
        first = False


def _signature_part(net: Net, edge_ids: dict, node_ids: dict):
    def end_repr(end) -> str:
        if end[0] == "root":
            return "root"
        if end[0] == "free":
            return f"free:{end[1]}"
        return f"n{node_ids[end[1]]:06d}:{end[2]}"

    nodes = tuple(kind for _, kind in sorted(
        ((cid, net.nodes[nid]) for nid, cid in node_ids.items())))
    edges = []
    for eid in edge_ids:
        e = net.edges[eid]
        if any(end is not None and end[0] == "node" and end[1] not in node_ids
               for end in e.ends):
            raise NetError("component boundary crossed")
        r0, r1 = end_repr(e.ends[0]), end_repr(e.ends[1])
        if r0 <= r1:
            edges.append((r0, r1, format_weight(e.weight)))
        else:
            edges.append((r1, r0, format_weight(involute(e.weight))))
    boxes = []
    for b in net.boxes.values():
        if b.principal in node_ids:
            boxes.append((node_ids[b.principal],
                          tuple(sorted(node_ids[a] for a in b.auxiliaries)),
                          tuple(sorted(node_ids[n] for n in b.contents))))
    return (nodes, tuple(sorted(edges)), tuple(sorted(boxes)))


def canonical_signature(net: Net):
    """Order-independent description of the net.

    The interface-reachable part is numbered from the root and the free
    edges; interface-free islands (erased substitutions produce them) are
    canonicalised by minimising over their possible anchor edges.
    """
    pm = net.port_map()
    anchors = []
    if net.root is not None:
        anchors.append(net.root)
    anchors.extend(net.free[name] for name in sorted(net.free))
    edge_ids: dict[int, int] = {}
    node_ids: dict[int, int] = {}
    _explore(net, pm, anchors, edge_ids, node_ids)
    main = _signature_part(net, edge_ids, node_ids)
    leftovers = set(net.edges) - set(edge_ids)
    islands = []
    while leftovers:
        seed = next(iter(leftovers))
        component_edges = None
        best = None
        # discover the component once to know its extent
        probe_e: dict = {}
        probe_n: dict = {}
        _explore(net, pm, [seed], probe_e, probe_n)
        component_edges = set(probe_e)
        for eid in sorted(component_edges):
            for first_end in (0, 1):
                ce: dict = {}
                cn: dict = {}
                _explore(net, pm, [eid], ce, cn, first_end=first_end)
                sig = _signature_part(net, ce, cn)
                if best is None or sig < best:
                    best = sig
        islands.append(best)
        leftovers -= component_edges
    return (main, tuple(sorted(islands)))


def iso_check(a: Net, b: Net) -> bool:
    """Kind-, port-, box- and weight-preserving isomorphism, after splicing
    out axiom/cut linking nodes on both sides."""
    try:
        return canonical_signature(contracted(a)) == canonical_signature(contracted(b))
    except NetError:
        return False


# ---------------------------------------------------------------------------
# export

def to_json(net: Net) -> str:
    def end_json(end):
        return list(end)

    data = {
        "nodes": [{"id": nid, "kind": kind} for nid, kind in sorted(net.nodes.items())],
        "edges": [
            {
                "id": eid,
                "ends": [end_json(e.ends[0]), end_json(e.ends[1])],
                "weight": None if e.weight.is_zero else [
                    [a.base, a.star, a.level] for a in e.weight.atoms],
            }
            for eid, e in sorted(net.edges.items())
        ],
        "boxes": [
            {
                "id": bid,
                "principal": b.principal,
                "auxiliaries": list(b.auxiliaries),
                "contents": sorted(b.contents),
            }
            for bid, b in sorted(net.boxes.items())
        ],
        "root": net.root,
        "free": {name: eid for name, eid in sorted(net.free.items())},
    }
    return json.dumps(data, indent=2, sort_keys=True)


def from_json(text: str) -> Net:
    data = json.loads(text)
    net = Net()
    for nd in data["nodes"]:
        net.nodes[nd["id"]] = nd["kind"]
    for ed in data["edges"]:
        weight = ZERO if ed["weight"] is None else Weight(
            tuple(WAtom(base, star, level) for base, star, level in ed["weight"]))
        net.edges[ed["id"]] = Edge([tuple(ed["ends"][0]), tuple(ed["ends"][1])], weight)
    for bd in data["boxes"]:
        net.boxes[bd["id"]] = Box(bd["principal"], tuple(bd["auxiliaries"]),
                                  set(bd["contents"]))
    net.root = data["root"]
    net.free = dict(data["free"])
    net._next = max([0, *net.nodes, *net.edges, *net.boxes]) + 1
    return net


def to_dot(net: Net) -> str:
    lines = ["digraph net {", "  rankdir=TB;", "  node [fontsize=10];"]
    children: dict[Optional[int], list] = {}
    order = sorted(net.boxes, key=lambda b: len(net.boxes[b].contents))

    def parent_of(bid):
        best = None
        for other in net.boxes:
            if other == bid:
                continue
            if net.boxes[bid].contents < net.boxes[other].contents:
                if best is None or net.boxes[other].contents < net.boxes[best].contents:
                    best = other
        return best

    for bid in order:
        children.setdefault(parent_of(bid), []).append(bid)
    placed = set()

    def node_line(nid):
        placed.add(nid)
        return f'    n{nid} [label="{net.nodes[nid]}"];'

    def emit_box(bid, indent):
        pad = " " * indent
        out = [f"{pad}subgraph cluster_{bid} {{", f'{pad}  label="box";']
        direct = set(net.boxes[bid].contents)
        for sub in children.get(bid, []):
            direct -= net.boxes[sub].contents
            out.extend(emit_box(sub, indent + 2))
        for nid in sorted(direct):
            out.append(" " * (indent + 2) + node_line(nid).strip())
            placed.add(nid)
        out.append(f"{pad}}}")
        return out

    for bid in sorted(children.get(None, [])):
        lines.extend(emit_box(bid, 2))
    for nid in sorted(net.nodes):
        if nid not in placed:
            lines.append(node_line(nid))
    lines.append('  root [shape=point,label=""];')
    for name in sorted(net.free):
        lines.append(f'  free_{name} [shape=point,label="{name}"];')

    def end_dot(end):
        if end[0] == "root":
            return "root"
        if end[0] == "free":
            return f"free_{end[1]}"
        return f"n{end[1]}"

    for eid, e in sorted(net.edges.items()):
        label = format_weight(e.weight)
        attr = f' [label="{label}"]' if label != "1" else ""
        lines.append(f"  {end_dot(e.ends[0])} -> {end_dot(e.ends[1])}{attr};")
    lines.append("}")
    return "\n".join(lines)
