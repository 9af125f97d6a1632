"""The labelled calculi of closed functions (lcf) and closed arguments (lca).

Both systems rewrite pairs (term, B) where B collects erased, W-marked
arguments.  Rules fire under any context; sites are ordered position-first
(preorder) and rule-name-alphabetical for reproducible traces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .labels import LEFT, RIGHT, concat, mark, over, reverse, under
from .labelled import bullet, label_of
from .terms import (Abs, App, Copy, Erase, Subst, Term, Var, check_linear,
                    free_vars, replace_at, subterm_at, subterms, term_size)

LCF = "lcf"
LCA = "lca"

RULES = {
    LCF: ("App1", "App2", "Beta", "Cmp", "Cpy1", "Cpy2", "Ers1", "Ers2", "Lam", "Var"),
    LCA: ("App1", "App2", "Beta", "Cpy1", "Cpy2", "Ers1", "Ers2", "Lam", "Var"),
}

SIGMA_RULES = {
    LCF: tuple(r for r in RULES[LCF] if r != "Beta"),
    LCA: tuple(r for r in RULES[LCA] if r != "Beta"),
}


class PatternMismatchError(Exception):
    pass


class SideConditionViolatedError(Exception):
    pass


class FuelExhaustedError(Exception):
    pass


@dataclass(frozen=True)
class Configuration:
    term: Term
    erased: frozenset = frozenset()


@dataclass(frozen=True)
class RedexSite:
    position: tuple
    rule: str


@dataclass(frozen=True)
class TraceStep:
    site: RedexSite
    config: Configuration


def _pre(prefix, term: Term) -> Term:
    """Label prefixing that degrades to identity on unlabelled redexes."""
    if prefix is None:
        return term
    return bullet(prefix, term)


def _apply_rule(node: Term, rule: str, calculus: str):
    """Apply ``rule`` at ``node``.  Returns (new_node, erased_term | None).

    Raises PatternMismatchError when the left-hand side does not match and
    SideConditionViolatedError when it matches but the condition fails.
    """
    if calculus not in RULES:
        raise ValueError(f"unknown calculus {calculus!r}")
    if rule not in RULES[calculus]:
        raise PatternMismatchError(f"rule {rule} not in {calculus}")

    if rule == "Beta":
        if not (isinstance(node, App) and isinstance(node.fun, Abs)):
            raise PatternMismatchError("Beta needs an applied abstraction")
        fun, arg, beta = node.fun, node.arg, node.label
        alpha = fun.label
        labelled = alpha is not None and beta is not None
        if calculus == LCF:
            if free_vars(fun):
                raise SideConditionViolatedError("function part is not closed")
            if labelled:
                block = concat(mark(RIGHT, "D"), alpha, mark(LEFT, "!"))
                outer = concat(beta, over(block))
                inner = concat(under(reverse(block)))
            else:
                outer = inner = None
        else:
            if free_vars(arg):
                raise SideConditionViolatedError("argument part is not closed")
            if labelled:
                outer = concat(beta, over(alpha))
                inner = concat(under(reverse(alpha)), mark(LEFT, "!"))
            else:
                outer = inner = None
        result = Subst(fun.body, _pre(inner, arg), fun.binder)
        return _pre(outer, result), None

    if not isinstance(node, Subst):
        raise PatternMismatchError(f"{rule} rewrites a substitution")
    body, arg, x = node.body, node.arg, node.target

    if rule == "Lam":
        if not isinstance(body, Abs):
            raise PatternMismatchError("Lam needs an abstraction body")
        if calculus == LCF:
            if free_vars(arg):
                raise SideConditionViolatedError("Lam needs a closed argument")
            marked = _pre(mark(RIGHT, "?") if _is_labelled(arg) else None, arg)
        else:
            marked = arg
        return Abs(body.binder, Subst(body.body, marked, x), body.label), None

    if rule in ("App1", "App2"):
        if not isinstance(body, App):
            raise PatternMismatchError("App1/App2 need an application body")
        in_fun = x in free_vars(body.fun)
        if rule == "App1":
            if not in_fun:
                raise SideConditionViolatedError(f"{x} not free in function part")
            return App(Subst(body.fun, arg, x), body.arg, body.label), None
        if in_fun or x not in free_vars(body.arg):
            raise SideConditionViolatedError(f"{x} not free in argument part")
        marked = arg
        if calculus == LCA:
            marked = _pre(mark(RIGHT, "?") if _is_labelled(arg) else None, arg)
        return App(body.fun, Subst(body.arg, marked, x), body.label), None

    if rule in ("Cpy1", "Cpy2"):
        if not isinstance(body, Copy):
            raise PatternMismatchError("Cpy1/Cpy2 need a copy body")
        if rule == "Cpy1":
            if body.source != x:
                raise PatternMismatchError("Cpy1 needs the substituted source")
            if calculus == LCF and free_vars(arg):
                raise SideConditionViolatedError("Cpy1 needs a closed argument")
            labelled = _is_labelled(arg)
            left_arg = _pre(mark(RIGHT, "R") if labelled else None, arg)
            right_arg = _pre(mark(RIGHT, "S") if labelled else None, arg)
            inner = Subst(body.body, left_arg, body.left)
            return Subst(inner, right_arg, body.right), None
        if body.source == x:
            raise PatternMismatchError("Cpy2 needs an independent substitution")
        return Copy(body.source, body.left, body.right, Subst(body.body, arg, x)), None

    if rule in ("Ers1", "Ers2"):
        if not isinstance(body, Erase):
            raise PatternMismatchError("Ers1/Ers2 need an erase body")
        if rule == "Ers1":
            if body.binder != x:
                raise PatternMismatchError("Ers1 needs the substituted binder")
            if calculus == LCF and free_vars(arg):
                raise SideConditionViolatedError("Ers1 needs a closed argument")
            erased = _pre(mark(RIGHT, "W") if _is_labelled(arg) else None, arg)
            return body.body, erased
        if body.binder == x:
            raise PatternMismatchError("Ers2 needs an independent substitution")
        return Erase(body.binder, Subst(body.body, arg, x)), None

    if rule == "Var":
        if not (isinstance(body, Var) and body.name == x):
            raise PatternMismatchError("Var needs the substituted variable")
        if body.label is None:
            return arg, None
        prefix = body.label
        if calculus == LCA:
            prefix = concat(prefix, mark(RIGHT, "D"))
        return _pre(prefix, arg), None

    if rule == "Cmp":
        if not isinstance(body, Subst):
            raise PatternMismatchError("Cmp needs a nested substitution")
        if x not in free_vars(body.arg):
            raise SideConditionViolatedError(f"{x} not free in inner argument")
        return Subst(body.body, Subst(body.arg, arg, x), body.target), None

    raise AssertionError(rule)


def _is_labelled(term: Term) -> bool:
    match term:
        case Var(_, label) | Abs(_, _, label) | App(_, _, label):
            if label is not None:
                return True
    from .terms import children
    return any(_is_labelled(c) for c in children(term))


def _matches(node: Term, rule: str, calculus: str) -> bool:
    try:
        _apply_rule(node, rule, calculus)
        return True
    except (PatternMismatchError, SideConditionViolatedError):
        return False


def find_redexes(config: Configuration, calculus: str,
                 rules: Optional[tuple] = None) -> list:
    """All redex sites, position-lexicographic then rule-alphabetical."""
    rules = rules or RULES[calculus]
    sites = []
    for pos, node in subterms(config.term):
        for rule in rules:
            if _matches(node, rule, calculus):
                sites.append(RedexSite(pos, rule))
    return sites


def step(config: Configuration, site: RedexSite, calculus: str) -> Configuration:
    node = subterm_at(config.term, site.position)
    new_node, erased = _apply_rule(node, site.rule, calculus)
    term = replace_at(config.term, site.position, new_node)
    bag = config.erased | {erased} if erased is not None else config.erased
    return Configuration(term, bag)


def beta_lcf(config: Configuration, site: RedexSite) -> Configuration:
    if site.rule != "Beta":
        raise PatternMismatchError("site does not name the Beta rule")
    return step(config, site, LCF)


def beta_lca(config: Configuration, site: RedexSite) -> Configuration:
    if site.rule != "Beta":
        raise PatternMismatchError("site does not name the Beta rule")
    return step(config, site, LCA)


def sigma_step(config: Configuration, site: RedexSite, calculus: str = LCF) -> Configuration:
    if site.rule == "Beta":
        raise PatternMismatchError("Beta is not a sigma rule")
    return step(config, site, calculus)


def default_sigma_fuel(term: Term) -> int:
    return 10 * term_size(term) ** 2


def normalize_sigma(config: Configuration, calculus: str,
                    fuel: Optional[int] = None) -> Configuration:
    """Apply sigma rules leftmost-outermost to a sigma-normal form."""
    if fuel is None:
        fuel = default_sigma_fuel(config.term)
    while True:
        sites = find_redexes(config, calculus, SIGMA_RULES[calculus])
        if not sites:
            return config
        if fuel <= 0:
            raise FuelExhaustedError("sigma normalisation exceeded fuel")
        config = step(config, sites[0], calculus)
        fuel -= 1


def reduce(config: Configuration, calculus: str,
           strategy: str = "leftmost-outermost", fuel: int = 10_000):
    """Leftmost-outermost trace, or the exhaustive reduction graph."""
    if strategy == "leftmost-outermost":
        trace = []
        while fuel > 0:
            sites = find_redexes(config, calculus)
            if not sites:
                return trace
            config = step(config, sites[0], calculus)
            trace.append(TraceStep(sites[0], config))
            fuel -= 1
        raise FuelExhaustedError("reduction exceeded fuel")
    if strategy == "exhaustive":
        return reduction_graph(config, calculus, max_configs=fuel)
    raise ValueError(f"unknown strategy {strategy!r}")


@dataclass
class ReductionGraph:
    initial: Configuration
    edges: dict = field(default_factory=dict)  # Configuration -> tuple[(site, Configuration)]
    complete: bool = True

    @property
    def configs(self):
        return self.edges.keys()

    def normal_forms(self) -> list:
        return [c for c, succ in self.edges.items() if not succ]

    def sink_terms(self) -> set:
        return {c.term for c in self.normal_forms()}

    def steps(self) -> Iterator[tuple]:
        for src, succ in self.edges.items():
            for site, dst in succ:
                yield src, site, dst


def reduction_graph(config: Configuration, calculus: str,
                    max_configs: int = 10_000) -> ReductionGraph:
    """Breadth-first exhaustive exploration, bounded by a configuration budget."""
    graph = ReductionGraph(config)
    frontier = [config]
    seen = {config}
    graph.edges = {}
    while frontier:
        nxt = []
        for c in frontier:
            sites = find_redexes(c, calculus)
            succ = []
            for site in sites:
                d = step(c, site, calculus)
                succ.append((site, d))
                if d not in seen:
                    if len(seen) >= max_configs:
                        graph.complete = False
                        continue
                    seen.add(d)
                    nxt.append(d)
            graph.edges[c] = tuple(succ)
        frontier = nxt
    return graph


def assert_subject_reduction(config: Configuration) -> None:
    violations = check_linear(config.term)
    if violations:
        raise AssertionError(f"linearity broken: {violations}")


def trace_records(initial: Configuration, trace, calculus: str) -> list:
    """JSON-ready trace records: one per step."""
    from .terms import format_term
    records = []
    for i, ts in enumerate(trace):
        entry = {
            "step": i + 1,
            "rule": ts.site.rule,
            "position": list(ts.site.position),
            "term_printed": format_term(ts.config.term, labels=True),
            "erased_labels": sorted(
                _erased_label_text(t) for t in ts.config.erased
            ),
            "calculus": calculus,
        }
        records.append(entry)
    return records


def _erased_label_text(term: Term) -> str:
    from .labels import format_label
    try:
        return format_label(label_of(term))
    except Exception:
        return "(unlabelled)"
