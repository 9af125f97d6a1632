"""Levy-style labelled beta reduction on plain lambda terms.

The reference calculus: substitution is a meta-operation, labels record
redex history through over/underlined copies of the function label.
"""

from __future__ import annotations

from .labels import concat, over, under
from .labelled import bullet
from .terms import (Abs, App, FreshSupply, Term, Var, all_var_names,
                    free_vars, is_lambda_term, subterm_at, subterms,
                    replace_at)


class NoRedexAtPositionError(Exception):
    pass


def meta_substitute(term: Term, x: str, value: Term, supply: FreshSupply) -> Term:
    """Capture-avoiding substitution with label prefixing on hit variables."""
    match term:
        case Var(name, label):
            if name == x:
                return bullet(label, value)
            return term
        case Abs(binder, body, label):
            if binder == x:
                return term
            if binder in free_vars(value) and x in free_vars(body):
                new = supply.fresh(binder)
                body = _rename_bound(body, binder, new)
                binder = new
            if x not in free_vars(body):
                return Abs(binder, body, label)
            return Abs(binder, meta_substitute(body, x, value, supply), label)
        case App(fun, arg, label):
            return App(meta_substitute(fun, x, value, supply),
                       meta_substitute(arg, x, value, supply), label)
    raise AssertionError


def _rename_bound(term: Term, old: str, new: str) -> Term:
    match term:
        case Var(name, label):
            return Var(new, label) if name == old else term
        case Abs(binder, body, label):
            if binder == old:
                return term
            return Abs(binder, _rename_bound(body, old, new), label)
        case App(fun, arg, label):
            return App(_rename_bound(fun, old, new), _rename_bound(arg, old, new), label)
    raise AssertionError


def levy_redexes(term: Term) -> list:
    return [pos for pos, t in subterms(term)
            if isinstance(t, App) and isinstance(t.fun, Abs)]


def levy_step(term: Term, position: tuple = ()) -> Term:
    """((\\x.M)^a N)^b  ->  b.<a> . (M[ _(a) . N / x])"""
    if not is_lambda_term(term):
        raise ValueError("levy_step expects a plain lambda term")
    node = subterm_at(term, position)
    if not (isinstance(node, App) and isinstance(node.fun, Abs)):
        raise NoRedexAtPositionError(position)
    fun, arg, beta = node.fun, node.arg, node.label
    alpha = fun.label
    if alpha is None or beta is None:
        raise ValueError("levy_step needs labelled redex nodes")
    supply = FreshSupply(used=set(all_var_names(term)))
    body = meta_substitute(fun.body, fun.binder, bullet(under(alpha), arg), supply)
    result = bullet(concat(beta, over(alpha)), body)
    return replace_at(term, position, result)


def levy_normalize(term: Term, fuel: int = 1000) -> Term:
    while fuel > 0:
        redexes = levy_redexes(term)
        if not redexes:
            return term
        term = levy_step(term, redexes[0])
        fuel -= 1
    raise RuntimeError("fuel exhausted")
