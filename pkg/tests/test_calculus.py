import pytest

from goilab.calculus import (LCA, LCF, Configuration, FuelExhaustedError,
                             PatternMismatchError, RedexSite,
                             SideConditionViolatedError, beta_lca, beta_lcf,
                             default_sigma_fuel, find_redexes,
                             normalize_sigma, reduce, reduction_graph,
                             sigma_step, step, trace_records)
from goilab.corpus import closed_terms, prepare
from goilab.labelled import initialize, label_of
from goilab.labels import LEFT, RIGHT, Marker, atomic, format_label
from goilab.terms import (Abs, App, Copy, Erase, Subst, Var, check_linear,
                          compile_term, format_term, free_vars, parse_lambda,
                          subterms)


def identity_application():
    return App(Abs("x", Var("x", atomic("d")), atomic("a")),
               Abs("y", Var("y", atomic("e")), atomic("b")),
               atomic("c"))


def printed(config):
    return format_term(config.term, labels=True)


# --- Beta ------------------------------------------------------------------

def test_beta_lcf_identity_markers():
    config = Configuration(identity_application())
    site = RedexSite((), "Beta")
    out = beta_lcf(config, site)
    assert printed(out) == "x^{c.<(D>.a.<!)>.d}[(\\y.y^{e})^{_(!>.a.<D).b}/x]"
    out = step(out, RedexSite((), "Var"), LCF)
    assert printed(out) == "(\\y.y^{e})^{c.<(D>.a.<!)>.d._(!>.a.<D).b}"


def test_beta_lca_identity_markers():
    config = Configuration(identity_application())
    out = beta_lca(config, RedexSite((), "Beta"))
    assert printed(out) == "x^{c.<(a)>.d}[(\\y.y^{e})^{_(a).<!.b}/x]"
    out = step(out, RedexSite((), "Var"), LCA)
    assert printed(out) == "(\\y.y^{e})^{c.<(a)>.d.D>._(a).<!.b}"


def test_beta_lcf_requires_closed_function():
    open_fun = App(Abs("x", App(Var("x", atomic("d")), Var("z", atomic("f")),
                                atomic("g")), atomic("a")),
                   Abs("y", Var("y", atomic("e")), atomic("b")),
                   atomic("c"))
    with pytest.raises(SideConditionViolatedError):
        beta_lcf(Configuration(open_fun), RedexSite((), "Beta"))
    # the closed-argument system fires happily on the same redex
    assert beta_lca(Configuration(open_fun), RedexSite((), "Beta"))


def test_beta_pattern_mismatch():
    with pytest.raises(PatternMismatchError):
        beta_lcf(Configuration(Var("x", atomic("a"))), RedexSite((), "Beta"))


# --- sigma rules -----------------------------------------------------------

def closed_value(tag="v"):
    return Abs(tag, Var(tag, atomic("v1")), atomic("v0"))


def test_sigma_lam_lcf_adds_auxiliary_marker():
    t = Subst(Abs("y", Var("x", atomic("a")), atomic("b")), closed_value(), "x")
    out = sigma_step(Configuration(t), RedexSite((), "Lam"), LCF)
    inner = out.term.body
    assert isinstance(inner, Subst)
    assert label_of(inner.arg)[0] == Marker(RIGHT, "?")


def test_sigma_lam_lca_no_marker_no_condition():
    open_arg = Var("z", atomic("z0"))
    t = Subst(Abs("y", Var("x", atomic("a")), atomic("b")), open_arg, "x")
    with pytest.raises(SideConditionViolatedError):
        sigma_step(Configuration(t), RedexSite((), "Lam"), LCF)
    out = sigma_step(Configuration(t), RedexSite((), "Lam"), LCA)
    assert label_of(out.term.body.arg) == atomic("z0")


def test_sigma_app_routing():
    t = Subst(App(Var("x", atomic("a")), Var("y", atomic("b")), atomic("c")),
              closed_value(), "x")
    out = sigma_step(Configuration(t), RedexSite((), "App1"), LCF)
    assert isinstance(out.term.fun, Subst)
    with pytest.raises(SideConditionViolatedError):
        sigma_step(Configuration(t), RedexSite((), "App2"), LCF)


def test_sigma_app2_lca_marks_argument():
    t = Subst(App(Var("y", atomic("b")), Var("x", atomic("a")), atomic("c")),
              closed_value(), "x")
    out = sigma_step(Configuration(t), RedexSite((), "App2"), LCA)
    assert label_of(out.term.arg.arg)[0] == Marker(RIGHT, "?")
    # the closed-function system adds no marker on App2
    out = sigma_step(Configuration(t), RedexSite((), "App2"), LCF)
    assert label_of(out.term.arg.arg)[0] == atomic("v0")[0]


def test_sigma_cpy1_duplicates_with_r_and_s():
    body = App(Var("y", atomic("a")), Var("z", atomic("b")), atomic("c"))
    t = Subst(Copy("x", "y", "z", body), closed_value(), "x")
    out = sigma_step(Configuration(t), RedexSite((), "Cpy1"), LCF)
    outer = out.term
    assert isinstance(outer, Subst) and outer.target == "z"
    assert label_of(outer.arg)[0] == Marker(RIGHT, "S")
    inner = outer.body
    assert isinstance(inner, Subst) and inner.target == "y"
    assert label_of(inner.arg)[0] == Marker(RIGHT, "R")
    assert check_linear(outer) == []


def test_sigma_cpy2_passes_through():
    body = App(App(Var("y", atomic("a")), Var("z", atomic("b")), atomic("c")),
               Var("w", atomic("d")), atomic("e"))
    t = Subst(Copy("x", "y", "z", body), closed_value(), "w")
    out = sigma_step(Configuration(t), RedexSite((), "Cpy2"), LCF)
    assert isinstance(out.term, Copy)
    assert isinstance(out.term.body, Subst)


def test_sigma_ers1_records_erased_label():
    t = Subst(Erase("x", Var("y", atomic("a"))), closed_value(), "x")
    out = sigma_step(Configuration(t), RedexSite((), "Ers1"), LCF)
    assert out.term == Var("y", atomic("a"))
    assert len(out.erased) == 1
    erased = next(iter(out.erased))
    assert label_of(erased)[0] == Marker(RIGHT, "W")


def test_sigma_var_rules_differ_between_calculi():
    t = Subst(Var("x", atomic("a")), closed_value(), "x")
    out = sigma_step(Configuration(t), RedexSite((), "Var"), LCF)
    assert format_label(label_of(out.term)) == "a.v0"
    out = sigma_step(Configuration(t), RedexSite((), "Var"), LCA)
    assert format_label(label_of(out.term)) == "a.D>.v0"


def test_cmp_needs_inner_free_variable():
    inner = Subst(Var("y", atomic("a")), Var("x", atomic("b")), "y")
    t = Subst(inner, closed_value(), "x")
    out = sigma_step(Configuration(t), RedexSite((), "Cmp"), LCF)
    assert isinstance(out.term, Subst) and isinstance(out.term.arg, Subst)
    # no composition rule in the closed-argument system
    assert all(site.rule != "Cmp" for site in find_redexes(Configuration(t), LCA))


# --- redex search, strategies ----------------------------------------------

def test_find_redexes_normal_form_empty():
    nf = initialize(parse_lambda("\\x.x"))
    assert find_redexes(Configuration(nf), LCF) == []


def test_find_redexes_identity_application_single_beta():
    config = Configuration(initialize(compile_term(parse_lambda("(\\x.x) (\\y.y)"))))
    assert find_redexes(config, LCF) == [RedexSite((), "Beta")]


def test_closed_substitution_is_never_normal():
    t = Subst(Var("x", atomic("a")), closed_value(), "x")
    assert find_redexes(Configuration(t), LCF)
    assert find_redexes(Configuration(t), LCA)


def test_normalize_sigma_fixpoint():
    nf = initialize(parse_lambda("\\x.x"))
    config = Configuration(nf)
    assert normalize_sigma(config, LCF) == config


def test_normalize_sigma_single_var_step():
    t = Subst(Var("x", atomic("a")), Abs("y", Var("y", atomic("b")), atomic("c")), "x")
    out = normalize_sigma(Configuration(t), LCF)
    assert format_label(label_of(out.term)) == "a.c"


def test_normalize_sigma_terminates_on_corpus():
    for name, term in list(closed_terms(6))[:30]:
        config = Configuration(initialize(compile_term(term)))
        for calculus in (LCF, LCA):
            normalize_sigma(config, calculus)  # must not raise


def test_reduce_identity_application_two_steps():
    config = Configuration(initialize(compile_term(parse_lambda("(\\x.x) (\\y.y)"))))
    trace = reduce(config, LCF)
    assert [ts.site.rule for ts in trace] == ["Beta", "Var"]


def test_reduce_fuel_exhaustion_reported():
    omega = initialize(compile_term(parse_lambda("(\\x.x x) (\\x.x x)")))
    with pytest.raises(FuelExhaustedError):
        reduce(Configuration(omega), LCF, fuel=25)


def test_subject_reduction_along_traces():
    entry = prepare("dup", parse_lambda("(\\x.x x) (\\y.y)"))
    for calculus in (LCF, LCA):
        config = Configuration(entry.initial)
        for ts in reduce(config, calculus):
            assert check_linear(ts.config.term) == []


def test_lca_substitutions_stay_closed():
    entry = prepare("dup", parse_lambda("(\\x.x x) (\\y.y)"))
    config = Configuration(entry.initial)
    for ts in reduce(config, LCA):
        for _, sub in subterms(ts.config.term):
            if isinstance(sub, Subst):
                assert free_vars(sub.arg) == frozenset()


def test_exhaustive_graph_single_sink():
    entry = prepare("dup", parse_lambda("(\\x.x x) (\\y.y)"))
    for calculus in (LCF, LCA):
        graph = reduction_graph(Configuration(entry.initial), calculus)
        assert graph.complete
        assert len(graph.sink_terms()) == 1


def test_trace_record_format():
    config = Configuration(initialize(compile_term(parse_lambda("(\\x.x) (\\y.y)"))))
    trace = reduce(config, LCF)
    records = trace_records(config, trace, LCF)
    assert records[0]["step"] == 1
    assert set(records[0]) == {"step", "rule", "position", "term_printed",
                               "erased_labels", "calculus"}


def test_default_sigma_fuel_quadratic():
    t = initialize(compile_term(parse_lambda("\\x.x")))
    assert default_sigma_fuel(t) == 10 * 2 * 2


def test_cmp_is_reachable_from_the_corpus():
    # Beta may create open substitutions; composition then unblocks them
    # somewhere in the exhaustive graphs of the small closed terms
    from goilab.corpus import corpus
    seen = set()
    for entry in corpus(7, classics=False):
        graph = reduction_graph(Configuration(entry.initial), LCF)
        seen |= {site.rule for _, site, _ in graph.steps()}
        if "Cmp" in seen:
            break
    assert "Cmp" in seen
