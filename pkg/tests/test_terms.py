import pytest
from hypothesis import given, settings, strategies as st

from graphsup.terms import (
    App,
    NoUnifier,
    Substitution,
    Var,
    apply_substitution,
    const,
    fn,
    fresh_rename,
    fresh_renaming,
    is_ground,
    try_unify,
    unify,
    variables,
)

var_names = st.sampled_from(["x", "y", "z"])
terms = st.recursive(
    st.one_of(var_names.map(Var), st.sampled_from(["a", "b"]).map(const)),
    lambda kids: st.one_of(
        st.builds(lambda t: fn("f", t), kids),
        st.builds(lambda s, t: fn("g", s, t), kids, kids),
    ),
    max_leaves=6,
)


def test_mgu_of_nested_terms():
    s = unify([(fn("f", Var("x"), const("b")), fn("f", const("a"), Var("y")))])
    assert s == {"x": const("a"), "y": const("b")}


def test_symbol_clash_and_occurs_check():
    with pytest.raises(NoUnifier):
        unify([(const("a"), const("b"))])
    with pytest.raises(NoUnifier):
        unify([(Var("x"), fn("f", Var("x")))])


def test_rigid_variables_act_as_constants():
    assert try_unify([(Var("x"), Var("y"))], rigid={"y"}) == {"x": Var("y")}
    assert try_unify([(Var("y"), const("a"))], rigid={"y"}) is None


def test_substitution_drops_identity_bindings_and_applies_simultaneously():
    s = Substitution({"x": Var("y"), "y": const("b"), "z": Var("z")})
    assert "z" not in s
    assert s(fn("h", Var("x"), Var("y"))) == fn("h", Var("y"), const("b"))


def test_compose_applies_first_then_self():
    first = Substitution({"x": Var("y")})
    then = Substitution({"y": const("a")})
    t = fn("g", Var("x"), Var("y"))
    assert then.compose(first)(t) == then(first(t))


def test_fresh_rename_only_touches_clashes():
    t, ren = fresh_rename(fn("g", Var("x"), Var("w")), {"x"})
    assert ren == {"x": Var("x0")}
    assert variables(t) == {"x0", "w"}
    assert fresh_renaming(["x", "q"], {"q"}) == {"q": Var("q0")}


def test_term_printing_and_groundness():
    assert str(fn("f", Var("x"), const("1"))) == "f(x, 1)"
    assert is_ground(fn("f", const("a")))
    assert not is_ground(fn("f", Var("x")))
    with pytest.raises(ValueError):
        App("")


@given(terms, terms)
@settings(max_examples=300, deadline=None)
def test_unifier_unifies_and_is_idempotent(s, t):
    sub = try_unify([(s, t)])
    if sub is None:
        return
    assert apply_substitution(sub, s) == apply_substitution(sub, t)
    for v in sub.values():
        assert apply_substitution(sub, v) == v


@given(terms, terms, st.lists(st.tuples(var_names, st.sampled_from(["a", "b"]).map(const)), max_size=3))
@settings(max_examples=300, deadline=None)
def test_unifier_is_most_general(s, t, extra):
    """Any ground unifier factors through the mgu."""
    ground = {}
    for name, c in extra:
        ground.setdefault(name, c)
    theta = Substitution({v: ground.get(v, const("a")) for v in variables(s) | variables(t)})
    if theta(s) != theta(t):
        return
    sub = unify([(s, t)])
    for v in variables(s) | variables(t):
        assert theta(sub(Var(v))) == theta(Var(v))
