"""Term syntax: alpha-equivalence, shifting and substitution algebra."""

import random

import pytest

from nmdekl import terms as T
from conftest import gen_closed_term

NAT = T.Base("Nat")


def test_alpha_eq_ignores_hints():
    a = T.Lam(NAT, T.Var(0), hint="x")
    b = T.Lam(NAT, T.Var(0), hint="y")
    assert T.alpha_eq(a, b)
    assert a == b
    assert hash(a) == hash(b)


def test_alpha_eq_distinguishes_structure():
    a = T.Lam(NAT, T.Var(0))
    b = T.Lam(NAT, T.Lam(NAT, T.Var(0)))
    assert not T.alpha_eq(a, b)


def test_alpha_eq_is_equivalence_on_random_terms():
    rng = random.Random(11)
    terms = [gen_closed_term(rng, rng.randint(0, 4)) for _ in range(120)]
    for t in terms:
        assert T.alpha_eq(t, t)
    for t in terms:
        for u in terms:
            assert T.alpha_eq(t, u) == T.alpha_eq(u, t)


def test_two_variable_namespaces_are_independent():
    # a predicate binder does not capture ordinary variables
    t = T.Mu(T.Imp(T.Atom("p"), T.PropVar(0)))
    assert T.free_prop_indices(t) == set()
    u = T.Lam(NAT, T.Mu(T.And(T.PropVar(0), T.Atom("q", T.Var(0)))))
    assert T.free_var_indices(u) == set()
    assert T.free_prop_indices(u) == set()


def test_shift_then_unshift_roundtrip():
    rng = random.Random(5)
    for _ in range(100):
        t = gen_closed_term(rng, rng.randint(0, 4), nvars=3)
        assert T.shift(T.shift(t, 2), -2) == t


def test_subst1_beta_example():
    # (fun (x:Nat) => f x x) n  -->  f n n
    body = T.App(T.App(T.Const("f"), T.Var(0)), T.Var(0))
    n = T.Const("n")
    assert T.subst1(body, n) == T.App(T.App(T.Const("f"), n), n)


def test_subst1_under_binder_shifts_argument():
    # substituting an open argument under a binder must shift it
    body = T.Lam(NAT, T.Var(1))  # refers to the outer binder
    arg = T.Var(0)
    assert T.subst1(body, arg) == T.Lam(NAT, T.Var(1))


def test_psubst1_unfolds_fixpoint_bodies():
    mu = T.Mu(T.Or(T.Atom("p"), T.Dia(T.PropVar(0))))
    unrolled = T.psubst1(mu.body, mu)
    assert unrolled == T.Or(T.Atom("p"), T.Dia(mu))


def test_subst_identity_is_identity():
    rng = random.Random(17)
    for _ in range(100):
        t = gen_closed_term(rng, rng.randint(0, 4), nvars=3)
        assert T.subst_apply(t, T.subst_identity(3)) == t


def test_subst_compose_oracle():
    # apply(t, compose(sigma, delta)) == apply(apply(t, sigma), delta)
    rng = random.Random(23)
    for _ in range(150):
        t = gen_closed_term(rng, rng.randint(0, 3), nvars=2)
        sigma = T.Substitution(tuple(
            gen_closed_term(rng, rng.randint(0, 2), nvars=2)
            for _ in range(2)))
        delta = T.Substitution(tuple(
            gen_closed_term(rng, rng.randint(0, 2)) for _ in range(2)))
        lhs = T.subst_apply(t, T.subst_compose(sigma, delta))
        rhs = T.subst_apply(T.subst_apply(t, sigma), delta)
        assert lhs == rhs


def test_telescope_substitution_example():
    # Gamma = (x : Nat, y : Vec A x); sigma sends x to u and y to nil.
    # A type mentioning both variables lands on the substituted pair.
    ty = T.App(T.App(T.Const("P"), T.Var(1)), T.Var(0))
    u, nil = T.Const("u"), T.Nil(T.Const("s"))
    sigma = T.Substitution((nil, u))  # terms[i] replaces Var(i)
    assert T.subst_apply(ty, sigma) == T.App(T.App(T.Const("P"), u), nil)


def test_context_lookup_shifts_types():
    ctx = T.Context().extend("n", NAT).extend("v", T.App(T.Const("Vec"), T.Var(0)))
    assert ctx.lookup(0) == T.App(T.Const("Vec"), T.Var(1))
    assert ctx.lookup(1) == NAT
    with pytest.raises(T.MalformedTermError):
        ctx.lookup(2)


def test_out_of_range_substitution_raises():
    with pytest.raises(T.MalformedTermError):
        T.subst_apply(T.Var(5), T.subst_identity(2))


def test_term_size_and_subterms_agree():
    rng = random.Random(3)
    for _ in range(50):
        t = gen_closed_term(rng, rng.randint(0, 4))
        assert T.term_size(t) == sum(1 for _ in T.subterms(t))
