"""Reduction and normalization: golden steps, determinism, fuel, guards."""

import random

from nmdekl import terms as T
from nmdekl.reduce import (
    FuelExhausted, Normal, conv, guardedness_check, normalize,
    normalize_strict, step,
)
from conftest import gen_closed_term

NAT = T.Base("Nat")


def _app(f, *args):
    for a in args:
        f = T.App(f, a)
    return f


def test_beta_step():
    t = T.App(T.Lam(NAT, T.Var(0)), T.Const("n"))
    assert step(t) == T.Const("n")


def test_delta_unfolds_definitions():
    defs = {"two": _app(T.Const("s"), T.Const("z"))}
    t = T.Const("two")
    assert normalize_strict(t, defs=defs) == _app(T.Const("s"), T.Const("z"))


def test_restrict_identity_law():
    k = T.Const("k")
    t = T.Restrict(T.ExtId(T.Const("t")), k)
    assert normalize_strict(t) == k


def test_restrict_composition_law():
    k, e1, e2 = T.Const("k"), T.Const("e1"), T.Const("e2")
    t = T.Restrict(e1, T.Restrict(e2, k))
    assert normalize_strict(t) == T.Restrict(T.ExtComp(e2, e1), k)


def test_ext_comp_absorbs_identity():
    e = T.Const("e")
    assert normalize_strict(T.ExtComp(T.ExtId(T.Const("t")), e)) == e
    assert normalize_strict(T.ExtComp(e, T.ExtId(T.Const("t")))) == e


def test_ext_comp_reassociates_to_the_right():
    a, b, c = T.Const("a"), T.Const("b"), T.Const("c")
    t = T.ExtComp(T.ExtComp(a, b), c)
    assert normalize_strict(t) == T.ExtComp(a, T.ExtComp(b, c))


def test_canonical_witnesses_fuse():
    t0 = T.Nil(T.Const("x"))
    t1 = T.StepTrace(t0, T.Const("e"), T.Const("y"))
    t2 = T.StepTrace(t1, T.Const("f"), T.Const("z"))
    t = T.ExtComp(T.ExtChk(t1, t2), T.ExtChk(t0, t1))
    assert normalize_strict(t) == T.ExtChk(t0, t2)


def test_restrict_chain_collapses_to_single_witness():
    t0 = T.Nil(T.Const("x"))
    t1 = T.StepTrace(t0, T.Const("e"), T.Const("y"))
    t2 = T.StepTrace(t1, T.Const("f"), T.Const("z"))
    k = T.Const("k")
    chain = T.Restrict(T.ExtChk(t0, t1), T.Restrict(T.ExtChk(t1, t2), k))
    assert normalize_strict(chain) == T.Restrict(T.ExtChk(t0, t2), k)


def test_identity_eliminator_computes_on_refl():
    motive, base, a = T.Const("C"), T.Const("d"), T.Const("a")
    t = T.J(motive, base, a, a, T.Refl(a))
    assert normalize_strict(t) == T.App(base, a)


def test_fold_unfold_cancellation():
    x = T.Const("x")
    assert step(T.Unfold(T.Fold(x))) == x
    assert step(T.Fold(T.Unfold(x))) == x
    assert step(T.NuOut(T.NuIn(x))) == x
    assert step(T.NuIn(T.NuOut(x))) == x


def test_observations_drive_cofix_unfolding():
    s, e = T.Const("s"), T.Const("e")
    stream = T.Cofix(T.Obs(s, e, T.Var(0)))
    # the cofix alone is normal
    assert step(stream) is None
    assert normalize_strict(T.Head(stream)) == s
    assert normalize_strict(T.Head(T.Tail(stream))) == s


def test_head_tail_on_observation_cells():
    cell = T.Obs(T.Const("s"), T.Const("e"), T.Const("rest"))
    assert step(T.Head(cell)) == T.Const("s")
    assert step(T.Tail(cell)) == T.Const("rest")


def test_eta_contraction():
    t = T.Lam(NAT, T.App(T.Const("f"), T.Var(0)))
    assert normalize_strict(t) == T.Const("f")
    # no eta when the function mentions the bound variable
    u = T.Lam(NAT, T.App(T.Var(0), T.Var(0)))
    assert step(u) is None


def test_step_is_deterministic_and_leftmost_outermost():
    redex = T.App(T.Lam(NAT, T.Var(0)), T.Const("n"))
    t = T.App(T.App(T.Lam(NAT, T.Lam(NAT, T.Var(1))), redex), redex)
    first = step(t)
    # the outermost beta fires before either inner redex
    assert first == T.App(T.Lam(NAT, T.shift(redex, 1)), redex)


def test_normalize_is_idempotent_on_random_terms():
    rng = random.Random(71)
    for _ in range(200):
        t = gen_closed_term(rng, rng.randint(0, 4))
        out = normalize(t, fuel=500)
        if isinstance(out, Normal):
            again = normalize(out.term, fuel=500)
            assert isinstance(again, Normal)
            assert again.term == out.term


def test_normal_forms_contain_no_collapsible_restricts():
    rng = random.Random(73)
    for _ in range(200):
        t = gen_closed_term(rng, rng.randint(0, 4))
        out = normalize(t, fuel=500)
        if not isinstance(out, Normal):
            continue
        for sub in T.subterms(out.term):
            if isinstance(sub, T.Restrict):
                assert not isinstance(sub.evidence, T.ExtId)
                assert not isinstance(sub.knowledge, T.Restrict)
            if isinstance(sub, T.ExtComp):
                assert not isinstance(sub.outer, (T.ExtId, T.ExtComp))
                assert not isinstance(sub.inner, T.ExtId)


def test_fuel_exhaustion_reports_partial_term():
    big = T.App(T.Lam(NAT, _app(T.Var(0), T.Var(0))), T.Const("n"))
    out = normalize(big, fuel=0)
    assert isinstance(out, FuelExhausted)
    assert out.partial == big
    assert out.steps_used == 0


def test_conv_uses_definitions_and_proof_irrelevance():
    defs = {"two": _app(T.Const("s"), T.Const("z"))}
    assert conv(T.Const("two"), _app(T.Const("s"), T.Const("z")), defs=defs)
    assert not conv(T.Const("a"), T.Const("b"))
    assert conv(T.Const("a"), T.Const("b"), proof_irrelevant=True)


def test_guardedness_accepts_tail_positions_only():
    s, e = T.Const("s"), T.Const("e")
    assert guardedness_check(T.Obs(s, e, T.Var(0)))
    assert guardedness_check(T.Obs(s, e, T.Obs(s, e, T.Var(0))))
    # recursion variable in the state slot
    assert not guardedness_check(T.Obs(T.Var(0), e, T.Obs(s, e, T.Var(0))))
    # recursion variable under a destructor
    assert not guardedness_check(T.Obs(s, e, T.Tail(T.Var(0))))
    # bare recursion variable
    assert not guardedness_check(T.Var(0))
    # unused recursion variable is fine
    assert guardedness_check(T.Obs(s, e, T.Const("rest")))
