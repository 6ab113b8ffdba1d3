"""Type checking: layer discipline, corpus harness, witness decisions."""

import re

import pytest

from nmdekl import terms as T
from nmdekl.check import (
    BAD_EXTENSION, Checker, ERROR_KINDS, MISMATCH, NMTypeError, NON_POSITIVE,
    STRATIFICATION, Signature, UNBOUND, UNGUARDED, check_theory, ext_witness,
    infer, positivity, search_bot_proof, search_inhabitant, theory_signature,
)
from nmdekl.surface import parse_theory
from conftest import negative_files, positive_files, tutorial_file

NAT = T.Base("Nat")
STATE = T.Base("State")
EVENT = T.Base("Event")
PROP = T.Sort(T.PROP)


def _sig(**entries):
    sig = Signature()
    for name, ty in entries.items():
        sig.declare(name, ty)
    return sig


# -- layer discipline ----------------------------------------------------

def test_prop_lives_in_the_first_knowledge_universe():
    assert infer(T.EMPTY_CONTEXT, PROP) == T.Sort(T.TYPEL, 0)


def test_universe_levels_cumulate_upward():
    assert infer(T.EMPTY_CONTEXT, T.Sort(T.UC, 0)) == T.Sort(T.UC, 1)
    assert infer(T.EMPTY_CONTEXT, T.Sort(T.TYPEL, 2)) == T.Sort(T.TYPEL, 3)


def test_pi_level_is_the_maximum_of_its_parts():
    ck = Checker()
    t = T.Pi(NAT, T.Sort(T.UC, 1))
    assert ck.infer(T.EMPTY_CONTEXT, t) == T.Sort(T.UC, 2)


def test_pi_over_prop_domain_is_a_stratification_error():
    t = T.Pi(T.Atom("p"), NAT)
    with pytest.raises(NMTypeError) as e:
        infer(T.EMPTY_CONTEXT, t)
    assert e.value.kind == STRATIFICATION


def test_pi_into_prop_is_a_stratification_error():
    t = T.Pi(NAT, T.Atom("p"))
    with pytest.raises(NMTypeError) as e:
        infer(T.EMPTY_CONTEXT, t)
    assert e.value.kind == STRATIFICATION


def test_predicates_over_states_are_knowledge_types():
    # (x : State) -> Prop is fine: it lands in the knowledge layer
    t = T.Pi(STATE, PROP)
    assert infer(T.EMPTY_CONTEXT, t) == T.Sort(T.TYPEL, 0)


def test_proof_hypotheses_become_implications():
    sig = _sig(q=PROP)
    sig.declare("hq", T.Const("q"))
    lam = T.Lam(T.Atom("p"), T.Const("hq"))
    ty = Checker(sig).infer(T.EMPTY_CONTEXT, lam)
    assert ty == T.Imp(T.Atom("p"), T.Const("q"))


def test_conclusion_may_not_depend_on_a_proof():
    sig = _sig(P=T.Pi(STATE, PROP), s=STATE)
    # fun (h : P s) => h tries to expose the proof; the result type would
    # mention the hypothesis, which proof irrelevance forbids
    lam = T.Lam(T.App(T.Const("P"), T.Const("s")), T.Var(0))
    ty = Checker(sig).infer(T.EMPTY_CONTEXT, lam)
    assert ty == T.Imp(T.App(T.Const("P"), T.Const("s")),
                       T.App(T.Const("P"), T.Const("s")))


def test_quantifier_domain_must_be_computational():
    t = T.Forall(T.Atom("p"), T.Atom("q"))
    with pytest.raises(NMTypeError) as e:
        infer(T.EMPTY_CONTEXT, t)
    assert e.value.kind == STRATIFICATION


def test_application_substitutes_into_the_codomain():
    sig = _sig(Vec=T.Pi(NAT, T.Sort(T.UC, 0)), n=NAT)
    ty = Checker(sig).infer(T.EMPTY_CONTEXT,
                            T.App(T.Const("Vec"), T.Const("n")))
    assert ty == T.Sort(T.UC, 0)


def test_check_context_validates_telescopes():
    sig = _sig(Vec=T.Pi(NAT, T.Sort(T.UC, 0)))
    good = T.Context().extend("n", NAT).extend(
        "v", T.App(T.Const("Vec"), T.Var(0)))
    Checker(sig).check_context(good)
    bad = T.Context().extend("v", T.App(T.Const("Vec"), T.Var(0)))
    with pytest.raises(NMTypeError):
        Checker(sig).check_context(bad)


# -- positivity and guardedness ------------------------------------------

def test_positivity_polarity_classification():
    x = T.PropVar(0)
    assert positivity(0, T.Or(T.Atom("p"), T.Dia(x))) == "positive"
    assert positivity(0, T.Imp(x, T.Atom("p"))) == "negative"
    assert positivity(0, T.Imp(x, x)) == "mixed"
    assert positivity(0, T.Atom("p")) == "absent"
    # double negation is positive again
    assert positivity(0, T.Imp(T.Imp(x, T.Bot()), T.Bot())) == "positive"


def test_negative_fixpoint_is_rejected():
    bad = T.Mu(T.Imp(T.PropVar(0), T.Bot()))
    with pytest.raises(NMTypeError) as e:
        infer(T.EMPTY_CONTEXT, bad)
    assert e.value.kind == NON_POSITIVE


def test_unguarded_cofix_is_rejected():
    with pytest.raises(NMTypeError) as e:
        infer(T.EMPTY_CONTEXT, T.Cofix(T.Var(0)))
    assert e.value.kind == UNGUARDED


# -- extension witnesses -------------------------------------------------

def _trace(*steps):
    t = T.Nil(T.Const(steps[0]))
    for e, s in zip(steps[1::2], steps[2::2]):
        t = T.StepTrace(t, T.Const(e), T.Const(s))
    return t


def test_ext_witness_prefix_accepts_and_returns_suffix():
    t0 = _trace("a")
    t2 = _trace("a", "e", "b", "f", "c")
    w = ext_witness(t0, t2)
    assert w.suffix == ((T.Const("e"), T.Const("b")),
                        (T.Const("f"), T.Const("c")))


def test_ext_witness_reflexive_has_empty_suffix():
    t = _trace("a", "e", "b")
    assert ext_witness(t, t).suffix == ()


def test_ext_witness_rejects_non_prefixes():
    with pytest.raises(NMTypeError) as e:
        ext_witness(_trace("a", "e", "b"), _trace("a", "f", "b"))
    assert e.value.kind == BAD_EXTENSION
    with pytest.raises(NMTypeError) as e:
        ext_witness(_trace("a", "e", "b"), _trace("a"))
    assert e.value.kind == BAD_EXTENSION


def test_ext_witness_requires_closed_traces():
    with pytest.raises(NMTypeError) as e:
        ext_witness(T.Nil(T.Var(0)), T.Nil(T.Var(0)))
    assert e.value.kind == BAD_EXTENSION


def test_restrict_produces_knowledge_over_the_base():
    t0, t1 = _trace("a"), _trace("a", "e", "b")
    sig = _sig(a=STATE, b=STATE, e=EVENT, k=T.KF(t1))
    ty = Checker(sig).infer(T.EMPTY_CONTEXT,
                            T.Restrict(T.ExtChk(t0, t1), T.Const("k")))
    assert ty == T.KF(t0)


def test_reverse_restriction_is_a_witness_error():
    t0, t1 = _trace("a"), _trace("a", "e", "b")
    sig = _sig(a=STATE, b=STATE, e=EVENT, k=T.KF(t0))
    with pytest.raises(NMTypeError) as e:
        Checker(sig).infer(T.EMPTY_CONTEXT,
                           T.Restrict(T.ExtChk(t1, t0), T.Const("k")))
    assert e.value.kind == BAD_EXTENSION


# -- corpus harness ------------------------------------------------------

_EXPECT = re.compile(r"--\s*expected-error:\s*(\S+)")
_FUEL = re.compile(r"--\s*fuel:\s*(\d+)")


def read_directives(path):
    with open(path) as fh:
        text = fh.read()
    kind = _EXPECT.search(text)
    fuel = _FUEL.search(text)
    return (kind.group(1) if kind else None,
            int(fuel.group(1)) if fuel else 10_000, text)


@pytest.mark.parametrize("path", [tutorial_file()] + positive_files(),
                         ids=lambda p: p.rsplit("/", 1)[-1])
def test_positive_corpus_checks_clean(path):
    with open(path) as fh:
        report = check_theory(parse_theory(fh.read()))
    bad = [r for r in report.results if not r.ok]
    assert not bad, [(r.label, r.error.kind, r.error.message) for r in bad]


@pytest.mark.parametrize("path", negative_files(),
                         ids=lambda p: p.rsplit("/", 1)[-1])
def test_negative_corpus_reports_documented_kind(path):
    kind, fuel, text = read_directives(path)
    assert kind in ERROR_KINDS, f"{path} lacks an expected-error directive"
    report = check_theory(parse_theory(text), fuel=fuel)
    kinds = [r.error.kind for r in report.results if not r.ok]
    assert kind in kinds, (kind, [(r.label, r.kind) for r in report.results])


def test_negative_corpus_covers_every_error_kind():
    seen = {read_directives(p)[0] for p in negative_files()}
    assert seen == set(ERROR_KINDS)


def test_corpus_sizes():
    assert len(positive_files()) >= 20
    assert len(negative_files()) >= 10
    with open(tutorial_file()) as fh:
        th = parse_theory(fh.read())
    assert len(th.declarations) == 12


def test_check_theory_continues_after_failures():
    src = (
        "axiom n : Nat\n"
        "check foo : Nat\n"
        "check n : Nat\n"
    )
    report = check_theory(parse_theory(src))
    assert [r.ok for r in report.results] == [True, False, True]
    assert report.results[1].error.kind == UNBOUND


def test_checkeq_is_proof_irrelevant_at_prop():
    src = (
        "axiom p : Prop\n"
        "axiom h1 : p\n"
        "axiom h2 : p\n"
        "checkeq h1 = h2\n"
    )
    assert check_theory(parse_theory(src)).ok


def test_checkeq_mismatch_is_reported():
    src = (
        "axiom a : Nat\n"
        "axiom b : Nat\n"
        "checkeq a = b\n"
    )
    report = check_theory(parse_theory(src))
    assert not report.ok
    assert report.results[-1].error.kind == MISMATCH


# -- consistency search --------------------------------------------------

def test_search_finds_modus_ponens():
    sig = _sig(p=PROP, q=PROP)
    sig.declare("hp", T.Const("p"))
    sig.declare("hpq", T.Imp(T.Const("p"), T.Const("q")))
    proof = search_inhabitant(sig, T.Const("q"), max_size=6)
    assert proof is not None
    Checker(sig).check(T.EMPTY_CONTEXT, proof, T.Const("q"))


def test_search_finds_no_bot_proof_in_sound_signatures():
    assert search_bot_proof(Signature()) is None
    for path in positive_files()[:5]:
        with open(path) as fh:
            sig = theory_signature(parse_theory(fh.read()))
        assert search_bot_proof(sig, max_size=6) is None


def test_search_detects_planted_contradictions():
    sig = _sig(p=PROP)
    sig.declare("hp", T.Const("p"))
    sig.declare("hnp", T.Imp(T.Const("p"), T.Bot()))
    proof = search_bot_proof(sig, max_size=6)
    assert proof is not None
    Checker(sig).check(T.EMPTY_CONTEXT, proof, T.Bot())
