import glob
import os
import random

import pytest

from nmdekl import terms as T

CORPUS = os.path.join(os.path.dirname(__file__), "..", "src", "nmdekl", "corpus")


@pytest.fixture
def corpus_dir():
    return os.path.abspath(CORPUS)


def positive_files():
    return sorted(glob.glob(os.path.join(CORPUS, "positive", "*.nmdekl")))


def negative_files():
    return sorted(glob.glob(os.path.join(CORPUS, "negative", "*.nmdekl")))


def tutorial_file():
    return os.path.join(CORPUS, "tutorial.nmdekl")


def gen_closed_term(rng: random.Random, depth: int, nvars: int = 0,
                    npvars: int = 0) -> T.Term:
    """Random closed term for parser round-trip and substitution tests."""
    leaves = ["base", "sort", "top", "bot", "atom", "const"]
    if nvars:
        leaves.append("var")
    if npvars:
        leaves.append("pvar")
    if depth <= 0:
        kind = rng.choice(leaves)
        if kind == "var":
            return T.Var(rng.randrange(nvars))
        if kind == "pvar":
            return T.PropVar(rng.randrange(npvars))
        if kind == "base":
            return T.Base(rng.choice(["State", "Event", "Nat", "FinTrace"]))
        if kind == "sort":
            return T.Sort(rng.choice([T.UC, T.TYPEL]), rng.randrange(3))
        if kind == "top":
            return T.Top()
        if kind == "bot":
            return T.Bot()
        if kind == "atom":
            return T.Atom(rng.choice(["p", "q", "r"]))
        return T.Const(rng.choice(["c1", "c2"]))

    def sub(dv=0, dp=0):
        return gen_closed_term(rng, depth - 1, nvars + dv, npvars + dp)

    kind = rng.choice([
        "lam", "pi", "app", "and", "or", "imp", "forall", "exists",
        "dia", "box", "mu", "nu", "nil", "steptrace", "obs", "head",
        "tail", "restrict", "extid", "extcomp", "kf", "id", "refl",
        "fold", "unfold", "leaf",
    ])
    if kind == "leaf":
        return gen_closed_term(rng, 0, nvars, npvars)
    if kind == "lam":
        return T.Lam(sub(), sub(dv=1))
    if kind == "pi":
        return T.Pi(sub(), sub(dv=1))
    if kind == "app":
        return T.App(sub(), sub())
    if kind == "and":
        return T.And(sub(), sub())
    if kind == "or":
        return T.Or(sub(), sub())
    if kind == "imp":
        return T.Imp(sub(), sub())
    if kind == "forall":
        return T.Forall(sub(), sub(dv=1))
    if kind == "exists":
        return T.Exists(sub(), sub(dv=1))
    if kind == "dia":
        return T.Dia(sub())
    if kind == "box":
        return T.Box(sub())
    if kind == "mu":
        return T.Mu(sub(dp=1))
    if kind == "nu":
        return T.Nu(sub(dp=1))
    if kind == "nil":
        return T.Nil(sub())
    if kind == "steptrace":
        return T.StepTrace(sub(), sub(), sub())
    if kind == "obs":
        return T.Obs(sub(), sub(), sub())
    if kind == "head":
        return T.Head(sub())
    if kind == "tail":
        return T.Tail(sub())
    if kind == "restrict":
        return T.Restrict(sub(), sub())
    if kind == "extid":
        return T.ExtId(sub())
    if kind == "extcomp":
        return T.ExtComp(sub(), sub())
    if kind == "kf":
        return T.KF(sub())
    if kind == "id":
        return T.IdT(sub(), sub(), sub())
    if kind == "refl":
        return T.Refl(sub())
    if kind == "fold":
        return T.Fold(sub())
    return T.Unfold(sub())
