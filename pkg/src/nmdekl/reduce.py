"""Reduction, normalization, conversion and the cofix guardedness check.

The strategy is deterministic leftmost-outermost.  Cofix bodies unfold only
under an observation (Head/Tail).  The restriction functor laws are oriented
left-to-right so nested restricts collapse to a single Restrict over a
right-nested evidence composition.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .terms import (
    App, Cofix, Const, ExtChk, ExtComp, ExtId, Fold, Head, Lam, NuIn, NuOut, Obs,
    J, Refl, Restrict, Tail, Term, Unfold, Var, _BINDING, alpha_eq,
    free_var_indices, shift, subst1,
)


@dataclass(frozen=True)
class Normal:
    term: Term


@dataclass(frozen=True)
class FuelExhausted:
    partial: Term
    steps_used: int


ReductionOutcome = Normal | FuelExhausted


class ConversionUndecided(Exception):
    """Fuel ran out while deciding convertibility."""


def _root_step(t: Term, defs) -> Term | None:
    if isinstance(t, App) and isinstance(t.fn, Lam):
        return subst1(t.fn.body, t.arg)
    if isinstance(t, Const) and defs is not None and t.name in defs:
        return defs[t.name]
    if isinstance(t, Restrict):
        if isinstance(t.evidence, ExtId):
            return t.knowledge
        if isinstance(t.knowledge, Restrict):
            inner = t.knowledge
            return Restrict(ExtComp(inner.evidence, t.evidence), inner.knowledge)
    if isinstance(t, ExtComp):
        if isinstance(t.outer, ExtId):
            return t.inner
        if isinstance(t.inner, ExtId):
            return t.outer
        if isinstance(t.outer, ExtComp):
            a, b = t.outer.outer, t.outer.inner
            return ExtComp(a, ExtComp(b, t.inner))
        if (isinstance(t.outer, ExtChk) and isinstance(t.inner, ExtChk)
                and alpha_eq(t.inner.ext, t.outer.base)):
            return ExtChk(t.inner.base, t.outer.ext)
    if isinstance(t, J) and isinstance(t.proof, Refl) and alpha_eq(t.lhs, t.rhs):
        return App(t.base, t.lhs)
    if isinstance(t, Fold) and isinstance(t.arg, Unfold):
        return t.arg.arg
    if isinstance(t, Unfold) and isinstance(t.arg, Fold):
        return t.arg.arg
    if isinstance(t, NuIn) and isinstance(t.arg, NuOut):
        return t.arg.arg
    if isinstance(t, NuOut) and isinstance(t.arg, NuIn):
        return t.arg.arg
    if isinstance(t, (Head, Tail)):
        tr = t.trace
        if isinstance(tr, Obs):
            return tr.state if isinstance(t, Head) else tr.rest
        if isinstance(tr, Cofix):
            unfolded = subst1(tr.body, tr)
            return Head(unfolded) if isinstance(t, Head) else Tail(unfolded)
    if isinstance(t, Lam) and isinstance(t.body, App):
        arg = t.body.arg
        if isinstance(arg, Var) and arg.index == 0 and 0 not in free_var_indices(t.body.fn):
            return shift(t.body.fn, -1, cutoff=1)
    return None


def step(t: Term, defs: dict[str, Term] | None = None) -> Term | None:
    """One leftmost-outermost step, or None if t is normal."""
    root = _root_step(t, defs)
    if root is not None:
        return root
    for f in dataclasses.fields(t):
        v = getattr(t, f.name)
        if not isinstance(v, Term):
            continue
        if isinstance(t, Cofix):
            continue  # cofix bodies reduce only via observation
        nv = step(v, defs)
        if nv is not None:
            return dataclasses.replace(t, **{f.name: nv})
    return None


def normalize(t: Term, fuel: int = 10_000, defs: dict[str, Term] | None = None) -> ReductionOutcome:
    steps = 0
    while steps < fuel:
        nxt = step(t, defs)
        if nxt is None:
            return Normal(t)
        t = nxt
        steps += 1
    return FuelExhausted(t, steps)


def normalize_strict(t: Term, fuel: int = 10_000, defs=None) -> Term:
    out = normalize(t, fuel, defs)
    if isinstance(out, FuelExhausted):
        raise ConversionUndecided(f"no normal form within {fuel} steps")
    return out.term


def conv(t: Term, u: Term, fuel: int = 10_000, defs: dict[str, Term] | None = None,
         proof_irrelevant: bool = False) -> bool:
    """Convertibility by normalize-and-compare.

    With proof_irrelevant=True (both sides inhabit the same Prop) any two
    terms are convertible.  Raises ConversionUndecided on fuel exhaustion.
    """
    if proof_irrelevant:
        return True
    if alpha_eq(t, u):
        return True
    return alpha_eq(normalize_strict(t, fuel, defs), normalize_strict(u, fuel, defs))


def guardedness_check(body: Term) -> bool:
    """True iff every use of the recursion variable (index 0 of ``body``)
    sits in the tail slot of an observation cell and never under a
    destructor."""

    def go(t: Term, depth: int, protected: bool) -> bool:
        if isinstance(t, Var):
            return t.index != depth or protected
        binding = _BINDING.get(type(t), {})
        for f in dataclasses.fields(t):
            v = getattr(t, f.name)
            if not isinstance(v, Term):
                continue
            d = depth + 1 if binding.get(f.name) == "v" else depth
            inside = isinstance(t, Obs) and f.name == "rest"
            if not go(v, d, inside):
                return False
        return True

    return go(body, 0, False)
