"""Core syntax: terms, contexts and substitutions.

Terms use nameless (de Bruijn) binding internally.  Binder classes carry a
``hint`` field used only for printing; it is excluded from equality, so plain
``==`` on terms is alpha-equivalence.  Ordinary variables (bound by Pi, Lam,
Forall, Exists, Cofix) and predicate variables (bound by Mu, Nu) live in two
independent index namespaces.
"""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field

# deep reducts (long application spines) exceed the default limit
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))

UC = "Uc"
TYPEL = "TypeL"
PROP = "Prop"


class MalformedTermError(Exception):
    """A substitution or traversal hit an out-of-range variable index."""


@dataclass(frozen=True)
class Term:
    pass


# -- leaves -------------------------------------------------------------

@dataclass(frozen=True)
class Var(Term):
    index: int


@dataclass(frozen=True)
class PropVar(Term):
    index: int


@dataclass(frozen=True)
class Const(Term):
    """Reference to a name declared earlier in a theory file."""
    name: str


@dataclass(frozen=True)
class Atom(Term):
    """Uninterpreted propositional atom, optionally applied to a state."""
    name: str
    arg: Term | None = None


@dataclass(frozen=True)
class Sort(Term):
    layer: str  # UC | TYPEL | PROP
    level: int = 0

    def __post_init__(self):
        if self.layer == PROP and self.level != 0:
            object.__setattr__(self, "level", 0)


@dataclass(frozen=True)
class Base(Term):
    """Built-in computational base type: State, Event, Nat, FinTrace, InfTrace."""
    name: str


@dataclass(frozen=True)
class Top(Term):
    pass


@dataclass(frozen=True)
class Bot(Term):
    pass


# -- computational layer ------------------------------------------------

@dataclass(frozen=True)
class Pi(Term):
    dom: Term
    cod: Term  # binds one variable
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Lam(Term):
    dom: Term
    body: Term  # binds one variable
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class StepRel(Term):
    """Step(s, e, s') : Uc_0 -- the transition relation type former."""
    src: Term
    event: Term
    dst: Term


# -- traces -------------------------------------------------------------

@dataclass(frozen=True)
class Nil(Term):
    state: Term


@dataclass(frozen=True)
class StepTrace(Term):
    trace: Term
    event: Term
    state: Term


@dataclass(frozen=True)
class Obs(Term):
    """One observation cell <s, (e, rest)> of an infinite trace."""
    state: Term
    event: Term
    rest: Term


@dataclass(frozen=True)
class Head(Term):
    trace: Term


@dataclass(frozen=True)
class Tail(Term):
    trace: Term


@dataclass(frozen=True)
class Cofix(Term):
    body: Term  # binds the recursion variable
    hint: str = field(default="f", compare=False)


# -- knowledge layer ----------------------------------------------------

@dataclass(frozen=True)
class ExtT(Term):
    """Extension type Ext_f(tau, tau')."""
    base: Term
    ext: Term


@dataclass(frozen=True)
class ExtId(Term):
    trace: Term


@dataclass(frozen=True)
class ExtComp(Term):
    """Composition outer . inner: inner : Ext(a,b), outer : Ext(b,c)."""
    outer: Term
    inner: Term


@dataclass(frozen=True)
class ExtChk(Term):
    """Canonical prefix witness ext(tau, tau'); well-typed iff tau <= tau'."""
    base: Term
    ext: Term


@dataclass(frozen=True)
class KF(Term):
    trace: Term


@dataclass(frozen=True)
class KInf(Term):
    trace: Term


@dataclass(frozen=True)
class Restrict(Term):
    evidence: Term
    knowledge: Term


# -- identity -----------------------------------------------------------

@dataclass(frozen=True)
class IdT(Term):
    ty: Term
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Refl(Term):
    arg: Term


@dataclass(frozen=True)
class J(Term):
    motive: Term
    base: Term
    lhs: Term
    rhs: Term
    proof: Term


# -- propositional layer ------------------------------------------------

@dataclass(frozen=True)
class And(Term):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Or(Term):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Imp(Term):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Forall(Term):
    dom: Term
    body: Term  # binds one variable
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Exists(Term):
    dom: Term
    body: Term  # binds one variable
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Dia(Term):
    body: Term


@dataclass(frozen=True)
class Box(Term):
    body: Term


@dataclass(frozen=True)
class Mu(Term):
    body: Term  # binds one predicate variable
    hint: str = field(default="X", compare=False)


@dataclass(frozen=True)
class Nu(Term):
    body: Term  # binds one predicate variable
    hint: str = field(default="X", compare=False)


@dataclass(frozen=True)
class Fold(Term):
    arg: Term


@dataclass(frozen=True)
class Unfold(Term):
    arg: Term


@dataclass(frozen=True)
class NuIn(Term):
    arg: Term


@dataclass(frozen=True)
class NuOut(Term):
    arg: Term


# Fields under a binder, per class: "v" increments the ordinary variable
# depth, "p" the predicate variable depth.
_BINDING: dict[type, dict[str, str]] = {
    Pi: {"cod": "v"},
    Lam: {"body": "v"},
    Forall: {"body": "v"},
    Exists: {"body": "v"},
    Cofix: {"body": "v"},
    Mu: {"body": "p"},
    Nu: {"body": "p"},
}

_LEAVES = (Const, Sort, Base, Top, Bot)


def transform(t: Term, on_var=None, on_pvar=None, d: int = 0, p: int = 0) -> Term:
    """Rebuild ``t``, applying ``on_var(index, d, p)`` to every Var and
    ``on_pvar(index, d, p)`` to every PropVar.  ``d`` counts ordinary
    binders crossed, ``p`` predicate binders."""
    if isinstance(t, Var):
        return on_var(t.index, d, p) if on_var else t
    if isinstance(t, PropVar):
        return on_pvar(t.index, d, p) if on_pvar else t
    if isinstance(t, _LEAVES):
        return t
    if isinstance(t, Atom):
        if t.arg is None:
            return t
        return Atom(t.name, transform(t.arg, on_var, on_pvar, d, p))
    binding = _BINDING.get(type(t), {})
    changes = {}
    for f in dataclasses.fields(t):
        v = getattr(t, f.name)
        if not isinstance(v, Term):
            continue
        kind = binding.get(f.name)
        nd, np = (d + 1, p) if kind == "v" else (d, p + 1) if kind == "p" else (d, p)
        nv = transform(v, on_var, on_pvar, nd, np)
        if nv is not v:
            changes[f.name] = nv
    return dataclasses.replace(t, **changes) if changes else t


def shift(t: Term, amount: int, cutoff: int = 0) -> Term:
    if amount == 0:
        return t

    def on_var(i, d, p):
        if i >= d + cutoff:
            if i + amount < 0:
                raise MalformedTermError("negative index after shift")
            return Var(i + amount)
        return Var(i)

    return transform(t, on_var=on_var)


def pshift(t: Term, amount: int, cutoff: int = 0) -> Term:
    if amount == 0:
        return t

    def on_pvar(i, d, p):
        if i >= p + cutoff:
            return PropVar(i + amount)
        return PropVar(i)

    return transform(t, on_pvar=on_pvar)


def _shift_into(arg: Term, d: int, p: int) -> Term:
    return pshift(shift(arg, d), p)


def subst1(body: Term, arg: Term) -> Term:
    """Substitute ``arg`` for variable 0 of ``body`` (beta)."""

    def on_var(i, d, p):
        if i == d:
            return _shift_into(arg, d, p)
        if i > d:
            return Var(i - 1)
        return Var(i)

    return transform(body, on_var=on_var)


def psubst1(body: Term, arg: Term) -> Term:
    """Substitute ``arg`` for predicate variable 0 of ``body`` (fold/unfold)."""

    def on_pvar(i, d, p):
        if i == p:
            return _shift_into(arg, d, p)
        if i > p:
            return PropVar(i - 1)
        return PropVar(i)

    return transform(body, on_pvar=on_pvar)


def free_var_indices(t: Term) -> set[int]:
    out: set[int] = set()

    def on_var(i, d, p):
        if i >= d:
            out.add(i - d)
        return Var(i)

    transform(t, on_var=on_var)
    return out


def free_prop_indices(t: Term) -> set[int]:
    out: set[int] = set()

    def on_pvar(i, d, p):
        if i >= p:
            out.add(i - p)
        return PropVar(i)

    transform(t, on_pvar=on_pvar)
    return out


def const_names(t: Term) -> set[str]:
    out: set[str] = set()
    _walk_consts(t, out)
    return out


def _walk_consts(t: Term, out: set[str]) -> None:
    if isinstance(t, Const):
        out.add(t.name)
        return
    for f in dataclasses.fields(t):
        v = getattr(t, f.name)
        if isinstance(v, Term):
            _walk_consts(v, out)


def alpha_eq(t: Term, u: Term) -> bool:
    """Alpha-equivalence; hints are excluded from dataclass equality."""
    return t == u


def term_size(t: Term) -> int:
    n = 1
    for f in dataclasses.fields(t):
        v = getattr(t, f.name)
        if isinstance(v, Term):
            n += term_size(v)
    return n


def subterms(t: Term):
    yield t
    for f in dataclasses.fields(t):
        v = getattr(t, f.name)
        if isinstance(v, Term):
            yield from subterms(v)


# -- contexts and substitutions -----------------------------------------

@dataclass(frozen=True)
class Context:
    """Ordered telescope; entry i = (hint, type), type indexed over prefix."""
    entries: tuple[tuple[str, Term], ...] = ()

    def __len__(self):
        return len(self.entries)

    def extend(self, hint: str, ty: Term) -> "Context":
        return Context(self.entries + ((hint, ty),))

    def lookup(self, index: int) -> Term:
        """Type of Var(index), shifted into the full context."""
        if not 0 <= index < len(self.entries):
            raise MalformedTermError(f"unbound variable index {index}")
        _, ty = self.entries[len(self.entries) - 1 - index]
        return shift(ty, index + 1)

    def hint(self, index: int) -> str:
        if not 0 <= index < len(self.entries):
            return f"?{index}"
        return self.entries[len(self.entries) - 1 - index][0]


EMPTY_CONTEXT = Context()


@dataclass(frozen=True)
class Substitution:
    """One term per target-context entry; terms[i] replaces Var(i)."""
    terms: tuple[Term, ...]

    def __len__(self):
        return len(self.terms)


def subst_identity(n: int) -> Substitution:
    return Substitution(tuple(Var(i) for i in range(n)))


def subst_apply(t: Term, sigma: Substitution) -> Term:
    def on_var(i, d, p):
        if i < d:
            return Var(i)
        j = i - d
        if j >= len(sigma.terms):
            raise MalformedTermError(f"index {j} out of substitution range")
        return _shift_into(sigma.terms[j], d, p)

    return transform(t, on_var=on_var)


def subst_compose(sigma: Substitution, delta: Substitution) -> Substitution:
    """apply(t, compose(sigma, delta)) == apply(apply(t, sigma), delta)."""
    return Substitution(tuple(subst_apply(s, delta) for s in sigma.terms))
