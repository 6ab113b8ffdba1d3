"""Bidirectional type checking for the three stratified layers.

Layer discipline, positivity of fixpoints, cofix guardedness and the
extension-witness decision procedure all live here.  Theory files are
checked declaration by declaration; definitions extend the signature and
unfold during conversion.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from . import reduce
from .reduce import ConversionUndecided, guardedness_check
from .surface import Axiom, CheckEq, CheckType, Definition, Theory
from .terms import (
    And, App, Atom, Base, Bot, Box, Cofix, Const, Context, Dia, EMPTY_CONTEXT,
    Exists, ExtChk, ExtComp, ExtId, ExtT, Fold, Forall, Head, IdT, Imp, J, KF,
    KInf, Lam, MalformedTermError, Mu, Nil, Nu, NuIn, NuOut, Obs, Or, Pi,
    PROP, PropVar, Refl, Restrict, Sort, StepRel, StepTrace, Tail, Term, Top,
    TYPEL, UC, Unfold, Var, _BINDING, alpha_eq, free_var_indices, shift,
    psubst1, subst1,
)

MISMATCH = "mismatch"
UNBOUND = "unbound"
STRATIFICATION = "stratification-violation"
NON_POSITIVE = "non-positive-fixpoint"
UNGUARDED = "unguarded-cofix"
BAD_EXTENSION = "bad-extension-witness"
SORT_ERROR = "sort-error"
FUEL_EXHAUSTED = "fuel-exhausted"

ERROR_KINDS = (MISMATCH, UNBOUND, STRATIFICATION, NON_POSITIVE, UNGUARDED,
               BAD_EXTENSION, SORT_ERROR, FUEL_EXHAUSTED)


class NMTypeError(Exception):
    def __init__(self, kind: str, message: str, position=None, context=None):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message
        self.position = position
        self.context = context


@dataclass(frozen=True)
class ExtWitness:
    base: Term
    ext: Term
    suffix: tuple[tuple[Term, Term], ...]  # (event, state) pairs


@dataclass
class Signature:
    """Global declarations: name -> (type, optional definition body)."""
    entries: dict[str, tuple[Term, Term | None]] = field(default_factory=dict)

    def declare(self, name: str, ty: Term, body: Term | None = None) -> None:
        self.entries[name] = (ty, body)

    def type_of(self, name: str) -> Term | None:
        e = self.entries.get(name)
        return e[0] if e else None

    def defs(self) -> dict[str, Term]:
        return {n: b for n, (_, b) in self.entries.items() if b is not None}


NAT = Base("Nat")
STATE = Base("State")
EVENT = Base("Event")
FIN_TRACE = Base("FinTrace")
INF_TRACE = Base("InfTrace")
_BASE_NAMES = {"State", "Event", "Nat", "FinTrace", "InfTrace"}


def positivity(var_index: int, phi: Term) -> str:
    """Polarity of predicate variable ``var_index`` in ``phi``:
    positive | negative | mixed | absent.  Sign flips through the left of
    an implication."""
    signs: set[int] = set()

    def go(t: Term, idx: int, sign: int) -> None:
        if isinstance(t, PropVar):
            if t.index == idx:
                signs.add(sign)
            return
        if isinstance(t, Imp):
            go(t.lhs, idx, -sign)
            go(t.rhs, idx, sign)
            return
        binding = _BINDING.get(type(t), {})
        for f in dataclasses.fields(t):
            v = getattr(t, f.name)
            if isinstance(v, Term):
                go(v, idx + 1 if binding.get(f.name) == "p" else idx, sign)

    go(phi, var_index, 1)
    if not signs:
        return "absent"
    if signs == {1}:
        return "positive"
    if signs == {-1}:
        return "negative"
    return "mixed"


def _trace_spine(t: Term) -> tuple[Term, list[tuple[Term, Term]]]:
    suffix: list[tuple[Term, Term]] = []
    while isinstance(t, StepTrace):
        suffix.append((t.event, t.state))
        t = t.trace
    suffix.reverse()
    return t, suffix


def ext_witness(tau: Term, tau2: Term, defs: dict[str, Term] | None = None,
                fuel: int = 10_000) -> ExtWitness:
    """Decide Ext(tau, tau2) for closed traces: tau must be a prefix of
    tau2; the canonical witness is the replayable suffix."""
    n1 = reduce.normalize_strict(tau, fuel, defs)
    n2 = reduce.normalize_strict(tau2, fuel, defs)
    base1, suf1 = _trace_spine(n1)
    base2, suf2 = _trace_spine(n2)
    if not isinstance(base1, Nil) or not isinstance(base2, Nil):
        raise NMTypeError(BAD_EXTENSION, "traces are not closed nil/step forms")
    if free_var_indices(n1) or free_var_indices(n2):
        raise NMTypeError(BAD_EXTENSION, "traces must be closed")
    ok = (alpha_eq(base1, base2) and len(suf1) <= len(suf2)
          and all(alpha_eq(a[0], b[0]) and alpha_eq(a[1], b[1])
                  for a, b in zip(suf1, suf2)))
    if not ok:
        raise NMTypeError(BAD_EXTENSION,
                          "first trace is not a prefix of the second")
    return ExtWitness(tau, tau2, tuple(suf2[len(suf1):]))


class Checker:
    def __init__(self, sig: Signature | None = None, fuel: int = 10_000,
                 strict_atoms: bool = False):
        self.sig = sig or Signature()
        self.fuel = fuel
        self.strict_atoms = strict_atoms

    # -- conversion helpers ----------------------------------------------

    def norm(self, t: Term) -> Term:
        try:
            return reduce.normalize_strict(t, self.fuel, self.sig.defs())
        except ConversionUndecided as e:
            raise NMTypeError(FUEL_EXHAUSTED, str(e)) from e

    def conv(self, t: Term, u: Term, proof_irrelevant: bool = False) -> bool:
        try:
            return reduce.conv(t, u, self.fuel, self.sig.defs(),
                               proof_irrelevant)
        except ConversionUndecided as e:
            raise NMTypeError(FUEL_EXHAUSTED, str(e)) from e

    def _require_conv(self, t: Term, u: Term, what: str) -> None:
        if not self.conv(t, u):
            from .surface import pretty_print
            raise NMTypeError(
                MISMATCH,
                f"{what}: expected {pretty_print(u)}, got {pretty_print(t)}")

    # -- sorts -----------------------------------------------------------

    def sort_of(self, ctx: Context, ty: Term, pvars: int = 0) -> Sort:
        s = self.norm(self.infer(ctx, ty, pvars))
        if not isinstance(s, Sort):
            from .surface import pretty_print
            raise NMTypeError(SORT_ERROR,
                              f"{pretty_print(ty)} is not a type (its type "
                              f"is {pretty_print(s)})")
        return s

    def check_context(self, ctx: Context) -> None:
        prefix = EMPTY_CONTEXT
        for hint, ty in ctx.entries:
            self.sort_of(prefix, ty)
            prefix = prefix.extend(hint, ty)

    # -- inference -------------------------------------------------------

    def infer(self, ctx: Context, t: Term, pvars: int = 0) -> Term:
        if isinstance(t, Var):
            try:
                return ctx.lookup(t.index)
            except MalformedTermError:
                raise NMTypeError(UNBOUND, f"unbound variable #{t.index}")
        if isinstance(t, PropVar):
            if t.index < pvars:
                return Sort(PROP)
            raise NMTypeError(UNBOUND,
                              f"unbound predicate variable #{t.index}")
        if isinstance(t, Const):
            ty = self.sig.type_of(t.name)
            if ty is None:
                raise NMTypeError(UNBOUND, f"undeclared constant {t.name!r}")
            return ty
        if isinstance(t, Atom):
            if self.strict_atoms:
                raise NMTypeError(UNBOUND, f"unknown name {t.name!r}")
            if t.arg is not None:
                self.check(ctx, t.arg, STATE, pvars)
            return Sort(PROP)
        if isinstance(t, Sort):
            if t.layer == PROP:
                return Sort(TYPEL, 0)
            return Sort(t.layer, t.level + 1)
        if isinstance(t, Base):
            if t.name not in _BASE_NAMES:
                raise NMTypeError(UNBOUND, f"unknown base type {t.name!r}")
            return Sort(UC, 0)
        if isinstance(t, (Top, Bot)):
            return Sort(PROP)
        if isinstance(t, Pi):
            return self._infer_pi(ctx, t, pvars)
        if isinstance(t, Lam):
            return self._infer_lam(ctx, t, pvars)
        if isinstance(t, App):
            return self._infer_app(ctx, t, pvars)
        if isinstance(t, StepRel):
            self.check(ctx, t.src, STATE, pvars)
            self.check(ctx, t.event, EVENT, pvars)
            self.check(ctx, t.dst, STATE, pvars)
            return Sort(UC, 0)
        if isinstance(t, Nil):
            self.check(ctx, t.state, STATE, pvars)
            return FIN_TRACE
        if isinstance(t, StepTrace):
            self.check(ctx, t.trace, FIN_TRACE, pvars)
            self.check(ctx, t.event, EVENT, pvars)
            self.check(ctx, t.state, STATE, pvars)
            return FIN_TRACE
        if isinstance(t, Obs):
            self.check(ctx, t.state, STATE, pvars)
            self.check(ctx, t.event, EVENT, pvars)
            self.check(ctx, t.rest, INF_TRACE, pvars)
            return INF_TRACE
        if isinstance(t, Head):
            self.check(ctx, t.trace, INF_TRACE, pvars)
            return STATE
        if isinstance(t, Tail):
            self.check(ctx, t.trace, INF_TRACE, pvars)
            return INF_TRACE
        if isinstance(t, Cofix):
            if not guardedness_check(t.body):
                raise NMTypeError(UNGUARDED,
                                  "recursion variable not guarded by an "
                                  "observation cell")
            self.check(ctx.extend(t.hint, INF_TRACE), t.body, INF_TRACE, pvars)
            return INF_TRACE
        if isinstance(t, ExtT):
            self.check(ctx, t.base, FIN_TRACE, pvars)
            self.check(ctx, t.ext, FIN_TRACE, pvars)
            return Sort(UC, 0)
        if isinstance(t, ExtId):
            self.check(ctx, t.trace, FIN_TRACE, pvars)
            return ExtT(t.trace, t.trace)
        if isinstance(t, ExtComp):
            ti = self.norm(self.infer(ctx, t.inner, pvars))
            to = self.norm(self.infer(ctx, t.outer, pvars))
            if not isinstance(ti, ExtT) or not isinstance(to, ExtT):
                raise NMTypeError(MISMATCH,
                                  "ext_comp expects two extension witnesses")
            self._require_conv(to.base, ti.ext, "composed extension endpoints")
            return ExtT(ti.base, to.ext)
        if isinstance(t, ExtChk):
            self.check(ctx, t.base, FIN_TRACE, pvars)
            self.check(ctx, t.ext, FIN_TRACE, pvars)
            ext_witness(t.base, t.ext, self.sig.defs(), self.fuel)
            return ExtT(t.base, t.ext)
        if isinstance(t, KF):
            self.check(ctx, t.trace, FIN_TRACE, pvars)
            return Sort(TYPEL, 0)
        if isinstance(t, KInf):
            self.check(ctx, t.trace, INF_TRACE, pvars)
            return Sort(TYPEL, 0)
        if isinstance(t, Restrict):
            te = self.norm(self.infer(ctx, t.evidence, pvars))
            if not isinstance(te, ExtT):
                raise NMTypeError(MISMATCH,
                                  "restrict expects extension evidence first")
            tk = self.norm(self.infer(ctx, t.knowledge, pvars))
            if not isinstance(tk, KF):
                raise NMTypeError(MISMATCH,
                                  "restrict expects knowledge over the "
                                  "extended trace")
            self._require_conv(tk.trace, te.ext, "restricted trace")
            return KF(te.base)
        if isinstance(t, IdT):
            s = self.sort_of(ctx, t.ty, pvars)
            if s.layer != UC:
                raise NMTypeError(SORT_ERROR,
                                  "identity types are computational only")
            self.check(ctx, t.lhs, t.ty, pvars)
            self.check(ctx, t.rhs, t.ty, pvars)
            return Sort(UC, s.level)
        if isinstance(t, Refl):
            a_ty = self.infer(ctx, t.arg, pvars)
            return IdT(a_ty, t.arg, t.arg)
        if isinstance(t, J):
            return self._infer_j(ctx, t, pvars)
        if isinstance(t, (And, Or, Imp)):
            self.check(ctx, t.lhs, Sort(PROP), pvars)
            self.check(ctx, t.rhs, Sort(PROP), pvars)
            return Sort(PROP)
        if isinstance(t, (Dia, Box)):
            self.check(ctx, t.body, Sort(PROP), pvars)
            return Sort(PROP)
        if isinstance(t, (Forall, Exists)):
            s = self.sort_of(ctx, t.dom, pvars)
            if s.layer == PROP:
                raise NMTypeError(STRATIFICATION,
                                  "quantification domain must be "
                                  "computational, not propositional")
            self.check(ctx.extend(t.hint, t.dom), t.body, Sort(PROP), pvars)
            return Sort(PROP)
        if isinstance(t, (Mu, Nu)):
            kw = "mu" if isinstance(t, Mu) else "nu"
            self.check(ctx, t.body, Sort(PROP), pvars + 1)
            pol = positivity(0, t.body)
            if pol not in ("positive", "absent"):
                raise NMTypeError(NON_POSITIVE,
                                  f"{kw}-bound variable occurs with "
                                  f"{pol} polarity")
            return Sort(PROP)
        if isinstance(t, Unfold):
            if isinstance(t.arg, Fold):  # redex: same type as the payload
                return self.infer(ctx, t.arg.arg, pvars)
            ta = self.norm(self.infer(ctx, t.arg, pvars))
            if not isinstance(ta, Mu):
                raise NMTypeError(MISMATCH, "unfold expects a mu proof")
            return psubst1(ta.body, ta)
        if isinstance(t, NuOut):
            if isinstance(t.arg, NuIn):
                return self.infer(ctx, t.arg.arg, pvars)
            ta = self.norm(self.infer(ctx, t.arg, pvars))
            if not isinstance(ta, Nu):
                raise NMTypeError(MISMATCH, "nu_out expects a nu proof")
            return psubst1(ta.body, ta)
        if isinstance(t, Fold) and isinstance(t.arg, Unfold):
            return self.infer(ctx, t.arg.arg, pvars)
        if isinstance(t, NuIn) and isinstance(t.arg, NuOut):
            return self.infer(ctx, t.arg.arg, pvars)
        if isinstance(t, (Fold, NuIn)):
            kw = "fold" if isinstance(t, Fold) else "nu_in"
            raise NMTypeError(MISMATCH,
                              f"{kw} cannot be inferred; check it against "
                              f"its fixpoint type")
        raise NMTypeError(MISMATCH, f"cannot infer a type for {t!r}")

    def _infer_pi(self, ctx: Context, t: Pi, pvars: int) -> Term:
        s_dom = self.sort_of(ctx, t.dom, pvars)
        if s_dom.layer != UC:
            raise NMTypeError(
                STRATIFICATION,
                f"Pi domain lies in layer {s_dom.layer}; computational "
                f"function types may only abstract over Uc data")
        s_cod = self.sort_of(ctx.extend(t.hint, t.dom), t.cod, pvars)
        if s_cod.layer == UC:
            return Sort(UC, max(s_dom.level, s_cod.level))
        if s_cod.layer == TYPEL:
            return Sort(TYPEL, s_cod.level)
        raise NMTypeError(STRATIFICATION,
                          "Pi into Prop is not a computational type; "
                          "use forall")

    def _infer_lam(self, ctx: Context, t: Lam, pvars: int) -> Term:
        s_dom = self.sort_of(ctx, t.dom, pvars)
        body_ty = self.infer(ctx.extend(t.hint, t.dom), t.body, pvars)
        if s_dom.layer == PROP:
            body_sort = self.sort_of(ctx.extend(t.hint, t.dom), body_ty, pvars)
            if body_sort.layer != PROP:
                raise NMTypeError(
                    STRATIFICATION,
                    "eliminating a propositional hypothesis into a "
                    f"{body_sort.layer} result")
            if 0 in free_var_indices(body_ty):
                raise NMTypeError(SORT_ERROR,
                                  "conclusion may not depend on a proof")
            return Imp(t.dom, shift(body_ty, -1, cutoff=1))
        if s_dom.layer == TYPEL:
            raise NMTypeError(STRATIFICATION,
                              "lambda abstraction over knowledge-layer "
                              "data is not computational")
        return Pi(t.dom, body_ty, hint=t.hint)

    def _infer_app(self, ctx: Context, t: App, pvars: int) -> Term:
        fn_ty = self.norm(self.infer(ctx, t.fn, pvars))
        if isinstance(fn_ty, Pi):
            self.check(ctx, t.arg, fn_ty.dom, pvars)
            return subst1(fn_ty.cod, t.arg)
        if isinstance(fn_ty, Forall):
            self.check(ctx, t.arg, fn_ty.dom, pvars)
            return subst1(fn_ty.body, t.arg)
        if isinstance(fn_ty, Imp):
            self.check(ctx, t.arg, fn_ty.lhs, pvars)
            return fn_ty.rhs
        from .surface import pretty_print
        raise NMTypeError(MISMATCH,
                          f"applied a non-function of type "
                          f"{pretty_print(fn_ty)}")

    def _infer_j(self, ctx: Context, t: J, pvars: int) -> Term:
        p_ty = self.norm(self.infer(ctx, t.proof, pvars))
        if not isinstance(p_ty, IdT):
            raise NMTypeError(MISMATCH, "J expects an identity proof")
        self.check(ctx, t.lhs, p_ty.ty, pvars)
        self.check(ctx, t.rhs, p_ty.ty, pvars)
        self._require_conv(t.lhs, p_ty.lhs, "J left endpoint")
        self._require_conv(t.rhs, p_ty.rhs, "J right endpoint")
        result = App(App(t.motive, t.lhs), t.rhs)
        self.sort_of(ctx, result, pvars)
        diag = Pi(p_ty.ty,
                  App(App(shift(t.motive, 1), Var(0)), Var(0)),
                  hint="a")
        self.check(ctx, t.base, diag, pvars)
        return result

    # -- checking --------------------------------------------------------

    def check(self, ctx: Context, t: Term, expected: Term, pvars: int = 0) -> None:
        want = self.norm(expected)
        if isinstance(t, Lam):
            if isinstance(want, (Pi, Forall)):
                self._require_conv(t.dom, want.dom, "lambda domain")
                cod = want.cod if isinstance(want, Pi) else want.body
                self.check(ctx.extend(t.hint, t.dom), t.body, cod, pvars)
                return
            if isinstance(want, Imp):
                self._require_conv(t.dom, want.lhs, "lambda domain")
                self.check(ctx.extend(t.hint, t.dom), t.body,
                           shift(want.rhs, 1), pvars)
                return
        if isinstance(t, Fold) and isinstance(want, Mu):
            self.check(ctx, t.arg, psubst1(want.body, want), pvars)
            return
        if isinstance(t, NuIn) and isinstance(want, Nu):
            self.check(ctx, t.arg, psubst1(want.body, want), pvars)
            return
        if isinstance(t, Refl) and isinstance(want, IdT):
            self.check(ctx, t.arg, want.ty, pvars)
            self._require_conv(t.arg, want.lhs, "refl endpoint")
            if not self.conv(want.lhs, want.rhs):
                raise NMTypeError(MISMATCH,
                                  "refl at non-convertible endpoints")
            return
        got = self.infer(ctx, t, pvars)
        self._require_conv(got, want, "term type")


# -- module-level entry points -------------------------------------------

def infer(ctx: Context, t: Term, sig: Signature | None = None,
          fuel: int = 10_000) -> Term:
    return Checker(sig, fuel).infer(ctx, t)


def check(ctx: Context, t: Term, ty: Term, sig: Signature | None = None,
          fuel: int = 10_000) -> None:
    Checker(sig, fuel).check(ctx, t, ty)


def check_context(ctx: Context, sig: Signature | None = None) -> None:
    Checker(sig).check_context(ctx)


def check_stratification(ctx: Context, t: Term,
                         sig: Signature | None = None) -> NMTypeError | None:
    """Ok (None) iff t's layer usage is well-formed; otherwise the error."""
    try:
        Checker(sig).infer(ctx, t)
        return None
    except NMTypeError as e:
        return e


def conv_at(ctx: Context, t: Term, u: Term, ty: Term,
            sig: Signature | None = None, fuel: int = 10_000) -> bool:
    """Convertibility at a type: proof-irrelevant when ty is a Prop."""
    ck = Checker(sig, fuel)
    irrelevant = ck.sort_of(ctx, ty).layer == PROP
    return ck.conv(t, u, proof_irrelevant=irrelevant)


@dataclass(frozen=True)
class DeclResult:
    label: str
    ok: bool
    error: NMTypeError | None = None
    position: tuple[int, int] | None = None

    @property
    def kind(self) -> str:
        return "ok" if self.ok else self.error.kind


@dataclass(frozen=True)
class TheoryReport:
    results: tuple[DeclResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)


def check_theory(theory: Theory, fuel: int = 10_000) -> TheoryReport:
    sig = Signature()
    checker = Checker(sig, fuel, strict_atoms=True)
    results: list[DeclResult] = []
    positions = theory.positions or tuple((0, 0) for _ in theory.declarations)
    for i, (decl, pos) in enumerate(zip(theory.declarations, positions)):
        label = getattr(decl, "name", f"<{type(decl).__name__.lower()}#{i}>")
        try:
            if isinstance(decl, Axiom):
                checker.sort_of(EMPTY_CONTEXT, decl.type)
                sig.declare(decl.name, decl.type)
            elif isinstance(decl, Definition):
                checker.sort_of(EMPTY_CONTEXT, decl.type)
                checker.check(EMPTY_CONTEXT, decl.body, decl.type)
                sig.declare(decl.name, decl.type, decl.body)
            elif isinstance(decl, CheckType):
                checker.sort_of(EMPTY_CONTEXT, decl.type)
                checker.check(EMPTY_CONTEXT, decl.term, decl.type)
            elif isinstance(decl, CheckEq):
                lhs_ty = checker.infer(EMPTY_CONTEXT, decl.lhs)
                checker.check(EMPTY_CONTEXT, decl.rhs, lhs_ty)
                irrelevant = checker.sort_of(EMPTY_CONTEXT, lhs_ty).layer == PROP
                if not checker.conv(decl.lhs, decl.rhs,
                                    proof_irrelevant=irrelevant):
                    raise NMTypeError(MISMATCH,
                                      "sides are not convertible")
            results.append(DeclResult(label, True, position=pos))
        except NMTypeError as e:
            if isinstance(decl, Axiom):
                sig.declare(decl.name, decl.type)
            elif isinstance(decl, Definition):
                sig.declare(decl.name, decl.type, decl.body)
            results.append(DeclResult(label, False, e, pos))
    return TheoryReport(tuple(results))


def theory_signature(theory: Theory, fuel: int = 10_000) -> Signature:
    """Signature of a theory's axioms and definitions, without re-checking."""
    sig = Signature()
    for decl in theory.declarations:
        if isinstance(decl, Axiom):
            sig.declare(decl.name, decl.type)
        elif isinstance(decl, Definition):
            sig.declare(decl.name, decl.type, decl.body)
    return sig


# -- consistency search --------------------------------------------------

def search_inhabitant(sig: Signature, goal: Term, max_size: int = 10,
                      fuel: int = 2_000) -> Term | None:
    """Goal-directed exhaustive search for a closed inhabitant of ``goal``
    of size at most ``max_size``.  Complete for the intro/elim fragment the
    term grammar can express; used to probe for proofs of bot."""
    checker = Checker(sig, fuel)
    defs = sig.defs()

    def whnf(t: Term) -> Term:
        try:
            return reduce.normalize_strict(t, fuel, defs)
        except ConversionUndecided:
            return t

    def spine(ty: Term) -> tuple[list[tuple[str, Term]], Term]:
        """Premises of an axiom type: list of ('arg'|'hyp', type) ending in
        a conclusion.  Dependent binders are only usable when the argument
        does not occur in the conclusion (no unification here)."""
        prems: list[tuple[str, Term]] = []
        ty = whnf(ty)
        while True:
            if isinstance(ty, Imp):
                prems.append(("hyp", ty.lhs))
                ty = whnf(ty.rhs)
            elif isinstance(ty, (Pi, Forall)):
                body = ty.cod if isinstance(ty, Pi) else ty.body
                if 0 in free_var_indices(body):
                    return prems, ty  # dependent: stop stripping
                prems.append(("arg", ty.dom))
                ty = whnf(shift(body, -1, cutoff=1))
            else:
                return prems, ty

    from .terms import term_size

    def prove(hyps: tuple[Term, ...], goal: Term, size: int,
              seen: frozenset) -> Term | None:
        if size <= 0:
            return None
        goal = whnf(goal)
        key = (hyps, goal, size)
        if key in seen:
            return None
        seen = seen | {key}
        # intro rules
        if isinstance(goal, Top):
            return None  # no canonical proof term for top in the grammar
        if isinstance(goal, Imp):
            body = prove(tuple(shift(h, 1) for h in hyps) + (shift(goal.lhs, 1),),
                         shift(goal.rhs, 1), size - 1 - term_size(goal.lhs),
                         seen)
            # hypothesis at index 0 is goal.lhs itself
            if body is not None:
                return Lam(goal.lhs, body)
        if isinstance(goal, (Pi, Forall)):
            dom = goal.dom
            cod = goal.cod if isinstance(goal, Pi) else goal.body
            body = prove(tuple(shift(h, 1) for h in hyps) + (shift(dom, 1),),
                         cod, size - 1 - term_size(dom), seen)
            if body is not None:
                return Lam(dom, body)
        if isinstance(goal, Mu):
            sub = prove(hyps, psubst1(goal.body, goal), size - 1, seen)
            if sub is not None:
                return Fold(sub)
        if isinstance(goal, Nu):
            sub = prove(hyps, psubst1(goal.body, goal), size - 1, seen)
            if sub is not None:
                return NuIn(sub)
        if isinstance(goal, IdT):
            try:
                if checker.conv(goal.lhs, goal.rhs):
                    return Refl(goal.lhs)
            except NMTypeError:
                pass
        if isinstance(goal, ExtT):
            try:
                ext_witness(goal.base, goal.ext, defs, fuel)
                return ExtChk(goal.base, goal.ext)
            except NMTypeError:
                pass
        # elimination: apply a constant or hypothesis whose spine ends in goal
        heads: list[tuple[Term, Term]] = []
        for name, (ty, _) in sig.entries.items():
            heads.append((Const(name), ty))
        for i, hty in enumerate(reversed(hyps)):
            heads.append((Var(i), hty))
        for head, hty in heads:
            prems, concl = spine(hty)
            hit = _try_apply(head, prems, concl, goal, hyps, size, seen)
            if hit is not None:
                return hit
            # one layer of fixpoint unfolding on the head
            nty = whnf(hty)
            if isinstance(nty, Mu):
                prems, concl = spine(psubst1(nty.body, nty))
                hit = _try_apply(Unfold(head), prems, concl, goal, hyps,
                                 size - 1, seen)
                if hit is not None:
                    return hit
            if isinstance(nty, Nu):
                prems, concl = spine(psubst1(nty.body, nty))
                hit = _try_apply(NuOut(head), prems, concl, goal, hyps,
                                 size - 1, seen)
                if hit is not None:
                    return hit
        return None

    def _try_apply(head: Term, prems, concl, goal, hyps, size, seen):
        try:
            if not checker.conv(concl, goal):
                return None
        except NMTypeError:
            return None
        budget = size - 1 - len(prems)
        args: list[Term] = []
        for _, pty in prems:
            # premise types live in the outer context: spine() stops at
            # dependent binders, so no argument is mentioned downstream
            arg = prove(hyps, pty, budget, seen)
            if arg is None:
                return None
            budget -= term_size(arg)
            args.append(arg)
        out = head
        for a in args:
            out = App(out, a)
        return out

    return prove((), goal, max_size, frozenset())


def search_bot_proof(sig: Signature, max_size: int = 10) -> Term | None:
    return search_inhabitant(sig, Bot(), max_size)
