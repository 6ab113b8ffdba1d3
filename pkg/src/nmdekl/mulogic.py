"""Explicit-state mu-calculus model checking and the temporal-logic bridge.

Provides Kripke structures with a JSON file format, Kleene-iteration
fixpoint evaluation, the enc/dec translations into and out of the
propositional fragment of the term language, LTL over lasso traces, CTL
via the standard mu-translation, and the two-model separation demo.

The atom names ``top`` and ``bot`` are reserved: they denote the full and
the empty state set in every structure.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field

from .terms import (
    And, Atom, Bot, Box, Dia, Imp, Mu, Nu, Or, PropVar, Term, Top,
)


class FormulaError(Exception):
    pass


class UntranslatableError(Exception):
    pass


class TotalityError(Exception):
    pass


# -- Kripke structures ---------------------------------------------------

@dataclass(frozen=True)
class KripkeStructure:
    states: tuple[str, ...]
    transitions: frozenset[tuple[str, str]]
    valuation: dict[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        known = set(self.states)
        for a, b in self.transitions:
            if a not in known or b not in known:
                raise ValueError(f"transition endpoint {a!r}->{b!r} undeclared")
        for p, ss in self.valuation.items():
            if not set(ss) <= known:
                raise ValueError(f"valuation of {p!r} mentions unknown states")

    def successors(self, s: str) -> frozenset[str]:
        return frozenset(b for a, b in self.transitions if a == s)

    def is_total(self) -> bool:
        return all(self.successors(s) for s in self.states)

    def atom_set(self, p: str) -> frozenset[str]:
        if p == "top":
            return frozenset(self.states)
        if p == "bot":
            return frozenset()
        return self.valuation.get(p, frozenset())

    def to_dict(self) -> dict:
        return {
            "states": sorted(self.states),
            "transitions": sorted([list(t) for t in self.transitions]),
            "valuation": {p: sorted(ss)
                          for p, ss in sorted(self.valuation.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KripkeStructure":
        return cls(tuple(d["states"]),
                   frozenset(tuple(t) for t in d["transitions"]),
                   {p: frozenset(ss) for p, ss in d.get("valuation", {}).items()})

    def dump(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "KripkeStructure":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


# -- mu-calculus formulas (positive normal form) -------------------------

@dataclass(frozen=True)
class MuFormula:
    pass


@dataclass(frozen=True)
class MAtom(MuFormula):
    name: str


@dataclass(frozen=True)
class MNeg(MuFormula):
    name: str


@dataclass(frozen=True)
class MAnd(MuFormula):
    lhs: MuFormula
    rhs: MuFormula


@dataclass(frozen=True)
class MOr(MuFormula):
    lhs: MuFormula
    rhs: MuFormula


@dataclass(frozen=True)
class MDia(MuFormula):
    body: MuFormula


@dataclass(frozen=True)
class MBox(MuFormula):
    body: MuFormula


@dataclass(frozen=True)
class MVar(MuFormula):
    name: str


@dataclass(frozen=True)
class MMu(MuFormula):
    var: str
    body: MuFormula


@dataclass(frozen=True)
class MNu(MuFormula):
    var: str
    body: MuFormula


def mu_free_vars(phi: MuFormula) -> set[str]:
    if isinstance(phi, MVar):
        return {phi.name}
    if isinstance(phi, (MMu, MNu)):
        return mu_free_vars(phi.body) - {phi.var}
    if isinstance(phi, (MAnd, MOr)):
        return mu_free_vars(phi.lhs) | mu_free_vars(phi.rhs)
    if isinstance(phi, (MDia, MBox)):
        return mu_free_vars(phi.body)
    return set()


def _mu_canon(phi: MuFormula, env: tuple[str, ...]) -> tuple:
    if isinstance(phi, MVar):
        for d, v in enumerate(reversed(env)):
            if v == phi.name:
                return ("v", d)
        return ("fv", phi.name)
    if isinstance(phi, (MMu, MNu)):
        tag = "mu" if isinstance(phi, MMu) else "nu"
        return (tag, _mu_canon(phi.body, env + (phi.var,)))
    if isinstance(phi, (MAtom, MNeg)):
        return (type(phi).__name__, phi.name)
    if isinstance(phi, (MAnd, MOr)):
        return (type(phi).__name__, _mu_canon(phi.lhs, env),
                _mu_canon(phi.rhs, env))
    return (type(phi).__name__, _mu_canon(phi.body, env))


def mu_alpha_eq(a: MuFormula, b: MuFormula) -> bool:
    return _mu_canon(a, ()) == _mu_canon(b, ())


def mu_size(phi: MuFormula) -> int:
    if isinstance(phi, (MAtom, MNeg, MVar)):
        return 1
    if isinstance(phi, (MAnd, MOr)):
        return 1 + mu_size(phi.lhs) + mu_size(phi.rhs)
    return 1 + mu_size(phi.body)


# -- formula surface syntax ----------------------------------------------

_F_TOKEN = re.compile(r"\s*(\\/|/\\|[().!\[\]~]|[A-Za-z_][A-Za-z0-9_]*)")


def _f_tokens(text: str) -> list[str]:
    out, pos = [], 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _F_TOKEN.match(text, pos)
        if not m:
            raise FormulaError(f"bad character {text[pos]!r} in formula")
        out.append(m.group(1))
        pos = m.end()
    out.append("<eof>")
    return out


class _FParser:
    def __init__(self, tokens: list[str]):
        self.toks = tokens
        self.pos = 0

    def peek(self) -> str:
        return self.toks[self.pos]

    def next(self) -> str:
        t = self.toks[self.pos]
        if t != "<eof>":
            self.pos += 1
        return t

    def expect(self, t: str) -> None:
        got = self.next()
        if got != t:
            raise FormulaError(f"expected {t!r}, found {got!r}")


_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def parse_mu_formula(text: str) -> MuFormula:
    p = _FParser(_f_tokens(text))
    phi = _mu_or(p)
    p.expect("<eof>")
    if mu_free_vars(phi):
        raise FormulaError(f"free fixpoint variables: {sorted(mu_free_vars(phi))}")
    return phi


def _mu_or(p: _FParser) -> MuFormula:
    t = _mu_and(p)
    while p.peek() == "\\/":
        p.next()
        t = MOr(t, _mu_and(p))
    return t


def _mu_and(p: _FParser) -> MuFormula:
    t = _mu_unary(p)
    while p.peek() == "/\\":
        p.next()
        t = MAnd(t, _mu_unary(p))
    return t


def _mu_unary(p: _FParser) -> MuFormula:
    tok = p.peek()
    if tok == "dia":
        p.next()
        return MDia(_mu_unary(p))
    if tok == "box":
        p.next()
        return MBox(_mu_unary(p))
    if tok in ("!", "~"):
        p.next()
        name = p.next()
        if not _IDENT.match(name):
            raise FormulaError("negation applies to atoms only")
        return MNeg(name)
    if tok in ("mu", "nu"):
        p.next()
        var = p.next()
        if not _IDENT.match(var):
            raise FormulaError(f"bad fixpoint variable {var!r}")
        p.expect(".")
        body = _mu_or(p)
        return MMu(var, body) if tok == "mu" else MNu(var, body)
    if tok == "(":
        p.next()
        t = _mu_or(p)
        p.expect(")")
        return t
    if _IDENT.match(tok):
        p.next()
        # convention: single uppercase-initial names are fixpoint variables
        if tok[0].isupper():
            return MVar(tok)
        return MAtom(tok)
    raise FormulaError(f"unexpected token {tok!r}")


def mu_pretty(phi: MuFormula) -> str:
    def go(f: MuFormula, prec: int) -> str:
        if isinstance(f, MAtom):
            return f.name
        if isinstance(f, MNeg):
            return f"!{f.name}"
        if isinstance(f, MVar):
            return f.name
        if isinstance(f, MOr):
            s = f"{go(f.lhs, 1)} \\/ {go(f.rhs, 2)}"
            return f"({s})" if prec > 1 else s
        if isinstance(f, MAnd):
            s = f"{go(f.lhs, 2)} /\\ {go(f.rhs, 3)}"
            return f"({s})" if prec > 2 else s
        if isinstance(f, MDia):
            return f"dia {go(f.body, 3)}"
        if isinstance(f, MBox):
            return f"box {go(f.body, 3)}"
        kw = "mu" if isinstance(f, MMu) else "nu"
        s = f"{kw} {f.var} . {go(f.body, 0)}"
        return f"({s})" if prec > 0 else s
    return go(phi, 0)


# -- Kleene iteration ----------------------------------------------------

def mc_mu(M: KripkeStructure, phi: MuFormula,
          env: dict[str, frozenset[str]] | None = None) -> frozenset[str]:
    """Exact denotation of a closed formula by fixpoint iteration."""
    env = env or {}
    free = mu_free_vars(phi) - set(env)
    if free:
        raise FormulaError(f"free variables {sorted(free)} in mc_mu input")
    return _den(M, phi, env)


def _den(M, phi, env) -> frozenset[str]:
    if isinstance(phi, MAtom):
        return M.atom_set(phi.name)
    if isinstance(phi, MNeg):
        return frozenset(M.states) - M.atom_set(phi.name)
    if isinstance(phi, MVar):
        return env[phi.name]
    if isinstance(phi, MAnd):
        return _den(M, phi.lhs, env) & _den(M, phi.rhs, env)
    if isinstance(phi, MOr):
        return _den(M, phi.lhs, env) | _den(M, phi.rhs, env)
    if isinstance(phi, MDia):
        body = _den(M, phi.body, env)
        return frozenset(s for s in M.states if M.successors(s) & body)
    if isinstance(phi, MBox):
        body = _den(M, phi.body, env)
        return frozenset(s for s in M.states if M.successors(s) <= body)
    if isinstance(phi, (MMu, MNu)):
        least = isinstance(phi, MMu)
        cur = frozenset() if least else frozenset(M.states)
        for _ in range(len(M.states) + 1):
            nxt = _den(M, phi.body, {**env, phi.var: cur})
            if least:
                assert cur <= nxt, "mu iteration must be inflationary"
            else:
                assert nxt <= cur, "nu iteration must be deflationary"
            if nxt == cur:
                return cur
            cur = nxt
        raise AssertionError("fixpoint failed to converge within |S|+1 steps")
    raise FormulaError(f"unknown formula node {phi!r}")


# -- enc / dec -----------------------------------------------------------

CURRENT_STATE = Atom("s")


def enc(phi: MuFormula) -> Term:
    """Encode a mu-calculus formula into the propositional term fragment,
    with the symbolic current state ``s``."""
    def go(f: MuFormula, stack: tuple[str, ...]) -> Term:
        if isinstance(f, MAtom):
            return Atom(f.name, CURRENT_STATE)
        if isinstance(f, MNeg):
            return Imp(Atom(f.name, CURRENT_STATE), Bot())
        if isinstance(f, MAnd):
            return And(go(f.lhs, stack), go(f.rhs, stack))
        if isinstance(f, MOr):
            return Or(go(f.lhs, stack), go(f.rhs, stack))
        if isinstance(f, MDia):
            return Dia(go(f.body, stack))
        if isinstance(f, MBox):
            return Box(go(f.body, stack))
        if isinstance(f, MVar):
            for d, v in enumerate(reversed(stack)):
                if v == f.name:
                    return PropVar(d)
            raise FormulaError(f"unbound variable {f.name}")
        if isinstance(f, MMu):
            return Mu(go(f.body, stack + (f.var,)), hint=f.var)
        if isinstance(f, MNu):
            return Nu(go(f.body, stack + (f.var,)), hint=f.var)
        raise FormulaError(f"unknown formula node {f!r}")
    return go(phi, ())


def dec(P: Term) -> MuFormula:
    """Back-translate a propositional term to a mu-calculus formula.

    Raises UntranslatableError outside the truth-value fragment:
    implication is only admitted as atom negation or with an
    atom-only left side, and knowledge/evidence constructs do not
    translate at all.
    """
    from .terms import free_prop_indices

    def fresh(hint: str, stack: tuple[str, ...]) -> str:
        name = hint if hint and hint[0].isupper() else "X"
        while name in stack:
            name += "'"
        return name

    def go(t: Term, stack: tuple[str, ...]) -> MuFormula:
        if isinstance(t, Atom):
            return MAtom(t.name)
        if isinstance(t, Top):
            return MAtom("top")
        if isinstance(t, Bot):
            return MAtom("bot")
        if isinstance(t, And):
            return MAnd(go(t.lhs, stack), go(t.rhs, stack))
        if isinstance(t, Or):
            return MOr(go(t.lhs, stack), go(t.rhs, stack))
        if isinstance(t, Dia):
            return MDia(go(t.body, stack))
        if isinstance(t, Box):
            return MBox(go(t.body, stack))
        if isinstance(t, Imp):
            if free_prop_indices(t.lhs):
                raise UntranslatableError(
                    "implication left side captures a fixpoint variable")
            if isinstance(t.lhs, Atom):
                if isinstance(t.rhs, Bot):
                    return MNeg(t.lhs.name)
                return MOr(MNeg(t.lhs.name), go(t.rhs, stack))
            raise UntranslatableError(
                "implication with a non-atomic left side")
        if isinstance(t, PropVar):
            if t.index < len(stack):
                return MVar(stack[len(stack) - 1 - t.index])
            raise UntranslatableError(f"unbound predicate variable #{t.index}")
        if isinstance(t, Mu):
            v = fresh(t.hint, stack)
            return MMu(v, go(t.body, stack + (v,)))
        if isinstance(t, Nu):
            v = fresh(t.hint, stack)
            return MNu(v, go(t.body, stack + (v,)))
        raise UntranslatableError(
            f"{type(t).__name__} lies outside the truth-value fragment")
    return go(P, ())


def mc_propmu(M: KripkeStructure, P: Term, s: str) -> bool:
    """Truth of an encoded formula at a state.  Goes through dec when the
    formula lies in the fragment; otherwise evaluates directly with the
    same fixpoint engine, treating implication classically."""
    if s not in M.states:
        raise FormulaError(f"unknown state {s!r}")
    try:
        return s in mc_mu(M, dec(P))
    except UntranslatableError:
        return s in _den_term(M, P, ())


def _den_term(M: KripkeStructure, t: Term, stack) -> frozenset[str]:
    from .terms import And as TAnd, Or as TOr
    S = frozenset(M.states)
    if isinstance(t, Atom):
        return M.atom_set(t.name)
    if isinstance(t, Top):
        return S
    if isinstance(t, Bot):
        return frozenset()
    if isinstance(t, TAnd):
        return _den_term(M, t.lhs, stack) & _den_term(M, t.rhs, stack)
    if isinstance(t, TOr):
        return _den_term(M, t.lhs, stack) | _den_term(M, t.rhs, stack)
    if isinstance(t, Imp):
        return (S - _den_term(M, t.lhs, stack)) | _den_term(M, t.rhs, stack)
    if isinstance(t, Dia):
        body = _den_term(M, t.body, stack)
        return frozenset(s for s in M.states if M.successors(s) & body)
    if isinstance(t, Box):
        body = _den_term(M, t.body, stack)
        return frozenset(s for s in M.states if M.successors(s) <= body)
    if isinstance(t, PropVar):
        return stack[len(stack) - 1 - t.index]
    if isinstance(t, (Mu, Nu)):
        least = isinstance(t, Mu)
        cur = frozenset() if least else S
        for _ in range(len(M.states) + 1):
            nxt = _den_term(M, t.body, stack + (cur,))
            if nxt == cur:
                return cur
            cur = nxt
        raise AssertionError("fixpoint failed to converge")
    raise UntranslatableError(
        f"{type(t).__name__} is not evaluable over states")


# -- LTL over lasso traces -----------------------------------------------

@dataclass(frozen=True)
class LassoTrace:
    prefix: tuple[str, ...]
    cycle: tuple[str, ...]

    def __post_init__(self):
        if not self.cycle:
            raise ValueError("lasso cycle must be nonempty")

    def state_at(self, i: int) -> str:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def positions(self) -> int:
        return len(self.prefix) + len(self.cycle)

    def next_position(self, i: int) -> int:
        return i + 1 if i + 1 < self.positions() else len(self.prefix)

    def consistent_with(self, M: KripkeStructure) -> bool:
        seq = list(self.prefix) + list(self.cycle)
        pairs = list(zip(seq, seq[1:])) + [(self.cycle[-1], self.cycle[0])]
        return all(p in M.transitions for p in pairs)


@dataclass(frozen=True)
class LtlFormula:
    pass


@dataclass(frozen=True)
class LAtom(LtlFormula):
    name: str


@dataclass(frozen=True)
class LNot(LtlFormula):
    name: str


@dataclass(frozen=True)
class LAnd(LtlFormula):
    lhs: LtlFormula
    rhs: LtlFormula


@dataclass(frozen=True)
class LOr(LtlFormula):
    lhs: LtlFormula
    rhs: LtlFormula


@dataclass(frozen=True)
class LX(LtlFormula):
    body: LtlFormula


@dataclass(frozen=True)
class LG(LtlFormula):
    body: LtlFormula


@dataclass(frozen=True)
class LF(LtlFormula):
    body: LtlFormula


@dataclass(frozen=True)
class LU(LtlFormula):
    lhs: LtlFormula
    rhs: LtlFormula


def parse_ltl_formula(text: str) -> LtlFormula:
    p = _FParser(_f_tokens(text))
    phi = _ltl_until(p)
    p.expect("<eof>")
    return phi


def _ltl_until(p: _FParser) -> LtlFormula:
    t = _ltl_or(p)
    if p.peek() == "U":
        p.next()
        return LU(t, _ltl_until(p))
    return t


def _ltl_or(p: _FParser) -> LtlFormula:
    t = _ltl_and(p)
    while p.peek() == "\\/":
        p.next()
        t = LOr(t, _ltl_and(p))
    return t


def _ltl_and(p: _FParser) -> LtlFormula:
    t = _ltl_unary(p)
    while p.peek() == "/\\":
        p.next()
        t = LAnd(t, _ltl_unary(p))
    return t


def _ltl_unary(p: _FParser) -> LtlFormula:
    tok = p.peek()
    if tok in ("X", "G", "F"):
        p.next()
        body = _ltl_unary(p)
        return {"X": LX, "G": LG, "F": LF}[tok](body)
    if tok in ("!", "~"):
        p.next()
        return LNot(p.next())
    if tok == "(":
        p.next()
        t = _ltl_until(p)
        p.expect(")")
        return t
    if _IDENT.match(tok):
        p.next()
        return LAtom(tok)
    raise FormulaError(f"unexpected token {tok!r} in LTL formula")


def ltl_eval(pi: LassoTrace, phi: LtlFormula,
             valuation: dict[str, frozenset[str]]) -> bool:
    """Exact LTL semantics on the infinite unrolling of a lasso, by
    per-position truth vectors with fixpoints on the cycle."""
    P = pi.positions()
    nxt = [pi.next_position(i) for i in range(P)]
    states = frozenset(s for s in pi.prefix) | frozenset(pi.cycle)

    def atom_vec(name: str) -> list[bool]:
        if name == "top":
            return [True] * P
        if name == "bot":
            return [False] * P
        ss = valuation.get(name, frozenset())
        return [pi.state_at(i) in ss for i in range(P)]

    def ev(f: LtlFormula) -> list[bool]:
        if isinstance(f, LAtom):
            return atom_vec(f.name)
        if isinstance(f, LNot):
            return [not b for b in atom_vec(f.name)]
        if isinstance(f, LAnd):
            a, b = ev(f.lhs), ev(f.rhs)
            return [x and y for x, y in zip(a, b)]
        if isinstance(f, LOr):
            a, b = ev(f.lhs), ev(f.rhs)
            return [x or y for x, y in zip(a, b)]
        if isinstance(f, LX):
            v = ev(f.body)
            return [v[nxt[i]] for i in range(P)]
        if isinstance(f, LF):
            return _lfp(ev(f.body), None)
        if isinstance(f, LU):
            return _lfp(ev(f.rhs), ev(f.lhs))
        if isinstance(f, LG):
            v = ev(f.body)
            cur = [True] * P
            for _ in range(P + 1):
                upd = [v[i] and cur[nxt[i]] for i in range(P)]
                if upd == cur:
                    break
                cur = upd
            return cur
        raise FormulaError(f"unknown LTL node {f!r}")

    def _lfp(goal: list[bool], hold: list[bool] | None) -> list[bool]:
        cur = [False] * P
        for _ in range(P + 1):
            upd = [goal[i] or ((hold is None or hold[i]) and cur[nxt[i]])
                   for i in range(P)]
            if upd == cur:
                break
            cur = upd
        return cur

    del states
    return ev(phi)[0]


# -- CTL via mu-translation ----------------------------------------------

@dataclass(frozen=True)
class CtlFormula:
    pass


@dataclass(frozen=True)
class CAtom(CtlFormula):
    name: str


@dataclass(frozen=True)
class CNot(CtlFormula):
    name: str


@dataclass(frozen=True)
class CAnd(CtlFormula):
    lhs: CtlFormula
    rhs: CtlFormula


@dataclass(frozen=True)
class COr(CtlFormula):
    lhs: CtlFormula
    rhs: CtlFormula


@dataclass(frozen=True)
class CUnary(CtlFormula):
    op: str  # EX AX EG AG EF AF
    body: CtlFormula


@dataclass(frozen=True)
class CUntil(CtlFormula):
    op: str  # EU AU
    lhs: CtlFormula
    rhs: CtlFormula


_CTL_UNARY = ("EX", "AX", "EG", "AG", "EF", "AF")


def parse_ctl_formula(text: str) -> CtlFormula:
    p = _FParser(_f_tokens(text))
    phi = _ctl_or(p)
    p.expect("<eof>")
    return phi


def _ctl_or(p: _FParser) -> CtlFormula:
    t = _ctl_and(p)
    while p.peek() == "\\/":
        p.next()
        t = COr(t, _ctl_and(p))
    return t


def _ctl_and(p: _FParser) -> CtlFormula:
    t = _ctl_unary(p)
    while p.peek() == "/\\":
        p.next()
        t = CAnd(t, _ctl_unary(p))
    return t


def _ctl_unary(p: _FParser) -> CtlFormula:
    tok = p.peek()
    if tok in _CTL_UNARY:
        p.next()
        return CUnary(tok, _ctl_unary(p))
    if tok in ("E", "A"):
        p.next()
        p.expect("[")
        lhs = _ctl_or(p)
        p.expect("U")
        rhs = _ctl_or(p)
        p.expect("]")
        return CUntil(tok + "U", lhs, rhs)
    if tok in ("!", "~"):
        p.next()
        return CNot(p.next())
    if tok == "(":
        p.next()
        t = _ctl_or(p)
        p.expect(")")
        return t
    if _IDENT.match(tok):
        p.next()
        return CAtom(tok)
    raise FormulaError(f"unexpected token {tok!r} in CTL formula")


def ctl_to_mu(psi: CtlFormula, depth: int = 0) -> MuFormula:
    v = f"_Z{depth}"
    if isinstance(psi, CAtom):
        return MAtom(psi.name)
    if isinstance(psi, CNot):
        return MNeg(psi.name)
    if isinstance(psi, CAnd):
        return MAnd(ctl_to_mu(psi.lhs, depth), ctl_to_mu(psi.rhs, depth))
    if isinstance(psi, COr):
        return MOr(ctl_to_mu(psi.lhs, depth), ctl_to_mu(psi.rhs, depth))
    if isinstance(psi, CUnary):
        b = ctl_to_mu(psi.body, depth + 1)
        if psi.op == "EX":
            return MDia(b)
        if psi.op == "AX":
            return MBox(b)
        if psi.op == "EG":
            return MNu(v, MAnd(b, MDia(MVar(v))))
        if psi.op == "AG":
            return MNu(v, MAnd(b, MBox(MVar(v))))
        if psi.op == "EF":
            return MMu(v, MOr(b, MDia(MVar(v))))
        if psi.op == "AF":
            return MMu(v, MOr(b, MBox(MVar(v))))
    if isinstance(psi, CUntil):
        l = ctl_to_mu(psi.lhs, depth + 1)
        r = ctl_to_mu(psi.rhs, depth + 1)
        step = MDia(MVar(v)) if psi.op == "EU" else MBox(MVar(v))
        return MMu(v, MOr(r, MAnd(l, step)))
    raise FormulaError(f"unknown CTL node {psi!r}")


def ctl_eval(M: KripkeStructure, psi: CtlFormula) -> frozenset[str]:
    if not M.is_total():
        missing = sorted(s for s in M.states if not M.successors(s))
        raise TotalityError(
            f"states without successors: {', '.join(missing)}")
    return mc_mu(M, ctl_to_mu(psi))


# -- random formula generation (used by the demo and tests) --------------

def gen_mu_formula(rng: random.Random, atoms: list[str], size: int,
                   bound: tuple[str, ...] = ()) -> MuFormula:
    """A random closed formula of the given size budget."""
    if size <= 1:
        leaves: list[MuFormula] = [MAtom(rng.choice(atoms)),
                                   MNeg(rng.choice(atoms))]
        if bound:
            leaves.append(MVar(rng.choice(bound)))
        return rng.choice(leaves)
    choices = ["dia", "box", "mu", "nu"]
    if size >= 3:
        choices += ["and", "or"]
    kind = rng.choice(choices)
    if kind in ("and", "or"):
        left = rng.randint(1, size - 2)
        l = gen_mu_formula(rng, atoms, left, bound)
        r = gen_mu_formula(rng, atoms, size - 1 - left, bound)
        return MAnd(l, r) if kind == "and" else MOr(l, r)
    if kind in ("dia", "box"):
        b = gen_mu_formula(rng, atoms, size - 1, bound)
        return MDia(b) if kind == "dia" else MBox(b)
    v = f"X{len(bound)}"
    b = gen_mu_formula(rng, atoms, size - 1, bound + (v,))
    return MMu(v, b) if kind == "mu" else MNu(v, b)


# -- separation demo -----------------------------------------------------

@dataclass(frozen=True)
class SeparationReport:
    underlying_equal: bool
    phi_m1: bool
    phi_m2: bool
    tau0: str
    samples_total: int
    samples_agreeing: int

    @property
    def ok(self) -> bool:
        return (self.underlying_equal and not self.phi_m1 and self.phi_m2
                and self.samples_agreeing == self.samples_total)


def separation_demo(samples: int = 200, seed: int = 7):
    """Two set-model instances over one skeleton, distinguished only by a
    knowledge fibre.  Returns (m1, m2, phi_description, report)."""
    from . import setmodel

    m1, m2, tau0 = setmodel.separation_instances()
    skel1, skel2 = m1.skeleton, m2.skeleton
    underlying_equal = skel1.to_dict() == skel2.to_dict()

    phi_m1 = not setmodel.is_failed(m1.presheaves["K"], tau0)
    phi_m2 = not setmodel.is_failed(m2.presheaves["K"], tau0)

    rng = random.Random(seed)
    atoms = sorted(skel1.valuation) or ["p"]
    agree = 0
    for _ in range(samples):
        phi = gen_mu_formula(rng, atoms, rng.randint(1, 6))
        if mc_mu(skel1, phi) == mc_mu(skel2, phi):
            agree += 1
    report = SeparationReport(underlying_equal, phi_m1, phi_m2, tau0,
                              samples, agree)
    phi_desc = f"exists k : KF({tau0}) . top"
    return m1, m2, phi_desc, report
