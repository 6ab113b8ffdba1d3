"""Concrete syntax for terms and theory files, with a pretty-printer.

Grammar sketch (binders weakest, application strongest):

    term   := 'fun' '(' x ':' term ')' '=>' term
            | ('Pi')? '(' x ':' term ')' '->' term
            | 'forall' '(' x ':' term ')' '.' term
            | 'exists' '(' x ':' term ')' '.' term
            | 'mu' X '.' term | 'nu' X '.' term | 'cofix' f '.' term
            | imp
    imp    := or ('->' imp)?
    or     := and ('\\/' and)*
    and    := unary ('/\\' unary)*
    unary  := 'dia' unary | 'box' unary | app
    app    := atom atom*
    atom   := '(' term ')' | constant | keyword-call | IDENT

Line comments start with ``--``.  Unicode aliases are accepted for
lambda, Pi, mu, nu, dia and box.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .terms import (
    And, App, Atom, Base, Bot, Box, Cofix, Const, Dia, Exists, ExtChk,
    ExtComp, ExtId, ExtT, Fold, Forall, Head, IdT, Imp, J, KF, KInf, Lam,
    Mu, Nil, Nu, NuIn, NuOut, Obs, Or, Pi, PropVar, Refl, Restrict, Sort,
    StepRel, StepTrace, Tail, Term, Top, Unfold, Var, PROP, TYPEL, UC,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, expected: frozenset[str] = frozenset()):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.expected = expected


_UNICODE_ALIASES = {
    "λ": "fun",   # lambda
    "Π": "Pi",
    "μ": "mu",
    "ν": "nu",
    "◇": "dia",
    "□": "box",
}

KEYWORDS = {
    "fun", "Pi", "mu", "nu", "cofix", "forall", "exists",
    "nil", "step", "obs", "head", "tail",
    "Ext", "ext_id", "ext_comp", "ext", "KF", "KInf", "restrict",
    "Id", "refl", "J",
    "fold", "unfold", "nu_in", "nu_out",
    "dia", "box", "top", "bot",
    "State", "Event", "Nat", "FinTrace", "InfTrace", "Prop", "Step",
    "axiom", "def", "check", "checkeq",
}

_PUNCT = ["=>", "->", ":=", "/\\", "\\/", "(", ")", ",", ":", ".", "="]

_TOKEN_RE = re.compile(
    "|".join([re.escape(p) for p in _PUNCT] + [r"[A-Za-z_][A-Za-z0-9_']*"])
)


@dataclass
class Token:
    kind: str       # punct text, "IDENT", keyword text, or "EOF"
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Token]:
    for uni, ascii_kw in _UNICODE_ALIASES.items():
        src = src.replace(uni, f" {ascii_kw} ")
    tokens: list[Token] = []
    for lineno, line in enumerate(src.split("\n"), start=1):
        cut = line.find("--")
        if cut >= 0:
            line = line[:cut]
        pos = 0
        while pos < len(line):
            if line[pos].isspace():
                pos += 1
                continue
            m = _TOKEN_RE.match(line, pos)
            if not m:
                raise ParseError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
            text = m.group(0)
            if text in _PUNCT or text in KEYWORDS:
                kind = text
            else:
                kind = "IDENT"
            tokens.append(Token(kind, text, lineno, pos + 1))
            pos = m.end()
    last_line = src.count("\n") + 1
    tokens.append(Token("EOF", "", last_line, 1))
    return tokens


_SORT_RE = re.compile(r"^(Uc|TypeL)(\d+)$")


class _Parser:
    def __init__(self, tokens: list[Token], declared: frozenset[str], theory_mode: bool,
                 declared_later: frozenset[str] = frozenset()):
        self.tokens = tokens
        self.pos = 0
        self.declared = set(declared)
        self.declared_later = set(declared_later)
        self.theory_mode = theory_mode
        self.vars: list[str] = []      # ordinary binder names, innermost last
        self.pvars: list[str] = []     # predicate binder names, innermost last

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                f"expected {kind!r}, found {tok.text or 'end of input'!r}",
                tok.line, tok.col, frozenset({kind}))
        return self.next()

    def fail(self, message: str, expected=frozenset()):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col, frozenset(expected))

    # -- binder helpers --------------------------------------------------

    def _binder_group(self):
        self.expect("(")
        name = self.expect("IDENT").text
        self.expect(":")
        ty = self.term()
        self.expect(")")
        return name, ty

    def _with_var(self, name: str, parse):
        self.vars.append(name)
        try:
            return parse()
        finally:
            self.vars.pop()

    def _with_pvar(self, name: str, parse):
        self.pvars.append(name)
        try:
            return parse()
        finally:
            self.pvars.pop()

    # -- grammar ---------------------------------------------------------

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind == "fun":
            self.next()
            name, ty = self._binder_group()
            self.expect("=>")
            body = self._with_var(name, self.term)
            return Lam(ty, body, hint=name)
        if tok.kind == "Pi":
            self.next()
            return self._pi()
        if tok.kind == "(" and self.peek(1).kind == "IDENT" and self.peek(2).kind == ":":
            return self._pi()
        if tok.kind in ("forall", "exists"):
            self.next()
            name, ty = self._binder_group()
            self.expect(".")
            body = self._with_var(name, self.term)
            cls = Forall if tok.kind == "forall" else Exists
            return cls(ty, body, hint=name)
        if tok.kind in ("mu", "nu"):
            self.next()
            name = self.expect("IDENT").text
            self.expect(".")
            body = self._with_pvar(name, self.term)
            return (Mu if tok.kind == "mu" else Nu)(body, hint=name)
        if tok.kind == "cofix":
            self.next()
            name = self.expect("IDENT").text
            self.expect(".")
            body = self._with_var(name, self.term)
            return Cofix(body, hint=name)
        return self.imp()

    def _pi(self) -> Term:
        name, ty = self._binder_group()
        self.expect("->")
        cod = self._with_var(name, self.term)
        return Pi(ty, cod, hint=name)

    def imp(self) -> Term:
        lhs = self.or_()
        if self.peek().kind == "->":
            self.next()
            # right side is a full term: implication chains right and may
            # end in a binder form such as a Pi
            return Imp(lhs, self.term())
        return lhs

    def or_(self) -> Term:
        t = self.and_()
        while self.peek().kind == "\\/":
            self.next()
            t = Or(t, self.and_())
        return t

    def and_(self) -> Term:
        t = self.unary()
        while self.peek().kind == "/\\":
            self.next()
            t = And(t, self.unary())
        return t

    def unary(self) -> Term:
        tok = self.peek()
        if tok.kind == "dia":
            self.next()
            return Dia(self.unary())
        if tok.kind == "box":
            self.next()
            return Box(self.unary())
        return self.app()

    _ATOM_START = {"(", "IDENT", "top", "bot", "State", "Event", "Nat",
                   "FinTrace", "InfTrace", "Prop", "nil", "step", "obs",
                   "head", "tail", "Ext", "ext_id", "ext_comp", "ext", "KF",
                   "KInf", "restrict", "Id", "refl", "J", "fold", "unfold",
                   "nu_in", "nu_out", "Step"}

    def app(self) -> Term:
        t = self.atom()
        while True:
            nxt = self.peek()
            if nxt.kind == "(" and self.peek(1).kind == "IDENT" and self.peek(2).kind == ":":
                break  # a Pi binder group never continues an application
            if nxt.kind in self._ATOM_START:
                t = App(t, self.atom())
            else:
                return t
        return t

    _CALLS = {
        "nil": (Nil, 1), "step": (StepTrace, 3), "obs": (Obs, 3),
        "head": (Head, 1), "tail": (Tail, 1),
        "Ext": (ExtT, 2), "ext_id": (ExtId, 1), "ext_comp": (ExtComp, 2),
        "ext": (ExtChk, 2), "KF": (KF, 1), "KInf": (KInf, 1),
        "restrict": (Restrict, 2), "Id": (IdT, 3), "refl": (Refl, 1),
        "J": (J, 5), "fold": (Fold, 1), "unfold": (Unfold, 1),
        "nu_in": (NuIn, 1), "nu_out": (NuOut, 1), "Step": (StepRel, 3),
    }

    _CONSTANTS = {
        "top": Top(), "bot": Bot(),
        "State": Base("State"), "Event": Base("Event"), "Nat": Base("Nat"),
        "FinTrace": Base("FinTrace"), "InfTrace": Base("InfTrace"),
        "Prop": Sort(PROP),
    }

    def atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "(":
            self.next()
            t = self.term()
            self.expect(")")
            return t
        if tok.kind in self._CONSTANTS:
            self.next()
            return self._CONSTANTS[tok.kind]
        if tok.kind in self._CALLS:
            self.next()
            cls, arity = self._CALLS[tok.kind]
            self.expect("(")
            args = [self.term()]
            while len(args) < arity:
                self.expect(",")
                args.append(self.term())
            self.expect(")")
            return cls(*args)
        if tok.kind == "IDENT":
            self.next()
            return self._resolve(tok)
        self.fail(f"expected a term, found {tok.text or 'end of input'!r}",
                  self._ATOM_START)

    def _resolve(self, tok: Token) -> Term:
        name = tok.text
        m = _SORT_RE.match(name)
        if m:
            return Sort(UC if m.group(1) == "Uc" else TYPEL, int(m.group(2)))
        for depth, bound in enumerate(reversed(self.vars)):
            if bound == name:
                return Var(depth)
        for depth, bound in enumerate(reversed(self.pvars)):
            if bound == name:
                return PropVar(depth)
        if name in self.declared:
            return Const(name)
        if name.endswith("_at") and self.peek().kind == "(" and len(name) > 3:
            self.next()
            arg = self.term()
            self.expect(")")
            return Atom(name[:-3], arg)
        if self.theory_mode and name in self.declared_later:
            raise ParseError(f"forward reference to {name!r}",
                             tok.line, tok.col)
        # unknown names parse as atoms; the theory checker reports them
        return Atom(name)


def parse_term(text: str, declared: frozenset[str] = frozenset()) -> Term:
    parser = _Parser(tokenize(text), declared, theory_mode=False)
    t = parser.term()
    parser.expect("EOF")
    return t


# -- theory files --------------------------------------------------------

@dataclass(frozen=True)
class Axiom:
    name: str
    type: Term


@dataclass(frozen=True)
class Definition:
    name: str
    type: Term
    body: Term


@dataclass(frozen=True)
class CheckType:
    term: Term
    type: Term


@dataclass(frozen=True)
class CheckEq:
    lhs: Term
    rhs: Term


Declaration = Axiom | Definition | CheckType | CheckEq


@dataclass(frozen=True)
class Theory:
    declarations: tuple[Declaration, ...]
    positions: tuple[tuple[int, int], ...] = field(default=(), compare=False)


def parse_theory(text: str) -> Theory:
    tokens = tokenize(text)
    later = frozenset(
        tokens[i + 1].text for i in range(len(tokens) - 1)
        if tokens[i].kind in ("axiom", "def") and tokens[i + 1].kind == "IDENT")
    parser = _Parser(tokens, frozenset(), theory_mode=True,
                     declared_later=later)
    decls: list[Declaration] = []
    positions: list[tuple[int, int]] = []
    while parser.peek().kind != "EOF":
        tok = parser.peek()
        positions.append((tok.line, tok.col))
        if tok.kind == "axiom":
            parser.next()
            name_tok = parser.expect("IDENT")
            _check_fresh(parser, name_tok)
            parser.expect(":")
            ty = parser.term()
            parser.declared.add(name_tok.text)
            decls.append(Axiom(name_tok.text, ty))
        elif tok.kind == "def":
            parser.next()
            name_tok = parser.expect("IDENT")
            _check_fresh(parser, name_tok)
            parser.expect(":")
            ty = parser.term()
            parser.expect(":=")
            body = parser.term()
            parser.declared.add(name_tok.text)
            decls.append(Definition(name_tok.text, ty, body))
        elif tok.kind == "check":
            parser.next()
            term = parser.term()
            parser.expect(":")
            ty = parser.term()
            decls.append(CheckType(term, ty))
        elif tok.kind == "checkeq":
            parser.next()
            lhs = parser.term()
            parser.expect("=")
            rhs = parser.term()
            decls.append(CheckEq(lhs, rhs))
        else:
            parser.fail(
                f"expected a declaration, found {tok.text!r}",
                {"axiom", "def", "check", "checkeq"})
    return Theory(tuple(decls), tuple(positions))


def _check_fresh(parser: _Parser, name_tok: Token) -> None:
    if name_tok.text in parser.declared:
        raise ParseError(f"duplicate name {name_tok.text!r}",
                         name_tok.line, name_tok.col)


# -- pretty printing -----------------------------------------------------

_PREC_TERM = 0
_PREC_IMP = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_UNARY = 4
_PREC_APP = 5
_PREC_ATOM = 6


def pretty_print(t: Term) -> str:
    taken = {n for n in _used_names(t)}
    return _Printer(taken).show(t, _PREC_TERM)


def _used_names(t: Term):
    from .terms import subterms
    for sub in subterms(t):
        if isinstance(sub, Const):
            yield sub.name
        elif isinstance(sub, Atom):
            yield sub.name


class _Printer:
    def __init__(self, taken: set[str]):
        self.taken = set(taken) | KEYWORDS
        self.vars: list[str] = []
        self.pvars: list[str] = []

    def fresh(self, hint: str) -> str:
        base = hint if hint and hint.isidentifier() else "x"
        if _SORT_RE.match(base) or base.endswith("_at"):
            base = "x"
        name = base
        n = 0
        scope = set(self.vars) | set(self.pvars) | self.taken
        while name in scope:
            n += 1
            name = f"{base}{n}"
        return name

    def show(self, t: Term, prec: int) -> str:
        s, p = self._render(t)
        return f"({s})" if p < prec else s

    def _binder(self, hint, stack, inner):
        name = self.fresh(hint)
        stack.append(name)
        try:
            return name, inner()
        finally:
            stack.pop()

    def _render(self, t: Term) -> tuple[str, int]:
        A = _PREC_ATOM
        if isinstance(t, Var):
            if t.index < len(self.vars):
                return self.vars[len(self.vars) - 1 - t.index], A
            return f"_v{t.index - len(self.vars)}", A
        if isinstance(t, PropVar):
            if t.index < len(self.pvars):
                return self.pvars[len(self.pvars) - 1 - t.index], A
            return f"_P{t.index - len(self.pvars)}", A
        if isinstance(t, Const):
            return t.name, A
        if isinstance(t, Atom):
            if t.arg is None:
                return t.name, A
            return f"{t.name}_at({self.show(t.arg, _PREC_TERM)})", A
        if isinstance(t, Sort):
            if t.layer == PROP:
                return "Prop", A
            return f"{t.layer}{t.level}", A
        if isinstance(t, Base):
            return t.name, A
        if isinstance(t, Top):
            return "top", A
        if isinstance(t, Bot):
            return "bot", A
        if isinstance(t, Lam):
            dom = self.show(t.dom, _PREC_TERM)
            name, body = self._binder(t.hint, self.vars,
                                      lambda: self.show(t.body, _PREC_TERM))
            return f"fun ({name} : {dom}) => {body}", _PREC_TERM
        if isinstance(t, Pi):
            dom = self.show(t.dom, _PREC_TERM)
            name, cod = self._binder(t.hint, self.vars,
                                     lambda: self.show(t.cod, _PREC_IMP))
            return f"({name} : {dom}) -> {cod}", _PREC_IMP
        if isinstance(t, (Forall, Exists)):
            kw = "forall" if isinstance(t, Forall) else "exists"
            dom = self.show(t.dom, _PREC_TERM)
            name, body = self._binder(t.hint, self.vars,
                                      lambda: self.show(t.body, _PREC_TERM))
            return f"{kw} ({name} : {dom}) . {body}", _PREC_TERM
        if isinstance(t, (Mu, Nu)):
            kw = "mu" if isinstance(t, Mu) else "nu"
            name, body = self._binder(t.hint, self.pvars,
                                      lambda: self.show(t.body, _PREC_TERM))
            return f"{kw} {name} . {body}", _PREC_TERM
        if isinstance(t, Cofix):
            name, body = self._binder(t.hint, self.vars,
                                      lambda: self.show(t.body, _PREC_TERM))
            return f"cofix {name} . {body}", _PREC_TERM
        if isinstance(t, App):
            fn = self.show(t.fn, _PREC_APP)
            arg = self.show(t.arg, _PREC_ATOM)
            return f"{fn} {arg}", _PREC_APP
        if isinstance(t, Imp):
            lhs = self.show(t.lhs, _PREC_OR)
            rhs = self.show(t.rhs, _PREC_IMP)
            return f"{lhs} -> {rhs}", _PREC_IMP
        if isinstance(t, Or):
            lhs = self.show(t.lhs, _PREC_OR)
            rhs = self.show(t.rhs, _PREC_AND)
            return f"{lhs} \\/ {rhs}", _PREC_OR
        if isinstance(t, And):
            lhs = self.show(t.lhs, _PREC_AND)
            rhs = self.show(t.rhs, _PREC_UNARY)
            return f"{lhs} /\\ {rhs}", _PREC_AND
        if isinstance(t, Dia):
            return f"dia {self.show(t.body, _PREC_UNARY)}", _PREC_UNARY
        if isinstance(t, Box):
            return f"box {self.show(t.body, _PREC_UNARY)}", _PREC_UNARY
        call = _CALL_SYNTAX.get(type(t))
        if call:
            kw, fields = call
            args = ", ".join(self.show(getattr(t, f), _PREC_TERM) for f in fields)
            return f"{kw}({args})", A
        raise TypeError(f"unprintable term {t!r}")


_CALL_SYNTAX: dict[type, tuple[str, tuple[str, ...]]] = {
    Nil: ("nil", ("state",)),
    StepTrace: ("step", ("trace", "event", "state")),
    Obs: ("obs", ("state", "event", "rest")),
    Head: ("head", ("trace",)),
    Tail: ("tail", ("trace",)),
    ExtT: ("Ext", ("base", "ext")),
    ExtId: ("ext_id", ("trace",)),
    ExtComp: ("ext_comp", ("outer", "inner")),
    ExtChk: ("ext", ("base", "ext")),
    KF: ("KF", ("trace",)),
    KInf: ("KInf", ("trace",)),
    Restrict: ("restrict", ("evidence", "knowledge")),
    IdT: ("Id", ("ty", "lhs", "rhs")),
    Refl: ("refl", ("arg",)),
    J: ("J", ("motive", "base", "lhs", "rhs", "proof")),
    Fold: ("fold", ("arg",)),
    Unfold: ("unfold", ("arg",)),
    NuIn: ("nu_in", ("arg",)),
    NuOut: ("nu_out", ("arg",)),
    StepRel: ("Step", ("src", "event", "dst")),
}
