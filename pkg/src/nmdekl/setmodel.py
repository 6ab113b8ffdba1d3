"""Finite Set-valued presheaf semantics over trajectory categories.

Trace nodes are bounded unrollings of a Kripke skeleton; arrows extend a
trace by one labelled step.  A presheaf assigns each node a finite fibre
and each arrow a restriction function mapping the extended fibre back to
the base fibre.  Failure at a node is an empty fibre.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .mulogic import KripkeStructure, LassoTrace


class FragmentError(Exception):
    """A term fell outside the finitely evaluable fragment."""


class DepthError(Exception):
    pass


# -- trajectory categories -----------------------------------------------

def node_id(states: list[str], events: list[str]) -> str:
    parts = [states[0]]
    for e, s in zip(events, states[1:]):
        parts += [e, s]
    return ".".join(parts)


def extend_node(node: str, event: str, state: str) -> str:
    return f"{node}.{event}.{state}"


@dataclass(frozen=True)
class TraceCategory:
    objects: tuple[str, ...]
    generators: tuple[tuple[str, str, str], ...]  # (source, target, label)

    def out_arrows(self, obj: str):
        return [g for g in self.generators if g[0] == obj]

    def paths(self, bound: int):
        """All composable generator paths of length 1..bound, as tuples
        ordered source-to-target."""
        by_src: dict[str, list] = {}
        for g in self.generators:
            by_src.setdefault(g[0], []).append(g)
        out = [(g,) for g in self.generators]
        frontier = out[:]
        for _ in range(bound - 1):
            nxt = []
            for p in frontier:
                for g in by_src.get(p[-1][1], []):
                    nxt.append(p + (g,))
            if not nxt:
                break
            out.extend(nxt)
            frontier = nxt
        return out

    @classmethod
    def from_kripke(cls, skeleton: KripkeStructure,
                    events: dict[tuple[str, str], str] | None = None,
                    bound: int = 8) -> "TraceCategory":
        events = events or {}

        def label(a: str, b: str) -> str:
            return events.get((a, b), f"{a}>{b}")

        objects: list[str] = []
        generators: list[tuple[str, str, str]] = []
        for root in skeleton.states:
            frontier = [(root, root, 0)]
            while frontier:
                node, state, depth = frontier.pop()
                if node not in objects:
                    objects.append(node)
                if depth >= bound:
                    continue
                for nxt in sorted(skeleton.successors(state)):
                    e = label(state, nxt)
                    child = extend_node(node, e, nxt)
                    arrow = (node, child, e)
                    if arrow not in generators:
                        generators.append(arrow)
                    frontier.append((child, nxt, depth + 1))
        return cls(tuple(sorted(objects)), tuple(sorted(generators)))


# -- presheaves ----------------------------------------------------------

def _arrow_key(g: tuple[str, str, str]) -> str:
    return f"{g[0]}|{g[2]}|{g[1]}"


@dataclass(frozen=True)
class Presheaf:
    fibres: dict[str, tuple[str, ...]]
    restrictions: dict[tuple[str, str, str], dict[str, str]]
    # optional explicit entries for composite paths, keyed by the arrow
    # sequence; lets functor-law violations be injected for testing
    composites: dict[tuple[tuple[str, str, str], ...], dict[str, str]] = \
        field(default_factory=dict)

    def fibre(self, obj: str) -> tuple[str, ...]:
        if obj not in self.fibres:
            raise KeyError(f"unknown object {obj!r}")
        return self.fibres[obj]

    def to_data(self) -> dict:
        return {
            "fibres": {o: list(v) for o, v in sorted(self.fibres.items())},
            "restrictions": {_arrow_key(g): dict(sorted(m.items()))
                             for g, m in sorted(self.restrictions.items())},
        }

    @classmethod
    def from_data(cls, d: dict) -> "Presheaf":
        restr = {}
        for key, m in d.get("restrictions", {}).items():
            src, label, dst = key.split("|")
            restr[(src, dst, label)] = dict(m)
        return cls({o: tuple(v) for o, v in d["fibres"].items()}, restr)


@dataclass(frozen=True)
class FunctorViolation:
    path: tuple
    element: str
    expected: str
    actual: str


@dataclass(frozen=True)
class FunctorReport:
    ok: bool
    violations: tuple[FunctorViolation, ...] = ()
    problems: tuple[str, ...] = ()


def check_functor_laws(K: Presheaf, T: TraceCategory,
                       bound: int = 8) -> FunctorReport:
    problems: list[str] = []
    violations: list[FunctorViolation] = []
    for g in T.generators:
        src, dst, _ = g
        m = K.restrictions.get(g)
        if m is None:
            problems.append(f"missing restriction for arrow {g}")
            continue
        if set(m) != set(K.fibres.get(dst, ())):
            problems.append(f"restriction for {g} is not total on the fibre")
            continue
        if not set(m.values()) <= set(K.fibres.get(src, ())):
            problems.append(f"restriction for {g} leaves the base fibre")
    if problems:
        return FunctorReport(False, (), tuple(problems))
    for path, m in K.composites.items():
        target = path[-1][1]
        for x in K.fibre(target):
            expected = restrict_apply(K, list(path), x)
            actual = m.get(x)
            if actual != expected:
                violations.append(FunctorViolation(path, x, expected,
                                                   actual if actual is not None
                                                   else "<missing>"))
    # composition of generator maps is associative by construction; verify
    # explicitly on all two-step paths against stepwise application
    for p in T.paths(min(bound, 2)):
        if len(p) != 2:
            continue
        g1, g2 = p
        for x in K.fibre(g2[1]):
            stepwise = K.restrictions[g1][K.restrictions[g2][x]]
            composed = restrict_apply(K, [g1, g2], x)
            if stepwise != composed:
                violations.append(FunctorViolation(p, x, stepwise, composed))
    return FunctorReport(not violations, tuple(violations))


def is_failed(K: Presheaf, obj: str) -> bool:
    return len(K.fibre(obj)) == 0


def restrict_apply(K: Presheaf, path, x: str) -> str:
    """Apply the composed restriction along a source-to-target path to an
    element of the target fibre.  The empty path is the identity."""
    if path and x not in K.fibre(path[-1][1]):
        raise ValueError(f"{x!r} not in the fibre of {path[-1][1]!r}")
    for g in reversed(list(path)):
        x = K.restrictions[g][x]
    return x


@dataclass(frozen=True)
class FailureReport:
    empty_fibres: tuple[str, ...]
    permanently_failed: tuple[str, ...]


def failure_propagation_check(K: Presheaf, T: TraceCategory) -> FailureReport:
    """Empty fibres never yield elements under restriction (vacuous, but
    asserted); an object fails permanently when its fibre and every
    reachable extension fibre are empty."""
    for g in T.generators:
        src, dst, _ = g
        if is_failed(K, dst):
            assert not [x for x in K.fibre(dst)], "empty fibre yielded data"
    empty = tuple(sorted(o for o in T.objects if is_failed(K, o)))

    reach: dict[str, set[str]] = {o: set() for o in T.objects}
    for o in T.objects:
        frontier = [o]
        while frontier:
            cur = frontier.pop()
            for g in T.out_arrows(cur):
                if g[1] not in reach[o]:
                    reach[o].add(g[1])
                    frontier.append(g[1])
    permanent = tuple(sorted(
        o for o in empty
        if all(is_failed(K, e) for e in reach[o])))
    return FailureReport(empty, permanent)


# -- inverse limits ------------------------------------------------------

def k_infty_chain(K: Presheaf, nodes: list[str],
                  arrows: list[tuple[str, str, str]]) -> list[tuple[str, ...]]:
    """All restriction-compatible families along an object chain:
    tuples (k0..kd) with res(k_{i+1}) = k_i."""
    if len(arrows) != len(nodes) - 1:
        raise ValueError("need one arrow per consecutive node pair")
    families: list[tuple[str, ...]] = [(k,) for k in K.fibre(nodes[0])]
    for i, arrow in enumerate(arrows):
        extended = []
        for fam in families:
            for k in K.fibre(nodes[i + 1]):
                if K.restrictions[arrow][k] == fam[-1]:
                    extended.append(fam + (k,))
        families = extended
    return families


def k_infty(K: Presheaf, T: TraceCategory, pi: LassoTrace, depth: int,
            events: dict[tuple[str, str], str] | None = None
            ) -> list[tuple[str, ...]]:
    """Compatible families over the first ``depth`` extensions of a lasso's
    unrolling, using the trace nodes of the derived category."""
    events = events or {}
    nodes = [pi.state_at(0)]
    arrows: list[tuple[str, str, str]] = []
    for i in range(depth):
        a, b = pi.state_at(i), pi.state_at(i + 1)
        label = events.get((a, b), f"{a}>{b}")
        nxt = extend_node(nodes[-1], label, b)
        arrow = (nodes[-1], nxt, label)
        if nxt not in T.objects or arrow not in T.generators:
            raise DepthError(
                f"depth {depth} exceeds the category's morphism bound")
        nodes.append(nxt)
        arrows.append(arrow)
    return k_infty_chain(K, nodes, arrows)


# -- model instances -----------------------------------------------------

@dataclass(frozen=True)
class SetModelInstance:
    skeleton: KripkeStructure
    category: TraceCategory
    presheaves: dict[str, Presheaf]
    carriers: dict[str, tuple[str, ...]] = field(default_factory=dict)
    assignments: dict[str, object] = field(default_factory=dict)
    events: dict[tuple[str, str], str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = self.skeleton.to_dict()
        d["presheaves"] = {name: K.to_data()
                           for name, K in sorted(self.presheaves.items())}
        d["carriers"] = {n: list(v) for n, v in sorted(self.carriers.items())}
        if self.events:
            d["events"] = {f"{a},{b}": e
                           for (a, b), e in sorted(self.events.items())}
        if self.assignments:
            d["assignments"] = dict(sorted(
                (k, v) for k, v in self.assignments.items()
                if isinstance(v, (str, int, bool))))
        return d

    @classmethod
    def from_dict(cls, d: dict, bound: int = 8) -> "SetModelInstance":
        skel = KripkeStructure.from_dict(d)
        events = {}
        for key, e in d.get("events", {}).items():
            a, b = key.split(",")
            events[(a, b)] = e
        cat = TraceCategory.from_kripke(skel, events, bound)
        sheaves = {name: Presheaf.from_data(pd)
                   for name, pd in d.get("presheaves", {}).items()}
        carriers = {n: tuple(v) for n, v in d.get("carriers", {}).items()}
        return cls(skel, cat, sheaves, carriers,
                   dict(d.get("assignments", {})), events)

    def dump(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str, bound: int = 8) -> "SetModelInstance":
        with open(path) as fh:
            return cls.from_dict(json.load(fh), bound)


@dataclass(frozen=True)
class CausalChain:
    start: str
    steps: tuple[tuple[str, str], ...]  # (event, state) pairs


def causal_chain_check(instance: SetModelInstance, chain: CausalChain) -> bool:
    cur = chain.start
    if cur not in instance.skeleton.states:
        return False
    for event, nxt in chain.steps:
        if (cur, nxt) not in instance.skeleton.transitions:
            return False
        expected = instance.events.get((cur, nxt), f"{cur}>{nxt}")
        if event != expected:
            return False
        cur = nxt
    return True


# -- canned constructions ------------------------------------------------

def enrichment_example() -> tuple[TraceCategory, Presheaf]:
    """Two objects, one arrow; the extended fibre is strictly larger than
    the base fibre and the restriction is constant."""
    m = ("tau", "tau'", "m")
    T = TraceCategory(("tau", "tau'"), (m,))
    K = Presheaf({"tau": ("0",), "tau'": ("0", "1")},
                 {m: {"0": "0", "1": "0"}})
    return T, K


def separation_instances() -> tuple[SetModelInstance, SetModelInstance, str]:
    """Two instances over one skeleton differing only in the knowledge
    fibre at the maximal trace node tau0."""
    skel = KripkeStructure(("s0", "s1"), frozenset({("s0", "s1")}),
                           {"p": frozenset({"s1"})})
    events = {("s0", "s1"): "go"}
    cat = TraceCategory.from_kripke(skel, events)
    tau0 = extend_node("s0", "go", "s1")
    arrow = ("s0", tau0, "go")
    assert tau0 in cat.objects and arrow in cat.generators

    base_fibres = {o: ("*",) for o in cat.objects}
    f1 = dict(base_fibres)
    f1[tau0] = ()
    k1 = Presheaf(f1, {arrow: {}})
    k2 = Presheaf(dict(base_fibres), {arrow: {"*": "*"}})
    common = dict(carriers={"Nat": ("z", "sz")},
                  assignments={"s0": "s0", "s1": "s1", "go": "go"},
                  events=events)
    m1 = SetModelInstance(skel, cat, {"K": k1}, **common)
    m2 = SetModelInstance(skel, cat, {"K": k2}, **common)
    return m1, m2, tau0


def restriction_equivalence_check(K: Presheaf, T: TraceCategory) -> bool:
    """Presheaf data -> restriction-structure form -> presheaf is the
    identity on all data."""
    report = check_functor_laws(K, T)
    if not report.ok:
        return False
    data = K.to_data()
    back = Presheaf.from_data(data)
    return back.fibres == K.fibres and back.restrictions == K.restrictions


# -- term evaluation -----------------------------------------------------

@dataclass(frozen=True)
class FuncTable:
    pairs: tuple[tuple[object, object], ...]

    def apply(self, x):
        for a, b in self.pairs:
            if a == x:
                return b
        raise FragmentError(f"function table has no entry for {x!r}")


_MAX_CARRIER = 16


def eval_term(instance: SetModelInstance, env: tuple, t,
              defs: dict | None = None, presheaf: str = "K"):
    """Interpret a term in the finite model.  Types evaluate to frozensets
    of values, Prop formulas to booleans, functions to tables, extension
    evidence to generator paths."""
    from . import terms as T

    K = instance.presheaves.get(presheaf)
    skel = instance.skeleton

    def ev(t, env, penv=()):
        if isinstance(t, T.Var):
            if t.index >= len(env):
                raise FragmentError(f"unbound variable #{t.index}")
            return env[len(env) - 1 - t.index]
        if isinstance(t, T.PropVar):
            return penv[len(penv) - 1 - t.index]
        if isinstance(t, T.Const):
            if defs and t.name in defs:
                return ev(defs[t.name], (), ())
            if t.name in instance.assignments:
                return instance.assignments[t.name]
            raise FragmentError(f"constant {t.name!r} has no model value")
        if isinstance(t, T.Atom):
            if t.arg is None:
                # bare names from the term parser: fall back to the
                # instance's assignment table
                if t.name in instance.assignments:
                    return instance.assignments[t.name]
                raise FragmentError(f"atom {t.name!r} needs a state argument")
            return ev(t.arg, env, penv) in skel.atom_set(t.name)
        if isinstance(t, T.Base):
            if t.name == "State":
                return frozenset(skel.states)
            if t.name == "Event":
                labels = set(instance.events.values())
                labels.update(f"{a}>{b}" for a, b in skel.transitions
                              if (a, b) not in instance.events)
                return frozenset(labels)
            if t.name == "FinTrace":
                return frozenset(instance.category.objects)
            if t.name in instance.carriers:
                return frozenset(instance.carriers[t.name])
            raise FragmentError(f"no carrier for base type {t.name}")
        if isinstance(t, T.Sort):
            if t.layer == T.PROP:
                return frozenset({True, False})
            raise FragmentError("universes are not finitely enumerable")
        if isinstance(t, T.Top):
            return True
        if isinstance(t, T.Bot):
            return False
        if isinstance(t, (T.And, T.Or, T.Imp)):
            a, b = ev(t.lhs, env, penv), ev(t.rhs, env, penv)
            if isinstance(t, T.And):
                return a and b
            if isinstance(t, T.Or):
                return a or b
            return (not a) or b
        if isinstance(t, (T.Forall, T.Exists)):
            dom = ev(t.dom, env, penv)
            vals = [ev(t.body, env + (d,), penv) for d in sorted(dom, key=repr)]
            return all(vals) if isinstance(t, T.Forall) else any(vals)
        if isinstance(t, (T.Mu, T.Nu)):
            cur = isinstance(t, T.Nu)
            for _ in range(3):
                nxt = ev(t.body, env, penv + (cur,))
                if nxt == cur:
                    return cur
                cur = nxt
            return cur
        if isinstance(t, (T.Fold, T.NuIn, T.Unfold, T.NuOut)):
            return ev(t.arg, env, penv)
        if isinstance(t, T.Pi):
            dom = ev(t.dom, env, penv)
            if len(dom) > _MAX_CARRIER:
                raise FragmentError("Pi domain carrier too large to tabulate")
            dom_sorted = sorted(dom, key=repr)
            cods = [sorted(ev(t.cod, env + (d,), penv), key=repr)
                    for d in dom_sorted]
            tables = set()
            for combo in itertools.product(*cods) if dom_sorted else [()]:
                tables.add(FuncTable(tuple(zip(dom_sorted, combo))))
            return frozenset(tables)
        if isinstance(t, T.Lam):
            dom = ev(t.dom, env, penv)
            if len(dom) > _MAX_CARRIER:
                raise FragmentError("lambda domain carrier too large")
            pairs = tuple((d, ev(t.body, env + (d,), penv))
                          for d in sorted(dom, key=repr))
            return FuncTable(pairs)
        if isinstance(t, T.App):
            fn = ev(t.fn, env, penv)
            if not isinstance(fn, FuncTable):
                raise FragmentError("applied a non-table value")
            return fn.apply(ev(t.arg, env, penv))
        if isinstance(t, T.Nil):
            node = ev(t.state, env, penv)
            if node not in instance.category.objects:
                raise FragmentError(f"trace node {node!r} outside the bound")
            return node
        if isinstance(t, T.StepTrace):
            parent = ev(t.trace, env, penv)
            node = extend_node(parent, ev(t.event, env, penv),
                               ev(t.state, env, penv))
            if node not in instance.category.objects:
                raise FragmentError(f"trace node {node!r} outside the bound")
            return node
        if isinstance(t, T.KF):
            if K is None:
                raise FragmentError("instance has no knowledge presheaf")
            return frozenset(K.fibre(ev(t.trace, env, penv)))
        if isinstance(t, T.ExtT):
            a, b = ev(t.base, env, penv), ev(t.ext, env, penv)
            path = _node_path(instance.category, a, b)
            return frozenset({tuple(path)}) if path is not None else frozenset()
        if isinstance(t, (T.ExtId, T.ExtChk, T.ExtComp)):
            return tuple(_eval_evidence(t, env, penv))
        if isinstance(t, T.Restrict):
            path = list(ev(t.evidence, env, penv))
            return restrict_apply(K, path, ev(t.knowledge, env, penv))
        if isinstance(t, T.IdT):
            a, b = ev(t.lhs, env, penv), ev(t.rhs, env, penv)
            return frozenset({"refl"}) if a == b else frozenset()
        if isinstance(t, T.Refl):
            ev(t.arg, env, penv)
            return "refl"
        if isinstance(t, T.J):
            fn = ev(t.base, env, penv)
            if isinstance(fn, FuncTable):
                return fn.apply(ev(t.lhs, env, penv))
            raise FragmentError("J motive base is not a function table")
        raise FragmentError(
            f"{type(t).__name__} is outside the evaluable fragment")

    def _eval_evidence(t, env, penv):
        from . import terms as T
        if isinstance(t, T.ExtId):
            return []
        if isinstance(t, T.ExtComp):
            inner = list(ev(t.inner, env, penv))
            outer = list(ev(t.outer, env, penv))
            return inner + outer
        if isinstance(t, T.ExtChk):
            a, b = ev(t.base, env, penv), ev(t.ext, env, penv)
            path = _node_path(instance.category, a, b)
            if path is None:
                raise FragmentError(f"no extension path {a!r} -> {b!r}")
            return path
        raise FragmentError("not extension evidence")

    return ev(t, tuple(env), ())


def _node_path(cat: TraceCategory, a: str, b: str):
    """Generator path from node a to node b, or None."""
    if a == b:
        return []
    for g in cat.out_arrows(a):
        rest = _node_path(cat, g[1], b)
        if rest is not None:
            return [g] + rest
    return None
