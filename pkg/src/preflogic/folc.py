"""Compilation of preference-logic sentences to two-sorted first-order
logic, with a finite axiomatic theory and TPTP FOF export.

Sorts (worlds vs. individuals) are realized by the guard predicates
``world`` and ``ind``.  Every n-ary predicate P of the source signature
becomes the (1+n)-ary ``p_<name>`` taking the evaluation world first;
every index set X becomes a binary world relation ``ge_<X>`` axiomatized
as a total preorder; every distinct modal operand template gets a Skolem
selection function ``sel_<k>`` from a world and the template's parameters
to a world, constrained by membership and pairwise extensionality axioms.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from . import syntax
from .model import Assignment, PreorderModel
from .semantics import evaluate
from .syntax import And, App, Atom, Equals, Exists, Formula, Geq, Not, Signature, Var


class TranslationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# First-order syntax
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FVar:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class FApp:
    func: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.func
        return f"{self.func}({','.join(str(a) for a in self.args)})"


FTerm = FVar | FApp


@dataclass(frozen=True)
class FAtom:
    pred: str
    args: tuple = ()


@dataclass(frozen=True)
class FEq:
    left: FTerm
    right: FTerm


@dataclass(frozen=True)
class FNot:
    body: "FolFormula"


@dataclass(frozen=True)
class FAnd:
    left: "FolFormula"
    right: "FolFormula"


@dataclass(frozen=True)
class FOr:
    left: "FolFormula"
    right: "FolFormula"


@dataclass(frozen=True)
class FImplies:
    left: "FolFormula"
    right: "FolFormula"


@dataclass(frozen=True)
class FIff:
    left: "FolFormula"
    right: "FolFormula"


@dataclass(frozen=True)
class FExists:
    var: FVar
    body: "FolFormula"


@dataclass(frozen=True)
class FForall:
    var: FVar
    body: "FolFormula"


FolFormula = FAtom | FEq | FNot | FAnd | FOr | FImplies | FIff | FExists | FForall


def forall_many(variables, body: FolFormula) -> FolFormula:
    for v in reversed(list(variables)):
        body = FForall(v, body)
    return body


def conj(parts) -> FolFormula:
    parts = list(parts)
    if not parts:
        raise TranslationError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = FAnd(out, p)
    return out


WORLD_GUARD = "world"
IND_GUARD = "ind"


def pred_symbol(name: str) -> str:
    return "p_" + name.lower()


def func_symbol(name: str) -> str:
    return "f_" + name.lower()


def ge_symbol(index: frozenset[int]) -> str:
    return "ge_" + "_".join(str(i) for i in sorted(index))


# ---------------------------------------------------------------------------
# Selection-symbol inventory and translation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SelSymbol:
    """One selection function: a modal operand template together with its
    parameter variables (the operand's free variables, sorted)."""

    name: str
    template: Formula
    params: tuple[Var, ...]


@dataclass
class FolTheory:
    source: Formula
    sig: Signature
    sel_symbols: list[SelSymbol]
    axioms: list[tuple[str, FolFormula]]
    goal_var: FVar
    goal_open: FolFormula  # the translation, with goal_var free

    @property
    def goal(self) -> FolFormula:
        return FForall(self.goal_var, FImplies(FAtom(WORLD_GUARD, (self.goal_var,)),
                                               self.goal_open))


class _Translator:
    def __init__(self, sig: Signature):
        self.sig = sig
        self.sel_by_template: dict[tuple, SelSymbol] = {}
        self.sel_symbols: list[SelSymbol] = []
        self.fresh = itertools.count()

    def fresh_world(self) -> FVar:
        return FVar(f"V{next(self.fresh)}")

    def sel_for(self, operand: Formula) -> SelSymbol:
        params = tuple(sorted(syntax.free_variables(operand), key=lambda v: v.index))
        key = (operand, params)
        got = self.sel_by_template.get(key)
        if got is None:
            got = SelSymbol(f"sel_{len(self.sel_symbols)}", operand, params)
            self.sel_by_template[key] = got
            self.sel_symbols.append(got)
        return got

    def term(self, t, env: dict[Var, FTerm]) -> FTerm:
        if isinstance(t, Var):
            if t not in env:
                raise TranslationError(f"unbound variable {t}")
            return env[t]
        return FApp(func_symbol(t.func), tuple(self.term(a, env) for a in t.args))

    def tr(self, f: Formula, world: FTerm, env: dict[Var, FTerm]) -> FolFormula:
        if isinstance(f, Atom):
            return FAtom(pred_symbol(f.pred),
                         (world,) + tuple(self.term(a, env) for a in f.args))
        if isinstance(f, Equals):
            return FEq(self.term(f.left, env), self.term(f.right, env))
        if isinstance(f, Not):
            return FNot(self.tr(f.body, world, env))
        if isinstance(f, And):
            return FAnd(self.tr(f.left, world, env), self.tr(f.right, world, env))
        if isinstance(f, Exists):
            fv = FVar(f"X{f.var.index}_{next(self.fresh)}")
            inner_env = dict(env)
            inner_env[f.var] = fv
            return FExists(fv, FAnd(FAtom(IND_GUARD, (fv,)),
                                    self.tr(f.body, world, inner_env)))
        if isinstance(f, Geq):
            left_sel = self.sel_for(f.left)
            right_sel = self.sel_for(f.right)
            guards = [self.nonempty(f.left, env), self.nonempty(f.right, env)]
            lhs = self.sel_term(left_sel, world, env)
            rhs = self.sel_term(right_sel, world, env)
            return conj(guards + [FAtom(ge_symbol(f.index), (lhs, rhs))])
        raise TranslationError(f"not a core formula node: {f!r}")

    def nonempty(self, operand: Formula, env: dict[Var, FTerm]) -> FolFormula:
        v = self.fresh_world()
        return FExists(v, FAnd(FAtom(WORLD_GUARD, (v,)), self.tr(operand, v, env)))

    def sel_term(self, sym: SelSymbol, world: FTerm, env: dict[Var, FTerm]) -> FApp:
        return FApp(sym.name, (world,) + tuple(env[p] for p in sym.params))


def translate(f: Formula, sig: Signature) -> FolTheory:
    """Compile a closed formula to its first-order rendition plus the
    finite theory instantiated for its selection symbols."""
    core = f if syntax.is_core(f) else syntax.expand(f)
    if syntax.free_variables(core):
        raise TranslationError("translation requires a closed formula")
    tr = _Translator(sig)
    goal_var = FVar("W")
    goal_open = tr.tr(core, goal_var, {})
    axioms = _sort_axioms(sig)
    axioms += _preorder_axioms(sig)
    axioms += _sel_axioms(tr)
    return FolTheory(
        source=core, sig=sig, sel_symbols=tr.sel_symbols,
        axioms=axioms, goal_var=goal_var, goal_open=goal_open,
    )


def _sort_axioms(sig: Signature) -> list[tuple[str, FolFormula]]:
    u = FVar("U")
    out = [
        ("world_exists", FExists(u, FAtom(WORLD_GUARD, (u,)))),
        ("ind_exists", FExists(u, FAtom(IND_GUARD, (u,)))),
        ("sorts_disjoint",
         FForall(u, FNot(FAnd(FAtom(WORLD_GUARD, (u,)), FAtom(IND_GUARD, (u,)))))),
    ]
    for name, arity in sorted(sig.functions.items()):
        xs = [FVar(f"X{i}") for i in range(arity)]
        guard = [FAtom(IND_GUARD, (x,)) for x in xs]
        closed = FAtom(IND_GUARD, (FApp(func_symbol(name), tuple(xs)),))
        body = FImplies(conj(guard), closed) if guard else closed
        out.append((f"ind_closed_{func_symbol(name)}", forall_many(xs, body)))
    return out


def _preorder_axioms(sig: Signature) -> list[tuple[str, FolFormula]]:
    out = []
    v, w, x = FVar("V"), FVar("W"), FVar("X")
    for index in sorted(sig.indices, key=lambda s: tuple(sorted(s))):
        ge = ge_symbol(index)
        out.append((
            f"{ge}_reflexive",
            FForall(v, FImplies(FAtom(WORLD_GUARD, (v,)), FAtom(ge, (v, v)))),
        ))
        out.append((
            f"{ge}_transitive",
            forall_many([v, w, x], FImplies(
                conj([FAtom(WORLD_GUARD, (v,)), FAtom(WORLD_GUARD, (w,)),
                      FAtom(WORLD_GUARD, (x,)),
                      FAtom(ge, (v, w)), FAtom(ge, (w, x))]),
                FAtom(ge, (v, x)))),
        ))
        out.append((
            f"{ge}_connected",
            forall_many([v, w], FImplies(
                FAnd(FAtom(WORLD_GUARD, (v,)), FAtom(WORLD_GUARD, (w,))),
                FOr(FAtom(ge, (v, w)), FAtom(ge, (w, v))))),
        ))
    return out


def _sel_axioms(tr: _Translator) -> list[tuple[str, FolFormula]]:
    out = []
    w = FVar("W")
    for sym in tr.sel_symbols:
        ys = [FVar(f"Y{i}") for i in range(len(sym.params))]
        env = dict(zip(sym.params, ys))
        sel = FApp(sym.name, (w,) + tuple(ys))
        guards = [FAtom(WORLD_GUARD, (w,))] + [FAtom(IND_GUARD, (y,)) for y in ys]
        out.append((
            f"{sym.name}_sort",
            forall_many([w] + ys, FImplies(conj(guards), FAtom(WORLD_GUARD, (sel,)))),
        ))
        membership = FImplies(
            tr.nonempty(sym.template, env),
            _tr_at(tr, sym.template, sel, env),
        )
        out.append((
            f"{sym.name}_membership",
            forall_many([w] + ys, FImplies(conj(guards), membership)),
        ))
    for a, b in itertools.combinations_with_replacement(tr.sel_symbols, 2):
        if a is b and not a.params:
            continue  # extensionality of a parameterless symbol with itself is trivial
        ys = [FVar(f"Y{i}") for i in range(len(a.params))]
        zs = [FVar(f"Z{i}") for i in range(len(b.params))]
        env_a = dict(zip(a.params, ys))
        env_b = dict(zip(b.params, zs))
        v = tr.fresh_world()
        same_extension = FForall(v, FImplies(
            FAtom(WORLD_GUARD, (v,)),
            FIff(_tr_at(tr, a.template, v, env_a), _tr_at(tr, b.template, v, env_b)),
        ))
        guards = ([FAtom(WORLD_GUARD, (w,))]
                  + [FAtom(IND_GUARD, (y,)) for y in ys]
                  + [FAtom(IND_GUARD, (z,)) for z in zs])
        sel_a = FApp(a.name, (w,) + tuple(ys))
        sel_b = FApp(b.name, (w,) + tuple(zs))
        out.append((
            f"ext_{a.name}_{b.name}",
            forall_many([w] + ys + zs, FImplies(
                conj(guards), FImplies(same_extension, FEq(sel_a, sel_b)))),
        ))
    return out


def _tr_at(tr: _Translator, f: Formula, world: FTerm, env) -> FolFormula:
    return tr.tr(f, world, dict(env))


# ---------------------------------------------------------------------------
# Finite relational structures and their evaluator
# ---------------------------------------------------------------------------

@dataclass
class FolStructure:
    universe: tuple[int, ...]
    relations: dict[str, set] = field(default_factory=dict)
    functions: dict[str, dict] = field(default_factory=dict)

    def holds(self, f: FolFormula, env: dict[str, int] | None = None) -> bool:
        return self._eval(f, env or {})

    def _term(self, t: FTerm, env: dict[str, int]) -> int:
        if isinstance(t, FVar):
            if t.name not in env:
                raise TranslationError(f"unbound first-order variable {t.name}")
            return env[t.name]
        graph = self.functions.get(t.func)
        if graph is None:
            raise TranslationError(f"uninterpreted function {t.func!r}")
        args = tuple(self._term(a, env) for a in t.args)
        return graph[args]

    def _eval(self, f: FolFormula, env: dict[str, int]) -> bool:
        if isinstance(f, FAtom):
            rel = self.relations.get(f.pred)
            if rel is None:
                raise TranslationError(f"uninterpreted predicate {f.pred!r}")
            return tuple(self._term(a, env) for a in f.args) in rel
        if isinstance(f, FEq):
            return self._term(f.left, env) == self._term(f.right, env)
        if isinstance(f, FNot):
            return not self._eval(f.body, env)
        if isinstance(f, FAnd):
            return self._eval(f.left, env) and self._eval(f.right, env)
        if isinstance(f, FOr):
            return self._eval(f.left, env) or self._eval(f.right, env)
        if isinstance(f, FImplies):
            return not self._eval(f.left, env) or self._eval(f.right, env)
        if isinstance(f, FIff):
            return self._eval(f.left, env) == self._eval(f.right, env)
        if isinstance(f, (FExists, FForall)):
            want_any = isinstance(f, FExists)
            for obj in self.universe:
                env2 = dict(env)
                env2[f.var.name] = obj
                if self._eval(f.body, env2) == want_any:
                    return want_any
            return not want_any
        raise TranslationError(f"not a first-order formula: {f!r}")


def relationalize(m: PreorderModel, theory: FolTheory) -> FolStructure:
    """The finite two-sorted structure induced by a preorder model, with
    the theory's selection symbols interpreted through the model's
    selector applied to the operand's denotation (empty denotations fall
    back to world 0; the membership axiom's antecedent guards them)."""
    nw, nd = m.n_worlds, m.n_domain
    worlds = list(range(nw))
    inds = [nw + i for i in range(nd)]
    st = FolStructure(universe=tuple(worlds + inds))
    st.relations[WORLD_GUARD] = {(w,) for w in worlds}
    st.relations[IND_GUARD] = {(i,) for i in inds}
    for name, per_world in m.predicates.items():
        rel = set()
        for w in range(nw):
            for tup in per_world[w]:
                rel.add((w,) + tuple(nw + e for e in tup))
        st.relations[pred_symbol(name)] = rel
    for name in m.functions:
        graph = m.function_graph(name)
        st.functions[func_symbol(name)] = {
            tuple(nw + a for a in args): nw + val for args, val in graph.items()
        }
    for index, ranks in m.ranks.items():
        st.relations[ge_symbol(index)] = {
            (v, w) for v in worlds for w in worlds if ranks[v] >= ranks[w]
        }
    for sym in theory.sel_symbols:
        graph = {}
        k = len(sym.params)
        for w in worlds:
            for combo in itertools.product(range(nd), repeat=k):
                d = Assignment({p.index: e for p, e in zip(sym.params, combo)})
                prop = evaluate(m, sym.template, d)
                if prop.is_empty:
                    chosen = 0
                else:
                    chosen = m.selector.select(w, prop.mask)
                graph[(w,) + tuple(nw + e for e in combo)] = chosen
        st.functions[sym.name] = graph
    return st


def structure_models_theory(st: FolStructure, theory: FolTheory) -> list[str]:
    """Names of theory axioms the structure falsifies (empty = all hold)."""
    return [name for name, ax in theory.axioms if not st.holds(ax)]


# ---------------------------------------------------------------------------
# TPTP FOF output
# ---------------------------------------------------------------------------

def _tptp_term(t: FTerm) -> str:
    if isinstance(t, FVar):
        return t.name
    if not t.args:
        return t.func
    return f"{t.func}({','.join(_tptp_term(a) for a in t.args)})"


def _tptp_formula(f: FolFormula) -> str:
    if isinstance(f, FAtom):
        if not f.args:
            return f.pred
        return f"{f.pred}({','.join(_tptp_term(a) for a in f.args)})"
    if isinstance(f, FEq):
        return f"({_tptp_term(f.left)} = {_tptp_term(f.right)})"
    if isinstance(f, FNot):
        return f"~ {_tptp_formula(f.body)}"
    ops = {FAnd: "&", FOr: "|", FImplies: "=>", FIff: "<=>"}
    for klass, op in ops.items():
        if isinstance(f, klass):
            return f"({_tptp_formula(f.left)} {op} {_tptp_formula(f.right)})"
    if isinstance(f, FExists):
        return f"( ? [{f.var.name}] : {_tptp_formula(f.body)} )"
    if isinstance(f, FForall):
        return f"( ! [{f.var.name}] : {_tptp_formula(f.body)} )"
    raise TranslationError(f"not a first-order formula: {f!r}")


def to_tptp(theory: FolTheory, include_conjecture: bool = True) -> str:
    lines = []
    for name, ax in theory.axioms:
        lines.append(f"fof({name}, axiom, {_tptp_formula(ax)}).")
    if include_conjecture:
        lines.append(f"fof(goal, conjecture, {_tptp_formula(theory.goal)}).")
    return "\n".join(lines) + "\n"


# --- minimal FOF syntax checker (for round-trip linting) -------------------

_TPTP_TOKEN = re.compile(
    r"\s*(?:(?P<lw>[a-z][A-Za-z0-9_]*)|(?P<uw>[A-Z][A-Za-z0-9_]*)"
    r"|(?P<op><=>|=>|[()\[\],.:&|~!?=]))"
)


class TptpLintError(ValueError):
    pass


class _TptpParser:
    def __init__(self, text: str):
        self.toks: list[str] = []
        pos = 0
        while pos < len(text):
            m = _TPTP_TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                rest = text[pos:].strip()
                if not rest:
                    break
                raise TptpLintError(f"bad TPTP token near {rest[:20]!r}")
            self.toks.append(m.group("lw") or m.group("uw") or m.group("op"))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, want=None):
        tok = self.peek()
        if tok is None:
            raise TptpLintError("unexpected end of input")
        if want is not None and tok != want:
            raise TptpLintError(f"expected {want!r}, found {tok!r}")
        self.i += 1
        return tok

    def statements(self) -> int:
        count = 0
        while self.peek() is not None:
            self.take("fof")
            self.take("(")
            name = self.take()
            if not re.match(r"[a-z][A-Za-z0-9_]*$", name):
                raise TptpLintError(f"bad statement name {name!r}")
            self.take(",")
            role = self.take()
            if role not in ("axiom", "conjecture", "hypothesis", "lemma"):
                raise TptpLintError(f"bad role {role!r}")
            self.take(",")
            self.formula()
            self.take(")")
            self.take(".")
            count += 1
        return count

    def formula(self):
        self.unit()
        while self.peek() in ("&", "|", "=>", "<=>"):
            self.take()
            self.unit()

    def unit(self):
        tok = self.peek()
        if tok == "~":
            self.take()
            self.unit()
            return
        if tok in ("!", "?"):
            self.take()
            self.take("[")
            while True:
                var = self.take()
                if not var[0].isupper():
                    raise TptpLintError(f"quantified variable must be uppercase: {var!r}")
                if self.peek() == ",":
                    self.take()
                    continue
                break
            self.take("]")
            self.take(":")
            self.unit()
            return
        if tok == "(":
            self.take()
            self.formula()
            self.take(")")
            self._maybe_equality()
            return
        self.atom()

    def atom(self):
        tok = self.take()
        if not tok[0].isalpha():
            raise TptpLintError(f"expected an atom, found {tok!r}")
        if self.peek() == "(":
            self.take()
            while True:
                self.term()
                if self.peek() == ",":
                    self.take()
                    continue
                break
            self.take(")")
        self._maybe_equality()

    def _maybe_equality(self):
        if self.peek() == "=":
            self.take()
            self.term()

    def term(self):
        tok = self.take()
        if not tok[0].isalpha():
            raise TptpLintError(f"expected a term, found {tok!r}")
        if self.peek() == "(":
            self.take()
            while True:
                self.term()
                if self.peek() == ",":
                    self.take()
                    continue
                break
            self.take(")")


def lint_tptp(text: str) -> int:
    """Parse the emitted FOF subset; returns the number of statements,
    raising :class:`TptpLintError` on any syntax problem."""
    return _TptpParser(text).statements()
