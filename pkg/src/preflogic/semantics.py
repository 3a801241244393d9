"""Denotation of formulas in finite models.

Every formula denotes a proposition (a set of worlds) relative to a model
and an assignment.  The preference clause compares representatives picked
by the selection function (utility or world-rank comparison), or compares
the operand propositions directly under a generalized model.  When either
operand denotes the empty set, the preference formula denotes the empty
set as well: preferring makes a covert existential claim that there is
something to choose between.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import syntax
from .model import (
    Assignment,
    GeneralizedModel,
    Model,
    ModelError,
    PreorderModel,
    Proposition,
    UtilityModel,
)
from .syntax import And, Atom, Equals, Exists, Geq, Formula, Not, Signature, Var


class EvalError(ValueError):
    """The formula mentions symbols the model does not interpret."""


@lru_cache(maxsize=65536)
def _free_vars(f: Formula) -> frozenset[Var]:
    return frozenset(syntax.free_variables(f))


def evaluate(m: Model, f: Formula, d: Assignment | None = None) -> Proposition:
    """The proposition denoted by ``f`` in ``m`` under assignment ``d``.

    Accepts surface formulas (they are expanded first).  Subformula
    denotations are memoized per call, keyed by the restriction of the
    assignment to the subformula's free variables.
    """
    if not syntax.is_core(f):
        f = syntax.expand(f)
    if d is None:
        d = Assignment()
    memo: dict = {}
    return _eval(m, f, d, memo)


def _eval(m: Model, f: Formula, d: Assignment, memo: dict) -> Proposition:
    key = (f, d.restrict_key(v.index for v in _free_vars(f)))
    got = memo.get(key)
    if got is not None:
        return got
    n = m.n_worlds
    if isinstance(f, Atom):
        if f.pred not in m.sig.predicates:
            raise EvalError(f"predicate {f.pred!r} not in the model signature")
        row = tuple(_eval_term(m, t, d) for t in f.args)
        mask = 0
        for w in range(n):
            if row in m.extension(f.pred, w):
                mask |= 1 << w
        out = Proposition(mask, n)
    elif isinstance(f, Equals):
        same = _eval_term(m, f.left, d) == _eval_term(m, f.right, d)
        out = Proposition.full(n) if same else Proposition.empty(n)
    elif isinstance(f, Not):
        out = _eval(m, f.body, d, memo).complement()
    elif isinstance(f, And):
        out = _eval(m, f.left, d, memo) & _eval(m, f.right, d, memo)
    elif isinstance(f, Exists):
        # union over the finitely many variants at the bound variable
        mask = 0
        for e in range(m.n_domain):
            mask |= _eval(m, f.body, d.set(f.var.index, e), memo).mask
            if mask == (1 << n) - 1:
                break
        out = Proposition(mask, n)
    elif isinstance(f, Geq):
        out = _eval_geq(m, f, d, memo)
    else:
        raise EvalError(f"not a core formula node: {f!r}")
    memo[key] = out
    return out


def _eval_term(m: Model, t, d: Assignment) -> int:
    if isinstance(t, Var):
        e = d.value(t.index)
        if not 0 <= e < m.n_domain:
            raise EvalError(f"assignment maps {t} outside the domain")
        return e
    if t.func not in m.sig.functions:
        raise EvalError(f"function {t.func!r} not in the model signature")
    args = tuple(_eval_term(m, a, d) for a in t.args)
    graph = m.function_graph(t.func)
    if args not in graph:
        raise ModelError(f"function {t.func!r} undefined at {args}")
    return graph[args]


def _eval_geq(m: Model, f: Geq, d: Assignment, memo: dict) -> Proposition:
    if f.index not in m.sig.indices:
        raise EvalError(f"index set {set(f.index)} not in the model signature")
    n = m.n_worlds
    left = _eval(m, f.left, d, memo)
    right = _eval(m, f.right, d, memo)
    if left.is_empty or right.is_empty:
        return Proposition.empty(n)
    mask = 0
    if isinstance(m, UtilityModel):
        values = m.utility[f.index]
        sel = m.selector.select
        for w in range(n):
            if values[sel(w, left.mask)] >= values[sel(w, right.mask)]:
                mask |= 1 << w
    elif isinstance(m, PreorderModel):
        ranks = m.ranks[f.index]
        sel = m.selector.select
        for w in range(n):
            if ranks[sel(w, left.mask)] >= ranks[sel(w, right.mask)]:
                mask |= 1 << w
    elif isinstance(m, GeneralizedModel):
        tables = m.ranking[f.index]
        for w in range(n):
            table = tables[w]
            if table[left.mask] >= table[right.mask]:
                mask |= 1 << w
    else:
        raise EvalError(f"unknown model kind {type(m).__name__}")
    return Proposition(mask, n)


def denote_closed(m: Model, f: Formula) -> Proposition:
    """Assignment-invariant denotation: the intersection over all
    assignments, which only the free variables of ``f`` can affect."""
    if not syntax.is_core(f):
        f = syntax.expand(f)
    fvars = sorted(v.index for v in _free_vars(f))
    if not fvars:
        return evaluate(m, f)
    out = Proposition.full(m.n_worlds)
    memo: dict = {}
    d = Assignment()
    stack = [(d, 0)]
    while stack:
        d, i = stack.pop()
        if i == len(fvars):
            out = out & _eval(m, f, d, memo)
            if out.is_empty:
                break
            continue
        for e in range(m.n_domain):
            stack.append((d.set(fvars[i], e), i + 1))
    return out


# ---------------------------------------------------------------------------
# Global modality
# ---------------------------------------------------------------------------

def box(f: Formula, sig: Signature) -> Formula:
    """Necessity from preference: the negated self-comparison of the
    negation, at the canonical index set (the choice is immaterial)."""
    g = f if syntax.is_core(f) else syntax.expand(f)
    x = sig.canonical_index()
    return Not(Geq(x, Not(g), Not(g)))


def diamond(f: Formula, sig: Signature) -> Formula:
    """Possibility from preference: the self-comparison at the canonical
    index set."""
    g = f if syntax.is_core(f) else syntax.expand(f)
    x = sig.canonical_index()
    return Geq(x, g, g)


@dataclass(frozen=True)
class GlobalModalityReport:
    formula_prop: Proposition
    box_prop: Proposition
    diamond_prop: Proposition
    box_chain_ok: bool
    diamond_chain_ok: bool

    @property
    def passed(self) -> bool:
        return self.box_chain_ok and self.diamond_chain_ok


def check_global_modality(m: Model, f: Formula, d: Assignment | None = None) -> GlobalModalityReport:
    """Verify both correspondence chains on the given inputs:
    the boxed formula denotes something iff it denotes everything iff the
    formula denotes everything; the diamonded formula denotes something
    iff it denotes everything iff the formula denotes something."""
    fp = evaluate(m, f, d)
    bp = evaluate(m, box(f, m.sig), d)
    dp = evaluate(m, diamond(f, m.sig), d)
    box_ok = (not bp.is_empty) == bp.is_full == fp.is_full
    dia_ok = (not dp.is_empty) == dp.is_full == (not fp.is_empty)
    return GlobalModalityReport(fp, bp, dp, box_ok, dia_ok)
