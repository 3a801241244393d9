"""Standard signatures, formula fixtures, the declared template family of
closed test formulas, and seeded random generators for models/formulas.

Everything here is deterministic given the seed, so golden tests and the
acceptance sweeps are reproducible.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .model import Selector, UtilityModel, PreorderModel
from .syntax import (
    And,
    App,
    Atom,
    Bottom,
    Equals,
    Equiv,
    Exists,
    Forall,
    Formula,
    Geq,
    Gt,
    Iff,
    Implies,
    Leq,
    Lt,
    Not,
    Or,
    Signature,
    Top,
    Var,
    expand,
)

X1 = frozenset({1})
X2 = frozenset({2})
X12 = frozenset({1, 2})


def standard_signature(two_indices: bool = False) -> Signature:
    """One unary predicate; one or two singleton index sets."""
    indices = frozenset({X1, X2}) if two_indices else frozenset({X1})
    return Signature(predicates={"P": 1}, indices=indices)


def anonymity_signature() -> Signature:
    """Unary predicate with the two single reasons and their aggregate."""
    return Signature(predicates={"P": 1}, indices=frozenset({X1, X2, X12}))


def relation_signature() -> Signature:
    """Binary relation plus the unary markers used by the embedding."""
    return Signature(
        predicates={"R": 2, "P": 1, "Q": 1}, indices=frozenset({X1})
    )


def pair_order_signature() -> Signature:
    """Binary predicate for the pair-ordering satisfiability witness."""
    return Signature(predicates={"G": 2}, indices=frozenset({X1}))


_x, _y, _z = Var(0), Var(1), Var(2)


def _p(t) -> Atom:
    return Atom("P", (t,))


# ---------------------------------------------------------------------------
# Fixtures from the source material
# ---------------------------------------------------------------------------

def someone_better_formula() -> Formula:
    """There is someone for whom satisfying P beats everyone satisfying it."""
    return Exists(_x, Gt(X1, _p(_x), Forall(_y, _p(_y))))


def anyone_better_formula() -> Formula:
    """Someone satisfying P beats everyone satisfying it."""
    return Gt(X1, Exists(_x, _p(_x)), Forall(_y, _p(_y)))


def prop10_item1() -> Formula:
    """Distinct elements are never indifferent."""
    return Forall(_x, Forall(_y, Implies(
        Not(Equals(_x, _y)), Not(Equiv(X1, _p(_x), _p(_y)))
    )))


def prop10_item2() -> Formula:
    """Revealed-preference transitivity over pairwise P-options."""
    distinct = And(And(Not(Equals(_x, _y)), Not(Equals(_y, _z))),
                   Not(Equals(_x, _z)))
    chosen_xy = Equiv(X1, Or(_p(_x), _p(_y)), _p(_x))
    chosen_yz = Equiv(X1, Or(_p(_y), _p(_z)), _p(_y))
    chosen_xz = Equiv(X1, Or(_p(_x), _p(_z)), _p(_x))
    return Forall(_x, Forall(_y, Forall(_z, Implies(
        distinct, Implies(And(chosen_xy, chosen_yz), chosen_xz)
    ))))


def prop10_conjunction() -> Formula:
    return And(prop10_item1(), prop10_item2())


def prop10_formula() -> Formula:
    """The revealed-preference transitivity principle in conditional form:
    invalid in general, valid on transitive frames.  (The conjunction of
    the two items fails on transitive frames whenever two elements share a
    P-extension, so the dual-verdict claim holds for the conditional.)"""
    return Implies(prop10_item1(), prop10_item2())


def lexicographic_formula() -> Formula:
    """The pair ordering on the domain is lexicographic in the diagonal
    ordering; satisfiable only over countable domains."""
    x1, y1, x2, y2 = Var(0), Var(1), Var(2), Var(3)

    def g(a, b) -> Atom:
        return Atom("G", (a, b))

    item1 = Forall(x1, Forall(y1, Implies(
        Not(Equals(x1, y1)),
        Or(Lt(X1, g(x1, x1), g(y1, y1)), Lt(X1, g(y1, y1), g(x1, x1))),
    )))
    item2 = Forall(x1, Forall(y1, Forall(x2, Forall(y2, Iff(
        Lt(X1, g(x1, y1), g(x2, y2)),
        Or(Lt(X1, g(x1, x1), g(x2, x2)),
           And(Equals(x1, x2), Lt(X1, g(y1, y1), g(y2, y2)))),
    )))))
    return And(item1, item2)


def lexicographic_model() -> UtilityModel:
    """A 5-world witness for the lexicographic formula over a 2-element
    domain: one world per ordered pair (G holding of exactly that pair,
    utility = the pair's lexicographic rank) plus an empty vantage world."""
    sig = pair_order_signature()
    domain = ("a", "b")
    pairs = list(itertools.product(range(2), repeat=2))  # lexicographic order
    worlds = tuple(f"w{a}{b}" for a, b in pairs) + ("w_base",)
    extensions = tuple(frozenset({pair}) for pair in pairs) + (frozenset(),)
    utility = {X1: tuple(Fraction(i) for i in range(4)) + (Fraction(-1),)}
    return UtilityModel(
        sig=sig, domain=domain, worlds=worlds,
        predicates={"G": extensions},
        utility=utility, selector=Selector.min_index(len(worlds)),
    )


def invariant_witness_psi() -> Formula:
    """Closed description forcing pairwise isomorphic worlds: the domain
    has exactly two elements and exactly one of them satisfies P."""
    two_elements = Exists(_x, Exists(_y, And(
        Not(Equals(_x, _y)),
        Not(Exists(_z, And(Not(Equals(_z, _x)), Not(Equals(_z, _y))))),
    )))
    one_p = Exists(_x, And(_p(_x), Not(Exists(_y, And(_p(_y), Not(Equals(_y, _x)))))))
    return And(two_elements, one_p)


def invariant_witness_formula() -> Formula:
    """Valid on utility-invariant models, invalid in general."""
    psi = invariant_witness_psi()
    better_x = Gt(X1, psi, Top())
    better_y = Gt(X2, psi, Top())
    antecedent = And(And(psi, better_x), better_y)
    consequent = Equiv(X1, And(psi, better_x), And(psi, better_y))
    return Implies(antecedent, consequent)


def conjunction_anonymity_formula(index: frozenset[int] = X1) -> Formula:
    """Indifferent conjuncts contribute interchangeably to conjunctions."""
    return Forall(_x, Forall(_y, Implies(
        Equiv(index, _p(_x), _p(_y)),
        Forall(_z, Equiv(index, And(_p(_x), _p(_z)), And(_p(_y), _p(_z)))),
    )))


def index_anonymity_formula() -> Formula:
    """Agreement on both single reasons forces agreement on the aggregate."""
    return Forall(_x, Forall(_y, Implies(
        And(Equiv(X1, _p(_x), _p(_y)), Equiv(X2, _p(_x), _p(_y))),
        Equiv(X12, _p(_x), _p(_y)),
    )))


# ---------------------------------------------------------------------------
# The declared template family of closed corpus formulas
# ---------------------------------------------------------------------------

def template_formulas(max_depth: int = 2) -> list[Formula]:
    """Closed formulas over the standard one-predicate signature, by
    modal depth.  This finite family is the declared corpus for the
    property sweeps; depth counts nested preference connectives."""
    some = Exists(_x, _p(_x))
    every = Forall(_x, _p(_x))
    some_not = Exists(_x, Not(_p(_x)))
    two_distinct = Exists(_x, Exists(_y, And(Not(Equals(_x, _y)),
                                             And(_p(_x), Not(_p(_y))))))
    depth0: list[Formula] = [Top(), Bottom(), some, every, some_not, two_distinct]
    out = list(depth0)
    if max_depth < 1:
        return out
    operand0 = [Top(), some, every, some_not]
    depth1: list[Formula] = []
    for a, b in itertools.product(operand0, repeat=2):
        depth1.append(Geq(X1, a, b))
    depth1.append(someone_better_formula())
    depth1.append(anyone_better_formula())
    depth1.append(Exists(_x, Geq(X1, _p(_x), Top())))
    out += depth1
    if max_depth < 2:
        return out
    d1a = Geq(X1, some, Top())
    d1b = Geq(X1, Top(), every)
    d1c = Gt(X1, some, every)
    out += [
        Geq(X1, d1a, Top()),
        Geq(X1, Top(), d1a),
        Geq(X1, d1a, d1b),
        Geq(X1, some, d1b),
        Not(Geq(X1, d1c, some_not)),
        Exists(_x, Geq(X1, Geq(X1, _p(_x), Top()), _p(_x))),
    ]
    return out


# ---------------------------------------------------------------------------
# Seeded random generators
# ---------------------------------------------------------------------------

def random_core_formula(rng: random.Random, sig: Signature, max_depth: int = 4,
                        max_modal: int = 2) -> Formula:
    """Random core formula for round-trip properties."""
    indices = sorted(sig.indices, key=lambda x: tuple(sorted(x)))
    preds = sorted(sig.predicates.items())
    funcs = sorted(sig.functions.items())

    def term(depth: int):
        if funcs and depth > 0 and rng.random() < 0.3:
            name, arity = rng.choice(funcs)
            return App(name, tuple(term(depth - 1) for _ in range(arity)))
        return Var(rng.randrange(4))

    def go(depth: int, modal: int) -> Formula:
        choices = ["atom", "equals"]
        if depth > 0:
            choices += ["not", "and", "exists"]
            if modal > 0:
                choices += ["geq", "geq"]
        kind = rng.choice(choices)
        if kind == "atom" and preds:
            name, arity = rng.choice(preds)
            return Atom(name, tuple(term(1) for _ in range(arity)))
        if kind in ("atom", "equals"):
            return Equals(term(1), term(1))
        if kind == "not":
            return Not(go(depth - 1, modal))
        if kind == "and":
            return And(go(depth - 1, modal), go(depth - 1, modal))
        if kind == "exists":
            return Exists(Var(rng.randrange(4)), go(depth - 1, modal))
        return Geq(frozenset(rng.choice(indices)),
                   go(depth - 1, modal - 1), go(depth - 1, modal - 1))

    return go(max_depth, max_modal)


def random_surface_formula(rng: random.Random, sig: Signature, max_depth: int = 4) -> Formula:
    """Random surface formula exercising every sugar constructor."""
    indices = sorted(sig.indices, key=lambda x: tuple(sorted(x)))
    preds = sorted(sig.predicates.items())

    def go(depth: int) -> Formula:
        leaf = ["atom", "equals", "top", "bottom"]
        if depth <= 0:
            kind = rng.choice(leaf)
        else:
            kind = rng.choice(leaf + [
                "not", "and", "or", "implies", "iff", "exists", "forall",
                "geq", "gt", "equiv", "leq", "lt",
            ])
        if kind == "atom" and preds:
            name, arity = rng.choice(preds)
            return Atom(name, tuple(Var(rng.randrange(4)) for _ in range(arity)))
        if kind in ("atom", "equals"):
            return Equals(Var(rng.randrange(4)), Var(rng.randrange(4)))
        if kind == "top":
            return Top()
        if kind == "bottom":
            return Bottom()
        if kind == "not":
            return Not(go(depth - 1))
        pair = {"and": And, "or": Or, "implies": Implies, "iff": Iff}
        if kind in pair:
            return pair[kind](go(depth - 1), go(depth - 1))
        if kind in ("exists", "forall"):
            klass = Exists if kind == "exists" else Forall
            return klass(Var(rng.randrange(4)), go(depth - 1))
        modal = {"geq": Geq, "gt": Gt, "equiv": Equiv, "leq": Leq, "lt": Lt}[kind]
        return modal(frozenset(rng.choice(indices)), go(depth - 1), go(depth - 1))

    return go(max_depth)


def random_utility_model(rng: random.Random, sig: Signature, n_worlds: int,
                         n_domain: int,
                         levels=(Fraction(0), Fraction(1, 2), Fraction(1))) -> UtilityModel:
    domain = tuple(f"d{i}" for i in range(n_domain))
    worlds = tuple(f"w{i}" for i in range(n_worlds))
    predicates = {}
    for name, arity in sorted(sig.predicates.items()):
        rows = list(itertools.product(range(n_domain), repeat=arity))
        predicates[name] = tuple(
            frozenset(r for r in rows if rng.random() < 0.5) for _ in range(n_worlds)
        )
    utility = {
        x: tuple(rng.choice(levels) for _ in range(n_worlds))
        for x in sig.indices
    }
    selector = Selector.from_function(
        n_worlds,
        lambda w, mask: rng.choice([v for v in range(n_worlds) if mask >> v & 1]),
    )
    return UtilityModel(
        sig=sig, domain=domain, worlds=worlds, predicates=predicates,
        utility=utility, selector=selector,
    )


def random_preorder_model(rng: random.Random, sig: Signature, n_worlds: int,
                          n_domain: int, n_ranks: int = 3) -> PreorderModel:
    m = random_utility_model(rng, sig, n_worlds, n_domain)
    ranks = {x: tuple(rng.randrange(n_ranks) for _ in range(n_worlds))
             for x in sig.indices}
    return PreorderModel(
        sig=m.sig, domain=m.domain, worlds=m.worlds, predicates=m.predicates,
        ranks=ranks, selector=m.selector,
    )


def m0_model() -> UtilityModel:
    """Two worlds over a singleton domain; P holds of the element only at
    the second world, which also carries the higher utility."""
    sig = standard_signature()
    return UtilityModel(
        sig=sig, domain=("a",), worlds=("w0", "w1"),
        predicates={"P": (frozenset(), frozenset({(0,)}))},
        utility={X1: (Fraction(0), Fraction(1))},
        selector=Selector.min_index(2),
    )
