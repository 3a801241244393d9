"""Bounded satisfiability and validity verdicts.

``find_model`` streams the canonical enumeration and returns the first
satisfying witness.  ``check_validity`` uses full-table enumeration in
general; for formulas of modal depth at most one on the all/reflexive/
transitive frame classes it decomposes per vantage world, since world
membership then depends on the selector only through the vantage world's
choices on the operand propositions actually queried (and a total choice
function is transitive exactly when each vantage world picks minima of a
linear order).  Every returned witness is re-verified with the reference
evaluator before it leaves this module.
"""

from __future__ import annotations

import itertools

from .. import syntax
from ..model import (
    Assignment,
    PreorderModel,
    Selector,
    UtilityModel,
    mask_worlds,
)
from ..semantics import evaluate
from ..syntax import Formula, Signature
from .compile import InterpContext, compile_member
from .enumerate import (
    canonical_interps,
    enumerate_models,
    selector_row_options,
    sorted_indices,
    value_tables,
)
from .types import (
    Bounds,
    CounterexampleAt,
    NoModelWithinBounds,
    SatisfiedBy,
    ValidWithinBounds,
    Verdict,
    _Budget,
)


def _prepare(f: Formula) -> tuple[Formula, list[int]]:
    core = f if syntax.is_core(f) else syntax.expand(f)
    fvars = sorted(v.index for v in syntax.free_variables(core))
    return core, fvars


def _assignment_dict(m, d: Assignment, fvars) -> dict:
    return {f"v{v}": m.domain[d.value(v)] for v in fvars}


def find_model(f: Formula, sig: Signature, bounds: Bounds) -> Verdict:
    """First (model, world, assignment) satisfying the formula, in the
    deterministic enumeration order, or the bounded negative verdict."""
    core, fvars = _prepare(f)
    count = 0
    for m in enumerate_models(sig, bounds, stage="satisfiability search"):
        count += 1
        for combo in itertools.product(range(m.n_domain), repeat=len(fvars)):
            d = Assignment(dict(zip(fvars, combo)))
            prop = evaluate(m, core, d)
            if prop.is_empty:
                continue
            w = next(iter(prop.worlds()))
            assert w in evaluate(m, core, d)
            return SatisfiedBy(m, m.worlds[w], _assignment_dict(m, d, fvars), count)
    return NoModelWithinBounds(count)


def core_or(f: Formula) -> Formula:
    return f if syntax.is_core(f) else syntax.expand(f)


def check_validity(f: Formula, sig: Signature, bounds: Bounds) -> Verdict:
    """Counterexample within bounds, or validity-within-bounds."""
    core, fvars = _prepare(f)
    if (
        bounds.semantics in ("utility", "preorder")
        and bounds.frame in ("all", "reflexive", "transitive")
        and syntax.modal_depth(core) <= 1
    ):
        return _check_validity_decomposed(core, fvars, sig, bounds)
    return _check_validity_generic(core, fvars, sig, bounds)


def _check_validity_generic(core, fvars, sig, bounds) -> Verdict:
    count = 0
    for m in enumerate_models(sig, bounds, stage="validity sweep"):
        count += 1
        for combo in itertools.product(range(m.n_domain), repeat=len(fvars)):
            d = Assignment(dict(zip(fvars, combo)))
            prop = evaluate(m, core, d)
            if prop.is_full:
                continue
            w = next(iter(prop.complement().worlds()))
            assert w not in evaluate(m, core, d)
            return CounterexampleAt(m, m.worlds[w], _assignment_dict(m, d, fvars), count)
    return ValidWithinBounds(count)


# ---------------------------------------------------------------------------
# Per-world decomposition for modal depth <= 1
# ---------------------------------------------------------------------------

def _vantage_rows(n_w: int, world: int, queried, frame: str):
    """Candidate vantage-world choice rows, restricted to the queried
    masks (transitive rows come from whole linear orders)."""
    if frame == "transitive":
        for row in selector_row_options(n_w, world, "transitive"):
            yield row, ("order", row)
        return
    masks = sorted(queried)
    spaces = []
    for mask in masks:
        if frame == "reflexive" and mask >> world & 1:
            spaces.append((world,))
        else:
            spaces.append(tuple(mask_worlds(mask)))
    for combo in itertools.product(*spaces):
        row = [0] * (1 << n_w)
        for mask, v in zip(masks, combo):
            row[mask] = v
        yield tuple(row), ("partial", tuple(zip(masks, combo)))


def _assemble_countermodel(sig, bounds, interp, n_w, n_d, indices, value_tab,
                           world, how) -> UtilityModel | PreorderModel:
    kind, payload = how
    if kind == "default":
        # selector-independent falsification; self-first minima are
        # reflexive and transitive, so the model sits in every class here
        def fn(w, mask):
            if mask >> w & 1:
                return w
            return (mask & -mask).bit_length() - 1
        selector = Selector.from_function(n_w, fn)
    elif kind == "order":
        # vantage world keeps its falsifying row; other worlds pick minima
        # of the identity order, which is transitive per world
        row = payload
        def fn(w, mask):
            if w == world:
                return row[mask]
            return (mask & -mask).bit_length() - 1
        selector = Selector.from_function(n_w, fn)
    else:
        entries = dict(payload)
        reflexive = bounds.frame == "reflexive"
        def fn(w, mask):
            if w == world and mask in entries:
                return entries[mask]
            if reflexive and mask >> w & 1:
                return w
            return (mask & -mask).bit_length() - 1
        selector = Selector.from_function(n_w, fn)
    domain = tuple(f"d{i}" for i in range(n_d))
    worlds = tuple(f"w{i}" for i in range(n_w))
    if bounds.semantics == "utility":
        utility = {x: tuple(bounds.levels[i] for i in values)
                   for x, values in zip(indices, value_tab)}
        return UtilityModel(sig=sig, domain=domain, worlds=worlds,
                            predicates=dict(interp), utility=utility,
                            selector=selector)
    ranks = {x: tuple(values) for x, values in zip(indices, value_tab)}
    return PreorderModel(sig=sig, domain=domain, worlds=worlds,
                         predicates=dict(interp), ranks=ranks,
                         selector=selector)


def _check_validity_decomposed(core, fvars, sig, bounds) -> Verdict:
    indices = sorted_indices(sig)
    n_levels = len(bounds.levels)
    budget = _Budget(bounds.budget, "decomposed validity sweep")
    for n_w in range(1, bounds.max_worlds + 1):
        for n_d in range(1, bounds.max_domain + 1):
            for interp, _stab in canonical_interps(sig, n_w, n_d, budget):
                ctx = InterpContext(sig, interp, n_w, n_d)
                compiled = []
                for combo in itertools.product(range(n_d), repeat=len(fvars)):
                    d = dict(zip(fvars, combo))
                    compiled.append((d, compile_member(core, ctx, d)))
                for value_tab in value_tables(len(indices), n_w, n_levels):
                    for d, cm in compiled:
                        if cm.mask is not None:
                            if cm.mask == ctx.full:
                                continue
                            w = next(iter(mask_worlds(cm.mask ^ ctx.full)))
                            return _verified_counterexample(
                                sig, bounds, interp, n_w, n_d, indices,
                                value_tab, w, ("default", None), core, d, budget,
                            )
                        for w in range(n_w):
                            for row, how in _vantage_rows(n_w, w, cm.queried,
                                                          bounds.frame):
                                budget.spend()
                                if not cm.fn(w, row, value_tab):
                                    return _verified_counterexample(
                                        sig, bounds, interp, n_w, n_d, indices,
                                        value_tab, w, how, core, d, budget,
                                    )
    return ValidWithinBounds(budget.count)


def _verified_counterexample(sig, bounds, interp, n_w, n_d, indices, value_tab,
                             world, how, core, d, budget) -> CounterexampleAt:
    m = _assemble_countermodel(sig, bounds, interp, n_w, n_d, indices,
                               value_tab, world, how)
    assignment = Assignment(dict(d))
    prop = evaluate(m, core, assignment)
    if world in prop:
        raise AssertionError("assembled countermodel failed re-verification")
    return CounterexampleAt(
        m, m.worlds[world],
        {f"v{v}": m.domain[e] for v, e in sorted(d.items())},
        budget.count,
    )


# ---------------------------------------------------------------------------
# Dedicated check for the invariance witness (modal depth two)
# ---------------------------------------------------------------------------

def check_invariant_validity(bounds: Bounds) -> Verdict:
    """Verdict for the invariance witness formula: the description of a
    two-element domain with exactly one marked element, strictly better
    than the status quo along two separate reasons, forces indifference
    between the two readings.  Valid on the utility-invariant class,
    refutable in general.

    The formula has modal depth two, so full-table enumeration is out of
    reach at four worlds; instead the two stage-one selector columns (the
    description's worlds and the full world set) are enumerated per world,
    and the vantage world's stage-two choices are scanned directly.  On
    the invariant class the scan short-circuits: the description's worlds
    are pairwise isomorphic, so invariant utilities are constant there and
    no stage-two pair can differ.
    """
    from ..corpus import invariant_witness_formula, invariant_witness_psi

    if bounds.frame not in ("all", "invariant"):
        raise ValueError("the invariance witness is checked on 'all' or 'invariant'")
    if bounds.semantics != "utility":
        raise ValueError("the invariance witness is a utility-model claim")
    sig = Signature(predicates={"P": 1},
                    indices=frozenset({frozenset({1}), frozenset({2})}))
    phi = syntax.expand(invariant_witness_formula())
    psi = syntax.expand(invariant_witness_psi())
    indices = sorted_indices(sig)  # [{1}, {2}]
    n_levels = len(bounds.levels)
    budget = _Budget(bounds.budget, "invariance witness sweep")

    for n_w in range(1, bounds.max_worlds + 1):
        for n_d in range(1, bounds.max_domain + 1):
            for interp, _stab in canonical_interps(sig, n_w, n_d, budget):
                ctx = InterpContext(sig, interp, n_w, n_d)
                psi_mask = ctx.nonmodal_mask(psi, {})
                full = ctx.full
                if psi_mask == 0 or psi_mask == full:
                    # empty description: vacuously valid; description
                    # everywhere: both comparisons collapse to the same
                    # selection and the strict claims denote nothing
                    continue
                iso_classes = None
                if bounds.frame == "invariant":
                    from .enumerate import interp_iso_classes

                    iso_classes = interp_iso_classes(sig, interp, n_w, n_d)
                psi_members = list(mask_worlds(psi_mask))
                found = _scan_invariant_candidates(
                    sig, bounds, interp, ctx, psi_mask, psi_members, indices,
                    n_levels, iso_classes, phi, budget,
                )
                if found is not None:
                    return found
    return ValidWithinBounds(budget.count)


def _scan_invariant_candidates(sig, bounds, interp, ctx, psi_mask, psi_members,
                               indices, n_levels, iso_classes, phi, budget):
    n_w, n_d = ctx.n_w, ctx.n_d
    full = ctx.full
    for value_tab in value_tables(len(indices), n_w, n_levels):
        if iso_classes is not None:
            ok = True
            for values in value_tab:
                for cls in iso_classes:
                    if any(values[w] != values[cls[0]] for w in cls[1:]):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
        ux, uy = value_tab
        budget.spend()
        # stage-two representatives live inside the description's worlds;
        # a constant first-reason utility there makes falsification
        # impossible (the consequent compares first-reason values only)
        if len({ux[w] for w in psi_members}) == 1:
            continue
        # per-world achievable (strictly-better-by-1, strictly-better-by-2)
        # bit pairs; the description choice's first-reason value can feed
        # the stage-two comparison, so it stays in the dedup key
        seen = {}
        for c_psi in psi_members:
            for c_top in range(n_w):
                bits = (ux[c_psi] > ux[c_top], uy[c_psi] > uy[c_top])
                seen.setdefault((bits, ux[c_psi]), (bits, (c_psi, c_top)))
        options = [sorted(seen.values())] * n_w
        for combo in itertools.product(*options):
            budget.spend()
            inner_x = 0
            inner_y = 0
            for w, (bits, _reps) in enumerate(combo):
                if bits[0]:
                    inner_x |= 1 << w
                if bits[1]:
                    inner_y |= 1 << w
            a1 = psi_mask & inner_x
            a2 = psi_mask & inner_y
            antecedent = a1 & a2
            if antecedent == 0 or a1 == a2:
                continue
            for w_star in mask_worlds(antecedent):
                fixed = {psi_mask: combo[w_star][1][0], full: combo[w_star][1][1]}
                cands1 = [fixed[a1]] if a1 in fixed else list(mask_worlds(a1))
                cands2 = [fixed[a2]] if a2 in fixed else list(mask_worlds(a2))
                for c1 in cands1:
                    for c2 in cands2:
                        if ux[c1] == ux[c2]:
                            continue
                        m = _assemble_invariant_countermodel(
                            sig, bounds, interp, n_w, n_d, indices, value_tab,
                            combo, psi_mask, full, w_star, a1, c1, a2, c2,
                        )
                        prop = evaluate(m, phi)
                        if w_star in prop:
                            raise AssertionError(
                                "assembled countermodel failed re-verification"
                            )
                        return CounterexampleAt(m, m.worlds[w_star], {},
                                                budget.count)
    return None


def _assemble_invariant_countermodel(sig, bounds, interp, n_w, n_d, indices,
                                     value_tab, combo, psi_mask, full, w_star,
                                     a1, c1, a2, c2) -> UtilityModel:
    entries = {}
    for w, (_bits, (c_psi, c_top)) in enumerate(combo):
        entries[(w, psi_mask)] = c_psi
        entries[(w, full)] = c_top
    entries[(w_star, a1)] = c1
    entries[(w_star, a2)] = c2

    def fn(w, mask):
        got = entries.get((w, mask))
        if got is not None:
            return got
        return (mask & -mask).bit_length() - 1

    utility = {x: tuple(bounds.levels[i] for i in values)
               for x, values in zip(indices, value_tab)}
    return UtilityModel(
        sig=sig,
        domain=tuple(f"d{i}" for i in range(n_d)),
        worlds=tuple(f"w{i}" for i in range(n_w)),
        predicates=dict(interp),
        utility=utility,
        selector=Selector.from_function(n_w, fn),
    )
