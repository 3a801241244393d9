"""Canonical enumeration of finite models up to renaming of worlds and
domain elements.

Interpretations are enumerated in canonical form (lexicographically least
encoding over the joint world/element permutation group); the remaining
components are then enumerated up to the interpretation's stabilizer.
Verdicts over the reduced space coincide with verdicts over the raw space
because every checked property is invariant under isomorphism; the test
suite cross-checks this against unreduced enumeration at tiny sizes.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from ..model import (
    GeneralizedModel,
    ModelBase,
    PreorderModel,
    Selector,
    UtilityModel,
    mask_worlds,
)
from ..syntax import Signature
from .types import Bounds, _Budget


def sorted_indices(sig: Signature) -> list[frozenset[int]]:
    return sorted(sig.indices, key=lambda x: tuple(sorted(x)))


def permute_mask(mask: int, perm) -> int:
    out = 0
    for w in mask_worlds(mask):
        out |= 1 << perm[w]
    return out


# ---------------------------------------------------------------------------
# Interpretations
# ---------------------------------------------------------------------------

def _encode_interp(interp: dict, preds: list[str], n_w: int) -> tuple:
    return tuple(
        tuple(sorted(interp[p][w]) for w in range(n_w)) for p in preds
    )


def _apply_interp(interp: dict, preds: list[str], n_w: int, wperm, dperm) -> dict:
    out: dict = {}
    for p in preds:
        rows = [None] * n_w
        for w in range(n_w):
            rows[wperm[w]] = frozenset(
                tuple(dperm[e] for e in tup) for tup in interp[p][w]
            )
        out[p] = tuple(rows)
    return out


def canonical_interps(sig: Signature, n_w: int, n_d: int, budget: _Budget):
    """Yield (interpretation, stabilizer world-perms) in canonical form.

    Only predicate vocabularies are enumerable; the search surface rejects
    signatures with function symbols.
    """
    if sig.functions:
        raise ValueError("model search supports predicate-only signatures")
    preds = sorted(sig.predicates)
    group = [
        (wp, dp)
        for wp in itertools.permutations(range(n_w))
        for dp in itertools.permutations(range(n_d))
    ]
    spaces = []
    for p in preds:
        arity = sig.predicates[p]
        rows = list(itertools.product(range(n_d), repeat=arity))
        subsets = [
            frozenset(c)
            for size in range(len(rows) + 1)
            for c in itertools.combinations(rows, size)
        ]
        for _ in range(n_w):
            spaces.append(subsets)
    for combo in itertools.product(*spaces):
        budget.spend()
        interp = {}
        i = 0
        for p in preds:
            interp[p] = tuple(combo[i:i + n_w])
            i += n_w
        enc = _encode_interp(interp, preds, n_w)
        stab = []
        canonical = True
        for wp, dp in group:
            other = _encode_interp(_apply_interp(interp, preds, n_w, wp, dp), preds, n_w)
            if other < enc:
                canonical = False
                break
            if other == enc:
                stab.append(wp)
        if canonical:
            yield interp, sorted(set(stab))


def interp_iso_classes(sig, interp: dict, n_w: int, n_d: int) -> list[list[int]]:
    base = ModelBase(
        sig=sig,
        domain=tuple(f"d{i}" for i in range(n_d)),
        worlds=tuple(f"w{i}" for i in range(n_w)),
        predicates=interp,
    )
    return base.iso_classes()


# ---------------------------------------------------------------------------
# Value tables (utilities or ranks) and selectors
# ---------------------------------------------------------------------------

def value_tables(n_indices: int, n_w: int, n_levels: int):
    """All assignments of level indices to (index set, world) pairs, as a
    tuple of per-index-set world tuples."""
    return itertools.product(
        itertools.product(range(n_levels), repeat=n_w), repeat=n_indices
    )


def selector_row_options(n_w: int, world: int, frame: str) -> list[tuple[int, ...]]:
    """All choice rows for one vantage world: tuples indexed by mask
    (entry 0 unused) assigning a member to every nonempty mask."""
    if frame == "transitive":
        rows = []
        for order in itertools.permutations(range(n_w)):
            position = {v: i for i, v in enumerate(order)}
            row = [0] * (1 << n_w)
            for mask in range(1, 1 << n_w):
                row[mask] = min(mask_worlds(mask), key=position.__getitem__)
            rows.append(tuple(row))
        # distinct orders can induce the same choice row
        return sorted(set(rows))
    choices = []
    for mask in range(1, 1 << n_w):
        members = list(mask_worlds(mask))
        if frame == "reflexive" and mask >> world & 1:
            members = [world]
        choices.append(members)
    rows = []
    for combo in itertools.product(*choices):
        row = [0] * (1 << n_w)
        for mask, v in zip(range(1, 1 << n_w), combo):
            row[mask] = v
        rows.append(tuple(row))
    return rows


def selector_from_rows(rows, n_w: int) -> Selector:
    table = {}
    for w in range(n_w):
        for mask in range(1, 1 << n_w):
            table[(w, mask)] = rows[w][mask]
    return Selector(n_w, table)


def _permute_values(values, wperm):
    out = [0] * len(values)
    for w, v in enumerate(values):
        out[wperm[w]] = v
    return tuple(out)


def _permute_rows(rows, wperm, n_w: int):
    out = [None] * n_w
    for w in range(n_w):
        src = rows[w]
        row = [0] * (1 << n_w)
        for mask in range(1, 1 << n_w):
            row[permute_mask(mask, wperm)] = wperm[src[mask]]
        out[wperm[w]] = tuple(row)
    return tuple(out)


def canonical_under(stab, value_tab, rows, n_w: int) -> bool:
    """Keep only the lexicographically least (values, selector) encoding
    within the interpretation's stabilizer orbit."""
    if len(stab) <= 1:
        return True
    enc = (value_tab, rows)
    for wperm in stab:
        if wperm == tuple(range(n_w)):
            continue
        other = (
            tuple(_permute_values(v, wperm) for v in value_tab),
            _permute_rows(rows, wperm, n_w) if rows is not None else None,
        )
        if other < enc:
            return False
    return True


# ---------------------------------------------------------------------------
# Full model enumeration
# ---------------------------------------------------------------------------

def _size_pairs(bounds: Bounds):
    for n_w in range(1, bounds.max_worlds + 1):
        for n_d in range(1, bounds.max_domain + 1):
            yield n_w, n_d


def enumerate_models(sig: Signature, bounds: Bounds, stage: str = "model enumeration"):
    """Deterministic stream of models in canonical form, smallest sizes
    first, filtered to the requested frame class and semantics flavor."""
    budget = _Budget(bounds.budget, stage)
    indices = sorted_indices(sig)
    n_levels = len(bounds.levels)
    for n_w, n_d in _size_pairs(bounds):
        domain = tuple(f"d{i}" for i in range(n_d))
        worlds = tuple(f"w{i}" for i in range(n_w))
        for interp, stab in canonical_interps(sig, n_w, n_d, budget):
            if bounds.semantics == "generalized":
                yield from _generalized_models(
                    sig, bounds, interp, stab, domain, worlds, indices, budget
                )
                continue
            iso_classes = None
            if bounds.frame == "invariant":
                iso_classes = interp_iso_classes(sig, interp, n_w, n_d)
            row_space = [
                selector_row_options(n_w, w, bounds.frame
                                     if bounds.frame in ("reflexive", "transitive")
                                     else "all")
                for w in range(n_w)
            ]
            for value_tab in value_tables(len(indices), n_w, n_levels):
                if iso_classes is not None and not _invariant_values(value_tab, iso_classes):
                    continue
                for rows in itertools.product(*row_space):
                    budget.spend()
                    if not canonical_under(stab, value_tab, rows, n_w):
                        continue
                    m = _build_model(
                        sig, bounds, interp, domain, worlds, indices, value_tab, rows
                    )
                    if bounds.frame == "metric":
                        from ..model import is_metric

                        if not is_metric(m, bounds.metric_bound):
                            continue
                    yield m


def _invariant_values(value_tab, iso_classes) -> bool:
    for values in value_tab:
        for cls in iso_classes:
            first = values[cls[0]]
            if any(values[w] != first for w in cls[1:]):
                return False
    return True


def _build_model(sig, bounds, interp, domain, worlds, indices, value_tab, rows):
    selector = selector_from_rows(rows, len(worlds))
    if bounds.semantics == "utility":
        utility = {
            x: tuple(bounds.levels[i] for i in values)
            for x, values in zip(indices, value_tab)
        }
        return UtilityModel(
            sig=sig, domain=domain, worlds=worlds, predicates=dict(interp),
            utility=utility, selector=selector,
        )
    ranks = {x: tuple(values) for x, values in zip(indices, value_tab)}
    return PreorderModel(
        sig=sig, domain=domain, worlds=worlds, predicates=dict(interp),
        ranks=ranks, selector=selector,
    )


def _generalized_models(sig, bounds, interp, stab, domain, worlds, indices, budget):
    n_w = len(worlds)
    n_levels = len(bounds.levels)
    n_masks = (1 << n_w) - 1
    # one rank table per (index set, world); ranks over all nonempty masks
    tables_space = list(itertools.product(range(n_levels), repeat=n_masks))
    for combo in itertools.product(tables_space, repeat=len(indices) * n_w):
        budget.spend()
        if not _canonical_generalized(stab, combo, len(indices), n_w):
            continue
        ranking = {}
        i = 0
        for x in indices:
            per_world = []
            for w in range(n_w):
                table = {mask: combo[i][mask - 1] for mask in range(1, n_masks + 1)}
                per_world.append(table)
                i += 1
            ranking[x] = tuple(per_world)
        yield GeneralizedModel(
            sig=sig, domain=domain, worlds=worlds, predicates=dict(interp),
            ranking=ranking,
        )


def _canonical_generalized(stab, combo, n_indices: int, n_w: int) -> bool:
    if len(stab) <= 1:
        return True
    enc = combo
    for wperm in stab:
        if wperm == tuple(range(n_w)):
            continue
        out = []
        for xi in range(n_indices):
            block = [None] * n_w
            for w in range(n_w):
                src = combo[xi * n_w + w]
                table = [0] * ((1 << n_w) - 1)
                for mask in range(1, 1 << n_w):
                    table[permute_mask(mask, wperm) - 1] = src[mask - 1]
                block[wperm[w]] = tuple(table)
            out.extend(block)
        if tuple(out) < enc:
            return False
    return True
