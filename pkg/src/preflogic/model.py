"""Explicit finite models in three flavors, frame-property checks, and
world isomorphism.

Worlds and domain elements are indexed internally; the string ids only
matter for I/O.  Propositions are bitsets over world indices.  Utilities
are exact rationals so that ties are exact.  Preorders over worlds are
stored as rank functions (higher rank = weakly better), which makes them
total preorders by construction.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .syntax import Signature


class ModelError(ValueError):
    """Malformed model data (construction or file format)."""


# ---------------------------------------------------------------------------
# Propositions (bitsets over world indices)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Proposition:
    mask: int
    width: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.width:
            raise ModelError(f"mask {self.mask:#x} out of range for width {self.width}")

    @staticmethod
    def empty(width: int) -> "Proposition":
        return Proposition(0, width)

    @staticmethod
    def full(width: int) -> "Proposition":
        return Proposition((1 << width) - 1, width)

    @staticmethod
    def from_worlds(indices, width: int) -> "Proposition":
        mask = 0
        for i in indices:
            mask |= 1 << i
        return Proposition(mask, width)

    def __and__(self, other: "Proposition") -> "Proposition":
        return Proposition(self.mask & other.mask, self.width)

    def __or__(self, other: "Proposition") -> "Proposition":
        return Proposition(self.mask | other.mask, self.width)

    def complement(self) -> "Proposition":
        return Proposition(self.mask ^ ((1 << self.width) - 1), self.width)

    def __contains__(self, world: int) -> bool:
        return bool(self.mask >> world & 1)

    def worlds(self):
        return (i for i in range(self.width) if self.mask >> i & 1)

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    @property
    def is_full(self) -> bool:
        return self.mask == (1 << self.width) - 1

    def count(self) -> int:
        return self.mask.bit_count()

    def __repr__(self):
        return f"Proposition({{{', '.join(str(i) for i in self.worlds())}}}, width={self.width})"


def mask_worlds(mask: int):
    """Indices of the set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---------------------------------------------------------------------------
# Assignments
# ---------------------------------------------------------------------------

class Assignment:
    """Total map from variable indices to domain-element indices, via a
    default element for unmentioned variables."""

    __slots__ = ("values", "default")

    def __init__(self, values=None, default: int = 0):
        self.values = dict(values) if values else {}
        self.default = default

    def value(self, var_index: int) -> int:
        return self.values.get(var_index, self.default)

    def set(self, var_index: int, element: int) -> "Assignment":
        """The variant differing from this assignment only at one variable."""
        out = dict(self.values)
        out[var_index] = element
        return Assignment(out, self.default)

    def restrict_key(self, var_indices) -> tuple:
        return tuple(sorted((v, self.value(v)) for v in var_indices))

    def __repr__(self):
        items = ", ".join(f"v{k}={v}" for k, v in sorted(self.values.items()))
        return f"Assignment({{{items}}}, default={self.default})"


# ---------------------------------------------------------------------------
# Selection functions
# ---------------------------------------------------------------------------

MAX_DENSE_WORLDS = 12


@dataclass(frozen=True)
class Selector:
    """Choice of one member from every nonempty set of worlds, per vantage
    world.  Either a dense table (small world sets) or a sparse table plus
    the deterministic min-index default (optionally reflexive first)."""

    n_worlds: int
    table: dict[tuple[int, int], int] = field(default_factory=dict)
    default_min_index: bool = False
    reflexive_default: bool = False

    def select(self, world: int, mask: int) -> int:
        if mask == 0:
            raise ModelError("selection from the empty proposition")
        got = self.table.get((world, mask))
        if got is not None:
            return got
        if self.default_min_index:
            if self.reflexive_default and mask >> world & 1:
                return world
            return (mask & -mask).bit_length() - 1
        raise ModelError(f"selector has no entry for world {world}, mask {mask:#x}")

    def is_total(self) -> bool:
        if self.default_min_index:
            return True
        full = (1 << self.n_worlds) - 1
        for w in range(self.n_worlds):
            for mask in range(1, full + 1):
                if (w, mask) not in self.table:
                    return False
        return True

    @staticmethod
    def from_function(n_worlds: int, fn) -> "Selector":
        if n_worlds > MAX_DENSE_WORLDS:
            raise ModelError(f"dense selector capped at {MAX_DENSE_WORLDS} worlds")
        table = {}
        for w in range(n_worlds):
            for mask in range(1, 1 << n_worlds):
                table[(w, mask)] = fn(w, mask)
        return Selector(n_worlds, table)

    @staticmethod
    def min_index(n_worlds: int) -> "Selector":
        return Selector(n_worlds, {}, default_min_index=True)

    @staticmethod
    def reflexive_min_index(n_worlds: int) -> "Selector":
        return Selector(n_worlds, {}, default_min_index=True, reflexive_default=True)

    @staticmethod
    def from_orders(orders: dict[int, tuple[int, ...]], n_worlds: int) -> "Selector":
        """Per-world choice by minimum of the given strict total orders
        (each order lists world indices from best to worst pick)."""
        position = {
            w: {world: i for i, world in enumerate(order)}
            for w, order in orders.items()
        }
        def fn(w, mask):
            return min(mask_worlds(mask), key=lambda v: position[w][v])
        return Selector.from_function(n_worlds, fn)


# ---------------------------------------------------------------------------
# Models
# ---------------------------------------------------------------------------

@dataclass
class ModelBase:
    sig: Signature
    domain: tuple[str, ...]
    worlds: tuple[str, ...]
    # predicate name -> per-world frozenset of element-index tuples
    predicates: dict[str, tuple[frozenset, ...]]
    # function name -> per-world graph {arg-index tuple -> element index}
    functions: dict[str, tuple[dict, ...]] = field(default_factory=dict)

    @property
    def n_worlds(self) -> int:
        return len(self.worlds)

    @property
    def n_domain(self) -> int:
        return len(self.domain)

    def world_index(self, world_id: str) -> int:
        try:
            return self.worlds.index(world_id)
        except ValueError:
            raise ModelError(f"unknown world {world_id!r}") from None

    def element_index(self, element_id: str) -> int:
        try:
            return self.domain.index(element_id)
        except ValueError:
            raise ModelError(f"unknown domain element {element_id!r}") from None

    def extension(self, pred: str, world: int) -> frozenset:
        try:
            return self.predicates[pred][world]
        except KeyError:
            raise ModelError(f"predicate {pred!r} not interpreted") from None

    def function_graph(self, func: str) -> dict:
        # rigid reading: validate() enforces identical graphs at all worlds
        try:
            return self.functions[func][0]
        except KeyError:
            raise ModelError(f"function {func!r} not interpreted") from None

    def iso_classes(self) -> list[list[int]]:
        """Worlds grouped by isomorphism (permutation of the domain mapping
        every symbol's extension onto the other world's)."""
        classes: list[list[int]] = []
        for w in range(self.n_worlds):
            for cls in classes:
                if self._isomorphic_indices(cls[0], w):
                    cls.append(w)
                    break
            else:
                classes.append([w])
        return classes

    def _isomorphic_indices(self, v: int, w: int) -> bool:
        if v == w:
            return True
        for perm in itertools.permutations(range(self.n_domain)):
            if self._maps_onto(v, w, perm):
                return True
        return False

    def _maps_onto(self, v: int, w: int, perm) -> bool:
        for name, per_world in self.predicates.items():
            mapped = {tuple(perm[i] for i in tup) for tup in per_world[v]}
            if mapped != set(per_world[w]):
                return False
        for name, per_world in self.functions.items():
            mapped = {
                tuple(perm[i] for i in args) + (perm[val],)
                for args, val in per_world[v].items()
            }
            have = {args + (val,) for args, val in per_world[w].items()}
            if mapped != have:
                return False
        return True


@dataclass
class UtilityModel(ModelBase):
    # index set -> per-world rational utility
    utility: dict[frozenset, tuple[Fraction, ...]] = field(default_factory=dict)
    selector: Selector = None

    kind = "utility"


@dataclass
class PreorderModel(ModelBase):
    # index set -> per-world rank (higher rank = weakly better)
    ranks: dict[frozenset, tuple[int, ...]] = field(default_factory=dict)
    selector: Selector = None

    kind = "preorder"


@dataclass
class GeneralizedModel(ModelBase):
    # index set -> per-world {nonempty mask -> rank}; higher rank = no earlier
    ranking: dict[frozenset, tuple[dict, ...]] = field(default_factory=dict)

    kind = "generalized"


Model = UtilityModel | PreorderModel | GeneralizedModel


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate(m: Model) -> list[str]:
    """All invariant violations, as data; empty means the model is sound."""
    out: list[str] = []
    if not m.domain:
        out.append("domain is empty")
    if not m.worlds:
        out.append("world set is empty")
    if len(set(m.domain)) != len(m.domain):
        out.append("duplicate domain element ids")
    if len(set(m.worlds)) != len(m.worlds):
        out.append("duplicate world ids")
    n, nd = m.n_worlds, m.n_domain

    if "=" in m.predicates:
        out.append("identity must not be stored in the interpretation")
    for name, arity in m.sig.predicates.items():
        per_world = m.predicates.get(name)
        if per_world is None or len(per_world) != n:
            out.append(f"interpretation of predicate {name!r} is not total")
            continue
        for w, ext in enumerate(per_world):
            for tup in ext:
                if len(tup) != arity or any(not 0 <= e < nd for e in tup):
                    out.append(f"bad tuple {tup} for {name!r} at world {w}")
    for name in m.predicates:
        if name not in m.sig.predicates:
            out.append(f"predicate {name!r} missing from the signature")

    for name, arity in m.sig.functions.items():
        per_world = m.functions.get(name)
        if per_world is None or len(per_world) != n:
            out.append(f"interpretation of function {name!r} is not total")
            continue
        want_args = set(itertools.product(range(nd), repeat=arity))
        for w, graph in enumerate(per_world):
            if set(graph.keys()) != want_args:
                out.append(f"function {name!r} graph not total at world {w}")
            elif any(not 0 <= v < nd for v in graph.values()):
                out.append(f"function {name!r} leaves the domain at world {w}")
        if any(per_world[w] != per_world[0] for w in range(n)):
            out.append(f"function {name!r} varies across worlds (rigid reading)")
    for name in m.functions:
        if name not in m.sig.functions:
            out.append(f"function {name!r} missing from the signature")

    if isinstance(m, UtilityModel):
        for x in m.sig.indices:
            vals = m.utility.get(frozenset(x))
            if vals is None or len(vals) != n:
                out.append(f"utility not total at index set {{{_fmt_index(x)}}}")
        _check_selector(m, out)
    elif isinstance(m, PreorderModel):
        for x in m.sig.indices:
            vals = m.ranks.get(frozenset(x))
            if vals is None or len(vals) != n:
                out.append(f"ranks not total at index set {{{_fmt_index(x)}}}")
            elif any(r < 0 for r in vals):
                out.append(f"negative rank at index set {{{_fmt_index(x)}}}")
        _check_selector(m, out)
    elif isinstance(m, GeneralizedModel):
        full = (1 << n) - 1
        for x in m.sig.indices:
            per_world = m.ranking.get(frozenset(x))
            if per_world is None or len(per_world) != n:
                out.append(f"proposition ranking not total at index set {{{_fmt_index(x)}}}")
                continue
            for w, table in enumerate(per_world):
                if set(table.keys()) != set(range(1, full + 1)):
                    out.append(
                        f"ranking at world {w}, index set {{{_fmt_index(x)}}} "
                        "does not cover every nonempty proposition"
                    )
    else:
        out.append(f"unknown model kind {type(m).__name__}")
    return out


def _fmt_index(x) -> str:
    return ",".join(str(i) for i in sorted(x))


def _check_selector(m, out: list[str]) -> None:
    s = m.selector
    if s is None:
        out.append("selector missing")
        return
    if s.n_worlds != m.n_worlds:
        out.append("selector world count mismatch")
        return
    for (w, mask), v in s.table.items():
        if not 0 <= w < m.n_worlds or mask <= 0 or mask >> m.n_worlds:
            out.append(f"selector entry ({w}, {mask:#x}) out of range")
        elif not mask >> v & 1:
            out.append(
                f"selector outside argument set: s({m.worlds[w]}, {mask:#x}) = {m.worlds[v]}"
            )
    if not s.default_min_index and not s.is_total():
        out.append("selector not total")


# ---------------------------------------------------------------------------
# Frame properties
# ---------------------------------------------------------------------------

def is_reflexive(m) -> bool:
    """Self-selection whenever the vantage world is available."""
    s = m.selector
    n = m.n_worlds
    for w in range(n):
        for mask in range(1, 1 << n):
            if mask >> w & 1 and s.select(w, mask) != w:
                return False
    return True


def is_transitive(m) -> bool:
    """Choice consistency across unions, checked exhaustively over all
    triples of subsets (the first two nonempty)."""
    s = m.selector
    n = m.n_worlds
    subsets = list(range(1, 1 << n))
    for w in range(n):
        choice = {mask: s.select(w, mask) for mask in subsets}
        for a in subsets:
            for b in subsets:
                ab = choice[a | b]
                if not a >> ab & 1:
                    continue
                for c in range(0, 1 << n):  # the third set may be empty
                    if not b >> choice[b | c] & 1:
                        continue
                    if choice[a | c] != ab:
                        return False
    return True


def is_order_rationalizable(m) -> tuple[bool, dict[int, tuple[int, ...]] | None]:
    """Whether each vantage world's choices are minima of one strict total
    order, with the witness orders (best pick first) when they exist."""
    s = m.selector
    n = m.n_worlds
    orders: dict[int, tuple[int, ...]] = {}
    for w in range(n):
        # pairwise choices reveal a tournament; rationalizability needs it
        # to be a linear order whose minima reproduce every choice
        beats = {(a, b): s.select(w, (1 << a) | (1 << b)) == a
                 for a in range(n) for b in range(n) if a != b}
        wins = {a: sum(beats[(a, b)] for b in range(n) if b != a) for a in range(n)}
        order = tuple(sorted(range(n), key=lambda a: -wins[a]))
        position = {world: i for i, world in enumerate(order)}
        for a in range(n):
            for b in range(n):
                if a != b and beats[(a, b)] != (position[a] < position[b]):
                    return False, None
        for mask in range(1, 1 << n):
            if s.select(w, mask) != min(mask_worlds(mask), key=position.__getitem__):
                return False, None
        orders[w] = order
    return True, orders


def find_metric_matrix(m, max_distance: int) -> list[list[int]] | None:
    """A symmetric integer matrix (zero diagonal, positive off-diagonal
    entries up to the bound, triangle inequality) under which every choice
    is the unique nearest available world, or None within the bound."""
    if max_distance < 1:
        raise ModelError("max_distance must be at least 1")
    s = m.selector
    n = m.n_worlds
    if n == 1:
        return [[0]]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def consistent(dist) -> bool:
        for i, j in pairs:
            for k in range(n):
                if k in (i, j):
                    continue
                if dist[i][j] > dist[i][k] + dist[k][j]:
                    return False
        for w in range(n):
            row = dist[w]
            for mask in range(1, 1 << n):
                members = list(mask_worlds(mask))
                best = min(members, key=lambda v: row[v])
                if any(v != best and row[v] == row[best] for v in members):
                    return False
                if s.select(w, mask) != best:
                    return False
        return True

    for combo in itertools.product(range(1, max_distance + 1), repeat=len(pairs)):
        dist = [[0] * n for _ in range(n)]
        for (i, j), d in zip(pairs, combo):
            dist[i][j] = dist[j][i] = d
        if consistent(dist):
            return dist
    return None


def is_metric(m, max_distance: int) -> bool:
    """Bounded verdict: False may only mean no witness within the bound."""
    return find_metric_matrix(m, max_distance) is not None


def are_isomorphic(m: Model, v: str, w: str) -> bool:
    """Whether some permutation of the domain carries every symbol's
    extension at one world onto the other's."""
    return m._isomorphic_indices(m.world_index(v), m.world_index(w))


def is_utility_invariant(m: UtilityModel) -> bool:
    """Isomorphic worlds receive equal utilities at every index set."""
    for cls in m.iso_classes():
        first = cls[0]
        for x, values in m.utility.items():
            if any(values[w] != values[first] for w in cls[1:]):
                return False
    return True


# ---------------------------------------------------------------------------
# Conversions between utility and preorder models
# ---------------------------------------------------------------------------

def realize_preorder(m: PreorderModel) -> UtilityModel:
    """Read the rank numbers as utilities; the induced weak order over
    worlds is unchanged, so every formula keeps its denotation."""
    utility = {
        x: tuple(Fraction(r) for r in values) for x, values in m.ranks.items()
    }
    return UtilityModel(
        sig=m.sig, domain=m.domain, worlds=m.worlds,
        predicates=m.predicates, functions=m.functions,
        utility=utility, selector=m.selector,
    )


def preorder_from_utility(m: UtilityModel) -> PreorderModel:
    """Rank worlds by utility (dense ranks, ties preserved)."""
    ranks = {}
    for x, values in m.utility.items():
        levels = sorted(set(values))
        level_rank = {v: i for i, v in enumerate(levels)}
        ranks[x] = tuple(level_rank[v] for v in values)
    return PreorderModel(
        sig=m.sig, domain=m.domain, worlds=m.worlds,
        predicates=m.predicates, functions=m.functions,
        ranks=ranks, selector=m.selector,
    )


# ---------------------------------------------------------------------------
# JSON file format
# ---------------------------------------------------------------------------

def _index_key(x) -> str:
    return ",".join(str(i) for i in sorted(x))


def _parse_index_key(key: str) -> frozenset:
    try:
        return frozenset(int(p) for p in key.split(","))
    except ValueError:
        raise ModelError(f"bad index-set key {key!r}") from None


def _parse_fraction(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise ModelError(f"bad rational {text!r}") from None


def model_to_dict(m: Model) -> dict:
    interp: dict = {}
    for w, world_id in enumerate(m.worlds):
        entry: dict = {}
        for name, per_world in sorted(m.predicates.items()):
            entry[name] = sorted([m.domain[i] for i in tup] for tup in per_world[w])
        for name, per_world in sorted(m.functions.items()):
            entry[name] = sorted(
                [m.domain[i] for i in args] + [m.domain[val]]
                for args, val in per_world[w].items()
            )
        interp[world_id] = entry
    doc: dict = {
        "domain": list(m.domain),
        "worlds": list(m.worlds),
        "interp": interp,
    }
    if isinstance(m, UtilityModel):
        doc["utility"] = {
            _index_key(x): {m.worlds[w]: str(v) for w, v in enumerate(values)}
            for x, values in sorted(m.utility.items(), key=lambda kv: sorted(kv[0]))
        }
    elif isinstance(m, PreorderModel):
        doc["preorder"] = {
            _index_key(x): {m.worlds[w]: r for w, r in enumerate(values)}
            for x, values in sorted(m.ranks.items(), key=lambda kv: sorted(kv[0]))
        }
    elif isinstance(m, GeneralizedModel):
        doc["generalized"] = {
            m.worlds[w]: {
                _index_key(x): {str(mask): rank for mask, rank in sorted(tables[w].items())}
                for x, tables in sorted(m.ranking.items(), key=lambda kv: sorted(kv[0]))
            }
            for w in range(m.n_worlds)
        }
    if not isinstance(m, GeneralizedModel):
        sel = m.selector
        doc["selector"] = {
            m.worlds[w]: [[mask, m.worlds[v]] for (ww, mask), v in
                          sorted(sel.table.items()) if ww == w]
            for w in range(m.n_worlds)
        }
        if sel.default_min_index:
            doc["selector_default"] = (
                "reflexive-min-index" if sel.reflexive_default else "min-index"
            )
    return doc


def _infer_signature(doc: dict) -> Signature:
    # convention when no signature is given: Uppercase-initial names are
    # predicates, lowercase-initial names are functions
    predicates: dict[str, int] = {}
    functions: dict[str, int] = {}
    for world_id, entry in doc.get("interp", {}).items():
        for name, rows in entry.items():
            is_pred = name[:1].isupper()
            for row in rows:
                arity = len(row) if is_pred else len(row) - 1
                table = predicates if is_pred else functions
                if table.setdefault(name, arity) != arity:
                    raise ModelError(f"inconsistent arity for {name!r}")
    for world_id, entry in doc.get("interp", {}).items():
        for name in entry:
            if name not in predicates and name not in functions:
                raise ModelError(
                    f"cannot infer the arity of {name!r} (empty everywhere); "
                    "pass an explicit signature"
                )
    keys: set[frozenset] = set()
    for section in ("utility", "preorder"):
        keys.update(_parse_index_key(k) for k in doc.get(section, {}))
    for per_world in doc.get("generalized", {}).values():
        keys.update(_parse_index_key(k) for k in per_world)
    if not keys:
        keys = {frozenset({1})}
    return Signature(predicates=predicates, functions=functions, indices=frozenset(keys))


def model_from_dict(doc: dict, sig: Signature | None = None) -> Model:
    flavors = [k for k in ("utility", "preorder", "generalized") if k in doc]
    if len(flavors) != 1:
        raise ModelError(
            "exactly one of utility/preorder/generalized must be present, "
            f"found {flavors or 'none'}"
        )
    for key in ("domain", "worlds", "interp"):
        if key not in doc:
            raise ModelError(f"missing key {key!r}")
    if sig is None:
        sig = _infer_signature(doc)
    domain = tuple(doc["domain"])
    worlds = tuple(doc["worlds"])
    if not domain or not worlds:
        raise ModelError("domain and worlds must be nonempty")
    elem = {e: i for i, e in enumerate(domain)}
    widx = {w: i for i, w in enumerate(worlds)}

    def elem_of(e):
        if e not in elem:
            raise ModelError(f"unknown domain element {e!r}")
        return elem[e]

    predicates = {
        name: [frozenset() for _ in worlds] for name in sig.predicates
    }
    functions = {name: [dict() for _ in worlds] for name in sig.functions}
    for world_id, entry in doc["interp"].items():
        if world_id not in widx:
            raise ModelError(f"unknown world {world_id!r} in interp")
        w = widx[world_id]
        for name, rows in entry.items():
            if name in sig.predicates:
                predicates[name][w] = frozenset(
                    tuple(elem_of(e) for e in row) for row in rows
                )
            elif name in sig.functions:
                graph = {}
                for row in rows:
                    if not row:
                        raise ModelError(f"empty function row for {name!r}")
                    graph[tuple(elem_of(e) for e in row[:-1])] = elem_of(row[-1])
                functions[name][w] = graph
            else:
                raise ModelError(f"symbol {name!r} not in the signature")
    predicates = {k: tuple(v) for k, v in predicates.items()}
    functions = {k: tuple(v) for k, v in functions.items()}

    selector = None
    if flavors[0] != "generalized":
        table: dict[tuple[int, int], int] = {}
        for world_id, entries in doc.get("selector", {}).items():
            if world_id not in widx:
                raise ModelError(f"unknown world {world_id!r} in selector")
            w = widx[world_id]
            for pair in entries:
                if len(pair) != 2:
                    raise ModelError(f"selector entries are [mask, world]: {pair!r}")
                mask, target = int(pair[0]), pair[1]
                if target not in widx:
                    raise ModelError(f"unknown world {target!r} in selector")
                table[(w, mask)] = widx[target]
        default = doc.get("selector_default")
        if default not in (None, "min-index", "reflexive-min-index"):
            raise ModelError(f"unknown selector default {default!r}")
        selector = Selector(
            n_worlds=len(worlds),
            table=table,
            default_min_index=default is not None,
            reflexive_default=default == "reflexive-min-index",
        )

    base = dict(sig=sig, domain=domain, worlds=worlds,
                predicates=predicates, functions=functions)
    if flavors[0] == "utility":
        utility = {}
        for key, per_world in doc["utility"].items():
            x = _parse_index_key(key)
            values = [Fraction(0)] * len(worlds)
            seen = set()
            for world_id, v in per_world.items():
                if world_id not in widx:
                    raise ModelError(f"unknown world {world_id!r} in utility")
                values[widx[world_id]] = _parse_fraction(v)
                seen.add(world_id)
            if len(seen) != len(worlds):
                raise ModelError(f"utility not total at index set {{{key}}}")
            utility[x] = tuple(values)
        return UtilityModel(**base, utility=utility, selector=selector)
    if flavors[0] == "preorder":
        ranks = {}
        for key, per_world in doc["preorder"].items():
            x = _parse_index_key(key)
            values = [0] * len(worlds)
            seen = set()
            for world_id, r in per_world.items():
                if world_id not in widx:
                    raise ModelError(f"unknown world {world_id!r} in preorder")
                values[widx[world_id]] = int(r)
                seen.add(world_id)
            if len(seen) != len(worlds):
                raise ModelError(f"ranks not total at index set {{{key}}}")
            ranks[x] = tuple(values)
        return PreorderModel(**base, ranks=ranks, selector=selector)
    ranking: dict[frozenset, list[dict]] = {}
    for world_id, per_index in doc["generalized"].items():
        if world_id not in widx:
            raise ModelError(f"unknown world {world_id!r} in generalized")
        w = widx[world_id]
        for key, table in per_index.items():
            x = _parse_index_key(key)
            ranking.setdefault(x, [dict() for _ in worlds])
            ranking[x][w] = {int(mask): int(rank) for mask, rank in table.items()}
    return GeneralizedModel(
        **base, ranking={x: tuple(tables) for x, tables in ranking.items()}
    )


def save_model(m: Model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(m), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path, sig: Signature | None = None) -> Model:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ModelError(f"malformed JSON in {path}: {e}") from None
    return model_from_dict(doc, sig)
