"""Compilation of closed core formulas into fast evaluators for the
enumeration sweeps.

Two targets share the non-modal machinery:

* :func:`compile_prop` produces a closure computing the full denotation
  mask given value tables and complete selector rows (any modal depth);
* :func:`compile_member` produces a vantage-world membership test that
  reads only the vantage world's selector row (modal depth at most one),
  reporting exactly which masks it queries so sweeps can enumerate
  selector restrictions instead of full tables.

Both are cross-checked against the reference evaluator in the test suite;
value tables may carry level indices or ranks, since only the induced
order enters the comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..model import mask_worlds
from ..syntax import And, Atom, Equals, Exists, Formula, Geq, Not, Signature, Var


class CompileError(ValueError):
    pass


@dataclass
class InterpContext:
    """Fixed interpretation skeleton: world/domain sizes plus predicate
    extensions, enough to denote every non-modal subformula."""

    sig: Signature
    interp: dict
    n_w: int
    n_d: int
    index_pos: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.index_pos:
            ordered = sorted(self.sig.indices, key=lambda x: tuple(sorted(x)))
            self.index_pos = {x: i for i, x in enumerate(ordered)}

    @property
    def full(self) -> int:
        return (1 << self.n_w) - 1

    def nonmodal_mask(self, f: Formula, d: dict) -> int:
        key = (f, tuple(sorted(d.items())))
        got = self._cache.get(key)
        if got is not None:
            return got
        if isinstance(f, Atom):
            row = tuple(d.get(t.index, 0) if isinstance(t, Var) else self._bad(t)
                        for t in f.args)
            mask = 0
            for w in range(self.n_w):
                if row in self.interp[f.pred][w]:
                    mask |= 1 << w
        elif isinstance(f, Equals):
            lv = d.get(f.left.index, 0) if isinstance(f.left, Var) else self._bad(f.left)
            rv = d.get(f.right.index, 0) if isinstance(f.right, Var) else self._bad(f.right)
            mask = self.full if lv == rv else 0
        elif isinstance(f, Not):
            mask = self.nonmodal_mask(f.body, d) ^ self.full
        elif isinstance(f, And):
            mask = self.nonmodal_mask(f.left, d) & self.nonmodal_mask(f.right, d)
        elif isinstance(f, Exists):
            mask = 0
            for e in range(self.n_d):
                d2 = dict(d)
                d2[f.var.index] = e
                mask |= self.nonmodal_mask(f.body, d2)
                if mask == self.full:
                    break
        else:
            raise CompileError(f"modal node where a non-modal formula was expected: {f!r}")
        self._cache[key] = mask
        return mask

    @staticmethod
    def _bad(t):
        raise CompileError("compiled sweeps support function-free signatures only")


# ---------------------------------------------------------------------------
# Full-proposition target
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompiledProp:
    """Denotation as a function of (value tables, selector rows); constant
    formulas carry their mask directly."""

    const: int | None
    fn: object  # fn(uvals, srows) -> int


def _prop_const(mask: int) -> CompiledProp:
    return CompiledProp(mask, None)


def prop_mask(cp: CompiledProp, uvals, srows) -> int:
    return cp.const if cp.const is not None else cp.fn(uvals, srows)


def compile_prop(f: Formula, ctx: InterpContext, d: dict | None = None) -> CompiledProp:
    d = d or {}
    full = ctx.full
    n_w = ctx.n_w
    if isinstance(f, (Atom, Equals)):
        return _prop_const(ctx.nonmodal_mask(f, d))
    if isinstance(f, Not):
        body = compile_prop(f.body, ctx, d)
        if body.const is not None:
            return _prop_const(body.const ^ full)
        bfn = body.fn
        return CompiledProp(None, lambda uv, sr: bfn(uv, sr) ^ full)
    if isinstance(f, And):
        left = compile_prop(f.left, ctx, d)
        right = compile_prop(f.right, ctx, d)
        if left.const == 0 or right.const == 0:
            return _prop_const(0)
        if left.const is not None and right.const is not None:
            return _prop_const(left.const & right.const)
        lf, rf = left.fn, right.fn
        if left.const is not None:
            lc = left.const
            return CompiledProp(None, lambda uv, sr: lc & rf(uv, sr))
        if right.const is not None:
            rc = right.const
            return CompiledProp(None, lambda uv, sr: lf(uv, sr) & rc)
        return CompiledProp(None, lambda uv, sr: lf(uv, sr) & rf(uv, sr))
    if isinstance(f, Exists):
        variants = []
        mask = 0
        for e in range(ctx.n_d):
            d2 = dict(d)
            d2[f.var.index] = e
            child = compile_prop(f.body, ctx, d2)
            if child.const is not None:
                mask |= child.const
            else:
                variants.append(child.fn)
        if not variants:
            return _prop_const(mask)
        if mask == full:
            return _prop_const(full)
        def union(uv, sr, variants=tuple(variants), base=mask, full=full):
            out = base
            for vf in variants:
                out |= vf(uv, sr)
                if out == full:
                    break
            return out
        return CompiledProp(None, union)
    if isinstance(f, Geq):
        xi = ctx.index_pos.get(f.index)
        if xi is None:
            raise CompileError(f"index set {set(f.index)} not in the signature")
        left = compile_prop(f.left, ctx, d)
        right = compile_prop(f.right, ctx, d)
        if left.const == 0 or right.const == 0:
            return _prop_const(0)
        rng = range(n_w)
        if left.const is not None and right.const is not None:
            a, b = left.const, right.const
            def fixed(uv, sr, a=a, b=b, xi=xi, rng=rng):
                vals = uv[xi]
                out = 0
                for w in rng:
                    row = sr[w]
                    if vals[row[a]] >= vals[row[b]]:
                        out |= 1 << w
                return out
            return CompiledProp(None, fixed)
        lcp, rcp = left, right
        def dynamic(uv, sr, lcp=lcp, rcp=rcp, xi=xi, rng=rng):
            a = lcp.const if lcp.const is not None else lcp.fn(uv, sr)
            b = rcp.const if rcp.const is not None else rcp.fn(uv, sr)
            if a == 0 or b == 0:
                return 0
            vals = uv[xi]
            out = 0
            for w in rng:
                row = sr[w]
                if vals[row[a]] >= vals[row[b]]:
                    out |= 1 << w
            return out
        return CompiledProp(None, dynamic)
    raise CompileError(f"not a core formula node: {f!r}")


# ---------------------------------------------------------------------------
# Vantage-world membership target (modal depth at most one)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompiledMember:
    """Membership at a vantage world as a function of (world, vantage
    selector row, value tables); ``mask`` when independent of the
    selector.  ``queried`` lists the operand masks the closure reads."""

    mask: int | None
    fn: object  # fn(w, row, uvals) -> bool
    queried: frozenset[int]


def member_holds(cm: CompiledMember, w: int, row, uvals) -> bool:
    if cm.mask is not None:
        return bool(cm.mask >> w & 1)
    return cm.fn(w, row, uvals)


def compile_member(f: Formula, ctx: InterpContext, d: dict | None = None) -> CompiledMember:
    d = d or {}
    full = ctx.full
    if isinstance(f, (Atom, Equals)):
        return CompiledMember(ctx.nonmodal_mask(f, d), None, frozenset())
    if isinstance(f, Not):
        body = compile_member(f.body, ctx, d)
        if body.mask is not None:
            return CompiledMember(body.mask ^ full, None, frozenset())
        bfn = body.fn
        return CompiledMember(None, lambda w, row, uv: not bfn(w, row, uv), body.queried)
    if isinstance(f, And):
        left = compile_member(f.left, ctx, d)
        right = compile_member(f.right, ctx, d)
        if left.mask == 0 or right.mask == 0:
            return CompiledMember(0, None, frozenset())
        if left.mask is not None and right.mask is not None:
            return CompiledMember(left.mask & right.mask, None, frozenset())
        queried = left.queried | right.queried
        if left.mask is not None:
            lm, rf = left.mask, right.fn
            return CompiledMember(
                None, lambda w, row, uv: bool(lm >> w & 1) and rf(w, row, uv), queried
            )
        if right.mask is not None:
            rm, lf = right.mask, left.fn
            return CompiledMember(
                None, lambda w, row, uv: lf(w, row, uv) and bool(rm >> w & 1), queried
            )
        lf, rf = left.fn, right.fn
        return CompiledMember(
            None, lambda w, row, uv: lf(w, row, uv) and rf(w, row, uv), queried
        )
    if isinstance(f, Exists):
        fns = []
        mask = 0
        queried: frozenset[int] = frozenset()
        for e in range(ctx.n_d):
            d2 = dict(d)
            d2[f.var.index] = e
            child = compile_member(f.body, ctx, d2)
            if child.mask is not None:
                mask |= child.mask
            else:
                fns.append(child.fn)
                queried |= child.queried
        if not fns or mask == full:
            return CompiledMember(mask, None, frozenset())
        def any_variant(w, row, uv, fns=tuple(fns), mask=mask):
            if mask >> w & 1:
                return True
            for fn in fns:
                if fn(w, row, uv):
                    return True
            return False
        return CompiledMember(None, any_variant, queried)
    if isinstance(f, Geq):
        xi = ctx.index_pos.get(f.index)
        if xi is None:
            raise CompileError(f"index set {set(f.index)} not in the signature")
        a = ctx.nonmodal_mask(f.left, d)
        b = ctx.nonmodal_mask(f.right, d)
        if a == 0 or b == 0:
            return CompiledMember(0, None, frozenset())
        def compare(w, row, uv, a=a, b=b, xi=xi):
            vals = uv[xi]
            return vals[row[a]] >= vals[row[b]]
        return CompiledMember(None, compare, frozenset({a, b}))
    raise CompileError(f"not a core formula node: {f!r}")
