"""Signatures, terms and formulas for quantified preference logic.

The core language has atoms, equality, negation, conjunction, existential
quantification and the indexed weak-preference connective ``Geq`` (ASCII
``>=[i,j,...]``).  Everything else (``forall``, ``|``, ``->``, ``<->``,
``true``, ``false`` and the strict/indifferent/converse preference
operators) is surface sugar that :func:`expand` rewrites away.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


RESERVED = frozenset({"exists", "forall", "true", "false"})

_VAR_ALIASES = {"x": 0, "y": 1, "z": 2}
_VAR_PATTERN = re.compile(r"v(\d+)$")
_IDENT_PATTERN = re.compile(r"[A-Za-z][A-Za-z0-9_]*$")


class FormulaError(ValueError):
    """A formula or signature violates a structural constraint."""


class ParseError(FormulaError):
    """Concrete-syntax error, with the offset of the offending token."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


def _is_variable_name(name: str) -> bool:
    return name in _VAR_ALIASES or _VAR_PATTERN.match(name) is not None


@dataclass(frozen=True)
class Signature:
    """Vocabulary (predicates/functions with arities) plus the family of
    utility-index sets that parameterize the preference connectives."""

    predicates: dict[str, int] = field(default_factory=dict)
    functions: dict[str, int] = field(default_factory=dict)
    indices: frozenset[frozenset[int]] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "predicates", dict(self.predicates))
        object.__setattr__(self, "functions", dict(self.functions))
        object.__setattr__(
            self, "indices", frozenset(frozenset(x) for x in self.indices)
        )
        if not self.indices:
            raise FormulaError("index family must be nonempty")
        for x in self.indices:
            if not x:
                raise FormulaError("index sets must be nonempty")
            if any(i < 0 for i in x):
                raise FormulaError("index sets contain naturals only")
        overlap = self.predicates.keys() & self.functions.keys()
        if overlap:
            raise FormulaError(f"predicate/function names overlap: {sorted(overlap)}")
        for name, arity in list(self.predicates.items()) + list(self.functions.items()):
            if not _IDENT_PATTERN.match(name):
                raise FormulaError(f"bad symbol name {name!r}")
            if name in RESERVED or _is_variable_name(name):
                raise FormulaError(f"symbol name {name!r} is reserved")
            if name == "=":
                raise FormulaError("the identity sign is built in")
            if arity < 0:
                raise FormulaError(f"negative arity for {name!r}")

    def canonical_index(self) -> frozenset[int]:
        """The least index set in lexicographic order of sorted elements."""
        return min(self.indices, key=lambda x: tuple(sorted(x)))


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    index: int

    def __str__(self):
        return f"v{self.index}"


@dataclass(frozen=True)
class App:
    func: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.func
        return f"{self.func}({', '.join(str(a) for a in self.args)})"


Term = Var | App


# ---------------------------------------------------------------------------
# Formulas: core constructors first, then surface sugar
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()


@dataclass(frozen=True)
class Equals:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Geq:
    """Weak preference between two formulas, aggregated over an index set."""

    index: frozenset[int]
    left: "Formula"
    right: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "index", frozenset(self.index))


# surface-only nodes

@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Gt:
    index: frozenset[int]
    left: "Formula"
    right: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "index", frozenset(self.index))


@dataclass(frozen=True)
class Equiv:
    index: frozenset[int]
    left: "Formula"
    right: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "index", frozenset(self.index))


@dataclass(frozen=True)
class Leq:
    index: frozenset[int]
    left: "Formula"
    right: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "index", frozenset(self.index))


@dataclass(frozen=True)
class Lt:
    index: frozenset[int]
    left: "Formula"
    right: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "index", frozenset(self.index))


Formula = (
    Atom | Equals | Not | And | Exists | Geq
    | Or | Implies | Iff | Forall | Top | Bottom | Gt | Equiv | Leq | Lt
)

CORE_NODES = (Atom, Equals, Not, And, Exists, Geq)
MODAL_NODES = (Geq, Gt, Equiv, Leq, Lt)


def is_core(f: Formula) -> bool:
    """True when only core constructors occur."""
    if isinstance(f, (Atom, Equals)):
        return True
    if isinstance(f, Not):
        return is_core(f.body)
    if isinstance(f, And):
        return is_core(f.left) and is_core(f.right)
    if isinstance(f, Exists):
        return is_core(f.body)
    if isinstance(f, Geq):
        return is_core(f.left) and is_core(f.right)
    return False


# ---------------------------------------------------------------------------
# Expansion of surface sugar into core syntax
# ---------------------------------------------------------------------------

# true expands with the fixed fresh variable v0, for determinism
_TOP_CORE = Not(Exists(Var(0), Not(Equals(Var(0), Var(0)))))


def expand(f: Formula) -> Formula:
    """Rewrite every abbreviation into the core constructors.

    Each rewrite follows the abbreviation table literally (double negations
    introduced by the table are kept).  Idempotent on core formulas.
    """
    if isinstance(f, (Atom, Equals)):
        return f
    if isinstance(f, Not):
        return Not(expand(f.body))
    if isinstance(f, And):
        return And(expand(f.left), expand(f.right))
    if isinstance(f, Exists):
        return Exists(f.var, expand(f.body))
    if isinstance(f, Geq):
        return Geq(f.index, expand(f.left), expand(f.right))
    if isinstance(f, Forall):
        return Not(Exists(f.var, Not(expand(f.body))))
    if isinstance(f, Or):
        return Not(And(Not(expand(f.left)), Not(expand(f.right))))
    if isinstance(f, Implies):
        return expand(Or(Not(f.left), f.right))
    if isinstance(f, Iff):
        return And(expand(Implies(f.left, f.right)), expand(Implies(f.right, f.left)))
    if isinstance(f, Gt):
        l, r = expand(f.left), expand(f.right)
        return And(Geq(f.index, l, r), Not(Geq(f.index, r, l)))
    if isinstance(f, Equiv):
        l, r = expand(f.left), expand(f.right)
        return And(Geq(f.index, l, r), Geq(f.index, r, l))
    if isinstance(f, Leq):
        return Geq(f.index, expand(f.right), expand(f.left))
    if isinstance(f, Lt):
        return expand(Gt(f.index, f.right, f.left))
    if isinstance(f, Top):
        return _TOP_CORE
    if isinstance(f, Bottom):
        return Not(_TOP_CORE)
    raise FormulaError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Structural measures
# ---------------------------------------------------------------------------

def modal_depth(f: Formula) -> int:
    """Nesting count of preference connectives; non-modal formulas are 0."""
    if isinstance(f, (Atom, Equals, Top, Bottom)):
        return 0
    if isinstance(f, Not):
        return modal_depth(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, (Exists, Forall)):
        return modal_depth(f.body)
    if isinstance(f, MODAL_NODES):
        return 1 + max(modal_depth(f.left), modal_depth(f.right))
    raise FormulaError(f"not a formula: {f!r}")


def term_variables(t: Term) -> set[Var]:
    if isinstance(t, Var):
        return {t}
    out: set[Var] = set()
    for a in t.args:
        out |= term_variables(a)
    return out


def free_variables(f: Formula) -> set[Var]:
    """Free variables; preference connectives bind nothing."""
    if isinstance(f, Atom):
        out: set[Var] = set()
        for t in f.args:
            out |= term_variables(t)
        return out
    if isinstance(f, Equals):
        return term_variables(f.left) | term_variables(f.right)
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_variables(f.body) - {f.var}
    if isinstance(f, MODAL_NODES):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, (Top, Bottom)):
        return set()
    raise FormulaError(f"not a formula: {f!r}")


def is_closed(f: Formula) -> bool:
    return not free_variables(f)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def _index_text(x: frozenset[int]) -> str:
    return ",".join(str(i) for i in sorted(x))


_MODAL_TOKENS = {Geq: ">=", Gt: ">", Equiv: "~=", Leq: "<=", Lt: "<"}


def format_formula(f: Formula) -> str:
    """Concrete syntax; ``parse`` of the result expands to the same core
    formula.  Binary and modal nodes are always parenthesized."""
    if isinstance(f, Atom):
        return f"{f.pred}({', '.join(str(a) for a in f.args)})" if f.args else f"{f.pred}()"
    if isinstance(f, Equals):
        return f"{f.left} = {f.right}"
    if isinstance(f, Not):
        body = format_formula(f.body)
        if isinstance(f.body, Equals):
            body = f"({body})"
        return f"~{body}"
    if isinstance(f, And):
        return f"({format_formula(f.left)} & {format_formula(f.right)})"
    if isinstance(f, Or):
        return f"({format_formula(f.left)} | {format_formula(f.right)})"
    if isinstance(f, Implies):
        return f"({format_formula(f.left)} -> {format_formula(f.right)})"
    if isinstance(f, Iff):
        return f"({format_formula(f.left)} <-> {format_formula(f.right)})"
    if isinstance(f, Exists):
        return f"exists {f.var} {format_formula(f.body)}"
    if isinstance(f, Forall):
        return f"forall {f.var} {format_formula(f.body)}"
    if isinstance(f, MODAL_NODES):
        op = _MODAL_TOKENS[type(f)]
        return (
            f"({format_formula(f.left)} {op}[{_index_text(f.index)}] "
            f"{format_formula(f.right)})"
        )
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    raise FormulaError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<nat>\d+)"
    r"|(?P<op><->|->|>=|<=|~=|>|<|=|&|\||~|\(|\)|\[|\]|,))"
)

_MODAL_OPS = {">=": Geq, ">": Gt, "~=": Equiv, "<=": Leq, "<": Lt}


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | nat | op | end
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == m.start():
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ParseError(f"unexpected character {stripped[0]!r}", at)
        if m.group("ident"):
            tokens.append(_Token("ident", m.group("ident"), m.start("ident")))
        elif m.group("nat"):
            tokens.append(_Token("nat", m.group("nat"), m.start("nat")))
        else:
            tokens.append(_Token("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.tokens = _tokenize(text)
        self.sig = sig
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.take()
        if tok.text != text:
            got = tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {got!r}", tok.pos)
        return tok

    # formula := quant | iff   (quantifiers also allowed under ~ and after
    # binary connectives; see the round-trip note in the module docstring)
    def formula(self) -> Formula:
        return self.iff()

    def iff(self) -> Formula:
        left = self.imp()
        if self.peek().text == "<->":
            self.take()
            return Iff(left, self.iff())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek().text == "->":
            self.take()
            return Implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek().text == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.neg()
        while self.peek().text == "&":
            self.take()
            left = And(left, self.neg())
        return left

    def neg(self) -> Formula:
        tok = self.peek()
        if tok.text == "~":
            self.take()
            return Not(self.neg())
        if tok.text in ("exists", "forall"):
            return self.quant()
        return self.atom()

    def quant(self) -> Formula:
        kw = self.take()
        var_tok = self.take()
        if var_tok.kind != "ident":
            raise ParseError("expected a variable after quantifier", var_tok.pos)
        var = self._variable(var_tok)
        body = self.formula()
        return Exists(var, body) if kw.text == "exists" else Forall(var, body)

    def _variable(self, tok: _Token) -> Var:
        if tok.text in _VAR_ALIASES:
            return Var(_VAR_ALIASES[tok.text])
        m = _VAR_PATTERN.match(tok.text)
        if m:
            return Var(int(m.group(1)))
        raise ParseError(f"unknown variable {tok.text!r}", tok.pos)

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.text == "(":
            self.take()
            inner = self.formula()
            nxt = self.peek()
            if nxt.text in _MODAL_OPS:
                self.take()
                index = self._index_list(nxt)
                right = self.formula()
                self.expect(")")
                return _MODAL_OPS[nxt.text](index, inner, right)
            self.expect(")")
            return inner
        if tok.text == "true":
            self.take()
            return Top()
        if tok.text == "false":
            self.take()
            return Bottom()
        if tok.kind == "ident" and tok.text in self.sig.predicates:
            return self._predicate()
        # otherwise this must start a term of an equality
        left = self.term()
        self.expect("=")
        right = self.term()
        return Equals(left, right)

    def _index_list(self, op_tok: _Token) -> frozenset[int]:
        self.expect("[")
        nums = []
        while True:
            tok = self.take()
            if tok.kind != "nat":
                raise ParseError("expected a natural number in index list", tok.pos)
            nums.append(int(tok.text))
            if self.peek().text == ",":
                self.take()
                continue
            break
        self.expect("]")
        index = frozenset(nums)
        if index not in self.sig.indices:
            raise ParseError(
                f"index set {{{_index_text(index)}}} not in the signature", op_tok.pos
            )
        return index

    def _predicate(self) -> Atom:
        tok = self.take()
        name = tok.text
        self.expect("(")
        args: list[Term] = []
        if self.peek().text != ")":
            while True:
                args.append(self.term())
                if self.peek().text == ",":
                    self.take()
                    continue
                break
        self.expect(")")
        arity = self.sig.predicates[name]
        if len(args) != arity:
            raise ParseError(
                f"predicate {name!r} expects {arity} arguments, got {len(args)}",
                tok.pos,
            )
        return Atom(name, tuple(args))

    def term(self) -> Term:
        tok = self.take()
        if tok.kind != "ident":
            got = tok.text or "end of input"
            raise ParseError(f"expected a term, found {got!r}", tok.pos)
        name = tok.text
        if name in self.sig.functions:
            arity = self.sig.functions[name]
            args: list[Term] = []
            if self.peek().text == "(":
                self.take()
                if self.peek().text != ")":
                    while True:
                        args.append(self.term())
                        if self.peek().text == ",":
                            self.take()
                            continue
                        break
                self.expect(")")
            if len(args) != arity:
                raise ParseError(
                    f"function {name!r} expects {arity} arguments, got {len(args)}",
                    tok.pos,
                )
            return App(name, tuple(args))
        if _is_variable_name(name):
            return self._variable(tok)
        raise ParseError(f"unknown predicate or function {name!r}", tok.pos)


def parse(text: str, sig: Signature) -> Formula:
    """Parse concrete syntax into a surface formula (sugar preserved)."""
    parser = _Parser(text, sig)
    f = parser.formula()
    tok = parser.peek()
    if tok.kind != "end":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)
    return f


# ---------------------------------------------------------------------------
# Embedding of one-binary-relation first-order sentences
# ---------------------------------------------------------------------------

def kripke_embed(
    f: Formula,
    index: frozenset[int],
    relation: str = "R",
    left_pred: str = "P",
    right_pred: str = "Q",
) -> Formula:
    """Replace every atom ``R(s, t)`` with the possibility claim over
    ``P(s) & Q(t)``, leaving all other structure (including equality
    atoms) unchanged.  The input must be non-modal and mention no
    predicate besides the designated binary relation."""
    index = frozenset(index)

    def walk(g: Formula) -> Formula:
        if isinstance(g, Atom):
            if g.pred != relation or len(g.args) != 2:
                raise FormulaError(
                    f"embedding input may only use binary {relation!r}, got {g.pred!r}"
                )
            marked = And(Atom(left_pred, (g.args[0],)), Atom(right_pred, (g.args[1],)))
            return Geq(index, marked, marked)
        if isinstance(g, Equals):
            return g
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, And):
            return And(walk(g.left), walk(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, walk(g.body))
        raise FormulaError(f"embedding input must be a core non-modal formula: {g!r}")

    return walk(f)
