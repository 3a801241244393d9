"""Bounds, verdicts and budget control for bounded model search."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..model import Model


FRAME_CLASSES = ("all", "reflexive", "transitive", "metric", "invariant")
SEMANTICS = ("utility", "preorder", "generalized")

DEFAULT_LEVELS = (Fraction(0), Fraction(1, 2), Fraction(1))


class BudgetExceededError(RuntimeError):
    """The enumeration would exceed the configured candidate budget; the
    verdict is withheld rather than silently truncated."""

    def __init__(self, stage: str, candidates: int, budget: int):
        super().__init__(
            f"budget exceeded during {stage}: {candidates} candidates > {budget}"
        )
        self.stage = stage
        self.candidates = candidates
        self.budget = budget


@dataclass(frozen=True)
class Bounds:
    max_worlds: int = 3
    max_domain: int = 2
    levels: tuple[Fraction, ...] = DEFAULT_LEVELS
    frame: str = "all"
    metric_bound: int = 3
    semantics: str = "utility"
    budget: int = 50_000_000

    def __post_init__(self):
        if self.max_worlds < 1 or self.max_domain < 1:
            raise ValueError("bounds must be at least 1")
        if len(self.levels) < 1:
            raise ValueError("at least one utility level is required")
        if self.frame not in FRAME_CLASSES:
            raise ValueError(f"unknown frame class {self.frame!r}")
        if self.semantics not in SEMANTICS:
            raise ValueError(f"unknown semantics {self.semantics!r}")
        if self.semantics == "generalized" and self.frame != "all":
            raise ValueError("generalized models have no selector frame classes")
        object.__setattr__(self, "levels", tuple(Fraction(v) for v in self.levels))


@dataclass(frozen=True)
class SatisfiedBy:
    model: Model
    world: str
    assignment: dict
    candidates: int = 0

    kind = "satisfied"


@dataclass(frozen=True)
class NoModelWithinBounds:
    candidates: int = 0

    kind = "no-model"


@dataclass(frozen=True)
class ValidWithinBounds:
    candidates: int = 0

    kind = "valid"


@dataclass(frozen=True)
class CounterexampleAt:
    model: Model
    world: str
    assignment: dict
    candidates: int = 0

    kind = "counterexample"


Verdict = SatisfiedBy | NoModelWithinBounds | ValidWithinBounds | CounterexampleAt


class _Budget:
    """Mutable raw-candidate counter shared across enumeration stages."""

    __slots__ = ("limit", "stage", "count")

    def __init__(self, limit: int, stage: str):
        self.limit = limit
        self.stage = stage
        self.count = 0

    def spend(self, amount: int = 1) -> None:
        self.count += amount
        if self.count > self.limit:
            raise BudgetExceededError(self.stage, self.count, self.limit)
