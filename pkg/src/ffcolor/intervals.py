"""Open and closed unit-length intervals with exact rational endpoints."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, Sequence, Union

import numpy as np

Rational = Fraction
RationalLike = Union[Fraction, int, str]


class ContractViolation(ValueError):
    """Raised when an operation is called outside its precondition."""


class Kind(enum.Enum):
    OPEN = "open"
    CLOSED = "closed"

    @classmethod
    def parse(cls, text: str) -> "Kind":
        return cls(text.strip().lower())


class NeighborClass(enum.Enum):
    TWINS_OF_X = "twins"
    LMR = "lmr"
    NLMR = "nlmr"
    NOT_NEIGHBOR = "none"


def as_rational(value: RationalLike) -> Fraction:
    if isinstance(value, float):
        raise TypeError("float endpoints are not exact; pass a Fraction, int or string")
    return Fraction(value)


@dataclass(frozen=True)
class Interval:
    """A unit interval ``(left, left+1)`` or ``[left, left+1]``.

    ``id`` is the arrival index inside the owning :class:`Instance`.
    """

    id: int
    left: Fraction
    kind: Kind

    def __post_init__(self):
        if not isinstance(self.left, Fraction):
            object.__setattr__(self, "left", as_rational(self.left))

    @property
    def right(self) -> Fraction:
        return self.left + 1

    @property
    def closed(self) -> bool:
        return self.kind is Kind.CLOSED

    def shifted(self, offset: RationalLike) -> "Interval":
        return Interval(self.id, self.left + as_rational(offset), self.kind)

    def __str__(self) -> str:
        if self.closed:
            return f"[{self.left},{self.right}]"
        return f"({self.left},{self.right})"


def intersects(a: Interval, b: Interval) -> bool:
    d = abs(a.left - b.left)
    return d < 1 or (d == 1 and a.closed and b.closed)


def is_twin(a: Interval, b: Interval) -> bool:
    if a.id == b.id:
        raise ContractViolation("an interval is not its own twin")
    return a.left == b.left and a.kind is b.kind


def classify_neighbor(x: Interval, i: Interval) -> NeighborClass:
    """Place ``i`` into the twins / LMR / NLMR partition of the closed interval ``x``."""
    if not x.closed:
        raise ContractViolation("the LMR partition is only defined for a closed x")
    if i.id == x.id:
        raise ContractViolation("x is not classified relative to itself")
    if not intersects(x, i):
        return NeighborClass.NOT_NEIGHBOR
    offset = i.left - x.left
    if offset == 0 and i.closed:
        return NeighborClass.TWINS_OF_X
    if (offset == 0 and not i.closed) or (abs(offset) == 1 and i.closed):
        return NeighborClass.LMR
    return NeighborClass.NLMR


@dataclass(frozen=True)
class Instance:
    """Arrival-ordered intervals; ``intervals[j].id == j``."""

    intervals: tuple[Interval, ...]

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))
        for j, iv in enumerate(self.intervals):
            if iv.id != j:
                raise ContractViolation(f"interval at position {j} has id {iv.id}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[RationalLike, Union[Kind, str]]]) -> "Instance":
        """Build from ``(left, kind)`` pairs in arrival order."""
        out = []
        for j, (left, kind) in enumerate(pairs):
            if not isinstance(kind, Kind):
                kind = Kind.parse(kind)
            out.append(Interval(j, as_rational(left), kind))
        return cls(tuple(out))

    @classmethod
    def parse_short(cls, *tokens: str) -> "Instance":
        """Shorthand used in notebooks and tests: ``"[0"`` is ``[0,1]``, ``"(1/2"`` is ``(1/2,3/2)``."""
        pairs = []
        for tok in tokens:
            tok = tok.strip()
            kind = {"[": Kind.CLOSED, "(": Kind.OPEN}[tok[0]]
            pairs.append((Fraction(tok[1:].split(",")[0]), kind))
        return cls.from_pairs(pairs)

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __getitem__(self, j: int) -> Interval:
        return self.intervals[j]

    def pairs(self) -> list[tuple[Fraction, Kind]]:
        return [(iv.left, iv.kind) for iv in self.intervals]

    def extended(self, left: RationalLike, kind: Kind) -> "Instance":
        return Instance(self.intervals + (Interval(len(self), as_rational(left), kind),))

    def shifted(self, offset: RationalLike) -> "Instance":
        return Instance(tuple(iv.shifted(offset) for iv in self.intervals))

    @cached_property
    def is_integral(self) -> bool:
        return all(iv.left.denominator == 1 for iv in self.intervals)

    @cached_property
    def scaled(self) -> tuple[int, tuple[int, ...], tuple[bool, ...]]:
        """Common denominator ``D`` and the integer left endpoints ``left*D``.

        Unit length becomes ``D`` on this scale, so intersection tests run on ints.
        """
        den = lcm(*(iv.left.denominator for iv in self.intervals)) if self.intervals else 1
        lefts = tuple(int(iv.left * den) for iv in self.intervals)
        return den, lefts, tuple(iv.closed for iv in self.intervals)

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Boolean intersection matrix with a false diagonal."""
        den, lefts, closed = self.scaled
        n = len(lefts)
        if n == 0:
            return np.zeros((0, 0), dtype=bool)
        big = max(abs(v) for v in lefts) + den
        arr = np.array(lefts, dtype=np.int64 if big < 2**62 else object)
        cl = np.array(closed, dtype=bool)
        d = np.abs(arr[:, None] - arr[None, :])
        adj = (d < den) | ((d == den) & cl[:, None] & cl[None, :])
        adj = np.asarray(adj, dtype=bool)
        np.fill_diagonal(adj, False)
        adj.setflags(write=False)
        return adj


def instance_of(intervals: Sequence[Interval]) -> Instance:
    """Renumber arbitrary intervals into a fresh instance, keeping their order."""
    return Instance(tuple(Interval(j, iv.left, iv.kind) for j, iv in enumerate(intervals)))
