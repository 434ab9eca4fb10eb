"""FirstFit, clique number, optimal row decomposition and a brute-force oracle."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .intervals import ContractViolation, Instance, intersects


class EmptyInstanceError(ValueError):
    """omega is undefined for an instance with no intervals."""


class Algorithm(enum.Enum):
    FIRST_FIT = "ff"
    OPTIMAL_ROWS = "opt"
    BRUTE_FORCE = "brute"


@dataclass(frozen=True)
class Coloring:
    colors: tuple[int, ...]
    algorithm: Algorithm

    @property
    def num_colors(self) -> int:
        return max(self.colors, default=0)

    def __getitem__(self, j: int) -> int:
        return self.colors[j]

    def __len__(self) -> int:
        return len(self.colors)


@dataclass(frozen=True)
class RowDecomposition:
    """Color classes of an optimal offline coloring, one frozenset of ids per row."""

    rows: tuple[frozenset[int], ...]

    @cached_property
    def row_of(self) -> tuple[int, ...]:
        n = sum(len(r) for r in self.rows)
        out = [-1] * n
        for k, row in enumerate(self.rows):
            for j in row:
                out[j] = k
        return tuple(out)

    def __len__(self) -> int:
        return len(self.rows)

    def as_coloring(self) -> Coloring:
        return Coloring(tuple(k + 1 for k in self.row_of), Algorithm.OPTIMAL_ROWS)


def _mex(used: set[int]) -> int:
    c = 1
    while c in used:
        c += 1
    return c


def first_fit(instance: Instance) -> Coloring:
    adj = instance.adjacency
    colors: list[int] = []
    for j in range(len(instance)):
        earlier = np.flatnonzero(adj[j, :j])
        colors.append(_mex({colors[k] for k in earlier}))
    return Coloring(tuple(colors), Algorithm.FIRST_FIT)


def arrival_neighborhood(instance: Instance, j: int) -> frozenset[int]:
    """Ids of intervals that arrived before ``j`` and intersect it."""
    if not 0 <= j < len(instance):
        raise ContractViolation(f"id {j} out of range")
    return frozenset(int(k) for k in np.flatnonzero(instance.adjacency[j, :j]))


def neighborhood(instance: Instance, j: int) -> frozenset[int]:
    """Final neighborhood: every other interval meeting ``j``."""
    return frozenset(int(k) for k in np.flatnonzero(instance.adjacency[j]))


# Event order at one coordinate t. Closed-start before closed-end because [s,t] and
# [t,u] share t; every meeting that involves an open end at t is empty.
_OPEN_END, _CLOSED_START, _CLOSED_END, _OPEN_START = range(4)


def clique_number(instance: Instance) -> int:
    """Maximum number of pairwise intersecting intervals, by an endpoint sweep."""
    if len(instance) == 0:
        raise EmptyInstanceError("clique number of an empty instance")
    den, lefts, closed = instance.scaled
    events = []
    for left, cl in zip(lefts, closed):
        if cl:
            events.append((left, _CLOSED_START, 1))
            events.append((left + den, _CLOSED_END, -1))
        else:
            events.append((left, _OPEN_START, 1))
            events.append((left + den, _OPEN_END, -1))
    events.sort()
    depth = best = 0
    for _, _, delta in events:
        depth += delta
        if depth > best:
            best = depth
    return best


def offline_order(instance: Instance) -> list[int]:
    """Left endpoint, closed before open on ties, then arrival id."""
    return sorted(range(len(instance)), key=lambda j: (instance[j].left, not instance[j].closed, j))


def optimal_rows(instance: Instance) -> RowDecomposition:
    if len(instance) == 0:
        raise EmptyInstanceError("no rows for an empty instance")
    adj = instance.adjacency
    rows: list[set[int]] = []
    row_of = [-1] * len(instance)
    for j in offline_order(instance):
        used = {row_of[k] for k in np.flatnonzero(adj[j]) if row_of[k] >= 0}
        r = _mex({u + 1 for u in used}) - 1
        if r == len(rows):
            rows.append(set())
        rows[r].add(j)
        row_of[j] = r
    omega = clique_number(instance)
    if len(rows) != omega:
        raise RuntimeError(f"offline greedy used {len(rows)} rows but omega is {omega}")
    return RowDecomposition(tuple(frozenset(r) for r in rows))


def is_proper(instance: Instance, colors) -> bool:
    adj = instance.adjacency
    c = np.asarray(list(colors))
    same = c[:, None] == c[None, :]
    return not bool((adj & same).any())


def brute_force_chromatic(instance: Instance, n_max: int = 12) -> int:
    """Exact chromatic number by backtracking over colorings.

    Uses only the pairwise :func:`intersects` predicate so it stays independent of
    the sweep and the adjacency matrix.
    """
    n = len(instance)
    if n > n_max:
        raise ContractViolation(f"brute force refuses n={n} > n_max={n_max}")
    if n == 0:
        raise EmptyInstanceError("chromatic number of an empty instance")
    ivs = instance.intervals
    nbrs = [[k for k in range(n) if k != j and intersects(ivs[j], ivs[k])] for j in range(n)]
    # most-constrained first keeps the tree small
    order = sorted(range(n), key=lambda j: -len(nbrs[j]))
    color = [0] * n

    def extend(pos: int, k: int, used: int) -> bool:
        if pos == n:
            return True
        j = order[pos]
        taken = {color[m] for m in nbrs[j]}
        # a fresh color is only tried once (symmetry breaking)
        for c in range(1, min(used + 1, k) + 1):
            if c in taken:
                continue
            color[j] = c
            if extend(pos + 1, k, max(used, c)):
                return True
            color[j] = 0
        return False

    for k in range(1, n + 1):
        if extend(0, k, 0):
            return k
    raise AssertionError("unreachable: n colors always suffice")
