"""Row profiles, pivots, counting fractions and the lemma verification suite.

For every interval ``x`` of a FirstFit run the optimal rows are split by how many
of their intervals meet ``x`` (``R0..R3``), the dominating intervals ``y``, ``z``
and ``zbar`` are located, and each bound of the analysis is evaluated on the
concrete numbers. A conditional bound whose premise does not hold is recorded as
inapplicable, never as a pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Optional

import numpy as np

from .engine import Coloring, RowDecomposition, first_fit, optimal_rows
from .intervals import ContractViolation, Instance


class InconsistencyError(RuntimeError):
    """A row meets ``x`` more often than unit intervals allow."""


@dataclass(frozen=True)
class RowProfile:
    x: int
    rows: tuple[frozenset[int], frozenset[int], frozenset[int], frozenset[int]]

    @property
    def n0(self) -> int:
        return len(self.rows[0])

    @property
    def n1(self) -> int:
        return len(self.rows[1])

    @property
    def n2(self) -> int:
        return len(self.rows[2])

    @property
    def n3(self) -> int:
        return len(self.rows[3])

    @property
    def counts(self) -> tuple[int, int, int, int]:
        return self.n0, self.n1, self.n2, self.n3


@dataclass(frozen=True)
class PivotContext:
    """Dominating intervals and row fractions for one closed ``x``.

    ``alpha_of`` and ``delta_of`` take a candidate interval id.
    """

    x: int
    y: Optional[int]
    z: Optional[int]
    zbar: Optional[int]
    Zx: frozenset[int]
    R3z: frozenset[int]
    beta: Fraction
    gamma: Fraction
    alpha_of: Callable[[int], Fraction] = field(repr=False, compare=False)
    delta_of: Callable[[int], Fraction] = field(repr=False, compare=False)


@dataclass
class CheckRecord:
    check: str
    x: int
    applicable: bool
    passed: bool
    witness: dict


@dataclass
class CheckTally:
    applicable: int = 0
    passed: int = 0
    failed: int = 0
    inapplicable: int = 0

    def add(self, other: "CheckTally") -> None:
        self.applicable += other.applicable
        self.passed += other.passed
        self.failed += other.failed
        self.inapplicable += other.inapplicable


@dataclass
class LemmaReport:
    n: int
    omega: int
    ff_colors: int
    records: list[CheckRecord]
    tallies: dict[str, CheckTally]
    anomalies: list[dict]
    fractions: dict[int, dict] = field(default_factory=dict)

    @property
    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if r.applicable and not r.passed]

    @property
    def ok(self) -> bool:
        return all(t.failed == 0 for t in self.tallies.values())


# (name, short description); the order is the reporting order.
CHECKS: tuple[tuple[str, str], ...] = (
    ("neighborhood_bound", "FF(x) <= 1 + |N_x(x)|"),
    ("pivot_bound", "FF(x) <= FF(p) + |S_p| + 1 for every p in N(x)"),
    ("row_profile", "n0 >= 1; closed x meets <= 3 per row, open x <= 2; n0+n1+n2+n3 = omega"),
    ("neighborhood_rows", "|N_x(x)| <= |N(x)| <= n1 + 2 n2 + 3 n3"),
    ("small_r3", "n3 < n1 + 2  =>  FF(x) <= 2 omega"),
    ("empty_lmr", "x closed, LMR(x) empty  =>  FF(x) <= 2 omega"),
    ("open_interval", "x open  =>  FF(x) <= 2 omega - 1"),
    ("lmr_row_caps", "each LMR(x) member meets <=2 per R0/R1(non-twin)/R2 row and exactly 1 per R3 row"),
    ("integral_pivot_set", "integral instance: |S_y| <= (1 - alpha(y)) n1"),
    ("y_color_bound", "n3 >= n1 + 2  =>  FF(y) <= 2 omega + alpha(y) n1 - n3"),
    ("integral_theorem", "integral instance  =>  FF(x) <= 2 omega"),
    ("r3z_in_r2x", "R3(z) is a subset of R2(x)"),
    ("case_y_dominates", "FF(y) >= FF(z)  =>  FF(x) <= 2 omega"),
    ("z_color_bound", "FF(z) <= omega + alpha(z) n1 - beta n2 + gamma n2 + n2 + n3"),
    ("z_pivot_set", "FF(z) > FF(y)  =>  |S_z| <= (1 - alpha(z)) n1"),
    ("case_z_aligned", "FF(z) > FF(y), |Z(x)| >= n3(z)  =>  FF(x) <= 2 omega"),
    ("r3z_not_lmr", "no interval of an R3(z) row lies in LMR(x)"),
    ("misaligned_row_caps", "per-row intersection caps for NLMR(x) members, z, zbar and y"),
    ("zbar_color_bound", "FF(zbar) <= n0 + (1+alpha(zbar)) n1 + delta(zbar)(1-gamma) 2n2 + beta n2 + gamma n2 + 2 n3"),
    ("zbar_pivot_set", "|S_zbar| <= (1-alpha(zbar)) n1 + (1-delta(zbar))(1-gamma) 2 n2"),
    ("case_zbar_dominates", "FF(zbar) >= FF(y) in case 2.b  =>  FF(x) <= 2 omega"),
    ("y_color_bound_kernel", "FF(y) <= 2n0 + 2n1 + alpha(y) n1 + gamma n2 + n2 + delta(y)(1-gamma) n2 + n3"),
    ("y_pivot_set_kernel", "|S_y| <= (1-alpha(y)) n1 + (1-delta(y))(1-gamma) n2 + (1-gamma) n2"),
    ("r3_lower_bound", "n3 < omega/3  =>  FF(x) <= ceil(7 omega/3) - 2"),
    ("r2_upper_bound", "n2 >= 2 omega/3  =>  FF(x) <= 7 omega/3 - 2"),
    ("general_theorem", "FF(x) <= ceil(7 omega/3) - 2"),
)
CHECK_NAMES: tuple[str, ...] = tuple(name for name, _ in CHECKS)


def theorem2_bound(omega: int) -> int:
    return -((-7 * omega) // 3) - 2


def _frac(num: int, den: int) -> Fraction:
    return Fraction(num, den) if den else Fraction(0)


class InstanceAnalysis:
    """Shared precomputation for every per-``x`` query on one instance."""

    def __init__(self, instance: Instance, coloring: Optional[Coloring] = None,
                 rows: Optional[RowDecomposition] = None):
        if len(instance) == 0:
            raise ContractViolation("analysis needs a nonempty instance")
        self.instance = instance
        self.coloring = coloring if coloring is not None else first_fit(instance)
        self.rows = rows if rows is not None else optimal_rows(instance)
        self.n = len(instance)
        self.omega = len(self.rows)
        self.adj = instance.adjacency
        self.colors = np.asarray(self.coloring.colors, dtype=np.int64)
        self.row_of = np.asarray(self.rows.row_of, dtype=np.int64)
        if (self.row_of < 0).any():
            raise ContractViolation("rows do not cover every interval")
        den, lefts, closed = instance.scaled
        self.den = den
        big = max(abs(v) for v in lefts) + den
        self.lefts = np.asarray(lefts, dtype=np.int64 if big < 2**62 else object)
        self.closed = np.asarray(closed, dtype=bool)
        self.ids = np.arange(self.n)
        onehot = np.zeros((self.n, self.omega), dtype=np.int64)
        onehot[self.ids, self.row_of] = 1
        self.onehot = onehot
        # row_counts[v, R] = number of intervals of row R meeting v
        self.row_counts = self.adj.astype(np.int64) @ onehot
        self.arrival_sizes = np.tril(self.adj, -1).sum(axis=1)
        self._states: dict[int, XState] = {}

    def state(self, x: int) -> "XState":
        if not 0 <= x < self.n:
            raise ContractViolation(f"id {x} out of range")
        st = self._states.get(x)
        if st is None:
            st = self._states[x] = XState(self, x)
        return st

    def per_row(self, mask: np.ndarray) -> np.ndarray:
        """Per-row counts of a boolean mask over intervals (or a stack of masks)."""
        return mask.astype(np.int64) @ self.onehot

    def twins_mask(self, v: int) -> np.ndarray:
        m = (self.lefts == self.lefts[v]) & (self.closed == self.closed[v])
        m = np.asarray(m, dtype=bool)
        m[v] = False
        return m

    def surplus(self, x: int, p: int) -> int:
        """|S_p|: neighbors of x colored strictly above p."""
        nb = self.adj[x]
        return int((self.colors[nb] > self.colors[p]).sum())


class XState:
    """Lazily computed proof objects for one interval ``x``."""

    def __init__(self, an: InstanceAnalysis, x: int):
        self.an = an
        self.x = x
        self.closed = bool(an.closed[x])
        self.nb_mask = an.adj[x]
        self.nb = np.flatnonzero(self.nb_mask)
        self.counts = an.row_counts[x]
        self.color = int(an.colors[x])

    # row profile -----------------------------------------------------------
    @cached_property
    def row_class(self) -> np.ndarray:
        return self.counts

    def rows_with(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.counts == i)

    @cached_property
    def n(self) -> tuple[int, int, int, int]:
        c = self.counts
        return tuple(int((c == i).sum()) for i in range(4))

    @cached_property
    def nb_row_class(self) -> np.ndarray:
        """For every interval, the class of its row relative to x."""
        return self.counts[self.an.row_of]

    # neighbor partition ------------------------------------------------------
    @cached_property
    def twins(self) -> np.ndarray:
        return self.an.twins_mask(self.x) & self.nb_mask

    @cached_property
    def lmr(self) -> np.ndarray:
        an, x = self.an, self.x
        lx, d = an.lefts[x], an.den
        aligned = ((an.lefts == lx) & ~an.closed) | (
            an.closed & ((an.lefts == lx - d) | (an.lefts == lx + d)))
        return np.asarray(aligned, dtype=bool) & self.nb_mask

    @cached_property
    def nlmr(self) -> np.ndarray:
        return self.nb_mask & ~self.twins & ~self.lmr

    def _argmax_color(self, mask: np.ndarray) -> Optional[int]:
        ids = np.flatnonzero(mask)
        if ids.size == 0:
            return None
        # argmax returns the first maximum, i.e. the smallest arrival id
        return int(ids[np.argmax(self.an.colors[ids])])

    @cached_property
    def y(self) -> Optional[int]:
        return self._argmax_color(self.lmr) if self.closed else None

    @cached_property
    def z(self) -> Optional[int]:
        if not self.closed:
            return None
        return self._argmax_color(self.nlmr & (self.nb_row_class == 2))

    @cached_property
    def R3z(self) -> frozenset[int]:
        if self.z is None:
            return frozenset()
        return frozenset(int(r) for r in np.flatnonzero(self.an.row_counts[self.z] == 3))

    @cached_property
    def R3z_mask(self) -> np.ndarray:
        m = np.zeros(self.an.omega, dtype=bool)
        m[list(self.R3z)] = True
        return m

    @cached_property
    def zbar(self) -> Optional[int]:
        if self.z is None:
            return None
        an = self.an
        cand = self.nb_mask & an.adj[self.z] & self.R3z_mask[an.row_of]
        return self._argmax_color(cand)

    @cached_property
    def Zx(self) -> frozenset[int]:
        if self.z is None:
            return frozenset()
        twin_rows = {int(r) for r in self.an.row_of[self.an.twins_mask(self.z)]}
        return frozenset(r for r in twin_rows if self.counts[r] == 2)

    @cached_property
    def beta(self) -> Fraction:
        return _frac(len(self.Zx), self.n[2])

    @cached_property
    def gamma(self) -> Fraction:
        return _frac(sum(1 for r in self.R3z if self.counts[r] == 2), self.n[2])

    # fractions ---------------------------------------------------------------
    @cached_property
    def _r1_intersectors(self) -> np.ndarray:
        return np.flatnonzero(self.nb_mask & (self.nb_row_class == 1))

    def alpha(self, cand: int) -> Fraction:
        ids = self._r1_intersectors
        an = self.an
        ok = (~self.lmr[ids]) & (an.colors[ids] <= an.colors[cand])
        return _frac(int(ok.sum()), self.n[1])

    @cached_property
    def _delta_rows(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Rows of R2(x) minus R3(z), with per-row size and max color of R∩N(x)∩N(z)."""
        an = self.an
        rows = np.flatnonzero((self.counts == 2) & ~self.R3z_mask)
        members = np.flatnonzero(self.nb_mask & an.adj[self.z])
        size = np.zeros(an.omega, dtype=np.int64)
        top = np.zeros(an.omega, dtype=np.int64)
        np.add.at(size, an.row_of[members], 1)
        np.maximum.at(top, an.row_of[members], an.colors[members])
        return rows, size[rows], top[rows]

    def delta(self, cand: int) -> Fraction:
        if self.z is None:
            raise ContractViolation("delta needs z to be defined")
        rows, size, top = self._delta_rows
        ok = (size > 0) & (top <= self.an.colors[cand])
        return _frac(int(ok.sum()), rows.size)

    @cached_property
    def delta_anomalies(self) -> list[int]:
        """Rows of R2(x)\\R3(z) where R∩N(x)∩N(z) is not a single interval."""
        if self.z is None:
            return []
        rows, size, _ = self._delta_rows
        return [int(r) for r, s in zip(rows, size) if s != 1]

    @cached_property
    def sorted_nb_colors(self) -> np.ndarray:
        return np.sort(self.an.colors[self.nb])

    def surplus(self, p: int) -> int:
        sc = self.sorted_nb_colors
        return int(sc.size - np.searchsorted(sc, self.an.colors[p], side="right"))

    def profile(self) -> RowProfile:
        return RowProfile(self.x, tuple(frozenset(int(r) for r in self.rows_with(i)) for i in range(4)))

    def pivot_context(self) -> PivotContext:
        if not self.closed:
            raise ContractViolation("pivots are defined for a closed x")
        return PivotContext(
            x=self.x, y=self.y, z=self.z, zbar=self.zbar, Zx=self.Zx, R3z=self.R3z,
            beta=self.beta, gamma=self.gamma, alpha_of=self.alpha, delta_of=self.delta,
        )


# public operations -----------------------------------------------------------

def _analysis(instance: Instance, coloring: Optional[Coloring] = None,
              rows: Optional[RowDecomposition] = None) -> InstanceAnalysis:
    return InstanceAnalysis(instance, coloring, rows)


def row_profile(x: int, rows: RowDecomposition, instance: Instance) -> RowProfile:
    an = _analysis(instance, rows=rows)
    st = an.state(x)
    cap = 3 if st.closed else 2
    worst = int(st.counts.max())
    if worst > cap:
        r = int(np.argmax(st.counts))
        raise InconsistencyError(f"row {r} holds {worst} intervals meeting x={x}; at most {cap} possible")
    return st.profile()


def pivot_bound(x: int, p: int, coloring: Coloring, instance: Instance) -> int:
    """``FF(p) + |{I in N(x) : FF(I) > FF(p)}| + 1``."""
    adj = instance.adjacency
    if not adj[x, p]:
        raise ContractViolation(f"pivot {p} is not a neighbor of {x}")
    cp = coloring[p]
    surplus = sum(1 for k in np.flatnonzero(adj[x]) if coloring[int(k)] > cp)
    return cp + surplus + 1


def select_pivots(x: int, rows: RowDecomposition, coloring: Coloring, instance: Instance) -> PivotContext:
    return _analysis(instance, coloring, rows).state(x).pivot_context()


def fraction_alpha(x: int, cand: int, rows: RowDecomposition, coloring: Coloring,
                   instance: Instance) -> Fraction:
    st = _analysis(instance, coloring, rows).state(x)
    if not st.closed:
        raise ContractViolation("alpha is defined for a closed x")
    return st.alpha(cand)


def fraction_delta(x: int, cand: int, ctx: Optional[PivotContext], rows: RowDecomposition,
                   coloring: Coloring, instance: Instance) -> Fraction:
    st = _analysis(instance, coloring, rows).state(x)
    if not st.closed:
        raise ContractViolation("delta is defined for a closed x")
    if st.z is None or (ctx is not None and ctx.z is None):
        raise ContractViolation("delta needs z to be defined")
    return st.delta(cand)


# the lemma suite ---------------------------------------------------------------

Verdict = Optional[tuple[bool, dict]]


def _le(lhs, rhs, **witness) -> tuple[bool, dict]:
    witness.update(lhs=lhs, rhs=rhs)
    return lhs <= rhs, witness


class _Suite:
    """Evaluates every check for one ``x``; ``None`` means the premise failed."""

    def __init__(self, an: InstanceAnalysis, x: int):
        self.an = an
        self.st = an.state(x)
        self.x = x
        self.c = self.st.color
        self.omega = an.omega

    def col(self, j: int) -> int:
        return int(self.an.colors[j])

    # standing assumptions of the general-endpoint case analysis
    @cached_property
    def kernel_base(self) -> bool:
        st = self.st
        n0, n1, n2, n3 = st.n
        return st.closed and n3 >= n1 + 2 and st.y is not None

    @cached_property
    def case2(self) -> bool:
        st = self.st
        return (st.closed and st.y is not None and st.z is not None
                and self.col(st.z) > self.col(st.y))

    @cached_property
    def case2b(self) -> bool:
        st = self.st
        return self.case2 and len(st.Zx) < len(st.R3z) and st.zbar is not None

    def neighborhood_bound(self) -> Verdict:
        return _le(self.c, 1 + int(self.an.arrival_sizes[self.x]))

    def pivot_bound(self) -> Verdict:
        st = self.st
        if st.nb.size == 0:
            return None
        colors = self.an.colors[st.nb]
        sc = st.sorted_nb_colors
        bounds = colors + (sc.size - np.searchsorted(sc, colors, side="right")) + 1
        k = int(np.argmin(bounds))
        return _le(self.c, int(bounds[k]), p=int(st.nb[k]))

    def row_profile(self) -> Verdict:
        st = self.st
        n0, n1, n2, n3 = st.n
        cap = 3 if st.closed else 2
        worst = int(st.counts.max())
        own_row = int(self.an.row_of[self.x])
        ok = (n0 >= 1 and st.counts[own_row] == 0 and worst <= cap
              and n0 + n1 + n2 + n3 == self.omega)
        return ok, dict(n=[n0, n1, n2, n3], max_per_row=worst, cap=cap, omega=self.omega)

    def neighborhood_rows(self) -> Verdict:
        n0, n1, n2, n3 = self.st.n
        arrival = int(self.an.arrival_sizes[self.x])
        final = int(self.st.nb.size)
        ok = arrival <= final <= n1 + 2 * n2 + 3 * n3
        return ok, dict(arrival=arrival, final=final, rhs=n1 + 2 * n2 + 3 * n3)

    def small_r3(self) -> Verdict:
        n0, n1, n2, n3 = self.st.n
        if not n3 < n1 + 2:
            return None
        return _le(self.c, 2 * self.omega)

    def empty_lmr(self) -> Verdict:
        st = self.st
        if not st.closed or st.lmr.any():
            return None
        return _le(self.c, 2 * self.omega)

    def open_interval(self) -> Verdict:
        if self.st.closed:
            return None
        return _le(self.c, 2 * self.omega - 1)

    def lmr_row_caps(self) -> Verdict:
        st, an = self.st, self.an
        if not st.closed:
            return None
        V = np.flatnonzero(st.lmr)
        if V.size == 0:
            return None
        sub = an.row_counts[V].copy()
        sub[:, an.row_of[self.x]] -= 1  # x itself is not counted
        twins_per_row = an.per_row(st.twins)
        cls = st.counts
        own = an.row_of[V][:, None] == np.arange(an.omega)[None, :]
        bad = ((cls == 0) & (sub > 2)) | ((cls == 1) & (sub - twins_per_row > 2)) | (
            (cls == 2) & (sub > 2)) | ((cls == 3) & (sub != 1) & ~own)
        if bad.any():
            i, r = map(int, np.argwhere(bad)[0])
            return False, dict(v=int(V[i]), row=r, row_class=int(cls[r]), count=int(sub[i, r]))
        return True, dict(members=int(V.size))

    def integral_pivot_set(self) -> Verdict:
        st = self.st
        if not (self.an.instance.is_integral and st.closed and st.y is not None):
            return None
        n1 = st.n[1]
        a = st.alpha(st.y)
        s = st.surplus(st.y)
        return _le(s, (1 - a) * n1, y=st.y, alpha=a, equality=s == (1 - a) * n1)

    def y_color_bound(self) -> Verdict:
        # only under the standing n3 >= n1 + 2; without it the bound is false
        st = self.st
        if not self.kernel_base:
            return None
        n0, n1, n2, n3 = st.n
        a = st.alpha(st.y)
        return _le(self.col(st.y), 2 * self.omega + a * n1 - n3, y=st.y, alpha=a)

    def integral_theorem(self) -> Verdict:
        if not self.an.instance.is_integral:
            return None
        return _le(self.c, 2 * self.omega)

    def r3z_in_r2x(self) -> Verdict:
        st = self.st
        if st.z is None:
            return None
        outside = sorted(r for r in st.R3z if st.counts[r] != 2)
        return not outside, dict(z=st.z, R3z=sorted(st.R3z), outside=outside)

    def case_y_dominates(self) -> Verdict:
        st = self.st
        if not (st.closed and st.y is not None):
            return None
        if st.z is not None and self.col(st.z) > self.col(st.y):
            return None
        return _le(self.c, 2 * self.omega, y=st.y, z=st.z)

    def z_color_bound(self) -> Verdict:
        st = self.st
        if not (self.kernel_base and self.case2):
            return None
        n0, n1, n2, n3 = st.n
        a = st.alpha(st.z)
        rhs = self.omega + a * n1 - st.beta * n2 + st.gamma * n2 + n2 + n3
        return _le(self.col(st.z), rhs, z=st.z, alpha=a, beta=st.beta, gamma=st.gamma)

    def z_pivot_set(self) -> Verdict:
        st = self.st
        if not self.case2:
            return None
        a = st.alpha(st.z)
        s = st.surplus(st.z)
        return _le(s, (1 - a) * st.n[1], z=st.z, alpha=a, equality=s == (1 - a) * st.n[1])

    def case_z_aligned(self) -> Verdict:
        st = self.st
        if not (self.case2 and len(st.Zx) >= len(st.R3z)):
            return None
        return _le(self.c, 2 * self.omega, z=st.z, Zx=len(st.Zx), n3z=len(st.R3z))

    def r3z_not_lmr(self) -> Verdict:
        st, an = self.st, self.an
        if st.z is None:
            return None
        members = np.flatnonzero(an.adj[st.z] & st.R3z_mask[an.row_of])
        bad = [int(v) for v in members if st.lmr[v]]
        return not bad, dict(z=st.z, offenders=bad)

    def misaligned_row_caps(self) -> Verdict:
        st, an = self.st, self.an
        if not st.closed:
            return None
        x = self.x
        cls = st.counts
        R = np.arange(an.omega)
        parts = []
        witness: dict = {}

        V = np.flatnonzero(st.nlmr)
        if V.size:
            parts.append("nlmr")
            sub = an.row_counts[V].copy()
            sub[:, an.row_of[x]] -= 1
            away = an.adj[V] & ~st.nb_mask[None, :]
            away[:, x] = False
            off_x = an.per_row(away)
            bad = ((cls == 0) & (sub > 1)) | ((cls == 1) & (off_x > 1)) | ((cls == 3) & (sub != 2))
            if bad.any():
                i, r = map(int, np.argwhere(bad)[0])
                return False, dict(part="nlmr", v=int(V[i]), row=r, row_class=int(cls[r]),
                                   count=int(sub[i, r]), off_x=int(off_x[i, r]))

        in_Z = np.zeros(an.omega, dtype=bool)
        in_Z[list(st.Zx)] = True
        rest = (cls == 2) & ~in_Z & ~st.R3z_mask

        if st.z is not None:
            parts.append("z")
            cz = an.row_counts[st.z]
            own = R == an.row_of[st.z]
            bad = (st.R3z_mask & (cz != 3)) | (in_Z & (cz != 1)) | (rest & ~own & (cz > 2))
            if bad.any():
                r = int(np.flatnonzero(bad)[0])
                return False, dict(part="z", v=st.z, row=r, count=int(cz[r]))

        if st.zbar is not None and self.case2b:
            parts.append("zbar")
            cb = an.row_counts[st.zbar].copy()
            cb[an.row_of[st.z]] -= int(an.adj[st.zbar, st.z])  # z itself is not counted
            own = R == an.row_of[st.zbar]
            bad = (st.R3z_mask & ~own & (cb != 1)) | (in_Z & (cb > 3)) | (rest & (cb > 2))
            if bad.any():
                r = int(np.flatnonzero(bad)[0])
                return False, dict(part="zbar", v=st.zbar, row=r, count=int(cb[r]))

        if self.case2b and self.col(st.zbar) < self.col(st.y):
            parts.append("y")
            y = st.y
            near = an.adj[y] & st.nb_mask
            far = an.adj[y] & ~st.nb_mask
            far[x] = False
            both = an.per_row(near)
            away = an.per_row(far)
            r2 = cls == 2
            # an open y = (r, r+1) lies inside x and may meet both x-intersectors of a row
            cap = 1 if an.closed[y] else 2
            # a closed y can meet its open twin and the closed interval touching its far end,
            # both outside N(x); then it meets no x-intersector there, so only the row total is capped
            bad = r2 & ((away + both > 1 + cap) | (both > cap))
            if bad.any():
                r = int(np.flatnonzero(bad)[0])
                return False, dict(part="y", v=y, row=r, in_nx=int(both[r]), off_nx=int(away[r]))

        if not parts:
            return None
        witness["parts"] = parts
        return True, witness

    def zbar_color_bound(self) -> Verdict:
        st = self.st
        if not (self.kernel_base and self.case2b and self.col(st.zbar) >= self.col(st.y)):
            return None
        n0, n1, n2, n3 = st.n
        zb = st.zbar
        a, d = st.alpha(zb), st.delta(zb)
        b, g = st.beta, st.gamma
        rhs = n0 + (1 + a) * n1 + d * (1 - g) * 2 * n2 + b * n2 + g * n2 + 2 * n3
        return _le(self.col(zb), rhs, zbar=zb, alpha=a, delta=d, beta=b, gamma=g)

    def zbar_pivot_set(self) -> Verdict:
        st = self.st
        if not (self.kernel_base and self.case2b and self.col(st.zbar) >= self.col(st.y)):
            return None
        n0, n1, n2, n3 = st.n
        zb = st.zbar
        a, d, g = st.alpha(zb), st.delta(zb), st.gamma
        rhs = (1 - a) * n1 + (1 - d) * (1 - g) * 2 * n2
        return _le(st.surplus(zb), rhs, zbar=zb, alpha=a, delta=d, gamma=g)

    def case_zbar_dominates(self) -> Verdict:
        st = self.st
        if not (self.case2b and self.col(st.zbar) >= self.col(st.y)):
            return None
        return _le(self.c, 2 * self.omega, zbar=st.zbar, y=st.y)

    def _kernel(self) -> bool:
        st = self.st
        return self.kernel_base and self.case2b and self.col(st.zbar) < self.col(st.y)

    def y_color_bound_kernel(self) -> Verdict:
        st = self.st
        if not self._kernel():
            return None
        n0, n1, n2, n3 = st.n
        y = st.y
        a, d, g = st.alpha(y), st.delta(y), st.gamma
        rhs = 2 * n0 + 2 * n1 + a * n1 + g * n2 + n2 + d * (1 - g) * n2 + n3
        return _le(self.col(y), rhs, y=y, alpha=a, delta=d, gamma=g)

    def y_pivot_set_kernel(self) -> Verdict:
        st = self.st
        if not self._kernel():
            return None
        n0, n1, n2, n3 = st.n
        y = st.y
        a, d, g = st.alpha(y), st.delta(y), st.gamma
        rhs = (1 - a) * n1 + (1 - d) * (1 - g) * n2 + (1 - g) * n2
        return _le(st.surplus(y), rhs, y=y, alpha=a, delta=d, gamma=g)

    def r3_lower_bound(self) -> Verdict:
        if not 3 * self.st.n[3] < self.omega:
            return None
        return _le(self.c, theorem2_bound(self.omega))

    def r2_upper_bound(self) -> Verdict:
        if not 3 * self.st.n[2] >= 2 * self.omega:
            return None
        return _le(self.c, Fraction(7 * self.omega, 3) - 2)

    def general_theorem(self) -> Verdict:
        return _le(self.c, theorem2_bound(self.omega))


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def verify_lemma_suite(instance: Instance, checks: Optional[Iterable[str]] = None,
                       keep_records: bool = True, with_fractions: bool = False,
                       analysis: Optional[InstanceAnalysis] = None) -> LemmaReport:
    """Run FirstFit and the optimal rows, then evaluate every check for every x.

    With ``keep_records=False`` only failing records are kept; tallies are always
    complete.
    """
    names = CHECK_NAMES if checks is None else tuple(checks)
    unknown = set(names) - set(CHECK_NAMES)
    if unknown:
        raise ContractViolation(f"unknown checks: {sorted(unknown)}")
    ordered = [nm for nm in CHECK_NAMES if nm in names]
    tallies = {nm: CheckTally() for nm in ordered}
    if len(instance) == 0:
        return LemmaReport(0, 0, 0, [], tallies, [])
    an = analysis if analysis is not None else InstanceAnalysis(instance)
    records: list[CheckRecord] = []
    anomalies: list[dict] = []
    fractions: dict[int, dict] = {}
    for x in range(an.n):
        suite = _Suite(an, x)
        for nm in ordered:
            verdict = getattr(suite, nm)()
            t = tallies[nm]
            if verdict is None:
                t.inapplicable += 1
                if keep_records:
                    records.append(CheckRecord(nm, x, False, False, {}))
                continue
            passed, witness = verdict
            t.applicable += 1
            if passed:
                t.passed += 1
            else:
                t.failed += 1
            if keep_records or not passed:
                witness = _jsonable(dict(witness, x=x, color=suite.c, omega=an.omega))
                records.append(CheckRecord(nm, x, True, bool(passed), witness))
        st = suite.st
        if st.closed and st.z is not None and st.delta_anomalies:
            anomalies.append(dict(x=x, z=st.z, rows=st.delta_anomalies))
        if with_fractions and st.closed:
            fr: dict = {"n": list(st.n)}
            if st.y is not None:
                fr["y"] = st.y
                fr["alpha_y"] = st.alpha(st.y)
            if st.z is not None:
                fr.update(z=st.z, alpha_z=st.alpha(st.z), beta=st.beta, gamma=st.gamma,
                          Zx=len(st.Zx), n3z=len(st.R3z), delta_z=st.delta(st.z))
                if st.y is not None:
                    fr["delta_y"] = st.delta(st.y)
            if st.zbar is not None:
                fr.update(zbar=st.zbar, alpha_zbar=st.alpha(st.zbar), delta_zbar=st.delta(st.zbar))
            fractions[x] = _jsonable(fr)
    return LemmaReport(an.n, an.omega, int(an.colors.max()), records, tallies, anomalies, fractions)
