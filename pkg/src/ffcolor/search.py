"""Instance generators and adversarial search for FirstFit-vs-omega gaps."""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .analysis import theorem2_bound, verify_lemma_suite
from .engine import clique_number, first_fit
from .intervals import ContractViolation, Instance, Kind, RationalLike, as_rational

KINDS = (Kind.CLOSED, Kind.OPEN)


@dataclass(frozen=True)
class GenConfig:
    n: int
    grid_den: int = 2
    span: Fraction = Fraction(4)
    p_open: float = 0.5
    seed: int = 0
    integral_only: bool = False

    def __post_init__(self):
        object.__setattr__(self, "span", as_rational(self.span))
        if self.n < 0:
            raise ContractViolation("n must be nonnegative")
        if self.grid_den < 1:
            raise ContractViolation("grid_den must be >= 1")
        if self.span < 1:
            raise ContractViolation("span must be >= 1")
        if not 0.0 <= self.p_open <= 1.0:
            raise ContractViolation("p_open must lie in [0, 1]")

    @property
    def q(self) -> int:
        return 1 if self.integral_only else self.grid_den


def grid_positions(grid_den: int, span: RationalLike) -> list[Fraction]:
    """Left endpoints ``k/q`` inside ``[0, span-1]``."""
    top = math.floor((as_rational(span) - 1) * grid_den)
    return [Fraction(k, grid_den) for k in range(top + 1)]


def gen_random(cfg: GenConfig) -> Instance:
    rng = random.Random(cfg.seed)
    q = cfg.q
    top = math.floor((cfg.span - 1) * q)
    pairs = []
    for _ in range(cfg.n):
        left = Fraction(rng.randint(0, top), q)
        kind = Kind.OPEN if rng.random() < cfg.p_open else Kind.CLOSED
        pairs.append((left, kind))
    return Instance.from_pairs(pairs)


def gen_aligned_blocks(seed: int, max_rows: int = 9) -> Instance:
    """Random instance assembled from the row patterns the case analysis talks about.

    Blocks are aligned triples around ``x=[0,1]``, triples around a misaligned
    ``z=[s,s+1]``, twins of ``x`` and ``z`` and partial rows, plus a little noise;
    arrival order is shuffled. Uniform generators almost never reach the deeper
    case premises, these instances do.
    """
    rng = random.Random(seed)
    C, O = Kind.CLOSED, Kind.OPEN
    q = rng.choice((2, 3, 4))
    s = Fraction(rng.randint(1, q - 1), q)
    blocks = [
        [(Fraction(-1), C), (Fraction(0), O), (Fraction(1), C)],
        [(s - 1, C), (s, O), (s + 1, C)],
        [(s - 1, O), (s, C)],
        [(s, C)],
        [(Fraction(0), C)],
        [(Fraction(-1), C), (Fraction(1), C)],
        [(s - 1, C), (s + 1, C)],
        [(Fraction(0), O)],
        [(s - 1, C), (s, O)],
        [(s - 2, C), (s - 1, O), (s, C)],
    ]
    weights = [rng.random() for _ in blocks]
    pairs = [(Fraction(0), C)]
    for _ in range(rng.randint(3, max_rows)):
        pairs += rng.choices(blocks, weights=weights)[0]
    for _ in range(rng.randint(0, 4)):
        pairs.append((Fraction(rng.randint(-2 * q, 2 * q), q), rng.choice(KINDS)))
    rng.shuffle(pairs)
    return Instance.from_pairs(pairs)


@dataclass
class SearchResult:
    best_instance: Instance
    ff_colors: int
    omega: int
    nodes_explored: int
    wall_time: float
    complete: bool = True
    mode: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.best_instance) == 0:
            return
        ff = first_fit(self.best_instance).num_colors
        om = clique_number(self.best_instance)
        if (ff, om) != (self.ff_colors, self.omega):
            raise ContractViolation(f"result claims FF={self.ff_colors}, omega={self.omega}; "
                                    f"recomputed FF={ff}, omega={om}")
        # the case analysis only supports max(2w, ceil(7w/3)-2); below w=4 the
        # stated bound is beaten by integral instances with FF = 2w
        if ff > max(2 * om, theorem2_bound(om)):
            raise ContractViolation(f"FF={ff} exceeds max(2*{om}, ceil(7*{om}/3)-2)")
        if self.best_instance.is_integral and ff > 2 * om:
            raise ContractViolation(f"integral instance with FF={ff} > 2*{om}")

    @property
    def exceeds_stated_bound(self) -> bool:
        return self.omega > 0 and self.ff_colors > theorem2_bound(self.omega)

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.ff_colors, self.omega) if self.omega else Fraction(0)


def _result(instance: Instance, nodes: int, started: float, complete: bool, mode: str,
            params: dict) -> SearchResult:
    if len(instance) == 0:
        return SearchResult(instance, 0, 0, nodes, time.perf_counter() - started, complete, mode, params)
    return SearchResult(instance, first_fit(instance).num_colors, clique_number(instance), nodes,
                        time.perf_counter() - started, complete, mode, params)


# exhaustive enumeration ------------------------------------------------------

@dataclass
class Node:
    """One arrival sequence met during enumeration, on the ``1/q`` grid.

    ``lefts`` are grid indices, so the real left endpoint is ``lefts[j] / q``.
    """

    lefts: list[int]
    closed: list[bool]
    colors: list[int]
    omega: int
    q: int
    arrival_degree: list[int] = field(default_factory=list)

    def instance(self) -> Instance:
        return Instance.from_pairs(
            (Fraction(l, self.q), Kind.CLOSED if c else Kind.OPEN) for l, c in zip(self.lefts, self.closed))

    def offline_key(self) -> tuple:
        """Positions, kinds and colors listed in offline order (left, closed first, arrival).

        Two sequences with the same key differ only in how non-twin arrivals
        interleave; everything except arrival-time quantities agrees on them.
        """
        L, C, K = self.lefts, self.closed, self.colors
        order = sorted(range(len(L)), key=lambda j: (L[j], not C[j], j))
        return tuple((L[j], C[j], K[j]) for j in order)

    @property
    def ff_colors(self) -> int:
        return max(self.colors, default=0)

    @property
    def canonical(self) -> bool:
        return bool(self.lefts) and min(self.lefts) == 0


def _meets(l1: int, c1: bool, l2: int, c2: bool, q: int) -> bool:
    d = abs(l1 - l2)
    return d < q or (d == q and c1 and c2)


def enumerate_sequences(n_max: int, grid_den: int, span: RationalLike,
                        kinds: Sequence[Kind] = KINDS, omega_cap: Optional[int] = None,
                        canonical_only: bool = True) -> Iterator[Node]:
    """Depth-first walk over every arrival sequence of length ``1..n_max``.

    Candidates are the grid positions in the span times ``kinds``, with
    repetition. FirstFit colors and omega are maintained incrementally; omega
    uses a coverage count on the half-grid, which contains every endpoint and a
    point strictly between any two consecutive endpoints. Subtrees exceeding
    ``omega_cap`` are cut (omega never decreases along a sequence). With
    ``canonical_only`` only sequences whose leftmost interval sits at position 0
    are yielded; every sequence is a translate of exactly one of these.
    """
    q = grid_den
    top = math.floor((as_rational(span) - 1) * q)
    cands = [(k, kind is Kind.CLOSED) for k in range(top + 1) for kind in kinds]
    npts = 2 * top + 2 * q + 1
    cover = [0] * npts
    lefts: list[int] = []
    closed: list[bool] = []
    colors: list[int] = []
    degree: list[int] = []
    node = Node(lefts, closed, colors, 0, q, degree)

    def place(k: int, cl: bool) -> tuple[int, int, int]:
        lo, hi = 2 * k, 2 * k + 2 * q
        if not cl:
            lo, hi = lo + 1, hi - 1
        peak = 0
        for p in range(lo, hi + 1):
            cover[p] += 1
            if cover[p] > peak:
                peak = cover[p]
        nbr = [colors[j] for j in range(len(lefts)) if _meets(lefts[j], closed[j], k, cl, q)]
        used = set(nbr)
        c = 1
        while c in used:
            c += 1
        return c, peak, len(nbr)

    def unplace(k: int, cl: bool) -> None:
        lo, hi = 2 * k, 2 * k + 2 * q
        if not cl:
            lo, hi = lo + 1, hi - 1
        for p in range(lo, hi + 1):
            cover[p] -= 1

    def walk(omega: int, has_zero: bool) -> Iterator[Node]:
        if len(lefts) == n_max:
            return
        for k, cl in cands:
            c, peak, deg = place(k, cl)
            new_omega = max(omega, peak)
            if omega_cap is None or new_omega <= omega_cap:
                lefts.append(k)
                closed.append(cl)
                colors.append(c)
                degree.append(deg)
                node.omega = new_omega
                hz = has_zero or k == 0
                if hz or not canonical_only:
                    yield node
                yield from walk(new_omega, hz)
                lefts.pop()
                closed.pop()
                colors.pop()
                degree.pop()
            unplace(k, cl)

    yield from walk(0, False)


def exhaustive_search(n_max: int, grid_den: int = 2, span: RationalLike = 4,
                      omega_cap: Optional[int] = None, kinds: Sequence[Kind] = KINDS,
                      node_budget: int = 5_000_000) -> SearchResult:
    """Maximize the FirstFit color count over all canonical sequences.

    A branch is pruned when its current color count plus the number of
    intervals still to come cannot beat the incumbent (FirstFit opens at most
    one new color per arrival).
    """
    started = time.perf_counter()
    params = dict(n_max=n_max, grid_den=grid_den, span=str(as_rational(span)),
                  omega_cap=omega_cap, kinds=[k.value for k in kinds])
    q = grid_den
    top = math.floor((as_rational(span) - 1) * q)
    cands = [(k, kind is Kind.CLOSED) for k in range(top + 1) for kind in kinds]
    npts = 2 * top + 2 * q + 1
    cover = [0] * npts
    lefts: list[int] = []
    closed: list[bool] = []
    colors: list[int] = []
    best: dict = {"ff": 0, "seq": []}
    nodes = 0
    complete = True

    def walk(omega: int, top_color: int, has_zero: bool) -> None:
        nonlocal nodes, complete
        if len(lefts) == n_max or top_color + (n_max - len(lefts)) <= best["ff"]:
            return
        for k, cl in cands:
            if nodes >= node_budget:
                complete = False
                return
            nodes += 1
            lo, hi = 2 * k, 2 * k + 2 * q
            if not cl:
                lo, hi = lo + 1, hi - 1
            peak = 0
            for p in range(lo, hi + 1):
                cover[p] += 1
                peak = max(peak, cover[p])
            new_omega = max(omega, peak)
            if omega_cap is None or new_omega <= omega_cap:
                used = {colors[j] for j in range(len(lefts)) if _meets(lefts[j], closed[j], k, cl, q)}
                c = 1
                while c in used:
                    c += 1
                lefts.append(k)
                closed.append(cl)
                colors.append(c)
                hz = has_zero or k == 0
                tc = max(top_color, c)
                if hz and tc > best["ff"]:
                    best["ff"] = tc
                    best["seq"] = list(zip(lefts, closed))
                walk(new_omega, tc, hz)
                lefts.pop()
                closed.pop()
                colors.pop()
            for p in range(lo, hi + 1):
                cover[p] -= 1

    walk(0, 0, False)
    inst = Instance.from_pairs((Fraction(k, q), Kind.CLOSED if cl else Kind.OPEN) for k, cl in best["seq"])
    return _result(inst, nodes, started, complete, "exhaustive", params)


# greedy adversary --------------------------------------------------------------

def _alignment_score(inst_pairs: list[tuple[Fraction, Kind]], left: Fraction, kind: Kind) -> int:
    """How many placed intervals this candidate lines up with (R3-style offsets)."""
    score = 0
    for l, k in inst_pairs:
        d = left - l
        if kind is Kind.CLOSED and k is Kind.CLOSED and abs(d) == 1:
            score += 1
        elif d == 0 and kind is not k:
            score += 1
    return score


def _greedy_options(inst: Instance, colors: list[int], positions, omega_cap: int):
    """Every admissible next interval with the FirstFit color it would get."""
    out = []
    for left in positions:
        for kind in KINDS:
            probe = inst.extended(left, kind)
            if clique_number(probe) > omega_cap:
                continue
            row = probe.adjacency[-1]
            used = {colors[j] for j in range(len(colors)) if row[j]}
            c = 1
            while c in used:
                c += 1
            out.append((left, kind, c, probe))
    return out


def greedy_adversary(omega_cap: int, budget: int = 50, grid_den: int = 2,
                     span: RationalLike = 4) -> SearchResult:
    """Present, one at a time, the candidate that receives the highest FirstFit color.

    Candidates keep omega within ``omega_cap``. Ties go to the candidate whose
    best follow-up color is highest (one step of lookahead), then to more
    aligned partners, then to the leftmost position, closed first.
    """
    if omega_cap < 1:
        raise ContractViolation("omega_cap must be >= 1")
    started = time.perf_counter()
    params = dict(omega_cap=omega_cap, budget=budget, grid_den=grid_den, span=str(as_rational(span)))
    positions = grid_positions(grid_den, span)
    inst = Instance(())
    colors: list[int] = []
    nodes = 0
    for _ in range(budget):
        best_key, best_pick = None, None
        for left, kind, c, probe in _greedy_options(inst, colors, positions, omega_cap):
            follow = _greedy_options(probe, colors + [c], positions, omega_cap)
            nodes += 1 + len(follow)
            ahead = max((f[2] for f in follow), default=0)
            key = (c, ahead, _alignment_score(inst.pairs(), left, kind), -left, kind is Kind.CLOSED)
            if best_key is None or key > best_key:
                best_key, best_pick = key, (left, kind, c)
        if best_pick is None:
            break
        inst = inst.extended(best_pick[0], best_pick[1])
        colors.append(best_pick[2])
    return _result(inst, nodes, started, True, "greedy", params)


# random search ---------------------------------------------------------------------

def _random_batch(args: tuple) -> tuple[tuple, list[tuple[Fraction, Kind]], int]:
    seeds, n_max, grid_den, span, omega_cap, p_open = args
    best_key, best_pairs, nodes = None, [], 0
    for seed in seeds:
        rng = random.Random(seed)
        cfg = GenConfig(rng.randint(1, n_max), grid_den, span, p_open, seed)
        inst = gen_random(cfg)
        nodes += 1
        if len(inst) == 0:
            continue
        om = clique_number(inst)
        if omega_cap is not None and om > omega_cap:
            continue
        ff = first_fit(inst).num_colors
        key = (Fraction(ff, om), ff, -seed)
        if best_key is None or key > best_key:
            best_key, best_pairs = key, inst.pairs()
    return best_key, best_pairs, nodes


def random_search(n_max: int, grid_den: int = 2, span: RationalLike = 4,
                  omega_cap: Optional[int] = None, seed: int = 0, budget: int = 1000,
                  workers: int = 1, p_open: float = 0.5) -> SearchResult:
    """Best FF/omega ratio over ``budget`` seeded random instances.

    Seeds are split into fixed chunks, so the answer does not depend on
    ``workers``.
    """
    started = time.perf_counter()
    params = dict(n_max=n_max, grid_den=grid_den, span=str(as_rational(span)), omega_cap=omega_cap,
                  seed=seed, budget=budget, p_open=p_open)
    base = random.Random(seed)
    seeds = [base.getrandbits(63) for _ in range(budget)]
    chunk = 64
    jobs = [(seeds[i:i + chunk], n_max, grid_den, as_rational(span), omega_cap, p_open)
            for i in range(0, len(seeds), chunk)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(_random_batch, jobs))
    else:
        outs = [_random_batch(j) for j in jobs]
    best_key, best_pairs, nodes = None, [], 0
    for key, pairs, k in outs:
        nodes += k
        if key is not None and (best_key is None or key > best_key):
            best_key, best_pairs = key, pairs
    return _result(Instance.from_pairs(best_pairs), nodes, started, True, "random", params)


def verify_result(result: SearchResult) -> int:
    """Feed the best instance back through the lemma suite; returns the failure count."""
    if len(result.best_instance) == 0:
        return 0
    rep = verify_lemma_suite(result.best_instance, keep_records=False)
    return sum(t.failed for t in rep.tallies.values())


def ratio_table(results: Sequence[SearchResult]) -> list[dict]:
    best: dict[int, int] = {}
    for r in results:
        if r.omega <= 0:
            continue
        best[r.omega] = max(best.get(r.omega, 0), r.ff_colors)
    return [dict(omega=w, max_ff=best[w], bound_2w=2 * w, bound_73w=theorem2_bound(w))
            for w in sorted(best)]
