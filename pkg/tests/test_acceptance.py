"""Acceptance criteria 1-10, one PASS/FAIL line each.

Corpora are built once per session and shared: exhaustive enumerations, seeded
random corpora, an open-only corpus, a small-n corpus and the aligned-block
corpus used for check coverage. Run directly with ``python3 tests/test_acceptance.py``.
"""

import random
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import pytest
from click.testing import CliRunner

from ffcolor.analysis import CHECK_NAMES, CheckTally, theorem2_bound, verify_lemma_suite
from ffcolor.cli import main
from ffcolor.engine import brute_force_chromatic, clique_number, first_fit, optimal_rows
from ffcolor.intervals import Instance, Kind
from ffcolor.io import ParseError, parse_instance, serialize_instance
from ffcolor.search import (GenConfig, enumerate_sequences, exhaustive_search, gen_aligned_blocks,
                            gen_random)

RANDOM_N = 10_000
OPEN_N = 1_000
SMALL_N = 1_000
BLOCK_N = 5_000


def record(log, n, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    log[n] = line
    print(line)


@dataclass
class Sweep:
    """Every sequence of an exhaustive enumeration, reduced to distinct offline keys."""

    sequences: int = 0
    bound_violations: list = field(default_factory=list)
    lemma1_violations: int = 0
    keys: dict = field(default_factory=dict)  # offline key -> (instance, enumerated omega)
    seconds: float = 0.0


def sweep(n_max, q, span, bound):
    out = Sweep()
    t = time.perf_counter()
    for node in enumerate_sequences(n_max, q, span):
        out.sequences += 1
        ff = max(node.colors)
        if ff > bound(node.omega):
            out.bound_violations.append(node.instance())
        # only the newest arrival needs checking; earlier ones were checked on their own prefix
        if node.colors[-1] > 1 + node.arrival_degree[-1]:
            out.lemma1_violations += 1
        key = node.offline_key()
        if key not in out.keys:
            out.keys[key] = (node.instance(), node.omega)
    out.seconds = time.perf_counter() - t
    return out


def random_cfg(i, base, grids, p_open=0.5, integral=False):
    rng = random.Random(base * 1_000_003 + i)
    n = rng.randint(1, 200)
    span = rng.choice((4, 8, 16, 32, 64))
    return GenConfig(n, rng.choice(grids), span, p_open, rng.getrandbits(63), integral)


@lru_cache(maxsize=None)
def corpus(name):
    """Instances by corpus name; exhaustive ones are the distinct offline keys."""
    if name == "exh1":
        return [inst for inst, _ in sweep_cached("exh1").keys.values()]
    if name == "exh2":
        return [inst for inst, _ in sweep_cached("exh2").keys.values()]
    if name == "rand1":
        return [gen_random(random_cfg(i, 1, (1,), integral=True)) for i in range(RANDOM_N)]
    if name == "rand2":
        return [gen_random(random_cfg(i, 2, (2, 3, 6))) for i in range(RANDOM_N)]
    if name == "open":
        return [gen_random(random_cfg(i, 3, (1, 2, 3, 6), p_open=1.0)) for i in range(OPEN_N)]
    if name == "small":
        out = []
        for i in range(SMALL_N):
            rng = random.Random(4_000_000 + i)
            cfg = GenConfig(rng.randint(1, 10), rng.choice((1, 2, 3, 4, 6)), rng.choice((2, 3, 4)), 0.5,
                            rng.getrandbits(63))
            out.append(gen_random(cfg))
        return out
    if name == "blocks":
        return [gen_aligned_blocks(s) for s in range(BLOCK_N)]
    raise KeyError(name)


@lru_cache(maxsize=None)
def sweep_cached(name):
    if name == "exh1":
        return sweep(7, 1, 4, lambda w: 2 * w)
    if name == "exh2":
        return sweep(6, 2, 3, theorem2_bound)
    raise KeyError(name)


@lru_cache(maxsize=None)
def suite_totals(name):
    """Per-check tallies and failing records of the full lemma suite over a corpus."""
    tallies = {c: CheckTally() for c in CHECK_NAMES}
    failures = []
    for inst in corpus(name):
        rep = verify_lemma_suite(inst, keep_records=False)
        for c, t in rep.tallies.items():
            tallies[c].add(t)
        failures += [(name, serialize_instance(inst), r.check, r.x, r.witness) for r in rep.failures]
    return tallies, failures


RANDOM_CORPORA = ("rand1", "rand2", "open")
THEOREM_CORPORA = ("exh1", "exh2") + RANDOM_CORPORA
ALL_CORPORA = THEOREM_CORPORA + ("small", "blocks")


def ff_omega(inst):
    return first_fit(inst).num_colors, clique_number(inst)


def test_criterion_1_integral_bound(acceptance_log):
    t = time.perf_counter()
    sw = sweep_cached("exh1")
    bad = len(sw.bound_violations)
    for inst in corpus("rand1"):
        assert inst.is_integral
        ff, w = ff_omega(inst)
        bad += ff > 2 * w
    secs = time.perf_counter() - t
    ok = bad == 0 and sw.lemma1_violations == 0 and secs <= 300
    record(acceptance_log, 1, ok,
           f"FF <= 2w on {sw.sequences} exhaustive sequences (n<=7, q=1, span 4) and {RANDOM_N} random "
           f"integral instances; violations={bad}, {secs:.0f}s")
    assert ok


def test_criterion_2_general_bound(acceptance_log):
    t = time.perf_counter()
    sw = sweep_cached("exh2")
    bad = len(sw.bound_violations)
    for inst in corpus("rand2"):
        ff, w = ff_omega(inst)
        bad += ff > theorem2_bound(w)
    secs = time.perf_counter() - t
    ok = bad == 0 and sw.lemma1_violations == 0 and secs <= 600
    record(acceptance_log, 2, ok,
           f"FF <= ceil(7w/3)-2 on {sw.sequences} exhaustive sequences (n<=6, q=2, span 3) and "
           f"{RANDOM_N} random instances (q in 2,3,6); violations={bad}, {secs:.0f}s")
    # outside this corpus the stated bound does fail at w = 2 (8 intervals); recorded, not hidden
    cx = exhaustive_search(8, 1, 4, omega_cap=2)
    acceptance_log["note"] = (
        f"note        : outside the criterion-2 corpus, exhaustive search (n<=8, q=1, span 4, w<=2) finds "
        f"FF={cx.ff_colors} > ceil(14/3)-2=3 at w=2: "
        + " ".join(str(v) for v in cx.best_instance) + " (see README)")
    print(acceptance_log["note"])
    assert ok


def test_criterion_3_open_intervals(acceptance_log):
    bad = 0
    for inst in corpus("open"):
        assert all(v.kind is Kind.OPEN for v in inst)
        ff, w = ff_omega(inst)
        bad += ff > 2 * w - 1
    ok = bad == 0
    record(acceptance_log, 3, ok, f"FF <= 2w-1 on {OPEN_N} open-only instances; violations={bad}")
    assert ok


def test_criterion_4_pivot_bound(acceptance_log):
    t = time.perf_counter()
    applicable = failed = 0
    for name in THEOREM_CORPORA:
        tallies, _ = suite_totals(name)
        applicable += tallies["pivot_bound"].applicable
        failed += tallies["pivot_bound"].failed
    ok = failed == 0 and applicable > 0
    record(acceptance_log, 4, ok,
           f"pivot bound over every x and every neighbor p on criteria 1-3 corpora: {applicable} x checked, "
           f"{failed} failed ({time.perf_counter() - t:.0f}s incl. full suite)")
    assert ok


def test_criterion_5_omega_oracle(acceptance_log):
    mismatches = checked = 0
    for inst in corpus("small"):
        checked += 1
        mismatches += clique_number(inst) != brute_force_chromatic(inst)
    for inst, w_enum in sweep_cached("exh2").keys.values():
        checked += 1
        w = clique_number(inst)
        mismatches += (w != brute_force_chromatic(inst)) + (w != w_enum)
    ok = mismatches == 0
    record(acceptance_log, 5, ok,
           f"sweep omega == brute-force chromatic number on {SMALL_N} random n<=10 and "
           f"{len(sweep_cached('exh2').keys)} distinct exhaustive n<=6 instances; mismatches={mismatches}")
    assert ok


def rows_valid(inst):
    rows = optimal_rows(inst)
    if len(rows) != clique_number(inst):
        return False
    ids = sorted(j for r in rows.rows for j in r)
    if ids != list(range(len(inst))):
        return False
    adj = inst.adjacency
    return not any(adj[np.ix_(list(r), list(r))].any() for r in rows.rows)


def test_criterion_6_optimal_rows(acceptance_log):
    bad = total = 0
    for name in ALL_CORPORA:
        for inst in corpus(name):
            total += 1
            bad += not rows_valid(inst)
    ok = bad == 0
    record(acceptance_log, 6, ok, f"omega independent rows partitioning the ids on {total} corpus instances; "
                                  f"invalid={bad}")
    assert ok


def test_criterion_7_lemma_suite(acceptance_log):
    tallies = {c: CheckTally() for c in CHECK_NAMES}
    failures = []
    for name in ALL_CORPORA:
        t, f = suite_totals(name)
        for c in CHECK_NAMES:
            tallies[c].add(t[c])
        failures += f
    # the neighborhood bound depends on arrival order, which the exhaustive keys drop; it was checked per sequence
    lemma1 = sweep_cached("exh1").lemma1_violations + sweep_cached("exh2").lemma1_violations
    never = [c for c in CHECK_NAMES if tallies[c].applicable == 0]
    n_checks = sum(t.applicable for t in tallies.values())
    ok = not failures and not never and lemma1 == 0
    thin = min(CHECK_NAMES, key=lambda c: tallies[c].applicable)
    record(acceptance_log, 7, ok,
           f"26 checks over the union corpus: {n_checks} applicable evaluations, {len(failures)} failed; "
           f"every check fired (rarest: {thin} x{tallies[thin].applicable})"
           + (f"; never fired: {never}" if never else ""))
    for f in failures[:5]:
        print("  failure:", f)
    assert ok


def test_criterion_8_closed_tightness(acceptance_log):
    r = exhaustive_search(8, 2, 4, omega_cap=2, kinds=(Kind.CLOSED,))
    ok = r.complete and r.ff_colors == 3 == 2 * r.omega - 1
    record(acceptance_log, 8, ok, f"closed-only exhaustive search (n<=8, q=2, span 4, w<=2): FF={r.ff_colors}, "
                                  f"w={r.omega}, complete={r.complete}")
    assert ok


MALFORMED = ["closd 0\n", "closed\n", "closed 1/0\n", "open 0.5\n", "closed 0\nopen 1 1\n", "[0,1]\n"]


def test_criterion_9_round_trip(acceptance_log, tmp_path):
    bad = 0
    for i in range(RANDOM_N):
        rng = random.Random(9_000_000 + i)
        cfg = GenConfig(rng.randint(0, 40), rng.choice((1, 2, 3, 5, 6, 12)), rng.choice((2, 7, 50)),
                        rng.random(), rng.getrandbits(63))
        inst = gen_random(cfg).shifted(rng.randint(-1000, 1000))
        text = serialize_instance(inst)
        back = parse_instance(text)
        bad += back != inst or serialize_instance(back) != text
    runner = CliRunner()
    codes = []
    for k, text in enumerate(MALFORMED):
        p = tmp_path / f"bad{k}.ivl"
        p.write_text(text)
        with pytest.raises(ParseError):
            parse_instance(text)
        codes.append(runner.invoke(main, ["omega", "-i", str(p)]).exit_code)
    ok = bad == 0 and all(c == 2 for c in codes)
    record(acceptance_log, 9, ok, f"parse(serialize(I)) == I on {RANDOM_N} instances (mismatches={bad}); "
                                  f"{len(MALFORMED)} malformed files exit with codes {sorted(set(codes))}")
    assert ok


def test_criterion_10_determinism(acceptance_log, tmp_path):
    runner = CliRunner()
    inst = tmp_path / "i.ivl"
    inst.write_text(serialize_instance(corpus("blocks")[7]))
    outputs = []
    for k in range(2):
        rep = tmp_path / f"rep{k}.json"
        res = runner.invoke(main, ["verify", "-i", str(inst), "--report", str(rep), "--fractions", "--all-records"])
        outs = [res.stdout, rep.read_bytes()]
        for mode, extra in (("random", ["--seed", "17", "--budget", "300", "--max-n", "30"]),
                            ("exhaustive", ["--max-n", "6", "--omega-cap", "2"]),
                            ("greedy", ["--omega-cap", "2", "--budget", "20"])):
            out = tmp_path / f"{mode}{k}.json"
            res = runner.invoke(main, ["search", "--mode", mode, "--out", str(out)] + extra)
            outs += [res.stdout, out.read_bytes()]
        outputs.append(outs)
    ok = outputs[0] == outputs[1]
    record(acceptance_log, 10, ok, "verify report and seeded random/exhaustive/greedy search outputs "
                                   f"byte-identical across two runs ({len(outputs[0])} artifacts)")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
