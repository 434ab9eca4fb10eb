"""Command-line entry point: ``ffcolor color|omega|verify|search|gen|ratio``."""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import io as fio
from .analysis import CHECK_NAMES, verify_lemma_suite
from .engine import EmptyInstanceError, clique_number, first_fit, optimal_rows
from .intervals import ContractViolation, Kind
from .search import (KINDS, GenConfig, exhaustive_search, gen_random, greedy_adversary, random_search,
                     ratio_table, verify_result)

EXIT_FAIL = 1
EXIT_USAGE = 2


def _die(message: str, code: int = EXIT_USAGE):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as e:
        _die(str(e))
    try:
        return fio.parse_instance(text)
    except fio.ParseError as e:
        _die(f"{path}: {e}")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        click.echo(text, nl=False)
        return
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
    except OSError as e:
        _die(str(e))


def _check_list(value: str) -> tuple[str, ...]:
    if value == "all":
        return CHECK_NAMES
    out = []
    for tok in value.split(","):
        tok = tok.strip()
        if tok.isdigit() and 1 <= int(tok) <= len(CHECK_NAMES):
            out.append(CHECK_NAMES[int(tok) - 1])
        elif tok in CHECK_NAMES:
            out.append(tok)
        else:
            _die(f"unknown check {tok!r}")
    return tuple(out)


@click.group()
def main():
    """FirstFit coloring of unit open/closed intervals."""


@main.command()
@click.option("-i", "--input", "path", required=True, help="instance file ('-' for stdin)")
@click.option("--algo", type=click.Choice(["ff", "opt"]), default="ff", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="print JSON instead of text")
def color(path, algo, as_json):
    """Print FirstFit colors per arrival index, or the optimal rows."""
    inst = _load(path)
    if algo == "ff":
        colors = list(first_fit(inst).colors)
        click.echo(json.dumps({"colors": colors}) if as_json else " ".join(map(str, colors)))
        return
    if len(inst) == 0:
        click.echo(json.dumps({"rows": []}) if as_json else "", nl=as_json)
        return
    rows = [sorted(r) for r in optimal_rows(inst).rows]
    if as_json:
        click.echo(json.dumps({"rows": rows}))
    else:
        for r in rows:
            click.echo(" ".join(map(str, r)))


@main.command()
@click.option("-i", "--input", "path", required=True)
def omega(path):
    """Print the clique number."""
    inst = _load(path)
    try:
        click.echo(clique_number(inst))
    except EmptyInstanceError as e:
        _die(str(e))


@main.command()
@click.option("-i", "--input", "path", required=True)
@click.option("--checks", default="all", show_default=True, help="'all' or comma list of names/numbers")
@click.option("--report", "report_path", default=None, help="write the JSON report here")
@click.option("--fractions", is_flag=True, help="include alpha/beta/gamma/delta per x")
@click.option("--all-records", is_flag=True, help="list passing records too")
def verify(path, checks, report_path, fractions, all_records):
    """Run the lemma suite; exit 1 if any check fails."""
    inst = _load(path)
    names = _check_list(checks)
    rep = verify_lemma_suite(inst, names, keep_records=all_records, with_fractions=fractions)
    doc = fio.report_document(rep, inst, passed_records=all_records)
    if report_path:
        _write(report_path, fio.dumps(doc))
    failed = sum(t.failed for t in rep.tallies.values())
    applicable = sum(t.applicable for t in rep.tallies.values())
    click.echo(f"n={rep.n} omega={rep.omega} ff={rep.ff_colors} checks_applicable={applicable} "
               f"failed={failed}")
    for r in rep.failures:
        click.echo(f"FAIL {r.check} x={r.x} {json.dumps(r.witness, sort_keys=True)}")
    sys.exit(0 if failed == 0 else EXIT_FAIL)


@main.command()
@click.option("--mode", type=click.Choice(["exhaustive", "random", "greedy"]), required=True)
@click.option("--max-n", type=click.IntRange(min=1), default=8, show_default=True)
@click.option("--grid", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--span", default="4", show_default=True)
@click.option("--omega-cap", type=click.IntRange(min=1), default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--budget", type=click.IntRange(min=1), default=None,
              help="nodes (exhaustive), instances (random) or presentations (greedy)")
@click.option("--closed-only", is_flag=True)
@click.option("--strict", is_flag=True, help="exit 1 if the search stopped at its budget")
@click.option("--out", default=None, help="write the JSON search result here")
def search(mode, max_n, grid, span, omega_cap, seed, workers, budget, closed_only, strict, out):
    """Adversarial search for instances with many FirstFit colors."""
    try:
        span_q = Fraction(span)
    except (ValueError, ZeroDivisionError):
        _die(f"bad span {span!r}")
    kinds = (Kind.CLOSED,) if closed_only else KINDS
    try:
        if mode == "exhaustive":
            res = exhaustive_search(max_n, grid, span_q, omega_cap, kinds, node_budget=budget or 5_000_000)
        elif mode == "random":
            res = random_search(max_n, grid, span_q, omega_cap, seed, budget or 1000, workers)
        else:
            if omega_cap is None:
                _die("--omega-cap is required for greedy mode")
            res = greedy_adversary(omega_cap, budget or 50, grid, span_q)
    except ContractViolation as e:
        _die(str(e))
    failures = verify_result(res)
    doc = fio.search_document(res)
    doc["lemma_failures"] = failures
    if out:
        _write(out, fio.dumps(doc))
    click.echo(f"mode={mode} ff={res.ff_colors} omega={res.omega} nodes={res.nodes_explored} "
               f"complete={str(res.complete).lower()} lemma_failures={failures}")
    click.echo(fio.serialize_instance(res.best_instance), nl=False)
    click.echo(f"wall_time={res.wall_time:.3f}s", err=True)
    if failures or (strict and not res.complete):
        sys.exit(EXIT_FAIL)


@main.command()
@click.option("--n", type=click.IntRange(min=0), required=True)
@click.option("--grid", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--span", default="4", show_default=True)
@click.option("--p-open", type=click.FloatRange(0, 1), default=0.5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--integral", is_flag=True, help="force the integer grid")
@click.option("-o", "--out", default=None)
def gen(n, grid, span, p_open, seed, integral, out):
    """Write a random instance file."""
    try:
        cfg = GenConfig(n, grid, span, p_open, seed, integral)
    except (ContractViolation, ValueError, ZeroDivisionError) as e:
        _die(str(e))
    _write(out, fio.serialize_instance(gen_random(cfg)))


@main.command()
@click.option("-d", "--dir", "directory", required=True, type=click.Path(file_okay=False))
def ratio(directory):
    """CSV ratio table over the search results (*.json) in a directory."""
    results = []
    for p in sorted(Path(directory).glob("*.json")):
        try:
            results.append(fio.load_search_document(json.loads(p.read_text())))
        except (KeyError, ValueError, fio.ParseError) as e:
            _die(f"{p}: not a search result ({e})")
    click.echo(fio.ratio_csv(ratio_table(results)), nl=False)


if __name__ == "__main__":
    main()
