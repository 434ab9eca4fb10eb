"""Text instance format and JSON report/search-result documents."""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import re
from fractions import Fraction
from typing import Any, Iterable, Optional

from .analysis import LemmaReport
from .intervals import Instance, Kind
from .search import SearchResult

SCHEMA_VERSION = 1

_LINE = re.compile(r"^(\S+)\s+(-?\d+(?:/\d+)?)$")


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_instance(text: str) -> Instance:
    """One ``<kind> <rational>`` per line in arrival order; ``#`` starts a comment."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ParseError(lineno, f"expected '<open|closed> <rational>', got {raw.strip()!r}")
        word, num = m.groups()
        try:
            kind = Kind.parse(word)
        except ValueError:
            raise ParseError(lineno, f"unknown kind {word!r}") from None
        if "/" in num and int(num.split("/")[1]) == 0:
            raise ParseError(lineno, "zero denominator")
        pairs.append((Fraction(num), kind))
    return Instance.from_pairs(pairs)


def serialize_instance(instance: Instance) -> str:
    return "".join(f"{iv.kind.value} {iv.left}\n" for iv in instance)


def digest(instance: Instance) -> str:
    return hashlib.sha256(serialize_instance(instance).encode()).hexdigest()


def _plain(value: Any) -> Any:
    """Make witnesses JSON-safe: Fractions become strings, sets sorted lists."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted(_plain(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item"):  # numpy scalar
        return value.item()
    return value


def report_document(report: LemmaReport, instance: Instance, search: Optional[SearchResult] = None,
                    passed_records: bool = False) -> dict:
    """Report with a stable field order.

    Failed records are always listed with their witnesses; passing records only
    when ``passed_records`` is set, otherwise the per-check tallies cover them.
    """
    records = [r for r in report.records if passed_records or (r.applicable and not r.passed)]
    doc = {
        "schema_version": SCHEMA_VERSION,
        "digest": digest(instance),
        "n": report.n,
        "omega": report.omega,
        "ff_colors": report.ff_colors,
        "ok": report.ok,
        "tallies": {name: dict(applicable=t.applicable, passed=t.passed, failed=t.failed,
                               inapplicable=t.inapplicable)
                    for name, t in report.tallies.items()},
        "records": [dict(name=r.check, x=r.x, applicable=r.applicable, passed=r.passed,
                         witness=_plain(r.witness)) for r in records],
        "fractions": {str(x): _plain(f) for x, f in sorted(report.fractions.items())},
        "anomalies": _plain(report.anomalies),
    }
    if search is not None:
        doc["search"] = search_metadata(search)
    return doc


def search_metadata(result: SearchResult) -> dict:
    # wall time is left out on purpose: documents must be byte-identical across runs
    return {
        "mode": result.mode,
        "params": _plain(result.params),
        "ff_colors": result.ff_colors,
        "omega": result.omega,
        "nodes_explored": result.nodes_explored,
        "complete": result.complete,
        "exceeds_stated_bound": result.exceeds_stated_bound,
    }


def search_document(result: SearchResult) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "digest": digest(result.best_instance)}
    doc.update(search_metadata(result))
    doc["instance"] = serialize_instance(result.best_instance)
    return doc


def load_search_document(doc: dict) -> SearchResult:
    inst = parse_instance(doc["instance"])
    return SearchResult(inst, doc["ff_colors"], doc["omega"], doc["nodes_explored"], 0.0,
                        doc["complete"], doc["mode"], doc["params"])


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def ratio_csv(rows: Iterable[dict]) -> str:
    buf = _io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["omega", "max_ff", "bound_2w", "bound_73w"], lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
