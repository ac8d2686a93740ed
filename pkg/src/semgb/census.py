"""Exhaustive classification of all mixed graphs on m vertices.

Graph ids are bitmasks: bit k (k = 0, 1, ...) is the k-th pair i < j in
lexicographic order as a directed edge, and bit P + k the same pair as a
bidirected edge, where P = m(m-1)/2.

The store is a JSON-lines file, one record per graph, written in ascending id
order by a single writer, with a small ``.idx`` sidecar listing the stored ids.
"""

from __future__ import annotations

import json
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator

from . import __version__
from .criteria import back_door, instrumental_variable, is_bow_free, single_door
from .groebner import Budget
from .identify import DEFAULT_BUDGET, GraphReport, classify_graph
from .semgraph import GraphError, MixedGraph

__all__ = [
    "SCHEMA_VERSION",
    "StoreError",
    "pairs",
    "encode",
    "decode",
    "enumerate_graphs",
    "census_record",
    "run_census",
    "load_store",
    "summarize",
    "CensusSummary",
]

SCHEMA_VERSION = 1


class StoreError(RuntimeError):
    """The census store is corrupt or from an incompatible schema."""


def pairs(m: int) -> list[tuple[int, int]]:
    return list(combinations(range(1, m + 1), 2))


def encode(g: MixedGraph) -> int:
    ps = pairs(g.m)
    n = len(ps)
    gid = 0
    for k, e in enumerate(ps):
        if e in g.directed:
            gid |= 1 << k
        if e in g.bidirected:
            gid |= 1 << (n + k)
    return gid


def decode(m: int, gid: int) -> MixedGraph:
    ps = pairs(m)
    n = len(ps)
    if not 0 <= gid < 1 << (2 * n):
        raise GraphError(f"graph id {gid} out of range for m={m}")
    d = [e for k, e in enumerate(ps) if gid >> k & 1]
    b = [e for k, e in enumerate(ps) if gid >> (n + k) & 1]
    return MixedGraph(m, d, b)


def enumerate_graphs(m: int) -> Iterator[MixedGraph]:
    if m < 1:
        raise ValueError("m must be positive")
    for gid in range(1 << (m * (m - 1))):
        yield decode(m, gid)


# ---------------------------------------------------------------------------
# records
# ---------------------------------------------------------------------------


def criteria_record(g: MixedGraph) -> dict:
    edges = {}
    for i, j in g.sorted_directed:
        sd = single_door(g, i, j)
        iv = instrumental_variable(g, i, j)
        edges[f"{i}->{j}"] = {
            "single_door": sorted(sd.witness) if sd.satisfied else None,
            "iv": iv.witness,
        }
    bd = {}
    for i, j in pairs(g.m):
        r = back_door(g, i, j)
        bd[f"{i},{j}"] = sorted(r.witness) if r.satisfied else None
    return {"edges": edges, "back_door": bd, "bow_free": is_bow_free(g)}


def census_record(m: int, gid: int, budget: Budget, retry_budgets: tuple[Budget, ...] = ()) -> dict:
    """Classify one graph; unresolved targets are retried with each larger budget in turn."""
    from .report import report_to_dict   # local import keeps worker start-up light

    g = decode(m, gid)
    t0 = time.perf_counter()
    rep = classify_graph(g, budget)
    tiers = 0
    for bigger in retry_budgets:
        todo = [t for t in rep.targets if rep.statuses[t.name].kind == "unresolved"]
        if not todo and rep.vanishing_status == "ok":
            break
        tiers += 1
        retry = classify_graph(g, bigger, targets=todo, with_vanishing=rep.vanishing_status != "ok")
        rep.statuses.update(retry.statuses)
        rep.seconds.update(retry.seconds)
        if retry.vanishing is not None:
            rep.vanishing = retry.vanishing
            rep.vanishing_status = retry.vanishing_status
    return {
        "schema_version": SCHEMA_VERSION,
        "engine_version": __version__,
        "m": m,
        "id": gid,
        "report": report_to_dict(rep),
        "criteria": criteria_record(g),
        "retry_tiers": tiers,
        "wall_seconds": round(time.perf_counter() - t0, 6),
    }


def _worker(args):
    m, gid, budget, retry = args
    return census_record(m, gid, budget, retry)


# ---------------------------------------------------------------------------
# store
# ---------------------------------------------------------------------------


def _index_path(store: Path) -> Path:
    return store.with_name(store.name + ".idx")


def load_store(path: str | os.PathLike, m: int | None = None, repair: bool = False) -> dict[int, dict]:
    """Records keyed by id.  A truncated final line (interrupted write) is
    dropped, and with ``repair`` also cut from the file; anything else
    malformed raises :class:`StoreError`."""
    path = Path(path)
    if not path.exists():
        return {}
    records: dict[int, dict] = {}
    with open(path, "rb") as fh:
        data = fh.read()
    lines = data.split(b"\n")
    tail = lines.pop()          # empty when the file ends with a newline
    good_len = len(data) - len(tail)
    for lineno, raw in enumerate(lines, 1):
        if not raw.strip():
            continue
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise StoreError(f"{path}:{lineno}: malformed record ({exc})") from None
        _check_record(rec, path, lineno, m)
        records[rec["id"]] = rec
    if tail.strip():
        if repair:
            with open(path, "r+b") as fh:
                fh.truncate(good_len)
    return records


def _check_record(rec, path, lineno, m):
    if not isinstance(rec, dict) or rec.get("schema_version") != SCHEMA_VERSION:
        raise StoreError(f"{path}:{lineno}: unsupported schema version {rec.get('schema_version')!r}"
                         if isinstance(rec, dict) else f"{path}:{lineno}: record is not an object")
    for key in ("m", "id", "report", "criteria"):
        if key not in rec:
            raise StoreError(f"{path}:{lineno}: record lacks {key!r}")
    if m is not None and rec["m"] != m:
        raise StoreError(f"{path}:{lineno}: record for m={rec['m']} in an m={m} store")


def _write_index(store: Path, m: int, ids: Iterable[int]) -> None:
    idx = {"schema_version": SCHEMA_VERSION, "m": m, "ids": sorted(ids)}
    tmp = _index_path(store).with_suffix(".tmp")
    tmp.write_text(json.dumps(idx) + "\n")
    tmp.replace(_index_path(store))


def run_census(m: int, store: str | os.PathLike, budget: Budget = DEFAULT_BUDGET, resume: bool = True,
               jobs: int = 1, only: Iterable[int] | None = None,
               retry_budgets: tuple[Budget, ...] | None = None, progress=None) -> "CensusSummary":
    """Classify every graph (or ``only`` those ids) and append records to ``store``.

    Without ``resume`` an existing store is replaced.  Records are written in
    ascending id order regardless of ``jobs``.
    """
    store = Path(store)
    store.parent.mkdir(parents=True, exist_ok=True)
    if retry_budgets is None:
        retry_budgets = (budget.scaled(4),)
    ids = sorted(set(only)) if only is not None else list(range(1 << (m * (m - 1))))
    for gid in ids:
        decode(m, gid)
    if resume:
        done = load_store(store, m, repair=True)
    else:
        done = {}
        store.write_text("")
    todo = [gid for gid in ids if gid not in done]
    stored_ids = set(done)
    args = [(m, gid, budget, tuple(retry_budgets)) for gid in todo]
    with open(store, "a", encoding="utf-8") as fh:
        if jobs > 1 and len(args) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = pool.map(_worker, args, chunksize=1)
                _drain(results, fh, stored_ids, progress)
        else:
            _drain(map(_worker, args), fh, stored_ids, progress)
    _write_index(store, m, stored_ids)
    records = load_store(store, m)
    return summarize([records[g] for g in ids if g in records], m)


def _drain(results, fh, stored_ids, progress):
    for rec in results:
        fh.write(json.dumps(rec, sort_keys=True) + "\n")
        fh.flush()
        stored_ids.add(rec["id"])
        if progress is not None:
            progress(rec)


# ---------------------------------------------------------------------------
# summary
# ---------------------------------------------------------------------------


@dataclass
class CensusSummary:
    m: int
    graphs: int
    verdicts: Counter = field(default_factory=Counter)
    algebraic_k: Counter = field(default_factory=Counter)
    unresolved_ids: list[int] = field(default_factory=list)
    bow_free: int = 0
    bow_free_all_single_door: int = 0
    bow_free_not_generic: list[int] = field(default_factory=list)
    iv_needed_ids: list[int] = field(default_factory=list)
    not_identifiable_with_direct_effect: int = 0
    uncertified_direct_effects: list[tuple[int, str]] = field(default_factory=list)
    algebra_only_ids: list[int] = field(default_factory=list)
    generic_by_criteria: int = 0
    criterion_soundness_violations: list[tuple[int, str, str]] = field(default_factory=list)

    @property
    def generic(self) -> int:
        return self.verdicts["generic"]

    @property
    def not_generic(self) -> int:
        return self.verdicts["not"]

    @property
    def algebraic(self) -> int:
        return self.verdicts["algebraic"]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "m": self.m,
            "graphs": self.graphs,
            "generically_identifiable": self.generic,
            "algebraically_k_identified": {str(k): v for k, v in sorted(self.algebraic_k.items())},
            "not_generically_identifiable": self.not_generic,
            "unresolved": sorted(self.unresolved_ids),
            "bow_free": self.bow_free,
            "bow_free_all_single_door": self.bow_free_all_single_door,
            "bow_free_not_generic": sorted(self.bow_free_not_generic),
            "iv_needed": sorted(self.iv_needed_ids),
            "not_identifiable_with_identified_direct_effect": self.not_identifiable_with_direct_effect,
            "generic_by_criteria": self.generic_by_criteria,
            "generic_with_algebra_only_direct_effect": sorted(self.algebra_only_ids),
            "uncertified_direct_effects": [[g, e] for g, e in self.uncertified_direct_effects],
            "criterion_soundness_violations": [list(v) for v in self.criterion_soundness_violations],
        }

    def to_text(self) -> str:
        ks = ", ".join(f"{v} algebraically {k}-identified" for k, v in sorted(self.algebraic_k.items()))
        lines = [
            f"census over m={self.m}: {self.graphs} graphs",
            f"  {self.generic} generically identifiable / {self.not_generic} not"
            + (f" / {ks}" if ks else " / 0 algebraically k>=2"),
            f"  unresolved: {len(self.unresolved_ids)}",
            f"  bow-free: {self.bow_free} ({self.bow_free_all_single_door} with every edge single-door)",
            f"  graphs needing an instrument: {len(self.iv_needed_ids)} {sorted(self.iv_needed_ids)}",
            f"  non-identifiable graphs with an identified direct effect: "
            f"{self.not_identifiable_with_direct_effect}",
            f"  generically identifiable via single-door/IV alone: {self.generic_by_criteria}",
            f"  generically identifiable with algebra-only direct effects: {len(self.algebra_only_ids)}",
            f"  identified direct effects without a graphical certificate: "
            f"{len(self.uncertified_direct_effects)}",
            f"  criterion soundness violations: {len(self.criterion_soundness_violations)}",
        ]
        return "\n".join(lines)


def summarize(records: Iterable[dict], m: int) -> CensusSummary:
    records = sorted(records, key=lambda r: r["id"])
    s = CensusSummary(m, len(records))
    for rec in records:
        gid = rec["id"]
        rep = rec["report"]
        crit = rec["criteria"]
        verdict = rep["verdict"]
        s.verdicts[verdict["kind"]] += 1
        if verdict["kind"] == "algebraic":
            s.algebraic_k[verdict["k"]] += 1
        if verdict["kind"] == "unresolved":
            s.unresolved_ids.append(gid)
        statuses = {t["name"]: t["status"] for t in rep["targets"]}
        direct = {name: st for name, st in statuses.items() if name.startswith("l")}
        edges = crit["edges"]
        sd_all = all(e["single_door"] is not None for e in edges.values())
        if crit["bow_free"]:
            s.bow_free += 1
            if sd_all:
                s.bow_free_all_single_door += 1
            if verdict["kind"] != "generic":
                s.bow_free_not_generic.append(gid)
        identified_direct = 0
        uncertified = False
        needs_iv = False
        for edge, cert in edges.items():
            i, j = (int(v) for v in edge.split("->"))
            name = _lam_name(i, j)
            kind = direct[name]["kind"]
            certified = cert["single_door"] is not None or cert["iv"] is not None
            if kind == "generic":
                identified_direct += 1
                if not certified:
                    uncertified = True
                    s.uncertified_direct_effects.append((gid, edge))
                elif cert["single_door"] is None:
                    needs_iv = True
            elif certified and kind != "unresolved":
                s.criterion_soundness_violations.append((gid, edge, kind))
        for pair, z in crit["back_door"].items():
            i, j = (int(v) for v in pair.split(","))
            name = f"TE({i},{j})"
            if z is not None and name in statuses and statuses[name]["kind"] not in ("generic", "unresolved"):
                s.criterion_soundness_violations.append((gid, f"back-door {pair}", statuses[name]["kind"]))
        if verdict["kind"] == "generic":
            if needs_iv and not uncertified:
                s.iv_needed_ids.append(gid)
            if uncertified:
                s.algebra_only_ids.append(gid)
            else:
                s.generic_by_criteria += 1
        if verdict["kind"] == "not" and identified_direct:
            s.not_identifiable_with_direct_effect += 1
    return s


def _lam_name(i: int, j: int) -> str:
    from .parametrize import lam

    return lam(i, j)
