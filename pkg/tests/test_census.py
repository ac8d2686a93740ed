import json
import os
import signal
import subprocess
import sys
import time

import pytest
from hypothesis import given
from hypothesis import strategies as st

from semgb.census import (
    SCHEMA_VERSION,
    StoreError,
    decode,
    encode,
    enumerate_graphs,
    load_store,
    run_census,
    summarize,
)
from semgb.groebner import Budget
from semgb.semgraph import GraphError, MixedGraph

TIMING_KEYS = ("wall_seconds",)


def strip_timing(rec):
    rec = json.loads(json.dumps(rec))
    for k in TIMING_KEYS:
        rec.pop(k, None)
    rec["report"].pop("seconds", None)
    return rec


def store_records(path):
    with open(path) as fh:
        return [strip_timing(json.loads(line)) for line in fh if line.strip()]


@given(st.integers(0, 4095))
def test_id_round_trip_four_vertices(gid):
    assert encode(decode(4, gid)) == gid


def test_id_layout():
    # bit k: k-th pair as directed edge; bit P + k: same pair bidirected
    assert decode(3, 1) == MixedGraph(3, [(1, 2)])
    assert decode(3, 1 << 2) == MixedGraph(3, [(2, 3)])
    assert decode(3, 1 << 3) == MixedGraph(3, [], [(1, 2)])
    with pytest.raises(GraphError):
        decode(3, 64)


def test_enumeration_counts():
    assert len(list(enumerate_graphs(3))) == 64
    assert len({encode(g) for g in enumerate_graphs(3)}) == 64
    assert len(list(enumerate_graphs(2))) == 4


def test_store_records_are_self_describing(tmp_path):
    store = tmp_path / "s.jsonl"
    run_census(3, store, only=[0, 37])
    recs = load_store(store, 3)
    assert sorted(recs) == [0, 37]
    for rec in recs.values():
        assert rec["schema_version"] == SCHEMA_VERSION
        assert rec["m"] == 3
    idx = json.loads((tmp_path / "s.jsonl.idx").read_text())
    assert idx["ids"] == [0, 37]


def test_resume_does_no_new_work(tmp_path):
    store = tmp_path / "s.jsonl"
    first = run_census(3, store, only=range(10))
    before = store.read_bytes()
    seen = []
    again = run_census(3, store, only=range(10), resume=True, progress=seen.append)
    assert seen == []
    assert store.read_bytes() == before
    assert again.to_dict() == first.to_dict()


def test_partial_then_resume_equals_uninterrupted(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run_census(3, a, only=range(20))
    run_census(3, b, only=range(7))
    run_census(3, b, only=range(20), resume=True)
    assert store_records(a) == store_records(b)


def test_truncated_tail_is_dropped_and_recomputed(tmp_path):
    store = tmp_path / "s.jsonl"
    run_census(3, store, only=range(5))
    data = store.read_bytes()
    cut = data[: len(data) - 40]          # chop into the last record
    store.write_bytes(cut)
    assert sorted(load_store(store, 3)) == [0, 1, 2, 3]
    run_census(3, store, only=range(5), resume=True)
    ref = tmp_path / "ref.jsonl"
    run_census(3, ref, only=range(5))
    assert store_records(store) == store_records(ref)


def test_corruption_detected(tmp_path):
    store = tmp_path / "s.jsonl"
    run_census(3, store, only=range(3))
    lines = store.read_text().splitlines(keepends=True)
    lines[1] = "{not json\n"
    store.write_text("".join(lines))
    with pytest.raises(StoreError):
        load_store(store, 3)
    store.write_text(json.dumps({"schema_version": 99, "id": 0}) + "\n")
    with pytest.raises(StoreError):
        load_store(store, 3)
    other = tmp_path / "o.jsonl"
    run_census(2, other)
    with pytest.raises(StoreError):
        load_store(other, 3)


def test_worker_count_independent(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run_census(3, a, only=range(0, 64, 3), jobs=1)
    run_census(3, b, only=range(0, 64, 3), jobs=2)
    assert store_records(a) == store_records(b)


def test_killed_run_resumes_to_identical_store(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    run_census(3, a)
    code = ("import sys; from semgb.census import run_census; "
            f"run_census(3, {str(b)!r})")
    proc = subprocess.Popen([sys.executable, "-c", code])
    deadline = time.time() + 60
    while time.time() < deadline:
        if b.exists() and b.read_text().count("\n") >= 10:
            break
        time.sleep(0.05)
    proc.send_signal(signal.SIGKILL)
    proc.wait()
    n_before = b.read_text().count("\n")
    assert n_before < 64
    run_census(3, b, resume=True)
    assert store_records(a) == store_records(b)


def test_summary_from_store_is_deterministic(tmp_path):
    store = tmp_path / "s.jsonl"
    s1 = run_census(3, store, only=range(0, 64, 5))
    recs = load_store(store, 3)
    s2 = summarize(list(reversed(list(recs.values()))), 3)
    assert s1.to_dict() == s2.to_dict()


def test_retry_tier_resolves_with_larger_budget(tmp_path):
    # first tier too small for anything; retry tier unlimited
    store = tmp_path / "s.jsonl"
    s = run_census(3, store, Budget(max_seconds=None, max_pairs=0), only=[37],
                   retry_budgets=(Budget(None, None),))
    rec = load_store(store, 3)[37]
    assert rec["retry_tiers"] == 1
    assert s.unresolved_ids == []
    assert rec["report"]["verdict"]["kind"] == "generic"


def test_unresolved_reported_without_retry(tmp_path):
    store = tmp_path / "s.jsonl"
    s = run_census(3, store, Budget(max_seconds=None, max_pairs=0), only=[37], retry_budgets=())
    assert s.unresolved_ids == [37]
    assert s.to_dict()["unresolved"] == [37]
