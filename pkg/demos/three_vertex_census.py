"""Classify all 64 mixed graphs on three vertices and summarise them.

Writes census-m3.jsonl in a temporary directory; rerunning with the same
store resumes instead of recomputing.
"""

import tempfile
from pathlib import Path

from semgb.census import decode, load_store, run_census

with tempfile.TemporaryDirectory() as tmp:
    store = Path(tmp) / "census-m3.jsonl"
    summary = run_census(3, store)
    print(summary.to_text())

    print()
    print("graphs where single-door fails but an instrument works:")
    records = load_store(store, 3)
    for gid in summary.iv_needed_ids:
        print(f"  {gid:3d}  {decode(3, gid)}  {records[gid]['report']['verdict']['text']}")
