"""Collects one verdict line per acceptance criterion."""

from __future__ import annotations

RESULTS: list[str] = []


def record(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} ({detail})"
    RESULTS.append(line)
    print(line)
