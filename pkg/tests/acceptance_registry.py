"""Collects acceptance-criterion outcomes so the terminal summary can print
one pass/fail line per criterion regardless of output capturing."""
from __future__ import annotations

_RESULTS: dict[int, tuple[str, bool]] = {}


def record(num: int, label: str, passed: bool) -> None:
    _RESULTS[num] = (label, passed)


def summary_lines() -> list[str]:
    return [f"ACCEPTANCE {num} {'PASS' if ok else 'FAIL'} {label}"
            for num, (label, ok) in sorted(_RESULTS.items())]
