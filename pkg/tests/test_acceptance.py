"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run directly with ``python tests/test_acceptance.py`` or through pytest; under pytest the
lines are also collected into the terminal summary.
"""

import os
import subprocess
import sys
import tempfile

import pytest

from discrete_radon.seeding import spawn
from discrete_radon.verify import CRITERIA

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

SEED = 7
CHILDREN = spawn(SEED, 16)


def _fmt(val) -> str:
    if isinstance(val, float):
        return f"{val:.4g}"
    if isinstance(val, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in val):
        return "[" + " ".join(_fmt(v) for v in val) + "]"
    return str(val)


def _scalars(metrics: dict, limit: int = 6) -> str:
    parts = []
    for key, val in metrics.items():
        if key == "rows" and isinstance(val, list):
            worst = max((r.get("increase", 0.0) for r in val), default=0.0)
            parts.append(f"rows={len(val)}, max_increase={worst:.4g}")
        elif isinstance(val, (bool, int, str, float)) or (isinstance(val, list) and len(val) <= 8):
            parts.append(f"{key}={_fmt(val)}")
        if len(parts) == limit:
            break
    return ", ".join(parts)


def _report(num: int, name: str, passed: bool, summary: str) -> str:
    line = f"CRITERION {num} {'PASS' if passed else 'FAIL'} {name}: {summary}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def _run_criterion(num: int) -> dict:
    child_seed = int(CHILDREN[num].generate_state(1)[0])
    res = CRITERIA[num][1](child_seed)
    _report(num, res["name"], res["passed"], _scalars(res["metrics"]))
    return res


@pytest.mark.parametrize("num", range(1, 12))
def test_criterion(num):
    res = _run_criterion(num)
    assert res["passed"], res["detail"]


def _verify_once(out_dir: str) -> bytes:
    env = dict(os.environ, RADON_THREADS="1")
    subprocess.run(
        [sys.executable, "-m", "discrete_radon.cli", "verify", "--suite", "all", "--seed", str(SEED), "--out-dir", out_dir],
        env=env, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL, check=False,
    )
    with open(os.path.join(out_dir, "summary.json"), "rb") as fh:
        return fh.read()


def criterion_12() -> bool:
    with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
        first, second = _verify_once(a), _verify_once(b)
    same = first == second
    _report(12, "determinism", same, f"summary bytes={len(first)}, identical={same}")
    return same


def test_criterion_12_determinism():
    assert criterion_12()


if __name__ == "__main__":
    ok = True
    for n in range(1, 12):
        ok &= _run_criterion(n)["passed"]
    ok &= criterion_12()
    sys.exit(0 if ok else 1)
