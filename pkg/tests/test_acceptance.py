"""Acceptance suite: one test per criterion, each printing a single pass/fail line.

Run directly with ``python3 tests/test_acceptance.py`` for a plain listing.
"""
import sys

import pytest

from holonomy_lab.acceptance import CRITERIA, DEFAULT_SEED, run_criterion

RESULTS = {}


@pytest.mark.parametrize("number", sorted(CRITERIA), ids=lambda n: f"AC{n:02d}")
def test_criterion(number):
    result = run_criterion(number, DEFAULT_SEED)
    RESULTS[number] = result
    print(result.line())
    assert result.passed, result.detail


def main() -> int:
    failed = 0
    for number in sorted(CRITERIA):
        result = run_criterion(number, DEFAULT_SEED)
        print(result.line(), flush=True)
        failed += not result.passed
    print(f"{len(CRITERIA) - failed}/{len(CRITERIA)} criteria pass")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
