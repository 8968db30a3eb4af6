"""One test per acceptance criterion; each prints a PASS/FAIL line.

Run as a script to print only the twelve lines: ``python tests/test_acceptance.py``.
"""

import sys

import pytest

from mzscatter import acceptance

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script from elsewhere
    ACCEPTANCE_LINES = []


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number):
    res = acceptance.CRITERIA[number]()
    line = res.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert res.passed, line


if __name__ == "__main__":
    results = acceptance.run()
    sys.exit(0 if all(r.passed for r in results) else 1)
