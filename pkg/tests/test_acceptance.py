"""The acceptance battery: one pass/fail line per criterion.

Run with ``pytest -v tests/test_acceptance.py -s`` to see the lines as the
criteria complete; each test asserts the criterion's own ok flag.
"""

import time

import pytest

from opecalc import acceptance


def _report(k, result, elapsed):
    status = "PASS" if result["ok"] else "FAIL"
    print(f"criterion {k}: {status} — {result['name']} ({elapsed:.1f}s)")


@pytest.mark.parametrize("k", range(1, 11))
def test_criterion(k):
    t0 = time.time()
    result = acceptance.CRITERIA[k - 1]()
    _report(k, result, time.time() - t0)
    assert result["ok"], result["details"]
