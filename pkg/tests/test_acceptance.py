"""The eleven acceptance criteria; one PASS/FAIL line per criterion."""

import pytest

from cwillmore.acceptance import CRITERIA


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{c.number}" for c in CRITERIA])
def test_criterion(crit, capsys):
    chk = crit()
    with capsys.disabled():
        print("\n" + chk.line())
    assert chk.passed, chk.line()
