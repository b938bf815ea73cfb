import pytest

from geomforge.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("crit", CRITERIA, ids=lambda c: f"criterion_{c.number}")
def test_criterion(crit):
    res = run_criterion(crit)
    mark = "PASS" if res.ok else "FAIL"
    print(f"\n{mark} criterion {crit.number}: {crit.title} ({res.elapsed_s:.2f} s)")
    failed = [v.to_json() for v in res.verdicts if not v.ok]
    assert not failed, failed
    assert res.within_limit, f"{res.elapsed_s:.1f} s over the {crit.limit_s} s limit"
