import json
import math

from nevlab.report import FAIL, INCONCLUSIVE, PASS, Report


def test_verdict_from_margins():
    rep = Report("t", "f")
    rep.add(1.0, 1.0, 2.0)
    assert rep.finish().verdict == PASS
    rep.add(2.0, 2.0 + 1e-13, 2.0, slack=1e-12)
    assert rep.finish().verdict == PASS
    rep.add(3.0, 3.0, 2.0)
    assert rep.finish().verdict == FAIL


def test_empty_report_is_inconclusive():
    assert Report("t", "f").finish().verdict == INCONCLUSIVE


def test_json_is_strict():
    rep = Report("t", "f", {"eta": 1 + 2j, "bad": math.nan, "big": math.inf})
    rep.add(1.0, 0.0, math.inf)
    d = json.loads(rep.to_json())
    assert d["params"] == {"eta": [1.0, 2.0], "bad": None, "big": "inf"}
    assert d["samples"][0]["rhs"] == "inf"
    assert "notes" not in d
