from __future__ import annotations

import math

import jsonschema
import pytest
from hypothesis import given, strategies as st

from repeatstat import report as rpt
from repeatstat.metrics import RunRecord, success_curve

json_values = st.recursive(
    st.none() | st.booleans() | st.integers() | st.floats(allow_nan=False) | st.text(max_size=5),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=5), inner, max_size=4),
    max_leaves=20,
)


@given(st.dictionaries(st.text(max_size=5), json_values, max_size=5))
def test_report_roundtrip_lossless(results):
    # the string markers collide with real strings only for "inf"/"nan"
    rep = rpt.make_report("analyze", {"x": 1}, results)
    back = rpt.loads(rpt.dumps(rep))
    assert back == rpt.loads(rpt.dumps(back))
    assert back["results"].keys() == rep["results"].keys()


def test_infinity_marker():
    rep = rpt.make_report("analyze", {}, {"r": math.inf, "neg": -math.inf, "v": [math.inf]})
    text = rpt.dumps(rep)
    assert '"inf"' in text and "Infinity" not in text
    back = rpt.loads(text)
    assert back["results"]["r"] == math.inf and back["results"]["neg"] == -math.inf


def test_schema_accepts_reports_and_rejects_missing_fields():
    schema = rpt.load_schema()
    rep = rpt.make_report("plan", {"epsilon": 0.03}, {"n": 1064},
                          {"rng": {"master_seed": 1, "key": [0], "generator": "Philox"}})
    jsonschema.validate(rpt.loads(rpt.dumps(rep)), schema)
    bad = dict(rep)
    del bad["schema_version"]
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, schema)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(dict(rep, command="frobnicate"), schema)


def test_curve_csv_roundtrip():
    recs = [RunRecord(0, 3), RunRecord(1, None), RunRecord(2, 1)]
    curve = success_curve(recs, 5)
    text = rpt.curve_csv(curve)
    assert text.splitlines()[0] == "iter,successes,n"
    assert rpt.parse_curve(text) == curve


def test_records_csv_roundtrip():
    recs = [RunRecord(0, 3), RunRecord(1, None)]
    assert rpt.parse_records(rpt.records_csv(recs)) == recs


@pytest.mark.parametrize("text", [
    "",
    "a,b,c\n1,2,3\n",
    "iter,successes,n\n",
    "iter,successes,n\n1,0,5\n3,1,5\n",
    "iter,successes,n\n1,0,5\n2,1,6\n",
])
def test_parse_curve_rejects(text):
    with pytest.raises(ValueError):
        rpt.parse_curve(text)


def test_parse_records_rejects_header():
    with pytest.raises(ValueError):
        rpt.parse_records("id,iter\n0,1\n")
