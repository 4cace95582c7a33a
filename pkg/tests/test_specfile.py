import json
import re
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import DATA
from markex import specfile
from markex.errors import InputError

ALL_SPECS = sorted(p.name for p in DATA.glob("*.json"))


@pytest.mark.parametrize("name", ALL_SPECS)
def test_round_trip(name):
    sp = specfile.load(DATA / name)
    again = specfile.loads(sp.dumps())
    assert again == sp
    assert specfile.loads(again.dumps()).dumps() == sp.dumps()


def test_weights_are_exact():
    sp = specfile.load(DATA / "cerrw4.json")
    assert sp.alpha["gold"] == F(3, 2)
    assert {b for *_, b in sp.edges} <= {F(1), F(2), F(1, 2)}
    doc = json.loads(sp.dumps())
    assert doc["colors"][3]["alpha"] == "3/2"
    assert specfile.loads('{"vertices":[0,1],"colors":[{"name":"c","alpha":"0.1"}],'
                          '"edges":[{"from":0,"to":1,"color":"c","beta":0.25}],"x0":0}').alpha["c"] == F(1, 10)


def test_dummy_only_colors_left_out_of_base():
    sp = specfile.load(DATA / "dummy_inequality.json")
    assert "c4" not in sp.graph().alpha
    assert "c4" in sp.graph(with_dummy_colors=True).alpha
    assert "c4" in sp.augmented().graph.alpha


def _doc(**over):
    doc = {
        "vertices": ["a", "b"],
        "colors": [{"name": "c", "alpha": 1}],
        "edges": [{"from": "a", "to": "b", "color": "c", "beta": 1}],
        "x0": "a",
    }
    doc.update(over)
    return doc


@pytest.mark.parametrize(
    "over, where",
    [
        ({"vertices": []}, "vertices"),
        ({"vertices": ["a", "a"]}, "vertices"),
        ({"x0": "q"}, "x0"),
        ({"colors": [{"name": "c", "alpha": 0}]}, "colors[0].alpha"),
        ({"colors": [{"name": "c", "alpha": "x/2"}]}, "colors[0].alpha"),
        ({"edges": [{"from": "a", "to": "q", "color": "c"}]}, "edges[0].to"),
        ({"edges": [{"from": "a", "to": "b", "color": "k"}]}, "edges[0].color"),
        ({"edges": [{"from": "a", "to": "b", "color": "c", "beta": -1}]}, "edges[0].beta"),
        ({"dummies": [{"from": "b", "to": "a", "count": 1, "edge_colors": ["c", "c"]}]}, "dummies[0]"),
        ({"dummies": [{"from": "a", "to": "b", "count": 0, "edge_colors": ["c", "c"]}]}, "dummies[0].count"),
        ({"dummies": [{"from": "a", "to": "b", "count": 1, "edge_colors": ["c"]}]}, "dummies[0].edge_colors"),
        ({"extra": 1}, "unknown field"),
    ],
)
def test_validation_names_the_field(over, where):
    with pytest.raises(InputError, match=re.escape(where)):
        specfile.from_dict(_doc(**over))


def test_invalid_json_reports_position():
    with pytest.raises(InputError, match="line 2, column"):
        specfile.loads('{\n  "vertices": [,]\n}')


def test_missing_file():
    with pytest.raises(InputError, match="cannot read spec"):
        specfile.load(DATA / "nope.json")


weights = st.fractions(min_value=F(1, 10), max_value=10, max_denominator=12)


@settings(max_examples=40)
@given(st.lists(weights, min_size=3, max_size=3), weights)
def test_round_trip_random_weights(betas, alpha):
    doc = _doc(
        colors=[{"name": "c", "alpha": str(alpha)}],
        edges=[
            {"from": "a", "to": "b", "color": "c", "beta": str(betas[0])},
            {"from": "b", "to": "a", "color": "c", "beta": str(betas[1])},
            {"from": "a", "to": "a", "color": "c", "beta": str(betas[2])},
        ],
    )
    sp = specfile.from_dict(doc)
    assert specfile.loads(sp.dumps()) == sp
    assert sp.graph().beta("a", "b") == betas[0]
