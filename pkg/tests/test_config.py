from __future__ import annotations

import json

import pytest

from pmwnet.config import ParseError, dump_config, load_config, parse_config
from pmwnet.model import CyclicTopology, MultipleDemandQueues, UnnormalizedDistribution
from pmwnet.scenarios import UnknownScenario, builtin_scenario


@pytest.mark.parametrize("name", ["fusion", "general"])
def test_round_trip(name):
    spec = builtin_scenario(name)
    back = load_config(dump_config(spec))
    assert back == spec
    assert back.digest() == spec.digest()


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        builtin_scenario("nope")


def test_builtin_shapes(general):
    assert len(general.queues) == 6 and len(general.processors) == 5


def doc(fusion):
    return json.loads(dump_config(fusion))


def test_unnormalized(fusion):
    d = doc(fusion)
    d["arrivals"]["q1"]["probs"] = [0.3, 0.6]
    with pytest.raises(UnnormalizedDistribution):
        load_config(json.dumps(d))


@pytest.mark.parametrize("text", ["", "   \n"])
def test_empty(text):
    with pytest.raises(ParseError):
        load_config(text)


def test_syntax_error_position():
    with pytest.raises(ParseError) as err:
        load_config('{\n  "queues": [,]\n}')
    assert err.value.where == "line 2 column 14"


def test_schema_error_path(fusion):
    d = doc(fusion)
    d["processors"][1]["supply"] = {"q3": "one"}
    with pytest.raises(ParseError) as err:
        load_config(json.dumps(d))
    assert err.value.where == "$.processors[1].supply.q3"


def test_missing_key():
    with pytest.raises(ParseError, match="queues"):
        load_config('{"processors": [], "arrivals": {}}')


def test_bare_number_is_constant(fusion):
    d = doc(fusion)
    d["admission_cost"] = {"q1": 1, "q2": 1}
    assert load_config(json.dumps(d)) == fusion


def test_pair_list_supply(fusion):
    d = doc(fusion)
    d["processors"][0]["supply"] = [["q1", 1], ["q2", 1]]
    assert load_config(json.dumps(d)) == fusion


def test_validation_errors_pass_through(fusion):
    d = doc(fusion)
    d["processors"][0]["demand"] = {"q3": 1, "q1": 1}
    with pytest.raises(MultipleDemandQueues):
        load_config(json.dumps(d))
    d = doc(fusion)
    d["processors"].append({"id": "P3", "kind": "internal", "supply": {"q3": 1}, "demand": {"q3": 1}})
    with pytest.raises(CyclicTopology):
        load_config(json.dumps(d))


def test_parse_without_validation(fusion):
    d = doc(fusion)
    d["arrivals"]["q1"]["probs"] = [0.3, 0.6]
    spec = parse_config(json.dumps(d))
    assert spec.stochastic.arrivals["q1"].probs == (0.3, 0.6)


def test_explicit_family(fusion):
    d = doc(fusion)
    d["activation_family"] = {"kind": "explicit", "vectors": [[0, 0], [1, 0], [0, 1]]}
    spec = load_config(json.dumps(d))
    assert load_config(dump_config(spec)) == spec
