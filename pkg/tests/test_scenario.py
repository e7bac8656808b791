import json
import random
from importlib import resources

import pytest

from flowspace import actions, sampling
from flowspace.casestudy import build_scenario
from flowspace.errors import ScenarioFormatError
from flowspace.headers import Header, MatchPattern
from flowspace.scenario import (
    action_from_obj,
    action_to_obj,
    app_from_obj,
    app_to_obj,
    delta_from_obj,
    delta_to_obj,
    dump_scenario,
    entry_from_obj,
    entry_to_obj,
    header_from_obj,
    header_to_obj,
    loads_scenario,
    pattern_from_obj,
    pattern_to_obj,
    scenario_from_obj,
    scenario_to_obj,
    table_from_obj,
    table_to_obj,
    topology_from_obj,
    topology_to_obj,
)


class TestHeaderObjects:
    def test_round_trip_drops_zero_fields(self):
        h = Header.from_fields(nw_src=5, tp_dst=80)
        obj = header_to_obj(h)
        assert obj == {"nw_src": 5, "tp_dst": 80}
        assert header_from_obj(obj) == h

    def test_omitted_fields_default_to_zero(self):
        assert header_from_obj({}) == Header.from_fields()

    def test_unknown_field_rejected(self):
        with pytest.raises(ScenarioFormatError):
            header_from_obj({"nw_srcc": 1})

    def test_pattern_omitted_fields_are_wildcards(self):
        p = pattern_from_obj({"nw_dst": 9})
        assert p == MatchPattern.from_fields(nw_dst=9)
        assert pattern_to_obj(p) == {"nw_dst": 9}


class TestActionObjects:
    def test_primitive_forms(self):
        assert action_to_obj(actions.drop()) == {"kind": "drop"}
        assert action_to_obj(actions.forward(3)) == {"kind": "forward", "delta": 3}
        assert action_to_obj(actions.modify_field("nw_dst", 9)) == {
            "kind": "modify", "field": "nw_dst", "delta": 9}

    def test_identity_serializes_as_zero_forward(self):
        assert action_to_obj(actions.identity()) == {"kind": "forward", "delta": 0}

    def test_composite_round_trip(self):
        a = actions.compose(actions.forward(3), actions.modify_field("nw_dst", 9))
        obj = action_to_obj(a)
        assert obj["kind"] == "seq"
        assert action_from_obj(obj) == a

    def test_constant_composite_keeps_leading_drop(self):
        a = actions.compose(actions.forward(5), actions.drop())
        obj = action_to_obj(a)
        assert obj["actions"][0] == {"kind": "drop"}
        assert action_from_obj(obj) == a

    def test_seq_applies_left_to_right(self):
        obj = {"kind": "seq", "actions": [{"kind": "drop"},
                                          {"kind": "forward", "delta": 5}]}
        assert action_from_obj(obj) == actions.compose(actions.forward(5), actions.drop())

    def test_ttl_translation_has_no_wire_form(self):
        from flowspace.actions import STATE_SIZE, AffineAction
        tr = [0] * STATE_SIZE
        tr[STATE_SIZE - 1] = 1
        with pytest.raises(ScenarioFormatError):
            action_to_obj(AffineAction((1,) * STATE_SIZE, tuple(tr)))

    def test_mixed_diagonal_has_no_wire_form(self):
        from flowspace.actions import STATE_SIZE, AffineAction
        lin = [1] * STATE_SIZE
        lin[0] = 0
        with pytest.raises(ScenarioFormatError):
            action_to_obj(AffineAction(tuple(lin), (0,) * STATE_SIZE))

    def test_random_actions_round_trip(self):
        rng = random.Random(73)
        for _ in range(300):
            a = sampling.random_action(rng)
            assert action_from_obj(action_to_obj(a)) == a

    def test_unknown_kind_rejected(self):
        with pytest.raises(ScenarioFormatError):
            action_from_obj({"kind": "teleport"})


class TestTableObjects:
    def test_entries_round_trip(self):
        rng = random.Random(79)
        for _ in range(50):
            t = sampling.random_table(rng)
            assert table_from_obj(table_to_obj(t)) == t

    def test_counter_defaults_to_zero(self):
        e = entry_from_obj({
            "match": {}, "out_port": 1, "ttl": 9, "action": {"kind": "drop"}})
        assert e.counter == 0

    def test_unknown_entry_key_rejected(self):
        with pytest.raises(ScenarioFormatError):
            entry_from_obj({"match": {}, "out_port": 1, "ttl": 9,
                            "action": {"kind": "drop"}, "priority": 5})

    def test_entry_round_trip_keeps_counter(self):
        rng = random.Random(83)
        e = sampling.random_entry(rng)
        assert entry_from_obj(entry_to_obj(e)) == e


class TestTopologyObjects:
    def test_round_trip(self):
        rng = random.Random(89)
        topo = sampling.random_topology(rng)
        assert topology_from_obj(topology_to_obj(topo)) == topo

    def test_server_ports_keys_are_stringified(self):
        rng = random.Random(97)
        obj = topology_to_obj(sampling.random_topology(rng))
        assert all(isinstance(k, str) for k in obj["server_ports"])

    def test_bad_server_key(self):
        with pytest.raises(ScenarioFormatError):
            topology_from_obj({"switches": 1, "ports": {},
                               "server_ports": {"not-a-number": 1}})


class TestAppObjects:
    def test_round_trip_with_guards_and_refs(self):
        rng = random.Random(101)
        for _ in range(100):
            app = sampling.random_app(rng, 3, "a")
            obj = app_to_obj(app)
            back = app_from_obj(obj, 3)
            assert back.translation == app.translation
            assert back.name == app.name

    def test_delta_round_trip(self):
        rng = random.Random(103)
        for _ in range(100):
            d = sampling.random_delta(rng)
            assert delta_from_obj(delta_to_obj(d)) == d

    def test_composite_apps_have_no_single_slot_form(self):
        from flowspace.transforms import compose_apps
        rng = random.Random(107)
        a = sampling.random_app(rng, 2, "a")
        b = sampling.random_app(rng, 2, "b")
        composite = compose_apps(a, b)
        with pytest.raises(ScenarioFormatError):
            app_to_obj(composite)


class TestScenarioDocument:
    def test_case_study_round_trips_byte_exactly(self):
        scn = build_scenario()
        text = dump_scenario(scn)
        assert dump_scenario(loads_scenario(text)) == text

    def test_bundled_file_matches_builder(self):
        bundled = resources.files("flowspace").joinpath("data/casestudy.json").read_text()
        assert bundled == dump_scenario(build_scenario())

    def test_version_checked(self):
        obj = scenario_to_obj(build_scenario())
        obj["version"] = 2
        with pytest.raises(ScenarioFormatError):
            scenario_from_obj(obj)

    def test_unknown_top_level_key_rejected(self):
        obj = scenario_to_obj(build_scenario())
        obj["latency"] = {}
        with pytest.raises(ScenarioFormatError):
            scenario_from_obj(obj)

    def test_table_count_must_match_switches(self):
        obj = scenario_to_obj(build_scenario())
        obj["tables"] = obj["tables"][:1]
        with pytest.raises(ScenarioFormatError):
            scenario_from_obj(obj)

    def test_chain_with_unknown_app_rejected(self):
        obj = scenario_to_obj(build_scenario())
        obj["chains"]["broken"] = ["no-such-app"]
        with pytest.raises(ScenarioFormatError):
            scenario_from_obj(obj)

    def test_duplicate_app_names_rejected(self):
        obj = scenario_to_obj(build_scenario())
        obj["apps"].append(obj["apps"][0])
        with pytest.raises(ScenarioFormatError):
            scenario_from_obj(obj)

    def test_not_json(self):
        with pytest.raises(ScenarioFormatError):
            loads_scenario("{nope")

    def test_queries_parse(self):
        scn = loads_scenario(dump_scenario(build_scenario()))
        assert set(scn.queries) == {"fresh-client", "noisy-client"}
        assert isinstance(scn.queries["fresh-client"], Header)

    def test_dump_is_deterministic(self):
        assert dump_scenario(build_scenario()) == dump_scenario(build_scenario())

    def test_parsed_chains_rebuild_the_same_composites(self):
        from flowspace.transforms import chain, congruent
        scn = loads_scenario(dump_scenario(build_scenario()))
        original = build_scenario()
        for name in original.chains:
            assert congruent(chain(scn.chains[name]), chain(original.chains[name]))
