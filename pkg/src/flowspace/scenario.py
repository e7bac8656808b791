"""Scenario files: the JSON surface of the library.

A scenario is a single self-describing JSON document (version 1)
holding a topology, the initial NIB (tables and observed flows), named
single-slot applications, named chains over those applications, and
named query headers.  Parsing is strict: unknown keys are rejected so a
typo cannot silently change an analysis.

Headers serialize as objects keyed by field name with omitted fields
defaulting to 0; match patterns likewise, with omitted fields
defaulting to wildcard.  Concrete actions serialize as tagged objects
(forward / drop / modify / seq applied left to right); template actions
use the same tags but may reference named ports, the per-destination
server port, and deferred value picks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from flowspace import actions
from flowspace.actions import PORT_SLOT, TTL_SLOT, AffineAction
from flowspace.errors import ScenarioFormatError
from flowspace.headers import FIELD_COUNT, FIELDS, Header, MatchPattern, field_index
from flowspace.nib import NIB, Flow, Topology
from flowspace.tables import FlowEntry, FlowRule, FlowTable
from flowspace.transforms import (
    AppTransform,
    DestPort,
    Drop,
    Forward,
    GuardedDelta,
    InputHeader,
    LoadAtMost,
    PickLessLoaded,
    PortName,
    PortNumber,
    RuleTemplate,
    Seq,
    ServiceChain,
    SetField,
    SourceCountAtMost,
    TrueGuard,
    make_app,
)

FORMAT_VERSION = 1


def _require_obj(value, what: str) -> dict:
    if not isinstance(value, dict):
        raise ScenarioFormatError(f"{what} must be an object, got {type(value).__name__}")
    return value


def _check_keys(obj: dict, allowed: tuple[str, ...], what: str) -> None:
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ScenarioFormatError(f"unknown keys in {what}: {unknown}")


def _require(obj: dict, key: str, what: str):
    if key not in obj:
        raise ScenarioFormatError(f"{what} is missing required key {key!r}")
    return obj[key]


# ---------------------------------------------------------------------------
# Headers and patterns


def header_to_obj(h: Header) -> dict:
    return {spec.name: v for spec, v in zip(FIELDS, h.values) if v}


def header_from_obj(obj, what: str = "header") -> Header:
    obj = _require_obj(obj, what)
    _check_keys(obj, tuple(f.name for f in FIELDS), what)
    return Header.from_fields(**obj)


def pattern_to_obj(p: MatchPattern) -> dict:
    return {spec.name: v for spec, v in zip(FIELDS, p.entries) if v is not None}


def pattern_from_obj(obj, what: str = "match") -> MatchPattern:
    obj = _require_obj(obj, what)
    _check_keys(obj, tuple(f.name for f in FIELDS), what)
    return MatchPattern.from_fields(**obj)


# ---------------------------------------------------------------------------
# Concrete actions


def action_to_obj(a: AffineAction) -> dict:
    """Tagged-object form of an action.

    Any constructible action decomposes into per-slot translations,
    preceded by a drop when the diagonal is zero.  Hand-built actions
    with mixed diagonals or ttl translations have no wire form.
    """
    if a.translation[TTL_SLOT]:
        raise ScenarioFormatError("ttl-translating actions have no wire form")
    parts = []
    for i in range(FIELD_COUNT):
        if a.translation[i]:
            parts.append({"kind": "modify", "field": FIELDS[i].name,
                          "delta": a.translation[i]})
    if a.translation[PORT_SLOT]:
        parts.append({"kind": "forward", "delta": a.translation[PORT_SLOT]})
    if not any(a.linear):
        if not parts:
            return {"kind": "drop"}
        return {"kind": "seq", "actions": [{"kind": "drop"}] + parts}
    if not all(a.linear):
        raise ScenarioFormatError("mixed-diagonal actions have no wire form")
    if not parts:
        return {"kind": "forward", "delta": 0}
    if len(parts) == 1:
        return parts[0]
    return {"kind": "seq", "actions": parts}


def action_from_obj(obj, what: str = "action") -> AffineAction:
    obj = _require_obj(obj, what)
    kind = _require(obj, "kind", what)
    if kind == "drop":
        _check_keys(obj, ("kind",), what)
        return actions.drop()
    if kind == "forward":
        _check_keys(obj, ("kind", "delta"), what)
        return actions.forward(int(_require(obj, "delta", what)))
    if kind == "modify":
        _check_keys(obj, ("kind", "field", "delta"), what)
        return actions.modify_field(
            _require(obj, "field", what), int(_require(obj, "delta", what))
        )
    if kind == "seq":
        _check_keys(obj, ("kind", "actions"), what)
        acc = actions.identity()
        for i, sub in enumerate(_require(obj, "actions", what)):
            acc = actions.compose(action_from_obj(sub, f"{what}[{i}]"), acc)
        return acc
    raise ScenarioFormatError(f"{what}: unknown action kind {kind!r}")


# ---------------------------------------------------------------------------
# Rules, entries, tables, flows


def rule_to_obj(r: FlowRule) -> dict:
    return {
        "match": pattern_to_obj(r.match),
        "out_port": r.out_port,
        "ttl": r.ttl,
        "action": action_to_obj(r.action),
    }


def rule_from_obj(obj, what: str = "rule") -> FlowRule:
    obj = _require_obj(obj, what)
    _check_keys(obj, ("match", "out_port", "ttl", "action"), what)
    return FlowRule(
        match=pattern_from_obj(_require(obj, "match", what), f"{what}.match"),
        out_port=int(_require(obj, "out_port", what)),
        ttl=int(_require(obj, "ttl", what)),
        action=action_from_obj(_require(obj, "action", what), f"{what}.action"),
    )


def entry_to_obj(e: FlowEntry) -> dict:
    obj = rule_to_obj(e.rule)
    obj["counter"] = e.counter
    return obj


def entry_from_obj(obj, what: str = "entry") -> FlowEntry:
    obj = _require_obj(obj, what)
    _check_keys(obj, ("match", "out_port", "ttl", "action", "counter"), what)
    rule = rule_from_obj({k: v for k, v in obj.items() if k != "counter"}, what)
    return FlowEntry(rule, int(obj.get("counter", 0)))


def table_to_obj(t: FlowTable) -> list:
    return [entry_to_obj(e) for e in t.entries]


def table_from_obj(obj, what: str = "table") -> FlowTable:
    if not isinstance(obj, list):
        raise ScenarioFormatError(f"{what} must be an array")
    return FlowTable(entry_from_obj(e, f"{what}[{i}]") for i, e in enumerate(obj))


def flow_to_obj(f: Flow) -> dict:
    obj = {"header": header_to_obj(f.header)}
    if f.assigned_dest is not None:
        obj["assigned_dest"] = f.assigned_dest
    return obj


def flow_from_obj(obj, what: str = "flow") -> Flow:
    obj = _require_obj(obj, what)
    _check_keys(obj, ("header", "assigned_dest"), what)
    assigned = obj.get("assigned_dest")
    return Flow(
        header_from_obj(_require(obj, "header", what), f"{what}.header"),
        int(assigned) if assigned is not None else None,
    )


# ---------------------------------------------------------------------------
# Topology


def topology_to_obj(t: Topology) -> dict:
    return {
        "switches": t.switch_count,
        "ports": dict(sorted(t.ports.items())),
        "server_ports": {str(k): v for k, v in sorted(t.server_ports.items())},
    }


def topology_from_obj(obj, what: str = "topology") -> Topology:
    obj = _require_obj(obj, what)
    _check_keys(obj, ("switches", "ports", "server_ports"), what)
    ports = _require_obj(obj.get("ports", {}), f"{what}.ports")
    server_ports = _require_obj(obj.get("server_ports", {}), f"{what}.server_ports")
    try:
        server_ports = {int(k): int(v) for k, v in server_ports.items()}
    except ValueError:
        raise ScenarioFormatError(f"{what}.server_ports keys must be integers") from None
    return Topology(int(_require(obj, "switches", what)),
                    {str(k): int(v) for k, v in ports.items()}, server_ports)


# ---------------------------------------------------------------------------
# Guards, port/value references, templates, deltas, apps


def guard_to_obj(g) -> dict:
    if isinstance(g, TrueGuard):
        return {"kind": "true"}
    if isinstance(g, SourceCountAtMost):
        return {"kind": "source_count_at_most", "threshold": g.threshold}
    if isinstance(g, LoadAtMost):
        return {"kind": "load_at_most", "server_a": g.server_a, "server_b": g.server_b}
    raise ScenarioFormatError(f"not a guard: {g!r}")


def guard_from_obj(obj, what: str = "guard"):
    obj = _require_obj(obj, what)
    kind = _require(obj, "kind", what)
    if kind == "true":
        _check_keys(obj, ("kind",), what)
        return TrueGuard()
    if kind == "source_count_at_most":
        _check_keys(obj, ("kind", "threshold"), what)
        return SourceCountAtMost(int(_require(obj, "threshold", what)))
    if kind == "load_at_most":
        _check_keys(obj, ("kind", "server_a", "server_b"), what)
        return LoadAtMost(int(_require(obj, "server_a", what)),
                          int(_require(obj, "server_b", what)))
    raise ScenarioFormatError(f"{what}: unknown guard kind {kind!r}")


def port_ref_to_obj(ref):
    if isinstance(ref, PortName):
        return ref.name
    if isinstance(ref, PortNumber):
        return ref.value
    if isinstance(ref, DestPort):
        return {"kind": "dest_port"}
    raise ScenarioFormatError(f"not a port reference: {ref!r}")


def port_ref_from_obj(obj, what: str = "port"):
    if isinstance(obj, str):
        return PortName(obj)
    if isinstance(obj, int):
        return PortNumber(obj)
    obj = _require_obj(obj, what)
    _check_keys(obj, ("kind",), what)
    if obj.get("kind") == "dest_port":
        return DestPort()
    raise ScenarioFormatError(f"{what}: unknown port reference {obj!r}")


def value_ref_to_obj(ref):
    if isinstance(ref, PickLessLoaded):
        return {"kind": "pick_less_loaded", "server_a": ref.server_a,
                "server_b": ref.server_b}
    return ref


def value_ref_from_obj(obj, what: str = "value"):
    if isinstance(obj, int):
        return obj
    obj = _require_obj(obj, what)
    _check_keys(obj, ("kind", "server_a", "server_b"), what)
    if obj.get("kind") == "pick_less_loaded":
        return PickLessLoaded(int(_require(obj, "server_a", what)),
                              int(_require(obj, "server_b", what)))
    raise ScenarioFormatError(f"{what}: unknown value reference {obj!r}")


def action_spec_to_obj(spec) -> dict:
    if isinstance(spec, Drop):
        return {"kind": "drop"}
    if isinstance(spec, Forward):
        return {"kind": "forward", "port": port_ref_to_obj(spec.port)}
    if isinstance(spec, SetField):
        return {"kind": "set_field", "field": spec.field,
                "to": value_ref_to_obj(spec.to)}
    if isinstance(spec, Seq):
        return {"kind": "seq", "actions": [action_spec_to_obj(s) for s in spec.steps]}
    raise ScenarioFormatError(f"not an action template: {spec!r}")


def action_spec_from_obj(obj, what: str = "action"):
    obj = _require_obj(obj, what)
    kind = _require(obj, "kind", what)
    if kind == "drop":
        _check_keys(obj, ("kind",), what)
        return Drop()
    if kind == "forward":
        _check_keys(obj, ("kind", "port"), what)
        return Forward(port_ref_from_obj(_require(obj, "port", what), f"{what}.port"))
    if kind == "set_field":
        _check_keys(obj, ("kind", "field", "to"), what)
        field_index(_require(obj, "field", what))  # validate the name
        return SetField(obj["field"],
                        value_ref_from_obj(_require(obj, "to", what), f"{what}.to"))
    if kind == "seq":
        _check_keys(obj, ("kind", "actions"), what)
        return Seq(tuple(action_spec_from_obj(s, f"{what}[{i}]")
                         for i, s in enumerate(_require(obj, "actions", what))))
    raise ScenarioFormatError(f"{what}: unknown action kind {kind!r}")


def template_to_obj(t: RuleTemplate) -> dict:
    obj = {
        "match": "input" if isinstance(t.match, InputHeader) else pattern_to_obj(t.match),
        "out_port": port_ref_to_obj(t.out_port),
        "ttl": t.ttl,
        "action": action_spec_to_obj(t.action),
    }
    if t.counter:
        obj["counter"] = t.counter
    return obj


def template_from_obj(obj, what: str = "rule template") -> RuleTemplate:
    obj = _require_obj(obj, what)
    _check_keys(obj, ("match", "out_port", "ttl", "action", "counter"), what)
    raw_match = _require(obj, "match", what)
    if raw_match == "input":
        match = InputHeader()
    else:
        match = pattern_from_obj(raw_match, f"{what}.match")
    return RuleTemplate(
        match=match,
        out_port=port_ref_from_obj(_require(obj, "out_port", what), f"{what}.out_port"),
        ttl=int(_require(obj, "ttl", what)),
        action=action_spec_from_obj(_require(obj, "action", what), f"{what}.action"),
        counter=int(obj.get("counter", 0)),
    )


def delta_to_obj(d: GuardedDelta) -> dict:
    return {
        "branches": [
            {"guard": guard_to_obj(g), "rules": [template_to_obj(t) for t in tpls]}
            for g, tpls in d.branches
        ],
        "default": [template_to_obj(t) for t in d.default],
    }


def delta_from_obj(obj, what: str = "delta") -> GuardedDelta:
    obj = _require_obj(obj, what)
    _check_keys(obj, ("branches", "default"), what)
    branches = []
    for i, b in enumerate(obj.get("branches", [])):
        b = _require_obj(b, f"{what}.branches[{i}]")
        _check_keys(b, ("guard", "rules"), f"{what}.branches[{i}]")
        branches.append((
            guard_from_obj(_require(b, "guard", f"{what}.branches[{i}]")),
            tuple(template_from_obj(t, f"{what}.branches[{i}].rules[{j}]")
                  for j, t in enumerate(b.get("rules", []))),
        ))
    default = tuple(template_from_obj(t, f"{what}.default[{i}]")
                    for i, t in enumerate(obj.get("default", [])))
    return GuardedDelta(tuple(branches), default)


def app_to_obj(app: AppTransform) -> dict:
    """Single-slot application form used inside scenario files."""
    hot = [i for i, s in enumerate(app.translation) if s]
    if len(hot) != 1 or len(app.translation[hot[0]]) != 1:
        raise ScenarioFormatError(
            f"app {app.name!r} is not in single-slot form; chains express composites"
        )
    return {
        "name": app.name,
        "slot": hot[0],
        "delta": delta_to_obj(app.translation[hot[0]][0]),
    }


def app_from_obj(obj, n: int, what: str = "app") -> AppTransform:
    obj = _require_obj(obj, what)
    _check_keys(obj, ("name", "slot", "delta"), what)
    return make_app(
        str(_require(obj, "name", what)),
        int(_require(obj, "slot", what)),
        delta_from_obj(_require(obj, "delta", what), f"{what}.delta"),
        n,
    )


def transform_to_obj(app: AppTransform) -> dict:
    """Full composite form (reports only; scenario files use app_to_obj)."""
    return {
        "name": app.name,
        "linear": [list(row) for row in app.linear],
        "slots": [[delta_to_obj(p) for p in s] for s in app.translation],
    }


# ---------------------------------------------------------------------------
# Scenario


@dataclass(frozen=True)
class Scenario:
    topology: Topology
    nib: NIB
    apps: dict[str, AppTransform] = field(default_factory=dict)
    chains: dict[str, ServiceChain] = field(default_factory=dict)
    queries: dict[str, Header] = field(default_factory=dict)


def scenario_to_obj(s: Scenario) -> dict:
    return {
        "version": FORMAT_VERSION,
        "topology": topology_to_obj(s.topology),
        "flows": [flow_to_obj(f) for f in s.nib.flows],
        "tables": [table_to_obj(t) for t in s.nib.tables],
        "apps": [app_to_obj(s.apps[name]) for name in sorted(s.apps)],
        "chains": {
            name: [stage.name for stage in chain.stages]
            for name, chain in sorted(s.chains.items())
        },
        "queries": {name: header_to_obj(h) for name, h in sorted(s.queries.items())},
    }


def scenario_from_obj(obj) -> Scenario:
    obj = _require_obj(obj, "scenario")
    _check_keys(obj, ("version", "topology", "flows", "tables", "apps",
                      "chains", "queries"), "scenario")
    version = _require(obj, "version", "scenario")
    if version != FORMAT_VERSION:
        raise ScenarioFormatError(f"unsupported scenario version {version!r}")
    topology = topology_from_obj(_require(obj, "topology", "scenario"))
    n = topology.switch_count
    raw_tables = obj.get("tables", [])
    if not isinstance(raw_tables, list) or len(raw_tables) != n:
        raise ScenarioFormatError(f"scenario needs exactly {n} tables")
    tables = tuple(table_from_obj(t, f"tables[{i}]") for i, t in enumerate(raw_tables))
    flows = tuple(flow_from_obj(f, f"flows[{i}]")
                  for i, f in enumerate(obj.get("flows", [])))
    nib = NIB(topology, tables, flows)
    apps: dict[str, AppTransform] = {}
    for i, raw in enumerate(obj.get("apps", [])):
        app = app_from_obj(raw, n, f"apps[{i}]")
        if app.name in apps:
            raise ScenarioFormatError(f"duplicate app name {app.name!r}")
        apps[app.name] = app
    chains: dict[str, ServiceChain] = {}
    for name, stage_names in _require_obj(obj.get("chains", {}), "chains").items():
        if not isinstance(stage_names, list) or not stage_names:
            raise ScenarioFormatError(f"chain {name!r} must be a non-empty array")
        try:
            stages = tuple(apps[s] for s in stage_names)
        except KeyError as missing:
            raise ScenarioFormatError(
                f"chain {name!r} references unknown app {missing.args[0]!r}"
            ) from None
        chains[name] = ServiceChain(stages)
    queries = {
        name: header_from_obj(h, f"queries[{name}]")
        for name, h in _require_obj(obj.get("queries", {}), "queries").items()
    }
    return Scenario(topology, nib, apps, chains, queries)


def dump_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_obj(s), indent=2, sort_keys=True) + "\n"


def loads_scenario(text: str) -> Scenario:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"not valid JSON: {exc}") from None
    try:
        return scenario_from_obj(obj)
    except (TypeError, ValueError) as exc:
        # malformed field values (wrong JSON types, out-of-range ints)
        raise ScenarioFormatError(f"malformed scenario: {exc}") from exc


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_scenario(fh.read())
