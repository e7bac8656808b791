"""Command-line front end.

Commands load a scenario file, run an analysis and print a report in
text or JSON form.  Exit codes are CI-friendly: 0 means clean
(congruent / no loops / all properties hold), 1 means the analysis
verdict was negative, 2 means a usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from flowspace import __version__, actions, axioms, casestudy, scenario
from flowspace.analysis import (
    CongruenceReport,
    FlowModRequest,
    LoopFinding,
    WhatIfReport,
    behavioral_diff,
    check_congruence,
    detect_loops,
    what_if,
)
from flowspace.errors import FlowspaceError
from flowspace.headers import FIELDS, Header, MatchPattern
from flowspace.nib import NIB
from flowspace.tables import FlowEntry, FlowTable
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
    SetField,
    SourceCountAtMost,
    apply_transform,
    chain,
)

# ---------------------------------------------------------------------------
# Text rendering


def render_match(p: MatchPattern) -> str:
    parts = [f"{spec.name}={v}" for spec, v in zip(FIELDS, p.entries) if v is not None]
    return "{" + ", ".join(parts) + "}" if parts else "*"


def render_entry(e: FlowEntry) -> str:
    r = e.rule
    return (f"match={render_match(r.match)} out={r.out_port} ttl={r.ttl} "
            f"act={actions.describe(r.action)} c={e.counter}")


def render_table(t: FlowTable, indent: str = "  ") -> list[str]:
    if not len(t):
        return [indent + "(empty)"]
    return [indent + render_entry(e) for e in t.entries]


def render_port_ref(ref) -> str:
    if isinstance(ref, PortName):
        return ref.name
    if isinstance(ref, PortNumber):
        return f"#{ref.value}"
    if isinstance(ref, DestPort):
        return "port-of(dest)"
    return repr(ref)


def render_value_ref(ref) -> str:
    if isinstance(ref, PickLessLoaded):
        return f"less-loaded({ref.server_a}, {ref.server_b})"
    return str(ref)


def render_action_spec(spec) -> str:
    if isinstance(spec, Drop):
        return "drop"
    if isinstance(spec, Forward):
        return f"forward({render_port_ref(spec.port)})"
    if isinstance(spec, SetField):
        return f"set({spec.field}:={render_value_ref(spec.to)})"
    if isinstance(spec, Seq):
        return "; ".join(render_action_spec(s) for s in spec.steps)
    return repr(spec)


def render_template(t: RuleTemplate) -> str:
    match = "input" if isinstance(t.match, InputHeader) else render_match(t.match)
    return (f"<match={match} out={render_port_ref(t.out_port)} ttl={t.ttl} "
            f"do {render_action_spec(t.action)} c={t.counter}>")


def render_guard(g) -> str:
    if isinstance(g, SourceCountAtMost):
        return f"source-count <= {g.threshold}"
    if isinstance(g, LoadAtMost):
        return f"load({g.server_a}) <= load({g.server_b})"
    return "always"


def render_piece(piece: GuardedDelta, indent: str) -> list[str]:
    def arm(tpls) -> str:
        return " ".join(render_template(t) for t in tpls) if tpls else "(nothing)"

    if not piece.branches:
        return [f"{indent}add {arm(piece.default)}"]
    lines = []
    for guard, tpls in piece.branches:
        lines.append(f"{indent}if {render_guard(guard)}: add {arm(tpls)}")
    lines.append(f"{indent}otherwise: add {arm(piece.default)}")
    return lines


def render_transform(t: AppTransform, indent: str = "  ") -> list[str]:
    lines = []
    identity = tuple(
        tuple(1 if i == j else 0 for j in range(t.dimension)) for i in range(t.dimension)
    )
    if t.linear != identity:
        lines.append(f"{indent}linear: {[list(r) for r in t.linear]}")
    for i, slot in enumerate(t.translation):
        if not slot:
            continue
        lines.append(f"{indent}switch {i}:")
        for piece in slot:
            lines.extend(render_piece(piece, indent + "  "))
    if not lines:
        lines.append(f"{indent}(identity)")
    return lines


def render_nib_tables(nib: NIB) -> list[str]:
    lines = []
    for i, t in enumerate(nib.tables):
        lines.append(f"switch {i}: {len(t)} entries")
        lines.extend(render_table(t))
    return lines


def render_finding(f: LoopFinding) -> list[str]:
    return [
        f"switch {f.switch}: inverse rule pair",
        f"  {render_entry(f.entry_a)}",
        f"  {render_entry(f.entry_b)}",
        f"  composed action: {actions.describe(f.certificate)} (identity)",
    ]


# ---------------------------------------------------------------------------
# JSON rendering


def finding_to_obj(f: LoopFinding) -> dict:
    return {
        "switch": f.switch,
        "entries": [scenario.entry_to_obj(f.entry_a), scenario.entry_to_obj(f.entry_b)],
        "certificate": scenario.action_to_obj(f.certificate),
    }


def congruence_to_obj(report: CongruenceReport) -> dict:
    diff = None
    if report.first_difference is not None:
        diff = {"slot": report.first_difference.slot,
                "detail": report.first_difference.detail}
    return {
        "verdict": "congruent" if report.congruent else "not_congruent",
        "first_difference": diff,
        "notes": list(report.notes),
        "normalized": {
            "a": scenario.transform_to_obj(report.normalized_a),
            "b": scenario.transform_to_obj(report.normalized_b),
        },
    }


def whatif_to_obj(report: WhatIfReport) -> dict:
    return {
        "diffs": [
            {
                "switch": d.switch,
                "added": [scenario.entry_to_obj(e) for e in d.added],
                "removed": [scenario.entry_to_obj(e) for e in d.removed],
            }
            for d in report.diffs
        ],
        "new_loops": [finding_to_obj(f) for f in report.new_loops],
    }


def emit_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# Commands


def _load(path: str) -> scenario.Scenario:
    return scenario.load_scenario(path)


def _chain_of(scn: scenario.Scenario, name: str):
    try:
        return scn.chains[name]
    except KeyError:
        raise FlowspaceError(f"no chain named {name!r} in scenario") from None


def cmd_axioms(args) -> int:
    results = axioms.run_suite(seed=args.seed, cases=args.cases)
    if args.format == "json":
        emit_json({
            "passed": axioms.suite_passed(results),
            "results": [
                {
                    "name": r.name,
                    "description": r.description,
                    "cases": r.cases,
                    "failures": r.failures,
                    "status": _axiom_status(r),
                    "counterexample": r.counterexample,
                }
                for r in results
            ],
        })
    else:
        for r in results:
            print(f"{_axiom_status(r):<20} {r.name}  [{r.cases} cases]  {r.description}")
            if r.failures:
                print(f"{'':<20} {r.failures} failures, e.g. {r.counterexample}")
    return 0 if axioms.suite_passed(results) else 1


def _axiom_status(r: axioms.PropertyResult) -> str:
    if r.failures:
        return "FAIL"
    return "EXPECTED-DEVIATION" if r.expected_deviation else "PASS"


def cmd_congruence(args) -> int:
    scn = _load(args.scenario)
    report = check_congruence(_chain_of(scn, args.chain_a), _chain_of(scn, args.chain_b))
    if args.format == "json":
        emit_json(congruence_to_obj(report))
    else:
        print(f"verdict: {'congruent' if report.congruent else 'not_congruent'}")
        if report.first_difference is not None:
            print(f"first difference: {report.first_difference.detail}")
        for note in report.notes:
            print(f"note: {note}")
        print(f"chain {args.chain_a!r} (normalized):")
        for line in render_transform(report.normalized_a):
            print(line)
        print(f"chain {args.chain_b!r} (normalized):")
        for line in render_transform(report.normalized_b):
            print(line)
    return 0 if report.congruent else 1


def _parse_header(scn: scenario.Scenario, literal: str) -> Header:
    if literal.startswith("@"):
        name = literal[1:]
        if name not in scn.queries:
            raise FlowspaceError(f"no query named {name!r} in scenario")
        return scn.queries[name]
    try:
        obj = json.loads(literal)
    except json.JSONDecodeError as exc:
        raise FlowspaceError(f"--header is not valid JSON: {exc}") from None
    try:
        return scenario.header_from_obj(obj, "--header")
    except (TypeError, ValueError) as exc:
        raise FlowspaceError(f"malformed --header: {exc}") from exc


def cmd_apply(args) -> int:
    scn = _load(args.scenario)
    h = _parse_header(scn, args.header)
    composite = chain(_chain_of(scn, args.chain))
    result = apply_transform(composite, scn.nib, h)
    if args.format == "json":
        emit_json({"tables": [scenario.table_to_obj(t) for t in result.tables]})
    else:
        for line in render_nib_tables(result):
            print(line)
    return 0


def cmd_loops(args) -> int:
    scn = _load(args.scenario)
    findings = detect_loops(scn.nib)
    if args.format == "json":
        emit_json({"findings": [finding_to_obj(f) for f in findings]})
    else:
        if not findings:
            print("no inverse rule pairs found")
        for f in findings:
            for line in render_finding(f):
                print(line)
    return 1 if findings else 0


def cmd_whatif(args) -> int:
    scn = _load(args.scenario)
    try:
        rule_obj = json.loads(args.rule)
        old_obj = json.loads(args.old_rule) if args.old_rule else None
    except json.JSONDecodeError as exc:
        raise FlowspaceError(f"rule literal is not valid JSON: {exc}") from None
    try:
        request = FlowModRequest(
            op=args.op,
            switch=args.switch,
            rule=scenario.rule_from_obj(rule_obj, "--rule"),
            old_rule=scenario.rule_from_obj(old_obj, "--old-rule") if old_obj else None,
        )
    except (TypeError, ValueError) as exc:
        raise FlowspaceError(f"malformed rule literal: {exc}") from exc
    report = what_if(scn.nib, request)
    if args.format == "json":
        emit_json(whatif_to_obj(report))
    else:
        changed = False
        for d in report.diffs:
            if not d.added and not d.removed:
                continue
            changed = True
            print(f"switch {d.switch}:")
            for e in d.added:
                print(f"  + {render_entry(e)}")
            for e in d.removed:
                print(f"  - {render_entry(e)}")
        if not changed:
            print("no table changes")
        if report.new_loops:
            print(f"new loops introduced: {len(report.new_loops)}")
            for f in report.new_loops:
                for line in render_finding(f):
                    print(line)
        else:
            print("no new loops")
    return 1 if report.new_loops else 0


def cmd_casestudy(args) -> int:
    scn = casestudy.build_scenario()
    if args.emit_scenario:
        sys.stdout.write(scenario.dump_scenario(scn))
        return 0
    report = check_congruence(scn.chains["ids-lb"], scn.chains["lb-ids"])
    witnesses = behavioral_diff(
        scn.chains["ids-lb"], scn.chains["lb-ids"],
        [(scn.nib, h) for h in scn.queries.values()],
    )
    if args.format == "json":
        obj = congruence_to_obj(report)
        obj["behavioral_witnesses"] = len(witnesses)
        emit_json(obj)
    else:
        print("service chains: detector->balancer vs balancer->detector")
        print(f"verdict: {'congruent' if report.congruent else 'not_congruent'}")
        if report.first_difference is not None:
            print(f"first difference: {report.first_difference.detail}")
        print(f"behavioral witnesses among bundled queries: {len(witnesses)}")
    return 0 if report.congruent else 1


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowspace",
        description="Flow-table vector-space analyses of OpenFlow 1.0 control apps",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--format", choices=("text", "json"), default="text",
                        help="report format (default: text)")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for randomized suites (default: 0)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("axioms", help="run the randomized table-algebra property suite")
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="override the global seed")
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("congruence", help="compare two chains' composite transforms")
    p.add_argument("scenario")
    p.add_argument("chain_a")
    p.add_argument("chain_b")
    p.set_defaults(func=cmd_congruence)

    p = sub.add_parser("apply", help="apply a chain to the scenario NIB for a header")
    p.add_argument("scenario")
    p.add_argument("chain")
    p.add_argument("--header", required=True,
                   help='header JSON (e.g. \'{"nw_src": 1}\') or @query-name')
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("loops", help="scan the scenario tables for inverse rule pairs")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_loops)

    p = sub.add_parser("whatif", help="preview a FLOW_MOD against the scenario NIB")
    p.add_argument("scenario")
    p.add_argument("--op", choices=("add", "delete", "modify"), required=True)
    p.add_argument("--switch", type=int, required=True)
    p.add_argument("--rule", required=True, help="rule JSON")
    p.add_argument("--old-rule", help="rule being replaced (modify only)")
    p.set_defaults(func=cmd_whatif)

    p = sub.add_parser("casestudy", help="run the bundled two-service scenario")
    p.add_argument("--emit-scenario", action="store_true",
                   help="print the bundled scenario JSON instead of the report")
    p.set_defaults(func=cmd_casestudy)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FlowspaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
