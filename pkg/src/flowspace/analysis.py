"""User-facing analyses over transforms and NIBs.

Congruence reports decide whether two applications (or chains) have the
same composite matrix; behavioral differencing applies two composites
to concrete scenarios and reports where the resulting tables disagree;
loop detection scans each flow table for entry pairs whose actions undo
each other (a packet re-entering a rule it already traversed); what-if
previews a single FLOW_MOD against a NIB, diffing tables and reporting
any loop the change would introduce.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from flowspace import _kernels, actions, transforms
from flowspace.actions import STATE_MASKS, AffineAction
from flowspace.errors import SlotOutOfRangeError
from flowspace.headers import Header
from flowspace.nib import NIB
from flowspace.tables import (
    FlowEntry,
    FlowRule,
    FlowTable,
    entry_key,
    reduce,
    table_equal,
)
from flowspace.transforms import (
    AppTransform,
    ServiceChain,
    chain,
    congruent,
    flow_mod_add,
    flow_mod_delete,
    flow_mod_modify,
    is_identity_linear,
    normalize,
)


@dataclass(frozen=True)
class Difference:
    """Where two normalized transforms first disagree."""

    slot: int | None  # None: the linear parts differ
    detail: str


@dataclass(frozen=True)
class CongruenceReport:
    congruent: bool
    first_difference: Difference | None
    normalized_a: AppTransform
    normalized_b: AppTransform
    notes: tuple[str, ...] = ()


def _as_transform(x: ServiceChain | AppTransform) -> AppTransform:
    return chain(x) if isinstance(x, ServiceChain) else x


def _first_difference(a: AppTransform, b: AppTransform) -> Difference | None:
    if a.linear != b.linear:
        return Difference(None, "linear parts differ")
    for i, (sa, sb) in enumerate(zip(a.translation, b.translation)):
        if sa == sb:
            continue
        for pa, pb in zip(sa, sb):
            if pa != pb:
                ga = [type(g).__name__ for g, _ in pa.branches] or ["unconditional"]
                gb = [type(g).__name__ for g, _ in pb.branches] or ["unconditional"]
                return Difference(i, f"slot {i}: piece guards {ga} vs {gb}")
        return Difference(
            i, f"slot {i}: {len(sa)} vs {len(sb)} delta pieces"
        )
    return None


def check_congruence(a: ServiceChain | AppTransform,
                     b: ServiceChain | AppTransform) -> CongruenceReport:
    """Decide congruence and describe the first structural difference."""
    ta, tb = _as_transform(a), _as_transform(b)
    verdict = congruent(ta, tb)
    na, nb = normalize(ta), normalize(tb)
    notes = tuple(
        f"{t.name}: non-identity linear part (a table becomes a sum of tables)"
        for t in (na, nb)
        if not is_identity_linear(t)
    )
    return CongruenceReport(
        congruent=verdict,
        first_difference=None if verdict else _first_difference(na, nb),
        normalized_a=na,
        normalized_b=nb,
        notes=notes,
    )


@dataclass(frozen=True)
class Counterexample:
    """A scenario on which two composites produce different tables."""

    index: int
    header: Header
    result_a: NIB
    result_b: NIB
    differing_slots: tuple[int, ...]


def behavioral_diff(a: ServiceChain | AppTransform,
                    b: ServiceChain | AppTransform,
                    scenarios: Sequence[tuple[NIB, Header]]) -> list[Counterexample]:
    """Apply both composites to each scenario; keep those that disagree.

    Tables are compared slotwise after cancellation normal form, so
    differences that a reduction would erase do not count.
    """
    ta, tb = _as_transform(a), _as_transform(b)
    out = []
    for index, (nib, h) in enumerate(scenarios):
        ra = transforms.apply_transform(ta, nib, h)
        rb = transforms.apply_transform(tb, nib, h)
        differing = tuple(
            i for i, (x, y) in enumerate(zip(ra.tables, rb.tables))
            if not table_equal(reduce(x), reduce(y))
        )
        if differing:
            out.append(Counterexample(index, h, ra, rb, differing))
    return out


@dataclass(frozen=True)
class LoopFinding:
    """Two entries in one table whose actions compose to the identity."""

    switch: int
    entry_a: FlowEntry
    entry_b: FlowEntry
    certificate: AffineAction

    def __post_init__(self):
        if not actions.is_identity(self.certificate):
            raise ValueError("certificate must be the identity action")


def detect_loops(nib: NIB) -> list[LoopFinding]:
    """Scan every table for additive-inverse entry pairs.

    Entries pair only when match, output port and ttl agree and their
    actions are mutual inverses; the composed (identity) action is kept
    as the certificate.  Each table is scanned independently.
    """
    findings = []
    for switch, table in enumerate(nib.tables):
        groups: dict[tuple, list[FlowEntry]] = {}
        for e in table:  # canonical order
            sig = (e.rule.match, e.rule.out_port, e.rule.ttl)
            groups.setdefault(sig, []).append(e)
        for members in groups.values():
            if len(members) < 2:
                continue
            linears = [e.rule.action.linear for e in members]
            trs = [e.rule.action.translation for e in members]
            for i, j in _kernels.inverse_pairs(linears, trs, STATE_MASKS):
                ea, eb = members[i], members[j]
                findings.append(LoopFinding(
                    switch, ea, eb,
                    actions.compose(ea.rule.action, eb.rule.action),
                ))
    findings.sort(key=lambda f: (f.switch, entry_key(f.entry_a), entry_key(f.entry_b)))
    return findings


@dataclass(frozen=True)
class FlowModRequest:
    """A candidate FLOW_MOD: add, delete or modify one rule on one switch."""

    op: str
    switch: int
    rule: FlowRule
    old_rule: FlowRule | None = None

    def __post_init__(self):
        if self.op not in ("add", "delete", "modify"):
            raise ValueError(f"op must be add/delete/modify, not {self.op!r}")
        if self.op == "modify" and self.old_rule is None:
            raise ValueError("modify needs the rule being replaced")


@dataclass(frozen=True)
class TableDiff:
    switch: int
    added: tuple[FlowEntry, ...]
    removed: tuple[FlowEntry, ...]


@dataclass(frozen=True)
class WhatIfReport:
    diffs: tuple[TableDiff, ...]
    new_loops: tuple[LoopFinding, ...]
    result: NIB


def _table_diff(switch: int, before: FlowTable, after: FlowTable) -> TableDiff:
    before_set = set(before)
    after_set = set(after)
    return TableDiff(
        switch,
        added=tuple(sorted(after_set - before_set, key=entry_key)),
        removed=tuple(sorted(before_set - after_set, key=entry_key)),
    )


def _finding_id(f: LoopFinding) -> tuple:
    return (f.switch, entry_key(f.entry_a), entry_key(f.entry_b))


def what_if(nib: NIB, candidate: FlowModRequest) -> WhatIfReport:
    """Preview a FLOW_MOD: table diffs plus any loops it would introduce."""
    n = nib.topology.switch_count
    if not 0 <= candidate.switch < n:
        raise SlotOutOfRangeError(
            f"switch {candidate.switch} out of range for {n} switches"
        )
    table = nib.tables[candidate.switch]
    if candidate.op == "add":
        updated = flow_mod_add(table, candidate.rule)
    elif candidate.op == "delete":
        updated = flow_mod_delete(table, candidate.rule)
    else:
        updated = flow_mod_modify(table, candidate.old_rule, candidate.rule)
    tables = tuple(
        updated if i == candidate.switch else t for i, t in enumerate(nib.tables)
    )
    after = NIB(nib.topology, tables, nib.flows)
    before_ids = {_finding_id(f) for f in detect_loops(nib)}
    new_loops = tuple(
        f for f in detect_loops(after) if _finding_id(f) not in before_ids
    )
    diffs = tuple(
        _table_diff(i, nib.tables[i], after.tables[i]) for i in range(n)
    )
    return WhatIfReport(diffs=diffs, new_loops=new_loops, result=after)
