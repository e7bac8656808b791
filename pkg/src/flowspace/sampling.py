"""Seeded random generators for tables, actions, transforms and scenarios.

Used by the runtime property suite, the behavioral differ and the test
suite.  Addresses are drawn from a small pool so source/destination
collisions (the interesting cases for the statistics and guards)
actually occur, and every generated scenario resolves: topologies map
all pool addresses to server ports and templates only reference ports
the topology defines.
"""

from __future__ import annotations

import random

from flowspace import actions
from flowspace.actions import PORT_SLOT, STATE_SIZE, AffineAction
from flowspace.headers import FIELD_COUNT, FIELD_MASKS, Header, MatchPattern
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
    PortName,
    PortNumber,
    RuleTemplate,
    Seq,
    SetField,
    SourceCountAtMost,
    TrueGuard,
    make_app,
    unconditional,
)

ADDRESS_POOL = tuple(0x0A000001 + i for i in range(8))
PORT_NAMES = tuple(f"p{i}" for i in range(6))
TTL_POOL = (30, 60, 120)


def rng_for(seed: int, label: str) -> random.Random:
    """Independent deterministic stream per (seed, label)."""
    return random.Random(f"{seed}:{label}")


def random_header(rng: random.Random) -> Header:
    values = [rng.randint(0, m) for m in FIELD_MASKS]
    values[6] = rng.choice(ADDRESS_POOL)  # nw_src
    values[7] = rng.choice(ADDRESS_POOL)  # nw_dst
    return Header(tuple(values))


def random_pattern(rng: random.Random) -> MatchPattern:
    entries: list[int | None] = []
    for i, m in enumerate(FIELD_MASKS):
        if rng.random() < 0.5:
            entries.append(None)
        elif i in (6, 7):
            entries.append(rng.choice(ADDRESS_POOL))
        else:
            entries.append(rng.randint(0, m))
    return MatchPattern(tuple(entries))


def random_invertible_action(rng: random.Random) -> AffineAction:
    """All-ones diagonal; ttl is never translated (serializable form)."""
    tr = [0] * STATE_SIZE
    for i in range(FIELD_COUNT):
        if rng.random() < 0.25:
            tr[i] = rng.randint(0, FIELD_MASKS[i])
    if rng.random() < 0.5:
        tr[PORT_SLOT] = rng.randint(0, 0xFFFF)
    return AffineAction((1,) * STATE_SIZE, tuple(tr))


def random_action(rng: random.Random) -> AffineAction:
    roll = rng.random()
    if roll < 0.15:
        return actions.drop()
    if roll < 0.20:
        # A constant map: drop composed with a later translation.
        return actions.compose(random_invertible_action(rng), actions.drop())
    return random_invertible_action(rng)


def random_rule(rng: random.Random, invertible_only: bool = False) -> FlowRule:
    action = (random_invertible_action if invertible_only else random_action)(rng)
    return FlowRule(
        match=random_pattern(rng),
        out_port=rng.randint(0, 0xFFFF),
        ttl=rng.choice(TTL_POOL),
        action=action,
    )


def random_entry(rng: random.Random, invertible_only: bool = False) -> FlowEntry:
    return FlowEntry(random_rule(rng, invertible_only), rng.randint(0, 5))


def random_table(rng: random.Random, max_entries: int = 8,
                 invertible_only: bool = False) -> FlowTable:
    k = rng.randint(0, max_entries)
    return FlowTable(random_entry(rng, invertible_only) for _ in range(k))


def random_collision_table(rng: random.Random, max_entries: int = 32) -> FlowTable:
    """Tables where inverse pairs can actually occur.

    Entries share a small pool of (match, port, ttl) signatures and
    sometimes plant the exact inverse of an earlier action.
    """
    signatures = [
        (random_pattern(rng), rng.randint(0, 0xFFFF), rng.choice(TTL_POOL))
        for _ in range(rng.randint(1, 4))
    ]
    entries: list[FlowEntry] = []
    for _ in range(rng.randint(0, max_entries)):
        match, port, ttl = rng.choice(signatures)
        roll = rng.random()
        if roll < 0.3 and entries:
            donor = rng.choice(entries)
            if actions.is_invertible(donor.rule.action):
                action = actions.invert(donor.rule.action)
                match, port, ttl = (donor.rule.match, donor.rule.out_port,
                                    donor.rule.ttl)
            else:
                action = random_action(rng)
        elif roll < 0.4:
            action = actions.drop()
        else:
            action = random_invertible_action(rng)
        entries.append(FlowEntry(FlowRule(match, port, ttl, action),
                                 rng.randint(0, 5)))
    return FlowTable(entries)


# ---------------------------------------------------------------------------
# Topologies, NIBs, scenarios


def random_topology(rng: random.Random, switch_count: int | None = None) -> Topology:
    n = switch_count if switch_count is not None else rng.randint(2, 4)
    ports = {name: i + 1 for i, name in enumerate(PORT_NAMES)}
    server_ports = {addr: rng.randint(1, len(PORT_NAMES)) for addr in ADDRESS_POOL}
    return Topology(n, ports, server_ports)


def random_flows(rng: random.Random, max_flows: int = 20) -> tuple[Flow, ...]:
    flows = []
    for _ in range(rng.randint(0, max_flows)):
        assigned = rng.choice(ADDRESS_POOL) if rng.random() < 0.5 else None
        flows.append(Flow(random_header(rng), assigned))
    return tuple(flows)


def random_nib(rng: random.Random, topology: Topology,
               max_entries: int = 4) -> NIB:
    tables = tuple(
        random_table(rng, max_entries) for _ in range(topology.switch_count)
    )
    return NIB(topology, tables, random_flows(rng))


def random_scenario(rng: random.Random, topology: Topology) -> tuple[NIB, Header]:
    return random_nib(rng, topology), random_header(rng)


# ---------------------------------------------------------------------------
# Transforms


def random_port_ref(rng: random.Random):
    roll = rng.random()
    if roll < 0.5:
        return PortName(rng.choice(PORT_NAMES))
    if roll < 0.8:
        return PortNumber(rng.randint(0, 0xFFFF))
    return DestPort()


def random_action_spec(rng: random.Random, depth: int = 0):
    roll = rng.random()
    if roll < 0.35:
        return Forward(random_port_ref(rng))
    if roll < 0.5:
        return Drop()
    if roll < 0.75 or depth > 0:
        field = rng.choice(("nw_src", "nw_dst", "dl_src", "tp_dst"))
        to = rng.choice(ADDRESS_POOL) if field.startswith("nw") else rng.randint(0, 0xFFFF)
        return SetField(field, to)
    return Seq(tuple(random_action_spec(rng, depth + 1)
                     for _ in range(rng.randint(1, 2))))


def random_template(rng: random.Random) -> RuleTemplate:
    match = InputHeader() if rng.random() < 0.5 else random_pattern(rng)
    return RuleTemplate(
        match=match,
        out_port=random_port_ref(rng),
        ttl=rng.choice(TTL_POOL),
        action=random_action_spec(rng),
        counter=0 if rng.random() < 0.8 else rng.randint(1, 3),
    )


def random_templates(rng: random.Random, most: int = 3) -> tuple[RuleTemplate, ...]:
    return tuple(random_template(rng) for _ in range(rng.randint(0, most)))


def random_guard(rng: random.Random):
    roll = rng.random()
    if roll < 0.15:
        return TrueGuard()
    if roll < 0.6:
        return SourceCountAtMost(rng.randint(0, 5))
    a, b = rng.sample(ADDRESS_POOL, 2)
    return LoadAtMost(a, b)


def random_delta(rng: random.Random) -> GuardedDelta:
    branches = tuple(
        (random_guard(rng), random_templates(rng))
        for _ in range(rng.randint(0, 2))
    )
    return GuardedDelta(branches, random_templates(rng))


def random_app(rng: random.Random, n: int, name: str = "app") -> AppTransform:
    slot = rng.randrange(n)
    return make_app(name, slot, random_delta(rng), n)


def random_translation_app(rng: random.Random, n: int,
                           name: str = "move") -> AppTransform:
    slot = rng.randrange(n)
    templates = random_templates(rng, most=3)
    return make_app(name, slot, unconditional(templates), n)


# ---------------------------------------------------------------------------
# Congruent-by-construction rewrites (for soundness checks)


def shuffled_variant(rng: random.Random, app: AppTransform) -> AppTransform:
    """A structurally shuffled but semantically identical transform.

    Applies only normalize-invariant rewrites: piece order, template
    duplication (sets collapse duplicates) and rewriting an
    unconditional piece as a piecewise form whose arms all agree.
    """
    new_slots = []
    for slot_sum in app.translation:
        pieces = []
        for piece in slot_sum:
            branches = piece.branches
            default = piece.default
            if default and rng.random() < 0.5:
                default = default + (rng.choice(default),)
            if not branches and rng.random() < 0.5:
                branches = ((random_guard(rng), default),)
            pieces.append(GuardedDelta(branches, default))
        rng.shuffle(pieces)
        new_slots.append(tuple(pieces))
    return AppTransform(app.name + "'", app.linear, tuple(new_slots))
