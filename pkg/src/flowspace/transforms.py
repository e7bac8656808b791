"""Control-application transforms over the NIB.

A control application is modeled as a homogeneous matrix acting on the
vector of per-switch flow tables: a square 0/1 linear part (almost
always the identity) plus, per switch slot, a symbolic table delta.  A
delta is a formal sum of guarded pieces; each piece selects a list of
rule templates by evaluating its guards (first match wins, with a
mandatory otherwise arm) against the ambient NIB and the header being
steered, and the selected templates instantiate into flow entries that
are unioned into the slot's table.

Composition multiplies the linear parts over the two-element field and
adds the deltas (formal-sum concatenation), mirroring how composite
application matrices multiply.  `normalize` brings transforms to a
canonical form using only semantics-preserving rewrites - sorting and
deduplicating template lists, dropping dead arms, collapsing pieces
whose arms all agree, merging summed pieces with identical guard
sequences - so that structural equality of normal forms (congruence)
implies behavioral equality on every NIB, while the converse is not
claimed.

The FLOW_MOD table operations (add / delete / modify a rule) live here
as well, since an application's deltas are built from them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from flowspace import actions
from flowspace.actions import AffineAction
from flowspace.errors import (
    DimensionMismatchError,
    EmptyChainError,
    RuleNotFoundError,
    SlotOutOfRangeError,
    UnresolvedPortError,
)
from flowspace.headers import (
    FIELDS,
    Header,
    MatchPattern,
    field_delta,
    field_index,
    pattern_key,
)
from flowspace.nib import NIB, count_by_dest, count_by_src, effective_dest_of_header
from flowspace.tables import FlowEntry, FlowRule, FlowTable, add

# ---------------------------------------------------------------------------
# Guards


@dataclass(frozen=True)
class TrueGuard:
    """Always satisfied."""


@dataclass(frozen=True)
class SourceCountAtMost:
    """Holds when the per-source flow count of the steered header is <= threshold."""

    threshold: int


@dataclass(frozen=True)
class LoadAtMost:
    """Holds when server_a currently handles no more flows than server_b."""

    server_a: int
    server_b: int


Guard = Union[TrueGuard, SourceCountAtMost, LoadAtMost]


def eval_guard(g: Guard, nib: NIB, h: Header) -> bool:
    if isinstance(g, TrueGuard):
        return True
    if isinstance(g, SourceCountAtMost):
        return count_by_src(nib, h) <= g.threshold
    if isinstance(g, LoadAtMost):
        return count_by_dest(nib, g.server_a) <= count_by_dest(nib, g.server_b)
    raise TypeError(f"not a guard: {g!r}")


def guard_key(g: Guard) -> tuple:
    if isinstance(g, TrueGuard):
        return (0,)
    if isinstance(g, SourceCountAtMost):
        return (1, g.threshold)
    if isinstance(g, LoadAtMost):
        return (2, g.server_a, g.server_b)
    raise TypeError(f"not a guard: {g!r}")


# ---------------------------------------------------------------------------
# Rule templates


@dataclass(frozen=True)
class PortName:
    """A named port, resolved through the topology's port map."""

    name: str


@dataclass(frozen=True)
class PortNumber:
    """A literal port."""

    value: int


@dataclass(frozen=True)
class DestPort:
    """The port of the server addressed by the steered header's effective destination."""


PortRef = Union[PortName, PortNumber, DestPort]


@dataclass(frozen=True)
class PickLessLoaded:
    """The address of whichever of two servers currently has less load.

    This is a balancer's deferred choice: with it, a piecewise balancer
    whose arms differ only in the eventual server pick can be written
    with textually identical arms, which then collapse to an
    unconditional delta under normalization.
    """

    server_a: int
    server_b: int


ValueRef = Union[int, PickLessLoaded]


@dataclass(frozen=True)
class Forward:
    """Translate the output port to the resolved port."""

    port: PortRef


@dataclass(frozen=True)
class Drop:
    """The zero-scaling action."""


@dataclass(frozen=True)
class SetField:
    """Rewrite one header field to a target value.

    Instantiation computes the translation delta from the steered
    header's current field value, which is why the resulting action is
    a function of that header.
    """

    field: str
    to: ValueRef


@dataclass(frozen=True)
class Seq:
    """A composite action: steps applied left to right."""

    steps: tuple[ActionSpec, ...]


ActionSpec = Union[Forward, Drop, SetField, Seq]


@dataclass(frozen=True)
class InputHeader:
    """Match exactly the header being steered."""


MatchSpec = Union[InputHeader, MatchPattern]


@dataclass(frozen=True)
class RuleTemplate:
    """A symbolic flow entry, instantiated per (NIB, header)."""

    match: MatchSpec
    out_port: PortRef
    ttl: int
    action: ActionSpec
    counter: int = 0


def _port_key(ref: PortRef) -> tuple:
    if isinstance(ref, PortNumber):
        return (0, ref.value, "")
    if isinstance(ref, PortName):
        return (1, 0, ref.name)
    return (2, 0, "")


def _value_key(ref: ValueRef) -> tuple:
    if isinstance(ref, PickLessLoaded):
        return (1, ref.server_a, ref.server_b)
    return (0, ref, 0)


def _action_spec_key(spec: ActionSpec) -> tuple:
    if isinstance(spec, Drop):
        return (0,)
    if isinstance(spec, Forward):
        return (1, _port_key(spec.port))
    if isinstance(spec, SetField):
        return (2, field_index(spec.field), _value_key(spec.to))
    return (3, tuple(_action_spec_key(s) for s in spec.steps))


def _match_spec_key(m: MatchSpec) -> tuple:
    if isinstance(m, InputHeader):
        return (0, ())
    return (1, pattern_key(m))


def template_key(t: RuleTemplate) -> tuple:
    return (_match_spec_key(t.match), _port_key(t.out_port), t.ttl,
            _action_spec_key(t.action), t.counter)


# ---------------------------------------------------------------------------
# Guarded deltas and application transforms

Templates = tuple[RuleTemplate, ...]
Branch = tuple[Guard, Templates]


@dataclass(frozen=True)
class GuardedDelta:
    """One piecewise table delta: ordered guarded arms plus the otherwise arm."""

    branches: tuple[Branch, ...]
    default: Templates


def unconditional(templates: Sequence[RuleTemplate]) -> GuardedDelta:
    return GuardedDelta((), tuple(templates))


def guarded(branches: Sequence[tuple[Guard, Sequence[RuleTemplate]]],
            default: Sequence[RuleTemplate]) -> GuardedDelta:
    return GuardedDelta(
        tuple((g, tuple(tpls)) for g, tpls in branches),
        tuple(default),
    )


#: A slot's delta is a formal sum of guarded pieces.
DeltaSum = tuple[GuardedDelta, ...]


@dataclass(frozen=True)
class AppTransform:
    """A control application as a matrix over the table vector."""

    name: str
    linear: tuple[tuple[int, ...], ...]
    translation: tuple[DeltaSum, ...]

    def __post_init__(self):
        n = len(self.translation)
        if len(self.linear) != n or any(len(row) != n for row in self.linear):
            raise DimensionMismatchError("linear part must be square and match the slot count")
        for row in self.linear:
            for c in row:
                if c not in (0, 1):
                    raise ValueError("linear entries must be 0 or 1")

    @property
    def dimension(self) -> int:
        return len(self.translation)


@dataclass(frozen=True)
class ServiceChain:
    """An ordered sequence of applications; the first stage applies first."""

    stages: tuple[AppTransform, ...]

    def __post_init__(self):
        if not self.stages:
            raise EmptyChainError("a service chain needs at least one stage")


def _identity_matrix(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def identity_transform(n: int, name: str = "identity") -> AppTransform:
    return AppTransform(name, _identity_matrix(n), ((),) * n)


def make_app(name: str, slot: int, delta: GuardedDelta, n: int) -> AppTransform:
    """An application that applies one delta to one switch slot."""
    if not 0 <= slot < n:
        raise SlotOutOfRangeError(f"slot {slot} out of range for {n} switches")
    translation = tuple((delta,) if i == slot else () for i in range(n))
    return AppTransform(name, _identity_matrix(n), translation)


def is_identity_linear(a: AppTransform) -> bool:
    return a.linear == _identity_matrix(a.dimension)


# ---------------------------------------------------------------------------
# FLOW_MOD table operations


def flow_mod_add(t: FlowTable, r: FlowRule) -> FlowTable:
    """Install a rule; new entries start with a zero counter."""
    return add(t, FlowTable([FlowEntry(r, 0)]))


def flow_mod_delete(t: FlowTable, r: FlowRule) -> FlowTable:
    """Remove every entry whose rule equals r (counters included)."""
    keep = [e for e in t if e.rule != r]
    if len(keep) == len(t):
        raise RuleNotFoundError(f"no entry with rule {r!r}")
    return FlowTable(keep)


def flow_mod_modify(t: FlowTable, old: FlowRule, new: FlowRule) -> FlowTable:
    """Replace old with new; the new entry's counter restarts at zero."""
    return flow_mod_add(flow_mod_delete(t, old), new)


# ---------------------------------------------------------------------------
# Evaluation


def resolve_port(ref: PortRef, nib: NIB, h: Header) -> int:
    if isinstance(ref, PortNumber):
        return ref.value
    if isinstance(ref, PortName):
        try:
            return nib.topology.ports[ref.name]
        except KeyError:
            raise UnresolvedPortError(f"no port named {ref.name!r} in topology") from None
    dest = effective_dest_of_header(nib, h)
    try:
        return nib.topology.server_ports[dest]
    except KeyError:
        raise UnresolvedPortError(f"no server port for destination {dest}") from None


def resolve_value(ref: ValueRef, nib: NIB) -> int:
    if isinstance(ref, PickLessLoaded):
        if count_by_dest(nib, ref.server_a) <= count_by_dest(nib, ref.server_b):
            return ref.server_a
        return ref.server_b
    return ref


def build_action(spec: ActionSpec, nib: NIB, h: Header) -> AffineAction:
    if isinstance(spec, Drop):
        return actions.drop()
    if isinstance(spec, Forward):
        return actions.forward(resolve_port(spec.port, nib, h))
    if isinstance(spec, SetField):
        i = field_index(spec.field)
        target = resolve_value(spec.to, nib)
        delta = field_delta(h.values[i], target, FIELDS[i].width)
        return actions.modify_field(i, delta)
    result = actions.identity()
    for step in spec.steps:
        result = actions.compose(build_action(step, nib, h), result)
    return result


def instantiate(tpl: RuleTemplate, nib: NIB, h: Header) -> FlowEntry:
    match = MatchPattern.exact_for(h) if isinstance(tpl.match, InputHeader) else tpl.match
    rule = FlowRule(
        match=match,
        out_port=resolve_port(tpl.out_port, nib, h),
        ttl=tpl.ttl,
        action=build_action(tpl.action, nib, h),
    )
    return FlowEntry(rule, tpl.counter)


def select_templates(piece: GuardedDelta, nib: NIB, h: Header) -> Templates:
    """First satisfied arm wins; the otherwise arm catches the rest."""
    for guard, templates in piece.branches:
        if eval_guard(guard, nib, h):
            return templates
    return piece.default


def apply_transform(a: AppTransform, nib: NIB, h: Header) -> NIB:
    """Apply the application matrix to the NIB's table vector for header h.

    Row i of the linear part selects which input tables union into slot
    i; the slot's delta pieces then evaluate their guards against the
    (pre-transform) NIB and add their instantiated entries.  Flows are
    left untouched.
    """
    n = nib.topology.switch_count
    if a.dimension != n:
        raise DimensionMismatchError(
            f"transform has {a.dimension} slots, topology has {n} switches"
        )
    new_tables = []
    for i in range(n):
        acc = FlowTable()
        for j, coeff in enumerate(a.linear[i]):
            if coeff:
                acc = add(acc, nib.tables[j])
        entries = [instantiate(tpl, nib, h)
                   for piece in a.translation[i]
                   for tpl in select_templates(piece, nib, h)]
        new_tables.append(add(acc, FlowTable(entries)))
    return NIB(nib.topology, tuple(new_tables), nib.flows)


# ---------------------------------------------------------------------------
# Composition


def compose_apps(second: AppTransform, first: AppTransform) -> AppTransform:
    """The transform applying `first` and then `second`.

    Linear parts multiply over the two-element field; slot i's delta
    gains the first transform's deltas for every slot selected by
    second's row i, followed by second's own delta.
    """
    n = first.dimension
    if second.dimension != n:
        raise DimensionMismatchError(
            f"cannot compose {second.dimension}-slot with {n}-slot transform"
        )
    linear = tuple(
        tuple(
            _xor_all(second.linear[i][j] & first.linear[j][k] for j in range(n))
            for k in range(n)
        )
        for i in range(n)
    )
    translation = []
    for i in range(n):
        pieces: list[GuardedDelta] = []
        for j in range(n):
            if second.linear[i][j]:
                pieces.extend(first.translation[j])
        pieces.extend(second.translation[i])
        translation.append(tuple(pieces))
    return AppTransform(
        f"{second.name}*{first.name}", linear, tuple(translation)
    )


def _xor_all(bits) -> int:
    acc = 0
    for b in bits:
        acc ^= b
    return acc


def chain(stages: ServiceChain | Sequence[AppTransform]) -> AppTransform:
    """Collapse a chain into one composite; the first stage applies first."""
    seq = stages.stages if isinstance(stages, ServiceChain) else tuple(stages)
    if not seq:
        raise EmptyChainError("cannot compose an empty chain")
    composite = seq[0]
    for stage in seq[1:]:
        composite = compose_apps(stage, composite)
    return composite


# ---------------------------------------------------------------------------
# Normal form and congruence


def _canon_templates(templates: Templates) -> Templates:
    return tuple(sorted(set(templates), key=template_key))


def _canon_piece(piece: GuardedDelta) -> GuardedDelta:
    """Semantics-preserving canonical form of one piece.

    Later arms repeating an earlier guard are dead (first match wins)
    and are dropped; an always-true arm swallows everything after it
    into the otherwise arm; if every arm selects the same templates as
    the otherwise arm, the piece is unconditional.
    """
    default = _canon_templates(piece.default)
    branches: list[Branch] = []
    seen: set[tuple] = set()
    for guard, templates in piece.branches:
        key = guard_key(guard)
        if key in seen:
            continue
        templates = _canon_templates(templates)
        if isinstance(guard, TrueGuard):
            default = templates
            break
        seen.add(key)
        branches.append((guard, templates))
    if all(tpls == default for _, tpls in branches):
        branches = []
    return GuardedDelta(tuple(branches), default)


def _piece_key(piece: GuardedDelta) -> tuple:
    return (
        tuple(guard_key(g) for g, _ in piece.branches),
        tuple(tuple(template_key(t) for t in tpls) for _, tpls in piece.branches),
        tuple(template_key(t) for t in piece.default),
    )


def _merge_pass(pieces: tuple[GuardedDelta, ...]) -> tuple[GuardedDelta, ...]:
    grouped: dict[tuple, GuardedDelta] = {}
    for piece in pieces:
        sig = tuple(guard_key(g) for g, _ in piece.branches)
        other = grouped.get(sig)
        if other is None:
            grouped[sig] = piece
        else:
            # merging keeps the arm structure, so every piece stored under
            # sig still carries sig's arms; collapses happen only in the
            # canonicalization below, feeding the next pass
            grouped[sig] = GuardedDelta(
                tuple(
                    (g1, _canon_templates(t1 + t2))
                    for (g1, t1), (_, t2) in zip(other.branches, piece.branches)
                ),
                _canon_templates(other.default + piece.default),
            )
    out = (_canon_piece(p) for p in grouped.values())
    return tuple(p for p in out if p.branches or p.default)


def _canon_sum(pieces: DeltaSum) -> DeltaSum:
    """Canonicalize a formal sum of pieces.

    Pieces with identical guard sequences always fire the same arm
    index, so they merge arm-wise (template-list union); pieces that
    contribute nothing vanish; the survivors sort canonically.  Merging
    can collapse a piece to a new guard sequence (arms agreeing with
    the otherwise arm), so passes repeat until a fixpoint.
    """
    current = tuple(
        p for p in (_canon_piece(x) for x in pieces) if p.branches or p.default
    )
    while True:
        merged = _merge_pass(current)
        if merged == current:
            return tuple(sorted(merged, key=_piece_key))
        current = merged


def normalize(a: AppTransform) -> AppTransform:
    """Canonical form whose structural equality decides congruence."""
    return AppTransform(a.name, a.linear, tuple(_canon_sum(s) for s in a.translation))


def congruent(a: AppTransform, b: AppTransform) -> bool:
    """Equality of composite matrices, decided on normal forms."""
    if a.dimension != b.dimension:
        raise DimensionMismatchError(
            f"cannot compare {a.dimension}-slot with {b.dimension}-slot transform"
        )
    na, nb = normalize(a), normalize(b)
    return na.linear == nb.linear and na.translation == nb.translation


def is_translation_only(a: AppTransform) -> bool:
    """True when the transform only adds unconditional deltas.

    Such transforms commute under composition (union is commutative),
    so chains built from them are order-insensitive.
    """
    if not is_identity_linear(a):
        return False
    return all(
        not piece.branches
        for s in normalize(a).translation
        for piece in s
    )
