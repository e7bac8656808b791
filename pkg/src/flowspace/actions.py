"""The rule-state action algebra.

An action operates on the homogeneous rule state [header fields,
out_port, ttl, 1].  Forward and modify-field are translations of one
slot; drop is the zero scaling.  All such maps, and every product of
them, fit in a closed canonical form: a 0/1 diagonal plus a translation
vector, with the homogeneous row implicit.  Dense matrices never appear
at runtime; the test suite expands actions densely as an independent
oracle.

Composites with drop keep the exact matrix semantics: their diagonal is
all zeros, and a translation applied after the drop survives as a
constant output.  Only actions with an all-ones diagonal are
invertible.
"""

from __future__ import annotations

from dataclasses import dataclass

from flowspace import _kernels
from flowspace.errors import SingularActionError, WidthOverflowError
from flowspace.headers import FIELD_COUNT, FIELD_MASKS, FIELDS, Header, field_index

# State vector layout: the 12 header fields, then out_port, then ttl.
PORT_SLOT = FIELD_COUNT
TTL_SLOT = FIELD_COUNT + 1
STATE_SIZE = FIELD_COUNT + 2

PORT_MASK = 0xFFFF
TTL_MASK = 0xFFFF  # OpenFlow 1.0 timeouts are u16

STATE_MASKS: tuple[int, ...] = FIELD_MASKS + (PORT_MASK, TTL_MASK)

_ZEROS = (0,) * STATE_SIZE
_ONES = (1,) * STATE_SIZE


@dataclass(frozen=True)
class RuleState:
    """The vector an action acts on: a header, an output port and a ttl."""

    header: Header
    out_port: int
    ttl: int

    def __post_init__(self):
        if not 0 <= self.out_port <= PORT_MASK:
            raise WidthOverflowError("out_port", self.out_port, 16)
        if not 0 <= self.ttl <= TTL_MASK:
            raise WidthOverflowError("ttl", self.ttl, 16)

    def vector(self) -> tuple[int, ...]:
        return self.header.values + (self.out_port, self.ttl)

    @classmethod
    def from_vector(cls, vec: tuple[int, ...]) -> RuleState:
        return cls(Header(vec[:FIELD_COUNT]), vec[PORT_SLOT], vec[TTL_SLOT])


@dataclass(frozen=True)
class AffineAction:
    """Canonical diagonal-plus-translation form of a rule-state map."""

    linear: tuple[int, ...]
    translation: tuple[int, ...]

    def __post_init__(self):
        if len(self.linear) != STATE_SIZE or len(self.translation) != STATE_SIZE:
            raise ValueError(f"action vectors must have {STATE_SIZE} slots")
        for l in self.linear:
            if l not in (0, 1):
                raise ValueError("diagonal entries must be 0 or 1")
        for t, m in zip(self.translation, STATE_MASKS):
            if not 0 <= t <= m:
                raise ValueError(f"translation entry {t} exceeds mask {m:#x}")


def identity() -> AffineAction:
    return AffineAction(_ONES, _ZEROS)


def forward(port_delta: int) -> AffineAction:
    """Translate the output port; header and ttl are untouched."""
    tr = list(_ZEROS)
    tr[PORT_SLOT] = port_delta % (PORT_MASK + 1)
    return AffineAction(_ONES, tuple(tr))


def drop() -> AffineAction:
    """The zero scaling: every state maps to the all-zero state."""
    return AffineAction(_ZEROS, _ZEROS)


def modify_field(field: int | str, delta: int) -> AffineAction:
    """Translate one header field by delta (mod the field's width)."""
    i = field_index(field)
    tr = list(_ZEROS)
    tr[i] = delta % (FIELD_MASKS[i] + 1)
    return AffineAction(_ONES, tuple(tr))


def compose(second: AffineAction, first: AffineAction) -> AffineAction:
    """The action applying `first` and then `second` (matrix product)."""
    lin, tr = _kernels.compose(
        second.linear, second.translation, first.linear, first.translation, STATE_MASKS
    )
    return AffineAction(lin, tr)


def apply_action(a: AffineAction, s: RuleState) -> RuleState:
    return RuleState.from_vector(_kernels.apply(a.linear, a.translation, s.vector(), STATE_MASKS))


def invert(a: AffineAction) -> AffineAction:
    """The inverse map; only all-ones diagonals are invertible."""
    if not all(a.linear):
        raise SingularActionError("zero-scaled actions have no inverse")
    return AffineAction(a.linear, _kernels.negate(a.translation, STATE_MASKS))


def is_identity(a: AffineAction) -> bool:
    return _kernels.is_identity(a.linear, a.translation)


def is_invertible(a: AffineAction) -> bool:
    return all(a.linear)


def action_key(a: AffineAction) -> tuple:
    """Deterministic total-order key used for canonical table ordering."""
    return (a.linear, a.translation)


@dataclass(frozen=True)
class ActionLabel:
    """Human-facing classification of an action's matrix content.

    kind is one of "forward", "drop", "modify" or "composite"; field and
    delta are set for the single-translation kinds.
    """

    kind: str
    field: str | None = None
    delta: int | None = None


def label(a: AffineAction) -> ActionLabel:
    if not any(a.linear):
        if not any(a.translation):
            return ActionLabel("drop")
        return ActionLabel("composite")
    if not all(a.linear):
        return ActionLabel("composite")
    hot = [i for i, t in enumerate(a.translation) if t]
    if hot == [] or hot == [PORT_SLOT]:
        return ActionLabel("forward", delta=a.translation[PORT_SLOT])
    if len(hot) == 1 and hot[0] < FIELD_COUNT:
        i = hot[0]
        return ActionLabel("modify", field=FIELDS[i].name, delta=a.translation[i])
    return ActionLabel("composite")


def describe(a: AffineAction) -> str:
    """Short text form, e.g. ``forward(+3)`` or ``modify(nw_dst,+7)``."""
    lab = label(a)
    if lab.kind == "drop":
        return "drop"
    if lab.kind == "forward":
        return f"forward(+{lab.delta})"
    if lab.kind == "modify":
        return f"modify({lab.field},+{lab.delta})"
    parts = []
    if not any(a.linear):
        parts.append("drop")
    for i, t in enumerate(a.translation):
        if not t:
            continue
        if i == PORT_SLOT:
            parts.append(f"forward(+{t})")
        elif i == TTL_SLOT:
            parts.append(f"ttl(+{t})")
        else:
            parts.append(f"modify({FIELDS[i].name},+{t})")
    return "seq[" + ", ".join(parts) + "]"
