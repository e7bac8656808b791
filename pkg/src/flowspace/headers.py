"""The OpenFlow 1.0 header space.

A header is a tuple of the twelve fixed-width match fields of OpenFlow
1.0, one unsigned integer per field.  Each field carries its own
modulus 2**width: translating a field is modular addition, so every
translation has an exact inverse and a set-field rewrite can always be
expressed as a translation (delta = new - old mod 2**width).

Match patterns are the all-or-nothing wildcard form used by flow rules:
per field, either an exact value or a wildcard.  Prefix masks are out
of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

from flowspace import _kernels
from flowspace.errors import ArityMismatchError, UnknownFieldError, WidthOverflowError


@dataclass(frozen=True)
class FieldSpec:
    """One canonical match field: a name and a bit width in [1, 64]."""

    name: str
    width: int


#: The OpenFlow 1.0 match set, in wire order.
FIELDS: tuple[FieldSpec, ...] = (
    FieldSpec("in_port", 16),
    FieldSpec("dl_src", 48),
    FieldSpec("dl_dst", 48),
    FieldSpec("dl_type", 16),
    FieldSpec("dl_vlan", 12),
    FieldSpec("dl_vlan_pcp", 3),
    FieldSpec("nw_src", 32),
    FieldSpec("nw_dst", 32),
    FieldSpec("nw_proto", 8),
    FieldSpec("nw_tos", 6),
    FieldSpec("tp_src", 16),
    FieldSpec("tp_dst", 16),
)

FIELD_COUNT = len(FIELDS)
FIELD_INDEX: dict[str, int] = {f.name: i for i, f in enumerate(FIELDS)}
FIELD_MASKS: tuple[int, ...] = tuple((1 << f.width) - 1 for f in FIELDS)

NW_SRC = FIELD_INDEX["nw_src"]
NW_DST = FIELD_INDEX["nw_dst"]


def field_index(field: int | str) -> int:
    """Resolve a field given by index or canonical name."""
    if isinstance(field, str):
        try:
            return FIELD_INDEX[field]
        except KeyError:
            raise UnknownFieldError(f"unknown field {field!r}") from None
    if not 0 <= field < FIELD_COUNT:
        raise UnknownFieldError(f"field index {field} out of range")
    return field


def _check_values(values: tuple[int, ...], kind: str) -> None:
    if len(values) != FIELD_COUNT:
        raise ArityMismatchError(
            f"{kind} needs {FIELD_COUNT} values, got {len(values)}"
        )
    for spec, value in zip(FIELDS, values):
        if not 0 <= value < (1 << spec.width):
            raise WidthOverflowError(spec.name, value, spec.width)


@dataclass(frozen=True)
class Header:
    """A point in the header space: one value per canonical field."""

    values: tuple[int, ...]

    def __post_init__(self):
        _check_values(self.values, "header")

    def field(self, field: int | str) -> int:
        return self.values[field_index(field)]

    @classmethod
    def from_fields(cls, **fields: int) -> Header:
        """Build a header from named fields; omitted fields are 0."""
        values = [0] * FIELD_COUNT
        for name, value in fields.items():
            values[field_index(name)] = value
        return cls(tuple(values))


@dataclass(frozen=True)
class HeaderDelta:
    """A per-field translation amount, interpreted modulo 2**width."""

    deltas: tuple[int, ...]

    def __post_init__(self):
        _check_values(self.deltas, "delta")

    @classmethod
    def zero(cls) -> HeaderDelta:
        return cls((0,) * FIELD_COUNT)

    @classmethod
    def single(cls, field: int | str, delta: int) -> HeaderDelta:
        """A delta touching one field only; reduced into the field's range."""
        i = field_index(field)
        deltas = [0] * FIELD_COUNT
        deltas[i] = delta & FIELD_MASKS[i]
        return cls(tuple(deltas))

    def negated(self) -> HeaderDelta:
        """The inverse translation: translating by d then d.negated() is a no-op."""
        return HeaderDelta(_kernels.negate(self.deltas, FIELD_MASKS))


def make_header(values) -> Header:
    """Validate a 12-tuple of field values into a Header."""
    return Header(tuple(values))


def field_delta(old: int, new: int, width: int) -> int:
    """Translation amount taking `old` to `new` in a width-bit field."""
    if not 1 <= width <= 64:
        raise ValueError(f"width must be in [1, 64], got {width}")
    bound = 1 << width
    if not 0 <= old < bound:
        raise WidthOverflowError("old", old, width)
    if not 0 <= new < bound:
        raise WidthOverflowError("new", new, width)
    return (new - old) % bound


def translate_header(h: Header, d: HeaderDelta) -> Header:
    """Translate every field of h by d, each modulo its own width."""
    return Header(_kernels.translate(h.values, d.deltas, FIELD_MASKS))


def combine_deltas(d1: HeaderDelta, d2: HeaderDelta) -> HeaderDelta:
    """The single delta equivalent to translating by d1 and then d2."""
    return HeaderDelta(_kernels.translate(d1.deltas, d2.deltas, FIELD_MASKS))


@dataclass(frozen=True)
class MatchPattern:
    """Per-field match: an exact value or None for wildcard."""

    entries: tuple[int | None, ...]

    def __post_init__(self):
        if len(self.entries) != FIELD_COUNT:
            raise ArityMismatchError(
                f"pattern needs {FIELD_COUNT} entries, got {len(self.entries)}"
            )
        for spec, entry in zip(FIELDS, self.entries):
            if entry is not None and not 0 <= entry < (1 << spec.width):
                raise WidthOverflowError(spec.name, entry, spec.width)

    @classmethod
    def wildcard(cls) -> MatchPattern:
        return cls((None,) * FIELD_COUNT)

    @classmethod
    def from_fields(cls, **fields: int) -> MatchPattern:
        """Exact matches on the named fields; omitted fields are wildcards."""
        entries: list[int | None] = [None] * FIELD_COUNT
        for name, value in fields.items():
            entries[field_index(name)] = value
        return cls(tuple(entries))

    @classmethod
    def exact_for(cls, h: Header) -> MatchPattern:
        """The fully-exact pattern matching only h."""
        return cls(h.values)


def matches(p: MatchPattern, h: Header) -> bool:
    """True iff every exact entry of p equals the corresponding field of h."""
    return all(e is None or e == v for e, v in zip(p.entries, h.values))


def src_of(h: Header) -> int:
    """The network-source field (the statistic key for per-source flow counts)."""
    return h.values[NW_SRC]


def dest_of(h: Header) -> int:
    """The network-destination field (the statistic key for per-server load)."""
    return h.values[NW_DST]


def pattern_key(p: MatchPattern) -> tuple:
    """Total-order key: exact entries sort before wildcards."""
    return tuple((0, e) if e is not None else (1, 0) for e in p.entries)
