"""The network information base.

The NIB aggregates what a control application needs: a static topology,
one flow table per switch, and the observed active flows.  Flows feed
the two statistics the bundled applications use: the per-source flow
count (anomaly detection) and the per-server load (balancing).  A
flow's effective destination is the server assigned by the balancer
when present, else its header destination; without that, load would
only ever count the virtual address.

All values are immutable; transformations return new NIBs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from flowspace.errors import DimensionMismatchError
from flowspace.headers import Header, dest_of, src_of
from flowspace.tables import FlowTable


@dataclass(frozen=True)
class Topology:
    """A fixed set of switches, named ports, and server-port bindings."""

    switch_count: int
    ports: dict[str, int] = field(default_factory=dict)
    server_ports: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.switch_count < 1:
            raise ValueError("topology needs at least one switch")
        object.__setattr__(self, "ports", dict(self.ports))
        object.__setattr__(self, "server_ports", dict(self.server_ports))


@dataclass(frozen=True)
class Flow:
    """An observed flow; assigned_dest is the balancer's server choice."""

    header: Header
    assigned_dest: int | None = None

    def effective_dest(self) -> int:
        return self.assigned_dest if self.assigned_dest is not None else dest_of(self.header)


@dataclass(frozen=True)
class NIB:
    topology: Topology
    tables: tuple[FlowTable, ...]
    flows: tuple[Flow, ...] = ()

    def __post_init__(self):
        if len(self.tables) != self.topology.switch_count:
            raise DimensionMismatchError(
                f"{len(self.tables)} tables for {self.topology.switch_count} switches"
            )


def empty_nib(topology: Topology) -> NIB:
    return NIB(topology, tuple(FlowTable() for _ in range(topology.switch_count)))


def nib_vector(nib: NIB) -> tuple:
    """The homogeneous table vector: the tables plus a trailing unit slot."""
    return nib.tables + (1,)


def nib_from_vector(topology: Topology, vector: tuple, flows: tuple[Flow, ...] = ()) -> NIB:
    """Inverse of nib_vector (the unit slot is checked and stripped)."""
    if not vector or vector[-1] != 1:
        raise ValueError("homogeneous vector must end in 1")
    return NIB(topology, tuple(vector[:-1]), flows)


def count_by_src(nib: NIB, h: Header) -> int:
    """Number of observed flows sharing h's source field."""
    want = src_of(h)
    return sum(1 for f in nib.flows if src_of(f.header) == want)


def count_by_dest(nib: NIB, server: int) -> int:
    """Number of observed flows whose effective destination is `server`."""
    return sum(1 for f in nib.flows if f.effective_dest() == server)


def record_flow(nib: NIB, f: Flow) -> NIB:
    return NIB(nib.topology, nib.tables, nib.flows + (f,))


def effective_dest_of_header(nib: NIB, h: Header) -> int:
    """Destination used to resolve per-destination ports for header h.

    If h is an observed flow with a balancer assignment, the assignment
    wins; otherwise the header's own destination field.
    """
    for f in nib.flows:
        if f.header == h and f.assigned_dest is not None:
            return f.assigned_dest
    return dest_of(h)
