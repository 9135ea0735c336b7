"""Network-wide wavelength occupancy with First-Fit assignment.

Slots are numbered 1..W and occupancy is tracked per undirected fiber: a
tree holding slot w on edge {u, v} blocks w in both directions.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable

from .lightforest import LightForest, LightTree
from .topology import Edge, Topology


@dataclass
class WavelengthState:
    g: Topology
    W: int = 20
    # edge -> slot -> (session id, tree serial)
    occupancy: dict[Edge, dict[int, tuple[int, int]]] = field(default_factory=dict)
    accepted: int = 0
    # (forest, slots) for every committed admission, in order
    admitted: list = field(default_factory=list)

    def __post_init__(self):
        if self.W < 1:
            raise ValueError("W must be a positive integer")

    def used(self, edge: Edge) -> set[int]:
        return set(self.occupancy.get(edge, ()))

    def is_free(self, edge: Edge, slot: int) -> bool:
        return slot not in self.occupancy.get(edge, ())

    def used_slots(self) -> int:
        return sum(len(slots) for slots in self.occupancy.values())

    def claim(self, edge: Edge, slot: int, session_id: int, serial: int) -> None:
        if not self.g.has_edge(*edge):
            raise KeyError(f"edge {edge} not in topology")
        if not 1 <= slot <= self.W:
            raise ValueError(f"slot {slot} outside 1..{self.W}")
        slots = self.occupancy.setdefault(edge, {})
        if slot in slots:
            raise ValueError(f"slot {slot} on {edge} already held by {slots[slot]}")
        slots[slot] = (session_id, serial)

    def rows(self) -> list[tuple[int, int, int, int, int]]:
        return sorted(
            (u, v, slot, sid, serial)
            for (u, v), slots in self.occupancy.items()
            for slot, (sid, serial) in slots.items()
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["edge_u", "edge_v", "slot", "session_id", "tree_serial"])
        writer.writerows(self.rows())
        return buf.getvalue()


@dataclass(frozen=True)
class AdmissionResult:
    accepted: bool
    assignments: tuple[int, ...] = ()
    reason: str = ""


def first_fit_assign(
    state: WavelengthState,
    tree: LightTree,
    also_blocked: Iterable[tuple[Edge, int]] = (),
) -> int | None:
    """Lowest slot free on every tree edge and not listed in ``also_blocked``."""
    blocked = set(also_blocked)
    for slot in range(1, state.W + 1):
        if all(state.is_free(e, slot) and (e, slot) not in blocked for e in tree.edges):
            return slot
    return None


def admit_session(state: WavelengthState, forest: LightForest) -> AdmissionResult:
    """All-or-nothing admission of a forest; trees are assigned in order.

    Trees of the same session must differ in wavelength only where they
    share a fiber. On rejection the state is left untouched.
    """
    claimed: set[tuple[Edge, int]] = set()
    slots = []
    for tree in forest.trees:
        slot = first_fit_assign(state, tree, claimed)
        if slot is None:
            return AdmissionResult(
                False, (), f"no free wavelength for tree {tree.serial} of session {forest.session.id}"
            )
        slots.append(slot)
        claimed.update((e, slot) for e in tree.edges)
    for tree, slot in zip(forest.trees, slots):
        for e in tree.edges:
            state.claim(e, slot, forest.session.id, tree.serial)
    state.accepted += 1
    state.admitted.append((forest, tuple(slots)))
    return AdmissionResult(True, tuple(slots))


def wavelength_efficiency(state: WavelengthState, g: Topology | None = None) -> float:
    g = g or state.g
    return state.used_slots() / (g.M * state.W)
