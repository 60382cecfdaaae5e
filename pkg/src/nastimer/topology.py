"""Constellation snapshots and path construction.

A snapshot is a static picture of the network graph: nodes carry a load
profile, links carry either an explicit propagation delay or a distance in
kilometres (converted at the vacuum speed of light).  Paths handed to the
timer model are minimum-propagation-delay routes; where the network function
sits (ground, on-orbit, higher orbit) is expressed purely by graph position.

Snapshots are immutable after load; everything here is read-only and safe to
call concurrently.
"""

from __future__ import annotations

import enum
import heapq
import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .timer_model import LIGHT_SPEED_KM_PER_S, NodeLoadProfile, PathSpec


class SnapshotFormatError(ValueError):
    """A snapshot document does not follow the documented schema."""


class DisconnectedPathError(ValueError):
    """No route exists between the requested endpoints."""


class NodeRole(enum.Enum):
    UE = "ue"
    LEO_SATELLITE = "leo_satellite"
    SPACE_GATEWAY = "space_gateway"
    GROUND_GATEWAY = "ground_gateway"
    CORE_NF = "core_nf"


@dataclass(frozen=True)
class NetworkNode:
    id: str
    role: NodeRole
    load: NodeLoadProfile


@dataclass(frozen=True)
class NetworkLink:
    """Undirected link with a symmetric propagation delay.

    Exactly one of ``delay_s`` / ``distance_km`` is given; the other stays None.
    """

    a: str
    b: str
    delay_s: float | None = None
    distance_km: float | None = None

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"link endpoints must differ, got {self.a!r} twice")
        if (self.delay_s is None) == (self.distance_km is None):
            raise ValueError("exactly one of delay_s / distance_km is required")
        if self.delay_s is not None and not self.delay_s > 0.0:
            raise ValueError(f"link delay must be > 0, got {self.delay_s}")
        if self.distance_km is not None and not self.distance_km > 0.0:
            raise ValueError(f"link distance must be > 0, got {self.distance_km}")

    @property
    def propagation_delay(self) -> float:
        if self.delay_s is not None:
            return self.delay_s
        return prop_delay_from_distance(self.distance_km)


class ConstellationSnapshot:
    """Immutable node/link sets at one instant of the scenario."""

    def __init__(self, nodes: Iterable[NetworkNode], links: Iterable[NetworkLink],
                 timestamp: float = 0.0):
        node_map: dict[str, NetworkNode] = {}
        for node in nodes:
            if node.id in node_map:
                raise ValueError(f"duplicate node id {node.id!r}")
            node_map[node.id] = node
        links = tuple(links)
        for link in links:
            for end in (link.a, link.b):
                if end not in node_map:
                    raise ValueError(f"link references unknown node {end!r}")
        self._nodes = node_map
        self._links = links
        self.timestamp = float(timestamp)
        adjacency: dict[str, list[tuple[str, float]]] = {nid: [] for nid in node_map}
        for link in links:
            delay = link.propagation_delay
            adjacency[link.a].append((link.b, delay))
            adjacency[link.b].append((link.a, delay))
        for neighbours in adjacency.values():
            neighbours.sort()
        self._adjacency = adjacency

    @property
    def nodes(self) -> dict[str, NetworkNode]:
        return dict(self._nodes)

    @property
    def links(self) -> tuple[NetworkLink, ...]:
        return self._links

    def node(self, node_id: str) -> NetworkNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise KeyError(f"unknown node id {node_id!r}") from None

    def neighbours(self, node_id: str) -> list[tuple[str, float]]:
        return list(self._adjacency[node_id])


def prop_delay_from_distance(distance_km: float) -> float:
    """Free-space propagation delay in seconds for a distance in kilometres."""
    if not distance_km > 0.0:
        raise ValueError(f"distance must be > 0 km, got {distance_km}")
    return distance_km / LIGHT_SPEED_KM_PER_S


def build_path(snapshot: ConstellationSnapshot, origin: str,
               responder: str) -> PathSpec:
    """Minimum-total-propagation-delay route between two nodes as a PathSpec.

    Dijkstra over link delays; ties between equal-delay routes break towards
    the lexicographically smaller node-id sequence, so output is deterministic.
    """
    snapshot.node(origin)
    snapshot.node(responder)
    if origin == responder:
        raise ValueError("origin and responder must differ")

    # Heap entries carry the full id sequence: comparing (delay, ids) gives
    # the lexicographic tie-break directly.
    heap: list[tuple[float, tuple[str, ...]]] = [(0.0, (origin,))]
    done: set[str] = set()
    while heap:
        delay, ids = heapq.heappop(heap)
        tail = ids[-1]
        if tail in done:
            continue
        if tail == responder:
            profiles = [snapshot.node(nid).load for nid in ids]
            link_delays = []
            for a, b in zip(ids, ids[1:]):
                link_delays.append(min(d for nid, d in snapshot.neighbours(a)
                                       if nid == b))
            return PathSpec(profiles, link_delays, labels=ids)
        done.add(tail)
        for neighbour, link_delay in snapshot.neighbours(tail):
            if neighbour not in done:
                heapq.heappush(heap, (delay + link_delay, ids + (neighbour,)))
    raise DisconnectedPathError(f"no route from {origin!r} to {responder!r}")


def synth_path(n_hops: int, link_delay: float, hop_profile: NodeLoadProfile,
               origin: NodeLoadProfile, responder: NodeLoadProfile) -> PathSpec:
    """Uniform chain of ``n_hops`` links with ``n_hops - 1`` identical relays."""
    if n_hops < 1:
        raise ValueError("n_hops must be >= 1")
    n_nodes = n_hops + 1

    def column(field: str) -> np.ndarray:
        col = np.full(n_nodes, getattr(hop_profile, field), dtype=np.float64)
        col[0] = getattr(origin, field)
        col[-1] = getattr(responder, field)
        return col

    return PathSpec.from_arrays(
        column("service_rate"), column("steady_arrival"),
        column("total_arrival"), column("burst_window"),
        np.full(n_hops, link_delay, dtype=np.float64))


# Snapshot document schema.  Keys beginning with "_" are free-form
# annotations and are ignored everywhere; any other unknown key is refused.
_TOP_REQUIRED = {"nodes", "links"}
_TOP_OPTIONAL = {"timestamp"}
_NODE_REQUIRED = {"id", "role", "service_rate"}
_NODE_OPTIONAL = {"steady_arrival", "total_arrival", "burst_window"}
_LINK_REQUIRED = {"a", "b"}
_LINK_OPTIONAL = {"delay_s", "distance_km"}


def _check_keys(obj: dict, required: set[str], optional: set[str], where: str):
    keys = {k for k in obj if not k.startswith("_")}
    missing = required - keys
    if missing:
        raise SnapshotFormatError(f"{where}: missing required field(s) {sorted(missing)}")
    unknown = keys - required - optional
    if unknown:
        raise SnapshotFormatError(f"{where}: unknown field(s) {sorted(unknown)}")


def snapshot_from_dict(doc: dict) -> ConstellationSnapshot:
    if not isinstance(doc, dict):
        raise SnapshotFormatError("snapshot document must be a JSON object")
    _check_keys(doc, _TOP_REQUIRED, _TOP_OPTIONAL, "snapshot")
    nodes = []
    for i, entry in enumerate(doc["nodes"]):
        where = f"nodes[{i}]"
        if not isinstance(entry, dict):
            raise SnapshotFormatError(f"{where}: must be an object")
        _check_keys(entry, _NODE_REQUIRED, _NODE_OPTIONAL, where)
        try:
            role = NodeRole(entry["role"])
        except ValueError:
            raise SnapshotFormatError(
                f"{where}: unknown role {entry['role']!r}; expected one of "
                f"{[r.value for r in NodeRole]}") from None
        try:
            load = NodeLoadProfile(
                service_rate=float(entry["service_rate"]),
                steady_arrival=float(entry.get("steady_arrival", 0.0)),
                total_arrival=(float(entry["total_arrival"])
                               if "total_arrival" in entry else None),
                burst_window=float(entry.get("burst_window", 0.0)),
            )
        except ValueError as exc:
            raise SnapshotFormatError(f"{where}: {exc}") from None
        nodes.append(NetworkNode(id=str(entry["id"]), role=role, load=load))
    links = []
    for i, entry in enumerate(doc["links"]):
        where = f"links[{i}]"
        if not isinstance(entry, dict):
            raise SnapshotFormatError(f"{where}: must be an object")
        _check_keys(entry, _LINK_REQUIRED, _LINK_OPTIONAL, where)
        try:
            links.append(NetworkLink(
                a=str(entry["a"]), b=str(entry["b"]),
                delay_s=(float(entry["delay_s"]) if "delay_s" in entry else None),
                distance_km=(float(entry["distance_km"])
                             if "distance_km" in entry else None),
            ))
        except ValueError as exc:
            raise SnapshotFormatError(f"{where}: {exc}") from None
    try:
        return ConstellationSnapshot(nodes, links,
                                     timestamp=float(doc.get("timestamp", 0.0)))
    except ValueError as exc:
        raise SnapshotFormatError(str(exc)) from None


def load_snapshot(path: str) -> ConstellationSnapshot:
    """Read and validate a snapshot JSON document from disk."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SnapshotFormatError(f"{path}: not valid JSON ({exc})") from None
    return snapshot_from_dict(doc)
