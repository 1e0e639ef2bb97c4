"""Time-stamped collaboration graph, ego networks and decay-weighted similarity.

Collaboration events are hyperedges (a publication with several authors, a
meeting with several attendees).  Pairwise edges come from clique
expansion: every pair of co-participants gets one count per event, keyed
by the event's integer time bin.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import Hashable, Iterable, Mapping, Sequence

NodeId = Hashable
Pair = tuple  # canonical (v, w) with v < w

DEFAULT_TAU = 5.0


class GraphError(ValueError):
    """Malformed event data."""


class UnscorableError(ValueError):
    """A node cannot be scored; ``reason`` is a short machine-readable code."""

    def __init__(self, node, reason: str):
        super().__init__(f"unscorable: {reason} (node {node!r})")
        self.node = node
        self.reason = reason


class UnknownNodeError(UnscorableError):
    def __init__(self, node):
        super().__init__(node, "unknown node")


class IsolatedNodeError(UnscorableError):
    def __init__(self, node):
        super().__init__(node, "no neighbors")


@dataclass(frozen=True)
class CollabEvent:
    """One collaboration event: an id, an integer time bin and its participants."""

    event_id: str
    time: int
    participants: tuple

    def __post_init__(self):
        parts = tuple(self.participants)
        if len(set(parts)) != len(parts):
            raise GraphError(f"event {self.event_id!r}: duplicate participant ids")
        object.__setattr__(self, "participants", parts)
        object.__setattr__(self, "time", int(self.time))


def pair_key(v, w) -> Pair:
    return (v, w) if v < w else (w, v)


class TemporalGraph:
    """Immutable collaboration graph built from a list of events.

    ``adjacency[v][w]`` maps time bin -> number of events containing both
    ``v`` and ``w``; it is symmetric by construction.
    """

    def __init__(self, events: Sequence[CollabEvent], adjacency, node_events):
        self._events = tuple(events)
        self._adj = MappingProxyType(
            {v: MappingProxyType({w: MappingProxyType(dict(ts)) for w, ts in nbrs.items()})
             for v, nbrs in adjacency.items()}
        )
        self._node_events = MappingProxyType({v: tuple(ix) for v, ix in node_events.items()})

    def __reduce__(self):
        return (build_graph, (self._events,))

    @property
    def events(self) -> tuple:
        return self._events

    @property
    def nodes(self) -> frozenset:
        return frozenset(self._node_events)

    @property
    def adjacency(self) -> Mapping:
        return self._adj

    def __contains__(self, node) -> bool:
        return node in self._node_events

    def __len__(self) -> int:
        return len(self._node_events)

    def num_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self._adj.values()) // 2

    def neighbors(self, node) -> frozenset:
        if node not in self._node_events:
            raise UnknownNodeError(node)
        return frozenset(self._adj.get(node, ()))

    def edge_events(self, v, w) -> list[tuple[int, int]]:
        """T((v, w)) as ``(count, time)`` pairs, ordered by time."""
        ts = self._adj.get(v, {}).get(w)
        if ts is None:
            return []
        return [(n, t) for t, n in sorted(ts.items())]

    def events_of(self, node) -> list[CollabEvent]:
        if node not in self._node_events:
            raise UnknownNodeError(node)
        return [self._events[i] for i in self._node_events[node]]

    def edges(self) -> Iterable[Pair]:
        for v, nbrs in self._adj.items():
            for w in nbrs:
                if v < w:
                    yield (v, w)


def build_graph(events: Iterable[CollabEvent]) -> TemporalGraph:
    events = list(events)
    seen: set = set()
    adjacency: dict = defaultdict(lambda: defaultdict(lambda: defaultdict(int)))
    node_events: dict = defaultdict(list)
    for i, ev in enumerate(events):
        if ev.event_id in seen:
            raise GraphError(f"duplicate event id {ev.event_id!r}")
        seen.add(ev.event_id)
        parts = ev.participants
        if not parts:
            raise GraphError(f"event {ev.event_id!r} has no participants")
        for a in parts:
            node_events[a].append(i)
        for x in range(len(parts)):
            a = parts[x]
            for y in range(x + 1, len(parts)):
                b = parts[y]
                adjacency[a][b][ev.time] += 1
                adjacency[b][a][ev.time] += 1
    return TemporalGraph(events, adjacency, node_events)


def decay_weight(event_list: Iterable[tuple[int, int]], t_max: int, tau: float) -> float:
    """Sum of ``n * exp(-(t_max - t) / tau)`` over ``(n, t)`` pairs."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    total = 0.0
    for n, t in event_list:
        if t > t_max:
            raise ValueError(f"event time {t} is later than t_max {t_max}")
        total += n * math.exp(-(t_max - t) / tau)
    return total


@dataclass(frozen=True)
class EgoNetwork:
    """Induced, decay-weighted subgraph around ``ego``.

    ``weighted_edges`` is keyed by canonical ``(v, w)`` pairs with ``v < w``.
    """

    ego: NodeId
    members: tuple
    weighted_edges: Mapping
    t_max: int
    tau: float

    @property
    def neighbors(self) -> tuple:
        return tuple(m for m in self.members if m != self.ego)

    def alter_edges(self) -> dict:
        """Edges of the ego network with the ego and its incident edges removed."""
        ego = self.ego
        return {e: w for e, w in self.weighted_edges.items() if ego not in e}

    def weight(self, v, w) -> float:
        return self.weighted_edges.get(pair_key(v, w), 0.0)


def ego_network(g: TemporalGraph, u, tau: float = DEFAULT_TAU) -> EgoNetwork:
    if u not in g:
        raise UnknownNodeError(u)
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    nbrs = g.adjacency.get(u, {})
    if not nbrs:
        raise IsolatedNodeError(u)
    members = set(nbrs)
    members.add(u)

    raw: dict = {}
    t_max = None
    for v in members:
        for w, ts in g.adjacency[v].items():
            if w in members and v < w:
                raw[(v, w)] = ts
                latest = max(ts)
                if t_max is None or latest > t_max:
                    t_max = latest

    weights = {}
    for e, ts in raw.items():
        weights[e] = decay_weight(((n, t) for t, n in ts.items()), t_max, tau)
    return EgoNetwork(
        ego=u,
        members=tuple(sorted(members)),
        weighted_edges=MappingProxyType(weights),
        t_max=t_max,
        tau=float(tau),
    )
