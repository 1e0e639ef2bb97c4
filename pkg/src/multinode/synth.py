"""Labeled synthetic collaboration graphs.

Three kinds of ego are planted, each with its own fresh collaborators:

pure
    one collaborator community, active over the whole time span;
multi
    several communities (one per merged entity) active over the same span,
    joined only by sparse noise edges (each cross pair with probability
    ``inter_noise``);
mobile
    one entity that switches from one community to another at
    ``mobility_break``; the two communities are active in disjoint eras and
    never co-occur in an event.

Communities are Erdős–Rényi blocks (patched to be connected) realized as
two-person background events.  Ego events draw 1..``max_coauthors``
co-authors from a single community.  Multi-nodes are labeled positive;
pure and mobile egos negative.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .graph import CollabEvent
from .ingest import LabelRecord

PURE, MULTI, MOBILE = "pure", "multi", "mobile"


@dataclass(frozen=True)
class SynthConfig:
    n_pure: int = 25
    n_multi: int = 25
    n_mobile: int = 25
    entities_per_multi: int = 2
    collaborators_per_entity: int = 15
    intra_density: float = 0.3
    inter_noise: float = 0.02
    years: int = 10
    events_per_year: float = 3.0
    mobility_break: int | None = None  # defaults to years // 2
    max_coauthors: int = 3
    start_year: int = 2000
    seed: int = 0

    def __post_init__(self):
        for name in ("n_pure", "n_multi", "n_mobile"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.entities_per_multi < 2:
            raise ValueError("entities_per_multi must be >= 2")
        if self.collaborators_per_entity < 1:
            raise ValueError("collaborators_per_entity must be >= 1")
        if not 0 < self.intra_density <= 1:
            raise ValueError("intra_density must be in (0, 1]")
        if not 0 <= self.inter_noise < 1:
            raise ValueError("inter_noise must be in [0, 1)")
        if self.years < 1:
            raise ValueError("years must be >= 1")
        if self.events_per_year <= 0:
            raise ValueError("events_per_year must be positive")
        if self.max_coauthors < 1:
            raise ValueError("max_coauthors must be >= 1")
        if self.n_mobile and self.years < 2:
            raise ValueError("mobile nodes need at least 2 years")
        if not 0 < self.break_year < self.years:
            raise ValueError(f"mobility_break must be in (0, {self.years})")

    @property
    def break_year(self) -> int:
        return self.years // 2 if self.mobility_break is None else self.mobility_break


@dataclass
class SynthBenchmark:
    events: list
    labels: list
    kinds: dict = field(default_factory=dict)        # ego id -> kind
    communities: dict = field(default_factory=dict)  # ego id -> list of member tuples
    eras: dict = field(default_factory=dict)         # ego id -> list of (first, last) year offsets


class _Builder:
    def __init__(self, cfg: SynthConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.rng = rng
        self.events: list[CollabEvent] = []
        self.next_node = 0

    def node(self) -> str:
        self.next_node += 1
        return f"n{self.next_node:05d}"

    def event(self, offset: int, participants) -> None:
        eid = f"e{len(self.events) + 1:06d}"
        self.events.append(CollabEvent(eid, self.cfg.start_year + int(offset), tuple(participants)))

    def year_in(self, era) -> int:
        return int(self.rng.integers(era[0], era[1] + 1))

    def community(self, era) -> tuple:
        """Fresh connected ER block; background pair events fall inside ``era``."""
        cfg, rng = self.cfg, self.rng
        members = tuple(self.node() for _ in range(cfg.collaborators_per_entity))
        n = len(members)
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < cfg.intra_density:
                    self.event(self.year_in(era), (members[i], members[j]))
                    parent[find(i)] = find(j)
        roots = sorted({find(i) for i in range(n)})
        # chain the components together so a pure community is one block
        for a, b in zip(roots, roots[1:]):
            pa = [i for i in range(n) if find(i) == find(a)]
            pb = [i for i in range(n) if find(i) == find(b)]
            i, j = int(rng.choice(pa)), int(rng.choice(pb))
            self.event(self.year_in(era), (members[i], members[j]))
            parent[find(i)] = find(j)
        return members

    def ego_events(self, ego: str, members: tuple, era) -> None:
        cfg, rng = self.cfg, self.rng
        covered: set = set()
        top = min(cfg.max_coauthors, len(members))
        for offset in range(era[0], era[1] + 1):
            for _ in range(int(rng.poisson(cfg.events_per_year))):
                size = int(rng.integers(1, top + 1))
                picks = rng.choice(len(members), size=size, replace=False)
                coauthors = [members[i] for i in sorted(picks)]
                covered.update(coauthors)
                self.event(offset, (ego, *coauthors))
        for m in members:
            if m not in covered:
                self.event(self.year_in(era), (ego, m))

    def noise(self, communities, span) -> None:
        p = self.cfg.inter_noise
        if p <= 0:
            return
        for a in range(len(communities)):
            for b in range(a + 1, len(communities)):
                for v in communities[a]:
                    for w in communities[b]:
                        if self.rng.random() < p:
                            self.event(self.year_in(span), (v, w))


def _plant(b: _Builder, ego: str, kind: str, bench: SynthBenchmark) -> None:
    cfg = b.cfg
    full = (0, cfg.years - 1)
    if kind == PURE:
        eras = [full]
    elif kind == MULTI:
        eras = [full] * cfg.entities_per_multi
    else:
        eras = [(0, cfg.break_year - 1), (cfg.break_year, cfg.years - 1)]
    comms = []
    for era in eras:
        members = b.community(era)
        b.ego_events(ego, members, era)
        comms.append(members)
    if kind == MULTI:
        b.noise(comms, full)
    bench.kinds[ego] = kind
    bench.communities[ego] = comms
    bench.eras[ego] = eras


def generate_benchmark(cfg: SynthConfig) -> SynthBenchmark:
    rng = np.random.default_rng(cfg.seed)
    b = _Builder(cfg, rng)
    kinds = [PURE] * cfg.n_pure + [MULTI] * cfg.n_multi + [MOBILE] * cfg.n_mobile
    order = rng.permutation(len(kinds))
    # ego ids are assigned before any collaborator so they do not leak the kind
    egos = [b.node() for _ in kinds]
    bench = SynthBenchmark(events=b.events, labels=[])
    for ego, idx in zip(egos, order):
        _plant(b, ego, kinds[idx], bench)
    bench.labels = [LabelRecord(e, int(bench.kinds[e] == MULTI)) for e in sorted(bench.kinds)]
    return bench


def generate(cfg: SynthConfig) -> tuple[list[CollabEvent], list[LabelRecord]]:
    bench = generate_benchmark(cfg)
    return bench.events, bench.labels


def mobility_pair(seed: int, cfg: SynthConfig | None = None) -> tuple[list[CollabEvent], str, str]:
    """A mobile ego and a topology-matched twin whose communities overlap in time.

    The twin is an exact relabeled copy of the mobile ego's neighborhood
    (same events, same participants, same counts) with every event time
    redrawn uniformly over the full span.  Returns ``(events, mobile, twin)``.
    """
    cfg = replace(cfg or SynthConfig(), n_pure=0, n_multi=0, n_mobile=1, seed=seed)
    bench = generate_benchmark(cfg)
    (mobile,) = bench.kinds
    rng = np.random.default_rng([seed, 1])
    rename = {}
    twin_events = []
    for ev in bench.events:
        parts = []
        for p in ev.participants:
            if p not in rename:
                rename[p] = "t" + p
            parts.append(rename[p])
        year = cfg.start_year + int(rng.integers(0, cfg.years))
        twin_events.append(CollabEvent("t" + ev.event_id, year, tuple(parts)))
    return bench.events + twin_events, mobile, rename[mobile]
