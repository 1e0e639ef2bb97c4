"""Purity scoring of a single node.

A node's neighbors are clustered with the node itself removed.  Two
numbers come out of the clustering:

* the normalized-cut score, averaged over clusters (low = neighbors split
  into well separated groups, which is what a merged reference looks like);
* the temporal-mobility score, the weighted mean symmetric KL divergence
  between the clusters' activity-over-time distributions (high = the
  groups were active in different eras, which points to one person who
  moved rather than several people).

The final s-score is ``nc_score + alpha * tm_score``; small values are
suspicious.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .graph import DEFAULT_TAU, EgoNetwork, TemporalGraph, UnscorableError, ego_network
from .mcl import Clustering, MclParams, cluster_assignment, cluster_neighbors

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScoreParams:
    alpha: float = 0.1
    tau: float = DEFAULT_TAU
    laplace_eps: float = 0.01
    smoothing_window: int = 3
    mcl: MclParams = field(default_factory=MclParams)

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not self.laplace_eps > 0:
            raise ValueError("laplace_eps must be positive")
        w = self.smoothing_window
        if int(w) != w or w < 1 or w % 2 == 0:
            raise ValueError(f"smoothing_window must be an odd positive integer, got {w}")


@dataclass(frozen=True)
class NcResult:
    nc_raw: float
    nc_score: float
    per_cluster: tuple  # (internal weight, cut weight) per cluster
    k: int


@dataclass(frozen=True)
class ActivityProfile:
    cluster_index: int
    t_min: int
    raw: np.ndarray
    smoothed: np.ndarray
    dist: np.ndarray
    event_mass: float


@dataclass(frozen=True)
class ScoreRecord:
    node_id: object
    nc_score: float
    tm_score: float
    s_score: float
    k: int
    converged: bool = True
    centrality: tuple | None = None
    alpha: float = 0.1

    def as_dict(self) -> dict:
        d = {
            "node_id": self.node_id,
            "nc_score": self.nc_score,
            "tm_score": self.tm_score,
            "s_score": self.s_score,
            "k": self.k,
            "converged": self.converged,
            "alpha": self.alpha,
        }
        if self.centrality is not None:
            d["centrality"] = dict(zip(("degree", "betweenness", "closeness", "eigenvector"),
                                       self.centrality))
        return d


def nc_score(ego_net: EgoNetwork, clustering: Clustering) -> NcResult:
    """Normalized cut over the clusters, ego edges excluded, divided by k.

    A single cluster scores 1 (no evidence of a split).  A cluster with no
    incident weight at all contributes 0.
    """
    k = clustering.k
    internal = [0.0] * k
    cut = [0.0] * k
    for (v, w), x in ego_net.alter_edges().items():
        i = cluster_assignment(clustering, v)
        j = cluster_assignment(clustering, w)
        if i == j:
            internal[i] += x
        else:
            cut[i] += x
            cut[j] += x
    terms = [c / (a + c) if a + c > 0 else 0.0 for a, c in zip(internal, cut)]
    nc = math.fsum(terms)
    score = 1.0 if k == 1 else nc / k
    return NcResult(nc_raw=nc, nc_score=score, per_cluster=tuple(zip(internal, cut)), k=k)


def moving_average(x: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average; the window shrinks at both ends."""
    x = np.asarray(x, dtype=float)
    h = window // 2
    c = np.concatenate(([0.0], np.cumsum(x)))
    n = len(x)
    lo = np.maximum(np.arange(n) - h, 0)
    hi = np.minimum(np.arange(n) + h + 1, n)
    return (c[hi] - c[lo]) / (hi - lo)


def to_distribution(smoothed: np.ndarray, laplace_eps: float) -> np.ndarray:
    """Normalize, replace zero entries with ``laplace_eps``, renormalize."""
    s = np.asarray(smoothed, dtype=float)
    total = s.sum()
    p = s / total if total > 0 else np.full(len(s), 1.0 / len(s))
    p = np.where(p == 0, laplace_eps, p)
    return p / p.sum()


def activity_profiles(g: TemporalGraph, u, clustering: Clustering, window: int = 3,
                      laplace_eps: float = 0.01) -> list[ActivityProfile]:
    events = g.events_of(u)
    if not events:
        raise UnscorableError(u, "no events")
    t_min = min(ev.time for ev in events)
    t_max = max(ev.time for ev in events)
    raw = np.zeros((clustering.k, t_max - t_min + 1))
    for ev in events:
        others = [p for p in ev.participants if p != u]
        if not others:
            continue
        share = 1.0 / len(others)
        col = ev.time - t_min
        for p in others:
            if p not in clustering:
                raise ValueError(f"co-participant {p!r} of {u!r} is not in any cluster")
            raw[cluster_assignment(clustering, p), col] += share
    out = []
    for i in range(clustering.k):
        sm = moving_average(raw[i], window)
        out.append(ActivityProfile(
            cluster_index=i,
            t_min=t_min,
            raw=raw[i],
            smoothed=sm,
            dist=to_distribution(sm, laplace_eps),
            event_mass=float(raw[i].sum()),
        ))
    return out


def symmetric_kl(p, q) -> float:
    """D(p||q) + D(q||p), natural log."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    if (p <= 0).any() or (q <= 0).any():
        raise ValueError("distributions must be strictly positive")
    return float(np.sum((p - q) * (np.log(p) - np.log(q))))


def tm_score(profiles: Sequence[ActivityProfile], k: int | None = None) -> float:
    k = len(profiles) if k is None else k
    if k < 2:
        return 0.0
    num = 0.0
    den = 0.0
    for i in range(len(profiles)):
        for j in range(i + 1, len(profiles)):
            w = profiles[i].event_mass + profiles[j].event_mass
            num += w * symmetric_kl(profiles[i].dist, profiles[j].dist)
            den += w
    if den == 0:
        return 0.0
    return num / (k * den)


def s_score(nc: float, tm: float, alpha: float) -> float:
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    return nc + alpha * tm


def score_node(g: TemporalGraph, u, params: ScoreParams | None = None,
               with_centrality: bool = False) -> ScoreRecord:
    """Score one node: ego network, MCL, NC-score, activity profiles, TM-score."""
    params = params or ScoreParams()
    ego = ego_network(g, u, params.tau)
    clustering = cluster_neighbors(ego, params.mcl)
    nc = nc_score(ego, clustering)
    profiles = activity_profiles(g, u, clustering, params.smoothing_window, params.laplace_eps)
    tm = tm_score(profiles, clustering.k)
    cent = None
    if with_centrality:
        from .centrality import centrality_scores
        cent = centrality_scores(ego).as_tuple()
    return ScoreRecord(
        node_id=u,
        nc_score=nc.nc_score,
        tm_score=tm,
        s_score=s_score(nc.nc_score, tm, params.alpha),
        k=clustering.k,
        converged=clustering.converged,
        centrality=cent,
        alpha=params.alpha,
    )


def with_alpha(rec: ScoreRecord, alpha: float) -> ScoreRecord:
    return replace(rec, alpha=alpha, s_score=s_score(rec.nc_score, rec.tm_score, alpha))


# worker-pool plumbing: the graph is shipped once per worker
_WORKER_GRAPH = None


def _init_worker(g):
    global _WORKER_GRAPH
    _WORKER_GRAPH = g


def _score_one(g, u, params, with_centrality):
    try:
        return score_node(g, u, params, with_centrality), None
    except UnscorableError as exc:
        return None, (u, exc.reason)


def _score_in_worker(args):
    return _score_one(_WORKER_GRAPH, *args)


def default_workers() -> int:
    env = os.environ.get("MULTINODE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def score_many(g: TemporalGraph, nodes: Iterable, params: ScoreParams | None = None,
               with_centrality: bool = False, workers: int = 1):
    """Score many nodes; returns (records sorted by node id, skipped [(node, reason)])."""
    params = params or ScoreParams()
    nodes = sorted(set(nodes))
    jobs = [(u, params, with_centrality) for u in nodes]
    if workers <= 1 or len(nodes) < 2:
        results = [_score_one(g, *j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(g,)) as pool:
            results = list(pool.map(_score_in_worker, jobs, chunksize=8))
    records = [r for r, _ in results if r is not None]
    skipped = [s for _, s in results if s is not None]
    for u, reason in skipped:
        log.info("skipping %r: %s", u, reason)
    return records, skipped
