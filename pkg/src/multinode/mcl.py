"""Markov Clustering of an ego's neighbors (ego removed).

Sparse implementation: expansion by matrix power, inflation by entrywise
power with column renormalization, then pruning of tiny entries.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .graph import EgoNetwork

log = logging.getLogger(__name__)

ATTRACTOR_EPS = 1e-8
DENSE_FILL = 0.05
SPARSE_FILL = 0.01


@dataclass(frozen=True)
class MclParams:
    inflation: float = 1.4
    expansion: int = 2
    prune_threshold: float = 1e-5
    max_iters: int = 200
    convergence_eps: float = 1e-6

    def __post_init__(self):
        if not self.inflation > 1:
            raise ValueError(f"inflation must be > 1, got {self.inflation}")
        if int(self.expansion) != self.expansion or self.expansion < 2:
            raise ValueError(f"expansion must be an integer >= 2, got {self.expansion}")
        if self.prune_threshold < 0:
            raise ValueError("prune_threshold must be >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class Clustering:
    """A partition of the ego's neighbors.

    Clusters are ordered by their smallest member; members are sorted.
    """

    clusters: tuple
    converged: bool = True
    iterations: int = 0
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for i, c in enumerate(self.clusters):
            for v in c:
                if v in index:
                    raise ValueError(f"node {v!r} appears in more than one cluster")
                index[v] = i
        object.__setattr__(self, "_index", index)

    @property
    def k(self) -> int:
        return len(self.clusters)

    def __contains__(self, node) -> bool:
        return node in self._index

    def nodes(self) -> frozenset:
        return frozenset(self._index)


def cluster_assignment(c: Clustering, node) -> int:
    """Zero-based index of the cluster holding ``node``."""
    try:
        return c._index[node]
    except KeyError:
        raise KeyError(f"node {node!r} is not in the clustering") from None


def _normalize_columns(m: sp.csc_matrix) -> sp.csc_matrix:
    sums = np.asarray(m.sum(axis=0)).ravel()
    sums[sums == 0] = 1.0
    return (m @ sp.diags(1.0 / sums)).tocsc()


def transition_matrix(nodes: list, edges: dict) -> sp.csc_matrix:
    """Column-stochastic matrix with self-loops set to each node's max edge weight."""
    n = len(nodes)
    pos = {v: i for i, v in enumerate(nodes)}
    rows, cols, vals = [], [], []
    loop = np.zeros(n)
    for (v, w), x in edges.items():
        i, j = pos[v], pos[w]
        rows += [i, j]
        cols += [j, i]
        vals += [x, x]
        loop[i] = max(loop[i], x)
        loop[j] = max(loop[j], x)
    # isolated alters keep a unit self-loop so their column is stochastic
    loop[loop == 0] = 1.0
    rows += range(n)
    cols += range(n)
    vals += loop.tolist()
    m = sp.csc_matrix((vals, (rows, cols)), shape=(n, n), dtype=float)
    return _normalize_columns(m)


def _prune(m: sp.csc_matrix, threshold: float) -> sp.csc_matrix:
    if threshold <= 0:
        return m
    m = m.tocsc(copy=True)
    m.data[m.data < threshold] = 0.0
    m.eliminate_zeros()
    return _normalize_columns(m)


def _dense_step(m: np.ndarray, params: MclParams) -> np.ndarray:
    prev = m
    for _ in range(int(params.expansion) - 1):
        m = m @ prev
    np.power(m, params.inflation, out=m)
    m /= m.sum(axis=0, keepdims=True)
    if params.prune_threshold > 0:
        m[m < params.prune_threshold] = 0.0
        sums = m.sum(axis=0, keepdims=True)
        sums[sums == 0] = 1.0
        m /= sums
    return m


def _sparse_step(m: sp.csc_matrix, params: MclParams) -> sp.csc_matrix:
    prev = m
    for _ in range(int(params.expansion) - 1):
        m = (m @ prev).tocsc()
    m = _normalize_columns(m.power(params.inflation))
    return _prune(m, params.prune_threshold)


def run_mcl(m: sp.csc_matrix, params: MclParams) -> tuple[sp.csc_matrix, bool, int]:
    """Iterate expansion/inflation/pruning; returns (matrix, converged, iterations).

    Switches to dense arrays once the matrix fills past ``DENSE_FILL``
    (sparse products are far slower than BLAS there) and back to sparse
    when it thins out again near convergence.
    """
    n = m.shape[0]
    dense = None
    converged = False
    it = 0
    for it in range(1, params.max_iters + 1):
        if dense is None and m.nnz > DENSE_FILL * n * n:
            dense = m.toarray()
        if dense is None:
            prev = m
            m = _sparse_step(m, params)
            delta = abs(m - prev)
            change = delta.max() if delta.nnz else 0.0
        else:
            prev = dense
            dense = _dense_step(dense, params)
            change = np.abs(dense - prev).max()
            if np.count_nonzero(dense) < SPARSE_FILL * n * n:
                m, dense = sp.csc_matrix(dense), None
        if change < params.convergence_eps:
            converged = True
            break
    if dense is not None:
        m = sp.csc_matrix(dense)
    return m, converged, it


def attractor_partition(m: sp.csc_matrix) -> list[list[int]]:
    """Read clusters off a (converged) MCL matrix.

    Attractors have diagonal >= 1e-8.  Attractors linked by nonzero
    entries form one system.  Every node joins the system of the attractor
    holding its largest column entry (ties: smallest attractor index).
    """
    n = m.shape[0]
    diag = m.diagonal()
    attractors = np.flatnonzero(diag >= ATTRACTOR_EPS)
    is_attr = np.zeros(n, dtype=bool)
    is_attr[attractors] = True

    sub = m[attractors][:, attractors]
    _, system_of = connected_components(sub + sub.T, directed=False)
    system = np.full(n, -1)
    system[attractors] = system_of

    labels = np.full(n, -1)
    m = m.tocsc()
    for j in range(n):
        lo, hi = m.indptr[j], m.indptr[j + 1]
        rows = m.indices[lo:hi]
        vals = m.data[lo:hi]
        keep = is_attr[rows]
        if keep.any():
            rows, vals = rows[keep], vals[keep]
            best = vals.max()
            i = rows[vals == best].min()
            labels[j] = system[i]

    groups: dict = {}
    next_label = int(system.max()) + 1 if attractors.size else 0
    for j in range(n):
        if labels[j] < 0:
            # no attractor reached: best-effort singleton
            labels[j] = next_label
            next_label += 1
        groups.setdefault(int(labels[j]), []).append(j)
    return sorted(groups.values(), key=lambda g: g[0])


def cluster_neighbors(ego_net: EgoNetwork, params: MclParams | None = None) -> Clustering:
    params = params or MclParams()
    nodes = list(ego_net.neighbors)
    if not nodes:
        raise ValueError(f"ego {ego_net.ego!r} has no neighbors to cluster")
    if len(nodes) == 1:
        return Clustering(clusters=((nodes[0],),), converged=True, iterations=0)
    m = transition_matrix(nodes, ego_net.alter_edges())
    m, converged, iters = run_mcl(m, params)
    if not converged:
        log.warning("MCL did not converge for ego %r after %d iterations", ego_net.ego, iters)
    parts = attractor_partition(m)
    clusters = tuple(tuple(nodes[i] for i in part) for part in parts)
    return Clustering(clusters=clusters, converged=converged, iterations=iters)
