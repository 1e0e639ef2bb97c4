"""Ego centrality inside its own ego network, as classifier features.

Each raw centrality of the ego is divided by the sum of that centrality
over every member of the ego network, so values are comparable between
egos of very different size.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path

from .graph import EgoNetwork

log = logging.getLogger(__name__)

FEATURES = ("degree", "betweenness", "closeness", "eigenvector")


@dataclass(frozen=True)
class CentralityVector:
    degree: float
    betweenness: float
    closeness: float
    eigenvector: float
    eigenvector_converged: bool = True

    def as_tuple(self) -> tuple:
        return (self.degree, self.betweenness, self.closeness, self.eigenvector)


def _adjacency(ego_net: EgoNetwork):
    nodes = list(ego_net.members)
    pos = {v: i for i, v in enumerate(nodes)}
    nbrs = [[] for _ in nodes]
    rows, cols, vals = [], [], []
    for (v, w), x in ego_net.weighted_edges.items():
        i, j = pos[v], pos[w]
        nbrs[i].append(j)
        nbrs[j].append(i)
        rows += [i, j]
        cols += [j, i]
        vals += [x, x]
    a = sp.csr_matrix((vals, (rows, cols)), shape=(len(nodes), len(nodes)), dtype=float)
    return nodes, pos, nbrs, a


def brandes_betweenness(nbrs: list[list[int]]) -> np.ndarray:
    """Unweighted betweenness for an undirected graph given as adjacency lists.

    Each unordered source/target pair is counted once.
    """
    n = len(nbrs)
    cb = np.zeros(n)
    for s in range(n):
        stack = []
        preds = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1)
        dist[s] = 0
        q = deque([s])
        while q:
            v = q.popleft()
            stack.append(v)
            dv = dist[v]
            for w in nbrs[v]:
                if dist[w] < 0:
                    dist[w] = dv + 1
                    q.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = np.zeros(n)
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
    return cb / 2.0


def harmonic_closeness(a: sp.csr_matrix) -> np.ndarray:
    d = shortest_path(a, unweighted=True, directed=False)
    with np.errstate(divide="ignore"):
        inv = np.where(np.isfinite(d) & (d > 0), 1.0 / d, 0.0)
    return inv.sum(axis=1)


def eigenvector_power(a: sp.csr_matrix, tol: float = 1e-8, max_iter: int = 1000):
    """Principal eigenvector of ``a`` by power iteration.

    Iterates on ``a + I`` (same eigenvectors) so bipartite egos such as
    stars do not oscillate.  Returns ``(vector or None, converged)``.
    """
    n = a.shape[0]
    m = a + sp.identity(n, format="csr")
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        y = m @ x
        total = y.sum()
        if total <= 0:
            return None, False
        y /= total
        if np.abs(y - x).max() < tol:
            return y, True
        x = y
    return None, False


def _share(values: np.ndarray, i: int) -> float:
    total = values.sum()
    if total <= 0:
        return 0.0
    return float(values[i] / total)


def centrality_scores(ego_net: EgoNetwork) -> CentralityVector:
    nodes, pos, nbrs, a = _adjacency(ego_net)
    u = pos[ego_net.ego]
    strength = np.asarray(a.sum(axis=1)).ravel()
    betweenness = brandes_betweenness(nbrs)
    closeness = harmonic_closeness(a)
    vec, ok = eigenvector_power(a)
    if not ok:
        log.warning("eigenvector centrality did not converge for ego %r", ego_net.ego)
    return CentralityVector(
        degree=_share(strength, u),
        betweenness=_share(betweenness, u),
        closeness=_share(closeness, u),
        eigenvector=_share(vec, u) if ok else 0.0,
        eigenvector_converged=ok,
    )
