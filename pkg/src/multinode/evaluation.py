"""Ranking metrics over labeled scores, parameter sweeps and feature export.

Scores follow the s-score convention by default: *low* means suspected
multi-node (positive class), so ``positive_is_low=True`` everywhere.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .centrality import FEATURES
from .scoring import ScoreParams, ScoreRecord, score_many, with_alpha


@dataclass(frozen=True)
class LabeledScore:
    node_id: str
    score: float
    label: int


def join_labels(scores: Mapping, labels: Iterable) -> list[LabeledScore]:
    """Pair ``{node: score}`` with label records; unlabeled or unscored nodes drop out."""
    out = []
    for rec in labels:
        if rec.node_id in scores:
            out.append(LabeledScore(rec.node_id, float(scores[rec.node_id]), int(rec.label)))
    return out


def _split(ls: Sequence[LabeledScore], positive_is_low: bool):
    scores = np.array([x.score for x in ls], dtype=float)
    labels = np.array([x.label for x in ls], dtype=int)
    if not positive_is_low:
        scores = -scores
    return scores, labels


def auc(ls: Sequence[LabeledScore], positive_is_low: bool = True) -> float:
    """P(positive ranks before negative) + 0.5 P(tie), from average ranks."""
    scores, labels = _split(ls, positive_is_low)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative")
    # rank negatives among all; count positives scored strictly lower
    ranks = rankdata(scores)
    neg_rank_sum = ranks[labels == 0].sum()
    u = neg_rank_sum - n_neg * (n_neg + 1) / 2.0
    return float(u / (n_pos * n_neg))


def roc_points(ls: Sequence[LabeledScore], positive_is_low: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """(FPR, TPR) from sweeping every distinct score as a threshold."""
    scores, labels = _split(ls, positive_is_low)
    n_pos = labels.sum()
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs at least one positive and one negative")
    fpr, tpr = [0.0], [0.0]
    for t in np.unique(scores):
        pred = scores <= t
        tpr.append(float((pred & (labels == 1)).sum() / n_pos))
        fpr.append(float((pred & (labels == 0)).sum() / n_neg))
    return np.array(fpr), np.array(tpr)


def roc_auc_trapezoid(ls: Sequence[LabeledScore], positive_is_low: bool = True) -> float:
    fpr, tpr = roc_points(ls, positive_is_low)
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def ranking(ls: Sequence[LabeledScore], positive_is_low: bool = True) -> list[LabeledScore]:
    """Most suspicious first; ties broken by node id."""
    sign = 1.0 if positive_is_low else -1.0
    return sorted(ls, key=lambda x: (sign * x.score, x.node_id))


def top_count(n: int, fraction: float) -> int:
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    # tolerance keeps 0.1 * 70 from rounding up to 8
    return max(1, math.ceil(fraction * n - 1e-9))


def precision_at(ls: Sequence[LabeledScore], fraction: float, positive_is_low: bool = True) -> float:
    if not ls:
        raise ValueError("precision_at needs at least one item")
    top = ranking(ls, positive_is_low)[: top_count(len(ls), fraction)]
    return sum(x.label for x in top) / len(top)


def accuracy(ls: Sequence[LabeledScore], threshold: float, positive_is_low: bool = True) -> float:
    """Fraction correct when ``score < threshold`` (or ``>`` if high is positive) predicts positive."""
    if not ls:
        raise ValueError("accuracy needs at least one item")
    correct = 0
    for x in ls:
        pred = x.score < threshold if positive_is_low else x.score > threshold
        correct += int(pred == bool(x.label))
    return correct / len(ls)


def class_ratio_auc(ls: Sequence[LabeledScore], positive_fraction: float, repeats: int = 10,
                    seed: int = 0, positive_is_low: bool = True) -> float:
    """Mean AUC after keeping a random ``positive_fraction`` of the positives.

    Negatives are always kept in full.
    """
    rng = np.random.default_rng(seed)
    pos = [x for x in ls if x.label == 1]
    neg = [x for x in ls if x.label == 0]
    keep = max(1, round(positive_fraction * len(pos)))
    vals = []
    for _ in range(repeats):
        idx = rng.choice(len(pos), size=keep, replace=False)
        vals.append(auc([pos[i] for i in sorted(idx)] + neg, positive_is_low))
    return float(np.mean(vals))


def sweep(g, nodes: Iterable, labels: Iterable, taus: Sequence[float], alphas: Sequence[float],
          base: ScoreParams | None = None, workers: int = 1) -> list[tuple[float, float, float]]:
    """AUC for every (tau, alpha) grid point.

    Clustering and both component scores depend on tau only, so each tau
    is scored once and alpha is applied to the stored component scores.
    """
    base = base or ScoreParams()
    labels = list(labels)
    nodes = list(nodes)
    rows = []
    for tau in taus:
        params = ScoreParams(alpha=base.alpha, tau=tau, laplace_eps=base.laplace_eps,
                             smoothing_window=base.smoothing_window, mcl=base.mcl)
        records, _ = score_many(g, nodes, params, workers=workers)
        for alpha in alphas:
            scores = {r.node_id: with_alpha(r, alpha).s_score for r in records}
            rows.append((float(tau), float(alpha), auc(join_labels(scores, labels))))
    return rows


def fmt_float(x: float) -> str:
    return f"{x:.6g}"


def write_sweep(rows: Iterable, stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["tau", "alpha", "auc"])
    for tau, alpha, a in rows:
        w.writerow([fmt_float(tau), fmt_float(alpha), fmt_float(a)])


FEATURE_COLUMNS = ("node_id", "nc_score", "tm_score", "k") + FEATURES


def export_features(records: Iterable[ScoreRecord], stream: IO[str],
                    labels: Mapping | None = None) -> None:
    """Write the feature matrix as CSV; a ``label`` column is added when labels are given."""
    header = list(FEATURE_COLUMNS) + (["label"] if labels is not None else [])
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for r in records:
        cent = r.centrality if r.centrality is not None else (float("nan"),) * 4
        row = [r.node_id, fmt_float(r.nc_score), fmt_float(r.tm_score), str(r.k)]
        row += [fmt_float(c) for c in cent]
        if labels is not None:
            lab = labels.get(r.node_id)
            row.append("" if lab is None else str(int(lab)))
        w.writerow(row)


def read_features(stream: IO[str]) -> list[dict]:
    out = []
    for row in csv.DictReader(stream):
        rec = {"node_id": row["node_id"], "k": int(row["k"])}
        for col in ("nc_score", "tm_score") + FEATURES:
            rec[col] = float(row[col])
        if "label" in row:
            rec["label"] = int(row["label"]) if row["label"] else None
        out.append(rec)
    return out


RANK_COLUMNS = ("node_id", "s_score", "nc_score", "tm_score", "k", "converged")


def write_ranking(records: Iterable[ScoreRecord], stream: IO[str]) -> None:
    """Ascending s-score (most suspicious first), ties by node id."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(RANK_COLUMNS)
    for r in sorted(records, key=lambda r: (r.s_score, r.node_id)):
        w.writerow([r.node_id, fmt_float(r.s_score), fmt_float(r.nc_score),
                    fmt_float(r.tm_score), r.k, int(r.converged)])


def read_scores(stream: IO[str], column: str = "s_score") -> dict:
    reader = csv.DictReader(stream)
    if reader.fieldnames is None or "node_id" not in reader.fieldnames or column not in reader.fieldnames:
        raise ValueError(f"score file needs node_id and {column} columns")
    return {row["node_id"]: float(row[column]) for row in reader}
