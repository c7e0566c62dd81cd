"""Evaluation metrics: confusion counts, sensitivity/specificity/F1, rank AUC.

Thresholding uses >= so a map stuck at exactly 0.5 counts as positive;
this keeps confusion counts reproducible across implementations.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .fields import as_field, as_mask


@dataclass(frozen=True)
class MetricsReport:
    tp: int
    fp: int
    tn: int
    fn: int
    sensitivity: float
    specificity: float
    f1: float
    auc: float


def confusion(p, g, threshold: float = 0.5):
    """Binarize P at the threshold (>=) and count against G: (tp, fp, tn, fn)."""
    p = as_field(p)
    g = as_mask(g)
    if p.shape != g.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {g.shape}")
    pred = p >= threshold
    pos = g == 1.0
    tp = int(np.sum(pred & pos))
    fp = int(np.sum(pred & ~pos))
    fn = int(np.sum(~pred & pos))
    tn = int(np.sum(~pred & ~pos))
    return tp, fp, tn, fn


def rates_from_counts(tp, fp, tn, fn):
    """(sensitivity, specificity, f1); a ratio with empty denominator is 0."""
    sens = tp / (tp + fn) if tp + fn else 0.0
    spec = tn / (tn + fp) if tn + fp else 0.0
    f1 = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
    return sens, spec, f1


def roc_auc(p, g) -> float:
    """Area under the ROC curve via the rank (Mann-Whitney) statistic.

    Ties get midranks. Raises if G is all one class (AUC undefined).
    """
    p = as_field(p)
    g = as_mask(g)
    if p.shape != g.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {g.shape}")
    pos = g.ravel() == 1.0
    n_pos = int(pos.sum())
    n_neg = pos.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC undefined: ground truth has a single class")
    ranks = rankdata(p.ravel(), method="average")
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def report(p, g, threshold: float = 0.5) -> MetricsReport:
    """Full per-image report: confusion counts plus the four headline metrics."""
    tp, fp, tn, fn = confusion(p, g, threshold)
    sens, spec, f1 = rates_from_counts(tp, fp, tn, fn)
    return MetricsReport(
        tp=tp, fp=fp, tn=tn, fn=fn,
        sensitivity=sens, specificity=spec, f1=f1, auc=roc_auc(p, g),
    )


@dataclass(frozen=True)
class AggregateReport:
    """Macro = mean of per-image metrics (the headline); micro = pooled counts.

    Micro AUC cannot be recovered from counts alone, so it is the macro
    mean in both rows.
    """

    macro_sensitivity: float
    macro_specificity: float
    macro_f1: float
    macro_auc: float
    micro_sensitivity: float
    micro_specificity: float
    micro_f1: float
    micro_auc: float


def aggregate(reports) -> AggregateReport:
    if not reports:
        raise ValueError("no reports to aggregate")
    mean_auc = float(np.mean([r.auc for r in reports]))
    tp = sum(r.tp for r in reports)
    fp = sum(r.fp for r in reports)
    tn = sum(r.tn for r in reports)
    fn = sum(r.fn for r in reports)
    mi_sens, mi_spec, mi_f1 = rates_from_counts(tp, fp, tn, fn)
    return AggregateReport(
        macro_sensitivity=float(np.mean([r.sensitivity for r in reports])),
        macro_specificity=float(np.mean([r.specificity for r in reports])),
        macro_f1=float(np.mean([r.f1 for r in reports])),
        macro_auc=mean_auc,
        micro_sensitivity=mi_sens,
        micro_specificity=mi_spec,
        micro_f1=mi_f1,
        micro_auc=mean_auc,
    )
