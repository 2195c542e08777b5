"""Turn scalar metric scores into a binary metric via threshold selection.

Candidate thresholds are the distinct observed scores plus a -inf sentinel
(everything rated positive). For each candidate tau the induced binary
metric labels a pair positive iff score > tau (strict); sweeping tau traces
the ROC curve, and the selected threshold minimizes |rho - eta|, i.e.
balances the true-positive and true-negative rates.

Thresholds and error rates depend on the system that produced the outputs,
so the record-level API refuses to pool multiple systems unless asked.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exceptions import DomainError, NotFittedError

__all__ = [
    "ScoredSample",
    "RocPoint",
    "binarize_scores",
    "roc_points",
    "select_threshold",
    "select_threshold_by_system",
    "rho_eta_at_threshold",
    "roc_to_csv",
    "ThresholdBinarizer",
]


@dataclass(frozen=True)
class ScoredSample:
    """One scored output with its gold binary label."""

    input_id: str
    output_id: str
    system_id: str
    score: float
    gold: int

    def __post_init__(self) -> None:
        if self.gold not in (0, 1):
            raise DomainError(f"gold must be 0 or 1, got {self.gold!r}")
        if not isinstance(self.score, (int, float)) or math.isnan(float(self.score)):
            raise DomainError(f"score must be a real number, got {self.score!r}")
        object.__setattr__(self, "score", float(self.score))
        object.__setattr__(self, "gold", int(self.gold))


@dataclass(frozen=True)
class RocPoint:
    """ROC curve point at threshold tau: tpr is rho, fpr is 1 - eta."""

    tau: float
    tpr: float
    fpr: float
    n_pos: int
    n_neg: int

    def to_dict(self) -> dict:
        # tau = -inf (the rate-everything-positive sentinel) is not valid
        # strict JSON; serialize it as null.
        return {
            "tau": self.tau if math.isfinite(self.tau) else None,
            "tpr": self.tpr,
            "fpr": self.fpr,
            "n_pos": self.n_pos,
            "n_neg": self.n_neg,
        }


def binarize_scores(samples: Sequence[ScoredSample], tau: float) -> list[int]:
    """Binary ratings at threshold tau: 1 iff score > tau (strict)."""
    return [1 if s.score > tau else 0 for s in samples]


def _rates_above(sorted_scores: np.ndarray, taus: np.ndarray) -> np.ndarray:
    """Fraction of sorted_scores strictly above each tau (0.0 if empty)."""
    if sorted_scores.size == 0:
        return np.zeros_like(taus)
    above = sorted_scores.size - np.searchsorted(sorted_scores, taus, side="right")
    return above / sorted_scores.size


def _roc_from_arrays(scores: np.ndarray, gold: np.ndarray) -> list[RocPoint]:
    n_pos = int((gold == 1).sum())
    n_neg = int((gold == 0).sum())
    if n_pos == 0 or n_neg == 0:
        warnings.warn(
            f"only one gold class present (positives={n_pos}, negatives={n_neg}); "
            "rates for the missing class default to 0",
            UserWarning,
            stacklevel=3,
        )
    pos_scores = np.sort(scores[gold == 1])
    neg_scores = np.sort(scores[gold == 0])
    taus = np.concatenate(([-np.inf], np.unique(scores)))
    tprs = _rates_above(pos_scores, taus)
    fprs = _rates_above(neg_scores, taus)
    return [
        RocPoint(tau=float(t), tpr=float(tp), fpr=float(fp), n_pos=n_pos, n_neg=n_neg)
        for t, tp, fp in zip(taus, tprs, fprs)
    ]


def roc_points(samples: Sequence[ScoredSample]) -> list[RocPoint]:
    """ROC points at every distinct score plus the -inf sentinel, sorted by tau.

    Rates are exact counts; the sweep is O(n log n) via sorting and binary
    search. With only one gold class present the missing class's rate is
    reported as 0 with a warning.
    """
    if not samples:
        raise DomainError("cannot compute ROC points from an empty sample list")
    scores = np.array([s.score for s in samples])
    gold = np.array([s.gold for s in samples])
    return _roc_from_arrays(scores, gold)


def _pick_balanced(points: Sequence[RocPoint]) -> tuple[float, float, float]:
    best = min(
        points,
        key=lambda pt: (abs(pt.tpr - (1.0 - pt.fpr)), -(pt.tpr + (1.0 - pt.fpr)), pt.tau),
    )
    return best.tau, best.tpr, 1.0 - best.fpr


def select_threshold(
    samples: Sequence[ScoredSample],
    pool: bool = False,
    estimation_samples: Optional[Sequence[ScoredSample]] = None,
) -> tuple[float, float, float]:
    """Threshold minimizing |rho - eta|, with the resulting (rho_hat, eta_hat).

    Ties on |rho - eta| are broken toward larger rho + eta (the more
    informative metric), then smaller tau. Samples from several systems are
    rejected unless ``pool=True``: error rates are system-specific and
    silent pooling would blur them.

    Selecting tau and estimating (rho, eta) on the same gold labels biases
    the estimates optimistically; pass a disjoint ``estimation_samples``
    set to re-measure the rates at the selected tau on fresh data.
    """
    if not samples:
        raise DomainError("cannot select a threshold from an empty sample list")
    systems = {s.system_id for s in samples}
    if len(systems) > 1 and not pool:
        raise DomainError(
            f"samples mix {len(systems)} systems ({sorted(systems)}); error rates are "
            "system-specific - filter to one system, use select_threshold_by_system, "
            "or pass pool=True to pool deliberately"
        )
    gold = {s.gold for s in samples}
    if len(gold) < 2:
        raise DomainError(
            "threshold selection needs both gold classes present "
            f"(got only gold={gold.pop()})"
        )
    tau, rho_hat, eta_hat = _pick_balanced(roc_points(samples))
    if estimation_samples is not None:
        if not estimation_samples:
            raise DomainError("estimation_samples must be non-empty when given")
        rho_hat, eta_hat = rho_eta_at_threshold(estimation_samples, tau)
    return tau, rho_hat, eta_hat


def select_threshold_by_system(
    samples: Sequence[ScoredSample],
) -> dict[str, tuple[float, float, float]]:
    """select_threshold per system_id; never pools."""
    by_system: dict[str, list[ScoredSample]] = {}
    for s in samples:
        by_system.setdefault(s.system_id, []).append(s)
    return {sys_id: select_threshold(group) for sys_id, group in sorted(by_system.items())}


def rho_eta_at_threshold(
    samples: Sequence[ScoredSample], tau: float
) -> tuple[float, float]:
    """Exact (rho_hat, eta_hat) of the binary metric induced by tau."""
    if not samples:
        raise DomainError("cannot estimate rates from an empty sample list")
    ratings = binarize_scores(samples, tau)
    gold = [s.gold for s in samples]
    n_pos = sum(gold)
    n_neg = len(gold) - n_pos
    tp = sum(1 for r, g in zip(ratings, gold) if r == 1 and g == 1)
    tn = sum(1 for r, g in zip(ratings, gold) if r == 0 and g == 0)
    rho_hat = tp / n_pos if n_pos else 0.0
    eta_hat = tn / n_neg if n_neg else 0.0
    return rho_hat, eta_hat


def roc_to_csv(points: Sequence[RocPoint]) -> str:
    """CSV rendering: tau,tpr,fpr,n_pos,n_neg."""
    lines = ["tau,tpr,fpr,n_pos,n_neg"]
    for pt in points:
        lines.append(f"{pt.tau!r},{pt.tpr!r},{pt.fpr!r},{pt.n_pos},{pt.n_neg}")
    return "\n".join(lines) + "\n"


class ThresholdBinarizer:
    """Fit-style transformer from scalar scores to binary ratings.

    fit(X, y) selects the |rho - eta|-balancing threshold from scores X and
    gold labels y; transform(X) then emits 0/1 ratings via score > threshold_.

    Parameters
    ----------
    pool : bool
        Allow fitting on samples from several systems at once when
        system_ids are passed to fit. Off by default.

    Attributes (after fit)
    ----------
    threshold_ : float
        Selected threshold tau.
    rho_, eta_ : float
        True-positive and true-negative rates at threshold_.
    points_ : list of RocPoint
        The full ROC sweep.
    """

    def __init__(self, pool: bool = False) -> None:
        self.pool = pool

    _param_names = ("pool",)

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names}

    def set_params(self, **params) -> "ThresholdBinarizer":
        for name, value in params.items():
            if name not in self._param_names:
                raise DomainError(
                    f"invalid parameter {name!r} for ThresholdBinarizer; "
                    f"valid parameters are {sorted(self._param_names)}"
                )
            setattr(self, name, value)
        return self

    def fit(self, X, y, system_ids: Optional[Sequence[str]] = None) -> "ThresholdBinarizer":
        scores = np.asarray(X, dtype=float).ravel()
        gold = np.asarray(y).ravel()
        if scores.size != gold.size:
            raise DomainError(f"X and y lengths differ ({scores.size} vs {gold.size})")
        if scores.size == 0:
            raise DomainError("cannot fit on empty data")
        if not np.isin(gold, (0, 1)).all():
            raise DomainError("gold labels must contain only 0 and 1")
        if system_ids is not None:
            distinct = set(system_ids)
            if len(distinct) > 1 and not self.pool:
                raise DomainError(
                    f"scores mix {len(distinct)} systems; fit per system or set pool=True"
                )
        if len(set(gold.tolist())) < 2:
            raise DomainError("threshold selection needs both gold classes present")
        points = _roc_from_arrays(scores, gold.astype(int))
        tau, rho_hat, eta_hat = _pick_balanced(points)
        self.threshold_ = tau
        self.rho_ = rho_hat
        self.eta_ = eta_hat
        self.points_ = points
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "threshold_"):
            raise NotFittedError(
                "this ThresholdBinarizer instance is not fitted yet; call fit first"
            )

    def transform(self, X) -> np.ndarray:
        """0/1 ratings for scores X at the fitted threshold."""
        self._check_fitted()
        scores = np.asarray(X, dtype=float).ravel()
        return (scores > self.threshold_).astype(int)

    def fit_transform(self, X, y, **fit_kwargs) -> np.ndarray:
        return self.fit(X, y, **fit_kwargs).transform(X)
