"""Pairwise system comparison: P(alpha_1 > alpha_2) and significance.

Two posteriors are compared on a shared grid; ties between identical bins
carry half mass, which makes the comparison of a posterior with itself
exactly 0.5 and the antisymmetry P(1>2) = 1 - P(2>1) exact. The minimal
distinguishable difference epsilon_gamma is the normal-approximation
companion: sqrt(var1 + var2) times the two-sided critical value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._validation import check_gamma, check_non_negative, check_probability
from .distributions import BetaParams, normal_quantile
from .estimation import AlphaPosterior
from .exceptions import ContractViolationError, DomainError

__all__ = [
    "ComparisonResult",
    "prob_greater",
    "is_significant",
    "epsilon_gamma",
    "compare_systems",
]

# shared grid resolution when both posteriors are closed-form Betas
DEFAULT_COMPARISON_BINS = 2000


@dataclass(frozen=True)
class ComparisonResult:
    """Outcome of comparing two systems' success-rate posteriors."""

    system_ids: tuple[str, str]
    mode_1: float
    mode_2: float
    epsilon_hat: float
    prob_greater: float
    gamma: float
    significant: bool

    def to_dict(self) -> dict:
        return {
            "system_ids": list(self.system_ids),
            "mode_1": self.mode_1,
            "mode_2": self.mode_2,
            "epsilon_hat": self.epsilon_hat,
            "epsilon_hat_rounded": round(self.epsilon_hat, 2),
            "prob_greater": self.prob_greater,
            "gamma": self.gamma,
            "significant": self.significant,
        }


def _comparison_bins(p1: AlphaPosterior, p2: AlphaPosterior, n_bins: Optional[int]) -> int:
    if n_bins is not None:
        return int(n_bins)
    grid_sizes = [
        p.representation.n_bins
        for p in (p1, p2)
        if not isinstance(p.representation, BetaParams)
    ]
    if len(grid_sizes) == 2 and grid_sizes[0] != grid_sizes[1]:
        raise ContractViolationError(
            f"posterior grids have different resolutions ({grid_sizes[0]} vs "
            f"{grid_sizes[1]} bins); recompute them on a shared grid"
        )
    return grid_sizes[0] if grid_sizes else DEFAULT_COMPARISON_BINS


def prob_greater(
    p1: AlphaPosterior, p2: AlphaPosterior, n_bins: Optional[int] = None
) -> float:
    """P(alpha_1 > alpha_2) for independent posteriors on a shared grid.

    Computed as sum_j P2[j] * (sum_{i>j} P1[i] + P1[j] / 2); the half-mass
    tie term makes prob_greater(X, X) = 0.5 on identical grids.
    """
    for name, p in (("p1", p1), ("p2", p2)):
        if not isinstance(p, AlphaPosterior):
            raise ContractViolationError(
                f"{name} must be AlphaPosterior, got {type(p).__name__}"
            )
    bins = _comparison_bins(p1, p2, n_bins)
    m1 = p1.to_grid(bins).masses
    m2 = p2.to_grid(bins).masses
    # tail[j] = sum of m1 strictly above bin j
    tail = np.zeros_like(m1)
    tail[:-1] = np.cumsum(m1[::-1])[::-1][1:]
    return float(np.dot(m2, tail + 0.5 * m1))


def is_significant(prob: float, gamma: float) -> bool:
    """Two-sided significance: prob > 1 - gamma/2 or prob < gamma/2, strictly."""
    prob = check_probability(prob, "prob")
    gamma = check_gamma(gamma)
    return prob > 1.0 - gamma / 2.0 or prob < gamma / 2.0


def epsilon_gamma(var1: float, var2: float, gamma: float) -> float:
    """Minimal difference detectable at level gamma under the normal approximation."""
    var1 = check_non_negative(var1, "var1")
    var2 = check_non_negative(var2, "var2")
    return float(np.sqrt(var1 + var2)) * normal_quantile(gamma)


def compare_systems(
    post1: AlphaPosterior,
    post2: AlphaPosterior,
    gamma: float = 0.05,
    system_ids: tuple[str, str] = ("system_1", "system_2"),
) -> ComparisonResult:
    """Full comparison of two posteriors at significance level gamma."""
    gamma = check_gamma(gamma)
    if len(system_ids) != 2:
        raise DomainError(f"system_ids must name exactly two systems, got {system_ids!r}")
    prob = prob_greater(post1, post2)
    return ComparisonResult(
        system_ids=(str(system_ids[0]), str(system_ids[1])),
        mode_1=post1.mode,
        mode_2=post2.mode,
        epsilon_hat=post1.mode - post2.mode,
        prob_greater=prob,
        gamma=gamma,
        significant=is_significant(prob, gamma),
    )
