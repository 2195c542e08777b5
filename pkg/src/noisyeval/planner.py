"""Evaluation-campaign planning: expected-count simulation and epsilon tables.

Given hypothesized values for the generator quality alpha, the metric error
rates (rho, eta) and the campaign sizes, the planner simulates the expected
rating counts deterministically (each count is the rounded expectation,
never a random draw), rebuilds the posterior those counts would produce,
and reports epsilon = sqrt(2 * variance) * Z_gamma: the smallest quality
difference between two such systems that would still test significant.

`plan_table` sweeps (n_phi, n_M) grids, `min_samples` inverts the relation
to find the cheapest campaign hitting a target epsilon, and `epsilon_curve`
sweeps metric accuracy.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ._validation import (
    check_count,
    check_gamma,
    check_positive,
    check_probability,
)
from .distributions import BetaParams, GridConfig, normal_quantile
from .estimation import (
    AlphaPosterior,
    CountSummary,
    MetricPerformance,
    estimate_rho_eta,
    posterior_mixed,
)
from .exceptions import DomainError, NumericError

__all__ = [
    "PlanParams",
    "SimulatedCounts",
    "MinSamplesResult",
    "PLAN_DISCLAIMER",
    "simulate_counts",
    "epsilon_sim",
    "plan_table",
    "min_samples",
    "epsilon_curve",
    "format_table",
    "table_to_csv",
]

PLAN_DISCLAIMER = (
    "Planning guideline only: simulated epsilon assumes the hypothesized "
    "alpha, rho and eta hold exactly; real metric error rates vary by "
    "system and dataset."
)

# search ceiling for min_samples; beyond this a target is declared unreachable
_MAX_SAMPLES = 10**9

_REDUCED_GRIDS = GridConfig(500, 200, 200)


def _round_half_up(x: float) -> int:
    """floor(x + 1/2): deterministic expected-count rounding."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class PlanParams:
    """Hypothesized campaign configuration.

    n_rho_eta (size of the gold-labeled set for estimating the metric's
    error rates) defaults to n_phi, and psi (gold-positive proportion in
    that set) defaults to alpha: the common campaign reuses the
    human-rated pairs as the gold labels.
    """

    alpha: float
    rho: float
    eta: float
    gamma: float = 0.05
    n_phi: int = 0
    n_M: int = 0
    n_rho_eta: Optional[int] = None
    psi: Optional[float] = None
    rho_eta_mode: str = "estimated"
    grids: GridConfig = field(default_factory=lambda: _REDUCED_GRIDS)

    def __post_init__(self) -> None:
        check_probability(self.alpha, "alpha")
        check_probability(self.rho, "rho")
        check_probability(self.eta, "eta")
        check_gamma(self.gamma)
        check_count(self.n_phi, "n_phi")
        check_count(self.n_M, "n_M")
        if self.n_rho_eta is not None:
            check_count(self.n_rho_eta, "n_rho_eta")
        if self.psi is not None:
            check_probability(self.psi, "psi")
        if self.rho_eta_mode not in ("provided", "estimated"):
            raise DomainError(
                f'rho_eta_mode must be "provided" or "estimated", got {self.rho_eta_mode!r}'
            )
        if not isinstance(self.grids, GridConfig):
            raise DomainError(f"grids must be GridConfig, got {type(self.grids).__name__}")

    @property
    def resolved_n_rho_eta(self) -> int:
        return self.n_phi if self.n_rho_eta is None else self.n_rho_eta

    @property
    def resolved_psi(self) -> float:
        return self.alpha if self.psi is None else self.psi

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "rho": self.rho,
            "eta": self.eta,
            "gamma": self.gamma,
            "n_phi": self.n_phi,
            "n_M": self.n_M,
            "n_rho_eta": self.resolved_n_rho_eta,
            "psi": self.resolved_psi,
            "rho_eta_mode": self.rho_eta_mode,
            "grids": {
                "n_alpha": self.grids.n_alpha,
                "n_rho": self.grids.n_rho,
                "n_eta": self.grids.n_eta,
            },
        }


@dataclass(frozen=True)
class SimulatedCounts:
    """Expected rating counts for a hypothesized campaign."""

    n_plus_sim: int
    m_plus_sim: int
    n_gold_pos_sim: int
    n_tp_sim: int
    n_gold_neg_sim: int
    n_tn_sim: int


@dataclass(frozen=True)
class MinSamplesResult:
    """Outcome of inverting epsilon_sim for one free sample-count variable."""

    free: str
    target_epsilon: float
    count: Optional[int]
    epsilon: float
    unreachable: bool

    def to_dict(self) -> dict:
        if self.unreachable:
            return {
                "status": "unreachable",
                "free": self.free,
                "target_epsilon": self.target_epsilon,
                "limit_epsilon": self.epsilon,
                "max_samples": _MAX_SAMPLES,
            }
        return {
            "status": "ok",
            "free": self.free,
            "target_epsilon": self.target_epsilon,
            "count": self.count,
            "epsilon": self.epsilon,
        }


def simulate_counts(params: PlanParams) -> SimulatedCounts:
    """Deterministic expected counts: each is the rounded expectation."""
    if not isinstance(params, PlanParams):
        raise DomainError(f"params must be PlanParams, got {type(params).__name__}")
    p = params.alpha * (params.rho + params.eta - 1.0) + (1.0 - params.eta)
    n_rho_eta = params.resolved_n_rho_eta
    n_gold_pos = _round_half_up(params.resolved_psi * n_rho_eta)
    n_gold_neg = n_rho_eta - n_gold_pos
    return SimulatedCounts(
        n_plus_sim=_round_half_up(params.alpha * params.n_phi),
        m_plus_sim=_round_half_up(p * params.n_M),
        n_gold_pos_sim=n_gold_pos,
        n_tp_sim=_round_half_up(params.rho * n_gold_pos),
        n_gold_neg_sim=n_gold_neg,
        n_tn_sim=_round_half_up(params.eta * n_gold_neg),
    )


def _simulated_posterior(params: PlanParams, grids: GridConfig) -> AlphaPosterior:
    sim = simulate_counts(params)
    counts = CountSummary(
        n_phi=params.n_phi,
        n_plus=sim.n_plus_sim,
        n_M=params.n_M,
        m_plus=sim.m_plus_sim,
        n_gold_pos=sim.n_gold_pos_sim,
        n_tp=sim.n_tp_sim,
        n_gold_neg=sim.n_gold_neg_sim,
        n_tn=sim.n_tn_sim,
    )
    if params.rho_eta_mode == "provided":
        perf = MetricPerformance(rho=params.rho, eta=params.eta)
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # low-evidence warnings are the planner's point
            perf = estimate_rho_eta(counts)
    return posterior_mixed(counts, perf, grids=grids)


# mode movement below this across a grid doubling counts as converged
_CONVERGENCE_TOL = 1e-3
_MAX_DOUBLINGS = 6


def epsilon_sim(params: PlanParams, converge: bool = True) -> float:
    """Minimal detectable difference for a hypothesized campaign.

    Builds the posterior the expected counts would produce and returns
    sqrt(2 * variance) * Z_gamma (two systems with identical campaign
    variance). Conventions: with no ratings at all the answer is 1.0
    (nothing is distinguishable); with n_M = 0 the posterior is the
    error-free Beta and needs no grids.

    When ``converge`` is true, grid sizes are doubled until the posterior
    mode moves by less than 1e-3, and the finest result is returned.
    """
    if not isinstance(params, PlanParams):
        raise DomainError(f"params must be PlanParams, got {type(params).__name__}")
    z = normal_quantile(params.gamma)
    if params.n_phi == 0 and params.n_M == 0:
        return 1.0
    sim = simulate_counts(params)
    if params.n_M == 0:
        post = BetaParams(sim.n_plus_sim + 1.0, params.n_phi - sim.n_plus_sim + 1.0)
        return math.sqrt(2.0 * post.variance) * z
    grids = params.grids
    post = _simulated_posterior(params, grids)
    if converge:
        for _ in range(_MAX_DOUBLINGS):
            finer = grids.doubled()
            post_finer = _simulated_posterior(params, finer)
            moved = abs(post_finer.mode - post.mode)
            grids, post = finer, post_finer
            if moved < _CONVERGENCE_TOL:
                break
        else:
            raise NumericError(
                f"posterior mode did not stabilize after {_MAX_DOUBLINGS} grid doublings"
            )
    return math.sqrt(2.0 * post.variance) * z


def plan_table(
    base: PlanParams, phi_values: list[int], m_values: list[int]
) -> np.ndarray:
    """epsilon_sim over an (n_phi, n_M) grid; cell [i, j] uses phi_values[i], m_values[j]."""
    if not phi_values or not m_values:
        raise DomainError("phi_values and m_values must be non-empty")
    phi_values = [check_count(v, "n_phi value") for v in phi_values]
    m_values = [check_count(v, "n_M value") for v in m_values]
    table = np.empty((len(phi_values), len(m_values)))
    for i, n_phi in enumerate(phi_values):
        for j, n_m in enumerate(m_values):
            table[i, j] = epsilon_sim(replace(base, n_phi=n_phi, n_M=n_m))
    return table


def format_table(
    table: np.ndarray, phi_values: list[int], m_values: list[int]
) -> str:
    """Pretty text table, 3-decimal epsilon values, disclaimer footer."""
    width = max(8, *(len(str(v)) + 2 for v in m_values))
    label_width = max(len(str(v)) for v in phi_values) + 2
    header = "n_phi".ljust(label_width) + "".join(str(v).rjust(width) for v in m_values)
    lines = ["n_M".rjust(label_width + width // 2), header]
    for i, n_phi in enumerate(phi_values):
        row = str(n_phi).ljust(label_width)
        row += "".join(f"{table[i, j]:.3f}".rjust(width) for j in range(len(m_values)))
        lines.append(row)
    lines.append("")
    lines.append(PLAN_DISCLAIMER)
    return "\n".join(lines)


def table_to_csv(
    table: np.ndarray, phi_values: list[int], m_values: list[int]
) -> str:
    """CSV rendering: first column n_phi, one column per n_M value, full precision."""
    lines = ["n_phi," + ",".join(str(v) for v in m_values)]
    for i, n_phi in enumerate(phi_values):
        lines.append(
            str(n_phi) + "," + ",".join(repr(float(table[i, j])) for j in range(len(m_values)))
        )
    return "\n".join(lines) + "\n"


def _with_free(params: PlanParams, free: str, n: int) -> PlanParams:
    if free == "n_phi":
        return replace(params, n_phi=n)
    if free == "n_M":
        return replace(params, n_M=n)
    if free == "n_rho_eta":
        return replace(params, n_rho_eta=n)
    raise DomainError(f'free must be one of "n_phi", "n_M", "n_rho_eta"; got {free!r}')


def min_samples(
    target_epsilon: float, params: PlanParams, free: str
) -> MinSamplesResult:
    """Smallest count of the free variable reaching epsilon_sim <= target.

    Exponential search followed by bisection, relying on epsilon_sim being
    (up to count-rounding wiggle) non-increasing in each sample count. If
    even 10^9 samples cannot reach the target, reports "unreachable" with
    the limiting epsilon. Evaluations run at the configured grids without
    the doubling check, so the search cost stays bounded.
    """
    target_epsilon = check_positive(target_epsilon, "target_epsilon")
    cache: dict[int, float] = {}

    def eval_at(n: int) -> float:
        if n not in cache:
            cache[n] = epsilon_sim(_with_free(params, free, n), converge=False)
        return cache[n]

    eps_zero = eval_at(0)
    if eps_zero <= target_epsilon:
        return MinSamplesResult(free, target_epsilon, 0, eps_zero, False)
    lo, eps_lo = 0, eps_zero
    hi = 1
    while True:
        eps_hi = eval_at(hi)
        if eps_hi <= target_epsilon:
            break
        if hi >= _MAX_SAMPLES:
            return MinSamplesResult(free, target_epsilon, None, eps_hi, True)
        lo, eps_lo = hi, eps_hi
        hi = min(hi * 2, _MAX_SAMPLES)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if eval_at(mid) <= target_epsilon:
            hi = mid
        else:
            lo = mid
    return MinSamplesResult(free, target_epsilon, hi, eval_at(hi), False)


def epsilon_curve(
    params: PlanParams, accuracy_axis: list[float]
) -> list[tuple[float, float]]:
    """epsilon_sim as metric accuracy varies, with rho = eta = accuracy (provided mode).

    Accuracies at or below 0.5 are rejected: such a metric is no better
    than coin-flipping and the provided-mode posterior carries no signal.
    """
    if not accuracy_axis:
        raise DomainError("accuracy_axis must be non-empty")
    points = []
    for accuracy in accuracy_axis:
        accuracy = check_probability(accuracy, "accuracy")
        if accuracy <= 0.5:
            raise DomainError(
                f"accuracy must exceed 0.5 in provided mode, got {accuracy}; "
                "a metric at or below coin-flip accuracy cannot inform alpha"
            )
        eps = epsilon_sim(
            replace(params, rho=accuracy, eta=accuracy, rho_eta_mode="provided")
        )
        points.append((accuracy, eps))
    return points
