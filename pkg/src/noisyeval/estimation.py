"""Posterior estimation of a generator's success rate alpha.

Three evidence regimes are supported and can be combined:

- error-free ratings only: conjugate Beta update, closed form;
- error-prone metric ratings with known (rho, eta): closed-form point
  estimate via likelihood inversion, with a grid posterior attached;
- error-prone ratings with (rho, eta) themselves estimated from
  gold-labeled data: grid marginalization over (alpha, rho, eta).

The mixed case chains the error-free posterior into the metric update as
its prior; ``fuse_metrics`` repeats that chaining across several metrics.
`AlphaEstimator` wraps the same functions behind a fit-style interface.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ._validation import check_count, check_le, check_probability
from .distributions import (
    BetaParams,
    DiscretizedDist,
    GridConfig,
    discretize,
    moments,
    _log_binom_coeff,
    _log_binom_pmf_vec,
)
from .exceptions import (
    ContractViolationError,
    DomainError,
    LowEvidenceWarning,
    NotFittedError,
    NumericError,
    UndefinedEstimatorError,
)

__all__ = [
    "CountSummary",
    "MetricPerformance",
    "AlphaPosterior",
    "estimate_error_free",
    "estimate_known_rho_eta",
    "estimate_rho_eta",
    "posterior_marginal",
    "posterior_mixed",
    "fuse_metrics",
    "AlphaEstimator",
]

_UNIFORM = BetaParams(1.0, 1.0)

# gold-labeled sample count below which (rho, eta) estimates are flagged
LOW_EVIDENCE_THRESHOLD = 20


@dataclass(frozen=True)
class CountSummary:
    """Sufficient statistics of a rating campaign for one (system, metric).

    n_phi/n_plus count the error-free ratings and their positives; n_M and
    m_plus count the metric ratings and their positives; the four gold
    counts describe the paired subset used to estimate (rho, eta).
    """

    n_phi: int = 0
    n_plus: int = 0
    n_M: int = 0
    m_plus: int = 0
    n_gold_pos: int = 0
    n_tp: int = 0
    n_gold_neg: int = 0
    n_tn: int = 0

    def __post_init__(self) -> None:
        for name in ("n_phi", "n_plus", "n_M", "m_plus", "n_gold_pos", "n_tp", "n_gold_neg", "n_tn"):
            object.__setattr__(self, name, check_count(getattr(self, name), name))
        check_le(self.n_plus, self.n_phi, "n_plus", "n_phi")
        check_le(self.m_plus, self.n_M, "m_plus", "n_M")
        check_le(self.n_tp, self.n_gold_pos, "n_tp", "n_gold_pos")
        check_le(self.n_tn, self.n_gold_neg, "n_tn", "n_gold_neg")

    def to_dict(self) -> dict:
        return {
            "n_phi": self.n_phi,
            "n_plus": self.n_plus,
            "n_M": self.n_M,
            "m_plus": self.m_plus,
            "n_gold_pos": self.n_gold_pos,
            "n_tp": self.n_tp,
            "n_gold_neg": self.n_gold_neg,
            "n_tn": self.n_tn,
        }


@dataclass(frozen=True)
class MetricPerformance:
    """True-positive rate rho and true-negative rate eta of a binary metric.

    Each rate is either an exact probability (provided by the user) or a
    Beta posterior (estimated from gold-labeled data). Estimates are keyed
    per metric and per generation system: the same metric generally has
    different error rates on different systems' outputs.
    """

    rho: Union[BetaParams, float]
    eta: Union[BetaParams, float]
    metric_id: str = ""
    system_id: str = ""

    def __post_init__(self) -> None:
        for name, v in (("rho", self.rho), ("eta", self.eta)):
            if isinstance(v, BetaParams):
                continue
            object.__setattr__(self, name, check_probability(v, name))

    @property
    def is_exact(self) -> bool:
        return not (isinstance(self.rho, BetaParams) or isinstance(self.eta, BetaParams))


@dataclass(frozen=True)
class AlphaPosterior:
    """Posterior belief about a generator's success rate.

    representation is either BetaParams (closed-form conjugate case) or a
    DiscretizedDist grid. ``clamped`` flags closed-form point estimates
    whose raw value fell outside [0, 1] and was clamped to the boundary.
    """

    representation: Union[BetaParams, DiscretizedDist]
    mode: float
    mean: float
    variance: float
    clamped: bool = False

    def __post_init__(self) -> None:
        check_probability(self.mode, "mode")
        check_probability(self.mean, "mean")
        if not (math.isfinite(self.variance) and self.variance >= 0.0):
            raise DomainError(f"variance must be finite and >= 0, got {self.variance!r}")

    @classmethod
    def from_beta(cls, params: BetaParams) -> "AlphaPosterior":
        return cls(
            representation=params,
            mode=params.mode,
            mean=params.mean,
            variance=params.variance,
        )

    @classmethod
    def from_grid(
        cls,
        dist: DiscretizedDist,
        mode: Optional[float] = None,
        clamped: bool = False,
    ) -> "AlphaPosterior":
        mean, variance = moments(dist)
        return cls(
            representation=dist,
            mode=dist.mode if mode is None else float(mode),
            mean=mean,
            variance=variance,
            clamped=clamped,
        )

    def to_grid(self, n_bins: int) -> DiscretizedDist:
        """Grid view at the requested resolution.

        Beta representations are discretized on demand; grid representations
        are returned as-is and must already match (no silent regridding).
        """
        if isinstance(self.representation, BetaParams):
            return discretize(self.representation, n_bins)
        if self.representation.n_bins != n_bins:
            raise ContractViolationError(
                f"posterior grid has {self.representation.n_bins} bins, "
                f"cannot be compared at {n_bins} bins"
            )
        return self.representation

    def to_dict(self) -> dict:
        if isinstance(self.representation, BetaParams):
            rep = {"type": "beta", "a": self.representation.a, "b": self.representation.b}
        else:
            rep = {"type": "grid", "n_bins": self.representation.n_bins}
        return {
            "mode": self.mode,
            "mean": self.mean,
            "variance": self.variance,
            "clamped": self.clamped,
            "representation": rep,
        }


def estimate_error_free(
    n_plus: int, n_phi: int, prior: BetaParams = _UNIFORM
) -> AlphaPosterior:
    """Conjugate update from error-free binary ratings.

    Posterior is Beta(n_plus + a, n_phi - n_plus + b); with the uniform
    prior its mode is n_plus / n_phi.
    """
    n_plus = check_count(n_plus, "n_plus")
    n_phi = check_count(n_phi, "n_phi")
    check_le(n_plus, n_phi, "n_plus", "n_phi")
    if not isinstance(prior, BetaParams):
        raise DomainError(f"prior must be BetaParams, got {type(prior).__name__}")
    return AlphaPosterior.from_beta(
        BetaParams(n_plus + prior.a, n_phi - n_plus + prior.b)
    )


def estimate_known_rho_eta(
    m_plus: int,
    n_M: int,
    rho: float,
    eta: float,
    n_bins: int = 2000,
) -> AlphaPosterior:
    """Closed-form success-rate estimate from metric counts with known (rho, eta).

    Inverts p = alpha * (rho + eta - 1) + (1 - eta) at the observed positive
    fraction. When rho + eta < 1 the metric is anti-correlated with the
    truth, so its predictions are flipped first (m_plus -> n_M - m_plus,
    rho -> 1 - rho, eta -> 1 - eta); at rho + eta = 1 the metric carries no
    information about alpha and the estimator is undefined.

    The returned posterior's mode is the exact closed form, clamped to
    [0, 1] with ``clamped`` set if the raw value escaped; its grid
    representation is the likelihood over alpha under a uniform prior, so
    the result can be compared and fused like any other posterior.
    """
    m_plus = check_count(m_plus, "m_plus")
    n_M = check_count(n_M, "n_M")
    check_le(m_plus, n_M, "m_plus", "n_M")
    if n_M == 0:
        raise DomainError("n_M must be positive: no metric ratings to invert")
    rho = check_probability(rho, "rho")
    eta = check_probability(eta, "eta")
    if rho + eta == 1.0:
        raise UndefinedEstimatorError(
            f"estimator undefined at rho + eta = 1 (rho={rho}, eta={eta}): "
            "the metric's positive rate does not depend on alpha"
        )
    if rho + eta < 1.0:
        m_plus, rho, eta = n_M - m_plus, 1.0 - rho, 1.0 - eta
    raw = (m_plus / n_M + eta - 1.0) / (rho + eta - 1.0)
    clamped = not 0.0 <= raw <= 1.0
    point = min(1.0, max(0.0, raw))
    grid = _grid_from_log_weights(
        _point_log_likelihood(m_plus, n_M, _canonical_midpoints(n_bins), rho, eta),
        n_bins,
        f"known-(rho, eta) likelihood (m_plus={m_plus}, n_M={n_M})",
    )
    mean, variance = moments(grid)
    return AlphaPosterior(
        representation=grid, mode=point, mean=mean, variance=variance, clamped=clamped
    )


def estimate_rho_eta(
    counts: CountSummary, metric_id: str = "", system_id: str = ""
) -> MetricPerformance:
    """Beta posteriors for (rho, eta) from paired gold-labeled counts.

    rho ~ Beta(n_tp + 1, n_gold_pos - n_tp + 1) and eta ~ Beta(n_tn + 1,
    n_gold_neg - n_tn + 1). Warns when either gold class has fewer than
    LOW_EVIDENCE_THRESHOLD samples.
    """
    if not isinstance(counts, CountSummary):
        raise DomainError(f"counts must be CountSummary, got {type(counts).__name__}")
    if counts.n_gold_pos < LOW_EVIDENCE_THRESHOLD or counts.n_gold_neg < LOW_EVIDENCE_THRESHOLD:
        warnings.warn(
            f"(rho, eta) estimated from few gold samples "
            f"(positives={counts.n_gold_pos}, negatives={counts.n_gold_neg}); "
            "the posteriors will be wide",
            LowEvidenceWarning,
            stacklevel=2,
        )
    return MetricPerformance(
        rho=BetaParams(counts.n_tp + 1.0, counts.n_gold_pos - counts.n_tp + 1.0),
        eta=BetaParams(counts.n_tn + 1.0, counts.n_gold_neg - counts.n_tn + 1.0),
        metric_id=metric_id,
        system_id=system_id,
    )


def _canonical_midpoints(n_bins: int) -> np.ndarray:
    return (np.arange(n_bins) + 0.5) / n_bins


def _point_log_likelihood(
    m_plus: int, n_M: int, alpha_mid: np.ndarray, rho: float, eta: float
) -> np.ndarray:
    """Binomial log-likelihood of the metric counts per alpha midpoint at fixed (rho, eta)."""
    p = alpha_mid * (rho + eta - 1.0) + (1.0 - eta)
    np.clip(p, 0.0, 1.0, out=p)
    return _log_binom_pmf_vec(m_plus, n_M, p)


# cap on the (alpha-chunk x rho x eta) buffer: 8e6 doubles = 64 MB per temporary
_CHUNK_ELEMENTS = 8_000_000


def _marginal_log_likelihood(
    m_plus: int,
    n_M: int,
    alpha_mid: np.ndarray,
    rho_dist: DiscretizedDist,
    eta_dist: DiscretizedDist,
) -> np.ndarray:
    """log of the (rho, eta)-marginalized metric likelihood per alpha midpoint.

    For each alpha bin, accumulates pmf(m_plus | n_M, p(alpha, rho, eta))
    over the (rho, eta) grid in log space: the plane's maximum is subtracted
    before exponentiation so n_M in the tens of thousands cannot underflow
    the whole plane. Summation order is fixed (eta axis first, then rho),
    so results are deterministic.
    """
    rho = rho_dist.midpoints
    eta = eta_dist.midpoints
    w_rho = rho_dist.masses
    w_eta = eta_dist.masses
    log_coeff = _log_binom_coeff(n_M, m_plus)
    k = float(m_plus)
    nk = float(n_M - m_plus)

    # p(alpha, rho, eta) = alpha * (rho + eta - 1) + (1 - eta); midpoints are
    # strictly inside (0, 1), hence so is p: the plain log formula is safe.
    slope = np.add.outer(rho, eta) - 1.0  # (n_rho, n_eta)
    intercept = 1.0 - eta  # (n_eta,)

    n_alpha = alpha_mid.size
    plane = rho.size * eta.size
    chunk = max(1, min(n_alpha, _CHUNK_ELEMENTS // max(1, plane)))
    out = np.empty(n_alpha)
    for lo in range(0, n_alpha, chunk):
        a = alpha_mid[lo : lo + chunk]
        p = a[:, None, None] * slope[None, :, :] + intercept[None, None, :]
        log_p = np.log(p)
        log_1mp = np.log1p(-p)
        lp = log_p
        lp *= k
        log_1mp *= nk
        lp += log_1mp
        lp += log_coeff
        peak = lp.max(axis=(1, 2))
        np.exp(lp - peak[:, None, None], out=lp)
        mixed = (lp @ w_eta) @ w_rho
        with np.errstate(divide="ignore"):
            out[lo : lo + chunk] = peak + np.log(mixed)
    return out


def _grid_from_log_weights(
    log_weights: np.ndarray, n_bins: int, context: str
) -> DiscretizedDist:
    peak = float(np.max(log_weights))
    if not math.isfinite(peak):
        raise NumericError(f"posterior mass underflowed to zero everywhere in {context}")
    masses = np.exp(log_weights - peak)
    total = float(masses.sum())
    if total <= 0.0 or not math.isfinite(total):
        raise NumericError(f"posterior mass underflowed to zero everywhere in {context}")
    masses /= total
    return DiscretizedDist(_canonical_midpoints(n_bins), masses)


def posterior_marginal(
    m_plus: int,
    n_M: int,
    rho_dist: DiscretizedDist,
    eta_dist: DiscretizedDist,
    alpha_prior: DiscretizedDist,
) -> AlphaPosterior:
    """Grid posterior over alpha with (rho, eta) uncertainty marginalized out.

    Unnormalized mass per alpha bin i is
    P_alpha[i] * sum_j sum_k pmf(m_plus | n_M, p(alpha_i, rho_j, eta_k))
    * P_rho[j] * P_eta[k], renormalized at the end. Computed in log space.
    With n_M = 0 the likelihood is identically 1 and the prior is returned
    unchanged.
    """
    m_plus = check_count(m_plus, "m_plus")
    n_M = check_count(n_M, "n_M")
    check_le(m_plus, n_M, "m_plus", "n_M")
    for name, d in (("rho_dist", rho_dist), ("eta_dist", eta_dist), ("alpha_prior", alpha_prior)):
        if not isinstance(d, DiscretizedDist):
            raise ContractViolationError(f"{name} must be DiscretizedDist, got {type(d).__name__}")
    if n_M == 0:
        return AlphaPosterior.from_grid(alpha_prior)
    log_like = _marginal_log_likelihood(m_plus, n_M, alpha_prior.midpoints, rho_dist, eta_dist)
    with np.errstate(divide="ignore"):
        log_mass = log_like + np.log(alpha_prior.masses)
    grid = _grid_from_log_weights(
        log_mass,
        alpha_prior.n_bins,
        f"marginal posterior (m_plus={m_plus}, n_M={n_M}, "
        f"grids={alpha_prior.n_bins}x{rho_dist.n_bins}x{eta_dist.n_bins})",
    )
    return AlphaPosterior.from_grid(grid)


def _metric_update(
    m_plus: int,
    n_M: int,
    perf: MetricPerformance,
    alpha_prior_grid: DiscretizedDist,
    grids: GridConfig,
) -> AlphaPosterior:
    """One metric-evidence update of a discretized alpha prior."""
    if n_M == 0:
        return AlphaPosterior.from_grid(alpha_prior_grid)
    if perf.is_exact:
        log_like = _point_log_likelihood(
            m_plus, n_M, alpha_prior_grid.midpoints, perf.rho, perf.eta
        )
        with np.errstate(divide="ignore"):
            log_mass = log_like + np.log(alpha_prior_grid.masses)
        grid = _grid_from_log_weights(
            log_mass,
            alpha_prior_grid.n_bins,
            f"point-(rho, eta) posterior (m_plus={m_plus}, n_M={n_M})",
        )
        return AlphaPosterior.from_grid(grid)
    rho_dist = discretize(perf.rho, grids.n_rho)
    eta_dist = discretize(perf.eta, grids.n_eta)
    return posterior_marginal(m_plus, n_M, rho_dist, eta_dist, alpha_prior_grid)


def posterior_mixed(
    counts: CountSummary,
    perf: MetricPerformance,
    alpha_prior: BetaParams = _UNIFORM,
    grids: GridConfig = GridConfig(),
) -> AlphaPosterior:
    """Fused posterior from error-free and metric ratings.

    Step 1 folds the error-free counts into the Beta prior; step 2
    discretizes that Beta as the alpha prior and applies the metric
    likelihood (marginalizing (rho, eta) when perf carries Beta posteriors,
    or at their exact values when it carries point probabilities).
    """
    if not isinstance(counts, CountSummary):
        raise DomainError(f"counts must be CountSummary, got {type(counts).__name__}")
    if not isinstance(perf, MetricPerformance):
        raise DomainError(f"perf must be MetricPerformance, got {type(perf).__name__}")
    step1 = BetaParams(
        counts.n_plus + alpha_prior.a, counts.n_phi - counts.n_plus + alpha_prior.b
    )
    prior_grid = discretize(step1, grids.n_alpha)
    return _metric_update(counts.m_plus, counts.n_M, perf, prior_grid, grids)


def fuse_metrics(
    base: AlphaPosterior,
    batches: Sequence[tuple[CountSummary, MetricPerformance]],
    grids: GridConfig = GridConfig(),
) -> AlphaPosterior:
    """Fold several metrics' evidence into one posterior.

    Each batch's metric likelihood is applied with the running posterior as
    its prior; because the likelihoods multiply, batch order only matters
    up to grid-resolution error.
    """
    if not isinstance(base, AlphaPosterior):
        raise DomainError(f"base must be AlphaPosterior, got {type(base).__name__}")
    if not batches:
        return base
    current = base
    for counts, perf in batches:
        prior_grid = current.to_grid(grids.n_alpha)
        current = _metric_update(counts.m_plus, counts.n_M, perf, prior_grid, grids)
    return current


class AlphaEstimator:
    """Fit-style wrapper around the posterior estimators.

    Parameters
    ----------
    mode : {"free", "known", "estimated", "mixed"}
        Which evidence regime to use. "free" uses error-free ratings only;
        "known" uses metric counts at exact (rho, eta); "estimated" uses
        metric counts with (rho, eta) estimated from the paired gold counts;
        "mixed" fuses error-free and metric evidence.
    rho, eta : float, optional
        Exact metric error rates. Required for "known"; if both are given in
        "mixed" mode they are used instead of estimating from gold counts.
    prior_a, prior_b : float
        Beta prior pseudo-counts for alpha.
    n_alpha, n_rho, n_eta : int
        Grid sizes for the discretized posteriors.

    After ``fit``, the posterior is available as ``posterior_`` and its
    summary statistics as ``alpha_``, ``mean_`` and ``variance_``.
    """

    def __init__(
        self,
        mode: str = "free",
        rho: Optional[float] = None,
        eta: Optional[float] = None,
        prior_a: float = 1.0,
        prior_b: float = 1.0,
        n_alpha: int = 2000,
        n_rho: int = 1000,
        n_eta: int = 1000,
    ) -> None:
        self.mode = mode
        self.rho = rho
        self.eta = eta
        self.prior_a = prior_a
        self.prior_b = prior_b
        self.n_alpha = n_alpha
        self.n_rho = n_rho
        self.n_eta = n_eta

    _param_names = ("mode", "rho", "eta", "prior_a", "prior_b", "n_alpha", "n_rho", "n_eta")

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names}

    def set_params(self, **params) -> "AlphaEstimator":
        for name, value in params.items():
            if name not in self._param_names:
                raise DomainError(
                    f"invalid parameter {name!r} for AlphaEstimator; "
                    f"valid parameters are {sorted(self._param_names)}"
                )
            setattr(self, name, value)
        return self

    def _counts_from(self, X) -> CountSummary:
        if isinstance(X, CountSummary):
            return X
        ratings = np.asarray(X)
        if ratings.ndim != 1:
            raise DomainError("X must be a CountSummary or a 1-D array of binary ratings")
        if ratings.size and not np.isin(ratings, (0, 1)).all():
            raise DomainError("binary ratings must contain only 0 and 1")
        return CountSummary(n_phi=int(ratings.size), n_plus=int(ratings.sum()))

    def fit(self, X, y=None) -> "AlphaEstimator":
        """Fit the posterior from a CountSummary (or binary ratings in "free" mode)."""
        counts = self._counts_from(X)
        prior = BetaParams(self.prior_a, self.prior_b)
        grids = GridConfig(self.n_alpha, self.n_rho, self.n_eta)
        if self.mode == "free":
            posterior = estimate_error_free(counts.n_plus, counts.n_phi, prior)
        elif self.mode == "known":
            if self.rho is None or self.eta is None:
                raise DomainError('mode="known" requires both rho and eta')
            posterior = estimate_known_rho_eta(
                counts.m_plus, counts.n_M, self.rho, self.eta, n_bins=self.n_alpha
            )
        elif self.mode == "estimated":
            perf = estimate_rho_eta(counts)
            posterior = posterior_marginal(
                counts.m_plus,
                counts.n_M,
                discretize(perf.rho, grids.n_rho),
                discretize(perf.eta, grids.n_eta),
                discretize(prior, grids.n_alpha),
            )
        elif self.mode == "mixed":
            if self.rho is not None and self.eta is not None:
                perf = MetricPerformance(rho=self.rho, eta=self.eta)
            else:
                perf = estimate_rho_eta(counts)
            posterior = posterior_mixed(counts, perf, prior, grids)
        else:
            raise DomainError(
                f'mode must be one of "free", "known", "estimated", "mixed"; got {self.mode!r}'
            )
        self.posterior_ = posterior
        self.alpha_ = posterior.mode
        self.mean_ = posterior.mean
        self.variance_ = posterior.variance
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "posterior_"):
            raise NotFittedError(
                "this AlphaEstimator instance is not fitted yet; call fit first"
            )

    def predict(self) -> float:
        """Point estimate of alpha (the posterior mode)."""
        self._check_fitted()
        return self.alpha_
