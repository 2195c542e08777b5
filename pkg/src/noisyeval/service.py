"""JSON-over-HTTP API for estimation, comparison, planning, and binarization.

A thin adapter over the library: every endpoint's ``result`` payload is
exactly the JSON serialization the corresponding library call produces,
so programmatic clients and the CLI see identical numbers.

Responses wrap ``{"status": "ok", "result": ...}`` on success and
``{"status": "error", "error": {"code": ..., "message": ...}}`` on
failure. Structural problems with the body (wrong types, unknown fields,
non-finite numbers) return 400; semantically invalid parameters (out of
range, rho + eta = 1, inconsistent counts) return 422; numeric failures
return 500; table requests that blow the compute budget return 408.

Environment: PORT (bind port for ``python -m noisyeval.service``),
COMPUTE_BUDGET_MS (per-request budget for /v1/plan/table, default 60000),
CORS_ORIGIN (comma-separated allowed origins, default "*").
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import replace
from typing import Literal, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, field_validator

from . import __version__
from .binarize import ScoredSample, roc_points, select_threshold
from .distributions import BetaParams, GridConfig, discretize
from .estimation import (
    AlphaPosterior,
    CountSummary,
    MetricPerformance,
    estimate_error_free,
    estimate_known_rho_eta,
    estimate_rho_eta,
    posterior_marginal,
    posterior_mixed,
)
from .exceptions import (
    ContractViolationError,
    DataError,
    DomainError,
    NumericError,
    UndefinedEstimatorError,
)
from .planner import PLAN_DISCLAIMER, PlanParams, epsilon_sim, min_samples
from .significance import compare_systems

GRID_CAPS = GridConfig(2000, 1000, 1000)
DEFAULT_COMPUTE_BUDGET_MS = 60_000
MAX_TABLE_AXIS = 10

_ESTIMATE_GRID_DEFAULT = GridConfig()
_PLAN_GRID_DEFAULT = GridConfig(500, 200, 200)


class _Body(BaseModel):
    model_config = ConfigDict(extra="forbid")

    @field_validator("*")
    @classmethod
    def _finite_numbers(cls, value):
        # JSON has no Infinity/NaN literals; permissive parsers let them
        # through, so reject here rather than poison the numerics.
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError("numeric fields must be finite")
        return value


class GridBody(_Body):
    n_alpha: Optional[int] = None
    n_rho: Optional[int] = None
    n_eta: Optional[int] = None


class EstimateBody(_Body):
    mode: Literal["free", "known", "estimated", "mixed"] = "mixed"
    n_phi: int = 0
    n_plus: int = 0
    n_M: int = 0
    m_plus: int = 0
    n_gold_pos: int = 0
    n_tp: int = 0
    n_gold_neg: int = 0
    n_tn: int = 0
    rho: Optional[float] = None
    eta: Optional[float] = None
    grid: Optional[GridBody] = None


class CompareBody(_Body):
    a: EstimateBody
    b: EstimateBody
    gamma: float = 0.05
    system_ids: Optional[tuple[str, str]] = None


class PlanBody(_Body):
    alpha: float
    rho: float
    eta: float
    gamma: float = 0.05
    n_phi: int = 0
    n_M: int = 0
    n_rho_eta: Optional[int] = None
    psi: Optional[float] = None
    rho_eta_mode: Literal["provided", "estimated"] = "estimated"
    grid: Optional[GridBody] = None
    target_epsilon: Optional[float] = None
    free: Optional[Literal["n_phi", "n_M", "n_rho_eta"]] = None


class PlanTableBody(_Body):
    alpha: float
    rho: float
    eta: float
    gamma: float = 0.05
    n_rho_eta: Optional[int] = None
    psi: Optional[float] = None
    rho_eta_mode: Literal["provided", "estimated"] = "estimated"
    grid: Optional[GridBody] = None
    phi_values: list[int]
    m_values: list[int]


class ScoredSampleBody(_Body):
    input_id: str
    output_id: str
    system_id: str = "system"
    score: float
    gold: int


class BinarizeBody(_Body):
    samples: list[ScoredSampleBody]
    pool: bool = False


def _ok(result, grids: Optional[GridConfig] = None) -> JSONResponse:
    headers = {}
    if grids is not None:
        headers["X-Effective-Grid"] = f"{grids.n_alpha},{grids.n_rho},{grids.n_eta}"
    return JSONResponse({"status": "ok", "result": result}, headers=headers)


def _error(status_code: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        {"status": "error", "error": {"code": code, "message": message}},
        status_code=status_code,
    )


def _effective_grid(grid: Optional[GridBody], default: GridConfig) -> GridConfig:
    """Fill missing axes from the endpoint default, then clamp to the caps."""
    if grid is None:
        return default
    n_alpha = grid.n_alpha if grid.n_alpha is not None else default.n_alpha
    n_rho = grid.n_rho if grid.n_rho is not None else default.n_rho
    n_eta = grid.n_eta if grid.n_eta is not None else default.n_eta
    return GridConfig(
        min(n_alpha, GRID_CAPS.n_alpha),
        min(n_rho, GRID_CAPS.n_rho),
        min(n_eta, GRID_CAPS.n_eta),
    )


def _posterior_from_body(body: EstimateBody, grids: GridConfig) -> AlphaPosterior:
    counts = CountSummary(
        n_phi=body.n_phi,
        n_plus=body.n_plus,
        n_M=body.n_M,
        m_plus=body.m_plus,
        n_gold_pos=body.n_gold_pos,
        n_tp=body.n_tp,
        n_gold_neg=body.n_gold_neg,
        n_tn=body.n_tn,
    )
    if body.mode == "free":
        return estimate_error_free(counts.n_plus, counts.n_phi)
    if body.mode == "known":
        if body.rho is None or body.eta is None:
            raise DomainError('mode "known" requires both rho and eta')
        return estimate_known_rho_eta(
            counts.m_plus, counts.n_M, body.rho, body.eta, n_bins=grids.n_alpha
        )
    if (body.rho is None) != (body.eta is None):
        raise DomainError("rho and eta must be provided together")
    if body.mode == "estimated":
        perf = estimate_rho_eta(counts)
        return posterior_marginal(
            counts.m_plus,
            counts.n_M,
            discretize(perf.rho, grids.n_rho),
            discretize(perf.eta, grids.n_eta),
            discretize(BetaParams(1.0, 1.0), grids.n_alpha),
        )
    if body.rho is not None:
        perf = MetricPerformance(rho=body.rho, eta=body.eta)
    else:
        perf = estimate_rho_eta(counts)
    return posterior_mixed(counts, perf, grids=grids)


def _plan_params(body) -> PlanParams:
    return PlanParams(
        alpha=body.alpha,
        rho=body.rho,
        eta=body.eta,
        gamma=body.gamma,
        n_phi=getattr(body, "n_phi", 0),
        n_M=getattr(body, "n_M", 0),
        n_rho_eta=body.n_rho_eta,
        psi=body.psi,
        rho_eta_mode=body.rho_eta_mode,
        grids=_effective_grid(body.grid, _PLAN_GRID_DEFAULT),
    )


def create_app() -> FastAPI:
    app = FastAPI(title="noisyeval", version=__version__, docs_url=None, redoc_url=None)

    origins = [o.strip() for o in os.environ.get("CORS_ORIGIN", "*").split(",") if o.strip()]
    app.add_middleware(
        CORSMiddleware,
        allow_origins=origins,
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["X-Effective-Grid"],
    )

    @app.exception_handler(RequestValidationError)
    async def _on_validation(request: Request, exc: RequestValidationError):
        parts = []
        for err in exc.errors():
            loc = ".".join(str(p) for p in err.get("loc", ()) if p != "body")
            parts.append(f"{loc}: {err.get('msg', 'invalid')}" if loc else err.get("msg", ""))
        return _error(400, "validation_error", "; ".join(parts) or "invalid request body")

    @app.exception_handler(UndefinedEstimatorError)
    async def _on_undefined(request: Request, exc: UndefinedEstimatorError):
        return _error(422, "undefined_estimator", str(exc))

    @app.exception_handler(DomainError)
    async def _on_domain(request: Request, exc: DomainError):
        return _error(422, "invalid_parameters", str(exc))

    @app.exception_handler(DataError)
    async def _on_data(request: Request, exc: DataError):
        return _error(422, "invalid_parameters", str(exc))

    @app.exception_handler(ContractViolationError)
    async def _on_contract(request: Request, exc: ContractViolationError):
        return _error(422, "invalid_parameters", str(exc))

    @app.exception_handler(NumericError)
    async def _on_numeric(request: Request, exc: NumericError):
        return _error(500, "numeric_failure", str(exc))

    @app.get("/v1/health")
    async def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/estimate")
    def estimate(body: EstimateBody):
        grids = _effective_grid(body.grid, _ESTIMATE_GRID_DEFAULT)
        post = _posterior_from_body(body, grids)
        return _ok(post.to_dict(), grids)

    @app.post("/v1/compare")
    def compare(body: CompareBody):
        grids_a = _effective_grid(body.a.grid, _ESTIMATE_GRID_DEFAULT)
        grids_b = _effective_grid(body.b.grid, _ESTIMATE_GRID_DEFAULT)
        post_a = _posterior_from_body(body.a, grids_a)
        post_b = _posterior_from_body(body.b, grids_b)
        ids = body.system_ids or ("system_1", "system_2")
        result = compare_systems(post_a, post_b, gamma=body.gamma, system_ids=ids)
        return _ok(result.to_dict(), grids_a)

    @app.post("/v1/plan")
    def plan(body: PlanBody):
        if (body.target_epsilon is None) != (body.free is None):
            raise DomainError("target_epsilon and free must be provided together")
        params = _plan_params(body)
        if body.target_epsilon is None:
            result = {"epsilon": epsilon_sim(params), "disclaimer": PLAN_DISCLAIMER}
        else:
            found = min_samples(body.target_epsilon, params, body.free)
            result = found.to_dict()
            result["disclaimer"] = PLAN_DISCLAIMER
        return _ok(result, params.grids)

    @app.post("/v1/plan/table")
    def plan_table_endpoint(body: PlanTableBody):
        if not 1 <= len(body.phi_values) <= MAX_TABLE_AXIS:
            return _error(
                400, "validation_error",
                f"phi_values must have 1 to {MAX_TABLE_AXIS} entries, got {len(body.phi_values)}",
            )
        if not 1 <= len(body.m_values) <= MAX_TABLE_AXIS:
            return _error(
                400, "validation_error",
                f"m_values must have 1 to {MAX_TABLE_AXIS} entries, got {len(body.m_values)}",
            )
        params = _plan_params(body)
        budget_ms = float(os.environ.get("COMPUTE_BUDGET_MS", DEFAULT_COMPUTE_BUDGET_MS))
        started = time.monotonic()
        # Cell by cell (same order as the library's table builder) so the
        # budget can be checked between cells.
        table = []
        for n_phi in body.phi_values:
            row = []
            for n_m in body.m_values:
                if (time.monotonic() - started) * 1000.0 > budget_ms:
                    return _error(
                        408, "compute_budget_exceeded",
                        f"table exceeded the {budget_ms:.0f} ms compute budget",
                    )
                row.append(epsilon_sim(replace(params, n_phi=n_phi, n_M=n_m)))
            table.append(row)
        result = {
            "phi_values": body.phi_values,
            "m_values": body.m_values,
            "epsilon": table,
            "disclaimer": PLAN_DISCLAIMER,
        }
        return _ok(result, params.grids)

    @app.post("/v1/binarize")
    def binarize(body: BinarizeBody):
        samples = [
            ScoredSample(
                input_id=s.input_id,
                output_id=s.output_id,
                system_id=s.system_id,
                score=s.score,
                gold=s.gold,
            )
            for s in body.samples
        ]
        tau, rho_hat, eta_hat = select_threshold(samples, pool=body.pool)
        points = roc_points(samples)
        result = {
            "tau": tau if math.isfinite(tau) else None,
            "rho": rho_hat,
            "eta": eta_hat,
            "roc": [pt.to_dict() for pt in points],
        }
        return _ok(result)

    return app


app = create_app()


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host="127.0.0.1", port=int(os.environ.get("PORT", "8000")))
