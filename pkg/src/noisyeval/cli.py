"""Command-line interface.

Subcommands: estimate, compare, plan, table, binarize, serve. Every run
prints a single JSON document to stdout whose "config" block echoes the
fully-resolved invocation; re-running an echoed config reproduces the
output byte for byte (grids are fixed sizes, nothing is random).
Diagnostics and warnings go to stderr.

Exit codes: 0 success, 2 flag/usage errors, 3 data errors, 4 numeric
failures.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional, Sequence

from . import __version__
from .binarize import roc_points, roc_to_csv, select_threshold
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
from .exceptions import DataError, DomainError, NumericError
from .ingest import load_ratings, load_scored_samples, summarize
from .planner import (
    PLAN_DISCLAIMER,
    PlanParams,
    epsilon_sim,
    format_table,
    min_samples,
    plan_table,
    table_to_csv,
)
from .significance import compare_systems

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

_ESTIMATE_MODES = ("free", "known", "estimated", "mixed")


def _probability_flag(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a probability in [0, 1], got {text}")
    return value


def _gamma_flag(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"gamma must lie strictly inside (0, 1), got {text}")
    return value


def _count_flag(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative count, got {text}")
    return value


def _grid_flag(text: str) -> GridConfig:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected N_ALPHA,N_RHO,N_ETA (three comma-separated integers), got {text!r}"
        )
    try:
        n_alpha, n_rho, n_eta = (int(p) for p in parts)
        return GridConfig(n_alpha, n_rho, n_eta)
    except (ValueError, DomainError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _count_list_flag(text: str) -> list[int]:
    try:
        values = [int(p) for p in text.split(",") if p != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None
    if not values or any(v < 0 for v in values):
        raise argparse.ArgumentTypeError(f"expected non-negative counts, got {text!r}")
    return values


def _grid_dict(grids: GridConfig) -> dict:
    return {"n_alpha": grids.n_alpha, "n_rho": grids.n_rho, "n_eta": grids.n_eta}


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _posterior_from_ratings(
    path: str,
    system: Optional[str],
    metric: Optional[str],
    mode: str,
    rho: Optional[float],
    eta: Optional[float],
    grids: GridConfig,
) -> tuple[AlphaPosterior, CountSummary]:
    records = load_ratings(path)
    counts = summarize(records, metric_source=metric, system=system)
    if mode == "free":
        return estimate_error_free(counts.n_plus, counts.n_phi), counts
    if mode == "known":
        post = estimate_known_rho_eta(
            counts.m_plus, counts.n_M, rho, eta, n_bins=grids.n_alpha
        )
        return post, counts
    if mode == "estimated":
        perf = estimate_rho_eta(counts, metric_id=metric or "", system_id=system or "")
        post = posterior_marginal(
            counts.m_plus,
            counts.n_M,
            discretize(perf.rho, grids.n_rho),
            discretize(perf.eta, grids.n_eta),
            discretize(BetaParams(1.0, 1.0), grids.n_alpha),
        )
        return post, counts
    if rho is not None and eta is not None:
        perf = MetricPerformance(rho=rho, eta=eta)
    else:
        perf = estimate_rho_eta(counts, metric_id=metric or "", system_id=system or "")
    return posterior_mixed(counts, perf, grids=grids), counts


def _cmd_estimate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.mode == "known" and (args.rho is None or args.eta is None):
        parser.error("--mode known requires both --rho and --eta")
    post, counts = _posterior_from_ratings(
        args.ratings, args.system, args.metric, args.mode, args.rho, args.eta, args.grid
    )
    sys.stderr.write(
        f"mode={post.mode:.4f} mean={post.mean:.4f} variance={post.variance:.3e} "
        f"(n_phi={counts.n_phi}, n_M={counts.n_M})\n"
    )
    _emit(
        {
            "config": {
                "subcommand": "estimate",
                "ratings": args.ratings,
                "system": args.system,
                "metric": args.metric,
                "mode": args.mode,
                "rho": args.rho,
                "eta": args.eta,
                "grid": _grid_dict(args.grid),
            },
            "counts": counts.to_dict(),
            "result": post.to_dict(),
        }
    )
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    posts = []
    for system in (args.system_a, args.system_b):
        post, _ = _posterior_from_ratings(
            args.ratings, system, args.metric, args.mode, args.rho, args.eta, args.grid
        )
        posts.append(post)
    result = compare_systems(
        posts[0], posts[1], gamma=args.gamma, system_ids=(args.system_a, args.system_b)
    )
    verdict = "significant" if result.significant else "not significant"
    sys.stderr.write(
        f"{args.system_a} vs {args.system_b}: epsilon_hat={result.epsilon_hat:+.3f}, "
        f"P={result.prob_greater:.3f}: {verdict} at gamma={args.gamma}\n"
    )
    _emit(
        {
            "config": {
                "subcommand": "compare",
                "ratings": args.ratings,
                "system_a": args.system_a,
                "system_b": args.system_b,
                "metric": args.metric,
                "mode": args.mode,
                "rho": args.rho,
                "eta": args.eta,
                "gamma": args.gamma,
                "grid": _grid_dict(args.grid),
            },
            "result": result.to_dict(),
        }
    )
    return EXIT_OK


def _plan_params(args: argparse.Namespace) -> PlanParams:
    return PlanParams(
        alpha=args.alpha,
        rho=args.rho,
        eta=args.eta,
        gamma=args.gamma,
        n_phi=args.n_phi,
        n_M=args.n_m,
        n_rho_eta=args.n_rho_eta,
        psi=args.psi,
        rho_eta_mode=args.mode,
        grids=args.grid,
    )


def _cmd_plan(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if (args.target_eps is None) != (args.free is None):
        parser.error("--target-eps and --free must be given together")
    params = _plan_params(args)
    config = {
        "subcommand": "plan",
        **params.to_dict(),
        "target_eps": args.target_eps,
        "free": args.free,
    }
    if args.target_eps is None:
        eps = epsilon_sim(params)
        result = {"epsilon": eps, "disclaimer": PLAN_DISCLAIMER}
    else:
        found = min_samples(args.target_eps, params, args.free)
        result = found.to_dict()
        result["disclaimer"] = PLAN_DISCLAIMER
    _emit({"config": config, "result": result})
    return EXIT_OK


def _cmd_table(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    params = _plan_params(args)
    table = plan_table(params, args.phi_values, args.m_values)
    csv_text = table_to_csv(table, args.phi_values, args.m_values)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    if args.format == "csv":
        sys.stdout.write(csv_text)
        return EXIT_OK
    if args.format == "text":
        sys.stdout.write(format_table(table, args.phi_values, args.m_values) + "\n")
        return EXIT_OK
    _emit(
        {
            "config": {
                "subcommand": "table",
                **params.to_dict(),
                "phi_values": args.phi_values,
                "m_values": args.m_values,
                "out": args.out,
            },
            "result": {
                "phi_values": args.phi_values,
                "m_values": args.m_values,
                "epsilon": [[float(v) for v in row] for row in table],
                "disclaimer": PLAN_DISCLAIMER,
            },
        }
    )
    return EXIT_OK


def _cmd_binarize(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    samples = load_scored_samples(args.scores)
    if args.system is not None:
        samples = [s for s in samples if s.system_id == args.system]
        if not samples:
            raise DataError(f"no scored samples for system {args.system!r}")
    tau, rho_hat, eta_hat = select_threshold(samples, pool=args.pool)
    points = roc_points(samples)
    if args.roc_out:
        with open(args.roc_out, "w", encoding="utf-8") as fh:
            fh.write(roc_to_csv(points))
    _emit(
        {
            "config": {
                "subcommand": "binarize",
                "scores": args.scores,
                "system": args.system,
                "pool": args.pool,
                "roc_out": args.roc_out,
            },
            "result": {
                "tau": tau if math.isfinite(tau) else None,
                "rho": rho_hat,
                "eta": eta_hat,
                "roc": [pt.to_dict() for pt in points],
            },
        }
    )
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    import socket

    import uvicorn

    from .service import create_app

    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind((args.host, args.port))
    host, port = sock.getsockname()[:2]
    _emit({"config": {"subcommand": "serve"}, "address": f"http://{host}:{port}"})
    sys.stdout.flush()
    config = uvicorn.Config(create_app(), log_level="warning")
    server = uvicorn.Server(config)
    server.run(sockets=[sock])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisyeval",
        description=(
            "Estimate text-generation success rates from mixed human and "
            "noisy-metric ratings; test significance; plan rating campaigns."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    est = sub.add_parser("estimate", help="posterior for one system's success rate")
    est.add_argument("--ratings", required=True, help="rating file (JSONL or CSV)")
    est.add_argument("--system", default=None, help="system id (default: the only one present)")
    est.add_argument("--metric", default=None, help="metric source id")
    est.add_argument("--mode", choices=_ESTIMATE_MODES, default="mixed")
    est.add_argument("--rho", type=_probability_flag, default=None)
    est.add_argument("--eta", type=_probability_flag, default=None)
    est.add_argument("--grid", type=_grid_flag, default=GridConfig(), metavar="NA,NR,NE")
    est.set_defaults(func=_cmd_estimate)

    cmp_ = sub.add_parser("compare", help="significance test between two systems")
    cmp_.add_argument("--ratings", required=True)
    cmp_.add_argument("--system-a", required=True)
    cmp_.add_argument("--system-b", required=True)
    cmp_.add_argument("--metric", default=None)
    cmp_.add_argument("--mode", choices=_ESTIMATE_MODES, default="mixed")
    cmp_.add_argument("--rho", type=_probability_flag, default=None)
    cmp_.add_argument("--eta", type=_probability_flag, default=None)
    cmp_.add_argument("--gamma", type=_gamma_flag, default=0.05)
    cmp_.add_argument("--grid", type=_grid_flag, default=GridConfig(), metavar="NA,NR,NE")
    cmp_.set_defaults(func=_cmd_compare)

    def add_plan_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--alpha", type=_probability_flag, required=True)
        p.add_argument("--rho", type=_probability_flag, required=True)
        p.add_argument("--eta", type=_probability_flag, required=True)
        p.add_argument("--gamma", type=_gamma_flag, default=0.05)
        p.add_argument("--n-phi", type=_count_flag, default=0)
        p.add_argument("--n-m", type=_count_flag, default=0)
        p.add_argument(
            "--n-rho-eta", type=_count_flag, default=None,
            help="gold-labeled set size (default: n-phi)",
        )
        p.add_argument(
            "--psi", type=_probability_flag, default=None,
            help="gold-positive proportion (default: alpha)",
        )
        p.add_argument("--mode", choices=("provided", "estimated"), default="estimated")
        p.add_argument(
            "--grid", type=_grid_flag, default=GridConfig(500, 200, 200), metavar="NA,NR,NE"
        )

    plan = sub.add_parser("plan", help="simulated epsilon or minimal sample count")
    add_plan_flags(plan)
    plan.add_argument("--target-eps", type=_probability_flag, default=None)
    plan.add_argument(
        "--free", choices=("n-phi", "n-m", "n-rho-eta", "n_phi", "n_M", "n_rho_eta"),
        default=None, help="which count to search when --target-eps is given",
    )
    plan.set_defaults(func=_cmd_plan)

    table = sub.add_parser("table", help="epsilon table over (n_phi, n_M) axes")
    add_plan_flags(table)
    table.add_argument("--phi-values", type=_count_list_flag, required=True, metavar="N1,N2,...")
    table.add_argument("--m-values", type=_count_list_flag, required=True, metavar="N1,N2,...")
    table.add_argument("--out", default=None, help="write the CSV grid to this file")
    table.add_argument("--format", choices=("json", "csv", "text"), default="json")
    table.set_defaults(func=_cmd_table)

    binz = sub.add_parser("binarize", help="select a binarization threshold from scores")
    binz.add_argument("--scores", required=True, help="scored-sample file (JSONL or CSV)")
    binz.add_argument("--system", default=None)
    binz.add_argument("--pool", action="store_true", help="pool several systems deliberately")
    binz.add_argument("--roc-out", default=None, help="write ROC points CSV to this file")
    binz.set_defaults(func=_cmd_binarize)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument(
        "--port", type=int, default=int(os.environ.get("PORT", "8000")),
        help="port to bind (0 for an ephemeral port; default from PORT env or 8000)",
    )
    serve.set_defaults(func=_cmd_serve)

    return parser


_FREE_ALIASES = {"n-phi": "n_phi", "n-m": "n_M", "n-rho-eta": "n_rho_eta"}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "free", None) in _FREE_ALIASES:
        args.free = _FREE_ALIASES[args.free]
    try:
        return args.func(args, parser)
    except NumericError as exc:
        sys.stderr.write(f"numeric error: {exc}\n")
        return EXIT_NUMERIC
    except (DataError, DomainError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
