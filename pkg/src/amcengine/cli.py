"""Command-line front end.

Subcommands price one product (price-parallel, price-lsm, price-fd,
price-european), reproduce the benchmark table (table), or run a
convergence study (converge).  Configuration comes from built-in
defaults, then a flat key=value file (--config), then --key=value
flags, then the AMC_SEED environment variable, later sources winning.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import dataclass

from .diagnostics import AXES, ConvergenceStudy, estimate_rate, run_convergence_study
from .errors import ConfigError, NumericalError
from .lsm import LsmConfig, price_lsm
from .market import ExerciseSchedule, MarketParams
from .oracle import (
    FdGrid,
    american_put_fd,
    american_put_fd_bermudan,
    european_put_closed_form,
)
from .parallel import (
    BOOTSTRAP_EUROPEAN,
    IterationPlan,
    WeightScheme,
    price_parallel,
)
from .payoff import PutPayoff
from .regression import DEFAULT_RIDGE, BasisSpec, load_warm_start, save_warm_start
from .results import PricingResult

COMMANDS = (
    "price-parallel",
    "price-lsm",
    "price-fd",
    "price-european",
    "table",
    "converge",
)

TABLE_SPOTS = (36.0, 38.0, 40.0, 42.0, 44.0)
TABLE_VOLS = (0.2, 0.4)
TABLE_MATURITIES = (1.0, 2.0)

TABLE_CSV_COLUMNS = [
    "spot",
    "vol",
    "maturity",
    "fd_american",
    "lsm_price",
    "lsm_se",
    "parallel_price",
    "parallel_se",
    "european",
    "premium_fd",
    "premium_lsm",
    "premium_parallel",
    "diff_fd_lsm",
    "diff_fd_parallel",
    "diff_lsm_parallel",
]


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_opt_float(text: str) -> float | None:
    if text.strip().lower() in ("auto", "none", ""):
        return None
    return float(text)


def _parse_points(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ValueError(f"not a comma-separated integer list: {text!r}") from exc


@dataclass(frozen=True)
class _Key:
    parse: object
    default: object
    help: str


# Flat config schema; every key doubles as a --key=value flag.
KEYS: dict[str, _Key] = {
    "spot": _Key(float, 36.0, "underlying spot price"),
    "strike": _Key(float, 40.0, "put strike"),
    "rate": _Key(float, 0.06, "risk-free rate (continuous compounding)"),
    "vol": _Key(float, 0.2, "volatility"),
    "maturity": _Key(float, 1.0, "maturity in years"),
    "dates_per_year": _Key(int, 50, "exercise dates per year"),
    "paths": _Key(int, 100_000, "total Monte Carlo paths N"),
    "iterations": _Key(int, 100, "parallel-engine iterations n (N divisible by n)"),
    "group_size": _Key(int, 10, "exercise dates per regression block D"),
    "lam": _Key(float, 2.0, "normal-equation decay amplitude"),
    "mu": _Key(float, 2.0, "normal-equation decay scale"),
    "nu": _Key(float, 0.99, "price-weight ramp rate"),
    "beta": _Key(_parse_opt_float, None, "boundary Gaussian width (auto = 0.2 * strike)"),
    "beta_shrink": _Key(float, 1.0, "per-iteration multiplier on beta, in (0, 1]"),
    "boundary_weights": _Key(_parse_bool, True, "localize regressions around the boundary"),
    "seed": _Key(int, 0, "master seed (AMC_SEED env overrides)"),
    "workers": _Key(int, 1, "worker threads inside the engine"),
    "max_batch": _Key(int, 8192, "paths per kernel batch"),
    "ridge": _Key(float, DEFAULT_RIDGE, "ridge factor for the normal equations"),
    "bootstrap": _Key(str, "european", "iteration-1 policy: european | warm"),
    "warm_start": _Key(str, "", "warm-start coefficient JSON (bootstrap=warm)"),
    "save_coefficients": _Key(str, "", "write final coefficients JSON here"),
    "fd_time_steps": _Key(int, 40_000, "finite-difference time steps"),
    "fd_space_steps": _Key(int, 1000, "finite-difference space steps"),
    "fd_smax": _Key(_parse_opt_float, None, "grid upper bound (auto = 4 * strike)"),
    "fd_method": _Key(str, "projection", "constraint handling: projection | psor"),
    "psor_omega": _Key(float, 1.2, "PSOR relaxation factor"),
    "psor_tol": _Key(_parse_opt_float, None, "PSOR tolerance (auto = 1e-8 * strike)"),
    "psor_max_iter": _Key(int, 2000, "PSOR sweep limit per time step"),
    "fd_exercise": _Key(str, "american", "fd constraint dates: american | bermudan"),
    "axis": _Key(str, "paths", "converge axis: paths | iterations | workers"),
    "points": _Key(_parse_points, (10_000, 40_000, 160_000), "converge sample points"),
    "repeats": _Key(int, 5, "converge repeats per point"),
    "out": _Key(str, "", "output directory for artifacts (empty = stdout only)"),
    "format": _Key(str, "text", "stdout format: text | json | csv"),
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    spot: float
    strike: float
    rate: float
    vol: float
    maturity: float
    dates_per_year: int
    paths: int
    iterations: int
    group_size: int
    lam: float
    mu: float
    nu: float
    beta: float | None
    beta_shrink: float
    boundary_weights: bool
    seed: int
    workers: int
    max_batch: int
    ridge: float
    bootstrap: str
    warm_start: str
    save_coefficients: str
    fd_time_steps: int
    fd_space_steps: int
    fd_smax: float | None
    fd_method: str
    psor_omega: float
    psor_tol: float | None
    psor_max_iter: int
    fd_exercise: str
    axis: str
    points: tuple[int, ...]
    repeats: int
    out: str
    format: str


def parse_kv_file(path: str) -> dict[str, str]:
    """Flat `key = value` lines; blank lines and # comments ignored."""
    values: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
                key, _, value = line.partition("=")
                values[key.strip()] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return values


def _convert(key: str, raw: str):
    try:
        return KEYS[key].parse(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config key {key}: {exc}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="amc",
        description="American put pricing: iterative parallel Monte Carlo engine, "
        "Longstaff-Schwartz baseline, and PDE/closed-form references.",
        epilog="exit codes: 0 success, 2 configuration error, 3 numerical failure",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", default=None, help="flat key=value config file")
    for key, spec in KEYS.items():
        parser.add_argument(
            f"--{key}",
            dest=key,
            default=argparse.SUPPRESS,
            metavar="V",
            help=f"{spec.help} (default: {spec.default})",
        )
    return parser


def parse_config(argv: list[str]) -> RunConfig:
    """Resolve defaults, config file, flags, and AMC_SEED into a RunConfig."""
    parser = _build_parser()
    ns = parser.parse_args(argv)

    resolved = {key: spec.default for key, spec in KEYS.items()}
    if ns.config is not None:
        for key, raw in parse_kv_file(ns.config).items():
            if key not in KEYS:
                raise ConfigError(f"unknown config key {key!r} in {ns.config}")
            resolved[key] = _convert(key, raw)
    for key in KEYS:
        if hasattr(ns, key):
            resolved[key] = _convert(key, getattr(ns, key))
    env_seed = os.environ.get("AMC_SEED")
    if env_seed is not None:
        try:
            resolved["seed"] = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"AMC_SEED must be an integer, got {env_seed!r}") from exc

    cfg = RunConfig(command=ns.command, **resolved)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.seed < 0:
        raise ConfigError(f"config key seed: must be non-negative, got {cfg.seed}")
    if cfg.workers < 1:
        raise ConfigError(f"config key workers: must be >= 1, got {cfg.workers}")
    if cfg.bootstrap not in ("european", "warm"):
        raise ConfigError(f"config key bootstrap: must be european or warm, got {cfg.bootstrap!r}")
    if cfg.bootstrap == "warm" and not cfg.warm_start:
        raise ConfigError("config key warm_start: required when bootstrap=warm")
    if cfg.fd_method not in ("projection", "psor"):
        raise ConfigError(f"config key fd_method: must be projection or psor, got {cfg.fd_method!r}")
    if cfg.fd_exercise not in ("american", "bermudan"):
        raise ConfigError(
            f"config key fd_exercise: must be american or bermudan, got {cfg.fd_exercise!r}"
        )
    if cfg.axis not in AXES:
        raise ConfigError(f"config key axis: must be one of {AXES}, got {cfg.axis!r}")
    if cfg.format not in ("text", "json", "csv"):
        raise ConfigError(f"config key format: must be text, json or csv, got {cfg.format!r}")
    if cfg.repeats < 1:
        raise ConfigError(f"config key repeats: must be >= 1, got {cfg.repeats}")
    if cfg.command in ("price-parallel", "table") and cfg.paths % cfg.iterations != 0:
        raise ConfigError(
            f"config key paths: {cfg.paths} not divisible by iterations={cfg.iterations}"
        )
    if cfg.command == "converge":
        totals = cfg.points if cfg.axis == "paths" else (cfg.paths,)
        iters = cfg.points if cfg.axis == "iterations" else (cfg.iterations,)
        for total in totals:
            for n_iter in iters:
                if total % n_iter != 0:
                    raise ConfigError(
                        f"config key points: total paths {total} not divisible "
                        f"by iterations {n_iter}"
                    )
    # Constructor checks below name their field, which matches the key name.
    MarketParams(spot=cfg.spot, rate=cfg.rate, vol=cfg.vol)
    PutPayoff(strike=cfg.strike)
    ExerciseSchedule.from_dates_per_year(cfg.maturity, cfg.dates_per_year)
    WeightScheme(
        lam=cfg.lam,
        mu=cfg.mu,
        nu=cfg.nu,
        beta=cfg.beta,
        beta_shrink=cfg.beta_shrink,
        boundary_weights=cfg.boundary_weights,
    )


def _market(cfg: RunConfig) -> tuple[MarketParams, PutPayoff, ExerciseSchedule]:
    return (
        MarketParams(spot=cfg.spot, rate=cfg.rate, vol=cfg.vol),
        PutPayoff(strike=cfg.strike),
        ExerciseSchedule.from_dates_per_year(cfg.maturity, cfg.dates_per_year),
    )


def _weights(cfg: RunConfig) -> WeightScheme:
    return WeightScheme(
        lam=cfg.lam,
        mu=cfg.mu,
        nu=cfg.nu,
        beta=cfg.beta,
        beta_shrink=cfg.beta_shrink,
        boundary_weights=cfg.boundary_weights,
    )


def _fd_grid(cfg: RunConfig) -> FdGrid:
    return FdGrid(
        n_time=cfg.fd_time_steps,
        n_space=cfg.fd_space_steps,
        s_max=cfg.fd_smax,
        method=cfg.fd_method,
        psor_omega=cfg.psor_omega,
        psor_tol=cfg.psor_tol,
        psor_max_iter=cfg.psor_max_iter,
    )


def emit_result(result: PricingResult, fmt: str) -> str:
    """Serialize one result: json/csv keep full precision, text is 3-decimal."""
    if fmt == "json":
        return json.dumps(result.to_dict(), indent=2)
    if fmt == "csv":
        buf = []
        buf.append("engine,price,standard_error,ci95_halfwidth,n_paths,wall_total_ms")
        total = result.wall_ms.get("total", math.nan)
        buf.append(
            f"{result.engine},{result.price!r},{result.standard_error!r},"
            f"{result.ci95_halfwidth!r},{result.n_paths},{total!r}"
        )
        return "\n".join(buf) + "\n"
    if fmt != "text":
        raise ConfigError(f"config key format: unknown format {fmt!r}")
    lines = [f"engine: {result.engine}"]
    if result.standard_error > 0.0:
        lines.append(f"price: {result.format_price()}")
        lines.append(f"95% CI: +-{1.96 * result.standard_error:.4f}")
    else:
        lines.append(f"price: {result.price:.3f}")
    if result.n_paths:
        lines.append(f"paths: {result.n_paths}")
    phases = ", ".join(f"{k} {v:.1f}" for k, v in result.wall_ms.items())
    lines.append(f"wall ms: {phases}")
    return "\n".join(lines) + "\n"


def _ensure_out(cfg: RunConfig) -> str | None:
    if not cfg.out:
        return None
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _write_result_artifacts(cfg: RunConfig, result: PricingResult) -> None:
    out = _ensure_out(cfg)
    if out is None:
        return
    _write(os.path.join(out, "result.json"), emit_result(result, "json") + "\n")
    if result.trace:
        rows = ["iteration,running_price,running_se,boundary_mid,wall_ms"]
        for row in result.trace:
            rows.append(
                f"{row.iteration},{row.running_price!r},{row.running_se!r},"
                f"{row.boundary_mid!r},{row.wall_ms!r}"
            )
        _write(os.path.join(out, "trace.csv"), "\n".join(rows) + "\n")
    if result.boundary:
        rows = ["time,boundary"]
        for t, b in result.boundary:
            rows.append(f"{t!r},{b!r}")
        _write(os.path.join(out, "boundary.csv"), "\n".join(rows) + "\n")


def cmd_price_parallel(cfg: RunConfig) -> int:
    params, payoff, schedule = _market(cfg)
    basis = BasisSpec.blocked(schedule.n_dates, min(cfg.group_size, schedule.n_dates))
    if cfg.bootstrap == "warm":
        bootstrap = load_warm_start(cfg.warm_start, basis)
    else:
        bootstrap = BOOTSTRAP_EUROPEAN
    result = price_parallel(
        params,
        payoff,
        schedule,
        IterationPlan(cfg.paths, cfg.iterations),
        _weights(cfg),
        basis,
        seed=cfg.seed,
        bootstrap=bootstrap,
        workers=cfg.workers,
        max_batch=cfg.max_batch,
        ridge=cfg.ridge,
    )
    if cfg.save_coefficients:
        from .regression import CoefficientSet

        save_warm_start(
            CoefficientSet.from_json_dict(result.coefficients, basis),
            cfg.save_coefficients,
        )
    sys.stdout.write(emit_result(result, cfg.format))
    _write_result_artifacts(cfg, result)
    return 0


def cmd_price_lsm(cfg: RunConfig) -> int:
    params, payoff, schedule = _market(cfg)
    result = price_lsm(
        params,
        payoff,
        schedule,
        LsmConfig(
            n_paths=cfg.paths,
            seed=cfg.seed,
            ridge=cfg.ridge,
            parallel_paths=cfg.workers > 1,
            workers=cfg.workers,
        ),
    )
    sys.stdout.write(emit_result(result, cfg.format))
    _write_result_artifacts(cfg, result)
    return 0


def cmd_price_fd(cfg: RunConfig) -> int:
    params, payoff, schedule = _market(cfg)
    grid = _fd_grid(cfg)
    t0 = time.perf_counter()
    if cfg.fd_exercise == "bermudan":
        solution = american_put_fd_bermudan(params, payoff, schedule, grid)
    else:
        solution = american_put_fd(params, payoff, cfg.maturity, grid)
    wall = 1e3 * (time.perf_counter() - t0)
    result = PricingResult(
        engine="fd",
        price=solution.price,
        standard_error=0.0,
        n_paths=0,
        wall_ms={"total": wall},
        config={
            "spot": cfg.spot,
            "strike": cfg.strike,
            "rate": cfg.rate,
            "vol": cfg.vol,
            "maturity": cfg.maturity,
            "fd_time_steps": cfg.fd_time_steps,
            "fd_space_steps": cfg.fd_space_steps,
            "fd_smax": grid.s_max if grid.s_max is not None else 4.0 * cfg.strike,
            "fd_method": cfg.fd_method,
            "fd_exercise": cfg.fd_exercise,
        },
        boundary=list(zip(solution.boundary_times.tolist(), solution.boundary.tolist())),
    )
    sys.stdout.write(emit_result(result, cfg.format))
    _write_result_artifacts(cfg, result)
    return 0


def cmd_price_european(cfg: RunConfig) -> int:
    params, payoff, _ = _market(cfg)
    price = european_put_closed_form(params, payoff, cfg.maturity)
    result = PricingResult(
        engine="european",
        price=price,
        standard_error=0.0,
        n_paths=0,
        wall_ms={"total": 0.0},
        config={
            "spot": cfg.spot,
            "strike": cfg.strike,
            "rate": cfg.rate,
            "vol": cfg.vol,
            "maturity": cfg.maturity,
        },
    )
    sys.stdout.write(emit_result(result, cfg.format))
    _write_result_artifacts(cfg, result)
    return 0


def _table_cell(cfg: RunConfig, spot: float, vol: float, maturity: float) -> dict:
    params = MarketParams(spot=spot, rate=cfg.rate, vol=vol)
    payoff = PutPayoff(strike=cfg.strike)
    schedule = ExerciseSchedule.from_dates_per_year(maturity, cfg.dates_per_year)
    basis = BasisSpec.blocked(schedule.n_dates, min(cfg.group_size, schedule.n_dates))
    fd = american_put_fd(params, payoff, maturity, _fd_grid(cfg)).price
    euro = european_put_closed_form(params, payoff, maturity)
    lsm = price_lsm(
        params,
        payoff,
        schedule,
        LsmConfig(n_paths=cfg.paths, seed=cfg.seed, ridge=cfg.ridge),
    )
    par = price_parallel(
        params,
        payoff,
        schedule,
        IterationPlan(cfg.paths, cfg.iterations),
        _weights(cfg),
        basis,
        seed=cfg.seed,
        workers=cfg.workers,
        max_batch=cfg.max_batch,
        ridge=cfg.ridge,
        keep_trace=False,
    )
    return {
        "spot": spot,
        "vol": vol,
        "maturity": maturity,
        "fd_american": fd,
        "lsm_price": lsm.price,
        "lsm_se": lsm.standard_error,
        "parallel_price": par.price,
        "parallel_se": par.standard_error,
        "european": euro,
        "premium_fd": fd - euro,
        "premium_lsm": lsm.price - euro,
        "premium_parallel": par.price - euro,
        "diff_fd_lsm": fd - lsm.price,
        "diff_fd_parallel": fd - par.price,
        "diff_lsm_parallel": lsm.price - par.price,
    }


def format_table_text(rows: list[dict]) -> str:
    header = (
        f"{'S':>4} {'vol':>5} {'T':>3} {'FD':>8} {'LSM':>8} {'(se)':>7} "
        f"{'Parallel':>9} {'(se)':>7} {'Euro':>8} {'FD-LSM':>8} {'FD-Par':>8}"
    )
    lines = [header, "-" * len(header)]
    for r in rows:
        if math.isnan(r["lsm_price"]):
            lines.append(
                f"{r['spot']:>4.0f} {r['vol']:>5.2f} {r['maturity']:>3.0f} "
                f"{r['fd_american']:>8.3f} {'failed':>8} {'':>7} {'failed':>9}"
            )
            continue
        lines.append(
            f"{r['spot']:>4.0f} {r['vol']:>5.2f} {r['maturity']:>3.0f} "
            f"{r['fd_american']:>8.3f} {r['lsm_price']:>8.3f} "
            f"({r['lsm_se']:.3f}) {r['parallel_price']:>9.3f} ({r['parallel_se']:.3f}) "
            f"{r['european']:>8.3f} {r['diff_fd_lsm']:>8.3f} {r['diff_fd_parallel']:>8.3f}"
        )
    return "\n".join(lines) + "\n"


def cmd_table(cfg: RunConfig) -> int:
    rows = []
    failures = 0
    for maturity in TABLE_MATURITIES:
        for vol in TABLE_VOLS:
            for spot in TABLE_SPOTS:
                try:
                    rows.append(_table_cell(cfg, spot, vol, maturity))
                except NumericalError as exc:
                    failures += 1
                    sys.stderr.write(
                        f"cell (S={spot}, vol={vol}, T={maturity}) failed: {exc}\n"
                    )
                    rows.append(
                        {
                            col: (
                                spot
                                if col == "spot"
                                else vol
                                if col == "vol"
                                else maturity
                                if col == "maturity"
                                else math.nan
                            )
                            for col in TABLE_CSV_COLUMNS
                        }
                    )
    rows.sort(key=lambda r: (r["spot"], r["vol"], r["maturity"]))
    sys.stdout.write(format_table_text(rows))
    out = _ensure_out(cfg)
    if out is not None:
        with open(os.path.join(out, "table.csv"), "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=TABLE_CSV_COLUMNS)
            writer.writeheader()
            for r in rows:
                writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return 3 if failures else 0


def cmd_converge(cfg: RunConfig) -> int:
    params, payoff, schedule = _market(cfg)
    study = ConvergenceStudy(axis=cfg.axis, points=cfg.points, repeats=cfg.repeats)
    filled = run_convergence_study(
        study,
        params,
        payoff,
        schedule,
        n_paths=cfg.paths,
        n_iterations=cfg.iterations,
        group_size=cfg.group_size,
        weights=_weights(cfg),
        seed=cfg.seed,
        workers=cfg.workers,
        max_batch=cfg.max_batch,
        ridge=cfg.ridge,
    )
    lines = [f"axis: {cfg.axis}"]
    for s in filled.point_summaries():
        se = "" if math.isnan(s.se_empirical) else f"  se_emp {s.se_empirical:.5f}"
        lines.append(
            f"{cfg.axis}={s.axis_value}: price {s.mean_price:.4f}{se}"
            f"  se_int {s.se_internal_mean:.5f}  wall {s.mean_wall_ms:.0f} ms"
        )
    rate = estimate_rate(filled)
    lines.append(f"log-log slope of s.e.: {rate.slope:.3f} (+- {rate.slope_se:.3f})")
    sys.stdout.write("\n".join(lines) + "\n")
    out = _ensure_out(cfg)
    if out is not None:
        filled.to_csv(os.path.join(out, "converge.csv"))
        for cell in filled.cells:
            if cell.trace is None:
                continue
            rows = ["iteration,running_price,running_se,boundary_mid,wall_ms"]
            for row in cell.trace:
                rows.append(
                    f"{row.iteration},{row.running_price!r},{row.running_se!r},"
                    f"{row.boundary_mid!r},{row.wall_ms!r}"
                )
            name = f"converge_trace_{cfg.axis}_{cell.axis_value}_r{cell.repeat}.csv"
            _write(os.path.join(out, name), "\n".join(rows) + "\n")
    return 0


_DISPATCH = {
    "price-parallel": cmd_price_parallel,
    "price-lsm": cmd_price_lsm,
    "price-fd": cmd_price_fd,
    "price-european": cmd_price_european,
    "table": cmd_table,
    "converge": cmd_converge,
}


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    try:
        return _DISPATCH[cfg.command](cfg)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 3
    except BrokenPipeError:
        # Downstream consumer (e.g. head) closed stdout; not an error.
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
