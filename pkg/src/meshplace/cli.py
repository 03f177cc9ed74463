"""Command line entry point and experiment orchestration.

Subcommands::

    generate            write a random .region file
    solve               one Metropolis (or hill-climbing) run at a fixed router count
    reduce / run        router-count minimisation per seed, CSV + positions + PPM + summary
    compare-strategies  ``reduce`` for all three removal strategies on the same regions/seeds
    oracle              exhaustive optimum for a tiny instance
    render              PPM depth image of a recorded placement

Experiment settings come from built-in defaults, then an optional
``--config`` file of ``key = value`` lines (keys are the long flag names
without dashes, e.g. ``init-factor = 1.4``), then command-line flags.
"""

from __future__ import annotations

import argparse
import logging
import math
import random
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from meshplace.coverage import CoverState, connectivity_components, metrics
from meshplace.oracle import exhaustive_best
from meshplace.output import (
    emit_coverage_curve,
    format_positions,
    read_positions,
    render_depth_image,
    write_positions,
)
from meshplace.reduction import RemovalStrategy, optimize_router_count
from meshplace.region import (
    Region,
    RegionError,
    RegionGenParams,
    generate_region,
    load_region,
    save_region,
)
from meshplace.solver import (
    MoveConfig,
    SolverParams,
    init_placement,
    nr_init,
    nr_min,
    run_hillclimb,
    run_metropolis,
)

log = logging.getLogger("meshplace")


class ConfigError(ValueError):
    pass


def _pair(text: str, sep: str) -> tuple[int, int]:
    parts = str(text).lower().split(sep)
    if len(parts) != 2:
        raise ConfigError(f"expected two integers separated by {sep!r}, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ConfigError(f"expected two integers separated by {sep!r}, got {text!r}") from None


def _seeds(text: str) -> tuple[int, ...]:
    items = [s for s in str(text).replace(" ", "").split(",") if s]
    try:
        return tuple(int(s) for s in items)
    except ValueError:
        raise ConfigError(f"seeds must be comma-separated integers, got {text!r}") from None


def _threshold(text: str) -> float | None:
    if str(text).lower() in ("relative", "rel", "none"):
        return None
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"threshold must be 'relative' or a fraction, got {text!r}") from None


def _strategy(text: str) -> str:
    valid = [s.value for s in RemovalStrategy] + ["all"]
    if text not in valid:
        raise ConfigError(f"strategy must be one of {', '.join(valid)}; got {text!r}")
    return text


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    region: str | None = None
    grid: tuple[int, int] = (200, 200)
    interest_blobs: int = 12
    interest_radius: tuple[int, int] = (8, 20)
    prohibited_blobs: int = 5
    prohibited_radius: tuple[int, int] = (4, 10)
    radius: int = 8
    temp: float = 0.1
    nbtostop: int = 500
    init_factor: float = 1.4
    jump_probability: float = 0.2
    max_iterations: int = 1_000_000
    acceptance_form: str = "paper"
    strategy: str = "min-single"
    threshold: float | None = None
    curve_to_nr_min: bool = True
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5)
    output: str = "results"
    workers: int = 1

    def __post_init__(self):
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if self.threshold is not None and not 0.0 <= self.threshold <= 1.0:
            raise ConfigError("absolute threshold must lie in [0, 1]")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        _strategy(self.strategy)
        try:
            self.solver_params(0)
            if self.region is None:
                self.region_params(0)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def solver_params(self, seed: int) -> SolverParams:
        return SolverParams(
            T=self.temp,
            nbtostop=self.nbtostop,
            r=self.radius,
            init_factor=self.init_factor,
            seed=seed,
            move_config=MoveConfig(jump_probability=self.jump_probability),
            max_iterations=self.max_iterations,
            acceptance_form=self.acceptance_form,
        )

    def region_params(self, seed: int) -> RegionGenParams:
        return RegionGenParams(
            width=self.grid[0],
            height=self.grid[1],
            interest_blob_count=self.interest_blobs,
            interest_blob_radius_range=self.interest_radius,
            prohibited_blob_count=self.prohibited_blobs,
            prohibited_blob_radius_range=self.prohibited_radius,
            seed=seed,
        )

    def strategies(self) -> list[RemovalStrategy]:
        if self.strategy == "all":
            return list(RemovalStrategy)
        return [RemovalStrategy(self.strategy)]


CONVERTERS = {
    "region": str,
    "grid": lambda v: _pair(v, "x"),
    "interest_blobs": int,
    "interest_radius": lambda v: _pair(v, "-"),
    "prohibited_blobs": int,
    "prohibited_radius": lambda v: _pair(v, "-"),
    "radius": int,
    "temp": float,
    "nbtostop": int,
    "init_factor": float,
    "jump_probability": float,
    "max_iterations": int,
    "acceptance_form": str,
    "strategy": _strategy,
    "threshold": _threshold,
    "curve_to_nr_min": _bool,
    "seeds": _seeds,
    "output": str,
    "workers": int,
}
assert set(CONVERTERS) == {f.name for f in fields(ExperimentConfig)}


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONVERTERS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[key] = CONVERTERS[key](value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"config line {lineno}: {exc}") from None
    return values


def build_config(args: argparse.Namespace, **forced) -> ExperimentConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(parse_config_text(Path(args.config).read_text()))
    for name in CONVERTERS:
        cli_value = getattr(args, name, None)
        if cli_value is not None:
            values[name] = cli_value
    values.update(forced)
    return ExperimentConfig(**values)


def load_or_generate(config: ExperimentConfig, seed: int) -> Region:
    if config.region:
        return load_region(config.region)
    return generate_region(config.region_params(seed))


def _step_metric(report, count, attr):
    step = report.step_at(count)
    return None if step is None else getattr(step, attr)


def run_seed(config: ExperimentConfig, seed: int) -> list[dict]:
    """Everything for one seed; files are named by seed so workers never collide."""
    out = Path(config.output)
    region = load_or_generate(config, seed)
    save_region(region, out / f"seed{seed}.region")
    params = config.solver_params(seed)
    records = []
    for strategy in config.strategies():
        started = time.perf_counter()
        n_min = nr_min(region, params.r)
        report = optimize_router_count(
            region,
            params,
            strategy,
            threshold=config.threshold,
            rng=random.Random(seed),
            curve_floor=n_min if config.curve_to_nr_min else None,
        )
        stem = out / f"seed{seed}_{strategy.value}"
        emit_coverage_curve(report, stem.with_suffix(".csv"), seed)
        write_positions([s.placement for s in report.steps], stem.with_suffix(".positions"))
        final_state = CoverState.from_placement(region, report.placement)
        render_depth_image(region, final_state, stem.with_suffix(".ppm"))
        opt = metrics(final_state, len(report.placement))
        n133 = math.ceil(1.33 * report.nr_min)
        records.append({
            "seed": seed,
            "strategy": strategy.value,
            "nr_min": report.nr_min,
            "nr_init": report.nr_init,
            "nr_opt": report.nr_opt,
            "nr_max": report.nr_max,
            "opt_ratio": report.nr_opt / report.nr_min,
            "threshold": report.threshold,
            "below_threshold": report.below_threshold,
            "required_at_opt": opt.required_fraction,
            "optional_at_opt": opt.optional_fraction,
            "required_at_1.33": _step_metric(report, n133, "required_fraction"),
            "optional_at_1.33": _step_metric(report, n133, "optional_fraction"),
            "required_at_min": _step_metric(report, report.nr_min, "required_fraction"),
            "optional_at_min": _step_metric(report, report.nr_min, "optional_fraction"),
            "components_at_opt": connectivity_components(report.placement),
        })
        log.info(
            "seed %d %s: nr_min=%d nr_init=%d nr_opt=%d required=%.4f (%.1fs)",
            seed, strategy.value, report.nr_min, report.nr_init, report.nr_opt,
            opt.required_fraction, time.perf_counter() - started,
        )
    return records


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def config_items(config: ExperimentConfig) -> list[tuple[str, str]]:
    """Settings in config-file syntax (output location excluded)."""
    items = []
    for key, value in asdict(config).items():
        if key in ("output", "workers") or value is None:
            continue
        if key == "grid":
            value = f"{value[0]}x{value[1]}"
        elif key.endswith("_radius"):
            value = f"{value[0]}-{value[1]}"
        elif key == "seeds":
            value = ",".join(map(str, value))
        else:
            value = _fmt(value) if isinstance(value, bool) else str(value)
        items.append((key.replace("_", "-"), value))
    return items


def summary_text(config: ExperimentConfig, records: list[dict]) -> str:
    lines = ["# config"]
    for key, value in config_items(config):
        lines.append(f"{key} = {value}")
    lines.append("")
    lines.append("# runs")
    keys = list(records[0])
    lines.append(" ".join(keys))
    for rec in records:
        lines.append(" ".join(_fmt(rec[k]) for k in keys))
    lines.append("")
    lines.append("# aggregate over seeds: median min max")
    numeric = [k for k in keys if k not in ("seed", "strategy", "below_threshold")]
    for strategy in dict.fromkeys(r["strategy"] for r in records):
        rows = [r for r in records if r["strategy"] == strategy]
        for key in numeric:
            vals = [r[key] for r in rows if r[key] is not None]
            if not vals:
                continue
            lines.append(
                f"{strategy} {key} {_fmt(float(statistics.median(vals)))} "
                f"{_fmt(float(min(vals)))} {_fmt(float(max(vals)))}"
            )
    return "\n".join(lines) + "\n"


def run_experiment(config: ExperimentConfig) -> list[dict]:
    """Run every seed, write per-seed files and ``summary.txt``; returns the run records."""
    out = Path(config.output)
    out.mkdir(parents=True, exist_ok=True)
    if config.workers > 1 and len(config.seeds) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            per_seed = list(pool.map(run_seed, [config] * len(config.seeds), config.seeds))
    else:
        per_seed = [run_seed(config, seed) for seed in config.seeds]
    records = [rec for recs in per_seed for rec in recs]
    (out / "summary.txt").write_text(summary_text(config, records), encoding="ascii")
    return records


def _add_region_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--region", help="read the region from a .region file instead of generating")
    p.add_argument("--grid", type=lambda v: _pair(v, "x"), help="generated grid WxH (200x200)")
    p.add_argument("--interest-blobs", type=int)
    p.add_argument("--interest-radius", type=lambda v: _pair(v, "-"), help="MIN-MAX")
    p.add_argument("--prohibited-blobs", type=int)
    p.add_argument("--prohibited-radius", type=lambda v: _pair(v, "-"), help="MIN-MAX")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--radius", type=int, help="router radius in cells (8)")
    p.add_argument("--temp", type=float, help="Metropolis temperature T (0.1)")
    p.add_argument("--nbtostop", type=int, help="non-improving iterations before stopping (500)")
    p.add_argument("--init-factor", type=float, help="initial count factor over nr_min (1.4)")
    p.add_argument("--jump-probability", type=float)
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--acceptance-form", choices=["paper", "canonical"])


def _add_experiment_flags(p: argparse.ArgumentParser, strategy=True) -> None:
    p.add_argument("--config", help="key = value settings file")
    _add_region_flags(p)
    _add_solver_flags(p)
    if strategy:
        p.add_argument("--strategy", type=_strategy, help="min-single | min-coverage | max-over | all")
    p.add_argument("--threshold", type=_threshold, help="'relative' (best - 0.01) or absolute fraction")
    p.add_argument("--curve-to-nr-min", action=argparse.BooleanOptionalAction, default=None,
                   help="keep recording the curve below nr_opt down to nr_min (default on)")
    p.add_argument("--seeds", type=_seeds, help="comma-separated seeds (1,2,3,4,5)")
    p.add_argument("-o", "--output", help="output directory (results)")
    p.add_argument("-j", "--workers", type=int, help="parallel seed workers (1)")


def cmd_generate(args) -> int:
    config = build_config(args)
    region = generate_region(config.region_params(args.seed))
    save_region(region, args.out)
    print(f"{args.out}: {region.width}x{region.height}, {region.interest_count} interest cells, "
          f"nr_min(r={config.radius}) = {nr_min(region, config.radius)}")
    return 0


def cmd_solve(args) -> int:
    config = build_config(args)
    seed = args.seed
    region = load_or_generate(config, seed)
    params = config.solver_params(seed)
    rng = random.Random(seed)
    n_min = nr_min(region, params.r)
    n = args.routers or nr_init(max(n_min, 1), params.init_factor)
    start = init_placement(region, n, rng, params.r)
    search = run_hillclimb if args.hillclimb else run_metropolis
    placement, state, trace = search(region, start, params, rng)
    m = metrics(state, n)
    out = Path(config.output)
    out.mkdir(parents=True, exist_ok=True)
    write_positions([placement], out / "solve.positions")
    render_depth_image(region, state, out / "solve.ppm")
    with open(out / "solve_trace.csv", "w", encoding="ascii", newline="\n") as fh:
        fh.write("iteration,f,delta,accepted,kind\n")
        for i, (f, d, a, k) in enumerate(zip(trace.f, trace.delta, trace.accepted, trace.kind), 1):
            fh.write(f"{i},{f},{d},{int(a)},{k}\n")
    print(f"routers={n} nr_min={n_min} iterations={trace.iterations_run} stopped_by={trace.stopped_by}")
    print(f"f={state.fitness} required={m.required_fraction:.4f} optional={m.optional_fraction:.4f} "
          f"components={connectivity_components(placement)}")
    return 0


def cmd_reduce(args) -> int:
    forced = {"strategy": "all"} if args.command == "compare-strategies" else {}
    config = build_config(args, **forced)
    records = run_experiment(config)
    for rec in records:
        print(" ".join(f"{k}={_fmt(v)}" for k, v in rec.items()))
    print(f"wrote {Path(config.output) / 'summary.txt'}")
    return 0


def cmd_oracle(args) -> int:
    config = build_config(args)
    region = load_or_generate(config, args.seed)
    result = exhaustive_best(region, args.routers, config.radius, args.cap)
    print(f"best_f={result.best_f} evaluated={result.evaluated} interest={region.interest_count}")
    for placement in result.best_placements:
        print(format_positions(placement))
    return 0


def cmd_render(args) -> int:
    region = load_region(args.region)
    placements = read_positions(args.positions, args.radius)
    if not placements:
        raise ConfigError(f"{args.positions} holds no placements")
    placement = placements[args.line]
    render_depth_image(region, CoverState.from_placement(region, placement), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="meshplace", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random region file")
    p.add_argument("--config")
    _add_region_flags(p)
    p.add_argument("--radius", type=int)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("out", help="output .region path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="single search run at a fixed router count")
    p.add_argument("--config")
    _add_region_flags(p)
    _add_solver_flags(p)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--routers", type=int, help="router count (default nr_init)")
    p.add_argument("--hillclimb", action="store_true", help="accept only non-worsening moves")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_solve)

    for name, help_text in (
        ("reduce", "minimise the router count (per seed)"),
        ("run", "alias of reduce; with no arguments runs the headline experiment"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_experiment_flags(p)
        p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("compare-strategies", help="reduce with all three removal strategies")
    _add_experiment_flags(p, strategy=False)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("oracle", help="exhaustive optimum for a tiny instance")
    p.add_argument("--config")
    _add_region_flags(p)
    p.add_argument("--radius", type=int)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--routers", type=int, required=True)
    p.add_argument("--cap", type=int, default=16, help="maximum optimal placements listed")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("render", help="PPM depth image of a recorded placement")
    p.add_argument("--region", required=True)
    p.add_argument("--positions", required=True)
    p.add_argument("--line", type=int, default=-1, help="placement line to draw (default last)")
    p.add_argument("--radius", type=int, default=8)
    p.add_argument("out", help="output .ppm path")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (ConfigError, RegionError, OSError, ValueError, IndexError) as exc:
        print(f"meshplace {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
