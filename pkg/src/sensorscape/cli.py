"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime or I/O error.
Data goes to files or stdout; progress and diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .config import ConfigError, build_config, load_config_file
from .dynamics import CANONICAL_LAYOUT, ControllerWeights, SensorLayout, simulate
from .environments import make_design_grid, make_weight_grid
from .errors import SensorscapeError
from .matrixio import locate_matrix_dump, read_matrix_dump
from .metrics import rank_designs
from .report import (histogram, histogram_csv, load_records, rank_table, trajectory_csv,
                     write_heatmap)
from .sweep import CALIBRATION_RADII, run_sweep, scan_radius

log = logging.getLogger("sensorscape")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_run_options(p):
    g = p.add_argument_group("run configuration (flags override --config)")
    g.add_argument("--config", type=Path, help="key: value file with run settings")
    g.add_argument("--model", choices=("theoretical", "saturated"))
    g.add_argument("--radius", type=float, help="light distance r")
    g.add_argument("--dt", type=float)
    g.add_argument("--steps", type=int)
    g.add_argument("--success-radius", type=float)
    g.add_argument("--distance-floor", type=float)
    g.add_argument("--no-early-stop", dest="early_stop", action="store_const", const=False)
    g.add_argument("--v-max", type=float)
    g.add_argument("--omega-max", type=float)
    g.add_argument("--design-res", type=int)
    g.add_argument("--weights-res", type=int)
    g.add_argument("--workers", type=int)
    g.add_argument("--every", type=int, help="record every k-th trajectory step")


_RUN_KEYS = ("model", "radius", "dt", "steps", "success_radius", "distance_floor",
             "early_stop", "v_max", "omega_max", "design_res", "weights_res", "workers",
             "every")


def _run_config(args):
    file_values = load_config_file(args.config) if args.config else {}
    return build_config(file_values, {k: getattr(args, k) for k in _RUN_KEYS})


def cmd_simulate(args) -> int:
    cfg = _run_config(args)
    try:
        layout = SensorLayout(tuple(args.l1), tuple(args.l2))
        weights = ControllerWeights(*args.weights)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    envs = cfg.environments()
    wanted = sorted(set(args.env)) if args.env else [e.id for e in envs]
    if any(k not in range(1, len(envs) + 1) for k in wanted):
        raise ConfigError(f"--env must be in 1..{len(envs)}")
    sim = cfg.sim_config()

    results, csvs = [], {}
    for env in envs:
        if env.id not in wanted:
            continue
        out = simulate(env.initial_state, layout, weights, sim, record_trajectory=True,
                       every=cfg.every)
        csvs[env.id] = trajectory_csv(out.trajectory)
        results.append({"env": env.id, "bearing": env.bearing, "success": out.success,
                        "min_distance": out.min_distance, "steps_taken": out.steps_taken})

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for k, text in csvs.items():
        (outdir / f"trajectory_env{k}.csv").write_text(text)
    summary = {"model": cfg.model, "radius": cfg.radius, "l1": list(layout.l1),
               "l2": list(layout.l2), "weights": [weights.w1, weights.w2],
               "environments": results}
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    json.dump(results, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _run_config(args)
    if args.stop_after is not None and args.stop_after < 0:
        raise UsageError("--stop-after must be >= 0")
    sim = cfg.sim_config()
    envs = cfg.environments()
    designs = make_design_grid(cfg.design_res)
    weights = make_weight_grid(cfg.weights_res)
    started = time.monotonic()

    def progress(done, total):
        rate = done / max(time.monotonic() - started, 1e-9)
        print(f"designs {done}/{total} ({rate:.3f}/s)", file=sys.stderr, flush=True)

    manifest = run_sweep(designs, weights, envs, sim, workers=cfg.workers,
                         checkpoint_path=args.checkpoint, output_path=args.out,
                         matrices_dir=args.matrices, stop_after=args.stop_after,
                         progress=None if args.quiet else progress)
    state = "complete" if manifest.complete else "partial"
    print(f"sweep {state}: {len(manifest.completed)}/{len(designs)} designs -> {args.out}",
          file=sys.stderr)
    return EXIT_OK


def cmd_rank(args) -> int:
    if args.top < 1:
        raise UsageError("--top must be >= 1")
    records = load_records(args.results)
    if not records:
        raise SensorscapeError(f"{args.results}: no records")
    sys.stdout.write(rank_table(rank_designs(records, args.key, args.top)))
    return EXIT_OK


def cmd_heatmap(args) -> int:
    path = locate_matrix_dump(args.matrices, args.design_index)
    write_heatmap(args.out, read_matrix_dump(path))
    return EXIT_OK


def cmd_histogram(args) -> int:
    if args.bins < 1:
        raise UsageError("--bins must be >= 1")
    records = load_records(args.results)
    attr = {"M_L": "m_l", "M_CF": "m_cf"}[args.metric]
    text = histogram_csv(histogram([getattr(r, attr) for r in records], args.bins))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    cfg = _run_config(args)
    radii = args.radii or list(CALIBRATION_RADII)
    for r in radii:
        if not r > cfg.success_radius:
            raise ConfigError(f"radius {r} must exceed the success radius")
    try:
        layout = SensorLayout(tuple(args.l1), tuple(args.l2))
        weights = ControllerWeights(*args.weights)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = scan_radius(layout, weights, cfg.sim_config(), radii)
    passing = [r for r, bits in rows if all(bits)]
    chosen = cfg.radius if cfg.radius in passing else (passing[0] if passing else None)
    report = {"layout": [list(layout.l1), list(layout.l2)],
              "weights": [weights.w1, weights.w2],
              "scan": [{"radius": r, "success": list(bits)} for r, bits in rows],
              "chosen_radius": chosen}
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK if chosen is not None else EXIT_RUNTIME


def _layout_args(p):
    p.add_argument("--l1", nargs=2, type=float, metavar=("X", "Y"),
                   default=list(CANONICAL_LAYOUT.l1))
    p.add_argument("--l2", nargs=2, type=float, metavar=("X", "Y"),
                   default=list(CANONICAL_LAYOUT.l2))
    p.add_argument("--weights", nargs=2, type=float, metavar=("W1", "W2"),
                   default=[0.77, 0.77])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sensorscape",
                     description="Sensor-placement sweeps for a two-sensor phototaxis robot.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="trajectories of one design and controller")
    _layout_args(p)
    p.add_argument("--env", type=int, action="append", help="environment id (repeatable)")
    p.add_argument("--out", required=True, help="output directory")
    _add_run_options(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="evaluate the design x weight grid")
    p.add_argument("--out", required=True, help="results JSONL path")
    p.add_argument("--checkpoint", help="manifest path (default <out>.manifest.json)")
    p.add_argument("--matrices", help="directory for per-design success matrix dumps")
    p.add_argument("--stop-after", type=int, help="evaluate at most this many designs")
    p.add_argument("--quiet", action="store_true", help="no progress lines")
    _add_run_options(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rank", help="best designs from a results file")
    p.add_argument("results")
    p.add_argument("--key", choices=("M_L", "M_CF"), default="M_L")
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("heatmap", help="overlap heatmap of one design as binary PPM")
    p.add_argument("matrices", help="matrix dump file or dump directory")
    p.add_argument("--design-index", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("histogram", help="distribution of a metric over designs")
    p.add_argument("results")
    p.add_argument("--metric", choices=("M_L", "M_CF"), default="M_L")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_histogram)

    p = sub.add_parser("calibrate", help="scan light distances for one controller")
    _layout_args(p)
    p.add_argument("--radii", nargs="+", type=float)
    p.add_argument("--out")
    _add_run_options(p)
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"sensorscape: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SensorscapeError, OSError, ValueError) as exc:
        print(f"sensorscape: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
