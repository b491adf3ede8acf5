"""Command-line workbench: ingest checks, metric tables, rating runs,
agreement and regression reports, simulation, and the rating service.

Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Mapping

from . import __version__
from .dataset import count_possible_pairs, load_dataset
from .elo import EloConfig, run_replicated
from .errors import DataError
from .judgment_log import JudgmentLogWriter, replay_log
from .metrics import MetricConfig, compute_metric_vector
from .reports import (
    METRIC_COLUMNS,
    plot_rank_order,
    plot_scatter_fit,
    plot_site_boxes,
    write_consistency_csv,
    write_elo_csv,
    write_metrics_csv,
    write_regressions_csv,
    write_sidecar,
    write_truth_csv,
)
from .simulate import RaterModel, draw_latents, simulate_judgments
from .stats import linear_regression, operator_consistency, rank_order, site_summary

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the workbench reserves 2 for data errors
    def error(self, message: str) -> None:
        raise UsageError(message)


def _load_config_file(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"unreadable config file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise DataError(f"config file {path} must hold a JSON object")
    return raw


def _pick(flag_value: Any, section: Mapping[str, Any], key: str, default: Any) -> Any:
    if flag_value is not None:
        return flag_value
    if key in section:
        return section[key]
    return default


def _elo_config(args: argparse.Namespace, file_cfg: dict) -> EloConfig:
    section = file_cfg.get("elo", {})
    return EloConfig(
        k_factor=float(_pick(args.k_factor, section, "k_factor", 32.0)),
        initial_rating=float(_pick(args.initial_rating, section, "initial_rating", 1000.0)),
        logistic_scale=float(_pick(args.logistic_scale, section, "logistic_scale", 400.0)),
        num_replications=int(_pick(args.replications, section, "num_replications", 1000)),
        seed=int(_pick(args.seed, section, "seed", 0)),
        ci_level=float(_pick(args.ci_level, section, "ci_level", 0.95)),
    )


def _metric_config(args: argparse.Namespace, file_cfg: dict) -> MetricConfig:
    section = file_cfg.get("metrics", {})
    return MetricConfig(
        drc_epsilon=float(_pick(getattr(args, "drc_epsilon", None), section, "drc_epsilon", 1e-10)),
        lacunarity_box_m=float(_pick(getattr(args, "box_m", None), section, "lacunarity_box_m", 0.5)),
        sobel_kernel_m=float(_pick(getattr(args, "sobel_m", None), section, "sobel_kernel_m", 1.5)),
        entropy_bins=int(_pick(getattr(args, "entropy_bins", None), section, "entropy_bins", 64)),
        median_kernel_px=int(_pick(getattr(args, "median_px", None), section, "median_kernel_px", 15)),
        jpeg_quality=int(_pick(getattr(args, "jpeg_quality", None), section, "jpeg_quality", 75)),
        colormap=str(_pick(getattr(args, "colormap", None), section, "colormap", "grayscale")),
    )


def _out_dir(args: argparse.Namespace) -> Path:
    if args.out is None:
        raise UsageError("an output directory is required (--out)")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_accepted(dataset_root: Path) -> tuple[list, list[str]]:
    result = load_dataset(dataset_root)
    notes = []
    for rej in result.rejected:
        notes.append(f"rejected {rej.id}: {', '.join(rej.reasons)}")
    for err in result.errors:
        notes.append(f"error {err.id}: {err.message}")
    if result.errors:
        raise DataError(
            f"dataset {dataset_root} has {len(result.errors)} load error(s):\n  " + "\n  ".join(notes)
        )
    return result.accepted, notes


def cmd_ingest_check(args: argparse.Namespace) -> int:
    result = load_dataset(Path(args.dataset))
    print(f"accepted: {len(result.accepted)}")
    for chip in result.accepted:
        print(f"  {chip.id}  site={chip.site}  range={chip.range_m:g}m  {chip.image.width}x{chip.image.height}px")
    print(f"rejected: {len(result.rejected)}")
    for rej in result.rejected:
        print(f"  {rej.id}: {', '.join(rej.reasons)}")
    print(f"errors: {len(result.errors)}")
    for err in result.errors:
        print(f"  {err.id}: {err.message}")
    if len(result.accepted) >= 2:
        print(f"possible pairs: {count_possible_pairs(len(result.accepted))}")
    return EXIT_DATA if result.errors else EXIT_OK


def cmd_metrics(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    file_cfg = _load_config_file(args.config)
    cfg = _metric_config(args, file_cfg)
    chips, notes = _load_accepted(Path(args.dataset))
    for note in notes:
        print(note, file=sys.stderr)

    rows = []
    for chip in chips:
        vector = compute_metric_vector(chip, cfg)
        row = {"id": chip.id, "site": chip.site}
        row.update({col: getattr(vector, col) for col in METRIC_COLUMNS})
        row["reason"] = "; ".join(f"{name}={why}" for name, why in sorted(vector.failures.items()))
        rows.append(row)

    csv_path = out / "metrics.csv"
    write_metrics_csv(csv_path, rows)
    write_sidecar(csv_path, {"command": "metrics", "dataset": str(args.dataset), "metrics": asdict(cfg)})
    print(f"wrote {csv_path} ({len(rows)} chips)")
    return EXIT_OK


def _replay(path: Path):
    try:
        return replay_log(path)
    except OSError as exc:
        raise DataError(f"cannot read log {path}: {exc}") from exc


def _read_sites_csv(path: Path) -> dict[str, str]:
    sites = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            if "id" in row and "site" in row:
                sites[row["id"]] = row["site"]
    return sites


def cmd_rank(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    file_cfg = _load_config_file(args.config)
    cfg = _elo_config(args, file_cfg)

    replay = _replay(Path(args.log))
    for err in replay.errors:
        print(f"log line {err.line_number}: {err.message}", file=sys.stderr)
    comparisons = replay.comparisons()

    sites: dict[str, str] = {}
    if args.dataset is not None:
        chips, notes = _load_accepted(Path(args.dataset))
        for note in notes:
            print(note, file=sys.stderr)
        universe = {chip.id for chip in chips}
        sites = {chip.id: chip.site for chip in chips}
    else:
        universe = {c.left for c in comparisons} | {c.right for c in comparisons}
    if args.sites is not None:
        sites.update(_read_sites_csv(Path(args.sites)))

    known = [c for c in comparisons if c.left in universe and c.right in universe]
    for c in comparisons:
        for image_id in (c.left, c.right):
            if image_id not in universe:
                print(f"dropping {c.comparison_id}: unknown image {image_id!r}", file=sys.stderr)
    if comparisons and not known:
        raise DataError("no comparison in the log references a known image")
    if not universe:
        raise DataError("empty log and no dataset: nothing to rank")

    elo = run_replicated(known, universe, cfg, workers=args.workers)

    csv_path = out / "elo.csv"
    write_elo_csv(csv_path, elo)
    write_sidecar(
        csv_path,
        {
            "command": "rank",
            "log": str(args.log),
            "dataset": str(args.dataset) if args.dataset else None,
            "elo": asdict(cfg),
            "workers": args.workers,
            "comparisons_used": len(known),
            "comparisons_dropped": len(comparisons) - len(known),
            "log_parse_errors": len(replay.errors),
        },
    )
    plot_rank_order(out / "rank_order.svg", rank_order(elo))
    if sites and all(image_id in sites for image_id in universe):
        plot_site_boxes(out / "site_boxes.svg", site_summary(elo, sites))
    elif sites:
        print("site labels incomplete; skipping site box plot", file=sys.stderr)
    print(f"wrote {csv_path} ({len(elo.per_image)} images, {len(known)} comparisons)")
    return EXIT_OK


def _read_table(path: Path) -> list[dict[str, str]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def cmd_analyze(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    metrics_rows = {row["id"]: row for row in _read_table(Path(args.metrics_csv))}
    elo_rows = {row["id"]: row for row in _read_table(Path(args.elo_csv))}
    joined = sorted(set(metrics_rows) & set(elo_rows))
    if len(joined) < 2:
        raise DataError(f"join produced {len(joined)} row(s); need at least 2")

    results = []
    for metric in METRIC_COLUMNS:
        xs, ys = [], []
        for image_id in joined:
            cell = metrics_rows[image_id].get(metric, "")
            if cell == "":
                continue
            xs.append(float(elo_rows[image_id]["mean_rating"]))
            ys.append(float(cell))
        if len(xs) < 2:
            print(f"{metric}: fewer than 2 usable rows; skipped", file=sys.stderr)
            continue
        fit = linear_regression(xs, ys, metric_name=metric)
        results.append(fit)
        plot_scatter_fit(out / f"scatter_{metric}.svg", xs, ys, fit)

    csv_path = out / "regressions.csv"
    write_regressions_csv(csv_path, results)
    write_sidecar(
        csv_path,
        {
            "command": "analyze",
            "metrics_csv": str(args.metrics_csv),
            "elo_csv": str(args.elo_csv),
            "joined_rows": len(joined),
        },
    )
    for fit in results:
        print(f"{fit.metric_name}: R^2 = {fit.r_squared:.4f} (n={fit.n})")
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_consistency(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    replay = _replay(Path(args.log))
    for err in replay.errors:
        print(f"log line {err.line_number}: {err.message}", file=sys.stderr)
    matrix = operator_consistency(replay.comparisons())

    excluded = []
    for i, op in enumerate(matrix.operator_ids):
        diag = matrix.matrix[i][i]
        if diag is None or diag < args.self_threshold:
            excluded.append(op)
    csv_path = out / "consistency.csv"
    write_consistency_csv(csv_path, matrix, excluded=excluded)
    write_sidecar(
        csv_path,
        {
            "command": "consistency",
            "log": str(args.log),
            "self_threshold": args.self_threshold,
            "excluded": excluded,
        },
    )
    print(f"wrote {csv_path} ({len(matrix.operator_ids)} operators; excluded: {excluded or 'none'})")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    file_cfg = _load_config_file(args.config)
    section = file_cfg.get("simulate", {})
    seed = int(_pick(args.seed, section, "seed", 0))
    model = RaterModel(
        n_raters=int(_pick(args.raters, section, "n_raters", 6)),
        noise_scale=float(_pick(args.noise_scale, section, "noise_scale", 400.0)),
        bias_sigma=float(_pick(args.bias_sigma, section, "bias_sigma", 0.0)),
        neutral_band=float(_pick(args.neutral_band, section, "neutral_band", 25.0)),
        p_repeat=float(_pick(args.p_repeat, section, "p_repeat", 0.05)),
    )
    n_images = args.images
    if n_images < 2:
        raise UsageError("--images must be >= 2")

    if args.emit_chips or args.latent_from == "edge-intensity":
        from .synth import make_demo_dataset

        dataset_root = out / "dataset"
        make_demo_dataset(dataset_root, n_images, seed=seed, size_px=args.chip_size)
        chips, _ = _load_accepted(dataset_root)
        sites = {chip.id: chip.site for chip in chips}
        ids = sorted(sites)
        print(f"wrote synthetic dataset under {dataset_root}")
    else:
        ids = [f"chip-{k:04d}" for k in range(n_images)]
        sites = {image_id: "ABCDE"[k % 5] for k, image_id in enumerate(ids)}

    if args.latent_from == "edge-intensity":
        metric_cfg = _metric_config(args, file_cfg)
        raw = {chip.id: compute_metric_vector(chip, metric_cfg).edge_intensity for chip in chips}
        if any(v is None for v in raw.values()):
            raise DataError("edge intensity undefined for some chips; cannot derive latents")
        lo, hi = min(raw.values()), max(raw.values())
        span = (hi - lo) or 1.0
        latents = {i: 800.0 + 500.0 * (v - lo) / span for i, v in raw.items()}
    else:
        latents = draw_latents(ids, seed)

    records = simulate_judgments(latents, args.comparisons, model, seed)
    log_path = out / "log.jsonl"
    log_path.unlink(missing_ok=True)
    with JudgmentLogWriter(log_path) as writer:
        for record in records:
            writer.append(record)
    truth_path = out / "truth.csv"
    write_truth_csv(truth_path, latents, sites)
    write_sidecar(
        log_path,
        {
            "command": "simulate",
            "seed": seed,
            "n_images": n_images,
            "n_comparisons": args.comparisons,
            "latent_from": args.latent_from,
            "rater_model": asdict(model),
        },
    )
    print(f"wrote {log_path} ({len(records)} judgments) and {truth_path}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import RatingService, create_app
    from .service.config import load_service_config

    overrides = {
        "dataset_root": args.dataset,
        "log_path": args.log,
        "host": args.host,
        "port": args.port,
        "p_repeat": args.p_repeat,
        "seed": args.seed,
        "assets_dir": args.assets,
    }
    cfg = load_service_config(config_file=args.config, overrides=overrides)
    if cfg.assets_dir is None and Path("frontend/dist").is_dir():
        cfg.assets_dir = Path("frontend/dist")

    chips, notes = _load_accepted(cfg.dataset_root)
    for note in notes:
        print(note, file=sys.stderr)
    if len(chips) < 2:
        raise DataError(f"dataset {cfg.dataset_root} holds {len(chips)} rateable chips; need >= 2")

    service = RatingService(
        chips,
        log_path=cfg.log_path,
        p_repeat=cfg.p_repeat,
        seed=cfg.seed,
        drc_epsilon=cfg.drc_epsilon,
    )
    app = create_app(service, assets_dir=cfg.assets_dir)
    print(f"serving {len(chips)} chips on http://{cfg.host}:{cfg.port} (log: {cfg.log_path})")
    try:
        uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="info")
    finally:
        service.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed for any randomized step")
    common.add_argument("--out", type=Path, default=None, help="output directory for artifacts")
    common.add_argument("--config", type=Path, default=None, help="JSON config file")

    parser = _Parser(prog="chiprank", description=__doc__)
    parser.add_argument("--version", action="version", version=f"chiprank {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest-check", parents=[common], help="validate a dataset directory")
    p.add_argument("dataset", type=Path)
    p.set_defaults(func=cmd_ingest_check)

    p = sub.add_parser("metrics", parents=[common], help="compute complexity metrics for every chip")
    p.add_argument("dataset", type=Path)
    p.add_argument("--drc-epsilon", dest="drc_epsilon", type=float, default=None)
    p.add_argument("--box-m", dest="box_m", type=float, default=None, help="lacunarity box size in meters")
    p.add_argument("--sobel-m", dest="sobel_m", type=float, default=None, help="edge kernel size in meters")
    p.add_argument("--entropy-bins", dest="entropy_bins", type=int, default=None)
    p.add_argument("--median-px", dest="median_px", type=int, default=None)
    p.add_argument("--jpeg-quality", dest="jpeg_quality", type=int, default=None)
    p.add_argument("--colormap", default=None)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("rank", parents=[common], help="replay a judgment log into replicated ratings")
    p.add_argument("log", type=Path)
    p.add_argument("--dataset", type=Path, default=None)
    p.add_argument("--sites", type=Path, default=None, help="CSV with id,site columns (e.g. truth.csv)")
    p.add_argument("--k-factor", dest="k_factor", type=float, default=None)
    p.add_argument("--initial-rating", dest="initial_rating", type=float, default=None)
    p.add_argument("--logistic-scale", dest="logistic_scale", type=float, default=None)
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--ci-level", dest="ci_level", type=float, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("analyze", parents=[common], help="regress each metric against the ratings")
    p.add_argument("metrics_csv", type=Path)
    p.add_argument("elo_csv", type=Path)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("consistency", parents=[common], help="operator agreement matrix from a log")
    p.add_argument("log", type=Path)
    p.add_argument("--self-threshold", dest="self_threshold", type=float, default=0.5)
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("simulate", parents=[common], help="generate a synthetic judgment log")
    p.add_argument("--images", type=int, default=117)
    p.add_argument("--comparisons", type=int, default=5722)
    p.add_argument("--raters", type=int, default=None)
    p.add_argument("--noise-scale", dest="noise_scale", type=float, default=None)
    p.add_argument("--neutral-band", dest="neutral_band", type=float, default=None)
    p.add_argument("--bias-sigma", dest="bias_sigma", type=float, default=None)
    p.add_argument("--p-repeat", dest="p_repeat", type=float, default=None)
    p.add_argument("--emit-chips", action="store_true", help="also write a matching synthetic dataset")
    p.add_argument("--chip-size", dest="chip_size", type=int, default=128)
    p.add_argument(
        "--latent-from",
        choices=("uniform", "edge-intensity"),
        default="uniform",
        help="draw latent complexities, or derive them from chip edge intensity",
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", parents=[common], help="run the rating service")
    p.add_argument("dataset", type=Path, nargs="?", default=None)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--log", type=Path, default=None, help="judgment log path")
    p.add_argument("--p-repeat", dest="p_repeat", type=float, default=None)
    p.add_argument("--assets", type=Path, default=None, help="static directory with the rater UI")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except KeyboardInterrupt:
        return EXIT_RUNTIME
    except Exception as exc:  # anything unplanned is a runtime failure
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
