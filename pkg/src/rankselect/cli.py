"""Command-line entry point: ``rankselect {rank,experiment,synth}``.

Exit status 0 on success, 1 when an experiment produces no results, 2 on
invalid input or arguments.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import logging
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .correlation import METRICS, correlate_all
from .data_io import SyntheticSpec, generate_synthetic, load_table, split_by_season, write_table
from .evaluation import ExperimentConfig, ForestParams, RidgeParams, run_grid
from .exceptions import InvalidSpec, NoDates, RankSelectError
from .ranking import borda, concordance_report, rank_by_strength, rank_from_scores
from .reporting import write_correlation, write_json, write_ranking, write_results

logger = logging.getLogger("rankselect")

THREADS_ENV = "RANKSELECT_THREADS"


def cmd_rank(input_path, metric="all", out_dir=".", target="error") -> int:
    try:
        table = load_table(input_path, target_name=target)
    except (OSError, RankSelectError) as exc:
        print(f"rankselect rank: {exc}", file=sys.stderr)
        return 2
    out = Path(out_dir)
    metrics = METRICS if metric == "all" else (metric,)
    ranks = {}
    for m in metrics:
        corr = correlate_all(table, m)
        ranks[m] = rank_by_strength(corr)
        write_correlation(corr, out / f"correlation_{m}.csv")
        write_ranking(ranks[m], out / f"ranking_{m}.csv")
    if metric == "all":
        fused = rank_from_scores(borda([ranks[m] for m in METRICS]))
        write_ranking(fused, out / "ranking_borda.csv")
        report = concordance_report(ranks["pearson"], ranks["spearman"], ranks["kendall"], fused)
        write_json(out / "concordance.json", report.as_dict())
    return 0


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def load_config(path):
    """Parse an experiment TOML file into ``(ExperimentConfig, locations, raw)``.

    ``locations`` maps each location name to either one path (a table with a
    ``date`` column, split by season) or a ``{season: path}`` table. Relative
    paths are resolved against the config file's directory.
    """
    path = Path(path)
    with path.open("rb") as fh:
        raw = tomllib.load(fh)
    base = path.parent
    locations = {}
    for name, spec in raw.get("locations", {}).items():
        if isinstance(spec, str):
            locations[name] = base / spec
        else:
            locations[name] = {season: base / p for season, p in spec.items()}
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    kwargs = {k: v for k, v in raw.items() if k in known and k not in ("forest", "ridge")}
    kwargs["forest"] = ForestParams(**raw.get("forest", {}))
    kwargs["ridge"] = RidgeParams(**raw.get("ridge", {}))
    kwargs["locations"] = tuple(locations)
    return ExperimentConfig(**kwargs), locations, raw


def _load_location(spec, target):
    """Season -> table for one location, and the files read."""
    if isinstance(spec, Path):
        table = load_table(spec, target_name=target)
        try:
            return split_by_season(table), [spec]
        except NoDates:
            return {"ALL": table}, [spec]
    tables = {season: load_table(p, target_name=target) for season, p in spec.items()}
    return tables, list(spec.values())


def cmd_experiment(config_path, out_dir, threads=None) -> int:
    try:
        cfg, locations, raw = load_config(config_path)
    except (OSError, ValueError, TypeError) as exc:
        print(f"rankselect experiment: invalid config: {exc}", file=sys.stderr)
        return 2
    if threads:
        cfg = ExperimentConfig(**{**cfg.__dict__, "n_jobs": int(threads)})
    target = raw.get("target", "error")

    datasets, inputs, cells = {}, {}, []
    for name, spec in locations.items():
        try:
            tables, files = _load_location(spec, target)
        except (OSError, RankSelectError) as exc:
            logger.warning("skipping location %s: %s", name, exc)
            cells.append({"location": name, "season": "*", "status": "skipped",
                          "reason": f"{type(exc).__name__}: {exc}"})
            continue
        datasets[name] = tables
        for f in files:
            inputs[str(f)] = _sha256(f)

    skipped = []
    results = run_grid(datasets, cfg, skipped=skipped) if datasets else []
    for loc, season, reason in skipped:
        cells.append({"location": loc, "season": season, "status": "skipped", "reason": reason})
    done = dict.fromkeys((r.location, r.season) for r in results)
    for loc, season in done:
        cells.append({"location": loc, "season": season, "status": "ok",
                      "k_values": [r.k for r in results
                                   if (r.location, r.season) == (loc, season)]})

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = write_results(results, out) if results else []
    manifest = {
        "tool": "rankselect",
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "config_path": str(config_path),
        "config": raw,
        "inputs": inputs,
        "cells": cells,
        "outputs": [str(Path(p).relative_to(out)) for p in written],
    }
    write_json(out / "manifest.json", manifest)
    if not results:
        print("rankselect experiment: no cell produced results", file=sys.stderr)
        return 1
    return 0


def cmd_synth(rows, features, informative, noise, seed, out, pairwise_corr=0.0,
              nonlinear=0.25, with_dates=False) -> int:
    spec = SyntheticSpec(n_rows=rows, n_features=features, n_informative=informative,
                         noise_sd=noise, pairwise_corr=pairwise_corr, seed=seed,
                         nonlinear=nonlinear, with_dates=with_dates)
    try:
        table = generate_synthetic(spec)
    except InvalidSpec as exc:
        print(f"rankselect synth: {exc}", file=sys.stderr)
        return 2
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_table(table, out)
    sidecar = out.with_name(out.stem + ".informative.txt")
    sidecar.write_text("".join(f"{n}\n" for n in table.informative_features), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rankselect", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", help="rank features by correlation and fuse with Borda count")
    p.add_argument("--input", required=True)
    p.add_argument("--metric", default="all", choices=("all",) + METRICS)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--target", default="error")

    p = sub.add_parser("experiment", help="run the selection experiment grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker threads (default: ${THREADS_ENV} or 1)")

    p = sub.add_parser("synth", help="write a synthetic planted-signal table")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--features", type=int, required=True)
    p.add_argument("--informative", type=int, required=True)
    p.add_argument("--noise", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairwise-corr", type=float, default=0.0)
    p.add_argument("--nonlinear", type=float, default=0.25)
    p.add_argument("--with-dates", action="store_true")
    p.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "rank":
        return cmd_rank(args.input, args.metric, args.out, args.target)
    if args.command == "experiment":
        threads = args.threads or int(os.environ.get(THREADS_ENV, "0") or 0) or None
        return cmd_experiment(args.config, args.out_dir, threads)
    return cmd_synth(args.rows, args.features, args.informative, args.noise, args.seed,
                     args.out, args.pairwise_corr, args.nonlinear, args.with_dates)


if __name__ == "__main__":
    sys.exit(main())
