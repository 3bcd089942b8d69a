"""Tabular exports of rankings and experiment results.

All tables are UTF-8 comma-delimited text; floats are written with
``repr`` so they reload exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

from .data_io import SEASONS


def _fmt(v):
    return repr(float(v)) if isinstance(v, float) else v


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_correlation(corr, path) -> Path:
    return write_csv(path, ("feature", "value"), corr.to_rows())


def write_ranking(ranking, path) -> Path:
    return write_csv(path, ("position", "feature"), ranking.to_rows())


def read_ranking(path):
    from .ranking import Ranking

    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return Ranking.from_positions({r["feature"]: int(r["position"]) for r in rows})


# --- experiment results -------------------------------------------------

def long_rows(results) -> list:
    """``(location, season, k, variant, rmse)`` rows in result order."""
    return [(r.location, r.season, r.k, v, e) for r in results for v, e in r.rmse.items()]


def _locations(results):
    return list(dict.fromkeys(r.location for r in results))


def _seasons(results):
    present = set(r.season for r in results)
    return [s for s in SEASONS if s in present] + sorted(present - set(SEASONS))


def _variants(results):
    return list(dict.fromkeys(v for r in results for v in r.rmse))


def pivot(results, variant: str, k: int):
    """Location x season RMSE matrix for one variant and ``k`` (None where absent)."""
    locs, seasons = _locations(results), _seasons(results)
    cell = {(r.location, r.season): r.rmse.get(variant) for r in results if r.k == k}
    return locs, seasons, [[cell.get((l, s)) for s in seasons] for l in locs]


def radial_series(results, k: int, season: str):
    """Per-location RMSE of every variant at one ``(k, season)``: the data of a radial plot."""
    variants = _variants(results)
    rows = [[r.location] + [r.rmse.get(v) for v in variants]
            for r in results if r.k == k and r.season == season]
    return ["location"] + variants, rows


def k_sweep_series(results, location: str, season: str):
    """RMSE of every variant against ``k`` for one (location, season)."""
    variants = _variants(results)
    rows = [[r.k] + [r.rmse.get(v) for v in variants]
            for r in results if r.location == location and r.season == season]
    return ["k"] + variants, sorted(rows)


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in name)


def write_results(results, out_dir) -> list:
    """Write every result table under ``out_dir``; returns the written paths.

    Layout::

        results_long.csv                   location, season, k, variant, rmse
        cells.jsonl                        one structured record per cell
        pivots/<variant>_k<k>.csv          location x season matrices
        plots/radial_k<k>_<season>.csv     per-location RMSE by variant
        plots/ksweep_<location>_<season>.csv
        concordance.csv                    location, season, mean_pairwise, mean_vs_borda
    """
    out = Path(out_dir)
    written = [write_csv(out / "results_long.csv",
                         ("location", "season", "k", "variant", "rmse"), long_rows(results))]

    cells = out / "cells.jsonl"
    with cells.open("w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps(r.to_record(), sort_keys=True) + "\n")
    written.append(cells)

    ks = list(dict.fromkeys(r.k for r in results))
    seasons, locs = _seasons(results), _locations(results)
    for v in _variants(results):
        for k in ks:
            l, s, m = pivot(results, v, k)
            written.append(write_csv(out / "pivots" / f"{v}_k{k}.csv", ["location"] + s,
                                     ([loc] + row for loc, row in zip(l, m))))
    for k in ks:
        for s in seasons:
            header, rows = radial_series(results, k, s)
            if rows:
                written.append(write_csv(out / "plots" / f"radial_k{k}_{s}.csv", header, rows))
    for loc in locs:
        for s in seasons:
            header, rows = k_sweep_series(results, loc, s)
            if rows:
                written.append(write_csv(
                    out / "plots" / f"ksweep_{_safe(loc)}_{s}.csv", header, rows))

    seen, conc_rows = set(), []
    for r in results:
        if (r.location, r.season) not in seen:
            seen.add((r.location, r.season))
            conc_rows.append((r.location, r.season, r.concordance.mean_pairwise,
                              r.concordance.mean_vs_borda))
    written.append(write_csv(out / "concordance.csv",
                             ("location", "season", "mean_pairwise", "mean_vs_borda"), conc_rows))
    return written
