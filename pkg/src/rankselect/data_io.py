"""Feature tables: loading, writing, seasonal stratification and synthetic data.

A :class:`FeatureTable` holds weekly observations of named numeric
predictors plus one numeric target column (the forecast error, ``"error"``
by default). Files are UTF-8 comma-delimited text with a header row and an
optional ISO-8601 ``date`` column.
"""

from __future__ import annotations

import csv
import dataclasses
import datetime as _dt
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .exceptions import (
    EmptyAfterFilter,
    InvalidSpec,
    MissingTarget,
    NoDates,
    ParseError,
    UnknownFeature,
)

logger = logging.getLogger(__name__)

SEASONS = ("DJF", "MAM", "JJA", "SON")

_MONTH_TO_SEASON = {
    12: "DJF", 1: "DJF", 2: "DJF",
    3: "MAM", 4: "MAM", 5: "MAM",
    6: "JJA", 7: "JJA", 8: "JJA",
    9: "SON", 10: "SON", 11: "SON",
}

# Earth-system predictors: 15 fluctuating variables stored as absolute value
# and anomaly, plus 6 circulation indices that are anomalies already.
FLUCTUATING_VARIABLES = (
    "ssrd", "strd", "sst_1", "sst_2", "q", "precip", "wind",
    "sp_diff_meridional", "sp_diff_zonal", "snow", "EVI", "albedo", "EF",
    "SM1", "SM_deep",
)
CIRCULATION_INDICES = ("ENSO", "MJO", "NAO", "PNA", "AAO", "AO")
EARTH_FEATURES = tuple(
    f"{v}{suffix}" for v in FLUCTUATING_VARIABLES for suffix in ("_abs", "_anom")
) + CIRCULATION_INDICES

_MISSING_TOKENS = frozenset({"", "na", "n/a", "nan", "null", "none"})


def season_of_month(month: int) -> str:
    """Meteorological season label (DJF/MAM/JJA/SON) for a month 1..12."""
    try:
        return _MONTH_TO_SEASON[int(month)]
    except KeyError:
        raise ValueError(f"month must be in 1..12, got {month!r}") from None


@dataclass(frozen=True, eq=False)
class FeatureTable:
    """Rows of named numeric features plus one numeric target.

    Parameters
    ----------
    feature_names : sequence of str
        Unique, non-empty predictor names, in column order.
    X : ndarray of shape (n_rows, n_features)
    y : ndarray of shape (n_rows,)
    target_name : str
    dates : ndarray of datetime64[D], optional
        Representative date of each weekly row.
    n_dropped : int
        Rows discarded at load time because of missing/non-finite values.
    metadata : mapping
        Free-form annotations (e.g. the informative features of a
        synthetic table).
    """

    feature_names: tuple
    X: np.ndarray
    y: np.ndarray
    target_name: str = "error"
    dates: np.ndarray | None = None
    n_dropped: int = 0
    metadata: Mapping = field(default_factory=dict)

    def __post_init__(self):
        names = tuple(str(n) for n in self.feature_names)
        if any(not n for n in names):
            raise ValueError("feature names must be non-empty")
        if len(set(names)) != len(names):
            raise ValueError("feature names must be unique")
        if self.target_name in names:
            raise ValueError(f"target {self.target_name!r} is also a feature name")

        X = np.array(self.X, dtype=np.float64)
        y = np.array(self.y, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != len(names):
            raise ValueError(
                f"X must have shape (n_rows, {len(names)}), got {X.shape}")
        if y.shape != (X.shape[0],):
            raise ValueError(f"y must have shape ({X.shape[0]},), got {y.shape}")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise ValueError("feature table contains non-finite values")
        X.flags.writeable = False
        y.flags.writeable = False

        dates = self.dates
        if dates is not None:
            dates = np.array(dates, dtype="datetime64[D]")
            if dates.shape != y.shape:
                raise ValueError("dates must have one entry per row")
            dates.flags.writeable = False

        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def rows(self) -> np.ndarray:
        """Feature columns followed by the target, shape (n_rows, n_features + 1)."""
        return np.column_stack([self.X, self.y])

    @property
    def informative_features(self) -> tuple:
        return tuple(self.metadata.get("informative", ()))

    def column(self, name: str) -> np.ndarray:
        if name == self.target_name:
            return self.y
        try:
            return self.X[:, self.feature_names.index(name)]
        except ValueError:
            raise UnknownFeature(f"unknown feature {name!r}") from None

    def select(self, features: Sequence[str]) -> "FeatureTable":
        """Restrict to ``features``, keeping this table's column order."""
        wanted = set(features)
        unknown = wanted.difference(self.feature_names)
        if unknown:
            raise UnknownFeature(f"unknown features: {sorted(unknown)}")
        idx = [j for j, name in enumerate(self.feature_names) if name in wanted]
        return dataclasses.replace(
            self,
            feature_names=tuple(self.feature_names[j] for j in idx),
            X=self.X[:, idx],
        )

    def take(self, indices) -> "FeatureTable":
        """Subset of rows (any integer index array or boolean mask)."""
        indices = np.asarray(indices)
        return dataclasses.replace(
            self,
            X=self.X[indices],
            y=self.y[indices],
            dates=None if self.dates is None else self.dates[indices],
            n_dropped=0,
        )

    def seasons(self) -> np.ndarray:
        if self.dates is None:
            raise NoDates("table has no dates; cannot assign seasons")
        months = self.dates.astype("datetime64[M]").astype(np.int64) % 12 + 1
        return np.array([_MONTH_TO_SEASON[m] for m in months.tolist()], dtype=object)


def _parse_number(cell: str, row: int, column: str) -> float:
    text = cell.strip()
    if text.lower() in _MISSING_TOKENS:
        return math.nan
    try:
        return float(text)
    except ValueError:
        raise ParseError(
            f"row {row}, column {column!r}: cannot parse {cell!r} as a number",
            row=row, column=column) from None


def _parse_date(cell: str, row: int, column: str):
    text = cell.strip()
    if text.lower() in _MISSING_TOKENS:
        return None
    try:
        return _dt.datetime.fromisoformat(text).date()
    except ValueError:
        raise ParseError(
            f"row {row}, column {column!r}: cannot parse {cell!r} as an ISO-8601 date",
            row=row, column=column) from None


def load_table(path, target_name: str = "error", date_column: str = "date") -> FeatureTable:
    """Load a delimited feature table.

    Every column other than ``target_name`` and ``date_column`` is a numeric
    feature. Rows with any missing or non-finite entry are dropped; the count
    is stored on the returned table and logged.

    Raises
    ------
    MissingTarget
        If the target column is absent from the header.
    ParseError
        On a malformed cell, ragged row or duplicate header.
    EmptyAfterFilter
        If fewer than two usable rows remain.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: empty file", row=1) from None
        if target_name not in header:
            raise MissingTarget(f"{path}: target column {target_name!r} not found")
        if len(set(header)) != len(header):
            raise ParseError(f"{path}: duplicate column names in header", row=1)

        date_idx = header.index(date_column) if date_column in header else None
        feature_idx = [j for j, h in enumerate(header)
                       if h != target_name and j != date_idx]
        target_idx = header.index(target_name)
        numeric_idx = feature_idx + [target_idx]

        values, dates, date_ok = [], [], []
        for record in reader:
            line = reader.line_num
            if not record or (len(record) == 1 and not record[0].strip()):
                continue
            if len(record) != len(header):
                raise ParseError(
                    f"{path}: row {line} has {len(record)} fields, expected {len(header)}",
                    row=line)
            values.append([_parse_number(record[j], line, header[j]) for j in numeric_idx])
            if date_idx is not None:
                d = _parse_date(record[date_idx], line, header[date_idx])
                dates.append(d)
                date_ok.append(d is not None)

    values = np.array(values, dtype=np.float64).reshape(-1, len(numeric_idx))
    keep = np.isfinite(values).all(axis=1)
    if date_idx is not None:
        keep &= np.array(date_ok, dtype=bool)
    n_dropped = int((~keep).sum())
    if keep.sum() < 2:
        raise EmptyAfterFilter(
            f"{path}: {int(keep.sum())} usable rows after dropping {n_dropped}; need at least 2")
    if n_dropped:
        logger.warning("%s: dropped %d row(s) with missing or non-finite values",
                       path, n_dropped)

    kept_dates = None
    if date_idx is not None:
        kept_dates = np.array([d for d, k in zip(dates, keep) if k], dtype="datetime64[D]")
    return FeatureTable(
        feature_names=tuple(header[j] for j in feature_idx),
        X=values[keep, :-1],
        y=values[keep, -1],
        target_name=target_name,
        dates=kept_dates,
        n_dropped=n_dropped,
    )


def write_table(table: FeatureTable, path, date_column: str = "date") -> None:
    """Write ``table`` in the format read by :func:`load_table`.

    Floats are written with ``repr`` (shortest round-tripping form), so a
    reload reproduces every value bit-for-bit.
    """
    header = list(table.feature_names) + [table.target_name]
    if table.dates is not None:
        header.insert(0, date_column)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in range(table.n_rows):
            row = [repr(v) for v in table.X[i].tolist()] + [repr(float(table.y[i]))]
            if table.dates is not None:
                row.insert(0, str(table.dates[i]))
            writer.writerow(row)


def split_by_season(table: FeatureTable) -> dict:
    """Partition rows into the four meteorological seasons.

    Each row follows the month of its own date. All four keys are always
    present, in DJF, MAM, JJA, SON order; seasons without rows map to empty
    tables.
    """
    labels = table.seasons()
    return {s: table.take(np.flatnonzero(labels == s)) for s in SEASONS}


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a reproducible planted-signal feature table.

    ``n_informative`` features (standard normal) drive the target through a
    linear term with coefficients of magnitude 2 down to 1 and alternating
    sign, plus ``nonlinear * (x0**2 - 1) / sqrt(2)`` on the first informative
    feature. When ``pairwise_corr > 0``, up to ``n_informative`` of the
    remaining features are redundant copies of an informative partner with
    that correlation; the rest are pure noise.
    """

    n_rows: int
    n_features: int
    n_informative: int
    noise_sd: float = 1.0
    pairwise_corr: float = 0.0
    seed: int = 0
    nonlinear: float = 0.25
    with_dates: bool = False
    start_date: str = "2001-01-01"
    target_name: str = "error"

    def validate(self) -> None:
        if int(self.n_rows) != self.n_rows or self.n_rows < 2:
            raise InvalidSpec(f"n_rows must be an integer >= 2, got {self.n_rows!r}")
        if int(self.n_features) != self.n_features or self.n_features < 1:
            raise InvalidSpec(f"n_features must be a positive integer, got {self.n_features!r}")
        if not 0 <= self.n_informative <= self.n_features:
            raise InvalidSpec(
                f"n_informative must be in [0, n_features], got {self.n_informative!r}")
        if not (math.isfinite(self.noise_sd) and self.noise_sd >= 0):
            raise InvalidSpec(f"noise_sd must be finite and >= 0, got {self.noise_sd!r}")
        if not 0 <= self.pairwise_corr < 1:
            raise InvalidSpec(f"pairwise_corr must be in [0, 1), got {self.pairwise_corr!r}")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpec(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")

    def coefficients(self) -> np.ndarray:
        if self.n_informative == 0:
            return np.zeros(0)
        mags = np.linspace(2.0, 1.0, self.n_informative) if self.n_informative > 1 else np.array([1.5])
        signs = np.where(np.arange(self.n_informative) % 2 == 0, 1.0, -1.0)
        return mags * signs

    def signal_variance(self) -> float:
        """Population variance of the noise-free target."""
        extra = self.nonlinear ** 2 if self.n_informative else 0.0
        return float(np.sum(self.coefficients() ** 2) + extra)

    def with_snr(self, snr: float) -> "SyntheticSpec":
        """Copy with ``noise_sd`` set so that signal/noise variance equals ``snr``."""
        if snr <= 0:
            raise InvalidSpec("snr must be positive")
        return dataclasses.replace(self, noise_sd=math.sqrt(self.signal_variance() / snr))


def generate_synthetic(spec: SyntheticSpec) -> FeatureTable:
    """Draw a planted-signal table; a pure function of ``spec``."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    n, p, m = spec.n_rows, spec.n_features, spec.n_informative
    width = max(2, len(str(p - 1)))
    names = tuple(f"f{j:0{width}d}" for j in range(p))

    X = rng.standard_normal((n, p))
    order = rng.permutation(p)
    informative = np.sort(order[:m])
    redundant = []
    if spec.pairwise_corr > 0:
        rho = spec.pairwise_corr
        for partner, j in zip(informative, order[m:2 * m]):
            X[:, j] = rho * X[:, partner] + math.sqrt(1.0 - rho * rho) * X[:, j]
            redundant.append(int(j))

    beta = spec.coefficients()
    signal = X[:, informative] @ beta
    if m:
        signal = signal + spec.nonlinear * (X[:, informative[0]] ** 2 - 1.0) / math.sqrt(2.0)
    y = signal + spec.noise_sd * rng.standard_normal(n)

    dates = None
    if spec.with_dates:
        dates = np.datetime64(spec.start_date, "D") + 7 * np.arange(n)

    return FeatureTable(
        feature_names=names,
        X=X,
        y=y,
        target_name=spec.target_name,
        dates=dates,
        metadata={
            "informative": [names[j] for j in informative],
            "redundant": [names[j] for j in sorted(redundant)],
            "coefficients": dict(zip((names[j] for j in informative), beta.tolist())),
            "spec": dataclasses.asdict(spec),
        },
    )
