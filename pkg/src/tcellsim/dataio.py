"""Datasets, file formats and chart output.

Covers the built-in TREC validation tables and their percentage
conversion, the activated-cell lookup file, trajectory/replicate CSV
serialization, comparison reports, run manifests and static SVG charts.
All readers accept what the writers emit.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError
from .model import ActiveCellTable
from .trajectory import Trajectory

ACTIVES_HEADER = "age_years,active_per_mm3"
TRAJECTORY_HEADER = "t_years,naive_thymus,naive_prolif,memory,total_naive"
REPLICATES_HEADER = "replicate," + TRAJECTORY_HEADER
TREC_HEADER = "age_low,age_high,mean_log10_trec_per_1e6_pbmc,n_individuals"
COMPARISON_HEADER = "scenario,quantity,u_statistic,p_value,method,rms_difference,max_difference"


@dataclass(frozen=True)
class TrecRow:
    """One age bracket: mean log10 TREC per 1e6 PBMC and cohort size."""

    age_low: float
    age_high: float
    mean_log10_trec: float
    n_individuals: int

    def __post_init__(self):
        if self.age_low < 0 or self.age_high < self.age_low:
            raise ValueError(f"bad age range [{self.age_low!r}, {self.age_high!r}]")
        if self.n_individuals < 1:
            raise ValueError(f"n_individuals must be >= 1, got {self.n_individuals!r}")

    @property
    def age_mid(self) -> float:
        return 0.5 * (self.age_low + self.age_high)


@dataclass(frozen=True)
class TrecDataset:
    """An ordered set of TREC measurements grouped by age range."""

    name: str
    source: str
    rows: tuple[TrecRow, ...]

    def __post_init__(self):
        if not self.rows:
            raise ValueError("dataset must contain at least one row")
        for prev, cur in zip(self.rows, self.rows[1:]):
            if cur.age_low <= prev.age_high:
                raise ValueError(
                    f"age ranges must ascend without overlap: "
                    f"[{prev.age_low}, {prev.age_high}] then [{cur.age_low}, {cur.age_high}]"
                )

    def midpoints(self) -> np.ndarray:
        return np.array([row.age_mid for row in self.rows])


_MURRAY_ROWS = (
    (0, 0, 5.03, 48),
    (1, 4, 4.93, 53),
    (5, 9, 4.86, 19),
    (10, 14, 4.86, 19),
    (15, 19, 4.56, 33),
    (20, 24, 3.88, 26),
    (25, 29, 3.75, 47),
    (30, 34, 3.61, 65),
    (35, 39, 3.54, 73),
    (40, 44, 3.52, 52),
    (45, 49, 3.37, 55),
    (50, 54, 3.17, 16),
)

_LORENZI_ROWS = (
    (0, 0, 4.85, 2),
    (1, 4, 5.29, 30),
    (5, 9, 5.05, 33),
    (10, 14, 4.99, 15),
    (15, 19, 4.56, 5),
    (20, 24, 4.55, 12),
    (25, 29, 4.55, 9),
    (30, 34, 4.44, 20),
    (35, 39, 4.23, 15),
    (40, 44, 4.16, 9),
    (45, 49, 3.82, 16),
    (50, 54, 4.21, 21),
)


def _build_dataset(name: str, source: str, raw) -> TrecDataset:
    return TrecDataset(
        name=name,
        source=source,
        rows=tuple(TrecRow(float(a), float(b), float(m), int(k)) for a, b, m, k in raw),
    )


DATASET_NAMES = ("murray", "lorenzi")


def builtin_datasets() -> tuple[TrecDataset, TrecDataset]:
    """Both bundled TREC validation tables, 12 age brackets each."""
    murray = _build_dataset(
        "murray", "Murray et al. 2003 / Cossarizza et al. 1996", _MURRAY_ROWS
    )
    lorenzi = _build_dataset("lorenzi", "Lorenzi et al. 2008", _LORENZI_ROWS)
    return murray, lorenzi


def dataset_by_name(name: str) -> TrecDataset:
    murray, lorenzi = builtin_datasets()
    if name == "murray":
        return murray
    if name == "lorenzi":
        return lorenzi
    raise ValueError(f"unknown dataset {name!r}; expected one of {DATASET_NAMES}")


def to_percentage(dataset: TrecDataset) -> tuple[np.ndarray, np.ndarray]:
    """Linear-scale values as percentages of the age-0 value.

    Returns (ages, percentages) where ages are the range midpoints. The
    log-scale means are exponentiated and normalized by the dataset's own
    age-0 measurement, so every dataset starts at 100 percent.
    """
    first = dataset.rows[0]
    if first.age_low != 0 or first.age_high != 0:
        raise ValueError(f"dataset {dataset.name!r} has no age-0 baseline row")
    base = first.mean_log10_trec
    ages = dataset.midpoints()
    pct = np.array([100.0 * 10.0 ** (row.mean_log10_trec - base) for row in dataset.rows])
    return ages, pct


def packaged_actives_path() -> Path:
    """The bundled placeholder activated-cell table."""
    return Path(__file__).parent / "data" / "actives_placeholder.csv"


def _parse_float(text: str, path: Path, lineno: int, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise DataError(f"{path}, line {lineno}: bad {what} {text!r}") from None


def load_active_table(path: str | Path) -> ActiveCellTable:
    """Read and validate an activated-cell lookup file.

    Expected format: UTF-8 comma-separated text with the header
    'age_years,active_per_mm3' and rows sorted by age. Lines starting
    with '#' are ignored.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read active cell table {path}: {exc}") from exc
    points = []
    header_seen = False
    last_age = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != ACTIVES_HEADER:
                raise DataError(
                    f"{path}, line {lineno}: expected header {ACTIVES_HEADER!r}, got {line!r}"
                )
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise DataError(f"{path}, line {lineno}: expected 2 columns, got {len(parts)}")
        age = _parse_float(parts[0], path, lineno, "age")
        count = _parse_float(parts[1], path, lineno, "count")
        if count < 0:
            raise DataError(f"{path}, line {lineno}: negative count {count!r}")
        if last_age is not None and age <= last_age:
            raise DataError(f"{path}, line {lineno}: ages must increase, got {age!r} after {last_age!r}")
        last_age = age
        points.append((age, count))
    if not header_seen:
        raise DataError(f"{path}: missing header {ACTIVES_HEADER!r}")
    if not points:
        raise DataError(f"{path}: no data rows")
    return ActiveCellTable(points=tuple(points))


def is_placeholder_table(path: str | Path) -> bool:
    """True when the file declares itself a placeholder in its comments."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError:
        return False
    return any(
        line.lstrip().startswith("#") and "placeholder" in line.lower()
        for line in text.splitlines()
    )


def _fmt(value: float) -> str:
    return repr(float(value))


def write_trajectory_csv(path: str | Path, traj: Trajectory) -> None:
    lines = [TRAJECTORY_HEADER]
    total = traj.total_naive
    for i in range(len(traj)):
        lines.append(
            f"{_fmt(traj.times[i])},{_fmt(traj.naive[i])},{_fmt(traj.naive_prolif[i])},"
            f"{_fmt(traj.memory[i])},{_fmt(total[i])}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trajectory_csv(path: str | Path) -> Trajectory:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read trajectory {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != TRAJECTORY_HEADER:
        raise DataError(f"{path}: expected header {TRAJECTORY_HEADER!r}")
    times, n, np_, m = [], [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 5:
            raise DataError(f"{path}, line {lineno}: expected 5 columns, got {len(parts)}")
        times.append(_parse_float(parts[0], path, lineno, "time"))
        n.append(_parse_float(parts[1], path, lineno, "naive_thymus"))
        np_.append(_parse_float(parts[2], path, lineno, "naive_prolif"))
        m.append(_parse_float(parts[3], path, lineno, "memory"))
    try:
        return Trajectory(
            times=np.array(times), naive=np.array(n),
            naive_prolif=np.array(np_), memory=np.array(m),
        )
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc


def write_replicates_csv(path: str | Path, trajectories) -> None:
    lines = [REPLICATES_HEADER]
    for r, traj in enumerate(trajectories):
        total = traj.total_naive
        for i in range(len(traj)):
            lines.append(
                f"{r},{_fmt(traj.times[i])},{_fmt(traj.naive[i])},"
                f"{_fmt(traj.naive_prolif[i])},{_fmt(traj.memory[i])},{_fmt(total[i])}"
            )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_trec_csv(path: str | Path, dataset: TrecDataset) -> None:
    lines = [
        f"# dataset={dataset.name}",
        f"# source={dataset.source}",
        TREC_HEADER,
    ]
    for row in dataset.rows:
        lines.append(
            f"{_fmt(row.age_low)},{_fmt(row.age_high)},{_fmt(row.mean_log10_trec)},{row.n_individuals}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trec_csv(path: str | Path) -> TrecDataset:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read dataset {path}: {exc}") from exc
    name = "unnamed"
    source = ""
    rows = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.startswith("dataset="):
                name = body.split("=", 1)[1]
            elif body.startswith("source="):
                source = body.split("=", 1)[1]
            continue
        if not header_seen:
            if line != TREC_HEADER:
                raise DataError(f"{path}, line {lineno}: expected header {TREC_HEADER!r}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise DataError(f"{path}, line {lineno}: expected 4 columns, got {len(parts)}")
        try:
            count = int(parts[3])
        except ValueError:
            raise DataError(f"{path}, line {lineno}: bad count {parts[3]!r}") from None
        rows.append(
            TrecRow(
                age_low=_parse_float(parts[0], path, lineno, "age_low"),
                age_high=_parse_float(parts[1], path, lineno, "age_high"),
                mean_log10_trec=_parse_float(parts[2], path, lineno, "mean"),
                n_individuals=count,
            )
        )
    if not rows:
        raise DataError(f"{path}: no data rows")
    return TrecDataset(name=name, source=source, rows=tuple(rows))


def write_comparison_csv(path: str | Path, scenario_id: int, comparisons) -> None:
    lines = [COMPARISON_HEADER]
    for cmp in comparisons:
        lines.append(
            f"{scenario_id},{cmp.quantity},{_fmt(cmp.result.u_statistic)},"
            f"{_fmt(cmp.result.p_value)},{cmp.result.method},"
            f"{_fmt(cmp.rms_difference)},{_fmt(cmp.max_difference)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_comparison_csv(path: str | Path) -> list[dict]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read comparison report {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != COMPARISON_HEADER:
        raise DataError(f"{path}: expected header {COMPARISON_HEADER!r}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 7:
            raise DataError(f"{path}, line {lineno}: expected 7 columns, got {len(parts)}")
        rows.append(
            {
                "scenario": int(parts[0]),
                "quantity": parts[1],
                "u_statistic": _parse_float(parts[2], path, lineno, "u_statistic"),
                "p_value": _parse_float(parts[3], path, lineno, "p_value"),
                "method": parts[4],
                "rms_difference": _parse_float(parts[5], path, lineno, "rms_difference"),
                "max_difference": _parse_float(parts[6], path, lineno, "max_difference"),
            }
        )
    return rows


def write_comparison_text(path: str | Path, scenario_id: int, comparisons) -> None:
    lines = [
        f"Rank-sum comparison, scenario {scenario_id}",
        f"{'quantity':>8}  {'U':>10}  {'p':>8}  {'method':>22}  {'rms diff':>12}  {'max diff':>12}",
    ]
    for cmp in comparisons:
        lines.append(
            f"{cmp.quantity:>8}  {cmp.result.u_statistic:>10.1f}  {cmp.result.p_value:>8.4f}  "
            f"{cmp.result.method:>22}  {cmp.rms_difference:>12.4g}  {cmp.max_difference:>12.4g}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def format_comparison_lines(scenario_id: int, comparisons) -> list[str]:
    return [
        f"scenario {scenario_id} {cmp.quantity}: U={cmp.result.u_statistic:.1f} "
        f"p={cmp.result.p_value:.4f} ({cmp.result.method}), "
        f"rms={cmp.rms_difference:.4g}, max={cmp.max_difference:.4g}"
        for cmp in comparisons
    ]


def write_manifest(path: str | Path, entries: dict) -> None:
    """Line-oriented key=value record of one run."""
    lines = [f"{key}={value}" for key, value in entries.items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_manifest(path: str | Path) -> dict:
    entries = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition("=")
        entries[key] = value
    return entries


def render_plot(
    series,
    labels,
    path: str | Path,
    *,
    styles=None,
    title: str | None = None,
    xlabel: str = "age (years)",
    ylabel: str = "cells per mm^3",
) -> None:
    """Write a line/scatter chart of (x, y) series to a vector-graphics file.

    styles, when given, selects 'line' or 'points' per series; 'points'
    overlays measurements on simulated curves.
    """
    series = list(series)
    labels = list(labels)
    if not series:
        raise ValueError("at least one series is required")
    if len(labels) != len(series):
        raise ValueError(f"{len(labels)} labels for {len(series)} series")
    if styles is None:
        styles = ["line"] * len(series)
    if len(styles) != len(series):
        raise ValueError(f"{len(styles)} styles for {len(series)} series")

    import matplotlib

    from matplotlib.figure import Figure

    with matplotlib.rc_context({"svg.hashsalt": "tcellsim"}):
        fig = Figure(figsize=(8, 5))
        ax = fig.subplots()
        markers = iter(["o", "s", "^", "D", "v"])
        for (x, y), label, style in zip(series, labels, styles):
            if style == "points":
                ax.plot(x, y, linestyle="none", marker=next(markers, "o"), label=label)
            else:
                ax.plot(x, y, label=label)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.legend()
        ax.grid(True, linestyle=":", alpha=0.5)
        try:
            fig.savefig(path)
        except OSError as exc:
            raise DataError(f"cannot write chart {path}: {exc}") from exc
