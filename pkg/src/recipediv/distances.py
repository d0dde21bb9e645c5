"""Cultural-distance tables and the correlation between divergence metrics
and distance.

Pearson p-values are two-sided and exact: t = r * sqrt((n-2)/(1-r^2)) against
Student-t(n-2) via the regularized incomplete beta (scipy.special.stdtr), not
a normal approximation, so small-n fixtures are reproduced exactly. Welch's
unequal-variance t-test shares the same CDF.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from scipy.special import stdtr

from .corpus import Corpus
from .novelty import MetricRecord

METRIC_NAMES = ("newness", "uniqueness", "difference", "new_surprise",
                "divergent_surprise")


class Dimension(Enum):
    CULTURAL = "Cultural"
    LINGUISTIC = "Linguistic"
    RELIGIOUS = "Religious"
    GEOGRAPHIC = "Geographic"


class DistanceTableError(ValueError):
    pass


@dataclass(frozen=True)
class DistanceTable:
    """Symmetric country-pair distances for one dimension; diagonal is 0."""

    dimension: Dimension
    entries: dict[tuple[str, str], float]

    def __post_init__(self):
        for (a, b), v in self.entries.items():
            if a >= b:
                raise DistanceTableError(f"entries must be keyed a < b, got {(a, b)}")
            if v < 0:
                raise DistanceTableError(f"negative distance for {(a, b)}: {v}")

    def get(self, a: str, b: str) -> float | None:
        if a == b:
            return 0.0
        key = (a, b) if a < b else (b, a)
        return self.entries.get(key)

    def countries(self) -> set[str]:
        out: set[str] = set()
        for a, b in self.entries:
            out.add(a)
            out.add(b)
        return out


@dataclass(frozen=True)
class CountryCoordinates:
    """Per-country 2-D points: value-survey axes or (lat, lon) degrees."""

    points: dict[str, tuple[float, float]]
    kind: str  # "cultural" | "geographic"

    def __post_init__(self):
        if self.kind == "geographic":
            for iso, (lat, lon) in self.points.items():
                if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
                    raise DistanceTableError(
                        f"coordinates out of range for {iso}: ({lat}, {lon})")


def load_coordinates(path, kind: str) -> CountryCoordinates:
    """CSV ``iso,x,y`` (cultural) or ``iso,lat,lon`` (geographic)."""
    points: dict[str, tuple[float, float]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DistanceTableError("empty coordinate file")
        for row in reader:
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 3:
                raise DistanceTableError(f"expected 3 columns, got {row}")
            points[row[0]] = (float(row[1]), float(row[2]))
    return CountryCoordinates(points=points, kind=kind)


def cultural_distance(coords: CountryCoordinates) -> DistanceTable:
    """Pairwise Euclidean distance on the 2-D cultural map."""
    isos = sorted(coords.points)
    entries = {}
    for i, a in enumerate(isos):
        xa, ya = coords.points[a]
        for b in isos[i + 1:]:
            xb, yb = coords.points[b]
            entries[(a, b)] = math.hypot(xa - xb, ya - yb)
    return DistanceTable(dimension=Dimension.CULTURAL, entries=entries)


EARTH_RADIUS_KM = 6371.0


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float,
                 radius: float = EARTH_RADIUS_KM) -> float:
    p1, l1, p2, l2 = map(math.radians, (lat1, lon1, lat2, lon2))
    h = (math.sin((p2 - p1) / 2) ** 2
         + math.cos(p1) * math.cos(p2) * math.sin((l2 - l1) / 2) ** 2)
    return 2 * radius * math.asin(min(1.0, math.sqrt(h)))


def geographic_distance(coords: CountryCoordinates,
                        radius: float = EARTH_RADIUS_KM) -> DistanceTable:
    """Great-circle distance between country centroids, kilometers."""
    isos = sorted(coords.points)
    entries = {}
    for i, a in enumerate(isos):
        lat_a, lon_a = coords.points[a]
        for b in isos[i + 1:]:
            lat_b, lon_b = coords.points[b]
            entries[(a, b)] = haversine_km(lat_a, lon_a, lat_b, lon_b, radius)
    return DistanceTable(dimension=Dimension.GEOGRAPHIC, entries=entries)


def load_distance_table(path, dimension: Dimension) -> DistanceTable:
    """CSV ``iso_a,iso_b,distance``; symmetrized, conflicts rejected."""
    entries: dict[tuple[str, str], float] = {}
    conflicts: list[tuple[str, str]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DistanceTableError("empty distance file")
        for row in reader:
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 3:
                raise DistanceTableError(f"expected 3 columns, got {row}")
            a, b, v = row[0], row[1], float(row[2])
            if a == b:
                if v != 0.0:
                    conflicts.append((a, b))
                continue
            key = (a, b) if a < b else (b, a)
            if key in entries and entries[key] != v:
                conflicts.append(key)
                continue
            entries[key] = v
    if conflicts:
        raise DistanceTableError(
            "conflicting asymmetric entries for pairs: "
            + ", ".join(f"{a}-{b}" for a, b in sorted(set(conflicts))))
    return DistanceTable(dimension=dimension, entries=entries)


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

def student_t_sf(t: float, df: float) -> float:
    """P(T > t) for Student-t with ``df`` degrees of freedom (exact CDF)."""
    return float(stdtr(df, -t))


def pearson(xs: Sequence[float], ys: Sequence[float]) -> tuple[float | None, float | None, str]:
    """Pearson r with a two-sided Student-t p-value.

    Returns (r, p, flag); flag is "ok", "insufficient_n" (n < 3, p undefined)
    or "undefined_r" (zero variance on either axis).
    """
    n = len(xs)
    if n != len(ys):
        raise ValueError("x and y lengths differ")
    if n < 2:
        return None, None, "insufficient_n"
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    syy = math.fsum((y - my) ** 2 for y in ys)
    if sxx == 0.0 or syy == 0.0:
        return None, None, "undefined_r"
    r = sxy / math.sqrt(sxx * syy)
    r = min(1.0, max(-1.0, r))
    if n < 3:
        return r, None, "insufficient_n"
    if 1.0 - r * r <= 0.0:
        return r, 0.0, "ok"
    t = abs(r) * math.sqrt((n - 2) / (1.0 - r * r))
    return r, 2.0 * student_t_sf(t, n - 2), "ok"


def welch_t_test(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float | None]:
    """Welch's unequal-variance t statistic and two-sided p-value."""
    nx, ny = len(xs), len(ys)
    if nx < 2 or ny < 2:
        return math.nan, None
    mx = math.fsum(xs) / nx
    my = math.fsum(ys) / ny
    vx = math.fsum((x - mx) ** 2 for x in xs) / (nx - 1)
    vy = math.fsum((y - my) ** 2 for y in ys) / (ny - 1)
    se2 = vx / nx + vy / ny
    if se2 == 0.0:
        return 0.0, 1.0 if mx == my else 0.0
    t = (mx - my) / math.sqrt(se2)
    df = se2 ** 2 / ((vx / nx) ** 2 / (nx - 1) + (vy / ny) ** 2 / (ny - 1))
    return t, 2.0 * student_t_sf(abs(t), df)


# ---------------------------------------------------------------------------
# correlation analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorrelationResult:
    metric: str
    dimension: Dimension
    group: str  # model name, "human", or "pooled"
    r: float | None
    p_value: float | None
    n: int
    flag: str  # "ok" | "undefined_r" | "insufficient_n"


@dataclass
class CorrelationReport:
    results: list[CorrelationResult] = field(default_factory=list)
    n_cells: int = 0
    n_dropped_cells: int = 0
    uncovered_countries: set[str] = field(default_factory=set)


def _group_key(record: MetricRecord) -> str:
    if record.source == "ModelGenerated":
        return record.model_name or "unknown-model"
    return "human"


def _aggregate(values: list[float], how: str) -> float:
    if how == "median":
        vs = sorted(values)
        mid = len(vs) // 2
        return vs[mid] if len(vs) % 2 else (vs[mid - 1] + vs[mid]) / 2.0
    return math.fsum(values) / len(values)


def correlate(records: Iterable[MetricRecord], corpus: Corpus,
              table: DistanceTable, group_by: str = "model",
              aggregate: str = "mean",
              metrics: Sequence[str] = METRIC_NAMES) -> CorrelationReport:
    """Correlate per-(dish, country) mean metric values with distances.

    Records from degenerate-threshold communities are excluded. Pairs whose
    origin or variation country is missing from the table are dropped and
    counted in the report rather than imputed.
    """
    usable = [r for r in records if not r.thresholds_degenerate]
    groups: dict[str, list[MetricRecord]] = {}
    if group_by == "pooled":
        groups["pooled"] = usable
    else:
        for r in usable:
            groups.setdefault(_group_key(r), []).append(r)

    report = CorrelationReport()
    for group in sorted(groups):
        group_records = groups[group]
        for metric in metrics:
            cells: dict[tuple[str, str], list[float]] = {}
            for r in group_records:
                cells.setdefault((r.dish_id, r.variation_country), []).append(
                    getattr(r, metric))
            xs: list[float] = []
            ys: list[float] = []
            for (dish_id, country) in sorted(cells):
                dish = corpus.dishes.get(dish_id)
                if dish is None:
                    continue
                d = table.get(dish.origin_country, country)
                report.n_cells += 1
                if d is None:
                    report.n_dropped_cells += 1
                    covered = table.countries()
                    for iso in (dish.origin_country, country):
                        if iso not in covered:
                            report.uncovered_countries.add(iso)
                    continue
                xs.append(d)
                ys.append(_aggregate(cells[(dish_id, country)], aggregate))
            r_val, p_val, flag = pearson(xs, ys) if len(xs) >= 2 else (None, None, "insufficient_n")
            report.results.append(CorrelationResult(
                metric=metric, dimension=table.dimension, group=group,
                r=r_val, p_value=p_val, n=len(xs), flag=flag))
    return report


def write_correlation_csv(report: CorrelationReport, path) -> None:
    """Fig-3-style grid: one row per (group, metric, dimension)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "metric", "dimension", "r", "p_value", "n", "flag"])
        for res in report.results:
            writer.writerow([
                res.group, res.metric, res.dimension.value,
                "" if res.r is None else repr(res.r),
                "" if res.p_value is None else repr(res.p_value),
                res.n, res.flag,
            ])
