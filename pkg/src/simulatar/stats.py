"""Paired equivalence testing for simulator-vs-headset rating studies.

Two one-sided tests (TOST) on paired Likert-rating differences: the
ratings are practically equivalent when the mean difference is
significantly above -bound AND significantly below +bound, with bound
defaulting to one rating point. A context grid summarizes per-condition
outcomes: green when both design variants test equivalent, yellow when
exactly one does, red when neither does.

The Student t CDF is computed through the regularized incomplete beta
function (continued-fraction evaluation, Lentz's method), accurate to
1e-9 against a high-precision reference.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import ConfigError, DegenerateVarianceError, DomainError, InsufficientDataError

_BETA_EPS = 1e-15
_BETA_TINY = 1e-300
_BETA_MAX_ITER = 300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz's method)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_TINY:
        d = _BETA_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_TINY:
            d = _BETA_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETA_TINY:
            c = _BETA_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}")


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise DomainError(f"beta parameters must be > 0, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must be in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # Use the continued fraction on the side where it converges fast.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_cdf(t: float, df: float) -> float:
    """CDF of Student's t distribution with df degrees of freedom.

    Two complementary incomplete-beta parametrizations keep full precision
    at both ends: the tail form df/(df + t^2) would round to 1 for tiny t
    and lose the O(t) term, so small t uses the central probability
    P(|T| <= |t|) = I_z(1/2, df/2) with z = t^2/(df + t^2) instead.
    """
    if df <= 0:
        raise DomainError(f"degrees of freedom must be > 0, got {df}")
    if t == 0.0:
        return 0.5
    t2 = t * t
    if t2 > df:
        x = df / (df + t2)
        tail = 0.5 * betainc_reg(df / 2.0, 0.5, x)
        return 1.0 - tail if t > 0 else tail
    central = 0.5 * betainc_reg(0.5, df / 2.0, t2 / (df + t2))
    return 0.5 + central if t > 0 else 0.5 - central


def t_sf(t: float, df: float) -> float:
    """Upper tail probability P(T > t)."""
    return t_cdf(-t, df)


@dataclass(frozen=True)
class TostResult:
    n: int
    mean_diff: float
    sd_diff: float
    t_lower: float
    t_upper: float
    p_lower: float
    p_upper: float
    bound: float
    alpha: float
    equivalent: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mean_diff": self.mean_diff,
            "sd_diff": self.sd_diff,
            "t_lower": self.t_lower,
            "t_upper": self.t_upper,
            "p_lower": self.p_lower,
            "p_upper": self.p_upper,
            "bound": self.bound,
            "alpha": self.alpha,
            "equivalent": self.equivalent,
        }


def tost_paired(diffs: list[float], bound: float = 1.0, alpha: float = 0.05) -> TostResult:
    """Two one-sided t tests on paired differences against +/-bound.

    Lower test: H0 mean <= -bound, rejected by a large positive
    t_lower = (mean + bound) / se.  Upper test: H0 mean >= +bound,
    rejected by a large negative t_upper = (mean - bound) / se.
    Equivalent iff max(p_lower, p_upper) < alpha.
    """
    if bound <= 0:
        raise DomainError(f"bound must be > 0, got {bound}")
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    n = len(diffs)
    if n < 2:
        raise InsufficientDataError(f"need at least 2 paired differences, got {n}")
    mean = math.fsum(diffs) / n
    ss = math.fsum((d - mean) ** 2 for d in diffs)
    sd = math.sqrt(ss / (n - 1))
    if sd == 0.0:
        raise DegenerateVarianceError(
            f"all {n} paired differences are identical ({diffs[0]}); t statistic undefined"
        )
    se = sd / math.sqrt(n)
    df = n - 1
    t_lower = (mean + bound) / se
    t_upper = (mean - bound) / se
    p_lower = t_sf(t_lower, df)
    p_upper = t_cdf(t_upper, df)
    return TostResult(
        n=n,
        mean_diff=mean,
        sd_diff=sd,
        t_lower=t_lower,
        t_upper=t_upper,
        p_lower=p_lower,
        p_upper=p_upper,
        bound=bound,
        alpha=alpha,
        equivalent=max(p_lower, p_upper) < alpha,
    )


class Variant(Enum):
    A = "A"
    B = "B"


class Method(Enum):
    SIMULATAR = "simulatar"
    HMD = "hmd"


class Dimension(Enum):
    NOTICEABILITY = "noticeability"
    IDENTIFIABILITY = "identifiability"
    COMFORT = "comfort"
    AWARENESS = "awareness"
    MULTITASKABILITY = "multitaskability"


@dataclass(frozen=True)
class RatingRecord:
    participant: str
    context: str
    variant: Variant
    method: Method
    dimension: Dimension
    rating: int

    def __post_init__(self):
        if not 1 <= self.rating <= 7:
            raise ConfigError(f"rating must be in [1, 7], got {self.rating}")


class CellColor(Enum):
    GREEN = "green"
    YELLOW = "yellow"
    RED = "red"


@dataclass
class EquivalenceGrid:
    """Per (context, dimension) classification of equivalence outcomes."""

    cells: dict[tuple[str, str], CellColor] = field(default_factory=dict)
    results: dict[tuple[str, str, str], TostResult] = field(default_factory=dict)
    indeterminate: list[tuple[str, str, str, str]] = field(default_factory=list)
    unpaired_count: int = 0

    def to_dict(self) -> dict:
        return {
            "cells": [
                {"context": ctx, "dimension": dim, "color": color.value}
                for (ctx, dim), color in sorted(self.cells.items())
            ],
            "results": [
                {"context": ctx, "dimension": dim, "variant": var, **res.to_dict()}
                for (ctx, dim, var), res in sorted(self.results.items())
            ],
            "indeterminate": [
                {"context": ctx, "dimension": dim, "variant": var, "reason": reason}
                for ctx, dim, var, reason in self.indeterminate
            ],
            "unpaired_count": self.unpaired_count,
        }


def _paired_diffs(records: list[RatingRecord]) -> tuple[list[float], int]:
    """Per-participant simulator-minus-headset differences for one cell.

    A participant's repeats within the cell average first; participants
    missing either method are unpaired and excluded.
    """
    by_participant: dict[str, dict[Method, list[int]]] = {}
    for rec in records:
        by_participant.setdefault(rec.participant, {}).setdefault(rec.method, []).append(rec.rating)
    diffs: list[float] = []
    unpaired = 0
    for participant in sorted(by_participant):
        per_method = by_participant[participant]
        if Method.SIMULATAR in per_method and Method.HMD in per_method:
            sim = sum(per_method[Method.SIMULATAR]) / len(per_method[Method.SIMULATAR])
            hmd = sum(per_method[Method.HMD]) / len(per_method[Method.HMD])
            diffs.append(sim - hmd)
        else:
            unpaired += 1
    return diffs, unpaired


def build_grid(records: list[RatingRecord], bound: float = 1.0, alpha: float = 0.05) -> EquivalenceGrid:
    """Run TOST per (context, variant, dimension) and color the context grid."""
    grouped: dict[tuple[str, str, str], list[RatingRecord]] = {}
    for rec in records:
        key = (rec.context, rec.dimension.value, rec.variant.value)
        grouped.setdefault(key, []).append(rec)

    grid = EquivalenceGrid()
    outcomes: dict[tuple[str, str], dict[str, bool | None]] = {}
    for (context, dimension, variant), cell_records in sorted(grouped.items()):
        diffs, unpaired = _paired_diffs(cell_records)
        grid.unpaired_count += unpaired
        try:
            result = tost_paired(diffs, bound=bound, alpha=alpha)
        except DegenerateVarianceError:
            grid.indeterminate.append((context, dimension, variant, "degenerate variance"))
            outcomes.setdefault((context, dimension), {})[variant] = None
            continue
        except InsufficientDataError:
            grid.indeterminate.append((context, dimension, variant, "insufficient data"))
            outcomes.setdefault((context, dimension), {})[variant] = None
            continue
        grid.results[(context, dimension, variant)] = result
        outcomes.setdefault((context, dimension), {})[variant] = result.equivalent

    for (context, dimension), per_variant in outcomes.items():
        verdicts = list(per_variant.values())
        if any(v is None for v in verdicts):
            continue  # already listed as indeterminate
        n_equiv = sum(verdicts)
        if n_equiv == len(verdicts):
            grid.cells[(context, dimension)] = CellColor.GREEN
        elif n_equiv > 0:
            grid.cells[(context, dimension)] = CellColor.YELLOW
        else:
            grid.cells[(context, dimension)] = CellColor.RED
    return grid


def load_ratings_csv(path: str | Path) -> list[RatingRecord]:
    """Read rating records from a CSV with the documented header."""
    path = Path(path)
    expected = ["participant", "context", "variant", "method", "dimension", "rating"]
    records: list[RatingRecord] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != expected:
            raise ConfigError(f"{path}: expected header {','.join(expected)}, got {reader.fieldnames}")
        for lineno, row in enumerate(reader, start=2):
            try:
                records.append(
                    RatingRecord(
                        participant=row["participant"].strip(),
                        context=row["context"].strip(),
                        variant=Variant(row["variant"].strip()),
                        method=Method(row["method"].strip()),
                        dimension=Dimension(row["dimension"].strip()),
                        rating=int(row["rating"]),
                    )
                )
            except (ValueError, ConfigError) as exc:
                raise ConfigError(f"{path}: line {lineno}: {exc}") from None
    return records
