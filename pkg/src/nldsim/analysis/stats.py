"""Binomial estimates, log-log slope fits and SNR-gap interpolation."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

log = logging.getLogger(__name__)

#: Estimates backed by fewer successes are too noisy to fit slopes on.
RARE_EVENT_FLOOR = 20


class InsufficientDataError(ValueError):
    pass


def clopper_pearson(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Exact two-sided binomial confidence interval."""
    if trials <= 0 or not 0 <= successes <= trials:
        raise ValueError(f"invalid counts {successes}/{trials}")
    a = 1.0 - level
    lo = 0.0 if successes == 0 else float(stats.beta.ppf(a / 2, successes, trials - successes + 1))
    hi = 1.0 if successes == trials else float(stats.beta.ppf(1 - a / 2, successes + 1, trials - successes))
    return lo, hi


@dataclass(frozen=True)
class EstimateWithCI:
    value: float
    ci_low: float
    ci_high: float
    trials: int
    successes: int

    @classmethod
    def from_counts(cls, successes: int, trials: int, level: float = 0.95) -> "EstimateWithCI":
        lo, hi = clopper_pearson(successes, trials, level)
        value = successes / trials
        return cls(value, min(lo, value), max(hi, value), int(trials), int(successes))

    def meets_floor(self, floor: int = RARE_EVENT_FLOOR) -> bool:
        return self.successes >= floor


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float  # max |log10 deviation| from the fitted line
    points: list = field(default_factory=list)


def fit_loglog_slope(points) -> SlopeFit:
    """Least-squares slope of ``log y`` against ``log x``."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise InsufficientDataError(f"need at least 3 points, got {len(pts)}")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.any(y <= 0) or np.any(x <= 0):
        raise ValueError("log-log fit needs positive coordinates")
    lx, ly = np.log10(x), np.log10(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.max(np.abs(ly - (slope * lx + intercept))))
    return SlopeFit(float(slope), float(intercept), resid, pts)


def diversity_slope(curve, min_successes: int = 1) -> SlopeFit:
    """Slope of ``-log10(SER)`` against ``log10(SNR)``.

    ``curve`` holds ``(SnrPoint, EstimateWithCI)`` pairs. Points with fewer
    than ``min_successes`` errors are dropped.
    """
    pts = [(snr.rho, est.value) for snr, est in curve if est.successes >= max(min_successes, 1)]
    if len(pts) < 3:
        raise InsufficientDataError(f"only {len(pts)} SNR points with enough errors")
    fit = fit_loglog_slope(pts)
    return SlopeFit(-fit.slope, -fit.intercept, fit.residual, fit.points)


def _crossing_db(snr_db, values, target):
    """First SNR (dB) where a decreasing curve crosses ``target``, or None.

    Interpolates ``log10(value)`` linearly in dB; zero values are dropped.
    """
    pts = [(s, v) for s, v in zip(snr_db, values) if v > 0]
    lt = math.log10(target)
    for (s0, v0), (s1, v1) in zip(pts, pts[1:]):
        a, b = math.log10(v0), math.log10(v1)
        if a >= lt >= b and a != b:
            return s0 + (s1 - s0) * (a - lt) / (a - b)
        if a == lt:
            return s0
    if pts and math.log10(pts[-1][1]) == lt:
        return pts[-1][0]
    return None


@dataclass(frozen=True)
class GapPoint:
    target_ser: float
    gap_db: float
    gap_low: float
    gap_high: float


def gap_analysis(ml_curve, nld_curve, targets=(1e-2, 1e-3, 1e-4)) -> list[GapPoint]:
    """Horizontal dB distance from the ML curve to the NLD curve at each target SER.

    The interval comes from crossing the CI bands: the NLD upper band against
    the ML lower band bounds the gap from above, and vice versa.
    """
    def cols(curve):
        db = [snr.db for snr, _ in curve]
        return db, [e.value for _, e in curve], [e.ci_low for _, e in curve], [e.ci_high for _, e in curve]

    ml_db, ml_v, ml_lo, ml_hi = cols(ml_curve)
    nld_db, nld_v, nld_lo, nld_hi = cols(nld_curve)
    out = []
    for target in targets:
        xs = [_crossing_db(ml_db, ml_v, target), _crossing_db(nld_db, nld_v, target)]
        if None in xs:
            log.warning("target SER %g outside the measured range; skipped", target)
            continue
        ml_early = _crossing_db(ml_db, ml_lo, target)
        ml_late = _crossing_db(ml_db, ml_hi, target)
        nld_early = _crossing_db(nld_db, nld_lo, target)
        nld_late = _crossing_db(nld_db, nld_hi, target)
        gap = xs[1] - xs[0]
        low = nld_early - ml_late if None not in (nld_early, ml_late) else -math.inf
        high = nld_late - ml_early if None not in (nld_late, ml_early) else math.inf
        out.append(GapPoint(target, gap, min(low, gap), max(high, gap)))
    return out
