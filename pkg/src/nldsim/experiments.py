"""Desk-scale experiments behind the acceptance checks and the scripts.

Each experiment is a frozen config plus a ``run`` function returning the raw
curves and the fitted summary numbers.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from nldsim.analysis.montecarlo import ser_sweep, short_vector_curve, sigma_min_curve
from nldsim.analysis.stats import RARE_EVENT_FLOOR, SlopeFit, diversity_slope, fit_loglog_slope, gap_analysis
from nldsim.lattice import LatticeBasis
from nldsim.stcodes import golden_code, vblast_code


def _usable(points, ests, floor=RARE_EVENT_FLOOR):
    return [(x, e.value) for x, e in zip(points, ests) if e.meets_floor(floor)]


# -- singular-value tail ------------------------------------------------------------


@dataclass(frozen=True)
class SigmaTailConfig:
    M: int = 2
    N: int = 2
    epsilons: tuple = (0.05, 0.07, 0.1, 0.14, 0.2, 0.3, 0.5)
    trials: int = 10**6
    seed: int = 1
    threads: int = 1


@dataclass
class SigmaTailResult:
    config: SigmaTailConfig
    curve: list
    fit: SlopeFit

    @property
    def expected_slope(self) -> int:
        return 2 * (self.config.N - self.config.M + 1)


def run_sigma_tail(cfg: SigmaTailConfig) -> SigmaTailResult:
    """``Pr{sigma_1 <= eps}`` and its log-log slope."""
    curve = sigma_min_curve(cfg.M, cfg.N, cfg.epsilons, cfg.trials, cfg.seed, cfg.threads)
    return SigmaTailResult(cfg, curve, fit_loglog_slope(_usable(cfg.epsilons, curve)))


# -- short vectors of the received lattice ------------------------------------------------


@dataclass(frozen=True)
class ShortVectorConfig:
    M: int = 2
    N: int = 2
    T: int = 1
    epsilons: tuple = tuple(float(e) for e in np.geomspace(0.05, 0.4, 7))
    trials: int = 10**6
    seed: int = 2
    threads: int = 1


@dataclass
class ShortVectorResult:
    config: ShortVectorConfig
    curve: list
    fit: SlopeFit
    ratios: list  # prob / (eps^{2M} ln(1/eps)) per usable point

    @property
    def ratio_spread(self) -> float:
        return max(self.ratios) / min(self.ratios)


def run_short_vector_scaling(cfg: ShortVectorConfig) -> ShortVectorResult:
    """``Pr{d(H_T L) <= eps}`` for the identity code lattice."""
    L = LatticeBasis(np.eye(cfg.M * cfg.T, dtype=complex))
    curve = short_vector_curve(cfg.M, cfg.N, cfg.T, L, cfg.epsilons, cfg.trials, cfg.seed, cfg.threads)
    pts = _usable(cfg.epsilons, curve)
    ratios = [p / (e ** (2 * cfg.M) * math.log(1 / e)) for e, p in pts]
    return ShortVectorResult(cfg, curve, fit_loglog_slope(pts), ratios)


# -- Golden code versus V-BLAST ----------------------------------------------------------------


@dataclass(frozen=True)
class FlagshipConfig:
    snr_db: tuple = tuple(range(14, 31, 2))
    qam: int = 4
    trials: int = 10**6
    min_errors: int = RARE_EVENT_FLOOR
    max_trials: int = 32 * 10**6
    seed: int = 3
    threads: int = 1


@dataclass
class FlagshipResult:
    config: FlagshipConfig
    golden: dict  # decoder -> curve
    vblast_ml: list
    slopes: dict = field(default_factory=dict)


def run_flagship(cfg: FlagshipConfig) -> FlagshipResult:
    """ML and NLD on the 2x2 Golden code, plus ML on rate-matched V-BLAST.

    Both codes carry 4 bits per channel use at 4-QAM. Slopes use only the
    points that reached the rare-event floor.
    """
    kw = dict(trials=cfg.trials, seed=cfg.seed, threads=cfg.threads, min_errors=cfg.min_errors,
              max_trials=cfg.max_trials)
    golden = ser_sweep(golden_code(cfg.qam), ["ml", "nld"], cfg.snr_db, **kw)
    vb = ser_sweep(vblast_code(2, 1, cfg.qam), ["ml"], cfg.snr_db, **kw)["ml"]
    slopes = {
        "golden_ml": diversity_slope(golden["ml"], RARE_EVENT_FLOOR),
        "golden_nld": diversity_slope(golden["nld"], RARE_EVENT_FLOOR),
        "vblast_ml": diversity_slope(vb, RARE_EVENT_FLOOR),
    }
    return FlagshipResult(cfg, golden, vb, slopes)


# -- ML/NLD gap ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class GapConfig:
    M: int = 2
    qam: int = 4
    snr_db: tuple = tuple(range(10, 41, 3))
    targets: tuple = (1e-2, 1e-3, 1e-4)
    trials: int = 10**6
    min_errors: int = RARE_EVENT_FLOOR
    max_trials: int = 10**7
    seed: int = 4
    threads: int = 1


@dataclass
class GapResult:
    config: GapConfig
    curves: dict
    gaps: list


def run_gap(cfg: GapConfig) -> GapResult:
    """SNR gap between NLD and ML for square V-BLAST on paired trials."""
    curves = ser_sweep(vblast_code(cfg.M, 1, cfg.qam), ["ml", "nld"], cfg.snr_db, cfg.trials, cfg.seed,
                       threads=cfg.threads, min_errors=cfg.min_errors, max_trials=cfg.max_trials)
    return GapResult(cfg, curves, gap_analysis(curves["ml"], curves["nld"], cfg.targets))
