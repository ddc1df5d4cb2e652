"""Monte Carlo estimators over Rayleigh channel draws.

Trials are grouped in fixed-size blocks; block ``b`` draws everything from
``rng.stream(seed, b)``. A worker pool may evaluate blocks in any order:
the per-block counts are summed afterwards, so results depend only on the
seed and the trial count.

Within a block the draws come in a fixed order (channels, then transmitted
coefficients, then unit-variance noise), and every decoder and SNR point
reuses them. Decoder comparisons are therefore paired trial by trial.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from nldsim import _kernels
from nldsim.analysis.stats import RARE_EVENT_FLOOR, EstimateWithCI, InsufficientDataError
from nldsim.channel import SnrPoint, received_generators
from nldsim.decoders import check_decoder, decode_batch
from nldsim.lattice import DEFAULT_DELTA, DEFAULT_MAX_NODES, EnumerationBudgetError, LatticeBasis, realify_matrix, realify_vector
from nldsim.linalg import batch_singular_values, block_diagonal_lift, sample_gaussian_matrix
from nldsim.rng import BLOCK_SIZE, block_ranges, stream
from nldsim.stcodes import SpaceTimeCode

log = logging.getLogger(__name__)

MIN_SER_TRIALS = 1000


def _map_blocks(fn, blocks, threads: int):
    blocks = list(blocks)
    if threads <= 1 or len(blocks) <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, blocks))


# -- singular values ------------------------------------------------------------


def sigma_tail_counts(M: int, N: int, thresholds_list, trials: int, seed: int, threads: int = 1) -> np.ndarray:
    """Count draws with ``sigma_i <= t_i`` for all ``i``, for each threshold vector."""
    th = np.atleast_2d(np.asarray(thresholds_list, dtype=float))
    if th.shape[1] != M:
        raise ValueError(f"need {M} thresholds per vector, got {th.shape[1]}")
    if np.any(th <= 0):
        raise ValueError("thresholds must be positive")

    def run(block):
        b, n = block
        H = sample_gaussian_matrix(N, M, stream(seed, b), size=BLOCK_SIZE)[:n]
        sv = batch_singular_values(H)
        return np.all(sv[:, np.newaxis, :] <= th[np.newaxis], axis=2).sum(axis=0)

    return np.sum(_map_blocks(run, block_ranges(trials), threads), axis=0)


def estimate_sigma_tail(M: int, N: int, thresholds, trials: int, seed: int, threads: int = 1) -> EstimateWithCI:
    """``Pr{sigma_1 <= t_1, ..., sigma_M <= t_M}`` (ascending singular values)."""
    count = sigma_tail_counts(M, N, [thresholds], trials, seed, threads)[0]
    return EstimateWithCI.from_counts(int(count), trials)


def sigma_min_curve(M: int, N: int, epsilons, trials: int, seed: int, threads: int = 1) -> list[EstimateWithCI]:
    """``Pr{sigma_1 <= eps}`` for each ``eps`` from one set of draws."""
    th = [[e] + [np.inf] * (M - 1) for e in epsilons]
    counts = sigma_tail_counts(M, N, th, trials, seed, threads)
    return [EstimateWithCI.from_counts(int(c), trials) for c in counts]


# -- short vectors of the received lattice --------------------------------------


def short_vector_distances(M: int, N: int, T: int, code_lattice: LatticeBasis, trials: int, seed: int,
                           threads: int = 1, max_nodes: int = DEFAULT_MAX_NODES,
                           with_sigma: bool = False):
    """Exact minimum distance ``d(H_T L)`` for ``trials`` channel draws.

    With ``with_sigma`` also returns the ascending singular values of each
    ``H``.
    """
    L = np.asarray(code_lattice.generator, dtype=complex)
    if L.shape != (M * T, M * T):
        raise ValueError(f"code lattice must be {M * T} x {M * T} complex, got {L.shape}")
    if M > N:
        raise ValueError("need M <= N")

    def run(block):
        b, n = block
        H = sample_gaussian_matrix(N, M, stream(seed, b), size=BLOCK_SIZE)[:n]
        Bs = np.ascontiguousarray(realify_matrix(block_diagonal_lift(H, T) @ L))
        d2, status = _kernels.batch_shortest(Bs, DEFAULT_DELTA, max_nodes)
        bad = np.flatnonzero(status != _kernels.OK)
        if bad.size:
            raise EnumerationBudgetError(f"SVP budget exceeded at trial {b * BLOCK_SIZE + bad[0]}")
        sv = batch_singular_values(H) if with_sigma else None
        return np.sqrt(d2), sv

    parts = _map_blocks(run, block_ranges(trials), threads)
    d = np.concatenate([p[0] for p in parts])
    if with_sigma:
        return d, np.concatenate([p[1] for p in parts])
    return d


def short_vector_curve(M: int, N: int, T: int, code_lattice: LatticeBasis, epsilons, trials: int, seed: int,
                       threads: int = 1) -> list[EstimateWithCI]:
    """``Pr{d(H_T L) <= eps}`` for each ``eps`` from one set of draws."""
    d = short_vector_distances(M, N, T, code_lattice, trials, seed, threads)
    return [EstimateWithCI.from_counts(int(np.count_nonzero(d <= e)), trials) for e in epsilons]


def estimate_short_vector_prob(M: int, N: int, T: int, code_lattice: LatticeBasis, epsilon: float, trials: int,
                               seed: int, threads: int = 1) -> EstimateWithCI:
    return short_vector_curve(M, N, T, code_lattice, [epsilon], trials, seed, threads)[0]


# -- symbol (block) error rates ------------------------------------------------------


def _draw_block(code: SpaceTimeCode, N: int, seed: int, b: int, n: int):
    rng = stream(seed, b)
    H = sample_gaussian_matrix(N, code.M, rng, size=BLOCK_SIZE)[:n]
    k = rng.integers(0, code.levels, size=(BLOCK_SIZE, code.dim))[:n]
    w = sample_gaussian_matrix(BLOCK_SIZE, N * code.T, rng)[:n]
    return H, 2 * k - (code.levels - 1), w


def block_errors(code: SpaceTimeCode, N: int, decoders, snr_points, seed: int, b: int, n: int,
                 max_nodes: int = DEFAULT_MAX_NODES) -> np.ndarray:
    """Error counts ``(len(snr_points), len(decoders))`` for trial block ``b``."""
    H, u, w = _draw_block(code, N, seed, b, n)
    z = u[:, 0::2] + 1j * u[:, 1::2]
    out = np.zeros((len(snr_points), len(decoders)), dtype=np.int64)
    for i, snr in enumerate(snr_points):
        c = code.with_power(snr.P)
        Bs = received_generators(c, H)
        x = c.power_scale * (z @ c.lattice.generator.T)
        y = np.einsum("kij,kj->ki", block_diagonal_lift(H, c.T), x) + math.sqrt(snr.noise_var) * w
        yr = realify_vector(y)
        for j, dec in enumerate(decoders):
            try:
                u_hat = decode_batch(dec, c, Bs, yr, max_nodes=max_nodes)
            except EnumerationBudgetError as exc:
                trial = b * BLOCK_SIZE + getattr(exc, "row", 0)
                raise EnumerationBudgetError(f"{dec} decoder budget exceeded at trial {trial}, SNR {snr.db:.6g} dB") from exc
            out[i, j] = np.count_nonzero(np.any(u_hat != u, axis=1))
    return out


def ser_sweep(code: SpaceTimeCode, decoders, snr_db, trials: int, seed: int, N: int | None = None,
              threads: int = 1, min_errors: int = 0, max_trials: int | None = None,
              max_nodes: int = DEFAULT_MAX_NODES) -> dict:
    """Block error rate of each decoder at each SNR (dB), on paired trials.

    Every point gets ``trials`` trials. With ``min_errors`` > 0, points where
    some decoder has fewer errors keep receiving further trial blocks (the
    same blocks for all decoders) until every decoder reaches the floor or
    the point has used ``max_trials``.

    Returns ``{decoder: [(SnrPoint, EstimateWithCI), ...]}``.
    """
    decoders = [check_decoder(d) for d in ([decoders] if isinstance(decoders, str) else decoders)]
    if not decoders:
        raise ValueError("no decoders given")
    N = code.M if N is None else N
    if code.M > N:
        raise ValueError("need M <= N")
    if trials < MIN_SER_TRIALS:
        raise ValueError(f"need at least {MIN_SER_TRIALS} trials per SNR point, got {trials}")
    if len(snr_db) == 0:
        raise ValueError("empty SNR list")
    points = [SnrPoint.from_db(s, code.M) for s in snr_db]
    max_trials = trials if max_trials is None else max(max_trials, trials)
    n_pts = len(points)
    errors = np.zeros((n_pts, len(decoders)), dtype=np.int64)
    used = np.zeros(n_pts, dtype=np.int64)
    next_block = 0
    todo = list(range(n_pts))
    budget = trials
    while todo:
        blocks = list(block_ranges(budget, start_block=next_block))
        sel = [points[i] for i in todo]

        def run(block, sel=sel):
            return block_errors(code, N, decoders, sel, seed, block[0], block[1], max_nodes)

        counts = np.sum(_map_blocks(run, blocks, threads), axis=0)
        errors[todo] += counts
        used[todo] += budget
        next_block += len(blocks)
        log.info("ser_sweep: %d trials at %d point(s), %d total blocks", budget, len(todo), next_block)
        todo = [i for i in todo if errors[i].min() < min_errors and used[i] < max_trials]
        if todo:
            # all remaining points have seen the same blocks; double their count
            done = int(used[todo[0]])
            budget = min(max(done, BLOCK_SIZE), max_trials - done)
    return {
        dec: [(points[i], EstimateWithCI.from_counts(int(errors[i, j]), int(used[i]))) for i in range(n_pts)]
        for j, dec in enumerate(decoders)
    }


def conditional_nld_error(code: SpaceTimeCode, snr_db: float, trials: int, seed: int, N: int | None = None,
                          radius: float | None = None, threads: int = 1,
                          max_nodes: int = DEFAULT_MAX_NODES) -> tuple[EstimateWithCI, EstimateWithCI]:
    """NLD error rate among trials whose received lattice has a short vector.

    A trial qualifies when ``d(H_T L) <= radius * sigma`` (``sigma = 1``;
    ``radius`` defaults to ``1/sqrt(M)``). Returns the estimate of
    ``Pr{qualifies}`` over all trials and the conditional NLD error rate
    among qualifying trials. Uses the same trial streams as :func:`ser_sweep`.
    """
    N = code.M if N is None else N
    radius = 1.0 / math.sqrt(code.M) if radius is None else float(radius)
    snr = SnrPoint.from_db(snr_db, code.M)
    c = code.with_power(snr.P)

    def run(block):
        b, n = block
        H, u, w = _draw_block(code, N, seed, b, n)
        Bs = np.ascontiguousarray(received_generators(c, H))
        d2, status = _kernels.batch_shortest(Bs, DEFAULT_DELTA, max_nodes)
        if np.any(status != _kernels.OK):
            raise EnumerationBudgetError(f"SVP budget exceeded in trial block {b}")
        short = d2 <= (radius * math.sqrt(snr.noise_var)) ** 2
        if not short.any():
            return 0, 0
        z = u[short, 0::2] + 1j * u[short, 1::2]
        x = c.power_scale * (z @ c.lattice.generator.T)
        y = np.einsum("kij,kj->ki", block_diagonal_lift(H[short], c.T), x) + math.sqrt(snr.noise_var) * w[short]
        u_hat = decode_batch("nld", c, Bs[short], realify_vector(y), max_nodes=max_nodes)
        return int(short.sum()), int(np.count_nonzero(np.any(u_hat != u[short], axis=1)))

    parts = _map_blocks(run, block_ranges(trials), threads)
    hits = sum(p[0] for p in parts)
    errs = sum(p[1] for p in parts)
    if hits == 0:
        raise InsufficientDataError("no trial had a short received-lattice vector")
    return EstimateWithCI.from_counts(hits, trials), EstimateWithCI.from_counts(errs, hits)


def estimate_ser(code: SpaceTimeCode, decoder_id: str, snr_db, trials: int, seed: int, N: int | None = None,
                 threads: int = 1, **kw) -> list:
    """Single-decoder view of :func:`ser_sweep`."""
    return ser_sweep(code, [decoder_id], snr_db, trials, seed, N=N, threads=threads, **kw)[decoder_id]


__all__ = [
    "RARE_EVENT_FLOOR",
    "conditional_nld_error",
    "estimate_ser",
    "estimate_short_vector_prob",
    "estimate_sigma_tail",
    "ser_sweep",
    "short_vector_curve",
    "short_vector_distances",
    "sigma_min_curve",
]
