import math

import numpy as np
import pytest
from scipy import stats

from nldsim.analysis.montecarlo import (
    _draw_block,
    conditional_nld_error,
    estimate_ser,
    estimate_short_vector_prob,
    estimate_sigma_tail,
    ser_sweep,
    short_vector_curve,
    short_vector_distances,
    sigma_min_curve,
)
from nldsim.analysis.bounds import bonferroni_lower_bound, fit_envelope_constant, upper_bound_lemma2
from nldsim.channel import SnrPoint, received_generators
from nldsim.lattice import EnumerationBudgetError, LatticeBasis, realify_matrix, realify_vector, shortest_vector
from nldsim.linalg import sample_gaussian_matrix
from nldsim.rng import BLOCK_SIZE, stream
from nldsim.stcodes import golden_code, vblast_code
from oracles import brute_svp, exhaustive_ml

I1 = LatticeBasis(np.eye(1, dtype=complex))
I2 = LatticeBasis(np.eye(2, dtype=complex))


def inside(est, p):
    return est.ci_low <= p <= est.ci_high


# -- singular values --------------------------------------------------------------


def test_sigma_tail_saturates():
    assert estimate_sigma_tail(2, 3, [1e6, 1e6], 5000, 1).value == 1.0
    with pytest.raises(ValueError):
        estimate_sigma_tail(2, 2, [0.1], 100, 1)
    with pytest.raises(ValueError):
        estimate_sigma_tail(2, 2, [0.1, -1.0], 100, 1)


def test_sigma_min_square_closed_form():
    # for square complex Gaussian H the smallest squared singular value is
    # exponential with mean 1/N
    eps = [0.1, 0.3, 0.6]
    for M, est in ((1, sigma_min_curve(1, 1, eps, 200000, 3)), (2, sigma_min_curve(2, 2, eps, 200000, 4))):
        for e, x in zip(eps, est):
            assert inside(x, 1 - math.exp(-M * e * e))


def test_sigma_tail_joint_thresholds():
    joint = estimate_sigma_tail(2, 2, [0.5, 1.0], 50000, 8)
    first = sigma_min_curve(2, 2, [0.5], 50000, 8)[0]
    assert joint.successes <= first.successes
    assert estimate_sigma_tail(2, 2, [0.5, np.inf], 50000, 8).successes == first.successes


# -- short vectors ---------------------------------------------------------------------------


def test_scalar_short_vector_closed_form():
    est = estimate_short_vector_prob(1, 1, 1, I1, 0.1, 10**6, 5)
    assert inside(est, 1 - math.exp(-0.01))
    assert est.value == pytest.approx(0.00995, rel=0.1)


def test_short_vector_saturates_for_large_eps():
    d, sv = short_vector_distances(2, 2, 1, I2, 4000, 6, with_sigma=True)
    eps = 10 * np.mean(sv[:, -1])
    assert estimate_short_vector_prob(2, 2, 1, I2, eps, 4000, 6).value > 0.99
    assert np.all(d > 0)


def test_short_vector_distances_exact_and_sandwiched():
    code = golden_code(4)
    d, sv = short_vector_distances(2, 2, 2, code.lattice, 300, 7, with_sigma=True)
    dL = shortest_vector(code.lattice)[1]
    assert np.all(sv[:, 0] * dL <= d * (1 + 1e-9)) and np.all(d <= sv[:, -1] * dL * (1 + 1e-9))
    # spot check against the brute-force oracle on the identity lattice
    d2 = short_vector_distances(2, 2, 1, I2, 50, 8)
    H = sample_gaussian_matrix(2, 2, stream(8, 0), size=BLOCK_SIZE)[:50]
    for k in range(50):
        assert d2[k] == pytest.approx(brute_svp(realify_matrix(H[k])), rel=1e-9)


def test_short_vector_envelope_holds_on_held_out_points():
    eps = np.geomspace(0.1, 0.4, 7)
    est = short_vector_curve(2, 2, 1, I2, eps, 100000, 9)
    C = fit_envelope_constant(2, eps[::2], [e.value for e in est[::2]])
    for e, x in zip(eps[1::2], est[1::2]):
        assert x.ci_low <= upper_bound_lemma2(2, e, C)


def test_bonferroni_below_monte_carlo():
    est = estimate_short_vector_prob(2, 2, 1, I2, 0.2, 100000, 10)
    assert bonferroni_lower_bound(2, 0.2) <= est.ci_high


def test_short_vector_rejects_bad_shapes():
    with pytest.raises(ValueError):
        short_vector_distances(2, 2, 2, I2, 10, 0)
    with pytest.raises(ValueError):
        short_vector_distances(2, 1, 1, I2, 10, 0)


# -- SER -----------------------------------------------------------------------------------


def test_noise_free_ml_has_no_errors():
    for code in (vblast_code(2, 1, 4), golden_code(4)):
        assert estimate_ser(code, "ml", [90.0], 2000, 1)[0][1].successes == 0


def test_ser_nonincreasing_in_snr():
    curve = estimate_ser(vblast_code(2, 1, 4), "nld", [0, 5, 10, 15, 20], 20000, 2)
    for (_, a), (_, b) in zip(curve, curve[1:]):
        assert b.ci_low <= a.ci_high


def test_ser_ordering_of_decoders():
    res = ser_sweep(golden_code(4), ["ml", "nld", "lll"], [10, 16], 20000, 3)
    for i in range(2):
        ml, nld, lll = (res[d][i][1] for d in ("ml", "nld", "lll"))
        assert ml.value <= nld.value
        assert nld.ci_low <= lll.ci_high


def test_paired_trials_are_shared():
    code = vblast_code(2, 1, 4)
    both = ser_sweep(code, ["ml", "nld"], [12.0], 5000, 4)
    alone = ser_sweep(code, "ml", [12.0], 5000, 4)
    assert both["ml"] == alone["ml"]


def test_ser_matches_independent_trial_loop():
    # rerun the first block trial by trial with the exhaustive-scan decoder
    code = vblast_code(2, 1, 4)
    n = 1500
    snr = SnrPoint.from_db(20.0, 2)
    c = code.with_power(snr.P)
    H, u, w = _draw_block(code, 2, 11, 0, n)
    Bs = received_generators(c, H)
    errors = 0
    for k in range(n):
        x = Bs[k] @ u[k]
        y = x + realify_vector(w[k])
        errors += not np.array_equal(exhaustive_ml(c.levels, Bs[k], y), u[k])
    est = estimate_ser(code, "ml", [20.0], n, 11)[0][1]
    assert est.successes == errors


def test_thread_count_does_not_change_results():
    code = golden_code(4)
    args = (code, ["ml", "nld", "lll"], [8.0, 14.0], 3 * BLOCK_SIZE + 17, 12)
    ref = ser_sweep(*args, threads=1)
    for t in (2, 4, 8):
        assert ser_sweep(*args, threads=t) == ref
    d1 = short_vector_distances(2, 2, 1, I2, 2 * BLOCK_SIZE + 3, 13, threads=1)
    d4 = short_vector_distances(2, 2, 1, I2, 2 * BLOCK_SIZE + 3, 13, threads=4)
    assert np.array_equal(d1, d4)


def test_adaptive_trials_reach_error_floor():
    code = vblast_code(2, 1, 4)
    res = ser_sweep(code, ["ml", "nld"], [10.0, 25.0], 2000, 14, min_errors=20, max_trials=200000)
    lo, hi = res["ml"]
    assert lo[1].trials == 2000
    assert hi[1].trials > 2000 and hi[1].successes >= 20
    assert res["nld"][1][1].trials == hi[1].trials
    capped = ser_sweep(code, ["ml"], [40.0], 2000, 14, min_errors=10**6, max_trials=20000)
    assert capped["ml"][0][1].trials == 20000


def test_ser_input_validation():
    code = vblast_code(2, 1, 4)
    with pytest.raises(ValueError):
        estimate_ser(code, "ml", [10.0], 999, 0)
    with pytest.raises(ValueError):
        estimate_ser(code, "zf", [10.0], 1000, 0)
    with pytest.raises(ValueError):
        ser_sweep(code, [], [10.0], 1000, 0)
    with pytest.raises(ValueError):
        ser_sweep(code, ["ml"], [10.0], 1000, 0, N=1)


def test_budget_error_reports_trial():
    with pytest.raises(EnumerationBudgetError, match="trial"):
        estimate_ser(golden_code(4), "nld", [5.0], 1000, 0, max_nodes=1)


# -- conditional NLD error ------------------------------------------------------------------


def test_conditional_nld_error_exceeds_constant():
    M = 2
    code = vblast_code(M, 1, 4)
    # 15 dB keeps the short-vector event common enough to condition on
    p_short, cond = conditional_nld_error(code, 15.0, 60000, 15)
    assert p_short.successes >= 20
    floor = stats.norm.sf(1 / math.sqrt(2 * M))
    assert cond.ci_high >= floor
    assert cond.value > floor
