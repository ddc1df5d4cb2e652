"""End-to-end acceptance checks at their stated scales and tolerances.

Each test records one summary line (printed at the end of the session) and
then asserts. The full module takes tens of minutes on one core; select it
with ``-m acceptance`` or skip it with ``-m "not acceptance"``.
"""

import itertools
import time

import numpy as np
import pytest

from nldsim.analysis.bounds import ball_probability, count_primitive_vectors, dmt_reference, gaussian_ball_bounds
from nldsim.cli import main
from nldsim.experiments import (
    FlagshipConfig,
    GapConfig,
    ShortVectorConfig,
    SigmaTailConfig,
    run_flagship,
    run_gap,
    run_short_vector_scaling,
    run_sigma_tail,
)
from nldsim.lattice import LatticeBasis, closest_vector, shortest_vector
from nldsim.rng import BLOCK_SIZE
from oracles import brute_cvp, brute_svp

pytestmark = pytest.mark.acceptance


def test_c1_cvp_svp_exact(acceptance_report):
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    bad_cvp = bad_svp = 0
    for _ in range(1000):
        B = rng.standard_normal((4, 4))
        t = 3.0 * rng.standard_normal(4)
        basis = LatticeBasis(B)
        p, d = closest_vector(basis, t)
        d_ref, c_ref = brute_cvp(B, t)
        bad_cvp += not (tuple(p.coeffs) == c_ref and abs(d - d_ref) <= 1e-9 * max(1.0, d_ref))
        q, s = shortest_vector(basis)
        s_ref = brute_svp(B)
        bad_svp += not (np.any(q.coeffs != 0) and abs(s - s_ref) <= 1e-9 * s_ref)
    elapsed = time.perf_counter() - start
    ok = bad_cvp == 0 and bad_svp == 0 and elapsed < 60
    acceptance_report(1, "CVP/SVP exactness on 1000 random 4-D lattices", ok,
                      f"cvp mismatches {bad_cvp}, svp mismatches {bad_svp}, {elapsed:.1f} s incl. oracle")
    assert ok


def test_c2_singular_value_tail(acceptance_report):
    square = run_sigma_tail(SigmaTailConfig(M=2, N=2, trials=10**6, seed=2001))
    tall = run_sigma_tail(SigmaTailConfig(M=2, N=3, trials=10**7, seed=2002))
    ok = abs(square.fit.slope - 2.0) <= 0.2 and abs(tall.fit.slope - 4.0) <= 0.4
    acceptance_report(2, "sigma_1 tail exponents", ok,
                      f"M=N=2 slope {square.fit.slope:.3f} (2 +- 0.2); M=2,N=3 slope {tall.fit.slope:.3f} (4 +- 0.4)")
    assert ok


def test_c3_short_vector_scaling(acceptance_report):
    res = run_short_vector_scaling(ShortVectorConfig(trials=10**6, seed=3001))
    ok = 3.5 <= res.fit.slope <= 5.0 and res.ratio_spread < 3.0 and len(res.ratios) == len(res.curve)
    acceptance_report(3, "short-vector probability between the envelopes", ok,
                      f"slope {res.fit.slope:.3f} in [3.5, 5]; ratio spread {res.ratio_spread:.2f} < 3")
    assert ok


def test_c4_primitive_counts(acceptance_report):
    counts = {k: count_primitive_vectors(4, k) for k in (1, 2, 3)}
    ok = all(n >= 2 ** (4 * k) for k, n in counts.items())
    acceptance_report(4, "primitive-vector shell counts, dim 4", ok,
                      ", ".join(f"k={k}: {n} >= {2 ** (4 * k)}" for k, n in counts.items()))
    assert ok


def test_c5_gaussian_ball_sandwich(acceptance_report):
    rng = np.random.default_rng(5001)
    draws, chunk = 10**6, 250000
    failures, worst = [], np.inf
    for M in (1, 2):
        for _ in range(20):
            b = (rng.standard_normal(M) + 1j * rng.standard_normal(M)) * np.sqrt(0.5)
            bn = float(np.linalg.norm(b))
            eps = bn * float(np.sqrt(np.exp(rng.uniform(np.log(0.25), np.log(4.0)))))
            lo, hi = gaussian_ball_bounds(bn, eps, M)
            hits = 0
            for _ in range(draws // chunk):
                # v_b = sum_i b_i v_i with independent v_i ~ CN(0, I_M)
                V = (rng.standard_normal((chunk, M, M)) + 1j * rng.standard_normal((chunk, M, M))) * np.sqrt(0.5)
                v = np.einsum("i,kim->km", b, V)
                hits += int(np.count_nonzero(np.sum(np.abs(v) ** 2, axis=1) <= eps * eps))
            p = hits / draws
            margin = min(p - lo, hi - p)
            worst = min(worst, margin)
            if not lo <= p <= hi:
                failures.append((M, bn, eps, p, lo, hi))
            if M == 1:
                exact = 1 - np.exp(-(eps / bn) ** 2)
                assert exact == pytest.approx(ball_probability(bn, eps, 1), rel=1e-12)
                if not lo <= exact <= hi:
                    failures.append(("closed form", bn, eps, exact, lo, hi))
    ok = not failures
    acceptance_report(5, "Gaussian ball sandwich, 40 (b, eps) pairs", ok,
                      f"{len(failures)} outside; smallest margin {worst:.3g}")
    assert ok, failures


def test_c6_flagship_tradeoff(acceptance_report):
    res = run_flagship(FlagshipConfig(trials=10**6, seed=6001))
    s = {k: v.slope for k, v in res.slopes.items()}
    ok = s["golden_ml"] >= 3.0 and s["golden_nld"] <= 2.6 and abs(s["golden_nld"] - s["vblast_ml"]) <= 0.5
    used = [len(v.points) for v in res.slopes.values()]
    acceptance_report(6, "Golden code ML vs NLD diversity", ok,
                      f"ML {s['golden_ml']:.3f} >= 3.0; NLD {s['golden_nld']:.3f} <= 2.6; "
                      f"V-BLAST ML {s['vblast_ml']:.3f} (|diff| {abs(s['golden_nld'] - s['vblast_ml']):.3f} <= 0.5); "
                      f"points fitted {used}")
    assert ok


def test_c7_gap_direction(acceptance_report):
    res = run_gap(GapConfig(seed=7001))
    g = res.gaps
    covered = [x.target_ser for x in g] == list(res.config.targets)
    nonneg = all(x.gap_high >= 0 and x.gap_db >= 0 for x in g)
    nondecr = all(b.gap_high >= a.gap_low for a, b in zip(g, g[1:]))
    ok = covered and nonneg and nondecr
    acceptance_report(7, "NLD-ML gap for V-BLAST is nonnegative and nondecreasing", ok,
                      "; ".join(f"SER {x.target_ser:g}: {x.gap_db:.2f} dB [{x.gap_low:.2f}, {x.gap_high:.2f}]" for x in g))
    assert ok


def test_c8_corollary_identity(acceptance_report):
    rng = np.random.default_rng(8001)
    mismatches = 0
    for M in range(1, 9):
        grids = [None, np.sort(rng.uniform(0, M, 50))]
        for r in grids:
            a = dmt_reference(M, M, "nld_bound", r)
            b = dmt_reference(M, M, "vblast", r)
            mismatches += sum(x != y for x, y in zip(a.points, b.points))
    acceptance_report(8, "NLD bound equals the V-BLAST line when M = N", mismatches == 0,
                      f"{mismatches} differing grid points over M = 1..8")
    assert mismatches == 0


CLI_RUNS = [
    ["--command", "short-vector-scaling", "--eps", "0.1", "0.2", "0.3", "0.4", "--trials", str(3 * BLOCK_SIZE + 5)],
    ["--command", "ser-sweep", "--code", "golden", "--t", "2", "--decoders", "ml", "nld", "lll",
     "--snr-db", "8", "14", "20", "--trials", str(2 * BLOCK_SIZE + 9)],
    ["--command", "ser-sweep", "--code", "vblast", "--snr-db", "10", "30", "--trials", "5000",
     "--min-errors", "20", "--max-trials", "200000"],
    ["--command", "dmt-curves", "--m", "2", "--n", "4"],
    ["--command", "primitive-count", "--k", "1", "2", "3"],
]


def test_c9_determinism(acceptance_report, tmp_path):
    differing = []
    for i, (args, fmt) in enumerate(itertools.product(CLI_RUNS, ("csv", "json"))):
        blobs = []
        for j, threads in enumerate((1, 1, 4, 8)):
            out = tmp_path / f"{i}_{j}"
            code = main(args + ["--seed", "9001", "--threads", str(threads), "--format", fmt, "--out", str(out), "-q"])
            assert code == 0
            blobs.append(out.read_bytes())
        if any(b != blobs[0] for b in blobs):
            differing.append(f"{args[1]}/{fmt}")
    ok = not differing
    acceptance_report(9, "byte-identical CLI output across runs and 1/4/8 threads", ok,
                      f"{len(CLI_RUNS) * 2} command/format pairs, differing: {differing or 'none'}")
    assert ok
