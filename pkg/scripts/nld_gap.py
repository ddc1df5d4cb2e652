"""SNR gap between naive lattice decoding and ML for square V-BLAST."""

from _common import emit, parser

from nldsim.cli import Table
from nldsim.experiments import GapConfig, run_gap

p = parser(__doc__, 10**6, 4)
p.add_argument("--max-trials", type=int, default=10**7)
p.add_argument("--m", type=int, default=2)
args = p.parse_args()

res = run_gap(GapConfig(M=args.m, trials=args.trials, max_trials=args.max_trials, seed=args.seed, threads=args.threads))
rows = [[g.target_ser, g.gap_db, g.gap_low, g.gap_high] for g in res.gaps]
footer = []
for dec, curve in res.curves.items():
    footer += [(f"{dec}_{snr.db:g}dB", f"{x.successes}/{x.trials}") for snr, x in curve]
emit(Table(["target_ser", "gap_db", "gap_low", "gap_high"], rows, footer), args.out)
