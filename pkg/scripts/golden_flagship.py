"""Golden code under ML and naive lattice decoding, with rate-matched V-BLAST ML for reference."""

from _common import emit, parser

from nldsim.cli import Table
from nldsim.experiments import FlagshipConfig, run_flagship

p = parser(__doc__, 10**6, 3)
p.add_argument("--max-trials", type=int, default=32 * 10**6)
args = p.parse_args()

res = run_flagship(FlagshipConfig(trials=args.trials, max_trials=args.max_trials, seed=args.seed, threads=args.threads))
rows = []
curves = {"golden_ml": res.golden["ml"], "golden_nld": res.golden["nld"], "vblast_ml": res.vblast_ml}
for name, curve in curves.items():
    rows += [[name, snr.db, x.value, x.ci_low, x.ci_high, x.trials, x.successes] for snr, x in curve]
footer = [(f"slope_{k}", v.slope) for k, v in res.slopes.items()]
emit(Table(["curve", "snr_db", "ser", "ci_low", "ci_high", "trials", "errors"], rows, footer), args.out)
