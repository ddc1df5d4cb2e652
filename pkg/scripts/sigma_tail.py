"""Small-value tail of the smallest singular value of a Rayleigh channel."""

from _common import emit, parser

from nldsim.cli import Table
from nldsim.experiments import SigmaTailConfig, run_sigma_tail

p = parser(__doc__, 10**6, 1)
p.add_argument("--shapes", nargs="+", default=["2x2", "2x3"])
args = p.parse_args()

rows, footer = [], []
for shape in args.shapes:
    M, N = map(int, shape.split("x"))
    res = run_sigma_tail(SigmaTailConfig(M=M, N=N, trials=args.trials, seed=args.seed, threads=args.threads))
    rows += [[M, N, e, x.value, x.ci_low, x.ci_high, x.trials] for e, x in zip(res.config.epsilons, res.curve)]
    footer += [(f"slope_{shape}", res.fit.slope), (f"expected_{shape}", res.expected_slope)]
emit(Table(["M", "N", "epsilon", "prob", "ci_low", "ci_high", "trials"], rows, footer), args.out)
