"""Probability that the received lattice has a short vector, against eps^{2M} ln(1/eps)."""

import numpy as np
from _common import emit, parser

from nldsim.analysis.bounds import bonferroni_lower_bound, fit_envelope_constant, upper_bound_lemma2
from nldsim.cli import Table
from nldsim.experiments import ShortVectorConfig, run_short_vector_scaling

p = parser(__doc__, 10**6, 2)
p.add_argument("--eps-min", type=float, default=0.05)
p.add_argument("--eps-max", type=float, default=0.4)
p.add_argument("--points", type=int, default=7)
args = p.parse_args()

eps = tuple(float(e) for e in np.geomspace(args.eps_min, args.eps_max, args.points))
res = run_short_vector_scaling(ShortVectorConfig(epsilons=eps, trials=args.trials, seed=args.seed, threads=args.threads))
C = fit_envelope_constant(2, eps, [x.value for x in res.curve])
rows = [[e, x.value, x.ci_low, x.ci_high, upper_bound_lemma2(2, e, C), bonferroni_lower_bound(2, e)]
        for e, x in zip(eps, res.curve)]
footer = [("slope", res.fit.slope), ("residual", res.fit.residual), ("ratio_spread", res.ratio_spread),
          ("envelope_C", C)]
emit(Table(["epsilon", "prob", "ci_low", "ci_high", "envelope", "bonferroni"], rows, footer), args.out)
