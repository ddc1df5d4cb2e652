"""Trade-off reference curves (optimal, NLD ceiling, V-BLAST) for several antenna counts."""

import argparse

from _common import emit

from nldsim.analysis.bounds import DmtKind, dmt_reference
from nldsim.cli import Table

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--shapes", nargs="+", default=["2x2", "2x3", "2x4", "3x3", "4x4"], help="MxN pairs")
p.add_argument("--out", default="-")
args = p.parse_args()

rows = []
for shape in args.shapes:
    M, N = map(int, shape.split("x"))
    curves = {k: dmt_reference(M, N, k) for k in DmtKind}
    for i, r in enumerate(curves[DmtKind.OPTIMAL].r):
        rows.append([M, N, float(r)] + [float(curves[k].d[i]) for k in (DmtKind.OPTIMAL, DmtKind.NLD_BOUND, DmtKind.VBLAST)])
emit(Table(["M", "N", "r", "optimal", "nld_bound", "vblast"], rows), args.out)
