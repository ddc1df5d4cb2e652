import argparse
import logging
import sys
from pathlib import Path

from nldsim.cli import Table, render


def parser(doc, trials, seed):
    p = argparse.ArgumentParser(description=doc.split("\n")[0])
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default="-", help="CSV path, - for stdout")
    return p


def emit(table: Table, out: str) -> None:
    text = render(table, "csv")
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
        print(f"wrote {out}", file=sys.stderr)


logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
