"""Command-line driver for the experiments.

Each command turns an :class:`ExperimentConfig` into one table (header,
rows, footer) and writes it as CSV or JSON. Output depends only on the
config and seed; progress goes to stderr.

Exit codes: 0 success, 2 configuration error, 3 compute budget exceeded.
"""

import argparse
import csv
import dataclasses
import io
import json
import logging
import sys
from dataclasses import dataclass, field

import numpy as np

from nldsim.analysis.bounds import CountBudgetError, DmtKind, count_primitive_vectors, dmt_reference
from nldsim.analysis.montecarlo import MIN_SER_TRIALS, ser_sweep, short_vector_curve
from nldsim.analysis.stats import RARE_EVENT_FLOOR, InsufficientDataError, diversity_slope, fit_loglog_slope
from nldsim.decoders import DECODERS
from nldsim.lattice import EnumerationBudgetError, LatticeBasis
from nldsim.stcodes import CODES, CodebookTooLargeError, make_code

log = logging.getLogger("nldsim")

COMMANDS = ("short-vector-scaling", "ser-sweep", "dmt-curves", "primitive-count")
CODE_LATTICES = ("identity",) + tuple(CODES)
EXIT_OK, EXIT_CONFIG, EXIT_BUDGET = 0, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    M: int = 2
    N: int = 2
    T: int = 1
    code: str = "vblast"
    qam: int = 4
    decoders: list = field(default_factory=lambda: ["ml", "nld"])
    snr_db_list: list = field(default_factory=list)
    epsilon_list: list = field(default_factory=list)
    trials: int = 10**4
    seed: int = 0
    output_path: str = "-"
    format: str = "csv"
    threads: int = 1
    min_errors: int = 0
    max_trials: int | None = None
    k_list: list = field(default_factory=lambda: [1, 2, 3])
    r_list: list | None = None

    def validate(self) -> "ExperimentConfig":
        """Check every field the command uses; raises ConfigError naming the field."""
        def bad(name, msg):
            raise ConfigError(f"field {name!r}: {msg}")

        if self.command not in COMMANDS:
            bad("command", f"unknown command {self.command!r}; valid: {', '.join(COMMANDS)}")
        if self.format not in ("csv", "json"):
            bad("format", f"must be csv or json, got {self.format!r}")
        for name in ("M", "N", "T", "trials", "threads"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                bad(name, f"must be a positive integer, got {v!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            bad("seed", f"must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.M > self.N:
            bad("M", f"M = {self.M} exceeds N = {self.N}")
        cmd = self.command
        if cmd == "short-vector-scaling":
            if not self.epsilon_list:
                bad("epsilon_list", "must be nonempty")
            if any(not e > 0 for e in self.epsilon_list):
                bad("epsilon_list", "values must be positive")
            if self.code not in CODE_LATTICES:
                bad("code", f"unknown code lattice {self.code!r}; valid: {', '.join(CODE_LATTICES)}")
            if 2 * self.M * self.T > 12:
                bad("T", "realified dimension 2MT must be at most 12")
        elif cmd == "ser-sweep":
            if not self.decoders:
                bad("decoders", "must be nonempty")
            for d in self.decoders:
                if d not in DECODERS:
                    bad("decoders", f"unknown decoder {d!r}; valid: {', '.join(DECODERS)}")
            if not self.snr_db_list:
                bad("snr_db_list", "must be nonempty")
            if self.code not in CODES:
                bad("code", f"unknown code {self.code!r}; valid: {', '.join(CODES)}")
            if self.trials < MIN_SER_TRIALS:
                bad("trials", f"need at least {MIN_SER_TRIALS} trials per SNR point")
            if self.min_errors < 0:
                bad("min_errors", "must be nonnegative")
        elif cmd == "dmt-curves":
            if self.r_list is not None:
                if not self.r_list:
                    bad("r_list", "must be nonempty")
                if any(not 0 <= r <= self.M for r in self.r_list):
                    bad("r_list", f"multiplexing gains must lie in [0, {self.M}]")
        elif cmd == "primitive-count":
            if not self.k_list or any(isinstance(k, bool) or not isinstance(k, int) or k < 0 for k in self.k_list):
                bad("k_list", "must be a nonempty list of nonnegative integers")
        if cmd == "ser-sweep" or (cmd == "short-vector-scaling" and self.code != "identity"):
            try:
                make_code(self.code, self.M, self.T, self.qam)
            except ValueError as exc:
                bad("code", str(exc))
        return self


# -- tables --------------------------------------------------------------------


@dataclass
class Table:
    columns: list
    rows: list
    footer: list = field(default_factory=list)  # (key, value)


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(table: Table, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "columns": table.columns,
            "rows": [dict(zip(table.columns, r)) for r in table.rows],
            "footer": {k: v for k, v in table.footer},
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for r in table.rows:
        w.writerow([_cell(v) for v in r])
    for k, v in table.footer:
        w.writerow([f"#{k}", _cell(v)])
    return buf.getvalue()


# -- commands -----------------------------------------------------------------


def _code_lattice(cfg: ExperimentConfig) -> LatticeBasis:
    if cfg.code == "identity":
        return LatticeBasis(np.eye(cfg.M * cfg.T, dtype=complex))
    return make_code(cfg.code, cfg.M, cfg.T, cfg.qam).lattice


def cmd_short_vector_scaling(cfg: ExperimentConfig) -> Table:
    eps = sorted(float(e) for e in cfg.epsilon_list)
    log.info("short-vector-scaling: %d trials, M=%d N=%d T=%d", cfg.trials, cfg.M, cfg.N, cfg.T)
    ests = short_vector_curve(cfg.M, cfg.N, cfg.T, _code_lattice(cfg), eps, cfg.trials, cfg.seed, cfg.threads)
    rows = [[e, est.value, est.ci_low, est.ci_high, est.trials] for e, est in zip(eps, ests)]
    usable = [(e, est.value) for e, est in zip(eps, ests) if est.meets_floor()]
    sparse = [e for e, est in zip(eps, ests) if not est.meets_floor()]
    footer = []
    try:
        fit = fit_loglog_slope(usable)
        footer += [("slope", fit.slope), ("residual", fit.residual)]
    except InsufficientDataError:
        footer += [("slope", "insufficient-data"), ("residual", "insufficient-data")]
    if sparse:
        log.warning("%d epsilon value(s) have fewer than %d hits; excluded from the fit, rerun with more trials",
                    len(sparse), RARE_EVENT_FLOOR)
        footer.append(("below_floor", " ".join(repr(e) for e in sparse)))
    footer += [("ref_exponent_nld", 2 * cfg.M * (cfg.N - cfg.M + 1)), ("ref_exponent_2M", 2 * cfg.M)]
    return Table(["epsilon", "prob", "ci_low", "ci_high", "trials"], rows, footer)


def cmd_ser_sweep(cfg: ExperimentConfig) -> Table:
    code = make_code(cfg.code, cfg.M, cfg.T, cfg.qam)
    log.info("ser-sweep: %s %d-QAM, decoders %s, %d SNR points", code.name, cfg.qam, ",".join(cfg.decoders),
             len(cfg.snr_db_list))
    res = ser_sweep(code, cfg.decoders, [float(s) for s in cfg.snr_db_list], cfg.trials, cfg.seed, N=cfg.N,
                    threads=cfg.threads, min_errors=cfg.min_errors, max_trials=cfg.max_trials)
    rows = []
    for i, s in enumerate(cfg.snr_db_list):
        for d in cfg.decoders:
            est = res[d][i][1]
            rows.append([float(s), d, est.value, est.ci_low, est.ci_high, est.trials])
    footer = []
    for d in cfg.decoders:
        try:
            fit = diversity_slope(res[d])
            footer += [(f"slope_{d}", fit.slope), (f"residual_{d}", fit.residual)]
        except InsufficientDataError:
            footer.append((f"slope_{d}", "insufficient-data"))
    return Table(["snr_db", "decoder", "ser", "ci_low", "ci_high", "trials"], rows, footer)


def cmd_dmt_curves(cfg: ExperimentConfig) -> Table:
    curves = {k: dmt_reference(cfg.M, cfg.N, k, cfg.r_list) for k in DmtKind}
    r = curves[DmtKind.OPTIMAL].r
    rows = [[float(r[i])] + [float(curves[k].d[i]) for k in (DmtKind.OPTIMAL, DmtKind.NLD_BOUND, DmtKind.VBLAST)]
            for i in range(len(r))]
    return Table(["r", "optimal", "nld_bound", "vblast"], rows, [("M", cfg.M), ("N", cfg.N)])


def cmd_primitive_count(cfg: ExperimentConfig) -> Table:
    dim = 2 * cfg.M
    rows = []
    for k in cfg.k_list:
        log.info("primitive-count: dim %d, shell k=%d", dim, k)
        n = count_primitive_vectors(dim, k)
        bound = 2 ** (dim * k)
        # the shell bound is stated for M >= 2 only
        verdict = ("pass" if n >= bound else "fail") if cfg.M >= 2 else "n/a"
        rows.append([k, n, bound, verdict])
    return Table(["k", "count", "bound", "pass"], rows, [("dim", dim)])


COMMAND_FNS = {
    "short-vector-scaling": cmd_short_vector_scaling,
    "ser-sweep": cmd_ser_sweep,
    "dmt-curves": cmd_dmt_curves,
    "primitive-count": cmd_primitive_count,
}


def run(cfg: ExperimentConfig) -> str:
    """Validate ``cfg``, run its command and return the rendered output."""
    cfg.validate()
    return render(COMMAND_FNS[cfg.command](cfg), cfg.format)


# -- argument handling ----------------------------------------------------------

# flag dest -> config field
_FLAG_FIELDS = {
    "command": "command", "m": "M", "n": "N", "t": "T", "code": "code", "qam": "qam", "decoders": "decoders",
    "snr_db": "snr_db_list", "eps": "epsilon_list", "trials": "trials", "seed": "seed", "out": "output_path",
    "format": "format", "threads": "threads", "min_errors": "min_errors", "max_trials": "max_trials",
    "k": "k_list", "r": "r_list",
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nldsim", description=__doc__.split("\n")[0])
    p.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override it")
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--m", type=int, help="transmit antennas")
    p.add_argument("--n", type=int, help="receive antennas")
    p.add_argument("--t", type=int, help="channel uses per block")
    p.add_argument("--code", help=f"code id ({', '.join(CODES)}); short-vector-scaling also accepts identity")
    p.add_argument("--qam", type=int, help="QAM order per coordinate pair (4 or 16)")
    p.add_argument("--decoders", nargs="+", help=f"decoder ids ({', '.join(DECODERS)})")
    p.add_argument("--snr-db", nargs="+", type=float, dest="snr_db")
    p.add_argument("--eps", nargs="+", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output file, - for stdout")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--threads", type=int)
    p.add_argument("--min-errors", type=int, dest="min_errors", help="keep adding trials until each decoder has this many errors")
    p.add_argument("--max-trials", type=int, dest="max_trials", help="cap on trials per SNR point with --min-errors")
    p.add_argument("--k", nargs="+", type=int, help="shell indices for primitive-count")
    p.add_argument("--r", nargs="+", type=float, help="multiplexing-gain grid for dmt-curves")
    p.add_argument("-q", "--quiet", action="store_true", help="no progress messages")
    return p


def _line_of(text: str, key: str) -> int | None:
    for i, line in enumerate(text.splitlines(), 1):
        if f'"{key}"' in line:
            return i
    return None


def load_config_file(path: str) -> tuple[dict, str]:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    for key in data:
        if key not in names:
            raise ConfigError(f"{path}:{_line_of(text, key)}: unknown field {key!r}")
    return data, text


def config_from_args(argv=None) -> tuple[ExperimentConfig, bool]:
    args = build_parser().parse_args(argv)
    values, text = {}, None
    if args.config:
        values, text = load_config_file(args.config)
    for dest, name in _FLAG_FIELDS.items():
        v = getattr(args, dest)
        if v is not None:
            values[name] = v
    if "command" not in values:
        raise ConfigError("field 'command': required (flag --command or config file)")
    try:
        cfg = ExperimentConfig(**values)
        cfg.validate()
    except ConfigError as exc:
        if text is not None:
            name = str(exc).split("'")[1]
            line = _line_of(text, name)
            if line is not None:
                raise ConfigError(f"{args.config}:{line}: {exc}") from exc
        raise
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg, args.quiet


def main(argv=None) -> int:
    try:
        cfg, quiet = config_from_args(argv)
    except ConfigError as exc:
        print(f"nldsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING if quiet else logging.INFO,
                        format="nldsim: %(message)s")
    try:
        out = run(cfg)
    except ConfigError as exc:
        print(f"nldsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EnumerationBudgetError, CountBudgetError, CodebookTooLargeError) as exc:
        print(f"nldsim: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if cfg.output_path in ("-", ""):
        sys.stdout.write(out)
    else:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(out)
        log.info("wrote %s", cfg.output_path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
