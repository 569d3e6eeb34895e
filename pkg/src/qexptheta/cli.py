"""Scenario runner: ``qexptheta COMMAND key=value ... [--config FILE] [--out PATH]``.

Exit status: 0 when every checked property holds, 1 for a malformed
configuration (the message names the field), 2 when a check fails and 3
when a residual stays at the noise floor after precision escalation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from fractions import Fraction

from . import dioph, laplace, qseries, theta
from .errors import DomainError, PrecisionError, PrecisionInsufficientError, QThetaError
from .xnum import DEFAULT_BITS, MIN_BITS, PrecisionContext, exact_complex, mp_for, rel_diff, render, xcomplex, xreal

COMMANDS = (
    "eval",
    "theta",
    "identities",
    "hits",
    "verify-rational",
    "verify-irrational",
    "decompose",
    "limit-q1",
)
BITS_ENV = "QEXPTHETA_BITS"
DEFAULT_DIGITS = 20
# Irrational literals with at most this many significant digits are doubles in disguise.
DOUBLE_DIGITS = 17
DOUBLE_LITERAL_N_MAX = 1000

COLUMNS = {
    "eval": ("n", "lhs_re", "lhs_im", "product_re", "product_im", "rel_diff"),
    "theta": ("series_re", "series_im", "product_re", "product_im", "rel_diff"),
    "identities": ("check", "value", "tolerance", "ok"),
    "hits": ("n", "m", "gamma", "three_over_n", "floor_flag"),
    "verify-rational": ("n", "m", "abs_r", "bound", "ratio", "lhs_mag_log10"),
    "verify-irrational": ("n", "m", "gamma", "nu_n", "abs_e", "rate_stat"),
    "decompose": (
        "n",
        "m",
        "abs_r1",
        "bound1",
        "abs_r2",
        "bound2",
        "partition_rel_diff",
        "additivity_rel_diff",
    ),
    "limit-q1": ("j", "q", "deviation", "bound_ok"),
}


class ConfigError(Exception):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class Config:
    """Merged key/value configuration with typed, field-named accessors."""

    def __init__(self, values: dict):
        self.values = {str(k).replace("-", "_"): v for k, v in values.items()}

    def has(self, key):
        return self.values.get(key) is not None

    def raw(self, key, default=None):
        return self.values.get(key, default)

    def _require(self, key, default):
        if key not in self.values or self.values[key] is None:
            if default is None:
                raise ConfigError(key, "missing")
            return default
        return self.values[key]

    def integer(self, key, default=None, minimum=None) -> int:
        value = self._require(key, default)
        try:
            out = int(str(value).strip())
        except ValueError:
            raise ConfigError(key, f"expected an integer, got {value!r}") from None
        if minimum is not None and out < minimum:
            raise ConfigError(key, f"must be >= {minimum}, got {out}")
        return out

    def rational(self, key, default=None) -> Fraction:
        value = self._require(key, default)
        try:
            return Fraction(str(value).strip())
        except (ValueError, ZeroDivisionError):
            raise ConfigError(key, f"expected an exact number such as 0.5 or 1/2, got {value!r}") from None

    def base(self, key="q") -> qseries.QBase:
        value = self.rational(key)
        try:
            return qseries.QBase(value)
        except DomainError as exc:
            raise ConfigError(key, str(exc)) from None

    def complex_value(self, key, default=None):
        value = self._require(key, default)
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        try:
            return exact_complex(str(value).strip())
        except (DomainError, ValueError):
            raise ConfigError(key, f'expected "re,im" or a real number, got {value!r}') from None

    def scale(self, key="t"):
        value = self._require(key, None)
        try:
            return dioph.parse_scale(str(value))
        except (DomainError, ValueError) as exc:
            raise ConfigError(key, str(exc)) from None


def _bits(cfg: Config) -> int:
    env = os.environ.get(BITS_ENV)
    if cfg.has("bits"):
        bits = cfg.integer("bits")
    elif env:
        try:
            bits = int(env)
        except ValueError:
            raise ConfigError("bits", f"{BITS_ENV}={env!r} is not an integer") from None
    else:
        bits = DEFAULT_BITS
    if bits < MIN_BITS:
        raise ConfigError("bits", f"precision must be >= {MIN_BITS}, got {bits}")
    return bits


def _target(cfg: Config, scale) -> Fraction:
    keys = ("lambda", "beta", "target")
    given = [k for k in keys if cfg.has(k)]
    key = given[0] if given else "lambda" if isinstance(scale, dioph.RationalScale) else "beta"
    return cfg.rational(key, default=Fraction(0)), key


def _scenario(cfg: Config) -> laplace.Scenario:
    base = cfg.base()
    u = cfg.complex_value("u", default="1")
    if u == (0, 0):
        raise ConfigError("u", "must be nonzero")
    scale = cfg.scale()
    target, key = _target(cfg, scale)
    try:
        return laplace.Scenario(base, u, scale, target)
    except DomainError as exc:
        raise ConfigError(key, str(exc)) from None


def _check_literal(cfg: Config, scale, n_max: int):
    if isinstance(scale, dioph.IrrationalScale) and scale.kind == "literal":
        digits = len(scale.text.replace(".", "").lstrip("0"))
        if digits <= DOUBLE_DIGITS and n_max > DOUBLE_LITERAL_N_MAX:
            raise ConfigError(
                "t", f"{scale.text!r} is a double-precision literal; use sqrt:d, surd:a,b,c,d or more digits"
            )
        try:
            dioph.check_literal_precision(scale, n_max)
        except PrecisionError as exc:
            raise ConfigError("t", str(exc)) from None


# -- commands -----------------------------------------------------------------


class Runner:
    def __init__(self, cfg: Config, bits: int, digits: int):
        self.cfg = cfg
        self.ctx = PrecisionContext(bits)
        self.digits = digits
        self.failures: list[str] = []
        self.summary: dict = {}

    def fmt(self, x) -> str:
        return render(x, self.digits)

    def check(self, ok: bool, what: str):
        if not ok:
            self.failures.append(what)

    @property
    def oracle_tol(self):
        return 16 * self.ctx.tol

    def cmd_eval(self):
        s = _scenario(self.cfg)
        n = self.cfg.integer("n", minimum=1)
        series = laplace.lhs_series(s, n, self.ctx)
        product = laplace.lhs_product(s, n, self.ctx)
        gap = rel_diff(series, product, self.ctx)
        self.check(gap <= self.oracle_tol, f"n={n}: series and product differ by {self.fmt(gap)}")
        return [
            [n, self.fmt(series.real), self.fmt(series.imag), self.fmt(product.real), self.fmt(product.imag), self.fmt(gap)]
        ]

    def cmd_theta(self):
        base = self.cfg.base()
        z = self.cfg.complex_value("z")
        if z == (0, 0):
            raise ConfigError("z", "theta is undefined at 0")
        series = theta.theta_series(z, base, self.ctx)
        product = theta.theta_product(z, base, self.ctx)
        gap = rel_diff(series, product, self.ctx)
        self.check(gap <= self.oracle_tol, f"series and product differ by {self.fmt(gap)}")
        return [[self.fmt(series.real), self.fmt(series.imag), self.fmt(product.real), self.fmt(product.imag), self.fmt(gap)]]

    def cmd_identities(self):
        base = self.cfg.base()
        z = self.cfg.complex_value("z", default="1/2,1/3")
        a = self.cfg.complex_value("a", default="2,-1")
        ctx = self.ctx
        rows = []
        tol = self.oracle_tol

        def add(name, value, limit):
            ok = value <= limit
            self.check(ok, f"{name}: {self.fmt(value)} > {self.fmt(limit)}")
            rows.append([name, self.fmt(value), self.fmt(limit), str(ok).lower()])

        euler = rel_diff(qseries.euler_qexp_series(z, base, ctx), qseries.pochhammer_infinite(z, base, ctx), ctx)
        add("euler", euler, tol)
        if z != (0, 0):
            jacobi = rel_diff(theta.theta_series(z, base, ctx), theta.theta_product(z, base, ctx), ctx)
            add("triple_product", jacobi, tol)
        if abs(xcomplex(z, mp_for(64))) < 1:
            add("q_binomial", qseries.qbinomial_check(a, z, base, ctx), 8 * ctx.tol)
        return rows

    def cmd_hits(self):
        scale = self.cfg.scale()
        target, key = _target(self.cfg, scale)
        try:
            if isinstance(scale, dioph.RationalScale):
                count = self.cfg.integer("count", default=8, minimum=1)
                hits = dioph.rational_hits(scale, target, count, self.cfg.integer("n_min", default=1, minimum=1))
            else:
                n_max = self.cfg.integer("n_max", minimum=1)
                _check_literal(self.cfg, scale, n_max)
                hits = dioph.chebyshev_hits(scale, target, n_max, self.ctx)
                if self.cfg.has("count"):
                    hits = dioph.best_hits(hits, self.cfg.integer("count", minimum=1))
        except DomainError as exc:
            raise ConfigError(key, str(exc)) from None
        mp = self.ctx.mp
        rows = []
        for h in hits:
            three = mp.mpf(dioph.CHEBYSHEV_CONSTANT) / h.n
            self.check(abs(h.gamma) <= three, f"n={h.n}: |gamma| exceeds 3/n")
            rows.append([h.n, h.m, self.fmt(mp.mpf(h.gamma)), self.fmt(three), str(h.floor_flag).lower()])
        return rows

    def cmd_verify_rational(self):
        s = _scenario(self.cfg)
        if not s.is_rational:
            raise ConfigError("t", "verify-rational needs a rational t = p/r")
        count = self.cfg.integer("count", default=8, minimum=1)
        n_min = self.cfg.integer("n_min", default=1, minimum=1)
        m0 = self.cfg.integer("m0", default=laplace.M0, minimum=0)
        rows = []
        for r in laplace.rational_table(s, count, self.ctx, n_min):
            if r.m >= m0:
                self.check(r.ratio <= 1, f"n={r.n}: ratio {self.fmt(r.ratio)} > 1")
            self.check(r.oracle_rel_diff <= self.oracle_tol, f"n={r.n}: lhs oracle gap {self.fmt(r.oracle_rel_diff)}")
            rows.append([r.n, r.m, self.fmt(abs(r.r_n)), self.fmt(r.bound), self.fmt(r.ratio), self.fmt(r.lhs_mag_log10)])
        return rows

    def cmd_verify_irrational(self):
        s = _scenario(self.cfg)
        if s.is_rational:
            raise ConfigError("t", "verify-irrational needs an irrational t")
        n_max = self.cfg.integer("n_max", default=5000, minimum=1)
        count = self.cfg.integer("count", default=8, minimum=1)
        _check_literal(self.cfg, s.scale, n_max)
        reports = laplace.irrational_table(s, n_max, count, self.ctx)
        rows = []
        for r in reports:
            self.check(r.oracle_rel_diff <= self.oracle_tol, f"n={r.n}: lhs oracle gap {self.fmt(r.oracle_rel_diff)}")
            rows.append([r.n, r.m, self.fmt(r.gamma_n), r.nu_n, self.fmt(abs(r.e_n)), self.fmt(r.rate_stat)])
        if len(reports) >= 3:
            est = laplace.rate_constant_estimate(reports)
            self.summary = {"rate_constant": self.fmt(est.value), "rate_constant_n": est.n}
        return rows

    def cmd_decompose(self):
        s = _scenario(self.cfg)
        if not s.is_rational:
            raise ConfigError("t", "decompose needs a rational t = p/r")
        count = self.cfg.integer("count", default=8, minimum=1)
        n_min = self.cfg.integer("n_min", default=1, minimum=1)
        m0 = self.cfg.integer("m0", default=laplace.M0, minimum=0)
        rows = []
        for h in dioph.rational_hits(s.scale, s.target, count, n_min):
            d = laplace.laplace_decomposition(s, h, self.ctx)
            if d.m >= m0:
                self.check(d.r1_ok, f"n={d.n}: |r1| above its bound")
                self.check(d.r2_ok, f"n={d.n}: |r2| above its bound")
            self.check(d.partition_rel_diff <= self.oracle_tol, f"n={d.n}: partition gap {self.fmt(d.partition_rel_diff)}")
            self.check(
                d.additivity_rel_diff <= self.oracle_tol, f"n={d.n}: r1 + r2 differs from r by {self.fmt(d.additivity_rel_diff)}"
            )
            rows.append(
                [
                    d.n,
                    d.m,
                    self.fmt(abs(d.r1_n)),
                    self.fmt(d.r1_bound),
                    self.fmt(abs(d.r2_n)),
                    self.fmt(d.r2_bound),
                    self.fmt(d.partition_rel_diff),
                    self.fmt(d.additivity_rel_diff),
                ]
            )
        return rows

    def cmd_limit_q1(self):
        z = self.cfg.complex_value("z", default="1")
        j_max = self.cfg.integer("j_max", default=6, minimum=1)
        rows = []
        previous = None
        for j in range(1, j_max + 1):
            q = 1 - Fraction(1, 10**j)
            probe = qseries.q1_limit_probe(z, q, self.ctx)
            self.check(probe.bound_ok, f"j={j}: |((1-q)z; q)_inf| exceeds exp|z|")
            if previous is not None:
                self.check(probe.deviation < previous, f"j={j}: deviation did not decrease")
            previous = probe.deviation
            rows.append([j, self.fmt(xreal(q, self.ctx.mp)), self.fmt(probe.deviation), str(probe.bound_ok).lower()])
        return rows


def _write(command: str, rows, fmt: str, runner: Runner, cfg: Config, out: str | None):
    columns = COLUMNS[command]
    if fmt == "json":
        doc = {
            "command": command,
            "bits": runner.ctx.bits,
            # the destination is not part of the scenario, so reports stay comparable
            "config": {k: str(v) for k, v in sorted(cfg.values.items()) if v is not None and k != "out"},
            "rows": [dict(zip(columns, row)) for row in rows],
            "failures": runner.failures,
        }
        if runner.summary:
            doc["summary"] = runner.summary
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
        text = buf.getvalue()
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


_TOKEN = re.compile(r"^([A-Za-z_][\w-]*)=(.*)$")


class _Parser(argparse.ArgumentParser):
    # exit status 2 is reserved for failed checks
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="qexptheta",
        description="Evaluate scaled q-exponentials against their theta main terms and check the error bounds.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("settings", nargs="*", metavar="key=value", help="scenario fields, e.g. q=1/2 u=1,0 t=3/2")
    parser.add_argument("--config", help="JSON file with scenario fields (command-line values win)")
    parser.add_argument("--out", help="report path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), help="report format (default: csv)")
    parser.add_argument("--bits", type=int, help=f"working precision in bits (default: ${BITS_ENV} or {DEFAULT_BITS})")
    parser.add_argument("--digits", type=int, help=f"significant digits per numeric cell (default: {DEFAULT_DIGITS})")
    return parser


def load_config(args) -> Config:
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config", "top level must be a JSON object")
        values.update(loaded)
    for token in args.settings:
        match = _TOKEN.match(token)
        if not match:
            raise ConfigError(token, "expected key=value")
        values[match.group(1)] = match.group(2)
    for key in ("out", "format", "bits", "digits"):
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    return Config(values)


def run(command: str, cfg: Config) -> int:
    bits = _bits(cfg)
    digits = cfg.integer("digits", default=DEFAULT_DIGITS, minimum=1)
    fmt = str(cfg.raw("format") or "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("format", f"expected csv or json, got {fmt!r}")
    runner = Runner(cfg, bits, digits)
    rows = getattr(runner, "cmd_" + command.replace("-", "_"))()
    _write(command, rows, fmt, runner, cfg, cfg.raw("out"))
    for failure in runner.failures:
        print(f"check failed: {failure}", file=sys.stderr)
    return 2 if runner.failures else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_intermixed_args(argv)
    try:
        cfg = load_config(args)
        return run(args.command, cfg)
    except ConfigError as exc:
        print(f"qexptheta: invalid config field {exc}", file=sys.stderr)
        return 1
    except PrecisionInsufficientError as exc:
        print(f"qexptheta: {exc}", file=sys.stderr)
        return 3
    except QThetaError as exc:
        print(f"qexptheta: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
