"""Command-line front end: ``mertens-lab <subcommand> ...``.

Every subcommand writes plain CSV whose first line is a ``#`` comment naming
the tool version, the subcommand and every parameter that can change the
numbers.  Worker count and output paths are left out of that echo, so runs
that differ only in parallelism are byte-identical.

Exit codes: 0 success, 1 computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from . import __version__
from .abundant import colossally_abundant, corollary8_check, primorial, sigma_ratio, totient_ratio
from .checkpoint import HEADER, CorruptCheckpointError, ResumeRangeError, fmt, format_row, resume, run_checkpointed
from .oscillation import (
    BIASES,
    PRNG_ID,
    ConstraintInfeasibleError,
    CramerParams,
    _prime_horizon,
    compare_products,
    cramer_sequence,
    residual_scan,
    sequence_product,
    sign,
    thm1_statistic,
)
from .prime_sums import (
    STATISTICS,
    ResidualPoint,
    _envelopes,
    _phi,
    ap_prime_recip_sum,
    prime_harmonic,
    products_from_snapshot,
    residual_from_snapshot,
    twisted_theta,
)
from .sieve import SieveConfig, primes_in_range
from .special import constants, direct_constants, prime_zeta
from .streaming import snapshots

RESIDUAL_HEADER = "x,statistic,empirical,main_term,residual,korobov_envelope,rh_envelope"
SUM_STATS = ("recip", "theta", "psi", "logp_over_p", "frac", "pi_li", "ap", "harmonic", "twisted")
PRODUCTS = ("i", "ii", "iii", "iv")

# 30-digit reference values, used only to report how many digits agree
REFERENCE = {
    "gamma": "0.577215664901532860606512090082",
    "B1": "0.261497212847642783755426838609",
    "e_gamma": "1.78107241799019798523650410311",
    "six_e_gamma_over_pi2": "1.08276219326092458012218803819",
    "prime_zeta_2": "0.452247420041065498506543364832",
    "prime_zeta_3": "0.174762639299443536423113314666",
}

_NOT_ECHOED = {"out", "workers", "plot", "handler"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _num(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return fmt(float(v))


def _row(*vals) -> str:
    return ",".join(v if isinstance(v, str) else _num(v) for v in vals)


def _residual_row(p: ResidualPoint) -> str:
    return _row(p.x, p.statistic, p.empirical, p.main_term, p.residual, p.korobov, p.rh)


def _real(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _metadata(args: argparse.Namespace, extra: dict | None = None) -> str:
    parts = [f"# mertens-lab {__version__}", args.command]
    for key in sorted(vars(args)):
        if key in _NOT_ECHOED or key == "command":
            continue
        val = getattr(args, key)
        if isinstance(val, list):
            val = ";".join(_echo(v) for v in val)
        else:
            val = _echo(val)
        parts.append(f"{key}={val}")
    for key, val in (extra or {}).items():
        parts.append(f"{key}={val}")
    return " ".join(parts)


def _echo(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, float):
        return _num(v)
    return str(v)


# --- subcommands ----------------------------------------------------------


def cmd_constants(args, config):
    c = direct_constants() if args.direct else constants()
    values = {
        "gamma": c.gamma,
        "B1": c.B1,
        "e_gamma": c.e_gamma,
        "six_e_gamma_over_pi2": c.mertens_plus,
        "prime_zeta_2": prime_zeta(2),
        "prime_zeta_3": prime_zeta(3),
    }
    rows = ["name,value,digits_checked"]
    rows += [_row(name, v, agreeing_digits(v, REFERENCE[name])) for name, v in values.items()]
    return rows, None


def agreeing_digits(value: float, reference: str) -> int:
    """Significant digits shared with a decimal reference (at most 17)."""
    ref = float(reference)
    err = abs(value - ref)
    if err == 0:
        return 17
    return max(0, min(17, math.floor(-math.log10(err / abs(ref)))))


def _require_x(xs, lower=2.0):
    for x in xs:
        if not x >= lower:
            raise UsageError(f"--x must be >= {lower:g}, got {x:g}")


def cmd_sum(args, config):
    _require_x(args.x)
    stat = args.stat
    if stat == "ap" and (args.a is None or args.q is None):
        raise UsageError("--stat ap needs --a and --q")
    snaps = snapshots(args.x, config)
    out = [RESIDUAL_HEADER]
    points = []
    for x, s in zip(args.x, snaps):
        nan = math.nan
        if stat in ("recip", "theta", "logp_over_p", "frac", "pi_li"):
            name = {"recip": "mertens_sum", "frac": "frac_sum"}.get(stat, stat)
            p = residual_from_snapshot(name, x, s)
            points.append(p)
            out.append(_residual_row(p))
        elif stat == "psi":
            emp = float(s.psi)
            k, r = _envelopes(x, "sum", x * math.log(x))
            p = ResidualPoint(x, "psi", emp, x, emp - x, k, r)
            points.append(p)
            out.append(_residual_row(p))
        elif stat == "ap":
            emp, _ = ap_prime_recip_sum(x, args.a, args.q)
            main = math.log(math.log(x)) / _phi(args.q)
            out.append(_row(x, f"ap_{args.a}_mod_{args.q}", emp, main, emp - main, nan, nan))
        elif stat == "harmonic":
            v = prime_harmonic(args.s_re, args.s_im, x)
            out.append(_row(x, "harmonic_re", v.re, nan, nan, nan, nan))
            out.append(_row(x, "harmonic_im", v.im, nan, nan, nan, nan))
        else:
            v = twisted_theta(args.alpha, x)
            out.append(_row(x, "twisted_re", v.re, nan, nan, nan, nan))
            out.append(_row(x, "twisted_im", v.im, nan, nan, nan, nan))
    return out, _residual_plot(points)


def _residual_plot(points):
    if len(points) < 2:
        return None

    def draw(path):
        from .plotting import plot_residuals

        plot_residuals(points, path)

    return draw


def product_rows(x: float, s, which) -> list[ResidualPoint]:
    g = constants()
    lx = math.log(x)
    prods = products_from_snapshot(s)
    k, r = _envelopes(x, "product")
    table = {
        "i": (prods.inv_minus, g.e_gamma * lx),
        "ii": (prods.minus, 1.0 / (g.e_gamma * lx)),
        "iii": (prods.inv_plus, 1.0 / (g.mertens_plus * lx)),
        "iv": (prods.plus, g.mertens_plus * lx),
    }
    out = []
    for name in which:
        emp, main = table[name]
        out.append(ResidualPoint(x, f"product_{name}", emp, main, emp - main, k, r))
    return out


def cmd_product(args, config):
    _require_x(args.x)
    which = PRODUCTS if args.which == "all" else (args.which,)
    out = [RESIDUAL_HEADER]
    points = []
    for x, s in zip(args.x, snapshots(args.x, config)):
        for p in product_rows(x, s, which):
            out.append(_residual_row(p))
            if p.statistic == "product_i":
                points.append(p)
    return out, _residual_plot(points)


def cmd_pi_li(args, config):
    _require_x(args.x)
    pts = [residual_from_snapshot("pi_li", x, s) for x, s in zip(args.x, snapshots(args.x, config))]
    return [RESIDUAL_HEADER] + [_residual_row(p) for p in pts], _residual_plot(pts)


def cmd_scan(args, config):
    if not 16 <= args.x_from < args.x_to:
        raise UsageError("need 16 <= --from < --to")
    if not 2 <= args.points <= 10**4:
        raise UsageError("--points must lie in [2, 10000]")
    series = residual_scan(args.stat, args.x_from, args.x_to, args.points, config)
    out = [RESIDUAL_HEADER] + [_residual_row(p) for p in series.checkpoints]
    out.append(f"# sign_changes={series.sign_changes}")
    return out, _residual_plot(series.checkpoints)


def _read_seeds(path: str) -> list[int]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read seeds file: {exc}")
    seeds = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            try:
                seeds.append(int(line))
            except ValueError:
                raise UsageError(f"bad seed in {path}: {line!r}")
    if not seeds:
        raise UsageError(f"no seeds in {path}")
    return seeds


def cmd_simulate(args, config):
    if not 100 <= args.x <= 1e8:
        raise UsageError("--x must lie in [100, 1e8]")
    if args.gap_cap <= 0 or args.drift <= 0:
        raise UsageError("--gap-cap and --drift must be > 0")
    seeds = _read_seeds(args.seeds_file) if args.seeds_file else args.seed
    base = CramerParams(args.x, 0, args.bias, args.gap_cap, args.drift)
    primes = primes_in_range(2, _prime_horizon(base), config)
    below = primes[primes <= args.x]
    p_primes = compare_products(below, below, below, args.x).P
    out = ["seed,bias,P,P_primes,residual,sign"]
    records = []
    for seed in seeds:
        seq = cramer_sequence(CramerParams(args.x, seed, args.bias, args.gap_cap, args.drift), primes)
        res = thm1_statistic(seq.values, args.x)
        rec = {"seed": seed, "residual": res}
        records.append(rec)
        out.append(_row(seed, args.bias, sequence_product(seq), p_primes, res, sign(res)))

    def draw(path):
        from .plotting import plot_simulation

        plot_simulation(records, path)

    return out, draw


def cmd_abundant(args, config):
    if args.limit_log is not None:
        if not math.log(2) <= args.limit_log <= 50:
            raise UsageError("--limit-log must lie in [log 2, 50]")
        numbers = colossally_abundant(args.limit_log)
    else:
        if not 1 <= args.primorial <= 10**6:
            raise UsageError("--primorial must lie in [1, 1e6]")
        numbers = [primorial(args.primorial)]
    out = ["log_n,p_k,ratio_phi,ratio_sigma,rhs_cor8,holds"]
    records = []
    for n in numbers:
        if float(n.log_n) <= 1:
            continue  # log log N is not positive
        c = corollary8_check(n)
        rec = {
            "log_n": float(n.log_n),
            "ratio_phi": totient_ratio(n),
            "ratio_sigma": sigma_ratio(n),
            "rhs_cor8": c.rhs,
        }
        records.append(rec)
        out.append(_row(rec["log_n"], n.p_k, rec["ratio_phi"], rec["ratio_sigma"], c.rhs, c.holds))

    def draw(path):
        from .plotting import plot_abundant

        plot_abundant(records, path)

    return out, draw if len(records) >= 2 else None


def cmd_checkpoint(args, config):
    if not args.x >= 2:
        raise UsageError("--x must be >= 2")
    if args.resume:
        final = resume(args.checkpoint_file, args.x, workers=config.worker_count)
    else:
        cfg = SieveConfig(config.segment_width, config.worker_count, args.stride)
        final = run_checkpointed(args.x, args.checkpoint_file, cfg)
    return [HEADER, format_row(final)], None


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mertens-lab", description="Desk-scale prime sums, products and residuals.")
    parser.add_argument("--version", action="version", version=f"mertens-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("--out", help="write CSV here instead of standard output")
        p.add_argument("--workers", type=_positive_int, default=1, help="sieve threads (default 1)")
        p.add_argument("--segment-width", type=_positive_int, default=1 << 20, help="sieve window width")
        return p

    p = add("constants", cmd_constants, "gamma, B1, e^gamma, 6e^gamma/pi^2 and prime zeta at 2, 3")
    p.add_argument("--direct", action="store_true", help="brute-force route (harmonic sum to 1e9, primes to 1e8)")

    p = add("sum", cmd_sum, "prime sums with main terms and envelopes")
    p.add_argument("--stat", required=True, choices=SUM_STATS)
    p.add_argument("--x", type=_real, nargs="+", required=True)
    p.add_argument("--a", type=int, help="residue for --stat ap")
    p.add_argument("--q", type=_positive_int, help="modulus for --stat ap")
    p.add_argument("--s-re", type=_real, default=1.0, help="real part of s for --stat harmonic")
    p.add_argument("--s-im", type=_real, default=0.0, help="imaginary part of s for --stat harmonic")
    p.add_argument("--alpha", type=_real, default=0.0, help="frequency for --stat twisted")
    p.add_argument("--plot", help="also write a residual figure (PNG) here")

    p = add("product", cmd_product, "the four Mertens products")
    p.add_argument("--x", type=_real, nargs="+", required=True)
    p.add_argument("--which", choices=PRODUCTS + ("all",), default="all")
    p.add_argument("--plot", help="also write a figure of product (i) here")

    p = add("pi-li", cmd_pi_li, "pi(x) against li(x)")
    p.add_argument("--x", type=_real, nargs="+", required=True)
    p.add_argument("--plot", help="also write a residual figure here")

    p = add("scan", cmd_scan, "residual of one statistic on a log-spaced grid")
    p.add_argument("--stat", required=True, choices=STATISTICS)
    p.add_argument("--from", dest="x_from", type=_real, required=True)
    p.add_argument("--to", dest="x_to", type=_real, required=True)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--plot", help="also write a residual figure here")

    p = add("simulate", cmd_simulate, "Cramer-model sequences and the product statistic")
    p.add_argument("--x", type=_real, required=True)
    p.add_argument("--seed", type=int, nargs="+", default=[0])
    p.add_argument("--seeds-file", help="one integer seed per line")
    p.add_argument("--bias", choices=BIASES, default="none")
    p.add_argument("--gap-cap", type=_real, default=1.0, help="C in the gap cap C log^2 c")
    p.add_argument("--drift", type=_real, default=2.0, help="D in |c_n - p_n| <= D log^2 p_n")
    p.add_argument("--plot", help="also write a per-seed residual figure here")

    p = add("abundant", cmd_abundant, "colossally abundant numbers and primorials")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--limit-log", type=_real, help="all CA numbers with log N up to this")
    g.add_argument("--primorial", type=_positive_int, help="the product of the first k primes")
    p.add_argument("--plot", help="also write a ratio figure here")

    p = add("checkpoint", cmd_checkpoint, "stream all sums to x with a resumable checkpoint file")
    p.add_argument("--x", type=_real, required=True)
    p.add_argument("--checkpoint-file", required=True)
    p.add_argument("--resume", action="store_true", help="continue an existing checkpoint file up to --x")
    p.add_argument("--stride", type=_positive_int, default=1, help="checkpoint every k sieve windows")
    return parser


def _write_atomic(path: str, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8", newline="\n")
    os.replace(tmp, path)


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        try:
            config = SieveConfig(args.segment_width, args.workers)
        except ValueError as exc:
            raise UsageError(str(exc))
        extra = {"prng": PRNG_ID} if args.command == "simulate" else None
        rows, draw = args.handler(args, config)
    except UsageError as exc:
        msg = str(exc).splitlines()[0]
        if not msg.startswith("mertens-lab"):
            msg = f"mertens-lab: error: {msg}"
        print(msg, file=sys.stderr)
        return 2
    except (ResumeRangeError, ValueError) as exc:
        print(f"mertens-lab: error: {exc}", file=sys.stderr)
        return 2
    except (CorruptCheckpointError, ConstraintInfeasibleError, ArithmeticError, OSError, RuntimeError) as exc:
        print(f"mertens-lab: computation error: {exc}", file=sys.stderr)
        return 1
    text = "\n".join([_metadata(args, extra), *rows]) + "\n"
    try:
        if args.out:
            _write_atomic(args.out, text)
        else:
            sys.stdout.write(text)
            sys.stdout.flush()
        if draw is not None and getattr(args, "plot", None):
            draw(args.plot)
    except OSError as exc:
        print(f"mertens-lab: error writing output: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
