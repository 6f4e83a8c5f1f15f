"""Command-line front end.

    fnsigma eval     --sigma 1/2 --mu 3/4 --n 2 --x 8
    fnsigma asym     --sigma 1/2 --mu 3/4 --n 2 --x 8 --format json
    fnsigma psi      --sigma 1/2 --delta 1/4 --x 20
    fnsigma classify --sigma 5/9 --n 2 --side pos
    fnsigma table    --id 1
    fnsigma sweep    --sigma 2/3 --mu 3/4 --n 2 --xs 4,8,16,32

Exit codes: 0 success, 1 usage error, 2 numerical error, 3 table mismatch.
Output depends only on argv and the working precision (timings are left
out unless ``--timing`` is given).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from . import __version__
from .f_asym import Side, StokesLineError, classify_regime, f_asym
from .harness import (
    GoldenFileMissing,
    records_to_csv,
    records_to_json,
    reproduce_table,
    sweep,
)
from .numerics import DEFAULT_DIGITS, DomainError, PoleError, PolarPoint, PrecisionCtx, PrecisionExhausted
from .params import ParameterError, Parameters, PiAngle, derive, to_fraction
from .psi_asym import JMAX, classify_sector, e_expansion, h_expansion, parse_trunc
from .series import SeriesDivergence, f_direct, f_wright, psi, with_retry

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_MISMATCH = 3

NUMERIC_ERRORS = (PrecisionExhausted, SeriesDivergence, OverflowError, StokesLineError,
                  PoleError, DomainError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class CliConfig:
    subcommand: str
    digits: int
    jmax: int
    trunc: str
    format: str
    output: Optional[str]
    sig_digits: int


def _default_digits() -> int:
    raw = os.environ.get("FNSIGMA_DIGITS")
    if raw is None:
        return DEFAULT_DIGITS
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"FNSIGMA_DIGITS must be an integer, got {raw!r}") from None


def fmt(value, sig: int, ctx: PrecisionCtx) -> str:
    """Scientific notation with ``sig`` significant digits, e.g. ``-1.08294258e+3``."""
    mp = ctx.mp
    v = mp.mpf(value)
    if v == 0:
        return "0"
    return mp.nstr(v, sig, strip_zeros=False, min_fixed=1, max_fixed=0, show_zero_exponent=True)


def _rational(flag: str):
    def parse(text: str):
        try:
            return to_fraction(text, flag)
        except ParameterError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    parse.__name__ = flag
    return parse


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--digits", type=int, default=None,
                        help="working precision in decimal digits (env FNSIGMA_DIGITS, default 60)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--output", default=None, help="write to this file instead of stdout")
    common.add_argument("--sig-digits", type=int, default=9, dest="sig_digits")
    common.add_argument("--timing", action="store_true", help="include wall times in reports")

    expansion = _Parser(add_help=False)
    expansion.add_argument("--jmax", type=int, default=JMAX)
    expansion.add_argument("--trunc", default="opt", help="'opt', 'opt:<cap>' or a fixed index")

    fparams = _Parser(add_help=False)
    fparams.add_argument("--sigma", type=_rational("--sigma"), required=True)
    fparams.add_argument("--mu", type=_rational("--mu"), required=True)
    fparams.add_argument("--n", type=int, required=True)

    parser = _Parser(prog="fnsigma", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"fnsigma {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common, fparams], help="reference series, two ways")
    p.add_argument("--x", type=_rational("--x"), required=True)

    p = sub.add_parser("asym", parents=[common, expansion, fparams], help="asymptotic expansion")
    p.add_argument("--x", type=_rational("--x"), required=True)

    p = sub.add_parser("psi", parents=[common, expansion], help="Psi series against E + H")
    p.add_argument("--sigma", type=_rational("--sigma"), required=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--delta", type=_rational("--delta"))
    grp.add_argument("--mu", type=_rational("--mu"), help="sets delta = 1 - mu")
    p.add_argument("--x", type=_rational("--x"), required=True, help="modulus |z|")
    p.add_argument("--arg", type=_rational("--arg"), default=0,
                   help="arg z as a rational multiple of pi")

    p = sub.add_parser("classify", parents=[common], help="regime report and sector rays")
    p.add_argument("--sigma", type=_rational("--sigma"), required=True)
    p.add_argument("--mu", type=_rational("--mu"), default=to_fraction("3/4"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--side", choices=("pos", "neg"), default="pos")

    p = sub.add_parser("table", parents=[common, expansion], help="reproduce a golden table")
    p.add_argument("--id", type=int, choices=(1, 2), required=True)

    p = sub.add_parser("sweep", parents=[common, expansion, fparams], help="error-decay sweep")
    p.add_argument("--xs", default="", help="comma-separated moduli, increasing")
    p.add_argument("--side", choices=("pos", "neg"), default="pos")
    return parser


# ---------------------------------------------------------------- rendering

def _render(payload: dict, rows: list[dict], fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps(payload, indent=2) + "\n"
    if fmt_name == "csv":
        if not rows:
            return ""
        buf = io.StringIO()
        fields = list(dict.fromkeys(k for r in rows for k in r))
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v)
                             for k, v in r.items()})
        return buf.getvalue()
    lines = []
    for key, value in payload.items():
        if key == "rows":
            continue
        if isinstance(value, (list, dict)):
            value = json.dumps(value)
        lines.append(f"{key}: {value}")
    if "rows" in payload:
        for r in rows:
            lines.append("  " + "  ".join(f"{k}={v}" for k, v in r.items()))
    return "\n".join(lines) + "\n"


def _params_dict(p: Parameters, x=None) -> dict:
    d = {"sigma": str(p.sigma), "mu": str(p.mu), "n": p.n}
    if x is not None:
        d["x"] = str(x)
    return d


# ---------------------------------------------------------------- commands

def _cmd_eval(args, cfg: CliConfig, ctx: PrecisionCtx):
    p = Parameters(args.sigma, args.mu, args.n)
    direct, c1 = with_retry(f_direct, p, args.x, ctx=ctx)
    wright, c2 = with_retry(f_wright, p, args.x, ctx=ctx)
    work = c1 if c1.digits >= c2.digits else c2
    mp = work.mp
    a, b = mp.mpf(direct.value.real), mp.mpf(wright.value.real)
    diff = abs(a - b)
    scale = max(abs(a), abs(b))
    agree = work.digits if diff == 0 or scale == 0 else int(mp.floor(-mp.log10(diff / scale)))
    row = {
        **_params_dict(p, args.x),
        "f_direct": fmt(a, cfg.sig_digits, work),
        "f_wright": fmt(b, cfg.sig_digits, work),
        "agreement_digits": min(agree, work.digits),
        "terms_direct": direct.terms_used,
        "cancellation_digits": direct.cancellation_digits,
        "digits_used": work.digits,
    }
    return {"command": "eval", **row}, [row], EXIT_OK


def _cmd_asym(args, cfg: CliConfig, ctx: PrecisionCtx):
    p = Parameters(args.sigma, args.mu, args.n)
    res = f_asym(p, args.x, ctx, jmax=cfg.jmax, trunc=parse_trunc(cfg.trunc))
    s = cfg.sig_digits
    terms = []
    for r in res.term_table:
        row = {"part": r["part"]}
        if r["part"] == "E":
            row.update({"r": r["r"], "sign": r["sign"], "phi": r["phi"], "sector": r["sector"]})
        else:
            row.update({"k": r["k"], "K": str(r["K"])})
        row["value"] = fmt(r["value"], s, ctx)
        terms.append(row)
    payload = {
        "command": "asym",
        **_params_dict(p, args.x),
        "side": res.regime.side.value,
        "value": fmt(res.value.real, s, ctx),
        "e_part": fmt(res.e_part.real, s, ctx),
        "h_part": fmt(res.h_part.real, s, ctx),
        "components": res.regime.tags(),
        "notes": list(res.regime.notes),
        "jmax": res.jmax,
        "h_terms_used": res.h_terms_used,
        "rows": terms,
    }
    return payload, terms, EXIT_OK


def _cmd_psi(args, cfg: CliConfig, ctx: PrecisionCtx):
    sigma = args.sigma
    delta = args.delta if args.delta is not None else 1 - args.mu
    if args.x <= 0:
        raise UsageError("psi: --x is the modulus |z| and must be positive")
    mp = ctx.mp
    z = PolarPoint(ctx.real(args.x), PiAngle(args.arg).reduced())
    ref, used = with_retry(psi, sigma, delta, z, ctx=ctx)
    cls = classify_sector(sigma, z.angle)
    h = h_expansion(sigma, delta, z, cls.branch_sign, parse_trunc(cfg.trunc), ctx)
    e = mp.mpc(0)
    if cls.tag.value in ("ExpLarge", "OscBoundary"):
        e = e_expansion(sigma, delta, z, cfg.jmax, ctx)
    asym = e + h
    refv = mp.mpc(ref.value)
    rel = abs(asym - refv) / abs(refv) if refv != 0 else abs(asym)
    s = cfg.sig_digits
    row = {
        "sigma": str(sigma), "delta": str(delta), "modulus": str(args.x), "arg": str(z.angle),
        "sector": cls.tag.value,
        "series_re": fmt(refv.real, s, ctx), "series_im": fmt(refv.imag, s, ctx),
        "e_re": fmt(e.real, s, ctx), "e_im": fmt(e.imag, s, ctx),
        "h_re": fmt(h.real, s, ctx), "h_im": fmt(h.imag, s, ctx),
        "rel_err": fmt(rel, 3, ctx),
        "digits_used": used.digits,
    }
    return {"command": "psi", **row}, [row], EXIT_OK


def _cmd_classify(args, cfg: CliConfig, ctx: PrecisionCtx):
    p = Parameters(args.sigma, args.mu, args.n)
    dp = derive(p)
    side = Side.POS if args.side == "pos" else Side.NEG
    regime = classify_regime(dp, side, strict=False)
    base = dp.sigma if side is Side.POS else dp.kappa
    rays = {
        "rays": [str(base), str(-base)],
        "boundaries": [str(dp.kappa / 2), str(-dp.kappa / 2)],
    }
    rows = []
    for t in regime.retained:
        rows.append({**t.describe(), "retained": True})
    for t in regime.excluded:
        rows.append({**t.describe(), "retained": False})
    rows.sort(key=lambda r: (r["r"] is None, r["r"] if r["r"] is not None else 0, r["sign"]))
    payload = {
        "command": "classify",
        **_params_dict(p),
        "side": side.value,
        "components": regime.tags(),
        "notes": list(regime.notes),
        "thresholds": {
            "n0": str(dp.n0), "n_star": str(dp.n_star), "n_exp": str(dp.n_exp),
        },
        "diagram_pi_units": rays,
        "rows": rows,
    }
    return payload, rows, EXIT_OK


def _cmd_table(args, cfg: CliConfig, ctx: PrecisionCtx):
    report = reproduce_table(args.id, ctx, jmax=cfg.jmax, trunc=parse_trunc(cfg.trunc))
    rows = []
    for c in report.cells:
        rows.append({
            "sigma": c.cell.sigma, "n": c.cell.n, "quantity": c.cell.quantity,
            "printed": c.cell.printed, "computed": c.computed,
            "status": "PASS" if c.passed else "FAIL", "detail": c.detail,
        })
    payload = {
        "command": "table",
        "id": args.id,
        "passed": report.passed,
        "cells_total": len(rows),
        "cells_failed": len(report.failures),
        "notes": list(report.spec.notes),
        "rows": rows,
    }
    return payload, rows, EXIT_OK if report.passed else EXIT_MISMATCH


def _cmd_sweep(args, cfg: CliConfig, ctx: PrecisionCtx):
    p = Parameters(args.sigma, args.mu, args.n)
    xs = [to_fraction(t, "--xs") for t in args.xs.split(",") if t.strip()]
    try:
        res = sweep(p, xs, side=args.side, jmax=cfg.jmax, trunc=parse_trunc(cfg.trunc), ctx=ctx)
    except ValueError as exc:
        if isinstance(exc, NUMERIC_ERRORS):
            raise
        raise UsageError(str(exc)) from None
    data = json.loads(records_to_json(res.records, timing=args.timing))
    payload = {
        "command": "sweep",
        **_params_dict(p),
        "side": args.side,
        "monotone_decay": res.monotone_decay,
        "rows": data,
    }
    if cfg.format == "csv":
        return payload, None, EXIT_OK, records_to_csv(res.records, timing=args.timing)
    return payload, data, EXIT_OK


COMMANDS = {
    "eval": _cmd_eval,
    "asym": _cmd_asym,
    "psi": _cmd_psi,
    "classify": _cmd_classify,
    "table": _cmd_table,
    "sweep": _cmd_sweep,
}


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run one subcommand and return its exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        digits = args.digits if args.digits is not None else _default_digits()
        cfg = CliConfig(
            subcommand=args.subcommand,
            digits=digits,
            jmax=getattr(args, "jmax", JMAX),
            trunc=getattr(args, "trunc", "opt"),
            format=args.format,
            output=args.output,
            sig_digits=args.sig_digits,
        )
        if not 0 <= cfg.jmax <= JMAX:
            raise UsageError(f"--jmax must be in 0..{JMAX}")
        if cfg.sig_digits < 1:
            raise UsageError("--sig-digits must be >= 1")
        try:
            parse_trunc(cfg.trunc)
        except ValueError:
            raise UsageError(f"--trunc: expected 'opt', 'opt:<cap>' or an integer, got {cfg.trunc!r}") from None
        try:
            ctx = PrecisionCtx(cfg.digits)
        except ValueError as exc:
            raise UsageError(f"--digits: {exc}") from None
        out = COMMANDS[cfg.subcommand](args, cfg, ctx)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except GoldenFileMissing as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except NUMERIC_ERRORS as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERIC

    if len(out) == 4:
        payload, rows, code, text = out
    else:
        payload, rows, code = out
        text = _render(payload, rows, cfg.format)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
