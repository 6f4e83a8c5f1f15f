"""Validation engine: golden-table reproduction, single comparisons and sweeps.

A :class:`ComparisonRecord` pairs one asymptotic evaluation with the
reference series value. Records serialize to JSON or CSV with every
numeric field written as a decimal string long enough to re-parse to the
same binary value.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field
from decimal import Decimal
from fractions import Fraction
from importlib import resources
from typing import Iterable, Optional

from .f_asym import Component, ExpansionResult, f_asym
from .numerics import DomainError, PrecisionCtx
from .params import Parameters, to_fraction
from .psi_asym import JMAX, Optimal, TruncPolicy
from .series import f_wright, with_retry

QUANTITIES = ("E", "H", "E+H", "F")
DASH = "-"

RECORD_FIELDS = (
    "sigma", "mu", "n", "x", "oracle_value", "e_part", "h_part", "asym_value",
    "abs_err", "rel_err", "regime", "digits", "wall_ms",
)


class GoldenFileMissing(FileNotFoundError):
    """No golden data file exists for the requested table id."""


def _num(value, ctx: PrecisionCtx) -> str:
    # ten guard digits make the string re-parse to the identical mpf
    return ctx.mp.nstr(value, ctx.digits + 10, min_fixed=1, max_fixed=0)


@dataclass(frozen=True)
class ComparisonRecord:
    """One asymptotic value against the reference series.

    Rationals are kept as strings (``"1/2"``) and real values as decimal
    strings, so the record is plain data and round-trips through JSON.
    """

    sigma: str
    mu: str
    n: int
    x: str
    oracle_value: str
    e_part: str
    h_part: str
    asym_value: str
    abs_err: str
    rel_err: str
    regime: str
    digits: int
    wall_ms: float = 0.0

    def value(self, name: str, ctx: Optional[PrecisionCtx] = None):
        ctx = ctx or PrecisionCtx(self.digits)
        return ctx.mp.mpf(getattr(self, name))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ComparisonRecord":
        missing = [k for k in RECORD_FIELDS if k not in data]
        if missing:
            raise ValueError(f"record is missing fields {missing}")
        return cls(
            sigma=str(data["sigma"]),
            mu=str(data["mu"]),
            n=int(data["n"]),
            x=str(data["x"]),
            oracle_value=str(data["oracle_value"]),
            e_part=str(data["e_part"]),
            h_part=str(data["h_part"]),
            asym_value=str(data["asym_value"]),
            abs_err=str(data["abs_err"]),
            rel_err=str(data["rel_err"]),
            regime=str(data["regime"]),
            digits=int(data["digits"]),
            wall_ms=float(data["wall_ms"]),
        )


def relative_error(asym, oracle, e_part, h_part, ctx: PrecisionCtx):
    """``|asym - oracle| / max(|oracle|, |e| + |h|, tiny)``."""
    mp = ctx.mp
    floor = mp.mpf(10) ** (-ctx.digits)
    return abs(asym - oracle) / max(abs(oracle), abs(e_part) + abs(h_part), floor)


def oracle(p: Parameters, x, ctx: PrecisionCtx):
    """F from the Wright-function combination with adaptive precision.

    The returned value is rounded back to ``ctx``.
    """
    res, used = with_retry(f_wright, p, x, ctx=ctx)
    return ctx.mp.mpf(res.value.real) if used is ctx else ctx.mp.mpf(str(res.value.real))


def _record(p: Parameters, x: Fraction, exp: ExpansionResult, oracle_value, ctx, wall_ms):
    mp = ctx.mp
    asym = mp.mpf(exp.value.real)
    e = mp.mpf(exp.e_part.real)
    h = mp.mpf(exp.h_part.real)
    return ComparisonRecord(
        sigma=str(p.sigma),
        mu=str(p.mu),
        n=p.n,
        x=str(x),
        oracle_value=_num(oracle_value, ctx),
        e_part=_num(e, ctx),
        h_part=_num(h, ctx),
        asym_value=_num(asym, ctx),
        abs_err=_num(abs(asym - oracle_value), ctx),
        rel_err=_num(relative_error(asym, oracle_value, e, h, ctx), ctx),
        regime="+".join(exp.regime.tags()),
        digits=ctx.digits,
        wall_ms=round(wall_ms, 3),
    )


def compare(p: Parameters, x, jmax: int = JMAX, trunc: Optional[TruncPolicy] = None,
            ctx: Optional[PrecisionCtx] = None) -> ComparisonRecord:
    """Evaluate the asymptotic expansion at ``x`` and compare with the series."""
    ctx = ctx or PrecisionCtx()
    xq = to_fraction(x, "x")
    if xq == 0:
        raise DomainError("compare needs x != 0")
    start = time.perf_counter()
    exp = f_asym(p, xq, ctx, jmax=jmax, trunc=trunc or Optimal())
    ref = oracle(p, xq, ctx)
    return _record(p, xq, exp, ref, ctx, 1000 * (time.perf_counter() - start))


@dataclass(frozen=True)
class SweepResult:
    records: tuple[ComparisonRecord, ...]
    monotone_decay: bool


def sweep(p: Parameters, x_values: Iterable, side: str = "pos", jmax: int = JMAX,
          trunc: Optional[TruncPolicy] = None,
          ctx: Optional[PrecisionCtx] = None) -> SweepResult:
    """Compare along ``x_values`` (moduli, increasing); ``side`` picks the sign of x.

    ``monotone_decay`` is True when rel_err strictly decreases along the
    sweep (vacuously True for fewer than two points).
    """
    ctx = ctx or PrecisionCtx()
    if side not in ("pos", "neg"):
        raise ValueError("side must be 'pos' or 'neg'")
    xs = [abs(to_fraction(v, "x")) for v in x_values]
    if xs != sorted(xs):
        raise ValueError("x_values must be increasing in |x|")
    sign = 1 if side == "pos" else -1
    records = tuple(compare(p, sign * x, jmax, trunc, ctx) for x in xs)
    errs = [r.value("rel_err") for r in records]
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    return SweepResult(records, decreasing)


# ---------------------------------------------------------------- reports

def records_to_json(records: Iterable[ComparisonRecord], timing: bool = True) -> str:
    rows = []
    for r in records:
        d = r.to_dict()
        if not timing:
            d.pop("wall_ms")
        rows.append(d)
    return json.dumps(rows, indent=2)


def records_from_json(text: str) -> list[ComparisonRecord]:
    return [ComparisonRecord.from_dict(d) for d in json.loads(text)]


def records_to_csv(records: Iterable[ComparisonRecord], timing: bool = True) -> str:
    fields = [f for f in RECORD_FIELDS if timing or f != "wall_ms"]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in records:
        d = r.to_dict()
        writer.writerow({k: d[k] for k in fields})
    return buf.getvalue()


def records_from_csv(text: str) -> list[ComparisonRecord]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        row.setdefault("wall_ms", 0.0)
        out.append(ComparisonRecord.from_dict(row))
    return out


# ---------------------------------------------------------------- golden tables

@dataclass(frozen=True)
class Cell:
    sigma: str
    n: int
    quantity: str
    printed: str

    @property
    def is_dash(self) -> bool:
        return self.printed == DASH


@dataclass(frozen=True)
class TableSpec:
    id: int
    mu: str
    x: dict  # sigma string -> x string
    cells: tuple[Cell, ...]
    notes: tuple[str, ...] = ()

    @property
    def sigmas(self) -> list[str]:
        return list(dict.fromkeys(c.sigma for c in self.cells))

    @property
    def ns(self) -> list[int]:
        return sorted({c.n for c in self.cells})


def load_table(table_id: int) -> TableSpec:
    name = f"table{table_id}.json"
    try:
        text = resources.files("fnsigma").joinpath("data", name).read_text()
    except (FileNotFoundError, OSError) as exc:
        raise GoldenFileMissing(f"no golden file {name}") from exc
    raw = json.loads(text)
    cells = tuple(Cell(c["sigma"], int(c["n"]), c["quantity"], c["printed"]) for c in raw["cells"])
    for c in cells:
        if c.quantity not in QUANTITIES:
            raise ValueError(f"{name}: unknown quantity {c.quantity!r}")
    return TableSpec(int(raw["id"]), raw["mu"], dict(raw["x"]), cells, tuple(raw.get("notes", ())))


def last_digit_unit(printed: str) -> Decimal:
    """One unit in the last printed digit, e.g. ``"-1.08294258e3"`` -> 1e-5."""
    return Decimal(1).scaleb(Decimal(printed).as_tuple().exponent)


def matches_printed(value, printed: str, ctx: PrecisionCtx) -> bool:
    """True when ``value`` is within one unit of the last printed digit."""
    mp = ctx.mp
    target = mp.mpf(printed.lstrip("+"))
    return abs(mp.mpf(value) - target) <= mp.mpf(str(last_digit_unit(printed)))


@dataclass(frozen=True)
class CellResult:
    cell: Cell
    computed: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class TableReport:
    spec: TableSpec
    records: tuple[ComparisonRecord, ...]
    cells: tuple[CellResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cells)

    @property
    def failures(self) -> list[CellResult]:
        return [c for c in self.cells if not c.passed]


_EXP_COMPONENTS = {Component.EXP_LARGE, Component.EXP_OSCILLATORY, Component.EXP_SMALL}


def _absent(quantity: str, exp: ExpansionResult) -> tuple[bool, str]:
    comps = set(exp.regime.components)
    if quantity == "E":
        ok = exp.e_part == 0 and not comps & _EXP_COMPONENTS
        return ok, "no exponential component" if ok else "exponential component present"
    if quantity == "H":
        ok = exp.h_part == 0 and Component.ALGEBRAIC not in comps
        why = "; ".join(exp.regime.notes)
        return ok, f"algebraic component absent ({why})" if ok else "algebraic component present"
    return False, f"a dash is not meaningful for {quantity}"


def reproduce_table(table_id: int, ctx: Optional[PrecisionCtx] = None,
                    jmax: int = JMAX, trunc: Optional[TruncPolicy] = None) -> TableReport:
    """Recompute every populated cell of a golden table, in table order."""
    ctx = ctx or PrecisionCtx()
    spec = load_table(table_id)
    mp = ctx.mp
    mu = to_fraction(spec.mu, "mu")
    records = []
    results = []
    cache = {}
    for cell in spec.cells:
        key = (cell.sigma, cell.n)
        if key not in cache:
            p = Parameters(to_fraction(cell.sigma, "sigma"), mu, cell.n)
            x = to_fraction(spec.x[cell.sigma], "x")
            start = time.perf_counter()
            exp = f_asym(p, x, ctx, jmax=jmax, trunc=trunc or Optimal())
            ref = oracle(p, x, ctx)
            rec = _record(p, x, exp, ref, ctx, 1000 * (time.perf_counter() - start))
            cache[key] = (exp, rec)
            records.append(rec)
        exp, rec = cache[key]
        if cell.is_dash:
            ok, detail = _absent(cell.quantity, exp)
            results.append(CellResult(cell, DASH if ok else _num(exp.e_part.real, ctx), ok, detail))
            continue
        value = {
            "E": rec.e_part,
            "H": rec.h_part,
            "E+H": rec.asym_value,
            "F": rec.oracle_value,
        }[cell.quantity]
        ok = matches_printed(value, cell.printed, ctx)
        computed = mp.nstr(mp.mpf(value), 12)
        results.append(CellResult(cell, computed, ok, "" if ok else f"expected {cell.printed}"))
    return TableReport(spec, tuple(records), tuple(results))
