"""Command-line entry point: scan, verify, classgroup, symbol, selftest.

Exit codes: 0 all checks passed, 1 a verification check failed (the report is
still written), 2 usage, inadmissible input or resource limits.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from dataclasses import dataclass
from typing import Sequence

from . import __version__
from .arith import legendre, quartic_symbol_of_two
from .hilbert import DYADIC, REAL_MINUS, REAL_PLUS, PlaceOfQ1, hilbert_symbol_Q, hilbert_symbol_Q1, symbol_table
from .quadform import ResourceError, class_group, fundamental_unit
from .tower import CHECK_KEYS, TripleReport, scan, verify_many, verify_triple
from .zsqrt2 import Zsqrt2, factor_rational_prime

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
CSV_COLUMNS = ("triple", "condition1") + CHECK_KEYS + ("structure", "overall")
FORMATS = ("json", "csv", "text")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    p_max: int = 500
    q_max: int = 100
    r_max: int = 100
    disc_bound: int | None = None
    skip_kuroda: bool = False
    output_path: str | None = None
    output_format: str = "text"
    jobs: int = 1

    def __post_init__(self):
        if min(self.p_max, self.q_max, self.r_max) < 1:
            raise UsageError("bounds must be positive")
        if self.output_format not in FORMATS:
            raise UsageError(f"unknown format {self.output_format!r}")
        if self.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        if self.disc_bound is not None and self.disc_bound < 1:
            raise UsageError("--disc-bound must be positive")


def _env_int(name: str, default: int) -> int:
    val = os.environ.get(name)
    if val is None:
        return default
    try:
        return int(val)
    except ValueError:
        raise UsageError(f"environment variable {name}={val!r} is not an integer") from None


def _bound(args, name: str, default: int) -> int:
    val = getattr(args, name, None)
    return val if val is not None else _env_int(f"Z2TOWER_{name.upper()}", default)


# report serialisation

def _csv_cell(report: TripleReport, key: str) -> str:
    d = report.to_dict()
    if key == "triple":
        return " ".join(str(x) for x in report.triple)
    if key == "condition1":
        return "pass" if report.condition1.passes else "fail"
    if key == "structure":
        s = d["structure"]
        return f"{s['x_prime']} | {s['x']}" if s["x_prime"] else ""
    if key == "overall":
        return report.overall
    entry = d[key]
    if entry is None:
        return ""
    return "pass" if entry["pass"] else "fail"


def _text(report: TripleReport) -> str:
    lines = [f"triple {report.triple}: {report.overall}"]
    for key in CHECK_KEYS:
        c = report.checks.get(key)
        status = "missing" if c is None else ("pass" if c.passed else "FAIL")
        comp = "" if c is None else json.dumps(c.computed, sort_keys=True, ensure_ascii=False)
        lines.append(f"  {key:9s} {status:7s} {comp}")
    if report.passed:
        lines.append(f"  X'(k_inf) = {report.x_prime_structure}")
        lines.append(f"  X(k_inf)  = {report.x_structure}  [paper-derived, not machine-checked]")
    return "\n".join(lines) + "\n"


def write_report(report: TripleReport | Sequence[TripleReport], fmt: str) -> bytes:
    """Serialise one report (or a list) deterministically."""
    reports = [report] if isinstance(report, TripleReport) else list(report)
    if fmt == "json":
        payload = reports[0].to_dict() if isinstance(report, TripleReport) else [r.to_dict() for r in reports]
        return (json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rep in reports:
            w.writerow([_csv_cell(rep, k) for k in CSV_COLUMNS])
        return buf.getvalue().encode()
    if fmt == "text":
        return "".join(_text(r) for r in reports).encode()
    raise UsageError(f"unknown format {fmt!r}")


def read_report(data: bytes | str) -> TripleReport | list[TripleReport]:
    obj = json.loads(data)
    if isinstance(obj, list):
        return [TripleReport.from_dict(d) for d in obj]
    return TripleReport.from_dict(obj)


def _emit(data: bytes, path: str | None) -> None:
    if path is None:
        sys.stdout.write(data.decode())
        sys.stdout.flush()
        return
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror}") from exc


def _emit_obj(obj, cfg: RunConfig, text: str) -> None:
    if cfg.output_format == "json":
        data = json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    elif cfg.output_format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        rows = obj if isinstance(obj, list) else [obj]
        keys = list(rows[0].keys()) if rows else []
        w.writerow(keys)
        for row in rows:
            w.writerow([json.dumps(row[k]) if isinstance(row[k], (list, dict)) else row[k] for k in keys])
        data = buf.getvalue()
    else:
        data = text
    _emit(data.encode(), cfg.output_path)


# subcommands

def _cmd_scan(cfg: RunConfig, args) -> int:
    triples = scan(cfg.p_max, cfg.q_max, cfg.r_max)
    if not args.verify:
        rows = [{"p": p, "q": q, "r": r} for p, q, r in triples]
        text = "".join(f"{p} {q} {r}\n" for p, q, r in triples)
        _emit_obj(rows, cfg, text)
        return EXIT_OK
    reports = verify_many(triples, cfg.skip_kuroda, cfg.disc_bound, cfg.jobs)
    _emit(write_report(reports, cfg.output_format), cfg.output_path)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _cmd_verify(cfg: RunConfig, args) -> int:
    try:
        report = verify_triple(args.p, args.q, args.r, cfg.skip_kuroda, cfg.disc_bound)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(write_report(report, cfg.output_format), cfg.output_path)
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_classgroup(cfg: RunConfig, args) -> int:
    try:
        cg = class_group(args.disc, cfg.disc_bound)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    unit = fundamental_unit(args.disc)
    narrow, wide = cg.narrow_structure(), cg.wide_structure()
    group = narrow if args.narrow else wide
    obj = {
        "discriminant": args.disc,
        "kind": "narrow" if args.narrow else "wide",
        "cyclic_orders": list(group.cyclic_orders),
        "order": group.order,
        "two_part": list(group.sylow(2).cyclic_orders),
        "narrow_order": narrow.order,
        "wide_order": wide.order,
        "fundamental_unit": {"x": unit.x, "y": unit.y, "norm": unit.unit_norm},
    }
    text = (f"D = {args.disc}: {obj['kind']} class group {group} (order {group.order})\n"
            f"  narrow order {narrow.order}, wide order {wide.order}, unit norm {unit.unit_norm}\n")
    _emit_obj(obj, cfg, text)
    return EXIT_OK


_Z2_RE = re.compile(r"^\s*([+-]?\d+)?\s*(?:([+-])\s*(\d+)?\s*\*?\s*sqrt2)?\s*$")


def parse_zsqrt2(text: str) -> Zsqrt2:
    """Accepts 'a', 'a,b', 'a+b*sqrt2', 'a-sqrt2', 'sqrt2'."""
    t = text.strip()
    if "," in t:
        a, b = t.split(",", 1)
        return Zsqrt2(int(a), int(b))
    if t in ("sqrt2", "+sqrt2"):
        return Zsqrt2(0, 1)
    if t == "-sqrt2":
        return Zsqrt2(0, -1)
    m = _Z2_RE.match(t)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise UsageError(f"cannot parse {text!r} as an element of Z[sqrt2]")
    a = int(m.group(1)) if m.group(1) else 0
    b = 0
    if m.group(2):
        b = int(m.group(3) or 1) * (1 if m.group(2) == "+" else -1)
    return Zsqrt2(a, b)


def _parse_place(text: str) -> PlaceOfQ1:
    t = text.strip().lower()
    if t in ("dyadic", "sqrt2"):
        return DYADIC
    if t in ("real+", "inf+"):
        return REAL_PLUS
    if t in ("real-", "inf-"):
        return REAL_MINUS
    pi = parse_zsqrt2(text)
    from .hilbert import places_above

    n = abs(pi.norm())
    for ell in sorted(_small_prime_divisors(n)):
        for place in places_above(ell):
            if place.prime_elem.divides(pi) and pi.divides(place.prime_elem):
                return place
    raise UsageError(f"{text!r} does not generate an odd prime of Q(sqrt2)")


def _small_prime_divisors(n: int) -> set[int]:
    from .arith import factorize

    return {p for p in factorize(n) if p != 2} if n > 1 else set()


def _cmd_symbol(cfg: RunConfig, args) -> int:
    vals = args.args
    kind = args.kind
    try:
        if kind == "legendre":
            if len(vals) != 2:
                raise UsageError("legendre needs: a p")
            a, p = int(vals[0]), int(vals[1])
            res: object = legendre(a, p)
        elif kind == "quartic2":
            if len(vals) != 1:
                raise UsageError("quartic2 needs: p")
            res = quartic_symbol_of_two(int(vals[0]))
        elif kind == "hilbert-q":
            if len(vals) != 3:
                raise UsageError("hilbert-q needs: a b place (prime or inf)")
            v: int | str = vals[2] if vals[2] == "inf" else int(vals[2])
            res = hilbert_symbol_Q(int(vals[0]), int(vals[1]), v)
        elif kind == "hilbert-q1":
            if len(vals) not in (2, 3):
                raise UsageError("hilbert-q1 needs: alpha beta [place]")
            alpha, beta = parse_zsqrt2(vals[0]), parse_zsqrt2(vals[1])
            if len(vals) == 3:
                res = hilbert_symbol_Q1(alpha, beta, _parse_place(vals[2]))
            else:
                res = symbol_table(alpha, beta).to_dict()
        else:  # pragma: no cover - argparse restricts choices
            raise UsageError(f"unknown symbol kind {kind}")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if isinstance(res, dict):
        text = json.dumps(res, sort_keys=True) + "\n"
        _emit_obj(res, cfg, text)
    else:
        _emit_obj({"kind": kind, "args": vals, "value": res}, cfg, f"{res}\n")
    return EXIT_OK


def _cmd_selftest(cfg: RunConfig, args) -> int:
    from .selftest import run_selftests

    results = run_selftests()
    rows = [{"check": name, "pass": ok, "detail": detail} for name, ok, detail in results]
    text = "".join(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n" for name, ok, detail in results)
    _emit_obj(rows, cfg, text)
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="text", dest="output_format")
    common.add_argument("--output", "-o", dest="output_path", default=None)
    common.add_argument("--disc-bound", type=int, default=None,
                        help="largest discriminant quadform will handle (env Z2TOWER_DISC_BOUND)")
    common.add_argument("--skip-kuroda", action="store_true",
                        help="check the order of A(k1) by the bound and rank only")
    common.add_argument("--jobs", "-j", type=int, default=None,
                        help="worker processes (env Z2TOWER_JOBS)")

    parser = argparse.ArgumentParser(prog="z2tower", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("scan", parents=[common], help="list admissible triples")
    sp.add_argument("--p-max", type=int, default=None, help="env Z2TOWER_P_MAX, default 500")
    sp.add_argument("--q-max", type=int, default=None, help="env Z2TOWER_Q_MAX, default 100")
    sp.add_argument("--r-max", type=int, default=None, help="env Z2TOWER_R_MAX, default 100")
    sp.add_argument("--verify", action="store_true", help="run the full pipeline on each triple")

    vp = sub.add_parser("verify", parents=[common], help="verify one triple")
    vp.add_argument("-p", type=int, required=True)
    vp.add_argument("-q", type=int, required=True)
    vp.add_argument("-r", type=int, required=True)

    cp = sub.add_parser("classgroup", parents=[common], help="class group of a real quadratic order")
    cp.add_argument("--disc", type=int, required=True)
    cp.add_argument("--narrow", action="store_true")

    yp = sub.add_parser("symbol", parents=[common], help="evaluate a residue or Hilbert symbol")
    yp.add_argument("--kind", required=True, choices=("legendre", "quartic2", "hilbert-q", "hilbert-q1"))
    yp.add_argument("args", nargs="+")

    sub.add_parser("selftest", parents=[common], help="run the oracle cross-validations")
    return parser


COMMANDS = {
    "scan": _cmd_scan,
    "verify": _cmd_verify,
    "classgroup": _cmd_classgroup,
    "symbol": _cmd_symbol,
    "selftest": _cmd_selftest,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = RunConfig(
            subcommand=args.subcommand,
            p_max=_bound(args, "p_max", 500),
            q_max=_bound(args, "q_max", 100),
            r_max=_bound(args, "r_max", 100),
            disc_bound=args.disc_bound,
            skip_kuroda=args.skip_kuroda,
            output_path=args.output_path,
            output_format=args.output_format,
            jobs=args.jobs if args.jobs is not None else _env_int("Z2TOWER_JOBS", 1),
        )
        return COMMANDS[args.subcommand](cfg, args)
    except UsageError as exc:
        print(f"z2tower: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"z2tower: resource limit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"z2tower: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
