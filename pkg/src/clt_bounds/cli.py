"""Command-line front end: ``tables``, ``bound``, ``verify`` and ``laws``.

Exit codes: 0 success (all matches / passes), 1 verification failure or
table mismatch, 2 usage or configuration error, 3 resource guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, build_scenario, load_config, parse_config
from .constants import PAPER_TABLES, TABLE_GAMMAS, ConstantVariant, registry_hash, reproduce_table
from .errors import DomainError, PreconditionError, ResourceError, UnboundedResultError
from .limitlaws import LimitLaw
from .randomsums import compute_bound, verify_bound

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

VERIFY_COLUMNS = ("scenario_id", "method", "measured_delta", "dkw_margin", "bound", "constant_used", "pass")
BOUND_COLUMNS = ("scenario_id", "theorem", "bound", "constant", "gamma", "L", "M", "normalization", "limit_law")
TABLE_COLUMNS = ("gamma", "computed_bound", "paper_bound", "match")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit with 2 (argparse default), keep it explicit
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def header_line() -> str:
    return f"# clt_bounds {__version__} constants={registry_hash()}"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.12g}"
    return str(v)


def render(rows: list[dict], columns: tuple[str, ...], fmt: str) -> str:
    cells = [[_fmt(r[c]) for c in columns] for r in rows]
    if fmt == "markdown":
        lines = [header_line(), "", "| " + " | ".join(columns) + " |", "|" + "|".join("---" for _ in columns) + "|"]
        lines += ["| " + " | ".join(c) + " |" for c in cells]
        return "\n".join(lines) + "\n"
    buf = io.StringIO()
    buf.write(header_line() + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(cells)
    return buf.getvalue()


def _emit(text: str, out_dir: str | None, name: str, fmt: str) -> None:
    if out_dir is None:
        sys.stdout.write(text)
        return
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    path = d / f"{name}.{'md' if fmt == 'markdown' else 'csv'}"
    path.write_text(text)
    print(f"wrote {path}")


def _parse_grid(spec: str) -> np.ndarray:
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be START:STOP:STEP, got {spec!r}") from None
    if not step > 0 or stop < start:
        raise argparse.ArgumentTypeError("grid needs STEP > 0 and STOP >= START")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count > 1_000_000:
        raise argparse.ArgumentTypeError("grid has more than 10^6 points")
    return start + step * np.arange(count)


def _variant(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        v = 0
    if v not in (1, 2, 3, 4):
        raise argparse.ArgumentTypeError(f"variant must be 1, 2, 3 or 4, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="clt-bounds", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"clt_bounds {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("csv", "markdown"), default=None, help="report format (default csv)")
    common.add_argument("--out-dir", default=None, help="write files here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("tables", parents=[common], help="reproduce the constant tables")
    t.add_argument("--variant", type=_variant, default=None, help="1..4 (default: all)")

    b = sub.add_parser("bound", parents=[common], help="evaluate the bound of each scenario in a config")
    b.add_argument("--config", required=True)
    b.add_argument("--scenario", default=None, help="only this scenario id")

    v = sub.add_parser("verify", parents=[common], help="check bounds against exact or simulated distances")
    v.add_argument("--config", default=None, help="scenario file (default: the shipped suite)")
    v.add_argument("--seed", type=int, default=None, help="override every Monte Carlo seed")
    v.add_argument("--scenario", default=None, help="only this scenario id")
    v.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo blocks")

    law = sub.add_parser("laws", parents=[common], help="tabulate a limit-law CDF")
    law.add_argument("--law", required=True, choices=("normal", "laplace", "variance_gamma", "student"))
    law.add_argument("--r", type=float, default=None, help="shape (variance_gamma) or degrees of freedom (student)")
    law.add_argument("--grid", type=_parse_grid, default=_parse_grid("-5:5:0.1"), help="START:STOP:STEP")
    return p


def cmd_tables(args) -> int:
    variants = [args.variant] if args.variant else [1, 2, 3, 4]
    fmt = args.output or "csv"
    all_ok = True
    for v in variants:
        rows = []
        for gamma, e, published in zip(TABLE_GAMMAS, reproduce_table(v), PAPER_TABLES[ConstantVariant(v)]):
            ok = e.bound == published
            all_ok &= ok
            rows.append({"gamma": gamma, "computed_bound": f"{e.bound:.4f}", "paper_bound": f"{published:.4f}", "match": ok})
        _emit(render(rows, TABLE_COLUMNS, fmt), args.out_dir, f"table_{ConstantVariant(v).name.lower()}", fmt)
    return EXIT_OK if all_ok else EXIT_FAIL


def _load(args):
    if args.config is None:
        text = resources.files("clt_bounds").joinpath("data/suite.ini").read_text()
        return parse_config(text)
    return load_config(args.config)


def _select(cfg, sid):
    scs = [s for s in cfg.scenarios if sid is None or s.id == sid]
    if not scs:
        raise ConfigError(f"no scenario {sid!r} in config" if sid else "config has no scenarios")
    return scs


def cmd_bound(args) -> int:
    cfg = _load(args)
    fmt = args.output or cfg.output
    rows = []
    for sc in _select(cfg, args.scenario):
        rep = compute_bound(build_scenario(sc, cfg))
        rows.append({"scenario_id": sc.id, **rep.row()})
    _emit(render(rows, BOUND_COLUMNS, fmt), args.out_dir, "bounds", fmt)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load(args)
    fmt = args.output or cfg.output
    rows, ok = [], True
    for sc in _select(cfg, args.scenario):
        scenario = build_scenario(sc, cfg, seed=args.seed)
        rep = verify_bound(scenario, workers=args.workers)
        ok &= rep.passed
        rows.append(rep.row())
    _emit(render(rows, VERIFY_COLUMNS, fmt), args.out_dir, "verify", fmt)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_laws(args) -> int:
    if args.law in ("variance_gamma", "student"):
        if args.r is None:
            raise ConfigError(f"--r is required for {args.law}")
        law = LimitLaw(args.law, r=args.r)
    else:
        law = LimitLaw(args.law)
    xs = args.grid
    fs = law.cdf_array(xs)
    rows = [{"x": x, "F": f} for x, f in zip(xs, fs)]
    fmt = args.output or "csv"
    _emit(render(rows, ("x", "F"), fmt), args.out_dir, f"law_{law.label().replace('(', '_').rstrip(')')}", fmt)
    return EXIT_OK


COMMANDS = {"tables": cmd_tables, "bound": cmd_bound, "verify": cmd_verify, "laws": cmd_laws}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UnboundedResultError, PreconditionError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
