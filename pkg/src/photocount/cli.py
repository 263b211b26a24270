"""Command-line front end.

Every command writes one JSON document to standard output (or ``--out``).
Exit codes: 0 success, 1 input error, 2 non-convergence under ``--strict``,
64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .combinatorics import enumerate_partitions
from .errors import BoundsError, BudgetError, DegenerateDimensionError, DegreesOfFreedomError, ModelError, OrderError
from .estimators import Sample, factorial_moment_ustat, partition_label, polykays_upto
from .modelio import parse_model
from .photon import (
    RANDOMIZED_KINDS,
    joint_cumulant,
    joint_factorial_cumulant,
    joint_factorial_moment,
    joint_moment,
    joint_pmf_series,
    overall_cumulant,
    overall_factorial_cumulant,
    overall_factorial_moment,
    overall_moment,
    overall_pmf,
    randomized_stats,
)
from .simulation import empirical_cumulants, sample_counts, sample_intensities
from .spectral import SpectralSample, spectral_polykay
from .verify import SUITES, report, run_suites

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGED, EXIT_USAGE = 0, 1, 2, 64
INPUT_ERRORS = (ModelError, ValueError, OrderError, BoundsError, DegreesOfFreedomError,
                DegenerateDimensionError, BudgetError, OSError, KeyError, ArithmeticError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def num(x):
    """Plain decimal with 15 significant digits."""
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return int(x)
    return float(f"{float(x):.15g}")


def _value(x) -> dict:
    out = {"value": num(x)}
    if isinstance(x, Fraction):
        out["exact"] = str(x)
    return out


def parse_k_list(text: str) -> list[int]:
    """``"3"``, ``"0,2,5"`` or ``"0..5"``."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ValueError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [int(t) for t in text.split(",") if t.strip()]


def parse_multi_index(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(",") if t.strip())


def _orders(args) -> list[int]:
    if args.k is not None:
        return parse_k_list(args.k)
    return list(range(1, args.order + 1))


# -- commands ----------------------------------------------------------------


def cmd_moments(args):
    model, _ = parse_model(args.model)
    return {"command": "moments", "records": [{"order": i, **_value(overall_moment(model, i))} for i in _orders(args)]}


def cmd_cumulants(args):
    model, _ = parse_model(args.model)
    return {"command": "cumulants",
            "records": [{"order": i, **_value(overall_cumulant(model, i))} for i in _orders(args)]}


def cmd_factorial(args):
    model, _ = parse_model(args.model)
    recs = []
    for i in _orders(args):
        recs.append({"order": i, "factorial_moment": _value(overall_factorial_moment(model, i)),
                     "factorial_cumulant": _value(overall_factorial_cumulant(model, i))})
    return {"command": "factorial", "records": recs}


def _series_record(res, **extra) -> dict:
    out = dict(extra)
    out.update({key: num(v) for key, v in res.as_dict().items()})
    return out


def cmd_pmf(args):
    model, _ = parse_model(args.model)
    ks = parse_k_list(args.k) if args.k is not None else [0]
    recs = [_series_record(overall_pmf(model, k, args.truncation, args.accel), k=k) for k in ks]
    return {"command": "pmf", "records": recs}


JOINT_KINDS = ("moment", "factorial_moment", "cumulant", "factorial_cumulant", "pmf")


def cmd_joint(args):
    model, _ = parse_model(args.model)
    if args.k is None:
        raise ValueError("joint needs --k with a multi-index such as 1,1")
    k = parse_multi_index(args.k)
    kinds = JOINT_KINDS[:4] if args.kind == "all" else (args.kind,)
    rec: dict = {"k": list(k)}
    for kind in kinds:
        if kind == "moment":
            rec[kind] = _value(joint_moment(model, k))
        elif kind == "factorial_moment":
            rec[kind] = _value(joint_factorial_moment(model, k))
        elif kind == "cumulant":
            rec[kind] = _value(joint_cumulant(model, k))
        elif kind == "factorial_cumulant":
            rec[kind] = _value(joint_factorial_cumulant(model, k))
        else:
            rec[kind] = _series_record(joint_pmf_series(model, k, args.truncation, args.accel))
    return {"command": "joint", "records": [rec]}


def cmd_randomized(args):
    model, count = parse_model(args.model)
    if count is None:
        raise ModelError("randomized needs a count_model in the model file")
    kinds = RANDOMIZED_KINDS if args.kind == "all" else (args.kind,)
    recs = []
    for i in _orders(args):
        recs.append({"order": i, **{kind: _value(randomized_stats(model, count, kind, i)) for kind in kinds}})
    return {"command": "randomized", "count_model": count.as_dict(), "records": recs}


def _read_column(path: str, column) -> list:
    rows = [r for r in csv.reader(Path(path).read_text().splitlines()) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path}: no data")
    header = None
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        header, rows = rows[0], rows[1:]
    idx = 0
    if column is not None:
        if header is not None and column in header:
            idx = header.index(column)
        else:
            try:
                idx = int(column)
            except ValueError:
                raise ValueError(f"{path}: no column {column!r}") from None
    out = []
    for line, r in enumerate(rows, start=2 if header else 1):
        try:
            out.append(_parse_numeral(r[idx]))
        except (ValueError, IndexError):
            raise ValueError(f"{path}: line {line}: bad value in column {idx}") from None
    return out


def _parse_numeral(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    if "/" in text:
        return Fraction(text)
    return float(text)


def cmd_estimate(args):
    what = args.what
    if what == "spectral":
        doc = json.loads(Path(args.data).read_text())
        mat = np.array([[complex(*e) if isinstance(e, list) else complex(e) for e in row] for row in doc])
        sample = SpectralSample.from_matrix(mat)
        recs = []
        for k in range(1, args.degree + 1):
            for lam in enumerate_partitions(k):
                recs.append({"partition": partition_label(lam), **_value(spectral_polykay(sample, lam))})
        return {"command": "estimate", "estimator": "spectral", "d": sample.d, "records": recs}
    sample = Sample(_read_column(args.data, args.column))
    if what == "polykays":
        vals = polykays_upto(sample, args.degree)
        recs = [{"partition": lab, **_value(v)} for lab, v in vals.items()]
    else:
        recs = [{"order": k, **_value(factorial_moment_ustat(sample, k))} for k in range(1, args.degree + 1)]
    return {"command": "estimate", "estimator": what, "n": sample.n, "records": recs}


def cmd_simulate(args):
    model, count = parse_model(args.model)
    fmodel = model.to_float()
    if args.what == "counts":
        batch = sample_counts(fmodel, args.samples, args.seed, count if args.randomized else None, workers=args.workers)
    else:
        batch = sample_intensities(fmodel, args.samples, args.seed, count=count if args.randomized else None,
                                   workers=args.workers)
    batch.model_digest = model.digest
    order = min(args.order, 6)
    recs = []
    for j in range(model.d):
        ests = empirical_cumulants(batch, order, column=j, use=args.what)
        recs.append({"pixel": j + 1, "cumulants": [{"order": i + 1, "value": num(e.value), "se": num(e.se)}
                                                   for i, e in enumerate(ests)]})
    out = {"command": "simulate", "samples": args.samples, "seed": args.seed, "model_digest": model.digest,
           "records": recs}
    if args.out:
        out["csv"] = str(args.out)
        out["metadata"] = str(batch.to_csv(args.out))
    return out


def cmd_verify(args):
    checks = run_suites(args.suite, args.seed, args.samples)
    doc = report(checks)
    doc["command"] = "verify"
    return doc


COMMANDS = {
    "moments": cmd_moments,
    "cumulants": cmd_cumulants,
    "factorial": cmd_factorial,
    "pmf": cmd_pmf,
    "joint": cmd_joint,
    "randomized": cmd_randomized,
    "estimate": cmd_estimate,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="photocount", description="Photocounting statistics for Wishart intensity models.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, model=True):
        if model:
            p.add_argument("model", help="model file (JSON)")
        p.add_argument("--out", help="write the result document (or CSV for simulate) here")
        p.add_argument("--strict", action="store_true", help="exit 2 when a series does not converge")

    for name in ("moments", "cumulants", "factorial"):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--order", type=int, default=4)
        p.add_argument("--k", help="orders: single, list or range a..b (overrides --order)")

    p = sub.add_parser("pmf")
    common(p)
    p.add_argument("--k", help="counts: single, list or range a..b (default 0)")
    p.add_argument("--truncation", type=int, default=60)
    p.add_argument("--accel", choices=("none", "euler"), default="none")

    p = sub.add_parser("joint")
    common(p)
    p.add_argument("--k", help="multi-index, e.g. 1,1")
    p.add_argument("--kind", choices=JOINT_KINDS + ("all",), default="all")
    p.add_argument("--truncation", type=int, default=30)
    p.add_argument("--accel", choices=("none", "euler"), default="none")

    p = sub.add_parser("randomized")
    common(p)
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--k", help="orders: single, list or range a..b (overrides --order)")
    p.add_argument("--kind", choices=RANDOMIZED_KINDS + ("all",), default="all")

    p = sub.add_parser("estimate")
    p.add_argument("what", choices=("polykays", "factorial", "spectral"))
    p.add_argument("data", help="CSV/one-value-per-line sample, or a JSON matrix for spectral")
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--column", help="CSV column name or 0-based index")
    common(p, model=False)

    p = sub.add_parser("simulate")
    common(p)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--order", type=int, default=2, help="k-statistics reported per pixel (<= 6)")
    p.add_argument("--what", choices=("counts", "intensities"), default="counts")
    p.add_argument("--randomized", action="store_true", help="draw the wave count from the file's count_model")

    p = sub.add_parser("verify")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--samples", type=int, default=200_000)
    common(p, model=False)
    return parser


def _converged(doc) -> bool:
    ok = True

    def walk(x):
        nonlocal ok
        if isinstance(x, dict):
            if x.get("converged") is False:
                ok = False
            for v in x.values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)

    walk(doc)
    return ok


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        doc = COMMANDS[args.command](args)
    except INPUT_ERRORS as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_INPUT
    text = json.dumps(doc, indent=2)
    if getattr(args, "out", None) and args.command != "simulate":
        Path(args.out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    if args.command == "verify" and doc["summary"]["unexpected"]:
        return EXIT_INPUT
    if args.strict and not _converged(doc):
        return EXIT_NONCONVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
