"""Command line interface.

    bpfi compute data.csv --target Y [--bins col:k[:strategy]] [--emit-subsets] [--best-k]
    bpfi dataset 14 -o xor.csv
    bpfi verify submission.json
    bpfi verify --self [--write-submission bpfi.json]

Exit codes: 0 success, 1 verification found a non-passing test, 2 bad input
(I/O, parse, unknown dataset, malformed submission), 3 constant target,
4 too many features.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

from . import __version__
from .catalog import get_dataset, get_entry
from .dataset import BinningRule, read_csv
from .exceptions import (
    BPFIError,
    DependencyUndefined,
    MalformedSubmission,
    TooManyFeatures,
    UnknownDataset,
)
from .harness import FiSubmission, run_all, self_submission
from .shapley import best_subset, compute_fi

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_UNDEFINED = 3
EXIT_TOO_MANY = 4


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _error(msg: str, code: int) -> int:
    print(f"bpfi: error: {msg}", file=sys.stderr)
    return code


def _compute_report(args) -> dict:
    rules = [BinningRule.parse(b) for b in args.bins]
    ds = read_csv(args.input, args.target, bins=rules)
    if ds.n_features == 0:
        raise ValueError("the CSV has no feature columns besides the target")
    res = compute_fi(ds, max_features=args.max_features)
    report = {
        "target": ds.target_name,
        "n_samples": ds.n_samples,
        "feature_names": list(res.feature_names),
        "importances": [float(x) for x in res.importances],
        "total_dependency": float(res.total_dependency),
    }
    if args.emit_subsets:
        report["subsets"] = [
            {"mask": mask, "features": res.cache.names(mask), "dependency": value}
            for mask, value in res.cache.items()
        ]
    if args.best_k:
        report["best_subsets"] = []
        for k in range(1, ds.n_features + 1):
            mask = best_subset(res.cache, k)
            report["best_subsets"].append(
                {"k": k, "mask": mask, "features": res.cache.names(mask),
                 "dependency": res.cache[mask]}
            )
    return report


def _format_compute(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", "features", "value"])
        for name, x in zip(report["feature_names"], report["importances"]):
            w.writerow(["importance", name, repr(x)])
        w.writerow(["total_dependency", "", repr(report["total_dependency"])])
        for s in report.get("subsets", []):
            w.writerow(["subset", "|".join(s["features"]), repr(s["dependency"])])
        for s in report.get("best_subsets", []):
            w.writerow([f"best_k={s['k']}", "|".join(s["features"]), repr(s["dependency"])])
        return buf.getvalue()
    width = max(len(n) for n in report["feature_names"] + ["feature"])
    lines = [f"{'feature':<{width}}  importance"]
    for name, x in zip(report["feature_names"], report["importances"]):
        lines.append(f"{name:<{width}}  {x:.6f}")
    lines.append(f"{'total':<{width}}  {report['total_dependency']:.6f}")
    if "subsets" in report:
        lines.append("")
        lines.append("dependency  subset")
        for s in report["subsets"]:
            lines.append(f"{s['dependency']:.6f}    {{{', '.join(s['features'])}}}")
    if "best_subsets" in report:
        lines.append("")
        lines.append("k  dependency  best subset")
        for s in report["best_subsets"]:
            lines.append(f"{s['k']:<2} {s['dependency']:.6f}    {{{', '.join(s['features'])}}}")
    return "\n".join(lines) + "\n"


def cmd_compute(args) -> int:
    try:
        report = _compute_report(args)
    except DependencyUndefined as exc:
        return _error(f"dependency undefined: {exc} (Y is almost surely constant)",
                      EXIT_UNDEFINED)
    except TooManyFeatures as exc:
        return _error(str(exc), EXIT_TOO_MANY)
    except (OSError, ValueError, KeyError, BPFIError) as exc:
        return _error(str(exc), EXIT_INPUT)
    try:
        _emit(_format_compute(report, args.format), args.output)
    except OSError as exc:
        return _error(str(exc), EXIT_INPUT)
    return EXIT_OK


def cmd_dataset(args) -> int:
    try:
        entry = get_entry(args.id)
    except UnknownDataset as exc:
        return _error(str(exc.args[0]), EXIT_INPUT)
    ds = get_dataset(entry.id)
    if args.format == "json":
        text = json.dumps(
            {
                "id": entry.id,
                "name": entry.name,
                "n_samples": ds.n_samples,
                "feature_names": list(ds.feature_names),
                "target": ds.target_name,
                "golden_fi": list(entry.golden_fi),
            },
            sort_keys=True,
            indent=2,
        )
    else:
        text = ds.to_csv()
    try:
        _emit(text, args.output)
    except OSError as exc:
        return _error(str(exc), EXIT_INPUT)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        if args.self:
            sub = self_submission()
            if args.write_submission:
                _emit(sub.to_json(), args.write_submission)
        elif args.submission:
            sub = FiSubmission.load(args.submission)
        else:
            return _error("give a submission file or --self", EXIT_INPUT)
    except (OSError, MalformedSubmission) as exc:
        return _error(str(exc), EXIT_INPUT)
    report = run_all(sub)
    text = report.to_json() if args.format == "json" else report.to_table()
    try:
        _emit(text, args.output)
    except OSError as exc:
        return _error(str(exc), EXIT_INPUT)
    return EXIT_OK if report.all_passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bpfi", description="BP feature importance."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="feature importance of a CSV file")
    p.add_argument("input", help="CSV file with a header row")
    p.add_argument("--target", required=True, help="name of the target column")
    p.add_argument("--bins", action="append", default=[], metavar="COL:K[:STRATEGY]",
                   help="bin a numeric column (equal-width or equal-frequency); repeatable")
    p.add_argument("--max-features", type=int, default=None,
                   help="feature cap (default 20 or $BPFI_MAX_FEATURES)")
    p.add_argument("--emit-subsets", action="store_true",
                   help="include the dependency of every feature subset")
    p.add_argument("--best-k", action="store_true",
                   help="include the most dependent subset of each size")
    p.add_argument("--format", choices=("json", "csv", "table"), default="table")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("dataset", help="export a catalog dataset (1..28)")
    p.add_argument("id", type=int)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("verify", help="grade a submission against the 18 tests")
    p.add_argument("submission", nargs="?", help="submission JSON file")
    p.add_argument("--self", action="store_true",
                   help="grade the built-in BP-FI results instead of a file")
    p.add_argument("--write-submission", metavar="PATH", default=None,
                   help="with --self, also write the built-in results as a submission file")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
