"""Command-line interface: data ingestion, calibration, evaluation, bound
queries, risk-coverage curves, and guarantee simulation.

Record files are line-oriented JSON (one object per line, ``#`` comment
lines and blank lines skipped) in one of three layouts, or CSV for scored
records:

  scored      {"kappa": number, "loss": 0|1, "id"?: string}
  prediction  {"scores": [number x C], "label": int, "id"?: string}
  mc-dropout  {"passes": [[number x C] x T], "label": int, "id"?: string}
  CSV         exact header ``kappa,loss``, one pair per row

A file must use a single layout throughout. Exit codes: 0 success, 2 usage
error, 3 data-format error, 4 calibration ended infeasible (the report is
still written).

Floats are serialized with Python's shortest round-trip repr, so outputs
are byte-identical across identical invocations and parse back losslessly.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .bounds import BoundQuery, hoeffding_b, solve_b_star
from .confidence import (
    McDropoutRecord,
    PredictionRecord,
    normalize_kappa_kind,
    score_dataset,
)
from .errors import DataFormatError, DomainError
from .selective import ScoredDataset, ScoredExample, risk_coverage_curve
from .sgr import CalibrationReport, SgrIteration, SgrRequest, evaluate, sgr_calibrate
from .simulate import SyntheticDistribution, validate_guarantee

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INFEASIBLE = 4

DEFAULT_DELTA = 0.001

CURVE_HEADER = "theta,coverage,risk"


# ---------------------------------------------------------------------------
# record ingestion
# ---------------------------------------------------------------------------

_LAYOUT_KEYS = {
    "scored": ({"kappa", "loss"}, {"id"}),
    "prediction": ({"scores", "label"}, {"id"}),
    "mc-dropout": ({"passes", "label"}, {"id"}),
}


def _detect_layout(obj: dict, lineno: int) -> str:
    for layout, (required, _) in _LAYOUT_KEYS.items():
        if required <= set(obj):
            return layout
    raise DataFormatError(
        f"line {lineno}: record keys {sorted(obj)} match no known layout"
    )


def _check_keys(obj: dict, layout: str, lineno: int) -> None:
    required, optional = _LAYOUT_KEYS[layout]
    keys = set(obj)
    if not required <= keys:
        raise DataFormatError(
            f"line {lineno}: missing {sorted(required - keys)} for {layout} record"
        )
    extra = keys - required - optional
    if extra:
        raise DataFormatError(
            f"line {lineno}: unexpected keys {sorted(extra)} for {layout} record"
        )


def _as_number(value, what: str, lineno: int) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DataFormatError(f"line {lineno}: {what} must be a number, got {value!r}")
    return float(value)


def _as_loss(value, lineno: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value not in (0, 1):
        raise DataFormatError(f"line {lineno}: loss must be 0 or 1, got {value!r}")
    return int(value)


def _as_id(obj: dict, lineno: int) -> str | None:
    ident = obj.get("id")
    if ident is not None and not isinstance(ident, str):
        raise DataFormatError(f"line {lineno}: id must be a string, got {ident!r}")
    return ident


def _record_from_obj(obj: dict, layout: str, lineno: int, index: int):
    _check_keys(obj, layout, lineno)
    ident = _as_id(obj, lineno)
    label_ident = ident if ident is not None else f"#{index}"
    if layout == "scored":
        kappa = _as_number(obj["kappa"], "kappa", lineno)
        loss = _as_loss(obj["loss"], lineno)
        try:
            return ScoredExample(kappa, loss, ident)
        except DomainError as exc:
            raise DataFormatError(f"line {lineno}: {exc}") from exc
    if layout == "prediction":
        scores = obj["scores"]
        if not isinstance(scores, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in scores
        ):
            raise DataFormatError(f"line {lineno}: scores must be a list of numbers")
        if not isinstance(obj["label"], int) or isinstance(obj["label"], bool):
            raise DataFormatError(f"line {lineno}: label must be an integer")
        try:
            return PredictionRecord(scores, obj["label"], ident)
        except DomainError as exc:
            raise DataFormatError(
                f"line {lineno}: record {label_ident}: {exc}"
            ) from exc
    # mc-dropout
    passes = obj["passes"]
    if (
        not isinstance(passes, list)
        or not passes
        or not all(isinstance(row, list) for row in passes)
        or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool)
            for row in passes
            for v in row
        )
        or len({len(row) for row in passes}) != 1
    ):
        raise DataFormatError(
            f"line {lineno}: passes must be a rectangular list of number rows"
        )
    if not isinstance(obj["label"], int) or isinstance(obj["label"], bool):
        raise DataFormatError(f"line {lineno}: label must be an integer")
    try:
        return McDropoutRecord(passes, obj["label"], ident)
    except DomainError as exc:
        raise DataFormatError(f"line {lineno}: record {label_ident}: {exc}") from exc


def _reject_constant(token: str):
    raise DataFormatError(f"non-finite number {token!r} is not allowed")


def _read_csv_records(path: Path) -> list[ScoredExample]:
    records: list[ScoredExample] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["kappa", "loss"]:
            raise DataFormatError(
                f"{path}: CSV header must be exactly 'kappa,loss', got {header!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataFormatError(f"{path}: line {lineno}: expected 2 fields, got {len(row)}")
            try:
                kappa = float(row[0])
            except ValueError:
                raise DataFormatError(
                    f"{path}: line {lineno}: bad kappa {row[0]!r}"
                ) from None
            try:
                loss_val = float(row[1])
            except ValueError:
                raise DataFormatError(
                    f"{path}: line {lineno}: bad loss {row[1]!r}"
                ) from None
            if loss_val not in (0.0, 1.0):
                raise DataFormatError(
                    f"{path}: line {lineno}: loss must be 0 or 1, got {row[1]!r}"
                )
            try:
                records.append(ScoredExample(kappa, int(loss_val)))
            except DomainError as exc:
                raise DataFormatError(f"{path}: line {lineno}: {exc}") from exc
    return records


def read_records(path, fmt: str = "auto") -> tuple[str, list]:
    """Parse a record file; returns (layout, records).

    ``fmt`` is one of auto, csv, scored, prediction, mc-dropout; "auto"
    picks CSV for a .csv suffix and otherwise infers the JSONL layout from
    the first record. Mixed layouts within a file are rejected, and the
    first malformed line aborts with its line number.
    """
    path = Path(path)
    if fmt not in ("auto", "csv", "scored", "prediction", "mc-dropout"):
        raise DomainError(f"unknown record format {fmt!r}")
    if fmt == "csv" or (fmt == "auto" and path.suffix.lower() == ".csv"):
        return "scored", _read_csv_records(path)

    layout = None if fmt == "auto" else fmt
    records: list = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            try:
                obj = json.loads(stripped, parse_constant=_reject_constant)
            except (json.JSONDecodeError, DataFormatError) as exc:
                raise DataFormatError(f"{path}: line {lineno}: invalid JSON: {exc}") from None
            if not isinstance(obj, dict):
                raise DataFormatError(f"{path}: line {lineno}: expected a JSON object")
            if layout is None:
                layout = _detect_layout(obj, lineno)
            try:
                records.append(_record_from_obj(obj, layout, lineno, len(records)))
            except DataFormatError as exc:
                raise DataFormatError(f"{path}: {exc}") from None
    return layout or "scored", records


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _dataset_from_file(args) -> ScoredDataset:
    layout, records = read_records(args.input)
    if not records:
        raise DataFormatError(f"{args.input}: empty dataset")
    kappa = getattr(args, "kappa", None)
    loss = getattr(args, "loss", None)
    if kappa is None:
        kappa = {"scored": "precomputed", "prediction": "sr", "mc-dropout": "mc-dropout"}[layout]
    if loss is None:
        loss = "precomputed" if layout == "scored" else "top1"
    kind = normalize_kappa_kind(kappa)
    expected_layout = {
        "precomputed": "scored",
        "softmax-response": "prediction",
        "mc-dropout": "mc-dropout",
    }[kind]
    if layout != expected_layout:
        raise DataFormatError(
            f"{args.input}: {layout} records cannot be scored with kappa kind {kappa!r}"
        )
    return score_dataset(
        records, kind, loss, already_probabilities=getattr(args, "probabilities", False)
    )


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
        if not text.endswith("\n"):
            fh.write("\n")


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2)


def _report_line(report: CalibrationReport) -> str:
    return (
        f"r*={report.r_star:.4f}  train_risk={report.train_risk:.4f}  "
        f"train_coverage={report.train_coverage:.4f}  bound={report.bound:.6f}  "
        f"feasible={'yes' if report.feasible else 'NO'}"
    )


def _report_from_dict(obj: dict) -> CalibrationReport:
    try:
        trace = tuple(
            SgrIteration(
                i=int(it["i"]),
                z=int(it["z"]),
                theta=float(it["theta"]),
                train_risk=float(it["train_risk"]),
                train_coverage=float(it["train_coverage"]),
                accepted=int(it["accepted"]),
                errors=int(it["errors"]),
                bound=float(it["bound"]),
                feasible=bool(it["feasible"]),
            )
            for it in obj.get("trace", [])
        )
        return CalibrationReport(
            theta=float(obj["theta"]),
            bound=float(obj["bound"]),
            train_risk=float(obj["train_risk"]),
            train_coverage=float(obj["train_coverage"]),
            feasible=bool(obj["feasible"]),
            delta=float(obj["delta"]),
            r_star=float(obj["r_star"]),
            k_iterations=int(obj["k_iterations"]),
            trace=trace,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"invalid calibration report: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_calibrate(args) -> int:
    data = _dataset_from_file(args)
    targets = args.risk
    if len(targets) > 1:
        print(
            "warning: certifying several risk targets from one calibration set; "
            "no multiple-testing correction is applied across targets",
            file=sys.stderr,
        )
    reports = [sgr_calibrate(SgrRequest(data, r, args.delta)) for r in targets]
    for report in reports:
        print(_report_line(report))
    payload = reports[0].to_dict() if len(reports) == 1 else [r.to_dict() for r in reports]
    _write_text(args.output, _json_dumps(payload))
    return EXIT_OK if all(r.feasible for r in reports) else EXIT_INFEASIBLE


def cmd_evaluate(args) -> int:
    with open(args.report, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{args.report}: invalid JSON: {exc}") from None
    report = _report_from_dict(obj)
    data = _dataset_from_file(args)
    metrics = evaluate(report, data)
    result = {
        "theta": report.theta,
        "risk": metrics.risk,
        "coverage": metrics.coverage,
        "accepted": metrics.accepted,
        "errors_accepted": metrics.errors_accepted,
        "degenerate": metrics.degenerate,
    }
    print(
        f"test_risk={metrics.risk:.4f}  test_coverage={metrics.coverage:.4f}"
        + ("  (degenerate: nothing accepted)" if metrics.degenerate else "")
    )
    if args.output:
        _write_text(args.output, _json_dumps(result))
    return EXIT_OK


def cmd_bound(args) -> int:
    query = BoundQuery(args.m, args.errors, args.delta)
    result = solve_b_star(query)
    payload = {
        "m": query.m,
        "errors": query.k,
        "delta": query.delta,
        "b_star": result.b_star,
        "residual": result.residual,
        "iterations": result.iterations,
        "hoeffding": hoeffding_b(query),
    }
    print(_json_dumps(payload))
    return EXIT_OK


def cmd_curve(args) -> int:
    data = _dataset_from_file(args)
    points = risk_coverage_curve(data)
    lines = [CURVE_HEADER]
    lines.extend(f"{p.theta!r},{p.coverage!r},{p.risk!r}" for p in points)
    _write_text(args.output, "\n".join(lines))
    print(f"wrote {len(points)} curve points to {args.output}")
    return EXIT_OK


def _parse_dist(spec: str, seed: int) -> SyntheticDistribution:
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    names = {"linear": "linear-error", "logistic": "logistic-error", "constant": "constant-error"}
    if kind not in names:
        raise DomainError(
            f"unknown distribution {spec!r}; expected linear:a, logistic:level,steepness,midpoint or constant:c"
        )
    try:
        params = tuple(float(p) for p in rest.split(",")) if rest else ()
    except ValueError:
        raise DomainError(f"bad distribution parameters in {spec!r}") from None
    return SyntheticDistribution(names[kind], params, seed)


def cmd_simulate(args) -> int:
    dist = _parse_dist(args.dist, args.seed)
    summary = validate_guarantee(dist, args.m, args.risk, args.delta, args.trials)
    print(
        f"violation_rate={summary.violation_rate:.4f}  "
        f"feasible={summary.feasible_trials}  infeasible={summary.infeasible_trials}"
    )
    _write_text(args.output, _json_dumps(summary.to_dict()))
    if args.trial_csv:
        rows = ["trial,feasible,theta,bound,train_risk,train_coverage,true_selective_risk,violated"]
        for t in summary.trial_log:
            rows.append(
                f"{t.trial},{int(t.report.feasible)},{t.report.theta!r},{t.report.bound!r},"
                f"{t.report.train_risk!r},{t.report.train_coverage!r},"
                f"{t.true_selective_risk!r},{int(t.violated)}"
            )
        _write_text(args.trial_csv, "\n".join(rows))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _unit_open(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie strictly in (0, 1), got {value}")
    return value


def _risk_list(text: str) -> list[float]:
    values = []
    for part in text.split(","):
        value = float(part)
        if not 0.0 < value < 1.0:
            raise argparse.ArgumentTypeError(
                f"risk targets must lie strictly in (0, 1), got {value}"
            )
        values.append(value)
    return values


def _add_scoring_flags(sub) -> None:
    sub.add_argument(
        "--kappa",
        choices=["sr", "mc-dropout", "precomputed"],
        default=None,
        help="confidence rate (default: inferred from the record layout)",
    )
    sub.add_argument(
        "--loss",
        default=None,
        help="loss kind: top1, top5, topk:K or precomputed (default: inferred)",
    )
    sub.add_argument(
        "--probabilities",
        action="store_true",
        help="treat prediction scores as already-normalized probabilities",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selectrisk",
        description="Certified rejection thresholds for selective classification.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("calibrate", help="learn a threshold with a certified risk bound")
    p.add_argument("--input", required=True, help="record file (JSONL or CSV)")
    p.add_argument("--risk", required=True, type=_risk_list,
                   help="target risk r* in (0, 1); comma-separate for several targets")
    p.add_argument("--delta", type=_unit_open, default=DEFAULT_DELTA,
                   help=f"confidence parameter (default {DEFAULT_DELTA})")
    _add_scoring_flags(p)
    p.add_argument("--output", required=True, help="report JSON path")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("evaluate", help="apply a calibrated threshold to held-out data")
    p.add_argument("--input", required=True)
    p.add_argument("--report", required=True, help="calibration report JSON")
    _add_scoring_flags(p)
    p.add_argument("--output", default=None, help="optional metrics JSON path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bound", help="invert the exact binomial tail bound")
    p.add_argument("--m", required=True, type=_positive_int, help="sample count")
    p.add_argument("--errors", required=True, type=_nonneg_int, help="error count")
    p.add_argument("--delta", type=_unit_open, default=DEFAULT_DELTA)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("curve", help="write the exact risk-coverage curve as CSV")
    p.add_argument("--input", required=True)
    _add_scoring_flags(p)
    p.add_argument("--output", required=True, help="CSV path")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("simulate", help="Monte-Carlo validation of the risk guarantee")
    p.add_argument("--dist", required=True,
                   help="linear:a | logistic:level,steepness,midpoint | constant:c")
    p.add_argument("--m", required=True, type=_positive_int, help="calibration sample size")
    p.add_argument("--risk", required=True, type=_unit_open)
    p.add_argument("--delta", type=_unit_open, default=DEFAULT_DELTA)
    p.add_argument("--trials", required=True, type=_positive_int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True, help="summary JSON path")
    p.add_argument("--trial-csv", default=None, help="optional per-trial CSV path")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand == "bound" and args.errors > args.m:
        parser.error(f"--errors must be <= --m, got {args.errors} > {args.m}")
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DataFormatError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())
