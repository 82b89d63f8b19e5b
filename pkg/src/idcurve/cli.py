"""Command-line entry point: synthesize, estimate, curve, auc, sweep, compare.

Exit codes: 0 success, 1 validation error, 2 I/O error. All results are
written as JSON (and optionally CSV) with stable key order, so reruns with
identical inputs and seeds produce byte-identical files.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import analysis, estimators, synthetic, tensor_io
from .errors import FormatError, IdCurveError, LayerError, MissingLayerFileError


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the CLI contract reserves 2 for I/O
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(IdCurveError):
    pass


def _write_json(doc, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_csv(rows, header, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON: {exc}") from exc


def _load_curve(path) -> analysis.IDCurve:
    doc = _load_json(path)
    try:
        return analysis.IDCurve.from_dict(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: not a curve document: {exc}") from exc


def _estimator_params(args) -> dict:
    if args.estimator == "twonn":
        return {"discard_fraction": args.discard_fraction}
    return {"k": args.mle_k}


def _add_estimator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--estimator", choices=("twonn", "mle"), default="twonn")
    p.add_argument("--discard-fraction", type=float, default=0.1,
                   help="twonn: fraction of largest mu ratios dropped (default 0.10)")
    p.add_argument("--mle-k", type=int, default=50, help="mle: neighborhood size (default 50)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker count; 0 or unset auto-detects (IDCURVE_THREADS)")


def _cmd_synth(args) -> int:
    spec = synthetic.ManifoldSpec(
        kind=args.kind,
        intrinsic_dim=args.intrinsic_dim,
        ambient_dim=args.ambient_dim,
        n_points=args.n_points,
        noise_sigma=args.noise_sigma,
        seed=args.seed,
    )
    cloud = synthetic.generate(spec)
    tensor_io.write_cloud(cloud, args.output)
    print(f"wrote {cloud.n_points}x{cloud.dim} cloud ({cloud.source}) to {args.output}")
    return 0


def _cmd_estimate(args) -> int:
    cloud = tensor_io.read_cloud(args.input)
    result = estimators.estimate(cloud, args.estimator, threads=args.threads, **_estimator_params(args))
    print(result.value)
    if args.output:
        _write_json(result.to_dict(), args.output)
    return 0


def _cmd_curve(args) -> int:
    manifest = tensor_io.read_manifest(args.manifest)

    def progress(index, total, est):
        print(f"layer {index + 1}/{total}: id={est.value:.4f}", file=sys.stderr)

    curve = analysis.build_curve(
        manifest,
        estimator=args.estimator,
        threads=args.threads,
        progress=progress,
        **_estimator_params(args),
    )
    _write_json(curve.to_dict(), args.output)
    print(f"wrote {curve.n_layers}-layer curve to {args.output}")
    return 0


def _cmd_auc(args) -> int:
    doc = _load_json(args.curve)
    if isinstance(doc, list):
        summary_doc = {"normalized_auc": analysis.normalized_auc_values(doc)}
    else:
        summary = analysis.normalized_auc(_load_curve(args.curve))
        summary_doc = summary.to_dict()
    print(summary_doc["normalized_auc"])
    if args.output:
        _write_json(summary_doc, args.output)
    return 0


def _cmd_sft_trajectory(args) -> int:
    train = [_load_curve(p) for p in args.train]
    val = [_load_curve(p) for p in args.val] if args.val else None
    report = analysis.sft_trajectory(train, val)
    _write_json(report.to_dict(), args.output)
    if args.csv:
        val_auc = report.val_auc or [None] * len(report.steps)
        tacc = report.train_accuracy or [None] * len(report.steps)
        vacc = report.val_accuracy or [None] * len(report.steps)
        rows = list(zip(report.steps, report.train_auc, val_auc, tacc, vacc))
        _write_csv(rows, ("step", "train_auc", "val_auc", "train_accuracy", "val_accuracy"), args.csv)
    print(f"wrote trajectory over {len(report.steps)} checkpoints to {args.output}")
    return 0


def _cmd_shot_sweep(args) -> int:
    curves = [_load_curve(p) for p in args.curves]
    report = analysis.shot_sweep(curves, near_peak_threshold=args.near_peak_threshold)
    _write_json(report.to_dict(), args.output)
    if args.csv:
        acc = report.accuracy or [None] * len(report.ks)
        _write_csv(zip(report.ks, report.auc, acc), ("k", "normalized_auc", "accuracy"), args.csv)
    print(f"k_peak_auc={report.k_peak_auc} k_peak_acc={report.k_peak_acc} agreement={report.agreement}")
    return 0


def _cmd_compare(args) -> int:
    curves = [_load_curve(p) for p in args.curves]
    summaries = [analysis.normalized_auc(c) for c in curves]
    report = analysis.compare_paradigms(summaries)
    _write_json(report.to_dict(), args.output)
    if args.csv:
        rows = analysis.comparison_csv_rows(summaries)
        _write_csv(rows, ("paradigm", "model", "dataset", "normalized_auc"), args.csv)
    print(f"compared {len(report.paradigms)} paradigms over {len(summaries)} runs; wrote {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="idcurve", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("synth", help="generate a synthetic cloud of known intrinsic dimension")
    p.add_argument("--kind", choices=synthetic.KINDS, required=True)
    p.add_argument("--intrinsic-dim", type=int, required=True)
    p.add_argument("--ambient-dim", type=int, required=True)
    p.add_argument("--n-points", type=int, default=5000)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("estimate", help="estimate intrinsic dimension of one cloud")
    p.add_argument("--input", required=True)
    _add_estimator_flags(p)
    p.add_argument("--output", default=None, help="optional JSON report path")
    p.set_defaults(fn=_cmd_estimate)

    p = sub.add_parser("curve", help="build a per-layer ID curve from a run manifest")
    p.add_argument("--manifest", required=True)
    _add_estimator_flags(p)
    p.add_argument("--output", required=True)
    p.set_defaults(fn=_cmd_curve)

    p = sub.add_parser("auc", help="normalized AUC of a curve (curve JSON or bare value list)")
    p.add_argument("--curve", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(fn=_cmd_auc)

    p = sub.add_parser("sft-trajectory", help="AUC dynamics across fine-tuning checkpoints")
    p.add_argument("--train", nargs="+", required=True, help="train-split curve JSONs ordered by step")
    p.add_argument("--val", nargs="*", default=None, help="validation-split curve JSONs ordered by step")
    p.add_argument("--output", required=True)
    p.add_argument("--csv", default=None)
    p.set_defaults(fn=_cmd_sft_trajectory)

    p = sub.add_parser("shot-sweep", help="peak-k selection across an ICL shot sweep")
    p.add_argument("--curves", nargs="+", required=True, help="curve JSONs ordered by k")
    p.add_argument("--near-peak-threshold", type=float, default=0.95)
    p.add_argument("--output", required=True)
    p.add_argument("--csv", default=None)
    p.set_defaults(fn=_cmd_shot_sweep)

    p = sub.add_parser("compare", help="pairwise paradigm comparison over many runs")
    p.add_argument("--curves", nargs="+", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--csv", default=None)
    p.set_defaults(fn=_cmd_compare)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except (MissingLayerFileError, OSError) as exc:
        print(f"idcurve: i/o error: {exc}", file=sys.stderr)
        return 2
    except LayerError as exc:
        io_cause = isinstance(exc.cause, (MissingLayerFileError, OSError))
        print(f"idcurve: {'i/o ' if io_cause else ''}error: {exc}", file=sys.stderr)
        return 2 if io_cause else 1
    except IdCurveError as exc:
        print(f"idcurve: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
