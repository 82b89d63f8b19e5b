"""Per-layer ID curves and every cross-run statistic built on them.

The central object is the IDCurve: one intrinsic-dimension estimate per
layer of a run. Curves aggregate to a single scalar by the normalized
trapezoidal area

    normalized_auc = (1/L) * sum_{i=1}^{L-1} (ID_i + ID_{i+1}) / 2

note the normalization by the layer count L rather than the trapezoid
count L - 1, so a constant curve c yields c * (L-1) / L.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import estimators as est
from . import tensor_io
from .errors import (
    DegenerateSeriesError,
    EmptyInputError,
    InvalidCurveError,
    LayerError,
    MixedRunsError,
)
from .estimators import IDEstimate
from .tensor_io import Paradigm, RunManifest


@dataclass
class IDCurve:
    """Ordered per-layer estimates for one (model, dataset, paradigm) run."""

    layer_ids: list[tuple[int, IDEstimate]]
    manifest: RunManifest

    def __post_init__(self):
        indices = [i for i, _ in self.layer_ids]
        if len(indices) < 2:
            raise InvalidCurveError("a curve needs at least 2 layers")
        if indices != list(range(len(indices))):
            raise InvalidCurveError(f"layer indices must be contiguous from 0, got {indices}")

    @property
    def n_layers(self) -> int:
        return len(self.layer_ids)

    def values(self) -> list[float]:
        return [e.value for _, e in self.layer_ids]

    def to_dict(self) -> dict:
        return {
            "manifest": self.manifest.to_dict(),
            "layers": [{"layer": i, "estimate": e.to_dict()} for i, e in self.layer_ids],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "IDCurve":
        mdoc = doc["manifest"]
        manifest = RunManifest(
            model_name=mdoc["model_name"],
            dataset_name=mdoc["dataset_name"],
            paradigm=tensor_io._parse_paradigm(mdoc["paradigm"]),
            layer_files=mdoc["layer_files"],
            accuracy=mdoc.get("accuracy"),
            seed=mdoc.get("seed"),
        )
        layers = [(int(l["layer"]), IDEstimate.from_dict(l["estimate"])) for l in doc["layers"]]
        return cls(layer_ids=layers, manifest=manifest)


@dataclass
class AUCSummary:
    """Normalized AUC of one curve plus the identity of the run it came from."""

    normalized_auc: float
    model_name: str
    dataset_name: str
    paradigm: Paradigm

    def to_dict(self) -> dict:
        return {
            "normalized_auc": self.normalized_auc,
            "model_name": self.model_name,
            "dataset_name": self.dataset_name,
            "paradigm": self.paradigm.label,
        }


def build_curve(
    manifest: RunManifest,
    estimator: str = "twonn",
    threads: int | None = None,
    progress=None,
    **params,
) -> IDCurve:
    """Estimate one ID value per layer file of a run.

    Layers are processed independently; a failure is re-raised as a
    LayerError naming the offending layer. ``progress`` may be a callable
    taking (layer_index, n_layers, estimate).
    """
    if manifest.n_layers < 2:
        raise InvalidCurveError(f"run has {manifest.n_layers} layer file(s); a curve needs at least 2")
    layer_ids = []
    for index, path in enumerate(manifest.layer_files):
        try:
            cloud = tensor_io.read_cloud(path)
            estimate = est.estimate(cloud, estimator, threads=threads, **params)
        except Exception as exc:
            raise LayerError(index, path, exc) from exc
        layer_ids.append((index, estimate))
        if progress is not None:
            progress(index, manifest.n_layers, estimate)
    return IDCurve(layer_ids=layer_ids, manifest=manifest)


def normalized_auc_values(values) -> float:
    """Trapezoidal area under a value series, normalized by its length L."""
    vals = [float(v) for v in values]
    if len(vals) < 2:
        raise InvalidCurveError("normalized AUC needs at least 2 values")
    area = math.fsum(0.5 * (a + b) for a, b in zip(vals, vals[1:]))
    return area / len(vals)


def normalized_auc(curve: IDCurve) -> AUCSummary:
    """Normalized AUC of a curve, tagged with the run identity."""
    return AUCSummary(
        normalized_auc=normalized_auc_values(curve.values()),
        model_name=curve.manifest.model_name,
        dataset_name=curve.manifest.dataset_name,
        paradigm=curve.manifest.paradigm,
    )


def pearson(x, y) -> float:
    """Sample Pearson correlation of two equally long series."""
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.ndim != 1 or ya.ndim != 1 or xa.size != ya.size:
        raise DegenerateSeriesError("series must be 1-D and equally long")
    if xa.size < 3:
        raise DegenerateSeriesError(f"need at least 3 observations, got {xa.size}")
    xd = xa - xa.mean()
    yd = ya - ya.mean()
    denom = math.sqrt(float(xd @ xd) * float(yd @ yd))
    if denom == 0.0:
        raise DegenerateSeriesError("zero variance in a series")
    return float(xd @ yd) / denom


def _decrease_positions(series) -> list[int]:
    return [i for i in range(1, len(series)) if series[i] < series[i - 1]]


def _check_same_run(curves, expect_kind: str) -> tuple[str, str]:
    keys = {c.manifest.run_key() for c in curves}
    if len(keys) != 1:
        raise MixedRunsError(f"curves span multiple (model, dataset) runs: {sorted(keys)}")
    kinds = {c.manifest.paradigm.kind for c in curves}
    if kinds != {expect_kind}:
        raise MixedRunsError(f"expected only {expect_kind!r} runs, got {sorted(kinds)}")
    return keys.pop()


@dataclass
class SftTrajectory:
    """AUC series across fine-tuning checkpoints for train and validation clouds."""

    model_name: str
    dataset_name: str
    steps: list[int]
    train_auc: list[float]
    val_auc: list[float] | None
    auc_correlation: float | None
    train_decrease_steps: list[int]
    val_decrease_steps: list[int] | None
    train_accuracy: list[float] | None = None
    val_accuracy: list[float] | None = None

    def to_dict(self) -> dict:
        return {
            "model_name": self.model_name,
            "dataset_name": self.dataset_name,
            "steps": self.steps,
            "train_auc": self.train_auc,
            "val_auc": self.val_auc,
            "auc_correlation": self.auc_correlation,
            "train_decrease_steps": self.train_decrease_steps,
            "val_decrease_steps": self.val_decrease_steps,
            "train_accuracy": self.train_accuracy,
            "val_accuracy": self.val_accuracy,
        }


def sft_trajectory(
    train_curves,
    val_curves=None,
    train_accuracy=None,
    val_accuracy=None,
) -> SftTrajectory:
    """Summarize ID dynamics across an ordered series of sft checkpoints.

    Accuracies default to the values recorded in the manifests. The
    train/validation AUC correlation is reported when both series exist
    with at least 3 checkpoints and non-zero variance, else left unset.
    """
    train_curves = list(train_curves)
    if len(train_curves) < 2:
        raise MixedRunsError(f"need at least 2 checkpoints, got {len(train_curves)}")
    all_curves = train_curves + (list(val_curves) if val_curves else [])
    model, dataset = _check_same_run(all_curves, "sft")
    steps = [c.manifest.paradigm.value for c in train_curves]
    if steps != sorted(steps) or len(set(steps)) != len(steps):
        raise MixedRunsError(f"checkpoint steps must be strictly increasing, got {steps}")
    train_auc = [normalized_auc(c).normalized_auc for c in train_curves]
    val_auc = None
    correlation = None
    val_decreases = None
    if val_curves:
        val_steps = [c.manifest.paradigm.value for c in val_curves]
        if val_steps != steps:
            raise MixedRunsError(f"validation steps {val_steps} do not match train steps {steps}")
        val_auc = [normalized_auc(c).normalized_auc for c in val_curves]
        val_decreases = _decrease_positions(val_auc)
        try:
            correlation = pearson(train_auc, val_auc)
        except DegenerateSeriesError:
            correlation = None
    if train_accuracy is None:
        acc = [c.manifest.accuracy for c in train_curves]
        train_accuracy = [float(a) for a in acc] if all(a is not None for a in acc) else None
    if val_accuracy is None and val_curves:
        acc = [c.manifest.accuracy for c in val_curves]
        val_accuracy = [float(a) for a in acc] if all(a is not None for a in acc) else None
    return SftTrajectory(
        model_name=model,
        dataset_name=dataset,
        steps=steps,
        train_auc=train_auc,
        val_auc=val_auc,
        auc_correlation=correlation,
        train_decrease_steps=_decrease_positions(train_auc),
        val_decrease_steps=val_decreases,
        train_accuracy=train_accuracy,
        val_accuracy=val_accuracy,
    )


@dataclass
class ShotSweepReport:
    """Peak-selection summary over an ordered k-shot sweep."""

    model_name: str
    dataset_name: str
    ks: list[int]
    auc: list[float]
    accuracy: list[float] | None
    k_peak_auc: int
    k_peak_acc: int | None
    agreement: bool | None
    near_peak_threshold: float

    def to_dict(self) -> dict:
        return {
            "model_name": self.model_name,
            "dataset_name": self.dataset_name,
            "ks": self.ks,
            "auc": self.auc,
            "accuracy": self.accuracy,
            "k_peak_auc": self.k_peak_auc,
            "k_peak_acc": self.k_peak_acc,
            "agreement": self.agreement,
            "near_peak_threshold": self.near_peak_threshold,
        }


def sweep_from_values(
    ks,
    aucs,
    accuracies=None,
    near_peak_threshold: float = 0.95,
    model_name: str = "",
    dataset_name: str = "",
) -> ShotSweepReport:
    """Peak-k selection over parallel (k, AUC[, accuracy]) series.

    k_peak_auc is the smallest k attaining the maximum AUC (likewise for
    accuracy); agreement holds when accuracy at k_peak_auc reaches
    ``near_peak_threshold`` times the maximum accuracy.
    """
    ks = [int(k) for k in ks]
    aucs = [float(a) for a in aucs]
    if len(ks) != len(aucs) or not ks:
        raise MixedRunsError("ks and AUC series must be equally long and non-empty")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise MixedRunsError(f"k values must be strictly increasing, got {ks}")
    k_peak_auc = ks[int(np.argmax(aucs))]  # argmax returns the first maximum
    k_peak_acc = None
    agreement = None
    if accuracies is not None:
        accuracies = [float(a) for a in accuracies]
        if len(accuracies) != len(ks):
            raise MixedRunsError("accuracy series length does not match k values")
        k_peak_acc = ks[int(np.argmax(accuracies))]
        acc_at_auc_peak = accuracies[ks.index(k_peak_auc)]
        agreement = acc_at_auc_peak >= near_peak_threshold * max(accuracies)
    return ShotSweepReport(
        model_name=model_name,
        dataset_name=dataset_name,
        ks=ks,
        auc=aucs,
        accuracy=accuracies,
        k_peak_auc=k_peak_auc,
        k_peak_acc=k_peak_acc,
        agreement=agreement,
        near_peak_threshold=near_peak_threshold,
    )


def shot_sweep(curves, accuracies=None, near_peak_threshold: float = 0.95) -> ShotSweepReport:
    """Summarize an ICL shot sweep from curves ordered by k.

    Accuracies default to the manifests' recorded values when every curve
    carries one.
    """
    curves = list(curves)
    if not curves:
        raise EmptyInputError("no curves given")
    model, dataset = _check_same_run(curves, "icl")
    ks = [c.manifest.paradigm.value for c in curves]
    aucs = [normalized_auc(c).normalized_auc for c in curves]
    if accuracies is None:
        acc = [c.manifest.accuracy for c in curves]
        accuracies = [float(a) for a in acc] if all(a is not None for a in acc) else None
    return sweep_from_values(
        ks,
        aucs,
        accuracies,
        near_peak_threshold=near_peak_threshold,
        model_name=model,
        dataset_name=dataset,
    )


def five_number_summary(values) -> dict:
    """Min, quartiles, median, max with median-exclusive quartiles."""
    vals = sorted(float(v) for v in values)
    if not vals:
        raise EmptyInputError("no values to summarize")

    def median(seq):
        m = len(seq) // 2
        return seq[m] if len(seq) % 2 else 0.5 * (seq[m - 1] + seq[m])

    half = len(vals) // 2
    lower = vals[:half]
    upper = vals[-half:] if half else []
    return {
        "min": vals[0],
        "q1": median(lower) if lower else vals[0],
        "median": median(vals),
        "q3": median(upper) if upper else vals[-1],
        "max": vals[-1],
    }


def _paradigm_sort_key(p: Paradigm) -> tuple[int, int]:
    return (0 if p.kind == "icl" else 1, p.value)


@dataclass
class ComparisonReport:
    """Pairwise AUC differences and per-paradigm distributions across runs."""

    paradigms: list[str]
    diff_matrix: list[list[float]]
    pair_counts: list[list[int]]
    distributions: dict[str, dict]

    def to_dict(self) -> dict:
        return {
            "paradigms": self.paradigms,
            "diff_matrix": self.diff_matrix,
            "pair_counts": self.pair_counts,
            "distributions": self.distributions,
        }


def compare_paradigms(summaries) -> ComparisonReport:
    """Compare paradigms by mean AUC difference over shared (model, dataset) cells.

    Entry (a, b) of the difference matrix is the mean of AUC_a - AUC_b over
    every (model, dataset) pair present for both paradigms; missing cells
    are excluded pairwise and the per-pair cell counts are reported. The
    matrix is exactly antisymmetric with a zero diagonal.
    """
    summaries = list(summaries)
    if not summaries:
        raise EmptyInputError("no AUC summaries given")
    paradigms = sorted({s.paradigm for s in summaries}, key=_paradigm_sort_key)
    labels = [p.label for p in paradigms]
    cells: dict[Paradigm, dict[tuple[str, str], float]] = {p: {} for p in paradigms}
    values: dict[Paradigm, list[float]] = {p: [] for p in paradigms}
    for s in summaries:
        cells[s.paradigm][(s.model_name, s.dataset_name)] = s.normalized_auc
        values[s.paradigm].append(s.normalized_auc)
    n = len(paradigms)
    diff = [[0.0] * n for _ in range(n)]
    counts = [[0] * n for _ in range(n)]
    for i in range(n):
        counts[i][i] = len(cells[paradigms[i]])
        for j in range(i + 1, n):
            shared = sorted(set(cells[paradigms[i]]) & set(cells[paradigms[j]]))
            counts[i][j] = counts[j][i] = len(shared)
            if shared:
                mean = math.fsum(cells[paradigms[i]][c] - cells[paradigms[j]][c] for c in shared) / len(shared)
                diff[i][j] = mean
                diff[j][i] = -mean
    distributions = {
        p.label: {"values": sorted(values[p]), **five_number_summary(values[p])} for p in paradigms
    }
    return ComparisonReport(
        paradigms=labels,
        diff_matrix=diff,
        pair_counts=counts,
        distributions=distributions,
    )


def comparison_csv_rows(summaries) -> list[tuple[str, str, str, float]]:
    """Flat (paradigm, model, dataset, AUC) rows for external plotting."""
    rows = [
        (s.paradigm.label, s.model_name, s.dataset_name, s.normalized_auc)
        for s in sorted(
            summaries,
            key=lambda s: (_paradigm_sort_key(s.paradigm), s.model_name, s.dataset_name),
        )
    ]
    if not rows:
        raise EmptyInputError("no AUC summaries given")
    return rows
