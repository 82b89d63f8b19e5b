"""Intrinsic dimension estimation for layered representation point clouds."""

from .analysis import (
    AUCSummary,
    ComparisonReport,
    IDCurve,
    ShotSweepReport,
    SftTrajectory,
    build_curve,
    compare_paradigms,
    comparison_csv_rows,
    five_number_summary,
    normalized_auc,
    normalized_auc_values,
    pearson,
    sft_trajectory,
    shot_sweep,
    sweep_from_values,
)
from .errors import (
    DegenerateGeometryError,
    DegenerateSeriesError,
    EmptyInputError,
    FormatError,
    IdCurveError,
    InvalidCloudError,
    InvalidCurveError,
    InvalidSpecError,
    KTooLargeError,
    LayerError,
    MissingLayerFileError,
    MixedRunsError,
    StabilityError,
    TooFewPointsError,
)
from .estimators import (
    IDEstimate,
    LevinaBickelMLE,
    StabilityReport,
    TwoNN,
    estimate,
    mle,
    stability,
    twonn,
)
from .neighbors import NeighborTable, dedup, knn
from .synthetic import ManifoldSpec, generate, orthogonal_map
from .tensor_io import (
    Paradigm,
    PointCloud,
    RunManifest,
    read_cloud,
    read_manifest,
    write_cloud,
    write_manifest,
)

__version__ = "0.1.0"

__all__ = [
    "AUCSummary",
    "ComparisonReport",
    "DegenerateGeometryError",
    "DegenerateSeriesError",
    "EmptyInputError",
    "FormatError",
    "IDCurve",
    "IDEstimate",
    "IdCurveError",
    "InvalidCloudError",
    "InvalidCurveError",
    "InvalidSpecError",
    "KTooLargeError",
    "LayerError",
    "LevinaBickelMLE",
    "ManifoldSpec",
    "MissingLayerFileError",
    "MixedRunsError",
    "NeighborTable",
    "Paradigm",
    "PointCloud",
    "RunManifest",
    "ShotSweepReport",
    "SftTrajectory",
    "StabilityError",
    "StabilityReport",
    "TooFewPointsError",
    "TwoNN",
    "build_curve",
    "compare_paradigms",
    "comparison_csv_rows",
    "dedup",
    "estimate",
    "five_number_summary",
    "generate",
    "knn",
    "mle",
    "normalized_auc",
    "normalized_auc_values",
    "orthogonal_map",
    "pearson",
    "read_cloud",
    "read_manifest",
    "sft_trajectory",
    "shot_sweep",
    "stability",
    "sweep_from_values",
    "twonn",
    "write_cloud",
    "write_manifest",
]
