"""Point-cloud and run-manifest IO.

Clouds travel in the IDT1 container:

    bytes 0-3   magic "IDT1"
    byte  4     dtype code (0x00 = float32 little-endian)
    byte  5     rank (always 2)
    bytes 6-21  two u64 little-endian dimensions: N, D
    rest        row-major payload of N*D float32 values

No padding, no footer. Manifests are JSON files describing one run; layer
file paths are resolved relative to the manifest's directory.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, InvalidCloudError, MissingLayerFileError
from .validation import check_matrix

MAGIC = b"IDT1"
DTYPE_FLOAT32 = 0x00
RANK = 2
_HEADER = struct.Struct("<4sBBQQ")


@dataclass
class PointCloud:
    """An N x D matrix of representation vectors, one row per sequence."""

    data: np.ndarray
    source: str | None = None

    def __post_init__(self):
        self.data = check_matrix(self.data)

    @property
    def n_points(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class Paradigm:
    """A labeled learning condition: icl with k shots, or sft at a step count."""

    kind: str  # "icl" or "sft"
    value: int  # shots for icl, gradient-update count for sft

    def __post_init__(self):
        if self.kind not in ("icl", "sft"):
            raise FormatError(f"unknown paradigm kind: {self.kind!r}")
        if not isinstance(self.value, int) or isinstance(self.value, bool) or self.value < 0:
            raise FormatError(f"paradigm value must be a non-negative integer, got {self.value!r}")

    @property
    def label(self) -> str:
        return f"{self.kind}-{self.value}"

    def to_dict(self) -> dict:
        key = "k" if self.kind == "icl" else "step"
        return {"type": self.kind, key: self.value}


@dataclass
class RunManifest:
    """Describes one (model, dataset, paradigm) run and its per-layer files."""

    model_name: str
    dataset_name: str
    paradigm: Paradigm
    layer_files: list[Path]
    accuracy: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if not self.layer_files:
            raise FormatError("layer_files must be non-empty")
        self.layer_files = [Path(p) for p in self.layer_files]

    @property
    def n_layers(self) -> int:
        return len(self.layer_files)

    def run_key(self) -> tuple[str, str]:
        return (self.model_name, self.dataset_name)

    def to_dict(self) -> dict:
        doc = {
            "model_name": self.model_name,
            "dataset_name": self.dataset_name,
            "paradigm": self.paradigm.to_dict(),
            "layer_files": [p.as_posix() for p in self.layer_files],
        }
        if self.accuracy is not None:
            doc["accuracy"] = self.accuracy
        if self.seed is not None:
            doc["seed"] = self.seed
        return doc


def write_cloud(cloud: PointCloud | np.ndarray, path) -> None:
    """Write a cloud to ``path`` in the IDT1 container.

    Byte-reproducible for identical input. Raises InvalidCloudError if the
    cloud is invalid or does not survive the cast to float32.
    """
    data = cloud.data if isinstance(cloud, PointCloud) else check_matrix(cloud)
    with np.errstate(over="ignore"):
        payload = np.ascontiguousarray(data, dtype="<f4")
    if not np.isfinite(payload).all():
        raise InvalidCloudError("cloud overflows float32 storage")
    n, d = payload.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, DTYPE_FLOAT32, RANK, n, d))
        fh.write(payload.tobytes())


def read_cloud(path) -> PointCloud:
    """Read an IDT1 container back into a PointCloud.

    Any malformed byte stream (bad magic, dtype, rank, size mismatch, or a
    payload violating cloud invariants) raises FormatError; no partial cloud
    is ever returned.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, dtype, rank, n, d = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if dtype != DTYPE_FLOAT32:
        raise FormatError(f"{path}: unsupported dtype code {dtype:#04x}")
    if rank != RANK:
        raise FormatError(f"{path}: unsupported rank {rank}")
    expected = _HEADER.size + n * d * 4
    if len(raw) != expected:
        raise FormatError(f"{path}: payload size mismatch (expected {expected} bytes, got {len(raw)})")
    data = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(n, d).copy()
    try:
        return PointCloud(data, source=str(path))
    except InvalidCloudError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def _parse_paradigm(obj) -> Paradigm:
    if not isinstance(obj, dict) or "type" not in obj:
        raise FormatError("paradigm must be an object with a 'type' key")
    kind = obj["type"]
    if kind == "icl":
        if "k" not in obj:
            raise FormatError("icl paradigm requires 'k'")
        return Paradigm("icl", _require_int(obj["k"], "paradigm.k"))
    if kind == "sft":
        if "step" not in obj:
            raise FormatError("sft paradigm requires 'step'")
        return Paradigm("sft", _require_int(obj["step"], "paradigm.step"))
    raise FormatError(f"unknown paradigm type: {kind!r}")


def _require_int(value, name) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"{name} must be an integer, got {value!r}")
    return value


def read_manifest(path) -> RunManifest:
    """Read and validate a run manifest, resolving layer files next to it."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError(f"{path}: manifest must be a JSON object")
    for key in ("model_name", "dataset_name", "paradigm", "layer_files"):
        if key not in doc:
            raise FormatError(f"{path}: missing required key {key!r}")
    if not isinstance(doc["model_name"], str) or not isinstance(doc["dataset_name"], str):
        raise FormatError(f"{path}: model_name and dataset_name must be strings")
    paradigm = _parse_paradigm(doc["paradigm"])
    files = doc["layer_files"]
    if not isinstance(files, list) or not files or not all(isinstance(f, str) for f in files):
        raise FormatError(f"{path}: layer_files must be a non-empty array of strings")
    accuracy = doc.get("accuracy")
    if accuracy is not None:
        if not isinstance(accuracy, (int, float)) or isinstance(accuracy, bool) or not 0.0 <= accuracy <= 1.0:
            raise FormatError(f"{path}: accuracy must be a number in [0, 1]")
        accuracy = float(accuracy)
    seed = doc.get("seed")
    if seed is not None:
        seed = _require_int(seed, "seed")
        if seed < 0:
            raise FormatError(f"{path}: seed must be non-negative")
    base = path.parent
    resolved = []
    for f in files:
        p = Path(f)
        if not p.is_absolute():
            p = base / p
        if not p.is_file():
            raise MissingLayerFileError(f"{path}: layer file not found: {f}")
        resolved.append(p)
    return RunManifest(
        model_name=doc["model_name"],
        dataset_name=doc["dataset_name"],
        paradigm=paradigm,
        layer_files=resolved,
        accuracy=accuracy,
        seed=seed,
    )


def write_manifest(manifest: RunManifest, path) -> None:
    """Write a manifest as JSON (layer paths emitted as given)."""
    Path(path).write_text(json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n")
