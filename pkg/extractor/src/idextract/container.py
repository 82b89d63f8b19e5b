"""Writers for the IDT1 layer container and the run-manifest JSON.

IDT1 layout: magic "IDT1", one dtype byte (0x00 = float32 LE), one rank
byte (2), two little-endian u64 dimensions (N, D), then the row-major
float32 payload. Manifest schema: model_name, dataset_name, paradigm
({"type": "icl", "k": int} or {"type": "sft", "step": int}), layer_files,
plus optional accuracy and seed.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

_HEADER = struct.Struct("<4sBBQQ")


def write_idt1(matrix: np.ndarray, path) -> None:
    data = np.ascontiguousarray(matrix, dtype="<f4")
    if data.ndim != 2 or data.shape[0] < 3:
        raise ValueError(f"layer matrix must be 2-D with at least 3 rows, got shape {data.shape}")
    if not np.isfinite(data).all():
        raise ValueError("layer matrix contains NaN or Inf")
    n, d = data.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(b"IDT1", 0x00, 2, n, d))
        fh.write(data.tobytes())


def write_manifest(
    path,
    *,
    model_name: str,
    dataset_name: str,
    paradigm: dict,
    layer_files: list[str],
    accuracy: float | None = None,
    seed: int | None = None,
    metadata: dict | None = None,
) -> None:
    doc = {
        "model_name": model_name,
        "dataset_name": dataset_name,
        "paradigm": paradigm,
        "layer_files": layer_files,
    }
    if accuracy is not None:
        doc["accuracy"] = accuracy
    if seed is not None:
        doc["seed"] = seed
    if metadata:
        doc["metadata"] = metadata
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
