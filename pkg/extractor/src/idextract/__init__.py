"""Per-layer last-token hidden-state extraction for causal language models."""

from .container import write_idt1, write_manifest
from .datasets import DEMO_LABELS, DEMO_TEMPLATE, demo_task, label_set, load_csv_dataset, split_pool_eval
from .errors import ExtractError, LabelCollisionError, ModelLoadError, PoolExhaustedError
from .prompts import PromptSpec, build_prompts, render_example
from .runner import ExtractionResult, ModelBundle, extract_states, load_model, run_extraction, score_accuracy

__version__ = "0.1.0"

__all__ = [
    "DEMO_LABELS",
    "DEMO_TEMPLATE",
    "ExtractError",
    "ExtractionResult",
    "LabelCollisionError",
    "ModelBundle",
    "ModelLoadError",
    "PoolExhaustedError",
    "PromptSpec",
    "build_prompts",
    "demo_task",
    "extract_states",
    "label_set",
    "load_csv_dataset",
    "load_model",
    "render_example",
    "run_extraction",
    "score_accuracy",
    "split_pool_eval",
    "write_idt1",
    "write_manifest",
]
