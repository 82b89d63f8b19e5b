"""Model loading, per-layer last-token state extraction, and accuracy scoring."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .container import write_idt1, write_manifest
from .errors import LabelCollisionError, ModelLoadError
from .prompts import PromptSpec, build_prompts


class ModelBundle:
    """A loaded causal LM plus tokenizer, exposing final-position tensors.

    Inference runs on CPU in float32 with the model in eval mode, so
    repeated runs over identical prompts (and identical batching) produce
    bitwise-identical states. Prompts are right-padded; the causal mask
    already ignores positions after a sequence's final real token, so
    batching does not change its state beyond float reassociation.
    """

    def __init__(self, model, tokenizer):
        self.model = model.eval()
        self.tokenizer = tokenizer
        self.n_layers = int(model.config.num_hidden_layers)
        self.hidden_size = int(model.config.hidden_size)

    def _encode(self, batch):
        return self.tokenizer(batch, return_tensors="pt", padding=True)

    @torch.no_grad()
    def hidden_states(self, prompts, batch_size: int = 16) -> list[np.ndarray]:
        """Final-position states per layer: n_layers + 1 arrays of shape (N, D)."""
        if not prompts:
            raise ValueError("no prompts given")
        per_layer = [[] for _ in range(self.n_layers + 1)]
        for lo in range(0, len(prompts), batch_size):
            batch = prompts[lo : lo + batch_size]
            enc = self._encode(batch)
            out = self.model(**enc, output_hidden_states=True)
            final = enc["attention_mask"].sum(dim=1) - 1
            rows = torch.arange(len(batch))
            for layer, states in enumerate(out.hidden_states):
                per_layer[layer].append(states[rows, final].to(torch.float32).numpy())
        return [np.concatenate(chunks, axis=0) for chunks in per_layer]

    @torch.no_grad()
    def final_logits(self, prompts, batch_size: int = 16) -> np.ndarray:
        """Next-token logits at each prompt's final position, shape (N, vocab)."""
        if not prompts:
            raise ValueError("no prompts given")
        outputs = []
        for lo in range(0, len(prompts), batch_size):
            batch = prompts[lo : lo + batch_size]
            enc = self._encode(batch)
            out = self.model(**enc)
            final = enc["attention_mask"].sum(dim=1) - 1
            outputs.append(out.logits[torch.arange(len(batch)), final].to(torch.float32).numpy())
        return np.concatenate(outputs, axis=0)

    def label_first_token_ids(self, labels) -> list[int]:
        ids = []
        for label in labels:
            token_ids = self.tokenizer(label, add_special_tokens=False)["input_ids"]
            if not token_ids:
                raise LabelCollisionError(f"label {label!r} tokenizes to nothing")
            ids.append(int(token_ids[0]))
        seen = {}
        for label, tid in zip(labels, ids):
            if tid in seen:
                raise LabelCollisionError(
                    f"labels {seen[tid]!r} and {label!r} share first token id {tid}"
                )
            seen[tid] = label
        return ids


def load_model(model_id: str) -> ModelBundle:
    """Load a causal LM and tokenizer from a hub id or local directory."""
    from transformers import AutoModelForCausalLM, AutoTokenizer

    try:
        model = AutoModelForCausalLM.from_pretrained(model_id)
        tokenizer = AutoTokenizer.from_pretrained(model_id)
    except Exception as exc:
        raise ModelLoadError(f"cannot load model {model_id!r}: {exc}") from exc
    if tokenizer.pad_token is None:
        tokenizer.pad_token = tokenizer.eos_token
    tokenizer.padding_side = "right"
    return ModelBundle(model, tokenizer)


def _as_bundle(model) -> ModelBundle:
    # duck-typed so tests can drive the scorer with stub models
    if hasattr(model, "final_logits") and hasattr(model, "hidden_states"):
        return model
    return load_model(model)


@dataclass
class ExtractionResult:
    manifest_path: Path
    layer_files: list[Path]
    n_prompts: int
    accuracy: float | None


def extract_states(
    model,
    prompts: list[str],
    out_dir,
    *,
    model_name: str,
    dataset_name: str,
    paradigm: dict,
    accuracy: float | None = None,
    seed: int | None = None,
    batch_size: int = 16,
    metadata: dict | None = None,
) -> ExtractionResult:
    """Write one N x D IDT1 file per layer (embedding output first) plus a manifest."""
    bundle = _as_bundle(model)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        layers = bundle.hidden_states(prompts, batch_size=batch_size)
    except torch.cuda.OutOfMemoryError as exc:  # pragma: no cover
        raise RuntimeError(
            f"out of memory at batch_size={batch_size}; rerun with a smaller --batch-size"
        ) from exc
    names = []
    paths = []
    for index, matrix in enumerate(layers):
        name = f"layer_{index:02d}.idt"
        write_idt1(matrix, out_dir / name)
        names.append(name)
        paths.append(out_dir / name)
    manifest_path = out_dir / "manifest.json"
    write_manifest(
        manifest_path,
        model_name=model_name,
        dataset_name=dataset_name,
        paradigm=paradigm,
        layer_files=names,
        accuracy=accuracy,
        seed=seed,
        metadata=metadata,
    )
    return ExtractionResult(
        manifest_path=manifest_path,
        layer_files=paths,
        n_prompts=len(prompts),
        accuracy=accuracy,
    )


def score_accuracy(model, prompts, answer_labels, gold, batch_size: int = 16) -> float:
    """Fraction of prompts whose top label (by first-token logit) is the gold one.

    A tie for the top logit counts as incorrect.
    """
    bundle = _as_bundle(model)
    if len(prompts) != len(gold):
        raise ValueError("prompts and gold labels must be equally long")
    label_ids = bundle.label_first_token_ids(answer_labels)
    logits = bundle.final_logits(prompts, batch_size=batch_size)
    label_logits = logits[:, label_ids]  # (N, n_labels)
    correct = 0
    for row, gold_label in zip(label_logits, gold):
        top = row.max()
        if (row == top).sum() > 1:
            continue  # ambiguous prediction
        if answer_labels[int(row.argmax())] == gold_label:
            correct += 1
    return correct / len(prompts)


def run_extraction(
    model,
    template: str,
    demo_pool,
    eval_items,
    out_dir,
    *,
    model_name: str,
    dataset_name: str,
    k: int = 0,
    sft_step: int | None = None,
    unique_across_prompts: bool = False,
    seed: int = 0,
    batch_size: int = 16,
    answer_labels=None,
    metadata: dict | None = None,
) -> ExtractionResult:
    """Build prompts for the eval split, score accuracy, and extract states.

    The run is tagged sft(step) when ``sft_step`` is given (the model id is
    then expected to point at a fine-tuned checkpoint), icl(k) otherwise.
    """
    bundle = _as_bundle(model)
    spec = PromptSpec(
        template=template,
        k=k,
        demo_pool=list(demo_pool),
        unique_across_prompts=unique_across_prompts,
        seed=seed,
    )
    prompts = build_prompts(spec, [inp for inp, _ in eval_items])
    accuracy = None
    if answer_labels:
        gold = [out for _, out in eval_items]
        accuracy = score_accuracy(bundle, prompts, answer_labels, gold, batch_size=batch_size)
    paradigm = {"type": "sft", "step": sft_step} if sft_step is not None else {"type": "icl", "k": k}
    return extract_states(
        bundle,
        prompts,
        out_dir,
        model_name=model_name,
        dataset_name=dataset_name,
        paradigm=paradigm,
        accuracy=accuracy,
        seed=seed,
        batch_size=batch_size,
        metadata=metadata,
    )
