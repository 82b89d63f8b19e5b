import json
import struct

import numpy as np
import pytest

from idextract import (
    DEMO_TEMPLATE,
    LabelCollisionError,
    ModelLoadError,
    demo_task,
    extract_states,
    load_model,
    run_extraction,
    score_accuracy,
)
from idextract.prompts import PromptSpec, build_prompts

HEADER = struct.Struct("<4sBBQQ")


def read_idt1(path):
    raw = path.read_bytes()
    magic, dtype, rank, n, d = HEADER.unpack_from(raw)
    assert magic == b"IDT1" and dtype == 0 and rank == 2
    assert len(raw) == HEADER.size + 4 * n * d
    return np.frombuffer(raw, dtype="<f4", offset=HEADER.size).reshape(n, d)


def demo_prompts(n, k=0, seed=0):
    items = demo_task(200 + n, seed=11)
    pool, eval_items = items[:200], items[200 : 200 + n]
    spec = PromptSpec(template=DEMO_TEMPLATE, k=k, demo_pool=pool, seed=seed)
    return build_prompts(spec, [w for w, _ in eval_items]), eval_items


class TestExtractStates:
    def test_shape_contract(self, bundle, tmp_path):
        prompts, _ = demo_prompts(50)
        result = extract_states(
            bundle, prompts, tmp_path / "run",
            model_name="tiny", dataset_name="demo", paradigm={"type": "icl", "k": 0},
        )
        assert len(result.layer_files) == bundle.n_layers + 1 == 5
        for path in result.layer_files:
            matrix = read_idt1(path)
            assert matrix.shape == (50, bundle.hidden_size) == (50, 64)
            assert np.isfinite(matrix).all()
        manifest = json.loads(result.manifest_path.read_text())
        assert manifest["layer_files"] == [f"layer_{i:02d}.idt" for i in range(5)]
        assert manifest["paradigm"] == {"type": "icl", "k": 0}

    def test_empty_prompts_rejected(self, bundle, tmp_path):
        with pytest.raises(ValueError):
            extract_states(bundle, [], tmp_path, model_name="m", dataset_name="d",
                           paradigm={"type": "icl", "k": 0})

    def test_rerun_is_bitwise_identical(self, bundle, tmp_path):
        prompts, _ = demo_prompts(24)
        kw = dict(model_name="tiny", dataset_name="demo", paradigm={"type": "icl", "k": 0})
        a = extract_states(bundle, prompts, tmp_path / "a", **kw)
        b = extract_states(bundle, prompts, tmp_path / "b", **kw)
        for pa, pb in zip(a.layer_files, b.layer_files):
            assert pa.read_bytes() == pb.read_bytes()
        assert a.manifest_path.read_text() == b.manifest_path.read_text()

    def test_batching_does_not_move_final_states(self, bundle):
        prompts, _ = demo_prompts(17)
        batched = bundle.hidden_states(prompts, batch_size=8)
        single = bundle.hidden_states(prompts, batch_size=1)
        for a, b in zip(batched, single):
            assert np.allclose(a, b, atol=1e-5)


class StubBundle:
    """Controlled logits over a 3-token vocabulary; labels map to ids 0..2."""

    def __init__(self, rows):
        self.rows = np.asarray(rows, dtype=np.float32)

    def label_first_token_ids(self, labels):
        return list(range(len(labels)))

    def final_logits(self, prompts, batch_size=16):
        assert len(prompts) == len(self.rows)
        return self.rows

    def hidden_states(self, prompts, batch_size=16):  # pragma: no cover
        raise NotImplementedError


class TestScoreAccuracy:
    labels = ["even", "odd"]

    def test_all_correct(self):
        rows = [[5.0, 1.0, 0.0], [0.5, 3.0, 0.0], [9.0, 2.0, 0.0]]
        gold = ["even", "odd", "even"]
        assert score_accuracy(StubBundle(rows), ["p"] * 3, self.labels, gold) == 1.0

    def test_all_wrong(self):
        rows = [[1.0, 5.0, 0.0], [3.0, 0.5, 0.0]]
        gold = ["even", "odd"]
        assert score_accuracy(StubBundle(rows), ["p"] * 2, self.labels, gold) == 0.0

    def test_half(self):
        rows = [[5.0, 1.0, 0.0], [5.0, 1.0, 0.0], [1.0, 5.0, 0.0], [1.0, 5.0, 0.0]]
        gold = ["even", "odd", "odd", "even"]
        assert score_accuracy(StubBundle(rows), ["p"] * 4, self.labels, gold) == 0.5

    def test_tie_counts_as_incorrect(self):
        rows = [[2.0, 2.0, 0.0]]
        assert score_accuracy(StubBundle(rows), ["p"], self.labels, ["even"]) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            score_accuracy(StubBundle([[1, 0, 0]]), ["p"], self.labels, ["even", "odd"])

    def test_shared_first_token_collides(self, bundle):
        # byte-level tokenizer: both labels start with the byte "y"
        with pytest.raises(LabelCollisionError):
            bundle.label_first_token_ids(["yes", "yellow"])

    def test_real_model_scores_in_unit_interval(self, bundle):
        prompts, eval_items = demo_prompts(20)
        gold = [label for _, label in eval_items]
        acc = score_accuracy(bundle, prompts, ["even", "odd"], gold)
        assert 0.0 <= acc <= 1.0


class TestRunExtraction:
    def test_manifest_carries_accuracy_and_seed(self, bundle, tmp_path):
        items = demo_task(80, seed=21)
        result = run_extraction(
            bundle, DEMO_TEMPLATE, items[:60], items[60:], tmp_path / "run",
            model_name="tiny", dataset_name="demo", k=2, seed=7,
            answer_labels=["even", "odd"],
        )
        doc = json.loads(result.manifest_path.read_text())
        assert doc["paradigm"] == {"type": "icl", "k": 2}
        assert 0.0 <= doc["accuracy"] <= 1.0
        assert doc["seed"] == 7
        assert result.n_prompts == 20

    def test_sft_tagging(self, bundle, tmp_path):
        items = demo_task(30, seed=22)
        result = run_extraction(
            bundle, DEMO_TEMPLATE, items[:20], items[20:], tmp_path / "run",
            model_name="tiny-ckpt-124", dataset_name="demo", sft_step=124,
            metadata={"note": "lora r=64 alpha=16 dropout=0.1 lr=1e-4 batch=16"},
        )
        doc = json.loads(result.manifest_path.read_text())
        assert doc["paradigm"] == {"type": "sft", "step": 124}
        assert "note" in doc["metadata"]


def test_load_model_failure():
    with pytest.raises(ModelLoadError):
        load_model("/nonexistent/model/dir")
