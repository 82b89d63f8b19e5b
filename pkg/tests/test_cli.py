import json

import numpy as np
import pytest

from idcurve import ManifoldSpec, Paradigm, RunManifest, generate, write_cloud, write_manifest
from idcurve.cli import run


def invoke(capsys, *args):
    code = run(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def square_idt(tmp_path_factory, square_cloud):
    path = tmp_path_factory.mktemp("clouds") / "square.idt"
    write_cloud(square_cloud, path)
    return path


def write_run(root, name, paradigm, true_dims, model="m1", dataset="d1", accuracy=None, n=250):
    """A run whose layers are tiny synthetic clouds of the given true dims."""
    rdir = root / name
    rdir.mkdir(parents=True, exist_ok=True)
    files = []
    for i, d in enumerate(true_dims):
        fname = f"layer_{i:02d}.idt"
        cloud = generate(ManifoldSpec("hypercube", d, 8, n, seed=100 + 7 * i + d))
        write_cloud(cloud, rdir / fname)
        files.append(fname)
    manifest = RunManifest(
        model_name=model, dataset_name=dataset, paradigm=paradigm,
        layer_files=files, accuracy=accuracy,
    )
    mpath = rdir / "run.json"
    write_manifest(manifest, mpath)
    return mpath


@pytest.fixture(scope="module")
def sweep_curves(tmp_path_factory):
    """Curve JSONs for an icl sweep with AUC peaking at k=5."""
    root = tmp_path_factory.mktemp("sweep")
    paths = []
    for k, dims, acc in [(0, (1, 1), 0.30), (5, (3, 3), 0.50), (10, (2, 2), 0.52)]:
        mpath = write_run(root, f"icl{k}", Paradigm("icl", k), dims, accuracy=acc)
        out = root / f"curve_k{k}.json"
        assert run(["curve", "--manifest", str(mpath), "--output", str(out)]) == 0
        paths.append(out)
    return paths


class TestAuc:
    def test_bare_list_prints_value(self, tmp_path, capsys):
        p = tmp_path / "curve.json"
        p.write_text("[1, 2, 3, 4]")
        code, out, _ = invoke(capsys, "auc", "--curve", str(p))
        assert code == 0
        assert out.strip() == "1.875"

    def test_curve_document(self, sweep_curves, tmp_path, capsys):
        out_path = tmp_path / "auc.json"
        code, out, _ = invoke(capsys, "auc", "--curve", str(sweep_curves[0]), "--output", str(out_path))
        assert code == 0
        doc = json.loads(out_path.read_text())
        assert doc["paradigm"] == "icl-0"
        assert float(out.strip()) == doc["normalized_auc"]

    def test_invalid_json_exit1(self, tmp_path, capsys):
        p = tmp_path / "curve.json"
        p.write_text("{nope")
        code, _, err = invoke(capsys, "auc", "--curve", str(p))
        assert code == 1
        assert "error" in err


class TestEstimate:
    def test_twonn_band_on_2d_cloud(self, square_idt, tmp_path, capsys):
        report = tmp_path / "est.json"
        code, out, _ = invoke(capsys, "estimate", "--input", str(square_idt),
                              "--estimator", "twonn", "--output", str(report))
        assert code == 0
        value = float(out.strip())
        assert 1.8 <= value <= 2.2
        assert json.loads(report.read_text())["value"] == value

    def test_missing_input_exit2(self, tmp_path, capsys):
        code, _, err = invoke(capsys, "estimate", "--input", str(tmp_path / "missing.idt"))
        assert code == 2
        assert "i/o error" in err

    def test_malformed_input_exit1(self, tmp_path, capsys):
        p = tmp_path / "bad.idt"
        p.write_bytes(b"XXXX not a container")
        code, _, err = invoke(capsys, "estimate", "--input", str(p))
        assert code == 1
        assert "error" in err

    def test_unknown_flag_exit1(self, capsys):
        code, _, _ = invoke(capsys, "estimate", "--input", "x.idt", "--frobnicate")
        assert code == 1

    def test_threads_env_fallback(self, square_idt, capsys, monkeypatch):
        monkeypatch.setenv("IDCURVE_THREADS", "3")
        code, out, _ = invoke(capsys, "estimate", "--input", str(square_idt))
        assert code == 0
        monkeypatch.setenv("IDCURVE_THREADS", "1")
        code2, out2, _ = invoke(capsys, "estimate", "--input", str(square_idt))
        assert code2 == 0
        assert out == out2  # estimates independent of thread count


class TestSynth:
    def test_writes_cloud(self, tmp_path, capsys):
        out = tmp_path / "c.idt"
        code, stdout, _ = invoke(
            capsys, "synth", "--kind", "hypercube", "--intrinsic-dim", "2",
            "--ambient-dim", "10", "--n-points", "100", "--seed", "4",
            "--output", str(out),
        )
        assert code == 0
        assert "100x10" in stdout
        from idcurve import read_cloud
        assert read_cloud(out).data.shape == (100, 10)

    def test_invalid_spec_exit1(self, tmp_path, capsys):
        code, _, err = invoke(
            capsys, "synth", "--kind", "swiss_roll", "--intrinsic-dim", "3",
            "--ambient-dim", "10", "--output", str(tmp_path / "c.idt"),
        )
        assert code == 1
        assert "error" in err


class TestCurve:
    def test_builds_curve_json(self, tmp_path, capsys):
        mpath = write_run(tmp_path, "r", Paradigm("icl", 5), (2, 2, 2))
        out = tmp_path / "curve.json"
        code, _, err = invoke(capsys, "curve", "--manifest", str(mpath), "--output", str(out))
        assert code == 0
        doc = json.loads(out.read_text())
        assert len(doc["layers"]) == 3
        assert doc["manifest"]["paradigm"] == {"type": "icl", "k": 5}
        assert "layer 3/3" in err  # progress line

    def test_missing_layer_exit2(self, tmp_path, capsys):
        mpath = write_run(tmp_path, "r", Paradigm("icl", 0), (1, 1))
        doc = json.loads(mpath.read_text())
        doc["layer_files"].append("layer_xx.idt")
        mpath.write_text(json.dumps(doc))
        code, _, err = invoke(capsys, "curve", "--manifest", str(mpath),
                              "--output", str(tmp_path / "c.json"))
        assert code == 2
        assert "i/o error" in err

    def test_corrupt_layer_exit1_with_layer_index(self, tmp_path, capsys):
        mpath = write_run(tmp_path, "r", Paradigm("icl", 0), (1, 1))
        (mpath.parent / "layer_01.idt").write_bytes(b"XXXXgarbage")
        code, _, err = invoke(capsys, "curve", "--manifest", str(mpath),
                              "--output", str(tmp_path / "c.json"))
        assert code == 1
        assert "layer 1" in err

    def test_single_layer_exit1(self, tmp_path, capsys):
        mpath = write_run(tmp_path, "r", Paradigm("icl", 0), (1,))
        code, _, err = invoke(capsys, "curve", "--manifest", str(mpath),
                              "--output", str(tmp_path / "c.json"))
        assert code == 1


class TestShotSweep:
    def test_sweep_report(self, sweep_curves, tmp_path, capsys):
        out = tmp_path / "sweep.json"
        csv_out = tmp_path / "sweep.csv"
        code, stdout, _ = invoke(
            capsys, "shot-sweep", "--curves", *map(str, sweep_curves),
            "--output", str(out), "--csv", str(csv_out),
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["ks"] == [0, 5, 10]
        assert doc["k_peak_auc"] == 5  # d=3 layers dominate
        assert doc["k_peak_acc"] == 10
        assert doc["agreement"] is True  # 0.50 >= 0.95 * 0.52
        lines = csv_out.read_text().splitlines()
        assert lines[0] == "k,normalized_auc,accuracy"
        assert len(lines) == 4


@pytest.fixture(scope="module")
def traj_curves(tmp_path_factory):
    root = tmp_path_factory.mktemp("traj")
    train, val = [], []
    for step, dims in [(62, (1, 1)), (124, (2, 2)), (186, (3, 3))]:
        for split, bucket in (("train", train), ("val", val)):
            mpath = write_run(root, f"{split}{step}", Paradigm("sft", step), dims,
                              dataset="d1", accuracy=0.5)
            out = root / f"{split}_{step}.json"
            assert run(["curve", "--manifest", str(mpath), "--output", str(out)]) == 0
            bucket.append(out)
    return train, val


class TestSftTrajectory:
    def test_trajectory_report(self, traj_curves, tmp_path, capsys):
        train, val = traj_curves
        out = tmp_path / "traj.json"
        code, _, _ = invoke(
            capsys, "sft-trajectory", "--train", *map(str, train),
            "--val", *map(str, val), "--output", str(out),
            "--csv", str(tmp_path / "traj.csv"),
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["steps"] == [62, 124, 186]
        assert doc["train_decrease_steps"] == []
        assert doc["auc_correlation"] is not None
        assert (tmp_path / "traj.csv").read_text().splitlines()[0] == \
            "step,train_auc,val_auc,train_accuracy,val_accuracy"


class TestCompare:
    def test_compare_report_and_csv(self, tmp_path, capsys):
        curves = []
        for model, dataset in (("m1", "d1"), ("m2", "d2")):
            for paradigm, dims in [(Paradigm("icl", 0), (1, 1)), (Paradigm("icl", 5), (3, 3)),
                                   (Paradigm("sft", 62), (2, 2))]:
                name = f"{model}-{dataset}-{paradigm.label}"
                mpath = write_run(tmp_path, name, paradigm, dims, model=model, dataset=dataset)
                out = tmp_path / f"{name}.json"
                assert run(["curve", "--manifest", str(mpath), "--output", str(out)]) == 0
                curves.append(out)
        report = tmp_path / "cmp.json"
        csv_out = tmp_path / "cmp.csv"
        code, _, _ = invoke(capsys, "compare", "--curves", *map(str, curves),
                            "--output", str(report), "--csv", str(csv_out))
        assert code == 0
        doc = json.loads(report.read_text())
        assert doc["paradigms"] == ["icl-0", "icl-5", "sft-62"]
        mat = np.array(doc["diff_matrix"])
        assert np.array_equal(mat, -mat.T)
        i0, i5 = doc["paradigms"].index("icl-0"), doc["paradigms"].index("icl-5")
        assert mat[i5][i0] > 0  # 3-D layers beat 1-D layers
        lines = csv_out.read_text().splitlines()
        assert lines[0] == "paradigm,model,dataset,normalized_auc"
        assert len(lines) == 7


def test_no_subcommand_exit1(capsys):
    assert run([]) == 1
