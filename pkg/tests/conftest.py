import numpy as np
import pytest

from idcurve import IDCurve, IDEstimate, ManifoldSpec, Paradigm, RunManifest, generate


def brute_force_knn(X, k):
    """O(N^2) oracle: full pairwise distances, stable-sorted per row."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    dists = np.empty((n, k), dtype=np.float64)
    idxs = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        d = np.sqrt(((X - X[i]) ** 2).sum(axis=1))
        d[i] = np.inf
        order = np.argsort(d, kind="stable")[:k]
        dists[i] = d[order]
        idxs[i] = order
    return dists, idxs


def make_curve(values, kind="icl", value=0, model="m", dataset="d", accuracy=None):
    """Build an IDCurve carrying the given per-layer values."""
    manifest = RunManifest(
        model_name=model,
        dataset_name=dataset,
        paradigm=Paradigm(kind, value),
        layer_files=[f"layer_{i:02d}.idt" for i in range(len(values))],
        accuracy=accuracy,
    )
    layers = [
        (i, IDEstimate(value=float(v), estimator="twonn", n_used=5000))
        for i, v in enumerate(values)
    ]
    return IDCurve(layer_ids=layers, manifest=manifest)


@pytest.fixture(scope="session")
def segment_cloud():
    # 1-D segment embedded in 10-D; true ID = 1
    return generate(ManifoldSpec("line_segment", 1, 10, 5000, seed=1))


@pytest.fixture(scope="session")
def square_cloud():
    # uniform unit square rotated into 50-D; true ID = 2
    return generate(ManifoldSpec("hypercube", 2, 50, 5000, seed=2))


@pytest.fixture(scope="session")
def sphere_cloud():
    # surface of S^2 rotated into 20-D; true ID = 2
    return generate(ManifoldSpec("hypersphere", 2, 20, 5000, seed=3))


@pytest.fixture(scope="session")
def cube5_cloud():
    # uniform [0,1]^5 rotated into 100-D; true ID = 5
    return generate(ManifoldSpec("hypercube", 5, 100, 5000, seed=4))
