"""Point clouds of known intrinsic dimension for estimator verification.

Latent samples are embedded into the ambient space through a seeded random
orthogonal map plus a random translation, so ambient pairwise distances
equal latent ones (up to rounding) and the true ID is the latent manifold
dimension: d for hypercube/gaussian, 1 for line_segment, d for the surface
of a hypersphere S^d (living in d+1 latent coordinates), 2 for the swiss
roll. Generation is fully determined by the ManifoldSpec, including its
seed (PCG64 via numpy's default_rng).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpecError
from .tensor_io import PointCloud

KINDS = ("hypercube", "hypersphere", "gaussian", "swiss_roll", "line_segment")

_SWISS_T_RANGE = (1.5 * np.pi, 4.5 * np.pi)
_SWISS_HEIGHT = 21.0


@dataclass(frozen=True)
class ManifoldSpec:
    """Recipe for a synthetic cloud with a known true intrinsic dimension."""

    kind: str
    intrinsic_dim: int
    ambient_dim: int
    n_points: int
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpecError(f"unknown manifold kind {self.kind!r}; expected one of {KINDS}")
        if self.intrinsic_dim < 1:
            raise InvalidSpecError(f"intrinsic_dim must be >= 1, got {self.intrinsic_dim}")
        if self.n_points < 10:
            raise InvalidSpecError(f"n_points must be >= 10, got {self.n_points}")
        if self.noise_sigma < 0:
            raise InvalidSpecError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.kind == "swiss_roll" and self.intrinsic_dim != 2:
            raise InvalidSpecError("swiss_roll has intrinsic dimension 2 by definition")
        if self.kind == "line_segment" and self.intrinsic_dim != 1:
            raise InvalidSpecError("line_segment has intrinsic dimension 1 by definition")
        if self.ambient_dim < self.latent_dim:
            raise InvalidSpecError(
                f"{self.kind} with d={self.intrinsic_dim} needs ambient_dim >= {self.latent_dim}, "
                f"got {self.ambient_dim}"
            )

    @property
    def latent_dim(self) -> int:
        if self.kind == "hypersphere":
            return self.intrinsic_dim + 1
        if self.kind == "swiss_roll":
            return 3
        return self.intrinsic_dim

    @property
    def true_dim(self) -> int:
        return self.intrinsic_dim


def _orthogonal_columns(rng: np.random.Generator, d_out: int, d_in: int) -> np.ndarray:
    gaussian = rng.standard_normal((d_out, d_in))
    q, r = np.linalg.qr(gaussian)
    return q * np.sign(np.diag(r))


def orthogonal_map(d_in: int, d_out: int, seed: int) -> np.ndarray:
    """Seeded (d_out, d_in) matrix with orthonormal columns."""
    if d_out < d_in:
        raise InvalidSpecError(f"d_out must be >= d_in, got {d_out} < {d_in}")
    if d_in < 1:
        raise InvalidSpecError(f"d_in must be >= 1, got {d_in}")
    return _orthogonal_columns(np.random.default_rng(seed), d_out, d_in)


def _latent_sample(spec: ManifoldSpec, rng: np.random.Generator) -> np.ndarray:
    n, d = spec.n_points, spec.intrinsic_dim
    if spec.kind == "hypercube":
        return rng.uniform(0.0, 1.0, (n, d))
    if spec.kind == "gaussian":
        return rng.standard_normal((n, d))
    if spec.kind == "line_segment":
        return rng.uniform(0.0, 1.0, (n, 1))
    if spec.kind == "hypersphere":
        g = rng.standard_normal((n, d + 1))
        return g / np.linalg.norm(g, axis=1, keepdims=True)
    # swiss_roll: (t cos t, h, t sin t)
    t = rng.uniform(*_SWISS_T_RANGE, n)
    h = rng.uniform(0.0, _SWISS_HEIGHT, n)
    return np.column_stack([t * np.cos(t), h, t * np.sin(t)])


def generate(spec: ManifoldSpec) -> PointCloud:
    """Sample a cloud on the manifold and embed it in the ambient space."""
    rng = np.random.default_rng(spec.seed)
    latent = _latent_sample(spec, rng)
    basis = _orthogonal_columns(rng, spec.ambient_dim, spec.latent_dim)
    shift = rng.standard_normal(spec.ambient_dim)
    ambient = latent @ basis.T + shift
    if spec.noise_sigma > 0:
        ambient = ambient + spec.noise_sigma * rng.standard_normal(ambient.shape)
    label = f"{spec.kind}(d={spec.intrinsic_dim}, D={spec.ambient_dim}, n={spec.n_points}, " \
            f"noise={spec.noise_sigma}, seed={spec.seed})"
    return PointCloud(ambient, source=label)
