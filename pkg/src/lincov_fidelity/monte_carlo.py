"""Seeded Gaussian sampling and propagation of sample clouds.

Sampling uses the counter-based Philox generator so clouds are
bit-reproducible for a fixed (seed, N) regardless of how downstream work is
scheduled.
"""

from dataclasses import dataclass

import numpy as np

from .moments import GaussianBelief, whitening_factors

__all__ = ["SampleCloud", "sample_gaussian", "propagate_samples", "save_cloud_csv"]


@dataclass(frozen=True)
class SampleCloud:
    """N samples of an n-dimensional random vector, one per row."""

    samples: np.ndarray
    seed: int

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[0] < 2:
            raise ValueError("a cloud needs at least 2 samples of equal dimension")
        object.__setattr__(self, "samples", s)

    @property
    def count(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]


def sample_gaussian(belief: GaussianBelief, n_samples: int, seed: int) -> SampleCloud:
    """Draw ``n_samples`` from the belief: mu + L z with L the Cholesky factor."""
    if n_samples < 2:
        raise ValueError("at least 2 samples required")
    sqrt = whitening_factors(belief.cov).sqrt
    rng = np.random.Generator(np.random.Philox(key=seed))
    z = rng.standard_normal((n_samples, belief.dim))
    return SampleCloud(samples=belief.mean + z @ sqrt.T, seed=seed)


def propagate_samples(cloud: SampleCloud, g, vectorized: bool = False) -> SampleCloud:
    """Map every sample through ``g``, preserving sample order.

    ``g`` maps one state vector to one output vector; with
    ``vectorized=True`` it maps the whole (N, n) array to (N, m) in one call.
    Any per-sample failure aborts the run: partial clouds would silently bias
    the moment comparisons downstream.
    """
    if vectorized:
        out = np.asarray(g(cloud.samples), dtype=float)
        if out.shape[0] != cloud.count:
            raise ValueError("vectorized map must return one output row per sample")
        return SampleCloud(samples=out, seed=cloud.seed)
    rows = []
    for i, x in enumerate(cloud.samples):
        try:
            rows.append(np.asarray(g(x), dtype=float))
        except Exception as exc:
            raise RuntimeError(f"propagation of sample {i} failed: {exc}") from exc
    return SampleCloud(samples=np.array(rows), seed=cloud.seed)


def save_cloud_csv(cloud: SampleCloud, path) -> None:
    """Write the cloud as CSV, row i = sample i, 17 significant digits."""
    with open(path, "w", encoding="ascii") as f:
        f.write(",".join(f"x{j}" for j in range(cloud.dim)) + "\n")
        for row in cloud.samples:
            f.write(",".join(f"{v:.17g}" for v in row) + "\n")
