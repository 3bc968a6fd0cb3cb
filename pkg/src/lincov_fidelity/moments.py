"""Gaussian and sample central-moment tensors, whitening, and standardized
(skewness / kurtosis) moments.

Conventions
-----------
* Square roots of covariances are lower-triangular Cholesky factors
  throughout the package.
* Sample moments use 1/N weights (the Dirac-mixture expectation), not the
  unbiased 1/(N-1) estimator.
"""

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.linalg import lapack, solve_triangular

from .errors import FactorizationError
from .tensor_ops import SymTensor, identity4, mode_transform, symmetrize

__all__ = [
    "GaussianBelief",
    "MomentSet",
    "WhiteningFactors",
    "StandardizedMoments",
    "gaussian_central_moment",
    "whitening_factors",
    "standardized_moments",
    "excess_kurtosis",
    "sample_moments",
    "directional_standardized_moment",
    "marginal_standardized_moment",
]

_UNIT_TOL = 1e-9
_SAMPLE_CHUNK = 1 << 16  # even, so paired +/- sample sets never split a pair


@dataclass(frozen=True)
class GaussianBelief:
    """Mean vector and covariance matrix of a Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if mean.ndim != 1:
            raise ValueError("mean must be a vector")
        n = mean.shape[0]
        if cov.shape != (n, n):
            raise ValueError(f"cov shape {cov.shape} does not match mean length {n}")
        scale = max(np.max(np.abs(cov)), 1e-300)
        if np.max(np.abs(cov - cov.T)) > 1e-8 * scale:
            raise ValueError("cov must be symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class MomentSet:
    """Mean, covariance, and third/fourth central-moment tensors."""

    mean: np.ndarray
    cov: np.ndarray
    third: SymTensor
    fourth: SymTensor

    @property
    def dim(self) -> int:
        return len(self.mean)


@dataclass(frozen=True)
class WhiteningFactors:
    """Lower-triangular square root of a covariance and its inverse."""

    sqrt: np.ndarray
    inv_sqrt: np.ndarray


@dataclass(frozen=True)
class StandardizedMoments:
    skewness: SymTensor
    kurtosis: SymTensor


def gaussian_central_moment(p: np.ndarray, two_m: int) -> SymTensor:
    """Even central moment tensor of a zero-mean Gaussian with covariance ``p``.

    Equals (2M)!/(2^M M!) * sym(P x ... x P). Built by the pairing recursion
    K[2M](i0,...) = sum_j P(i0, ij) K[2M-2](rest), which sums each distinct
    pair partition of the indices exactly once.
    """
    p = np.asarray(p, dtype=float)
    if two_m not in (2, 4, 6, 8):
        raise ValueError(f"order must be one of 2, 4, 6, 8, got {two_m}")
    n = p.shape[0]
    if p.shape != (n, n):
        raise ValueError("covariance must be square")
    p = 0.5 * (p + p.T)
    moment = p
    labels = "abcdefgh"
    for order in range(4, two_m + 1, 2):
        out_labels = labels[:order]
        acc = np.zeros((n,) * order)
        for j in range(1, order):
            rest = out_labels[1:j] + out_labels[j + 1 :]
            acc += np.einsum(
                f"{out_labels[0]}{out_labels[j]},{rest}->{out_labels}", p, moment
            )
        moment = acc
    return SymTensor(moment)


def pairing_count(two_m: int) -> int:
    """(2M)!/(2^M M!), the number of ways to pair up 2M items."""
    m = two_m // 2
    return factorial(two_m) // (2**m * factorial(m))


def whitening_factors(p: np.ndarray) -> WhiteningFactors:
    """Lower-triangular L with L L^T = P, and its inverse (the whitening map)."""
    p = np.asarray(p, dtype=float)
    sqrt, info = lapack.dpotrf(p, lower=1, clean=1)
    if info > 0:
        raise FactorizationError(
            f"covariance is not positive definite: leading minor of order {info} "
            "is not positive",
            pivot=int(info),
        )
    if info < 0:
        raise FactorizationError(f"invalid input to Cholesky factorization (arg {-info})")
    inv_sqrt = solve_triangular(sqrt, np.eye(p.shape[0]), lower=True)
    return WhiteningFactors(sqrt=sqrt, inv_sqrt=inv_sqrt)


def standardized_moments(ms: MomentSet) -> StandardizedMoments:
    """Skewness and kurtosis tensors: central moments of the whitened variable."""
    w = whitening_factors(ms.cov).inv_sqrt
    return StandardizedMoments(
        skewness=mode_transform(ms.third, w),
        kurtosis=mode_transform(ms.fourth, w),
    )


def excess_kurtosis(kappa: SymTensor) -> SymTensor:
    """Kurtosis tensor minus the Gaussian kurtosis 3*I4 of the same dimension."""
    if kappa.order != 4:
        raise ValueError(f"kurtosis tensor must have order 4, got {kappa.order}")
    return SymTensor(kappa.components - 3.0 * identity4(kappa.dim).components)


def sample_moments(samples, weights=None) -> MomentSet:
    """Mean, covariance, and third/fourth central-moment tensors of a sample set.

    Accumulation runs over fixed-size chunks in sample order, so results are
    independent of any outer parallel schedule.
    """
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    n_samp, dim = x.shape
    if n_samp < 2:
        raise ValueError("at least 2 samples required")
    if weights is None:
        w = np.full(n_samp, 1.0 / n_samp)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (n_samp,):
            raise ValueError("weights must match the number of samples")
        if np.any(w < 0.0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-10:
            raise ValueError("weights must sum to 1")

    mean = w @ x
    d = x - mean
    cov = np.einsum("a,ai,aj->ij", w, d, d)
    third = np.zeros((dim,) * 3)
    fourth = np.zeros((dim,) * 4)
    for lo in range(0, n_samp, _SAMPLE_CHUNK):
        dc = d[lo : lo + _SAMPLE_CHUNK]
        wc = w[lo : lo + _SAMPLE_CHUNK]
        third += np.einsum("a,ai,aj,ak->ijk", wc, dc, dc, dc)
        # fourth moment as a Gram product of weighted outer products
        d2 = (dc[:, :, None] * dc[:, None, :]).reshape(len(dc), dim * dim)
        fourth += ((d2 * wc[:, None]).T @ d2).reshape((dim,) * 4)
    return MomentSet(
        mean=mean,
        cov=0.5 * (cov + cov.T),
        third=symmetrize(third),
        fourth=symmetrize(fourth),
    )


def _check_unit(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
        raise ValueError("direction must be a unit vector")
    return v


def directional_standardized_moment(std_tensor: SymTensor, v: np.ndarray) -> float:
    """Full contraction of a standardized moment tensor along a unit direction.

    This is the moment of the whitened variable's marginal along ``v``, not
    the standardized moment of the raw marginal (see
    :func:`marginal_standardized_moment` for that).
    """
    v = _check_unit(v)
    c = std_tensor.components
    for _ in range(std_tensor.order):
        c = c @ v
    return float(c)


def marginal_standardized_moment(raw_tensor: SymTensor, p: np.ndarray, v: np.ndarray) -> float:
    """Standardized central moment of the 1-D marginal along ``v``.

    Contracts the raw central-moment tensor along ``v`` and divides by the
    marginal standard deviation to the tensor order.
    """
    v = _check_unit(v)
    p = np.asarray(p, dtype=float)
    var = float(v @ p @ v)
    if var <= 0.0:
        raise ValueError("marginal variance along the given direction is not positive")
    c = raw_tensor.components
    for _ in range(raw_tensor.order):
        c = c @ v
    return float(c) / var ** (raw_tensor.order / 2.0)
