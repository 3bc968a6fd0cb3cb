"""Moment propagation through nonlinear maps: first-order (linear
covariance), second-order Taylor, and the scaled unscented transform.

For maps that are exactly quadratic with Gaussian input, the second-order
propagation of mean, covariance, and third/fourth central moments is exact;
that exactness is the correctness oracle for every formula in this module.
"""

from dataclasses import dataclass

import numpy as np

from .moments import GaussianBelief, gaussian_central_moment, whitening_factors
from .tensor_ops import MixedTensor3, SymTensor

__all__ = [
    "QuadraticMap",
    "SigmaPointSet",
    "UnscentedResult",
    "Taylor2Moments",
    "StatLinearization",
    "linear_propagate",
    "taylor2_moments",
    "sigma_points",
    "ut_moments",
    "scaled_ut",
    "statistical_linearization",
]


@dataclass(frozen=True)
class QuadraticMap:
    """Value, Jacobian, and second-derivative tensor of a map at a point."""

    value: np.ndarray
    jac: np.ndarray
    hess: MixedTensor3

    def __post_init__(self):
        value = np.asarray(self.value, dtype=float)
        jac = np.asarray(self.jac, dtype=float)
        m = value.shape[0]
        if jac.shape[0] != m or self.hess.out_dim != m or self.hess.in_dim != jac.shape[1]:
            raise ValueError("inconsistent map dimensions")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "jac", jac)

    @property
    def in_dim(self) -> int:
        return self.jac.shape[1]

    @property
    def out_dim(self) -> int:
        return self.jac.shape[0]

    def __call__(self, dx: np.ndarray) -> np.ndarray:
        """Evaluate the quadratic model at a deviation from the expansion point."""
        dx = np.asarray(dx, dtype=float)
        return self.value + self.jac @ dx + 0.5 * np.einsum("ijk,j,k->i", self.hess.components, dx, dx)


@dataclass(frozen=True)
class SigmaPointSet:
    points: np.ndarray  # (2n+1, n), row 0 is the mean
    mean_weights: np.ndarray
    cov_weights: np.ndarray
    alpha: float
    beta: float
    kappa: float
    lam: float


@dataclass(frozen=True)
class UnscentedResult:
    mean: np.ndarray
    cov: np.ndarray
    cross_cov: np.ndarray
    sigma: SigmaPointSet


@dataclass(frozen=True)
class Taylor2Moments:
    """Second-order output moments: mean shift, mean, covariance, third and
    fourth central moment tensors."""

    dmu: np.ndarray
    mean: np.ndarray
    cov: np.ndarray
    third: SymTensor
    fourth: SymTensor


@dataclass(frozen=True)
class StatLinearization:
    gain: np.ndarray
    offset: np.ndarray


def linear_propagate(belief: GaussianBelief, qmap: QuadraticMap) -> GaussianBelief:
    """First-order mean and covariance: g(mu) and G P G^T."""
    cov = qmap.jac @ belief.cov @ qmap.jac.T
    return GaussianBelief(mean=qmap.value.copy(), cov=0.5 * (cov + cov.T))


def _sum_pair_placements(base: np.ndarray) -> np.ndarray:
    """Sum of the six placements of an (AB)(CD)-structured order-4 tensor.

    ``base`` must be symmetric within its first pair and within its last
    pair; the result is fully symmetric.
    """
    return (
        base
        + base.transpose(0, 2, 1, 3)
        + base.transpose(0, 2, 3, 1)
        + base.transpose(2, 0, 1, 3)
        + base.transpose(2, 0, 3, 1)
        + base.transpose(2, 3, 0, 1)
    )


def taylor2_moments(belief: GaussianBelief, qmap: QuadraticMap) -> Taylor2Moments:
    """Second-order Taylor propagation of mean, covariance, skew, and kurtosis
    source tensors through the quadratic model of a map.

    The Gaussian input moments of order 4, 6, 8 enter through
    :func:`gaussian_central_moment`; every output is the exact central moment
    of (G dx + 1/2 H dx^2) for Gaussian dx.
    """
    p = belief.cov
    g = qmap.jac
    h = qmap.hess.components
    k4 = gaussian_central_moment(p, 4).components
    k6 = gaussian_central_moment(p, 6).components
    k8 = gaussian_central_moment(p, 8).components

    dmu = 0.5 * np.einsum("ijk,jk->i", h, p)
    mean = qmap.value + dmu

    p_lin = g @ p @ g.T
    quad_sq = 0.25 * np.einsum("iab,jcd,abcd->ij", h, h, k4, optimize=True)
    cov = p_lin + quad_sq - np.outer(dmu, dmu)
    cov = 0.5 * (cov + cov.T)

    # third central moment: linear-pair x quadratic cross terms, pure
    # quadratic term, then recentring corrections
    a = 0.5 * np.einsum("il,jm,kab,lmab->ijk", g, g, h, k4, optimize=True)
    t_cross = a + a.transpose(0, 2, 1) + a.transpose(2, 0, 1)
    t_quad = 0.125 * np.einsum("iab,jcd,kef,abcdef->ijk", h, h, h, k6, optimize=True)
    b = cov[:, :, None] * dmu[None, None, :]
    t_recenter = b + b.transpose(0, 2, 1) + b.transpose(2, 0, 1)
    third = t_cross + t_quad - t_recenter - np.einsum("i,j,k->ijk", dmu, dmu, dmu)

    # fourth central moment
    f_lin = np.einsum("ia,jb,kc,ld,abcd->ijkl", g, g, g, g, k4, optimize=True)
    mixed = 0.25 * np.einsum("iab,jcd,ke,lf,abcdef->ijkl", h, h, g, g, k6, optimize=True)
    f_mixed = _sum_pair_placements(mixed)
    f_quad = 0.0625 * np.einsum("iab,jcd,kef,lgh,abcdefgh->ijkl", h, h, h, h, k8, optimize=True)
    c = third[:, :, :, None] * dmu[None, None, None, :]
    f_third = c + c.transpose(0, 1, 3, 2) + c.transpose(0, 3, 1, 2) + c.transpose(3, 0, 1, 2)
    f_cov = _sum_pair_placements(cov[:, :, None, None] * np.outer(dmu, dmu)[None, None, :, :])
    f_mu4 = np.einsum("i,j,k,l->ijkl", dmu, dmu, dmu, dmu)
    fourth = f_lin + f_mixed + f_quad - f_third - f_cov - f_mu4

    return Taylor2Moments(
        dmu=dmu,
        mean=mean,
        cov=cov,
        third=SymTensor(third),
        fourth=SymTensor(fourth),
    )


def sigma_points(
    belief: GaussianBelief, alpha: float = 1.0, beta: float = 2.0, kappa: float | None = None
) -> SigmaPointSet:
    """Scaled sigma points mu, mu +/- sqrt((n+Lambda) P) columns with their
    mean and covariance weights.

    ``kappa`` defaults to 3 - n. The square root is the lower-triangular
    Cholesky factor.
    """
    n = belief.dim
    if kappa is None:
        kappa = 3.0 - n
    lam = alpha**2 * (n + kappa) - n
    if n + lam <= 0.0:
        raise ValueError(f"scaled UT requires n + Lambda > 0, got {n + lam}")
    sqrt = whitening_factors(belief.cov).sqrt
    spread = np.sqrt(n + lam) * sqrt
    points = np.empty((2 * n + 1, n))
    points[0] = belief.mean
    points[1 : n + 1] = belief.mean + spread.T
    points[n + 1 :] = belief.mean - spread.T

    w_m = np.full(2 * n + 1, 1.0 / (2.0 * (n + lam)))
    w_c = w_m.copy()
    w_m[0] = lam / (n + lam)
    w_c[0] = lam / (n + lam) + (1.0 - alpha**2 + beta)
    return SigmaPointSet(
        points=points, mean_weights=w_m, cov_weights=w_c,
        alpha=alpha, beta=beta, kappa=kappa, lam=lam,
    )


def ut_moments(sigma: SigmaPointSet, mapped: np.ndarray) -> UnscentedResult:
    """Weighted mean, covariance, and cross-covariance from mapped sigma points."""
    mapped = np.asarray(mapped, dtype=float)
    if mapped.shape[0] != sigma.points.shape[0]:
        raise ValueError("one mapped point required per sigma point")
    mean = sigma.mean_weights @ mapped
    dz = mapped - mean
    cov = np.einsum("a,ai,aj->ij", sigma.cov_weights, dz, dz)
    dx = sigma.points - sigma.points[0]
    cross = np.einsum("a,ai,aj->ij", sigma.cov_weights, dx, dz)
    return UnscentedResult(mean=mean, cov=0.5 * (cov + cov.T), cross_cov=cross, sigma=sigma)


def scaled_ut(
    belief: GaussianBelief,
    g,
    alpha: float = 1.0,
    beta: float = 2.0,
    kappa: float | None = None,
) -> UnscentedResult:
    """Scaled unscented transform of ``belief`` through the map ``g``.

    ``g`` takes one state vector and returns the mapped vector; it is
    evaluated once per sigma point.
    """
    sigma = sigma_points(belief, alpha=alpha, beta=beta, kappa=kappa)
    mapped = np.array([np.asarray(g(pt), dtype=float) for pt in sigma.points])
    return ut_moments(sigma, mapped)


def statistical_linearization(belief: GaussianBelief, ut: UnscentedResult) -> StatLinearization:
    """Affine model minimizing mean squared error over the sigma points:
    gain = Pxz^T Px^-1, offset = mu_z - gain mu_x."""
    w = whitening_factors(belief.cov)
    px_inv = w.inv_sqrt.T @ w.inv_sqrt
    gain = ut.cross_cov.T @ px_inv
    return StatLinearization(gain=gain, offset=ut.mean - gain @ belief.mean)
