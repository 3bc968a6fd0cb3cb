"""Fidelity measures for linear covariance propagation.

Expectation-based measures (squared Mahalanobis distance of the means,
expected squared Mahalanobis distance, maximal covariance ratio, expected
squared Mahalanobis distance of linearization error) accept moments from any
source — Monte Carlo, second-order Taylor, or unscented — and the
optimization-based measures (wussos, wussolc, sadl, wussadl, maximal
directional skew/kurtosis) reduce to tensor eigenvalue or singular value
problems.

All quadratic forms are computed through Cholesky triangular solves; no
covariance is ever inverted explicitly.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, eigh, solve_triangular

from .moments import gaussian_central_moment, whitening_factors
from .teig import max_zeig
from .tensor_ops import SymTensor, symmetrize
from .transforms import QuadraticMap

__all__ = [
    "SolverOptions",
    "DirectionalExtreme",
    "McrResult",
    "FidelityReport",
    "smdm",
    "esmd",
    "mcr",
    "esmdole_quadratic",
    "esmdole_samples",
    "wussos",
    "wussolc",
    "sadl",
    "wussadl",
    "max_directional_moment",
]


@dataclass(frozen=True)
class SolverOptions:
    """Eigensolver controls shared by the optimization-based measures.

    ``shift`` selects the convexifying shift bound: "sum_abs" is
    (m-1) * sum|T| and "frobenius" is (m-1) * ||T||_F. Both exceed
    (m-1) * max_x rho(T x^(m-2)), so monotone ascent holds for either; the
    Frobenius bound is far sharper for large tensors and converges in
    correspondingly fewer iterations.
    """

    tol: float = 1e-10
    max_iter: int = 1000
    restarts: int = 10
    seed: int = 0
    shift: str = "sum_abs"

    def shift_for(self, tensor: SymTensor) -> float | None:
        if self.shift == "sum_abs":
            return None  # solver falls back to its default sum-abs bound
        if self.shift == "frobenius":
            return (tensor.order - 1) * float(np.linalg.norm(tensor.components))
        raise ValueError(f"unknown shift strategy {self.shift!r}")


@dataclass(frozen=True)
class DirectionalExtreme:
    """Extreme directional value of a tensor functional.

    ``value`` is signed; ``magnitude`` is its absolute value. ``converged``
    is False when no power-iteration restart converged, in which case
    ``value`` comes from the best iterate found.
    """

    value: float
    magnitude: float
    direction: np.ndarray
    converged: bool


@dataclass(frozen=True)
class McrResult:
    """Extreme generalized eigenvalues of a covariance pair."""

    value: float
    lambda_min: float
    lambda_max: float
    eigenvalues: np.ndarray
    directions: np.ndarray  # columns are variance-ratio extremal directions


def _chol(p: np.ndarray) -> np.ndarray:
    return whitening_factors(np.asarray(p, dtype=float)).sqrt


def smdm(mu_hi: np.ndarray, mu_lin: np.ndarray, p_lin: np.ndarray) -> float:
    """Squared Mahalanobis distance of two means under the linear covariance."""
    d = np.asarray(mu_hi, float) - np.asarray(mu_lin, float)
    y = solve_triangular(_chol(p_lin), d, lower=True)
    return float(y @ y)


def esmd(mu_hi: np.ndarray, p_hi: np.ndarray, mu_lin: np.ndarray, p_lin: np.ndarray) -> float:
    """Expected squared Mahalanobis distance of a distribution from the linear
    one: tr(P_lin^-1 P) plus the squared mean offset.

    For identical moments this equals the output dimension (the chi-square
    mean)."""
    l = _chol(p_lin)
    trace_term = float(np.trace(cho_solve((l, True), np.asarray(p_hi, float))))
    return trace_term + smdm(mu_hi, mu_lin, p_lin)


def mcr(p_lin: np.ndarray, p_hi: np.ndarray) -> McrResult:
    """Maximal covariance ratio between two covariance ellipsoids.

    Solves the generalized eigenproblem of the pair (P_hi, P_lin) by Cholesky
    congruence and reports max(1/lambda_min, lambda_max). The returned
    directions are the generalized eigenvectors: along each, the variance
    ratio v' P_hi v / v' P_lin v equals its eigenvalue.
    """
    l = _chol(p_lin)
    _chol(p_hi)  # reject non-SPD comparison covariances up front
    inner = solve_triangular(l, np.asarray(p_hi, float), lower=True)
    reduced = solve_triangular(l, inner.T, lower=True)
    vals, vecs = eigh(0.5 * (reduced + reduced.T))
    directions = solve_triangular(l.T, vecs, lower=False)
    directions /= np.linalg.norm(directions, axis=0)
    lam_min, lam_max = float(vals[0]), float(vals[-1])
    return McrResult(
        value=max(1.0 / lam_min, lam_max),
        lambda_min=lam_min,
        lambda_max=lam_max,
        eigenvalues=vals,
        directions=directions,
    )


def esmdole_quadratic(qmap: QuadraticMap, p_x: np.ndarray, p_lin: np.ndarray) -> float:
    """Closed-form expected squared Mahalanobis distance of the second-order
    linearization error for Gaussian input.

    Contracts the quadratic-term tensor with itself through the Gaussian
    fourth moment of the input: 1/4 tr(P_lin^-1 H:K4:H)."""
    h = qmap.hess.components
    k4 = gaussian_central_moment(p_x, 4).components
    outer = 0.25 * np.einsum("iab,jcd,abcd->ij", h, h, k4, optimize=True)
    l = _chol(p_lin)
    return float(np.trace(cho_solve((l, True), outer)))


def esmdole_samples(xs: np.ndarray, zs: np.ndarray, qmap: QuadraticMap,
                    mu_x: np.ndarray, p_lin: np.ndarray) -> float:
    """Monte Carlo expected squared Mahalanobis distance of linearization error.

    ``xs`` are input samples, ``zs`` the matched nonlinearly mapped samples;
    the error of sample i is z_i - g(mu_x) - G (x_i - mu_x).
    """
    xs = np.asarray(xs, float)
    zs = np.asarray(zs, float)
    if xs.shape[0] != zs.shape[0]:
        raise ValueError("input and output clouds must have matching sample counts")
    dz = zs - qmap.value - (xs - np.asarray(mu_x, float)) @ qmap.jac.T
    y = solve_triangular(_chol(p_lin), dz.T, lower=True)
    return float(np.mean(np.sum(y * y, axis=0)))


def _whitened_hess(qmap: QuadraticMap, p_x: np.ndarray, p_lin: np.ndarray,
                   px_sqrt: np.ndarray | None = None) -> np.ndarray:
    """Second-derivative tensor mapped to whitened input/output coordinates."""
    l_x = _chol(p_x) if px_sqrt is None else np.asarray(px_sqrt, float)
    l_z = _chol(p_lin)
    h_in = np.einsum("iab,aj,bk->ijk", qmap.hess.components, l_x, l_x, optimize=True)
    m = qmap.out_dim
    return solve_triangular(l_z, h_in.reshape(m, -1), lower=True).reshape(h_in.shape)


def wussos(qmap: QuadraticMap, p_x: np.ndarray, p_lin: np.ndarray,
           solver: SolverOptions = SolverOptions(),
           px_sqrt: np.ndarray | None = None) -> DirectionalExtreme:
    """Whitened uncertainty-scaled second-order stretching.

    Maximal Mahalanobis norm (under the linear output covariance) of the
    second-order linearization error over the input 1-sigma ellipsoid,
    computed as the square-rooted maximal z-eigenvalue of the associated
    fourth-order tensor. ``px_sqrt`` overrides the input square-root factor;
    the value is invariant to that choice.
    """
    y = _whitened_hess(qmap, p_x, p_lin, px_sqrt=px_sqrt)
    w = symmetrize(np.einsum("aij,akl->ijkl", y, y))
    if not np.any(w.components):
        return DirectionalExtreme(0.0, 0.0, np.zeros(qmap.in_dim), True)
    pair = max_zeig(w, restarts=solver.restarts, seed=solver.seed,
                    alpha=solver.shift_for(w), tol=solver.tol, max_iter=solver.max_iter)
    lam = max(pair.value, 0.0)
    l_x = _chol(p_x) if px_sqrt is None else np.asarray(px_sqrt, float)
    direction = l_x @ pair.vector
    return DirectionalExtreme(float(np.sqrt(lam)), float(np.sqrt(lam)), direction, pair.converged)


def wussolc(qmap: QuadraticMap, p_x: np.ndarray, p_lin: np.ndarray) -> float:
    """Whitened uncertainty-scaled second-order linearization change.

    Largest singular value of the (m n) x n matricization of the whitened
    second-derivative tensor; its square is the maximal squared Frobenius
    norm of the whitened Jacobian change over the input 1-sigma ellipsoid,
    naturally compared against min(n, m).
    """
    y = _whitened_hess(qmap, p_x, p_lin)
    mat = y.reshape(qmap.out_dim * qmap.in_dim, qmap.in_dim)
    return float(np.linalg.svd(mat, compute_uv=False)[0])


def sadl(g: np.ndarray, g_sl: np.ndarray) -> float:
    """Induced 2-norm of the difference between the statistical and
    deterministic linearizations."""
    return float(np.linalg.svd(np.asarray(g_sl, float) - np.asarray(g, float),
                               compute_uv=False)[0])


def wussadl(g: np.ndarray, g_sl: np.ndarray, p_x: np.ndarray, p_lin: np.ndarray) -> float:
    """Whitened statistical-vs-deterministic linearization difference:
    the induced 2-norm of P_lin^-1/2 (G_sl - G) P_x^1/2."""
    diff = np.asarray(g_sl, float) - np.asarray(g, float)
    whitened = solve_triangular(_chol(p_lin), diff @ _chol(p_x), lower=True)
    return float(np.linalg.svd(whitened, compute_uv=False)[0])


def max_directional_moment(std_tensor: SymTensor,
                           solver: SolverOptions = SolverOptions()) -> DirectionalExtreme:
    """Extreme directional value of a standardized moment tensor over the
    unit sphere.

    Runs the power iteration on +T and -T. For odd order the two runs probe
    the same landscape (the value is sign-symmetric); for even order they
    find the largest and smallest directional values, and the signed extreme
    of larger magnitude is reported.
    """
    if not np.any(std_tensor.components):
        return DirectionalExtreme(0.0, 0.0, np.zeros(std_tensor.dim), True)
    alpha = solver.shift_for(std_tensor)
    pos = max_zeig(std_tensor, restarts=solver.restarts, seed=solver.seed,
                   alpha=alpha, tol=solver.tol, max_iter=solver.max_iter)
    neg = max_zeig(SymTensor(-std_tensor.components), restarts=solver.restarts,
                   seed=solver.seed, alpha=alpha, tol=solver.tol, max_iter=solver.max_iter)
    candidates = []
    if pos.converged:
        candidates.append((pos.value, pos))
    if neg.converged:
        candidates.append((-neg.value, neg))
    if not candidates:
        candidates = [(pos.value, pos), (-neg.value, neg)]
        converged = False
    else:
        converged = True
    value, pair = max(candidates, key=lambda c: abs(c[0]))
    return DirectionalExtreme(float(value), abs(float(value)), pair.vector, converged)


@dataclass
class FidelityReport:
    """Every metric at one evaluation time, in every computed variant.

    Entries are None when a variant is disabled or a value is unavailable;
    the *_converged flags record eigensolver status for the measures that
    need one.
    """

    t: float
    smdm_2: float | None = None
    smdm_ut: float | None = None
    smdm_mc: float | None = None
    esmd_2: float | None = None
    esmd_ut: float | None = None
    esmd_mc: float | None = None
    esmdole_2: float | None = None
    esmdole_mc: float | None = None
    mcr_2: float | None = None
    mcr_ut: float | None = None
    mcr_mc: float | None = None
    wussos: float | None = None
    wussolc: float | None = None
    sadl: float | None = None
    wussadl: float | None = None
    max_skew_2: float | None = None
    max_skew_mc: float | None = None
    max_kurt_2: float | None = None
    max_kurt_mc: float | None = None
    wussos_converged: bool | None = None
    max_skew_2_converged: bool | None = None
    max_skew_mc_converged: bool | None = None
    max_kurt_2_converged: bool | None = None
    max_kurt_mc_converged: bool | None = None
