"""Independent reference computations used to freeze expected test values.

Everything here is deliberately brute force — permutation enumeration,
Gauss-Hermite quadrature, dense angle sweeps, finite differences — and never
calls the code paths it is used to check.
"""

from itertools import permutations
from math import factorial

import numpy as np
from numpy.polynomial.hermite_e import hermegauss


def enumerate_symmetrize(raw: np.ndarray) -> np.ndarray:
    """Average over all index permutations via explicit entry loops."""
    raw = np.asarray(raw, dtype=float)
    m = raw.ndim
    out = np.zeros_like(raw)
    for idx in np.ndindex(raw.shape):
        acc = 0.0
        for perm in permutations(range(m)):
            acc += raw[tuple(idx[p] for p in perm)]
        out[idx] = acc / factorial(m)
    return out


def pair_partitions(indices):
    """All partitions of a tuple of indices into unordered pairs."""
    if not indices:
        yield ()
        return
    first, rest = indices[0], indices[1:]
    for i, partner in enumerate(rest):
        for sub in pair_partitions(rest[:i] + rest[i + 1 :]):
            yield ((first, partner),) + sub


def gaussian_moment_by_pairings(p: np.ndarray, order: int) -> np.ndarray:
    """Even Gaussian central moment from explicit pair-partition sums."""
    n = p.shape[0]
    out = np.zeros((n,) * order)
    for idx in np.ndindex(out.shape):
        total = 0.0
        for pairing in pair_partitions(tuple(range(order))):
            term = 1.0
            for a, b in pairing:
                term *= p[idx[a], idx[b]]
            total += term
        out[idx] = total
    return out


def gauss_expect_1d(f, sigma: float = 1.0, nodes: int = 60) -> float:
    """E[f(x)] for x ~ N(0, sigma^2) by Gauss-Hermite quadrature."""
    x, w = hermegauss(nodes)
    return float(np.sum(w * np.vectorize(f)(sigma * x)) / np.sqrt(2.0 * np.pi))


def gauss_expect_nd(f, cov: np.ndarray, nodes: int = 12):
    """E[f(x)] for x ~ N(0, cov) by tensorized Gauss-Hermite quadrature.

    ``f`` maps one n-vector to a scalar or array.
    """
    n = cov.shape[0]
    x1, w1 = hermegauss(nodes)
    chol = np.linalg.cholesky(cov)
    acc = None
    for idx in np.ndindex(*([nodes] * n)):
        xi = np.array([x1[i] for i in idx])
        weight = np.prod([w1[i] for i in idx]) / (2.0 * np.pi) ** (n / 2.0)
        val = np.asarray(f(chol @ xi), dtype=float) * weight
        acc = val if acc is None else acc + val
    return acc


def angle_sweep_max(tensor: np.ndarray, points: int = 200_000, refine: bool = True):
    """Max of T v^m over the unit circle (n = 2), grid sweep plus golden refine."""
    m = tensor.ndim

    def value(theta):
        v = np.array([np.cos(theta), np.sin(theta)])
        c = tensor
        for _ in range(m):
            c = c @ v
        return float(c)

    theta = np.linspace(0.0, 2.0 * np.pi, points, endpoint=False)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    # vectorized polynomial evaluation through binomial expansion
    vals = np.zeros(points)
    for idx in np.ndindex(tensor.shape):
        ones = sum(idx)
        vals += tensor[idx] * cos_t ** (m - ones) * sin_t**ones
    best = int(np.argmax(vals))
    if not refine:
        t0 = theta[best]
        return vals[best], np.array([np.cos(t0), np.sin(t0)])
    from scipy.optimize import minimize_scalar

    span = 2.0 * np.pi / points
    res = minimize_scalar(lambda th: -value(th),
                          bounds=(theta[best] - 2 * span, theta[best] + 2 * span),
                          method="bounded",
                          options={"xatol": 1e-13})
    t0 = float(res.x)
    return value(t0), np.array([np.cos(t0), np.sin(t0)])


def finite_difference_jacobian(f, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(len(x)):
        e = np.zeros_like(x)
        e[j] = step
        cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2.0 * step))
    return np.stack(cols, axis=1)


def finite_difference_hessian(f, x: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Second partials of a vector map by central differences."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    f0 = np.asarray(f(x))
    out = np.zeros((len(f0), n, n))
    for j in range(n):
        for k in range(n):
            ej = np.zeros(n); ej[j] = step
            ek = np.zeros(n); ek[k] = step
            out[:, j, k] = (
                np.asarray(f(x + ej + ek)) - np.asarray(f(x + ej - ek))
                - np.asarray(f(x - ej + ek)) + np.asarray(f(x - ej - ek))
            ) / (4.0 * step * step)
    return out


def subsample_standard_error(values: np.ndarray, n_total: int, n_block: int) -> float:
    """Standard error of a full-sample statistic from per-block replicates.

    ``values`` holds the statistic computed on disjoint blocks of size
    ``n_block``; the full-sample (size ``n_total``) standard error follows
    from the 1/sqrt(N) scaling.
    """
    values = np.asarray(values, dtype=float)
    return float(np.std(values, ddof=1) * np.sqrt(n_block / n_total))
