"""Shifted symmetric higher-order power iteration for tensor z-eigenpairs.

A z-eigenpair of a supersymmetric order-m tensor T is a unit vector x and
scalar lam with T x^(m-1) = lam x. With a large enough convexifying shift the
power iteration ascends the Rayleigh value T x^m and converges to some
eigenpair; the largest one is sought by restarting from random unit vectors.
"""

from dataclasses import dataclass, field

import numpy as np

from .tensor_ops import SymTensor

__all__ = ["EigenPair", "default_shift", "sshopm", "max_zeig"]


@dataclass(frozen=True)
class EigenPair:
    """Result of one or more power-iteration solves.

    ``value`` is the Rayleigh value T x^m at the final iterate. ``converged``
    is False when the iterate displacement never dropped below tolerance
    (observed in practice for tensors with near-degenerate spectra, e.g.
    nearly-zero excess kurtosis); callers are expected to surface the flag
    rather than treat it as an error.
    """

    value: float
    vector: np.ndarray
    converged: bool
    iterations: int
    objective_history: np.ndarray | None = field(default=None, compare=False)


def default_shift(t: SymTensor) -> float:
    """(m-1) times the sum of absolute component values.

    Exceeds (m-1) * max_x rho(T x^(m-2)), the bound that guarantees the
    shifted iteration ascends.
    """
    return (t.order - 1) * float(np.sum(np.abs(t.components)))


def _contract_once(components: np.ndarray, x: np.ndarray, times: int) -> np.ndarray:
    # repeated last-axis contraction as flat matrix-vector products
    n = x.shape[0]
    flat = components
    for _ in range(times):
        flat = flat.reshape(-1, n) @ x
    return flat


def sshopm(
    t: SymTensor,
    x0: np.ndarray,
    alpha: float | None = None,
    tol: float = 1e-10,
    max_iter: int = 1000,
    record_objective: bool = False,
) -> EigenPair:
    """Shifted power iteration x <- normalize(T x^(m-1) + alpha x).

    Stops when the iterate displacement falls below ``tol``. ``alpha``
    defaults to :func:`default_shift`. A zero update vector (T x^(m-1) equal
    to -alpha x) is degenerate and reported as non-converged.
    """
    x = np.asarray(x0, dtype=float)
    nrm = np.linalg.norm(x)
    if abs(nrm - 1.0) > 1e-8:
        raise ValueError("x0 must be a unit vector")
    x = x / nrm
    if alpha is None:
        alpha = default_shift(t)
    c = t.components
    m = t.order
    history = [] if record_objective else None

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        txm1 = _contract_once(c, x, m - 1)
        if history is not None:
            history.append(float(txm1 @ x) + alpha)
        update = txm1 + alpha * x
        nrm = np.linalg.norm(update)
        if nrm == 0.0:
            return EigenPair(
                value=float(txm1 @ x),
                vector=x,
                converged=False,
                iterations=iterations,
                objective_history=np.array(history) if history is not None else None,
            )
        x_next = update / nrm
        step = np.linalg.norm(x_next - x)
        x = x_next
        if step < tol:
            converged = True
            break

    txm1 = _contract_once(c, x, m - 1)
    value = float(txm1 @ x)
    if history is not None:
        history.append(value + alpha)
    return EigenPair(
        value=value,
        vector=x,
        converged=converged,
        iterations=iterations,
        objective_history=np.array(history) if history is not None else None,
    )


def max_zeig(
    t: SymTensor,
    restarts: int = 10,
    seed: int = 0,
    alpha: float | None = None,
    tol: float = 1e-10,
    max_iter: int = 1000,
    return_all: bool = False,
):
    """Best (largest Rayleigh value) converged eigenpair over random restarts.

    Starts are uniform on the unit sphere from a seeded generator. If no
    restart converges, the best non-converged iterate is returned with
    ``converged=False`` — the caller decides whether that is usable. Ties in
    value resolve to the earliest restart, so concurrent execution of the
    restarts cannot change the result.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    results = []
    for _ in range(restarts):
        x0 = rng.standard_normal(t.dim)
        x0 /= np.linalg.norm(x0)
        results.append(sshopm(t, x0, alpha=alpha, tol=tol, max_iter=max_iter))

    def best_of(pairs):
        best = pairs[0]
        for p in pairs[1:]:
            if p.value > best.value:
                best = p
        return best

    converged = [r for r in results if r.converged]
    best = best_of(converged) if converged else best_of(results)
    if return_all:
        return best, results
    return best
