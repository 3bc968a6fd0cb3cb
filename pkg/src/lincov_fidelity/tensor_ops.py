"""Dense supersymmetric tensor storage and contraction primitives.

Tensors here are small (dimension <= 8, order <= 8), so everything is kept
as plain dense ndarrays and symmetrization enumerates index permutations
outright.
"""

from dataclasses import dataclass
from itertools import permutations
from math import factorial

import numpy as np

__all__ = [
    "SymTensor",
    "MixedTensor3",
    "symmetrize",
    "contract_vec",
    "contract_full",
    "mode_transform",
    "identity4",
    "matricize",
    "dematricize",
]


@dataclass(frozen=True)
class SymTensor:
    """Supersymmetric real tensor of order m over R^n, stored dense (n^m entries).

    Symmetry is maintained by construction: build instances through
    :func:`symmetrize`, :func:`identity4`, :func:`mode_transform`, or the
    moment constructors, all of which emit symmetric components.
    """

    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        if c.ndim < 1:
            raise ValueError("SymTensor requires order >= 1")
        dims = set(c.shape)
        if len(dims) != 1:
            raise ValueError(f"all axes must share one dimension, got shape {c.shape}")
        object.__setattr__(self, "components", c)

    @property
    def order(self) -> int:
        return self.components.ndim

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        c = self.components
        scale = max(np.max(np.abs(c)), 1.0)
        for perm in permutations(range(c.ndim)):
            if np.max(np.abs(np.transpose(c, perm) - c)) > tol * scale:
                return False
        return True


@dataclass(frozen=True)
class MixedTensor3:
    """Order-3 tensor with one output index (dim m) and two symmetric input
    indices (dim n), stored as an (m, n, n) array.

    Houses second-derivative data of a map R^n -> R^m, where the output
    dimension may differ from the input dimension.
    """

    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise ValueError(f"expected shape (m, n, n), got {c.shape}")
        scale = max(np.max(np.abs(c)), 1.0)
        if np.max(np.abs(c - c.transpose(0, 2, 1))) > 1e-10 * scale:
            raise ValueError("components must be symmetric in the two input indices")
        # store the exactly symmetrized array so downstream algebra never sees skew parts
        object.__setattr__(self, "components", 0.5 * (c + c.transpose(0, 2, 1)))

    @property
    def out_dim(self) -> int:
        return self.components.shape[0]

    @property
    def in_dim(self) -> int:
        return self.components.shape[1]


def symmetrize(raw) -> SymTensor:
    """Average ``raw`` over all permutations of its indices.

    Idempotent on already-symmetric input.
    """
    c = np.asarray(raw, dtype=float)
    if c.ndim < 1 or len(set(c.shape)) != 1:
        raise ValueError(f"cannot symmetrize array of shape {c.shape}")
    m = c.ndim
    if m == 1:
        return SymTensor(c.copy())
    acc = np.zeros_like(c)
    for perm in permutations(range(m)):
        acc += np.transpose(c, perm)
    return SymTensor(acc / factorial(m))


def contract_vec(t: SymTensor, v: np.ndarray, k: int):
    """Contract k indices of ``t`` with copies of the vector ``v``.

    Returns a SymTensor of order m-k, or a float when k == m.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != t.dim:
        raise ValueError(f"vector length {v.shape} does not match tensor dim {t.dim}")
    if not 1 <= k <= t.order:
        raise ValueError(f"k={k} outside 1..{t.order}")
    c = t.components
    for _ in range(k):
        c = np.tensordot(c, v, axes=([c.ndim - 1], [0]))
    if c.ndim == 0:
        return float(c)
    return SymTensor(c)


def contract_full(t: SymTensor, v: np.ndarray) -> float:
    """Fully contract ``t`` with copies of ``v`` (a scalar, T v^m)."""
    return contract_vec(t, v, t.order)


def mode_transform(t: SymTensor, m: np.ndarray) -> SymTensor:
    """Apply the matrix ``m`` (shape dim_out x t.dim) to every index of ``t``.

    Symmetry is preserved: transforming all modes by the same matrix commutes
    with index permutation.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[1] != t.dim:
        raise ValueError(f"matrix shape {m.shape} incompatible with tensor dim {t.dim}")
    c = t.components
    # contract axis 0 with m's input index; the new output axis lands last,
    # so after `order` passes every axis is transformed and order is restored
    for _ in range(t.order):
        c = np.tensordot(c, m, axes=([0], [1]))
    return SymTensor(c)


def identity4(n: int) -> SymTensor:
    """Fourth-order identity tensor: sym(delta_ij delta_kl).

    Satisfies I xi^3 = xi and I xi^4 = 1 for every unit vector xi.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    eye = np.eye(n)
    return symmetrize(np.einsum("ij,kl->ijkl", eye, eye))


def matricize(g2: MixedTensor3) -> np.ndarray:
    """Flatten an (m, n, n) tensor to the (m*n, n) matrix with row index n*i + j."""
    m, n = g2.out_dim, g2.in_dim
    return g2.components.reshape(m * n, n).copy()


def dematricize(mat: np.ndarray, out_dim: int, in_dim: int) -> MixedTensor3:
    """Inverse of :func:`matricize`."""
    mat = np.asarray(mat, dtype=float)
    if mat.shape != (out_dim * in_dim, in_dim):
        raise ValueError(f"expected shape {(out_dim * in_dim, in_dim)}, got {mat.shape}")
    return MixedTensor3(mat.reshape(out_dim, in_dim, in_dim))
