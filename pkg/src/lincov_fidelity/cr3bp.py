"""Circular restricted three-body dynamics with first- and second-order
variational equations.

States are [x, y, z, vx, vy, vz] in the nondimensional rotating (synodic)
frame: the primaries sit at (-mu*, 0, 0) and (1-mu*, 0, 0), distances are in
units of the primary separation, and time is in TU with one primary
revolution per 2*pi TU.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError
from .tensor_ops import MixedTensor3

__all__ = [
    "CR3BPParams",
    "VariationalState",
    "NRHOReference",
    "vector_field",
    "jacobian",
    "hessian",
    "jacobi_constant",
    "propagate_variations",
    "propagate_states",
    "nrho_reference",
]

_SINGULAR_RADIUS = 1e-12

# packed lower-index pairs (j <= k) of the 6x6x6 second-order variation
_PAIRS = [(j, k) for j in range(6) for k in range(j, 6)]
_PAIR_J = np.array([j for j, _ in _PAIRS])
_PAIR_K = np.array([k for _, k in _PAIRS])


@dataclass(frozen=True)
class CR3BPParams:
    """Mass ratio mu* = m2/(m1+m2) of the smaller primary."""

    mu_star: float

    def __post_init__(self):
        if not 0.0 < self.mu_star < 0.5:
            raise ValueError("mass ratio must lie in (0, 1/2)")


@dataclass(frozen=True)
class VariationalState:
    """Flow state with its first/second partials w.r.t. the initial state."""

    t: float
    x: np.ndarray
    stm: np.ndarray
    stt: MixedTensor3


@dataclass(frozen=True)
class NRHOReference:
    """Initial conditions of the 9:2 resonant southern L2 halo orbit."""

    x0: np.ndarray
    params: CR3BPParams
    period: float
    tu_seconds: float  # seconds per nondimensional time unit


def _primary_offsets(state: np.ndarray, mu: float):
    r1 = state[:3] - np.array([-mu, 0.0, 0.0])
    r2 = state[:3] - np.array([1.0 - mu, 0.0, 0.0])
    d1 = np.linalg.norm(r1)
    d2 = np.linalg.norm(r2)
    if d1 < _SINGULAR_RADIUS:
        raise ValueError("state coincides with the larger primary")
    if d2 < _SINGULAR_RADIUS:
        raise ValueError("state coincides with the smaller primary")
    return r1, d1, r2, d2


def vector_field(state: np.ndarray, p: CR3BPParams) -> np.ndarray:
    """Synodic-frame equations of motion."""
    state = np.asarray(state, dtype=float)
    mu = p.mu_star
    r1, d1, r2, d2 = _primary_offsets(state, mu)
    x, y = state[0], state[1]
    vx, vy = state[3], state[4]
    grad = np.array([x, y, 0.0]) - (1.0 - mu) * r1 / d1**3 - mu * r2 / d2**3
    return np.array(
        [
            state[3],
            state[4],
            state[5],
            2.0 * vy + grad[0],
            -2.0 * vx + grad[1],
            grad[2],
        ]
    )


def _potential_hessian(state: np.ndarray, mu: float) -> np.ndarray:
    """3x3 second partials of the effective potential w.r.t. position."""
    r1, d1, r2, d2 = _primary_offsets(state, mu)
    h = np.diag([1.0, 1.0, 0.0]).astype(float)
    for gm, u, d in ((1.0 - mu, r1, d1), (mu, r2, d2)):
        h += gm * (3.0 * np.outer(u, u) / d**5 - np.eye(3) / d**3)
    return h


def jacobian(state: np.ndarray, p: CR3BPParams) -> np.ndarray:
    """6x6 partials of the vector field w.r.t. the state."""
    state = np.asarray(state, dtype=float)
    a = np.zeros((6, 6))
    a[:3, 3:] = np.eye(3)
    a[3:, :3] = _potential_hessian(state, p.mu_star)
    a[3, 4] = 2.0
    a[4, 3] = -2.0
    return a


def hessian(state: np.ndarray, p: CR3BPParams) -> np.ndarray:
    """6x6x6 second partials of the vector field, symmetric in the lower pair.

    Only the acceleration rows against position indices are nonzero: the
    Coriolis terms are linear and the kinematic rows are exactly linear.
    """
    state = np.asarray(state, dtype=float)
    mu = p.mu_star
    r1, d1, r2, d2 = _primary_offsets(state, mu)
    eye = np.eye(3)
    third = np.zeros((3, 3, 3))
    for gm, u, d in ((1.0 - mu, r1, d1), (mu, r2, d2)):
        uu = np.outer(u, u)
        sym_du = (
            np.einsum("ab,c->abc", eye, u)
            + np.einsum("ac,b->abc", eye, u)
            + np.einsum("bc,a->abc", eye, u)
        )
        third += gm * (3.0 * sym_du / d**5 - 15.0 * np.multiply.outer(u, uu) / d**7)
    h = np.zeros((6, 6, 6))
    h[3:, :3, :3] = third
    return h


def jacobi_constant(state: np.ndarray, p: CR3BPParams) -> float:
    """C = 2*U_eff - v^2; conserved along the flow."""
    state = np.asarray(state, dtype=float)
    mu = p.mu_star
    _, d1, _, d2 = _primary_offsets(state, mu)
    u_eff = (1.0 - mu) / d1 + mu / d2 + 0.5 * (state[0] ** 2 + state[1] ** 2)
    return 2.0 * u_eff - float(state[3:] @ state[3:])


def _variational_rhs(_t, y, p: CR3BPParams):
    state = y[:6]
    phi = y[6:42].reshape(6, 6)
    psi = y[42:].reshape(6, 21)
    a = jacobian(state, p)
    h = hessian(state, p)
    # forcing[i, j, k] = H[i, l, m] Phi[l, j] Phi[m, k]
    forcing = np.tensordot(np.tensordot(h, phi, axes=([1], [0])), phi, axes=([1], [0]))
    dpsi = a @ psi + forcing[:, _PAIR_J, _PAIR_K]
    return np.concatenate([vector_field(state, p), (a @ phi).ravel(), dpsi.ravel()])


def _unpack_stt(psi_packed: np.ndarray) -> MixedTensor3:
    full = np.zeros((6, 6, 6))
    full[:, _PAIR_J, _PAIR_K] = psi_packed
    full[:, _PAIR_K, _PAIR_J] = psi_packed
    return MixedTensor3(full)


def propagate_variations(
    x0: np.ndarray,
    t_grid,
    p: CR3BPParams,
    rtol: float = 1e-12,
    atol: float = 1e-12,
) -> list[VariationalState]:
    """Integrate state, state transition matrix, and second-order transition
    tensor jointly, reporting at each grid time.

    The 216 tensor components are integrated as the 126 distinct lower-index
    pairs and expanded to dense symmetric form on output.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0.0):
        raise ValueError("t_grid must be strictly increasing from 0")
    y0 = np.concatenate([np.asarray(x0, dtype=float), np.eye(6).ravel(), np.zeros(126)])
    if len(t_grid) == 1:
        return [VariationalState(0.0, np.asarray(x0, float), np.eye(6), _unpack_stt(np.zeros((6, 21))))]
    sol = solve_ivp(
        _variational_rhs,
        (0.0, t_grid[-1]),
        y0,
        method="DOP853",
        t_eval=t_grid,
        rtol=rtol,
        atol=atol,
        args=(p,),
    )
    if not sol.success:
        last = float(sol.t[-1]) if len(sol.t) else 0.0
        raise IntegrationError(f"variational integration failed: {sol.message}", last_time=last)
    out = []
    for i, t in enumerate(t_grid):
        y = sol.y[:, i]
        out.append(
            VariationalState(
                t=float(t),
                x=y[:6].copy(),
                stm=y[6:42].reshape(6, 6).copy(),
                stt=_unpack_stt(y[42:].reshape(6, 21)),
            )
        )
    return out


def _batch_rhs(_t, y, mu: float):
    s = y.reshape(-1, 6)
    r1 = s[:, :3] + np.array([mu, 0.0, 0.0])
    r2 = s[:, :3] - np.array([1.0 - mu, 0.0, 0.0])
    d1 = np.linalg.norm(r1, axis=1)
    d2 = np.linalg.norm(r2, axis=1)
    grad = -((1.0 - mu) / d1**3)[:, None] * r1 - (mu / d2**3)[:, None] * r2
    grad[:, 0] += s[:, 0]
    grad[:, 1] += s[:, 1]
    ds = np.empty_like(s)
    ds[:, :3] = s[:, 3:]
    ds[:, 3] = 2.0 * s[:, 4] + grad[:, 0]
    ds[:, 4] = -2.0 * s[:, 3] + grad[:, 1]
    ds[:, 5] = grad[:, 2]
    return ds.ravel()


def propagate_states(
    x0s: np.ndarray,
    t_grid,
    p: CR3BPParams,
    rtol: float = 1e-10,
    atol: float = 1e-10,
) -> np.ndarray:
    """Propagate a batch of states, returning an (n_times, n_states, 6) array.

    All trajectories are integrated as one stacked system with shared adaptive
    step control; output is deterministic for fixed inputs.
    """
    x0s = np.atleast_2d(np.asarray(x0s, dtype=float))
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0.0):
        raise ValueError("t_grid must be strictly increasing from 0")
    if len(t_grid) == 1:
        return x0s[None, :, :].copy()
    sol = solve_ivp(
        _batch_rhs,
        (0.0, t_grid[-1]),
        x0s.ravel(),
        method="DOP853",
        t_eval=t_grid,
        rtol=rtol,
        atol=atol,
        args=(p.mu_star,),
    )
    if not sol.success:
        last = float(sol.t[-1]) if len(sol.t) else 0.0
        raise IntegrationError(f"sample propagation failed: {sol.message}", last_time=last)
    n_t = len(t_grid)
    return sol.y.T.reshape(n_t, -1, 6)


def nrho_reference() -> NRHOReference:
    """Gateway-like 9:2 southern L2 NRHO initial conditions (apolune epoch)."""
    return NRHOReference(
        x0=np.array([1.022022, 0.0, -0.182097, 0.0, -0.103256, 0.0]),
        params=CR3BPParams(mu_star=1.0 / (81.30059 + 1.0)),
        period=1.511111,
        tu_seconds=2.361e6 / (2.0 * np.pi),
    )
