"""Square-root balancing and truncation.

Given Gramian factors P ~= Zp Zp^T and Q ~= Zq Zq^T, the singular value
decomposition U S V^T = Zq^T E Zp (E = I without a mass matrix) yields
the truncation projectors

    W = Zq U_r S_r^(-1/2),    V = Zp V_r S_r^(-1/2),

with W^T E V = I_r, and the reduced model (W^T A V, W^T B, C V). The
singular values are the (time-limited) Hankel singular values. For
verification the full balancing transform S = S^(-1/2) U^T Zq^T E,
S^-1 = Zp V S^(-1/2) is available when both Gramians have full rank.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionError
from .gramians import GramianSet
from .linalg import as_matrix, spd_factor
from .systems import StateSpaceSystem

__all__ = [
    "BalancingResult",
    "ReducedModel",
    "balance",
    "full_balancing_transform",
    "truncate",
    "select_order",
]

# singular values below this relative cutoff are treated as rank-deficient
_SIGMA_RTOL = 1e-14

# full transforms are a verification device; refuse silly dimensions
DEFAULT_FULL_TRANSFORM_CAP = 500


@dataclass(frozen=True)
class BalancingResult:
    """Projectors and singular values from one balancing run.

    ``singular_values`` holds the full computed spectrum (length n_hat,
    the numerical rank of the Gramian product); ``V`` and ``W`` are the
    n x r truncation bases. ``S``/``S_inv`` are only set when a full
    balancing transform was requested.
    """

    singular_values: np.ndarray
    V: np.ndarray
    W: np.ndarray
    horizon: float
    r: int
    S: np.ndarray | None = None
    S_inv: np.ndarray | None = None

    @property
    def n_hat(self) -> int:
        return self.singular_values.size

    def reduce_to(self, r: int) -> "BalancingResult":
        """Same factorization, truncated to a smaller order."""
        if not (1 <= r <= self.r):
            raise ValueError(f"r must be in [1, {self.r}], got {r}")
        return replace(self, V=self.V[:, :r], W=self.W[:, :r], r=r)


@dataclass(frozen=True)
class ReducedModel:
    """Reduced realization (A11, B1, C1) of order r. The mass matrix of
    the parent system, if any, reduces to the identity."""

    A11: np.ndarray
    B1: np.ndarray
    C1: np.ndarray
    r: int
    horizon: float
    parent_name: str = "system"

    def as_system(self) -> StateSpaceSystem:
        return StateSpaceSystem(
            A=self.A11, B=self.B1, C=self.C1, name=f"{self.parent_name}-r{self.r}"
        )


def balance(
    gramians: GramianSet,
    sys: StateSpaceSystem,
    r: int | None = None,
    factor_tol: float = 1e-12,
    full_transform: bool = False,
    full_transform_cap: int = DEFAULT_FULL_TRANSFORM_CAP,
) -> BalancingResult:
    """Square-root balancing of a system against a Gramian pair.

    Parameters
    ----------
    gramians : GramianSet
        Pair produced by :func:`tlbt.gramians.infinite_gramians` or
        :func:`tlbt.gramians.time_limited_gramians` for ``sys``.
    sys : StateSpaceSystem
    r : int, optional
        Truncation order; defaults to the numerical rank n_hat.
    factor_tol : float
        Eigenvalue cutoff for factoring the Gramians when the set does
        not already carry low-rank factors.
    full_transform : bool
        Also build the dense balancing transform (verification mode);
        requires full-rank Gramians and n <= full_transform_cap.

    Returns
    -------
    BalancingResult

    Raises
    ------
    ValueError
        For r > n_hat (the message reports n_hat) or rank-deficient
        input in full-transform mode.
    """
    n = sys.n
    if gramians.P.shape != (n, n) or gramians.Q.shape != (n, n):
        raise DimensionError(
            f"Gramians of shape {gramians.P.shape} do not match the system dimension {n}"
        )
    zp = gramians.lowrank_P if gramians.lowrank_P is not None else spd_factor(gramians.P, factor_tol)
    zq = gramians.lowrank_Q if gramians.lowrank_Q is not None else spd_factor(gramians.Q, factor_tol)
    if zp.shape[1] == 0 or zq.shape[1] == 0:
        raise ValueError("degenerate Gramian pair: a Gramian factor has rank 0")
    core = zq.T @ sys.E @ zp if sys.E is not None else zq.T @ zp
    u, sigma, vt = np.linalg.svd(core, full_matrices=False)
    n_hat = int(np.count_nonzero(sigma > _SIGMA_RTOL * sigma[0])) if sigma.size else 0
    if n_hat == 0:
        raise ValueError("degenerate Gramian pair: all singular values are numerically zero")
    sigma = sigma[:n_hat]
    u = u[:, :n_hat]
    vt = vt[:n_hat, :]
    if r is None:
        r = n_hat
    if not (1 <= r <= n_hat):
        raise ValueError(f"requested order r = {r} is outside [1, n_hat = {n_hat}]")
    scale = 1.0 / np.sqrt(sigma[:r])
    w = zq @ (u[:, :r] * scale)
    v = zp @ (vt[:r, :].T * scale)
    s = s_inv = None
    if full_transform:
        if n > full_transform_cap:
            raise ValueError(
                f"full transforms are capped at n = {full_transform_cap} (got n = {n}); "
                "raise full_transform_cap explicitly if this is intended"
            )
        if n_hat < n or zp.shape[1] < n or zq.shape[1] < n:
            raise ValueError(
                f"full balancing transform needs full-rank Gramians (numerical rank {n_hat} < n = {n}); "
                "use the projection form (full_transform=False) instead"
            )
        s, s_inv = _assemble_transform(zp, zq, sys.E, u, sigma, vt)
    return BalancingResult(
        singular_values=sigma,
        V=v,
        W=w,
        horizon=gramians.horizon,
        r=r,
        S=s,
        S_inv=s_inv,
    )


def _assemble_transform(zp, zq, e, u, sigma, vt):
    n = zp.shape[0]
    scale = 1.0 / np.sqrt(sigma)
    zqe = zq.T @ e if e is not None else zq.T
    s = (scale[:, None] * u.T) @ zqe
    s_inv = zp @ (vt.T * scale)
    err = np.linalg.norm(s @ s_inv - np.eye(n))
    if err > 1e-8 * math.sqrt(n):
        raise ArithmeticError(
            f"balancing transform failed the identity check: ||S S^-1 - I|| = {err:.3e}; "
            "the Gramian pair is too ill-conditioned for a dense transform"
        )
    return s, s_inv


def full_balancing_transform(p, q, factor_tol: float = 1e-12):
    """Dense balancing transform for a symmetric positive definite pair.

    Returns (S, S_inv, sigma) with S P S^T = S^-T Q S^-1 = diag(sigma).
    Intended for verification at moderate dimensions; raises for
    rank-deficient input and suggests the projection route.
    """
    p = as_matrix(p, "P")
    q = as_matrix(q, "Q")
    if p.shape != q.shape or p.shape[0] != p.shape[1]:
        raise DimensionError(f"P and Q must be square with equal shapes, got {p.shape} and {q.shape}")
    n = p.shape[0]
    zp = spd_factor(p, factor_tol)
    zq = spd_factor(q, factor_tol)
    if zp.shape[1] < n or zq.shape[1] < n:
        raise ValueError(
            f"P and Q must be positive definite (numerical ranks {zp.shape[1]}, {zq.shape[1]} < n = {n}); "
            "for semidefinite pairs use balance(), which truncates instead"
        )
    u, sigma, vt = np.linalg.svd(zq.T @ zp, full_matrices=False)
    if sigma[-1] <= _SIGMA_RTOL * sigma[0]:
        raise ValueError("Gramian product is numerically rank deficient; use balance() instead")
    s, s_inv = _assemble_transform(zp, zq, None, u, sigma, vt)
    return s, s_inv, sigma


def truncate(sys: StateSpaceSystem, bal: BalancingResult) -> ReducedModel:
    """Petrov-Galerkin reduction (W^T A V, W^T B, C V) of order bal.r."""
    if bal.V.shape[0] != sys.n:
        raise DimensionError(
            f"balancing bases have {bal.V.shape[0]} rows but the system dimension is {sys.n}"
        )
    return ReducedModel(
        A11=bal.W.T @ sys.A @ bal.V,
        B1=bal.W.T @ sys.B,
        C1=sys.C @ bal.V,
        r=bal.r,
        horizon=bal.horizon,
        parent_name=sys.name,
    )


def select_order(singular_values, tau: float) -> int:
    """Smallest order r >= 1 whose discarded tail sum does not exceed tau.

    ``singular_values`` must be nonincreasing and positive; returns the
    full length if even the empty tail is needed.
    """
    sigma = np.asarray(singular_values, dtype=float).ravel()
    if sigma.size == 0:
        raise ValueError("singular value list is empty")
    if not (tau > 0):
        raise ValueError(f"tau must be positive, got {tau}")
    if np.any(sigma <= 0) or np.any(np.diff(sigma) > 0):
        raise ValueError("singular values must be positive and nonincreasing")
    # tail[r] = sum of sigma[r:], the part discarded when keeping r values
    tails = np.concatenate([np.cumsum(sigma[::-1])[::-1], [0.0]])
    for r in range(1, sigma.size + 1):
        if tails[r] <= tau:
            return r
    return sigma.size
