"""Dense linear-algebra kernels used throughout the toolkit.

Provides the matrix exponential, Sylvester/Lyapunov solvers, a
rank-revealing factorization of symmetric positive semidefinite matrices,
and a spectrum-separation check that guards the solvers' uniqueness
condition.

Matrices are numpy float64 arrays in C (row-major) order. All functions
are pure and keep no state, so they are safe to call concurrently.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionError, NotPsdError, SpectrumSeparationError

__all__ = [
    "SpectrumSeparation",
    "as_matrix",
    "expm",
    "solve_sylvester",
    "solve_lyapunov",
    "spd_factor",
    "spectrum_separation",
]


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and convert ``a`` to a 2-d float64 array.

    Rejects empty or non-finite input; error messages name the offending
    matrix so callers can pass through user-facing labels.
    """
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must have at least one row and one column, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def _square(a, name: str) -> np.ndarray:
    arr = as_matrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class SpectrumSeparation:
    """Result of a pairwise eigenvalue-separation check.

    ``min_sum_abs`` is min |lambda_i + mu_j| over eigenvalues lambda of the
    first matrix and mu of the second; ``worst_pair`` is an attaining pair.
    ``is_separated`` reports min_sum_abs > tolerance.
    """

    min_sum_abs: float
    is_separated: bool
    tolerance: float
    worst_pair: tuple[complex, complex]


def spectrum_separation(a1, a2, tol: float | None = None) -> SpectrumSeparation:
    """Check Lambda(A1) and -Lambda(A2) for overlap.

    Parameters
    ----------
    a1, a2 : array_like
        Square matrices; they may have different sizes.
    tol : float, optional
        Separation threshold. Defaults to 1e-8 * (||A1||_2 + ||A2||_2).

    Returns
    -------
    SpectrumSeparation
    """
    a1 = _square(a1, "A1")
    a2 = _square(a2, "A2")
    if tol is None:
        tol = 1e-8 * (np.linalg.norm(a1, 2) + np.linalg.norm(a2, 2))
    lam = np.linalg.eigvals(a1)
    mu = np.linalg.eigvals(a2)
    sums = np.abs(lam[:, None] + mu[None, :])
    i, j = np.unravel_index(np.argmin(sums), sums.shape)
    min_sum = float(sums[i, j])
    return SpectrumSeparation(
        min_sum_abs=min_sum,
        is_separated=min_sum > tol,
        tolerance=float(tol),
        worst_pair=(complex(lam[i]), complex(mu[j])),
    )


def _require_separated(a1, a2, context: str) -> None:
    sep = spectrum_separation(a1, a2)
    if not sep.is_separated:
        lam, mu = sep.worst_pair
        raise SpectrumSeparationError(
            f"{context}: eigenvalue pair lambda={lam:.6g}, mu={mu:.6g} has "
            f"|lambda + mu| = {sep.min_sum_abs:.3e} <= tolerance {sep.tolerance:.3e}; "
            "the equation has no unique solution"
        )


def expm(a, t: float = 1.0) -> np.ndarray:
    """Matrix exponential e^(A t) via scaling-and-squaring with Pade
    approximants (Pade degree picked by the standard norm thresholds).

    Raises OverflowError if the result leaves the representable range.
    """
    a = _square(a, "A")
    t = float(t)
    if not np.isfinite(t):
        raise ValueError(f"t must be finite, got {t}")
    out = sla.expm(a * t)
    if not np.all(np.isfinite(out)):
        raise OverflowError(
            f"matrix exponential overflowed for t = {t:g} (||A t||_2 = {np.linalg.norm(a * t, 2):.3e})"
        )
    return out


def solve_sylvester(a1, a2, w) -> np.ndarray:
    """Solve A1 X + X A2^T = W for X by the Schur (Bartels-Stewart) method.

    Parameters
    ----------
    a1 : (n, n) array_like
    a2 : (r, r) array_like
    w : (n, r) array_like

    Returns
    -------
    X : (n, r) ndarray

    Raises
    ------
    SpectrumSeparationError
        If Lambda(A1) and -Lambda(A2) overlap within tolerance.
    ArithmeticError
        If the relative residual of the computed solution exceeds 1e-10.
    """
    a1 = _square(a1, "A1")
    a2 = _square(a2, "A2")
    w = as_matrix(w, "W")
    if w.shape != (a1.shape[0], a2.shape[0]):
        raise DimensionError(
            f"W must have shape {(a1.shape[0], a2.shape[0])} to match A1 and A2, got {w.shape}"
        )
    _require_separated(a1, a2, "solve_sylvester")
    x = sla.solve_sylvester(a1, a2.T, w)
    _check_residual(a1 @ x + x @ a2.T - w, w, "solve_sylvester")
    return x


def solve_lyapunov(a, w) -> np.ndarray:
    """Solve A X + X A^T = W for symmetric W; the result is symmetrized.

    Same residual and separation guarantees as :func:`solve_sylvester`
    (here the condition is that Lambda(A) and -Lambda(A) do not overlap).
    """
    a = _square(a, "A")
    w = _square(w, "W")
    if w.shape != a.shape:
        raise DimensionError(f"W must have shape {a.shape} to match A, got {w.shape}")
    wnorm = np.linalg.norm(w)
    if np.linalg.norm(w - w.T) > 1e-10 * max(wnorm, 1e-300):
        raise ValueError("W must be symmetric")
    _require_separated(a, a, "solve_lyapunov")
    x = sla.solve_continuous_lyapunov(a, w)
    x = (x + x.T) / 2.0
    _check_residual(a @ x + x @ a.T - w, w, "solve_lyapunov")
    return x


def _check_residual(res, w, context: str, tol: float = 1e-10) -> None:
    wnorm = np.linalg.norm(w)
    rnorm = np.linalg.norm(res)
    if rnorm > tol * max(wnorm, 1e-300):
        raise ArithmeticError(
            f"{context}: relative residual {rnorm / max(wnorm, 1e-300):.3e} exceeds {tol:.0e}; "
            "the spectra are likely too close to violating the separation condition"
        )


def spd_factor(p, tol: float = 1e-12) -> np.ndarray:
    """Rank-revealing factor Z with P ~= Z Z^T for symmetric PSD P.

    Built from the eigenpairs of P with eigenvalue > tol * ||P||_2;
    eigenvalues in [-tol * ||P||_2, tol * ||P||_2] are treated as zero and
    dropped, so ||P - Z Z^T||_2 <= 2 * tol * ||P||_2.

    Parameters
    ----------
    p : (n, n) array_like
        Symmetric positive semidefinite matrix.
    tol : float
        Relative eigenvalue cutoff.

    Returns
    -------
    Z : (n, k) ndarray
        Columns ordered by decreasing eigenvalue; k may be 0 for P = 0.

    Raises
    ------
    NotPsdError
        If some eigenvalue is below -tol * ||P||_2.
    """
    p = _square(p, "P")
    pnorm = np.linalg.norm(p)
    if np.linalg.norm(p - p.T) > 1e-10 * max(pnorm, 1e-300):
        raise ValueError("P must be symmetric")
    evals, evecs = np.linalg.eigh((p + p.T) / 2.0)
    norm2 = float(np.max(np.abs(evals))) if evals.size else 0.0
    if norm2 == 0.0:
        return np.zeros((p.shape[0], 0))
    if evals[0] < -tol * norm2:
        raise NotPsdError(
            f"P has eigenvalue {evals[0]:.6e} below -tol * ||P||_2 = {-tol * norm2:.6e}"
        )
    keep = evals > tol * norm2
    lam = evals[keep][::-1]
    vecs = evecs[:, keep][:, ::-1]
    return vecs * np.sqrt(lam)
