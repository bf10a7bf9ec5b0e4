"""Reachability and observability Gramians, unrestricted and time-limited.

The unrestricted pair solves

    A P + P A^T + B B^T = 0,      A^T Q + Q A + C^T C = 0,

and the time-limited pair on [0, tbar] solves

    A P + P A^T + B B^T - F F^T = 0,
    A^T Q + Q A + C^T C - G^T G = 0,

with F = e^(A tbar) B and G = C e^(A tbar). For systems with a mass
matrix E the equations generalize to

    A P E^T + E P A^T + B B^T - F F^T = 0   (F = E e^(E^-1 A tbar) E^-1 B),
    A^T Q E + E^T Q A + C^T C - G^T G = 0   (G = C e^(E^-1 A tbar)),

where the pair acting as Gramians is (P, E^T Q E); GramianSet stores the
equation solutions P and Q and exposes the weighted observability matrix.

An independent Gauss-Legendre quadrature of the defining integrals is
provided as a cross-check oracle for the Lyapunov route.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DimensionError, NotPsdError, StabilityError
from .linalg import as_matrix, expm, solve_lyapunov, solve_sylvester, spd_factor
from .systems import StateSpaceSystem

__all__ = [
    "GramianSet",
    "HorizonData",
    "infinite_gramians",
    "time_limited_gramians",
    "gramian_quadrature_oracle",
    "cross_gramian_quadrature",
    "reduced_gramian",
    "mixed_gramian",
]


@dataclass(frozen=True)
class HorizonData:
    """End-of-horizon propagators F = e^(A tbar) B and G = C e^(A tbar)
    (E-weighted variants for systems with a mass matrix)."""

    tbar: float
    F: np.ndarray
    G: np.ndarray


@dataclass
class GramianSet:
    """A reachability/observability Gramian pair for one horizon.

    ``horizon`` is math.inf for the unrestricted pair. ``P`` and ``Q``
    are the Lyapunov-equation solutions; for systems with a mass matrix
    the observability Gramian proper is E^T Q E, available through
    :meth:`observability_weighted`. ``lowrank_P``/``lowrank_Q`` hold
    optional rank-revealing factors (P ~= Z Z^T).
    """

    P: np.ndarray
    Q: np.ndarray
    horizon: float
    lowrank_P: np.ndarray | None = None
    lowrank_Q: np.ndarray | None = None
    horizon_data: HorizonData | None = None

    def observability_weighted(self, e=None) -> np.ndarray:
        if e is None:
            return self.Q
        e = as_matrix(e, "E")
        return e.T @ self.Q @ e


def _require_hurwitz(a, label: str) -> None:
    ev = np.linalg.eigvals(a)
    bad = ev[ev.real >= 0]
    if bad.size:
        worst = bad[np.argmax(bad.real)]
        raise StabilityError(
            f"{label} must be Hurwitz for an unrestricted Gramian; found "
            f"{bad.size} eigenvalue(s) with Re >= 0, e.g. {worst:.6g}"
        )


def _clamp_psd(x: np.ndarray, label: str, tol: float = 1e-10) -> np.ndarray:
    """Zero out negligible negative eigenvalues; reject significant ones."""
    evals, evecs = np.linalg.eigh(x)
    norm2 = float(np.max(np.abs(evals))) if evals.size else 0.0
    if norm2 == 0.0:
        return x
    if evals[0] < -tol * norm2:
        raise NotPsdError(
            f"{label} has eigenvalue {evals[0]:.6e} below -{tol:g} * ||.||_2; "
            "the computed Gramian is not numerically PSD"
        )
    if evals[0] >= 0:
        return x
    clamped = np.maximum(evals, 0.0)
    y = (evecs * clamped) @ evecs.T
    return (y + y.T) / 2.0


def _standard_form(sys: StateSpaceSystem):
    """Return (A, B, C) of the equivalent system without a mass matrix."""
    if sys.E is None:
        return sys.A, sys.B, sys.C
    a = np.linalg.solve(sys.E, sys.A)
    b = np.linalg.solve(sys.E, sys.B)
    return a, b, sys.C


def infinite_gramians(sys: StateSpaceSystem, factor_tol: float | None = None) -> GramianSet:
    """Gramians over [0, inf) of a Hurwitz system.

    Parameters
    ----------
    sys : StateSpaceSystem
    factor_tol : float, optional
        When given, also store rank-revealing factors of P and Q computed
        at this relative eigenvalue cutoff.

    Returns
    -------
    GramianSet with horizon = math.inf.
    """
    at, bt, c = _standard_form(sys)
    _require_hurwitz(at, "A" if sys.E is None else "E^-1 A")
    p = _clamp_psd(solve_lyapunov(at, -bt @ bt.T), "P")
    if sys.E is None:
        q = solve_lyapunov(at.T, -c.T @ c)
    else:
        # Q of the generalized equation A^T Q E + E^T Q A + C^T C = 0 is the
        # observability Gramian of the pair (A E^-1, C E^-1)
        e_inv = np.linalg.inv(sys.E)
        m = sys.A @ e_inv
        ce = c @ e_inv
        q = solve_lyapunov(m.T, -ce.T @ ce)
    q = _clamp_psd(q, "Q")
    gset = GramianSet(P=p, Q=q, horizon=math.inf)
    if factor_tol is not None:
        gset.lowrank_P = spd_factor(p, factor_tol)
        gset.lowrank_Q = spd_factor(q, factor_tol)
    return gset


def time_limited_gramians(sys: StateSpaceSystem, tbar: float, factor_tol: float | None = None) -> GramianSet:
    """Gramians over [0, tbar], with the horizon propagators attached.

    Solvable whenever Lambda(A) and -Lambda(A) do not overlap; stability
    is not required.
    """
    tbar = float(tbar)
    if not (tbar > 0 and math.isfinite(tbar)):
        raise ValueError(f"tbar must be positive and finite, got {tbar}")
    at, bt, c = _standard_form(sys)
    phi = expm(at, tbar)
    if sys.E is None:
        f = phi @ bt
        g = c @ phi
        p = solve_lyapunov(at, f @ f.T - bt @ bt.T)
        q = solve_lyapunov(at.T, g.T @ g - c.T @ c)
    else:
        f = sys.E @ phi @ bt
        g = c @ phi
        p = solve_lyapunov(at, (phi @ bt) @ (phi @ bt).T - bt @ bt.T)
        e_inv = np.linalg.inv(sys.E)
        m = sys.A @ e_inv
        ce = c @ e_inv
        ge = g @ e_inv
        q = solve_lyapunov(m.T, ge.T @ ge - ce.T @ ce)
    p = _clamp_psd(p, "P")
    q = _clamp_psd(q, "Q")
    gset = GramianSet(
        P=p,
        Q=q,
        horizon=tbar,
        horizon_data=HorizonData(tbar=tbar, F=f, G=g),
    )
    if factor_tol is not None:
        gset.lowrank_P = spd_factor(p, factor_tol)
        gset.lowrank_Q = spd_factor(q, factor_tol)
    return gset


def cross_gramian_quadrature(a1, b1, a2, b2, tbar: float, panels: int = 64) -> np.ndarray:
    """Composite Gauss-Legendre quadrature of int_0^tbar e^(A1 s) B1 B2^T e^(A2^T s) ds.

    Four nodes per panel; the integrand is entire, so the rule converges
    spectrally in the panel count. Serves as an oracle independent of the
    Sylvester-equation route.
    """
    a1 = as_matrix(a1, "A1")
    a2 = as_matrix(a2, "A2")
    b1 = as_matrix(b1, "B1")
    b2 = as_matrix(b2, "B2")
    if panels < 1:
        raise ValueError(f"panels must be positive, got {panels}")
    nodes, weights = leggauss(4)
    out = np.zeros((a1.shape[0], a2.shape[0]))
    h = tbar / panels
    for k in range(panels):
        mid = (k + 0.5) * h
        for x, w in zip(nodes, weights):
            s = mid + 0.5 * h * x
            left = expm(a1, s) @ b1
            right = expm(a2, s) @ b2
            out += (0.5 * h * w) * (left @ right.T)
    return out


def gramian_quadrature_oracle(sys: StateSpaceSystem, tbar: float, panels: int = 64) -> np.ndarray:
    """Reachability Gramian over [0, tbar] by direct quadrature."""
    at, bt, _ = _standard_form(sys)
    return cross_gramian_quadrature(at, bt, at, bt, tbar, panels)


def reduced_gramian(rom, tbar: float) -> np.ndarray:
    """Reachability Gramian of a reduced model over [0, tbar].

    Solves A11 Pr + Pr A11^T + B1 B1^T - Fr Fr^T = 0 with
    Fr = e^(A11 tbar) B1.
    """
    a11 = as_matrix(rom.A11, "A11")
    b1 = as_matrix(rom.B1, "B1")
    fr = expm(a11, tbar) @ b1
    return _clamp_psd(solve_lyapunov(a11, fr @ fr.T - b1 @ b1.T), "Pr")


def mixed_gramian(sys: StateSpaceSystem, rom, tbar: float) -> np.ndarray:
    """Cross Gramian int_0^tbar e^(A s) B B1^T e^(A11^T s) ds coupling a
    system and its reduced model, via the Sylvester route.

    For a mass matrix E the integrand's left factor is e^(E^-1 A s) E^-1 B
    and the result solves A X + E X A11^T + B B1^T - F Fr^T = 0.
    """
    a11 = as_matrix(rom.A11, "A11")
    b1 = as_matrix(rom.B1, "B1")
    if b1.shape[1] != sys.m:
        raise DimensionError(f"B1 has {b1.shape[1]} columns but the system has m = {sys.m}")
    at, bt, _ = _standard_form(sys)
    f = expm(at, tbar) @ bt if math.isfinite(tbar) else None
    fr = expm(a11, tbar) @ b1 if math.isfinite(tbar) else None
    if math.isfinite(tbar):
        w = f @ fr.T - bt @ b1.T
    else:
        _require_hurwitz(at, "A" if sys.E is None else "E^-1 A")
        _require_hurwitz(a11, "A11")
        w = -bt @ b1.T
    return solve_sylvester(at, a11, w)
