"""Local metrics G(x) = H(x) + lambda I, their factors, and Lewis weights."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg

from dikinwalk.polytope import Polytope, slack


class MetricError(ValueError):
    """Metric evaluation failed (exterior point, rank deficiency, ...)."""


class LewisConvergenceError(MetricError):
    """Fixed-point iteration did not reach the residual tolerance."""

    def __init__(self, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"Lewis weights did not converge: residual {residual:.3e} "
            f"after {iterations} iterations"
        )


def default_lewis_q(m: int) -> int:
    """Smallest even integer >= max(4, 2 ceil(log2 m))."""
    q = max(4, 2 * math.ceil(math.log2(m))) if m > 1 else 4
    return q if q % 2 == 0 else q + 1


@dataclass(frozen=True)
class SoftThreshold:
    """Log-barrier Hessian of the polytope plus lam * I."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise MetricError("lambda must be positive")


@dataclass(frozen=True)
class RegularizedLewis:
    """Lewis-weighted barrier Hessian scaled by c1 sqrt(n) (log m)^c2, plus lam * I."""

    lam: float
    c1: float = 1.0
    c2: float = 0.0
    q: int | None = None  # None -> default_lewis_q(m)
    tol: float = 1e-8
    max_iter: int = 1000

    def __post_init__(self):
        if not self.lam > 0:
            raise MetricError("lambda must be positive")
        if not self.c1 > 0 or self.c2 < 0:
            raise MetricError("need c1 > 0 and c2 >= 0")
        if self.q is not None and (self.q < 4 or self.q % 2 != 0):
            raise MetricError("q must be an even integer >= 4")


MetricKind = Union[SoftThreshold, RegularizedLewis]


@dataclass(frozen=True)
class MetricEval:
    """G at a point with its upper-triangular factor Q (G = Q^T Q) and log det."""

    G: np.ndarray
    Q: np.ndarray
    logdet: float
    at: np.ndarray


@dataclass(frozen=True)
class LewisWeights:
    """Converged weights with the stationarity residual actually achieved."""

    w: np.ndarray
    residual: float
    iterations: int


def _cholesky_upper(G: np.ndarray) -> tuple[np.ndarray, float]:
    """Upper-triangular Q with G = Q^T Q, retrying once with a tiny jitter."""
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError:
        jitter = 1e-12 * np.trace(G) / G.shape[0]
        try:
            L = np.linalg.cholesky(G + jitter * np.eye(G.shape[0]))
        except np.linalg.LinAlgError:
            raise MetricError("Cholesky failed even after jitter") from None
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    return L.T, logdet


def soft_threshold_metric(P: Polytope, x: np.ndarray, lam: float) -> MetricEval:
    """G = A_x^T A_x + lam I = sum_i a_i a_i^T / s_i^2 + lam I at interior x."""
    if not lam > 0:
        raise MetricError("lambda must be positive")
    x = P._check_dim(x)
    if P.m == 0:
        G = lam * np.eye(P.n)
    else:
        s = slack(P, x).s
        if np.any(s <= 0.0):
            raise MetricError("point is on or outside the boundary")
        Ax = P.A / s[:, None]
        G = Ax.T @ Ax + lam * np.eye(P.n)
    Q, logdet = _cholesky_upper(G)
    return MetricEval(G=G, Q=Q, logdet=logdet, at=x)


def lewis_weights(
    Ax: np.ndarray, q: int, tol: float = 1e-8, max_iter: int = 1000
) -> LewisWeights:
    """Solve the weight fixed point w_i = tau_i(w) by damped multiplicative steps.

    tau_i(w) = w_i^{c_q} a_i^T (Ax^T W^{c_q} Ax)^{-1} a_i is the leverage score
    of row i of W^{c_q / 2} Ax, with c_q = 1 - 2/q. Initialized at w = n/m,
    updated by w <- sqrt(w * tau).
    """
    Ax = np.asarray(Ax, dtype=float)
    m, n = Ax.shape
    if m < n:
        raise MetricError(f"need m >= n for Lewis weights (m={m}, n={n})")
    if q < 4 or q % 2 != 0:
        raise MetricError("q must be an even integer >= 4")
    cq = 1.0 - 2.0 / q
    w = np.full(m, n / m)
    residual = np.inf
    for it in range(1, max_iter + 1):
        Mw = Ax.T @ (w[:, None] ** cq * Ax)
        try:
            cho = scipy.linalg.cho_factor(Mw, lower=True)
        except (scipy.linalg.LinAlgError, np.linalg.LinAlgError):
            raise MetricError("rank-deficient weighted Gram matrix") from None
        B = scipy.linalg.cho_solve(cho, Ax.T)  # n x m
        quad = np.einsum("ij,ji->i", Ax, B)
        tau = w**cq * quad
        residual = float(np.max(np.abs(w - tau) / w))
        if residual <= tol:
            return LewisWeights(w=w, residual=residual, iterations=it)
        w = np.sqrt(w * tau)
    raise LewisConvergenceError(residual, max_iter)


def regularized_lewis_metric(
    P: Polytope, x: np.ndarray, params: RegularizedLewis
) -> MetricEval:
    """G = c1 sqrt(n) (log m)^c2 A_x^T W A_x + lam I with W the Lewis weights."""
    x = P._check_dim(x)
    m, n = P.m, P.n
    if m < n:
        raise MetricError(
            f"regularized Lewis metric needs m >= n (m={m}, n={n}); "
            "use the soft-threshold metric instead"
        )
    s = slack(P, x).s
    if np.any(s <= 0.0):
        raise MetricError("point is on or outside the boundary")
    Ax = P.A / s[:, None]
    q = params.q if params.q is not None else default_lewis_q(m)
    lw = lewis_weights(Ax, q=q, tol=params.tol, max_iter=params.max_iter)
    scale = params.c1 * math.sqrt(n) * math.log(m) ** params.c2
    G = scale * (Ax.T @ (lw.w[:, None] * Ax)) + params.lam * np.eye(n)
    Q, logdet = _cholesky_upper(G)
    return MetricEval(G=G, Q=Q, logdet=logdet, at=x)


def evaluate_metric(P: Polytope, x: np.ndarray, kind: MetricKind) -> MetricEval:
    """Dispatch on the metric kind."""
    if isinstance(kind, SoftThreshold):
        return soft_threshold_metric(P, x, kind.lam)
    if isinstance(kind, RegularizedLewis):
        return regularized_lewis_metric(P, x, kind)
    raise MetricError(f"unknown metric kind {kind!r}")


def local_norm(M: MetricEval, h: np.ndarray) -> float:
    """sqrt(h^T G h), computed as the Euclidean norm of Q h."""
    h = np.asarray(h, dtype=float).reshape(-1)
    if h.shape[0] != M.Q.shape[0]:
        raise MetricError("dimension mismatch")
    return float(np.linalg.norm(M.Q @ h))


def dikin_ellipsoid_contains(M: MetricEval, z: np.ndarray) -> bool:
    """True iff z is in the closed unit ellipsoid of G centered at the eval point."""
    return local_norm(M, np.asarray(z, dtype=float) - M.at) <= 1.0
