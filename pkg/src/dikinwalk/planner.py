"""Pre-run planning: mode solvers, warm-start balls, and iteration budgets.

Budgets are closed-form planning aids parameterized by a user-supplied
universal constant C; they are never correctness gates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from dikinwalk.metrics import MetricKind, RegularizedLewis, SoftThreshold
from dikinwalk.polytope import Polytope, chord
from dikinwalk.target import LogConcaveTarget, RegimeError


class PlannerError(ValueError):
    """Invalid planner inputs."""


@dataclass(frozen=True)
class ModePair:
    """Unconstrained minimizer of f and the minimizer over the polytope closure."""

    x_star: np.ndarray
    x_dag: np.ndarray
    grad_norm_star: float
    kkt_residual_dag: float


@dataclass(frozen=True)
class WarmStartBall:
    """Uniform-ball warm start: B(x0, r0) inside K and inside B(x_dag, r1)."""

    x0: np.ndarray
    r0: float
    r1: float
    logM: float
    outer_radius_estimated: bool = False


@dataclass(frozen=True)
class MixingBudgetQuery:
    """Inputs for a closed-form iteration budget.

    regime is 'strong' or 'weak'; kappa applies to the strong regime,
    beta_eta (the product beta * eta) to the weak one. psi_n_sq defaults
    to max(1, log n).
    """

    regime: str
    m: int
    n: int
    metric: MetricKind
    M: float
    eps: float
    C: float
    kappa: Optional[float] = None
    beta_eta: Optional[float] = None
    psi_n_sq: Optional[float] = None

    def __post_init__(self):
        if self.regime not in ("strong", "weak"):
            raise PlannerError(f"unknown regime {self.regime!r}")
        if not 0 < self.eps < 1:
            raise PlannerError("eps must be in (0, 1)")
        if self.M < 1:
            raise PlannerError("warmness M must be >= 1")
        if self.n <= 0 or self.m < 0 or self.C <= 0:
            raise PlannerError("need n > 0, m >= 0, C > 0")
        if self.regime == "strong" and self.kappa is None:
            raise PlannerError("strong regime needs kappa")
        if self.regime == "weak" and self.beta_eta is None:
            raise PlannerError("weak regime needs beta_eta")


@dataclass(frozen=True)
class BudgetResult:
    """Optimized beyond-worst-case budget next to the plain worst-case one."""

    T: int
    best_delta: float
    violated_count: int
    plain_T: int


def _margins(P: Polytope, x: np.ndarray) -> np.ndarray:
    """Per-constraint Euclidean distance margins (a_i^T x - b_i) / |a_i|."""
    if P.m == 0:
        return np.full(1, np.inf)
    norms = np.linalg.norm(P.A, axis=1)
    return (P.A @ x - P.b) / norms


def _project_polytope(
    P: Polytope, y: np.ndarray, sweeps: int = 100, tol: float = 1e-10
) -> np.ndarray:
    """Euclidean projection onto the closure of K by Dykstra's alternating method."""
    if P.m == 0 or bool(np.all(P.A @ y - P.b >= 0.0)):
        return y.copy()
    x = y.copy()
    corrections = np.zeros((P.m, P.n))
    norms_sq = np.einsum("ij,ij->i", P.A, P.A)
    for _ in range(sweeps):
        max_move = 0.0
        for i in range(P.m):
            v = x + corrections[i]
            viol = P.b[i] - P.A[i] @ v
            if viol > 0.0:
                proj = v + (viol / norms_sq[i]) * P.A[i]
            else:
                proj = v
            corrections[i] = v - proj
            max_move = max(max_move, float(np.linalg.norm(proj - x)))
            x = proj
        if max_move <= tol:
            break
    return x


def solve_modes(
    target: LogConcaveTarget,
    P: Polytope,
    tol: float = 1e-8,
    max_iter: int = 100000,
) -> ModePair:
    """Gradient descent for the global mode, projected gradient descent for the
    constrained one (projection via Dykstra sweeps over half-spaces)."""
    if target.grad_f is None:
        raise PlannerError("mode solving needs a gradient")
    if target.alpha <= 0:
        raise RegimeError("regime requires alpha > 0")
    lr = 1.0 / target.beta
    x = np.zeros(P.n)
    grad_norm = np.inf
    for _ in range(max_iter):
        g = target.grad_f(x)
        grad_norm = float(np.linalg.norm(g))
        if grad_norm <= tol:
            break
        x = x - lr * g
    x_star = x

    x = _project_polytope(P, x_star)
    kkt = np.inf
    for _ in range(max_iter):
        g = target.grad_f(x)
        x_next = _project_polytope(P, x - lr * g)
        kkt = float(np.linalg.norm(x_next - x)) * target.beta
        x = x_next
        if kkt <= tol:
            break
    return ModePair(
        x_star=x_star, x_dag=x, grad_norm_star=grad_norm, kkt_residual_dag=kkt
    )


def _estimate_outer_radius(P: Polytope, x1: np.ndarray) -> float:
    """Max chord reach from x1 along the 2n axis directions; a lower-bound
    estimate of the circumradius, flagged as such by the caller."""
    reach = 0.0
    for i in range(P.n):
        d = np.zeros(P.n)
        d[i] = 1.0
        c = chord(P, x1, d)
        for t in (c.t_minus, c.t_plus):
            if math.isfinite(t):
                reach = max(reach, abs(t))
            else:
                raise PlannerError(
                    "polytope is unbounded along an axis; supply the outer radius"
                )
    return reach


def warm_start_ball(
    target: LogConcaveTarget,
    P: Polytope,
    x1: np.ndarray,
    r_tilde: float,
    modes: ModePair,
    outer_radius: Optional[float] = None,
) -> WarmStartBall:
    """Ball construction guaranteeing f increases at most 1 over its interior.

    r1 = min{1/sqrt(beta), 1/(2 beta |x_dag - x_star|)}; the ball B(x0, r0) is
    the largest ball in the cone hull of {x_dag} and B(x1, r_tilde) that stays
    inside B(x_dag, r1). logM is the warmness bound for the uniform
    distribution on the ball.
    """
    x1 = P._check_dim(x1)
    if not r_tilde > 0:
        raise PlannerError("r_tilde must be positive")
    if target.beta <= 0:
        raise PlannerError("beta must be positive")
    if P.m > 0 and np.min(_margins(P, x1)) < r_tilde - 1e-9:
        raise PlannerError("B(x1, r_tilde) is not contained in the polytope")
    beta = target.beta
    mode_gap = float(np.linalg.norm(modes.x_dag - modes.x_star))
    r1 = 1.0 / math.sqrt(beta)
    if mode_gap > 0:
        r1 = min(r1, 1.0 / (2.0 * beta * mode_gap))
    d1 = float(np.linalg.norm(x1 - modes.x_dag))
    r0 = r1 * r_tilde / (d1 + r_tilde)
    x0 = modes.x_dag + (r1 / (r_tilde + d1)) * (x1 - modes.x_dag)
    # degenerate collinear cases (e.g. x1 = x_dag) can push the ball to the
    # boundary; cap r0 by the actual per-constraint margin at x0
    if P.m > 0:
        r0 = min(r0, float(np.min(_margins(P, x0))))
    if r0 <= 0:
        raise PlannerError("warm-start ball collapsed (x0 too close to boundary)")
    estimated = outer_radius is None
    R_tilde = _estimate_outer_radius(P, x1) if estimated else float(outer_radius)
    second = 0.5 * math.log(beta * R_tilde**2)
    if mode_gap > 0:
        second = max(second, math.log(2.0 * beta * R_tilde * mode_gap))
    logM = 1.0 + P.n * math.log(3.0 * R_tilde / r_tilde) + P.n * second
    ball = WarmStartBall(
        x0=x0, r0=r0, r1=r1, logM=logM, outer_radius_estimated=estimated
    )
    _validate_ball(ball, P, modes)
    return ball


def _validate_ball(ball: WarmStartBall, P: Polytope, modes: ModePair) -> None:
    if P.m > 0 and np.min(_margins(P, ball.x0)) < ball.r0 - 1e-9:
        raise PlannerError("warm-start ball leaves the polytope")
    reach = float(np.linalg.norm(ball.x0 - modes.x_dag)) + ball.r0
    if reach > ball.r1 + 1e-9:
        raise PlannerError("warm-start ball leaves B(x_dag, r1)")


def sample_warm_start(ball: WarmStartBall, rng: np.random.Generator) -> np.ndarray:
    """Uniform point in B(x0, r0): Gaussian direction times radius^(1/n) scaling."""
    n = ball.x0.shape[0]
    g = rng.standard_normal(n)
    norm = np.linalg.norm(g)
    while norm == 0.0:
        g = rng.standard_normal(n)
        norm = np.linalg.norm(g)
    u = rng.uniform()
    return ball.x0 + ball.r0 * u ** (1.0 / n) * g / norm


def _log_term(M: float, eps: float) -> float:
    return max(0.0, math.log(math.sqrt(M) / eps))


def mixing_budget(qry: MixingBudgetQuery) -> int:
    """ceil(C * regime factor * n * log(sqrt(M)/eps)).

    Factor: (m + kappa) for soft/strong; (n^{3/2} + kappa)(log m)^{c2} for
    Lewis/strong; psi_n^2 (m + beta eta) for soft/weak; and
    psi_n^2 (n^{3/2} + beta eta)(log m)^{c2} for Lewis/weak.
    """
    n, m = qry.n, qry.m
    lewis = isinstance(qry.metric, RegularizedLewis)
    if lewis:
        c2 = qry.metric.c2
        log_m_pow = math.log(m) ** c2 if m > 1 else 1.0
        head = n**1.5
    else:
        if not isinstance(qry.metric, SoftThreshold):
            raise PlannerError(f"unknown metric kind {qry.metric!r}")
        log_m_pow = 1.0
        head = float(m)
    if qry.regime == "strong":
        factor = (head + qry.kappa) * log_m_pow
    else:
        psi_sq = (
            qry.psi_n_sq if qry.psi_n_sq is not None else max(1.0, math.log(n))
        )
        factor = psi_sq * (head + qry.beta_eta) * log_m_pow
    return math.ceil(qry.C * factor * n * _log_term(qry.M, qry.eps))


def radius_hat(s: float, n: int) -> float:
    """2 + 2 max{n^{-1/4} log^{1/4}(1/s), n^{-1/2} log^{1/2}(1/s)} for s in (0,1)."""
    if not 0 < s < 1:
        raise PlannerError("s must be in (0, 1)")
    ln = math.log(1.0 / s)
    return 2.0 + 2.0 * max(n**-0.25 * ln**0.25, n**-0.5 * ln**0.5)


def violated_constraint_count(P: Polytope, center: np.ndarray, rho: float) -> int:
    """Constraints whose affine function attains <= 0 somewhere in B(center, rho)."""
    if rho < 0:
        raise PlannerError("rho must be nonnegative")
    center = P._check_dim(center)
    if P.m == 0:
        return 0
    norms = np.linalg.norm(P.A, axis=1)
    return int(np.count_nonzero(P.A @ center - P.b <= norms * rho))


def default_delta_grid() -> np.ndarray:
    """Logarithmic grid over [1e-2, 1e3], 32 points."""
    return np.logspace(-2, 3, 32)


def beyond_worst_case_budget(
    P: Polytope,
    target: LogConcaveTarget,
    modes: ModePair,
    M: float,
    eps: float,
    C: float,
    delta_grid: Optional[Sequence[float]] = None,
) -> BudgetResult:
    """Minimize kappa n + m / delta^2 + n * (violated count) over the delta grid.

    The ball is centered at the constrained mode with radius
    (radius_hat(eps / 2M) + delta) sqrt(n / alpha). A delta -> infinity
    sentinel (count = m, m / delta^2 = 0) recovers the plain (m + kappa) n
    budget, returned alongside for comparison.
    """
    if target.alpha <= 0:
        raise RegimeError("regime requires alpha > 0")
    if not 0 < eps < 1 or M < 1 or C <= 0:
        raise PlannerError("need eps in (0,1), M >= 1, C > 0")
    n, m = P.n, P.m
    kappa = target.kappa
    ups = radius_hat(eps / (2.0 * M), n)
    scale = math.sqrt(n / target.alpha)
    log_term = max(0.0, math.log(2.0 * M / eps))
    grid = default_delta_grid() if delta_grid is None else np.asarray(delta_grid)
    best_val = kappa * n + n * m  # delta -> infinity sentinel
    best_delta = math.inf
    best_count = m
    for delta in grid:
        count = violated_constraint_count(P, modes.x_dag, (ups + delta) * scale)
        val = kappa * n + m / delta**2 + n * count
        if val < best_val:
            best_val = val
            best_delta = float(delta)
            best_count = count
    T = math.ceil(C * best_val * log_term)
    plain_T = math.ceil(C * (m + kappa) * n * log_term)
    return BudgetResult(T=T, best_delta=best_delta, violated_count=best_count, plain_T=plain_T)
