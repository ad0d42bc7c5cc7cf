"""Regularized Dikin walk: proposal, Metropolis acceptance, chain execution.

Randomness discipline: one numpy PCG64 stream per chain (np.random.default_rng
seeded with the configured 64-bit seed). Per step the draws are, in order:
the lazification uniform (when lazy), the n proposal normals, and the MH
uniform. The MH uniform is consumed only when the proposal is interior, so a
rejection at the indicator never advances that draw; accept and MH-reject
consume identically.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
import scipy.linalg

from dikinwalk.metrics import MetricEval, MetricKind, evaluate_metric
from dikinwalk.polytope import Polytope, contains
from dikinwalk.target import LogConcaveTarget


class WalkError(ValueError):
    """Invalid chain configuration or state."""


class NonFiniteDensityError(WalkError):
    """f returned a non-finite value at a proposed interior point."""


ADAPT_WINDOW = 50  # non-lazy proposals per step-size adaptation decision
R_MIN, R_MAX = 1e-6, 1.0


@dataclass(frozen=True)
class WalkConfig:
    """Step size, metric kind, and run lengths for one chain."""

    metric: MetricKind
    r: float = 0.1
    lazy: bool = True
    steps: int = 0
    burn_in: int = 0
    adapt: bool = False
    seed: int = 0
    thin: int = 1

    def __post_init__(self):
        if not self.r > 0:
            raise WalkError("step size r must be positive")
        if self.thin < 1:
            raise WalkError("thin must be >= 1")
        if self.steps < 0 or self.burn_in < 0:
            raise WalkError("steps and burn_in must be nonnegative")


@dataclass
class StepStats:
    """Counters over proposals; proposed = accepted + rejected_outside + rejected_mh."""

    proposed: int = 0
    accepted: int = 0
    lazy_skips: int = 0
    rejected_outside: int = 0
    rejected_mh: int = 0
    mean_log_ratio: float = 0.0
    _n_log_ratio: int = 0

    def record_log_ratio(self, L: float) -> None:
        self._n_log_ratio += 1
        self.mean_log_ratio += (L - self.mean_log_ratio) / self._n_log_ratio

    @property
    def nonlazy_acceptance(self) -> float:
        return self.accepted / self.proposed if self.proposed else float("nan")


@dataclass
class ChainState:
    """Current interior point with cached metric factor and f value."""

    x: np.ndarray
    metric_cache: MetricEval
    f_x: float
    rng: np.random.Generator
    stats: StepStats = field(default_factory=StepStats)


@dataclass(frozen=True)
class SampleBatch:
    """Recorded trajectory plus run metadata."""

    samples: np.ndarray
    stats: StepStats
    step_size: float
    seed: int


def propose(state: ChainState, config: WalkConfig) -> np.ndarray:
    """Draw z = x + (r / sqrt(n)) Q^{-1} xi, i.e. z ~ N(x, (r^2/n) G(x)^{-1})."""
    n = state.x.shape[0]
    xi = state.rng.standard_normal(n)
    step_vec = scipy.linalg.solve_triangular(state.metric_cache.Q, xi, lower=False)
    return state.x + (config.r / math.sqrt(n)) * step_vec


def _log_ratio(
    f_x: float,
    f_z: float,
    metric_at_x: MetricEval,
    metric_at_z: MetricEval,
    r: float,
    x: np.ndarray,
    z: np.ndarray,
) -> float:
    n = x.shape[0]
    nx_sq = float(np.linalg.norm(metric_at_z.Q @ (x - z)) ** 2)
    nz_sq = float(np.linalg.norm(metric_at_x.Q @ (z - x)) ** 2)
    return (
        (f_x - f_z)
        + 0.5 * (metric_at_z.logdet - metric_at_x.logdet)
        - (n / (2.0 * r * r)) * (nx_sq - nz_sq)
    )


def log_accept_ratio(
    x: np.ndarray,
    z: np.ndarray,
    target: LogConcaveTarget,
    metric_at_x: MetricEval,
    metric_at_z: MetricEval,
    r: float,
) -> float:
    """Log Metropolis ratio for interior x, z; acceptance is min{1, e^L}.

    L = [f(x) - f(z)] + (1/2)[logdet G(z) - logdet G(x)]
        - (n / 2r^2) [ |x-z|^2_{G(z)} - |z-x|^2_{G(x)} ].
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    z = np.asarray(z, dtype=float).reshape(-1)
    f_x = float(target.f(x))
    f_z = float(target.f(z))
    if not math.isfinite(f_z):
        raise NonFiniteDensityError(f"f({z}) is not finite")
    return _log_ratio(f_x, f_z, metric_at_x, metric_at_z, r, x, z)


def step(
    state: ChainState,
    target: LogConcaveTarget,
    P: Polytope,
    config: WalkConfig,
) -> ChainState:
    """One (lazy) transition; mutates and returns the state."""
    rng = state.rng
    if config.lazy and rng.uniform() >= 0.5:
        state.stats.lazy_skips += 1
        return state
    z = propose(state, config)
    state.stats.proposed += 1
    if not contains(P, z):
        # indicator forces rejection; G(z) and f(z) are never evaluated,
        # and the MH uniform is not consumed
        state.stats.rejected_outside += 1
        return state
    metric_z = evaluate_metric(P, z, config.metric)
    f_z = float(target.f(z))
    if not math.isfinite(f_z):
        raise NonFiniteDensityError(f"f({z}) is not finite")
    L = _log_ratio(state.f_x, f_z, state.metric_cache, metric_z, config.r, state.x, z)
    state.stats.record_log_ratio(L)
    u = rng.uniform()
    if math.log(u) < L:
        state.x = z
        state.metric_cache = metric_z
        state.f_x = f_z
        state.stats.accepted += 1
    else:
        state.stats.rejected_mh += 1
    return state


def adapt_step_size(acceptance: float, r: float) -> float:
    """Double r above 0.7 windowed acceptance, halve below 0.3, clamp [1e-6, 1]."""
    if acceptance > 0.7:
        r = 2.0 * r
    elif acceptance < 0.3:
        r = 0.5 * r
    return min(R_MAX, max(R_MIN, r))


def run(
    x0: Union[np.ndarray, Callable[[np.random.Generator], np.ndarray]],
    target: LogConcaveTarget,
    P: Polytope,
    config: WalkConfig,
) -> SampleBatch:
    """Burn in (optionally adapting r), then record every thin-th of `steps` states.

    With steps=0 (or steps < thin) the batch holds just the post-burn-in
    point, so it is never empty. Fully deterministic given config.seed;
    stats cover the recorded phase only.
    """
    rng = np.random.default_rng(config.seed)
    x_init = x0(rng) if callable(x0) else np.asarray(x0, dtype=float).reshape(-1)
    if not contains(P, x_init):
        raise WalkError("initial point is not interior to the polytope")
    f0 = float(target.f(x_init))
    if not math.isfinite(f0):
        raise NonFiniteDensityError("f is not finite at the initial point")
    state = ChainState(
        x=x_init.copy(),
        metric_cache=evaluate_metric(P, x_init, config.metric),
        f_x=f0,
        rng=rng,
    )
    cfg = config
    window_start = (0, 0)  # (proposed, accepted) at window open
    for _ in range(config.burn_in):
        step(state, target, P, cfg)
        if config.adapt:
            dp = state.stats.proposed - window_start[0]
            if dp >= ADAPT_WINDOW:
                da = state.stats.accepted - window_start[1]
                new_r = adapt_step_size(da / dp, cfg.r)
                if new_r != cfg.r:
                    cfg = dataclasses.replace(cfg, r=new_r)
                window_start = (state.stats.proposed, state.stats.accepted)
    # stats for the recorded phase only; r is frozen from here on
    state.stats = StepStats()
    samples = []
    for t in range(1, config.steps + 1):
        step(state, target, P, cfg)
        if t % config.thin == 0:
            samples.append(state.x.copy())
    if not samples:
        samples.append(state.x.copy())
    return SampleBatch(
        samples=np.array(samples),
        stats=state.stats,
        step_size=cfg.r,
        seed=config.seed,
    )


def write_csv(batch: SampleBatch, path: str, header: bool = False) -> None:
    """Samples as CSV rows (17 sig digits), stats as a trailing comment block."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_csv(batch, header=header))


def format_csv(batch: SampleBatch, header: bool = False) -> str:
    n = batch.samples.shape[1] if batch.samples.size else 0
    lines = []
    if header:
        lines.append(",".join(f"x{i + 1}" for i in range(n)))
    for row in batch.samples:
        lines.append(",".join(f"{v:.17g}" for v in row))
    s = batch.stats
    lines.append(f"# proposed={s.proposed} accepted={s.accepted}")
    lines.append(
        f"# lazy_skips={s.lazy_skips} rejected_outside={s.rejected_outside} "
        f"rejected_mh={s.rejected_mh}"
    )
    lines.append(f"# step_size={batch.step_size:.17g} seed={batch.seed}")
    return "\n".join(lines) + "\n"
