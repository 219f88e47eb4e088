"""Diagonal loss-gain (birth-death) form of the master equation.

For diagonal states the master equation closes on the level populations
p_i with nearest-neighbour transitions only:

    dp_i/dt = down(i+1) p_{i+1} + up(i-1) p_{i-1} - [down(i) + up(i)] p_i,

with down(i) = i * g_down(t) and up(i) = (i+1) * g_up(t).  These are the
unique neighbour rates that make the ladder identical to the diagonal
restriction of the full dissipator, so :func:`evolve_populations` and
the density-matrix integrator agree pointwise for diagonal initial
states.  The upward rate out of the top level is zero (the reflecting
truncation wall), which conserves total probability exactly.
"""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass

from .lindblad import IntegrationError, IntegratorConfig, RateModel, Trajectory


@dataclass(frozen=True)
class LadderRates:
    """Per-level transition rates: down[i] is i -> i-1, up[i] is i -> i+1."""

    down: np.ndarray
    up: np.ndarray


def ladder_rates(model: RateModel, n_sys: float, t: float, dim: int) -> LadderRates:
    """Neighbour-transition rates at time t for mean occupation n_sys."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    g_down, g_up = model.rates(t, n_sys)
    levels = np.arange(dim, dtype=float)
    down = levels * g_down
    up = (levels + 1.0) * g_up
    up[-1] = 0.0
    return LadderRates(down=down, up=up)


def _ladder_rhs(p: np.ndarray, t: float, model: RateModel,
                levels: np.ndarray) -> np.ndarray:
    rates = ladder_rates(model, float(levels @ p), t, p.size)
    dp = -(rates.down + rates.up) * p
    dp[:-1] += rates.down[1:] * p[1:]
    dp[1:] += rates.up[:-1] * p[:-1]
    return dp


def evolve_populations(p0: np.ndarray, model: RateModel,
                       cfg: IntegratorConfig) -> Trajectory:
    """Fixed-step RK4 for the population ladder; returns the same
    Trajectory record as the density-matrix integrator.

    Purity is sum(p^2) and the checkpointed "minimum eigenvalue" is the
    most negative population.  Probability conservation and the
    nonnegativity floor are enforced with the same tolerance budget as
    the matrix integrator.
    """
    p0 = np.asarray(p0, dtype=float)
    if p0.ndim != 1 or p0.size < 2:
        raise ValueError(f"p0 must be a 1-D vector of >= 2 levels, got shape {p0.shape}")
    if p0.min() < -1e-12:
        raise ValueError(f"populations must be >= -1e-12, got min {p0.min():g}")
    total = p0.sum()
    if not (1.0 - cfg.leak_tol <= total <= 1.0 + 1e-12):
        raise ValueError(f"populations must sum to 1 within budget, got {total!r}")

    levels = np.arange(p0.size, dtype=float)
    p = p0.copy()
    dt = cfg.dt
    n_steps = int(round(cfg.t_end / dt))

    times, n_bars, pops, traces, purities = [], [], [], [], []
    neg_rate, in_bound = [], []
    check_times, min_ps = [], []

    def record(step):
        t = step * dt
        n_sys = float(levels @ p)
        g_down, g_up = model.rates(t, n_sys)
        times.append(t)
        n_bars.append(n_sys)
        pops.append(p.copy())
        traces.append(float(p.sum()))
        purities.append(float(p @ p))
        neg_rate.append(g_down < 0.0 or g_up < 0.0)
        in_bound.append((n_sys - model.n_res) * model.gamma * t <= model.n_res)

    def checkpoint(step):
        t = step * dt
        total = float(p.sum())
        low = float(p.min())
        if not np.all(np.isfinite(p)):
            raise IntegrationError("populations are non-finite (unstable step size?)",
                                   t, total, float("nan"))
        check_times.append(t)
        min_ps.append(low)
        if not (1.0 - cfg.leak_tol <= total <= 1.0 + 1e-9):
            raise IntegrationError("probability leak exceeds budget", t, total, low)
        if not low >= -cfg.pos_tol:
            raise IntegrationError("negative population", t, total, low)

    record(0)
    checkpoint(0)
    for step in range(1, n_steps + 1):
        t = (step - 1) * dt
        k1 = _ladder_rhs(p, t, model, levels)
        k2 = _ladder_rhs(p + 0.5 * dt * k1, t + 0.5 * dt, model, levels)
        k3 = _ladder_rhs(p + 0.5 * dt * k2, t + 0.5 * dt, model, levels)
        k4 = _ladder_rhs(p + dt * k3, t + dt, model, levels)
        p = p + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % cfg.record_every == 0 or step == n_steps:
            record(step)
        if step % cfg.check_every == 0 or step == n_steps:
            checkpoint(step)

    return Trajectory(
        times=np.array(times),
        n_bar=np.array(n_bars),
        populations=np.array(pops),
        trace=np.array(traces),
        purity=np.array(purities),
        negative_rate=np.array(neg_rate, dtype=bool),
        within_rate_bound=np.array(in_bound, dtype=bool),
        check_times=np.array(check_times),
        min_eigenvalues=np.array(min_ps),
    )
