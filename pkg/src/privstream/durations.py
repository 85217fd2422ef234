"""Closed-form split of the proactive window between observation and render-plus-send.

Maximising QoE under a fixed CC capability reduces to minimising the render
plus send time that delivers ``N_p`` tiles; the remaining time (floored to
whole samples) becomes the observation window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .link import LinkBudget
from .privacy import n_privacy_tiles
from .traces import samples_per

# floor() slack so (T_ps - t_cc)/tau landing a hair under an integer is not
# rounded down a whole sample
_FLOOR_SLACK = 1e-9


@dataclass(frozen=True)
class StreamConfig:
    T_seg: float = 1.0
    l0: int = 3
    tau: float = 0.1

    def __post_init__(self) -> None:
        if self.l0 < 2:
            raise ValueError(f"l0 must be >= 2, got {self.l0}")
        if self.tau <= 0 or self.T_seg <= 0:
            raise ValueError("tau and T_seg must be positive")
        samples_per(self.T_seg, self.tau, "T_seg")

    @property
    def T_ps(self) -> float:
        return (self.l0 - 1) * self.T_seg

    @property
    def ps_samples(self) -> int:
        return (self.l0 - 1) * samples_per(self.T_seg, self.tau, "T_seg")


@dataclass(frozen=True)
class DurationPlan:
    """Durations (s) for one proactively streamed segment.

    ``status`` is ``"ok"``, ``"degenerate"`` (feasible, but no whole sample
    is left for observation) or ``"infeasible"`` (``t_cc > T_ps``, with the
    shortfall in ``deficit``).
    """

    t_obw: float
    t_com: float
    t_cpt: float
    obw_samples: int
    n_p: int
    T_ps: float
    tau: float
    status: str = "ok"
    deficit: float = 0.0

    @property
    def t_cc(self) -> float:
        return self.t_com + self.t_cpt

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"

    @property
    def gap_samples(self) -> int:
        """Whole samples between the end of observation and the segment start."""
        return round(self.T_ps / self.tau) - self.obw_samples


class InfeasiblePlanError(ValueError):
    def __init__(self, plan: DurationPlan):
        super().__init__(
            f"render+send needs {plan.t_cc:.6g} s but only {plan.T_ps:.6g} s is available "
            f"(deficit {plan.deficit:.6g} s)"
        )
        self.plan = plan


def obw_samples_from_durations(T_ps: float, t_cc: float, tau: float) -> int:
    return max(0, math.floor((T_ps - t_cc) / tau + _FLOOR_SLACK))


def obw_samples_from_rate(T_ps: float, n_p: int, r_cc_star: float, M: int, tau: float) -> int:
    """Observation samples written in terms of the resources rate."""
    return max(0, math.floor((T_ps - n_p / (r_cc_star * M)) / tau + _FLOOR_SLACK))


def _plan(t_com, t_cpt, n_p, cfg: StreamConfig) -> DurationPlan:
    t_cc = t_com + t_cpt
    if t_cc > cfg.T_ps * (1 + 1e-12):
        return DurationPlan(0.0, t_com, t_cpt, 0, n_p, cfg.T_ps, cfg.tau, "infeasible", t_cc - cfg.T_ps)
    k = obw_samples_from_durations(cfg.T_ps, t_cc, cfg.tau)
    # rounded so 17 * 0.1 prints as 1.7; far below any duration resolution
    return DurationPlan(round(cfg.tau * k, 12), t_com, t_cpt, k, n_p, cfg.T_ps, cfg.tau, "ok" if k > 0 else "degenerate")


def optimize_durations(budget: LinkBudget, rho_s: float, cfg: StreamConfig, n_fov: int) -> DurationPlan:
    n_p = n_privacy_tiles(rho_s, budget.M, n_fov)
    t_com = budget.s_com * n_p / budget.C_com
    t_cpt = budget.s_cpt * n_p / budget.C_cpt
    return _plan(t_com, t_cpt, n_p, cfg)


def implied_resources_rate(plan: DurationPlan, M: int) -> float:
    """CC capability per second of the plan, ``(n_p / M) / t_cc``."""
    return plan.n_p / M / plan.t_cc


def brute_force_durations(
    budget: LinkBudget, rho_s: float, cfg: StreamConfig, n_fov: int, grid_step: float | None = None
) -> DurationPlan:
    """Exhaustive grid search for the cheapest ``(t_com, t_cpt)`` delivering ``N_p`` tiles.

    Scans every grid pair with ``t_com + t_cpt <= T_ps`` and keeps the
    feasible one with the smallest sum (lexicographically smallest pair on
    ties). Independent of the closed form; used to check it.
    """
    if grid_step is None:
        grid_step = cfg.tau / 20
    if grid_step > cfg.tau / 10 + 1e-15:
        raise ValueError(f"grid_step {grid_step} is coarser than tau/10")
    n_p = n_privacy_tiles(rho_s, budget.M, n_fov)
    n = int(math.floor(cfg.T_ps / grid_step + 1e-9))
    t = np.arange(n + 1) * grid_step
    tiles_com = np.minimum(budget.C_com * t / budget.s_com, budget.M)
    tiles_cpt = np.minimum(budget.C_cpt * t / budget.s_cpt, budget.M)
    ok = np.minimum(tiles_com[:, None], tiles_cpt[None, :]) >= n_p
    ok &= (t[:, None] + t[None, :]) <= cfg.T_ps + 1e-12
    if not ok.any():
        return DurationPlan(0.0, float("nan"), float("nan"), 0, n_p, cfg.T_ps, cfg.tau, "infeasible", float("inf"))
    i, j = np.nonzero(ok)
    s = i + j
    best = np.flatnonzero(s == s.min())
    # np.nonzero is row-major, so the first minimiser has the smallest t_com
    k = best[0]
    return _plan(float(t[i[k]]), float(t[j[k]]), n_p, cfg)


def check_feasible(plan: DurationPlan) -> DurationPlan:
    if not plan.feasible:
        raise InfeasiblePlanError(plan)
    return plan
