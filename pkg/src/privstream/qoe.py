"""Privacy-aware QoE: CC capability, per-segment QoE, and trace evaluation."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .durations import DurationPlan, InfeasiblePlanError, StreamConfig, optimize_durations
from .geometry import FovSpec, TileGrid, top_n_by_dwell
from .link import LinkBudget
from .predictors import LinearArModel, predict_no_motion
from .privacy import PrivacyConfig, privacy_request
from .tileset import TileSet
from .traces import Trace

Predictor = Union[str, LinearArModel]


def cc_capability(budget: LinkBudget, t_com: float, t_cpt: float) -> float:
    """Fraction of a segment's tiles that can be both rendered and delivered."""
    if t_com < 0 or t_cpt < 0:
        raise ValueError("durations must be non-negative")
    tiles = min(budget.C_com * t_com / budget.s_com, budget.C_cpt * t_cpt / budget.s_cpt, budget.M)
    return tiles / budget.M


def segment_qoe(q: TileSet, q_rho: TileSet) -> float:
    if len(q) == 0:
        raise ValueError("ground-truth tile set is empty")
    return q.overlap(q_rho) / len(q)


@dataclass
class QoeReport:
    per_segment: list[float]
    per_segment_doo: list[float]
    cc_capability: float
    plan: DurationPlan
    rho_s: float
    truncated: bool = False

    @property
    def avg_qoe(self) -> float:
        return float(np.mean(self.per_segment))

    @property
    def avg_doo(self) -> float:
        return float(np.mean(self.per_segment_doo))


@dataclass
class QoeSummary:
    """Per-trace reports averaged over a test set."""

    reports: list[QoeReport] = field(default_factory=list)

    @property
    def n_traces(self) -> int:
        return len(self.reports)

    @property
    def avg_qoe(self) -> float:
        return float(np.mean([r.avg_qoe for r in self.reports]))

    @property
    def avg_doo(self) -> float:
        return float(np.mean([r.avg_doo for r in self.reports]))

    @property
    def cc_capability(self) -> float:
        return self.reports[0].cc_capability


def _predict(predictor: Predictor, window: np.ndarray, horizon: int) -> np.ndarray:
    if isinstance(predictor, LinearArModel):
        short = predictor.window_samples - len(window)
        if short > 0:
            window = np.vstack([np.repeat(window[:1], short, axis=0), window])
        return predictor.predict(window[-predictor.window_samples:])
    if predictor == "no_motion":
        return predict_no_motion(window, horizon)
    raise ValueError(f"unknown predictor {predictor!r}")


def _mask_seed(seed: int, l: int) -> int:
    return int(np.random.SeedSequence([seed, l]).generate_state(1)[0])


def evaluate_trace(
    trace: Trace,
    predictor: Predictor,
    privacy: PrivacyConfig,
    budget: LinkBudget,
    cfg: StreamConfig,
    fov: FovSpec,
    grid: TileGrid | None = None,
    *,
    plan: DurationPlan | None = None,
    audit: list | None = None,
) -> QoeReport:
    """Stream segments ``l0..L`` of one trace proactively and score them.

    For each segment the predictor sees only the ``obw_samples`` samples
    that end ``gap_samples`` before the segment starts; the predicted tiles
    are masked up to ``N_p`` and compared with the tiles actually watched.
    Pass a list as ``audit`` to record every slice of the trace that is read.
    """
    grid = grid or TileGrid()
    if grid.M != budget.M:
        raise ValueError(f"grid has {grid.M} tiles, budget has {budget.M}")
    if abs(trace.tau - cfg.tau) > 1e-12 or abs(trace.T_seg - cfg.T_seg) > 1e-12:
        raise ValueError("trace sampling does not match the stream configuration")
    if plan is None:
        plan = optimize_durations(budget, privacy.rho_s, cfg, fov.n_fov)
    if not plan.feasible:
        raise InfeasiblePlanError(plan)
    if plan.obw_samples < 1:
        raise ValueError("plan leaves no observation samples")
    if plan.gap_samples < 0:
        raise ValueError(f"observation window of {plan.obw_samples} samples overruns the proactive window")
    if isinstance(predictor, LinearArModel) and predictor.window_samples != plan.obw_samples:
        raise ValueError(
            f"model window {predictor.window_samples} != planned observation {plan.obw_samples} samples"
        )
    if trace.L < cfg.l0:
        raise ValueError(f"trace has {trace.L} segments, first proactive segment is {cfg.l0}")

    horizon = trace.samples_per_segment
    qoe, doo = [], []
    truncated = False
    for l in range(cfg.l0, trace.L + 1):
        seg_start, seg_stop = trace.segment_bounds(l)
        stop = seg_start - plan.gap_samples
        start = stop - plan.obw_samples
        if start < 0:
            truncated, start = True, 0
        if audit is not None:
            audit.append(("observe", l, start, stop))
        predicted = _predict(predictor, trace.samples[start:stop], horizon)
        e = top_n_by_dwell(grid, predicted, fov)
        q_rho = privacy_request(grid, e, plan.n_p, privacy, _mask_seed(privacy.seed, l)).tiles
        if audit is not None:
            audit.append(("truth", l, seg_start, seg_stop))
        q = top_n_by_dwell(grid, trace.samples[seg_start:seg_stop], fov)
        qoe.append(segment_qoe(q, q_rho))
        doo.append(segment_qoe(q, e))
    return QoeReport(qoe, doo, cc_capability(budget, plan.t_com, plan.t_cpt), plan, privacy.rho_s, truncated)


def evaluate_traces(
    traces,
    predictor: Predictor,
    privacy: PrivacyConfig,
    budget: LinkBudget,
    cfg: StreamConfig,
    fov: FovSpec,
    grid: TileGrid | None = None,
    workers: int = 1,
) -> QoeSummary:
    """Evaluate every trace with one shared plan; results keep input order."""
    plan = optimize_durations(budget, privacy.rho_s, cfg, fov.n_fov)

    def one(t):
        return evaluate_trace(t, predictor, privacy, budget, cfg, fov, grid, plan=plan)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            reports = list(pool.map(one, traces))
    else:
        reports = [one(t) for t in traces]
    if not reports:
        raise ValueError("no traces to evaluate")
    return QoeSummary(reports)
