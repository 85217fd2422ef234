"""Sweeps over (sDoP, resources rate, predictor) and their CSV output."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import ExperimentConfig
from .durations import optimize_durations
from .predictors import FedConfig, LinearArModel, PredictorConfig, federated_average
from .privacy import PrivacyConfig
from .qoe import evaluate_trace, QoeSummary
from .traces import Trace, group_by_user

CSV_COLUMNS = ("rho_s", "r_cc_star", "predictor", "t_obw_s", "cc_capability", "avg_doo", "avg_qoe", "n_traces", "status")


@dataclass(frozen=True)
class SweepRow:
    rho_s: float
    r_cc_star: float
    predictor: str
    t_obw_s: float | None
    cc_capability: float | None
    avg_doo: float | None
    avg_qoe: float | None
    n_traces: int
    status: str = "ok"

    def fields(self) -> list[str]:
        def fmt(v):
            return "" if v is None else repr(float(v)) if isinstance(v, float) else str(v)

        return [fmt(getattr(self, c)) for c in CSV_COLUMNS]


def cell_seed(seed: int, i_rho: int, i_rcc: int, i_pred: int) -> int:
    """Per-cell RNG seed; depends only on the cell's position in the sweep."""
    return int(np.random.SeedSequence([seed, i_rho, i_rcc, i_pred]).generate_state(1)[0])


def train_federated(
    train: Sequence[Trace], cfg: ExperimentConfig, window: int, gap: int, seed: int = 0, on_round=None
) -> LinearArModel:
    """Federated linear predictor with one client per user in ``train``."""
    pcfg = PredictorConfig("linear_ar", window, train[0].samples_per_segment, gap)
    clients = list(group_by_user(train).values())
    fed = FedConfig.from_clients(
        clients, local_epochs=cfg.local_epochs, rounds=cfg.rounds, learning_rate=cfg.learning_rate
    )
    init = LinearArModel.init(pcfg, seed, cfg.init_scale, cfg.ridge_lambda)
    return federated_average(clients, fed, pcfg, seed, init=init, on_round=on_round)


def run_sweep(
    cfg: ExperimentConfig,
    test: Sequence[Trace],
    train: Sequence[Trace] = (),
    model: LinearArModel | None = None,
    workers: int | None = None,
) -> list[SweepRow]:
    """Evaluate every (rho, R_cc*, predictor) cell over ``test``.

    Linear predictors are trained per distinct (window, gap) pair on
    ``train`` unless ``model`` already has that shape. Rows come back in
    sweep order and do not depend on ``workers``.
    """
    workers = cfg.workers if workers is None else workers
    base = cfg.budget()
    cells = []
    for i, rho in enumerate(cfg.rho_values):
        for j, rcc in enumerate(cfg.rcc_values):
            budget = base.scaled_to(rcc)
            plan = optimize_durations(budget, rho, cfg.stream, cfg.fov.n_fov)
            for k, name in enumerate(cfg.predictors):
                cells.append((i, j, k, rho, rcc, name, budget, plan))

    models: dict[tuple[int, int], LinearArModel] = {}
    for *_, name, _, plan in cells:
        key = (plan.obw_samples, plan.gap_samples)
        if name != "linear_ar" or plan.status != "ok" or key in models:
            continue
        if model is not None and (model.window_samples, model.gap_samples) == key:
            models[key] = model
        elif train:
            models[key] = train_federated(train, cfg, *key, seed=cfg.sweep_seed)
        else:
            raise ValueError(f"no training traces for a linear predictor with window/gap {key}")

    def run(cell) -> SweepRow:
        i, j, k, rho, rcc, name, budget, plan = cell
        if plan.status != "ok":
            return SweepRow(rho, rcc, name, None, None, None, None, 0, plan.status)
        privacy = PrivacyConfig(rho, cfg.privacy.scheme, cell_seed(cfg.sweep_seed, i, j, k))
        predictor = models[(plan.obw_samples, plan.gap_samples)] if name == "linear_ar" else name
        reports = [
            evaluate_trace(t, predictor, privacy, budget, cfg.stream, cfg.fov, cfg.grid, plan=plan) for t in test
        ]
        s = QoeSummary(reports)
        return SweepRow(rho, rcc, name, plan.t_obw, s.cc_capability, s.avg_doo, s.avg_qoe, s.n_traces)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(run, cells))
    return [run(c) for c in cells]


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow(row.fields())
    return buf.getvalue()
