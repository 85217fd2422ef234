"""Gaze predictors with federated training, plus the average degree-of-overlap metric.

The learned predictor is a ridge-regularised linear map from the successive
gaze deltas inside an observation window to the deltas of the predicted
horizon. The first output delta spans the gap between the last observed
sample and the first horizon sample; the rest are sample-to-sample steps.
Yaw deltas are always the shortest signed difference, so the ±180° seam
never appears as a jump.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .geometry import clamp_pitch, normalize_gazes, wrap_yaw, yaw_delta
from .tileset import TileSet

PREDICTOR_KINDS = ("no_motion", "linear_ar")


@dataclass(frozen=True)
class PredictorConfig:
    kind: str = "no_motion"
    window_samples: int = 1
    horizon_samples: int = 10
    gap_samples: int = 0

    def __post_init__(self) -> None:
        if self.kind not in PREDICTOR_KINDS:
            raise ValueError(f"unknown predictor kind {self.kind!r}")
        if self.window_samples < 1 or self.horizon_samples < 1 or self.gap_samples < 0:
            raise ValueError(f"invalid predictor shape {self}")


@dataclass
class LinearArModel:
    """Weights of shape ``(2*horizon, 2*(window-1))``.

    ``passes`` counts the full passes over the training data folded into
    the weights; it is bookkeeping only.
    """

    weights: np.ndarray
    window_samples: int
    horizon_samples: int
    gap_samples: int = 0
    ridge_lambda: float = 0.0
    passes: int = 0

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=float)
        shape = (2 * self.horizon_samples, 2 * (self.window_samples - 1))
        if self.weights.shape != shape:
            raise ValueError(f"weights shape {self.weights.shape} != {shape}")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")
        if self.ridge_lambda < 0:
            raise ValueError("ridge_lambda must be non-negative")

    @classmethod
    def zeros(cls, cfg: PredictorConfig, ridge_lambda: float = 0.0) -> LinearArModel:
        shape = (2 * cfg.horizon_samples, 2 * (cfg.window_samples - 1))
        return cls(np.zeros(shape), cfg.window_samples, cfg.horizon_samples, cfg.gap_samples, ridge_lambda)

    @classmethod
    def init(cls, cfg: PredictorConfig, seed: int, scale: float = 1e-3, ridge_lambda: float = 0.0) -> LinearArModel:
        rng = np.random.default_rng(seed)
        shape = (2 * cfg.horizon_samples, 2 * (cfg.window_samples - 1))
        return cls(rng.normal(0.0, scale, shape), cfg.window_samples, cfg.horizon_samples, cfg.gap_samples, ridge_lambda)

    @property
    def config(self) -> PredictorConfig:
        return PredictorConfig("linear_ar", self.window_samples, self.horizon_samples, self.gap_samples)

    def copy(self) -> LinearArModel:
        return replace(self, weights=self.weights.copy())

    def predict(self, window, horizon_samples: int | None = None) -> np.ndarray:
        return predict_linear(self, window)

    def save(self, path) -> None:
        rows, cols = self.weights.shape
        lines = [
            f"linear_ar rows={rows} cols={cols} window={self.window_samples} "
            f"horizon={self.horizon_samples} gap={self.gap_samples} "
            f"ridge_lambda={self.ridge_lambda!r} passes={self.passes}"
        ]
        lines += [repr(float(w)) for w in self.weights.ravel()]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> LinearArModel:
        path = Path(path)
        lines = path.read_text(encoding="utf-8").split()
        if not lines or lines[0] != "linear_ar":
            raise ValueError(f"{path}: not a linear_ar model file")
        header = dict(tok.split("=", 1) for tok in lines[1:8])
        rows, cols = int(header["rows"]), int(header["cols"])
        values = np.array([float(v) for v in lines[8:]])
        if values.size != rows * cols:
            raise ValueError(f"{path}: expected {rows * cols} weights, found {values.size}")
        return cls(
            values.reshape(rows, cols),
            int(header["window"]),
            int(header["horizon"]),
            int(header["gap"]),
            float(header["ridge_lambda"]),
            int(header["passes"]),
        )


def gaze_deltas(gazes) -> np.ndarray:
    """Successive ``(n-1, 2)`` deltas with yaw unwrapped across the seam."""
    g = np.asarray(gazes, dtype=float)
    return np.column_stack([yaw_delta(g[:-1, 0], g[1:, 0]), np.diff(g[:, 1])])


def integrate_deltas(start, deltas) -> np.ndarray:
    pos = np.asarray(start, dtype=float) + np.cumsum(np.asarray(deltas).reshape(-1, 2), axis=0)
    return np.column_stack([wrap_yaw(pos[:, 0]), clamp_pitch(pos[:, 1])])


def predict_no_motion(window, horizon_samples: int) -> np.ndarray:
    """Repeat the last observed gaze ``horizon_samples`` times."""
    w = np.asarray(window, dtype=float)
    if w.size == 0:
        raise ValueError("observation window is empty")
    last = normalize_gazes(w)[-1]
    return np.tile(last, (horizon_samples, 1))


def predict_linear(model: LinearArModel, window) -> np.ndarray:
    w = normalize_gazes(window)
    if len(w) != model.window_samples:
        raise ValueError(f"window has {len(w)} samples, model expects {model.window_samples}")
    x = gaze_deltas(w).ravel()
    return integrate_deltas(w[-1], model.weights @ x)


def make_examples(traces, cfg: PredictorConfig, stride: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Sliding ``(window, gap, horizon)`` examples as feature/target matrices."""
    W, G, H = cfg.window_samples, cfg.gap_samples, cfg.horizon_samples
    span = W + G + H
    xs, ys = [], []
    for trace in traces:
        g = trace.samples if hasattr(trace, "samples") else np.asarray(trace, dtype=float)
        n = len(g)
        if n < span:
            continue
        d = gaze_deltas(g)
        # prefix sums let the gap-spanning first target delta be read in O(1)
        c = np.vstack([np.zeros((1, 2)), np.cumsum(d, axis=0)])
        starts = np.arange(0, n - span + 1, stride)
        xi = starts[:, None] + np.arange(W - 1)[None, :]
        x = d[xi].reshape(len(starts), -1)
        first = c[starts + W + G] - c[starts + W - 1]
        hi = starts[:, None] + (W + G) + np.arange(H - 1)[None, :]
        rest = d[hi]
        y = np.concatenate([first[:, None, :], rest], axis=1).reshape(len(starts), -1)
        xs.append(x)
        ys.append(y)
    if not xs:
        raise ValueError(f"no trace is long enough for a {span}-sample example")
    return np.vstack(xs), np.vstack(ys)


def loss_and_grad(weights: np.ndarray, X: np.ndarray, Y: np.ndarray, ridge_lambda: float = 0.0):
    """Mean squared error over all target entries plus ``lambda * ||W||^2``."""
    R = X @ weights.T - Y
    n = R.size
    loss = float(np.sum(R * R) / n + ridge_lambda * np.sum(weights * weights))
    grad = 2.0 * (R.T @ X) / n + 2.0 * ridge_lambda * weights
    return loss, grad


def _descend(model: LinearArModel, X, Y, epochs: int, lr: float) -> LinearArModel:
    W = model.weights.copy()
    for _ in range(epochs):
        loss, grad = loss_and_grad(W, X, Y, model.ridge_lambda)
        if not math.isfinite(loss):
            raise FloatingPointError("training diverged; lower the learning rate")
        W -= lr * grad
    return replace(model, weights=W, passes=model.passes + epochs)


def train_local(model: LinearArModel, traces, cfg: PredictorConfig, epochs: int, lr: float) -> LinearArModel:
    """Full-batch gradient descent for ``epochs`` passes over all examples.

    Returns a new model; the input is not modified.
    """
    if cfg.window_samples != model.window_samples or cfg.horizon_samples != model.horizon_samples:
        raise ValueError("predictor config does not match model shape")
    X, Y = make_examples(traces, cfg)
    return _descend(model, X, Y, epochs, lr)


def training_loss(model: LinearArModel, traces, cfg: PredictorConfig | None = None) -> float:
    X, Y = make_examples(traces, cfg or model.config)
    return loss_and_grad(model.weights, X, Y, model.ridge_lambda)[0]


@dataclass
class FedConfig:
    weights: Sequence[float]
    local_epochs: int = 50
    rounds: int = 10
    learning_rate: float = 0.1

    def __post_init__(self) -> None:
        self.weights = [float(c) for c in self.weights]
        if not self.weights or any(c < 0 for c in self.weights):
            raise ValueError("client weights must be non-negative and non-empty")
        if abs(math.fsum(self.weights) - 1.0) > 1e-9:
            raise ValueError(f"client weights sum to {math.fsum(self.weights)}, expected 1")

    @property
    def K_clients(self) -> int:
        return len(self.weights)

    @classmethod
    def from_clients(cls, clients, **kw) -> FedConfig:
        """Weights ``c_k = n_k / N_train`` from per-client trace counts."""
        counts = [len(c) for c in clients]
        total = sum(counts)
        return cls([n / total for n in counts], **kw)


def federated_average(
    clients: Sequence[Sequence],
    fed: FedConfig,
    cfg: PredictorConfig,
    seed: int = 0,
    *,
    ridge_lambda: float = 0.0,
    init: LinearArModel | None = None,
    on_round: Callable[[int, LinearArModel], None] | None = None,
) -> LinearArModel:
    """FederatedAveraging with full participation.

    Every round each client runs ``fed.local_epochs`` of :func:`train_local`
    from the current global model; the new global model is the
    ``fed.weights``-weighted sum of the client models, accumulated in client
    order. The initial model is drawn from ``seed`` unless ``init`` is given.
    """
    if len(clients) != fed.K_clients:
        raise ValueError(f"{len(clients)} clients but {fed.K_clients} weights")
    if any(len(c) == 0 for c in clients):
        raise ValueError("every client needs at least one training trace")
    data = [make_examples(c, cfg) for c in clients]
    model = init.copy() if init is not None else LinearArModel.init(cfg, seed, ridge_lambda=ridge_lambda)
    for r in range(fed.rounds):
        acc = np.zeros_like(model.weights)
        for (X, Y), c in zip(data, fed.weights):
            local = _descend(model, X, Y, fed.local_epochs, fed.learning_rate)
            acc += c * local.weights
        model = replace(model, weights=acc, passes=model.passes + fed.local_epochs)
        if on_round is not None:
            on_round(r + 1, model)
    return model


@dataclass
class DooReport:
    per_segment: list[float] = field(default_factory=list)

    @property
    def average(self) -> float:
        return float(np.mean(self.per_segment))


def segment_doo(truth: TileSet, predicted: TileSet) -> float:
    if len(truth) == 0:
        raise ValueError("ground-truth tile set is empty")
    return truth.overlap(predicted) / len(truth)


def average_doo(truth: Sequence[TileSet], predicted: Sequence[TileSet]) -> DooReport:
    """Mean over segments of ``|q ∩ e| / |q|``."""
    if len(truth) != len(predicted) or not truth:
        raise ValueError("truth and prediction lists must have equal non-zero length")
    return DooReport([segment_doo(q, e) for q, e in zip(truth, predicted)])
