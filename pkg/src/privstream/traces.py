"""Head-movement traces: CSV ingestion, seeded synthesis, segmentation, splits."""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import clamp_pitch, normalize_gazes, wrap_yaw

CSV_HEADER = ("timestamp_s", "yaw_deg", "pitch_deg")


class TraceFormatError(ValueError):
    """Raised when a trace file cannot be ingested."""


def samples_per(duration: float, tau: float, what: str = "duration") -> int:
    """Return ``duration / tau`` as an integer, or raise if it is not one."""
    ratio = duration / tau
    n = round(ratio)
    if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
        raise ValueError(f"{what}={duration} is not a positive multiple of tau={tau}")
    return n


@dataclass(frozen=True, eq=False)
class Trace:
    """Gaze samples at a uniform step ``tau``, cut into segments of ``T_seg``.

    ``samples`` is a read-only ``(n, 2)`` array of yaw/pitch degrees.
    """

    samples: np.ndarray
    tau: float
    T_seg: float
    user_id: str = "u0"
    video_id: str = "v0"

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        samples_per(self.T_seg, self.tau, "T_seg")
        s = normalize_gazes(self.samples)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        if self.L < 1:
            raise ValueError("trace is shorter than one segment")

    @property
    def samples_per_segment(self) -> int:
        return samples_per(self.T_seg, self.tau, "T_seg")

    @property
    def duration(self) -> float:
        return len(self.samples) * self.tau

    @property
    def L(self) -> int:
        """Number of whole segments covered by the trace."""
        return len(self.samples) // self.samples_per_segment

    def segment_bounds(self, l: int) -> tuple[int, int]:
        """Sample index range ``[start, stop)`` of segment ``l`` (1-based)."""
        if not 1 <= l <= self.L:
            raise ValueError(f"segment {l} out of range 1..{self.L}")
        n = self.samples_per_segment
        return (l - 1) * n, l * n

    def segment(self, l: int) -> np.ndarray:
        start, stop = self.segment_bounds(l)
        return self.samples[start:stop]


def load_csv(path, tau: float = 0.1, T_seg: float = 1.0, user_id=None, video_id=None) -> Trace:
    """Read a ``timestamp_s,yaw_deg,pitch_deg`` file and resample it to step ``tau``.

    Resampling picks, for every grid time ``t0 + i*tau``, the row with the
    nearest timestamp (earlier row on exact ties). A file already sampled at
    ``tau`` comes back unchanged.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise TraceFormatError(f"{path}: not UTF-8 ({exc})") from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows or tuple(c.strip() for c in rows[0]) != CSV_HEADER:
        raise TraceFormatError(f"{path}: line 1: expected header {','.join(CSV_HEADER)}")
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise TraceFormatError(f"{path}: line {lineno}: expected 3 fields, got {len(row)}")
        try:
            t, yaw, pitch = (float(c) for c in row)
        except ValueError:
            raise TraceFormatError(f"{path}: line {lineno}: non-numeric field in {row!r}") from None
        if not all(map(math.isfinite, (t, yaw, pitch))):
            raise TraceFormatError(f"{path}: line {lineno}: non-finite value in {row!r}")
        if values and t <= values[-1][0]:
            raise TraceFormatError(f"{path}: line {lineno}: timestamp {t} is not increasing")
        values.append((t, yaw, pitch))
    if not values:
        raise TraceFormatError(f"{path}: no data rows")
    data = np.array(values)
    times = data[:, 0]
    n = int(math.floor((times[-1] - times[0]) / tau + 1e-6)) + 1
    if n * tau < 2 * T_seg - 1e-9:
        raise TraceFormatError(
            f"{path}: duration {n * tau:.6g} s is shorter than two segments ({2 * T_seg} s)"
        )
    grid = times[0] + np.arange(n) * tau
    right = np.clip(np.searchsorted(times, grid), 1, len(times) - 1)
    left = right - 1
    pick = np.where(grid - times[left] <= times[right] - grid, left, right)
    if len(times) == 1:
        pick = np.zeros(n, dtype=int)
    stem = path.stem
    if user_id is None or video_id is None:
        u, _, v = stem.partition("__")
        user_id = user_id if user_id is not None else u
        video_id = video_id if video_id is not None else (v or stem)
    return Trace(data[pick, 1:], tau=tau, T_seg=T_seg, user_id=str(user_id), video_id=str(video_id))


def save_csv(trace: Trace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_HEADER) + "\n")
        for i, (yaw, pitch) in enumerate(trace.samples.tolist()):
            fh.write(f"{i * trace.tau!r},{yaw!r},{pitch!r}\n")


def load_dir(directory, tau: float = 0.1, T_seg: float = 1.0) -> list[Trace]:
    """Load every ``<user>__<video>.csv`` file in ``directory``, sorted by name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"{directory}: not a directory")
    return [load_csv(p, tau, T_seg) for p in sorted(directory.glob("*.csv"))]


def synth_trace(
    seed: int,
    duration: float = 60.0,
    tau: float = 0.1,
    T_seg: float = 1.0,
    momentum: float = 0.9,
    *,
    speed: float = 15.0,
    pitch_scale: float = 0.5,
    jitter: float = 0.0,
    user_id: str = "u0",
    video_id: str = "v0",
) -> Trace:
    """Seeded random head motion on the sphere.

    The per-axis angular velocity (deg/s) is a stationary AR(1) process with
    coefficient ``momentum`` and standard deviation ``speed`` (``speed *
    pitch_scale`` for pitch). Pitch reflects at the poles, flipping its
    velocity; yaw wraps. ``jitter`` adds white sensor noise (degrees) to the
    recorded positions only.
    """
    if not 0 <= momentum < 1:
        raise ValueError(f"momentum must be in [0, 1), got {momentum}")
    if duration < 2 * T_seg:
        raise ValueError(f"duration {duration} is shorter than two segments")
    n = samples_per(duration, tau, "duration")
    rng = np.random.default_rng(seed)
    sigma = np.array([speed, speed * pitch_scale])
    innov = rng.standard_normal((n, 2)) * sigma * math.sqrt(1 - momentum**2)
    v = rng.standard_normal(2) * sigma
    pos = np.array([rng.uniform(-180, 180), np.clip(rng.normal(0, 15), -60, 60)])
    out = np.empty((n, 2))
    out[0] = pos
    for i in range(1, n):
        v = momentum * v + innov[i]
        pos = pos + v * tau
        if pos[1] > 90:
            pos[1] = 180 - pos[1]
            v[1] = -v[1]
        elif pos[1] < -90:
            pos[1] = -180 - pos[1]
            v[1] = -v[1]
        pos[0] = wrap_yaw(pos[0])
        out[i] = pos
    if jitter > 0:
        out = out + rng.standard_normal((n, 2)) * jitter
        out[:, 0] = wrap_yaw(out[:, 0])
        out[:, 1] = clamp_pitch(out[:, 1])
    return Trace(out, tau=tau, T_seg=T_seg, user_id=user_id, video_id=video_id)


@dataclass
class TraceSet:
    traces: list[Trace]
    split_seed: int = 0
    train_fraction: float = 0.8


def split(ts: TraceSet) -> tuple[list[Trace], list[Trace]]:
    """Shuffle by ``split_seed`` and cut into disjoint train/test lists."""
    n = len(ts.traces)
    if n < 2:
        raise ValueError(f"need at least 2 traces to split, got {n}")
    if not 0 < ts.train_fraction < 1:
        raise ValueError(f"train_fraction must be in (0, 1), got {ts.train_fraction}")
    n_train = min(max(int(math.floor(ts.train_fraction * n + 0.5)), 1), n - 1)
    order = np.random.default_rng(ts.split_seed).permutation(n)
    train = [ts.traces[i] for i in order[:n_train]]
    test = [ts.traces[i] for i in order[n_train:]]
    return train, test


def user_counts(traces) -> dict[str, int]:
    """Training-trace count ``n_k`` per user, in first-seen order."""
    return dict(Counter(t.user_id for t in traces))


def group_by_user(traces) -> dict[str, list[Trace]]:
    groups: dict[str, list[Trace]] = {}
    for t in traces:
        groups.setdefault(t.user_id, []).append(t)
    return groups
