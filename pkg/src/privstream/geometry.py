"""Equirectangular tile grid and field-of-view tile selection.

Gaze directions are ``(yaw, pitch)`` pairs in degrees with yaw in
``[-180, 180)`` (wrapped) and pitch in ``[-90, 90]`` (clamped). Arrays of
gazes have shape ``(n, 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .tileset import TileSet

# Slack on the cosine comparison so that tiles at exactly the cap radius are
# classified identically under symmetric rotations.
_COS_SLACK = 1e-12


def wrap_yaw(yaw):
    """Wrap yaw angles (degrees) into ``[-180, 180)``."""
    return (np.asarray(yaw, dtype=float) + 180.0) % 360.0 - 180.0


def clamp_pitch(pitch):
    return np.clip(np.asarray(pitch, dtype=float), -90.0, 90.0)


def yaw_delta(a, b):
    """Shortest signed yaw difference ``b - a`` in degrees, in ``[-180, 180)``."""
    return wrap_yaw(np.asarray(b, dtype=float) - np.asarray(a, dtype=float))


def normalize_gazes(gazes) -> np.ndarray:
    g = np.asarray(gazes, dtype=float)
    if g.ndim == 1:
        g = g.reshape(1, -1)
    if g.ndim != 2 or g.shape[1] != 2:
        raise ValueError(f"gazes must have shape (n, 2), got {np.shape(gazes)}")
    return np.column_stack([wrap_yaw(g[:, 0]), clamp_pitch(g[:, 1])])


def to_unit_vectors(gazes) -> np.ndarray:
    """Map ``(n, 2)`` yaw/pitch degrees to ``(n, 3)`` unit vectors."""
    g = np.radians(np.asarray(gazes, dtype=float).reshape(-1, 2))
    yaw, pitch = g[:, 0], g[:, 1]
    cp = np.cos(pitch)
    return np.column_stack([cp * np.cos(yaw), cp * np.sin(yaw), np.sin(pitch)])


def angular_distance(a, b) -> np.ndarray:
    """Great-circle distance in degrees between gaze arrays ``a`` and ``b``.

    Uses the haversine form, which stays accurate for nearly coincident
    directions.
    """
    a = np.radians(np.asarray(a, dtype=float).reshape(-1, 2))
    b = np.radians(np.asarray(b, dtype=float).reshape(-1, 2))
    dlat = b[:, 1] - a[:, 1]
    dlon = b[:, 0] - a[:, 0]
    h = np.sin(dlat / 2) ** 2 + np.cos(a[:, 1]) * np.cos(b[:, 1]) * np.sin(dlon / 2) ** 2
    return np.degrees(2 * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0))))


class Gaze(NamedTuple):
    yaw: float
    pitch: float

    @classmethod
    def of(cls, yaw: float, pitch: float) -> Gaze:
        """Build a gaze with yaw wrapped and pitch clamped into range."""
        return cls(float(wrap_yaw(yaw)), float(clamp_pitch(pitch)))


@dataclass(frozen=True)
class FovSpec:
    angular_radius: float = 50.0
    n_fov: int = 33

    def __post_init__(self) -> None:
        if not 0 < self.angular_radius <= 90:
            raise ValueError(f"angular_radius must be in (0, 90], got {self.angular_radius}")
        if self.n_fov < 1:
            raise ValueError(f"n_fov must be >= 1, got {self.n_fov}")


@dataclass(frozen=True)
class TileGrid:
    """Row-major equirectangular tiling; row 0 is the top of the panorama."""

    rows: int = 10
    cols: int = 20

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.rows}x{self.cols}")

    @property
    def M(self) -> int:
        return self.rows * self.cols

    def row_col(self, index: int) -> tuple[int, int]:
        if not 0 <= index < self.M:
            raise ValueError(f"tile index {index} out of range 0..{self.M - 1}")
        return divmod(int(index), self.cols)

    def index(self, row: int, col: int) -> int:
        return row * self.cols + col % self.cols

    @cached_property
    def centers(self) -> np.ndarray:
        """``(M, 2)`` yaw/pitch of every tile center, in index order."""
        rows, cols = np.divmod(np.arange(self.M), self.cols)
        yaw = -180.0 + (cols + 0.5) * 360.0 / self.cols
        pitch = 90.0 - (rows + 0.5) * 180.0 / self.rows
        return np.column_stack([yaw, pitch])

    @cached_property
    def center_vectors(self) -> np.ndarray:
        return to_unit_vectors(self.centers)


def tile_center(grid: TileGrid, index: int) -> Gaze:
    row, col = grid.row_col(index)
    return Gaze(-180.0 + (col + 0.5) * 360.0 / grid.cols, 90.0 - (row + 0.5) * 180.0 / grid.rows)


def coverage(grid: TileGrid, gazes, fov: FovSpec) -> np.ndarray:
    """Boolean ``(n, M)`` matrix: tile center within the FoV cap of each gaze."""
    v = to_unit_vectors(normalize_gazes(gazes))
    cos_r = np.cos(np.radians(fov.angular_radius))
    return v @ grid.center_vectors.T >= cos_r - _COS_SLACK


def fov_tiles(grid: TileGrid, gaze, fov: FovSpec) -> TileSet:
    """Tiles whose center lies within ``fov.angular_radius`` of ``gaze``."""
    return TileSet.from_mask(coverage(grid, gaze, fov)[0])


def dwell_counts(grid: TileGrid, gazes, fov: FovSpec) -> np.ndarray:
    """Number of gaze samples whose FoV covers each tile."""
    return coverage(grid, gazes, fov).sum(axis=0)


def top_n_by_dwell(grid: TileGrid, gazes, fov: FovSpec) -> TileSet:
    """The ``fov.n_fov`` tiles covered by the most gaze samples.

    Ties are broken by lower tile index, so the result always has exactly
    ``n_fov`` tiles even when fewer are covered.
    """
    gazes = np.asarray(gazes, dtype=float)
    if gazes.size == 0:
        raise ValueError("top_n_by_dwell needs at least one gaze sample")
    if fov.n_fov > grid.M:
        raise ValueError(f"n_fov={fov.n_fov} exceeds tile count {grid.M}")
    counts = dwell_counts(grid, gazes, fov)
    # stable sort on -counts keeps lower indices first among ties
    order = np.argsort(-counts, kind="stable")
    return TileSet.from_indices(grid.M, order[: fov.n_fov])
