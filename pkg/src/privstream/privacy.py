"""Spatial degree of privacy (sDoP) and camouflage masks over tile requests."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .geometry import TileGrid
from .tileset import TileSet

SCHEMES = ("rect_dilation", "uniform_random")


@dataclass(frozen=True)
class PrivacyConfig:
    rho_s: float = 0.0
    scheme: str = "rect_dilation"
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho_s <= 1.0:
            raise ValueError(f"rho_s must be in [0, 1], got {self.rho_s}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown masking scheme {self.scheme!r}")


@dataclass(frozen=True)
class PrivacyRequest:
    tiles: TileSet

    @property
    def n_p(self) -> int:
        return len(self.tiles)


def n_privacy_tiles(rho_s: float, M: int, n_fov: int) -> int:
    """Number of requested tiles, ``n_fov + rho_s*(M - n_fov)`` rounded half up."""
    if not 0.0 <= rho_s <= 1.0:
        raise ValueError(f"rho_s must be in [0, 1], got {rho_s}")
    if not 1 <= n_fov <= M:
        raise ValueError(f"need 1 <= n_fov <= M, got n_fov={n_fov}, M={M}")
    exact = n_fov + rho_s * (M - n_fov)
    # the slack keeps values like 116.49999999999999 from rounding down
    return min(M, max(n_fov, math.floor(exact + 0.5 + 1e-9)))


def sdop_of(n_p: int, M: int, n_fov: int) -> float:
    """Fraction of the non-FoV tiles that are requested as camouflage."""
    if n_fov >= M:
        raise ValueError(f"sDoP undefined when n_fov ({n_fov}) >= M ({M})")
    if n_p < n_fov:
        raise ValueError(f"n_p={n_p} < n_fov={n_fov}: privacy requirement violated")
    if n_p > M:
        raise ValueError(f"n_p={n_p} exceeds tile count {M}")
    return (n_p - n_fov) / (M - n_fov)


def _check_sizes(grid: TileGrid, request: TileSet, n_p: int) -> None:
    if request.m != grid.M:
        raise ValueError(f"request is over {request.m} tiles, grid has {grid.M}")
    if len(request) == 0:
        raise ValueError("request set is empty")
    if n_p > grid.M:
        raise ValueError(f"n_p={n_p} exceeds tile count {grid.M}")
    if n_p < len(request):
        raise ValueError(f"n_p={n_p} is smaller than the request ({len(request)} tiles)")


def _column_interval(cols_used: np.ndarray, cols: int) -> tuple[int, int]:
    """Smallest wrapped column interval ``(start, width)`` covering ``cols_used``.

    Equivalent to dropping the largest circular gap; ties go to the smaller
    start column.
    """
    used = np.unique(cols_used)
    if len(used) == 1:
        return int(used[0]), 1
    best_start, best_width = None, cols + 1
    for i, start in enumerate(used):
        end = used[i - 1]  # previous used column, cyclically
        width = (end - start) % cols + 1
        if width < best_width or (width == best_width and start < best_start):
            best_start, best_width = int(start), int(width)
    return best_start, best_width


def growth_order(grid: TileGrid, request: TileSet) -> Iterator[int]:
    """Yield every tile in the order rectangle dilation would add it.

    The bounding rectangle of ``request`` comes first (row by row, columns in
    wrapped order from the rectangle's left edge), followed by each line
    added while cycling right, bottom, left, top. Bottom/top are skipped once
    clamped at the grid edge; right/left once the rectangle spans all columns.
    """
    rows, cols = np.divmod(request.indices(), grid.cols)
    top, bottom = int(rows.min()), int(rows.max())
    left, width = _column_interval(cols, grid.cols)

    def span(r0, r1, c0, w):
        return (grid.index(r, c0 + k) for r in range(r0, r1 + 1) for k in range(w))

    yield from span(top, bottom, left, width)
    side = 0
    while (bottom - top + 1) * width < grid.M:
        if side == 0 and width < grid.cols:
            yield from span(top, bottom, left + width, 1)
            width += 1
        elif side == 1 and bottom < grid.rows - 1:
            bottom += 1
            yield from span(bottom, bottom, left, width)
        elif side == 2 and width < grid.cols:
            left = (left - 1) % grid.cols
            width += 1
            yield from span(top, bottom, left, 1)
        elif side == 3 and top > 0:
            top -= 1
            yield from span(top, top, left, width)
        side = (side + 1) % 4


def mask_rect_dilation(grid: TileGrid, request: TileSet, n_p: int) -> PrivacyRequest:
    """Grow the request's bounding rectangle until it holds ``n_p`` tiles.

    Surplus tiles of the last added line are dropped from its end. If the
    bounding rectangle alone already exceeds ``n_p``, its non-request tiles
    are kept in the same row-by-row order until the count is met.
    """
    _check_sizes(grid, request, n_p)
    need = n_p - len(request)
    bits = request.bits
    for t in growth_order(grid, request):
        if need == 0:
            break
        if not bits >> t & 1:
            bits |= 1 << t
            need -= 1
    return PrivacyRequest(TileSet(grid.M, bits))


def mask_uniform_random(grid: TileGrid, request: TileSet, n_p: int, seed: int) -> PrivacyRequest:
    """Add ``n_p - |request|`` tiles drawn uniformly from the complement."""
    _check_sizes(grid, request, n_p)
    pool = request.complement().indices()
    rng = np.random.default_rng(seed)
    extra = rng.choice(pool, size=n_p - len(request), replace=False)
    return PrivacyRequest(request | TileSet.from_indices(grid.M, extra))


def privacy_request(grid: TileGrid, request: TileSet, n_p: int, cfg: PrivacyConfig, seed: int | None = None) -> PrivacyRequest:
    if cfg.scheme == "rect_dilation":
        return mask_rect_dilation(grid, request, n_p)
    return mask_uniform_random(grid, request, n_p, cfg.seed if seed is None else seed)
