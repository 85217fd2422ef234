"""Experiment configuration read from INI-style ``key = value`` files.

Every section and key is optional; missing values fall back to the 4K,
10x20-tile, l0=3 setup. Recognised sections::

    [grid]      rows, cols, fov_radius_deg, n_fov
    [media]     px_w, px_h, bits_per_pixel, frame_rate, gamma_c
    [stream]    T_seg, l0, tau
    [link]      C_com, C_cpt, r_cc_star (optional; rescales both rates)
    [radio]     B, P, N_t, K, alpha, sigma2, distances, mc_samples, seed
    [compute]   F_cpt, K, mu_r
    [privacy]   rho_s, scheme, seed
    [predictor] ridge_lambda, init_scale
    [federated] local_epochs, rounds, learning_rate
    [split]     seed, train_fraction
    [sweep]     rho_values, rcc_values, predictors, seed, workers
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .durations import StreamConfig
from .geometry import FovSpec, TileGrid
from .link import ComputeModel, LinkBudget, RadioModel, TileMediaSpec
from .predictors import PREDICTOR_KINDS
from .privacy import SCHEMES, PrivacyConfig


class ConfigError(ValueError):
    pass


DEFAULT_RHO = tuple(round(0.1 * i, 10) for i in range(11))
DEFAULT_RCC = tuple(round(0.6 + 0.2 * i, 10) for i in range(8))


@dataclass
class ExperimentConfig:
    grid: TileGrid = field(default_factory=TileGrid)
    fov: FovSpec = field(default_factory=FovSpec)
    media: TileMediaSpec = field(default_factory=TileMediaSpec)
    stream: StreamConfig = field(default_factory=StreamConfig)
    C_com: float = 2.85e9
    C_cpt: float = 2.2e9
    r_cc_star: float | None = None
    radio: RadioModel | None = None
    mc_samples: int = 100_000
    radio_seed: int = 0
    compute: ComputeModel | None = None
    privacy: PrivacyConfig = field(default_factory=PrivacyConfig)
    ridge_lambda: float = 0.0
    init_scale: float = 1e-3
    local_epochs: int = 50
    rounds: int = 10
    learning_rate: float = 0.1
    split_seed: int = 0
    train_fraction: float = 0.8
    rho_values: tuple[float, ...] = DEFAULT_RHO
    rcc_values: tuple[float, ...] = DEFAULT_RCC
    predictors: tuple[str, ...] = ("no_motion",)
    sweep_seed: int = 0
    workers: int = 1

    def budget(self) -> LinkBudget:
        b = LinkBudget.from_media(self.media, self.C_com, self.C_cpt, self.grid.M)
        return b.scaled_to(self.r_cc_star) if self.r_cc_star is not None else b


class _Reader:
    def __init__(self, parser: configparser.ConfigParser, path: Path, lines: list[str]):
        self.p, self.path, self.lines = parser, path, lines

    def _line(self, section: str, key: str) -> int:
        current = None
        for n, raw in enumerate(self.lines, start=1):
            s = raw.strip()
            if s.startswith("[") and s.endswith("]"):
                current = s[1:-1].strip()
            elif current == section and s.split("=", 1)[0].split(":", 1)[0].strip().lower() == key.lower():
                return n
        return 0

    def fail(self, section: str, key: str, msg: str):
        raise ConfigError(f"{self.path}:{self._line(section, key)}: [{section}] {key}: {msg}")

    def get(self, section, key, conv, default):
        if not self.p.has_option(section, key):
            return default
        raw = self.p.get(section, key)
        try:
            return conv(raw)
        except (TypeError, ValueError) as exc:
            self.fail(section, key, f"bad value {raw!r} ({exc})")

    def floats(self, section, key, default):
        return self.get(section, key, lambda s: tuple(float(v) for v in s.split(",") if v.strip()), default)

    def words(self, section, key, default):
        return self.get(section, key, lambda s: tuple(v.strip() for v in s.split(",") if v.strip()), default)


def load_config(path) -> ExperimentConfig:
    """Parse ``path``; any error is a :class:`ConfigError` naming file and line."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        line = getattr(exc, "lineno", 0)
        raise ConfigError(f"{path}:{line}: {exc.message if hasattr(exc, 'message') else exc}") from None
    r = _Reader(parser, path, text.splitlines())
    c = ExperimentConfig()
    section = "?"
    try:
        section = "grid"
        c.grid = TileGrid(r.get("grid", "rows", int, 10), r.get("grid", "cols", int, 20))
        c.fov = FovSpec(r.get("grid", "fov_radius_deg", float, 50.0), r.get("grid", "n_fov", int, 33))
        if c.fov.n_fov > c.grid.M:
            r.fail("grid", "n_fov", f"exceeds tile count {c.grid.M}")
        section = "stream"
        c.stream = StreamConfig(
            r.get("stream", "T_seg", float, 1.0), r.get("stream", "l0", int, 3), r.get("stream", "tau", float, 0.1)
        )
        section = "media"
        c.media = TileMediaSpec(
            r.get("media", "px_w", int, 192),
            r.get("media", "px_h", int, 216),
            r.get("media", "bits_per_pixel", int, 12),
            r.get("media", "frame_rate", float, 30.0),
            c.stream.T_seg,
            r.get("media", "gamma_c", float, 2.41),
        )
        section = "link"
        c.C_com = r.get("link", "C_com", float, c.C_com)
        c.C_cpt = r.get("link", "C_cpt", float, c.C_cpt)
        c.r_cc_star = r.get("link", "r_cc_star", float, None)
        c.budget()
        if parser.has_section("radio"):
            section = "radio"
            K = r.get("radio", "K", int, 4)
            c.radio = RadioModel(
                B=r.get("radio", "B", float, 150e6),
                P=r.get("radio", "P", float, 0.2512),
                N_t=r.get("radio", "N_t", int, 8),
                K=K,
                alpha=r.get("radio", "alpha", float, 3.0),
                sigma2=r.get("radio", "sigma2", float, 4.3e-9),
                distances=r.floats("radio", "distances", (5.0,) * K),
            )
            c.mc_samples = r.get("radio", "mc_samples", int, c.mc_samples)
            c.radio_seed = r.get("radio", "seed", int, 0)
        if parser.has_section("compute"):
            section = "compute"
            c.compute = ComputeModel(
                r.get("compute", "F_cpt", float, 8.8e9), r.get("compute", "K", int, 4), r.get("compute", "mu_r", float, 1.0)
            )
        section = "privacy"
        scheme = r.get("privacy", "scheme", str, "rect_dilation")
        if scheme not in SCHEMES:
            r.fail("privacy", "scheme", f"must be one of {', '.join(SCHEMES)}")
        c.privacy = PrivacyConfig(r.get("privacy", "rho_s", float, 0.0), scheme, r.get("privacy", "seed", int, 0))
        section = "predictor"
        c.ridge_lambda = r.get("predictor", "ridge_lambda", float, c.ridge_lambda)
        c.init_scale = r.get("predictor", "init_scale", float, c.init_scale)
        section = "federated"
        c.local_epochs = r.get("federated", "local_epochs", int, c.local_epochs)
        c.rounds = r.get("federated", "rounds", int, c.rounds)
        c.learning_rate = r.get("federated", "learning_rate", float, c.learning_rate)
        section = "split"
        c.split_seed = r.get("split", "seed", int, c.split_seed)
        c.train_fraction = r.get("split", "train_fraction", float, c.train_fraction)
        section = "sweep"
        c.rho_values = r.floats("sweep", "rho_values", c.rho_values)
        c.rcc_values = r.floats("sweep", "rcc_values", c.rcc_values)
        c.predictors = r.words("sweep", "predictors", c.predictors)
        for p in c.predictors:
            if p not in PREDICTOR_KINDS:
                r.fail("sweep", "predictors", f"unknown predictor {p!r}")
        if not (c.rho_values and c.rcc_values and c.predictors):
            raise ValueError("sweep lists must be non-empty")
        if any(not 0 <= v <= 1 for v in c.rho_values):
            r.fail("sweep", "rho_values", "values must lie in [0, 1]")
        if any(v <= 0 for v in c.rcc_values):
            r.fail("sweep", "rcc_values", "values must be positive")
        c.sweep_seed = r.get("sweep", "seed", int, 0)
        c.workers = r.get("sweep", "workers", int, 1)
    except ConfigError:
        raise
    except ValueError as exc:
        line = next((n for n, s in enumerate(r.lines, 1) if s.strip() == f"[{section}]"), 0)
        raise ConfigError(f"{path}:{line}: [{section}] {exc}") from None
    return c
