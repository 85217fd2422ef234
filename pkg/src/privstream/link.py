"""Tile sizes, rendering rate, zero-forcing downlink rate, and resources rate."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

MC_CHUNK = 10_000
_MAX_REDRAWS = 8


@dataclass(frozen=True)
class TileMediaSpec:
    """Raw video parameters of one tile; defaults are the 4K 10x20 layout."""

    px_w: int = 192
    px_h: int = 216
    b: int = 12
    r_f: float = 30.0
    T_seg: float = 1.0
    gamma_c: float = 2.41

    def __post_init__(self) -> None:
        if min(self.px_w, self.px_h, self.b, self.r_f, self.T_seg) <= 0:
            raise ValueError("media parameters must be positive")
        if self.gamma_c < 1:
            raise ValueError(f"compression ratio must be >= 1, got {self.gamma_c}")


def tile_bits(spec: TileMediaSpec) -> tuple[float, float]:
    """Return ``(s_com, s_cpt)``: bits per tile to transmit and to render."""
    s_cpt = spec.px_w * spec.px_h * spec.b * spec.r_f * spec.T_seg
    return s_cpt / spec.gamma_c, float(s_cpt)


@dataclass(frozen=True)
class ComputeModel:
    F_cpt: float
    K: int
    mu_r: float

    def __post_init__(self) -> None:
        if self.F_cpt <= 0 or self.K < 1 or self.mu_r <= 0:
            raise ValueError("compute model parameters must be positive")


def computing_rate(model: ComputeModel) -> float:
    """Rendered bits per second available to one user."""
    return model.F_cpt / (model.K * model.mu_r)


@dataclass(frozen=True)
class RadioModel:
    B: float
    P: float
    N_t: int
    K: int
    alpha: float
    sigma2: float
    distances: tuple[float, ...]
    delta_T: float = 1e-3  # slot length; unused once rates are ensemble-averaged

    def __post_init__(self) -> None:
        object.__setattr__(self, "distances", tuple(float(d) for d in self.distances))
        if self.K < 1 or self.N_t < self.K:
            raise ValueError(f"need N_t >= K >= 1, got N_t={self.N_t}, K={self.K}")
        if len(self.distances) != self.K:
            raise ValueError(f"{len(self.distances)} distances for {self.K} users")
        if min(self.B, self.P, self.alpha, self.sigma2, self.delta_T, *self.distances) <= 0:
            raise ValueError("radio parameters must be positive")


def zf_power_share(model: RadioModel) -> np.ndarray:
    """Per-user power that equalises received power across path losses."""
    gain_inv = np.asarray(model.distances) ** model.alpha
    beta = model.P / gain_inv.sum()
    return beta * gain_inv


def zf_equivalent_gains(rng: np.random.Generator, N_t: int, K: int, n: int) -> np.ndarray:
    """``(n, K)`` samples of ``|h_k^H w_k|^2`` under zero-forcing.

    Each sample draws an i.i.d. CN(0, 1) channel ``H`` (K x N_t, row k is
    ``h_k^H``); beamformers are the pseudo-inverse columns scaled to unit
    norm.
    """
    shape = (n, K, N_t)
    H = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    for _ in range(_MAX_REDRAWS):
        bad = np.linalg.cond(H) > 1e12
        if not bad.any():
            break
        m = int(bad.sum())
        H[bad] = (rng.standard_normal((m, K, N_t)) + 1j * rng.standard_normal((m, K, N_t))) / np.sqrt(2)
    else:
        raise np.linalg.LinAlgError("channel stayed singular after redraws")
    Wz = np.linalg.pinv(H)  # (n, N_t, K)
    Wz = Wz / np.linalg.norm(Wz, axis=1, keepdims=True)
    eff = np.einsum("nkt,ntk->nk", H, Wz)
    return np.abs(eff) ** 2


def _chunk_sum(model: RadioModel, snr: float, seed_seq: np.random.SeedSequence, n: int) -> float:
    g = zf_equivalent_gains(np.random.default_rng(seed_seq), model.N_t, model.K, n)
    return float(np.log2(1.0 + snr * g).sum())


def ensemble_rate(model: RadioModel, mc_samples: int = 100_000, seed: int = 0, workers: int = 1) -> float:
    """Monte Carlo ergodic rate (bit/s) of one user under path-loss compensation.

    All users share the same received SNR ``beta / sigma2``, so the estimate
    pools every user's gain. Samples are drawn in fixed chunks of
    ``MC_CHUNK`` with one spawned seed per chunk; the result does not depend
    on ``workers``.
    """
    if mc_samples < 1:
        raise ValueError("mc_samples must be >= 1")
    beta = model.P / float(np.sum(np.asarray(model.distances) ** model.alpha))
    snr = beta / model.sigma2
    sizes = [MC_CHUNK] * (mc_samples // MC_CHUNK)
    if mc_samples % MC_CHUNK:
        sizes.append(mc_samples % MC_CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(seqs, sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            sums = list(pool.map(lambda j: _chunk_sum(model, snr, *j), jobs))
    else:
        sums = [_chunk_sum(model, snr, *j) for j in jobs]
    return model.B * (sum(sums) / (mc_samples * model.K))


@dataclass(frozen=True)
class LinkBudget:
    C_com: float
    C_cpt: float
    s_com: float
    s_cpt: float
    M: int

    def __post_init__(self) -> None:
        if min(self.C_com, self.C_cpt, self.s_com, self.s_cpt) <= 0 or self.M < 1:
            raise ValueError("link budget entries must be positive")

    @classmethod
    def from_media(cls, spec: TileMediaSpec, C_com: float, C_cpt: float, M: int) -> LinkBudget:
        s_com, s_cpt = tile_bits(spec)
        return cls(C_com, C_cpt, s_com, s_cpt, M)

    def scaled_to(self, r_cc_star: float) -> LinkBudget:
        """Scale both rates by a common factor so the resources rate hits a target."""
        if r_cc_star <= 0:
            raise ValueError("target resources rate must be positive")
        k = r_cc_star / resources_rate(self)
        return replace(self, C_com=self.C_com * k, C_cpt=self.C_cpt * k)


def resources_rate(budget: LinkBudget) -> float:
    """Fraction of a panorama that can be rendered and delivered per second."""
    return 1.0 / (budget.s_com * budget.M / budget.C_com + budget.s_cpt * budget.M / budget.C_cpt)
