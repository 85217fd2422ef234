import math

import numpy as np
import pytest
from scipy.integrate import quad

from privstream import (
    ComputeModel,
    LinkBudget,
    RadioModel,
    TileMediaSpec,
    computing_rate,
    ensemble_rate,
    resources_rate,
    tile_bits,
    zf_power_share,
)
from privstream.link import zf_equivalent_gains

MBIT = 2**20


class TestTileBits:
    def test_4k_values(self):
        s_com, s_cpt = tile_bits(TileMediaSpec())
        assert s_cpt == 14_929_920
        assert round(s_cpt / MBIT, 2) == 14.24
        assert s_com == pytest.approx(14_929_920 / 2.41)
        assert round(s_com / MBIT, 2) == 5.91
        # three significant figures of the published sizes
        assert round(s_cpt / MBIT, 1) == 14.2 and round(s_com / MBIT, 1) == 5.9

    def test_uncompressed(self):
        s_com, s_cpt = tile_bits(TileMediaSpec(gamma_c=1.0))
        assert s_com == s_cpt

    @pytest.mark.parametrize("kw", [dict(px_w=0), dict(gamma_c=0.5), dict(T_seg=-1.0)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            TileMediaSpec(**kw)


class TestComputingRate:
    def test_unit(self):
        assert computing_rate(ComputeModel(3.0, 1, 3.0)) == 1.0

    def test_halves_with_k(self):
        assert computing_rate(ComputeModel(8e9, 4, 1.0)) == computing_rate(ComputeModel(8e9, 2, 1.0)) / 2

    def test_four_users(self):
        assert computing_rate(ComputeModel(8.8e9, 4, 1.0)) == pytest.approx(2.2e9)


def radio(**kw):
    base = dict(B=1e6, P=1.0, N_t=1, K=1, alpha=2.0, sigma2=0.1, distances=(1.0,))
    base.update(kw)
    return RadioModel(**base)


class TestPowerShare:
    def test_equal_distances(self):
        p = zf_power_share(radio(N_t=4, K=4, P=2.0, distances=(3.0,) * 4))
        np.testing.assert_allclose(p, [0.5] * 4)

    def test_two_users(self):
        p = zf_power_share(radio(N_t=2, K=2, P=1.0, alpha=2.0, distances=(1.0, 2.0)))
        np.testing.assert_allclose(p, [1 / 5, 4 / 5])

    def test_budget(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            K = int(rng.integers(1, 6))
            m = radio(N_t=K, K=K, P=float(rng.uniform(0.1, 5)), alpha=float(rng.uniform(2, 4)),
                      distances=tuple(rng.uniform(1, 50, K)))
            assert math.fsum(zf_power_share(m)) == pytest.approx(m.P, rel=1e-12)

    def test_received_power_equalised(self):
        m = radio(N_t=3, K=3, alpha=3.0, distances=(1.0, 4.0, 9.0))
        rx = zf_power_share(m) * np.asarray(m.distances) ** -m.alpha
        np.testing.assert_allclose(rx, rx[0])

    @pytest.mark.parametrize("kw", [dict(N_t=2, K=3, distances=(1, 1, 1)), dict(K=0, distances=()), dict(sigma2=0.0)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            radio(**kw)


class TestEnsembleRate:
    def test_single_antenna_quadrature(self):
        m = radio(B=1e6, P=1.0, alpha=2.0, sigma2=0.1, distances=(1.5,))
        snr = m.P * m.distances[0] ** -m.alpha / m.sigma2
        exact, _ = quad(lambda x: math.log2(1 + snr * x) * math.exp(-x), 0, math.inf)
        est = ensemble_rate(m, 100_000, seed=3)
        assert abs(est - m.B * exact) / (m.B * exact) < 0.01

    @pytest.mark.parametrize("N_t,K", [(4, 2), (8, 4)])
    def test_zf_mean_gain(self, N_t, K):
        g = zf_equivalent_gains(np.random.default_rng(1), N_t, K, 100_000 // K)
        assert abs(g.mean() - (N_t - K + 1)) / (N_t - K + 1) < 0.02

    def test_zf_gain_matches_gram_inverse(self):
        # |h_k^H w_k|^2 with normalised pinv columns equals 1 / [(H H^H)^-1]_kk
        rng = np.random.default_rng(5)
        g = zf_equivalent_gains(rng, 6, 3, 200)
        rng = np.random.default_rng(5)
        H = (rng.standard_normal((200, 3, 6)) + 1j * rng.standard_normal((200, 3, 6))) / np.sqrt(2)
        inv = np.linalg.inv(H @ np.conj(np.swapaxes(H, 1, 2)))
        np.testing.assert_allclose(g, 1.0 / np.real(np.diagonal(inv, axis1=1, axis2=2)), rtol=1e-9)

    def test_zero_interference(self):
        rng = np.random.default_rng(2)
        shape = (50, 3, 5)
        H = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
        W = np.linalg.pinv(H)
        W = W / np.linalg.norm(W, axis=1, keepdims=True)
        off = H @ W
        off[:, np.arange(3), np.arange(3)] = 0
        assert np.abs(off).max() < 1e-10

    def test_noise_limit(self):
        assert ensemble_rate(radio(sigma2=1e12), 1000) < 1e-3

    def test_monotone_in_power_and_bandwidth(self):
        base = radio(N_t=4, K=2, distances=(2.0, 3.0))
        for seed in range(3):
            r0 = ensemble_rate(base, 20_000, seed)
            assert ensemble_rate(radio(N_t=4, K=2, distances=(2.0, 3.0), P=2.0), 20_000, seed) > r0
            assert ensemble_rate(radio(N_t=4, K=2, distances=(2.0, 3.0), B=2e6), 20_000, seed) == pytest.approx(2 * r0, rel=1e-12)

    def test_deterministic_and_worker_independent(self):
        m = radio(N_t=8, K=4, distances=(5.0,) * 4)
        a = ensemble_rate(m, 35_000, seed=7, workers=1)
        assert a == ensemble_rate(m, 35_000, seed=7, workers=4)
        assert a == ensemble_rate(m, 35_000, seed=7)
        assert a != ensemble_rate(m, 35_000, seed=8)

    def test_default_radio_near_configured_rate(self):
        m = RadioModel(B=150e6, P=0.2512, N_t=8, K=4, alpha=3.0, sigma2=4.3e-9, distances=(5.0,) * 4)
        assert ensemble_rate(m, 20_000) == pytest.approx(2.85e9, rel=0.01)


class TestResourcesRate:
    def test_4k_anchor(self):
        s_com, s_cpt = tile_bits(TileMediaSpec())
        r = resources_rate(LinkBudget(2.85e9, 2.2e9, s_com, s_cpt, 200))
        assert 0.55 <= r <= 0.62
        assert round(r, 1) == 0.6

    def test_compute_bound_limit(self):
        b = LinkBudget(1e30, 2.2e9, 6e6, 1.5e7, 200)
        assert resources_rate(b) == pytest.approx(2.2e9 / (1.5e7 * 200), rel=1e-12)

    def test_homogeneous(self):
        b = LinkBudget(2.85e9, 2.2e9, 6e6, 1.5e7, 200)
        assert resources_rate(LinkBudget(5.7e9, 4.4e9, 6e6, 1.5e7, 200)) == pytest.approx(2 * resources_rate(b), rel=1e-12)

    def test_monotone(self):
        b = LinkBudget(2.85e9, 2.2e9, 6e6, 1.5e7, 200)
        r = resources_rate(b)
        from dataclasses import replace

        assert resources_rate(replace(b, C_com=3e9)) > r
        assert resources_rate(replace(b, C_cpt=3e9)) > r
        assert resources_rate(replace(b, M=300)) < r
        assert resources_rate(replace(b, s_com=7e6)) < r
        assert resources_rate(replace(b, s_cpt=2e7)) < r

    @pytest.mark.parametrize("target", [0.6, 1.0, 2.0])
    def test_scaled_to(self, target):
        b = LinkBudget(2.85e9, 2.2e9, 6e6, 1.5e7, 200).scaled_to(target)
        assert resources_rate(b) == pytest.approx(target, rel=1e-12)
        assert b.C_com / b.C_cpt == pytest.approx(2.85 / 2.2)
