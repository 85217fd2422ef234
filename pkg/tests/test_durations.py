import math

import numpy as np
import pytest

from privstream import (
    InfeasiblePlanError,
    LinkBudget,
    StreamConfig,
    TileMediaSpec,
    brute_force_durations,
    optimize_durations,
    resources_rate,
    tile_bits,
)
from privstream.durations import check_feasible, implied_resources_rate, obw_samples_from_durations, obw_samples_from_rate
from privstream.privacy import n_privacy_tiles


def random_instances(n, seed=0):
    """Feasible (budget, rho, stream) triples with rates log-uniform over two decades."""
    rng = np.random.default_rng(seed)
    s_com, s_cpt = tile_bits(TileMediaSpec())
    out = []
    while len(out) < n:
        b = LinkBudget(10 ** rng.uniform(9, 11), 10 ** rng.uniform(9, 11), s_com, s_cpt, 200)
        rho = float(rng.uniform(0, 1))
        cfg = StreamConfig(1.0, int(rng.integers(2, 5)), 0.1)
        if optimize_durations(b, rho, cfg, 33).feasible:
            out.append((b, rho, cfg))
    return out


class TestClosedForm:
    def test_4k_example(self, budget_4k, stream):
        p = optimize_durations(budget_4k, 0.0, stream, 33)
        assert p.n_p == 33
        assert p.t_com == pytest.approx(0.0717, abs=5e-5)
        assert p.t_cpt == pytest.approx(0.224, abs=5e-4)
        assert p.t_cc == pytest.approx(0.296, abs=5e-4)
        assert p.obw_samples == 17 and p.t_obw == pytest.approx(1.7)
        assert p.status == "ok" and p.gap_samples == 3

    def test_full_panorama(self, budget_4k):
        p = optimize_durations(budget_4k, 1.0, StreamConfig(1.0, 3, 0.1), 33)
        assert p.n_p == 200
        assert p.t_cc == pytest.approx(1 / resources_rate(budget_4k), rel=1e-12)

    def test_budget_invariant(self):
        for b, rho, cfg in random_instances(30, seed=1):
            p = optimize_durations(b, rho, cfg, 33)
            assert p.t_obw + p.t_cc <= cfg.T_ps + 1e-9
            assert cfg.T_ps - p.t_obw - p.t_cc < cfg.tau + 1e-9
            assert min(p.t_obw, p.t_com, p.t_cpt) >= 0

    def test_rate_identity(self):
        for b, rho, cfg in random_instances(200, seed=2):
            p = optimize_durations(b, rho, cfg, 33)
            via_rate = obw_samples_from_rate(cfg.T_ps, p.n_p, resources_rate(b), b.M, cfg.tau)
            assert via_rate == p.obw_samples == obw_samples_from_durations(cfg.T_ps, p.t_cc, cfg.tau)

    def test_implied_rate_constant_in_rho(self, budget_4k, stream):
        r = resources_rate(budget_4k)
        for rho in np.linspace(0, 1, 11):
            p = optimize_durations(budget_4k, float(rho), stream, 33)
            assert implied_resources_rate(p, 200) == pytest.approx(r, rel=1e-12)

    def test_monotone_in_rho(self, budget_4k, stream):
        plans = [optimize_durations(budget_4k, float(r), stream, 33) for r in np.linspace(0, 1, 11)]
        t_cc = [p.t_cc for p in plans]
        obw = [p.obw_samples for p in plans]
        assert all(b > a for a, b in zip(t_cc, t_cc[1:]))
        assert all(b <= a for a, b in zip(obw, obw[1:]))
        steps = {round(plans[i].t_obw - plans[i + 1].t_obw, 12) for i in range(10)}
        assert steps <= {0.0, 0.1, 0.2}
        # one sample is tau exactly
        assert all(math.isclose(p.t_obw, 0.1 * p.obw_samples) for p in plans)

    def test_monotone_in_rate(self, budget_4k, stream):
        obw = [optimize_durations(budget_4k.scaled_to(r), 0.5, stream, 33).obw_samples for r in np.linspace(0.6, 2, 8)]
        assert all(b >= a for a, b in zip(obw, obw[1:]))

    def test_infeasible_reports_deficit(self, budget_4k, stream):
        b = budget_4k.scaled_to(0.4)
        p = optimize_durations(b, 1.0, stream, 33)
        assert p.status == "infeasible" and not p.feasible
        assert p.deficit == pytest.approx(1 / 0.4 - 2.0)
        with pytest.raises(InfeasiblePlanError, match="deficit"):
            check_feasible(p)

    def test_degenerate(self, budget_4k, stream):
        # t_cc = 1.95 s leaves under one sample
        p = optimize_durations(budget_4k.scaled_to(1 / 1.95), 1.0, stream, 33)
        assert p.status == "degenerate" and p.obw_samples == 0 and p.feasible

    def test_exact_fit(self, budget_4k, stream):
        p = optimize_durations(budget_4k.scaled_to(0.5), 1.0, stream, 33)
        assert p.status == "degenerate" and p.deficit == 0.0

    def test_stream_config(self):
        assert StreamConfig(1.0, 3, 0.1).T_ps == 2.0
        assert StreamConfig(1.0, 4, 0.1).ps_samples == 30
        with pytest.raises(ValueError):
            StreamConfig(1.0, 1, 0.1)
        with pytest.raises(ValueError):
            StreamConfig(1.0, 3, 0.3)


class TestBruteForce:
    @pytest.mark.slow
    def test_oracle_agrees(self):
        for b, rho, cfg in random_instances(50):
            step = cfg.tau / 20
            cf = optimize_durations(b, rho, cfg, 33)
            bf = brute_force_durations(b, rho, cfg, 33, step)
            assert bf.feasible
            assert abs(bf.t_cc - cf.t_cc) <= 2 * step
            assert bf.t_cc >= cf.t_cc - 1e-12
            # balance: both constraints sit within one grid step of binding
            assert abs(bf.t_com - cf.t_com) <= step + 1e-12
            assert abs(bf.t_cpt - cf.t_cpt) <= step + 1e-12
            tiles_com = b.C_com * bf.t_com / b.s_com
            tiles_cpt = b.C_cpt * bf.t_cpt / b.s_cpt
            res = max(b.C_com / b.s_com, b.C_cpt / b.s_cpt) * step
            assert abs(tiles_com - tiles_cpt) <= res

    def test_4k_example(self, budget_4k, stream):
        bf = brute_force_durations(budget_4k, 0.0, stream, 33)
        assert bf.t_com == pytest.approx(0.075) and bf.t_cpt == pytest.approx(0.225)
        assert bf.obw_samples == 17

    def test_full_panorama(self, budget_4k, stream):
        cf = optimize_durations(budget_4k, 1.0, stream, 33)
        bf = brute_force_durations(budget_4k, 1.0, stream, 33)
        assert abs(bf.t_cc - cf.t_cc) <= 2 * stream.tau / 20

    def test_infeasible(self, budget_4k, stream):
        assert brute_force_durations(budget_4k.scaled_to(0.4), 1.0, stream, 33).status == "infeasible"

    def test_coarse_grid_rejected(self, budget_4k, stream):
        with pytest.raises(ValueError):
            brute_force_durations(budget_4k, 0.0, stream, 33, grid_step=0.02)


def test_n_p_matches_privacy_module(budget_4k, stream):
    for rho in (0.0, 0.25, 0.5, 1.0):
        assert optimize_durations(budget_4k, rho, stream, 33).n_p == n_privacy_tiles(rho, 200, 33)
