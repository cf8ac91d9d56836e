import math

import numpy as np
import pytest
from scipy import stats

from levysim.errors import DomainError, MartingaleCorrectionUnavailable
from levysim.models import BrownianMotion, PoissonProcess, default_model, make_model
from levysim.pathsim import PathGrid, SamplePath, asset_path, simulate_batch, simulate_path
from levysim.rng import RngStream
from levysim.validate import ks_against_cdf, ks_two_sample


class TestGrid:
    def test_times(self):
        g = PathGrid(2.0, 8)
        assert g.h == 0.25 and g.times[0] == 0 and g.times[-1] == 2.0
        np.testing.assert_allclose(np.diff(g.times), 0.25)

    @pytest.mark.parametrize("T,N", [(0.0, 5), (1.0, 0), (1.0, 2.5), (-1.0, 3)])
    def test_invalid(self, T, N):
        with pytest.raises(DomainError):
            PathGrid(T, N)


class TestPaths:
    @pytest.mark.parametrize("name", ["bm", "poisson", "cpp", "merton", "kou", "vg", "cgmy", "nig", "gh", "meixner"])
    def test_starts_at_zero(self, name):
        p = simulate_path(default_model(name), PathGrid(1.0, 20), RngStream(1))
        assert p.l_values[0] == 0 and p.l_values.shape == (21,) and np.all(np.isfinite(p.l_values))

    def test_pure_drift(self):
        p = simulate_path(BrownianMotion(0.5, 0.0), PathGrid(1.0, 10), RngStream(0))
        np.testing.assert_allclose(p.l_values, 0.05 * np.arange(11), atol=1e-15)

    def test_poisson_paths(self):
        grid = PathGrid(1.0, 252)
        batch = simulate_batch(PoissonProcess(100.0), grid, 1000, seed=4)
        term = np.array([p.l_values[-1] for p in batch])
        for p in batch[:20]:
            d = np.diff(p.l_values)
            assert np.all(d >= 0) and np.all(d == np.round(d))
        assert abs(term.mean() - 100) < 1.0

    @pytest.mark.parametrize("N", [1, 10, 252])
    def test_grid_refinement_bm(self, N):
        m = BrownianMotion(0.5, 0.5)
        batch = simulate_batch(m, PathGrid(1.0, N), 10_000, seed=N)
        term = np.array([p.l_values[-1] for p in batch])
        _, p = ks_against_cdf(term, lambda x: stats.norm.cdf(x, 0.5, 0.5))
        assert p > 0.01

    def test_stationarity_and_independence(self):
        grid = PathGrid(1.0, 100)
        batch = simulate_batch(default_model("vg"), grid, 400, seed=9)
        inc = np.array([np.diff(p.l_values) for p in batch])
        assert ks_two_sample(inc[:, :50].ravel(), inc[:, 50:].ravel())[1] > 0.01
        a, b = inc[:, :-1].ravel(), inc[:, 1:].ravel()
        rho = np.corrcoef(a, b)[0, 1]
        assert abs(rho) < 3 / math.sqrt(grid.N * 400)


class TestAsset:
    def test_identity(self):
        grid = PathGrid(1.0, 5)
        path = SamplePath(grid, np.zeros(6), BrownianMotion(0, 1), 0)
        a = asset_path(path, 100.0)
        assert np.all(a.s_values == 100.0)

    def test_risk_neutral_drift(self):
        grid = PathGrid(1.0, 4)
        m = BrownianMotion(0.0, 0.5)
        path = SamplePath(grid, np.zeros(5), m, 0)
        a = asset_path(path, 100.0, rate=0.05, risk_neutral=True)
        np.testing.assert_allclose(a.s_values, 100 * np.exp((0.05 - 0.125) * grid.times), rtol=1e-15)

    @pytest.mark.parametrize("spec", [BrownianMotion(0, 0.5), make_model("nig", {"alpha": 3.0})])
    def test_martingale(self, spec):
        grid = PathGrid(1.0, 4)
        batch = simulate_batch(spec, grid, 100_000, seed=5)
        s = np.array([asset_path(p, 100.0, 0.05, True).s_values[-1] for p in batch])
        target = 100 * math.exp(0.05)
        assert abs(s.mean() / target - 1) < 3 * s.std() / math.sqrt(s.size) / target

    def test_unavailable(self):
        path = simulate_path(default_model("gh"), PathGrid(1.0, 3), RngStream(0))
        with pytest.raises(MartingaleCorrectionUnavailable):
            asset_path(path, 100.0, 0.05, True)
        with pytest.raises(DomainError):
            asset_path(path, -1.0)


class TestBatch:
    def test_single_path_equals_simulate_path(self):
        m, grid = default_model("merton"), PathGrid(1.0, 50)
        b = simulate_batch(m, grid, 1, seed=3)
        assert np.array_equal(b[0].l_values, simulate_path(m, grid, RngStream(3, 0)).l_values)

    def test_reproducible(self):
        m, grid = default_model("cgmy"), PathGrid(1.0, 30)
        a = simulate_batch(m, grid, 6, seed=8)
        b = simulate_batch(m, grid, 6, seed=8)
        assert all(np.array_equal(x.l_values, y.l_values) for x, y in zip(a, b))
        assert [p.stream_id for p in a] == list(range(6))

    def test_workers_invariant(self):
        m, grid = default_model("nig"), PathGrid(1.0, 30)
        one = simulate_batch(m, grid, 17, seed=2, workers=1)
        eight = simulate_batch(m, grid, 17, seed=2, workers=8)
        assert all(np.array_equal(x.l_values, y.l_values) for x, y in zip(one, eight))

    def test_invalid(self):
        with pytest.raises(DomainError):
            simulate_batch(default_model("bm"), PathGrid(1, 2), 0, seed=1)
