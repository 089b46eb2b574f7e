"""Hawkes tree model: simulation, conditional continuation, likelihood, fit.

Oracles:
  * a three-node tree whose future NLL is assembled by hand from the
    Weibull mass and lognormal CDF closed forms;
  * quadrature of the conditional intensity against the compensator;
  * branching-process algebra for expected sizes (1 + a/(1-n_b)), both
    unconditional and conditional on a partially observed tree;
  * two-sample KS between conditional simulation at t_learn=0 and the
    unconditional simulator.
"""

from __future__ import annotations

import numpy as np
import pytest
from scipy import integrate, stats

from treehawkes.errors import (
    InsufficientData,
    InvalidParams,
    InvalidWindow,
    NoFutureEvents,
    Supercritical,
)
from treehawkes.hawkes import (
    HawkesParams,
    expected_size,
    fit_hawkes,
    nll_future,
    predict_size,
    simulate_conditional,
    simulate_tree,
)
from treehawkes.kernels import (
    LognormKernel,
    WeibullIntensity,
    logn_cdf,
    logn_pdf,
    weib_intensity,
    weib_mass,
)
from treehawkes.rng import substream
from treehawkes.tree import TimedTree, node_depths
from treehawkes.temporal import event_series

PARAMS = HawkesParams(
    root=WeibullIntensity(a=5.0, b=2.0, alpha=0.9),
    kernel=LognormKernel(mu=-1.0, sigma=1.2),
    n_b=0.7,
)


def chain3() -> TimedTree:
    return TimedTree(
        times=np.array([0.0, 1.0, 1.8]),
        parents=np.array([-1, 0, 1]),
        tree_id="chain3",
    )


class TestParams:
    def test_supercritical_rejected(self):
        with pytest.raises(Supercritical):
            HawkesParams(root=PARAMS.root, kernel=PARAMS.kernel, n_b=1.0)

    def test_negative_nb_rejected(self):
        with pytest.raises(InvalidParams):
            HawkesParams(root=PARAMS.root, kernel=PARAMS.kernel, n_b=-0.1)

    def test_expected_size(self):
        assert expected_size(PARAMS) == pytest.approx(1.0 + 5.0 / 0.3, rel=1e-12)


class TestSimulate:
    def test_zero_horizon_is_bare_root(self, rng):
        for h in (0.0, -3.0):
            t = simulate_tree(PARAMS, h, rng)
            assert t.n == 1

    def test_structure_valid(self, rng):
        for _ in range(50):
            t = simulate_tree(PARAMS, 24.0, rng)
            assert t.parents[0] == -1
            if t.n > 1:
                assert np.all(t.parents[1:] >= 0)
                assert np.all(t.parents[1:] < np.arange(1, t.n))
                assert np.all(t.times[1:] >= t.times[t.parents[1:]])
                assert float(t.times.max()) <= 24.0

    def test_horizon_caps_times(self, rng):
        t = simulate_tree(PARAMS, 1.0, rng)
        assert float(t.times.max()) <= 1.0

    def test_mean_size_matches_branching_algebra(self):
        # subsampled version of the size law; the acceptance suite runs
        # the full 1e5-replicate version
        rng = substream(202, "sizes")
        sizes = np.array([simulate_tree(PARAMS, np.inf, rng).n for _ in range(20_000)])
        expect = expected_size(PARAMS)
        se = sizes.std(ddof=1) / np.sqrt(sizes.shape[0])
        assert abs(sizes.mean() - expect) <= 3.0 * se

    def test_zero_nb_two_generations(self, rng):
        p = HawkesParams(root=WeibullIntensity(3.0, 1.0, 1.0), kernel=PARAMS.kernel, n_b=0.0)
        for _ in range(20):
            t = simulate_tree(p, np.inf, rng)
            if t.n > 1:
                assert int(node_depths(t).max()) == 1


class TestNllFuture:
    def test_hand_assembled_three_node_value(self):
        # future events at 1.0 and 1.8 with t_learn = 0.5:
        #   lambda(1.0) = mu(1.0)                 (no earlier comment)
        #   lambda(1.8) = mu(1.8) + n_b phi(0.8)  (the comment at 1.0)
        # compensator = mass(1.8) - mass(0.5) + n_b (F(0.8) - 0) + n_b (F(0) - 0)
        p, t = PARAMS, chain3()
        lam1 = weib_intensity(1.0, p.root)
        lam2 = weib_intensity(1.8, p.root) + p.n_b * logn_pdf(0.8, p.kernel)
        comp = (
            weib_mass(1.8, p.root)
            - weib_mass(0.5, p.root)
            + p.n_b * float(logn_cdf(0.8, p.kernel))
        )
        expect = comp - np.log(lam1) - np.log(lam2)
        assert nll_future(p, t, 0.5) == pytest.approx(float(expect), rel=1e-12)

    def test_compensator_matches_quadrature(self):
        # integral of the conditional intensity over (t_learn, T_end]
        p, t = PARAMS, chain3()
        series = event_series(t)
        t_learn, t_end = 0.5, 1.8

        def lam(s):
            out = float(weib_intensity(s, p.root))
            for tau in series:
                if tau < s:
                    out += p.n_b * float(logn_pdf(s - tau, p.kernel))
            return out

        num, _ = integrate.quad(lam, t_learn, t_end, limit=400, points=[1.0])
        comp = (
            weib_mass(t_end, p.root)
            - weib_mass(t_learn, p.root)
            + p.n_b * float(np.sum(logn_cdf(t_end - series, p.kernel) - logn_cdf(t_learn - series, p.kernel)))
        )
        assert comp == pytest.approx(num, rel=1e-9)

    def test_no_future_events(self):
        with pytest.raises(NoFutureEvents):
            nll_future(PARAMS, chain3(), 2.0)

    def test_negative_window(self):
        with pytest.raises(InvalidWindow):
            nll_future(PARAMS, chain3(), -0.5)

    def test_larger_history_lowers_event_term(self):
        # adding self-excitation mass can only increase lambda at later events
        p = PARAMS
        t = chain3()
        dense = TimedTree(
            times=np.array([0.0, 0.2, 1.0, 1.8]),
            parents=np.array([-1, 0, 0, 1]),
        )
        assert np.isfinite(nll_future(p, t, 0.5))
        assert np.isfinite(nll_future(p, dense, 0.5))


class TestConditional:
    def observed(self):
        # root with comments at 0.4 and 1.1 (depths 1 and 2)
        return TimedTree(
            times=np.array([0.0, 0.4, 1.1]),
            parents=np.array([-1, 0, 1]),
        )

    def test_rejects_observation_past_window(self, rng):
        with pytest.raises(InvalidWindow):
            simulate_conditional(PARAMS, self.observed(), 1.0, np.inf, rng)

    def test_rejects_horizon_before_window(self, rng):
        with pytest.raises(InvalidWindow):
            simulate_conditional(PARAMS, self.observed(), 2.0, 1.5, rng)

    def test_observed_prefix_preserved(self, rng):
        obs = self.observed()
        t = simulate_conditional(PARAMS, obs, 1.5, np.inf, rng)
        np.testing.assert_allclose(t.times[:3], obs.times)
        np.testing.assert_array_equal(t.parents[:3], obs.parents)
        assert t.n >= 3
        if t.n > 3:
            assert float(t.times[3:].min()) > 1.5 - 1e-12

    def test_new_root_children_rate(self):
        # new depth-1 arrivals are Poisson(a * S_Weib(t_learn))
        rng = substream(7, "cond-root")
        obs, L = self.observed(), 1.5
        runs = 30_000
        new_rootkids = np.empty(runs)
        for r in range(runs):
            t = simulate_conditional(PARAMS, obs, L, np.inf, rng)
            new_rootkids[r] = int(np.sum(t.parents[3:] == 0))
        expect = PARAMS.root.a * float(np.exp(-((L / PARAMS.root.b) ** PARAMS.root.alpha)))
        se = new_rootkids.std(ddof=1) / np.sqrt(runs)
        assert abs(new_rootkids.mean() - expect) <= 3.0 * se

    def test_mean_final_size_matches_branching_algebra(self):
        # E[size | observed at L] = s_obs
        #   + (a S_Weib(L) + n_b sum_v S_LogN(L - tau_v)) / (1 - n_b)
        rng = substream(8, "cond-size")
        obs, L = self.observed(), 1.5
        p = PARAMS
        surv_root = float(np.exp(-((L / p.root.b) ** p.root.alpha)))
        surv_comments = float(np.sum(1.0 - logn_cdf(L - obs.times[1:], p.kernel)))
        expect = obs.n + (p.root.a * surv_root + p.n_b * surv_comments) / (1.0 - p.n_b)
        runs = 30_000
        sizes = np.empty(runs)
        for r in range(runs):
            sizes[r] = simulate_conditional(p, obs, L, np.inf, rng).n
        se = sizes.std(ddof=1) / np.sqrt(runs)
        assert abs(sizes.mean() - expect) <= 3.5 * se

    def test_t_learn_zero_matches_unconditional(self):
        # continuing a bare root from 0 must reproduce the unconditional law
        rng = substream(9, "cond-zero")
        bare = TimedTree(times=np.array([0.0]), parents=np.array([-1]))
        cond = np.array(
            [simulate_conditional(PARAMS, bare, 0.0, np.inf, rng).n for _ in range(4000)]
        )
        free = np.array([simulate_tree(PARAMS, np.inf, rng).n for _ in range(4000)])
        assert stats.ks_2samp(cond, free).pvalue > 0.01

    def test_horizon_respected(self, rng):
        t = simulate_conditional(PARAMS, self.observed(), 1.5, 3.0, rng)
        assert float(t.times.max()) <= 3.0


class TestPredictSize:
    def test_mean_of_draws(self, rng):
        obs = TimedTree(times=np.array([0.0, 0.4]), parents=np.array([-1, 0]))
        mean, sizes = predict_size(PARAMS, obs, 1.0, 64, rng)
        assert sizes.shape == (64,)
        assert mean == pytest.approx(float(sizes.mean()))
        assert np.all(sizes >= 2)


class TestFit:
    def sim(self, seed, a=30.0, n_b=0.8):
        params = HawkesParams(
            root=WeibullIntensity(a=a, b=1.0, alpha=0.8),
            kernel=LognormKernel(mu=-0.5, sigma=1.2),
            n_b=n_b,
        )
        rng = substream(seed, "fit-smoke")
        return params, simulate_tree(params, np.inf, rng)

    def test_recovers_on_a_large_tree(self):
        params, tree = self.sim(3)
        assert tree.n > 120
        fit = fit_hawkes(tree, np.inf)
        assert fit.converged
        assert fit.flags == ()
        # single-tree noise is substantial; bounds here are deliberately loose
        assert fit.params.root.a == pytest.approx(params.root.a, rel=0.4)
        assert fit.params.kernel.mu == pytest.approx(params.kernel.mu, abs=0.4)
        assert fit.params.kernel.sigma == pytest.approx(params.kernel.sigma, rel=0.3)
        assert fit.params.n_b == pytest.approx(params.n_b, abs=0.12)

    def test_truncated_fit_only_sees_window(self):
        params, tree = self.sim(4)
        fit = fit_hawkes(tree, 12.0)
        assert 0.0 <= fit.params.n_b < 1.0
        assert np.isfinite(fit.loglik)

    def test_root_only_raises(self):
        bare = TimedTree(times=np.array([0.0]), parents=np.array([-1]))
        with pytest.raises(InsufficientData):
            fit_hawkes(bare, np.inf)

    def test_truncation_to_root_raises(self):
        t = TimedTree(times=np.array([0.0, 5.0]), parents=np.array([-1, 0]))
        with pytest.raises(InsufficientData):
            fit_hawkes(t, 1.0)

    def test_star_tree_uses_default_kernel(self):
        t = TimedTree(
            times=np.array([0.0, 1.0, 2.0, 3.0]),
            parents=np.array([-1, 0, 0, 0]),
        )
        fit = fit_hawkes(t, np.inf)
        assert "default_kernel" in fit.flags
        assert fit.params.n_b == 0.0

    def test_star_tree_prefers_fallback_kernel(self):
        t = TimedTree(
            times=np.array([0.0, 1.0, 2.0, 3.0]),
            parents=np.array([-1, 0, 0, 0]),
        )
        pooled = LognormKernel(mu=-0.7, sigma=1.8)
        fit = fit_hawkes(t, np.inf, fallback_kernel=pooled)
        assert "pooled_kernel" in fit.flags
        assert fit.params.kernel == pooled

    def test_nb_is_degree_estimate(self):
        _, tree = self.sim(5)
        from treehawkes.tree import branching_number

        fit = fit_hawkes(tree, np.inf)
        assert fit.params.n_b == branching_number(tree)
        assert fit.n_b_raw == fit.params.n_b
