import math

import numpy as np
import pytest
from scipy.special import betaln, gammaln

from ptdep import engine
from ptdep.engine import (
    HyperParams,
    PartitionConfig,
    log_bayes_factor,
    log_cell_evidence,
    posterior_dependence,
)
from ptdep.errors import DegenerateSample
from ptdep.transforms import PairedSample, to_unit_square
from ptdep.tree import build_count_tree

from oracles import beta_binomial_quadrature, exact_log_cell_evidence, log_marglik_1d


class TestLogCellEvidence:
    def test_empty_and_single_cells_are_exactly_zero(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            a = float(rng.uniform(0.05, 500.0))
            assert log_cell_evidence((0, 0, 0, 0), a) == 0.0
            counts = [0, 0, 0, 0]
            counts[rng.integers(0, 4)] = 1
            assert log_cell_evidence(tuple(counts), a) == 0.0

    def test_single_point_cancellation_in_raw_formula(self):
        # with one point the Gamma terms cancel analytically
        for q in range(4):
            counts = [0, 0, 0, 0]
            counts[q] = 1
            for a in (0.3, 1.0, 5.0, 80.0, 500.0):
                raw = engine._log_cell_evidence_raw(*counts, a)
                assert abs(raw) <= 1e-12
            # very large a: cancellation is limited by lgamma rounding
            assert abs(engine._log_cell_evidence_raw(*counts, 2000.0)) <= 1e-10

    def test_frozen_oracle_values(self):
        # pinned from the exact big-integer factorial oracle
        assert log_cell_evidence((2, 0, 0, 2), 5.0) == pytest.approx(
            -0.26726468071952536, abs=1e-12
        )
        assert log_cell_evidence((5, 5, 5, 5), 1.0) == pytest.approx(
            1.0443483138310408, abs=1e-12
        )

    def test_matches_exact_oracle_on_random_counts(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            counts = tuple(int(c) for c in rng.integers(0, 11, 4))
            a = int(rng.integers(1, 21))
            got = log_cell_evidence(counts, float(a))
            want = exact_log_cell_evidence(counts, a)
            assert got == pytest.approx(want, abs=1e-10)

    def test_symmetries(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            n0, n1, n2, n3 = (int(c) for c in rng.integers(0, 30, 4))
            a = float(rng.uniform(0.1, 50.0))
            base = log_cell_evidence((n0, n1, n2, n3), a)
            transpose = log_cell_evidence((n0, n2, n1, n3), a)
            mirror_h = log_cell_evidence((n1, n0, n3, n2), a)
            mirror_v = log_cell_evidence((n2, n3, n0, n1), a)
            assert base == pytest.approx(transpose, abs=1e-12)
            assert base == pytest.approx(mirror_h, abs=1e-12)
            assert base == pytest.approx(mirror_v, abs=1e-12)

    def test_assembles_from_beta_function_pieces(self):
        # independent-margins factor minus joint factor, via betaln/gammaln
        rng = np.random.default_rng(3)
        for _ in range(50):
            n0, n1, n2, n3 = (int(c) for c in rng.integers(0, 20, 4))
            if n0 + n1 + n2 + n3 <= 1:
                continue
            a = float(rng.uniform(0.2, 30.0))
            x_factor = betaln(n0 + n2 + 2 * a, n1 + n3 + 2 * a) - betaln(2 * a, 2 * a)
            y_factor = betaln(n0 + n1 + 2 * a, n2 + n3 + 2 * a) - betaln(2 * a, 2 * a)
            joint = (
                gammaln(n0 + a) + gammaln(n1 + a) + gammaln(n2 + a) + gammaln(n3 + a)
                - gammaln(n0 + n1 + n2 + n3 + 4 * a)
            ) - (4 * gammaln(a) - gammaln(4 * a))
            want = x_factor + y_factor - joint
            assert log_cell_evidence((n0, n1, n2, n3), a) == pytest.approx(want, abs=1e-10)

    def test_validation(self):
        with pytest.raises(ValueError):
            log_cell_evidence((-1, 0, 0, 0), 5.0)
        with pytest.raises(ValueError):
            log_cell_evidence((1, 1, 1, 1), 0.0)


class TestOneDimensionalHelper:
    """The Beta-ratio building block matches direct integration junction-wise."""

    def test_against_quadrature(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            n_l, n_r = (int(c) for c in rng.integers(0, 8, 2))
            a_l, a_r = rng.uniform(0.5, 15.0, 2)
            direct = log_marglik_1d([(n_l, n_r)], [(a_l, a_r)])
            integrated = beta_binomial_quadrature(n_l, n_r, a_l, a_r)
            assert direct == pytest.approx(integrated, abs=1e-9)

    def test_product_over_junctions(self):
        cells = [(3, 2), (1, 2), (2, 0)]
        alphas = [(5.0, 5.0), (20.0, 20.0), (20.0, 20.0)]
        total = log_marglik_1d(cells, alphas)
        parts = sum(log_marglik_1d([c], [al]) for c, al in zip(cells, alphas))
        assert total == pytest.approx(parts, abs=1e-12)


class TestLogBayesFactor:
    def test_empty_tree(self):
        from ptdep.transforms import UnitPoints

        empty = build_count_tree(UnitPoints(u=np.array([0.4]), v=np.array([0.6])), 20)
        lb, levels = log_bayes_factor(empty, HyperParams())
        assert lb == 0.0
        assert levels.size == 0

    def test_single_root_cell(self):
        sample = PairedSample(x=[1.0, 2.0], y=[5.0, 1.0])
        tree = build_count_tree(to_unit_square(sample), 20)
        lb, levels = log_bayes_factor(tree, HyperParams(c=5.0))
        assert len(tree.cells) == 1
        assert lb == log_cell_evidence(tree.cells[0].counts, 5.0)
        assert levels[0] == lb

    def test_level_sums_equal_total(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(2, 300))
            sample = PairedSample(x=rng.normal(size=n), y=rng.normal(size=n))
            tree = build_count_tree(to_unit_square(sample), 20)
            lb, levels = log_bayes_factor(tree, HyperParams())
            assert lb == pytest.approx(levels.sum(), abs=1e-10 * max(1, levels.size))

    def test_root_split_uses_level_one_concentration(self):
        sample = PairedSample(x=[1.0, 2.0], y=[5.0, 1.0])
        tree = build_count_tree(to_unit_square(sample), 20)
        lb7, _ = log_bayes_factor(tree, HyperParams(c=7.0))
        assert lb7 == log_cell_evidence(tree.cells[0].counts, 7.0)


class TestPosteriorDependence:
    def test_even_odds(self):
        assert posterior_dependence(0.0, 1.0) == 0.5

    def test_bf_three(self):
        assert posterior_dependence(math.log(3.0), 1.0) == pytest.approx(0.25, abs=1e-14)

    def test_saturation_no_overflow(self):
        assert posterior_dependence(200.0, 1.0) == pytest.approx(0.0, abs=1e-80)
        assert posterior_dependence(-200.0, 1.0) == pytest.approx(1.0, abs=1e-80)
        assert posterior_dependence(5000.0, 1.0) == 0.0
        assert posterior_dependence(-5000.0, 1.0) == 1.0

    def test_complementarity(self):
        rng = np.random.default_rng(6)
        for z in rng.uniform(-300, 300, 200):
            assert posterior_dependence(z, 1.0) + posterior_dependence(-z, 1.0) == pytest.approx(
                1.0, abs=1e-12
            )

    def test_monotone_decreasing(self):
        zs = np.linspace(-30, 30, 301)
        ps = [posterior_dependence(z, 1.0) for z in zs]
        assert all(a >= b for a, b in zip(ps, ps[1:]))

    def test_prior_odds(self):
        assert posterior_dependence(0.0, 3.0) == pytest.approx(0.25, abs=1e-14)


class TestTestDependence:
    def test_single_point_is_prior(self):
        res = engine.test_dependence(PairedSample(x=[3.7], y=[-1.0]))
        assert res.p_dependent == 0.5
        assert res.log_bf == 0.0
        assert res.level_contributions == ()

    def test_coincident_pairs_truncate_finite(self):
        res = engine.test_dependence(PairedSample(x=[1.0, 1.0, 5.0], y=[2.0, 2.0, 7.0]))
        assert res.truncated
        assert math.isfinite(res.log_bf)
        assert len(res.level_contributions) == 20

    def test_matches_tree_reference_route(self):
        rng = np.random.default_rng(7)
        cfg = PartitionConfig()
        for _ in range(10):
            n = int(rng.integers(2, 400))
            sample = PairedSample(x=rng.normal(size=n), y=rng.normal(size=n))
            res = engine.test_dependence(sample, cfg)
            tree = build_count_tree(to_unit_square(sample), cfg.depth_cap)
            lb, levels = log_bayes_factor(tree, cfg.hyper)
            assert res.log_bf == pytest.approx(lb, abs=1e-9)
            assert res.truncated == tree.truncated
            assert len(res.level_contributions) == levels.size
            np.testing.assert_allclose(res.level_contributions, levels, atol=1e-9)

    def test_swap_symmetry(self):
        rng = np.random.default_rng(8)
        sample = PairedSample(x=rng.normal(size=200), y=rng.normal(size=200))
        fwd = engine.test_dependence(sample)
        rev = engine.test_dependence(PairedSample(x=sample.y, y=sample.x))
        assert fwd.log_bf == pytest.approx(rev.log_bf, abs=1e-10)

    def test_degenerate_propagates(self):
        with pytest.raises(DegenerateSample):
            engine.test_dependence(PairedSample(x=[1.0, 1.0, 1.0], y=[1.0, 2.0, 3.0]))

    def test_strong_dependence_detected(self):
        rng = np.random.default_rng(9)
        theta = rng.uniform(0, 2 * np.pi, 4000)
        x = 10 * np.cos(theta) + 2 * rng.standard_normal(4000)
        y = 10 * np.sin(theta) + 2 * rng.standard_normal(4000)
        res = engine.test_dependence(PairedSample(x=x, y=y))
        assert res.p_dependent > 0.95

    def test_deterministic_rerun(self):
        rng = np.random.default_rng(10)
        sample = PairedSample(x=rng.normal(size=150), y=rng.normal(size=150))
        r1 = engine.test_dependence(sample)
        r2 = engine.test_dependence(sample)
        assert r1.log_bf == r2.log_bf
        assert r1.level_contributions == r2.level_contributions


class TestConfigValidation:
    def test_bad_c(self):
        with pytest.raises(ValueError):
            PartitionConfig(c=0.0)

    def test_bad_depth(self):
        with pytest.raises(ValueError):
            PartitionConfig(depth_cap=0)
        with pytest.raises(ValueError):
            PartitionConfig(depth_cap=64)

    def test_bad_prior_odds(self):
        with pytest.raises(ValueError):
            HyperParams(prior_odds=-1.0)
