"""Greedy joint construction of disjoint blue-noise-like mask sets."""

import numpy as np
import pytest

import oracles
from noisemask import (
    MaskTensor,
    OptimBlueConfig,
    OptimBlueParams,
    ParameterError,
    PositionError,
    ShapeError,
    clustering_score,
    export_mask,
    optimize_blue,
    traversal_order,
)


class TestParams:
    def test_defaults(self):
        p = OptimBlueParams()
        assert (p.k, p.transmittance, p.window, p.weights) == (4, 0.2, 7, (1.0, 1.0, 1.0, 1.0))

    def test_validation(self):
        with pytest.raises(ParameterError):
            OptimBlueParams(k=0)
        with pytest.raises(ParameterError):
            OptimBlueParams(transmittance=0.0)
        with pytest.raises(ParameterError):
            OptimBlueParams(transmittance=1.2)
        with pytest.raises(ParameterError):
            OptimBlueParams(window=4)
        with pytest.raises(ParameterError):
            OptimBlueParams(window=1)
        with pytest.raises(ParameterError):
            OptimBlueParams(weights=(1.0, 1.0, 1.0))
        with pytest.raises(ParameterError):
            OptimBlueParams(weights=(1.0, -1.0, 1.0, 1.0))
        with pytest.raises(ParameterError):
            OptimBlueParams(weights=(0.0, 0.0, 0.0, 0.0))

    def test_dict_round_trip(self):
        p = OptimBlueParams(k=5, transmittance=0.3, window=5, weights=(1.0, 2.0, 0.5, 1.0))
        assert OptimBlueParams.from_dict(p.to_dict()) == p

    def test_config_validation(self):
        with pytest.raises(ShapeError):
            OptimBlueConfig(shape=(16, 16, 8))
        with pytest.raises(ShapeError):
            OptimBlueConfig(shape=(1, 16))


class TestTraversalOrder:
    def test_is_a_permutation(self):
        order = traversal_order((5, 7), seed=0)
        assert order.shape == (35, 2)
        flat = order[:, 0] * 7 + order[:, 1]
        assert np.array_equal(np.sort(flat), np.arange(35))

    def test_seeded(self):
        a = traversal_order((6, 6), seed=1)
        b = traversal_order((6, 6), seed=1)
        c = traversal_order((6, 6), seed=2)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)


class TestClusteringScore:
    def test_hand_computed_example(self):
        # Visible cells at (1,2), (2,2), (2,1) on a 4x4 grid, window 3,
        # scored at (2,2): horizontal sees (2,1), vertical sees (1,2),
        # neither diagonal sees anything, and the center never counts.
        visible = np.zeros((4, 4), dtype=bool)
        visible[1, 2] = visible[2, 2] = visible[2, 1] = True
        score = clustering_score(visible, (2, 2), window=3, weights=(1.0, 2.0, 3.0, 4.0))
        assert score == 1.0 * 1 + 2.0 * 1

    def test_border_clipping(self):
        # From the corner only the in-bounds half of each line is scanned;
        # of the three visible cells only (2,2) lies on a corner line (the
        # main diagonal).
        visible = np.zeros((4, 4), dtype=bool)
        visible[1, 2] = visible[2, 2] = visible[2, 1] = True
        assert clustering_score(visible, (0, 0), window=7) == 1.0

    def test_empty_grid_scores_zero(self):
        assert clustering_score(np.zeros((8, 8), dtype=bool), (4, 4)) == 0.0

    def test_window_limits_reach(self):
        visible = np.zeros((9, 9), dtype=bool)
        visible[4, 8] = True  # 4 cells right of center
        assert clustering_score(visible, (4, 4), window=7) == 0.0
        assert clustering_score(visible, (4, 4), window=9) == 1.0

    def test_weights_pick_lines(self):
        visible = np.zeros((5, 5), dtype=bool)
        visible[2, 3] = True  # horizontal neighbor of (2,2)
        visible[3, 3] = True  # main-diagonal neighbor
        assert clustering_score(visible, (2, 2), window=3, weights=(1.0, 0.0, 0.0, 0.0)) == 1.0
        assert clustering_score(visible, (2, 2), window=3, weights=(0.0, 0.0, 1.0, 0.0)) == 1.0
        assert clustering_score(visible, (2, 2), window=3, weights=(0.0, 1.0, 0.0, 0.0)) == 0.0

    def test_position_and_window_validation(self):
        grid = np.zeros((4, 4), dtype=bool)
        with pytest.raises(PositionError):
            clustering_score(grid, (4, 0))
        with pytest.raises(PositionError):
            clustering_score(grid, (-1, 0))
        with pytest.raises(ParameterError):
            clustering_score(grid, (0, 0), window=6)
        with pytest.raises(ShapeError):
            clustering_score(np.zeros((4, 4, 4), dtype=bool), (0, 0))


class TestOptimizeBlue:
    def test_reference_transliteration_matches(self):
        rng = np.random.default_rng(77)
        for seed in range(10):
            shape = (int(rng.integers(2, 7)), int(rng.integers(2, 7)))
            params = OptimBlueParams(
                k=int(rng.integers(1, 4)),
                transmittance=float(rng.uniform(0.05, 1.0)),
                window=int(rng.choice([3, 5, 7])),
                weights=tuple(float(x) for x in rng.uniform(0.1, 3.0, size=4)),
            )
            got = optimize_blue(OptimBlueConfig(shape=shape, params=params, seed=seed))
            ref = oracles.reference_greedy_masks(
                shape,
                params.k,
                params.transmittance,
                params.window,
                params.weights,
                traversal_order(shape, seed=seed),
            )
            assert np.array_equal(got.visible, ref)

    def test_square16_reference_structure(self):
        # 5 masks on 16x16 at transmittance 0.2: cap = 51 each, visible sets
        # pairwise disjoint, and 5 * 51 = 255 leaves exactly one grid cell
        # visible in no mask.
        config = OptimBlueConfig(
            shape=(16, 16), params=OptimBlueParams(k=5, transmittance=0.2), seed=3
        )
        ms = optimize_blue(config)
        assert ms.visible_counts == (51, 51, 51, 51, 51)
        coverage = ms.visible.sum(axis=0)
        assert coverage.max() == 1
        assert int((coverage == 0).sum()) == 1

    def test_counts_match_visible_arrays(self):
        ms = optimize_blue(OptimBlueConfig(shape=(8, 8), seed=5))
        assert ms.visible_counts == tuple(int(v.sum()) for v in ms.visible)

    def test_deterministic(self):
        config = OptimBlueConfig(shape=(12, 12), seed=9)
        assert np.array_equal(optimize_blue(config).visible, optimize_blue(config).visible)
        other = optimize_blue(OptimBlueConfig(shape=(12, 12), seed=10))
        assert not np.array_equal(optimize_blue(config).visible, other.visible)

    def test_tiny_transmittance_leaves_all_masked(self):
        # cap = int(0.001 * 256) = 0: no position can become visible.
        config = OptimBlueConfig(
            shape=(16, 16), params=OptimBlueParams(k=2, transmittance=0.001), seed=0
        )
        ms = optimize_blue(config)
        assert ms.visible_counts == (0, 0)
        assert ms.visible.sum() == 0

    def test_full_transmittance_fills_single_mask(self):
        # cap = N with one mask: every traversed position becomes visible.
        config = OptimBlueConfig(
            shape=(4, 4), params=OptimBlueParams(k=1, transmittance=1.0), seed=1
        )
        ms = optimize_blue(config)
        assert ms.visible_counts == (16,)
        assert ms.visible.all()


class TestExportMask:
    def test_polarity_flip_and_gamma(self):
        config = OptimBlueConfig(
            shape=(16, 16), params=OptimBlueParams(k=5, transmittance=0.2), seed=3
        )
        ms = optimize_blue(config)
        m = export_mask(ms, 0)
        assert isinstance(m, MaskTensor)
        assert m.visible_cells == 51
        assert m.gamma == 1.0 - 51 / 256
        assert np.array_equal(m.bits, ms.visible[0] == 0)
        assert m.source == "optim-blue:seed=3:mask=0"

    def test_index_range(self):
        ms = optimize_blue(OptimBlueConfig(shape=(8, 8), seed=0))
        with pytest.raises(IndexError):
            export_mask(ms, 4)
        with pytest.raises(IndexError):
            export_mask(ms, -1)
