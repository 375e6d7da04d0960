import inspect

import numpy as np
import pytest

from nsae.errors import InvalidK, InvalidThreshold, TooFewVectors
from nsae.neighbors import build_training_pairs, select_threshold, select_topk, self_pairs
from nsae.vecmath import pairwise_cosine

from oracles import oracle_threshold, oracle_topk

SIM3 = np.array([[1.0, 0.9, 0.2], [0.9, 1.0, 0.3], [0.2, 0.3, 1.0]])


def random_sim(seed, n, dim=8):
    rng = np.random.default_rng(seed)
    return pairwise_cosine(rng.normal(size=(n, dim)))


class TestSelectTopK:
    def test_small_example(self):
        # frozen from the brute-force argmax oracle
        assert select_topk(SIM3, 1).neighbors == [[1], [0], [1]]

    def test_k_clamped_to_n_minus_1(self):
        assert all(len(r) == 2 for r in select_topk(SIM3, 5).neighbors)

    def test_matches_sort_oracle(self):
        sim = random_sim(101, 6)
        got = select_topk(sim, 3).neighbors
        assert got == oracle_topk(sim.tolist(), 3)

    def test_matches_sort_oracle_many(self):
        for seed in range(20):
            sim = random_sim(seed, 12)
            for k in (1, 3, 5, 11, 20):
                assert select_topk(sim, k).neighbors == oracle_topk(sim.tolist(), k)

    def test_no_self_loops(self):
        sim = random_sim(7, 10)
        for i, row in enumerate(select_topk(sim, 4).neighbors):
            assert i not in row

    def test_topk_correctness_vs_unselected(self):
        # lowest selected score must be >= highest non-selected score
        sim = random_sim(55, 15)
        for i, row in enumerate(select_topk(sim, 5).neighbors):
            rest = [j for j in range(15) if j != i and j not in row]
            assert min(sim[i, j] for j in row) >= max(sim[i, j] for j in rest)

    def test_tie_break_ascending_index(self):
        sim = np.ones((4, 4))
        assert select_topk(sim, 2).neighbors == [[1, 2], [0, 2], [0, 1], [0, 1]]

    def test_errors(self):
        with pytest.raises(InvalidK):
            select_topk(SIM3, 0)
        with pytest.raises(TooFewVectors):
            select_topk(np.array([[1.0]]), 1)


class TestSelectThreshold:
    def test_floor_selects_everything(self):
        nm = select_threshold(SIM3, -1.0)
        assert all(len(r) == 2 for r in nm.neighbors)

    def test_out_of_range_rejected(self):
        with pytest.raises(InvalidThreshold):
            select_threshold(SIM3, 1.0 + 1e-9)
        with pytest.raises(InvalidThreshold):
            select_threshold(SIM3, -1.1)

    def test_exact_duplicates_at_one(self):
        # e1 scaled and e2: only the duplicated direction survives t=1.0
        vs = np.array([[1.0, 0.0], [3.0, 0.0], [0.0, 1.0]])
        nm = select_threshold(pairwise_cosine(vs), 1.0)
        assert nm.neighbors == [[1], [0], []]

    def test_small_example(self):
        # frozen from the brute-force filter oracle
        assert select_threshold(SIM3, 0.25).neighbors == [[1], [0, 2], [1]]

    def test_matches_filter_oracle(self):
        for seed in range(20):
            sim = random_sim(seed + 100, 9)
            for t in (-1.0, -0.3, 0.0, 0.4, 0.9):
                assert select_threshold(sim, t).neighbors == oracle_threshold(sim.tolist(), t)

    def test_monotone_in_threshold(self):
        sim = random_sim(31, 14)
        sizes = None
        for t in (-1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 1.0):
            cur = [len(r) for r in select_threshold(sim, t).neighbors]
            if sizes is not None:
                assert all(c <= p for c, p in zip(cur, sizes))
            sizes = cur

    def test_equals_topk_at_floor(self):
        sim = random_sim(77, 8)
        by_k = select_topk(sim, 7).neighbors
        by_t = select_threshold(sim, -1.0).neighbors
        assert [sorted(r) for r in by_k] == [sorted(r) for r in by_t]


class TestBuildTrainingPairs:
    def test_one_pair_per_row(self):
        pairs = build_training_pairs(select_topk(SIM3, 1))
        assert pairs.shape == (3, 2)

    def test_n_times_k_count(self):
        sim = random_sim(5, 10)
        pairs = build_training_pairs(select_topk(sim, 4))
        assert pairs.shape == (40, 2)

    def test_row_order_concatenation(self):
        nm = select_topk(SIM3, 2)
        pairs = build_training_pairs(nm)
        expect = [(i, j) for i, row in enumerate(nm.neighbors) for j in row]
        assert [tuple(p) for p in pairs] == expect

    def test_top1_fallback_recomputes_argmax(self):
        vs = np.array([[1.0, 0.0], [0.9, 0.1], [-0.5, 1.0]])
        sim = pairwise_cosine(vs)
        nm = select_threshold(sim, 0.99)
        assert nm.neighbors[2] == []
        pairs = build_training_pairs(nm, fallback="top1")
        row2 = [tuple(p) for p in pairs if p[0] == 2]
        best = max((j for j in range(3) if j != 2), key=lambda j: sim[2, j])
        assert row2 == [(2, best)]

    def test_self_fallback(self):
        vs = np.array([[1.0, 0.0], [0.9, 0.1], [-0.5, 1.0]])
        nm = select_threshold(pairwise_cosine(vs), 0.99)
        pairs = build_training_pairs(nm, fallback="self")
        assert (2, 2) in [tuple(p) for p in pairs]

    def test_count_convention_minus_one(self):
        sim = random_sim(9, 8)
        pairs = build_training_pairs(select_topk(sim, 3), count_convention="n_times_k_minus_1")
        assert pairs.shape == (8 * 2, 2)

    def test_loaded_map_without_scores_needs_self_fallback(self):
        from nsae.neighbors import NeighborMap

        nm = NeighborMap([[1], []], "threshold", 0.5, top1=None)
        with pytest.raises(ValueError, match="top1"):
            build_training_pairs(nm, fallback="top1")

    def test_self_pairs(self):
        assert [tuple(p) for p in self_pairs(3)] == [(0, 0), (1, 1), (2, 2)]


def test_selection_is_structurally_label_free():
    # the operations cannot consult identity labels: no parameter accepts them
    for fn in (select_topk, select_threshold, build_training_pairs):
        names = set(inspect.signature(fn).parameters)
        assert not names & {"labels", "identities", "classes", "y"}
