import numpy as np
import pytest

from nsae.errors import DimensionMismatch, NonFiniteValue, ZeroVector
from nsae.vecmath import cosine_score, l2_normalize, pairwise_cosine

from oracles import oracle_cosine, oracle_pairwise


class TestCosineScore:
    def test_identical_direction(self):
        assert cosine_score([1, 0], [1, 0]) == 1.0

    def test_orthogonal(self):
        assert cosine_score([1, 0], [0, 1]) == 0.0

    def test_known_value(self):
        # frozen from the scalar-loop oracle
        assert abs(cosine_score([1, 2, 3], [4, 5, 6]) - 0.974631846) < 1e-9
        assert abs(cosine_score([1, 2, 3], [4, 5, 6]) - oracle_cosine([1, 2, 3], [4, 5, 6])) < 1e-12

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatch):
            cosine_score([1, 2], [1, 2, 3])

    def test_zero_vector_is_hard_error(self):
        with pytest.raises(ZeroVector):
            cosine_score([0.0, 0.0], [1.0, 0.0])
        with pytest.raises(ZeroVector):
            cosine_score([1.0, 0.0], [1e-13, 0.0])

    def test_non_finite_rejected(self):
        with pytest.raises(NonFiniteValue):
            cosine_score([np.nan, 1.0], [1.0, 1.0])

    def test_commutative_exactly(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            a = rng.normal(size=12)
            b = rng.normal(size=12)
            assert cosine_score(a, b) == cosine_score(b, a)

    def test_positive_scaling_gives_one(self):
        rng = np.random.default_rng(11)
        for c in (0.5, 2.0, 1e6, 1e-6):
            a = rng.normal(size=9)
            assert abs(cosine_score(a, c * a) - 1.0) < 1e-9

    def test_negation_gives_minus_one(self):
        rng = np.random.default_rng(13)
        a = rng.normal(size=9)
        assert abs(cosine_score(a, -a) + 1.0) < 1e-9

    def test_bit_identical_inputs_score_exactly_one(self):
        rng = np.random.default_rng(17)
        a = rng.normal(size=33)
        assert cosine_score(a, a.copy()) == 1.0

    def test_range(self):
        rng = np.random.default_rng(19)
        for _ in range(100):
            s = cosine_score(rng.normal(size=5), rng.normal(size=5))
            assert -1.0 <= s <= 1.0


class TestL2Normalize:
    def test_three_four_five(self):
        np.testing.assert_allclose(l2_normalize([3, 4]), [0.6, 0.8], rtol=0, atol=1e-15)

    def test_already_unit(self):
        np.testing.assert_array_equal(l2_normalize([1, 0, 0]), [1.0, 0.0, 0.0])

    def test_diagonal(self):
        # frozen: 1/sqrt(2)
        np.testing.assert_allclose(l2_normalize([2, 2]), [0.70710678, 0.70710678], atol=1e-8)

    def test_result_is_unit_norm(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            v = l2_normalize(rng.normal(size=20) * 10.0 ** rng.integers(-6, 6))
            assert abs(np.linalg.norm(v) - 1.0) < 1e-9

    def test_zero_raises(self):
        with pytest.raises(ZeroVector):
            l2_normalize([0.0, 0.0, 0.0])


class TestPairwiseCosine:
    def test_identity_basis(self):
        np.testing.assert_allclose(pairwise_cosine(np.eye(3)), np.eye(3), atol=1e-15)

    def test_single_vector(self):
        np.testing.assert_allclose(pairwise_cosine([[1.0, 1.0]]), [[1.0]], atol=1e-12)

    def test_matches_scalar_oracle(self):
        rng = np.random.default_rng(42)
        vs = rng.normal(size=(4, 7))
        got = pairwise_cosine(vs)
        want = oracle_pairwise(vs.tolist())
        np.testing.assert_allclose(got, want, atol=1e-9)

    def test_matches_n_squared_cosine_calls(self):
        rng = np.random.default_rng(5)
        vs = rng.normal(size=(6, 11))
        sim = pairwise_cosine(vs)
        for i in range(6):
            for j in range(6):
                if i == j:
                    continue  # cosine_score short-circuits identical inputs
                assert abs(sim[i, j] - cosine_score(vs[i], vs[j])) < 1e-9

    def test_invariants(self):
        rng = np.random.default_rng(23)
        sim = pairwise_cosine(rng.normal(size=(12, 9)))
        np.testing.assert_array_equal(sim, sim.T)  # symmetric by construction
        np.testing.assert_allclose(np.diag(sim), 1.0, atol=1e-9)
        assert sim.min() >= -1.0 and sim.max() <= 1.0

    def test_zero_row_names_index(self):
        vs = np.ones((4, 3))
        vs[2] = 0.0
        with pytest.raises(ZeroVector, match="2"):
            pairwise_cosine(vs)
