import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from codebook_prior import Codebook, quantize
from codebook_prior.distances import pairwise_distances

from conftest import brute_force_nearest, random_codebook


class TestQuantize:
    def test_tokens_map_to_themselves(self):
        cb = random_codebook(0, 20, 6)
        res = quantize(cb.vectors, cb)
        assert np.array_equal(res.indices, np.arange(20))
        assert np.allclose(res.distances, 0.0, atol=1e-7)

    def test_matches_brute_force(self):
        cb = random_codebook(1, 50, 8)
        queries = np.random.default_rng(2).normal(size=(200, 8))
        res = quantize(queries, cb)
        idx, dist = brute_force_nearest(queries, cb.vectors)
        assert np.array_equal(res.indices, idx)
        assert np.allclose(res.distances, dist, atol=1e-9)

    def test_ties_go_to_lowest_index(self):
        # tokens 0 and 2 are identical; the query is equidistant from both
        cb = Codebook(np.array([[1.0, 0.0], [5.0, 5.0], [1.0, 0.0]]))
        res = quantize(np.array([[0.0, 0.0]]), cb)
        assert res.indices[0] == 0

    def test_blocking_is_invisible(self):
        cb = random_codebook(3, 40, 5)
        queries = np.random.default_rng(4).normal(size=(100, 5))
        a = quantize(queries, cb, block=7)
        b = quantize(queries, cb, block=10_000)
        assert np.array_equal(a.indices, b.indices)
        assert np.array_equal(a.distances, b.distances)

    def test_dim_mismatch(self):
        cb = random_codebook(5, 10, 4)
        with pytest.raises(Exception):
            quantize(np.zeros((3, 5)), cb)

    @settings(max_examples=30, deadline=None)
    @given(
        data=hnp.arrays(
            np.float64,
            st.tuples(st.integers(2, 12), st.integers(1, 4)),
            elements=st.floats(-100, 100, allow_nan=False),
        ),
        seed=st.integers(0, 2**16),
    )
    def test_quantize_is_argmin_property(self, data, seed):
        cb = Codebook(data)
        queries = np.random.default_rng(seed).normal(size=(5, cb.dim))
        res = quantize(queries, cb)
        full = np.sqrt(np.sum((queries[:, None, :] - data[None]) ** 2, axis=2))
        assert np.all(res.distances <= full.min(axis=1) + 1e-9)


class TestPairwiseDistances:
    def test_self_matrix_is_bitwise_symmetric(self):
        x = np.random.default_rng(0).normal(size=(300, 9))
        d = pairwise_distances(x)
        assert np.array_equal(d, d.T)
        assert np.allclose(np.diag(d), 0.0, atol=1e-6)

    def test_matches_definition(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(30, 4))
        y = rng.normal(size=(17, 4))
        d = pairwise_distances(x, y)
        ref = np.sqrt(np.sum((x[:, None] - y[None]) ** 2, axis=2))
        assert np.allclose(d, ref, atol=1e-10)

    def test_blocking_is_consistent(self):
        # block size changes BLAS summation order, so agreement is numeric,
        # not bitwise; symmetry must hold bitwise either way
        x = np.random.default_rng(2).normal(size=(101, 6))
        a = pairwise_distances(x, block=13)
        b = pairwise_distances(x, block=10_000)
        assert np.allclose(a, b, atol=1e-10)
        assert np.array_equal(a, a.T)
        assert np.array_equal(b, b.T)

    def test_cosine_metric(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(10, 5))
        d = pairwise_distances(x, metric="cosine")
        norms = x / np.linalg.norm(x, axis=1, keepdims=True)
        ref = 1.0 - norms @ norms.T
        np.fill_diagonal(ref, 0.0)
        assert np.allclose(d, ref, atol=1e-10)
