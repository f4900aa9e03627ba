import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from kostlab.ensemble import (
    KostlanSample,
    KostlanSampler,
    kostlan_weights,
    multi_indices,
    normal_stream,
    read_jsonl,
    sample,
    uniform_stream,
    write_jsonl,
)
from kostlab.roots1d import count_real_roots_batch


def test_weights_degree_one_line():
    w = kostlan_weights(1, 1).as_dict()
    assert w[(0,)] == pytest.approx(math.sqrt(2), rel=1e-15)
    assert w[(1,)] == pytest.approx(math.sqrt(2), rel=1e-15)


def test_weights_quadratic_middle():
    assert kostlan_weights(1, 2).as_dict()[(1,)] == pytest.approx(math.sqrt(6), rel=1e-15)


def test_weights_plane_degree_one():
    w = kostlan_weights(2, 1)
    assert len(w) == 3
    np.testing.assert_allclose(w.w, math.sqrt(3), rtol=1e-15)


@given(n=st.sampled_from([1, 2]), d=st.integers(1, 40))
def test_weights_match_factorial_formula(n, d):
    w = kostlan_weights(n, d).as_dict()
    assert len(w) == math.comb(d + n, n)
    for j, v in w.items():
        den = math.factorial(n) * math.prod(math.factorial(x) for x in j) * math.factorial(d - sum(j))
        assert v > 0
        assert v == pytest.approx(math.sqrt(math.factorial(d + n) / den), rel=1e-12)


def test_weights_large_degree_finite():
    w = kostlan_weights(1, 500).w
    assert np.all(np.isfinite(w)) and np.all(w > 0)
    # the middle weight is sqrt(501 * binom(500, 250)), far past double-precision factorials
    assert np.log(w[250]) == pytest.approx(0.5 * (math.log(501) + math.log(math.comb(500, 250))), rel=1e-12)


@pytest.mark.parametrize("n, d", [(0, 3), (3, 2), (1, 0), (2, -1)])
def test_weights_reject_bad_parameters(n, d):
    with pytest.raises(ValueError):
        kostlan_weights(n, d)


def test_multi_indices_lexicographic():
    assert multi_indices(2, 1) == [(0, 0), (0, 1), (1, 0)]


def test_sample_is_deterministic():
    a = sample(1, 5, 1234, 7)
    b = sample(1, 5, 1234, 7)
    assert np.array_equal(a.a, b.a)
    assert not np.array_equal(a.a, sample(1, 5, 1234, 8).a)
    assert not np.array_equal(a.a, sample(1, 5, 1235, 7).a)


def test_sample_independent_of_batch_composition():
    sampler = KostlanSampler(2, 4)
    batch = sampler.sample_matrix(99, range(10, 20))
    for row, i in enumerate(range(10, 20)):
        assert np.array_equal(batch[row], sampler.sample(99, i).a)


def test_streams_are_separate():
    u0 = uniform_stream(5, 1, 8, stream=0)
    u3 = uniform_stream(5, 1, 8, stream=3)
    assert not np.array_equal(u0, u3)
    assert np.all((u0 > 0) & (u0 < 1))


def test_coefficient_moments():
    z = normal_stream(2024, 0, 100_000)
    assert abs(z.mean()) < 4 / math.sqrt(1e5)
    assert z.var() == pytest.approx(1.0, rel=0.05)


def test_fixed_coefficient_moments_across_samples():
    a = KostlanSampler(1, 3).sample_matrix(17, range(100_000))[:, 2]
    assert abs(a.mean()) < 4 / math.sqrt(1e5)
    assert a.var() == pytest.approx(1.0, rel=0.05)


def test_linear_root_is_cauchy():
    a = KostlanSampler(1, 1).sample_matrix(31, range(10_000))
    roots = -a[:, 0] / a[:, 1]
    res = stats.kstest(roots, "cauchy")
    assert res.pvalue > 0.01


def test_monomial_coefficients_are_weighted():
    s = sample(1, 4, 8, 0)
    np.testing.assert_array_equal(s.coeffs, s.a * kostlan_weights(1, 4).w)
    np.testing.assert_array_equal(s.to_poly().c, s.coeffs)


def test_plane_sample_to_poly():
    s = sample(2, 3, 8, 0)
    p = s.to_poly()
    for (j, k), v in zip(s.indices, s.coeffs):
        assert p.c[j, k] == v


def test_jsonl_round_trip():
    samples = [sample(2, 3, 42, i) for i in range(3)]
    buf = io.StringIO()
    assert write_jsonl(samples, buf) == 3
    buf.seek(0)
    back = list(read_jsonl(buf))
    for s, t in zip(samples, back):
        assert (s.n, s.d, s.seed, s.index) == (t.n, t.d, t.seed, t.index)
        assert np.array_equal(s.a, t.a)


def test_from_json_rejects_wrong_length():
    with pytest.raises(ValueError):
        KostlanSample.from_json({"n": 1, "d": 3, "seed": 0, "index": 0, "coeffs": [1.0, 2.0]})


def test_reversal_invariance_of_root_counts():
    d = 7
    a = KostlanSampler(1, d).sample_matrix(77, range(10_000))
    fwd = count_real_roots_batch(a, d)
    rev = count_real_roots_batch(a[:, ::-1].copy(), d)
    # the weights are symmetric, so reversing coefficients is x -> 1/x: counts agree sample by sample
    assert np.array_equal(fwd, rev)
    b = KostlanSampler(1, d).sample_matrix(78, range(10_000))
    assert stats.ks_2samp(fwd, count_real_roots_batch(b[:, ::-1].copy(), d), method="asymp").pvalue > 0.01


@settings(max_examples=25, deadline=None)
@given(scale=st.floats(1e-3, 1e3), seed=st.integers(0, 2**32))
def test_root_counts_scale_invariant(scale, seed):
    a = KostlanSampler(1, 9).sample_matrix(seed, range(20))
    assert np.array_equal(count_real_roots_batch(a, 9), count_real_roots_batch(a * scale, 9))


def test_aggregates_order_independent():
    d = 12
    a = KostlanSampler(1, d).sample_matrix(5, range(500))
    counts = count_real_roots_batch(a, d)
    perm = np.random.default_rng(0).permutation(500)
    counts_p = count_real_roots_batch(a[perm], d)
    assert counts.sum() == counts_p.sum()
    assert np.array_equal(np.bincount(counts), np.bincount(counts_p))
