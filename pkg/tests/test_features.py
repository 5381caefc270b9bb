"""Feature vector layout, statistics and standardization."""

import numpy as np
import pytest

from pdspeech.dsp import delta
from pdspeech.features import (VECTOR_LENGTH, apply_standardizer,
                               build_feature_vector, fit_standardizer,
                               segment_statistics)


# naive reference: per-row loops, explicit index arithmetic
def naive_stats(x):
    x = np.asarray(x, dtype=np.float64)
    m1 = np.mean(x)
    d = x - m1
    m2 = np.mean(d * d)
    if m2 < 1e-24:
        return m1, np.sqrt(max(m2, 0.0)), 0.0, 0.0
    m3 = np.mean(d ** 3)
    m4 = np.mean(d ** 4)
    return m1, np.sqrt(m2), m3 / m2 ** 1.5, m4 / (m2 * m2) - 3.0


def naive_delta(mat, order):
    m = np.asarray(mat, dtype=np.float64)
    for _ in range(order):
        n = m.shape[1]
        out = np.zeros_like(m)
        for t in range(n):
            num = np.zeros(m.shape[0])
            for k in range(1, 5):
                num += k * (m[:, min(t + k, n - 1)] - m[:, max(t - k, 0)])
            out[:, t] = num / 60.0
        m = out
    return m


def naive_feature_vector(mat):
    out = np.empty(480)
    for d_ord, m in enumerate([np.asarray(mat, dtype=np.float64),
                               naive_delta(mat, 1), naive_delta(mat, 2)]):
        for c in range(40):
            for s, v in enumerate(naive_stats(m[c])):
                out[d_ord * 160 + c * 4 + s] = v
    return out


class TestSegmentStatistics:
    def test_constant_row(self):
        assert segment_statistics([1, 1, 1, 1]) == (1.0, 0.0, 0.0, 0.0)

    def test_four_point_row(self):
        mean, std, skew, kurt = segment_statistics([1, 2, 3, 4])
        assert mean == 2.5
        assert abs(std - 1.118034) < 1e-6
        assert skew == 0.0
        assert abs(kurt - (-1.36)) < 1e-12

    def test_mirrored_row_zero_skew(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(21)
        sym = np.concatenate([x, 2.0 * x.mean() - x])
        assert abs(segment_statistics(sym)[2]) < 1e-12

    def test_empty_row_rejected(self):
        with pytest.raises(ValueError):
            segment_statistics([])


class TestBuildFeatureVector:
    def test_constant_matrix(self):
        v = build_feature_vector(np.full((40, 25), 3.0))
        assert v.shape == (VECTOR_LENGTH,)
        assert v[0] == 3.0
        means0 = v[0:160:4]
        assert np.all(means0 == 3.0)
        rest = np.delete(v[:160], np.arange(0, 160, 4))
        assert np.all(rest == 0.0)
        assert np.all(v[160:] == 0.0)

    def test_index_479_is_kurt_of_last_row_second_derivative(self):
        rng = np.random.default_rng(1)
        m = rng.standard_normal((40, 37))
        v = build_feature_vector(m)
        assert v[479] == pytest.approx(segment_statistics(delta(m, 2)[39])[3],
                                       abs=1e-12)

    def test_matches_naive_exactly(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            m = rng.standard_normal((40, int(rng.integers(5, 80))))
            v = build_feature_vector(m)
            assert np.array_equal(v, naive_feature_vector(m))

    def test_column_shuffle_preserves_order0_stats(self):
        rng = np.random.default_rng(3)
        m = rng.standard_normal((40, 50))
        perm = rng.permutation(50)
        v1 = build_feature_vector(m)
        v2 = build_feature_vector(m[:, perm])
        assert np.allclose(v1[:160], v2[:160], atol=1e-10)
        assert not np.allclose(v1[160:], v2[160:], atol=1e-6)

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            build_feature_vector(np.zeros((39, 10)))
        with pytest.raises(ValueError):
            build_feature_vector(np.full((40, 10), np.nan))


class TestStandardizer:
    def test_fit_rows_become_zero_mean_unit_std(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((20, 7)) * 5 + 3
        s = fit_standardizer(X)
        Z = apply_standardizer(s, X)
        assert np.max(np.abs(Z.mean(axis=0))) < 1e-9
        assert np.allclose(Z.std(axis=0), 1.0, atol=1e-9)

    def test_constant_column_maps_to_zero(self):
        X = np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
        Z = apply_standardizer(fit_standardizer(X), X)
        assert np.all(Z[:, 1] == 0.0)

    def test_heldout_row_uses_train_statistics(self):
        train = np.array([[0.0], [2.0]])  # mean 1, std 1
        s = fit_standardizer(train)
        out = apply_standardizer(s, np.array([[5.0]]))
        assert out[0, 0] == pytest.approx(4.0)

    def test_idempotent_within_tolerance(self):
        rng = np.random.default_rng(5)
        X = rng.standard_normal((30, 4)) * 2 + 1
        Z = apply_standardizer(fit_standardizer(X), X)
        Z2 = apply_standardizer(fit_standardizer(Z), Z)
        assert np.max(np.abs(Z2 - Z)) < 1e-9

    def test_needs_two_rows(self):
        with pytest.raises(ValueError):
            fit_standardizer(np.ones((1, 3)))
