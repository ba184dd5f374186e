import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ratrecover.field import FieldParams
from ratrecover.irs import IrsCode, decode, encode
from ratrecover.poly import EvaluationGrid, Polynomial, interpolate
from ratrecover.srfr import DecodingFailure


@pytest.fixture
def code101(F101):
    return IrsCode(n=20, k=6, l=2, grid=EvaluationGrid.first(F101, 20))


def random_message(code, rng):
    return [Polynomial.random(code.grid.field, code.k - 1, rng, exact=False) for _ in range(code.l)]


class TestEncode:
    def test_zero_message(self, code101):
        F = code101.grid.field
        assert not np.any(encode(code101, [Polynomial.zero(F)] * 2))

    def test_small_example(self, F7):
        code = IrsCode(2, 2, 1, EvaluationGrid(F7, (1, 2)))
        assert encode(code, [Polynomial(F7, (1, 1))]).tolist() == [[2, 3]]

    def test_interpolation_round_trip(self, code101, rng):
        f = random_message(code101, rng)
        c = encode(code101, f)
        assert [interpolate(code101.grid, row) for row in c] == f

    def test_rejects_high_degree(self, code101):
        F = code101.grid.field
        with pytest.raises(ValueError):
            encode(code101, [Polynomial.monomial(F, 6), Polynomial.zero(F)])

    def test_rejects_bad_code(self, F7):
        with pytest.raises(ValueError):
            IrsCode(3, 4, 1, EvaluationGrid(F7, (1, 2, 3)))


class TestDecode:
    def test_no_errors(self, code101, rng):
        f = random_message(code101, rng)
        assert decode(code101, encode(code101, f), 0) == f

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6))
    def test_classic_radius_single_row(self, seed):
        F = FieldParams(101)
        rng = np.random.default_rng(seed)
        n = int(rng.integers(5, 20))
        k = int(rng.integers(1, n))
        code = IrsCode(n, k, 1, EvaluationGrid.random(F, n, rng))
        f = random_message(code, rng)
        word = encode(code, f)
        t = code.unique_radius
        for j in rng.choice(n, size=t, replace=False):
            word[0, j] = (word[0, j] + 1 + rng.integers(0, 100)) % 101
        assert decode(code, word, t) == f

    def test_burst_errors_interleaved(self, F65537, rng):
        # l(n-k)/(l+1) burst errors, random values over a large field
        n, k, l = 30, 10, 3
        code = IrsCode(n, k, l, EvaluationGrid.first(F65537, n))
        eps = l * (n - k) // (l + 1)
        assert eps > code.unique_radius
        for _ in range(10):
            f = random_message(code, rng)
            word = encode(code, f)
            for j in rng.choice(n, size=eps, replace=False):
                word[:, j] = (word[:, j] + 1 + F65537.sample_array(rng, l) % 65536) % 65537
            assert decode(code, word, eps) == f

    def test_too_many_errors_fails(self, F101, rng):
        code = IrsCode(10, 4, 1, EvaluationGrid.first(F101, 10))
        # a uniform word is far from every codeword with overwhelming probability
        with pytest.raises(DecodingFailure):
            decode(code, F101.sample_array(rng, (1, 10)), 1)
