import numpy as np
import pytest
from hypothesis import given, strategies as st

from ratrecover.field import FieldElement, FieldMismatchError, FieldParams, is_prime, add, mul, neg, sub, inv


def brute_inverse(a, q):
    return next(b for b in range(1, q) if a * b % q == 1)


class TestFieldParams:
    @pytest.mark.parametrize("q", [3, 5, 7, 13, 101, 65537, 2**31 - 1, 2**61 - 1, 18446744073709551557])
    def test_accepts_primes(self, q):
        assert FieldParams(q).q == q

    @pytest.mark.parametrize("q", [0, 1, 2, 4, 9, 561, 65535, 2**61 + 1, 3215031751, 2**64 + 13])
    def test_rejects_non_primes_and_out_of_range(self, q):
        with pytest.raises(ValueError):
            FieldParams(q)

    def test_miller_rabin_matches_trial_division(self):
        def slow(n):
            return n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1))
        assert all(is_prime(n) == slow(n) for n in range(5000))

    def test_dtype_switches_for_large_moduli(self):
        assert FieldParams(65537).dtype is np.int64
        assert FieldParams(2**61 - 1).dtype is object


class TestArithmetic:
    def test_examples_mod_7(self, F7):
        assert F7(3) * F7(5) == F7(1)
        assert F7(4) + F7(0) == F7(4)
        assert F7(6) + F7(1) == F7(0)
        assert -F7(2) == F7(5)
        assert F7(2) - F7(5) == F7(4)

    def test_inverse_examples(self, F7, F13):
        assert F7(3).inv() == F7(brute_inverse(3, 7)) == F7(5)
        assert F7(1).inv() == F7(1)
        assert F13(2).inv() == F13(brute_inverse(2, 13)) == F13(7)

    def test_inverse_of_zero(self, F7):
        with pytest.raises(ZeroDivisionError):
            F7(0).inv()

    def test_mismatched_moduli(self, F7, F13):
        with pytest.raises(FieldMismatchError):
            F7(1) + F13(1)
        with pytest.raises(FieldMismatchError):
            F7(1) * F13(1)

    def test_functional_spellings(self, F13):
        a, b = F13(9), F13(6)
        assert add(a, b) == F13(2)
        assert sub(a, b) == F13(3)
        assert mul(a, b) == F13(2)
        assert neg(a) == F13(4)
        assert inv(a) * a == F13(1)

    def test_non_canonical_value_rejected(self, F7):
        with pytest.raises(ValueError):
            FieldElement(7, F7)

    @given(st.integers(0, 100), st.integers(0, 100), st.integers(0, 100))
    def test_field_axioms(self, a, b, c):
        F = FieldParams(101)
        a, b, c = F(a), F(b), F(c)
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a + b == b + a
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c

    @given(st.integers(1, 65536))
    def test_inverse_involution_and_fermat(self, a):
        F = FieldParams(65537)
        x = F(a)
        assert x.inv().inv() == x
        assert x * x.inv() == F.one
        assert x ** (F.q - 1) == F.one

    @given(st.integers(1, 2**61 - 2))
    def test_large_modulus_fermat(self, a):
        F = FieldParams(2**61 - 1)
        assert F(a) ** (F.q - 1) == F.one


class TestSampling:
    def test_determinism(self):
        F = FieldParams(3)
        r1, r2 = np.random.default_rng(5), np.random.default_rng(5)
        assert [F.sample_uniform(r1) for _ in range(50)] == [F.sample_uniform(r2) for _ in range(50)]

    def test_range(self, rng):
        F = FieldParams(3)
        assert {F.sample_uniform(rng).value for _ in range(200)} <= {0, 1, 2}

    def test_uniform_frequencies(self, rng):
        F = FieldParams(101)
        draws = F.sample_array(rng, 100_000)
        counts = np.bincount(draws, minlength=101)
        p = 1 / 101
        sigma = np.sqrt(100_000 * p * (1 - p))
        assert np.all(np.abs(counts - 100_000 * p) < 5 * sigma)
        chi2 = float(((counts - 100_000 * p) ** 2 / (100_000 * p)).sum())
        # 100 degrees of freedom; 99.9% quantile is about 149.4.
        assert chi2 < 149.4

    def test_large_modulus_sampling(self, rng):
        F = FieldParams(18446744073709551557)
        vals = [F.sample_uniform(rng).value for _ in range(100)]
        assert all(0 <= v < F.q for v in vals)
        assert max(vals) > 2**63
