import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import enumerate_key_equation_solutions, span_of
from ratrecover.field import FieldParams
from ratrecover.keyeq import (
    CandidateSolution,
    DegreeBoundPair,
    InvalidCandidateError,
    KeyEquationSpace,
    ObservationMatrix,
    build_matrix,
    kernel_residual,
    minimal_solution,
    reconstruct_fraction,
    satisfies_key_equations,
    satisfies_modular_form,
    solution_space,
)
from ratrecover.linalg import rank
from ratrecover.poly import EvaluationGrid, Polynomial, RationalVector, error_locator
from ratrecover.srfr import SrfrParams, gen_random_instance, random_error_positions, random_rational_vector


def P(F, *c):
    return Polynomial(F, c)


class TestBuildMatrix:
    def test_minimal_shape(self, F7):
        obs = ObservationMatrix(EvaluationGrid(F7, (1, 2)), np.array([[3, 5]]))
        m = build_matrix(obs, DegreeBoundPair(0, 0))
        assert m.entries.tolist() == [[1, (-3) % 7], [1, (-5) % 7]]

    def test_shape_formula(self, F7):
        obs = ObservationMatrix(EvaluationGrid(F7, (1, 2, 3)), np.ones((2, 3), dtype=np.int64))
        m = build_matrix(obs, DegreeBoundPair(1, 1))
        assert m.shape == (6, 6) == (2 * 3, 2 * 2 + 2)

    def test_block_structure(self, F13, rng):
        grid = EvaluationGrid(F13, (1, 4, 6, 9))
        y = F13.sample_array(rng, (2, 4))
        m = build_matrix(ObservationMatrix(grid, y), DegreeBoundPair(2, 1)).entries
        for i in range(2):
            for j, a in enumerate(grid.alphas):
                row = m[i * 4 + j]
                for b in range(2):
                    block = row[b * 3:(b + 1) * 3]
                    expected = [pow(a, k, 13) for k in range(3)] if b == i else [0, 0, 0]
                    assert block.tolist() == expected
                assert row[6:].tolist() == [(-y[i, j] * pow(a, k, 13)) % 13 for k in range(2)]

    def test_zero_observations(self, F7):
        obs = ObservationMatrix(EvaluationGrid(F7, (1, 2, 3)), np.zeros((2, 3), dtype=np.int64))
        m = build_matrix(obs, DegreeBoundPair(1, 2))
        assert not np.any(m.entries[:, 4:])


class TestSolutionSpace:
    def test_constant_one(self, F13):
        obs = ObservationMatrix(EvaluationGrid(F13, (0, 2, 5, 7)), np.ones((1, 4), dtype=np.int64))
        space = solution_space(obs, DegreeBoundPair(0, 0))
        assert space.dim == 1
        assert minimal_solution(space) == CandidateSolution((P(F13, 1),), P(F13, 1))

    def test_errorless_tight_bounds_is_one_dimensional(self, F101, rng):
        grid = EvaluationGrid.random(F101, 12, rng)
        rv = random_rational_vector(F101, 2, 3, 2, grid, rng)
        obs = ObservationMatrix(grid, rv.evaluate_on(grid))
        space = solution_space(obs, DegreeBoundPair(3, 2))
        assert space.dim == 1
        assert minimal_solution(space) == CandidateSolution(rv.f, rv.g)

    def test_degenerate_bounds(self, F7):
        obs = ObservationMatrix(EvaluationGrid(F7, (1, 2)), np.array([[1, 1]]))
        assert solution_space(obs, DegreeBoundPair(-1, 3)).dim == 0
        assert minimal_solution(solution_space(obs, DegreeBoundPair(2, -1))) is None

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from([3, 5, 7, 11, 13]), st.integers(1, 2), st.integers(1, 6),
           st.integers(0, 2), st.integers(0, 2), st.integers(0, 10**6))
    def test_matches_exhaustive_enumeration(self, q, l, n, Df, Dg, seed):
        u = l * (Df + 1) + Dg + 1
        if q ** u > 200_000 or n > q:
            return
        F = FieldParams(q)
        rng = np.random.default_rng(seed)
        grid = EvaluationGrid.random(F, n, rng)
        y = F.sample_array(rng, (l, n))
        space = solution_space(ObservationMatrix(grid, y), DegreeBoundPair(Df, Dg))
        brute = enumerate_key_equation_solutions(q, grid.alphas, y.tolist(), Df, Dg)
        assert span_of(space.vectors, q, u) == brute

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6))
    def test_kernel_and_modular_forms_agree(self, seed):
        F = FieldParams(101)
        rng = np.random.default_rng(seed)
        n, l = 10, 2
        grid = EvaluationGrid.random(F, n, rng)
        rv = random_rational_vector(F, l, 2, 1, grid, rng)
        E = random_error_positions(n, 3, rng)
        obs = gen_random_instance(SrfrParams(n, l, 2, 1, 4), grid, rv, E, rng)
        bounds = DegreeBoundPair(int(rng.integers(2, 7)), int(rng.integers(1, 6)))
        space = solution_space(obs, bounds)
        m = build_matrix(obs, bounds)
        assert space.dim == m.cols - rank(m)
        assert not np.any(kernel_residual(obs, space))
        for cand in space.basis:
            assert cand.fits(bounds)
            assert satisfies_key_equations(obs, cand)
            assert satisfies_modular_form(obs, cand)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6))
    def test_locator_multiple_is_a_member(self, seed):
        F = FieldParams(101)
        rng = np.random.default_rng(seed)
        n, l = 14, 3
        grid = EvaluationGrid.random(F, n, rng)
        rv = random_rational_vector(F, l, 3, 2, grid, rng)
        E = random_error_positions(n, int(rng.integers(0, 8)), rng)
        obs = gen_random_instance(SrfrParams(n, l, 3, 2, 8), grid, rv, E, rng)
        lam = error_locator(grid, E)
        cand = CandidateSolution(tuple(lam * fi for fi in rv.f), lam * rv.g)
        assert satisfies_key_equations(obs, cand)
        bounds = DegreeBoundPair(3 + len(E), 2 + len(E))
        assert solution_space(obs, bounds).contains(cand)


class TestMinimalSolution:
    def test_shift_span_picks_lowest(self, F101, rng):
        n, l = 16, 2
        grid = EvaluationGrid.random(F101, n, rng)
        rv = random_rational_vector(F101, l, 2, 2, grid, rng)
        E = random_error_positions(n, 2, rng)
        obs = gen_random_instance(SrfrParams(n, l, 2, 2, 4), grid, rv, E, rng)
        lam = error_locator(grid, E)
        # slack of 2 in both bounds: span of x^i (lam f, lam g), i = 0, 1, 2
        space = solution_space(obs, DegreeBoundPair(2 + 2 + 2, 2 + 2 + 2))
        assert space.dim == 3
        best = minimal_solution(space)
        assert best == CandidateSolution(tuple(lam * fi for fi in rv.f), lam * rv.g)
        assert best.psi.is_monic() and best.psi.degree == rv.deg_g + len(E)

    def test_prefers_nonzero_psi(self, F7):
        # Df >= n admits (phi, 0) with phi a multiple of the node polynomial
        grid = EvaluationGrid(F7, (1, 2))
        obs = ObservationMatrix(grid, np.array([[3, 3]]))
        space = solution_space(obs, DegreeBoundPair(2, 0))
        best = minimal_solution(space)
        assert best.psi == P(F7, 1) and best.phis == (P(F7, 3),)

    def test_empty(self, F7):
        space = KeyEquationSpace(F7, 1, DegreeBoundPair(0, 0), np.zeros((0, 2), dtype=np.int64))
        assert minimal_solution(space) is None

    def test_normalized_from_scaled_basis(self, F13):
        f, g = (P(F13, 2, 1),), P(F13, 3, 1)
        grid = EvaluationGrid(F13, tuple(range(1, 7)))
        obs = ObservationMatrix(grid, RationalVector(f, g).evaluate_on(grid))
        space = solution_space(obs, DegreeBoundPair(1, 1))
        space.vectors = space.vectors * 5 % 13
        assert minimal_solution(space) == CandidateSolution(f, g)


class TestReconstruct:
    def test_common_locator_cancels(self, F101):
        f, g = (P(F101, 1, 2), P(F101, 7)), P(F101, 5, 0, 1)
        lam = P(F101, 3, 1) * P(F101, 9, 1)
        rv = reconstruct_fraction(CandidateSolution(tuple(lam * fi for fi in f), lam * g))
        assert rv == RationalVector(f, g)

    def test_already_reduced(self, F101):
        f, g = (P(F101, 1, 2),), P(F101, 5, 1)
        assert reconstruct_fraction(CandidateSolution(f, g)) == RationalVector(f, g)

    def test_x_factor(self, F101):
        f, g = (P(F101, 1, 2),), P(F101, 5, 1)
        x = Polynomial.x(F101)
        cand = CandidateSolution(((x * f[0]).scale(4),), (x * g).scale(4))
        assert reconstruct_fraction(cand) == RationalVector(f, g)

    def test_zero_psi(self, F7):
        with pytest.raises(InvalidCandidateError):
            reconstruct_fraction(CandidateSolution((P(F7, 1),), Polynomial.zero(F7)))
