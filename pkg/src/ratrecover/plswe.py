"""Polynomial linear systems A(x) y = b(x) solved from an erroneous black box.

Includes the radii that depend on deg A and deg b, the parameter-oblivious
decoder, and the deterministic worst-case instance whose coefficient matrix
reaches maximal rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .field import FieldParams
from .keyeq import (
    CandidateSolution,
    DegreeBoundPair,
    ObservationMatrix,
    minimal_solution,
    solution_space,
)
from .linalg import FqMatrix, SingularMatrixError, solve
from .poly import EvaluationGrid, Polynomial, RationalVector, reduce_fraction_vector
from .srfr import SrfrParams, ceil_div, d_fgE

MAX_ATTEMPTS = 1000


class GenerationError(RuntimeError):
    """Rejection sampling ran out of attempts; use a larger field."""


def poly_det(rows: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Determinant over F_q[x] by fraction-free (Bareiss) elimination."""
    n = len(rows)
    if n == 0:
        raise ValueError("empty matrix")
    field = rows[0][0].field
    m = [list(r) for r in rows]
    prev = Polynomial.one(field)
    negate = False
    for k in range(n - 1):
        if m[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not m[i][k].is_zero()), None)
            if swap is None:
                return Polynomial.zero(field)
            m[k], m[swap] = m[swap], m[k]
            negate = not negate
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]).exact_div(prev)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return -det if negate else det


@dataclass(frozen=True)
class LinearSystem:
    A: tuple
    b: tuple
    d_A: int
    d_b: int

    def __post_init__(self):
        A = tuple(tuple(r) for r in self.A)
        b = tuple(self.b)
        l = len(b)
        if len(A) != l or any(len(r) != l for r in A):
            raise ValueError("A must be l x l and b of length l")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        if self.deg_A > self.d_A or self.deg_b > self.d_b:
            raise ValueError("degree bounds d_A, d_b are below the actual degrees")

    @property
    def l(self) -> int:
        return len(self.b)

    @property
    def field(self) -> FieldParams:
        return self.b[0].field

    @property
    def deg_A(self):
        return max(p.degree for r in self.A for p in r)

    @property
    def deg_b(self):
        return max(p.degree for p in self.b)

    def det(self) -> Polynomial:
        return poly_det(self.A)

    def eval_A(self, a: int) -> FqMatrix:
        return FqMatrix(self.field, np.array([[p.eval(a) for p in r] for r in self.A], dtype=self.field.dtype))

    def eval_b(self, a: int) -> np.ndarray:
        return self.field.array([p.eval(a) for p in self.b])

    def solve_exact(self) -> RationalVector:
        """Reduced solution f/g by Cramer's rule over F_q[x]."""
        det = self.det()
        if det.is_zero():
            raise SingularMatrixError("A is singular over F_q(x)")
        nums = []
        for i in range(self.l):
            cols = [[self.b[r] if c == i else self.A[r][c] for c in range(self.l)] for r in range(self.l)]
            nums.append(poly_det(cols))
        f, g = reduce_fraction_vector(nums, det)
        return RationalVector(f, g)

    def residual(self, rv: RationalVector) -> list[Polynomial]:
        """A f - g b, identically zero for the true solution."""
        return [sum((self.A[i][k] * rv.f[k] for k in range(self.l)), Polynomial.zero(self.field))
                - rv.g * self.b[i] for i in range(self.l)]

    def solve_at(self, a: int) -> np.ndarray:
        """The black-box answer without errors: solve A(a) y = b(a)."""
        return solve(self.eval_A(a), self.eval_b(a))


def gen_system(l: int, deg_A: int, deg_b: int, grid: EvaluationGrid, rng: np.random.Generator,
               d_A: Optional[int] = None, d_b: Optional[int] = None,
               max_attempts: int = MAX_ATTEMPTS) -> tuple[LinearSystem, RationalVector]:
    """Random full-rank system with deg A = deg_A, deg b = deg_b, and its reduced solution.

    Samples until det A(alpha_j) != 0 and g(alpha_j) != 0 on every grid point.
    """
    field = grid.field
    for _ in range(max_attempts):
        A = [[Polynomial.random(field, deg_A, rng, exact=(r == 0 and c == 0)) for c in range(l)]
             for r in range(l)]
        b = [Polynomial.random(field, deg_b, rng, exact=(r == 0)) for r in range(l)]
        sys = LinearSystem(A, b, deg_A if d_A is None else d_A, deg_b if d_b is None else d_b)
        det = sys.det()
        if det.is_zero() or any(det.eval(a) == 0 for a in grid.alphas):
            continue
        rv = sys.solve_exact()
        if any(rv.g.eval(a) == 0 for a in grid.alphas):
            continue
        return sys, rv
    raise GenerationError(f"no admissible system after {max_attempts} attempts over F_{field.q}")


def blackbox(sys: LinearSystem, rv: RationalVector, grid: EvaluationGrid, E: Iterable[int],
             rng: np.random.Generator, resample_zero: bool = True) -> ObservationMatrix:
    """Black-box output: the true value off E, a uniform vector on E.

    With `resample_zero`, an erroneous draw that happens to equal the true
    value is redrawn, so every position of E really is erroneous.
    """
    field = grid.field
    y = rv.evaluate_on(grid)
    for j in sorted(set(E)):
        truth = y[:, j].copy()
        draw = field.sample_array(rng, sys.l)
        while resample_zero and np.array_equal(draw, truth):
            draw = field.sample_array(rng, sys.l)
        y[:, j] = draw
    return ObservationMatrix(grid, y)


def radius_kps(n: int, d_A: int, d_f: int, d_b: int, d_g: int) -> int:
    return (n - max(d_A + d_f, d_b + d_g) - 1) // 2


def radius_glz2(n: int, d_A: int, d_f: int, d_b: int, d_g: int, l: int) -> int:
    return l * (n - max(d_A + d_f, d_b + d_g) - 1) // (l + 1)


class PrimedRadii(NamedTuple):
    eps_bk: int
    eps_kps: int
    eps_glz: int
    eps_glz2: int


def primed_radii(n: int, l: int, eps: int, d_f: int, d_g: int, d_A: int, d_b: int,
                 deg_f, deg_g) -> PrimedRadii:
    """Radii using the true degrees of f and g next to the bounds.

    Only a party that knows the true degrees can evaluate these; the
    decoder itself never does.
    """
    rat = max(deg_f + d_g, deg_g + d_f)
    sys = max(d_A + deg_f, d_b + deg_g)
    c = ceil_div(eps, l)
    return PrimedRadii(
        eps_bk=int((n - rat - 1) // 2),
        eps_kps=int((n - sys - 1) // 2),
        eps_glz=int(n - rat - c - 1),
        eps_glz2=int(n - sys - c - 1),
    )


@dataclass(frozen=True)
class PlsweParams:
    n: int
    l: int
    d_f: int
    d_g: int
    eps: int
    d_A: int
    d_b: int

    def __post_init__(self):
        SrfrParams(self.n, self.l, self.d_f, self.d_g, self.eps)
        if self.d_A < 0 or self.d_b < 0:
            raise ValueError("d_A and d_b must be >= 0")

    @property
    def srfr(self) -> SrfrParams:
        return SrfrParams(self.n, self.l, self.d_f, self.d_g, self.eps)


def oblivious_bounds(params: PlsweParams) -> tuple[DegreeBoundPair, DegreeBoundPair]:
    """The two degree-bound pairs tried by :func:`algorithm1`, in order."""
    n, c = params.n, ceil_div(params.eps, params.l)
    first = DegreeBoundPair(n - params.d_g - c - 1, n - params.d_f - c - 1)
    second = DegreeBoundPair(n - params.d_A - c - 1, n - params.d_b - c - 1)
    return first, second


@dataclass(frozen=True)
class ObliviousOutcome:
    solution: Optional[CandidateSolution]
    exceeded: bool
    stage: Optional[int] = None  # 1: bounds from d_f, d_g; 2: bounds from d_A, d_b

    def __post_init__(self):
        if (self.solution is None) != self.exceeded:
            raise ValueError("exactly one of solution / exceeded must be set")


def algorithm1(obs: ObservationMatrix, params: PlsweParams) -> ObliviousOutcome:
    """Parameter-oblivious decoding: uses only the degree bounds, never the true degrees.

    Returns the minimal nonzero (phi, psi) of the first nonempty solution
    space among the two bound choices, or the exceeded marker.
    """
    for stage, bounds in enumerate(oblivious_bounds(params), 1):
        cand = minimal_solution(solution_space(obs, bounds))
        if cand is not None:
            return ObliviousOutcome(cand, False, stage)
    return ObliviousOutcome(None, True)


# Worst-case (maximal-rank) instance construction.

N1, N2 = "N1", "N2"


@dataclass(frozen=True)
class AdversarialWitness:
    partition: tuple
    variant: str

    def __post_init__(self):
        object.__setattr__(self, "partition", tuple(frozenset(s) for s in self.partition))


def min_length_n1(bounds: DegreeBoundPair, deg_f, deg_g, num_errors: int, l: int) -> int:
    return max(bounds.Df + deg_g, bounds.Dg + deg_f) + ceil_div(num_errors, l) + 1


def min_length_n2(bounds: DegreeBoundPair, deg_A, deg_b, num_errors: int, l: int) -> int:
    return max(bounds.Df + deg_A, bounds.Dg + deg_b) + ceil_div(num_errors, l) + 1


def expected_dimension(bounds: DegreeBoundPair, deg_f, deg_g, num_errors: int) -> int:
    """max(delta_fgE + 1, 0), the dimension of the shift span."""
    if bounds.degenerate:
        return 0
    return max(d_fgE(bounds.Df, bounds.Dg, deg_f, deg_g, 0, num_errors) + 1, 0)


def rank_target(l: int, bounds: DegreeBoundPair, deg_f, deg_g, num_errors: int) -> int:
    """Maximal rank of the coefficient matrix: column count minus the shift-span dimension."""
    return bounds.num_unknowns(l) - expected_dimension(bounds, deg_f, deg_g, num_errors)


def partition_positions(E: Iterable[int], l: int) -> tuple:
    """Round-robin split of sorted E into l parts of size <= ceil(|E|/l)."""
    E = sorted(set(E))
    return tuple(frozenset(E[i::l]) for i in range(l))


def gen_adversarial_instance(sys: Optional[LinearSystem], rv: RationalVector, grid: EvaluationGrid,
                             E: Iterable[int], variant: str) -> tuple[ObservationMatrix, AdversarialWitness]:
    """Deterministic instance on which the solution space equals the shift span.

    For j in part I_i the error is chosen so that f(a) - g(a) y_j is the unit
    vector e_i (variant N1), or so that A(a) y_j - b(a) is e_i (variant N2).
    """
    if variant not in (N1, N2):
        raise ValueError(f"variant must be {N1!r} or {N2!r}")
    if variant == N2 and sys is None:
        raise ValueError("variant N2 needs the linear system")
    field = grid.field
    q = field.q
    l = rv.l
    parts = partition_positions(E, l)
    y = rv.evaluate_on(grid)
    for i, part in enumerate(parts):
        unit = np.zeros(l, dtype=field.dtype)
        unit[i] = 1
        for j in part:
            a = grid.alphas[j]
            if variant == N1:
                shift = (-unit * field.inv(rv.g.eval(a))) % q
            else:
                try:
                    shift = solve(sys.eval_A(a), unit)
                except SingularMatrixError:
                    raise ValueError(f"A(alpha_{j}) is singular") from None
            y[:, j] = (y[:, j] + shift) % q
    return ObservationMatrix(grid, y), AdversarialWitness(parts, variant)
