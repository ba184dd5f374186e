"""Simultaneous rational function recovery from partially erroneous evaluations.

Error positions are 0-based column indices throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Iterable, Optional

import numpy as np

from .field import FieldParams
from .keyeq import (
    CandidateSolution,
    DegreeBoundPair,
    KeyEquationSpace,
    ObservationMatrix,
    minimal_solution,
    reconstruct_fraction,
    solution_space,
)
from .linalg import FqMatrix, rank as matrix_rank
from .poly import (
    NEG_INF,
    EvaluationGrid,
    Polynomial,
    RationalVector,
    error_locator,
    gcd_many,
)

EMPTY_SPACE = "empty space"
VERIFICATION_FAILED = "verification failed"


class DecodingFailure(Exception):
    """Decoding produced no verified answer; `reason` says why."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.detail = detail


@dataclass(frozen=True)
class SrfrParams:
    n: int
    l: int
    d_f: int
    d_g: int
    eps: int

    def __post_init__(self):
        for name in ("d_f", "d_g", "eps"):
            v = getattr(self, name)
            if not 0 <= v < self.n:
                raise ValueError(f"{name}={v} violates 0 <= {name} < n={self.n}")
        if self.l < 1:
            raise ValueError(f"l={self.l} must be >= 1")

    @property
    def bounds(self) -> DegreeBoundPair:
        return DegreeBoundPair(self.d_f + self.eps, self.d_g + self.eps)


@dataclass(frozen=True)
class ErrorPattern:
    """Column support E and the l x n error matrix e."""

    positions: frozenset
    e: np.ndarray

    @classmethod
    def from_matrix(cls, e: np.ndarray) -> "ErrorPattern":
        return cls(frozenset(int(j) for j in np.flatnonzero(np.any(e != 0, axis=0))), e)


@dataclass(frozen=True)
class RadiusReport:
    """Every decoding radius and dimension formula for one parameter set.

    Fields that need information the caller did not provide are None.
    """

    eps_bk: int
    eps_glz: int
    d_fgE: Optional[int] = None
    eps_kps: Optional[int] = None
    eps_glz2: Optional[int] = None
    eps_bk_primed: Optional[int] = None
    eps_kps_primed: Optional[int] = None
    eps_glz_primed: Optional[int] = None
    eps_glz2_primed: Optional[int] = None
    N1: Optional[int] = None
    N2: Optional[int] = None
    rho: Optional[int] = None

    def as_dict(self) -> dict:
        return asdict(self)


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def radius_bk(n: int, d_f: int, d_g: int) -> int:
    """Deterministic unique-decoding radius floor((n - d_f - d_g - 1) / 2)."""
    return (n - d_f - d_g - 1) // 2


def radius_glz(n: int, d_f: int, d_g: int, l: int) -> int:
    """Probabilistic radius floor(l (n - d_f - d_g - 1) / (l + 1))."""
    return l * (n - d_f - d_g - 1) // (l + 1)


def d_fgE(d_f: int, d_g: int, deg_f, deg_g, eps: int, num_errors: int) -> int:
    """Number of extra shifts x^i in the solution space, minus one.

    Also serves for the (delta_f, delta_g, xi) variant by passing the
    corresponding values. A zero numerator (deg_f = -inf) leaves only the
    denominator slack.
    """
    slack_f = math.inf if deg_f == NEG_INF else d_f - deg_f
    slack_g = math.inf if deg_g == NEG_INF else d_g - deg_g
    slack = min(slack_f, slack_g)
    if slack == math.inf:
        raise ValueError("both degrees are -inf")
    return int(slack) + eps - num_errors


def random_rational_vector(field: FieldParams, l: int, deg_f: int, deg_g: int,
                           grid: EvaluationGrid, rng: np.random.Generator,
                           max_attempts: int = 1000) -> RationalVector:
    """Random reduced f/g with deg f = deg_f, monic deg g = deg_g, g nonzero on the grid."""
    for _ in range(max_attempts):
        lead = int(rng.integers(0, l))
        f = [Polynomial.random(field, deg_f, rng, exact=(i == lead)) for i in range(l)]
        g = Polynomial.random(field, deg_g, rng, monic=True)
        if deg_g > 0 and gcd_many([*f, g]).degree != 0:
            continue
        if any(g.eval(a) == 0 for a in grid.alphas):
            continue
        return RationalVector(f, g)
    raise RuntimeError(f"no admissible rational vector after {max_attempts} attempts; enlarge q")


def random_error_positions(n: int, count: int, rng: np.random.Generator) -> frozenset:
    return frozenset(int(j) for j in rng.choice(n, size=count, replace=False))


def gen_random_instance(params: SrfrParams, grid: EvaluationGrid, rv: RationalVector,
                        E: Iterable[int], rng: np.random.Generator,
                        resample_zero: bool = True) -> ObservationMatrix:
    """y_j = f(alpha_j)/g(alpha_j) + e_j with e_j uniform on E and zero elsewhere.

    With `resample_zero`, error columns that come out all-zero are redrawn so
    that the column support is exactly E.
    """
    E = sorted(set(E))
    field = grid.field
    if grid.n != params.n:
        raise ValueError(f"grid has {grid.n} points, params expect n={params.n}")
    if rv.l != params.l:
        raise ValueError(f"rational vector has length {rv.l}, params expect l={params.l}")
    if len(E) > params.eps:
        raise ValueError(f"|E|={len(E)} exceeds eps={params.eps}")
    if E and not 0 <= E[0] <= E[-1] < params.n:
        raise ValueError("error position out of range")
    if rv.deg_f > params.d_f or rv.deg_g > params.d_g:
        raise ValueError("rational vector exceeds the degree bounds")
    if any(rv.g.eval(a) == 0 for a in grid.alphas):
        raise ValueError("denominator vanishes on the evaluation grid")
    y = rv.evaluate_on(grid)
    for j in E:
        e = field.sample_array(rng, params.l)
        while resample_zero and not np.any(e):
            e = field.sample_array(rng, params.l)
        y[:, j] = (y[:, j] + e) % field.q
    return ObservationMatrix(grid, y)


def verify_fraction(obs: ObservationMatrix, rv: RationalVector, params: SrfrParams) -> Optional[str]:
    """None if `rv` is an admissible answer for the observations, else the reason."""
    if rv.deg_f > params.d_f:
        return f"deg f = {rv.deg_f} > d_f = {params.d_f}"
    if rv.deg_g > params.d_g:
        return f"deg g = {rv.deg_g} > d_g = {params.d_g}"
    agree = 0
    for j, a in enumerate(obs.grid.alphas):
        if rv.g.eval(a) == 0:
            return f"denominator vanishes at alpha_{j}"
        if rv.values_at(a) == obs.column(j):
            agree += 1
    if agree < params.n - params.eps:
        return f"agrees on {agree} < n - eps = {params.n - params.eps} points"
    return None


def recover_from_space(space: KeyEquationSpace, obs: ObservationMatrix,
                       params: SrfrParams) -> RationalVector:
    cand = minimal_solution(space)
    if cand is None:
        raise DecodingFailure(EMPTY_SPACE)
    if cand.psi.is_zero():
        raise DecodingFailure(VERIFICATION_FAILED, "minimal element has psi = 0")
    rv = reconstruct_fraction(cand)
    why = verify_fraction(obs, rv, params)
    if why is not None:
        raise DecodingFailure(VERIFICATION_FAILED, why)
    return rv


def decode_srfr(obs: ObservationMatrix, params: SrfrParams) -> RationalVector:
    """Recover the reduced f/g, or raise :class:`DecodingFailure`."""
    if obs.n != params.n or obs.l != params.l:
        raise ValueError(f"observation shape {obs.l}x{obs.n} does not match params")
    return recover_from_space(solution_space(obs, params.bounds), obs, params)


def verify_span_structure(space: KeyEquationSpace, rv: RationalVector, locator: Polynomial,
                          expected_dim: int) -> bool:
    """Check that the space is exactly the span of x^i (locator f, locator g), 0 <= i < expected_dim.

    Pass expected_dim = d_fgE + 1; negative values mean the space should be {0}.
    """
    expected_dim = max(expected_dim, 0)
    if space.dim != expected_dim:
        return False
    if expected_dim == 0:
        return True
    base = CandidateSolution(tuple(locator * fi for fi in rv.f), locator * rv.g)
    shifts = [base.shifted(i) for i in range(expected_dim)]
    if not all(s.fits(space.bounds) for s in shifts):
        return False
    stacked = np.vstack([space.vectors] + [s.to_vector(space.bounds)[None, :] for s in shifts])
    # Shifts are independent, so rank == dim means they lie in the space and span it.
    return matrix_rank(FqMatrix(space.field, stacked)) == space.dim


def locator_for(grid: EvaluationGrid, E: Iterable[int]) -> Polynomial:
    return error_locator(grid, E)
