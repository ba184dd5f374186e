"""Linearized key equations psi * Y_i = phi_i mod prod(x - alpha_j).

The unknowns are packed into one coefficient vector laid out as

    [phi_1 coeffs 0..Df | ... | phi_l coeffs 0..Df | psi coeffs 0..Dg]

which is the column order of the structured matrix returned by
:func:`build_matrix`.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from .field import FieldParams
from .linalg import FqMatrix, matmul_mod, rank as matrix_rank, rref, right_kernel_basis
from .poly import EvaluationGrid, Polynomial, RationalVector, interpolate


class InvalidCandidateError(ValueError):
    """The candidate has a zero denominator and cannot be turned into a fraction."""


@dataclass
class ObservationMatrix:
    """l x n observations y_ij on a fixed evaluation grid."""

    grid: EvaluationGrid
    y: np.ndarray

    def __post_init__(self):
        y = self.grid.field.array(self.y)
        if y.ndim == 1:
            y = y.reshape(1, -1)
        if y.ndim != 2 or y.shape[1] != self.grid.n:
            raise ValueError(f"observations of shape {y.shape} do not match a grid of {self.grid.n} points")
        self.y = y

    @property
    def field(self) -> FieldParams:
        return self.grid.field

    @property
    def l(self) -> int:
        return self.y.shape[0]

    @property
    def n(self) -> int:
        return self.y.shape[1]

    def column(self, j: int) -> list[int]:
        return [int(v) for v in self.y[:, j]]

    def __eq__(self, other):
        return (isinstance(other, ObservationMatrix) and self.grid == other.grid
                and self.y.shape == other.y.shape and bool(np.all(self.y == other.y)))


@dataclass(frozen=True)
class DegreeBoundPair:
    """Degree bounds on (phi_1..phi_l) and psi.

    Negative values are allowed and mean the solution space is empty.
    """

    Df: int
    Dg: int

    @property
    def degenerate(self) -> bool:
        return self.Df < 0 or self.Dg < 0

    def num_unknowns(self, l: int) -> int:
        return 0 if self.degenerate else l * (self.Df + 1) + self.Dg + 1


@dataclass(frozen=True)
class CandidateSolution:
    phis: tuple
    psi: Polynomial

    def __post_init__(self):
        object.__setattr__(self, "phis", tuple(self.phis))

    def is_zero(self) -> bool:
        return self.psi.is_zero() and all(p.is_zero() for p in self.phis)

    def to_vector(self, bounds: DegreeBoundPair) -> np.ndarray:
        parts = []
        for p in self.phis:
            parts.extend(p.padded(bounds.Df + 1))
        parts.extend(self.psi.padded(bounds.Dg + 1))
        return self.psi.field.array(parts)

    @classmethod
    def from_vector(cls, field: FieldParams, vec, l: int, bounds: DegreeBoundPair) -> "CandidateSolution":
        w = bounds.Df + 1
        phis = tuple(Polynomial(field, vec[i * w:(i + 1) * w]) for i in range(l))
        return cls(phis, Polynomial(field, vec[l * w:l * w + bounds.Dg + 1]))

    def shifted(self, k: int) -> "CandidateSolution":
        return CandidateSolution(tuple(p.shift(k) for p in self.phis), self.psi.shift(k))

    def scaled(self, c: int) -> "CandidateSolution":
        return CandidateSolution(tuple(p.scale(c) for p in self.phis), self.psi.scale(c))

    def monic(self) -> "CandidateSolution":
        """Rescale so that psi is monic (unchanged when psi = 0)."""
        if self.psi.is_zero():
            return self
        return self.scaled(self.psi.field.inv(self.psi.lc()))

    def fits(self, bounds: DegreeBoundPair) -> bool:
        return self.psi.degree <= bounds.Dg and all(p.degree <= bounds.Df for p in self.phis)


@dataclass
class KeyEquationSpace:
    """Solution space of the key equations under fixed degree bounds.

    `vectors` holds a basis, one packed coefficient vector per row.
    """

    field: FieldParams
    l: int
    bounds: DegreeBoundPair
    vectors: np.ndarray
    matrix_rank: Optional[int] = dc_field(default=None)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def basis(self) -> list[CandidateSolution]:
        return [CandidateSolution.from_vector(self.field, row, self.l, self.bounds) for row in self.vectors]

    def is_trivial(self) -> bool:
        return self.dim == 0

    def contains(self, cand: CandidateSolution) -> bool:
        """True iff `cand` lies in the span of the basis."""
        if cand.is_zero():
            return True
        if not cand.fits(self.bounds) or self.dim == 0:
            return False
        stacked = np.vstack([self.vectors, cand.to_vector(self.bounds)[None, :]])
        return matrix_rank(FqMatrix(self.field, stacked)) == self.dim


def build_matrix(obs: ObservationMatrix, bounds: DegreeBoundPair) -> FqMatrix:
    """Block matrix with l diagonal Vandermonde blocks and the -D_i V block last."""
    field = obs.field
    q = field.q
    l, n = obs.l, obs.n
    if bounds.degenerate:
        return FqMatrix.zeros(field, l * n, 0)
    wf, wg = bounds.Df + 1, bounds.Dg + 1
    vf = obs.grid.vandermonde(wf)
    vg = obs.grid.vandermonde(wg)
    m = np.zeros((l * n, l * wf + wg), dtype=field.dtype)
    for i in range(l):
        m[i * n:(i + 1) * n, i * wf:(i + 1) * wf] = vf
        m[i * n:(i + 1) * n, l * wf:] = (-(obs.y[i][:, None] * vg)) % q
    return FqMatrix(field, m)


def solution_space(obs: ObservationMatrix, bounds: DegreeBoundPair) -> KeyEquationSpace:
    if bounds.degenerate:
        return KeyEquationSpace(obs.field, obs.l, bounds, np.zeros((0, 0), dtype=obs.field.dtype), 0)
    m = build_matrix(obs, bounds)
    kernel = right_kernel_basis(m)
    cols = m.cols
    vectors = np.vstack(kernel) if kernel else np.zeros((0, cols), dtype=obs.field.dtype)
    return KeyEquationSpace(obs.field, obs.l, bounds, vectors, cols - len(kernel))


def _degree_order(l: int, bounds: DegreeBoundPair) -> list[int]:
    """Packed-coordinate indices, most significant first.

    psi coefficients from the top degree down, then phi coefficients grouped
    by degree (top degree first). The leading coordinate of a vector in this
    order determines deg(psi), or max deg(phi_i) when psi = 0.
    """
    wf = bounds.Df + 1
    order = [l * wf + k for k in range(bounds.Dg, -1, -1)]
    for t in range(bounds.Df, -1, -1):
        order.extend(i * wf + t for i in range(l))
    return order


def minimal_solution(space: KeyEquationSpace) -> Optional[CandidateSolution]:
    """The nonzero element of minimal degrees, with psi monic; None if the space is {0}.

    Elements with psi != 0 are preferred. Among them deg(psi) is minimized,
    then max deg(phi_i), then the remaining coordinates in echelon order.
    """
    if space.dim == 0:
        return None
    order = _degree_order(space.l, space.bounds)
    reduced, pivots = rref(space.vectors[:, order], space.field.q)
    n_psi = space.bounds.Dg + 1
    psi_rows = [r for r, p in enumerate(pivots) if p < n_psi]
    pick = psi_rows[-1] if psi_rows else len(pivots) - 1
    vec = np.zeros(len(order), dtype=space.vectors.dtype)
    vec[order] = reduced[pick]
    return CandidateSolution.from_vector(space.field, vec, space.l, space.bounds).monic()


def reconstruct_fraction(cand: CandidateSolution) -> RationalVector:
    if cand.psi.is_zero():
        raise InvalidCandidateError("candidate has psi = 0")
    return RationalVector.from_fraction(cand.phis, cand.psi)


def satisfies_key_equations(obs: ObservationMatrix, cand: CandidateSolution) -> bool:
    """Evaluated form: phi_i(alpha_j) = y_ij * psi(alpha_j) for all i, j."""
    q = obs.field.q
    for j, a in enumerate(obs.grid.alphas):
        ps = cand.psi.eval(a)
        for i, phi in enumerate(cand.phis):
            if phi.eval(a) != int(obs.y[i, j]) * ps % q:
                return False
    return True


def satisfies_modular_form(obs: ObservationMatrix, cand: CandidateSolution) -> bool:
    """Polynomial form: psi * Y_i = phi_i mod prod_j (x - alpha_j)."""
    node = obs.grid.node_polynomial()
    for i, phi in enumerate(cand.phis):
        y_poly = interpolate(obs.grid, obs.y[i])
        if not ((cand.psi * y_poly - phi) % node).is_zero():
            return False
    return True


def kernel_residual(obs: ObservationMatrix, space: KeyEquationSpace) -> np.ndarray:
    """M @ v for each basis vector; all zero for a correct space."""
    m = build_matrix(obs, space.bounds)
    if space.dim == 0:
        return np.zeros((m.rows, 0), dtype=obs.field.dtype)
    return matmul_mod(m.entries, space.vectors.T, obs.field.q)


def shift_family(base: CandidateSolution, count: int) -> list[CandidateSolution]:
    """x^i * base for i = 0..count-1."""
    return [base.shifted(i) for i in range(count)]


def candidate_from_fraction(f: Sequence[Polynomial], g: Polynomial, locator: Polynomial) -> CandidateSolution:
    """(locator * f, locator * g)."""
    return CandidateSolution(tuple(locator * fi for fi in f), locator * g)
