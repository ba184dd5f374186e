"""Homogeneous interleaved Reed-Solomon codes, decoded as rational recovery with g = 1."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .keyeq import ObservationMatrix
from .poly import EvaluationGrid, Polynomial, vector_degree
from .srfr import VERIFICATION_FAILED, DecodingFailure, SrfrParams, decode_srfr


@dataclass(frozen=True)
class IrsCode:
    n: int
    k: int
    l: int
    grid: EvaluationGrid

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.l < 1:
            raise ValueError(f"l={self.l} must be >= 1")
        if self.grid.n != self.n:
            raise ValueError(f"grid has {self.grid.n} points, code length is {self.n}")

    @property
    def unique_radius(self) -> int:
        return (self.n - self.k) // 2


def encode(code: IrsCode, f: Sequence[Polynomial]) -> np.ndarray:
    """Codeword matrix with entry (i, j) = f_i(alpha_j)."""
    if len(f) != code.l:
        raise ValueError(f"expected {code.l} message polynomials, got {len(f)}")
    if vector_degree(f) > code.k - 1:
        raise ValueError(f"message degree {vector_degree(f)} exceeds k - 1 = {code.k - 1}")
    rows = [fi.eval_many(code.grid.alphas) for fi in f]
    return code.grid.field.array(rows).reshape(code.l, code.n)


def decode(code: IrsCode, received: np.ndarray, eps: int) -> list[Polynomial]:
    """Recover the message polynomials from a word with at most `eps` burst errors."""
    if code.k - 1 >= code.n or eps >= code.n:
        raise ValueError("parameters outside 0 <= k-1, eps < n")
    params = SrfrParams(n=code.n, l=code.l, d_f=code.k - 1, d_g=0, eps=eps)
    rv = decode_srfr(ObservationMatrix(code.grid, received), params)
    if rv.g.degree != 0:
        raise DecodingFailure(VERIFICATION_FAILED, "locator does not divide every phi_i")
    return list(rv.f)
