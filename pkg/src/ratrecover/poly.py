"""Dense univariate polynomials over F_q.

Coefficients are stored as canonical integer residues in ascending degree
order; the owning :class:`FieldParams` travels with every polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .field import FieldElement, FieldMismatchError, FieldParams

# Degree of the zero polynomial; compares below every integer.
NEG_INF = -math.inf


class Polynomial:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldParams, coeffs: Iterable = ()):
        q = field.q
        cs = [int(c) % q for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls, field: FieldParams) -> "Polynomial":
        return cls(field, ())

    @classmethod
    def one(cls, field: FieldParams) -> "Polynomial":
        return cls(field, (1,))

    @classmethod
    def constant(cls, field: FieldParams, c) -> "Polynomial":
        return cls(field, (c,))

    @classmethod
    def x(cls, field: FieldParams) -> "Polynomial":
        return cls(field, (0, 1))

    @classmethod
    def monomial(cls, field: FieldParams, k: int, c=1) -> "Polynomial":
        return cls(field, [0] * k + [c])

    @classmethod
    def random(cls, field: FieldParams, degree: int, rng: np.random.Generator,
               monic: bool = False, exact: bool = True) -> "Polynomial":
        """Random polynomial of degree <= `degree` (exactly `degree` if `exact`)."""
        if degree < 0:
            return cls.zero(field)
        cs = [int(v) for v in field.sample_array(rng, degree + 1)]
        if monic:
            cs[-1] = 1
        elif exact:
            while cs[-1] == 0:
                cs[-1] = int(field.sample_uniform(rng))
        return cls(field, cs)

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_monic(self) -> bool:
        return self.lc() == 1

    def monic(self) -> "Polynomial":
        if not self.coeffs or self.coeffs[-1] == 1:
            return self
        return self.scale(self.field.inv(self.coeffs[-1]))

    def coeff(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def padded(self, length: int) -> list[int]:
        """Coefficient list zero-padded to `length` entries."""
        if len(self.coeffs) > length:
            raise ValueError(f"degree {self.degree} does not fit in {length} coefficients")
        return list(self.coeffs) + [0] * (length - len(self.coeffs))

    def _check(self, other: "Polynomial"):
        if other.field.q != self.field.q:
            raise FieldMismatchError(f"polynomials over F_{self.field.q} and F_{other.field.q}")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, np.integer, FieldElement)):
            return Polynomial(self.field, (int(other),))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial(self.field, ())
        q = self.field.q
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return Polynomial(self.field, [c % q for c in out])

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        c = int(c)
        return Polynomial(self.field, [c * a for a in self.coeffs])

    def shift(self, k: int) -> "Polynomial":
        """Multiply by x**k."""
        if not self.coeffs:
            return self
        return Polynomial(self.field, [0] * k + list(self.coeffs))

    def __pow__(self, e: int):
        result, base = Polynomial.one(self.field), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divrem(self, divisor: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = self.field.q
        rem = list(self.coeffs)
        d = list(divisor.coeffs)
        dd = len(d) - 1
        inv_lc = self.field.inv(d[-1])
        if len(rem) <= dd:
            return Polynomial(self.field, ()), self
        quot = [0] * (len(rem) - dd)
        for k in range(len(rem) - 1, dd - 1, -1):
            c = rem[k] % q
            if c == 0:
                continue
            t = c * inv_lc % q
            quot[k - dd] = t
            for i in range(dd + 1):
                rem[k - dd + i] -= t * d[i]
        return Polynomial(self.field, quot), Polynomial(self.field, rem[:dd])

    def __floordiv__(self, other):
        return self.divrem(other)[0]

    def __mod__(self, other):
        return self.divrem(other)[1]

    def exact_div(self, divisor: "Polynomial") -> "Polynomial":
        quot, rem = self.divrem(divisor)
        if not rem.is_zero():
            raise ArithmeticError("division is not exact")
        return quot

    def eval(self, a):
        """Evaluate by Horner's rule; returns the same kind (int or FieldElement) as `a`."""
        q = self.field.q
        if isinstance(a, FieldElement):
            if a.field.q != q:
                raise FieldMismatchError(f"point in F_{a.field.q}, polynomial over F_{q}")
            return FieldElement(self.eval(a.value), self.field)
        a = int(a) % q
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * a + c) % q
        return acc

    __call__ = eval

    def eval_many(self, points: Sequence[int]) -> list[int]:
        return [self.eval(a) for a in points]

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.field.q == other.field.q and self.coeffs == other.coeffs
        if isinstance(other, (int, np.integer)):
            return self == Polynomial(self.field, (int(other),))
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                mono = "x" if k == 1 else f"x^{k}"
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms)


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd by Euclid; gcd(0, 0) = 0."""
    a._check(b)
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def gcd_many(polys: Iterable[Polynomial]) -> Polynomial:
    polys = list(polys)
    if not polys:
        raise ValueError("gcd of an empty family")
    g = Polynomial.zero(polys[0].field)
    for p in polys:
        g = poly_gcd(g, p)
        if g.degree == 0:
            break
    return g


def vector_degree(polys: Iterable[Polynomial]):
    """max deg over a vector of polynomials (NEG_INF if all are zero)."""
    return max((p.degree for p in polys), default=NEG_INF)


@dataclass(frozen=True)
class EvaluationGrid:
    """n pairwise distinct evaluation points alpha_1..alpha_n."""

    field: FieldParams
    alphas: tuple

    def __post_init__(self):
        q = self.field.q
        alphas = tuple(int(a) % q for a in self.alphas)
        if len(set(alphas)) != len(alphas):
            raise ValueError("evaluation points must be pairwise distinct")
        if len(alphas) > q:
            raise ValueError(f"cannot have {len(alphas)} distinct points in F_{q}")
        object.__setattr__(self, "alphas", alphas)

    @classmethod
    def first(cls, field: FieldParams, n: int, start: int = 1) -> "EvaluationGrid":
        return cls(field, tuple(range(start, start + n)))

    @classmethod
    def random(cls, field: FieldParams, n: int, rng: np.random.Generator) -> "EvaluationGrid":
        if n > field.q:
            raise ValueError(f"cannot have {n} distinct points in F_{field.q}")
        if field.q <= 1 << 20:
            pts = rng.choice(field.q, size=n, replace=False)
        else:
            seen: dict[int, None] = {}
            while len(seen) < n:
                seen.setdefault(int(field.sample_uniform(rng)), None)
            pts = list(seen)
        return cls(field, tuple(int(p) for p in pts))

    @property
    def n(self) -> int:
        return len(self.alphas)

    def __len__(self):
        return len(self.alphas)

    def __iter__(self):
        return iter(self.alphas)

    def vandermonde(self, t: int) -> np.ndarray:
        """n x t matrix with entries alpha_j**(i-1)."""
        q = self.field.q
        rows = []
        for a in self.alphas:
            row, p = [], 1
            for _ in range(t):
                row.append(p)
                p = p * a % q
            rows.append(row)
        return self.field.array(rows).reshape(len(self.alphas), t)

    def node_polynomial(self) -> Polynomial:
        """prod_j (x - alpha_j)."""
        return error_locator(self, range(len(self.alphas)))


def evaluate(p: Polynomial, a):
    return p.eval(a)


def interpolate(grid: EvaluationGrid, values: Sequence) -> Polynomial:
    """Lagrange interpolation: the unique polynomial of degree < n through the points."""
    field = grid.field
    q = field.q
    xs = grid.alphas
    ys = [int(v) % q for v in values]
    if len(ys) != len(xs):
        raise ValueError(f"expected {len(xs)} values, got {len(ys)}")
    n = len(xs)
    if n == 0:
        return Polynomial.zero(field)
    # Build the node polynomial once and divide out each (x - x_j) synthetically.
    node = [1]
    for a in xs:
        nxt = [0] * (len(node) + 1)
        for i, c in enumerate(node):
            nxt[i + 1] += c
            nxt[i] -= a * c
        node = [c % q for c in nxt]
    out = [0] * n
    for j, (xj, yj) in enumerate(zip(xs, ys)):
        if yj == 0:
            continue
        # basis numerator: node / (x - xj), by synthetic division
        b = [0] * n
        carry = 0
        for k in range(n, 0, -1):
            carry = (node[k] + carry * xj) % q
            b[k - 1] = carry
        denom = 1
        for m, xm in enumerate(xs):
            if m != j:
                denom = denom * (xj - xm) % q
        w = yj * pow(denom, -1, q) % q
        for k in range(n):
            out[k] += w * b[k]
    return Polynomial(field, [c % q for c in out])


def error_locator(grid: EvaluationGrid, positions: Iterable[int]) -> Polynomial:
    """Monic prod_{j in positions} (x - alpha_j); positions are 0-based."""
    field = grid.field
    q = field.q
    coeffs = [1]
    for j in sorted(set(positions)):
        a = grid.alphas[j]
        nxt = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] += c
            nxt[i] -= a * c
        coeffs = [c % q for c in nxt]
    return Polynomial(field, coeffs)


def reduce_fraction_vector(nums: Sequence[Polynomial], den: Polynomial):
    """Cancel gcd(nums..., den) and make the denominator monic."""
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    g = gcd_many([*nums, den])
    nums = [p.exact_div(g) for p in nums]
    den = den.exact_div(g)
    c = den.field.inv(den.lc())
    return tuple(p.scale(c) for p in nums), den.scale(c)


@dataclass(frozen=True)
class RationalVector:
    """A reduced vector f / g with monic common denominator g."""

    f: tuple
    g: Polynomial

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(self.f))
        if self.g.is_zero():
            raise ValueError("denominator is zero")

    @classmethod
    def from_fraction(cls, nums: Sequence[Polynomial], den: Polynomial) -> "RationalVector":
        f, g = reduce_fraction_vector(nums, den)
        return cls(f, g)

    @property
    def field(self) -> FieldParams:
        return self.g.field

    @property
    def l(self) -> int:
        return len(self.f)

    @property
    def deg_f(self):
        return vector_degree(self.f)

    @property
    def deg_g(self) -> int:
        return self.g.degree

    def is_reduced(self) -> bool:
        return self.g.is_monic() and gcd_many([*self.f, self.g]).degree == 0

    def values_at(self, a: int) -> list[int]:
        """f(a) / g(a) as residues; raises if g(a) = 0."""
        field = self.field
        ginv = field.inv(self.g.eval(a))
        return [fi.eval(a) * ginv % field.q for fi in self.f]

    def evaluate_on(self, grid: EvaluationGrid) -> np.ndarray:
        """l x n array of f(alpha_j) / g(alpha_j)."""
        cols = [self.values_at(a) for a in grid.alphas]
        return self.field.array(cols).reshape(len(cols), self.l).T.copy()
