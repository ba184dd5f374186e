"""Prime field arithmetic F_q with a runtime modulus."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Deterministic Miller-Rabin witnesses for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# Above this, products of two residues overflow int64.
_INT64_SAFE = 1 << 31


class FieldMismatchError(ValueError):
    """Two operands live in different prime fields."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldParams:
    """The field F_q for an odd prime q < 2**64."""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or isinstance(self.q, bool):
            raise TypeError(f"modulus must be an integer, got {self.q!r}")
        q = int(self.q)
        object.__setattr__(self, "q", q)
        if q < 3 or q >= 1 << 64:
            raise ValueError(f"modulus must satisfy 3 <= q < 2**64, got {q}")
        if not is_prime(q):
            raise ValueError(f"modulus {q} is not prime")

    def __call__(self, value) -> "FieldElement":
        return FieldElement(int(value) % self.q, self)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    @property
    def dtype(self):
        """numpy dtype able to hold products of two residues exactly."""
        return np.int64 if self.q < _INT64_SAFE else object

    def array(self, values) -> np.ndarray:
        """Reduce `values` into a numpy array of canonical residues."""
        if self.dtype is object:
            q = self.q
            return np.asarray(np.frompyfunc(lambda v: int(v) % q, 1, 1)(
                np.array(values, dtype=object)), dtype=object)
        return np.asarray(values, dtype=np.int64) % self.q

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in F_q")
        return pow(a, -1, self.q)

    def sample_uniform(self, rng: np.random.Generator) -> "FieldElement":
        return FieldElement(int(rng.integers(0, self.q, dtype=np.uint64)), self)

    def sample_array(self, rng: np.random.Generator, size) -> np.ndarray:
        """Uniform residues of the given shape."""
        if self.dtype is object:
            flat = [int(rng.integers(0, self.q, dtype=np.uint64)) for _ in range(int(np.prod(size)))]
            return np.array(flat, dtype=object).reshape(size)
        return rng.integers(0, self.q, size=size, dtype=np.int64)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: FieldParams

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise ValueError(f"{self.value} is not a canonical residue mod {self.field.q}")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field.q != self.field.q:
                raise FieldMismatchError(
                    f"operands in F_{self.field.q} and F_{other.field.q}")
            return other.value
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return int(other) % self.field.q
        return NotImplemented

    def _new(self, v: int) -> "FieldElement":
        return FieldElement(v % self.field.q, self.field)

    def __add__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._new(self.value + b)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._new(self.value - b)

    def __rsub__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._new(b - self.value)

    def __mul__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._new(self.value * b)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.value)

    def inv(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return self._new(self.value * self.field.inv(b))

    def __rtruediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return self._new(b * self.field.inv(self.value))

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inv() ** (-exponent)
        return self._new(pow(self.value, exponent, self.field.q))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field.q == other.field.q and self.value == other.value
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return self.value == int(other) % self.field.q
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field.q))

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.field.q})"


# Functional spellings, convenient in comprehensions.
def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def sub(a: FieldElement, b: FieldElement) -> FieldElement:
    return a - b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    return a.inv()


def sample_uniform(field: FieldParams, rng: np.random.Generator) -> FieldElement:
    return field.sample_uniform(rng)
