"""Exact scalar fields: the rationals and prime fields GF(q)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np


class ContractError(ValueError):
    """Raised when an operation is called outside its documented precondition."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Field:
    """Common interface of :class:`Rationals` and :class:`PrimeField`."""

    name: str
    characteristic: int
    dtype: Any

    def convert(self, x) -> Any:
        raise NotImplementedError

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def format(self, x) -> str:
        raise NotImplementedError

    def parse(self, s: str):
        raise NotImplementedError

    @property
    def zero(self):
        return self.convert(0)

    @property
    def one(self):
        return self.convert(1)

    def zeros(self, shape) -> np.ndarray:
        if self.dtype is object:
            out = np.empty(shape, dtype=object)
            out.fill(self.zero)
            return out
        return np.zeros(shape, dtype=self.dtype)

    def array(self, data) -> np.ndarray:
        arr = np.array(data, dtype=object)
        flat = [self.convert(v) for v in arr.ravel()]
        out = np.empty(arr.shape, dtype=object)
        if flat:
            out.ravel()[:] = flat
        if self.dtype is object:
            return out
        return out.astype(self.dtype)

    def div(self, x, y):
        return self.convert(x) * self.inv(y)


@dataclass(frozen=True)
class Rationals(Field):
    name: str = "rational"
    characteristic: int = 0

    @property
    def dtype(self):
        return object

    def convert(self, x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, (int, np.integer)):
            return Fraction(int(x))
        if isinstance(x, str):
            return Fraction(x)
        raise TypeError(f"cannot convert {x!r} to a rational")

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        return arr

    def inv(self, x) -> Fraction:
        x = self.convert(x)
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / x

    def format(self, x) -> str:
        x = self.convert(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def parse(self, s: str) -> Fraction:
        return Fraction(s)

    def random(self, rng: np.random.Generator, bound: int = 5, den: int = 3) -> Fraction:
        return Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, den + 1)))

    def __repr__(self) -> str:
        return "QQ"


@dataclass(frozen=True)
class PrimeField(Field):
    q: int

    def __post_init__(self):
        if not (_is_prime(self.q) and self.q < 2**31):
            raise ContractError(f"prime field needs a prime q < 2^31, got {self.q}")

    @property
    def name(self) -> str:
        return f"GF({self.q})"

    @property
    def characteristic(self) -> int:
        return self.q

    @property
    def dtype(self):
        return np.int64

    def convert(self, x) -> int:
        if isinstance(x, Fraction):
            if x.denominator % self.q == 0:
                raise ZeroDivisionError(f"{x} has no image in GF({self.q})")
            return (x.numerator * pow(x.denominator, -1, self.q)) % self.q
        if isinstance(x, str):
            return self.convert(Fraction(x))
        return int(x) % self.q

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        return np.mod(arr, self.q)

    def inv(self, x) -> int:
        x = self.convert(x)
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.q)

    def format(self, x) -> str:
        return str(self.convert(x))

    def parse(self, s: str) -> int:
        return self.convert(s)

    def random(self, rng: np.random.Generator, *_ignored) -> int:
        return int(rng.integers(0, self.q))

    def __repr__(self) -> str:
        return self.name


QQ = Rationals()


def GF(q: int) -> PrimeField:
    return PrimeField(int(q))


def field_from_name(name: str) -> Field:
    """Parse ``"rational"`` / ``"QQ"`` or ``"GF(q)"`` / ``"prime:q"``."""
    s = name.strip()
    if s.lower() in ("rational", "qq", "q"):
        return QQ
    if s.upper().startswith("GF(") and s.endswith(")"):
        return GF(int(s[3:-1]))
    if s.lower().startswith("prime:"):
        return GF(int(s.split(":", 1)[1]))
    raise ValueError(f"unknown field {name!r}")
