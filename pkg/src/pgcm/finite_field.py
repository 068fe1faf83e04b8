"""Arithmetic in the prime field F_p.

A :class:`PrimeContext` bundles everything the rest of the package needs
to know about a prime: reduction, inversion, quadratic characters, square
roots, discrete logarithms and the least quadratic non-residue ``eta``.
Contexts are cached, so ``PrimeContext.get(p)`` is cheap to call repeatedly.
"""

from __future__ import annotations

from functools import lru_cache

from sympy import isprime, primitive_root
from sympy.ntheory.residue_ntheory import sqrt_mod

#: Largest prime accepted anywhere in the package.
PRIME_CAP = 10_000


class FieldError(ValueError):
    """Raised for an invalid prime or an undefined field operation."""


class PrimeContext:
    """Arithmetic helpers for a fixed prime ``p``."""

    def __init__(self, p: int):
        if not isinstance(p, int) or isinstance(p, bool):
            raise FieldError(f"p must be an integer, got {p!r}")
        if p > PRIME_CAP:
            raise FieldError(f"p={p} exceeds the supported cap {PRIME_CAP}")
        if not isprime(p):
            raise FieldError(f"p={p} is not prime")
        self.p = p
        self._eta = None if p == 2 else self._least_non_residue()
        self._log = None
        self._exp = None

    @staticmethod
    @lru_cache(maxsize=None)
    def get(p: int) -> "PrimeContext":
        return PrimeContext(p)

    def __repr__(self) -> str:
        return f"PrimeContext({self.p})"

    def _least_non_residue(self) -> int:
        half = (self.p - 1) // 2
        for a in range(2, self.p):
            if pow(a, half, self.p) == self.p - 1:
                return a
        raise AssertionError("every odd prime has a non-residue")

    # -- basic arithmetic -------------------------------------------------

    def reduce(self, a: int) -> int:
        return a % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise FieldError("0 has no inverse")
        return pow(a, -1, self.p)

    def is_zero(self, a: int) -> bool:
        return a % self.p == 0

    # -- quadratic characters ---------------------------------------------

    @property
    def eta(self) -> int:
        """Least quadratic non-residue; undefined for p = 2."""
        if self._eta is None:
            raise FieldError("no quadratic non-residue exists for p = 2")
        return self._eta

    @property
    def has_eta(self) -> bool:
        return self._eta is not None

    def is_square(self, a: int) -> bool:
        """True for 0 and for the nonzero squares."""
        a %= self.p
        if a == 0 or self.p == 2:
            return True
        return pow(a, (self.p - 1) // 2, self.p) == 1

    def square_class(self, a: int) -> int:
        """Return 1 or ``eta`` according to the square class of nonzero ``a``."""
        if a % self.p == 0:
            raise FieldError("0 has no square class")
        return 1 if self.is_square(a) else self.eta

    def sqrt(self, a: int) -> int:
        a %= self.p
        if not self.is_square(a):
            raise FieldError(f"{a} is not a square mod {self.p}")
        if a == 0:
            return 0
        return min(sqrt_mod(a, self.p, all_roots=True))

    # -- discrete logarithms ----------------------------------------------

    def _build_log(self) -> None:
        g = primitive_root(self.p) if self.p > 2 else 1
        exp = [1] * (self.p - 1)
        for k in range(1, self.p - 1):
            exp[k] = exp[k - 1] * g % self.p
        self._exp = exp
        self._log = {v: k for k, v in enumerate(exp)}

    @property
    def generator(self) -> int:
        if self._exp is None:
            self._build_log()
        return self._exp[1] if self.p > 2 else 1

    def log(self, a: int) -> int:
        """Discrete log of nonzero ``a`` to the base :attr:`generator`."""
        if self._log is None:
            self._build_log()
        a %= self.p
        if a == 0:
            raise FieldError("log of 0")
        return self._log[a]

    def exp(self, k: int) -> int:
        if self._exp is None:
            self._build_log()
        return self._exp[k % (self.p - 1)]

    # -- enumeration ------------------------------------------------------

    def elements(self) -> range:
        return range(self.p)

    def units(self) -> range:
        return range(1, self.p)

    def nu_values(self) -> tuple[int, ...]:
        """Square-class representatives: (1,) for p = 2, else (1, eta)."""
        return (1,) if self.p == 2 else (1, self.eta)
