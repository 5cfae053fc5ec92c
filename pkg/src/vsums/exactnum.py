"""Exact arithmetic in Q and in cyclotomic fields Q(zeta_N).

Elements of Q(zeta_N) are stored in the power basis 1, zeta, ..., zeta^(phi(N)-1)
after reduction modulo the N-th cyclotomic polynomial.  That normal form makes
equality decidable, which every consumer in this package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Union

from .errors import IncompatibleOrderError, SingularValueError

Rational = Fraction
Scalar = Union[int, Fraction, "CyclotomicNumber"]


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"``, an int or a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction("".join(value.split()))
    raise TypeError(f"cannot read a rational from {value!r}")


def rational_to_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


# ---------------------------------------------------------------- number theory


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _mobius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_exact_div(a: list[int], b: list[int]) -> list[int]:
    """Quotient of integer polynomials when b is monic and divides a."""
    a = a[:]
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1]
        q[i] = c
        if c:
            for j, y in enumerate(b):
                a[i + j] -= c * y
    assert not any(a), "inexact polynomial division"
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (constant term first) of Phi_n, via the Moebius product."""
    num, den = [1], [1]
    for d in _divisors(n):
        mu = _mobius(n // d)
        if mu == 0:
            continue
        factor = [-1] + [0] * (d - 1) + [1]
        if mu == 1:
            num = _poly_mul(num, factor)
        else:
            den = _poly_mul(den, factor)
    return tuple(_poly_exact_div(num, den))


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Sparse canonical expansion of zeta_n^k for k = 0..n-1."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    rows: list[tuple[tuple[int, int], ...]] = []
    current = [0] * deg
    current[0] = 1
    for _ in range(n):
        rows.append(tuple((i, c) for i, c in enumerate(current) if c))
        # multiply by zeta and reduce the overflow term
        top = current[-1]
        current = [0] + current[:-1]
        if top:
            for i in range(deg):
                current[i] -= top * phi[i]
    return tuple(rows)


@lru_cache(maxsize=None)
def _trace_table(n: int) -> tuple[int, ...]:
    """Tr_{Q(zeta_n)/Q}(zeta_n^k) for the basis powers k < phi(n) (Ramanujan sums)."""
    ph = euler_phi(n)
    out = []
    for k in range(ph):
        g = gcd(k, n)
        m = n // g
        out.append(_mobius(m) * ph // euler_phi(m))
    return tuple(out)


def _reduce(cyclic: list, n: int) -> tuple[Fraction, ...]:
    """Canonical coefficients of sum_k cyclic[k] zeta_n^k (cyclic has length n)."""
    table = _power_table(n)
    deg = euler_phi(n)
    out = [Fraction(0)] * deg
    for k, c in enumerate(cyclic):
        if c:
            for i, m in table[k]:
                out[i] += c * m
    return tuple(out)


# --------------------------------------------------------------------- types


@dataclass(frozen=True, order=True)
class RootOfUnity:
    """The root of unity e^(2 pi i exponent) with 0 <= exponent < 1."""

    exponent: Fraction

    def __post_init__(self):
        e = parse_rational(self.exponent)
        object.__setattr__(self, "exponent", e - (e.numerator // e.denominator))

    @property
    def order(self) -> int:
        return self.exponent.denominator

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        return RootOfUnity(self.exponent + other.exponent)

    def __pow__(self, k: int) -> "RootOfUnity":
        return RootOfUnity(self.exponent * k)

    def inverse(self) -> "RootOfUnity":
        return RootOfUnity(-self.exponent)

    def is_one(self) -> bool:
        return self.exponent == 0

    def to_cyclotomic(self) -> "CyclotomicNumber":
        return CyclotomicNumber.root(self.exponent.numerator, self.exponent.denominator)

    def __repr__(self) -> str:
        return f"RootOfUnity({self.exponent})"


class CyclotomicNumber:
    """An exact element of Q(zeta_N) in canonical power-basis form."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != euler_phi(order):
            # accept an unreduced cyclic table of length order
            if len(coeffs) > order:
                raise ValueError("too many coefficients for this order")
            cyc = list(coeffs) + [Fraction(0)] * (order - len(coeffs))
            coeffs = _reduce(cyc, order)
        self.order = order
        self.coeffs = coeffs

    # constructors
    @classmethod
    def _raw(cls, order: int, coeffs: tuple) -> "CyclotomicNumber":
        obj = object.__new__(cls)
        obj.order = order
        obj.coeffs = coeffs
        return obj

    @classmethod
    def from_rational(cls, q) -> "CyclotomicNumber":
        return cls._raw(1, (Fraction(q),))

    @classmethod
    def zero(cls) -> "CyclotomicNumber":
        return cls.from_rational(0)

    @classmethod
    def one(cls) -> "CyclotomicNumber":
        return cls.from_rational(1)

    @classmethod
    def root(cls, k: int, n: int) -> "CyclotomicNumber":
        """zeta_n^k."""
        g = gcd(k % n, n) if k % n else n
        n2, k2 = n // g, (k % n) // g
        if n2 == 1:
            return cls.one()
        cyc = [0] * n2
        cyc[k2] = 1
        return cls._raw(n2, _reduce(cyc, n2))

    @classmethod
    def coerce(cls, x) -> "CyclotomicNumber":
        if isinstance(x, CyclotomicNumber):
            return x
        if isinstance(x, RootOfUnity):
            return x.to_cyclotomic()
        if isinstance(x, (int, Fraction)):
            return cls.from_rational(x)
        raise TypeError(f"cannot coerce {x!r} to a cyclotomic number")

    # order changes
    def lift(self, n: int) -> "CyclotomicNumber":
        """Re-express in Q(zeta_n); the current order must divide n."""
        if n % self.order:
            raise IncompatibleOrderError(f"order {self.order} does not divide {n}")
        if n == self.order:
            return self
        step = n // self.order
        cyc = [Fraction(0)] * n
        for k, c in enumerate(self.coeffs):
            cyc[k * step] = c
        return CyclotomicNumber._raw(n, _reduce(cyc, n))

    def _cyclic(self) -> list:
        return list(self.coeffs) + [Fraction(0)] * (self.order - len(self.coeffs))

    @staticmethod
    def _common(a: "CyclotomicNumber", b: "CyclotomicNumber"):
        if a.order == b.order:
            return a.order, a, b
        n = lcm(a.order, b.order)
        return n, a.lift(n), b.lift(n)

    # arithmetic
    def __add__(self, other):
        try:
            other = CyclotomicNumber.coerce(other)
        except TypeError:
            return NotImplemented
        if other.order == 1:
            c = list(self.coeffs)
            c[0] += other.coeffs[0]
            return CyclotomicNumber._raw(self.order, tuple(c))
        n, a, b = self._common(self, other)
        return CyclotomicNumber._raw(n, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber._raw(self.order, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        try:
            other = CyclotomicNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return CyclotomicNumber.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber._raw(self.order, tuple(c * other for c in self.coeffs))
        try:
            other = CyclotomicNumber.coerce(other)
        except TypeError:
            return NotImplemented
        if other.order == 1:
            return self * other.coeffs[0]
        if self.order == 1:
            return other * self.coeffs[0]
        n, a, b = self._common(self, other)
        cyc = [Fraction(0)] * n
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        cyc[(i + j) % n] += x * y
        return CyclotomicNumber._raw(n, _reduce(cyc, n))

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicNumber":
        if self.is_zero():
            raise SingularValueError("division by zero in a cyclotomic field")
        if self.order == 1:
            return CyclotomicNumber.from_rational(1 / self.coeffs[0])
        # extended Euclid of a(x) against Phi_N(x) over Q
        n = self.order
        phi = [Fraction(c) for c in cyclotomic_polynomial(n)]
        r0, r1 = phi, _trim(list(self.coeffs))
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1 or r1[0] == 0:
            q, r = _qdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _trim(_qsub(s0, _qmul(q, s1)))
            if len(r1) == 1 and r1[0] == 0:
                break
        # r0 (or r1) is now a nonzero constant
        if len(r1) == 1 and r1[0] != 0:
            g, s = r1[0], s1
        else:
            g, s = r0[0], s0
        coeffs = [c / g for c in s] + [Fraction(0)] * (euler_phi(n) - len(s))
        return CyclotomicNumber._raw(n, tuple(coeffs[: euler_phi(n)]))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise SingularValueError("division by zero")
            return self * (1 / Fraction(other))
        try:
            other = CyclotomicNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return CyclotomicNumber.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = CyclotomicNumber.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "CyclotomicNumber":
        """Complex conjugation zeta -> zeta^-1."""
        n = self.order
        if n == 1:
            return self
        cyc = [Fraction(0)] * n
        for k, c in enumerate(self.coeffs):
            cyc[(-k) % n] += c
        return CyclotomicNumber._raw(n, _reduce(cyc, n))

    def galois(self, a: int) -> "CyclotomicNumber":
        """The automorphism zeta -> zeta^a for a coprime to the order."""
        n = self.order
        if gcd(a, n) != 1:
            raise ValueError("Galois exponent must be coprime to the order")
        cyc = [Fraction(0)] * n
        for k, c in enumerate(self.coeffs):
            cyc[(a * k) % n] += c
        return CyclotomicNumber._raw(n, _reduce(cyc, n))

    # predicates and conversions
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_rational(self) -> Fraction | None:
        """The rational value, or None when the number is not rational."""
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def is_rational(self) -> bool:
        return self.to_rational() is not None

    def normalized_trace(self) -> Fraction:
        """Tr(a)/[Q(a-field):Q]; independent of the ambient order."""
        tr = _trace_table(self.order)
        return sum((c * t for c, t in zip(self.coeffs, tr)), Fraction(0)) / euler_phi(self.order)

    def to_complex(self) -> complex:
        import cmath

        z = cmath.exp(2j * cmath.pi / self.order)
        return sum(complex(float(c)) * z**k for k, c in enumerate(self.coeffs))

    def __eq__(self, other):
        try:
            other = CyclotomicNumber.coerce(other)
        except TypeError:
            return NotImplemented
        _, a, b = self._common(self, other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        q = self.to_rational()
        if q is not None:
            return hash(q)
        return hash(("cyc", self.normalized_trace()))

    def __bool__(self):
        return not self.is_zero()

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "coeffs": {str(k): rational_to_str(c) for k, c in enumerate(self.coeffs) if c},
        }

    @classmethod
    def from_json(cls, data: dict) -> "CyclotomicNumber":
        n = int(data["order"])
        cyc = [Fraction(0)] * n
        for k, c in data.get("coeffs", {}).items():
            cyc[int(k) % n] += parse_rational(c)
        return cls._raw(n, _reduce(cyc, n))

    def __repr__(self) -> str:
        q = self.to_rational()
        if q is not None:
            return f"Cyc({q})"
        terms = [f"{c}*z{self.order}^{k}" for k, c in enumerate(self.coeffs) if c]
        return "Cyc(" + " + ".join(terms) + ")"


# dense polynomial helpers over Q for the inverse
def _trim(p: list) -> list:
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


def _qsub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def _qmul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _qdivmod(a: list, b: list) -> tuple[list, list]:
    a = _trim(a[:])
    b = _trim(b)
    if len(a) < len(b):
        return [Fraction(0)], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, y in enumerate(b):
                a[i + j] -= c * y
    r = _trim(a[: len(b) - 1] or [Fraction(0)])
    return q, r


# ------------------------------------------------------------ public helpers


def cyclo_embed(u: RootOfUnity, n: int) -> CyclotomicNumber:
    """u as an element of Q(zeta_n)."""
    if n % u.order:
        raise IncompatibleOrderError(f"root of order {u.order} is not in Q(zeta_{n})")
    k = (u.exponent * n).numerator
    cyc = [0] * n
    cyc[k % n] = 1
    return CyclotomicNumber._raw(n, _reduce(cyc, n))


def cyclo_to_rational(a: CyclotomicNumber) -> Fraction | None:
    return a.to_rational()


def value_to_json(a) -> str | dict:
    """Rationals as "p/q" strings, other cyclotomic numbers as their power-basis JSON."""
    a = CyclotomicNumber.coerce(a)
    q = a.to_rational()
    return rational_to_str(q) if q is not None else a.to_json()


def value_from_json(data) -> CyclotomicNumber:
    if isinstance(data, dict):
        return CyclotomicNumber.from_json(data)
    return CyclotomicNumber.from_rational(parse_rational(data))


def root_of_unity(exponent) -> RootOfUnity:
    return RootOfUnity(parse_rational(exponent))


ZERO = CyclotomicNumber.zero()
ONE = CyclotomicNumber.one()
