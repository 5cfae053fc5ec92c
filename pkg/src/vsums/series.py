"""Truncated multivariate Laurent series and constant-term functionals.

Coefficients live either in a cyclotomic field (plain evaluations) or in a
polynomial ring over it (symbolic germs in lambda and ell).
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Mapping, Sequence

from .errors import NotInvertibleError, PrecisionError
from .exactnum import ONE, ZERO, CyclotomicNumber, rational_to_str


class Poly:
    """Polynomial in named indeterminates with cyclotomic coefficients."""

    __slots__ = ("names", "terms")

    def __init__(self, names: Sequence[str], terms: Mapping | None = None):
        self.names = tuple(names)
        clean = {}
        for e, c in (terms or {}).items():
            c = CyclotomicNumber.coerce(c)
            if not c.is_zero():
                clean[tuple(e)] = c
        self.terms = clean

    @classmethod
    def constant(cls, names: Sequence[str], c) -> "Poly":
        return cls(names, {(0,) * len(names): c})

    @classmethod
    def var(cls, names: Sequence[str], name: str) -> "Poly":
        e = tuple(int(n == name) for n in names)
        return cls(names, {e: ONE})

    @classmethod
    def linear(cls, names: Sequence[str], coeffs: Sequence, const=0) -> "Poly":
        terms = {(0,) * len(names): const}
        for i, c in enumerate(coeffs):
            e = [0] * len(names)
            e[i] = 1
            terms[tuple(e)] = c
        return cls(names, terms)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.names != self.names:
                raise ValueError("polynomials over different variables")
            return other
        return Poly.constant(self.names, other)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> CyclotomicNumber:
        return self.terms.get((0,) * len(self.names), ZERO)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return Poly(self.names, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.names, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = CyclotomicNumber.coerce(other)
            if c.is_zero():
                return Poly(self.names)
            return Poly(self.names, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = c1 * c2
                out[e] = out[e] + v if e in out else v
        return Poly(self.names, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        out = Poly.constant(self.names, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            if other.names != self.names:
                return False
            return (self - other).is_zero()
        try:
            return (self - other).is_zero()
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.names, frozenset(self.terms)))

    def evaluate(self, values: Mapping[str, object] | Sequence) -> CyclotomicNumber:
        if isinstance(values, Mapping):
            vals = [values[n] for n in self.names]
        else:
            vals = list(values)
        total = ZERO
        for e, c in self.terms.items():
            term = c
            for v, k in zip(vals, e):
                if k:
                    term = term * (CyclotomicNumber.coerce(v) ** k if isinstance(v, CyclotomicNumber) else Fraction(v) ** k)
            total = total + term
        return total

    def substitute(self, mapping: Mapping[str, "Poly"], names: Sequence[str]) -> "Poly":
        """Replace each variable by a polynomial over ``names``."""
        out = Poly(names)
        powers: dict = {}
        for e, c in self.terms.items():
            term = Poly.constant(names, c)
            for n, k in zip(self.names, e):
                if k:
                    key = (n, k)
                    if key not in powers:
                        powers[key] = mapping[n] ** k
                    term = term * powers[key]
            out = out + term
        return out

    def degree(self, name: str | None = None) -> int:
        if not self.terms:
            return -1
        if name is None:
            return max(sum(e) for e in self.terms)
        i = self.names.index(name)
        return max(e[i] for e in self.terms)

    def homogeneous_part(self, deg: int, names: Iterable[str] | None = None) -> "Poly":
        idx = [self.names.index(n) for n in names] if names is not None else range(len(self.names))
        return Poly(self.names, {e: c for e, c in self.terms.items() if sum(e[i] for i in idx) == deg})

    def to_json(self) -> list:
        out = []
        for e in sorted(self.terms):
            c = self.terms[e]
            q = c.to_rational()
            out.append(
                {
                    "monomial": {n: k for n, k in zip(self.names, e) if k},
                    "coeff": rational_to_str(q) if q is not None else c.to_json(),
                }
            )
        return out

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            mono = "*".join(f"{n}^{k}" if k > 1 else n for n, k in zip(self.names, e) if k)
            c = self.terms[e]
            q = c.to_rational()
            cs = str(q) if q is not None else repr(c)
            parts.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(parts)


def _is_zero(c) -> bool:
    if isinstance(c, (int, Fraction)):
        return c == 0
    return c.is_zero()


def _coefficient_text(c) -> str:
    if isinstance(c, Poly):
        return repr(c)
    c = CyclotomicNumber.coerce(c)
    q = c.to_rational()
    return str(q) if q is not None else repr(c)


def _const_inverse(c):
    if isinstance(c, Poly):
        if not c.is_constant():
            raise NotInvertibleError("leading coefficient is not a constant")
        return c.constant_value().inverse()
    return CyclotomicNumber.coerce(c).inverse()


class TruncatedSeries:
    """Laurent series in m variables, known exactly up to a per-variable valid order.

    ``lo`` bounds every stored exponent from below and ``hi`` is the highest
    exponent (per variable) at which coefficients are correct.
    """

    __slots__ = ("nvars", "lo", "hi", "terms")

    def __init__(self, nvars: int, lo: Sequence[int], hi: Sequence[int], terms: Mapping | None = None):
        self.nvars = nvars
        self.lo = tuple(lo)
        self.hi = tuple(hi)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if any(a < l for a, l in zip(e, self.lo)):
                raise ValueError(f"exponent {e} below the declared lower order {self.lo}")
            if any(a > h for a, h in zip(e, self.hi)):
                continue
            if not _is_zero(c):
                clean[e] = c
        self.terms = clean

    # --- constructors
    @classmethod
    def constant(cls, nvars: int, c, hi: Sequence[int]) -> "TruncatedSeries":
        return cls(nvars, (0,) * nvars, hi, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, nvars: int, exps: Sequence[int], c, hi: Sequence[int]) -> "TruncatedSeries":
        return cls(nvars, tuple(min(0, e) for e in exps), hi, {tuple(exps): c})

    @classmethod
    def univariate(cls, nvars: int, var: int, coeffs: Sequence, hi: Sequence[int], lo: int = 0) -> "TruncatedSeries":
        """sum_j coeffs[j] z_var^(lo + j)."""
        terms = {}
        for j, c in enumerate(coeffs):
            e = [0] * nvars
            e[var] = lo + j
            terms[tuple(e)] = c
        low = [0] * nvars
        low[var] = min(lo, 0)
        return cls(nvars, low, hi, terms)

    # --- structure
    def coefficient(self, exps: Sequence[int]):
        exps = tuple(exps)
        if any(a > h for a, h in zip(exps, self.hi)):
            raise PrecisionError(f"coefficient {exps} requested beyond valid order {self.hi}")
        c = self.terms.get(exps)
        return self._zero_coeff() if c is None else c

    def truncate(self, hi: Sequence[int]) -> "TruncatedSeries":
        if any(a > b for a, b in zip(hi, self.hi)):
            raise PrecisionError(f"cannot extend valid order {self.hi} to {tuple(hi)}")
        return TruncatedSeries(self.nvars, self.lo, hi, self.terms)

    def min_exponents(self) -> tuple:
        if not self.terms:
            return self.hi
        return tuple(min(e[i] for e in self.terms) for i in range(self.nvars))

    def _zero_coeff(self):
        for c in self.terms.values():
            return c * 0
        return ZERO

    # --- arithmetic
    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(self.nvars, other, self.hi)
        hi = tuple(min(a, b) for a, b in zip(self.hi, other.hi))
        lo = tuple(min(a, b) for a, b in zip(self.lo, other.lo))
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return TruncatedSeries(self.nvars, lo, hi, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.nvars, self.lo, self.hi, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(self.nvars, other, self.hi)
        return self + (-other)

    def __rsub__(self, other):
        return TruncatedSeries.constant(self.nvars, other, self.hi) - self

    def scale(self, c) -> "TruncatedSeries":
        return TruncatedSeries(self.nvars, self.lo, self.hi, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        lo = tuple(a + b for a, b in zip(self.lo, other.lo))
        hi = tuple(min(ha + lb, la + hb) for ha, hb, la, lb in zip(self.hi, other.hi, self.lo, other.lo))
        out: dict = {}
        b_items = list(other.terms.items())
        for e1, c1 in self.terms.items():
            for e2, c2 in b_items:
                e = tuple(a + b for a, b in zip(e1, e2))
                if any(x > h for x, h in zip(e, hi)):
                    continue
                v = c1 * c2
                out[e] = out[e] + v if e in out else v
        return TruncatedSeries(self.nvars, lo, hi, out)

    __rmul__ = __mul__

    def shift(self, exps: Sequence[int]) -> "TruncatedSeries":
        """Multiply by the monomial z^exps."""
        return TruncatedSeries(
            self.nvars,
            tuple(a + b for a, b in zip(self.lo, exps)),
            tuple(a + b for a, b in zip(self.hi, exps)),
            {tuple(a + b for a, b in zip(e, exps)): c for e, c in self.terms.items()},
        )

    def inverse(self) -> "TruncatedSeries":
        """1/s for s = z^m (g0 + higher terms) with g0 an invertible constant."""
        m = self.min_exponents()
        g0 = self.terms.get(m)
        if g0 is None:
            raise NotInvertibleError("the lowest-order part is not a single monomial times a unit")
        g = self.shift(tuple(-x for x in m))
        g = TruncatedSeries(self.nvars, (0,) * self.nvars, g.hi, g.terms)
        if any(h < 0 for h in g.hi):
            raise PrecisionError("series is not known to its leading order")
        inv0 = _const_inverse(g0)
        h = TruncatedSeries(self.nvars, (0,) * self.nvars, g.hi, {e: -c * inv0 for e, c in g.terms.items() if any(e)})
        # 1/g = inv0 * sum_k h^k; h has positive total degree
        total = TruncatedSeries.constant(self.nvars, ONE, g.hi)
        power = TruncatedSeries.constant(self.nvars, ONE, g.hi)
        for _ in range(sum(g.hi)):
            power = power * h
            if not power.terms:
                break
            total = total + power
        total = total.scale(inv0)
        return total.shift(tuple(-x for x in m))

    def __truediv__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(CyclotomicNumber.coerce(other).inverse())
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse().scale(other)

    def __pow__(self, k: int) -> "TruncatedSeries":
        if k < 0:
            return self.inverse() ** (-k)
        out = TruncatedSeries.constant(self.nvars, ONE, self.hi)
        for _ in range(k):
            out = out * self
        return out

    def exp(self) -> "TruncatedSeries":
        """exp(s) for s without constant term and no negative exponents."""
        if any(l < 0 for l in self.lo) or (0,) * self.nvars in self.terms:
            raise NotInvertibleError("exp needs a series with zero constant term and no poles")
        total = TruncatedSeries.constant(self.nvars, ONE, self.hi)
        power = TruncatedSeries.constant(self.nvars, ONE, self.hi)
        for k in range(1, sum(self.hi) + 1):
            power = power * self
            if not power.terms:
                break
            total = total + power.scale(Fraction(1, factorial(k)))
        return total

    def derivative(self, var: int) -> "TruncatedSeries":
        out = {}
        for e, c in self.terms.items():
            if e[var]:
                e2 = list(e)
                e2[var] -= 1
                out[tuple(e2)] = c * e[var]
        lo = list(self.lo)
        lo[var] = lo[var] - 1 if lo[var] < 0 else 0
        hi = list(self.hi)
        hi[var] -= 1
        return TruncatedSeries(self.nvars, lo, hi, out)

    def substitute_scale(self, factors: Sequence) -> "TruncatedSeries":
        """z_k -> c_k z_k."""
        out = {}
        for e, c in self.terms.items():
            f = ONE
            for ck, k in zip(factors, e):
                f = f * CyclotomicNumber.coerce(ck) ** k
            out[e] = c * f
        return TruncatedSeries(self.nvars, self.lo, self.hi, out)

    def map_coefficients(self, fn: Callable) -> "TruncatedSeries":
        return TruncatedSeries(self.nvars, self.lo, self.hi, {e: fn(c) for e, c in self.terms.items()})

    def equals_to_order(self, other: "TruncatedSeries") -> bool:
        hi = tuple(min(a, b) for a, b in zip(self.hi, other.hi))
        keys = set(self.terms) | set(other.terms)
        for e in keys:
            if all(x <= h for x, h in zip(e, hi)):
                a = self.terms.get(e)
                b = other.terms.get(e)
                if a is None and b is None:
                    continue
                if a is None or b is None:
                    return False
                if not _is_zero(a - b):
                    return False
        return True

    def dump(self, names: Sequence[str] | None = None) -> str:
        """One line per monomial ``z1^a z2^b : <coefficient>``, ascending exponents."""
        names = names or [f"z{i + 1}" for i in range(self.nvars)]
        lines = []
        for e in sorted(self.terms):
            mono = " ".join(f"{n}^{k}" for n, k in zip(names, e))
            lines.append(f"{mono} : {_coefficient_text(self.terms[e])}")
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"TruncatedSeries(lo={self.lo}, hi={self.hi}, {len(self.terms)} terms)"


def expand_exp(c, var: int, nvars: int, order: int, hi: Sequence[int] | None = None) -> TruncatedSeries:
    """sum_{j<=order} c^j z_var^j / j!."""
    coeffs = []
    power = ONE if not isinstance(c, Poly) else Poly.constant(c.names, 1)
    for j in range(order + 1):
        coeffs.append(power * Fraction(1, factorial(j)))
        power = power * c
    h = list(hi) if hi is not None else [0] * nvars
    if hi is None:
        h[var] = order
    return TruncatedSeries.univariate(nvars, var, coeffs, h)


def constant_term(s: TruncatedSeries, var: int) -> TruncatedSeries:
    """Exponent-0 slice in z_var, a series in the remaining variables."""
    if s.hi[var] < 0:
        raise PrecisionError(f"variable {var} is only valid to order {s.hi[var]}; re-expand deeper")
    out = {}
    for e, c in s.terms.items():
        if e[var] == 0:
            out[e[:var] + e[var + 1 :]] = c
    return TruncatedSeries(s.nvars - 1, s.lo[:var] + s.lo[var + 1 :], s.hi[:var] + s.hi[var + 1 :], out)


def iterated_CT(s: TruncatedSeries, order: Sequence[int] | None = None):
    """CT_{z_order[0]} ... CT_{z_order[-1]} s, innermost (last) variable first."""
    order = list(order) if order is not None else list(range(s.nvars))
    cur = s
    remaining = list(range(s.nvars))
    for var in reversed(order):
        pos = remaining.index(var)
        cur = constant_term(cur, pos)
        remaining.pop(pos)
    c = cur.terms.get((), None)
    return c if c is not None else ZERO


# ---------------------------------------------------------- flag coordinates
#
# For the iterated constant term CT_{z_1} ... CT_{z_m} one expands with
# |z_m| << ... << |z_1|.  Substituting z_k = s_1 s_2 ... s_k turns every linear
# form sum c_k z_k into a monomial times a unit power series in s, so ordinary
# truncated series in s suffice, and the iterated constant term in z becomes
# the coefficient of s^0.


class FlagSeries:
    """Builder for functions of z_1..z_m written in flag coordinates s."""

    def __init__(self, nvars: int, hi: Sequence[int]):
        self.m = nvars
        self.hi = tuple(hi)

    def z_exponents_to_s(self, e: Sequence[int]) -> tuple:
        return tuple(sum(e[i:]) for i in range(self.m))

    def s_exponents_to_z(self, E: Sequence[int]) -> tuple:
        return tuple(E[i] - (E[i + 1] if i + 1 < self.m else 0) for i in range(self.m))

    def z_monomial(self, e: Sequence[int], c=ONE, hi=None) -> TruncatedSeries:
        return TruncatedSeries.monomial(self.m, self.z_exponents_to_s(e), c, hi or self.hi)

    def linear_form(self, coeffs: Sequence, hi=None) -> TruncatedSeries:
        """sum c_k z_k."""
        hi = hi or self.hi
        terms = {}
        for k, c in enumerate(coeffs):
            if c != 0:
                e = tuple(1 if i <= k else 0 for i in range(self.m))
                terms[e] = c if isinstance(c, Poly) else CyclotomicNumber.coerce(c)
        return TruncatedSeries(self.m, (0,) * self.m, hi, terms)

    def exp_linear(self, coeffs: Sequence, hi=None) -> TruncatedSeries:
        """exp(sum c_k z_k) with c_k numbers or polynomials."""
        return self.linear_form(coeffs, hi).exp()

    def from_z_series(self, s: TruncatedSeries) -> TruncatedSeries:
        """Re-express an ordinary series in z (no negative exponents) in s."""
        out = {}
        for e, c in s.terms.items():
            out[self.z_exponents_to_s(e)] = c
        return TruncatedSeries(self.m, (0,) * self.m, self.hi, out)

    def iterated_ct(self, s: TruncatedSeries):
        if any(h < 0 for h in s.hi):
            raise PrecisionError(f"series only valid to {s.hi}; re-expand deeper")
        c = s.terms.get((0,) * self.m)
        return c if c is not None else ZERO

    def to_z_terms(self, s: TruncatedSeries) -> dict:
        return {self.s_exponents_to_z(E): c for E, c in s.terms.items()}


def bernoulli_numbers(n: int) -> list[Fraction]:
    """B_0..B_n with B_1 = -1/2."""
    b = [Fraction(0)] * (n + 1)
    b[0] = Fraction(1)
    for m in range(1, n + 1):
        b[m] = -sum(Fraction(factorial(m + 1), factorial(k) * factorial(m + 1 - k)) * b[k] for k in range(m)) / (m + 1)
    return b


def kernel_coefficients(c: CyclotomicNumber, order: int) -> list:
    """Taylor coefficients of x / (1 - c e^x) up to x^order."""
    c = CyclotomicNumber.coerce(c)
    if c == 1:
        # x/(1-e^x) = -sum B_j x^j / j!
        return [-b / factorial(j) for j, b in enumerate(bernoulli_numbers(order))]
    # 1/(1 - c e^x) = 1/((1-c) - c (e^x - 1))
    denom = [(1 - c) if j == 0 else -c * Fraction(1, factorial(j)) for j in range(order + 1)]
    inv = [ZERO] * (order + 1)
    d0 = denom[0].inverse()
    for j in range(order + 1):
        acc = ONE if j == 0 else ZERO
        for i in range(1, j + 1):
            acc = acc - denom[i] * inv[j - i]
        inv[j] = acc * d0
    return [ZERO] + inv[:order]


def one_minus_exp_inverse(order: int) -> list:
    """Laurent coefficients of (1 - e^{-z})^{-1} = z^{-1} + 1/2 + z/12 - ..., from z^-1."""
    # (1-e^{-z})^{-1} = -(1/z) * (-z)/(1-e^{-z})... use x/(e^x - 1) at x = -z
    b = bernoulli_numbers(order + 1)
    # z/(1-e^{-z}) = (-z)/(e^{-z}-1) = sum B_j (-z)^j / j!
    return [b[j] * (-1) ** j / factorial(j) for j in range(order + 2)]
