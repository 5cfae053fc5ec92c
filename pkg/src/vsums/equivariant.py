"""Verlinde sums with diagonal equivariant parameters, as truncated power series."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

from .exactnum import ONE, ZERO, CyclotomicNumber, value_to_json
from .lattice import eval_character
from .verlinde import VerlindeProblem, direct_verlinde


@dataclass
class EquivariantSeries:
    """sum_e c_e x^e in n diagonal variables, exact up to total degree ``order``."""

    nvars: int
    order: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {
            tuple(e): CyclotomicNumber.coerce(c)
            for e, c in self.terms.items()
            if sum(e) <= self.order and not CyclotomicNumber.coerce(c).is_zero()
        }

    @classmethod
    def constant(cls, nvars: int, order: int, c) -> "EquivariantSeries":
        return cls(nvars, order, {(0,) * nvars: c})

    @classmethod
    def univariate(cls, nvars: int, order: int, var: int, coeffs: Sequence) -> "EquivariantSeries":
        terms = {}
        for j, c in enumerate(coeffs[: order + 1]):
            e = [0] * nvars
            e[var] = j
            terms[tuple(e)] = c
        return cls(nvars, order, terms)

    def coefficient(self, e: Sequence[int]) -> CyclotomicNumber:
        if sum(e) > self.order:
            raise ValueError("coefficient beyond the truncation order")
        return self.terms.get(tuple(e), ZERO)

    def order0(self) -> CyclotomicNumber:
        return self.coefficient((0,) * self.nvars)

    def min_order(self) -> int | None:
        return min((sum(e) for e in self.terms), default=None)

    def __add__(self, other: "EquivariantSeries") -> "EquivariantSeries":
        order = min(self.order, other.order)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return EquivariantSeries(self.nvars, order, out)

    def __sub__(self, other: "EquivariantSeries") -> "EquivariantSeries":
        return self + other.scale(-1)

    def scale(self, c) -> "EquivariantSeries":
        return EquivariantSeries(self.nvars, self.order, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, EquivariantSeries):
            return self.scale(other)
        order = min(self.order, other.order)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if sum(e) > order:
                    continue
                v = c1 * c2
                out[e] = out[e] + v if e in out else v
        return EquivariantSeries(self.nvars, order, out)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, EquivariantSeries):
            return NotImplemented
        return (self - other).is_zero()

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "terms": [{"exponents": list(e), "value": value_to_json(c)} for e, c in sorted(self.terms.items())],
        }


# ---------------------------------------------------------- one-variable series


def _exp_series(c: Fraction, order: int) -> list[Fraction]:
    return [Fraction(c) ** k / factorial(k) for k in range(order + 1)]


def _mul(a: list, b: list, order: int) -> list:
    out = [Fraction(0)] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if x:
            for j, y in enumerate(b[: order + 1 - i]):
                out[i + j] += x * y
    return out


def _power(a: list, k: int, order: int) -> list:
    out = [Fraction(1)] + [Fraction(0)] * order
    for _ in range(k):
        out = _mul(out, a, order)
    return out


def g_univariate(j: int, order: int) -> list[Fraction]:
    """g_(j)(z) = (-1)^(j-1) (e^z - 1)^(j-1) e^z, so that
    (1 - b e^-z)^-1 = sum_{j>=1} g_(j)(z) (1 - b)^-j."""
    em1 = _exp_series(Fraction(1), order)
    em1[0] -= 1
    base = _mul(_power(em1, j - 1, order), _exp_series(Fraction(1), order), order)
    return [x * (-1) ** (j - 1) for x in base]


def g_univariate_printed(j: int, order: int) -> list[Fraction]:
    """(-1)^(j-1) (1 - e^-z)^(j-1): the expansion as it is usually quoted, kept for comparison."""
    om = [-x for x in _exp_series(Fraction(-1), order)]
    om[0] += 1
    return [x * (-1) ** (j - 1) for x in _power(om, j - 1, order)]


def _multi_indices(n: int, order: int):
    """J with j_k >= 1 and sum (j_k - 1) <= order."""
    for extra in itertools.product(range(order + 1), repeat=n):
        if sum(extra) <= order:
            yield tuple(e + 1 for e in extra)


def gJ_coefficients(u_list: Sequence, order: int) -> dict:
    """Table J -> g_J(x) = prod_k g_(j_k)(x_k), truncated at total order ``order``.

    The coefficients do not depend on the weights or on u; ``u_list`` fixes the number
    of variables.
    """
    n = len(u_list)
    uni = {j: g_univariate(j, order) for j in range(1, order + 2)}
    table = {}
    for J in _multi_indices(n, order):
        s = EquivariantSeries.constant(n, order, ONE)
        for k, j in enumerate(J):
            s = s * EquivariantSeries.univariate(n, order, k, uni[j])
        table[J] = s
    return table


def fJ_coefficients(order: int, n: int = 1) -> dict:
    """Table J -> f_J(z) = prod_k (-z_k)^(j_k - 1), from (t + z)^-1 = sum_j (-z)^j t^-(j+1)."""
    table = {}
    for J in _multi_indices(n, order):
        e = tuple(j - 1 for j in J)
        table[J] = EquivariantSeries(n, order, {e: (-1) ** sum(e)})
    return table


def inflate(problem: VerlindeProblem, J: Sequence[int]) -> VerlindeProblem:
    """Weight k repeated j_k times."""
    out = []
    for w, j in zip(problem.weights, J):
        out.extend([w] * j)
    return problem.with_weights(out)


# ------------------------------------------------------------- direct sums


def _factor_series(b: CyclotomicNumber, order: int) -> list:
    """Coefficients of (1 - b e^-x)^-1 in x, for b != 1."""
    # denominator d(x) = (1 - b) - b sum_{k>=1} (-x)^k / k!
    d = [ONE - b] + [b * Fraction(-((-1) ** k), factorial(k)) for k in range(1, order + 1)]
    inv0 = d[0].inverse()
    out = [inv0]
    for m in range(1, order + 1):
        acc = ZERO
        for k in range(1, m + 1):
            acc = acc + d[k] * out[m - k]
        out.append(-(acc * inv0))
    return out


def equivariant_direct(problem: VerlindeProblem, lam: Sequence[int], ell: int, order: int) -> EquivariantSeries:
    """sum' t^lambda prod_k (1 - u_k t^-alpha_k e^-x_k)^-1, truncated at total order ``order``."""
    n = len(problem.weights)
    total = EquivariantSeries(n, order)
    for t in problem.ctx.enumerate_T_ell(ell):
        bs = []
        skip = False
        for w in problem.weights:
            b = w.u.to_cyclotomic() * eval_character(t, w.alpha).conj()
            if b == ONE:
                skip = True
                break
            bs.append(b)
        if skip:
            continue
        term = EquivariantSeries.constant(n, order, eval_character(t, lam))
        for k, b in enumerate(bs):
            term = term * EquivariantSeries.univariate(n, order, k, _factor_series(b, order))
        total = total + term
    return total


def taylor_expansion(problem: VerlindeProblem, lam: Sequence[int], ell: int, order: int,
                     value=None) -> EquivariantSeries:
    """sum_J g_J(x) V_{A^J}(lambda, ell); ``value(problem, lam, ell)`` defaults to the oracle."""
    value = value or (lambda p, l, e: direct_verlinde(p, l, e))
    n = len(problem.weights)
    total = EquivariantSeries(n, order)
    for J, g in gJ_coefficients(problem.weights, order).items():
        v = value(inflate(problem, J), lam, ell)
        if not v.is_zero():
            total = total + g * v
    return total


@dataclass
class EquivariantCheckReport:
    ok: bool
    direct: EquivariantSeries
    expansion: EquivariantSeries
    per_delta: list  # (AdmissibleSubspace, EquivariantSeries)
    order0_ok: bool


def equivariant_decomposition_check(problem: VerlindeProblem, gamma: Sequence, lam: Sequence[int], ell: int,
                                    order: int = 2) -> EquivariantCheckReport:
    """Compare the direct equivariant sum with sum over Delta of g-weighted decomposition terms.

    For every J the inflated list A^J has the same admissible subspaces; the Delta-term of
    A^J factors as Ver(A_Delta^J') * P(A_c^J''), and g_J = g_J' g_J''.
    """
    from .decomp import _decomposer

    n = len(problem.weights)
    direct = equivariant_direct(problem, lam, ell, order)
    per: dict = {}
    expansion = EquivariantSeries(n, order)
    for J, g in gJ_coefficients(problem.weights, order).items():
        rep = _decomposer(inflate(problem, J), gamma).evaluate(lam, ell)
        for t in rep.terms:
            key = (t.delta.dim, _original_members(t.delta.span.members, J), t.delta.translate)
            per[key] = per.get(key, EquivariantSeries(n, order)) + g * t.contribution
        expansion = expansion + g * rep.total
    order0 = direct.order0() == direct_verlinde(problem, lam, ell)
    per_delta = sorted(per.items(), key=lambda kv: kv[0])
    summed = EquivariantSeries(n, order)
    for _, s in per_delta:
        summed = summed + s
    ok = direct == expansion and summed == expansion and order0
    return EquivariantCheckReport(ok, direct, expansion, per_delta, order0)


def _original_members(members: tuple, J: Sequence[int]) -> tuple:
    """Map member indices of an inflated list back to the original weight indices."""
    owner = []
    for k, j in enumerate(J):
        owner.extend([k] * j)
    return tuple(sorted({owner[i] for i in members}))
