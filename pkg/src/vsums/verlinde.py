"""The brute-force Verlinde sum and its structural reductions.

V(lambda, ell) = sum over t in T_ell, skipping t with u t^-alpha = 1 for some
weight, of t^lambda / prod (1 - u t^-alpha).  Everything else in the package
is tested against this sum.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from . import linalg as la
from .errors import SizeLimitError, VSumsError
from .exactnum import ZERO, CyclotomicNumber, RootOfUnity, _reduce, lcm
from .lattice import (
    AugmentedWeight,
    LatticeContext,
    LatticeFunction,
    TorusPoint,
    character_exponent,
    eval_character,
)

DEFAULT_MAX_ORACLE = 10**7


def oracle_limit() -> int:
    return int(os.environ.get("VERLINDE_MAX_ORACLE", DEFAULT_MAX_ORACLE))


@dataclass(frozen=True)
class VerlindeProblem:
    ctx: LatticeContext
    weights: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        for w in self.weights:
            if w.rank != self.ctx.rank:
                raise ValueError("weight rank does not match the context")

    @property
    def rank(self) -> int:
        return self.ctx.rank

    def without(self, index: int) -> "VerlindeProblem":
        return VerlindeProblem(self.ctx, self.weights[:index] + self.weights[index + 1 :])

    def with_weights(self, weights) -> "VerlindeProblem":
        return VerlindeProblem(self.ctx, tuple(weights))

    def conj(self) -> "VerlindeProblem":
        return self.with_weights(w.conj() for w in self.weights)

    def span_rank(self) -> int:
        return la.rank([w.alpha for w in self.weights])

    def value(self, lam: Sequence[int], ell: int, force: bool = False) -> CyclotomicNumber:
        return direct_verlinde(self, lam, ell, force=force)

    def function(self, ell: int, force: bool = False) -> LatticeFunction:
        ev = _evaluator(self, ell, force)
        return LatticeFunction(self.rank, evaluator=ev)

    def __hash__(self):
        return hash((id(self.ctx), self.weights))


class _OracleTable:
    """Fourier coefficients 1/prod(1 - u t^-alpha), lifted to one common order."""

    def __init__(self, problem: VerlindeProblem, ell: int):
        ctx = problem.ctx
        points = ctx.enumerate_T_ell(ell)
        order = 1
        for t in points:
            for c in t.coordinates:
                order = lcm(order, c.denominator)
        for w in problem.weights:
            order = lcm(order, w.u.order)
        entries = []
        for t in points:
            denom = CyclotomicNumber.one()
            skip = False
            for w in problem.weights:
                e = w.u.exponent - character_exponent(t, w.alpha)
                if e.numerator % e.denominator == 0:
                    skip = True
                    break
                denom = denom * (1 - CyclotomicNumber.root(e.numerator, e.denominator))
            if skip:
                continue
            coeff = denom.inverse().lift(order) if problem.weights else CyclotomicNumber.one().lift(order)
            sparse = [(k, c) for k, c in enumerate(coeff.coeffs) if c]
            entries.append((t, sparse))
        self.order = order
        self.entries = entries

    def evaluate(self, lam: Sequence[int]) -> CyclotomicNumber:
        n = self.order
        if n == 1:
            total = sum((c for _, sp in self.entries for _, c in sp), Fraction(0))
            return CyclotomicNumber.from_rational(total)
        acc = [Fraction(0)] * n
        for t, sparse in self.entries:
            e = character_exponent(t, lam)
            shift = (e * n).numerator
            for k, c in sparse:
                acc[(k + shift) % n] += c
        return CyclotomicNumber._raw(n, _reduce(acc, n))


_TABLES: dict = {}


def _table(problem: VerlindeProblem, ell: int, force: bool) -> _OracleTable:
    size = problem.ctx.torus_count(ell)
    if size > oracle_limit() and not force:
        raise SizeLimitError(
            f"brute-force sum over {size} torus points exceeds the limit {oracle_limit()}; pass force"
        )
    key = (id(problem.ctx), problem.ctx.xi_generators, problem.weights, ell)
    tab = _TABLES.get(key)
    if tab is None:
        tab = _OracleTable(problem, ell)
        if len(_TABLES) > 4096:
            _TABLES.clear()
        _TABLES[key] = tab
    return tab


def _evaluator(problem: VerlindeProblem, ell: int, force: bool):
    tab = _table(problem, ell, force)
    return tab.evaluate


def direct_verlinde(problem: VerlindeProblem, lam: Sequence[int], ell: int, force: bool = False) -> CyclotomicNumber:
    """The defining finite sum over T_ell, evaluated exactly."""
    if ell < 1:
        raise ValueError("ell must be positive")
    lam = tuple(int(x) for x in lam)
    if len(lam) != problem.rank:
        raise ValueError("lambda has the wrong length")
    return _table(problem, ell, force).evaluate(lam)


def verlinde_rank1(n: int, lam: int, ell: int) -> CyclotomicNumber:
    """V_n(lambda, ell) for n copies of the weight 1 in rank one."""
    ctx = LatticeContext.standard(1)
    return direct_verlinde(VerlindeProblem(ctx, (AugmentedWeight((1,)),) * n), (lam,), ell)


# ---------------------------------------------------------------- reductions


@dataclass(frozen=True)
class Reduction:
    """V(lambda, ell) = multiplier * reduced(lambda_reduced, ell), or zero."""

    zero: bool
    multiplier: int = 0
    reduced: VerlindeProblem | None = None
    lambda_reduced: tuple | None = None

    def value(self, ell: int) -> CyclotomicNumber:
        if self.zero:
            return ZERO
        return self.reduced.value(self.lambda_reduced, ell) * self.multiplier


def _scaled_integer_form(m) -> list[list[int]]:
    den = la.common_denominator(x for row in m for x in row)
    return [[int(Fraction(x) * den) for x in row] for row in m]


def span_lattice_basis(ctx: LatticeContext, vectors) -> list[tuple[int, ...]]:
    """A Z-basis of Z^r intersected with the real span of the given covectors."""
    r = ctx.rank
    vectors = [list(v) for v in vectors if any(v)]
    if not vectors:
        return []
    ann = la.nullspace(vectors, r)
    if not ann:
        return [tuple(int(i == j) for j in range(r)) for i in range(r)]
    return la.integer_kernel([list(a) for a in ann], r)


def quotient_problem(problem: VerlindeProblem) -> tuple[VerlindeProblem, list[tuple[int, ...]]]:
    """The weights regarded on the quotient torus whose dual is their span.

    Returns the reduced problem and the basis W (columns) of Z^r cap span.
    """
    ctx = problem.ctx
    w = span_lattice_basis(ctx, [x.alpha for x in problem.weights])
    k = len(w)
    wmat = la.transpose([list(v) for v in w])  # r x k
    wt = [list(v) for v in w]  # k x r
    gens = [la.mat_vec(wt, g) for g in ctx.xi_generators]
    binv = la.inverse([list(row) for row in ctx.inner_product])
    gram = la.mat_mul(la.mat_mul(wt, binv), wmat) if k else []
    ip = _scaled_integer_form(la.inverse(gram)) if k else []
    qctx = LatticeContext(k, gens or [[]] * 0, ip)
    new_weights = []
    for x in problem.weights:
        coords = la.solve(wmat, x.alpha) if k else ()
        new_weights.append(AugmentedWeight(tuple(int(c) for c in coords), x.u))
    return VerlindeProblem(qctx, tuple(new_weights)), w


def reduce_nonspanning(problem: VerlindeProblem, lam: Sequence[int], ell: int) -> Reduction:
    """Reduce a Verlinde sum whose weights do not span to the quotient torus."""
    ctx = problem.ctx
    lam = tuple(lam)
    if problem.span_rank() == ctx.rank:
        return Reduction(False, 1, problem, lam)
    reduced, w = quotient_problem(problem)
    k = len(w)
    r = ctx.rank
    # lambda = W c + ell * Xi^* d with c, d integral
    cols = [list(v) for v in w] + [[ell * ctx.xi_dual_basis[i][j] for i in range(r)] for j in range(r)]
    a = la.transpose(cols)
    sol = la.solve_integer(a, lam)
    if sol is None:
        return Reduction(True)
    c = tuple(sol[:k])
    mult = 0
    for t in ctx.enumerate_T_ell(ell):
        if all(character_exponent(t, v) == 0 for v in w):
            mult += 1
    return Reduction(False, mult, reduced, c)


def primitive_normalize(problem: VerlindeProblem) -> VerlindeProblem:
    """Replace (m alpha_0, u) by the m weights (alpha_0, zeta) with zeta^m = u."""
    out = []
    for w in problem.weights:
        g = 0
        for a in w.alpha:
            g = gcd(g, a)
        if g <= 1:
            out.append(w)
            continue
        base = tuple(a // g for a in w.alpha)
        for j in range(g):
            out.append(AugmentedWeight(base, RootOfUnity((w.u.exponent + j) / g)))
    return problem.with_weights(out)


# ---------------------------------------------------------- difference data


@dataclass(frozen=True)
class DifferenceData:
    """Data of the difference equation for deleting one weight beta."""

    beta: AugmentedWeight
    period: int
    t0: TorusPoint
    projection: tuple  # rows: the map Z^r -> Z^(r-1), lambda -> K^T lambda
    projected: VerlindeProblem
    remaining: VerlindeProblem

    def correction(self, lam: Sequence[int], ell: int) -> CyclotomicNumber:
        """e_t0(lambda) delta_{p N}(ell) V_alpha'(pi(lambda), ell)."""
        if ell % self.period:
            return ZERO
        proj = la.mat_vec([list(r) for r in self.projection], lam) if self.projection else ()
        return eval_character(self.t0, lam) * self.projected.value(tuple(int(x) for x in proj), ell)

    def rhs(self, lam: Sequence[int], ell: int) -> CyclotomicNumber:
        return self.remaining.value(lam, ell) - self.correction(lam, ell)


def kernel_context(ctx: LatticeContext, beta: Sequence[int]) -> tuple[LatticeContext, list]:
    """Context of the subtorus exp(ker beta); returns it and the basis K of Lambda_beta."""
    r = ctx.rank
    kbasis = la.integer_kernel([list(beta)], r)  # vectors in Z^r
    kmat = la.transpose([list(v) for v in kbasis]) if kbasis else []
    # Xi cap ker beta, in coordinates of the Xi basis
    xb = ctx.xi_basis
    row = [la.dot(beta, [xb[i][j] for i in range(r)]) for j in range(r)]
    cker = la.integer_kernel([row], r)
    gens = []
    for c in cker:
        x = la.mat_vec(xb, c)
        gens.append(la.solve(kmat, x))
    binner = [list(rw) for rw in ctx.inner_product]
    ip = la.mat_mul(la.mat_mul(la.transpose(kmat), binner), kmat) if kbasis else []
    return LatticeContext(len(kbasis), gens, [[int(x) for x in rw] for rw in ip]), kbasis


def difference_data(problem: VerlindeProblem, beta_index: int) -> DifferenceData:
    """Period, base point t0 and projected list for deleting weights[beta_index]."""
    ctx = problem.ctx
    r = ctx.rank
    beta = problem.weights[beta_index]
    if beta.is_zero():
        raise ValueError("beta must be nonzero")
    g = 0
    for a in beta.alpha:
        g = gcd(g, a)
    if g != 1:
        raise VSumsError("difference_data expects a primitive beta; apply primitive_normalize first")
    xb = ctx.xi_basis
    row = [la.dot(beta.alpha, [xb[i][j] for i in range(r)]) for j in range(r)]
    den = la.common_denominator(row)
    int_row = [int(x * den) for x in row]
    e = beta.u.exponent
    bound = e.denominator * den
    t0 = None
    period = None
    for q in range(1, bound + 1):
        # need c, k integral with <beta, Xi c>/q = e + k, i.e. den*row.c - den*q k = den*q*e
        target = e * q * den
        if target.denominator != 1:
            continue
        sol = la.solve_integer([int_row + [-den * q]], [int(target)])
        if sol is not None:
            c = sol[:r]
            x = la.vscale(Fraction(1, q), la.mat_vec(xb, c))
            t0 = TorusPoint(x)
            period = q
            break
    if t0 is None:
        raise VSumsError("no solution of v t^-beta = 1 found")
    assert (e - character_exponent(t0, beta.alpha)).denominator == 1
    sub_ctx, kbasis = kernel_context(ctx, beta.alpha)
    proj = tuple(tuple(v) for v in kbasis)
    remaining = problem.without(beta_index)
    projected = []
    for w in remaining.weights:
        pa = la.mat_vec([list(v) for v in kbasis], w.alpha) if kbasis else ()
        u = RootOfUnity(w.u.exponent - character_exponent(t0, w.alpha))
        projected.append(AugmentedWeight(tuple(int(x) for x in pa), u))
    return DifferenceData(beta, period, t0, proj, VerlindeProblem(sub_ctx, tuple(projected)), remaining)


def flip_weight(problem: VerlindeProblem, index: int) -> VerlindeProblem:
    ws = list(problem.weights)
    ws[index] = ws[index].flip()
    return problem.with_weights(ws)


def coset_sum(problem: VerlindeProblem, ell: int) -> CyclotomicNumber:
    """Sum of V(lambda, ell) over representatives of Z^r / ell Xi^*."""
    total = ZERO
    for lam in problem.ctx.coset_representatives(ell):
        total = total + problem.value(lam, ell)
    return total


def coset_sum_expected(problem: VerlindeProblem, ell: int) -> CyclotomicNumber:
    """#T_ell * prod (1-u)^-1 when no u equals 1, else 0.

    The sum over Lambda^*/ell Xi^* of t^lambda is #T_ell at the identity and 0 elsewhere,
    so only the t = e term of the defining sum survives, with that multiplicity.
    """
    out = CyclotomicNumber.from_rational(problem.ctx.torus_count(ell))
    for w in problem.weights:
        if w.u.is_one():
            return ZERO
        out = out / (1 - w.u.to_cyclotomic())
    return out
