"""Residue formula for Verlinde sums: quasi-polynomial germs on chambers."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from . import linalg as la
from .arrange import (
    ArrangementVertex,
    Chamber,
    arrangement_vertices,
    nbc_bases,
    xi_dual_multiple,
    zonotope_lattice_points,
)
from .errors import NotFullRankError, OutsideValidityError
from .exactnum import ONE, ZERO, CyclotomicNumber, lcm
from .lattice import AugmentedWeight, eval_character, _frac_mod1, TorusPoint
from .series import FlagSeries, Poly, TruncatedSeries, bernoulli_numbers, kernel_coefficients
from .verlinde import VerlindeProblem, primitive_normalize


def variable_names(rank: int) -> tuple:
    return tuple(f"l{i + 1}" for i in range(rank)) + ("ell",)


# ------------------------------------------------------------ quasi-polynomials


class QuasiPolynomial:
    """A function of (lambda, ell) given by one polynomial per residue class mod ``modulus``.

    ``support`` (optional) restricts the function to the (lambda, ell) where it returns True.
    """

    def __init__(
        self,
        rank: int,
        modulus: int,
        class_poly: Callable[[tuple, int], Poly],
        support: Callable[[tuple, int], bool] | None = None,
        support_json=None,
        components=None,
    ):
        self.rank = rank
        self.modulus = modulus
        self.names = variable_names(rank)
        self._class_poly = class_poly
        self._cache: dict = {}
        self.support = support
        self.support_json = support_json
        # optional (vertices, fn(vertex, ell_res) -> Poly) with
        # value = sum_p t_p^lambda fn(p, ell mod modulus)
        self.components = components

    def poly(self, lam_res: Sequence[int], ell_res: int) -> Poly:
        key = (tuple(x % self.modulus for x in lam_res), ell_res % self.modulus)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._class_poly(*key)
            self._cache[key] = hit
        return hit

    def __call__(self, lam: Sequence[int], ell: int) -> CyclotomicNumber:
        lam = tuple(lam)
        if self.support is not None and not self.support(lam, ell):
            return ZERO
        return self.poly(lam, ell).evaluate(list(lam) + [ell])

    def classes(self):
        for res in itertools.product(range(self.modulus), repeat=self.rank + 1):
            yield res[:-1], res[-1], self.poly(res[:-1], res[-1])

    def distinct_polys(self) -> list[Poly]:
        out: list = []
        for _, _, p in self.classes():
            if not any((p - q).is_zero() for q in out):
                out.append(p)
        return out

    def equals(self, other: "QuasiPolynomial") -> bool:
        m = lcm(self.modulus, other.modulus)
        if self.components and other.components and set(self.components[0]) == set(other.components[0]):
            # characters times polynomials are linearly independent, so compare per vertex
            fa, fb = self.components[1], other.components[1]
            return all((fa(v, e) - fb(v, e)).is_zero() for v in self.components[0] for e in range(m))
        for res in itertools.product(range(m), repeat=self.rank + 1):
            if not (self.poly(res[:-1], res[-1]) - other.poly(res[:-1], res[-1])).is_zero():
                return False
        return True

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "classes": [
                {"lambda_res": list(lr), "ell_res": er, "poly": p.to_json()} for lr, er, p in self.classes()
            ],
            "support": self.support_json if self.support_json is not None else "all",
        }

    @classmethod
    def from_json(cls, data: dict, rank: int) -> "QuasiPolynomial":
        names = variable_names(rank)
        table = {}
        for c in data["classes"]:
            terms = {}
            for t in c["poly"]:
                e = tuple(t["monomial"].get(n, 0) for n in names)
                coeff = t["coeff"]
                terms[e] = CyclotomicNumber.from_json(coeff) if isinstance(coeff, dict) else Fraction(coeff)
            table[(tuple(c["lambda_res"]), c["ell_res"])] = Poly(names, terms)
        return cls(rank, data["modulus"], lambda lr, er: table[(tuple(lr), er)])


# ------------------------------------------------------------------ the plan


@dataclass
class WeightFactor:
    coords: tuple  # alpha in the beta^0 basis
    phase: Fraction  # w = e^{2 pi i phase} = u e^{-2 pi i <alpha, p>}


@dataclass
class Term:
    """One (vertex, nbc tuple) summand of the residue formula."""

    vertex: tuple
    hyperplanes: tuple
    forms: tuple  # rows: beta^0_k in Xi^*
    v: tuple  # exponents: v_k = e^{2 pi i v_k}
    mus: tuple  # zonotope points
    mu_coords: tuple  # mu in the beta^0 basis
    mu_phase: tuple  # <mu, p>
    volume: int
    factors: tuple  # WeightFactor per weight
    to_forms: list  # matrix taking lambda to its beta^0 coordinates
    depth: tuple = ()

    @property
    def period(self) -> int:
        d = 1
        for x in self.vertex:
            d = lcm(d, Fraction(x).denominator)
        return d


def _leading_block(coords: Sequence) -> tuple:
    """Flag-coordinate lowest exponent of sum c_k z_k: s_1 ... s_k0 with k0 the first nonzero slot."""
    k0 = next(i for i, c in enumerate(coords) if c != 0)
    return tuple(1 if i <= k0 else 0 for i in range(len(coords)))


def zero_weight_factor(weights: Sequence[AugmentedWeight]) -> CyclotomicNumber | None:
    """prod (1-u)^-1 over zero weights, or None when some zero weight has u = 1."""
    out = ONE
    for w in weights:
        if not any(w.alpha):
            if w.u.is_one():
                return None
            out = out * (1 - w.u.to_cyclotomic()).inverse()
    return out


class SzenesPlan:
    """Vertices, nbc bases and zonotope data for a spanning problem and a chamber point."""

    def __init__(self, problem: VerlindeProblem, chamber_point: Sequence, order_seed=None):
        ctx = problem.ctx
        self.ctx = ctx
        self.rank = ctx.rank
        self.original = problem
        self.prefactor = zero_weight_factor(problem.weights)
        nz = [w for w in problem.weights if any(w.alpha)]
        if la.rank([list(w.alpha) for w in nz]) < ctx.rank:
            raise NotFullRankError("the weights do not span t*")
        self.problem = primitive_normalize(problem.with_weights(nz))
        self.weights = self.problem.weights
        self.chamber = Chamber(ctx, [w.alpha for w in self.weights], chamber_point)
        self.point = self.chamber.point
        self.vertices = arrangement_vertices(ctx, self.weights)
        rng = None
        if order_seed is not None:
            import random

            rng = random.Random(order_seed)
        self.terms: list[Term] = []
        self._f_cache: dict = {}
        self._cores: dict = {}
        self.modulus = 1
        for vert in self.vertices:
            order = list(range(len(vert.hyperplanes)))
            if rng is not None:
                rng.shuffle(order)
            for tup in nbc_bases(vert, ctx.rank, order):
                self.terms.append(self._term(vert, tuple(vert.hyperplanes[i] for i in tup)))
            for x in vert.point:
                self.modulus = lcm(self.modulus, Fraction(x).denominator)

    def _term(self, vert: ArrangementVertex, hyps: tuple) -> Term:
        ctx = self.ctx
        p = vert.point
        forms, vs = [], []
        for h in hyps:
            m = xi_dual_multiple(ctx, h.alpha)
            forms.append(tuple(m * a for a in h.alpha))
            vs.append(_frac_mod1(-m * h.offset))
        bt = la.transpose([list(f) for f in forms])  # covector = bt @ coords
        to_forms = la.inverse(bt)
        mus, vol = zonotope_lattice_points(ctx, self.point, forms)
        mu_coords = tuple(la.mat_vec(to_forms, mu) for mu in mus)
        mu_phase = tuple(_frac_mod1(la.dot(mu, p)) for mu in mus)
        factors = []
        depth = [0] * ctx.rank
        for w in self.weights:
            c = la.mat_vec(to_forms, w.alpha)
            ph = _frac_mod1(w.u.exponent - la.dot(w.alpha, p))
            factors.append(WeightFactor(c, ph))
            if ph == 0:
                depth = [a + b for a, b in zip(depth, _leading_block(c))]
        return Term(p, hyps, tuple(forms), tuple(vs), tuple(mus), mu_coords, mu_phase, vol, tuple(factors), to_forms, tuple(depth))

    def vertex_report(self) -> list[dict]:
        out = []
        for vert in self.vertices:
            out.append(vert.to_json(nbc_bases(vert, self.rank)))
        return out

    # --- series pieces
    def f_series(self, term: Term) -> TruncatedSeries:
        """prod over weights of 1/(1 - w e^{-sum c_k z_k}) in flag coordinates."""
        hi = term.depth
        flag = FlagSeries(self.rank, hi)
        total = TruncatedSeries.constant(self.rank, ONE, hi)
        for fac in term.factors:
            total = total * _weight_factor_series(flag, fac, hi)
        return total

    def kernel_series(self, term: Term, ell_res: int, ell_value) -> TruncatedSeries:
        """prod_k K_{c_k}(ell z_k) with c_k = v_k^{-ell}, K_c(x) = x/(1 - c e^x)."""
        hi = term.depth
        flag = FlagSeries(self.rank, hi)
        order = sum(hi)
        total = TruncatedSeries.constant(self.rank, ONE, hi)
        for k, vk in enumerate(term.v):
            ce = _frac_mod1(-vk * ell_res)
            c = CyclotomicNumber.root(ce.numerator, ce.denominator)
            kappa = kernel_coefficients(c, order)
            zk = flag.z_monomial(tuple(int(i == k) for i in range(self.rank)))
            ser = TruncatedSeries.constant(self.rank, CyclotomicNumber.coerce(kappa[0]), hi)
            power = TruncatedSeries.constant(self.rank, ONE, hi)
            ellp = ell_value ** 0 if isinstance(ell_value, Poly) else ONE
            for j in range(1, order + 1):
                power = power * zk
                ellp = ellp * ell_value
                if not power.terms:
                    break
                if not CyclotomicNumber.coerce(kappa[j]).is_zero():
                    ser = ser + power.scale(ellp * kappa[j])
            total = total * ser
        return total

    def mu_sum_series(self, term: Term, ell_res: int, ell_value) -> TruncatedSeries:
        """(1/vol) sum_mu (e^{-2 pi i <mu,p>})^ell e^{-ell sum mu_k z_k}."""
        hi = term.depth
        flag = FlagSeries(self.rank, hi)
        total = None
        for mc, mp in zip(term.mu_coords, term.mu_phase):
            ph = _frac_mod1(-mp * ell_res)
            phase = CyclotomicNumber.root(ph.numerator, ph.denominator) * Fraction(1, term.volume)
            coeffs = [ell_value * (-c) for c in mc]
            ser = flag.exp_linear(coeffs) if any(c != 0 for c in mc) else TruncatedSeries.constant(self.rank, ONE, hi)
            ser = ser.scale(phase)
            total = ser if total is None else total + ser
        return total

    def term_core(self, term: Term, ell_res: int, ell_value) -> TruncatedSeries:
        """Everything except exp(sum lambda_k z_k) and the t_p^lambda phase."""
        key = None
        if not isinstance(ell_value, Poly):
            key = (id(term), ell_res, ell_value.to_rational())
            hit = self._cores.get(key)
            if hit is not None:
                return hit
        f = self._f_cache.get(id(term))
        if f is None:
            f = self._f_cache[id(term)] = self.f_series(term)
        core = f * self.kernel_series(term, ell_res, ell_value) * self.mu_sum_series(term, ell_res, ell_value)
        if key is not None:
            if len(self._cores) > 512:
                self._cores.clear()
            self._cores[key] = core
        return core

    def term_value(self, term: Term, ell_res: int, ell_value, lam_coords) -> object:
        """iCT of T(lambda, ell) f without the t_p^lambda factor."""
        core = self.term_core(term, ell_res, ell_value)
        flag = FlagSeries(self.rank, term.depth)
        if any(c != 0 if not isinstance(c, Poly) else not c.is_zero() for c in lam_coords):
            e = flag.exp_linear(list(lam_coords))
        else:
            e = TruncatedSeries.constant(self.rank, ONE, term.depth)
        return _ct_of_product(core, e)


def _weight_factor_series(flag: FlagSeries, fac: WeightFactor, hi) -> TruncatedSeries:
    r = flag.m
    lin = [-c for c in fac.coords]  # exponent: - sum c_k z_k
    if fac.phase == 0:
        # 1/(1 - e^{-L}) = (1/L) * L/(1 - e^{-L}) with L = sum c_k z_k
        lead = _leading_block(fac.coords)
        big = tuple(h + 2 * l for h, l in zip(hi, lead))
        lser = flag.linear_form(list(fac.coords), hi=big)
        inv = lser.inverse().truncate(hi)
        order = sum(hi) + sum(lead)
        b = bernoulli_numbers(order)
        todd = [Fraction((-1) ** j) * b[j] / factorial(j) for j in range(order + 1)]
        l_hi = flag.linear_form(list(fac.coords), hi=tuple(h + l for h, l in zip(hi, lead)))
        unit = _compose(todd, l_hi, r, tuple(h + l for h, l in zip(hi, lead)))
        return inv * unit
    w = CyclotomicNumber.root(fac.phase.numerator, fac.phase.denominator)
    # 1/(1 - w e^x) at x = -L: coefficients from x/(1 - w e^x) shifted by one
    order = sum(hi)
    kc = kernel_coefficients(w, order + 1)
    coeffs = kc[1:]
    x = flag.linear_form(lin, hi=hi)
    return _compose(coeffs, x, r, hi)


def _compose(coeffs: Sequence, x: TruncatedSeries, nvars: int, hi) -> TruncatedSeries:
    """sum_j coeffs[j] x^j for x without constant term."""
    total = TruncatedSeries.constant(nvars, CyclotomicNumber.coerce(coeffs[0]), hi)
    power = TruncatedSeries.constant(nvars, ONE, hi)
    x = x.truncate(tuple(min(a, b) for a, b in zip(x.hi, hi)))
    for j in range(1, len(coeffs)):
        power = power * x
        if not power.terms:
            break
        c = CyclotomicNumber.coerce(coeffs[j])
        if not c.is_zero():
            total = total + power.scale(c)
    return total


def _ct_of_product(a: TruncatedSeries, b: TruncatedSeries):
    """Coefficient of s^0 in a*b where b has no negative exponents."""
    if any(l < 0 for l in b.lo):
        raise ValueError("second factor must be holomorphic")
    total = None
    for e, c in a.terms.items():
        if any(x > 0 for x in e):
            continue
        neg = tuple(-x for x in e)
        if any(x > h for x, h in zip(neg, b.hi)):
            raise AssertionError("truncation too shallow")
        d = b.terms.get(neg)
        if d is None:
            continue
        v = c * d
        total = v if total is None else total + v
    if any(h < 0 for h in a.hi):
        raise AssertionError("series not valid at order 0")
    return total if total is not None else ZERO


# ------------------------------------------------------------- public entry


_PLANS: dict = {}
_GERMS: dict = {}


def _plan(problem: VerlindeProblem, point, order_seed=None) -> SzenesPlan:
    key = (problem.ctx.key, problem.weights, tuple(Fraction(x) for x in point), order_seed)
    hit = _PLANS.get(key)
    if hit is None:
        hit = SzenesPlan(problem, point, order_seed)
        _PLANS[key] = hit
    return hit


def t_factor(plan: SzenesPlan, term: Term, mode: str = "symbolic", lam=None, ell=None) -> TruncatedSeries:
    """The kernel T times nothing else, as a flag-coordinate series at the vertex.

    symbolic: coefficients are polynomials in (lambda, ell) for ell = ell residue 0;
    evaluated: concrete lambda and ell (without the t_p^lambda phase).
    """
    names = variable_names(plan.rank)
    if mode == "symbolic":
        ell_value = Poly.var(names, "ell")
        lam_coords = _symbolic_lambda_coords(term, names)
        ell_res = 0
    else:
        ell_value = CyclotomicNumber.coerce(ell)
        lam_coords = la.mat_vec(term.to_forms, lam)
        ell_res = ell
    flag = FlagSeries(plan.rank, term.depth)
    return plan.kernel_series(term, ell_res, ell_value) * plan.mu_sum_series(term, ell_res, ell_value) * flag.exp_linear(list(lam_coords))


def _symbolic_lambda_coords(term: Term, names) -> list:
    out = []
    for row in term.to_forms:
        out.append(Poly.linear(names, list(row) + [0]))
    return out


def szenes_value(problem: VerlindeProblem, chamber_point: Sequence, lam: Sequence[int], ell: int,
                 check_region: bool = True, order_seed=None) -> CyclotomicNumber:
    """Evaluate the residue formula at (lambda, ell) inside the validity region."""
    plan = _plan(problem, chamber_point, order_seed)
    if plan.prefactor is None:
        return ZERO
    if check_region and not plan.chamber.in_region(lam, ell, [w.alpha for w in plan.weights]):
        raise OutsideValidityError(f"lambda = {tuple(lam)} is outside ell*c - box(alpha) for ell = {ell}")
    total = ZERO
    for term in plan.terms:
        lam_coords = [CyclotomicNumber.coerce(x) for x in la.mat_vec(term.to_forms, lam)]
        v = plan.term_value(term, ell, CyclotomicNumber.coerce(ell), lam_coords)
        total = total + v * eval_character(TorusPoint(term.vertex), lam)
    return total * plan.prefactor


def szenes_germ(problem: VerlindeProblem, chamber_point: Sequence, order_seed=None) -> QuasiPolynomial:
    """The quasi-polynomial germ of V on the chamber containing ``chamber_point``."""
    r = problem.ctx.rank
    names = variable_names(r)
    if r == 0:
        pre = zero_weight_factor(problem.weights)
        const = Poly.constant(names, pre if pre is not None else ZERO)
        return QuasiPolynomial(0, 1, lambda lr, er: const)
    plan = _plan(problem, chamber_point, order_seed)
    key = (problem.ctx.key, problem.weights, plan.chamber.key, order_seed)
    hit = _GERMS.get(key)
    if hit is not None:
        return hit
    if plan.prefactor is None:
        zero = Poly(names)
        germ = QuasiPolynomial(r, 1, lambda lr, er: zero)
        _GERMS[key] = germ
        return germ
    ell_var = Poly.var(names, "ell")
    term_cache: dict = {}

    def term_poly(i: int, ell_res: int) -> Poly:
        term = plan.terms[i]
        k = (i, ell_res % term.period)
        if k not in term_cache:
            lam_coords = _symbolic_lambda_coords(term, names)
            v = plan.term_value(term, k[1], ell_var, lam_coords)
            term_cache[k] = v if isinstance(v, Poly) else Poly.constant(names, v)
        return term_cache[k]

    by_vertex: dict = {}
    for i, term in enumerate(plan.terms):
        by_vertex.setdefault(term.vertex, []).append(i)
    vertex_cache: dict = {}

    def vertex_poly(vertex: tuple, ell_res: int) -> Poly:
        # the t_p^lambda phase is shared by all nbc terms of a vertex
        k = (vertex, ell_res % plan.modulus)
        if k not in vertex_cache:
            total = Poly(names)
            for i in by_vertex[vertex]:
                total = total + term_poly(i, ell_res)
            vertex_cache[k] = total * plan.prefactor
        return vertex_cache[k]

    def class_poly(lam_res: tuple, ell_res: int) -> Poly:
        total = Poly(names)
        for vertex in by_vertex:
            ph = eval_character(TorusPoint(vertex), lam_res)
            total = total + vertex_poly(vertex, ell_res) * ph
        return total

    germ = QuasiPolynomial(r, plan.modulus, class_poly, components=(tuple(by_vertex), vertex_poly))
    _GERMS[key] = germ
    return germ


# ------------------------------------------------ classical limit and Todd


def classical_limit(germ: QuasiPolynomial, degree: int) -> list[Poly]:
    """Distinct top-degree parts lim ell^-n Ver(ell lambda, ell), one per residue class, at ell = 1."""
    names = germ.names
    lam_names = names[:-1]
    out: list = []
    for _, _, p in germ.classes():
        top = p.homogeneous_part(degree)
        lim = top.substitute({n: Poly.var(lam_names, n) for n in lam_names} | {"ell": Poly.constant(lam_names, 1)}, lam_names)
        if not any((lim - q).is_zero() for q in out):
            out.append(lim)
    return out


def todd_series(order: int) -> list[Fraction]:
    """Coefficients of x/(1 - e^{-x})."""
    b = bernoulli_numbers(order)
    return [Fraction((-1) ** j) * b[j] / factorial(j) for j in range(order + 1)]


def apply_todd(poly: Poly, alphas: Sequence[Sequence[int]], names: Sequence[str]) -> dict:
    """prod_alpha Td(alpha(d)/ell) applied to a polynomial in lambda.

    Returns {k: Poly} meaning sum_k ell^-k * Poly_k.
    """
    deg = poly.degree()
    td = todd_series(max(deg, 0))
    current = {0: poly}
    for a in alphas:
        nxt: dict = {}
        for k, p in current.items():
            d = p
            for j in range(deg + 1):
                if d.is_zero():
                    break
                if td[j]:
                    nxt[k + j] = nxt.get(k + j, Poly(names)) + d * td[j]
                d = _directional_derivative(d, a, names)
        current = nxt
    return current


def _directional_derivative(p: Poly, a: Sequence[int], names: Sequence[str]) -> Poly:
    out = Poly(names)
    for i, ai in enumerate(a):
        if not ai:
            continue
        terms = {}
        for e, c in p.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                terms[tuple(e2)] = c * e[i] * ai
        out = out + Poly(names, terms)
    return out


@dataclass
class ToddReport:
    ok: bool
    bernoulli: Poly
    reconstructed: Poly
    germ: Poly


def todd_relation_check(problem: VerlindeProblem, chamber_point: Sequence) -> ToddReport:
    """ell^-n Ver(lambda, ell) = (Td(d/ell) Ber)(lambda/ell) for a single vertex at 0."""
    germ = szenes_germ(problem, chamber_point)
    plan = _plan(problem, chamber_point)
    if len(plan.vertices) != 1 or any(plan.vertices[0].point):
        raise ValueError("the Todd relation check needs a single vertex at the origin")
    n = len(plan.weights)
    names = germ.names
    lam_names = names[:-1]
    polys = germ.distinct_polys()
    if len(polys) != 1:
        raise ValueError("germ is not a polynomial")
    ver = polys[0]
    (ber,) = classical_limit(germ, n)
    pieces = apply_todd(ber, [w.alpha for w in plan.weights], lam_names)
    # substitute lambda -> lambda/ell and multiply by ell^n: a term of lambda-degree d with
    # ell^-k becomes ell^(n - d - k)
    out = Poly(names)
    for k, p in pieces.items():
        for e, c in p.terms.items():
            d = sum(e)
            ex = tuple(e) + (n - d - k,)
            if n - d - k < 0:
                raise AssertionError("negative ell power")
            out = out + Poly(names, {ex: c})
    return ToddReport((out - ver).is_zero(), ber, out, ver)
