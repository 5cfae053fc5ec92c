"""The decomposition of a Verlinde sum into germs convolved with partition functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .arrange import (
    AdmissibleSubspace,
    LinearSpan,
    Projection,
    admissible_spans,
    relevant_subspaces,
    span_complement_basis,
)
from .exactnum import ZERO, CyclotomicNumber, value_to_json
from .lattice import AugmentedWeight, LatticeContext, SupportCone, aw, box_points, cube
from .partition import kostant_a2, partition_eval
from .series import Poly
from .szenes import QuasiPolynomial, szenes_germ, variable_names
from .verlinde import VerlindeProblem, direct_verlinde, difference_data, quotient_problem


# ------------------------------------------------------------ germ functions


class GermFunction:
    """Quasi-polynomial germ of a weight list at a chamber point mu, supported on ell*Delta.

    Delta is the translate of span(weights) through mu. Off the lattice translates of the
    span the germ is identically zero.
    """

    def __init__(self, ctx: LatticeContext, weights: Sequence[AugmentedWeight], mu: Sequence,
                 override: QuasiPolynomial | None = None):
        self.ctx = ctx
        self.weights = tuple(weights)
        self.mu = tuple(Fraction(x) for x in mu)
        r = ctx.rank
        nz = [w.alpha for w in self.weights if any(w.alpha)]
        basis = [nz[i] for i in la.independent_subset([list(a) for a in nz])] if nz else []
        self.span = LinearSpan(tuple(range(len(self.weights))), tuple(tuple(Fraction(x) for x in b) for b in basis))
        self.zero = False
        self.xi = None
        # find xi in Xi^* with mu - xi in the span
        sub, comp = span_complement_basis(ctx, self.span)
        xd = ctx.xi_dual_basis
        cols = [la.mat_vec(xd, v) for v in list(sub) + list(comp)]
        coords = la.solve(la.transpose(cols), self.mu)
        tail = coords[len(sub):]
        if any(Fraction(c).denominator != 1 for c in tail):
            self.zero = True
            return
        xi = (0,) * r
        for c, v in zip(tail, cols[len(sub):]):
            xi = la.vadd(xi, la.vscale(int(c), v))
        self.xi = tuple(int(x) for x in xi)
        reduced, w = quotient_problem(VerlindeProblem(ctx, self.weights))
        self.reduced = reduced
        self.k = len(w)
        self.wmat = la.transpose([list(v) for v in w]) if w else []
        self.index_ratio = Fraction(ctx.index, reduced.ctx.index)
        self.y = la.solve(self.wmat, la.vsub(self.mu, self.xi)) if w else ()
        if override is not None:
            self.quotient_germ = override
        else:
            self.quotient_germ = szenes_germ(reduced, self.y)

    def multiplier(self, ell: int) -> Fraction:
        """#(T_ell cap T_Delta) = ell^(r-k) [Xi : Lambda] / [Xi' : Lambda']."""
        return self.index_ratio * ell ** (self.ctx.rank - self.k)

    def reduced_coordinates(self, lam: Sequence[int], ell: int):
        d = la.vsub(lam, la.vscale(ell, self.xi))
        if self.k == 0:
            return () if not any(d) else None
        c = la.solve(self.wmat, d)
        if c is None:
            return None
        return tuple(int(x) for x in c)

    def __call__(self, lam: Sequence[int], ell: int) -> CyclotomicNumber:
        if self.zero:
            return ZERO
        c = self.reduced_coordinates(lam, ell)
        if c is None:
            return ZERO
        return self.quotient_germ(c, ell) * self.multiplier(ell)


_GERM_FUNCTIONS: dict = {}


def germ_function(ctx: LatticeContext, weights: Sequence[AugmentedWeight], mu: Sequence) -> GermFunction:
    """Cached GermFunction, keyed by the chamber of mu when mu lies on a translate of the span."""
    weights = tuple(weights)
    key0 = (ctx.key, weights, tuple(Fraction(x) for x in mu))
    hit = _GERM_FUNCTIONS.get(key0)
    if hit is None:
        hit = GermFunction(ctx, weights, mu)
        _GERM_FUNCTIONS[key0] = hit
    return hit


# --------------------------------------------------------------- decomposition


@dataclass
class TermReport:
    delta: AdmissibleSubspace
    gamma_delta: tuple
    tau: tuple
    sigma: tuple
    pieces: list  # (lambda_2, germ value at lambda - lambda_2, partition value at lambda_2)
    contribution: CyclotomicNumber

    def to_json(self) -> dict:
        return {
            "span_members": list(self.delta.span.members),
            "dim": self.delta.dim,
            "translate": list(self.delta.translate),
            "gamma_delta": [str(x) for x in self.gamma_delta],
            "tau": [str(x) for x in self.tau],
            "sigma": list(self.sigma),
            "pieces": [
                {"lambda2": list(p), "germ": value_to_json(g), "partition": value_to_json(q)} for p, g, q in self.pieces
            ],
            "contribution": value_to_json(self.contribution),
        }


@dataclass
class DecompositionReport:
    gamma: tuple
    lam: tuple
    ell: int
    terms: list
    total: CyclotomicNumber
    oracle: CyclotomicNumber | None = None

    @property
    def match(self) -> bool | None:
        return None if self.oracle is None else self.total == self.oracle

    def to_json(self) -> dict:
        out = {
            "gamma": [str(x) for x in self.gamma],
            "lambda": list(self.lam),
            "ell": self.ell,
            "terms": [t.to_json() for t in self.terms],
            "total": value_to_json(self.total),
        }
        if self.oracle is not None:
            out["oracle"] = value_to_json(self.oracle)
            out["match"] = self.match
        return out


class _HeightPoints:
    """Cached lattice points of sigma + N(pol) by exact tau-height."""

    def __init__(self, apex: tuple, gens: tuple, tau: tuple):
        self.cone = SupportCone((apex,), gens, tau)
        self.apex = apex
        self.tau = tau
        self.reach = Fraction(-1)
        self.by_height: dict = {}

    def at(self, height: Fraction) -> list:
        rel = height - la.dot(self.apex, self.tau)
        if rel < 0:
            return []
        if rel > self.reach:
            self.reach = max(rel, 2 * self.reach)
            self.by_height = {}
            for p in self.cone.points_upto(self.reach):
                self.by_height.setdefault(la.dot(p, self.tau), []).append(p)
        return self.by_height.get(height, [])


class Decomposer:
    """Evaluates sum over Delta of (germ on Delta) * (partition function of the complement)."""

    def __init__(self, problem: VerlindeProblem, gamma: Sequence, top_override: QuasiPolynomial | None = None):
        self.problem = problem
        self.ctx = problem.ctx
        self.weights = problem.weights
        self.gamma = tuple(Fraction(x) for x in gamma)
        self.top_override = top_override
        self._germs: dict = {}
        self._cones: dict = {}
        self._spans = admissible_spans(self.weights, self.ctx.rank)

    def germ_for(self, proj: Projection) -> GermFunction:
        members = proj.delta.span.members
        sub = tuple(self.weights[i] for i in members)
        key = (members, proj.delta.translate, proj.gamma_delta)
        hit = self._germs.get(key)
        if hit is None:
            override = None
            if self.top_override is not None and proj.delta.dim == self.ctx.rank:
                override = self.top_override
            hit = GermFunction(self.ctx, sub, proj.gamma_delta, override=override)
            self._germs[key] = hit
        return hit

    def _points(self, proj: Projection) -> _HeightPoints:
        gens = []
        for i in proj.complement:
            a = self.weights[i].alpha
            gens.append(tuple(a) if la.dot(a, proj.tau) > 0 else tuple(-x for x in a))
        key = (proj.sigma, tuple(sorted(set(gens))), proj.tau)
        hit = self._cones.get(key)
        if hit is None:
            hit = _HeightPoints(proj.sigma, key[1], proj.tau)
            self._cones[key] = hit
        return hit

    def term(self, proj: Projection, lam: Sequence[int], ell: int) -> TermReport:
        lam = tuple(lam)
        delta = proj.delta
        comp = [self.weights[i] for i in proj.complement]
        germ = self.germ_for(proj)
        base = la.vsub(lam, la.vscale(ell, delta.translate))
        pieces = []
        total = ZERO
        if delta.dim == 0:
            cands = [tuple(base)]
        elif not comp:
            cands = [(0,) * self.ctx.rank]
        else:
            cands = self._points(proj).at(la.dot(base, proj.tau))
        for l2 in sorted(cands):
            rest = la.vsub(lam, l2)
            if not delta.span.contains(la.vsub(rest, la.vscale(ell, delta.translate))):
                continue
            pv = partition_eval(comp, proj.tau, l2) if comp else (CyclotomicNumber.one() if not any(l2) else ZERO)
            if pv.is_zero():
                continue
            gv = germ(rest, ell)
            if gv.is_zero():
                continue
            pieces.append((tuple(l2), gv, pv))
            total = total + gv * pv
        return TermReport(delta, proj.gamma_delta, proj.tau, proj.sigma, pieces, total)

    def evaluate(self, lam: Sequence[int], ell: int, with_oracle: bool = False, keep_zero: bool = False) -> DecompositionReport:
        lam = tuple(lam)
        projs = relevant_subspaces(self.ctx, self.weights, self.gamma, lam, ell)
        terms = []
        total = ZERO
        for proj in projs:
            t = self.term(proj, lam, ell)
            if keep_zero or not t.contribution.is_zero():
                terms.append(t)
            total = total + t.contribution
        oracle = direct_verlinde(self.problem, lam, ell) if with_oracle else None
        return DecompositionReport(self.gamma, lam, ell, terms, total, oracle)


def decomposition_eval(problem: VerlindeProblem, gamma: Sequence, lam: Sequence[int], ell: int,
                       with_oracle: bool = False) -> DecompositionReport:
    return _decomposer(problem, gamma).evaluate(lam, ell, with_oracle)


_DECOMPOSERS: dict = {}


def _decomposer(problem: VerlindeProblem, gamma: Sequence) -> Decomposer:
    key = (problem.ctx.key, problem.weights, tuple(Fraction(x) for x in gamma))
    hit = _DECOMPOSERS.get(key)
    if hit is None:
        hit = Decomposer(problem, gamma)
        _DECOMPOSERS[key] = hit
    return hit


# ----------------------------------------------------- germ difference check


@dataclass
class DifferenceCheckReport:
    ok: bool
    checked: int
    failures: list = field(default_factory=list)


def germ_difference_check(problem: VerlindeProblem, beta_index: int, mu: Sequence,
                          ells: Sequence[int] = (1, 2, 3, 4), radius: int = 4) -> DifferenceCheckReport:
    """Ver(list minus beta; mu) = nabla_beta Ver(list; mu) + e_t0 delta_pN pi^* Ver(list'; pi(mu)).

    All three germs come from the residue formula, compared exactly on a window.
    """
    ctx = problem.ctx
    data = difference_data(problem, beta_index)
    beta = data.beta
    full = germ_function(ctx, problem.weights, mu)
    rest = germ_function(ctx, data.remaining.weights, mu)
    proj_rows = [list(r) for r in data.projection]
    if proj_rows:
        mu_proj = la.mat_vec(proj_rows, mu)
        sub = germ_function(data.projected.ctx, data.projected.weights, mu_proj)
    else:
        sub = None
    v = beta.u.to_cyclotomic()
    failures = []
    count = 0
    from .lattice import eval_character

    for ell in ells:
        for lam in box_points(cube(ctx.rank, radius)):
            lhs = rest(lam, ell)
            rhs = full(lam, ell) - v * full(la.vsub(lam, beta.alpha), ell)
            if ell % data.period == 0:
                if sub is not None:
                    pl = tuple(int(x) for x in la.mat_vec(proj_rows, lam))
                    sv = sub(pl, ell)
                else:
                    sv = _rank0_germ(data.projected, ell)
                rhs = rhs + eval_character(data.t0, lam) * sv
            count += 1
            if lhs != rhs:
                failures.append((lam, ell, lhs, rhs))
    return DifferenceCheckReport(not failures, count, failures)


def _rank0_germ(problem: VerlindeProblem, ell: int) -> CyclotomicNumber:
    """On a rank-0 torus the Verlinde sum is the zero-weight product."""
    out = CyclotomicNumber.one()
    for w in problem.weights:
        if w.u.is_one():
            return ZERO
        out = out / (1 - w.u.to_cyclotomic())
    return out


# ---------------------------------------------------------------------- SU(3)


SU3_WEIGHTS = (aw((-2, 1)), aw((1, -2)), aw((-1, -1)))  # the negative roots
SU3_GAMMA = (Fraction(1, 7), Fraction(3, 7))
SU3_RHO = (1, 1)


def su3_problem() -> VerlindeProblem:
    return VerlindeProblem(LatticeContext.su3(), SU3_WEIGHTS)


def su3_expected_germ_poly() -> Poly:
    """-(1/2)(mu1 - 1)(mu2 - ell - 1)(mu1 + mu2 - ell - 2) on the root lattice."""
    names = variable_names(2)
    m1, m2, l = (Poly.var(names, n) for n in names)
    return (m1 - 1) * (m2 - l - 1) * (m1 + m2 - l - 2) * Fraction(-1, 2)


def in_root_lattice(lam: Sequence[int]) -> bool:
    return (lam[0] - lam[1]) % 3 == 0


def su3_line_term_formula(lam: Sequence[int], ell: int) -> Fraction:
    """Closed form of the term of the line through 0 along alpha_1, with H(0) = 1."""
    m1, m2 = lam
    if not in_root_lattice(lam):
        return Fraction(0)
    h = Fraction(-(m1 + 2 * m2), 3)
    if h < 0:
        return Fraction(0)
    return Fraction(ell * (3 - m1 - 2 * m2) * (m1 - ell - 1), 2)


# Weyl group of A2 acting on covectors in fundamental-weight coordinates
_S1 = ((-1, 0), (1, 1))
_S2 = ((1, 1), (0, -1))


def _weyl_group() -> list[tuple[tuple, int]]:
    ident = ((1, 0), (0, 1))
    out = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for s in (_S1, _S2):
                h = tuple(tuple(x) for x in la.mat_mul([list(r) for r in s], [list(r) for r in g]))
                if h not in out:
                    out[h] = out[g] + 1
                    nxt.append(h)
        frontier = nxt
    return sorted(out.items(), key=lambda kv: (kv[1], kv[0]))


WEYL_A2 = _weyl_group()


def shifted_weyl(w, lam: Sequence[int], ell: int) -> tuple:
    """w . lambda = w(lambda - tau) + tau with tau = ell varpi_2 + rho."""
    tau = (1, ell + 1)
    return tuple(int(x) for x in la.vadd(la.mat_vec([list(r) for r in w], la.vsub(lam, tau)), tau))


def su3_point_term_formula(xi: Sequence[int], lam: Sequence[int], ell: int, gamma=SU3_GAMMA) -> int:
    """(-1)^l(w) K(w^-1(ell xi - lambda + rho) - rho) for the point Delta = {xi}."""
    ctx = LatticeContext.su3()
    tau = ctx.to_t(la.vsub(xi, gamma))
    for w, length in WEYL_A2:
        if all(la.dot(la.mat_vec([list(r) for r in w], a.alpha), tau) > 0 for a in SU3_WEIGHTS):
            winv = la.inverse([list(r) for r in w])
            arg = la.vadd(la.vscale(ell, xi), la.vsub(SU3_RHO, lam))
            arg = la.vsub(la.mat_vec(winv, arg), SU3_RHO)
            return (-1) ** length * kostant_a2(tuple(int(x) for x in arg))
    raise AssertionError("no Weyl chamber contains tau")


@dataclass
class SU3Row:
    lam: tuple
    ell: int
    germ: CyclotomicNumber
    dim1_total: CyclotomicNumber
    dim0_total: CyclotomicNumber
    total: CyclotomicNumber
    oracle: CyclotomicNumber

    @property
    def match(self) -> bool:
        return self.total == self.oracle


@dataclass
class SU3Report:
    ell: int
    radius: int
    germ_matches_formula: bool
    line_term_matches: bool
    point_terms_match: bool
    anti_invariant: bool
    rows: list

    @property
    def all_match(self) -> bool:
        return all(r.match for r in self.rows)

    @property
    def ok(self) -> bool:
        return (self.germ_matches_formula and self.line_term_matches and self.point_terms_match
                and self.anti_invariant and self.all_match)

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "window": self.radius,
            "germ_matches_formula": self.germ_matches_formula,
            "line_term_matches": self.line_term_matches,
            "point_terms_match": self.point_terms_match,
            "anti_invariant": self.anti_invariant,
            "all_match": self.all_match,
            "rows": [
                {
                    "mu1": r.lam[0],
                    "mu2": r.lam[1],
                    "ell": r.ell,
                    "germ": value_to_json(r.germ),
                    "dim1_total": value_to_json(r.dim1_total),
                    "dim0_total": value_to_json(r.dim0_total),
                    "total": value_to_json(r.total),
                    "oracle": value_to_json(r.oracle),
                    "match": r.match,
                }
                for r in self.rows
            ],
        }


def su3_germ_matches(germ: QuasiPolynomial) -> bool:
    expected = su3_expected_germ_poly()
    for lr, er, p in germ.classes():
        want = expected if in_root_lattice(lr) else Poly(expected.names)
        if not (p - want).is_zero():
            return False
    return True


def su3_anti_invariant(germ: QuasiPolynomial, ell: int, radius: int) -> bool:
    for lam in box_points(cube(2, radius)):
        base = germ(lam, ell)
        for w, length in WEYL_A2:
            if germ(shifted_weyl(w, lam, ell), ell) != base * (-1) ** length:
                return False
    return True


def su3_report(ell: int, radius: int, gamma: Sequence = SU3_GAMMA) -> SU3Report:
    problem = su3_problem()
    dec = _decomposer(problem, gamma)
    germ = szenes_germ(problem, gamma)
    line_ok = True
    point_ok = True
    rows = []
    for lam in box_points(cube(2, radius)):
        rep = dec.evaluate(lam, ell, with_oracle=True, keep_zero=True)
        dims = {0: ZERO, 1: ZERO, 2: ZERO}
        line_value = ZERO
        for t in rep.terms:
            dims[t.delta.dim] = dims[t.delta.dim] + t.contribution
            if t.delta.dim == 1 and t.delta.span.members == (0,) and not any(t.delta.translate):
                line_value = t.contribution
            if t.delta.dim == 0:
                want = su3_point_term_formula(t.delta.translate, lam, ell, gamma) * LatticeContext.su3().torus_count(ell)
                if t.contribution != want:
                    point_ok = False
        if line_value != su3_line_term_formula(lam, ell):
            line_ok = False
        rows.append(SU3Row(tuple(lam), ell, dims[2], dims[1], dims[0], rep.total, rep.oracle))
    return SU3Report(
        ell,
        radius,
        su3_germ_matches(germ),
        line_ok,
        point_ok,
        su3_anti_invariant(germ, ell, radius),
        rows,
    )
