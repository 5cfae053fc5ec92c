"""Admissible subspaces, chambers, the periodic hyperplane arrangement, nbc bases, zonotopes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from . import linalg as la
from .errors import (
    NonGenericChamberPointError,
    NonGenericGammaError,
    NotFullRankError,
    WallPointError,
)
from .lattice import AugmentedWeight, LatticeContext, _frac_mod1


# ----------------------------------------------------------- linear spans


@dataclass(frozen=True)
class LinearSpan:
    """A linear subspace of t* spanned by a sublist of weights."""

    members: tuple  # indices of all weights lying in the span
    basis: tuple  # independent covectors spanning it (rational)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence) -> bool:
        return la.in_span([list(b) for b in self.basis], v)


def admissible_spans(weights: Sequence[AugmentedWeight], rank: int | None = None) -> list[LinearSpan]:
    """All distinct spans of sublists, from {0} up to the span of the whole list."""
    alphas = [w.alpha for w in weights]
    if rank is None:
        rank = len(alphas[0]) if alphas else 0
    nonzero = [i for i, a in enumerate(alphas) if any(a)]
    seen: dict = {}
    # a span is determined by an independent subset; enumerate by size
    for size in range(0, rank + 1):
        for subset in itertools.combinations(nonzero, size):
            vecs = [list(alphas[i]) for i in subset]
            if la.rank(vecs) < size:
                continue
            members = tuple(i for i, a in enumerate(alphas) if la.in_span(vecs, a) if vecs or not any(a))
            if not vecs:
                members = tuple(i for i, a in enumerate(alphas) if not any(a))
            key = members
            if key in seen:
                continue
            # the span must equal the span of its members
            seen[key] = LinearSpan(members, tuple(tuple(Fraction(x) for x in v) for v in vecs))
    spans = sorted(seen.values(), key=lambda s: (s.dim, s.members))
    # two different independent subsets can give the same span; members identify it
    return spans


def span_complement_basis(ctx: LatticeContext, span: LinearSpan) -> tuple[list, list]:
    """Basis (in Xi^* coordinates) of Xi^* cap span and of a complement."""
    r = ctx.rank
    xd = ctx.xi_dual_basis  # columns
    if span.dim == 0:
        return [], [tuple(int(i == j) for j in range(r)) for i in range(r)]
    # d in Z^r with Xd d in span: annihilators of span applied to Xd d vanish
    ann = la.nullspace([list(b) for b in span.basis], r)
    if ann:
        rows = [[la.dot(a, [xd[i][j] for i in range(r)]) for j in range(r)] for a in ann]
        sub = la.integer_kernel(rows, r)
    else:
        sub = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    comp = la.complete_basis(sub, r) if sub else [tuple(int(i == j) for j in range(r)) for i in range(r)]
    return sub, comp


# --------------------------------------------------------------- chambers


@dataclass(frozen=True)
class Wall:
    normal: tuple  # primitive integer vector in t
    step: int  # <Xi^*, normal> = step * Z
    floor: int  # the chamber lies in step*floor < <x, normal> < step*(floor+1)

    def value(self, x: Sequence) -> Fraction:
        return la.dot(x, self.normal)


def wall_normals(ctx: LatticeContext, alphas: Sequence[Sequence[int]]) -> list[tuple[tuple, int]]:
    """Normals of hyperplanes spanned by r-1 independent weights, with their steps."""
    r = ctx.rank
    alphas = [tuple(a) for a in alphas if any(a)]
    normals: dict = {}
    for subset in itertools.combinations(sorted(set(alphas)), r - 1):
        if la.rank([list(a) for a in subset]) < r - 1:
            continue
        ker = la.integer_kernel([list(a) for a in subset], r) if subset else [
            tuple(int(i == j) for j in range(r)) for i in range(r)
        ]
        if len(ker) != 1:
            continue
        n = ker[0]
        first = next(x for x in n if x)
        if first < 0:
            n = tuple(-x for x in n)
        normals[n] = None
    out = []
    xd = ctx.xi_dual_basis
    for n in sorted(normals):
        g = 0
        for j in range(r):
            g = gcd(g, int(la.dot([xd[i][j] for i in range(r)], n)))
        out.append((n, g))
    return out


class Chamber:
    """The chamber of S(alpha) containing a given rational point of t*."""

    def __init__(self, ctx: LatticeContext, alphas: Sequence[Sequence[int]], point: Sequence):
        self.ctx = ctx
        self.alphas = tuple(tuple(a) for a in alphas if any(a))
        self.point = tuple(Fraction(x) for x in point)
        if la.rank([list(a) for a in self.alphas]) < ctx.rank:
            raise NotFullRankError("the weights do not span t*; chambers are taken in their span")
        walls = []
        for n, g in wall_normals(ctx, self.alphas):
            v = la.dot(self.point, n) / g
            if v.denominator == 1:
                raise WallPointError(f"point {self.point} lies on a wall with normal {n}")
            walls.append(Wall(n, g, math.floor(v)))
        self.walls = tuple(walls)

    @property
    def key(self) -> tuple:
        return tuple((w.normal, w.floor) for w in self.walls)

    def contains(self, x: Sequence) -> bool:
        for w in self.walls:
            v = la.dot(x, w.normal)
            if not (w.step * w.floor < v < w.step * (w.floor + 1)):
                return False
        return True

    def in_region(self, lam: Sequence[int], ell: int, alphas: Sequence[Sequence[int]] | None = None) -> bool:
        """Exact test of lam in ell*c - box(alpha) (open chamber, closed zonotope)."""
        alphas = [tuple(a) for a in (alphas if alphas is not None else self.alphas) if any(a)]
        n = len(alphas)
        # exact shortcuts: one wall whose slab misses the projected box rules lam out, and a
        # sampled box point strictly inside every slab rules it in
        pas = [[la.dot(a, w.normal) for a in alphas] for w in self.walls]
        for w, pa in zip(self.walls, pas):
            base = la.dot(lam, w.normal)
            lo_b = base + sum(x for x in pa if x < 0)
            hi_b = base + sum(x for x in pa if x > 0)
            if hi_b <= w.step * w.floor * ell or lo_b >= w.step * (w.floor + 1) * ell:
                return False
        for b in (Fraction(1, 2), Fraction(0), Fraction(1)):
            if all(w.step * w.floor * ell < la.dot(lam, w.normal) + b * sum(pa) < w.step * (w.floor + 1) * ell
                   for w, pa in zip(self.walls, pas)):
                return True
        # variables b_1..b_n in [0,1] and eps in [0,1]; maximize eps subject to
        # step*floor*ell + eps <= <lam + sum b alpha, normal> <= step*(floor+1)*ell - eps
        rows, rhs = [], []
        for w in self.walls:
            pa = [la.dot(a, w.normal) for a in alphas]
            base = la.dot(lam, w.normal)
            lo = w.step * w.floor * ell
            hi = w.step * (w.floor + 1) * ell
            rows.append([-x for x in pa] + [1])
            rhs.append(base - lo)
            rows.append(list(pa) + [1])
            rhs.append(hi - base)
        for i in range(n + 1):
            rows.append([int(i == j) for j in range(n + 1)])
            rhs.append(1)
        status, value, _ = la.lp_max([0] * n + [1], rows, rhs)
        return status == "optimal" and value > 0

    def __repr__(self) -> str:
        return f"Chamber(point={tuple(str(x) for x in self.point)})"


# ---------------------------------------------------- gamma and projections


@dataclass(frozen=True)
class AdmissibleSubspace:
    """Delta = xi + span, xi in Xi^* reduced modulo Xi^* cap span."""

    span: LinearSpan
    translate: tuple  # integer covector in Xi^*

    @property
    def dim(self) -> int:
        return self.span.dim

    def contains(self, x: Sequence) -> bool:
        return self.span.contains(la.vsub(x, self.translate))


@dataclass(frozen=True)
class Projection:
    delta: AdmissibleSubspace
    gamma_delta: tuple
    tau: tuple  # in t coordinates: pairs with covectors by the dot product
    sigma: tuple
    complement: tuple  # indices of weights not parallel to Delta


def orthogonal_projection(ctx: LatticeContext, span: LinearSpan, base: Sequence, x: Sequence) -> tuple:
    """Projection of x onto base + span for the dual inner product B^-1 on t*."""
    d = la.vsub(x, base)
    if span.dim == 0:
        return tuple(Fraction(v) for v in base)
    basis = [list(b) for b in span.basis]
    gram = [[ctx.pair_dual(a, b) for b in basis] for a in basis]
    rhs = [ctx.pair_dual(a, d) for a in basis]
    coef = la.solve(gram, rhs)
    out = list(Fraction(v) for v in base)
    for c, b in zip(coef, basis):
        out = [o + c * y for o, y in zip(out, b)]
    return tuple(out)


def project_gamma(
    ctx: LatticeContext,
    weights: Sequence[AugmentedWeight],
    delta: AdmissibleSubspace,
    gamma: Sequence,
    check_chamber: bool = True,
) -> Projection:
    gamma = tuple(Fraction(x) for x in gamma)
    gd = orthogonal_projection(ctx, delta.span, delta.translate, gamma)
    tau = ctx.to_t(la.vsub(gd, gamma))
    comp = tuple(i for i in range(len(weights)) if i not in delta.span.members)
    sigma = (0,) * ctx.rank
    for i in comp:
        p = la.dot(weights[i].alpha, tau)
        if p == 0:
            raise NonGenericGammaError(
                f"tau_Delta is not polarizing: <{weights[i].alpha}, tau> = 0 for Delta = {delta}"
            )
        if p < 0:
            sigma = la.vsub(sigma, weights[i].alpha)
    if check_chamber and delta.dim > 0:
        alphas = [weights[i].alpha for i in delta.span.members]
        if not _regular_in(ctx, delta, alphas, gd):
            raise NonGenericGammaError(f"gamma_Delta = {gd} is not regular in {delta}")
    return Projection(delta, gd, tau, tuple(sigma), comp)


_QUOTIENTS: dict = {}


def _quotient_chart(ctx: LatticeContext, alphas: tuple):
    from .verlinde import VerlindeProblem, quotient_problem

    key = (ctx.key, alphas)
    hit = _QUOTIENTS.get(key)
    if hit is None:
        reduced, w = quotient_problem(VerlindeProblem(ctx, tuple(AugmentedWeight(a) for a in alphas)))
        hit = (reduced, la.transpose([list(v) for v in w]))
        _QUOTIENTS[key] = hit
    return hit


def _regular_in(ctx: LatticeContext, delta: AdmissibleSubspace, alphas, point) -> bool:
    """Is point - xi off every wall of the parallel sublist, computed in the quotient chart."""
    nz = tuple(tuple(a) for a in alphas if any(a))
    if not nz:
        return True
    reduced, wmat = _quotient_chart(ctx, nz)
    y = la.solve(wmat, la.vsub(point, delta.translate))
    try:
        Chamber(reduced.ctx, [x.alpha for x in reduced.weights], y)
    except WallPointError:
        return False
    return True


# ---------------------------------------- the periodic hyperplane arrangement


@dataclass(frozen=True, order=True)
class Hyperplane:
    """{X : <alpha, X> = offset} with alpha primitive, first nonzero entry positive."""

    alpha: tuple
    offset: Fraction

    def to_json(self) -> dict:
        return {"alpha": list(self.alpha), "offset": str(self.offset)}


def canonical_hyperplane(alpha: Sequence[int], offset: Fraction) -> Hyperplane:
    alpha = tuple(alpha)
    first = next(a for a in alpha if a)
    if first < 0:
        return Hyperplane(tuple(-a for a in alpha), -Fraction(offset))
    return Hyperplane(alpha, Fraction(offset))


@dataclass(frozen=True)
class ArrangementVertex:
    point: tuple  # reduced modulo Z^r
    hyperplanes: tuple  # sorted: the ordering used for nbc

    def to_json(self, nbc=None) -> dict:
        out = {
            "vertex": [str(x) for x in self.point],
            "hyperplanes": [h.to_json() for h in self.hyperplanes],
        }
        if nbc is not None:
            out["nbc"] = [list(t) for t in nbc]
        return out


def hyperplanes_through(weights: Sequence[AugmentedWeight], p: Sequence) -> tuple:
    hs = set()
    for w in weights:
        s = la.dot(w.alpha, p)
        if (s - w.u.exponent).denominator == 1:
            hs.add(canonical_hyperplane(w.alpha, s))
    return tuple(sorted(hs))


def arrangement_vertices(ctx: LatticeContext, weights: Sequence[AugmentedWeight]) -> list[ArrangementVertex]:
    """One vertex per Z^r-orbit of the arrangement {alpha^-1(s) : e^{2 pi i s} = u}."""
    r = ctx.rank
    alphas = [w.alpha for w in weights if any(w.alpha)]
    if la.rank([list(a) for a in alphas]) < r:
        raise NotFullRankError("the weights do not span t*")
    for w in weights:
        if any(w.alpha):
            g = 0
            for a in w.alpha:
                g = gcd(g, a)
            if g != 1:
                raise ValueError("arrangement_vertices expects primitive weights")
    nz = [w for w in weights if any(w.alpha)]
    distinct = sorted({(w.alpha, w.u.exponent) for w in nz})
    points: set = set()
    for subset in itertools.combinations(distinct, r):
        a = [list(s[0]) for s in subset]
        if la.det(a) == 0:
            continue
        e = [s[1] for s in subset]
        ainv = la.inverse(a)
        # p = A^-1 (e + n), n ranging over Z^r / A Z^r
        u, d, v = la.smith_normal_form(a)
        uinv = la.integer_inverse(u)
        diag = [d[i][i] for i in range(r)]
        for ks in itertools.product(*(range(abs(x)) for x in diag)):
            n = la.mat_vec(uinv, ks)
            p = la.mat_vec(ainv, la.vadd(e, n))
            points.add(tuple(_frac_mod1(Fraction(x)) for x in p))
    out = []
    for p in sorted(points):
        hs = hyperplanes_through(nz, p)
        out.append(ArrangementVertex(p, hs))
    return out


def nbc_bases(vertex: ArrangementVertex, rank: int | None = None, order: Sequence[int] | None = None) -> list[tuple]:
    """Index tuples (increasing in the chosen order) forming the nbc basis at the vertex.

    ``order`` optionally permutes the hyperplane list: position k holds the index of the
    k-th smallest hyperplane.
    """
    hs = vertex.hyperplanes
    r = rank if rank is not None else len(vertex.point)
    order = list(order) if order is not None else list(range(len(hs)))
    pos = {h: i for i, h in enumerate(order)}
    out = []
    for tup in itertools.combinations(order, r):
        vecs = [list(hs[i].alpha) for i in tup]
        if la.rank(vecs) < r:
            continue
        ok = True
        for h in order:
            bigger = [list(hs[i].alpha) for i in tup if pos[i] > pos[h]]
            if la.rank(bigger + [list(hs[h].alpha)]) < len(bigger) + 1:
                ok = False
                break
        if ok:
            out.append(tuple(tup))
    return out


# ---------------------------------------------------------------- zonotopes


def xi_dual_multiple(ctx: LatticeContext, alpha: Sequence[int]) -> int:
    """Smallest m >= 1 with m * alpha in Xi^*."""
    coords = la.solve([list(r) for r in ctx.xi_dual_basis], alpha)
    return la.common_denominator(coords)


def zonotope_lattice_points(ctx: LatticeContext, nu: Sequence, basis_forms: Sequence[Sequence[int]]) -> tuple[list, int]:
    """mu in Xi^* with nu - mu in the open box spanned by basis_forms, and the box volume."""
    r = ctx.rank
    nu = tuple(Fraction(x) for x in nu)
    bt = la.transpose([list(b) for b in basis_forms])  # columns are the forms
    binv = la.inverse(bt)
    xd = [list(row) for row in ctx.xi_dual_basis]
    xdinv = la.inverse(xd)
    vol = abs(la.det(bt) / la.det(xd))
    # d-range: image of nu - box under Xi^* coordinates
    corners = []
    for ys in itertools.product((0, 1), repeat=r):
        corners.append(la.mat_vec(xdinv, la.vsub(nu, la.mat_vec(bt, ys))))
    ranges = []
    for j in range(r):
        lo = min(c[j] for c in corners)
        hi = max(c[j] for c in corners)
        ranges.append(range(math.floor(lo), math.ceil(hi) + 1))
    pts = []
    for d in itertools.product(*ranges):
        mu = la.mat_vec(xd, d)
        y = la.mat_vec(binv, la.vsub(nu, mu))
        if all(0 < c < 1 for c in y):
            pts.append(tuple(int(x) for x in mu))
        elif all(0 <= c <= 1 for c in y):
            raise NonGenericChamberPointError(
                f"chamber point {nu} puts mu = {tuple(mu)} on the zonotope boundary; perturb it"
            )
    if vol.denominator != 1 or len(pts) != vol:
        raise AssertionError(f"zonotope count {len(pts)} differs from volume {vol}")
    return sorted(pts), int(vol)


# ----------------------------------------------------------------- helpers


def random_chamber_point(ctx: LatticeContext, alphas, rng, denominator: int = 997) -> tuple:
    """A random rational point avoiding every wall (retrying on hits)."""
    for _ in range(1000):
        p = tuple(Fraction(rng.randint(-3 * denominator, 3 * denominator), denominator) for _ in range(ctx.rank))
        try:
            Chamber(ctx, alphas, p)
            return p
        except WallPointError:
            continue
    raise RuntimeError("could not find a generic point")


# ------------------------------------------------------ relevant subspaces


def _perp(ctx: LatticeContext, span: LinearSpan, x: Sequence) -> tuple:
    p = orthogonal_projection(ctx, span, (0,) * ctx.rank, x)
    return la.vsub(x, p)


def _dual_norm(ctx: LatticeContext, x: Sequence) -> float:
    return math.sqrt(max(float(ctx.pair_dual(x, x)), 0.0))


@dataclass(frozen=True)
class _TranslateChart:
    cvecs: tuple  # integer complement vectors in Xi^*
    cperp: tuple  # their normal parts
    gram_f: tuple  # float Gram matrix of the normal parts
    ginv_diag: tuple
    d0: tuple  # coordinates of gamma_perp
    gperp: tuple
    slack: float


_CHARTS: dict = {}


def _translate_chart(ctx: LatticeContext, weights: tuple, span: LinearSpan, gamma: tuple) -> _TranslateChart:
    key = (ctx.key, weights, span, gamma)
    hit = _CHARTS.get(key)
    if hit is not None:
        return hit
    sub, comp = span_complement_basis(ctx, span)
    xd = ctx.xi_dual_basis
    cvecs = tuple(tuple(int(x) for x in la.mat_vec(xd, c)) for c in comp)
    cperp = tuple(_perp(ctx, span, c) for c in cvecs)
    gram = [[ctx.pair_dual(a, b) for b in cperp] for a in cperp]
    gperp = _perp(ctx, span, gamma)
    d0 = la.solve(gram, [ctx.pair_dual(a, gperp) for a in cperp])
    ginv = la.inverse(gram)
    slack = sum(_dual_norm(ctx, w.alpha) for i, w in enumerate(weights) if i not in span.members)
    hit = _TranslateChart(
        cvecs,
        cperp,
        tuple(tuple(float(x) for x in row) for row in gram),
        tuple(float(ginv[i][i]) for i in range(len(gram))),
        tuple(float(x) for x in d0),
        gperp,
        slack,
    )
    _CHARTS[key] = hit
    return hit


def translate_candidates(
    ctx: LatticeContext,
    weights: Sequence[AugmentedWeight],
    span: LinearSpan,
    gamma: Sequence,
    lam: Sequence[int],
    ell: int,
) -> list[AdmissibleSubspace]:
    """All translates xi + span whose decomposition term can be nonzero at (lambda, ell).

    A term needs <lambda - sigma - ell xi, xi - gamma> >= 0 on the normal part, which puts
    xi_perp in the ball with diameter [gamma_perp, (lambda - sigma)_perp / ell]; we enumerate
    a slightly larger ball around gamma_perp, using |sigma| <= sum of |alpha|.
    """
    r = ctx.rank
    if span.dim == r:
        return [AdmissibleSubspace(span, (0,) * r)]
    gamma = tuple(Fraction(x) for x in gamma)
    ch = _translate_chart(ctx, tuple(weights), span, gamma)
    lperp = _perp(ctx, span, lam)
    radius = _dual_norm(ctx, la.vsub(la.vscale(Fraction(1, ell), lperp), ch.gperp)) + ch.slack / ell + 1e-6
    m = len(ch.cvecs)
    ranges = []
    for i in range(m):
        half = radius * math.sqrt(ch.ginv_diag[i])
        ranges.append(range(math.floor(ch.d0[i] - half) - 1, math.ceil(ch.d0[i] + half) + 2))
    out = []
    r2 = radius * radius
    for d in itertools.product(*ranges):
        e = [k - c for k, c in zip(d, ch.d0)]
        q = sum(e[i] * ch.gram_f[i][j] * e[j] for i in range(m) for j in range(m))
        if q <= r2:
            xi = (0,) * r
            for c, k in zip(ch.cvecs, d):
                xi = la.vadd(xi, la.vscale(k, c))
            out.append(AdmissibleSubspace(span, tuple(int(x) for x in xi)))
    return out


def term_support_contains(
    weights: Sequence[AugmentedWeight], proj: Projection, lam: Sequence[int], ell: int
) -> bool:
    """Exact test of lambda in sigma + ell Delta + R_{>=0}(complement, polarized)."""
    r = len(lam)
    delta = proj.delta
    target = la.vsub(la.vsub(lam, proj.sigma), la.vscale(ell, delta.translate))
    cols = [list(b) for b in delta.span.basis]
    signs = [False] * len(cols)
    for i in proj.complement:
        a = weights[i].alpha
        cols.append(list(a) if la.dot(a, proj.tau) > 0 else [-x for x in a])
        signs.append(True)
    if not cols:
        return not any(target)
    eqs = [[c[i] for c in cols] for i in range(r)]
    return la.lp_feasible(eqs, target, signs)


def relevant_subspaces(
    ctx: LatticeContext,
    weights: Sequence[AugmentedWeight],
    gamma: Sequence,
    lam: Sequence[int],
    ell: int,
) -> list[Projection]:
    """Projections for every Delta whose term's support cone contains lambda."""
    weights = tuple(weights)
    gamma = tuple(Fraction(x) for x in gamma)
    out = []
    for span in _spans(ctx, weights):
        for delta in translate_candidates(ctx, weights, span, gamma, lam, ell):
            proj = _project_cached(ctx, weights, delta, gamma)
            if term_support_contains(weights, proj, lam, ell):
                out.append(proj)
    return out


_SPANS: dict = {}
_PROJECTIONS: dict = {}


def _spans(ctx: LatticeContext, weights: tuple) -> list:
    key = (ctx.key, weights)
    if key not in _SPANS:
        _SPANS[key] = admissible_spans(weights, ctx.rank)
    return _SPANS[key]


def _project_cached(ctx: LatticeContext, weights: tuple, delta: AdmissibleSubspace, gamma: tuple) -> Projection:
    key = (ctx.key, weights, delta, gamma)
    hit = _PROJECTIONS.get(key)
    if hit is None:
        hit = project_gamma(ctx, weights, delta, gamma)
        _PROJECTIONS[key] = hit
    return hit
