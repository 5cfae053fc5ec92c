"""Lattice pairs, finite torus subgroups, characters and functions on the weight lattice.

Coordinates: the lattice is always Z^r inside t = Q^r, weights are integer
covectors and the pairing <lambda, X> is the plain dot product.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from . import linalg as la
from .errors import (
    ImproperConvolutionError,
    ImproperPushforwardError,
    InvalidContextError,
    NotPeriodicError,
)
from .exactnum import ONE, ZERO, CyclotomicNumber, RootOfUnity, parse_rational, rational_to_str

Point = tuple  # integer covector


def _frac_mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class TorusPoint:
    """An element exp(X) of T = t / Z^r, stored by its reduced coordinates."""

    coordinates: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "coordinates", tuple(_frac_mod1(Fraction(c)) for c in self.coordinates)
        )

    def __mul__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(la.vadd(self.coordinates, other.coordinates))

    def inverse(self) -> "TorusPoint":
        return TorusPoint(tuple(-c for c in self.coordinates))

    def is_identity(self) -> bool:
        return not any(self.coordinates)

    def __repr__(self) -> str:
        return "T(" + ", ".join(str(c) for c in self.coordinates) + ")"


@dataclass(frozen=True)
class AugmentedWeight:
    """A pair (alpha, u): an integer covector and a root of unity."""

    alpha: tuple
    u: RootOfUnity = field(default_factory=lambda: RootOfUnity(Fraction(0)))

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(int(a) for a in self.alpha))
        if not isinstance(self.u, RootOfUnity):
            object.__setattr__(self, "u", RootOfUnity(parse_rational(self.u)))

    @property
    def rank(self) -> int:
        return len(self.alpha)

    def flip(self) -> "AugmentedWeight":
        """(alpha, u) -> (-alpha, u^-1)."""
        return AugmentedWeight(tuple(-a for a in self.alpha), self.u.inverse())

    def conj(self) -> "AugmentedWeight":
        return AugmentedWeight(self.alpha, self.u.inverse())

    def is_zero(self) -> bool:
        return not any(self.alpha)

    def to_json(self) -> dict:
        return {"alpha": list(self.alpha), "u": rational_to_str(self.u.exponent)}

    @classmethod
    def from_json(cls, d: Mapping) -> "AugmentedWeight":
        return cls(tuple(d["alpha"]), RootOfUnity(parse_rational(d.get("u", "0"))))


def aw(alpha, u=0) -> AugmentedWeight:
    """Shorthand: ``aw((1, 0), "1/2")`` is the weight (1,0) with u = -1."""
    if isinstance(alpha, int):
        alpha = (alpha,)
    return AugmentedWeight(tuple(alpha), RootOfUnity(parse_rational(u)))


def eval_character(t: TorusPoint, lam: Sequence[int]) -> CyclotomicNumber:
    """t^lambda = e^(2 pi i <lambda, X>)."""
    e = _frac_mod1(sum((Fraction(a) * x for a, x in zip(lam, t.coordinates)), Fraction(0)))
    return CyclotomicNumber.root(e.numerator, e.denominator)


def character_exponent(t: TorusPoint, lam: Sequence[int]) -> Fraction:
    return _frac_mod1(sum((Fraction(a) * x for a, x in zip(lam, t.coordinates)), Fraction(0)))


class LatticeContext:
    """Lattices Z^r = Lambda inside Xi, with an integral inner product B on t."""

    def __init__(self, rank: int, xi_generators: Sequence[Sequence], inner_product: Sequence[Sequence]):
        if rank < 0:
            raise InvalidContextError("rank must be nonnegative")
        gens = [tuple(parse_rational(x) for x in g) for g in xi_generators]
        if any(len(g) != rank for g in gens):
            raise InvalidContextError("generator length does not match the rank")
        b = [[Fraction(x) for x in row] for row in inner_product]
        if any(x.denominator != 1 for row in b for x in row):
            raise InvalidContextError("inner product must have integer entries")
        b = [[int(x) for x in row] for row in b]
        if len(b) != rank or any(len(row) != rank for row in b):
            raise InvalidContextError("inner product has the wrong shape")
        if any(b[i][j] != b[j][i] for i in range(rank) for j in range(rank)):
            raise InvalidContextError("inner product is not symmetric")
        if any(la.det([row[:k] for row in b[:k]]) <= 0 for k in range(1, rank + 1)):
            raise InvalidContextError("inner product is not positive definite")
        unit = [tuple(Fraction(int(i == j)) for j in range(rank)) for i in range(rank)]
        basis = la.lattice_basis(gens + unit)
        if len(basis) != rank:
            raise InvalidContextError("Xi generators do not span t")
        # Z^r must already lie in the span of the given generators
        gen_basis = la.lattice_basis(gens)
        if len(gen_basis) != rank or any(
            not la.is_integral(la.solve(la.transpose([list(v) for v in gen_basis]), e)) for e in unit
        ):
            raise InvalidContextError("Z^r is not contained in the lattice generated by xi_generators")
        self.rank = rank
        self.xi_generators = tuple(gens)
        self.inner_product = tuple(tuple(row) for row in b)
        # columns: a Z-basis of Xi
        self.xi_basis = la.transpose([list(v) for v in gen_basis])
        self.index = int(1 / abs(la.det(self.xi_basis)))
        # columns: a Z-basis of the dual lattice Xi^* inside Z^r
        self.xi_dual_basis = [[int(x) for x in row] for row in la.transpose(la.inverse(self.xi_basis))]
        self._t_cache: dict[int, tuple[TorusPoint, ...]] = {}
        self._coset_cache: dict[int, tuple[Point, ...]] = {}

    # --- constructors
    @classmethod
    def standard(cls, rank: int = 1) -> "LatticeContext":
        return cls(rank, la.identity(rank), la.identity(rank))

    @classmethod
    def su3(cls) -> "LatticeContext":
        """Root lattice inside the weight lattice, covectors in the fundamental weight basis."""
        return cls(2, [["2/3", "1/3"], ["1/3", "2/3"]], [[2, -1], [-1, 2]])

    @classmethod
    def from_json(cls, data: Mapping) -> "LatticeContext":
        try:
            r = int(data["rank"])
            if r < 1:
                raise ValueError("rank must be at least 1")
            gens = data.get("xi_generators") or la.identity(r)
            ip = data.get("inner_product") or la.identity(r)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidContextError(f"malformed context: {exc}") from exc
        return cls(r, gens, ip)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "xi_generators": [[rational_to_str(x) for x in g] for g in self.xi_generators],
            "inner_product": [list(row) for row in self.inner_product],
        }

    def __repr__(self) -> str:
        return f"LatticeContext(rank={self.rank}, index={self.index})"

    @property
    def key(self) -> tuple:
        """Hashable content key, used by caches."""
        return (self.rank, self.xi_generators, self.inner_product)

    # --- inner products
    def pair_t(self, x: Sequence, y: Sequence) -> Fraction:
        """B(x, y) for x, y in t."""
        return la.dot(x, la.mat_vec([list(r) for r in self.inner_product], y))

    @property
    def inner_product_inverse(self) -> list:
        inv = self.__dict__.get("_binv")
        if inv is None:
            inv = la.inverse([list(r) for r in self.inner_product]) if self.rank else []
            self.__dict__["_binv"] = inv
        return inv

    def to_t(self, lam: Sequence) -> tuple:
        """Image of a covector under the isomorphism t^* -> t induced by B."""
        return la.mat_vec(self.inner_product_inverse, lam)

    def pair_dual(self, a: Sequence, b: Sequence) -> Fraction:
        """Inner product on t^* dual to B."""
        return la.dot(a, self.to_t(b))

    def in_xi_dual(self, lam: Sequence) -> bool:
        """lambda in Xi^* iff <lambda, xi> is an integer for the Xi basis."""
        return la.is_integral(la.mat_vec(la.transpose(self.xi_basis), lam))

    def xi_dual_coordinates(self, lam: Sequence) -> tuple:
        return la.solve(self.xi_dual_basis, lam)

    # --- finite groups
    def torus_count(self, ell: int) -> int:
        return ell**self.rank * self.index

    def enumerate_T_ell(self, ell: int) -> tuple[TorusPoint, ...]:
        """One representative for every element of (1/ell) Xi / Z^r."""
        if ell < 1:
            raise ValueError("ell must be positive")
        if ell in self._t_cache:
            return self._t_cache[ell]
        e = [[x / ell for x in row] for row in self.xi_basis]
        a = [[int(x) for x in row] for row in la.inverse(e)]
        u, d, _v = la.smith_normal_form(a)
        uinv = la.integer_inverse(u)
        diag = [d[i][i] for i in range(self.rank)]
        pts = []
        for y in itertools.product(*(range(k) for k in diag)):
            x = la.mat_vec(uinv, y)
            pts.append(TorusPoint(la.mat_vec(e, x)))
        pts.sort(key=lambda t: t.coordinates)
        out = tuple(pts)
        self._t_cache[ell] = out
        return out

    def coset_representatives(self, ell: int) -> tuple[Point, ...]:
        """Representatives of Z^r / ell Xi^*."""
        if ell in self._coset_cache:
            return self._coset_cache[ell]
        m = [[ell * x for x in row] for row in self.xi_dual_basis]
        u, d, _v = la.smith_normal_form(m)
        uinv = la.integer_inverse(u)
        diag = [d[i][i] for i in range(self.rank)]
        reps = [tuple(int(c) for c in la.mat_vec(uinv, y)) for y in itertools.product(*(range(k) for k in diag))]
        reps.sort()
        out = tuple(reps)
        self._coset_cache[ell] = out
        return out

    def period_generators(self, ell: int) -> list[Point]:
        return [tuple(ell * self.xi_dual_basis[i][j] for i in range(self.rank)) for j in range(self.rank)]


def enumerate_T_ell(ctx: LatticeContext, ell: int) -> tuple[TorusPoint, ...]:
    return ctx.enumerate_T_ell(ell)


# ----------------------------------------------------------------- functions


Box = tuple  # ((lo_1, hi_1), ..., (lo_r, hi_r)), inclusive


def box_points(box: Box) -> Iterator[Point]:
    return itertools.product(*(range(lo, hi + 1) for lo, hi in box))


def cube(rank: int, radius: int, center: Sequence[int] | None = None) -> Box:
    c = center or (0,) * rank
    return tuple((c[i] - radius, c[i] + radius) for i in range(rank))


@dataclass(frozen=True)
class SupportCone:
    """Support contained in the union of apex + Z_{>=0}-span(generators).

    Every generator pairs strictly positively with ``tau`` so the cone is pointed.
    """

    apexes: tuple
    generators: tuple
    tau: tuple

    def __post_init__(self):
        for g in self.generators:
            if la.dot(g, self.tau) <= 0:
                raise ValueError("cone generator does not pair positively with tau")

    def bound(self, lam: Sequence) -> Fraction:
        return max((la.dot(lam, self.tau) - la.dot(a, self.tau) for a in self.apexes), default=Fraction(-1))

    def points_upto(self, height: Fraction) -> set:
        """Lattice points apex + sum j_k g_k with <sum j_k g_k, tau> <= height."""
        out: set = set()
        for a in self.apexes:
            h = height
            frontier = {tuple(a): Fraction(0)}
            reached = dict(frontier)
            for g in self.generators:
                step = la.dot(g, self.tau)
                new = dict(reached)
                for p, used in reached.items():
                    q, u2 = p, used
                    while True:
                        q, u2 = la.vadd(q, g), u2 + step
                        if u2 > h:
                            break
                        if q not in new or new[q] > u2:
                            new[q] = u2
                reached = new
            out.update(reached)
        return out

    def translate(self, mu: Sequence) -> "SupportCone":
        return SupportCone(tuple(la.vadd(a, mu) for a in self.apexes), self.generators, self.tau)


class LatticeFunction:
    """A function on Z^r with values in a cyclotomic field.

    Either finitely supported (explicit table), or windowed: given by a pure
    evaluator, memoized, optionally with a known pointed support cone.
    """

    def __init__(
        self,
        rank: int,
        table: Mapping | None = None,
        evaluator: Callable[[Point], CyclotomicNumber] | None = None,
        cone: SupportCone | None = None,
    ):
        self.rank = rank
        if table is not None:
            self.kind = "finite"
            self._table = {tuple(k): CyclotomicNumber.coerce(v) for k, v in table.items()}
            self._table = {k: v for k, v in self._table.items() if not v.is_zero()}
            self._eval = None
        else:
            if evaluator is None:
                raise ValueError("need a table or an evaluator")
            self.kind = "windowed"
            self._table = None
            self._eval = evaluator
        self.cone = cone
        self._cache: dict = {}
        self._box_cache: dict = {}

    # --- constructors
    @classmethod
    def zero(cls, rank: int) -> "LatticeFunction":
        return cls(rank, table={})

    @classmethod
    def delta(cls, points: Iterable[Point] | Point, rank: int | None = None) -> "LatticeFunction":
        pts = list(points)
        if pts and isinstance(pts[0], int):
            pts = [tuple(pts)]
        r = rank if rank is not None else len(pts[0])
        return cls(r, table={tuple(p): ONE for p in pts})

    @classmethod
    def character(cls, t: TorusPoint) -> "LatticeFunction":
        """The function e_t(lambda) = t^lambda."""
        return cls(len(t.coordinates), evaluator=lambda lam: eval_character(t, lam))

    @classmethod
    def from_callable(cls, rank: int, fn: Callable, cone: SupportCone | None = None) -> "LatticeFunction":
        return cls(rank, evaluator=fn, cone=cone)

    # --- evaluation
    def __call__(self, lam: Sequence[int]) -> CyclotomicNumber:
        lam = tuple(lam)
        if self._table is not None:
            return self._table.get(lam, ZERO)
        if self.cone is not None and self.cone.bound(lam) < 0:
            return ZERO
        v = self._cache.get(lam)
        if v is None:
            v = CyclotomicNumber.coerce(self._eval(lam))
            self._cache[lam] = v
        return v

    def window(self, box: Box) -> "LatticeFunction":
        key = tuple(box)
        if key in self._box_cache:
            return self._box_cache[key]
        out = LatticeFunction(self.rank, table={p: self(p) for p in box_points(box)})
        self._box_cache[key] = out
        return out

    def items(self):
        if self._table is None:
            raise TypeError("a windowed function has no finite support table")
        return sorted(self._table.items())

    def support(self) -> list[Point]:
        return [p for p, _ in self.items()]

    def is_finite(self) -> bool:
        return self._table is not None

    def agrees_on(self, other: "LatticeFunction", box: Box) -> bool:
        return all(self(p) == other(p) for p in box_points(box))

    # --- pointwise algebra
    def _combine(self, other: "LatticeFunction", op) -> "LatticeFunction":
        if self.is_finite() and other.is_finite():
            keys = set(self._table) | set(other._table)
            return LatticeFunction(self.rank, table={k: op(self(k), other(k)) for k in keys})
        cone = None
        if self.cone and other.cone and self.cone.tau == other.cone.tau and self.cone.generators == other.cone.generators:
            cone = SupportCone(self.cone.apexes + other.cone.apexes, self.cone.generators, self.cone.tau)
        return LatticeFunction(self.rank, evaluator=lambda lam: op(self(lam), other(lam)), cone=cone)

    def __add__(self, other: "LatticeFunction") -> "LatticeFunction":
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: "LatticeFunction") -> "LatticeFunction":
        return self._combine(other, lambda a, b: a - b)

    def scale(self, c) -> "LatticeFunction":
        c = CyclotomicNumber.coerce(c)
        if self.is_finite():
            return LatticeFunction(self.rank, table={k: c * v for k, v in self._table.items()})
        return LatticeFunction(self.rank, evaluator=lambda lam: c * self(lam), cone=self.cone)

    def __neg__(self) -> "LatticeFunction":
        return self.scale(-1)

    def translate(self, mu: Sequence[int]) -> "LatticeFunction":
        """(delta_mu * f)(lambda) = f(lambda - mu)."""
        mu = tuple(mu)
        if self.is_finite():
            return LatticeFunction(self.rank, table={la.vadd(k, mu): v for k, v in self._table.items()})
        cone = self.cone.translate(mu) if self.cone else None
        return LatticeFunction(self.rank, evaluator=lambda lam: self(la.vsub(lam, mu)), cone=cone)

    def times_character(self, t: TorusPoint) -> "LatticeFunction":
        """e_t f."""
        if self.is_finite():
            return LatticeFunction(self.rank, table={k: eval_character(t, k) * v for k, v in self._table.items()})
        return LatticeFunction(self.rank, evaluator=lambda lam: eval_character(t, lam) * self(lam), cone=self.cone)

    def conj(self) -> "LatticeFunction":
        if self.is_finite():
            return LatticeFunction(self.rank, table={k: v.conj() for k, v in self._table.items()})
        return LatticeFunction(self.rank, evaluator=lambda lam: self(lam).conj(), cone=self.cone)

    def __repr__(self) -> str:
        if self.is_finite():
            return f"LatticeFunction(finite, {len(self._table)} points)"
        return "LatticeFunction(windowed)"


def convolve(f: LatticeFunction, g: LatticeFunction) -> LatticeFunction:
    """(f * g)(lambda) = sum over lambda_1 + lambda_2 = lambda of f(lambda_1) g(lambda_2)."""
    if f.is_finite() and g.is_finite():
        out: dict = {}
        for p, a in f.items():
            for q, b in g.items():
                k = la.vadd(p, q)
                out[k] = out.get(k, ZERO) + a * b
        return LatticeFunction(f.rank, table=out)
    if g.is_finite():
        f, g = g, f
    if f.is_finite():
        fin = f.items()
        cone = g.cone
        if cone is not None:
            cone = SupportCone(
                tuple(la.vadd(a, p) for a in cone.apexes for p, _ in fin) or cone.apexes,
                cone.generators,
                cone.tau,
            )
        return LatticeFunction(
            f.rank,
            evaluator=lambda lam: sum((a * g(la.vsub(lam, p)) for p, a in fin), ZERO),
            cone=cone,
        )
    cf, cg = f.cone, g.cone
    if cf is None or cg is None:
        raise ImproperConvolutionError("both factors are infinite and no support cone is known")
    tau = cf.tau
    if any(la.dot(h, tau) <= 0 for h in cg.generators):
        raise ImproperConvolutionError("support cones are not compatibly polarized")
    merged = SupportCone(
        tuple(la.vadd(a, b) for a in cf.apexes for b in cg.apexes),
        tuple(dict.fromkeys(cf.generators + cg.generators)),
        tau,
    )
    gmin = min(la.dot(b, tau) for b in cg.apexes)

    def value(lam):
        height = la.dot(lam, tau) - gmin - min(la.dot(a, tau) for a in cf.apexes)
        total = ZERO
        if height < 0:
            return total
        for p in cf.points_upto(height):
            fp = f(p)
            if fp:
                total = total + fp * g(la.vsub(lam, p))
        return total

    return LatticeFunction(f.rank, evaluator=value, cone=merged)


def finite_difference(beta: AugmentedWeight, f: LatticeFunction) -> LatticeFunction:
    """(nabla_beta f)(lambda) = f(lambda) - v f(lambda - beta)."""
    v = beta.u.to_cyclotomic()
    b = beta.alpha
    if f.is_finite():
        out: dict = {}
        for p, a in f.items():
            out[p] = out.get(p, ZERO) + a
            q = la.vadd(p, b)
            out[q] = out.get(q, ZERO) - v * a
        return LatticeFunction(f.rank, table=out)
    cone = None
    if f.cone is not None:
        c = f.cone
        if la.dot(b, c.tau) > 0:
            cone = SupportCone(c.apexes, tuple(dict.fromkeys(c.generators + (tuple(b),))), c.tau)
        else:
            cone = SupportCone(c.apexes + tuple(la.vadd(a, b) for a in c.apexes), c.generators, c.tau)
    return LatticeFunction(f.rank, evaluator=lambda lam: f(lam) - v * f(la.vsub(lam, b)), cone=cone)


def map_lattice(
    phi: Sequence[Sequence[int]],
    f: LatticeFunction,
    direction: str,
    tau_target: Sequence | None = None,
) -> LatticeFunction:
    """Pull back or push forward along the integer matrix phi (source -> target).

    phi has shape (target rank) x (source rank).  For pullback f lives on the
    target; for pushforward f lives on the source.
    """
    phi = [list(row) for row in phi]
    m = len(phi)
    n = len(phi[0]) if m else 0
    if direction == "pullback":
        return LatticeFunction(n, evaluator=lambda lam: f(la.mat_vec(phi, lam)))
    if direction != "pushforward":
        raise ValueError("direction must be 'pullback' or 'pushforward'")
    if f.is_finite():
        out: dict = {}
        for p, a in f.items():
            k = la.mat_vec(phi, p)
            out[k] = out.get(k, ZERO) + a
        return LatticeFunction(m, table=out)
    c = f.cone
    if c is None or tau_target is None:
        raise ImproperPushforwardError("pushforward of an infinite function needs a support cone and tau_target")
    images = [la.mat_vec(phi, g) for g in c.generators]
    if any(la.dot(img, tau_target) <= 0 for img in images):
        raise ImproperPushforwardError("phi is not proper on the support cone")
    pulled = tuple(la.mat_vec(la.transpose(phi), tau_target))

    def value(lam):
        seen = set()
        total = ZERO
        for a in c.apexes:
            height = la.dot(lam, tau_target) - la.dot(la.mat_vec(phi, a), tau_target)
            if height < 0:
                continue
            for p in SupportCone((a,), c.generators, pulled).points_upto(height):
                if p not in seen and la.mat_vec(phi, p) == tuple(lam):
                    seen.add(p)
                    total = total + f(p)
        return total

    return LatticeFunction(m, evaluator=value)


def finite_fourier(ctx: LatticeContext, f: LatticeFunction, ell: int) -> dict[TorusPoint, CyclotomicNumber]:
    """Coefficients f^(t), t in T_ell, with f(lambda) = sum_t f^(t) t^lambda."""
    reps = ctx.coset_representatives(ell)
    for p in reps:
        for g in ctx.period_generators(ell):
            if f(la.vadd(p, g)) != f(p):
                raise NotPeriodicError(f"value at {la.vadd(p, g)} differs from value at {p}")
    n = len(reps)
    out = {}
    for t in ctx.enumerate_T_ell(ell):
        s = ZERO
        for p in reps:
            s = s + f(p) * eval_character(t, tuple(-x for x in p))
        out[t] = s / n
    return out


def fourier_synthesis(coeffs: Mapping[TorusPoint, CyclotomicNumber], rank: int) -> LatticeFunction:
    items = [(t, c) for t, c in coeffs.items() if c]
    return LatticeFunction(rank, evaluator=lambda lam: sum((c * eval_character(t, lam) for t, c in items), ZERO))


def load_problem(text_or_path: str) -> tuple[LatticeContext, list[AugmentedWeight]]:
    """Read a context JSON (string or path) with its weight list."""
    try:
        data = json.loads(text_or_path)
    except json.JSONDecodeError:
        with open(text_or_path) as fh:
            data = json.load(fh)
    ctx = LatticeContext.from_json(data)
    try:
        weights = [AugmentedWeight.from_json(w) for w in data.get("weights", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidContextError(f"malformed weight: {exc}") from exc
    if any(w.rank != ctx.rank for w in weights):
        raise InvalidContextError("weight length does not match the rank")
    return ctx, weights
