"""Generalized partition functions by polarization and exact dynamic programming."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .errors import NotPolarizingError
from .exactnum import ONE, ZERO, CyclotomicNumber, RootOfUnity
from .lattice import AugmentedWeight, Box, LatticeFunction, SupportCone, box_points


@dataclass(frozen=True)
class PolarizedData:
    polarized: tuple  # AugmentedWeights with <alpha, tau> > 0
    sign: int
    scalar: RootOfUnity
    shift: tuple  # sigma = -sum of the flipped alphas
    tau: tuple

    def factor(self) -> CyclotomicNumber:
        return self.scalar.to_cyclotomic() * self.sign


def _check_tau(weights: Sequence[AugmentedWeight], tau: Sequence) -> None:
    for w in weights:
        if la.dot(w.alpha, tau) == 0:
            raise NotPolarizingError(f"tau = {tuple(tau)} is orthogonal to the weight {w.alpha}")


def polarize(weights: Sequence[AugmentedWeight], tau: Sequence) -> PolarizedData:
    tau = tuple(Fraction(x) for x in tau)
    _check_tau(weights, tau)
    pol = []
    sign = 1
    scalar = RootOfUnity(Fraction(0))
    rank = len(tau)
    shift = (0,) * rank
    for w in weights:
        if la.dot(w.alpha, tau) > 0:
            pol.append(w)
        else:
            pol.append(w.flip())
            sign = -sign
            scalar = scalar * w.u.inverse()
            shift = la.vsub(shift, w.alpha)
    return PolarizedData(tuple(pol), sign, scalar, tuple(shift), tau)


class _PolarizedEvaluator:
    """Memoized DP for a polarized list: P_k(lam) = sum_j u_k^j P_{k-1}(lam - j alpha_k)."""

    def __init__(self, weights: Sequence[AugmentedWeight], tau: Sequence):
        self.tau = tuple(tau)
        self.weights = sorted(weights, key=lambda w: la.dot(w.alpha, self.tau), reverse=True)
        self.plain = all(w.u.is_one() for w in self.weights)
        self.heights = [la.dot(w.alpha, self.tau) for w in self.weights]
        self.powers = [w.u for w in self.weights]
        self._memo: dict = {}

    def __call__(self, lam: Sequence[int]):
        return self._eval(len(self.weights), tuple(lam))

    def _eval(self, k: int, lam: tuple):
        if k == 0:
            if any(lam):
                return 0 if self.plain else ZERO
            return 1 if self.plain else ONE
        key = (k, lam)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        h = la.dot(lam, self.tau)
        if h < 0:
            return 0 if self.plain else ZERO
        w = self.weights[k - 1]
        jmax = int(h // self.heights[k - 1])
        total = 0 if self.plain else ZERO
        cur = lam
        for j in range(jmax + 1):
            sub = self._eval(k - 1, cur)
            if sub:
                if self.plain:
                    total += sub
                else:
                    total = total + sub * (self.powers[k - 1] ** j).to_cyclotomic()
            cur = la.vsub(cur, w.alpha)
        self._memo[key] = total
        return total


_EVALUATORS: dict = {}


def _evaluator(weights: Sequence[AugmentedWeight], tau: Sequence) -> tuple[PolarizedData, _PolarizedEvaluator]:
    key = (tuple(weights), tuple(Fraction(x) for x in tau))
    hit = _EVALUATORS.get(key)
    if hit is None:
        data = polarize(weights, tau)
        hit = (data, _PolarizedEvaluator(data.polarized, data.tau))
        if len(_EVALUATORS) > 256:
            _EVALUATORS.clear()
        _EVALUATORS[key] = hit
    return hit


def partition_eval(weights: Sequence[AugmentedWeight], tau: Sequence, lam: Sequence[int]) -> CyclotomicNumber:
    """P(lam) = sum u^j over nonnegative solutions of sum j_k alpha_k = lam, after polarization."""
    weights = tuple(weights)
    if not weights:
        return ZERO if any(lam) else ONE
    data, ev = _evaluator(weights, tau)
    v = ev(la.vsub(lam, data.shift))
    return CyclotomicNumber.coerce(v) * data.factor()


def support_cone(weights: Sequence[AugmentedWeight], tau: Sequence) -> SupportCone:
    rank = len(tau)
    if not weights:
        return SupportCone(((0,) * rank,), (), tuple(Fraction(x) for x in tau))
    data = polarize(weights, tau)
    gens = tuple(sorted({w.alpha for w in data.polarized}))
    return SupportCone((data.shift,), gens, data.tau)


def partition_function(weights: Sequence[AugmentedWeight], tau: Sequence) -> LatticeFunction:
    """The partition function as a windowed lattice function with its support cone."""
    weights = tuple(weights)
    rank = len(tau)
    if not weights:
        return LatticeFunction.delta([(0,) * rank], rank)
    cone = support_cone(weights, tau)
    return LatticeFunction.from_callable(rank, lambda lam: partition_eval(weights, tau, lam), cone=cone)


def partition_window(weights: Sequence[AugmentedWeight], tau: Sequence, box: Box) -> LatticeFunction:
    rank = len(tau)
    weights = tuple(weights)
    return LatticeFunction(rank, table={p: partition_eval(weights, tau, p) for p in box_points(box)})


# ------------------------------------------------------------------- Kostant


A2_POSITIVE_ROOTS = ((2, -1), (-1, 2), (1, 1))  # in fundamental-weight coordinates
A2_TAU = (Fraction(1), Fraction(1))


def kostant_a2(lam: Sequence[int]) -> int:
    """Kostant partition function of A2 at a weight given in fundamental-weight coordinates."""
    v = partition_eval([AugmentedWeight(a) for a in A2_POSITIVE_ROOTS], A2_TAU, lam)
    return int(v.to_rational())


def brute_force_partition(weights: Sequence[AugmentedWeight], lam: Sequence[int], bound: int) -> CyclotomicNumber:
    """Direct enumeration of j in [0, bound]^n; an independent check for small cases."""
    import itertools

    total = ZERO
    for js in itertools.product(range(bound + 1), repeat=len(weights)):
        s = (0,) * len(lam)
        u = RootOfUnity(Fraction(0))
        for j, w in zip(js, weights):
            s = la.vadd(s, la.vscale(j, w.alpha))
            u = u * (w.u ** j)
        if tuple(s) == tuple(lam):
            total = total + u.to_cyclotomic()
    return total
