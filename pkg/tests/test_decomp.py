import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vsums.decomp import (SU3_GAMMA, WEYL_A2, decomposition_eval, germ_difference_check, germ_function,
                          in_root_lattice, shifted_weyl, su3_line_term_formula, su3_problem, su3_report)
from vsums.errors import NonGenericChamberPointError, NonGenericGammaError, WallPointError
from vsums.lattice import LatticeContext, aw
from vsums.verlinde import VerlindeProblem, direct_verlinde

R1 = LatticeContext.standard(1)
R2 = LatticeContext.standard(2)
HALF = (Fraction(1, 2),)


def rank1(n, u=0):
    return VerlindeProblem(R1, tuple(aw(1, u) for _ in range(n)))


def compositions(n, m):
    if m < 0:
        return 0
    return 1 if n == 0 and m == 0 else (math.comb(m + n - 1, n - 1) if n else 0)


def ver2(lam, ell):
    return (Fraction(-1, 2) * lam**2 + Fraction(1, 2) * lam * ell - lam - Fraction(1, 12) * ell**2
            + Fraction(1, 2) * ell - Fraction(5, 12))


class TestRank1:
    def test_worked_decomposition(self):
        # Ver_2(7,3) plus the two positive-side partition terms
        expected = ver2(7, 3) + 3 * compositions(2, 4) + 3 * compositions(2, 1)
        rep = decomposition_eval(rank1(2), HALF, (7,), 3, with_oracle=True)
        assert rep.total == expected == rep.oracle
        assert rep.match

    def test_negative_side_reflects(self):
        rep = decomposition_eval(rank1(1), HALF, (-5,), 2)
        assert rep.total == direct_verlinde(rank1(1), (1,), 2) == direct_verlinde(rank1(1), (-5,), 2)

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("ell", [1, 2, 3, 5])
    def test_matches_oracle(self, n, ell):
        p = rank1(n)
        for lam in range(-12, 13):
            assert decomposition_eval(p, HALF, (lam,), ell).total == direct_verlinde(p, (lam,), ell)

    def test_empty_list(self):
        p = VerlindeProblem(R1, ())
        for ell in (1, 2, 4):
            assert decomposition_eval(p, HALF, (0,), ell).total == ell
            assert decomposition_eval(p, HALF, (1,), ell).total == (ell if ell == 1 else 0)

    def test_terms_reported(self):
        rep = decomposition_eval(rank1(2), HALF, (7,), 3)
        dims = sorted(t.delta.dim for t in rep.terms)
        assert dims == [0, 0, 1]
        data = rep.to_json()
        assert data["total"] == f"{rep.total.to_rational().numerator}/{rep.total.to_rational().denominator}"
        assert len(data["terms"]) == 3


class TestSU3:
    def test_germ_at_origin(self):
        p = su3_problem()
        g = germ_function(p.ctx, p.weights, SU3_GAMMA)
        assert g((0, 0), 3) == 10

    def test_line_term(self):
        assert su3_line_term_formula((1, -2), 2) == -12

    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_report(self, ell):
        rep = su3_report(ell, 4)
        assert rep.ok
        for row in rep.rows:
            assert row.total == direct_verlinde(su3_problem(), row.lam, ell)

    @pytest.mark.parametrize("gamma", [SU3_GAMMA, (Fraction(2, 5), Fraction(1, 5)), (Fraction(5, 7), Fraction(1, 11))])
    def test_gamma_independence(self, gamma):
        p = su3_problem()
        for lam in [(0, 0), (3, 0), (-4, 2), (5, -1), (-2, -2)]:
            assert decomposition_eval(p, gamma, lam, 2).total == direct_verlinde(p, lam, 2)

    def test_root_lattice(self):
        assert in_root_lattice((1, 1)) and in_root_lattice((2, -1)) and not in_root_lattice((1, 0))

    def test_weyl_group(self):
        assert len(WEYL_A2) == 6
        assert sorted(length for _, length in WEYL_A2) == [0, 1, 1, 2, 2, 3]
        # the shifted action fixes its centre ell*varpi_2 + rho
        for w, _ in WEYL_A2:
            assert shifted_weyl(w, (1, 3), 2) == (1, 3)

    def test_nongeneric_gamma(self):
        with pytest.raises((NonGenericGammaError, WallPointError)):
            decomposition_eval(su3_problem(), (Fraction(1, 2), Fraction(1, 2)), (0, 0), 1)


class TestGermFunction:
    def test_multiplier_full_rank(self):
        g = germ_function(R2, (aw((1, 0)), aw((0, 1))), (Fraction(1, 3), Fraction(1, 5)))
        assert g.multiplier(4) == 1

    def test_multiplier_line(self):
        g = germ_function(R2, (aw((1, 0)),), (Fraction(1, 3), Fraction(0)))
        assert g.multiplier(4) == 4

    def test_off_span_translate_is_zero(self):
        g = germ_function(R2, (aw((1, 0)),), (Fraction(1, 3), Fraction(1, 2)))
        assert g.zero
        assert g((0, 0), 2) == 0

    def test_line_germ_values(self):
        # one weight on a line in rank 2: ell * (rank-1 germ) on the line, zero off it
        g = germ_function(R2, (aw((1, 0)),), (Fraction(1, 3), Fraction(0)))
        for ell in (1, 2, 3):
            for a in range(-3, 4):
                assert g((a, 0), ell) == ell * (-a + Fraction(ell - 1, 2))
                assert g((a, 1), ell) == 0


class TestDifferenceEquation:
    @pytest.mark.parametrize("weights,mu", [
        ((aw((1, 0)), aw((0, 1)), aw((1, 1))), (Fraction(2, 7), Fraction(1, 7))),
        ((aw((1, 0)), aw((1, 0)), aw((0, 1))), (Fraction(3, 7), Fraction(2, 11))),
        ((aw((1, 0), "1/2"), aw((0, 1)), aw((1, -1))), (Fraction(3, 7), Fraction(1, 11))),
    ])
    @pytest.mark.parametrize("beta", [0, 1])
    def test_germ_level(self, weights, mu, beta):
        rep = germ_difference_check(VerlindeProblem(R2, weights), beta, mu, ells=(1, 2, 3), radius=2)
        assert rep.ok, rep.failures[:1]
        assert rep.checked == 3 * 25

    def test_rank1(self):
        rep = germ_difference_check(rank1(3), 0, (Fraction(1, 3),), radius=4)
        assert rep.ok


phases = st.sampled_from([0, Fraction(1, 2), Fraction(1, 3)])
vectors = st.tuples(st.integers(-2, 2), st.integers(-2, 2)).filter(any)


@settings(max_examples=12, deadline=None)
@given(st.lists(st.tuples(vectors, phases), min_size=1, max_size=3), st.integers(1, 3),
       st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
def test_master_identity(pairs, ell, lam):
    p = VerlindeProblem(R2, tuple(aw(a, u) for a, u in pairs))
    gamma = (Fraction(3, 13), Fraction(5, 17))
    try:
        total = decomposition_eval(p, gamma, lam, ell).total
    except (NonGenericGammaError, WallPointError, NonGenericChamberPointError):
        return
    assert total == direct_verlinde(p, lam, ell)
