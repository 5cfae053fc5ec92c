from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from vsums.errors import NotInvertibleError, PrecisionError
from vsums.exactnum import ONE, CyclotomicNumber
from vsums.series import (
    FlagSeries,
    Poly,
    TruncatedSeries,
    bernoulli_numbers,
    constant_term,
    expand_exp,
    iterated_CT,
    kernel_coefficients,
    one_minus_exp_inverse,
)

NAMES = ("lam", "ell")
LAM = Poly.var(NAMES, "lam")
ELL = Poly.var(NAMES, "ell")


def exp_minus(order):
    """(1 - e^{-z}) as a one-variable series."""
    coeffs = [Fraction(0)] + [Fraction(-((-1) ** k), factorial(k)) for k in range(1, order + 1)]
    return TruncatedSeries.univariate(1, 0, coeffs, (order,))


class TestPoly:
    def test_arithmetic(self):
        p = (LAM + 1) * (LAM - 1)
        assert p == LAM**2 - 1
        assert p.degree() == 2 and p.degree("ell") == 0

    def test_evaluate_and_substitute(self):
        p = LAM**2 * ELL - 3
        assert p.evaluate({"lam": 2, "ell": 5}) == 17
        q = p.substitute({"lam": ELL * LAM, "ell": ELL}, NAMES)
        assert q == LAM**2 * ELL**3 - 3

    def test_json(self):
        assert (LAM * Fraction(-1, 2) + 3).to_json() == [
            {"monomial": {}, "coeff": "3/1"},
            {"monomial": {"lam": 1}, "coeff": "-1/2"},
        ]

    def test_mismatched_names(self):
        with pytest.raises(ValueError):
            LAM + Poly.var(("x",), "x")


class TestSeriesOps:
    def test_one_minus_exp_inverse(self):
        inv = exp_minus(6).inverse()
        assert inv.coefficient((-1,)) == 1
        assert inv.coefficient((0,)) == Fraction(1, 2)
        assert inv.coefficient((1,)) == Fraction(1, 12)
        table = one_minus_exp_inverse(4)
        assert [inv.coefficient((k - 1,)) for k in range(5)] == table[:5]

    def test_multiplicative_identity(self):
        a = exp_minus(5)
        assert (a * TruncatedSeries.constant(1, ONE, (5,))).equals_to_order(a)

    def test_bernoulli_kernel_constant_term(self):
        k = kernel_coefficients(ONE, 4)
        assert k[0] == -1  # z/(1-e^z) -> -1 at z = 0
        assert bernoulli_numbers(4) == [1, Fraction(-1, 2), Fraction(1, 6), 0, Fraction(-1, 30)]

    def test_kernel_at_root_of_unity(self):
        c = CyclotomicNumber.root(1, 3)
        k = kernel_coefficients(c, 3)
        z = TruncatedSeries.univariate(1, 0, [0, 1], (4,))
        e = expand_exp(ONE, 0, 1, 4)
        denom = TruncatedSeries.constant(1, ONE, (4,)) - e.scale(c)
        lhs = z / denom
        assert all(lhs.coefficient((j,)) == k[j] for j in range(4))

    def test_not_invertible(self):
        s = TruncatedSeries(2, (0, 0), (3, 3), {(1, 0): 1, (0, 1): 1})
        with pytest.raises(NotInvertibleError):
            s.inverse()

    def test_precision_error(self):
        s = TruncatedSeries.univariate(1, 0, [1, 2], (1,))
        with pytest.raises(PrecisionError):
            s.coefficient((3,))
        with pytest.raises(PrecisionError):
            constant_term(s.shift((-3,)), 0)

    def test_derivative_has_no_residue(self):
        s = exp_minus(6).inverse() * expand_exp(Fraction(3), 0, 1, 6)
        ds = s.derivative(0)
        assert ds.coefficient((-1,)) == 0
        # the constant term of a derivative is the linear coefficient, not zero
        assert constant_term(ds, 0).terms[()] == s.coefficient((1,))

    def test_dump_format(self):
        s = TruncatedSeries(2, (-1, 0), (2, 2), {(0, 1): 2, (-1, 0): Fraction(1, 2)})
        assert s.dump() == "z1^-1 z2^0 : 1/2\nz1^0 z2^1 : 2"


class TestExpAndCT:
    def test_exp_of_zero(self):
        assert expand_exp(ONE * 0, 0, 1, 4).equals_to_order(TruncatedSeries.constant(1, ONE, (4,)))

    def test_exp_of_formal(self):
        s = expand_exp(LAM, 0, 1, 2)
        assert s.coefficient((0,)) == 1
        assert s.coefficient((1,)) == LAM
        assert s.coefficient((2,)) == LAM**2 * Fraction(1, 2)

    def test_exp_of_shifted_argument(self):
        mu = 1
        s = expand_exp(LAM - ELL * mu, 0, 1, 3)
        assert s.coefficient((3,)) == (LAM - ELL) ** 3 * Fraction(1, 6)

    def test_constant_terms(self):
        assert constant_term(TruncatedSeries.monomial(1, (-1,), ONE, (2,)), 0).terms == {}
        assert iterated_CT(TruncatedSeries.constant(1, Fraction(7), (0,))) == 7

    def test_basic_rank1_formula(self):
        order = 4
        ker = kernel_coefficients(ONE, order)
        # l z/(1-e^{l z}) with symbolic l
        kernel = TruncatedSeries.univariate(1, 0, [ELL**j * ker[j] for j in range(order + 1)], (order,))
        f = exp_minus(order + 1).inverse()
        s = expand_exp(LAM, 0, 1, order) * kernel * f
        assert iterated_CT(s) == -LAM + (ELL - 1) * Fraction(1, 2)

    def test_order_matters(self):
        # z1/(z1+z2): expanding with |z2| << |z1| gives CT 1, the other way 0
        flag = FlagSeries(2, (4, 4))
        num = flag.linear_form([1, 0])
        den = flag.linear_form([1, 1])
        assert flag.iterated_ct(num / den) == 1
        num_rev = flag.linear_form([0, 1])  # variables swapped: z1 is now the inner one
        assert flag.iterated_ct(num_rev / den) == 0


@st.composite
def rational_forms(draw):
    a = draw(st.integers(1, 3))
    b = draw(st.integers(-3, 3))
    return (a, b)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(rational_forms(), min_size=1, max_size=3),
    st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
    st.tuples(st.sampled_from([1, 2, -1, Fraction(1, 2), 3]), st.sampled_from([1, -2, Fraction(2, 3), 5])),
)
def test_iterated_ct_scaling_invariance(forms, p, c):
    """iCT of z1^a z2^b exp(p.z)/prod L_i(z), homogeneous of degree 0, is unchanged by z_k -> c_k z_k."""
    n = len(forms)
    a = 1
    b = n - 1

    def value(scale):
        flag = FlagSeries(2, (n + 3, n + 3))
        s = flag.z_monomial((a, b), ONE * (Fraction(scale[0]) ** a * Fraction(scale[1]) ** b))
        s = s * flag.exp_linear([p[0] * scale[0], p[1] * scale[1]])
        for f in forms:
            s = s / flag.linear_form([f[0] * scale[0], f[1] * scale[1]])
        return flag.iterated_ct(s)

    assert value((1, 1)) == value(c)


series_coeffs = st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=1, max_size=5)


@settings(max_examples=50, deadline=None)
@given(series_coeffs, series_coeffs, series_coeffs)
def test_ring_axioms(x, y, w):
    hi = (4,)
    a, b, c = (TruncatedSeries.univariate(1, 0, v, hi) for v in (x, y, w))
    assert ((a + b) * c).equals_to_order(a * c + b * c)
    assert (a * b).equals_to_order(b * a)
    assert ((a * b) * c).equals_to_order(a * (b * c))
    if x[0] != 0:
        assert (a * a.inverse()).equals_to_order(TruncatedSeries.constant(1, ONE, hi))
