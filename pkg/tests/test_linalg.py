from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vsums import linalg as la

int_matrices = st.integers(1, 3).flatmap(
    lambda m: st.integers(1, 3).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


@settings(max_examples=80, deadline=None)
@given(int_matrices)
def test_smith_normal_form(a):
    u, d, v = la.smith_normal_form(a)
    assert la.mat_mul(la.mat_mul(u, a), v) == d
    assert abs(la.det(u)) == 1 and abs(la.det(v)) == 1
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    assert all(d[i][j] == 0 for i in range(len(d)) for j in range(len(d[0])) if i != j)
    nz = [x for x in diag if x]
    assert all(x > 0 for x in nz)
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    assert diag[: len(nz)] == nz  # zeros trail


@settings(max_examples=60, deadline=None)
@given(int_matrices)
def test_integer_kernel(a):
    n = len(a[0])
    ker = la.integer_kernel(a, n)
    assert len(ker) == n - la.rank(a)
    for k in ker:
        assert all(x == 0 for x in la.mat_vec(a, k))


def test_inverse_and_det():
    m = [[2, 1], [1, 1]]
    assert la.det(m) == 1
    assert la.mat_mul(m, la.inverse(m)) == la.identity(2)
    assert la.det([[1, 2], [2, 4]]) == 0


def test_lattice_basis():
    b = la.lattice_basis([(Fraction(2, 3), Fraction(1, 3)), (Fraction(1, 3), Fraction(2, 3)), (1, 0), (0, 1)])
    assert len(b) == 2 and abs(la.det([list(v) for v in b])) == Fraction(1, 3)


def test_solve_integer():
    assert la.solve_integer([[2, 4]], [6]) is not None
    assert la.solve_integer([[2, 4]], [3]) is None


@pytest.mark.parametrize(
    "eqs,rhs,nonneg,ok",
    [
        ([[1, 1]], [1], [True, True], True),
        ([[1, 1]], [-1], [True, True], False),
        ([[1, 1]], [-1], [False, True], True),
        ([[1, -1], [1, 1]], [0, 0], [True, True], True),
        ([[1, 0], [0, 1]], [1, -2], [True, True], False),
    ],
)
def test_lp_feasible(eqs, rhs, nonneg, ok):
    assert la.lp_feasible(eqs, rhs, nonneg) is ok


def test_lp_max():
    status, value, x = la.lp_max([1, 1], [[1, 2], [3, 1]], [4, 6])
    assert status == "optimal" and value == Fraction(14, 5)
    assert la.lp_max([1, 0], [[-1, 1]], [1])[0] == "unbounded"
    assert la.lp_max([-1], [[-1]], [-2])[:2] == ("optimal", -2)  # x >= 2, maximize -x


def test_lp_infeasible():
    assert la.lp_max([1, 1], [[1, 1], [-1, -1]], [1, -2])[0] == "infeasible"


def test_primitive_vector():
    assert la.primitive_integer_vector((Fraction(2, 3), Fraction(4, 3))) == (1, 2)
    assert la.primitive_integer_vector((-6, 9)) == (-2, 3)
