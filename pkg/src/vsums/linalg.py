"""Small exact linear algebra over Q and Z (matrices as lists of rows)."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Vector = tuple
Matrix = list


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), 0)


def mat_vec(m: Matrix, v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in m)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[dot(row, col) for col in bt] for row in a]


def transpose(m: Matrix) -> Matrix:
    return [list(col) for col in zip(*m)] if m else []


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def vadd(a, b) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a) -> tuple:
    return tuple(c * x for x in a)


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over Q and the pivot columns."""
    a = [[Fraction(x) for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(vectors: Sequence[Sequence]) -> int:
    vectors = [list(v) for v in vectors]
    if not vectors:
        return 0
    return len(rref(vectors)[1])


def det(m: Matrix) -> Fraction:
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            result = -result
        result *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return result


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = [list(row) + identity(n)[i] for i, row in enumerate(m)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def solve(m: Matrix, b: Sequence) -> tuple | None:
    """Some solution x of m x = b, or None if inconsistent."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    aug = [list(m[i]) + [b[i]] for i in range(rows)]
    red, piv = rref(aug)
    if cols in piv:
        return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(piv):
        x[c] = red[i][cols]
    return tuple(x)


def nullspace(m: Matrix, ncols: int | None = None) -> list[tuple]:
    """Basis of {x : m x = 0}."""
    if not m:
        n = ncols or 0
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    cols = len(m[0])
    red, piv = rref(m)
    free = [c for c in range(cols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * cols
        x[f] = Fraction(1)
        for i, c in enumerate(piv):
            x[c] = -red[i][f]
        basis.append(tuple(x))
    return basis


def in_span(vectors: Sequence[Sequence], v: Sequence) -> bool:
    if not vectors:
        return not any(v)
    return rank(list(vectors) + [v]) == rank(vectors)


def independent_subset(vectors: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal independent subset, chosen greedily in order."""
    chosen: list[int] = []
    basis: list = []
    for i, v in enumerate(vectors):
        if rank(basis + [list(v)]) > len(basis):
            basis.append(list(v))
            chosen.append(i)
    return chosen


def common_denominator(values) -> int:
    d = 1
    for x in values:
        q = Fraction(x).denominator
        d = d // gcd(d, q) * q
    return d


def primitive_integer_vector(v: Sequence) -> tuple[int, ...]:
    """Positive rational multiple of v with coprime integer entries."""
    d = common_denominator(v)
    w = [int(Fraction(x) * d) for x in v]
    g = 0
    for x in w:
        g = gcd(g, x)
    return tuple(x // g for x in w) if g else tuple(w)


# ------------------------------------------------------------ integer lattices


def smith_normal_form(a: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, D, V) with U a V = D diagonal, U and V unimodular."""
    m = len(a)
    n = len(a[0]) if m else 0
    d = [[int(x) for x in row] for row in a]
    u = identity(m)
    v = identity(n)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):  # row_dst += c * row_src
        d[dst] = [x + c * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, c):
        for row in d:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    for t in range(min(m, n)):
        while True:
            entries = [(abs(d[i][j]), i, j) for i in range(t, m) for j in range(t, n) if d[i][j]]
            if not entries:
                return u, d, v
            _, i, j = min(entries)
            swap_rows(t, i)
            swap_cols(t, j)
            p = d[t][t]
            clean = True
            for i in range(t + 1, m):
                q = d[i][t] // p
                if q:
                    add_row(t, i, -q)
                if d[i][t]:
                    clean = False
            for j in range(t + 1, n):
                q = d[t][j] // p
                if q:
                    add_col(t, j, -q)
                if d[t][j]:
                    clean = False
            if not clean:
                continue
            # divisibility of the remaining block
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
    return u, d, v


def lattice_basis(generators: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    """A Z-basis (list of vectors) of the group generated by rational vectors."""
    gens = [tuple(Fraction(x) for x in g) for g in generators]
    if not gens:
        return []
    den = common_denominator(x for g in gens for x in g)
    ints = [[int(x * den) for x in g] for g in gens]
    # rows are generators: U A V = D, so the lattice is spanned by rows of D V^-1
    u, d, v = smith_normal_form(ints)
    vinv = integer_inverse(v)
    basis = []
    for i in range(min(len(d), len(d[0]))):
        if d[i][i]:
            row = [d[i][i] * x for x in vinv[i]]
            basis.append(tuple(Fraction(x, den) for x in row))
    return basis


def integer_inverse(m: Matrix) -> Matrix:
    inv = inverse(m)
    out = []
    for row in inv:
        if any(Fraction(x).denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


def is_integral(v: Sequence) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def lp_feasible(eqs: Matrix, rhs: Sequence, nonneg: Sequence[bool]) -> bool:
    """Exact feasibility of {x : eqs x = rhs, x_i >= 0 where nonneg[i]}.

    Uses the Phase-I simplex method with Bland's rule over Fractions.
    """
    m = len(eqs)
    n = len(nonneg)
    # split free variables into differences of nonnegative ones
    cols: list[list[Fraction]] = []
    for j in range(n):
        col = [Fraction(eqs[i][j]) for i in range(m)]
        cols.append(col)
        if not nonneg[j]:
            cols.append([-x for x in col])
    b = [Fraction(x) for x in rhs]
    a = [[c[i] for c in cols] for i in range(m)]
    for i in range(m):
        if b[i] < 0:
            a[i] = [-x for x in a[i]]
            b[i] = -b[i]
    k = len(cols)
    # tableau with artificials
    tab = [a[i] + [Fraction(int(i == j)) for j in range(m)] + [b[i]] for i in range(m)]
    basis = [k + i for i in range(m)]
    total = k + m
    obj = [Fraction(0)] * (total + 1)
    for i in range(m):
        for j in range(total + 1):
            obj[j] -= tab[i][j]
    for i in range(m):
        obj[k + i] += 1
    while True:
        enter = next((j for j in range(total) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][total] / tab[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            break
        r = best[1]
        piv = tab[r][enter]
        tab[r] = [x / piv for x in tab[r]]
        for i in range(m):
            if i != r and tab[i][enter]:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[r])]
        if obj[enter]:
            f = obj[enter]
            obj = [x - f * y for x, y in zip(obj, tab[r])]
        basis[r] = enter
    return obj[total] == 0


def integer_kernel(a: Matrix, ncols: int) -> list[tuple[int, ...]]:
    """A Z-basis of {x in Z^n : a x = 0} for a rational matrix a (saturated)."""
    if not a:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    den = common_denominator(x for row in a for x in row)
    ints = [[int(Fraction(x) * den) for x in row] for row in a]
    _u, d, v = smith_normal_form(ints)
    nonzero = sum(1 for i in range(min(len(d), ncols)) if d[i][i])
    return [tuple(v[i][j] for i in range(ncols)) for j in range(nonzero, ncols)]


def solve_integer(a: Matrix, b: Sequence) -> tuple[int, ...] | None:
    """Some integer solution x of a x = b (a integer matrix), or None."""
    m = len(a)
    n = len(a[0]) if m else 0
    if any(Fraction(x).denominator != 1 for x in b):
        return None
    u, d, v = smith_normal_form(a)
    y = mat_vec(u, [int(x) for x in b])
    z = [0] * n
    for i in range(m):
        di = d[i][i] if i < n else 0
        if di == 0:
            if y[i] != 0:
                return None
        else:
            if y[i] % di:
                return None
            z[i] = y[i] // di
    return tuple(int(x) for x in mat_vec(v, z))


def complete_basis(sub: Sequence[Sequence[int]], n: int) -> list[tuple[int, ...]]:
    """Integer vectors extending a saturated sublattice basis to a basis of Z^n."""
    if not sub:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    _u, d, v = smith_normal_form([list(map(int, s)) for s in sub])
    if any(abs(d[i][i]) != 1 for i in range(len(sub))):
        raise ValueError("sublattice is not saturated")
    vinv = integer_inverse(v)
    return [tuple(vinv[i]) for i in range(len(sub), n)]


def _pivot(tab: list, basis: list, r: int, c: int) -> None:
    piv = tab[r][c]
    tab[r] = [x / piv for x in tab[r]]
    for i in range(len(tab)):
        if i != r and tab[i][c]:
            f = tab[i][c]
            tab[i] = [x - f * y for x, y in zip(tab[i], tab[r])]
    basis[r] = c


def _simplex(tab: list, basis: list, obj: list, allowed: int) -> bool:
    """Maximize over the tableau; obj holds reduced costs (negative = improving).

    Returns False if unbounded.  Bland's rule prevents cycling.
    """
    m = len(tab)
    while True:
        enter = next((j for j in range(allowed) if obj[j] < 0), None)
        if enter is None:
            return True
        best = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return False
        r = best[1]
        _pivot(tab, basis, r, enter)
        f = obj[enter]
        obj[:] = [x - f * y for x, y in zip(obj, tab[r])]


def lp_max(c: Sequence, a_ub: Matrix, b_ub: Sequence) -> tuple[str, Fraction | None, tuple | None]:
    """Exact maximum of c.x subject to a_ub x <= b_ub and x >= 0.

    Returns (status, value, x) with status "optimal", "infeasible" or "unbounded".
    Two-phase tableau simplex over Fractions with Bland's rule.
    """
    n = len(c)
    m = len(a_ub)
    # rows: a x + s = b with s >= 0; rows with b < 0 are negated and get an artificial
    rows = []
    need_art = []
    for i in range(m):
        row = [Fraction(x) for x in a_ub[i]] + [Fraction(int(i == j)) for j in range(m)]
        b = Fraction(b_ub[i])
        if b < 0:
            row = [-x for x in row]
            b = -b
            need_art.append(i)
        rows.append((row, b))
    k = len(need_art)
    width = n + m + k
    tab = []
    basis = []
    for i, (row, b) in enumerate(rows):
        art = [Fraction(0)] * k
        if i in need_art:
            art[need_art.index(i)] = Fraction(1)
            basis.append(n + m + need_art.index(i))
        else:
            basis.append(n + i)
        tab.append(row + art + [b])
    if k:
        obj = [Fraction(0)] * (width + 1)
        for j in range(k):
            obj[n + m + j] = Fraction(1)
        for i in need_art:
            obj = [x - y for x, y in zip(obj, tab[i])]
        _simplex(tab, basis, obj, width)
        if obj[-1] != 0:
            return "infeasible", None, None
        # drive remaining artificials out of the basis
        for i in range(m):
            if basis[i] >= n + m:
                col = next((j for j in range(n + m) if tab[i][j] != 0), None)
                if col is not None:
                    _pivot(tab, basis, i, col)
        tab = [row[: n + m] + [row[-1]] for row in tab]
    obj = [Fraction(0)] * (n + m + 1)
    for j in range(n):
        obj[j] = -Fraction(c[j])
    for i in range(m):
        bj = basis[i]
        if bj < n + m and obj[bj]:
            f = obj[bj]
            obj = [x - f * y for x, y in zip(obj, tab[i])]
    if not _simplex(tab, basis, obj, n + m):
        return "unbounded", None, None
    x = [Fraction(0)] * (n + m)
    for i in range(m):
        if basis[i] < n + m:
            x[basis[i]] = tab[i][-1]
    return "optimal", obj[-1], tuple(x[:n])
