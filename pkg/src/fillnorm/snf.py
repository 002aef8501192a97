"""Exact linear algebra over Z, Q and F_p: Smith normal form, lattice solving.

Matrices are plain lists of rows.  Everything runs on Python big integers or
Fraction; there are no modular shortcuts, so results are exact at any size the
desk-scale inputs produce.
"""

from dataclasses import dataclass
from fractions import Fraction


def identity_matrix(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zero_matrix(m, n):
    return [[0] * n for _ in range(m)]


def shape(mat, ncols=None):
    m = len(mat)
    n = len(mat[0]) if m else (ncols or 0)
    return m, n


def transpose(mat, ncols=None):
    m, n = shape(mat, ncols)
    return [[mat[i][j] for i in range(m)] for j in range(n)]


def mat_mul(a, b, b_ncols=None):
    ma, na = shape(a)
    mb, nb = shape(b, b_ncols)
    assert na == mb, f"shape mismatch {na} vs {mb}"
    out = zero_matrix(ma, nb)
    for i in range(ma):
        arow = a[i]
        orow = out[i]
        for k in range(na):
            x = arow[k]
            if x:
                brow = b[k]
                for j in range(nb):
                    if brow[j]:
                        orow[j] += x * brow[j]
    return out


def mat_vec(mat, vec, ncols=None):
    m, n = shape(mat, ncols)
    assert len(vec) == n
    out = []
    for i in range(m):
        row = mat[i]
        s = 0
        for j in range(n):
            if row[j] and vec[j]:
                s += row[j] * vec[j]
        out.append(s)
    return out


@dataclass
class SNFResult:
    """u @ a @ v == d with u, v unimodular; diag(d) = invariant factors."""

    d: list
    u: list
    v: list
    rank: int

    @property
    def invariant_factors(self):
        return [self.d[i][i] for i in range(self.rank)]


def smith_normal_form(mat, ncols=None):
    """Diagonalize an integer matrix by unimodular row/column operations.

    Pivoting always picks the smallest nonzero entry in absolute value, which
    keeps intermediate entries small without leaving exact arithmetic.  The
    diagonal is nonnegative and each entry divides the next.
    """
    m, n = shape(mat, ncols)
    a = [[int(x) for x in row] for row in mat]
    u = identity_matrix(m)
    v = identity_matrix(n)

    def swap_rows(i, k):
        if i != k:
            a[i], a[k] = a[k], a[i]
            u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        if j != k:
            for row in a:
                row[j], row[k] = row[k], row[j]
            for row in v:
                row[j], row[k] = row[k], row[j]

    def add_row(src, dst, q):
        if q:
            asrc, adst = a[src], a[dst]
            for j in range(n):
                adst[j] += q * asrc[j]
            usrc, udst = u[src], u[dst]
            for j in range(m):
                udst[j] += q * usrc[j]

    def add_col(src, dst, q):
        if q:
            for row in a:
                row[dst] += q * row[src]
            for row in v:
                row[dst] += q * row[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(m, n):
        piv = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                x = row[j]
                if x and (piv is None or abs(x) < piv[0]):
                    piv = (abs(x), i, j)
        if piv is None:
            break
        swap_rows(t, piv[1])
        swap_cols(t, piv[2])
        while True:
            if a[t][t] < 0:
                negate_row(t)
            p = a[t][t]
            restart = False
            for i in range(t + 1, m):
                if a[i][t] % p:
                    add_row(t, i, -(a[i][t] // p))
                    swap_rows(t, i)
                    restart = True
                    break
            if restart:
                continue
            for j in range(t + 1, n):
                if a[t][j] % p:
                    add_col(t, j, -(a[t][j] // p))
                    swap_cols(t, j)
                    restart = True
                    break
            if restart:
                continue
            for i in range(t + 1, m):
                add_row(t, i, -(a[i][t] // p))
            for j in range(t + 1, n):
                add_col(t, j, -(a[t][j] // p))
            offender = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % p:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(offender, t, 1)
        t += 1

    rank = sum(1 for i in range(min(m, n)) if a[i][i] != 0)
    return SNFResult(d=a, u=u, v=v, rank=rank)


def invariant_factors(mat, ncols=None):
    return smith_normal_form(mat, ncols).invariant_factors


def integer_rank(mat, ncols=None):
    return smith_normal_form(mat, ncols).rank


def solve_integer(mat, b, ncols=None):
    """One integer solution x of mat @ x == b, or None when none exists."""
    m, n = shape(mat, ncols)
    assert len(b) == m
    s = smith_normal_form(mat, ncols)
    y = mat_vec(s.u, b)
    w = [0] * n
    for i in range(m):
        if i < s.rank:
            di = s.d[i][i]
            if y[i] % di:
                return None
            w[i] = y[i] // di
        elif y[i] != 0:
            return None
    return mat_vec(s.v, w)


def in_integer_image(s, b):
    """Whether b lies in the column lattice, given s = smith_normal_form(mat)."""
    y = mat_vec(s.u, b)
    for i in range(len(y)):
        if i < s.rank:
            if y[i] % s.d[i][i]:
                return False
        elif y[i] != 0:
            return False
    return True


def integer_kernel_basis(mat, ncols=None):
    """Basis of the integer kernel lattice, as a list of column vectors."""
    m, n = shape(mat, ncols)
    s = smith_normal_form(mat, ncols)
    return [[s.v[i][j] for i in range(n)] for j in range(s.rank, n)]


def smallest_positive_multiple_in_image(mat, b, ncols=None):
    """Least d >= 1 with d*b in the integer column span, or None."""
    m, n = shape(mat, ncols)
    s = smith_normal_form(mat, ncols)
    y = mat_vec(s.u, b)
    for i in range(s.rank, m):
        if y[i] != 0:
            return None
    d = 1
    for i in range(s.rank):
        di = s.d[i][i]
        g = _gcd(di, y[i] % di)
        d = _lcm(d, di // g)
    return d


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _lcm(a, b):
    return abs(a * b) // _gcd(a, b) if a and b else abs(a or b)


# --- rational elimination -------------------------------------------------


def _rref(mat, ncols=None):
    """Reduced row echelon form over Q; returns (rows, pivot column list)."""
    m, n = shape(mat, ncols)
    rows = [[Fraction(x) for x in row] for row in mat]
    pivots = []
    r = 0
    for c in range(n):
        pr = None
        for i in range(r, m):
            if rows[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return rows, pivots


def rational_rank(mat, ncols=None):
    return len(_rref(mat, ncols)[1])


def rational_solve(mat, b, ncols=None):
    """One rational solution of mat @ x == b, or None."""
    m, n = shape(mat, ncols)
    assert len(b) == m
    aug = [list(mat[i]) + [b[i]] for i in range(m)] if m else []
    rows, pivots = _rref(aug, n + 1)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        x[c] = rows[r][n]
    return x


def rational_kernel_basis(mat, ncols=None):
    """Basis of the rational kernel, one column vector per free variable."""
    m, n = shape(mat, ncols)
    rows, pivots = _rref(mat, ncols)
    pivset = set(pivots)
    basis = []
    for free in range(n):
        if free in pivset:
            continue
        vec = [Fraction(0)] * n
        vec[free] = Fraction(1)
        for r, c in enumerate(pivots):
            vec[c] = -rows[r][free]
        basis.append(vec)
    return basis


def in_rational_span(mat, b, ncols=None):
    return rational_solve(mat, b, ncols) is not None


# --- F_p elimination ------------------------------------------------------


def _rref_mod_p(mat, p, ncols=None):
    m, n = shape(mat, ncols)
    rows = [[x % p for x in row] for row in mat]
    pivots = []
    r = 0
    for c in range(n):
        pr = None
        for i in range(r, m):
            if rows[i][c] % p:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return rows, pivots


def rank_mod_p(mat, p, ncols=None):
    return len(_rref_mod_p(mat, p, ncols)[1])


def kernel_basis_mod_p(mat, p, ncols=None):
    m, n = shape(mat, ncols)
    rows, pivots = _rref_mod_p(mat, p, ncols)
    pivset = set(pivots)
    basis = []
    for free in range(n):
        if free in pivset:
            continue
        vec = [0] * n
        vec[free] = 1
        for r, c in enumerate(pivots):
            vec[c] = (-rows[r][free]) % p
        basis.append(vec)
    return basis


def solve_mod_p(mat, b, p, ncols=None):
    m, n = shape(mat, ncols)
    aug = [list(mat[i]) + [b[i]] for i in range(m)] if m else []
    rows, pivots = _rref_mod_p(aug, p, n + 1)
    if n in pivots:
        return None
    x = [0] * n
    for r, c in enumerate(pivots):
        x[c] = rows[r][n] % p
    return x
