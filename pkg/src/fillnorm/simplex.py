"""Two-phase primal simplex over exact rationals with Bland's rule.

Solves  min c.x  subject to  A x = b, x >= 0.  Bland's smallest-index rule
makes the pivot sequence deterministic and cycle-free; all arithmetic is
Fraction, so optima and dual certificates are exact.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import snf

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: list
    value: Fraction
    dual: list  # one multiplier per original row (zero on redundant rows)


def solve_lp(a_rows, b, c):
    """Exact optimum of min c.x, A x = b, x >= 0."""
    m = len(a_rows)
    n = len(c)
    c = [Fraction(v) for v in c]

    # Normalize to b >= 0, remembering the sign flips for dual recovery.
    signs = []
    norm = []
    rhs = []
    for i in range(m):
        row = [Fraction(v) for v in a_rows[i]]
        bi = Fraction(b[i])
        if bi < 0:
            row = [-v for v in row]
            bi = -bi
            signs.append(-1)
        else:
            signs.append(1)
        norm.append(row)
        rhs.append(bi)

    # Tableau over n real + m artificial columns.
    tab = [norm[i] + [Fraction(1) if k == i else Fraction(0) for k in range(m)]
           + [rhs[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    width = n + m

    def pivot(r, j):
        prow = tab[r]
        inv = 1 / prow[j]
        tab[r] = prow = [v * inv for v in prow]
        for i in range(len(tab)):
            if i != r and tab[i][j] != 0:
                f = tab[i][j]
                tab[i] = [v - f * w for v, w in zip(tab[i], prow)]
        basis[r] = j

    def run(costs, allowed):
        while True:
            # reduced costs relative to the current basis
            y = [costs[basis[r]] for r in range(len(tab))]
            enter = None
            for j in range(width):
                if j not in allowed or j in basis:
                    continue
                red = costs[j] - sum(y[r] * tab[r][j] for r in range(len(tab)))
                if red < 0:
                    enter = j
                    break
            if enter is None:
                return OPTIMAL
            leave = None
            best = None
            for r in range(len(tab)):
                if tab[r][enter] > 0:
                    ratio = tab[r][width] / tab[r][enter]
                    key = (ratio, basis[r])
                    if best is None or key < best:
                        best = key
                        leave = r
            if leave is None:
                return UNBOUNDED
            pivot(leave, enter)

    # Phase 1: minimize the artificial sum.
    phase1_cost = [Fraction(0)] * n + [Fraction(1)] * m
    allowed = set(range(width))
    status = run(phase1_cost, allowed)
    assert status == OPTIMAL  # bounded below by zero
    art_value = sum(tab[r][width] for r in range(len(tab)) if basis[r] >= n)
    if art_value > 0:
        return LPResult(INFEASIBLE, [], Fraction(0), [])

    # Drive leftover artificials out of the basis; drop redundant rows.
    active_orig = list(range(m))
    r = 0
    while r < len(tab):
        if basis[r] >= n:
            col = next((j for j in range(n) if tab[r][j] != 0), None)
            if col is None:
                del tab[r]
                del basis[r]
                del active_orig[r]
                continue
            pivot(r, col)
        r += 1

    # Phase 2 over the real columns only.
    phase2_cost = c + [Fraction(0)] * m
    status = run(phase2_cost, set(range(n)))
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, [], Fraction(0), [])

    x = [Fraction(0)] * n
    for r in range(len(tab)):
        if basis[r] < n:
            x[basis[r]] = tab[r][width]
    value = sum(ci * xi for ci, xi in zip(c, x))

    # Dual from B^T y = c_B on the surviving rows of the sign-normalized system.
    dual = [Fraction(0)] * m
    if tab:
        bt = [[norm[active_orig[r]][basis[k]] for r in range(len(tab))]
              for k in range(len(tab))]
        cb = [c[basis[k]] if basis[k] < n else Fraction(0)
              for k in range(len(tab))]
        y = snf.rational_solve(bt, cb, len(tab))
        assert y is not None
        for r, i in enumerate(active_orig):
            dual[i] = signs[i] * y[r]
    return LPResult(OPTIMAL, x, value, dual)
