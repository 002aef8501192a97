"""Shared independent oracles for the test suite.

These deliberately avoid the package's solver paths: fills by exhaustive box
search, ranks by fraction Gauss written here, invariant factors by gcds of
minors.  Expected values asserted in the tests were computed with these.
"""

import random
from fractions import Fraction
from itertools import combinations, product

from fillnorm.complexes import CellComplex2


def mat_vec(rows, vec):
    return [sum(r[j] * vec[j] for j in range(len(vec))) for r in rows]


def exhaustive_fill_box(rows, ncols, target, box):
    """Minimal l1 norm over integer vectors in [-box, box]^ncols, or None."""
    best = None
    target = list(target)
    for cand in product(range(-box, box + 1), repeat=ncols):
        if mat_vec(rows, cand) == target:
            norm = sum(abs(v) for v in cand)
            if best is None or norm < best[0]:
                best = (norm, list(cand))
    return best


def gauss_rank(rows, ncols):
    work = [[Fraction(v) for v in row] for row in rows]
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(work)) if work[i][col] != 0),
                   None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        inv = 1 / work[rank][col]
        work[rank] = [v * inv for v in work[rank]]
        for i in range(len(work)):
            if i != rank and work[i][col] != 0:
                f = work[i][col]
                work[i] = [a - f * b for a, b in zip(work[i], work[rank])]
        rank += 1
    return rank


def minors_gcd(rows, ncols, k):
    """gcd of all k x k minors (0 when all vanish)."""
    import math

    m = len(rows)
    g = 0
    for rsel in combinations(range(m), k):
        for csel in combinations(range(ncols), k):
            sub = [[rows[i][j] for j in csel] for i in rsel]
            g = math.gcd(g, _det(sub))
    return g


def _det(sq):
    n = len(sq)
    if n == 0:
        return 1
    if n == 1:
        return sq[0][0]
    total = 0
    for j in range(n):
        if sq[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in sq[1:]]
        total += (-1) ** j * sq[0][j] * _det(minor)
    return total


def invariant_factors_by_minors(rows, ncols):
    """d_k = gcd(k-minors) / gcd((k-1)-minors); the classical definition."""
    out = []
    prev = 1
    k = 1
    while True:
        g = minors_gcd(rows, ncols, k) if min(len(rows), ncols) >= k else 0
        if g == 0:
            break
        out.append(g // prev)
        prev = g
        k += 1
    return out


def random_small_complex(rng, max_vertices=3, max_edges=5, max_cells=4,
                         max_word=6, require_cells=False):
    """Random complex in the acceptance-criterion-1 family."""
    nv = rng.randint(1, max_vertices)
    vertices = [f"v{i}" for i in range(nv)]
    ne = rng.randint(1, max_edges)
    edges = []
    for i in range(ne):
        edges.append((f"e{i}", rng.choice(vertices), rng.choice(vertices)))
    x0 = CellComplex2("tmp", vertices, edges, [])
    cells = []
    n_cells = rng.randint(1 if require_cells else 0, max_cells)
    for k in range(n_cells):
        word = random_closed_word(rng, x0, max_word)
        if word:
            cells.append((f"c{k}", word))
    return CellComplex2(f"rand", vertices, edges, cells)


def random_closed_word(rng, x, max_len, tries=30):
    """A random closed edge path of length <= max_len, or None."""
    letters_at = {v: [] for v in x.vertices}
    for e, s, t in x.edges:
        letters_at[s].append(((e, 1), t))
        letters_at[t].append(((e, -1), s))
    for _ in range(tries):
        start = rng.choice(x.vertices)
        at = start
        word = []
        length = rng.randint(1, max_len)
        ok = False
        for step in range(length):
            options = letters_at[at]
            if not options:
                break
            letter, nxt = rng.choice(options)
            word.append(letter)
            at = nxt
            if at == start and rng.random() < 0.5 and word:
                ok = True
                break
        if at == start and word:
            ok = True
        if ok:
            return tuple(word)
    return None


def random_boundaries(x, rng, count, box=2):
    """Random integral boundaries as (target vector, known filler) pairs."""
    bd = x.boundary_matrix(2)
    ncols = len(bd.col_labels)
    out = []
    for _ in range(count):
        filler = [0] * ncols
        for j in rng.sample(range(ncols), min(ncols, 3)) if ncols else []:
            filler[j] = rng.randint(-box, box)
        out.append((mat_vec(bd.rows, filler), filler))
    return out
