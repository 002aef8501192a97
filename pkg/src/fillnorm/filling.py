"""Exact l1 optimization: minimal fillings, primitives, expansion constants.

Real problems are solved by exact-rational simplex on the split formulation
A = A+ - A- and certified by the dual vector; integer problems by branch and
bound over the LP relaxation, certified by tree exhaustion.  The expansion
constant machinery reduces the infimum over infinitely many boundaries to the
vertices of the polytope {z in im(bd) : ||z||_1 <= 1}, which are exactly the
normalized minimal-support vectors of the image subspace.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import simplex, snf
from .complexes import Chain, homology
from .errors import (
    DimensionCapExceeded,
    NotABoundary,
    NotACoboundary,
    PreconditionViolated,
    SearchCapExceeded,
)


@dataclass
class SolveCaps:
    dim_cap: int = 18           # ambient dimension limit for vertex enumeration
    subset_budget: int = 200000  # support subsets examined during enumeration
    node_cap: int = 20000        # branch-and-bound node limit
    support_cap: int = 6         # support size cap for integer witness search
    box: int = 3                 # coefficient box for integer witness search
    samples: int = 24            # pointwise agreement samples

    def to_json(self):
        return {"dim_cap": self.dim_cap, "subset_budget": self.subset_budget,
                "node_cap": self.node_cap, "support_cap": self.support_cap,
                "box": self.box, "samples": self.samples}


@dataclass
class FillProblem:
    complex: object
    target: Chain
    degree: int = 2
    ring: str = "integer"
    support: object = None      # optional subcomplex restricting the filler

    def normalized_ring(self):
        return normalize_ring(self.ring)


@dataclass
class FillResult:
    filler: Chain
    value: Fraction
    ring: str
    certificate: dict
    optimal: bool = True

    def to_json(self):
        from .report import chain_to_json, frac_str
        return {"value": frac_str(self.value), "ring": self.ring,
                "optimal": self.optimal,
                "filler": chain_to_json(self.filler),
                "certificate": _cert_json(self.certificate)}


def _cert_json(cert):
    from .report import frac_str
    out = {}
    for k, v in cert.items():
        if isinstance(v, Fraction):
            out[k] = frac_str(v)
        elif isinstance(v, dict):
            out[k] = {kk: frac_str(vv) if isinstance(vv, Fraction) else vv
                      for kk, vv in v.items()}
        else:
            out[k] = v
    return out


def normalize_ring(ring):
    r = str(ring).lower()
    if r in ("real", "r", "q", "rational"):
        return "real"
    if r in ("int", "integer", "z"):
        return "integer"
    raise ValueError(f"unknown ring {ring!r}")


# --- core solvers on explicit matrices --------------------------------------


def real_min_l1(rows, ncols, target):
    """Exact min of ||x||_1 over rational x with rows @ x == target.

    Returns (x, value, dual); the dual y certifies optimality via
    ||rows^T y||_inf <= 1 and y.target == value.  Raises NotABoundary when the
    target is outside the rational column span.
    """
    m = len(rows)
    target = [Fraction(t) for t in target]
    if all(t == 0 for t in target):
        return [Fraction(0)] * ncols, Fraction(0), [Fraction(0)] * m
    if snf.rational_solve(rows, target, ncols) is None:
        raise NotABoundary("target is not in the rational image")
    split = [[Fraction(rows[i][j]) for j in range(ncols)]
             + [Fraction(-rows[i][j]) for j in range(ncols)] for i in range(m)]
    res = simplex.solve_lp(split, target, [Fraction(1)] * (2 * ncols))
    assert res.status == simplex.OPTIMAL
    x = [res.x[j] - res.x[ncols + j] for j in range(ncols)]
    _verify_dual(rows, ncols, target, res.value, res.dual)
    return x, res.value, res.dual


def _verify_dual(rows, ncols, target, value, dual):
    m = len(rows)
    pairing = sum(dual[i] * target[i] for i in range(m))
    assert pairing == value, "dual certificate failed strong duality"
    for j in range(ncols):
        col = sum(dual[i] * rows[i][j] for i in range(m))
        assert abs(col) <= 1, "dual certificate infeasible"


def hadamard_box_bound(rows, ncols, target):
    """Cramer-style bound on coordinates of basic LP solutions, times 2."""
    prod = 1
    for j in range(ncols):
        norm = sum(abs(rows[i][j]) for i in range(len(rows)))
        prod *= max(1, norm)
    prod *= max(1, sum(abs(t) for t in target))
    return 2 * prod


def integer_min_l1(rows, ncols, target, node_cap=20000):
    """Minimize ||x||_1 over integer x with rows @ x == target.

    Branch and bound over the split LP relaxation; branching variable is the
    lowest-index fractional coordinate, floor branch explored first (DFS).
    Raises NotABoundary when the lattice system is unsolvable and
    SearchCapExceeded (carrying the incumbent) when the node cap is hit.
    """
    m = len(rows)
    target = [int(t) for t in target]
    x0 = snf.solve_integer(rows, target, ncols)
    if x0 is None:
        raise NotABoundary("target is not in the integer image lattice")
    best = x0
    best_val = sum(abs(v) for v in x0)
    if best_val == 0:
        return x0, 0, {"kind": "zero"}
    box = hadamard_box_bound(rows, ncols, target)
    nodes = 0
    clipped = False
    stack = [({}, {})]  # (lower bounds, upper bounds) per variable index
    while stack:
        lo, hi = stack.pop()
        nodes += 1
        if nodes > node_cap:
            incumbent = (best, best_val,
                         {"kind": "branch-and-bound", "nodes": nodes,
                          "exhausted": False, "box_bound": box})
            raise SearchCapExceeded(
                f"branch-and-bound node cap {node_cap} exceeded",
                incumbent=incumbent, nodes=nodes)
        lp = _bounded_lp(rows, ncols, target, lo, hi)
        if lp is None:
            continue
        x, value = lp
        if value >= best_val:
            continue
        net = [x[j] - x[ncols + j] for j in range(ncols)]
        branch = next((j for j in range(ncols)
                       if net[j].denominator != 1), None)
        if branch is None:
            ival = [int(v) for v in net]
            norm = sum(abs(v) for v in ival)
            if norm < best_val:
                best, best_val = ival, norm
            continue
        fl = net[branch].numerator // net[branch].denominator
        lo_hi = dict(hi)
        lo_hi[branch] = min(lo_hi.get(branch, fl), fl)
        hi_lo = dict(lo)
        hi_lo[branch] = max(hi_lo.get(branch, fl + 1), fl + 1)
        # push ceil branch first so the floor branch is explored first
        if hi_lo[branch] <= box:
            stack.append((hi_lo, dict(hi)))
        else:
            clipped = True
        if lo_hi[branch] >= -box:
            stack.append((dict(lo), lo_hi))
        else:
            clipped = True
    cert = {"kind": "branch-and-bound", "nodes": nodes, "exhausted": True,
            "box_bound": box}
    if clipped:
        raise SearchCapExceeded(
            "branch-and-bound search region clipped at the Cramer box",
            incumbent=(best, best_val, cert), nodes=nodes)
    return best, best_val, cert


def _bounded_lp(rows, ncols, target, lo, hi):
    """Split LP with branch bounds as extra slack rows; None when infeasible."""
    m = len(rows)
    extra = len(lo) + len(hi)
    width = 2 * ncols + extra
    a = []
    b = []
    for i in range(m):
        row = [Fraction(rows[i][j]) for j in range(ncols)]
        row += [-v for v in row]
        row += [Fraction(0)] * extra
        a.append(row)
        b.append(Fraction(target[i]))
    k = 0
    for j, bound in sorted(lo.items()):
        row = [Fraction(0)] * width
        row[j] = Fraction(1)
        row[ncols + j] = Fraction(-1)
        row[2 * ncols + k] = Fraction(-1)
        a.append(row)
        b.append(Fraction(bound))
        k += 1
    for j, bound in sorted(hi.items()):
        row = [Fraction(0)] * width
        row[j] = Fraction(1)
        row[ncols + j] = Fraction(-1)
        row[2 * ncols + k] = Fraction(1)
        a.append(row)
        b.append(Fraction(bound))
        k += 1
    c = [Fraction(1)] * (2 * ncols) + [Fraction(0)] * extra
    res = simplex.solve_lp(a, b, c)
    if res.status != simplex.OPTIMAL:
        return None
    value = sum(res.x[j] for j in range(2 * ncols))
    return res.x, value


# --- chain-level fills -------------------------------------------------------


def fill(problem):
    """l1-minimal filling of a boundary over the chosen ring, with certificate."""
    x = problem.complex
    degree = problem.degree
    ring = problem.normalized_ring()
    bd = x.boundary_matrix(degree)
    row_labels = list(bd.row_labels)
    col_labels = list(bd.col_labels)
    rows = [list(r) for r in bd.rows]
    if problem.support is not None:
        keep = [j for j, c in enumerate(col_labels)
                if c in problem.support.cells_of_dim(degree)]
        col_labels = [col_labels[j] for j in keep]
        rows = [[row[j] for j in keep] for row in rows]
    target = problem.target.vector(row_labels)
    extra = set(problem.target.coeffs) - set(row_labels)
    if extra:
        raise NotABoundary(f"target uses cells outside the complex: {sorted(extra)}")
    return _fill_on_matrix(rows, col_labels, target, ring, degree,
                           node_cap=getattr(problem, "node_cap", 20000))


def _fill_on_matrix(rows, col_labels, target, ring, degree, node_cap=20000):
    ncols = len(col_labels)
    if ring == "real":
        xvec, value, dual = real_min_l1(rows, ncols, target)
        cert = {"kind": "lp-dual",
                "dual": {str(i): d for i, d in enumerate(dual) if d != 0}}
        filler = Chain.from_vector(degree, col_labels, xvec)
        return FillResult(filler, value, "real", cert)
    for t in target:
        if Fraction(t).denominator != 1:
            raise NotABoundary("integer filling requested for a non-integral target")
    xvec, value, cert = integer_min_l1(rows, ncols,
                                       [int(t) for t in target], node_cap)
    filler = Chain.from_vector(degree, col_labels, xvec)
    return FillResult(filler, Fraction(value), "integer", cert)


def primitive(x, eta, ring="integer", node_cap=20000):
    """Minimal-norm primitive of a degree-2 coboundary: same solver, transposed.

    eta is a 2-cochain given by its coefficients on 2-cells; the result is the
    1-cochain omega with d(omega) = eta of least l1 norm.
    """
    ring = normalize_ring(ring)
    bd = x.boundary_matrix(2)
    rows = bd.transpose_rows()           # coboundary matrix: cells x edges
    row_labels = list(bd.col_labels)
    col_labels = list(bd.row_labels)
    extra = set(eta.coeffs) - set(row_labels)
    if extra:
        raise NotACoboundary(f"cochain uses cells outside the complex: {sorted(extra)}")
    target = eta.vector(row_labels)
    try:
        return _fill_on_matrix(rows, col_labels, target, ring, 1, node_cap)
    except NotABoundary as exc:
        raise NotACoboundary(str(exc).replace("image", "coboundary image")) from None


# --- vertex enumeration -------------------------------------------------------


def l1_section_vertices(rows, nrows, ncols, caps=None):
    """Vertices of {z in im(rows) : ||z||_1 <= 1}, one per antipodal pair.

    The vertices are the normalized nonzero vectors of the image subspace with
    inclusion-minimal support; supports are enumerated in increasing size up to
    the circuit bound (ambient - rank + 1).
    """
    caps = caps or SolveCaps()
    if nrows > caps.dim_cap:
        raise DimensionCapExceeded(
            f"vertex enumeration refused in ambient dimension {nrows} "
            f"(cap {caps.dim_cap})", dimension=nrows, cap=caps.dim_cap)
    r = snf.rational_rank(rows, ncols)
    if r == 0:
        return []
    # annihilator C of the image: im(rows) == ker(C)
    c_rows = [list(v) for v in snf.rational_kernel_basis(
        snf.transpose(rows, ncols), nrows)]
    max_size = nrows - r + 1
    budget = sum(math.comb(nrows, s) for s in range(1, max_size + 1))
    if budget > caps.subset_budget:
        raise DimensionCapExceeded(
            f"vertex enumeration needs {budget} support subsets "
            f"(budget {caps.subset_budget})", subsets=budget,
            cap=caps.subset_budget)
    found = []
    found_supports = []
    from itertools import combinations
    for size in range(1, max_size + 1):
        for support in combinations(range(nrows), size):
            sset = set(support)
            if any(fs <= sset for fs in found_supports):
                continue
            sub = [[row[j] for j in support] for row in c_rows]
            kern = snf.rational_kernel_basis(sub, size)
            if len(kern) != 1:
                continue
            vec = kern[0]
            if any(v == 0 for v in vec):
                continue
            full = [Fraction(0)] * nrows
            for idx, j in enumerate(support):
                full[j] = vec[idx]
            norm = sum(abs(v) for v in full)
            full = [v / norm for v in full]
            lead = next(v for v in full if v != 0)
            if lead < 0:
                full = [-v for v in full]
            found.append(full)
            found_supports.append(sset)
    return found


def primitive_lattice_vector(rows, ncols, direction):
    """Smallest positive lattice multiple of a rational direction in im(rows)."""
    denom = 1
    for v in direction:
        denom = denom * v.denominator // math.gcd(denom, v.denominator)
    ints = [int(v * denom) for v in direction]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    ints = [v // g for v in ints]
    d = snf.smallest_positive_multiple_in_image(rows, ints, ncols)
    assert d is not None, "rational direction has no lattice multiple"
    return [d * v for v in ints]


# --- expansion constants -------------------------------------------------------


@dataclass
class ExpansionReport:
    rho_real: object = None          # Fraction or None
    rho_integer: object = None
    real_exact: bool = False
    integer_exact: bool = False
    witness: object = None           # Chain attaining (or bounding) rho_real
    witness_integer: object = None
    convention_zero: bool = False
    no_boundaries: bool = False
    vertex_count: int = 0
    notes: list = field(default_factory=list)

    def to_json(self):
        from .report import chain_to_json, frac_str
        return {
            "rho_real": frac_str(self.rho_real),
            "rho_integer": frac_str(self.rho_integer),
            "real_exact": self.real_exact,
            "integer_exact": self.integer_exact,
            "convention_zero": self.convention_zero,
            "no_boundaries": self.no_boundaries,
            "vertex_count": self.vertex_count,
            "witness": chain_to_json(self.witness) if self.witness else None,
            "witness_integer": (chain_to_json(self.witness_integer)
                                if self.witness_integer else None),
            "notes": list(self.notes),
        }


def rho(x, ring="both", caps=None, allow_sampling=False):
    """Homological expansion constant inf ||z|| / Fill(z) over nonzero boundaries.

    Zero by convention when H_1 over Q is nontrivial.  The real value is exact
    (vertex enumeration); the integer value is exact when the boundary lattice
    has rank one (the primitive representative minimizes its ray, by
    subadditivity of the integral fill) and an upper bound otherwise.  When
    vertex enumeration is refused by the caps, ``allow_sampling`` switches to a
    small-support search whose result is always flagged as a bound, never
    exact.
    """
    caps = caps or SolveCaps()
    ring = "both" if ring == "both" else normalize_ring(ring)
    b1 = homology(x, 1).betti
    if b1 > 0:
        return ExpansionReport(rho_real=Fraction(0), rho_integer=Fraction(0),
                               real_exact=True, integer_exact=True,
                               convention_zero=True,
                               notes=[f"H1 has rank {b1}; rho = 0 by convention"])
    bd = x.boundary_matrix(2)
    rows = bd.rows
    nrows, ncols = bd.shape()
    rank = snf.rational_rank(rows, ncols)
    if rank == 0:
        return ExpansionReport(no_boundaries=True,
                               notes=["boundary image is zero; no nonzero boundaries"])
    try:
        vertices = l1_section_vertices(rows, nrows, ncols, caps)
    except DimensionCapExceeded:
        if not allow_sampling:
            raise
        return _rho_sampled(bd, rows, nrows, ncols, ring, caps)
    report = ExpansionReport(vertex_count=len(vertices))
    edge_labels = list(bd.row_labels)
    if ring in ("real", "both"):
        worst = None
        for v in vertices:
            _, value, _ = real_min_l1(rows, ncols, v)
            if worst is None or value > worst[0]:
                worst = (value, v)
        report.rho_real = 1 / worst[0]
        report.real_exact = True
        report.witness = Chain.from_vector(1, edge_labels, worst[1])
    if ring in ("integer", "both"):
        best = None
        for v in vertices:
            z = primitive_lattice_vector(rows, ncols, v)
            _, value, _ = integer_min_l1(rows, ncols, z, caps.node_cap)
            norm = sum(abs(t) for t in z)
            ratio = Fraction(norm, value)
            if best is None or ratio < best[0]:
                best = (ratio, z)
        if rank > 1:
            # independent upper-bound search over small-support boundaries;
            # each direction is fed back through its primitive lattice
            # representative, which minimizes the ratio along its ray
            for direction in _small_boundary_directions(rows, nrows, ncols,
                                                        caps):
                z = primitive_lattice_vector(
                    rows, ncols, [Fraction(t) for t in direction])
                _, value, _ = integer_min_l1(rows, ncols, z, caps.node_cap)
                ratio = Fraction(sum(abs(t) for t in z), value)
                if ratio < best[0]:
                    best = (ratio, z)
        report.rho_integer = best[0]
        report.witness_integer = Chain.from_vector(
            1, edge_labels, [Fraction(v) for v in best[1]])
        report.integer_exact = (rank == 1)
        if rank > 1:
            report.notes.append(
                "integer value is an upper bound (lattice rank > 1)")
    return report


def _rho_sampled(bd, rows, nrows, ncols, ring, caps):
    """Upper bounds on rho from small-support boundaries; never exact.

    The sum of all 2-cells is always included as a candidate (exempt from the
    support cap): its boundary is the fundamental-class-like witness that
    drives nonexpansion on disk-like and surface-like complexes.
    """
    report = ExpansionReport(
        notes=["vertex enumeration refused; sampled upper bounds only"])
    edge_labels = list(bd.row_labels)
    directions = _small_boundary_directions(rows, nrows, ncols, caps)
    total = snf.mat_vec(rows, [1] * ncols, ncols)
    if any(total):
        g = 0
        for t in total:
            g = math.gcd(g, t)
        directions.append([t // g for t in total])
    if not directions:
        report.notes.append("no boundaries found within the sampling caps")
        return report
    if ring in ("real", "both"):
        best = None
        for z in directions:
            _, value, _ = real_min_l1(rows, ncols, z)
            ratio = Fraction(sum(abs(t) for t in z)) / value
            if best is None or ratio < best[0]:
                best = (ratio, z)
        report.rho_real = best[0]
        report.witness = Chain.from_vector(
            1, edge_labels, [Fraction(v) for v in best[1]])
    if ring in ("integer", "both"):
        best = None
        for direction in directions:
            z = primitive_lattice_vector(rows, ncols,
                                         [Fraction(t) for t in direction])
            _, value, _ = integer_min_l1(rows, ncols, z, caps.node_cap)
            ratio = Fraction(sum(abs(t) for t in z), value)
            if best is None or ratio < best[0]:
                best = (ratio, z)
        report.rho_integer = best[0]
        report.witness_integer = Chain.from_vector(
            1, edge_labels, [Fraction(v) for v in best[1]])
    return report


def _small_boundary_directions(rows, nrows, ncols, caps):
    """Primitive boundaries of sparse 2-chains, support capped, deduplicated."""
    from itertools import combinations, product

    seen = set()
    out = []
    supports = list(combinations(range(ncols), 1))
    if ncols >= 2 and math.comb(ncols, 2) * (2 * caps.box + 1) ** 2 \
            <= caps.subset_budget:
        supports += list(combinations(range(ncols), 2))
    for support in supports:
        for coeffs in product(range(-caps.box, caps.box + 1),
                              repeat=len(support)):
            if all(c == 0 for c in coeffs):
                continue
            vec = [0] * ncols
            for j, c in zip(support, coeffs):
                vec[j] = c
            z = snf.mat_vec(rows, vec, ncols)
            nonzero = [t for t in z if t]
            if not nonzero or sum(1 for t in z if t) > caps.support_cap:
                continue
            g = 0
            for t in z:
                g = math.gcd(g, t)
            prim = tuple(t // g for t in z)
            if prim[next(i for i, t in enumerate(prim) if t)] < 0:
                prim = tuple(-t for t in prim)
            if prim in seen:
                continue
            seen.add(prim)
            out.append(list(prim))
    return out


def cochain_expansion_constant(x, ring="real", caps=None):
    """Least C with ||omega|| <= C ||eta|| over primitives of 2-coboundaries.

    Same vertex reduction as rho, on the transposed boundary matrix.  The
    integer value reported is the maximum over primitive lattice
    representatives of the vertex directions; each direction's supremum is
    attained at its primitive representative by subadditivity.
    """
    caps = caps or SolveCaps()
    ring = normalize_ring(ring)
    bd = x.boundary_matrix(2)
    rows = bd.transpose_rows()
    nrows, ncols = len(bd.col_labels), len(bd.row_labels)
    rank = snf.rational_rank(rows, ncols)
    if rank == 0:
        return None, []
    vertices = l1_section_vertices(rows, nrows, ncols, caps)
    if ring == "real":
        worst = Fraction(0)
        for v in vertices:
            _, value, _ = real_min_l1(rows, ncols, v)
            worst = max(worst, value)
        return worst, vertices
    worst = Fraction(0)
    for v in vertices:
        eta = primitive_lattice_vector(rows, ncols, v)
        _, value, _ = integer_min_l1(rows, ncols, eta, caps.node_cap)
        norm = sum(abs(t) for t in eta)
        worst = max(worst, Fraction(value, norm))
    return worst, vertices


def check_integral_real_agreement(x, caps=None, seed=0):
    """Compare integral and real cochain expansion constants exactly.

    Requires H^1(X; R) = 0.  Also samples random integral coboundaries and
    checks the pointwise equality Fill_Z = Fill_R that drives the agreement;
    any discrepancy is reported (and treated as a failure by the test suite).
    """
    import random

    caps = caps or SolveCaps()
    b1 = homology(x, 1).betti
    bd = x.boundary_matrix(2)
    nrows, ncols = bd.shape()
    coh_b1 = nrows - snf.rational_rank(x.boundary_matrix(1).rows, nrows) \
        - snf.rational_rank(bd.rows, ncols)
    if b1 != 0 or coh_b1 != 0:
        raise PreconditionViolated(
            f"H^1(X;R) must vanish; betti_1 = {max(b1, coh_b1)}",
            betti=max(b1, coh_b1))
    real_const, _ = cochain_expansion_constant(x, "real", caps)
    int_const, _ = cochain_expansion_constant(x, "integer", caps)
    report = {
        "constant_real": real_const,
        "constant_integer": int_const,
        "equal": real_const == int_const,
        "samples_checked": 0,
        "samples_agree": True,
    }
    if real_const is None:
        return report
    rng = random.Random(seed)
    rows = bd.transpose_rows()
    n_edges = len(bd.row_labels)
    checked = 0
    for _ in range(caps.samples):
        omega = [rng.randint(-2, 2) for _ in range(n_edges)]
        eta = snf.mat_vec(rows, omega, n_edges)
        if all(v == 0 for v in eta):
            continue
        _, real_val, _ = real_min_l1(rows, n_edges, eta)
        _, int_val, _ = integer_min_l1(rows, n_edges, eta, caps.node_cap)
        checked += 1
        if Fraction(int_val) != real_val:
            report["samples_agree"] = False
            report["equal"] = False
            break
    report["samples_checked"] = checked
    return report


# --- operator norms and the homotopy-transfer bound ---------------------------


def l1_operator_norm(rows, ncols=None):
    """l1-to-l1 operator norm of a matrix: max column l1 norm."""
    m, n = snf.shape(rows, ncols)
    best = Fraction(0)
    for j in range(n):
        col = sum(abs(Fraction(rows[i][j])) for i in range(m))
        best = max(best, col)
    return best


def transfer_bound(c, k):
    """The transported expansion constant bound (C*K + 1) * K."""
    return (Fraction(c) * Fraction(k) + 1) * Fraction(k)


def verify_transfer_inequality(c, k, c_target):
    """True iff the measured target constant obeys C_target <= (C*K + 1)*K."""
    if c < 0 or k < 0:
        raise PreconditionViolated("operator norms must be nonnegative")
    return Fraction(c_target) <= transfer_bound(c, k)
