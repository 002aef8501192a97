"""Systole certificates, tubes, boundary-trace decomposition, tower experiments.

Essentiality of loops is certificate-based and one-sided: a loop is certified
by a nonzero integral H_1 class or by non-identity monodromy under a supplied
permutation rep.  No nullhomotopy decision is ever attempted.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from . import snf
from .complexes import Chain, homology, euler_characteristic
from .errors import (
    DecompositionMismatch,
    DimensionCapExceeded,
    PreconditionViolated,
    SearchCapExceeded,
)
from .filling import SolveCaps, integer_min_l1, rho
from .geometry import cellular_neighborhood, metric_ball

H1_CLASS = "NONZERO_H1_CLASS"
QUOTIENT = "NONTRIVIAL_IN_QUOTIENT"


@dataclass
class SystoleCertificate:
    loop: tuple            # letters
    length: int
    kind: str              # H1_CLASS or QUOTIENT
    rep_name: str = None
    note: str = ""

    def to_json(self):
        from .complexes import letter_str
        return {"loop": [letter_str(l) for l in self.loop],
                "length": self.length, "certificate": self.kind,
                "rep": self.rep_name, "note": self.note}


def loop_chain(x, letters):
    return x.word_chain(letters)


def certify_loop(x, letters, reps=(), factor=None):
    """Recheck essentiality from scratch; returns (kind, rep_name) or None.

    ``factor`` may hold a precomputed Smith factorization of the degree-2
    boundary matrix (reused across the many membership tests of a scan).
    """
    chain = loop_chain(x, letters)
    bd2 = x.boundary_matrix(2)
    vec = [int(v) for v in chain.vector(bd2.row_labels)]
    if factor is None:
        factor = snf.smith_normal_form(bd2.rows, len(bd2.col_labels))
    if not snf.in_integer_image(factor, vec):
        return (H1_CLASS, None)
    for rep in reps:
        if not rep.is_identity_on(letters):
            return (QUOTIENT, rep.name)
    return None


def find_essential_loop(x, reps=(), cap=6):
    """Shortest certified essential loop, scanning closed paths by length.

    Paths are enumerated without immediate backtracks (a shortest essential
    loop is cyclically reduced), by start vertex in basis order and then
    lexicographically in the letter order.  Returns a SystoleCertificate or
    None when the length cap is exhausted.
    """
    if cap < 1:
        raise PreconditionViolated("length cap must be >= 1")
    bd2 = x.boundary_matrix(2)
    factor = snf.smith_normal_form(bd2.rows, len(bd2.col_labels))
    letters_at = {v: [] for v in x.vertices}
    for e, s, t in x.edges:
        letters_at[s].append(((e, 1), t))
        letters_at[t].append(((e, -1), s))
    for length in range(1, cap + 1):
        for start in x.vertices:
            stack = [((), start)]
            while stack:
                word, at = stack.pop()
                if len(word) == length:
                    if at != start:
                        continue
                    if len(word) > 1 and word[0] == (word[-1][0], -word[-1][1]):
                        continue
                    hit = certify_loop(x, word, reps, factor)
                    if hit is not None:
                        return SystoleCertificate(
                            word, length, hit[0], hit[1],
                            note=(f"no essential loop of length < {length} "
                                  "under the same certificate family"))
                    continue
                for letter, nxt in reversed(letters_at[at]):
                    if word and letter == (word[-1][0], -word[-1][1]):
                        continue
                    stack.append((word + (letter,), nxt))
    return None


@dataclass
class Tube:
    """Cellular neighborhood of radius floor((L-1)/4) of a certified loop."""

    complex: object
    loop: tuple
    length: int
    radius: int
    subcomplex: object

    def to_json(self):
        from .complexes import letter_str
        v, e, f = self.subcomplex.cell_counts()
        return {"loop": [letter_str(l) for l in self.loop],
                "length": self.length, "radius": self.radius,
                "cells": [v, e, f]}


def build_tube(x, letters):
    length = len(letters)
    if length < 1:
        raise PreconditionViolated("tube loop must be nonempty")
    radius = (length - 1) // 4
    sub = cellular_neighborhood(x, list(letters), radius)
    return Tube(x, tuple(letters), length, radius, sub)


# --- boundary trace decomposition -------------------------------------------


@dataclass
class TraceDecomposition:
    paths: list            # edge-letter paths joining the exit/entry vertices
    loops: list            # closed edge-letter paths
    u: str                 # entry vertex (start of the carried loop arc)
    v: str                 # exit vertex
    tau: Chain             # the decomposed 1-chain
    arc: tuple             # letters of the loop arc carried by bd(A|_B)

    def to_json(self):
        from .complexes import letter_str
        from .report import chain_to_json
        return {"paths": [[letter_str(l) for l in p] for p in self.paths],
                "loops": [[letter_str(l) for l in p] for p in self.loops],
                "u": self.u, "v": self.v, "tau": chain_to_json(self.tau)}


def boundary_trace_decomposition(tube, ball, a_chain, m):
    """Decompose the off-loop part of bd(A|_B) into u-v paths plus loops.

    A is a 2-chain in the tube with bd(A) = m*g + (terms on the tube
    boundary).  Restricting A to the ball B leaves m times a contiguous arc of
    g plus a trace tau; tau decomposes (greedy trail extraction, smallest edge
    id first) into at least |m| paths joining the arc endpoints, plus loops.
    Raises DecompositionMismatch when the input bookkeeping fails
    (bd(tau) != m*(u - v)).
    """
    x = tube.complex
    if not a_chain.integral:
        raise DecompositionMismatch("the 2-chain must be integral")
    restricted = Chain(2, {c: v for c, v in a_chain.coeffs.items()
                           if c in ball.subcomplex.cells})
    bd2 = x.boundary_matrix(2)
    vec = restricted.vector(bd2.col_labels)
    chi = Chain.from_vector(1, bd2.row_labels, bd2.apply(vec))
    arc, u, v = _carried_arc(x, tube.loop, chi, m)
    arc_chain = x.word_chain(arc).scaled(m) if arc else Chain(1, {})
    tau = chi - arc_chain
    loop_edges = {e for e, _ in tube.loop}
    if any(e in loop_edges for e in tau.coeffs):
        raise DecompositionMismatch(
            "trace chain still meets the loop after removing the carried arc")
    boundary = _chain_boundary_0(x, tau)
    expected = {}
    if m and u != v:
        expected = {u: Fraction(m), v: Fraction(-m)}
    if boundary != expected:
        raise DecompositionMismatch(
            f"bd(tau) != m*(u - v); got {sorted(boundary.items())}")
    paths, loops = _trail_decomposition(x, tau, u, v, m)
    return TraceDecomposition(paths, loops, u, v, tau, arc)


def _carried_arc(x, loop, chi, m):
    """The contiguous sub-arc of the loop carried with coefficient m by chi."""
    if m != 0 and len({e for e, _ in loop}) != len(loop):
        raise DecompositionMismatch(
            "loop repeats an edge; arc bookkeeping is ambiguous")
    coeffs = []
    for letter in loop:
        e, sign = letter
        coeffs.append(chi.get(e) * sign)
    length = len(loop)
    if m == 0:
        if any(c != 0 for c in coeffs):
            raise DecompositionMismatch(
                "m = 0 but the restricted boundary meets the loop")
        return (), None, None
    carried = [i for i, c in enumerate(coeffs) if c == m]
    if len(carried) == length:
        start = x.letter_endpoints(loop[0])[0]
        return tuple(loop), start, start
    if not carried or any(c not in (0, m) for c in coeffs):
        raise DecompositionMismatch(
            "restricted boundary does not carry m times a sub-arc of the loop")
    carried_set = set(carried)
    starts = [i for i in carried if (i - 1) % length not in carried_set]
    if len(starts) != 1:
        raise DecompositionMismatch(
            "carried part of the loop is not a single contiguous arc")
    i = starts[0]
    arc = tuple(loop[(i + k) % length] for k in range(len(carried)))
    u = x.letter_endpoints(arc[0])[0]
    v = x.letter_endpoints(arc[-1])[1]
    return arc, u, v


def _chain_boundary_0(x, chain):
    out = {}
    for e, c in chain.coeffs.items():
        s, t = x.edge_endpoints(e)
        out[t] = out.get(t, Fraction(0)) + c
        out[s] = out.get(s, Fraction(0)) - c
    return {k: v for k, v in out.items() if v != 0}


def _trail_decomposition(x, tau, u, v, m):
    """Greedy Hierholzer trail extraction; |m| trails then leftover loops."""
    edge_order = {e: i for i, (e, _, _) in enumerate(x.edges)}
    out_edges = {}
    for e, c in tau.coeffs.items():
        assert c.denominator == 1
        k = int(c)
        s, t = x.edge_endpoints(e)
        if k > 0:
            out_edges.setdefault(s, []).append([(e, 1), t, abs(k)])
        else:
            out_edges.setdefault(t, []).append([(e, -1), s, abs(k)])
    for lst in out_edges.values():
        lst.sort(key=lambda rec: edge_order[rec[0][0]])

    def walk(start):
        trail = []
        at = start
        while True:
            nxt = None
            for rec in out_edges.get(at, ()):
                if rec[2] > 0:
                    nxt = rec
                    break
            if nxt is None:
                return trail, at
            nxt[2] -= 1
            trail.append(nxt[0])
            at = nxt[1]

    paths = []
    start = v if m > 0 else u
    end = u if m > 0 else v
    for _ in range(abs(m)):
        trail, at = walk(start)
        if not trail or at != end:
            raise DecompositionMismatch(
                "trail extraction failed to reach the opposite arc endpoint")
        paths.append(trail)
    loops = []
    for vertex in sorted(out_edges, key=x.vertex_index):
        while any(rec[2] > 0 for rec in out_edges[vertex]):
            trail, at = walk(vertex)
            if not trail:
                break
            if at != vertex:
                raise DecompositionMismatch("leftover trace is not balanced")
            loops.append(trail)
    return paths, loops


# --- the superlinear lower-bound certificate ----------------------------------


def max_boundary_word_length(x):
    return max((len(word) for _, word in x.twocells), default=0)


def bracket_pow2(exponent, rel_digits=7):
    """Rational bracket [lo, hi] around 2**exponent, relative width < 10^-6."""
    e = Fraction(exponent)
    p, q = e.numerator, e.denominator
    scale = 10 ** rel_digits
    if p >= 0:
        base = 2 ** p * scale ** q
        root = _iroot(base, q)
        lo = Fraction(root, scale)
        hi = Fraction(root + 1, scale)
    else:
        base = 2 ** (-p) * scale ** q
        root = _iroot(base, q)
        lo = Fraction(scale, root + 1)
        hi = Fraction(scale, root)
    return lo, hi


def _iroot(n, k):
    """Largest integer r with r**k <= n."""
    if k == 1:
        return n
    r = int(round(n ** (1.0 / k))) if n < 10 ** 15 else 1 << ((n.bit_length() + k) // k)
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


@dataclass
class SuperlinearReport:
    m: int
    radius: int
    r0: int
    c: Fraction
    delta: Fraction
    lhs_bracket: tuple      # exact rational bracket around |m| * 2^((R-R0-1)/delta)
    rhs: Fraction           # C * ||A||
    holds: bool             # exact comparison, not via the bracket
    path_count: int
    path_length_sum: int
    trace_bound_holds: bool  # sum of path lengths <= C * ||A||

    def to_json(self):
        from .report import frac_str
        return {"m": self.m, "radius": self.radius, "r0": self.r0,
                "c": frac_str(self.c), "delta": frac_str(self.delta),
                "lhs_low": frac_str(self.lhs_bracket[0]),
                "lhs_high": frac_str(self.lhs_bracket[1]),
                "rhs": frac_str(self.rhs), "holds": self.holds,
                "path_count": self.path_count,
                "path_length_sum": self.path_length_sum,
                "trace_bound_holds": self.trace_bound_holds}


def superlinear_certificate(tube, a_chain, m, delta, r0=None, c=None):
    """Evaluate |m| * 2^((R-R0-1)/delta) <= C * ||A|| exactly.

    R0 and C default to the maximal 2-cell boundary word length of the
    complex.  The power is compared via integer arithmetic; the reported
    bracket is only for display.  Also checks the trace-length bound
    sum len(c_k) <= C * ||A|| from the decomposition.
    """
    x = tube.complex
    delta = Fraction(delta)
    if delta <= 0:
        raise PreconditionViolated("delta must be positive")
    word_len = max_boundary_word_length(x)
    r0 = word_len if r0 is None else r0
    c = Fraction(word_len if c is None else c)
    center = x.letter_endpoints(tube.loop[0])[0]
    ball = metric_ball(x, center, tube.radius)
    decomp = boundary_trace_decomposition(tube, ball, a_chain, m)
    rhs = c * a_chain.l1_norm()
    exponent = Fraction(tube.radius - r0 - 1) / delta
    if m == 0:
        bracket = (Fraction(0), Fraction(0))
        holds = True
    else:
        lo, hi = bracket_pow2(exponent)
        bracket = (abs(m) * lo, abs(m) * hi)
        holds = _scaled_pow2_leq(abs(m), exponent, rhs)
    lengths = sum(len(p) for p in decomp.paths)
    return SuperlinearReport(
        m=m, radius=tube.radius, r0=r0, c=c, delta=delta,
        lhs_bracket=bracket, rhs=rhs, holds=holds,
        path_count=len(decomp.paths), path_length_sum=lengths,
        trace_bound_holds=Fraction(lengths) <= rhs)


def _scaled_pow2_leq(scale, exponent, bound):
    """Exact test scale * 2**exponent <= bound (scale >= 1, bound rational)."""
    e = Fraction(exponent)
    p, q = e.numerator, e.denominator
    bound = Fraction(bound)
    if bound <= 0:
        return False
    left_num = scale ** q * bound.denominator ** q
    right_num = bound.numerator ** q
    if p >= 0:
        return left_num * 2 ** p <= right_num
    return left_num <= right_num * 2 ** (-p)


# --- the residual-tower nonexpansion experiment -------------------------------

B1_POSITIVE = "b1_positive"
WITNESS_FOUND = "witness_found"
CAPS_EXHAUSTED = "caps_exhausted"


@dataclass
class ExperimentConfig:
    eps: Fraction = Fraction(1, 10)
    caps: SolveCaps = field(default_factory=SolveCaps)
    loop_cap: int = 4
    ratio_series: bool = True

    def to_json(self):
        from .report import frac_str
        return {"eps": frac_str(self.eps), "caps": self.caps.to_json(),
                "loop_cap": self.loop_cap, "ratio_series": self.ratio_series}


@dataclass
class LevelReport:
    level: int
    degree: int
    cumulative_degree: int
    cells: list
    chi: int
    b1: int
    torsion: list
    state: str
    rho_real: object = None
    rho_integer: object = None
    rho_exact: bool = False
    witness_ratio: object = None
    systole: object = None          # SystoleCertificate or None
    systole_cap: int = 0
    fill_ratio: object = None       # ||A|| / (d * L) for the systole loop
    nullhomologous_multiple: object = None
    caps_hit: list = field(default_factory=list)

    def to_json(self):
        from .report import frac_str
        return {
            "level": self.level, "degree": self.degree,
            "cumulative_degree": self.cumulative_degree,
            "cells": self.cells, "chi": self.chi, "b1": self.b1,
            "torsion": self.torsion, "state": self.state,
            "rho_real": frac_str(self.rho_real),
            "rho_integer": frac_str(self.rho_integer),
            "rho_exact": self.rho_exact,
            "witness_ratio": frac_str(self.witness_ratio),
            "systole": self.systole.to_json() if self.systole else None,
            "systole_cap": self.systole_cap,
            "fill_ratio": frac_str(self.fill_ratio),
            "nullhomologous_multiple": self.nullhomologous_multiple,
            "caps_hit": self.caps_hit,
        }


@dataclass
class TowerReport:
    levels: list
    verdict: str
    config: ExperimentConfig

    def to_json(self):
        from .report import schema
        return {"schema": schema("tower-report"),
                "config": self.config.to_json(),
                "verdict": self.verdict,
                "levels": [lvl.to_json() for lvl in self.levels]}


def tower_experiment(tower, config=None, reps_by_level=None):
    """Per-level nonexpansion data for a tower of covers.

    Every level lands in exactly one state: b1 > 0 (rho = 0 by convention), a
    witness boundary with ||z|| < eps * Fill(z) was exhibited, or the caps were
    exhausted without one.  Cap failures are flagged per level and never abort
    the experiment.
    """
    config = config or ExperimentConfig()
    levels = []
    for j in range(tower.height() + 1):
        m = tower.complex_at(j)
        levels.append(_level_report(tower, j, m, config, reps_by_level))
    if any(l.state == B1_POSITIVE for l in levels):
        verdict = B1_POSITIVE
    elif any(l.state == WITNESS_FOUND for l in levels):
        verdict = WITNESS_FOUND
    else:
        verdict = CAPS_EXHAUSTED
    return TowerReport(levels, verdict, config)


def _level_report(tower, j, m, config, reps_by_level):
    h1 = homology(m, 1)
    rep_degree = 1 if j == 0 else tower.levels[j - 1].rep.degree
    report = LevelReport(
        level=j, degree=rep_degree,
        cumulative_degree=tower.cumulative_degree(j),
        cells=m.cell_counts(), chi=euler_characteristic(m),
        b1=h1.betti, torsion=list(h1.torsion), state=CAPS_EXHAUSTED)
    if h1.betti > 0:
        report.state = B1_POSITIVE
        report.rho_real = Fraction(0)
        report.rho_integer = Fraction(0)
        report.rho_exact = True
        return report
    try:
        try:
            rep = rho(m, "both", config.caps)
        except DimensionCapExceeded:
            # enumeration refused: fall back to sampled upper bounds; a
            # certified sub-eps ratio is still a genuine witness
            report.caps_hit.append("dim_cap")
            rep = rho(m, "both", config.caps, allow_sampling=True)
        report.rho_real = rep.rho_real
        report.rho_integer = rep.rho_integer
        report.rho_exact = rep.real_exact and rep.integer_exact
        if rep.rho_integer is not None:
            report.witness_ratio = rep.rho_integer
            if rep.rho_integer < config.eps:
                report.state = WITNESS_FOUND
    except DimensionCapExceeded:
        report.caps_hit.append("dim_cap")
    except SearchCapExceeded:
        report.caps_hit.append("node_cap")
    _level_systole(tower, j, m, config, reps_by_level, report)
    return report


def _level_systole(tower, j, m, config, reps_by_level, report):
    reps = ()
    if reps_by_level and j < len(reps_by_level):
        reps = tuple(reps_by_level[j])
    elif j < tower.height():
        reps = (tower.levels[j].rep,)
    report.systole_cap = config.loop_cap
    cert = find_essential_loop(m, reps, config.loop_cap)
    if cert is None:
        return
    report.systole = cert
    if not config.ratio_series or report.b1 > 0:
        return
    bd2 = m.boundary_matrix(2)
    z = loop_chain(m, cert.loop)
    vec = [int(v) for v in z.vector(bd2.row_labels)]
    d = snf.smallest_positive_multiple_in_image(bd2.rows, vec,
                                                len(bd2.col_labels))
    if d is None:
        return
    report.nullhomologous_multiple = d
    try:
        _, value, _ = integer_min_l1(bd2.rows, len(bd2.col_labels),
                                     [d * t for t in vec],
                                     config.caps.node_cap)
        report.fill_ratio = Fraction(value, d * cert.length)
    except SearchCapExceeded:
        report.caps_hit.append("node_cap")
