"""Metric tools on the 1-skeleton: balls, 4-point hyperbolicity, divergence.

The 1-skeleton carries the path metric with unit edge lengths.  The cellular
radius-R neighborhood of a vertex set is the full subcomplex spanned by the
vertices within distance R; in particular a 2-cell belongs to it iff every
vertex of its boundary word does.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .complexes import CellComplex2
from .errors import EndpointMismatch, PreconditionViolated


@dataclass(frozen=True)
class Subcomplex:
    """A full or partial subcomplex of a parent complex, by id sets."""

    parent: CellComplex2
    vertices: frozenset
    edges: frozenset
    cells: frozenset

    def cells_of_dim(self, d):
        return (self.vertices, self.edges, self.cells)[d]

    def cell_counts(self):
        return [len(self.vertices), len(self.edges), len(self.cells)]

    def as_complex(self, name=None):
        p = self.parent
        return CellComplex2(
            name or f"{p.name}|sub",
            [v for v in p.vertices if v in self.vertices],
            [e for e in p.edges if e[0] in self.edges],
            [c for c in p.twocells if c[0] in self.cells])

    def contains_chain(self, chain):
        dim_cells = self.cells_of_dim(chain.degree)
        return all(c in dim_cells for c in chain.coeffs)


@dataclass(frozen=True)
class MetricBall:
    """Cellular R-neighborhood of a center vertex, with its distance table."""

    subcomplex: Subcomplex
    center: str
    radius: int
    distances: dict

    @property
    def parent(self):
        return self.subcomplex.parent

    def boundary_vertices(self):
        return frozenset(v for v, d in self.distances.items()
                         if d == self.radius and v in self.subcomplex.vertices)


def adjacency(x):
    adj = {v: [] for v in x.vertices}
    for e, s, t in x.edges:
        adj[s].append((t, e))
        if s != t:
            adj[t].append((s, e))
    return adj


def vertex_distances(x, sources, within=None, edges=None):
    """BFS distances from a set of sources.

    ``within`` restricts the vertex set, ``edges`` the usable edge ids (for
    distances inside a subcomplex that is not full).
    """
    adj = adjacency(x)
    dist = {}
    queue = []
    for v in sources:
        if within is not None and v not in within:
            continue
        if v not in dist:
            dist[v] = 0
            queue.append(v)
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for w, e in adj[v]:
            if within is not None and w not in within:
                continue
            if edges is not None and e not in edges:
                continue
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def full_subcomplex(x, vertex_set):
    """Edges and 2-cells all of whose boundary vertices lie in the set."""
    vset = frozenset(vertex_set)
    edges = frozenset(e for e, s, t in x.edges if s in vset and t in vset)
    cells = []
    for c, word in x.twocells:
        ok = all(e in edges for e, _ in word)
        if ok:
            cells.append(c)
    return Subcomplex(x, vset, edges, frozenset(cells))


def cellular_neighborhood(x, seed, radius):
    """Full subcomplex spanned by vertices within ``radius`` of the seed set.

    The seed may be a vertex set or an edge word (its vertices are used).
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    seed_vertices = _seed_vertices(x, seed)
    dist = vertex_distances(x, seed_vertices)
    inside = {v for v, d in dist.items() if d <= radius}
    return full_subcomplex(x, inside)


def metric_ball(x, center, radius):
    dist = vertex_distances(x, [center])
    inside = {v for v, d in dist.items() if d <= radius}
    sub = full_subcomplex(x, inside)
    return MetricBall(sub, center, radius,
                      {v: d for v, d in dist.items() if d <= radius})


def _seed_vertices(x, seed):
    if isinstance(seed, str):
        return [seed]
    seed = list(seed)
    if seed and isinstance(seed[0], tuple):
        verts = []
        for letter in seed:
            s, t = x.letter_endpoints(letter)
            verts.extend((s, t))
        return list(dict.fromkeys(verts))
    return seed


def estimate_delta(x, sub=None):
    """Exact maximum 4-point defect over vertex quadruples of the 1-skeleton.

    Works on a complex or a subcomplex; requires the 1-skeleton connected.
    Trees give exactly 0.
    """
    if sub is None and isinstance(x, Subcomplex):
        x, sub = x.parent, x
    vertices = sorted(sub.vertices, key=x.vertex_index) if sub else list(x.vertices)
    within = frozenset(vertices) if sub else None
    if len(vertices) <= 1:
        return Fraction(0)
    edge_filter = sub.edges if sub else None
    dist = {}
    for v in vertices:
        dv = vertex_distances(x, [v], within, edge_filter)
        if len(dv) != len(vertices):
            raise PreconditionViolated("subcomplex 1-skeleton is not connected")
        dist[v] = dv
    best = Fraction(0)
    for a, b, c, d in combinations(vertices, 4):
        s1 = dist[a][b] + dist[c][d]
        s2 = dist[a][c] + dist[b][d]
        s3 = dist[a][d] + dist[b][c]
        lo, mid, hi = sorted((s1, s2, s3))
        defect = Fraction(hi - mid, 2)
        if defect > best:
            best = defect
    return best


def path_vertices(x, start, letters):
    """Vertex itinerary of an edge path starting at ``start``."""
    verts = [start]
    for letter in letters:
        s, t = x.letter_endpoints(letter)
        if s != verts[-1]:
            raise EndpointMismatch(
                f"letter {letter} starts at {s}, path is at {verts[-1]}")
        verts.append(t)
    return verts


def shortest_path(x, p, q, within=None):
    """A geodesic edge path p -> q (BFS, deterministic tie-break)."""
    adj = adjacency(x)
    prev = {p: None}
    queue = [p]
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        if v == q:
            break
        for w, e in adj[v]:
            if within is not None and w not in within:
                continue
            if w not in prev:
                prev[w] = (v, e)
                queue.append(w)
    if q not in prev:
        return None
    letters = []
    cur = q
    while prev[cur] is not None:
        v, e = prev[cur]
        s, t = x.edge_endpoints(e)
        letters.append((e, 1 if (s, t) == (v, cur) else -1))
        cur = v
    letters.reverse()
    return letters


def check_divergence(ball, geodesic, path, delta):
    """Logarithmic geodesic-divergence check with exact power comparisons.

    True iff every vertex x on the geodesic satisfies
    d(x, path) <= delta * log2(len(path)) + 1, distances taken in the ball's
    1-skeleton.  The comparison 2^((d-1)/delta) <= len(path) is evaluated on
    integers, so no rounding enters.
    """
    x = ball.parent
    within = ball.subcomplex.vertices
    start = _geodesic_start(x, geodesic, path)
    gverts = path_vertices(x, start, geodesic)
    cverts = path_vertices(x, start, path) if path else [start]
    if gverts[-1] != cverts[-1] or gverts[0] != cverts[0]:
        raise EndpointMismatch("geodesic and comparison path endpoints differ")
    dist_check = vertex_distances(x, [gverts[0]], within)
    if dist_check.get(gverts[-1]) != len(geodesic):
        raise PreconditionViolated("supplied segment is not a shortest path")
    length = len(path)
    delta = Fraction(delta)
    edge_filter = ball.subcomplex.edges
    for v in gverts:
        dists = vertex_distances(x, [v], within, edge_filter)
        reachable = [dists[w] for w in cverts if w in dists]
        if not reachable:
            return False  # the comparison path escapes the ball
        d = min(reachable)
        if d <= 1:
            continue
        if length == 0:
            return False
        if delta == 0:
            return False
        # d <= delta*log2(L) + 1  <=>  2^((d-1)/delta) <= L
        if not _pow2_leq((d - 1) / delta, length):
            return False
    return True


def _geodesic_start(x, geodesic, path):
    if geodesic:
        return x.letter_endpoints(geodesic[0])[0]
    if path:
        return x.letter_endpoints(path[0])[0]
    raise EndpointMismatch("both paths are empty; no endpoints to compare")


def _pow2_leq(exponent, bound):
    """Exact test 2**exponent <= bound for rational exponent, integer bound >= 1."""
    e = Fraction(exponent)
    p, q = e.numerator, e.denominator
    if p >= 0:
        return 2 ** p <= bound ** q
    return 1 <= bound ** q * 2 ** (-p)
