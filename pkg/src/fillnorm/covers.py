"""Finite covers of 2-complexes from permutation monodromy, and cover towers.

A cover is encoded by a permutation of the fiber {1..n} per edge.  The rep is
admissible when the monodromy around every 2-cell boundary word is the
identity; each base cell then lifts to one cell per sheet.  Sheet bookkeeping
is deterministic: lifted cell ids are "<base id>@<sheet>", base points always
lift to sheet 1.
"""

from dataclasses import dataclass, field

from . import snf
from .complexes import CellComplex2, homology
from .errors import (
    DanglingReference,
    DegreeCapExceeded,
    LevelOutOfRange,
    MalformedSyntax,
    MonodromyObstruction,
    TrivialQuotient,
)


class PermRep:
    """Permutation representation: one permutation of {1..n} per edge.

    ``images[e]`` is a tuple p with p[i-1] = image of sheet i; edges without an
    entry act as the identity.
    """

    def __init__(self, degree, images, name="rep"):
        if degree < 1:
            raise MalformedSyntax("permutation degree must be >= 1")
        self.degree = degree
        self.name = name
        self.images = {}
        for edge, perm in images.items():
            perm = tuple(perm)
            if sorted(perm) != list(range(1, degree + 1)):
                raise MalformedSyntax(
                    f"image of {edge} is not a permutation of 1..{degree}")
            self.images[edge] = perm

    def image(self, edge):
        return self.images.get(edge, tuple(range(1, self.degree + 1)))

    def apply(self, edge, sheet, sign=1):
        perm = self.image(edge)
        if sign > 0:
            return perm[sheet - 1]
        return perm.index(sheet) + 1

    def word_monodromy(self, word):
        """Permutation of sheets obtained by walking the word once."""
        out = []
        for start in range(1, self.degree + 1):
            sheet = start
            for edge, sign in word:
                sheet = self.apply(edge, sheet, sign)
            out.append(sheet)
        return tuple(out)

    def is_identity_on(self, word):
        return self.word_monodromy(word) == tuple(range(1, self.degree + 1))

    def validate_for(self, x):
        for edge in self.images:
            if not x.has_edge(edge):
                raise DanglingReference(f"rep names unknown edge {edge}")
        for cell, word in x.twocells:
            if not self.is_identity_on(word):
                raise MonodromyObstruction(
                    f"boundary word of cell {cell} has non-identity monodromy",
                    cell=cell)

    def __repr__(self):
        return f"PermRep({self.name!r}, degree={self.degree})"


def trivial_rep(name="trivial"):
    return PermRep(1, {}, name=name)


def parse_permrep(text):
    """Parse ``permrep NAME`` / ``degree: n`` / ``gen a: 2 1 3`` documents."""
    name = None
    degree = None
    images = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "permrep":
            if len(parts) != 2:
                raise MalformedSyntax("expected 'permrep NAME'")
            name = parts[1]
        elif parts[0] == "degree:":
            degree = int(parts[1])
        elif parts[0] == "gen":
            if len(parts) < 3 or not parts[1].endswith(":"):
                raise MalformedSyntax(f"expected 'gen ID: i1 i2 ...', got {line!r}")
            images[parts[1][:-1]] = tuple(int(t) for t in parts[2:])
        else:
            raise MalformedSyntax(f"unrecognized line {line!r}")
    if name is None or degree is None:
        raise MalformedSyntax("permrep document needs a name and a degree")
    return PermRep(degree, images, name=name)


def permrep_to_text(rep):
    lines = [f"permrep {rep.name}", f"degree: {rep.degree}"]
    for edge in sorted(rep.images):
        lines.append(f"gen {edge}: " + " ".join(map(str, rep.images[edge])))
    return "\n".join(lines) + "\n"


@dataclass
class CellMap:
    """Cell projection maps of a covering, one dict per dimension."""

    vertex_map: dict
    edge_map: dict
    cell_map: dict

    def of_dim(self, d):
        return (self.vertex_map, self.edge_map, self.cell_map)[d]


def build_cover(x, rep):
    """The covering complex of x determined by rep, with its projection.

    Vertices and edges lift one per sheet; the target sheet of a lifted edge is
    the image of its source sheet.  Each 2-cell lifts to one cell per sheet
    (the rep is required to have identity boundary monodromy), the lift with
    sheet s starting its boundary walk on sheet s.
    """
    rep.validate_for(x)
    n = rep.degree
    sheets = range(1, n + 1)
    vertices = [f"{v}@{s}" for v in x.vertices for s in sheets]
    vertex_map = {f"{v}@{s}": v for v in x.vertices for s in sheets}
    edges = []
    edge_map = {}
    for e, src, dst in x.edges:
        for s in sheets:
            eid = f"{e}@{s}"
            edges.append((eid, f"{src}@{s}", f"{dst}@{rep.apply(e, s)}"))
            edge_map[eid] = e
    cells = []
    cell_map = {}
    for c, word in x.twocells:
        for s in sheets:
            sheet = s
            lifted = []
            for edge, sign in word:
                if sign > 0:
                    lifted.append((f"{edge}@{sheet}", 1))
                    sheet = rep.apply(edge, sheet)
                else:
                    sheet = rep.apply(edge, sheet, -1)
                    lifted.append((f"{edge}@{sheet}", -1))
            assert sheet == s
            cid = f"{c}@{s}"
            cells.append((cid, tuple(lifted)))
            cell_map[cid] = c
    cover = CellComplex2(f"{x.name}^{rep.name}", vertices, edges, cells)
    return cover, CellMap(vertex_map, edge_map, cell_map)


def mod_p_homology_rep(x, p, max_degree=4096):
    """Permutation rep from the regular action of H_1(X; Z/p).

    Edges map to translations by their loop class (relative to a BFS spanning
    forest); the rep has degree p^k with k = dim H_1(X; F_p).
    """
    n_e = len(x.edges)
    bd1 = x.boundary_matrix(1)
    bd2 = x.boundary_matrix(2)
    kernel = snf.kernel_basis_mod_p(bd1.rows, p, n_e)
    k_mat = snf.transpose(kernel, n_e) if kernel else [[] for _ in range(n_e)]
    m = len(kernel)
    # 2-cell boundaries in kernel coordinates
    b2_cols = []
    for j in range(len(x.twocells)):
        col = [bd2.rows[i][j] % p for i in range(n_e)]
        y = snf.solve_mod_p(k_mat, col, p, m)
        assert y is not None
        b2_cols.append(y)
    b2 = snf.transpose(b2_cols, m) if b2_cols else [[] for _ in range(m)]
    quot = snf.kernel_basis_mod_p(snf.transpose(b2, len(b2_cols)), p, m)
    k = len(quot)
    if k == 0:
        raise TrivialQuotient(f"H_1(X; Z/{p}) is trivial")
    degree = p ** k
    if degree > max_degree:
        raise DegreeCapExceeded(
            f"regular action degree {p}^{k} exceeds the cap {max_degree}",
            degree=degree, cap=max_degree)
    classes = _edge_classes_mod_p(x, p, k_mat, m, quot)
    images = {}
    for idx, (e, _, _) in enumerate(x.edges):
        cls = classes[idx]
        if any(cls):
            images[e] = _translation_perm(cls, p, k)
    return PermRep(degree, images, name=f"h1mod{p}")


def _edge_classes_mod_p(x, p, k_mat, m, quot):
    """Class of each edge's forest loop in H_1(F_p) coordinates."""
    n_e = len(x.edges)
    # BFS spanning forest: mu[v] = 1-chain of the tree path from the root
    mu = {}
    adj = {v: [] for v in x.vertices}
    for idx, (e, src, dst) in enumerate(x.edges):
        adj[src].append((idx, dst, 1))
        adj[dst].append((idx, src, -1))
    for root in x.vertices:
        if root in mu:
            continue
        mu[root] = [0] * n_e
        queue = [root]
        while queue:
            v = queue.pop(0)
            for idx, w, sign in adj[v]:
                if w not in mu:
                    chain = list(mu[v])
                    chain[idx] += sign
                    mu[w] = chain
                    queue.append(w)
    classes = []
    for idx, (e, src, dst) in enumerate(x.edges):
        cycle = [a - b for a, b in zip(mu[src], mu[dst])]
        cycle[idx] += 1
        cycle = [v % p for v in cycle]
        y = snf.solve_mod_p(k_mat, cycle, p, m)
        assert y is not None
        cls = [sum(q[i] * y[i] for i in range(m)) % p for q in quot]
        classes.append(cls)
    return classes


def _translation_perm(cls, p, k):
    """Regular action of F_p^k on itself: translation by cls, little-endian index."""
    def index(vec):
        out = 0
        for i in range(k - 1, -1, -1):
            out = out * p + vec[i]
        return out + 1

    perm = [0] * (p ** k)
    vec = [0] * k
    for _ in range(p ** k):
        shifted = [(vec[i] + cls[i]) % p for i in range(k)]
        perm[index(vec) - 1] = index(shifted)
        # increment little-endian counter
        for i in range(k):
            vec[i] += 1
            if vec[i] < p:
                break
            vec[i] = 0
    return tuple(perm)


@dataclass
class TowerLevel:
    rep: PermRep
    cover: CellComplex2
    projection: CellMap          # to the previous level
    normality_claimed: bool = False


@dataclass
class CoverTower:
    """A base complex with a stack of covers, each built over the previous one."""

    base: CellComplex2
    levels: list = field(default_factory=list)

    def height(self):
        return len(self.levels)

    def complex_at(self, level):
        if level == 0:
            return self.base
        if 1 <= level <= len(self.levels):
            return self.levels[level - 1].cover
        raise LevelOutOfRange(f"level {level} not in 0..{len(self.levels)}")

    def project_id(self, level_from, level_to, dim, cell_id):
        """Composite projection of a single cell id down the tower."""
        if not 0 <= level_to <= level_from <= len(self.levels):
            raise LevelOutOfRange(
                f"projection {level_from}->{level_to} out of range")
        cur = cell_id
        for lvl in range(level_from, level_to, -1):
            cur = self.levels[lvl - 1].projection.of_dim(dim)[cur]
        return cur

    def degrees(self):
        return [lvl.rep.degree for lvl in self.levels]

    def cumulative_degree(self, level):
        d = 1
        for lvl in self.levels[:level]:
            d *= lvl.rep.degree
        return d


def extend_tower(tower, rep, normality_claimed=False):
    """New tower with one more cover built over the current top level."""
    top = tower.complex_at(tower.height())
    cover, proj = build_cover(top, rep)
    new = CoverTower(tower.base, list(tower.levels))
    new.levels.append(TowerLevel(rep, cover, proj, normality_claimed))
    return new


def mod_p_tower(base, p, levels, max_degree=4096):
    """Tower of iterated mod-p homology covers (need not be a residual chain)."""
    tower = CoverTower(base)
    for _ in range(levels):
        rep = mod_p_homology_rep(tower.complex_at(tower.height()), p,
                                 max_degree=max_degree)
        tower = extend_tower(tower, rep)
    return tower


def check_injective_projection(tower, level_j, sub, level_i):
    """True iff the composite projection is injective on sub's cells, all dims."""
    if not 0 <= level_i <= level_j <= tower.height():
        raise LevelOutOfRange(f"levels {level_j}->{level_i} out of range")
    for dim, ids in enumerate((sub.vertices, sub.edges, sub.cells)):
        seen = set()
        for cid in ids:
            image = tower.project_id(level_j, level_i, dim, cid)
            if image in seen:
                return False
            seen.add(image)
    return True


def base_lift(tower, vertex, level):
    """The sheet-1 lift of a base vertex at the given level."""
    cur = vertex
    for _ in range(level):
        cur = f"{cur}@1"
    return cur


def embed_ball(tower, center, radius):
    """Lowest level whose radius-R ball around the lifted center has stabilized.

    Stabilization means the one-step projection restricted to the ball at the
    next level is a based isomorphism onto the ball at this level (the
    operational stand-in for embedding a universal-cover ball).  Returns
    (level, ball subcomplex at that level) or None when the tower is exhausted.
    """
    from .geometry import cellular_neighborhood

    if radius < 0:
        raise ValueError("radius must be >= 0")
    for j in range(tower.height()):
        ball_j = cellular_neighborhood(tower.complex_at(j),
                                       [base_lift(tower, center, j)], radius)
        ball_up = cellular_neighborhood(tower.complex_at(j + 1),
                                        [base_lift(tower, center, j + 1)],
                                        radius)
        if _balls_isomorphic(tower, j, ball_j, ball_up):
            return j, ball_j
    return None


def _balls_isomorphic(tower, level, ball, ball_up):
    proj = tower.levels[level].projection
    for dim, (low, high) in enumerate(((ball.vertices, ball_up.vertices),
                                       (ball.edges, ball_up.edges),
                                       (ball.cells, ball_up.cells))):
        if len(low) != len(high):
            return False
        images = {proj.of_dim(dim)[cid] for cid in high}
        if images != set(low):
            return False
    return True
