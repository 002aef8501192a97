"""Finite CW 2-complexes with ordered cell bases, chains, and integral homology.

A complex fixes the chain bases once and for all: the declaration order of
vertices, edges and 2-cells *is* the basis order, and every matrix and norm in
the package is taken relative to it.  Boundary words are closed edge paths
(head to tail, cyclically), written as signed edge letters.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import snf
from .errors import (
    DanglingReference,
    MalformedSyntax,
    OpenBoundaryWord,
    UnknownGenerator,
)

# A letter is (edge id, +1|-1); -1 traverses the edge against its orientation.


def parse_letter(token):
    if token.startswith("-"):
        body = token[1:]
        sign = -1
    else:
        body = token
        sign = 1
    if not body:
        raise MalformedSyntax(f"empty edge letter {token!r}")
    return (body, sign)


def letter_str(letter):
    edge, sign = letter
    return edge if sign > 0 else "-" + edge


def inverse_letter(letter):
    return (letter[0], -letter[1])


def parse_word(tokens):
    if isinstance(tokens, str):
        tokens = tokens.split()
    return tuple(parse_letter(t) for t in tokens)


class CellComplex2:
    """Finite 2-complex: vertices, oriented edges, 2-cells with boundary words."""

    dimension = 2

    def __init__(self, name, vertices, edges, twocells):
        self.name = name
        self.vertices = tuple(vertices)
        self.edges = tuple((e, s, t) for e, s, t in edges)
        self.twocells = tuple((c, parse_word(w) if not _is_word(w) else tuple(w))
                              for c, w in twocells)
        self._vertex_index = _index_unique(self.vertices, "vertex")
        self._edge_index = _index_unique([e for e, _, _ in self.edges], "edge")
        self._cell_index = _index_unique([c for c, _ in self.twocells], "cell")
        self._validate()

    def _validate(self):
        for e, s, t in self.edges:
            for v in (s, t):
                if v not in self._vertex_index:
                    raise DanglingReference(f"edge {e} references unknown vertex {v}")
        for c, word in self.twocells:
            if not word:
                raise OpenBoundaryWord(f"cell {c} has an empty boundary word")
            for edge, _ in word:
                if edge not in self._edge_index:
                    raise DanglingReference(f"cell {c} references unknown edge {edge}")
            ends = [self.letter_endpoints(letter) for letter in word]
            for k in range(len(ends)):
                if ends[k][1] != ends[(k + 1) % len(ends)][0]:
                    raise OpenBoundaryWord(
                        f"cell {c}: word is not a closed edge path at position {k}")

    # -- lookups ----------------------------------------------------------

    def vertex_index(self, v):
        return self._vertex_index[v]

    def edge_index(self, e):
        return self._edge_index[e]

    def cell_index(self, c):
        return self._cell_index[c]

    def has_vertex(self, v):
        return v in self._vertex_index

    def has_edge(self, e):
        return e in self._edge_index

    def edge_endpoints(self, e):
        _, s, t = self.edges[self._edge_index[e]]
        return s, t

    def letter_endpoints(self, letter):
        edge, sign = letter
        s, t = self.edge_endpoints(edge)
        return (s, t) if sign > 0 else (t, s)

    def cell_word(self, c):
        return self.twocells[self._cell_index[c]][1]

    def cell_counts(self):
        return [len(self.vertices), len(self.edges), len(self.twocells)]

    # -- chain-level structure --------------------------------------------

    def boundary_matrix(self, i):
        """Integer boundary matrix from degree-i cells to degree-(i-1) cells."""
        if i == 1:
            rows = snf.zero_matrix(len(self.vertices), len(self.edges))
            for j, (_, s, t) in enumerate(self.edges):
                rows[self._vertex_index[t]][j] += 1
                rows[self._vertex_index[s]][j] -= 1
            return BoundaryMatrix(1, self.vertices,
                                  tuple(e for e, _, _ in self.edges), rows)
        if i == 2:
            rows = snf.zero_matrix(len(self.edges), len(self.twocells))
            for j, (_, word) in enumerate(self.twocells):
                for edge, sign in word:
                    rows[self._edge_index[edge]][j] += sign
            return BoundaryMatrix(2, tuple(e for e, _, _ in self.edges),
                                  tuple(c for c, _ in self.twocells), rows)
        raise ValueError(f"no boundary matrix in degree {i} for a 2-complex")

    def chain_basis(self, degree):
        if degree == 0:
            return self.vertices
        if degree == 1:
            return tuple(e for e, _, _ in self.edges)
        if degree == 2:
            return tuple(c for c, _ in self.twocells)
        return ()

    def components(self):
        """Connected components as lists of vertex ids, in basis order."""
        adj = {v: [] for v in self.vertices}
        for _, s, t in self.edges:
            adj[s].append(t)
            adj[t].append(s)
        seen = set()
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            comp = [v]
            seen.add(v)
            stack = [v]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        stack.append(y)
            comps.append(sorted(comp, key=self._vertex_index.get))
        return comps

    def word_chain(self, word):
        """The 1-chain of a closed edge word (signed occurrence counts)."""
        coeffs = {}
        for edge, sign in word:
            coeffs[edge] = coeffs.get(edge, 0) + sign
        return Chain(1, coeffs)

    def __repr__(self):
        v, e, f = self.cell_counts()
        return f"CellComplex2({self.name!r}: {v} vertices, {e} edges, {f} cells)"


def _is_word(w):
    return isinstance(w, tuple) and all(
        isinstance(x, tuple) and len(x) == 2 for x in w)


def _index_unique(ids, kind):
    index = {}
    for i, x in enumerate(ids):
        if x in index:
            raise MalformedSyntax(f"duplicate {kind} id {x!r}")
        index[x] = i
    return index


@dataclass(frozen=True)
class BoundaryMatrix:
    """Dense integer boundary matrix with its row/column cell labels."""

    degree: int
    row_labels: tuple
    col_labels: tuple
    rows: list

    def shape(self):
        return len(self.row_labels), len(self.col_labels)

    def apply(self, vec):
        return snf.mat_vec(self.rows, vec, len(self.col_labels))

    def column(self, j):
        return [row[j] for row in self.rows]

    def transpose_rows(self):
        return snf.transpose(self.rows, len(self.col_labels))


class Chain:
    """Sparse chain with exact rational coefficients in a fixed degree.

    Zero coefficients are never stored; ``integral`` is true exactly when all
    stored denominators are 1.
    """

    def __init__(self, degree, coeffs=None):
        self.degree = degree
        self.coeffs = {}
        for k, v in (coeffs or {}).items():
            f = v if isinstance(v, Fraction) else Fraction(v)
            if f != 0:
                self.coeffs[k] = f

    @property
    def integral(self):
        return all(c.denominator == 1 for c in self.coeffs.values())

    def l1_norm(self):
        return sum((abs(c) for c in self.coeffs.values()), Fraction(0))

    def is_zero(self):
        return not self.coeffs

    def get(self, cell):
        return self.coeffs.get(cell, Fraction(0))

    def support(self):
        return frozenset(self.coeffs)

    def vector(self, basis):
        return [self.coeffs.get(b, Fraction(0)) for b in basis]

    @classmethod
    def from_vector(cls, degree, basis, vec):
        return cls(degree, dict(zip(basis, vec)))

    def scaled(self, k):
        return Chain(self.degree, {c: v * k for c, v in self.coeffs.items()})

    def __add__(self, other):
        assert self.degree == other.degree
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return Chain(self.degree, out)

    def __sub__(self, other):
        return self + other.scaled(-1)

    def __neg__(self):
        return self.scaled(-1)

    def __eq__(self, other):
        return (isinstance(other, Chain) and self.degree == other.degree
                and self.coeffs == other.coeffs)

    def __repr__(self):
        terms = " + ".join(f"{v}*{k}" for k, v in sorted(self.coeffs.items()))
        return f"Chain({self.degree}; {terms or '0'})"


def l1_norm(chain):
    """Sum of absolute coefficient values; zero exactly on the zero chain."""
    return chain.l1_norm()


@dataclass(frozen=True)
class HomologySummary:
    degree: int
    betti: int
    torsion: tuple

    def to_json(self):
        return {"degree": self.degree, "betti": self.betti,
                "torsion": list(self.torsion)}


def homology(x, i):
    """Integral homology in degree i via Smith normal form.

    Works for any complex exposing ``cell_counts()`` and ``boundary_matrix``;
    ``betti`` in degree 0 counts connected components.
    """
    counts = x.cell_counts()
    top = len(counts) - 1
    if not 0 <= i <= top:
        return HomologySummary(i, 0, ())
    n_i = counts[i]
    if i == 0:
        rank_i = 0
    else:
        rank_i = snf.integer_rank(x.boundary_matrix(i).rows, n_i)
    if i == top:
        rank_next = 0
        tors = ()
    else:
        s = snf.smith_normal_form(x.boundary_matrix(i + 1).rows, counts[i + 1])
        rank_next = s.rank
        tors = tuple(f for f in s.invariant_factors if f > 1)
    return HomologySummary(i, n_i - rank_i - rank_next, tors)


def euler_characteristic(x):
    """Alternating cell count."""
    return sum((-1) ** d * n for d, n in enumerate(x.cell_counts()))


def betti_numbers(x):
    return [homology(x, i).betti for i in range(len(x.cell_counts()))]


# --- constructions ---------------------------------------------------------


def presentation_to_complex(gens, relators, name="presentation"):
    """Presentation 2-complex: one vertex, a loop per generator, a cell per relator."""
    gens = list(gens)
    genset = set(gens)
    cells = []
    for k, rel in enumerate(relators):
        word = parse_word(rel) if not _is_word(rel) else tuple(rel)
        for edge, _ in word:
            if edge not in genset:
                raise UnknownGenerator(f"relator {k + 1} uses unknown generator {edge}")
        cells.append((f"r{k + 1}", word))
    return CellComplex2(name, ["v"], [(g, "v", "v") for g in gens], cells)


def attach_cells(x, words, prefix="att"):
    """New complex with extra 2-cells attached along closed edge words."""
    existing = {c for c, _ in x.twocells}
    new_cells = list(x.twocells)
    for k, w in enumerate(words):
        word = parse_word(w) if not _is_word(w) else tuple(w)
        cid = f"{prefix}{k + 1}"
        while cid in existing:
            cid = cid + "'"
        existing.add(cid)
        new_cells.append((cid, word))
    return CellComplex2(x.name, x.vertices, x.edges, new_cells)


# --- text format ------------------------------------------------------------


def parse_complex(text):
    """Parse the line-oriented complex/presentation format.

    Lines: ``complex NAME`` | ``vertices: v0 v1 ...`` | ``edge ID SRC DST`` |
    ``cell ID W1 W2 ...`` where each Wk is an edge id, ``-``-prefixed for
    reversal.  The ``presentation NAME`` header switches to ``gens:``/``rel:``
    lines and builds the presentation complex.  ``#`` starts a comment.
    """
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise MalformedSyntax("empty document")
    head = lines[0].split()
    if head[0] == "presentation":
        return _parse_presentation(head, lines[1:])
    if head[0] != "complex" or len(head) != 2:
        raise MalformedSyntax(f"expected 'complex NAME', got {lines[0]!r}")
    name = head[1]
    vertices = []
    edges = []
    cells = []
    for line in lines[1:]:
        parts = line.split()
        if parts[0] == "vertices:":
            vertices.extend(parts[1:])
        elif parts[0] == "edge":
            if len(parts) != 4:
                raise MalformedSyntax(f"expected 'edge ID SRC DST', got {line!r}")
            edges.append((parts[1], parts[2], parts[3]))
        elif parts[0] == "cell":
            if len(parts) < 3:
                raise MalformedSyntax(f"expected 'cell ID W1 ...', got {line!r}")
            cells.append((parts[1], parse_word(parts[2:])))
        else:
            raise MalformedSyntax(f"unrecognized line {line!r}")
    return CellComplex2(name, vertices, edges, cells)


def _parse_presentation(head, lines):
    if len(head) != 2:
        raise MalformedSyntax("expected 'presentation NAME'")
    gens = []
    rels = []
    for line in lines:
        parts = line.split()
        if parts[0] == "gens:":
            gens.extend(parts[1:])
        elif parts[0] == "rel:":
            if len(parts) < 2:
                raise MalformedSyntax(f"empty relator line {line!r}")
            rels.append(parts[1:])
        else:
            raise MalformedSyntax(f"unrecognized line {line!r}")
    return presentation_to_complex(gens, rels, name=head[1])


def complex_to_text(x):
    """Serialize a complex back to the text format (inverse of parse_complex)."""
    out = [f"complex {x.name}"]
    if x.vertices:
        out.append("vertices: " + " ".join(x.vertices))
    for e, s, t in x.edges:
        out.append(f"edge {e} {s} {t}")
    for c, word in x.twocells:
        out.append(f"cell {c} " + " ".join(letter_str(l) for l in word))
    return "\n".join(out) + "\n"
