"""Complex construction, parsing, and homology against closed-form values."""

import random
from fractions import Fraction

import pytest

from conftest import gauss_rank, random_small_complex
from fillnorm import snf
from fillnorm.catalog import (
    genus2_complex,
    rp2_complex,
    sphere_complex,
    torus_complex,
)
from fillnorm.complexes import (
    CellComplex2,
    Chain,
    attach_cells,
    euler_characteristic,
    homology,
    l1_norm,
    parse_complex,
    presentation_to_complex,
)
from fillnorm.errors import (
    DanglingReference,
    MalformedSyntax,
    OpenBoundaryWord,
    UnknownGenerator,
)

RP2_TEXT = """
complex rp2
vertices: v
edge a v v
cell d a a
"""

TORUS_TEXT = """
complex torus
vertices: v
edge a v v
edge b v v
cell d a b -a -b
"""


def test_parse_rp2():
    x = parse_complex(RP2_TEXT)
    assert x.cell_counts() == [1, 1, 1]
    assert homology(x, 1).torsion == (2,)


def test_parse_torus():
    x = parse_complex(TORUS_TEXT)
    assert x.cell_counts() == [1, 2, 1]
    assert homology(x, 1).betti == 2


def test_parse_open_word_rejected():
    text = """
complex bad
vertices: p q
edge a p p
edge b q q
cell d a b
"""
    with pytest.raises(OpenBoundaryWord):
        parse_complex(text)


def test_parse_dangling_reference():
    with pytest.raises(DanglingReference):
        parse_complex("complex x\nvertices: v\nedge a v w\n")
    with pytest.raises(DanglingReference):
        parse_complex("complex x\nvertices: v\nedge a v v\ncell d a b\n")


def test_parse_malformed():
    with pytest.raises(MalformedSyntax):
        parse_complex("")
    with pytest.raises(MalformedSyntax):
        parse_complex("complex x\nbogus line\n")
    with pytest.raises(MalformedSyntax):
        parse_complex("complex x\nvertices: v v\n")


def test_presentation_examples():
    rp2 = presentation_to_complex(["a"], ["a a"])
    assert homology(rp2, 1).torsion == (2,)
    torus = presentation_to_complex(["a", "b"], ["a b -a -b"])
    assert homology(torus, 1).betti == 2
    g2 = presentation_to_complex(["a", "b", "c", "d"], ["a b -a -b c d -c -d"])
    assert euler_characteristic(g2) == -2
    with pytest.raises(UnknownGenerator):
        presentation_to_complex(["a"], ["a b"])


def test_parse_presentation_format():
    x = parse_complex("presentation t2\ngens: a b\nrel: a b -a -b\n")
    assert x.cell_counts() == [1, 2, 1]
    assert homology(x, 1).betti == 2


def test_attach_cells():
    torus = torus_complex()
    filled = attach_cells(torus, ["a", "b"])
    h1 = homology(filled, 1)
    assert h1.betti == 0 and h1.torsion == ()
    # independent check over Q: rank(bd1) + rank(bd2) == #edges
    bd2 = filled.boundary_matrix(2)
    assert gauss_rank(bd2.rows, 3) == 2

    rp2 = rp2_complex()
    killed = attach_cells(rp2, ["a"])
    h1 = homology(killed, 1)
    assert h1.betti == 0 and h1.torsion == ()

    same = attach_cells(torus, [])
    assert same.cell_counts() == torus.cell_counts()
    with pytest.raises(OpenBoundaryWord):
        attach_cells(CellComplex2("x", ["p", "q"], [("e", "p", "q")], []),
                     ["e"])


def test_boundary_matrices():
    torus = torus_complex()
    bd2 = torus.boundary_matrix(2)
    assert bd2.column(0) == [0, 0]
    rp2 = rp2_complex()
    assert rp2.boundary_matrix(2).column(0) == [2]
    sphere = sphere_complex()
    bd = sphere.boundary_matrix(2)
    assert bd.column(0) == [1] and bd.column(1) == [-1]


def test_boundary_composition_is_zero():
    rng = random.Random(5)
    for _ in range(25):
        x = random_small_complex(rng)
        bd1 = x.boundary_matrix(1)
        bd2 = x.boundary_matrix(2)
        prod = snf.mat_mul(bd1.rows, bd2.rows, len(bd2.col_labels))
        assert all(v == 0 for row in prod for v in row)


def test_homology_closed_forms():
    assert homology(sphere_complex(), 1).betti == 0
    assert homology(sphere_complex(), 2).betti == 1
    assert homology(rp2_complex(), 1) .torsion == (2,)
    assert homology(rp2_complex(), 2).betti == 0
    assert homology(genus2_complex(), 1).betti == 4
    assert homology(genus2_complex(), 1).torsion == ()
    assert homology(torus_complex(), 0).betti == 1


def test_euler_characteristic():
    assert euler_characteristic(torus_complex()) == 0
    assert euler_characteristic(rp2_complex()) == 1
    assert euler_characteristic(sphere_complex()) == 2


def test_b0_counts_components():
    x = CellComplex2("two", ["p", "q"], [], [])
    assert homology(x, 0).betti == 2
    assert len(x.components()) == 2


def test_rank_nullity_bookkeeping():
    rng = random.Random(17)
    for _ in range(30):
        x = random_small_complex(rng)
        ne = len(x.edges)
        r1 = gauss_rank(x.boundary_matrix(1).rows, ne)
        r2 = gauss_rank(x.boundary_matrix(2).rows, len(x.twocells))
        assert r2 + homology(x, 1).betti + r1 == ne


def test_l1_norm():
    assert l1_norm(Chain(1, {})) == 0
    assert l1_norm(Chain(2, {"d1": 3, "d2": -2})) == 5
    assert l1_norm(Chain(1, {"a": 1, "b": -1, "c": 1})) == 3
    c = Chain(1, {"a": Fraction(1, 2)})
    assert not c.integral
    assert Chain(1, {"a": 2}).integral


def test_l1_norm_is_a_norm():
    rng = random.Random(23)
    cells = [f"c{i}" for i in range(6)]
    for _ in range(50):
        a = Chain(1, {c: Fraction(rng.randint(-9, 9), rng.randint(1, 5))
                      for c in cells})
        b = Chain(1, {c: Fraction(rng.randint(-9, 9), rng.randint(1, 5))
                      for c in cells})
        k = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        assert l1_norm(a + b) <= l1_norm(a) + l1_norm(b)
        assert l1_norm(a.scaled(k)) == abs(k) * l1_norm(a)
        assert (l1_norm(a) == 0) == a.is_zero()


def test_duplicate_cell_ids_rejected():
    with pytest.raises(MalformedSyntax):
        CellComplex2("x", ["v"], [("a", "v", "v"), ("a", "v", "v")], [])
