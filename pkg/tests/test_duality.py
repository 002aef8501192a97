"""Triangulations, duality chain maps, codimension-2 fills, pullback covers."""

import random
from fractions import Fraction

import pytest

from fillnorm.complexes import Chain, euler_characteristic, homology
from fillnorm.covers import PermRep, mod_p_homology_rep, trivial_rep
from fillnorm.duality import (
    PDChainMap,
    RP2_FACES,
    Triangulation3,
    boundary_four_simplex,
    double_tetrahedron,
    dualize,
    fill_codim2,
    lift_triangulation,
    parse_triangulation,
    rp2_times_s1,
    s2_times_s1,
    triangulation_to_text,
    verify_pd,
)
from fillnorm.errors import (
    BadVertexLink,
    MalformedSyntax,
    MonodromyObstruction,
    NonOrientable,
    NotABoundary,
    NotClosed,
)


def test_rp2_six_vertex_surface_data():
    # every pair of the 6 vertices is an edge, every edge in exactly 2 faces
    from itertools import combinations
    edges = {}
    for face in RP2_FACES:
        for e in combinations(sorted(face), 2):
            edges[e] = edges.get(e, 0) + 1
    assert len(edges) == 15
    assert all(count == 2 for count in edges.values())
    assert 6 - 15 + len(RP2_FACES) == 1  # chi(RP2)


def test_boundary_four_simplex():
    t = boundary_four_simplex()
    assert t.cell_counts() == [5, 10, 10, 5]
    assert euler_characteristic(t) == 0
    assert [homology(t, i).betti for i in range(4)] == [1, 0, 0, 1]
    assert homology(t, 3).torsion == ()


def test_boundary_composition_zero():
    from fillnorm.snf import mat_mul
    for t in (boundary_four_simplex(), double_tetrahedron(), s2_times_s1()):
        bd1, bd2, bd3 = (t.boundary_matrix(i) for i in (1, 2, 3))
        p12 = mat_mul(bd1.rows, bd2.rows, len(bd2.col_labels))
        p23 = mat_mul(bd2.rows, bd3.rows, len(bd3.col_labels))
        assert all(v == 0 for row in p12 for v in row)
        assert all(v == 0 for row in p23 for v in row)


def test_dualize_counts():
    t = boundary_four_simplex()
    dual, phi = dualize(t)
    assert dual.cell_counts() == [5, 10, 10, 5]
    assert [len(level) for level in phi.signs] == [5, 10, 10, 5]
    # dual counts mirror simplex counts and chi(dual) = chi(T) = 0
    for tri in (t, double_tetrahedron(), s2_times_s1()):
        d, _ = dualize(tri)
        assert d.cell_counts() == tri.cell_counts()[::-1]
        assert euler_characteristic(d) == euler_characteristic(tri) == 0


def test_two_disjoint_spheres():
    base = boundary_four_simplex()
    shifted = [tuple(f"b{v}" for v in t) for t in base.tetrahedra]
    t = Triangulation3("two", list(base.tetrahedra) + shifted)
    assert homology(t, 0).betti == 2
    dual, phi = dualize(t)
    assert verify_pd(t, dual, phi, random_chains=20).passed()


def test_not_closed():
    base = boundary_four_simplex()
    with pytest.raises(NotClosed):
        Triangulation3("open", list(base.tetrahedra)[:-1])


def test_bad_vertex_link_wedge():
    base = boundary_four_simplex()
    # wedge two spheres at a vertex: every face still has two cofaces, but
    # the link of the shared vertex is two spheres
    shifted = [tuple("0" if v == "0" else f"b{v}" for v in t)
               for t in base.tetrahedra]
    with pytest.raises(BadVertexLink):
        Triangulation3("wedge", list(base.tetrahedra) + shifted)


def test_nonorientable_rejected():
    with pytest.raises(NonOrientable):
        rp2_times_s1()


def test_tetrahedron_with_repeated_vertex_rejected():
    with pytest.raises(MalformedSyntax):
        Triangulation3("bad", [("0", "1", "2", "2")])


def test_pd_verification_all_fixtures():
    for t in (boundary_four_simplex(), double_tetrahedron(), s2_times_s1()):
        dual, phi = dualize(t)
        report = verify_pd(t, dual, phi, random_chains=40, seed=3)
        assert report.passed(), (t.name, report.to_json())
        assert all(report.squares_commute.values())
        assert report.betti_symmetry


def test_s2_times_s1_betti():
    t = s2_times_s1()
    assert [homology(t, i).betti for i in range(4)] == [1, 1, 1, 1]
    assert euler_characteristic(t) == 0


def test_pd_fault_injection():
    t = boundary_four_simplex()
    dual, phi = dualize(t)
    tampered = [list(level) for level in phi.signs]
    tampered[2][3] = -tampered[2][3]
    bad = PDChainMap(tampered, t)
    report = verify_pd(t, dual, bad, random_chains=10)
    assert not report.passed()
    assert report.first_failure is not None
    assert not all(report.squares_commute.values())
    # the failing square names the degree where the flip lives
    failing = [d for d, ok in report.squares_commute.items() if not ok]
    assert failing and all(d in (1, 2) for d in failing)


def test_pd_fault_injection_dual_matrix():
    from dataclasses import replace

    t = boundary_four_simplex()
    dual, phi = dualize(t)
    bd = dual.boundary_matrix(2)
    rows = [list(r) for r in bd.rows]
    rows[0][0] += 1
    tampered_bd = replace(bd, rows=rows)
    boundaries = list(dual.boundaries)
    boundaries[1] = tampered_bd
    from fillnorm.duality import DualCellulation
    tampered = DualCellulation(t, dual.cell_ids, boundaries)
    report = verify_pd(t, tampered, phi, random_chains=5)
    assert not report.passed()
    assert report.first_failure is not None


def test_pd_isometry_on_random_chains():
    t = double_tetrahedron()
    dual, phi = dualize(t)
    rng = random.Random(9)
    for degree in range(4):
        ids = dual.cell_ids[3 - degree]
        simplex_ids = t.simplex_ids(degree)
        for _ in range(25):
            c = Chain(degree, {cid: Fraction(rng.randint(-7, 7),
                                             rng.randint(1, 3))
                               for cid in ids if rng.random() < 0.6})
            img = phi.apply(degree, c, ids, simplex_ids)
            assert img.l1_norm() == c.l1_norm()


def test_fill_codim2():
    t = boundary_four_simplex()
    dual, phi = dualize(t)
    zero = Chain(1, {})
    res, ratio = fill_codim2(dual, zero, "int")
    assert res.value == 0 and ratio is None
    # boundary of a single dual 2-cell fills with value <= 1
    bd = dual.boundary_matrix(2)
    z = Chain(1, {lab: val for lab, val in zip(bd.row_labels, bd.column(0))
                  if val})
    res, ratio = fill_codim2(dual, z, "int")
    assert res.value <= 1
    # two adjacent dual cells: optimal value <= 2 and the ILP optimum
    # matches an exhaustive box search
    z2 = Chain(1, {lab: a + b for lab, a, b in
                   zip(bd.row_labels, bd.column(0), bd.column(1)) if a + b})
    res2, _ = fill_codim2(dual, z2, "int")
    assert res2.value <= 2
    from conftest import exhaustive_fill_box
    target = [int(v) for v in z2.vector(bd.row_labels)]
    expected = exhaustive_fill_box(bd.rows, len(bd.col_labels), target, 1)
    assert expected is not None and res2.value == expected[0]
    # real value lower-bounds the integer value
    res_r, _ = fill_codim2(dual, z2, "real")
    assert res_r.value <= res2.value
    # primal skeleton works too
    bd_p = t.boundary_matrix(2)
    zp = Chain(1, {lab: val for lab, val in
                   zip(bd_p.row_labels, bd_p.column(0)) if val})
    res_p, _ = fill_codim2(t, zp, "int", skeleton="primal")
    assert res_p.value <= 1
    with pytest.raises(NotABoundary):
        fill_codim2(dual, Chain(1, {bd.row_labels[0]: 1}), "int")


def test_lift_triangulation_trivial():
    t = boundary_four_simplex()
    lifted = lift_triangulation(t, trivial_rep())
    assert lifted.cell_counts() == t.cell_counts()


def test_lift_triangulation_simply_connected_only_degree_one():
    t = boundary_four_simplex()
    skel = t.two_skeleton()
    assert homology(skel, 1).betti == 0
    from fillnorm.errors import TrivialQuotient
    with pytest.raises(TrivialQuotient):
        mod_p_homology_rep(skel, 2)


def test_lift_s2_times_s1():
    t = s2_times_s1()
    for p in (2, 3):
        rep = mod_p_homology_rep(t.two_skeleton(), p)
        assert rep.degree == p
        cover = lift_triangulation(t, rep)
        assert cover.cell_counts() == [p * n for n in t.cell_counts()]
        assert euler_characteristic(cover) == 0
        dual, phi = dualize(cover)
        assert verify_pd(cover, dual, phi, random_chains=8).passed()


def test_lift_monodromy_obstruction():
    t = s2_times_s1()
    edge = "-".join(t.edges[0])
    bad = PermRep(2, {edge: (2, 1)})
    with pytest.raises(MonodromyObstruction):
        lift_triangulation(t, bad)


def test_parse_triangulation_roundtrip():
    t = boundary_four_simplex()
    text = triangulation_to_text(t)
    again = parse_triangulation(text)
    assert again.tetrahedra == t.tetrahedra
    with pytest.raises(MalformedSyntax):
        parse_triangulation("tet 0 1 2 3\n")
    with pytest.raises(MalformedSyntax):
        parse_triangulation("tri x\ntet 0 1 2\n")
