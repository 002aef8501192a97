"""Standard small complexes used throughout the test suite and docs."""

from .complexes import CellComplex2, presentation_to_complex


def sphere_complex():
    """Two disks glued along a single loop: 1 vertex, 1 edge, 2 cells."""
    return CellComplex2("sphere", ["v"], [("e", "v", "v")],
                        [("d1", "e"), ("d2", "-e")])


def rp2_complex():
    """One disk attached along the square of a loop."""
    return CellComplex2("rp2", ["v"], [("a", "v", "v")], [("d", "a a")])


def torus_complex():
    return presentation_to_complex(["a", "b"], ["a b -a -b"], name="torus")


def genus2_complex():
    return presentation_to_complex(
        ["a", "b", "c", "d"], ["a b -a -b c d -c -d"], name="genus2")


def cycle_complex(k, name=None):
    """Cycle graph with k vertices and k edges, no 2-cells."""
    vertices = [f"v{i}" for i in range(k)]
    edges = [(f"e{i}", f"v{i}", f"v{(i + 1) % k}") for i in range(k)]
    return CellComplex2(name or f"cycle{k}", vertices, edges, [])


def path_complex(k, name=None):
    """Path graph with k edges (a tree)."""
    vertices = [f"v{i}" for i in range(k + 1)]
    edges = [(f"e{i}", f"v{i}", f"v{i + 1}") for i in range(k)]
    return CellComplex2(name or f"path{k}", vertices, edges, [])


def grid_complex(k, name=None):
    """Square-grid disk: (k+1)^2 vertices, k^2 square cells, H_1 = 0.

    Its isoperimetric profile makes the expansion constant 4/k, attained by
    the boundary of the full grid.
    """
    vertices = [f"p{i}.{j}" for i in range(k + 1) for j in range(k + 1)]
    edges = []
    for i in range(k + 1):
        for j in range(k):
            edges.append((f"h{i}.{j}", f"p{i}.{j}", f"p{i}.{j + 1}"))
    for i in range(k):
        for j in range(k + 1):
            edges.append((f"v{i}.{j}", f"p{i}.{j}", f"p{i + 1}.{j}"))
    cells = []
    for i in range(k):
        for j in range(k):
            word = f"h{i}.{j} v{i}.{j + 1} -h{i + 1}.{j} -v{i}.{j}"
            cells.append((f"s{i}.{j}", word))
    return CellComplex2(name or f"grid{k}", vertices, edges, cells)


def annulus_complex(k, name=None):
    """Cellulated annulus: inner k-cycle g, outer k-cycle h, square cells.

    The inner loop ``g0 g1 ... g(k-1)`` is nullhomologous relative to the
    outer boundary; the sum of all squares has boundary g - h.
    """
    vertices = [f"v{i}" for i in range(k)] + [f"u{i}" for i in range(k)]
    edges = []
    for i in range(k):
        edges.append((f"g{i}", f"v{i}", f"v{(i + 1) % k}"))
    for i in range(k):
        edges.append((f"h{i}", f"u{i}", f"u{(i + 1) % k}"))
    for i in range(k):
        edges.append((f"r{i}", f"v{i}", f"u{i}"))
    cells = []
    for i in range(k):
        j = (i + 1) % k
        cells.append((f"q{i}", f"g{i} r{j} -h{i} -r{i}"))
    return CellComplex2(name or f"annulus{k}", vertices, edges, cells)
