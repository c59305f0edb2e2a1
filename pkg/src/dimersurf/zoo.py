"""Small embedded graphs used throughout the tests and docs.

Every builder returns a SurfaceGraph.  Naming convention: the two
halves of edge "x" are "x" (at the tail) and "x~" (at the head), so
the edge id is the bare name.  All rotations were worked out on paper
with the counter-clockwise convention; the face lists quoted in the
docstrings are what the tests pin down.
"""

from .surface_graph import SurfaceGraph


def _graph(rotations, boundary_vertices=(), boundary_edges=()):
    # twins are implied by the ~ naming
    twins = {}
    for order in rotations.values():
        for h in order:
            twins[h] = h[:-1] if h.endswith("~") else h + "~"
    return SurfaceGraph(
        vertices=list(rotations),
        rotations={v: list(order) for v, order in rotations.items()},
        twins=twins,
        boundary_vertices=boundary_vertices,
        boundary_edges=boundary_edges,
    )


def single_edge_sphere():
    """One edge on the sphere; a single dimer configuration."""
    return _graph({"u": ["a"], "v": ["a~"]})


def theta_sphere():
    """Two vertices joined by three parallel edges, on the sphere.

    Faces: outer (a c~), top lens (b a~), bottom lens (c b~).
    """
    return _graph({"u": ["b", "a", "c"], "v": ["a~", "b~", "c~"]})


def cycle_sphere(n=4):
    """An n-cycle drawn as a convex polygon on the sphere; two faces."""
    if n < 2:
        raise ValueError("cycle needs at least 2 edges")
    rotations = {}
    for i in range(n):
        rotations["v%d" % i] = ["e%d" % i, "e%d~" % ((i - 1) % n)]
    return _graph(rotations)


def edge_disk():
    """A disk whose boundary circle carries one vertex with a stick.

    b sits on the boundary loop p; the stick s runs to the interior
    vertex u.  Hole face (p); one internal face (s p~ s~).
    """
    return _graph(
        {"u": ["s"], "b": ["s~", "p", "p~"]},
        boundary_vertices=["b"],
        boundary_edges=["p"],
    )


def two_stick_disk():
    """A disk with two boundary vertices, sticks meeting in the middle.

    Boundary circle: arcs p (right) and q (left) between b1 (top) and
    b2 (bottom); sticks e1, e2 from the centre u.  Internal faces
    (e1 q e2~) and (e2 p~ e1~); hole (p q~).
    """
    return _graph(
        {
            "u": ["e2", "e1"],
            "b1": ["e1~", "p", "q"],
            "b2": ["p~", "e2~", "q~"],
        },
        boundary_vertices=["b1", "b2"],
        boundary_edges=["p", "q"],
    )


def chords_disk():
    """A disk with four boundary vertices and two disjoint chords.

    Arcs a1..a4 run around the circle b1 -> b2 -> b3 -> b4 -> b1;
    chords c12 (b1-b2) and c34 (b3-b4) cut off two caps.  Faces:
    middle (c12 a2 c34 a4), caps (c12~ a1) and (c34~ a3), hole
    (a1~ a4~ a3~ a2~).  Both chord classes die in relative homology,
    so the relative rank is 0.
    """
    return _graph(
        {
            "b1": ["a1", "c12", "a4~"],
            "b2": ["a1~", "a2", "c12~"],
            "b3": ["a2~", "a3", "c34"],
            "b4": ["a4", "c34~", "a3~"],
        },
        boundary_vertices=["b1", "b2", "b3", "b4"],
        boundary_edges=["a1", "a2", "a3", "a4"],
    )


def annulus_ladder():
    """Circular ladder in an annulus, one marked vertex per boundary.

    Inner ring i1..i4 and outer ring o1..o4 joined by rungs r1..r4.
    The inner boundary circle is the loop pi at b_in (stick si to i1);
    the outer one is po at b_out (stick so to o1).  Bipartite; six
    internal faces; genus 0 with two holes, so the surface first Betti
    number is 1.
    """
    rotations = {
        "i1": ["r1", "ei1", "si~", "ei4~"],
        "i2": ["ei1~", "r2", "ei2"],
        "i3": ["ei3", "ei2~", "r3"],
        "i4": ["ei4", "ei3~", "r4"],
        "o1": ["so~", "eo1", "r1~", "eo4~"],
        "o2": ["eo1~", "eo2", "r2~"],
        "o3": ["eo3", "r3~", "eo2~"],
        "o4": ["eo4", "r4~", "eo3~"],
        "b_in": ["si", "pi", "pi~"],
        "b_out": ["po~", "so", "po"],
    }
    return _graph(
        rotations,
        boundary_vertices=["b_in", "b_out"],
        boundary_edges=["pi", "po"],
    )


def torus_two_vertex():
    """Two vertices joined by four edges filling the torus.

    Faces (a b~ c d~) and (b c~ d a~); every single edge is a perfect
    matching, so there are exactly four.
    """
    return _graph({"u": ["d", "c", "b", "a"], "v": ["d~", "c~", "b~", "a~"]})


def torus_grid(m=4, n=4):
    """The m x n square grid on the torus (periodic in both directions).

    Vertex g{i}_{j}; east edge E{i}_{j} to g{i+1}_{j}, north edge
    N{i}_{j} to g{i}_{j+1}, indices mod m, n.  Bipartite when m and n
    are even.
    """
    if m < 2 or n < 2:
        raise ValueError("torus grid needs m, n >= 2")
    rotations = {}
    for i in range(m):
        for j in range(n):
            rotations["g%d_%d" % (i, j)] = [
                "E%d_%d" % (i, j),
                "N%d_%d" % (i, j),
                "E%d_%d~" % ((i - 1) % m, j),
                "N%d_%d~" % (i, (j - 1) % n),
            ]
    return _graph(rotations)


def grid_sphere(m=4, n=4):
    """The planar m x n vertex grid ((m-1) x (n-1) faces), on the sphere."""
    if m < 2 or n < 2:
        raise ValueError("grid needs m, n >= 2")
    rotations = {}
    for i in range(m):
        for j in range(n):
            order = []
            if i < m - 1:
                order.append("E%d_%d" % (i, j))
            if j < n - 1:
                order.append("N%d_%d" % (i, j))
            if i > 0:
                order.append("E%d_%d~" % (i - 1, j))
            if j > 0:
                order.append("N%d_%d~" % (i, j - 1))
            rotations["g%d_%d" % (i, j)] = order
    return _graph(rotations)


def genus_two():
    """A one-face graph filling the genus-2 surface, loops subdivided.

    The base is a single vertex X with rotation a1 b1 a2 b2 c1 d1 c2 d2
    (twins a1-a2 etc.), whose face walk is one orbit of length 8.  Loops
    are not allowed, so each of a, b, c is subdivided twice and d three
    times; the vertex count comes out even and {ea1, eb1, ec1, ed0, ed2}
    is a perfect matching.  10 vertices, 13 edges, one face, genus 2.
    """
    rotations = {
        "X": ["ea0", "eb0", "ea2~", "eb2~", "ec0", "ed0", "ec2~", "ed3~"],
        "ma1": ["ea0~", "ea1"],
        "ma2": ["ea1~", "ea2"],
        "mb1": ["eb0~", "eb1"],
        "mb2": ["eb1~", "eb2"],
        "mc1": ["ec0~", "ec1"],
        "mc2": ["ec1~", "ec2"],
        "md1": ["ed0~", "ed1"],
        "md2": ["ed1~", "ed2"],
        "md3": ["ed2~", "ed3"],
    }
    return _graph(rotations)


def pants():
    """Theta graph with a stick-and-hole in each of its three faces.

    Sticks s1 (into the top lens), s2 (into the outer face), s3 (into
    the bottom lens) end on boundary vertices b1, b2, b3 carrying the
    boundary loops p1, p2, p3.  Sphere with three holes.
    """
    rotations = {
        "u": ["b", "s1", "a", "c", "s3"],
        "v": ["s2", "a~", "b~", "c~"],
        "b1": ["s1~", "p1", "p1~"],
        "b2": ["s2~", "p2", "p2~"],
        "b3": ["s3~", "p3", "p3~"],
    }
    return _graph(
        rotations,
        boundary_vertices=["b1", "b2", "b3"],
        boundary_edges=["p1", "p2", "p3"],
    )
