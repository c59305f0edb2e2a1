"""Construction, faces, homology and intersection tests on the fixture zoo."""

import random

import pytest

from dimersurf import zoo
from dimersurf.errors import GraphFormatError, NotACycleError
from dimersurf.surface_graph import SurfaceGraph, disjoint_union


def canon(face):
    face = tuple(face)
    k = face.index(min(face))
    return face[k:] + face[:k]


def face_set(graph):
    return {canon(f) for f in graph.faces}


# (vertices, edges incl. boundary arcs, internal faces, holes, genus, surface b1)
TOPOLOGY = {
    "single_edge_sphere": (2, 1, 1, 0, 0, 0),
    "theta_sphere": (2, 3, 3, 0, 0, 0),
    "cycle_sphere": (4, 4, 2, 0, 0, 0),
    "edge_disk": (2, 2, 1, 1, 0, 0),
    "two_stick_disk": (3, 4, 2, 1, 0, 0),
    "chords_disk": (4, 6, 3, 1, 0, 0),
    "annulus_ladder": (10, 16, 6, 2, 0, 1),
    "torus_two_vertex": (2, 4, 2, 0, 1, 2),
    "torus_grid": (16, 32, 16, 0, 1, 2),
    "grid_sphere": (16, 24, 10, 0, 0, 0),
    "genus_two": (10, 13, 1, 0, 2, 4),
    "pants": (5, 9, 3, 3, 0, 2),
}


@pytest.mark.parametrize("name", sorted(TOPOLOGY))
def test_topology_reports(name):
    g = getattr(zoo, name)()
    d = g.describe()
    got = (
        d["vertices"],
        d["edges"],
        d["internal_faces"],
        d["holes"],
        d["genus_total"],
        d["b1"],
    )
    assert got == TOPOLOGY[name]
    # faces partition the half-edges
    seen = [h for f in g.faces for h in f]
    assert sorted(seen) == sorted(g.twin)
    assert all(g.twin[g.twin[h]] == h for h in g.twin)


def test_faces_theta():
    g = zoo.theta_sphere()
    assert face_set(g) == {("a", "c~"), ("a~", "b"), ("b~", "c")}


def test_faces_two_stick_disk():
    g = zoo.two_stick_disk()
    assert face_set(g) == {("e1", "q", "e2~"), ("e1~", "e2", "p~"), ("p", "q~")}
    assert {canon(g.faces[i]) for i in g.hole_faces} == {("p", "q~")}


def test_faces_chords_disk():
    g = zoo.chords_disk()
    assert face_set(g) == {
        ("a1", "c12~"),
        ("a3", "c34~"),
        ("a2", "c34", "a4", "c12"),
        ("a1~", "a4~", "a3~", "a2~"),
    }


def test_faces_torus_two_vertex():
    g = zoo.torus_two_vertex()
    assert face_set(g) == {("a", "b~", "c", "d~"), ("a~", "b", "c~", "d")}


def test_cap_gap_slots():
    # the hole sits in the rotation gap counter-clockwise of the
    # departing hole-walk half; frozen from the drawings
    assert zoo.edge_disk().cap_gap_slot == {"b": 1}
    assert zoo.two_stick_disk().cap_gap_slot == {"b1": 1, "b2": 2}
    assert zoo.chords_disk().cap_gap_slot == {"b1": 2, "b2": 0, "b3": 0, "b4": 2}
    assert zoo.annulus_ladder().cap_gap_slot == {"b_in": 1, "b_out": 2}
    assert zoo.pants().cap_gap_slot == {"b1": 1, "b2": 1, "b3": 1}


def test_hole_curves():
    g = zoo.annulus_ladder()
    holes = sorted(g.hole_curve(i).halves for i in g.hole_faces)
    assert holes == [("pi",), ("po",)]
    rev = g.reverse_curve(g.hole_curve(sorted(g.hole_faces)[0]))
    assert rev.halves == ("pi~",)


def test_euler_identity_disjoint_union():
    g = disjoint_union(zoo.theta_sphere(), zoo.annulus_ladder())
    d = g.describe()
    assert d["b0"] == 2
    assert d["b1"] == 1
    lhs = sum(2 - 2 * c["genus"] - c["holes"] for c in d["components"])
    assert lhs == d["vertices"] - d["edges"] + d["internal_faces"]


def test_disjoint_union_name_clash():
    with pytest.raises(GraphFormatError, match="used in both graphs"):
        disjoint_union(zoo.theta_sphere(), zoo.torus_two_vertex())


def test_loop_rejected():
    with pytest.raises(GraphFormatError, match="loop"):
        SurfaceGraph(
            vertices=["u"],
            rotations={"u": ["l", "l~"]},
            twins={"l": "l~", "l~": "l"},
        )


def test_isolated_vertex_rejected():
    with pytest.raises(GraphFormatError, match="isolated"):
        SurfaceGraph(
            vertices=["u", "v", "w"],
            rotations={"u": ["a"], "v": ["a~"], "w": []},
            twins={"a": "a~", "a~": "a"},
        )


def test_boundary_vertex_shape_enforced():
    # a boundary vertex must carry exactly one stick and two arcs
    with pytest.raises(GraphFormatError):
        SurfaceGraph(
            vertices=["u", "w", "b"],
            rotations={
                "u": ["s"],
                "w": ["t"],
                "b": ["s~", "t~", "p", "p~"],
            },
            twins={"s": "s~", "s~": "s", "t": "t~", "t~": "t", "p": "p~", "p~": "p"},
            boundary_vertices=["b"],
            boundary_edges=["p"],
        )


def test_make_curve_rejects_open_walk():
    g = zoo.theta_sphere()
    with pytest.raises(NotACycleError):
        g.make_curve(["a", "b"])
    with pytest.raises(GraphFormatError):
        g.make_curve(["nope"])


def test_sphere_basis_empty():
    for name in ("single_edge_sphere", "theta_sphere", "grid_sphere"):
        assert getattr(zoo, name)().h1_basis() == []


def test_gram_matrices():
    assert zoo.torus_two_vertex().h1_gram_matrix() == [[0, 1], [1, 0]]
    assert zoo.annulus_ladder().h1_gram_matrix() == [[0]]
    g2 = zoo.genus_two().h1_gram_matrix()
    assert g2 == [
        [0, 1, 0, 0],
        [1, 0, 0, 0],
        [0, 0, 0, 1],
        [0, 0, 1, 0],
    ]


def test_face_boundaries_are_null_homologous():
    for name in ("torus_two_vertex", "annulus_ladder", "genus_two", "torus_grid"):
        g = getattr(zoo, name)()
        for i in g.internal_faces:
            assert g.class_of(g.face_boundary_bits(i), "absolute").is_zero()


def random_cycle_bits(g, rng):
    bits = 0
    for c in g.h1_basis():
        if rng.random() < 0.5:
            bits ^= g.curve_edge_bits(c)
    for i in g.internal_faces:
        if rng.random() < 0.4:
            bits ^= g.face_boundary_bits(i)
    return bits


def test_class_additivity():
    rng = random.Random(71)
    for name in ("torus_grid", "genus_two", "annulus_ladder"):
        g = getattr(zoo, name)()
        for _ in range(15):
            c1 = random_cycle_bits(g, rng)
            c2 = random_cycle_bits(g, rng)
            lhs = g.class_of(c1 ^ c2, "absolute")
            rhs = g.class_of(c1, "absolute") + g.class_of(c2, "absolute")
            assert lhs == rhs


def chain_class_intersections(g, bits, basis):
    """Intersection numbers of a Z2 cycle with each basis curve, via its
    simple decomposition."""
    out = []
    pieces = g.decompose_to_simple(bits)
    for b in basis:
        out.append(sum(g.intersection(p, b) for p in pieces) % 2)
    return out


def test_intersection_invariant_under_homology():
    rng = random.Random(9)
    for name in ("torus_two_vertex", "torus_grid", "genus_two", "annulus_ladder"):
        g = getattr(zoo, name)()
        basis = g.h1_basis()
        faces = list(g.internal_faces)
        for c in basis:
            bits = g.curve_edge_bits(c)
            base = chain_class_intersections(g, bits, basis)
            for _ in range(20):
                moved = bits ^ g.face_boundary_bits(rng.choice(faces))
                if moved == 0:
                    continue
                assert chain_class_intersections(g, moved, basis) == base


def test_intersection_bilinear():
    rng = random.Random(23)
    for name in ("torus_grid", "genus_two"):
        g = getattr(zoo, name)()
        basis = g.h1_basis()
        for _ in range(10):
            c1 = random_cycle_bits(g, rng)
            c2 = random_cycle_bits(g, rng)
            joint = chain_class_intersections(g, c1 ^ c2, basis)
            left = chain_class_intersections(g, c1, basis)
            right = chain_class_intersections(g, c2, basis)
            assert joint == [(a + b) % 2 for a, b in zip(left, right)]


def test_decompose_sum_and_simplicity():
    rng = random.Random(5)
    g = zoo.torus_grid()
    for _ in range(25):
        bits = random_cycle_bits(g, rng)
        pieces = g.decompose_to_simple(bits)
        acc = 0
        for p in pieces:
            acc ^= g.curve_edge_bits(p)
            origins = [g.vertex_of[h] for h in p.halves]
            assert p.simple == (len(set(origins)) == len(origins))
        assert acc == bits


def test_decompose_rejects_odd_degree():
    g = zoo.theta_sphere()
    with pytest.raises(NotACycleError):
        g.decompose_to_simple(["a"])


def test_decompose_boundary_loop():
    g = zoo.edge_disk()
    (curve,) = g.decompose_to_simple(["p"])
    assert curve.halves == ("p",)


def test_decompose_full_torus_chain():
    # all four edges meet at both vertices; the rotation pairing splits
    # the chain into two edge-disjoint simple curves
    g = zoo.torus_two_vertex()
    pieces = g.decompose_to_simple(["a", "b", "c", "d"])
    assert len(pieces) == 2
    assert all(p.simple for p in pieces)


def test_relative_ranks():
    expected = {
        "theta_sphere": 0,
        "edge_disk": 0,
        "two_stick_disk": 0,
        "chords_disk": 0,
        "annulus_ladder": 1,
        "pants": 2,
        "torus_two_vertex": 2,
        "genus_two": 4,
    }
    for name, rank in expected.items():
        g = getattr(zoo, name)()
        assert g.rel_h1_int_basis().rank == rank, name


def add_int_chains(c1, c2):
    out = dict(c1)
    for e, c in c2.items():
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def test_relative_solver_unit_vectors():
    for name in ("annulus_ladder", "torus_two_vertex", "genus_two", "pants"):
        g = getattr(zoo, name)()
        basis = g.rel_h1_int_basis()
        for i, gamma in enumerate(basis.gamma):
            coords = basis.coefficients(gamma)
            assert coords == tuple(1 if j == i else 0 for j in range(basis.rank))


def test_relative_solver_mod_faces():
    # adding an internal face boundary never changes the coefficients
    for name in ("annulus_ladder", "torus_two_vertex", "pants"):
        g = getattr(zoo, name)()
        basis = g.rel_h1_int_basis()
        if not basis.rank:
            continue
        gamma = basis.gamma[0]
        for i in list(g.internal_faces)[:4]:
            moved = add_int_chains(gamma, g.face_boundary_int(i, interior_only=True))
            assert basis.coefficients(moved) == basis.coefficients(gamma)


def test_relative_mod2_compatibility():
    rng = random.Random(41)
    for name in ("annulus_ladder", "torus_two_vertex", "genus_two", "pants"):
        g = getattr(zoo, name)()
        basis = g.rel_h1_int_basis()
        for _ in range(10):
            coeffs = [rng.randrange(-2, 3) for _ in range(basis.rank)]
            chain = {}
            for c, gamma in zip(coeffs, basis.gamma):
                for e, x in gamma.items():
                    chain[e] = chain.get(e, 0) + c * x
            chain = {e: c for e, c in chain.items() if c}
            mod2 = [e for e, c in chain.items() if c % 2]
            got = g.class_of(mod2, "relative").vector
            assert got == tuple(c % 2 for c in coeffs)


def test_annulus_relative_generator_is_cross_arc():
    g = zoo.annulus_ladder()
    basis = g.rel_h1_int_basis()
    assert basis.rank == 1
    (walk,) = basis.walks
    ends = {g.vertex_of[walk[0]], g.vertex_of[g.twin[walk[-1]]]}
    assert ends == {"b_in", "b_out"}


def test_absolute_class_of_basis_curves():
    g = zoo.torus_two_vertex()
    b0, b1 = g.h1_basis()
    assert g.class_of(g.curve_edge_bits(b0), "absolute").vector == (1, 0)
    assert g.class_of(g.curve_edge_bits(b1), "absolute").vector == (0, 1)
