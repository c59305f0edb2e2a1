"""Admissible edge orientations and the Pfaffian partition formulas.

An orientation is admissible when every internal face walk (face on the
left) runs against the orientation an odd number of times; boundary
arcs are oriented too.  Equivalence is generated by reversing all edges
at one vertex; the classes form an affine space over the first
cohomology with Z2 coefficients, and each class contributes one
Pfaffian to the partition function.
"""

from fractions import Fraction

from .dimer import WeightSystem, boundary_of, check_configuration
from .errors import CrossCheckError, GraphFormatError, ObstructionError
from .linalg import Z2Solver, z2_extend_basis, z2_solve_full
from .pfaffian import permutation_sign, pf
from .surface_graph import HomologyClass


class KasteleynOrientation:
    """Direction for every edge of the closed-up graph.

    head maps each edge (interior edges and boundary arcs alike) to the
    half-edge sitting at the head vertex.
    """

    __slots__ = ("graph", "head")

    def __init__(self, graph, head):
        self.graph = graph
        self.head = dict(head)
        if set(self.head) != set(graph.edges):
            raise GraphFormatError(
                "orientation must direct every edge exactly once")
        for e, h in self.head.items():
            if h not in graph.edge_halves[e]:
                raise GraphFormatError(
                    "half-edge %r does not belong to edge %r" % (h, e))
        for f in graph.internal_faces:
            if _against_count(graph, self.head, graph.faces[f]) % 2 == 0:
                raise GraphFormatError(
                    "internal face %d has an even opposing count" % f)

    def head_vertex(self, e):
        return self.graph.vertex_of[self.head[e]]

    def tail_vertex(self, e):
        return self.graph.vertex_of[self.graph.twin[self.head[e]]]

    def against(self, h):
        """True iff travelling along h runs against the orientation."""
        return self.head[self.graph.edge_of(h)] == h

    def flipped(self, edges):
        head = dict(self.head)
        for e in edges:
            if e not in head:
                raise GraphFormatError("unknown edge %r" % (e,))
            h1, h2 = self.graph.edge_halves[e]
            head[e] = h1 if head[e] == h2 else h2
        return KasteleynOrientation(self.graph, head)

    def __eq__(self, other):
        return (
            isinstance(other, KasteleynOrientation)
            and self.graph is other.graph
            and self.head == other.head
        )

    def __hash__(self):
        return hash(frozenset(self.head.items()))

    def to_dict(self):
        """edge -> head vertex; loop arcs listed with their head half."""
        out = {"heads": {e: self.head_vertex(e) for e in self.graph.edges}}
        loops = {
            e: self.head[e] for e in self.graph.edges
            if self.head_vertex(e) == self.tail_vertex(e)
        }
        if loops:
            out["loop_heads"] = loops
        return out


def orientation_from_dict(graph, data):
    heads = data.get("heads")
    if not isinstance(heads, dict):
        raise GraphFormatError("orientation needs a 'heads' map")
    loops = data.get("loop_heads", {})
    head = {}
    for e in graph.edges:
        if e not in heads:
            raise GraphFormatError("orientation misses edge %r" % (e,))
        h1, h2 = graph.edge_halves[e]
        if e in loops:
            head[e] = loops[e]
        elif graph.vertex_of[h2] == heads[e]:
            head[e] = h2
        elif graph.vertex_of[h1] == heads[e]:
            head[e] = h1
        else:
            raise GraphFormatError(
                "vertex %r is not an endpoint of edge %r" % (heads[e], e))
    return KasteleynOrientation(graph, head)


def _against_count(graph, head, walk):
    return sum(1 for h in walk if head[graph.edge_of(h)] == h)


def n_count(K, curve):
    """Number of curve steps running against the orientation."""
    return _against_count(K.graph, K.head, curve.halves)


def _parity_row(graph, walk):
    # edges whose flip changes the opposing parity of this walk: those
    # traversed exactly once (an edge seen from both sides cancels)
    cnt = {}
    for h in walk:
        e = graph.edge_of(h)
        cnt[e] = cnt.get(e, 0) + 1
    return graph.chain_bits([e for e, c in cnt.items() if c == 1])


def _star_bits(graph, v):
    # a vertex reversal flips the edges with exactly one end at v; a
    # loop arc has both ends there and is reversed twice, i.e. not at all
    cnt = {}
    for h in graph.rotation[v]:
        e = graph.edge_of(h)
        cnt[e] = cnt.get(e, 0) + 1
    return graph.chain_bits([e for e, c in cnt.items() if c == 1])


def construct(graph, parities=None):
    """Some admissible orientation, optionally with prescribed hole
    parities.

    parities maps each hole face index to the bit n_i defined through
    1 + n^K(hole walk) == n_i mod 2; per component the bits must sum to
    the vertex count mod 2, else no orientation exists.
    """
    if parities is not None:
        if set(parities) != set(graph.hole_faces):
            raise GraphFormatError(
                "parities must be given for exactly the hole faces %r"
                % (list(graph.hole_faces),))
        for i, b in parities.items():
            if b not in (0, 1):
                raise GraphFormatError("hole parity must be 0 or 1, got %r" % (b,))
    for root in graph.component_roots:
        data = graph.component_data[root]
        nverts = len(data["vertices"])
        if parities is None:
            if data["closed"] and nverts % 2:
                raise ObstructionError(
                    "closed component %r has an odd number of vertices" % (root,))
        else:
            total = sum(parities[i] for i in data["holes"])
            if (total - nverts) % 2:
                raise ObstructionError(
                    "hole parities of component %r sum to %d, need %d mod 2"
                    % (root, total, nverts % 2))

    head = {e: graph.edge_halves[e][1] for e in graph.edges}
    rows = []
    rhs = []
    for f in graph.internal_faces:
        rows.append(_parity_row(graph, graph.faces[f]))
        rhs.append((1 + _against_count(graph, head, graph.faces[f])) % 2)
    if parities is not None:
        for f in graph.hole_faces:
            rows.append(_parity_row(graph, graph.faces[f]))
            rhs.append(
                (1 + parities[f] + _against_count(graph, head, graph.faces[f])) % 2)
    flips, _ = z2_solve_full(rows, rhs, len(graph.edges))
    if flips is None:
        raise ObstructionError("no orientation satisfies the requested parities")
    for e in graph.bits_edges(flips):
        h1, h2 = graph.edge_halves[e]
        head[e] = h1 if head[e] == h2 else h2
    return KasteleynOrientation(graph, head)


def hole_parities(K):
    """The bit n_i of each hole face under the orientation."""
    return {
        f: (1 + n_count(K, K.graph.hole_curve(f))) % 2
        for f in K.graph.hole_faces
    }


def _star_solver(graph):
    solver = Z2Solver()
    for v in graph.vertices:
        solver.add(_star_bits(graph, v))
    return solver


def equivalent(graph, K1, K2):
    """True iff the two orientations differ by vertex reversals."""
    diff = graph.chain_bits([e for e in graph.edges if K1.head[e] != K2.head[e]])
    return _star_solver(graph).contains(diff)


def classes(graph, K0):
    """One representative per equivalence class, starting from K0.

    Flip sets preserving all face parities form the cocycle space; the
    classes are its quotient by the vertex stars, one representative
    per coordinate vector in lexicographic order.
    """
    rows = [_parity_row(graph, graph.faces[f]) for f in graph.internal_faces]
    _, kernel = z2_solve_full(rows, [0] * len(rows), len(graph.edges))
    stars = [_star_bits(graph, v) for v in graph.vertices]
    picked = [kernel[i] for i in z2_extend_basis(stars, kernel)]
    if len(picked) != graph.b1:
        raise CrossCheckError(
            "cocycle quotient has rank %d, topology says %d"
            % (len(picked), graph.b1))
    out = []
    for k in range(1 << len(picked)):
        bits = 0
        for i, vec in enumerate(picked):
            if k >> (len(picked) - 1 - i) & 1:
                bits ^= vec
        out.append(K0.flipped(graph.bits_edges(bits)))
    return out


class QuadraticForm:
    """Values on a homology basis plus the intersection Gram matrix;
    polarization extends them to every class."""

    __slots__ = ("values", "gram")

    def __init__(self, values, gram):
        self.values = tuple(v % 2 for v in values)
        self.gram = tuple(tuple(row) for row in gram)

    def evaluate(self, alpha):
        if alpha.variant != "absolute" or len(alpha.vector) != len(self.values):
            raise ValueError("expected an absolute class in this basis")
        v = alpha.vector
        total = sum(a * q for a, q in zip(v, self.values))
        for i in range(len(v)):
            for j in range(i + 1, len(v)):
                total += v[i] * v[j] * self.gram[i][j]
        return total % 2

    def __eq__(self, other):
        return (
            isinstance(other, QuadraticForm)
            and self.values == other.values
            and self.gram == other.gram
        )

    def __str__(self):
        lines = ["basis %d: q = %d" % (i, q) for i, q in enumerate(self.values)]
        return "\n".join(lines) if lines else "trivial form"


def _left_of_passage(graph, v, a, d, s):
    # rays strictly inside the counter-clockwise sweep from the
    # departure d to the arrival a lie on the left of the passage
    deg = graph.degree(v)
    return (s - graph.slot[d]) % deg < (graph.slot[a] - graph.slot[d]) % deg


def _ell_count(graph, D, curve):
    # curve vertices whose dimer sticks out strictly to the left
    matched_half = {}
    for e in D:
        for h in graph.edge_halves[e]:
            matched_half[graph.vertex_of[h]] = h
    total = 0
    for v, a, d in graph.curve_passages(curve):
        dh = matched_half.get(v)
        if dh is None or dh == a or dh == d:
            continue
        if _left_of_passage(graph, v, a, d, graph.slot[dh]):
            total += 1
    return total


def _unmatched_right_count(graph, D, curve):
    # unmatched boundary vertices on the curve with the surface interior
    # on the right, i.e. with the hole gap opening to the left; the gap
    # sits just counter-clockwise of the recorded slot, which therefore
    # counts even when it coincides with the departure
    matched = {graph.vertex_of[h] for e in D for h in graph.edge_halves[e]}
    total = 0
    for v, a, d in graph.curve_passages(curve):
        if v not in graph.boundary_vertices or v in matched:
            continue
        deg = graph.degree(v)
        gap = (graph.cap_gap_slot[v] - graph.slot[d]) % deg
        if gap < (graph.slot[a] - graph.slot[d]) % deg:
            total += 1
    return total


def q_of_family(graph, K, D, curves):
    """The spin form evaluated on an explicit family of closed curves
    representing a class.

    Curves may revisit vertices as long as their passages pair off
    without crossings (what decompose_to_simple produces); left and
    right are resolved per passage.
    """
    total = 0
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            total += graph.intersection(curves[i], curves[j])
    for c in curves:
        total += 1 + n_count(K, c) + _ell_count(graph, D, c)
        total += _unmatched_right_count(graph, D, c)
    return total % 2


def quadratic_form(graph, K, D):
    """The quadratic form of the orientation class relative to D,
    tabulated on the homology basis."""
    D = check_configuration(graph, D)
    values = []
    for curve in graph.h1_basis():
        family = graph.decompose_to_simple(graph.curve_edge_bits(curve))
        values.append(q_of_family(graph, K, D, family))
    return QuadraticForm(values, graph.h1_gram_matrix())


def arf(form):
    """Sign of the sum of (-1)^q over all classes: +1, -1, or 0."""
    n = len(form.values)
    total = 0
    for k in range(1 << n):
        vec = tuple(k >> (n - 1 - i) & 1 for i in range(n))
        total += -1 if form.evaluate(HomologyClass("absolute", vec)) else 1
    if total == 0:
        return 0
    return 1 if total > 0 else -1


def _matched_vertices(graph, bc):
    bc = frozenset(bc)
    unknown = bc - graph.boundary_vertices
    if unknown:
        raise GraphFormatError(
            "%r is not a boundary vertex" % (sorted(unknown)[0],))
    return [
        v for v in graph.vertices
        if v not in graph.boundary_vertices or v in bc
    ]


def epsilon(graph, K, D, bc=None):
    """Sign comparing the dimer pairing with the vertex order.

    The matched vertices are listed in graph order; the permutation
    sending that list to (tail, head) pairs of the dimers, times the
    orientation signs, is independent of how the pairs are arranged.
    """
    D = check_configuration(graph, D)
    if bc is not None and boundary_of(graph, D) != frozenset(bc):
        raise GraphFormatError(
            "configuration does not match the boundary condition")
    matched = _matched_vertices(graph, boundary_of(graph, D))
    index = {v: i for i, v in enumerate(matched)}
    seq = []
    for e in sorted(D):
        seq.append(index[K.tail_vertex(e)])
        seq.append(index[K.head_vertex(e)])
    return permutation_sign(seq)


class KasteleynMatrix:
    """Skew weight matrix over the matched vertices of one boundary
    condition."""

    __slots__ = ("vertices", "matrix")

    def __init__(self, vertices, matrix):
        self.vertices = tuple(vertices)
        self.matrix = matrix


def kasteleyn_matrix(graph, K, weights, bc):
    """Entry (v, v') sums the signed weights of the interior edges
    between the two vertices.

    Boundary arcs stay out: they carry no weight and no configuration
    ever uses them, so an arc between two matched vertices would add a
    spurious matching term to the Pfaffian.  Dropping them is what makes
    the matrix agree with the one of the closed-up graph obtained by
    deleting the unmatched boundary vertices and filling the holes.
    """
    w = weights if isinstance(weights, WeightSystem) else WeightSystem(graph, weights)
    matched = _matched_vertices(graph, bc)
    index = {v: i for i, v in enumerate(matched)}
    n = len(matched)
    A = [[Fraction(0)] * n for _ in range(n)]
    for e in graph.edges:
        if e in graph.boundary_edges:
            continue
        t = index.get(K.tail_vertex(e))
        h = index.get(K.head_vertex(e))
        if t is None or h is None or t == h:
            continue
        A[t][h] += w[e]
        A[h][t] -= w[e]
    return KasteleynMatrix(matched, A)


def _check_reference(graph, bc, D0):
    D0 = check_configuration(graph, D0)
    if boundary_of(graph, D0) != frozenset(bc):
        raise GraphFormatError(
            "reference configuration does not match the boundary condition")
    return D0


def partition_Z_alpha(graph, weights, bc, alpha, D0):
    """Class-resolved partition sum via one Pfaffian per orientation
    class: 2^-b1 * sum over classes of (-1)^q(alpha) eps Pf."""
    if alpha.variant != "absolute":
        raise GraphFormatError("expected an absolute homology class")
    w = weights if isinstance(weights, WeightSystem) else WeightSystem(graph, weights)
    D0 = _check_reference(graph, bc, D0)
    total = Fraction(0)
    for K in classes(graph, construct(graph)):
        term = epsilon(graph, K, D0) * pf(kasteleyn_matrix(graph, K, w, bc).matrix)
        if quadratic_form(graph, K, D0).evaluate(alpha):
            term = -term
        total += term
    return total / 2 ** graph.b1


def partition_Z(graph, weights, bc, D0):
    """Full partition sum: 2^-g * sum over classes of Arf eps Pf, with
    g the total genus over components."""
    w = weights if isinstance(weights, WeightSystem) else WeightSystem(graph, weights)
    D0 = _check_reference(graph, bc, D0)
    total = Fraction(0)
    for K in classes(graph, construct(graph)):
        total += (
            arf(quadratic_form(graph, K, D0))
            * epsilon(graph, K, D0)
            * pf(kasteleyn_matrix(graph, K, w, bc).matrix)
        )
    return total / 2 ** graph.genus_total
