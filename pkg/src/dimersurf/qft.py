"""Boundary state vectors of the dimer model.

A weighted graph with signed boundary vertices is assigned the vector
of its partition sums, one amplitude per boundary condition.  Gluing
boundary vertices in pairs becomes a contraction of that vector, and
the assignment also has a fermionic form: a Grassmann element on the
boundary generators whose monomial coefficients are the amplitudes,
obtained by integrating the interior generators out of the Kasteleyn
exponential, one orientation class at a time.
"""

from fractions import Fraction

from .dimer import (
    WeightSystem,
    boundary_conditions,
    enumerate_dimers,
    partition_oracle,
)
from .errors import CrossCheckError, GraphFormatError
from .kasteleyn import arf, classes, construct, partition_Z, quadratic_form
from .pfaffian import (
    GrassmannElement,
    gr_exp,
    gr_integrate,
    gr_quadratic,
    permutation_sign,
)
from .surgery import glue

_METHODS = ("pfaffian", "oracle", "both")


class BoundaryVector:
    """Amplitudes indexed by boundary conditions, with a sign per slot.

    The sign marks each boundary vertex as a covariant (+1) or
    contravariant (-1) tensor slot; only opposite slots contract.
    Amplitudes are stored sparsely, absent conditions meaning zero.
    """

    __slots__ = ("vertices", "signs", "amplitudes")

    def __init__(self, vertices, signs, amplitudes):
        self.vertices = tuple(sorted(vertices))
        vset = set(self.vertices)
        self.signs = {}
        for v in self.vertices:
            s = signs.get(v, 1)
            if s not in (1, -1):
                raise GraphFormatError(
                    "boundary sign of %r must be +1 or -1, got %r" % (v, s))
            self.signs[v] = s
        stray = set(signs) - vset
        if stray:
            raise GraphFormatError(
                "sign given for unknown boundary vertex %r"
                % (sorted(stray)[0],))
        self.amplitudes = {}
        for bc, c in amplitudes.items():
            bc = frozenset(bc)
            if not bc <= vset:
                raise GraphFormatError(
                    "amplitude indexed by unknown boundary vertex %r"
                    % (sorted(bc - vset)[0],))
            c = Fraction(c)
            if c:
                self.amplitudes[bc] = c

    def amplitude(self, bc):
        bc = frozenset(bc)
        stray = bc - set(self.vertices)
        if stray:
            raise GraphFormatError(
                "%r is not a boundary vertex of this vector"
                % (sorted(stray)[0],))
        return self.amplitudes.get(bc, Fraction(0))

    def scalar(self):
        """The single amplitude of a vector with no boundary slots."""
        if self.vertices:
            raise GraphFormatError("vector still has boundary slots")
        return self.amplitude(())

    def items(self):
        """(matched set, amplitude) pairs in a fixed order."""
        return sorted(self.amplitudes.items(), key=lambda kv: sorted(kv[0]))

    def relabel(self, mapping):
        """Push the vector through a renaming of its boundary vertices."""
        if sorted(mapping) != list(self.vertices):
            raise GraphFormatError("relabeling must cover every slot once")
        if len(set(mapping.values())) != len(mapping):
            raise GraphFormatError("relabeling must be injective")
        return BoundaryVector(
            mapping.values(),
            {mapping[v]: s for v, s in self.signs.items()},
            {frozenset(mapping[v] for v in bc): c
             for bc, c in self.amplitudes.items()},
        )

    def __eq__(self, other):
        return (
            isinstance(other, BoundaryVector)
            and self.vertices == other.vertices
            and self.signs == other.signs
            and self.amplitudes == other.amplitudes
        )


def _coerce_weights(graph, weights):
    if isinstance(weights, WeightSystem):
        return weights
    return WeightSystem(graph, weights)


def boundary_vector(graph, weights=None, signs=None, method="pfaffian"):
    """The vector of partition sums Z(graph; w | bc) over all bc.

    method picks the route per amplitude: "pfaffian" for the orientation
    class formula, "oracle" for exhaustive enumeration, "both" to run
    the two and insist they agree.  A closed graph gives the single
    amplitude Z, the empty graph gives 1.
    """
    if method not in _METHODS:
        raise GraphFormatError("unknown method %r" % (method,))
    w = _coerce_weights(graph, weights)
    amps = {}
    for bc in boundary_conditions(graph):
        configs = enumerate_dimers(graph, bc)
        if not configs:
            continue
        if method in ("pfaffian", "both"):
            val = partition_Z(graph, w, bc, configs[0])
            if method == "both":
                check = partition_oracle(graph, w, bc)
                if val != check:
                    raise CrossCheckError(
                        "amplitude mismatch at %r: pfaffian %s vs oracle %s"
                        % (sorted(bc), val, check))
        else:
            val = partition_oracle(graph, w, bc)
        amps[bc] = val
    return BoundaryVector(graph.boundary_vertices, dict(signs or {}), amps)


def tensor(vec, other):
    """Amplitude products over a disjoint union of slot sets."""
    overlap = set(vec.vertices) & set(other.vertices)
    if overlap:
        raise GraphFormatError(
            "tensor factors share boundary vertex %r" % (sorted(overlap)[0],))
    signs = dict(vec.signs)
    signs.update(other.signs)
    amps = {}
    for bc1, c1 in vec.amplitudes.items():
        for bc2, c2 in other.amplitudes.items():
            amps[bc1 | bc2] = c1 * c2
    return BoundaryVector(vec.vertices + other.vertices, signs, amps)


def _check_pairing(vec, pairing):
    pairs = [tuple(p) for p in pairing]
    seen = set()
    for u, v in pairs:
        for x in (u, v):
            if x not in vec.signs:
                raise GraphFormatError(
                    "%r is not a boundary vertex of this vector" % (x,))
            if x in seen:
                raise GraphFormatError("vertex %r paired twice" % (x,))
            seen.add(x)
        if vec.signs[u] != -vec.signs[v]:
            raise GraphFormatError(
                "paired vertices %r and %r carry equal signs; contraction "
                "needs one covariant and one contravariant slot" % (u, v))
    return pairs


def contract(vec, pairing):
    """Contract paired slots of opposite sign.

    Each amplitude of the result sums the amplitudes of all boundary
    conditions that restrict to it and treat every pair jointly: both
    vertices matched or both unmatched.  The empty pairing is the
    identity.
    """
    pairs = _check_pairing(vec, pairing)
    gone = {x for p in pairs for x in p}
    rest = [v for v in vec.vertices if v not in gone]
    amps = {}
    for bc, c in vec.amplitudes.items():
        if all((u in bc) == (v in bc) for u, v in pairs):
            key = bc - gone
            amps[key] = amps.get(key, Fraction(0)) + c
    return BoundaryVector(
        rest, {v: vec.signs[v] for v in rest}, amps)


def gluing_axiom_check(graph, gm, weights=None, method="both",
                       fermionic=False):
    """Check that contraction commutes with gluing.

    Contracting the boundary vector over the junction pairs of the
    gluing must equal the boundary vector of the glued graph with the
    merged weights, amplitude by amplitude; gm None means the empty
    gluing, which contracts nothing.  With fermionic set, the same
    identity is replayed on the Grassmann side.  Returns a report dict;
    look at report["match"].
    """
    w = _coerce_weights(graph, weights)
    if gm is None:
        pairs = []
        glued_graph, glued_w = graph, w
    else:
        res = glue(graph, gm, w)
        pairs = list(res.pairs)
        glued_graph, glued_w = res.graph, res.weights
    signs = {}
    for u, v in pairs:
        signs[u] = 1
        signs[v] = -1
    vec = boundary_vector(graph, w, signs, method=method)
    lhs = contract(vec, pairs)
    rhs = boundary_vector(
        glued_graph, glued_w,
        {v: lhs.signs[v] for v in lhs.vertices}, method=method)
    report = {
        "pairs": tuple(pairs),
        "contracted": lhs,
        "glued": rhs,
        "match": lhs == rhs,
    }
    if fermionic:
        adapted = pair_adapted_order(graph.boundary_vertices, pairs)
        fl, order = contract_fermionic(
            fermionic_vector(graph, w, adapted), adapted, pairs)
        fr = fermionic_vector(glued_graph, glued_w)
        report["fermionic_match"] = (
            fl == fr and order == sorted(glued_graph.boundary_vertices))
        report["match"] = report["match"] and report["fermionic_match"]
    return report


# --- the fermionic form -------------------------------------------------------

def _boundary_first(graph, border=None):
    # interior generators come last so that integrating them out of an
    # ascending monomial costs no sign
    if border is None:
        border = sorted(graph.boundary_vertices)
    else:
        border = list(border)
        if sorted(border) != sorted(graph.boundary_vertices):
            raise GraphFormatError(
                "generator order must list every boundary vertex once")
    return border + [v for v in graph.vertices
                     if v not in graph.boundary_vertices]


def _full_matrix(graph, K, w, order):
    idx = {v: i for i, v in enumerate(order)}
    n = len(order)
    A = [[Fraction(0)] * n for _ in range(n)]
    for e in graph.edges:
        if e in graph.boundary_edges:
            continue
        t, h = idx[K.tail_vertex(e)], idx[K.head_vertex(e)]
        if t == h:
            continue
        A[t][h] += w[e]
        A[h][t] -= w[e]
    return A


def _epsilon_ordered(graph, K, D, order):
    # the sign of epsilon depends on the vertex order; the fermionic
    # route needs it in the boundary-first order of the generators
    matched = set()
    for e in D:
        matched.update(graph.edge_endpoints(e))
    verts = [v for v in order
             if v not in graph.boundary_vertices or v in matched]
    index = {v: i for i, v in enumerate(verts)}
    seq = []
    for e in sorted(D):
        seq.append(index[K.tail_vertex(e)])
        seq.append(index[K.head_vertex(e)])
    return permutation_sign(seq)


def fermionic_vector(graph, weights=None, order=None):
    """The boundary vector as a Grassmann element.

    Generator i stands for the i-th boundary vertex, by default in
    sorted order; the coefficient of the monomial of a matched set
    equals the amplitude of that boundary condition.  Per orientation
    class the interior generators are integrated out of exp of the
    Kasteleyn quadratic, each boundary monomial picks up the Arf and
    permutation signs of its own boundary condition, and the classes
    are averaged with the genus normalization.  The measure sign only
    depends on the boundary condition, not on the reference
    configuration realizing it; a vanishing Arf prunes the class from
    that amplitude.  Passing an explicit order twists the permutation
    signs accordingly, which is what makes the contraction kernel work
    on a gluing-adapted order.
    """
    w = _coerce_weights(graph, weights)
    order = _boundary_first(graph, order)
    bverts = order[:len(graph.boundary_vertices)]
    nb = len(bverts)
    n = len(order)
    refs = {}
    for bc in boundary_conditions(graph):
        configs = enumerate_dimers(graph, bc)
        if configs:
            refs[bc] = configs[0]
    total = GrassmannElement.zero(nb)
    if not refs:
        return total
    for K in classes(graph, construct(graph)):
        el = gr_exp(gr_quadratic(_full_matrix(graph, K, w, order)))
        part = gr_integrate(el, range(nb, n))
        terms = {}
        for mono, c in part.terms.items():
            bc = frozenset(bverts[i] for i in mono)
            D = refs.get(bc)
            if D is None:
                raise CrossCheckError(
                    "nonzero Pfaffian minor at infeasible boundary "
                    "condition %r" % (sorted(bc),))
            s = (arf(quadratic_form(graph, K, D))
                 * _epsilon_ordered(graph, K, D, order))
            if s:
                terms[mono] = s * c
        total = total + GrassmannElement(nb, terms)
    return Fraction(1, 2 ** graph.genus_total) * total


def pair_adapted_order(vertices, pairing):
    """Generator order with the paired vertices last and pair-adjacent.

    Contracting against the pairing kernel is sign-free exactly in such
    an order, so compute the fermionic vector in it before contracting.
    """
    gone = {x for p in pairing for x in p}
    return ([v for v in sorted(vertices) if v not in gone]
            + [x for p in pairing for x in p])


def contract_fermionic(element, vertices, pairing):
    """Contract a fermionic vector by integrating paired generators
    against the diagonal pairing kernel exp of the sum of products.

    vertices names the generators of element in order.  The paired
    vertices must sit in the trailing positions, partners adjacent, as
    produced by pair_adapted_order; only then does each pair act as an
    even unit and the Berezin integral reproduce the amplitude
    contraction with no stray signs.  Returns the contracted element
    together with the kept vertex list, generator indices compressed.
    """
    idx = {v: i for i, v in enumerate(vertices)}
    seen = set()
    partner = {}
    for u, v in pairing:
        for x in (u, v):
            if x not in idx:
                raise GraphFormatError(
                    "%r is not a generator of this element" % (x,))
            if x in seen:
                raise GraphFormatError("vertex %r paired twice" % (x,))
            seen.add(x)
        partner[u] = v
        partner[v] = u
    n = len(vertices)
    k = n - 2 * len(pairing)
    tail = vertices[k:]
    if set(tail) != seen or any(
            partner[tail[2 * i]] != tail[2 * i + 1]
            for i in range(len(pairing))):
        raise GraphFormatError(
            "paired generators must come last, partners adjacent; "
            "recompute the vector in a pair-adapted order")
    kernel = GrassmannElement(
        n, {(k + 2 * i, k + 2 * i + 1): 1 for i in range(len(pairing))})
    integrated = gr_integrate(gr_exp(kernel) * element, range(k, n))
    return GrassmannElement(k, dict(integrated.terms)), list(vertices[:k])
