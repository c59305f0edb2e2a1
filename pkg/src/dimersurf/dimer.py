"""Dimer configurations, weights, and the exhaustive reference sums.

A configuration is a frozenset of graph edges (boundary arcs never
qualify) covering every interior vertex exactly once and every boundary
vertex at most once.  Everything here is brute force on purpose: these
sums are the oracle the Pfaffian formulas are checked against, so they
must not share any machinery with them.
"""

from fractions import Fraction

from .errors import GraphFormatError


def check_configuration(graph, edges):
    """Validate a dimer configuration and return it as a frozenset."""
    D = frozenset(edges)
    cover = {}
    for e in D:
        if e not in graph.edge_halves:
            raise GraphFormatError("unknown edge %r in configuration" % (e,))
        if e in graph.boundary_edges:
            raise GraphFormatError("boundary arc %r cannot carry a dimer" % (e,))
        for v in graph.edge_endpoints(e):
            cover[v] = cover.get(v, 0) + 1
    for v in graph.vertices:
        c = cover.get(v, 0)
        if v in graph.boundary_vertices:
            if c > 1:
                raise GraphFormatError("vertex %r covered twice" % (v,))
        elif c != 1:
            raise GraphFormatError(
                "interior vertex %r covered %d times" % (v, c))
    return D


def boundary_of(graph, D):
    """The boundary condition of a configuration: its matched boundary
    vertices."""
    matched = set()
    for e in D:
        for v in graph.edge_endpoints(e):
            if v in graph.boundary_vertices:
                matched.add(v)
    return frozenset(matched)


def boundary_conditions(graph):
    """All subsets of the boundary vertices, in binary-counter order."""
    verts = sorted(graph.boundary_vertices)
    n = len(verts)
    out = []
    for k in range(1 << n):
        out.append(frozenset(v for i, v in enumerate(verts) if k >> i & 1))
    return out


class WeightSystem:
    """Positive rational edge weights; boundary arcs weigh 1.

    Missing graph edges default to weight 1, which keeps hand-written
    test fixtures short.
    """

    def __init__(self, graph, weights=None):
        self.graph = graph
        table = {}
        for e, val in (weights or {}).items():
            if e not in graph.edge_halves:
                raise GraphFormatError("weight for unknown edge %r" % (e,))
            if e in graph.boundary_edges:
                raise GraphFormatError(
                    "boundary arc %r cannot carry a weight" % (e,))
            val = Fraction(val)
            if val <= 0:
                raise GraphFormatError("weight of %r must be positive" % (e,))
            table[e] = val
        self.table = {e: table.get(e, Fraction(1)) for e in graph.interior_edges}

    def __getitem__(self, e):
        if e in self.graph.boundary_edges:
            return Fraction(1)
        try:
            return self.table[e]
        except KeyError:
            raise GraphFormatError("weight for unknown edge %r" % (e,))

    def __eq__(self, other):
        return isinstance(other, WeightSystem) and self.table == other.table

    def as_float(self):
        return {e: float(w) for e, w in self.table.items()}


def weight(D, w):
    """w(D): the product of the dimer weights; empty product is 1."""
    total = Fraction(1)
    for e in D:
        total *= w[e]
    return total


class GaugeElement:
    """Positive rational function on vertices, acting on weight systems."""

    def __init__(self, graph, values=None):
        self.graph = graph
        self.table = {}
        for v, val in (values or {}).items():
            if v not in graph.vertices:
                raise GraphFormatError("gauge value for unknown vertex %r" % (v,))
            val = Fraction(val)
            if val <= 0:
                raise GraphFormatError("gauge value at %r must be positive" % (v,))
            self.table[v] = val

    def __getitem__(self, v):
        return self.table.get(v, Fraction(1))

    def act(self, w):
        out = {}
        for e in self.graph.interior_edges:
            tail, head = self.graph.edge_endpoints(e)
            out[e] = self[tail] * w[e] * self[head]
        return WeightSystem(self.graph, out)


def gauge_act(s, w):
    """(sw)(e) = s(tail) w(e) s(head)."""
    return s.act(w)


def _incident_edges(graph, v):
    # graph edges only, in rotation order; multi-edges appear once each
    out = []
    for h in graph.rotation[v]:
        e = graph.edge_of(h)
        if e not in graph.boundary_edges and e not in out:
            out.append(e)
    return out


def enumerate_dimers(graph, bc=None):
    """All dimer configurations, in a fixed depth-first order.

    With bc given, only configurations whose matched boundary set is
    exactly bc.  Branching happens at the lowest-indexed undecided
    vertex, edges tried in rotation order, the leave-unmatched branch
    (where allowed) last.
    """
    if bc is not None:
        bc = frozenset(bc)
        stray = bc - graph.boundary_vertices
        if stray:
            raise GraphFormatError(
                "boundary condition names non-boundary vertex %r"
                % (sorted(stray)[0],))
    verts = list(graph.vertices)
    incident = {v: _incident_edges(graph, v) for v in verts}
    covered = set()
    skipped = set()  # boundary vertices decided to stay unmatched
    current = []
    out = []

    def must_match(v):
        if v not in graph.boundary_vertices:
            return True
        return bc is not None and v in bc

    def may_match(v):
        if v in covered or v in skipped:
            return False
        if v not in graph.boundary_vertices:
            return True
        return bc is None or v in bc

    def walk(i):
        while i < len(verts) and (verts[i] in covered or verts[i] in skipped):
            i += 1
        if i == len(verts):
            out.append(frozenset(current))
            return
        v = verts[i]
        if not must_match(v):
            if bc is not None:
                # pinned unmatched: just pass over it
                skipped.add(v)
                walk(i + 1)
                skipped.discard(v)
                return
        covered.add(v)
        for e in incident[v]:
            tail, head = graph.edge_endpoints(e)
            u = head if tail == v else tail
            if not may_match(u):
                continue
            covered.add(u)
            current.append(e)
            walk(i + 1)
            current.pop()
            covered.discard(u)
        covered.discard(v)
        if not must_match(v):
            skipped.add(v)
            walk(i + 1)
            skipped.discard(v)

    walk(0)
    return out


def partition_oracle(graph, w, bc=None):
    """Z(Gamma; w | bc) by exhaustive enumeration."""
    total = Fraction(0)
    for D in enumerate_dimers(graph, bc):
        total += weight(D, w)
    return total


def composition_cycle(D, D2):
    """Symmetric difference of two configurations; a cycle rel boundary."""
    return frozenset(D) ^ frozenset(D2)


def delta(graph, D, D2):
    """Relative homology class of the composition cycle."""
    return graph.class_of(sorted(composition_cycle(D, D2)), "relative")


def partial_partition_oracle(graph, w, bc, alpha, D0):
    """Z_alpha: the weight sum over D sharing the boundary condition of
    D0 whose composition cycle with D0 lies in the absolute class alpha.

    Both configurations match the same boundary vertices, so the
    composition cycle is closed and carries an honest absolute class;
    these sums refine the relative-class sums along the fibers of j.
    """
    if alpha.variant != "absolute":
        raise GraphFormatError("expected an absolute homology class")
    if bc is None:
        bc = boundary_of(graph, D0)
    elif boundary_of(graph, D0) != frozenset(bc):
        raise GraphFormatError("reference configuration does not match bc")
    total = Fraction(0)
    for D in enumerate_dimers(graph, bc):
        cls = graph.class_of(sorted(composition_cycle(D, D0)), "absolute")
        if cls == alpha:
            total += weight(D, w)
    return total


def partial_partition_oracle_rel(graph, w, bc, beta, D1):
    """Z_{beta, D1} for a relative class beta: sum over D with
    Delta(D, D1) = beta."""
    if beta.variant != "relative":
        raise GraphFormatError("expected a relative homology class")
    total = Fraction(0)
    for D in enumerate_dimers(graph, bc):
        if delta(graph, D, D1) == beta:
            total += weight(D, w)
    return total


def fiber_over(graph, beta):
    """The absolute classes mapping to a given relative class under j."""
    return [a for a in graph.absolute_classes() if graph.to_relative(a) == beta]


def random_weights(graph, rng, max_part=5):
    """A reproducible random positive rational weight system."""
    return WeightSystem(
        graph,
        {
            e: Fraction(rng.randint(1, max_part), rng.randint(1, max_part))
            for e in graph.interior_edges
        },
    )
