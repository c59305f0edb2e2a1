"""Cutting and gluing surface graphs along the boundary.

Cutting an interior edge replaces it by two pendant edges whose free
ends hang into a freshly punched bigon hole; cutting along a closed
curve of edge crossings slices the surface open along its whole length.
Gluing is the inverse move: two boundary segments of equal length are
sewn onto each other, identified boundary vertices disappear into the
interior and the pendant edges meeting there fuse into longer edges.

Segments are words of consecutive boundary arcs.  Cut points sit at arc
midpoints, so an open segment of k arcs covers k-2 whole arcs plus the
far half of its first and the near half of its last arc (k = 1 means
the middle piece of a single arc).  Closed segments are whole boundary
circles.

All operations transport weight systems, dimer configurations, relative
homology classes and Kasteleyn orientations along, and
``verify_cut_identity`` replays the resulting partition function
identities in exact rational arithmetic.
"""

from dataclasses import dataclass
from fractions import Fraction

from .dimer import (
    WeightSystem,
    check_configuration,
    delta,
    enumerate_dimers,
    partition_oracle,
    weight,
)
from .errors import CrossCheckError, GraphFormatError, SurgeryError
from .kasteleyn import (
    KasteleynOrientation,
    arf,
    classes,
    construct,
    epsilon,
    equivalent,
    kasteleyn_matrix,
    partition_Z,
    partition_Z_alpha,
    quadratic_form,
)
from .linalg import z2_solve_full
from .pfaffian import diff_symbolic, evaluate_symbolic, pf_minor, pf_symbolic
from .surface_graph import SurfaceGraph


# --- boundary bookkeeping ----------------------------------------------------

def _hole_half(graph, a):
    # exactly one half of a boundary arc lies on a hole face
    holes = set(graph.hole_faces)
    h1, h2 = graph.edge_halves[a]
    return h1 if graph.face_of_half[h1] in holes else h2


def _arc_ends(graph, a):
    """Endpoints of arc a in induced boundary order (start, end).

    The induced orientation keeps the surface on the left, i.e. it is
    the reverse of the hole-face walk, whose halves sit at the arc end.
    """
    hh = _hole_half(graph, a)
    return graph.vertex_of[graph.twin[hh]], graph.vertex_of[hh]


def _stick_half(graph, v):
    # boundary vertices carry exactly one non-arc half-edge
    for h in graph.rotation[v]:
        if graph.edge_of(h) not in graph.boundary_edges:
            return h
    raise SurgeryError("boundary vertex %r carries no graph edge" % (v,))


def _against_boundary(graph, K, a):
    """1 if K directs arc a against the induced boundary orientation."""
    return 1 if K.head[a] == graph.twin[_hole_half(graph, a)] else 0


def _check_fresh(graph, names, what):
    used = set(graph.vertices) | set(graph.half_edges)
    clash = sorted(set(names) & used)
    if clash:
        raise SurgeryError(
            "cannot build %s: name %r is already taken" % (what, clash[0]))
    if len(set(names)) != len(list(names)):
        raise SurgeryError("cannot build %s: generated names collide" % (what,))


def _coerce_weights(graph, weights):
    if isinstance(weights, WeightSystem):
        return weights
    return WeightSystem(graph, weights)


def _t_value(t, e):
    v = t.get(e, 1) if isinstance(t, dict) else t
    v = Fraction(v)
    if v <= 0:
        raise SurgeryError("cut parameter for edge %r must be positive" % (e,))
    return v


# --- gluing maps -------------------------------------------------------------

class GluingMap:
    """Identification of two boundary segments of equal length.

    m1 and m2 list the arcs of each segment in induced boundary order.
    The identification runs m1 forward and m2 backward: the vertex at
    the end of m1[i] is glued to the vertex at the end of
    m2[(k-2-i) % k], and arc material of m1[i] lands on m2[(k-1-i) % k].
    Open segments (closed=False) start and stop at cut points in the
    interior of their end arcs; leftover arc material joins into seam
    arcs on the new boundary.  An open segment may share its first arc
    with the other segment's last arc, in which case the two cut points
    coincide, the shared arc folds onto itself and the seam closes
    there.  Closed segments are entire boundary circles and must be
    disjoint; the formula above pins the rotational alignment.
    """

    __slots__ = ("m1", "m2", "closed")

    def __init__(self, m1, m2, closed=False):
        self.m1 = tuple(m1)
        self.m2 = tuple(m2)
        self.closed = bool(closed)

    def __repr__(self):
        return "GluingMap(%r, %r, closed=%r)" % (self.m1, self.m2, self.closed)


def _check_segment(graph, seg, closed, label):
    if not seg:
        raise SurgeryError("gluing segment %s is empty" % (label,))
    for a in seg:
        if a not in graph.boundary_edges:
            raise SurgeryError(
                "gluing segment %s lists %r which is not a boundary arc"
                % (label, a))
    if len(set(seg)) != len(seg):
        raise SurgeryError("gluing segment %s repeats an arc" % (label,))
    for i in range(1, len(seg)):
        if _arc_ends(graph, seg[i - 1])[1] != _arc_ends(graph, seg[i])[0]:
            raise SurgeryError(
                "gluing segment %s is not a consecutive boundary run at %r"
                % (label, seg[i]))
    if closed and _arc_ends(graph, seg[-1])[1] != _arc_ends(graph, seg[0])[0]:
        raise SurgeryError(
            "closed gluing segment %s does not close up" % (label,))


def _gluing_pairs(graph, gm):
    k = len(gm.m1)
    idx = range(k) if gm.closed else range(k - 1)
    pairs = []
    for i in idx:
        u = _arc_ends(graph, gm.m1[i])[1]
        v = _arc_ends(graph, gm.m2[(k - 2 - i) % k])[1]
        pairs.append((u, v))
    return pairs


def _chi_shift(gm):
    # Euler characteristic change of the gluing: the identified locus
    # is an interval (chi 1) swallowing two boundary intervals (chi 2),
    # except that each shared end arc folds onto itself and hands one
    # interval back, and a closed locus is a circle swallowing two.
    if gm.closed:
        return 0
    shared = 0
    if len(gm.m1) > 1:
        shared += 1 if gm.m1[0] == gm.m2[-1] else 0
        shared += 1 if gm.m2[0] == gm.m1[-1] else 0
    return shared - 1


def check_gluing(graph, gm):
    """Validate a gluing map against the graph.

    Returns the identified boundary vertex pairs, one per glued
    junction, in segment order.  Raises SurgeryError when the segment
    words are malformed, the segments overlap anywhere except opposite
    end arcs, or a junction would fold a graph edge onto itself.
    """
    if not isinstance(gm, GluingMap):
        raise SurgeryError("expected a GluingMap")
    if len(gm.m1) != len(gm.m2):
        raise SurgeryError(
            "gluing segments have different lengths (%d and %d)"
            % (len(gm.m1), len(gm.m2)))
    _check_segment(graph, gm.m1, gm.closed, "m1")
    _check_segment(graph, gm.m2, gm.closed, "m2")

    shared = set(gm.m1) & set(gm.m2)
    if gm.closed:
        if shared:
            raise SurgeryError(
                "closed gluing segments must be disjoint (share %r)"
                % (sorted(shared)[0],))
    else:
        allowed = set()
        if len(gm.m1) > 1:
            if gm.m1[0] == gm.m2[-1]:
                allowed.add(gm.m1[0])
            if gm.m2[0] == gm.m1[-1]:
                allowed.add(gm.m2[0])
        stray = shared - allowed
        if stray:
            raise SurgeryError(
                "gluing segments overlap at arc %r; open segments may share "
                "only the first arc of one with the last arc of the other"
                % (sorted(stray)[0],))

    pairs = _gluing_pairs(graph, gm)
    seen = set()
    for u, v in pairs:
        if u == v:
            raise SurgeryError(
                "gluing identifies boundary vertex %r with itself" % (u,))
        for x in (u, v):
            if x in seen:
                raise SurgeryError(
                    "gluing identifies boundary vertex %r twice" % (x,))
            seen.add(x)
        eu = graph.edge_of(_stick_half(graph, u))
        ev = graph.edge_of(_stick_half(graph, v))
        if eu == ev:
            raise SurgeryError(
                "gluing folds graph edge %r onto itself at %r" % (eu, u))

    return pairs


# --- chains of fused pendant edges -------------------------------------------

@dataclass(frozen=True)
class Chain:
    """Pendant edges fused into one edge by the glued junctions.

    sticks run from ends[0] to ends[1]; junctions[j] is the identified
    vertex pair (exit of sticks[j], entry of sticks[j+1]).
    """

    sticks: tuple
    name: str
    ends: tuple
    junctions: tuple


def _stick_chains(graph, pairs):
    nbr = {}
    for u, v in pairs:
        eu = graph.edge_of(_stick_half(graph, u))
        ev = graph.edge_of(_stick_half(graph, v))
        nbr[(eu, u)] = (ev, v)
        nbr[(ev, v)] = (eu, u)

    sticks = sorted({e for e, _ in nbr})
    used = set()
    chains = []
    for e0 in sticks:
        if e0 in used:
            continue
        p, q = graph.edge_endpoints(e0)
        if (e0, p) in nbr and (e0, q) in nbr:
            continue  # interior link of a chain, or part of a stick cycle
        far0 = p if (e0, q) in nbr else q
        run = [e0]
        joins = []
        cur_e, cur_exit = e0, (q if far0 == p else p)
        while (cur_e, cur_exit) in nbr:
            ne, nv = nbr[(cur_e, cur_exit)]
            joins.append((cur_exit, nv))
            run.append(ne)
            a, b = graph.edge_endpoints(ne)
            cur_e, cur_exit = ne, (b if nv == a else a)
        used.update(run)
        far1 = cur_exit
        if far0 == far1:
            raise SurgeryError(
                "gluing would close the edges %s into a loop at %r"
                % ("*".join(run), far0))
        if run[-1] < run[0]:
            run.reverse()
            joins = [(y, x) for x, y in reversed(joins)]
            far0, far1 = far1, far0
        if (len(run) == 2 and run[0].endswith("'")
                and not run[0].endswith("''") and run[1] == run[0] + "'"):
            name = run[0][:-1]  # rejoined cut pieces get the old name back
        else:
            name = "*".join(run)
        chains.append(Chain(tuple(run), name, (far0, far1), tuple(joins)))

    if len(used) != len(sticks):
        left = sorted(set(sticks) - used)
        raise SurgeryError(
            "gluing closes the edges %r into a cycle with no free end"
            % (left,))
    return chains


def _seams(gm):
    # leftover end-arc material joins into new boundary arcs; a shared
    # end arc leaves nothing behind
    if gm.closed:
        return []
    out = []
    if gm.m1[0] != gm.m2[-1]:
        out.append((gm.m1[0], gm.m2[-1]))
    if gm.m2[0] != gm.m1[-1]:
        out.append((gm.m2[0], gm.m1[-1]))
    return out


# --- gluing ------------------------------------------------------------------

class GlueResult:
    """Glued graph plus everything transported along."""

    __slots__ = ("graph", "weights", "dimer", "pairs", "chains", "seams",
                 "edge_map")

    def __init__(self, graph, weights, dimer, pairs, chains, seams, edge_map):
        self.graph = graph
        self.weights = weights
        self.dimer = dimer
        self.pairs = pairs
        self.chains = chains
        self.seams = seams
        self.edge_map = edge_map


def glue(graph, gm, weights=None, dimer=None):
    """Glue two boundary segments of equal length onto each other.

    Identified boundary vertices become interior points of the surface
    and vanish from the graph; the pendant edges that met there fuse
    into chain edges whose weight is the product of the fused weights.
    A dimer configuration transports iff it covers each chain all or
    nothing; its matched junction pattern is then consistent
    automatically.  Faces on both sides of the glued locus merge, and
    an Euler characteristic audit rejects gluings under which a face
    would merge with itself into something other than a disk.  Returns
    a GlueResult.
    """
    w = _coerce_weights(graph, weights)
    pairs = check_gluing(graph, gm)
    chains = _stick_chains(graph, pairs)
    seams = _seams(gm)

    removed = {x for pr in pairs for x in pr}
    gone_sticks = {s for c in chains for s in c.sticks}
    glued_arcs = set(gm.m1) | set(gm.m2)

    replace = {}
    new_names = []
    for c in chains:
        new_names.append(c.name)
        h_first = [h for h in graph.edge_halves[c.sticks[0]]
                   if graph.vertex_of[h] == c.ends[0]][0]
        h_last = [h for h in graph.edge_halves[c.sticks[-1]]
                  if graph.vertex_of[h] == c.ends[1]][0]
        replace[h_first] = c.name
        replace[h_last] = c.name + "~"
    seam_records = []
    for x, y in seams:
        name = x + "*" + y
        new_names.append(name)
        replace[graph.twin[_hole_half(graph, x)]] = name
        replace[_hole_half(graph, y)] = name + "~"
        seam_records.append((name, x, y))
    _check_fresh(graph, [n for nm in new_names for n in (nm, nm + "~")],
                 "glued graph")

    dead = glued_arcs | gone_sticks
    rotations = {}
    for v in graph.vertices:
        if v in removed:
            continue
        rot = []
        for h in graph.rotation[v]:
            if h in replace:
                rot.append(replace[h])
            elif graph.edge_of(h) not in dead:
                rot.append(h)
        rotations[v] = rot

    twins = {}
    for e in graph.edges:
        if e not in dead:
            h1, h2 = graph.edge_halves[e]
            twins[h1] = h2
            twins[h2] = h1
    for name in new_names:
        twins[name] = name + "~"
        twins[name + "~"] = name

    g2 = SurfaceGraph(
        [v for v in graph.vertices if v not in removed],
        rotations,
        twins,
        boundary_vertices=graph.boundary_vertices - removed,
        boundary_edges=(graph.boundary_edges - glued_arcs)
        | {name for name, _, _ in seam_records},
    )

    chi = sum(graph.component_data[r]["chi"] for r in graph.component_data)
    chi2 = sum(g2.component_data[r]["chi"] for r in g2.component_data)
    if chi2 != chi + _chi_shift(gm):
        # a face whose two sides of the locus coincide rolls up into an
        # annulus; the retrace caps it and inflates chi, so this fires
        raise SurgeryError(
            "gluing would leave a face that is not a disk (Euler "
            "characteristic %d, expected %d)" % (chi2, chi + _chi_shift(gm)))

    edge_map = {}
    table = {}
    for e in graph.interior_edges:
        if e not in gone_sticks:
            edge_map[e] = e
            table[e] = w[e]
    for c in chains:
        prod = Fraction(1)
        for s in c.sticks:
            edge_map[s] = c.name
            prod *= w[s]
        table[c.name] = prod
    w2 = WeightSystem(g2, table)

    d2 = None
    if dimer is not None:
        D = check_configuration(graph, dimer)
        out = set()
        for c in chains:
            inside = [s for s in c.sticks if s in D]
            if inside and len(inside) != len(c.sticks):
                raise SurgeryError(
                    "dimer covers chain %s only partially" % (c.name,))
            if inside:
                out.add(c.name)
        for e in D:
            if e not in gone_sticks:
                out.add(e)
        d2 = check_configuration(g2, out)

    return GlueResult(g2, w2, d2, tuple(pairs), tuple(chains),
                      tuple(seam_records), edge_map)


# --- cutting edges -----------------------------------------------------------

def _cut_graph(graph, E):
    """Shared naming for edge and curve cuts.

    Every edge e of E splits into pieces e' (at the tail half) and e''
    (at the head half), each keeping one original endpoint and ending
    in a fresh boundary vertex e'v or e''v.
    """
    pieces = {}
    new_vertices = {}
    new_names = []
    for e in E:
        p1, p2 = e + "'", e + "''"
        pieces[e] = (p1, p2)
        new_vertices[e] = (p1 + "v", p2 + "v")
        new_names.extend([p1, p1 + "~", p2, p2 + "~", p1 + "v", p2 + "v"])
    return pieces, new_vertices, new_names


def _cut_common_checks(graph, E):
    for e in E:
        if e not in graph.edge_halves:
            raise SurgeryError("cannot cut unknown edge %r" % (e,))
        if e in graph.boundary_edges:
            raise SurgeryError("cannot cut boundary arc %r" % (e,))


def _cut_tables(graph, w, E, tmap, dimer, pieces):
    table = {}
    for e in graph.interior_edges:
        if e not in pieces:
            table[e] = w[e]
    for e in E:
        p1, p2 = pieces[e]
        table[p1] = tmap[e]
        table[p2] = w[e] / tmap[e]
    d2 = None
    if dimer is not None:
        D = check_configuration(graph, dimer)
        out = set()
        for e in D:
            if e in pieces:
                out.update(pieces[e])
            else:
                out.add(e)
        d2 = out
    return table, d2


class EdgeCut:
    """Result of cutting a set of interior edges into bigon holes."""

    __slots__ = ("graph", "weights", "dimer", "edges", "pieces",
                 "new_vertices", "new_arcs", "reglues")

    def __init__(self, graph, weights, dimer, edges, pieces, new_vertices,
                 new_arcs, reglues):
        self.graph = graph
        self.weights = weights
        self.dimer = dimer
        self.edges = edges
        self.pieces = pieces
        self.new_vertices = new_vertices
        self.new_arcs = new_arcs
        self.reglues = reglues


def cut_edges(graph, edges, weights=None, t=1, dimer=None):
    """Cut interior edges open, one private bigon hole per edge.

    Each edge e of weight w splits into a piece of weight t(e) at its
    tail and a piece of weight w/t(e) at its head, so the product of
    the piece weights reproduces w.  t is a number or a per-edge dict.
    A dimer containing e transports to both pieces; one missing e
    leaves both new boundary vertices unmatched.  The reglues field
    holds one GluingMap per edge; applying them in any order undoes
    the cut exactly.
    """
    E = tuple(sorted(set(edges)))
    if not E:
        raise SurgeryError("no edges to cut")
    _cut_common_checks(graph, E)
    w = _coerce_weights(graph, weights)
    tmap = {e: _t_value(t, e) for e in E}

    pieces, new_vertices, new_names = _cut_graph(graph, E)
    new_arcs = {}
    for e in E:
        p1, p2 = pieces[e]
        a1, a2 = p1 + "a", p2 + "a"
        new_arcs[e] = (a1, a2)
        new_names.extend([a1, a1 + "~", a2, a2 + "~"])
    _check_fresh(graph, new_names, "cut graph")

    replace = {}
    rotations = {}
    twins = {}
    for e in E:
        h1, h2 = graph.edge_halves[e]
        p1, p2 = pieces[e]
        v1, v2 = new_vertices[e]
        a1, a2 = new_arcs[e]
        replace[h1] = p1
        replace[h2] = p2
        # bigon hole: its walk runs (a1, a2), so the induced boundary
        # goes v1 -> v2 along a2 and v2 -> v1 along a1
        rotations[v1] = (p1 + "~", a1, a2)
        rotations[v2] = (p2 + "~", a2 + "~", a1 + "~")
        for n in (p1, p2, a1, a2):
            twins[n] = n + "~"
            twins[n + "~"] = n
    for v in graph.vertices:
        rotations[v] = tuple(replace.get(h, h) for h in graph.rotation[v])
    for e in graph.edges:
        if e not in pieces:
            h1, h2 = graph.edge_halves[e]
            twins[h1] = h2
            twins[h2] = h1

    g2 = SurfaceGraph(
        list(graph.vertices) + [v for e in E for v in new_vertices[e]],
        rotations,
        twins,
        boundary_vertices=set(graph.boundary_vertices)
        | {v for e in E for v in new_vertices[e]},
        boundary_edges=set(graph.boundary_edges)
        | {a for e in E for a in new_arcs[e]},
    )

    table, d2 = _cut_tables(graph, w, E, tmap, dimer, pieces)
    w2 = WeightSystem(g2, table)
    if d2 is not None:
        d2 = check_configuration(g2, d2)

    reglues = tuple(
        GluingMap((new_arcs[e][1], new_arcs[e][0]),
                  (new_arcs[e][0], new_arcs[e][1]))
        for e in E)
    return EdgeCut(g2, w2, d2, E, pieces, new_vertices, new_arcs, reglues)


# --- cutting along a closed curve --------------------------------------------

class CutCurve:
    """Closed combinatorial curve in general position.

    The curve crosses edges[i] while moving from faces[i-1] (cyclically)
    into faces[i]; faces are internal face indices and must be pairwise
    distinct, edges are interior edge names crossed once each.  An
    entry of edges may name a half-edge instead to pick the crossing
    side explicitly; a plain edge name resolves to its canonical half
    when both sides border the target face.
    """

    __slots__ = ("faces", "edges", "closed")

    def __init__(self, faces, edges, closed=True):
        self.faces = tuple(faces)
        self.edges = tuple(edges)
        self.closed = bool(closed)

    def __repr__(self):
        return "CutCurve(%r, %r, closed=%r)" % (
            self.faces, self.edges, self.closed)


def _resolve_curve(graph, curve):
    if not isinstance(curve, CutCurve):
        raise SurgeryError("expected a CutCurve")
    if not curve.closed:
        raise SurgeryError(
            "only closed cut curves are supported; open ones would end on "
            "the boundary")
    n = len(curve.faces)
    if n == 0 or len(curve.edges) != n:
        raise SurgeryError(
            "a cut curve needs equally many faces and crossed edges")
    internal = set(graph.internal_faces)
    for f in curve.faces:
        if f not in internal:
            raise SurgeryError("cut curve face %r is not an internal face" % (f,))
    if len(set(curve.faces)) != n:
        raise SurgeryError("cut curve runs through a face twice")

    dests = []
    seen = set()
    for i, entry in enumerate(curve.edges):
        if entry in graph.edge_halves:
            e = entry
            cands = [h for h in graph.edge_halves[e]
                     if graph.face_of_half[h] == curve.faces[i]]
            if not cands:
                raise SurgeryError(
                    "edge %r does not border cut curve face %r"
                    % (e, curve.faces[i]))
            h = cands[0]
        elif entry in graph.twin:
            h = entry
            e = graph.edge_of(h)
            if graph.face_of_half[h] != curve.faces[i]:
                raise SurgeryError(
                    "half-edge %r does not face cut curve face %r"
                    % (entry, curve.faces[i]))
        else:
            raise SurgeryError("unknown edge %r in cut curve" % (entry,))
        if e in graph.boundary_edges:
            raise SurgeryError("cut curve crosses boundary arc %r" % (e,))
        if e in seen:
            raise SurgeryError("cut curve crosses edge %r twice" % (e,))
        seen.add(e)
        if graph.face_of_half[graph.twin[h]] != curve.faces[i - 1]:
            raise SurgeryError(
                "edge %r is not crossed out of face %r"
                % (e, curve.faces[i - 1]))
        dests.append(h)
    return dests


class CurveCut:
    """Result of slicing the surface open along a closed curve."""

    __slots__ = ("graph", "weights", "dimer", "edges", "pieces",
                 "new_vertices", "new_arcs", "left_arcs", "right_arcs",
                 "reglue", "class_map", "curve")

    def __init__(self, graph, weights, dimer, edges, pieces, new_vertices,
                 new_arcs, left_arcs, right_arcs, reglue, class_map, curve):
        self.graph = graph
        self.weights = weights
        self.dimer = dimer
        self.edges = edges
        self.pieces = pieces
        self.new_vertices = new_vertices
        self.new_arcs = new_arcs
        self.left_arcs = left_arcs
        self.right_arcs = right_arcs
        self.reglue = reglue
        self.class_map = class_map
        self.curve = curve


def cut_along_curve(graph, curve, weights=None, t=1, dimer=None):
    """Slice the surface open along a closed curve of edge crossings.

    Every crossed edge splits as in cut_edges; the new end vertices
    chain up along two long boundary arcs, one on each side of the
    curve (left is the side of the face-facing halves).  The reglue
    field is the single GluingMap that sews the slit shut again, and
    class_map transports relative homology classes of the uncut graph
    to the cut one by re-expressing them in interior basis cycles and
    replacing each crossed edge by both of its pieces.
    """
    dests = _resolve_curve(graph, curve)
    n = len(dests)
    E = tuple(graph.edge_of(h) for h in dests)
    _cut_common_checks(graph, E)
    w = _coerce_weights(graph, weights)
    tmap = {e: _t_value(t, e) for e in E}

    pieces, new_vertices, new_names = _cut_graph(graph, E)
    new_arcs = {}
    left_arcs, right_arcs = [], []
    for e in E:
        L, R = e + "%L", e + "%R"
        new_arcs[e] = (L, R)
        left_arcs.append(L)
        right_arcs.append(R)
        new_names.extend([L, L + "~", R, R + "~"])
    _check_fresh(graph, new_names, "cut graph")

    replace = {}
    rotations = {}
    twins = {}
    for i, e in enumerate(E):
        h1, h2 = graph.edge_halves[e]
        p1, p2 = pieces[e]
        replace[h1] = p1
        replace[h2] = p2
        pl = p1 if dests[i] == h1 else p2  # piece based at the left vertex
        pr = p2 if pl == p1 else p1
        vl = pl + "v"
        vr = pr + "v"
        fwd_l = E[i] + "%L"
        bwd_l = E[i - 1] + "%L"
        fwd_r = E[i] + "%R"
        bwd_r = E[i - 1] + "%R"
        # the left hole walk runs against the curve, the right one with
        # it, so both slit circles keep the surface on the left
        rotations[vl] = (pl + "~", bwd_l + "~", fwd_l)
        rotations[vr] = (pr + "~", fwd_r, bwd_r + "~")
        for nm in (p1, p2, new_arcs[e][0], new_arcs[e][1]):
            twins[nm] = nm + "~"
            twins[nm + "~"] = nm
    for v in graph.vertices:
        rotations[v] = tuple(replace.get(h, h) for h in graph.rotation[v])
    for e in graph.edges:
        if e not in pieces:
            h1, h2 = graph.edge_halves[e]
            twins[h1] = h2
            twins[h2] = h1

    new_vs = []
    for i, e in enumerate(E):
        pl = pieces[e][0] if dests[i] == graph.edge_halves[e][0] else pieces[e][1]
        pr = pieces[e][1] if pl == pieces[e][0] else pieces[e][0]
        new_vs.extend([pl + "v", pr + "v"])
    g2 = SurfaceGraph(
        list(graph.vertices) + new_vs,
        rotations,
        twins,
        boundary_vertices=set(graph.boundary_vertices) | set(new_vs),
        boundary_edges=set(graph.boundary_edges)
        | set(left_arcs) | set(right_arcs),
    )

    table, d2 = _cut_tables(graph, w, E, tmap, dimer, pieces)
    w2 = WeightSystem(g2, table)
    if d2 is not None:
        d2 = check_configuration(g2, d2)

    reglue = GluingMap(tuple(left_arcs), tuple(reversed(right_arcs)),
                       closed=True)

    # transport of relative homology: express a class in the interior
    # basis cycles, push the representing chain through the cut
    basis_chains = []
    rows = None
    rel_dim = None
    for ch in graph.rel_int_basis.gamma:
        basis_chains.append(sorted(e for e, c in ch.items() if c % 2))
    basis_classes = [graph.class_of(ch, "relative") for ch in basis_chains]
    rel_dim = len(graph.class_of((), "relative").vector)
    rows = []
    for j in range(rel_dim):
        mask = 0
        for i, cls in enumerate(basis_classes):
            if cls.vector[j]:
                mask |= 1 << i
        rows.append(mask)

    def class_map(beta):
        if getattr(beta, "variant", None) != "relative" \
                or len(beta.vector) != rel_dim:
            raise GraphFormatError(
                "expected a relative homology class of the uncut graph")
        sol, _ = z2_solve_full(rows, list(beta.vector), len(basis_chains))
        if sol is None:
            raise CrossCheckError(
                "interior basis does not span relative homology")
        chain = set()
        for i, ch in enumerate(basis_chains):
            if sol >> i & 1:
                chain ^= set(ch)
        out = []
        for e in sorted(chain):
            if e in graph.boundary_edges:
                continue
            if e in pieces:
                out.extend(pieces[e])
            else:
                out.append(e)
        return g2.class_of(out, "relative")

    return CurveCut(g2, w2, d2, E, pieces, new_vertices, new_arcs,
                    tuple(left_arcs), tuple(right_arcs), reglue, class_map,
                    curve)


# --- Kasteleyn transport -----------------------------------------------------

def cut_kasteleyn(graph, cut, K):
    """Induce a Kasteleyn orientation on a cut graph.

    cut is a CutCurve (cut internally with default parameters) or an
    EdgeCut/CurveCut result of the same graph.  Pieces inherit their
    directions from the cut edges; the new boundary arcs are directed
    by solving the odd-face condition over Z2.  When the system has a
    kernel (edge cuts whose bigon sits inside one face) the particular
    solution of the elimination is taken, a deterministic choice.
    """
    if isinstance(cut, CutCurve):
        cut = cut_along_curve(graph, cut)
    if not isinstance(cut, (EdgeCut, CurveCut)):
        raise SurgeryError("expected a CutCurve, EdgeCut or CurveCut")
    g2 = cut.graph

    head = {}
    owners = {}
    for e, (p1, p2) in cut.pieces.items():
        owners[p1] = (e, 0)
        owners[p2] = (e, 1)
    arc_set = {a for ars in cut.new_arcs.values() for a in ars}
    for e2 in g2.edges:
        if e2 in arc_set:
            continue
        if e2 in owners:
            e, side = owners[e2]
            at_head = K.head[e] == graph.edge_halves[e][1]
            if side == 0:
                head[e2] = e2 + "~" if at_head else e2
            else:
                head[e2] = e2 if at_head else e2 + "~"
        else:
            head[e2] = K.head[e2]

    unknowns = sorted(arc_set)
    uidx = {a: i for i, a in enumerate(unknowns)}
    rows, rhs = [], []
    for f in g2.internal_faces:
        mask = 0
        base = 0
        for h in g2.faces[f]:
            e2 = g2.edge_of(h)
            if e2 in uidx:
                # direction unknown x: x=1 points the arc at its first half
                mask |= 1 << uidx[e2]
                base ^= 1 if h == g2.edge_halves[e2][1] else 0
            else:
                base ^= 1 if head[e2] == h else 0
        if mask:
            rows.append(mask)
            rhs.append(1 ^ base)
        elif base % 2 != 1:
            raise CrossCheckError(
                "cut face %d lost the odd crossing count" % (f,))
    sol, _ = z2_solve_full(rows, rhs, len(unknowns))
    if sol is None:
        raise CrossCheckError("no orientation of the cut arcs is admissible")
    for a in unknowns:
        h1, h2 = g2.edge_halves[a]
        head[a] = h1 if sol >> uidx[a] & 1 else h2
    return KasteleynOrientation(g2, head)


def gluing_case(graph, gm, K=None):
    """Classify a gluing by the pullback on mod-2 first cohomology.

    Returns (case, parity).  case = 1 + k + 2*c where k is 1 when the
    pullback along the quotient map has a kernel (the glued segments
    are disjoint and sit on one connected component) and c is 1 when it
    has a cokernel (the glued locus closes into a circle whose
    component stays open after gluing).  parity is the obstruction bit
    for inducing K on the glued graph, reported for cases 3 and 4 when
    K is given (0 means unobstructed), else None.
    """
    check_gluing(graph, gm)
    arcs1, arcs2 = set(gm.m1), set(gm.m2)
    disjoint = not (arcs1 & arcs2)
    c1 = graph.component_of[_arc_ends(graph, gm.m1[0])[0]]
    c2 = graph.component_of[_arc_ends(graph, gm.m2[0])[0]]
    ker = 1 if (disjoint and c1 == c2) else 0

    k = len(gm.m1)
    cycle = gm.closed or (
        k > 1 and gm.m1[0] == gm.m2[-1] and gm.m2[0] == gm.m1[-1])
    coker = 0
    if cycle:
        glued = glue(graph, gm)
        witness = glued.chains[0].ends[0]
        root = glued.graph.component_of[witness]
        if not glued.graph.component_data[root]["closed"]:
            coker = 1

    case = 1 + ker + 2 * coker
    parity = None
    if K is not None and case >= 3:
        if disjoint:
            n1 = sum(_against_boundary(graph, K, a) for a in gm.m1)
            n2 = sum(_against_boundary(graph, K, a) for a in gm.m2)
            parity = (n1 + n2) % 2
        else:
            nu = sum(_against_boundary(graph, K, a) for a in arcs1 | arcs2)
            parity = (1 + nu) % 2
    return case, parity


def glue_kasteleyn(graph, gm, K):
    """All orientation classes on the glued graph induced by K.

    A representative K' ~ K descends iff its directions fuse coherently
    along every chain and the descended orientation keeps every internal
    face odd; the leftover seam arcs pick up fresh directions of their
    own.  Both conditions are affine in the vertex flips relating K' to
    K together with one direction bit per seam, so the search is a Z2
    elimination; an unsolvable system is the gluing obstruction.  A
    kernel direction that moves the result by more than a vertex flip
    of the glued graph generates the second class.  Returns a list of
    at most two inequivalent orientations (empty when obstructed).
    """
    glued = glue(graph, gm)
    g2 = glued.graph
    vidx = {v: i for i, v in enumerate(graph.vertices)}
    nv = len(graph.vertices)

    def endpoint_mask(e):
        u, v = graph.edge_endpoints(e)
        return (1 << vidx[u]) ^ (1 << vidx[v])

    # affine direction form of every glued edge: D = base ^ <mask, x>
    # where D says "the first half of the edge is the head"; the low
    # nv bits of x flip vertices of the original graph, then one fresh
    # bit per seam
    forms = {}
    for e2 in g2.edges:
        if e2 in graph.edge_halves:
            base = 1 if K.head[e2] == graph.edge_halves[e2][0] else 0
            forms[e2] = (base, endpoint_mask(e2))
    for c in glued.chains:
        s0 = c.sticks[0]
        base = 1 if graph.vertex_of[K.head[s0]] == c.ends[0] else 0
        forms[c.name] = (base, endpoint_mask(s0))
    for i, (name, _, _) in enumerate(glued.seams):
        forms[name] = (0, 1 << (nv + i))
    ncols = nv + len(glued.seams)

    rows, rhs = [], []
    for c in glued.chains:
        for j, (a, b) in enumerate(c.junctions):
            s, s2 = c.sticks[j], c.sticks[j + 1]
            in1 = 1 if graph.vertex_of[K.head[s]] == a else 0
            in2 = 1 if graph.vertex_of[K.head[s2]] == b else 0
            rows.append(endpoint_mask(s) ^ endpoint_mask(s2))
            rhs.append(1 ^ in1 ^ in2)
    for f in g2.internal_faces:
        mask = 0
        base = 0
        for h in g2.faces[f]:
            e2 = g2.edge_of(h)
            b, m = forms[e2]
            base ^= b ^ (0 if h == g2.edge_halves[e2][0] else 1)
            mask ^= m
        rows.append(mask)
        rhs.append(1 ^ base)

    sol, kernel = z2_solve_full(rows, rhs, ncols)
    if sol is None:
        return []

    # a kernel vector lands on an equivalent orientation exactly when
    # the edge set it flips is a vertex-flip pattern of the glued
    # graph; quotient the kernel by those and at most one independent
    # generator can survive
    edges2 = sorted(g2.edges)
    g2vi = {v: i for i, v in enumerate(g2.vertices)}
    star = []
    for e2 in edges2:
        u, v = g2.edge_endpoints(e2)
        star.append((1 << g2vi[u]) ^ (1 << g2vi[v]))
    gens = []
    for kv in kernel:
        flips = [bin(forms[e2][1] & kv).count("1") & 1 for e2 in edges2]
        srows = []
        for i in range(len(edges2)):
            row = star[i]
            for j, (_, gflips) in enumerate(gens):
                row |= gflips[i] << (len(g2vi) + j)
            srows.append(row)
        got, _ = z2_solve_full(srows, flips, len(g2vi) + len(gens))
        if got is None:
            gens.append((kv, flips))
    if len(gens) > 1:
        raise CrossCheckError(
            "gluing induced more than two orientation classes")

    def build(x):
        head = {}
        for e2 in g2.edges:
            base, mask = forms[e2]
            d = base ^ (bin(mask & x).count("1") & 1)
            h1, h2 = g2.edge_halves[e2]
            head[e2] = h1 if d else h2
        return KasteleynOrientation(g2, head)

    out = [build(sol)]
    if gens:
        out.append(build(sol ^ gens[0][0]))
        if equivalent(g2, out[0], out[1]):
            raise CrossCheckError(
                "kernel direction failed to separate the two classes")
    return out


# --- the cut identity --------------------------------------------------------

def _Z_formula(graph, w, bc):
    # Pfaffian route; an empty sector has no reference configuration
    # and a vanishing partition function
    for D0 in enumerate_dimers(graph, bc):
        return partition_Z(graph, w, bc, D0)
    return Fraction(0)


def _sector_bc(bc, E, mask, new_vertices):
    out = set(bc)
    for i, e in enumerate(E):
        if mask >> i & 1:
            out.update(new_vertices[e])
    return frozenset(out)


def verify_cut_identity(graph, weights, bc, cut, t=1):
    """Replay the cut identities on one instance, exactly.

    cut is an iterable of interior edges or a CutCurve.  The partition
    function of (graph, weights, bc) is compared against the sum over
    all sectors of the cut graph, where the sector of a subset I of cut
    edges matches both new endpoints of the edges in I and no others.
    Every quantity is computed twice (configuration enumeration and the
    Pfaffian formula).  For curves the identity is refined over
    relative homology classes of the cut graph.  The Taylor term (all
    cut edges present) is checked a third way, as a signed mixed
    Pfaffian derivative, plus a symbolic differentiation cross-check.
    Returns a report dict; report["match"] is the overall verdict.
    """
    w = _coerce_weights(graph, weights)
    bc = frozenset(bc)
    if isinstance(cut, CutCurve):
        res = cut_along_curve(graph, cut, w, t)
        mode = "curve"
    else:
        res = cut_edges(graph, cut, w, t)
        mode = "edges"
    E = res.edges
    g2, w2 = res.graph, res.weights

    report = {"mode": mode, "edges": E,
              "t": {e: _t_value(t, e) for e in E}}
    lhs_o = partition_oracle(graph, w, bc)
    lhs_f = _Z_formula(graph, w, bc)
    report["lhs"] = {"oracle": lhs_o, "formula": lhs_f}

    sectors = []
    rhs_o = Fraction(0)
    rhs_f = Fraction(0)
    for mask in range(1 << len(E)):
        bci = _sector_bc(bc, E, mask, res.new_vertices)
        zo = partition_oracle(g2, w2, bci)
        zf = _Z_formula(g2, w2, bci)
        sectors.append({
            "present": tuple(e for i, e in enumerate(E) if mask >> i & 1),
            "bc": bci, "oracle": zo, "formula": zf})
        rhs_o += zo
        rhs_f += zf
    report["sectors"] = sectors
    report["rhs"] = {"oracle": rhs_o, "formula": rhs_f}
    sectors_ok = all(s["oracle"] == s["formula"] for s in sectors)
    totals_ok = lhs_o == lhs_f == rhs_o == rhs_f

    taylor = _taylor_check(graph, w, bc, res, sectors[-1])
    report["taylor"] = taylor

    refined = None
    refined_ok = True
    if mode == "curve":
        refined = _refined_check(graph, w, bc, res)
        refined_ok = refined["match"]
    report["refined"] = refined

    report["match"] = (totals_ok and sectors_ok and taylor["match"]
                       and refined_ok)
    return report


def _taylor_check(graph, w, bc, res, full_sector):
    """Sum over configurations containing every cut edge, three ways."""
    E = res.edges
    Eset = set(E)
    top = Fraction(0)
    for D in enumerate_dimers(graph, bc):
        if Eset <= set(D):
            top += weight(D, w)
    out = {"lhs": top,
           "sector_oracle": full_sector["oracle"],
           "sector_formula": full_sector["formula"]}
    ok = top == full_sector["oracle"] == full_sector["formula"]

    matched = [v for v in graph.vertices
               if v not in graph.boundary_vertices or v in bc]
    vidx = {v: i for i, v in enumerate(matched)}
    inside = all(v in vidx for e in E for v in graph.edge_endpoints(e))
    refs = enumerate_dimers(graph, bc)
    if not inside or not refs:
        # the matrix does not contain these rows, or the sector is
        # empty; the derivative formula has nothing to evaluate
        out["derivative"] = None
        out["note"] = ("cut edge endpoint unmatched" if not inside
                       else "empty boundary sector")
        out["match"] = ok and (top == 0 if not inside else True)
        return out
    D0 = refs[0]

    pairs = [tuple(sorted((vidx[u], vidx[v])))
             for u, v in (graph.edge_endpoints(e) for e in E)]
    flat = [i for pr in pairs for i in pr]
    overlap = len(set(flat)) != len(flat)
    prodw = Fraction(1)
    for e in E:
        prodw *= w[e]

    reps = classes(graph, construct(graph))
    if overlap:
        # repeated matrix index: the mixed derivative vanishes
        # identically, and so must the sum it represents
        deriv = Fraction(0)
    else:
        total = Fraction(0)
        for K in reps:
            a = arf(quadratic_form(graph, K, D0))
            eps = epsilon(graph, K, D0, bc)
            km = kasteleyn_matrix(graph, K, w, bc)
            s = 1
            for e, (i, j) in zip(E, pairs):
                # +w sits at (i, j) when K points the edge at the
                # higher-indexed vertex
                if vidx[graph.vertex_of[K.head[e]]] == i:
                    s = -s
            sign, val = pf_minor(km.matrix, flat)
            total += a * eps * s * sign * val
        deriv = prodw * total / 2 ** graph.genus_total
    out["derivative"] = deriv

    n = len(matched)
    if n <= 10:
        K0 = reps[0]
        km0 = kasteleyn_matrix(graph, K0, w, bc)
        poly = pf_symbolic(range(n))
        for pr in pairs:
            poly = diff_symbolic(poly, pr)
        sym = evaluate_symbolic(poly, km0.matrix)
        if overlap:
            expected = Fraction(0)
        else:
            sign, val = pf_minor(km0.matrix, flat)
            expected = sign * val
        out["symbolic_match"] = sym == expected
        ok = ok and out["symbolic_match"]

    out["match"] = ok and top == deriv
    return out


def _refined_check(graph, w, bc, res):
    """Class-by-class comparison for a curve cut.

    Both sides are binned by relative homology of the cut graph: the
    left side groups sectors of the uncut graph by the image of their
    class under the transport map, the right side sums over the cut
    sectors, re-based to a common reference through the composition
    delta.
    """
    g2, w2, E = res.graph, res.weights, res.edges
    refs = enumerate_dimers(graph, bc)
    if not refs:
        return {"bins": {}, "match": True, "note": "empty boundary sector"}
    D0 = refs[0]
    D0C = set()
    for e in D0:
        if e in res.pieces:
            D0C.update(res.pieces[e])
        else:
            D0C.add(e)
    D0C = check_configuration(g2, D0C)

    lhs_groups = {}
    for D in enumerate_dimers(graph, bc):
        beta = delta(graph, D, D0)
        key = res.class_map(beta).vector
        lhs_groups[key] = lhs_groups.get(key, Fraction(0)) + weight(D, w)

    rhs_oracle = {}
    rhs_formula = {}
    for mask in range(1 << len(E)):
        bci = _sector_bc(bc, E, mask, res.new_vertices)
        sector = enumerate_dimers(g2, bci)
        if not sector:
            continue
        for D in sector:
            key = delta(g2, D, D0C).vector
            rhs_oracle[key] = rhs_oracle.get(key, Fraction(0)) + weight(D, w2)
        D1 = sector[0]
        shift = delta(g2, D1, D0C)
        for alpha in g2.absolute_classes():
            key = (g2.to_relative(alpha) + shift).vector
            z = partition_Z_alpha(g2, w2, bci, alpha, D1)
            rhs_formula[key] = rhs_formula.get(key, Fraction(0)) + z

    bins = {}
    ok = True
    for key in sorted(set(lhs_groups) | set(rhs_oracle) | set(rhs_formula)):
        row = (lhs_groups.get(key, Fraction(0)),
               rhs_oracle.get(key, Fraction(0)),
               rhs_formula.get(key, Fraction(0)))
        bins[key] = row
        ok = ok and row[0] == row[1] == row[2]
    return {"bins": bins, "match": ok}


# --- structural equality -----------------------------------------------------

def same_graph(g1, g2):
    """Exact structural equality: vertices, rotations, twins, boundary.

    Cut-then-glue round trips restore half-edge names of the form
    "name"/"name~"; graphs naming twins differently compare unequal
    even when isomorphic.
    """
    return (g1.vertices == g2.vertices
            and g1.rotation == g2.rotation
            and g1.twin == g2.twin
            and g1.boundary_vertices == g2.boundary_vertices
            and g1.boundary_edges == g2.boundary_edges)
