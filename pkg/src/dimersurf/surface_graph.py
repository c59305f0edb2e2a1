"""Combinatorial maps: graphs embedded in compact oriented surfaces with
boundary.

A surface graph is a rotation system.  Every half-edge knows its twin and
its origin vertex; at each vertex the incident half-edges are listed in
counter-clockwise order.  Faces are the orbits of the walk
h -> ccw_predecessor(twin(h)), which traces every face with the face on
the LEFT of the walk direction; this is the one orientation convention
everything else in the package leans on.  (Check it on a triangle drawn
in the plane: arriving at a corner, the boundary of the region on your
left continues along the half-edge one slot clockwise from the one you
arrived on.)

Boundary circles of the surface are stored as "hole faces": faces whose
walk runs entirely along edges marked as boundary arcs.  The surface is
the closed-up surface minus the open hole faces.  Vertices on the
boundary carry exactly one edge of the graph proper (their "stick") plus
the two boundary arcs through them.
"""

from dataclasses import dataclass

from .errors import GraphFormatError, NotACycleError
from .linalg import (
    QSpan,
    Z2Quotient,
    frac_det,
    frac_inv,
    mat_vec,
    smith_normal_form,
    z2_extend_basis,
)


@dataclass(frozen=True)
class OrientedCurve:
    """Closed walk given as a cyclic tuple of directed half-edges.

    Each listed half-edge points along the travel direction (its origin
    vertex is where the step starts).  `simple` is True when no vertex
    is visited twice.
    """

    halves: tuple
    simple: bool

    def __len__(self):
        return len(self.halves)


@dataclass(frozen=True)
class HomologyClass:
    variant: str  # 'absolute' or 'relative'
    vector: tuple

    def __add__(self, other):
        if self.variant != other.variant or len(self.vector) != len(other.vector):
            raise ValueError("homology classes live in different groups")
        return HomologyClass(
            self.variant, tuple((a + b) % 2 for a, b in zip(self.vector, other.vector))
        )

    def is_zero(self):
        return not any(self.vector)


class RelIntBasis:
    """Basis of the free part of first homology relative to the boundary,
    over the integers, together with a coefficient solver.

    gamma: list of integer 1-chains (dict edge -> coefficient), one per
    basis element.  walks: a directed half-edge walk per basis element
    when the chain is a single circuit (None otherwise).
    """

    def __init__(self, graph, gamma, walks, solver):
        self._graph = graph
        self.gamma = gamma
        self.walks = walks
        self._solver = solver

    @property
    def rank(self):
        return len(self.gamma)

    def coefficients(self, chain):
        """Coefficient vector of an integer relative 1-cycle in this basis."""
        return tuple(self._solver(chain))


class SurfaceGraph:
    def __init__(self, vertices, rotations, twins, boundary_vertices=(),
                 boundary_edges=()):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphFormatError("duplicate vertex name")
        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}

        # --- rotations and twins -----------------------------------------
        self.rotation = {}
        self.vertex_of = {}
        self.slot = {}
        for v in self.vertices:
            rot = tuple(rotations.get(v, ()))
            if not rot:
                raise GraphFormatError(
                    "vertex %r has no incident half-edges; isolated vertices "
                    "are not part of any cell decomposition" % (v,))
            self.rotation[v] = rot
            for k, h in enumerate(rot):
                if h in self.vertex_of:
                    raise GraphFormatError(
                        "half-edge %r listed in more than one rotation slot" % (h,))
                self.vertex_of[h] = v
                self.slot[h] = k
        extra = set(rotations) - set(self.vertices)
        if extra:
            raise GraphFormatError(
                "rotation given for unknown vertex %r" % (sorted(extra)[0],))

        self.half_edges = tuple(sorted(self.vertex_of))
        if set(twins) != set(self.half_edges):
            missing = set(self.half_edges) ^ set(twins)
            raise GraphFormatError(
                "twin map and rotations disagree on half-edge %r"
                % (sorted(missing)[0],))
        for h, t in twins.items():
            if t == h or twins.get(t) != h:
                raise GraphFormatError(
                    "twin is not a fixed-point-free involution at %r" % (h,))
        self.twin = dict(twins)

        self.next_half = {}
        self.prev_half = {}
        for v, rot in self.rotation.items():
            for k, h in enumerate(rot):
                self.next_half[h] = rot[(k + 1) % len(rot)]
                self.prev_half[h] = rot[(k - 1) % len(rot)]

        # --- edges --------------------------------------------------------
        self.edge_halves = {}
        for h in self.half_edges:
            e = min(h, self.twin[h])
            self.edge_halves.setdefault(e, (e, self.twin[e]))
        self.edges = tuple(sorted(self.edge_halves))
        self.boundary_edges = frozenset(boundary_edges)
        unknown = self.boundary_edges - set(self.edges)
        if unknown:
            raise GraphFormatError(
                "boundary edge %r does not exist" % (sorted(unknown)[0],))
        self.boundary_vertices = frozenset(boundary_vertices)
        unknown = self.boundary_vertices - set(self.vertices)
        if unknown:
            raise GraphFormatError(
                "boundary vertex %r does not exist" % (sorted(unknown)[0],))
        self.interior_edges = tuple(
            e for e in self.edges if e not in self.boundary_edges)

        for e in self.interior_edges:
            h1, h2 = self.edge_halves[e]
            if self.vertex_of[h1] == self.vertex_of[h2]:
                raise GraphFormatError(
                    "loop edge %r (loops are only allowed as boundary arcs)" % (e,))

        for e in self.boundary_edges:
            for h in self.edge_halves[e]:
                if self.vertex_of[h] not in self.boundary_vertices:
                    raise GraphFormatError(
                        "boundary edge %r touches non-boundary vertex %r"
                        % (e, self.vertex_of[h]))

        for v in sorted(self.boundary_vertices, key=self.vertex_index.get):
            sticks = [h for h in self.rotation[v]
                      if self.edge_of(h) not in self.boundary_edges]
            arcs = [h for h in self.rotation[v]
                    if self.edge_of(h) in self.boundary_edges]
            if len(sticks) != 1 or len(arcs) != 2:
                raise GraphFormatError(
                    "boundary vertex %r must carry exactly one graph edge and "
                    "two boundary arcs (found %d and %d)"
                    % (v, len(sticks), len(arcs)))

        # --- faces ----------------------------------------------------------
        self.faces = []
        self.face_of_half = {}
        seen = set()
        for h0 in self.half_edges:
            if h0 in seen:
                continue
            walk = []
            h = h0
            while True:
                walk.append(h)
                seen.add(h)
                # face on the left of the walk direction
                h = self.prev_half[self.twin[h]]
                if h == h0:
                    break
            idx = len(self.faces)
            self.faces.append(tuple(walk))
            for x in walk:
                self.face_of_half[x] = idx
        self.faces = tuple(self.faces)

        self.hole_faces = tuple(
            i for i, walk in enumerate(self.faces)
            if all(self.edge_of(h) in self.boundary_edges for h in walk))
        self.internal_faces = tuple(
            i for i in range(len(self.faces)) if i not in set(self.hole_faces))

        hole_halves = [h for i in self.hole_faces for h in self.faces[i]]
        hole_edge_count = {}
        for h in hole_halves:
            hole_edge_count[self.edge_of(h)] = hole_edge_count.get(self.edge_of(h), 0) + 1
        for e in self.boundary_edges:
            if hole_edge_count.get(e, 0) != 1:
                raise GraphFormatError(
                    "hole-face structure inconsistent at boundary edge %r: "
                    "each boundary arc must appear on exactly one hole face" % (e,))

        # induced boundary orientation (surface on the left) is the reverse
        # of the hole-face walk; record successor maps for surgery.  The
        # hole occupies the single rotation gap counter-clockwise of each
        # departing hole-walk half-edge.
        self.boundary_next = {}
        self.boundary_prev = {}
        self.cap_gap_slot = {}
        for i in self.hole_faces:
            for h in self.faces[i]:
                tail = self.vertex_of[h]
                head = self.vertex_of[self.twin[h]]
                self.boundary_next[head] = (self.edge_of(h), tail)
                self.boundary_prev[tail] = (self.edge_of(h), head)
                self.cap_gap_slot[tail] = self.slot[h]
        stray = self.boundary_vertices - set(self.boundary_next)
        if stray:
            raise GraphFormatError(
                "boundary vertex %r lies on no hole face" % (sorted(stray)[0],))

        # --- components and topology ----------------------------------------
        comp = {v: v for v in self.vertices}

        def find(x):
            while comp[x] != x:
                comp[x] = comp[comp[x]]
                x = comp[x]
            return x

        for e in self.edges:
            h1, h2 = self.edge_halves[e]
            a, b = find(self.vertex_of[h1]), find(self.vertex_of[h2])
            if a != b:
                comp[max(a, b, key=self.vertex_index.get)] = min(
                    a, b, key=self.vertex_index.get)
        self.component_of = {v: find(v) for v in self.vertices}
        roots = sorted(set(self.component_of.values()), key=self.vertex_index.get)
        self.component_roots = tuple(roots)

        self.component_data = {}
        for root in roots:
            vs = [v for v in self.vertices if self.component_of[v] == root]
            es = [e for e in self.edges
                  if self.component_of[self.vertex_of[self.edge_halves[e][0]]] == root]
            fs = [i for i in self.internal_faces
                  if self.component_of[self.vertex_of[self.faces[i][0]]] == root]
            holes = [i for i in self.hole_faces
                     if self.component_of[self.vertex_of[self.faces[i][0]]] == root]
            chi = len(vs) - len(es) + len(fs)
            mu = len(holes)
            if (2 - chi - mu) % 2 != 0 or 2 - chi - mu < 0:
                raise GraphFormatError(
                    "hole-face structure inconsistent: component %r has "
                    "Euler characteristic %d with %d holes" % (root, chi, mu))
            g = (2 - chi - mu) // 2
            b1 = 2 * g + mu - 1 + (1 if mu == 0 else 0)
            self.component_data[root] = {
                "vertices": tuple(vs), "edges": tuple(es),
                "internal_faces": tuple(fs), "holes": tuple(holes),
                "chi": chi, "genus": g, "b1": b1, "closed": mu == 0,
            }

        self.b0 = len(roots)
        self.b2 = sum(1 for r in roots if self.component_data[r]["closed"])
        self.b1 = sum(self.component_data[r]["b1"] for r in roots)
        self.genus_total = sum(self.component_data[r]["genus"] for r in roots)

        self._edge_bit = {e: i for i, e in enumerate(self.edges)}
        self._interior_mask = 0
        for e in self.interior_edges:
            self._interior_mask |= 1 << self._edge_bit[e]

        self._build_absolute_homology()
        self._build_relative_homology()

    # --- small accessors ----------------------------------------------------

    def edge_of(self, h):
        return min(h, self.twin[h])

    def degree(self, v):
        return len(self.rotation[v])

    def edge_tail(self, e):
        return self.vertex_of[self.edge_halves[e][0]]

    def edge_head(self, e):
        return self.vertex_of[self.edge_halves[e][1]]

    def edge_endpoints(self, e):
        return self.edge_tail(e), self.edge_head(e)

    def is_closed(self):
        return not self.boundary_vertices

    def chain_bits(self, chain):
        bits = 0
        for e in chain:
            if e not in self._edge_bit:
                raise GraphFormatError("unknown edge %r in chain" % (e,))
            bits ^= 1 << self._edge_bit[e]
        return bits

    def bits_edges(self, bits):
        return tuple(e for e in self.edges if bits >> self._edge_bit[e] & 1)

    def int_chain_boundary(self, chain):
        """Boundary 0-chain of a signed edge chain; edges run from the
        origin of their lexicographically smaller half-edge."""
        out = {}
        for e, c in chain.items():
            if c == 0:
                continue
            tail, head = self.edge_endpoints(e)
            out[head] = out.get(head, 0) + c
            out[tail] = out.get(tail, 0) - c
        return {v: c for v, c in out.items() if c}

    def face_boundary_bits(self, face_index):
        bits = 0
        for h in self.faces[face_index]:
            bits ^= 1 << self._edge_bit[self.edge_of(h)]
        return bits

    def face_boundary_int(self, face_index, interior_only=False):
        """Signed edge chain of a face walk (face kept on the left)."""
        out = {}
        for h in self.faces[face_index]:
            e = self.edge_of(h)
            if interior_only and e in self.boundary_edges:
                continue
            out[e] = out.get(e, 0) + (1 if h == self.edge_halves[e][0] else -1)
        return {e: c for e, c in out.items() if c}

    # --- curves ---------------------------------------------------------------

    def make_curve(self, halves):
        halves = tuple(halves)
        if not halves:
            raise GraphFormatError("a curve needs at least one half-edge")
        for h in halves:
            if h not in self.vertex_of:
                raise GraphFormatError("unknown half-edge %r in curve" % (h,))
        for i, h in enumerate(halves):
            prev = halves[i - 1]
            if self.vertex_of[self.twin[prev]] != self.vertex_of[h]:
                raise NotACycleError(
                    "curve is not a closed walk: %r does not start where %r ends"
                    % (h, prev))
        k = halves.index(min(halves))
        halves = halves[k:] + halves[:k]
        origins = [self.vertex_of[h] for h in halves]
        return OrientedCurve(halves, simple=len(set(origins)) == len(origins))

    def reverse_curve(self, curve):
        return self.make_curve(tuple(self.twin[h] for h in reversed(curve.halves)))

    def hole_curve(self, face_index):
        """The walk around a hole face (hole on the left, surface on the
        right); the reverse is the induced boundary orientation."""
        if face_index not in self.hole_faces:
            raise GraphFormatError("face %d is not a hole face" % (face_index,))
        return self.make_curve(self.faces[face_index])

    def curve_edge_bits(self, curve):
        return self.chain_bits([self.edge_of(h) for h in curve.halves])

    def curve_passages(self, curve):
        """One (vertex, arrival half, departure half) triple per step.

        Both listed halves sit at the vertex itself: the arrival half is
        the twin of the previous travel half.
        """
        out = []
        for i, d in enumerate(curve.halves):
            a = self.twin[curve.halves[i - 1]]
            out.append((self.vertex_of[d], a, d))
        return out

    def decompose_to_simple(self, chain):
        """Split a Z2 cycle into edge-disjoint closed curves.

        At each vertex the incident cycle half-edges are paired
        consecutively in rotation order.  The pairing never crosses
        itself, so every produced curve has a well-defined left and
        right side at each passage, even when it revisits a vertex.
        """
        bits = chain if isinstance(chain, int) else self.chain_bits(chain)
        edges = self.bits_edges(bits)
        halves_at = {}
        for e in edges:
            for h in self.edge_halves[e]:
                halves_at.setdefault(self.vertex_of[h], []).append(h)
        for v, hs in halves_at.items():
            if len(hs) % 2:
                raise NotACycleError(
                    "chain has odd degree at vertex %r" % (v,))
        partner = {}
        for v, hs in halves_at.items():
            hs.sort(key=self.slot.get)
            for a, b in zip(hs[0::2], hs[1::2]):
                partner[a] = b
                partner[b] = a
        remaining = set(edges)
        curves = []
        while remaining:
            start = min(h for e in remaining for h in self.edge_halves[e])
            walk = [start]
            remaining.discard(self.edge_of(start))
            cur = start
            while True:
                out = partner[self.twin[cur]]
                if out == start:
                    break
                if self.edge_of(out) not in remaining:
                    raise AssertionError("pairing traversal reused an edge")
                walk.append(out)
                remaining.discard(self.edge_of(out))
                cur = out
            curves.append(self.make_curve(walk))
        return curves

    def intersection(self, c1, c2):
        """Z2 intersection number of two closed curves.

        c2 is pushed off to its left inside the ribbon neighborhood;
        crossings with c1 are counted at shared vertices.  Positions on
        the circle around a vertex of degree d live on 3d ticks: the ray
        of the half-edge at slot k sits at 3k+1, its clockwise and
        counter-clockwise offsets at 3k and 3k+2.
        """
        by_vertex = {}
        for v, a, d in self.curve_passages(c2):
            by_vertex.setdefault(v, []).append((a, d))
        total = 0
        for v, a1, d1 in self.curve_passages(c1):
            if v not in by_vertex:
                continue
            n = 3 * self.degree(v)
            for a2, d2 in by_vertex[v]:
                # the offset strand runs counter-clockwise from just past
                # the departure ray to just before the arrival ray
                s = 3 * self.slot[d2] + 2
                span = (3 * self.slot[a2] - s) % n
                for h in (a1, d1):
                    if (3 * self.slot[h] + 1 - s) % n < span:
                        total += 1
        return total % 2

    # --- absolute Z2 homology ---------------------------------------------

    def _spanning_forest_circuits(self):
        """Fundamental circuits (as edge bitmasks) of a spanning forest
        of the full 1-skeleton, graph edges and boundary arcs alike."""
        parent = {v: None for v in self.vertices}  # vertex -> (edge, parent)
        comp = {v: v for v in self.vertices}

        def find(x):
            while comp[x] != x:
                comp[x] = comp[comp[x]]
                x = comp[x]
            return x

        tree_adj = {v: [] for v in self.vertices}
        non_tree = []
        for e in self.edges:
            u, w = self.edge_endpoints(e)
            if u != w and find(u) != find(w):
                comp[find(u)] = find(w)
                tree_adj[u].append((e, w))
                tree_adj[w].append((e, u))
            else:
                non_tree.append(e)
        path_bits = {}
        for root in self.component_roots:
            stack = [root]
            path_bits[root] = 0
            while stack:
                x = stack.pop()
                for e, y in tree_adj[x]:
                    if y not in path_bits:
                        path_bits[y] = path_bits[x] ^ (1 << self._edge_bit[e])
                        stack.append(y)
        circuits = []
        for e in non_tree:
            u, w = self.edge_endpoints(e)
            circuits.append((1 << self._edge_bit[e]) ^ path_bits[u] ^ path_bits[w])
        return circuits

    def _build_absolute_homology(self):
        face_bits = [self.face_boundary_bits(i) for i in self.internal_faces]
        circuits = self._spanning_forest_circuits()
        picked = z2_extend_basis(face_bits, circuits)
        if len(picked) != self.b1:
            raise AssertionError(
                "first Betti number mismatch: %d independent circuits vs "
                "topological %d" % (len(picked), self.b1))
        self._abs_basis_bits = [circuits[i] for i in picked]
        self._abs_quotient = Z2Quotient(self._abs_basis_bits, face_bits)
        self._h1_curves = []
        for bits in self._abs_basis_bits:
            parts = self.decompose_to_simple(bits)
            if len(parts) != 1:
                raise AssertionError("fundamental circuit split into pieces")
            self._h1_curves.append(parts[0])

    def h1_basis(self):
        """Closed curves whose Z2 classes form a basis of the absolute
        first homology of the surface."""
        return list(self._h1_curves)

    def h1_gram_matrix(self):
        """Intersection pairing on the h1_basis curves."""
        n = len(self._h1_curves)
        return [
            [self.intersection(self._h1_curves[i], self._h1_curves[j]) if i != j else 0
             for j in range(n)]
            for i in range(n)
        ]

    def class_bits(self, alpha):
        """Edge chain of the standard representative of an absolute class."""
        if alpha.variant != "absolute" or len(alpha.vector) != len(self._h1_curves):
            raise ValueError("expected an absolute class of this surface")
        bits = 0
        for c, curve in zip(alpha.vector, self._h1_curves):
            if c:
                bits ^= self.curve_edge_bits(curve)
        return bits

    def to_relative(self, alpha):
        """Image of an absolute class under the map j into relative homology."""
        return self.class_of(self.class_bits(alpha), "relative")

    def absolute_classes(self):
        """All absolute classes, lexicographic in basis coordinates."""
        n = len(self._h1_curves)
        for k in range(1 << n):
            yield HomologyClass(
                "absolute", tuple((k >> (n - 1 - i)) & 1 for i in range(n)))

    def _cycle_parity_check(self, bits, interior_only=False):
        deg = {}
        for e in self.bits_edges(bits):
            for h in self.edge_halves[e]:
                v = self.vertex_of[h]
                deg[v] = deg.get(v, 0) + 1
        for v, d in deg.items():
            if d % 2 and not (interior_only and v in self.boundary_vertices):
                raise NotACycleError("chain has odd degree at vertex %r" % (v,))

    def class_of(self, chain, variant):
        """Homology class of a Z2 edge chain, absolute or relative.

        Relative classes ignore boundary arcs (they are collapsed), so
        passing the full edge set of an absolute representative computes
        its image under the natural map to relative homology.
        """
        bits = chain if isinstance(chain, int) else self.chain_bits(chain)
        if variant == "absolute":
            self._cycle_parity_check(bits)
            coords = self._abs_quotient.coords(bits)
        elif variant == "relative":
            bits &= self._interior_mask
            self._cycle_parity_check(bits, interior_only=True)
            coords = self._rel_quotient.coords(bits)
        else:
            raise ValueError("variant must be 'absolute' or 'relative'")
        if coords is None:
            raise NotACycleError("chain is not a cycle of the requested variant")
        return HomologyClass(variant, coords)

    def class_of_curves(self, curves, variant="absolute"):
        bits = 0
        for c in curves:
            bits ^= self.curve_edge_bits(c)
        return self.class_of(bits, variant)

    # --- integer relative homology -------------------------------------------

    def _build_relative_homology(self):
        """Free integer basis of H1 rel boundary.

        Relative 1-cycles are the cycles of the graph with all boundary
        vertices identified to one point; a spanning forest of that
        contraction yields fundamental circuits whose coefficients can be
        read off the non-forest edges.  The face-boundary image is divided
        out with a Smith normal form, which also certifies that the
        quotient is torsion-free.
        """
        star = "*"

        def contract(v):
            return star if v in self.boundary_vertices else v

        nodes = {contract(v) for v in self.vertices}
        comp = {x: x for x in nodes}

        def find(x):
            while comp[x] != x:
                comp[x] = comp[comp[x]]
                x = comp[x]
            return x

        tree_adj = {x: [] for x in nodes}
        non_tree = []
        for e in self.interior_edges:
            u, w = contract(self.edge_tail(e)), contract(self.edge_head(e))
            ru, rw = find(u), find(w)
            if u != w and ru != rw:
                comp[ru] = rw
                tree_adj[u].append((e, w, +1))   # +1: e runs u -> w
                tree_adj[w].append((e, u, -1))
            else:
                non_tree.append(e)
        path_chain = {}
        ordered = sorted(nodes, key=lambda x: (-1 if x == star else self.vertex_index[x]))
        for root in ordered:
            if root in path_chain:
                continue
            path_chain[root] = {}
            stack = [root]
            while stack:
                x = stack.pop()
                for e, y, sgn in tree_adj[x]:
                    if y not in path_chain:
                        # chain from y back to the root, edges signed by
                        # canonical direction
                        c = dict(path_chain[x])
                        c[e] = c.get(e, 0) - sgn
                        path_chain[y] = {k: v for k, v in c.items() if v}
                        stack.append(y)

        circuits = []
        for e in non_tree:
            u, w = contract(self.edge_tail(e)), contract(self.edge_head(e))
            c = {e: 1}
            for k, v in path_chain[w].items():
                c[k] = c.get(k, 0) + v
            for k, v in path_chain[u].items():
                c[k] = c.get(k, 0) - v
            circuits.append({k: v for k, v in c.items() if v})
        self._rel_circuit_edges = non_tree

        def read_off(chain):
            bnd = self.int_chain_boundary(chain)
            for v in bnd:
                if v not in self.boundary_vertices:
                    raise NotACycleError(
                        "integer chain has nonzero boundary at interior "
                        "vertex %r" % (v,))
            x = [chain.get(e, 0) for e in non_tree]
            residual = dict(chain)
            for xi, ci in zip(x, circuits):
                if xi:
                    for k, v in ci.items():
                        residual[k] = residual.get(k, 0) - xi * v
            if any(residual.values()):
                raise NotACycleError("integer chain is not a relative cycle")
            return x

        k = len(circuits)
        face_cols = []
        for i in self.internal_faces:
            face_cols.append(read_off(self.face_boundary_int(i, interior_only=True)))
        # matrix with circuits as rows of coefficients: k x (#faces)
        M = [[col[row] for col in face_cols] for row in range(k)] if face_cols \
            else [[] for _ in range(k)]
        if k and face_cols:
            D, U, V = smith_normal_form(M)
            r = 0
            while r < min(k, len(face_cols)) and D[r][r] != 0:
                if D[r][r] != 1:
                    raise AssertionError(
                        "torsion in relative homology of an orientable surface")
                r += 1
        else:
            U = [[int(i == j) for j in range(k)] for i in range(k)]
            r = 0
        rank_free = k - r
        if rank_free != self.b1:
            raise AssertionError(
                "relative homology rank %d does not match Betti number %d"
                % (rank_free, self.b1))

        def a_raw(x):
            return [sum(U[i][j] * x[j] for j in range(k)) for i in range(r, k)]

        # try to pick single circuits as the basis (unimodular selection)
        span = QSpan()
        chosen = []
        for i in range(k):
            col = [U[row][i] for row in range(r, k)]
            if span.try_add(col):
                chosen.append(i)
            if len(chosen) == rank_free:
                break
        B = [[U[row][i] for i in chosen] for row in range(r, k)]
        use_circuits = (
            len(chosen) == rank_free and rank_free > 0 and abs(frac_det(B)) == 1
        ) or rank_free == 0
        if use_circuits and rank_free > 0:
            binv = frac_inv(B)
            gamma = [circuits[i] for i in chosen]

            def solve(chain, _binv=binv):
                a = mat_vec(_binv, a_raw(read_off(chain)))
                out = []
                for val in a:
                    if val.denominator != 1:
                        raise AssertionError("non-integer basis coefficient")
                    out.append(int(val))
                return out
        elif rank_free == 0:
            gamma = []

            def solve(chain):
                read_off(chain)
                return []
        else:
            uinv = frac_inv(U)
            gamma = []
            for j in range(r, k):
                chain = {}
                for i in range(k):
                    coef = uinv[i][j]
                    if coef.denominator != 1:
                        raise AssertionError("unimodular inverse not integral")
                    c = int(coef)
                    if c:
                        for e, v in circuits[i].items():
                            chain[e] = chain.get(e, 0) + c * v
                gamma.append({e: v for e, v in chain.items() if v})

            def solve(chain):
                return a_raw(read_off(chain))

        walks = [self._chain_walk(c) for c in gamma]
        self.rel_int_basis = RelIntBasis(self, gamma, walks, solve)

        # the Z2 relative structure reuses the integer basis reduced mod 2
        rel_basis_bits = []
        for c in gamma:
            bits = 0
            for e, v in c.items():
                if v % 2:
                    bits ^= 1 << self._edge_bit[e]
            rel_basis_bits.append(bits)
        rel_face_bits = [
            self.face_boundary_bits(i) & self._interior_mask
            for i in self.internal_faces
        ]
        self._rel_basis_bits = rel_basis_bits
        self._rel_quotient = Z2Quotient(rel_basis_bits, rel_face_bits)
        for i, bits in enumerate(rel_basis_bits):
            coords = self._rel_quotient.coords(bits)
            if coords is None or list(coords) != [int(j == i) for j in range(self.b1)]:
                raise AssertionError("relative Z2 basis is not independent")

    def _chain_walk(self, chain):
        """Directed half-edge walk for a chain with coefficients in {-1,+1}
        forming one closed cycle or one boundary-to-boundary arc; None
        when the chain is not of that shape."""
        if not chain or any(abs(c) != 1 for c in chain.values()):
            return None
        steps = {}
        for e, c in chain.items():
            h = self.edge_halves[e][0] if c == 1 else self.edge_halves[e][1]
            if self.vertex_of[h] in steps:
                return None
            steps[self.vertex_of[h]] = h
        bnd = self.int_chain_boundary(chain)
        if bnd:
            starts = [v for v, c in bnd.items() if c == -1]
            if len(starts) != 1:
                return None
            v = starts[0]
        else:
            v = min(steps)
        walk = []
        while v in steps:
            h = steps.pop(v)
            walk.append(h)
            v = self.vertex_of[self.twin[h]]
        if len(walk) != len(chain):
            return None
        return tuple(walk)

    def rel_h1_int_basis(self):
        return self.rel_int_basis

    # --- reporting -------------------------------------------------------------

    def describe(self):
        comps = []
        for root in self.component_roots:
            d = self.component_data[root]
            comps.append({
                "root": root,
                "vertices": len(d["vertices"]),
                "edges": len(d["edges"]),
                "internal_faces": len(d["internal_faces"]),
                "holes": len(d["holes"]),
                "euler_characteristic": d["chi"],
                "genus": d["genus"],
                "b1": d["b1"],
                "closed": d["closed"],
            })
        return {
            "vertices": len(self.vertices),
            "edges": len(self.edges),
            "graph_edges": len(self.interior_edges),
            "boundary_edges": len(self.boundary_edges),
            "internal_faces": len(self.internal_faces),
            "holes": len(self.hole_faces),
            "b0": self.b0,
            "b1": self.b1,
            "b2": self.b2,
            "genus_total": self.genus_total,
            "components": comps,
        }


def disjoint_union(g1, g2):
    """Disjoint union of two surface graphs; names must not clash."""
    clash = set(g1.vertices) & set(g2.vertices)
    if clash:
        raise GraphFormatError("vertex name %r used in both graphs"
                               % (sorted(clash)[0],))
    clash = set(g1.half_edges) & set(g2.half_edges)
    if clash:
        raise GraphFormatError("half-edge name %r used in both graphs"
                               % (sorted(clash)[0],))
    rotations = {}
    rotations.update(g1.rotation)
    rotations.update(g2.rotation)
    twins = {}
    twins.update(g1.twin)
    twins.update(g2.twin)
    return SurfaceGraph(
        tuple(g1.vertices) + tuple(g2.vertices),
        rotations,
        twins,
        boundary_vertices=set(g1.boundary_vertices) | set(g2.boundary_vertices),
        boundary_edges=set(g1.boundary_edges) | set(g2.boundary_edges),
    )
