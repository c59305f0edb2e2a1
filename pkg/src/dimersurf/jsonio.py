"""Reading and writing the JSON graph file format.

A graph file is one JSON object:

    {"vertices": [names...],
     "half_edges": [{"id": ..., "vertex": ..., "twin": ...}, ...],
     "rotations": {vertex: [half-edge ids, counter-clockwise], ...},
     "boundary_vertices": [names...],
     "boundary_edges": [edge names...],
     "weights": {edge: "p/q", ...}}

The last three keys are optional.  Rationals are written as "p/q"
strings ("p" alone for integers).  An edge is named by the
lexicographically smaller of its two half-edge ids.  Validation stops
at the first violated invariant and reports it by name.
"""

import json
from fractions import Fraction

from .errors import GraphFormatError
from .surface_graph import SurfaceGraph


def parse_fraction(value):
    """Parse a "p/q" string (or a bare integer) into a Fraction."""
    if isinstance(value, bool):
        raise GraphFormatError("rational value %r is not a 'p/q' string" % (value,))
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            pass
    raise GraphFormatError("rational value %r is not a 'p/q' string" % (value,))


def format_fraction(value):
    value = Fraction(value)
    return str(value)


def _require(condition, message):
    if not condition:
        raise GraphFormatError(message)


def graph_from_dict(data):
    """Build (SurfaceGraph, weights) from a decoded graph object.

    Weights come back as a dict edge -> Fraction (empty if the file has
    none).  Structural invariants of the rotation system itself are
    checked by the SurfaceGraph constructor; this function checks the
    file schema.
    """
    _require(isinstance(data, dict), "top level must be a JSON object")

    for key in ("vertices", "half_edges", "rotations"):
        _require(key in data, "missing required key %r" % key)

    vertices = data["vertices"]
    _require(isinstance(vertices, list), "'vertices' must be a list")
    seen = set()
    for v in vertices:
        _require(isinstance(v, str), "vertex name %r is not a string" % (v,))
        _require(v not in seen, "duplicate vertex %r" % v)
        seen.add(v)
    vertex_set = seen

    half_edges = data["half_edges"]
    _require(isinstance(half_edges, list), "'half_edges' must be a list")
    vertex_of = {}
    twin = {}
    for entry in half_edges:
        _require(
            isinstance(entry, dict) and {"id", "vertex", "twin"} <= set(entry),
            "half-edge entry %r lacks id/vertex/twin" % (entry,),
        )
        h = entry["id"]
        _require(isinstance(h, str), "half-edge id %r is not a string" % (h,))
        _require(h not in vertex_of, "duplicate half-edge id %r" % h)
        _require(
            entry["vertex"] in vertex_set,
            "half-edge %r sits at undeclared vertex %r" % (h, entry["vertex"]),
        )
        vertex_of[h] = entry["vertex"]
        twin[h] = entry["twin"]
    for h, t in twin.items():
        _require(t in twin, "half-edge %r has undeclared twin %r" % (h, t))
        _require(t != h, "half-edge %r is its own twin" % h)
        _require(twin[t] == h, "twin map is not an involution at %r" % h)

    rotations_in = data["rotations"]
    _require(isinstance(rotations_in, dict), "'rotations' must be an object")
    placed = {}
    rotations = {v: [] for v in vertices}
    for v, order in rotations_in.items():
        _require(v in vertex_set, "rotation given for undeclared vertex %r" % v)
        _require(isinstance(order, list), "rotation of %r must be a list" % v)
        for h in order:
            _require(h in twin, "rotation of %r names unknown half-edge %r" % (v, h))
            _require(h not in placed, "half-edge %r appears in two rotations" % h)
            placed[h] = v
            # cross-check the declared attachment against the rotation
            _require(
                vertex_of[h] == v,
                "half-edge %r declares vertex %r but sits in rotation of %r"
                % (h, vertex_of[h], v),
            )
        rotations[v] = list(order)
    for h in twin:
        _require(h in placed, "half-edge %r missing from rotations" % h)

    edge_ids = {min(h, t) for h, t in twin.items()}

    boundary_vertices = data.get("boundary_vertices", [])
    _require(isinstance(boundary_vertices, list), "'boundary_vertices' must be a list")
    for v in boundary_vertices:
        _require(v in vertex_set, "boundary vertex %r is not a vertex" % (v,))

    boundary_edges = data.get("boundary_edges", [])
    _require(isinstance(boundary_edges, list), "'boundary_edges' must be a list")
    for e in boundary_edges:
        _require(e in edge_ids, "boundary edge %r is not an edge" % (e,))

    weights_in = data.get("weights", {})
    _require(isinstance(weights_in, dict), "'weights' must be an object")
    weights = {}
    for e, w in weights_in.items():
        _require(e in edge_ids, "weight given for unknown edge %r" % (e,))
        weights[e] = parse_fraction(w)

    graph = SurfaceGraph(
        vertices=list(vertices),
        rotations=rotations,
        twins=twin,
        boundary_vertices=boundary_vertices,
        boundary_edges=boundary_edges,
    )
    return graph, weights


def graph_to_dict(graph, weights=None):
    """Serialize a SurfaceGraph (and optional weights) to a plain dict."""
    half_entries = [
        {"id": h, "vertex": graph.vertex_of[h], "twin": graph.twin[h]}
        for h in sorted(graph.twin)
    ]
    out = {
        "vertices": list(graph.vertices),
        "half_edges": half_entries,
        "rotations": {v: list(graph.rotation[v]) for v in graph.vertices},
        "boundary_vertices": sorted(graph.boundary_vertices),
        "boundary_edges": sorted(graph.boundary_edges),
    }
    if weights is not None:
        out["weights"] = {e: format_fraction(weights[e]) for e in sorted(weights)}
    return out


def loads_graph(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError("not valid JSON: %s" % exc) from exc
    return graph_from_dict(data)


def load_graph(path):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return loads_graph(text)


def dumps_graph(graph, weights=None):
    return json.dumps(graph_to_dict(graph, weights), indent=2) + "\n"


def save_graph(graph, path, weights=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_graph(graph, weights))
