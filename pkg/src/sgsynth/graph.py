"""String graphs: port-labeled directed graphs of wire- and node-vertices.

Wire-vertices carry an object type and have in/out degree at most one;
chains of them are the wires of a diagram.  Node-vertices carry a
morphism type and connect to one wire-vertex per port.  Graphs are
immutable: every operation returns a new graph.

Circles (closed wires) are represented minimally as a single
wire-vertex with a self-loop; self-loops are never allowed elsewhere.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

from .errors import (
    DuplicateVertex,
    GraphInvariantError,
    InvalidEdge,
    NotAnInput,
    NotAnOutput,
    TypeMismatch,
    ValidationError,
)
from .signature import Signature

WIRE = "wire"
NODE = "node"

# When enabled (tests), every internally constructed graph is re-validated.
_DEBUG_VALIDATE = False


def set_debug_validation(on: bool) -> None:
    global _DEBUG_VALIDATE
    _DEBUG_VALIDATE = bool(on)


@dataclass(frozen=True)
class Vertex:
    id: int
    kind: str  # WIRE or NODE
    type: str  # object name for wires, morphism name for nodes


@dataclass(frozen=True)
class Edge:
    """Directed edge src -> tgt.

    src_port is the out-port index when src is a node-vertex, else None;
    tgt_port is the in-port index when tgt is a node-vertex, else None.
    """
    src: int
    src_port: Optional[int]
    tgt: int
    tgt_port: Optional[int]


@dataclass(frozen=True)
class WireInfo:
    """A maximal chain of wire-vertices (derived, not stored).

    vertices are listed in edge direction.  start_anchor is the
    (node id, out-port) feeding the chain, end_anchor the
    (node id, in-port) it feeds, either may be None.  Circles have no
    anchors and circle=True.
    """
    vertices: tuple[int, ...]
    start_anchor: Optional[tuple[int, int]]
    end_anchor: Optional[tuple[int, int]]
    circle: bool
    type: str

    @property
    def rep(self) -> int:
        return self.vertices[0] if not self.circle else min(self.vertices)


@dataclass(frozen=True, eq=False)
class StringGraph:
    sig: Signature = field(repr=False)
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    @staticmethod
    def build(sig: Signature,
              vertices: Iterable[Vertex],
              edges: Iterable[Edge],
              inputs: Iterable[int],
              outputs: Iterable[int],
              validate: bool = True) -> "StringGraph":
        g = StringGraph(
            sig=sig,
            vertices=tuple(sorted(vertices, key=lambda v: v.id)),
            edges=tuple(sorted(edges, key=_edge_key)),
            inputs=tuple(inputs),
            outputs=tuple(outputs),
        )
        if validate or _DEBUG_VALIDATE:
            check_graph(g)
        return g

    @staticmethod
    def empty(sig: Signature) -> "StringGraph":
        return StringGraph.build(sig, [], [], [], [])

    # -- cached lookups ------------------------------------------------

    @cached_property
    def vmap(self) -> dict[int, Vertex]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def in_edges(self) -> dict[int, tuple[Edge, ...]]:
        acc: dict[int, list[Edge]] = {v.id: [] for v in self.vertices}
        for e in self.edges:
            acc[e.tgt].append(e)
        return {k: tuple(v) for k, v in acc.items()}

    @cached_property
    def out_edges(self) -> dict[int, tuple[Edge, ...]]:
        acc: dict[int, list[Edge]] = {v.id: [] for v in self.vertices}
        for e in self.edges:
            acc[e.src].append(e)
        return {k: tuple(v) for k, v in acc.items()}

    @cached_property
    def wire_vertices(self) -> tuple[int, ...]:
        return tuple(v.id for v in self.vertices if v.kind == WIRE)

    @cached_property
    def node_vertices(self) -> tuple[int, ...]:
        return tuple(v.id for v in self.vertices if v.kind == NODE)

    def is_wire(self, vid: int) -> bool:
        return self.vmap[vid].kind == WIRE

    def vertex_type(self, vid: int) -> str:
        return self.vmap[vid].type

    def max_id(self) -> int:
        return max((v.id for v in self.vertices), default=-1)

    def node_port_edge(self, node: int, port: int, direction: str) -> Edge:
        """The unique edge at a node port; direction is "in" or "out"."""
        edges = self.in_edges[node] if direction == "in" else self.out_edges[node]
        for e in edges:
            if (e.tgt_port if direction == "in" else e.src_port) == port:
                return e
        raise InvalidEdge(f"node {node} has no {direction}-edge at port {port}")

    # -- wires ---------------------------------------------------------

    @cached_property
    def wires(self) -> tuple[WireInfo, ...]:
        """Decompose the wire-vertices into maximal chains and circles."""
        wire_pred: dict[int, int] = {}
        wire_succ: dict[int, int] = {}
        start_anchor: dict[int, tuple[int, int]] = {}
        end_anchor: dict[int, tuple[int, int]] = {}
        for e in self.edges:
            s_wire = self.is_wire(e.src)
            t_wire = self.is_wire(e.tgt)
            if s_wire and t_wire:
                wire_succ[e.src] = e.tgt
                wire_pred[e.tgt] = e.src
            elif s_wire:
                end_anchor[e.src] = (e.tgt, e.tgt_port)
            elif t_wire:
                start_anchor[e.tgt] = (e.src, e.src_port)
        out: list[WireInfo] = []
        seen: set[int] = set()
        for w in self.wire_vertices:  # chains first: start where no wire predecessor
            if w in seen or w in wire_pred:
                continue
            chain = [w]
            seen.add(w)
            cur = w
            while cur in wire_succ:
                cur = wire_succ[cur]
                chain.append(cur)
                seen.add(cur)
            out.append(WireInfo(
                vertices=tuple(chain),
                start_anchor=start_anchor.get(chain[0]),
                end_anchor=end_anchor.get(chain[-1]),
                circle=False,
                type=self.vertex_type(w)))
        for w in self.wire_vertices:  # remaining are circles
            if w in seen:
                continue
            cyc = [w]
            seen.add(w)
            cur = wire_succ[w]
            while cur != w:
                cyc.append(cur)
                seen.add(cur)
                cur = wire_succ[cur]
            lo = cyc.index(min(cyc))
            out.append(WireInfo(
                vertices=tuple(cyc[lo:] + cyc[:lo]),
                start_anchor=None,
                end_anchor=None,
                circle=True,
                type=self.vertex_type(w)))
        return tuple(sorted(out, key=lambda wi: wi.vertices))

    @cached_property
    def wire_of(self) -> dict[int, WireInfo]:
        return {v: wi for wi in self.wires for v in wi.vertices}

    def is_reduced(self) -> bool:
        return all(len(wi.vertices) == 1 for wi in self.wires)


def _edge_key(e: Edge):
    return (e.src, -1 if e.src_port is None else e.src_port,
            e.tgt, -1 if e.tgt_port is None else e.tgt_port)


# -- validation ---------------------------------------------------------

def check_graph(g: StringGraph) -> None:
    """Raise GraphInvariantError if any structural invariant fails."""
    ids = [v.id for v in g.vertices]
    if len(set(ids)) != len(ids):
        raise GraphInvariantError("duplicate vertex id")
    vmap = {v.id: v for v in g.vertices}
    for v in g.vertices:
        if v.kind == WIRE:
            if not g.sig.has_object(v.type):
                raise GraphInvariantError(f"wire-vertex {v.id} has unknown object type {v.type!r}")
        elif v.kind == NODE:
            if not g.sig.has_morphism(v.type):
                raise GraphInvariantError(f"node-vertex {v.id} has unknown morphism type {v.type!r}")
        else:
            raise GraphInvariantError(f"vertex {v.id} has unknown kind {v.kind!r}")
    indeg: dict[int, int] = {i: 0 for i in ids}
    outdeg: dict[int, int] = {i: 0 for i in ids}
    in_ports: dict[int, list[int]] = {i: [] for i in ids}
    out_ports: dict[int, list[int]] = {i: [] for i in ids}
    for e in g.edges:
        if e.src not in vmap or e.tgt not in vmap:
            raise GraphInvariantError(f"edge {e} references a missing vertex")
        s, t = vmap[e.src], vmap[e.tgt]
        if s.kind == NODE and t.kind == NODE:
            raise GraphInvariantError(f"edge {e} connects two node-vertices")
        if e.src == e.tgt and s.kind != WIRE:
            raise GraphInvariantError(f"self-loop on non-wire vertex {e.src}")
        if (e.src_port is None) != (s.kind == WIRE):
            raise GraphInvariantError(f"edge {e}: src_port must be set iff src is a node")
        if (e.tgt_port is None) != (t.kind == WIRE):
            raise GraphInvariantError(f"edge {e}: tgt_port must be set iff tgt is a node")
        indeg[e.tgt] += 1
        outdeg[e.src] += 1
        if s.kind == NODE:
            out_ports[e.src].append(e.src_port)
            wire_type = t.type
            port_type = g.sig.morphism(s.type).cod[e.src_port] \
                if e.src_port < len(g.sig.morphism(s.type).cod) else None
            if port_type is None:
                raise GraphInvariantError(f"edge {e}: out-port {e.src_port} out of range")
            if wire_type != port_type:
                raise GraphInvariantError(
                    f"edge {e}: wire type {wire_type!r} != port type {port_type!r}")
        if t.kind == NODE:
            in_ports[e.tgt].append(e.tgt_port)
            wire_type = s.type
            dom = g.sig.morphism(t.type).dom
            if e.tgt_port >= len(dom):
                raise GraphInvariantError(f"edge {e}: in-port {e.tgt_port} out of range")
            if wire_type != dom[e.tgt_port]:
                raise GraphInvariantError(
                    f"edge {e}: wire type {wire_type!r} != port type {dom[e.tgt_port]!r}")
    for v in g.vertices:
        if v.kind == WIRE:
            if indeg[v.id] > 1 or outdeg[v.id] > 1:
                raise GraphInvariantError(f"wire-vertex {v.id} has degree above one")
        else:
            m = g.sig.morphism(v.type)
            if sorted(in_ports[v.id]) != list(range(len(m.dom))):
                raise GraphInvariantError(
                    f"node-vertex {v.id} ({v.type}) in-ports {sorted(in_ports[v.id])} "
                    f"!= expected {list(range(len(m.dom)))}")
            if sorted(out_ports[v.id]) != list(range(len(m.cod))):
                raise GraphInvariantError(
                    f"node-vertex {v.id} ({v.type}) out-ports {sorted(out_ports[v.id])} "
                    f"!= expected {list(range(len(m.cod)))}")
    want_in = [v.id for v in g.vertices if v.kind == WIRE and indeg[v.id] == 0]
    want_out = [v.id for v in g.vertices if v.kind == WIRE and outdeg[v.id] == 0]
    if sorted(g.inputs) != sorted(want_in):
        raise GraphInvariantError(f"input order {g.inputs} != input set {sorted(want_in)}")
    if sorted(g.outputs) != sorted(want_out):
        raise GraphInvariantError(f"output order {g.outputs} != output set {sorted(want_out)}")
    if len(set(g.inputs)) != len(g.inputs) or len(set(g.outputs)) != len(g.outputs):
        raise GraphInvariantError("boundary order lists repeat a vertex")


# -- operations ---------------------------------------------------------

def boundary(g: StringGraph) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Ordered (inputs, outputs); an isolated wire-vertex appears in both."""
    return g.inputs, g.outputs


def disjoint_union_with_maps(g: StringGraph, h: StringGraph):
    """Vertex-disjoint union, returning (union, map_g, map_h) id maps."""
    if g.sig != h.sig:
        raise ValidationError("disjoint union requires the same ambient signature")
    off = g.max_id() + 1
    map_g = {v.id: v.id for v in g.vertices}
    map_h = {v.id: v.id + off for v in h.vertices}
    verts = list(g.vertices) + [Vertex(v.id + off, v.kind, v.type) for v in h.vertices]
    edges = list(g.edges) + [
        Edge(e.src + off, e.src_port, e.tgt + off, e.tgt_port) for e in h.edges]
    inputs = list(g.inputs) + [i + off for i in h.inputs]
    outputs = list(g.outputs) + [o + off for o in h.outputs]
    return (StringGraph.build(g.sig, verts, edges, inputs, outputs, validate=False),
            map_g, map_h)


def disjoint_union(g: StringGraph, h: StringGraph) -> StringGraph:
    """Vertex-disjoint union; boundary orders concatenate (g's first)."""
    return disjoint_union_with_maps(g, h)[0]


def plug_with_vertex(g: StringGraph, x: int, y: int) -> tuple[StringGraph, int]:
    """Identify input x with output y; also return the plugged vertex id.

    The plugged vertex inherits y's in-edge and x's out-edge.  plug(x, x)
    on an isolated wire-vertex closes it into a one-vertex circle.
    """
    if x not in g.inputs:
        raise NotAnInput(f"vertex {x} is not an input")
    if y not in g.outputs:
        raise NotAnOutput(f"vertex {y} is not an output")
    if g.vertex_type(x) != g.vertex_type(y):
        raise TypeMismatch(
            f"cannot plug {g.vertex_type(x)!r} into {g.vertex_type(y)!r}")
    if x == y:
        # isolated wire-vertex closed into a circle
        verts = g.vertices
        edges = list(g.edges) + [Edge(x, None, x, None)]
        inputs = [i for i in g.inputs if i != x]
        outputs = [o for o in g.outputs if o != x]
        return StringGraph.build(g.sig, verts, edges, inputs, outputs, validate=False), x

    m = min(x, y)
    drop = max(x, y)

    def ren(v: int) -> int:
        return m if v == drop else v

    verts = [v for v in g.vertices if v.id != drop]
    edges = [Edge(ren(e.src), e.src_port, ren(e.tgt), e.tgt_port) for e in g.edges]
    inputs = []
    for i in g.inputs:
        if i == x:
            continue
        if i == y:  # y isolated: the plugged vertex is still an input
            inputs.append(m)
        else:
            inputs.append(i)
    outputs = []
    for o in g.outputs:
        if o == y:
            continue
        if o == x:  # x isolated: the plugged vertex is still an output
            outputs.append(m)
        else:
            outputs.append(o)
    return StringGraph.build(g.sig, verts, edges, inputs, outputs, validate=False), m


def plug(g: StringGraph, x: int, y: int) -> StringGraph:
    return plug_with_vertex(g, x, y)[0]


def multi_plug(g: StringGraph, h: StringGraph,
               pairs: list[tuple[int, int]]) -> StringGraph:
    """Iterated plugging of the disjoint union g + h.

    Each pair is (boundary vertex in g, boundary vertex in h) and must
    pair an input of one side with an output of the other.  The result
    is independent of pair order up to isomorphism.
    """
    u, map_g, map_h = disjoint_union_with_maps(g, h)
    seen: set[int] = set()
    resolved: list[tuple[int, int]] = []
    for (a, b) in pairs:
        ua, ub = map_g.get(a), map_h.get(b)
        if ua is None or ub is None:
            raise InvalidEdge(f"pair ({a},{b}) references a missing vertex")
        if ua in seen or ub in seen:
            raise DuplicateVertex(f"pair ({a},{b}) repeats a plugged vertex")
        seen.add(ua)
        seen.add(ub)
        if a in g.inputs and b in h.outputs:
            resolved.append((ua, ub))
        elif a in g.outputs and b in h.inputs:
            resolved.append((ub, ua))
        else:
            raise NotAnInput(
                f"pair ({a},{b}) must pair an input of one side with an output of the other")
    cur = u
    alias: dict[int, int] = {}
    for (xin, yout) in resolved:
        xin = alias.get(xin, xin)
        yout = alias.get(yout, yout)
        cur, merged = plug_with_vertex(cur, xin, yout)
        alias = {k: (merged if v in (xin, yout) else v) for k, v in alias.items()}
        alias[xin] = merged
        alias[yout] = merged
    return cur


def normalize_wires_with_map(g: StringGraph) -> tuple[StringGraph, dict[int, int]]:
    """Contract every wire to a single wire-vertex.

    Returns the reduced graph and a map sending every original vertex to
    its survivor (node-vertices map to themselves).  Open and anchored
    wires keep one vertex; circles become a single self-loop vertex.
    """
    vmap: dict[int, int] = {n: n for n in g.node_vertices}
    verts = [v for v in g.vertices if v.kind == NODE]
    edges: list[Edge] = []
    for wi in g.wires:
        rep = min(wi.vertices)
        for v in wi.vertices:
            vmap[v] = rep
        verts.append(Vertex(rep, WIRE, wi.type))
        if wi.circle:
            edges.append(Edge(rep, None, rep, None))
            continue
        if wi.start_anchor is not None:
            n, p = wi.start_anchor
            edges.append(Edge(n, p, rep, None))
        if wi.end_anchor is not None:
            n, p = wi.end_anchor
            edges.append(Edge(rep, None, n, p))
    inputs = [vmap[i] for i in g.inputs]
    outputs = [vmap[o] for o in g.outputs]
    return StringGraph.build(g.sig, verts, edges, inputs, outputs, validate=False), vmap


def normalize_wires(g: StringGraph) -> StringGraph:
    return normalize_wires_with_map(g)[0]


def subdivide(g: StringGraph, e: Edge) -> StringGraph:
    """Split edge e through a fresh wire-vertex of the wire's type."""
    if e not in g.edges:
        raise InvalidEdge(f"edge {e} is not in the graph")
    if g.is_wire(e.src):
        wtype = g.vertex_type(e.src)
    elif g.is_wire(e.tgt):
        wtype = g.vertex_type(e.tgt)
    else:
        raise InvalidEdge(f"edge {e} has no wire-vertex endpoint")
    fresh = g.max_id() + 1
    verts = list(g.vertices) + [Vertex(fresh, WIRE, wtype)]
    edges = [x for x in g.edges if x != e]
    edges.append(Edge(e.src, e.src_port, fresh, None))
    edges.append(Edge(fresh, None, e.tgt, e.tgt_port))
    return StringGraph.build(g.sig, verts, edges, g.inputs, g.outputs, validate=False)
