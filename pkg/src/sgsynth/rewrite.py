"""Rewrite rules, matching modulo wire-homeomorphism, and DPO rewriting.

Rules and hosts are kept wire-reduced.  A pattern wire-vertex matches a
whole host wire, or a chunk of one: the chunk next to a node port for a
boundary wire of the pattern, or any interior point for an isolated
pattern wire-vertex.  Applying a rule first materializes the match by
subdividing the claimed host wires, then deletes the image of the
pattern's interior, glues the replacement in along the boundary
bijection, and reduces the wires of the result.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

from .errors import (
    BoundaryMismatch,
    InvalidMatching,
    NormalizationError,
    ValidationError,
)
from .graph import (
    NODE,
    WIRE,
    Edge,
    StringGraph,
    Vertex,
    WireInfo,
    normalize_wires_with_map,
)
from .iso import canonical_labeling

REDUCTION = "reduction"
CONGRUENCE = "congruence"

WHOLE = "whole"
HEAD = "head"
TAIL = "tail"
FLOAT = "float"
CIRCLE = "circle"


@dataclass(frozen=True)
class RewriteRule:
    """Boundary-preserving span of wire-reduced graphs with a scalar.

    in_map pairs each lhs input with an rhs input (lhs input order);
    out_map likewise for outputs.  The scalar records the semantic
    ratio: evaluate(lhs) = scalar * evaluate(rhs) under the maps.
    """
    lhs: StringGraph
    rhs: StringGraph
    in_map: tuple[tuple[int, int], ...]
    out_map: tuple[tuple[int, int], ...]
    scalar: complex = 1.0 + 0j
    role: str = REDUCTION
    name: str = ""


@dataclass(frozen=True)
class RewriteSystem:
    rules: tuple[RewriteRule, ...] = ()

    @property
    def reductions(self) -> tuple[RewriteRule, ...]:
        return tuple(r for r in self.rules if r.role == REDUCTION)

    @property
    def congruences(self) -> tuple[RewriteRule, ...]:
        return tuple(r for r in self.rules if r.role == CONGRUENCE)

    def extended(self, new_rules) -> "RewriteSystem":
        return RewriteSystem(self.rules + tuple(new_rules))

    def __len__(self) -> int:
        return len(self.rules)


def make_rule(lhs: StringGraph, rhs: StringGraph,
              in_map, out_map, scalar: complex = 1.0 + 0j,
              role: str = REDUCTION, name: str = "") -> RewriteRule:
    """Validate and build a rule; both sides are stored wire-reduced."""
    lhs_red, lmap = normalize_wires_with_map(lhs)
    rhs_red, rmap = normalize_wires_with_map(rhs)
    in_pairs = tuple((lmap[a], rmap[b]) for a, b in _as_pairs(in_map))
    out_pairs = tuple((lmap[a], rmap[b]) for a, b in _as_pairs(out_map))
    _check_bijection(lhs_red.inputs, rhs_red.inputs, in_pairs, "input")
    _check_bijection(lhs_red.outputs, rhs_red.outputs, out_pairs, "output")
    for a, b in in_pairs + out_pairs:
        if lhs_red.vertex_type(a) != rhs_red.vertex_type(b):
            raise BoundaryMismatch(
                f"boundary map sends type {lhs_red.vertex_type(a)!r} "
                f"to type {rhs_red.vertex_type(b)!r}")
    order = {v: i for i, v in enumerate(lhs_red.inputs)}
    in_pairs = tuple(sorted(in_pairs, key=lambda p: order[p[0]]))
    order = {v: i for i, v in enumerate(lhs_red.outputs)}
    out_pairs = tuple(sorted(out_pairs, key=lambda p: order[p[0]]))
    return RewriteRule(lhs_red, rhs_red, in_pairs, out_pairs,
                       complex(scalar), role, name)


def _as_pairs(m) -> list[tuple[int, int]]:
    if hasattr(m, "items"):
        return sorted(m.items())
    return [tuple(p) for p in m]


def _check_bijection(lside, rside, pairs, what: str) -> None:
    if sorted(a for a, _ in pairs) != sorted(lside) or \
            sorted(b for _, b in pairs) != sorted(rside):
        raise BoundaryMismatch(
            f"{what} map is not a bijection between {what}s "
            f"({len(lside)} vs {len(rside)} with {len(pairs)} pairs)")


# -- matching ------------------------------------------------------------


@dataclass(frozen=True)
class Matching:
    """A matching of a pattern on a reduced host.

    node_map sends pattern node-vertices to host node-vertices.
    claims sends each pattern wire-vertex to (host wire rep, kind):
    WHOLE and CIRCLE consume the entire host wire, HEAD/TAIL the chunk
    adjacent to the host wire's start/end anchor, FLOAT an interior
    point.  On the reduced host several pattern vertices may report the
    same host wire; `materialize` splits it into an honest monomorphism.
    """
    pattern: StringGraph = field(repr=False)
    host: StringGraph = field(repr=False)
    node_map: tuple[tuple[int, int], ...]
    claims: tuple[tuple[int, int, str], ...]

    @property
    def vertex_map(self) -> dict[int, int]:
        out = dict(self.node_map)
        out.update({p: h for p, h, _ in self.claims})
        return out

    def image_wires(self) -> set[int]:
        return {h for _, h, _ in self.claims}

    def sort_key(self):
        lab = canonical_labeling(self.host)
        return (tuple(sorted((p, lab[h]) for p, h in self.node_map)),
                tuple(sorted((p, lab[h], k) for p, h, k in self.claims)))


def _port_wire_table(g: StringGraph) -> dict[tuple[int, int, str], WireInfo]:
    """(node, port, direction) -> the wire anchored there."""
    table = {}
    for wi in g.wires:
        if wi.start_anchor is not None:
            n, p = wi.start_anchor
            table[(n, p, "out")] = wi
        if wi.end_anchor is not None:
            n, p = wi.end_anchor
            table[(n, p, "in")] = wi
    return table


def find_matchings(pattern: StringGraph, host: StringGraph,
                   required: Optional[int] = None) -> list["Matching"]:
    """All matchings of the pattern on the host, modulo wire-homeomorphism.

    Both graphs must be wire-reduced.  If `required` is given, only
    matchings claiming that vertex's wire are produced.
    """
    return list(iter_matchings(pattern, host, required))


def iter_matchings(pattern: StringGraph, host: StringGraph,
                   required: Optional[int] = None) -> Iterator["Matching"]:
    if not pattern.is_reduced() or not host.is_reduced():
        raise ValidationError("matching requires wire-reduced graphs")
    if pattern.sig != host.sig:
        raise ValidationError("matching requires a common signature")
    req_wire = host.wire_of[required].rep if required is not None else None

    pat_nodes = sorted(pattern.node_vertices)
    host_by_type: dict[str, list[int]] = {}
    for h in sorted(host.node_vertices):
        host_by_type.setdefault(host.vertex_type(h), []).append(h)
    if Counter(pattern.vertex_type(n) for n in pat_nodes) - \
            Counter(host.vertex_type(h) for h in host.node_vertices):
        return

    pat_ports = _port_wire_table(pattern)
    host_ports = _port_wire_table(host)
    pat_circles = sorted(
        (wi for wi in pattern.wires if wi.circle), key=lambda wi: wi.rep)
    host_circles = [wi for wi in host.wires if wi.circle]
    pat_floats = sorted(
        wi.rep for wi in pattern.wires
        if not wi.circle and wi.start_anchor is None and wi.end_anchor is None)
    if len(pat_circles) > len(host_circles):
        return

    def port_specs(n: int):
        m = pattern.sig.morphism(pattern.vertex_type(n))
        return [(p, "in") for p in range(len(m.dom))] + \
               [(p, "out") for p in range(len(m.cod))]

    def consistent(n: int, h: int, assigned: dict[int, int]) -> bool:
        for p, d in port_specs(n):
            wp = pat_ports[(n, p, d)]
            wh = host_ports.get((h, p, d))
            if wh is None:
                return False
            # the pattern wire's far end, as seen from this port
            if d == "out":
                far_p, far_h = wp.end_anchor, wh.end_anchor
            else:
                far_p, far_h = wp.start_anchor, wh.start_anchor
            if far_p is None:
                continue
            n2, p2 = far_p
            if far_h is None:
                return False
            h2, hp2 = far_h
            if hp2 != p2 or host.vertex_type(h2) != pattern.vertex_type(n2):
                return False
            if n2 in assigned and assigned[n2] != h2:
                return False
            if n2 == n and h2 != h:
                return False
        return True

    def emit(assigned: dict[int, int]) -> Iterator[Matching]:
        anchored_claims: list[tuple[int, int, str]] = []
        whole_claimed: set[int] = set()
        ok = True
        for wi in pattern.wires:
            if wi.circle or (wi.start_anchor is None and wi.end_anchor is None):
                continue
            pv = wi.rep
            if wi.start_anchor is not None and wi.end_anchor is not None:
                n, p = wi.start_anchor
                wh = host_ports.get((assigned[n], p, "out"))
                n2, p2 = wi.end_anchor
                if wh is None or wh.end_anchor != (assigned[n2], p2):
                    ok = False
                    break
                anchored_claims.append((pv, wh.rep, WHOLE))
                whole_claimed.add(wh.rep)
            elif wi.start_anchor is not None:
                n, p = wi.start_anchor
                wh = host_ports.get((assigned[n], p, "out"))
                if wh is None:
                    ok = False
                    break
                anchored_claims.append((pv, wh.rep, HEAD))
            else:
                n, p = wi.end_anchor
                wh = host_ports.get((assigned[n], p, "in"))
                if wh is None:
                    ok = False
                    break
                anchored_claims.append((pv, wh.rep, TAIL))
        if not ok:
            return
        anchored_reps = {h for _, h, _ in anchored_claims}

        circle_cands: dict[int, list[int]] = {}
        for wi in pat_circles:
            circle_cands[wi.rep] = [
                hw.rep for hw in host_circles if hw.type == wi.type]
        float_cands: dict[int, list[int]] = {}
        for pv in pat_floats:
            ptype = pattern.vertex_type(pv)
            float_cands[pv] = [
                hw.rep for hw in host.wires
                if hw.type == ptype and hw.rep not in whole_claimed]

        need_free_required = (req_wire is not None
                              and req_wire not in anchored_reps)
        if need_free_required and not pat_circles and not pat_floats:
            return

        circle_keys = [wi.rep for wi in pat_circles]
        for circ_choice in _injective_products(
                [circle_cands[k] for k in circle_keys]):
            circ_set = set(circ_choice)
            float_space = []
            for pv in pat_floats:
                float_space.append(
                    [h for h in float_cands[pv] if h not in circ_set])
            for flo_choice in itertools.product(*float_space):
                if need_free_required and \
                        req_wire not in circ_set and req_wire not in flo_choice:
                    continue
                claims = list(anchored_claims)
                claims += [(k, h, CIRCLE) for k, h in zip(circle_keys, circ_choice)]
                claims += [(p, h, FLOAT) for p, h in zip(pat_floats, flo_choice)]
                yield Matching(
                    pattern=pattern, host=host,
                    node_map=tuple(sorted(assigned.items())),
                    claims=tuple(sorted(claims)))

    def assign(i: int, assigned: dict[int, int], used: set[int]) -> Iterator[Matching]:
        if i == len(pat_nodes):
            yield from emit(assigned)
            return
        n = pat_nodes[i]
        for h in host_by_type.get(pattern.vertex_type(n), ()):
            if h in used:
                continue
            assigned[n] = h
            if consistent(n, h, assigned):
                used.add(h)
                yield from assign(i + 1, assigned, used)
                used.discard(h)
            del assigned[n]

    yield from assign(0, {}, set())


def _injective_products(candidate_lists: list[list[int]]) -> Iterator[tuple[int, ...]]:
    if not candidate_lists:
        yield ()
        return
    for combo in itertools.product(*candidate_lists):
        if len(set(combo)) == len(combo):
            yield combo


def has_matching(pattern: StringGraph, host: StringGraph,
                 required: Optional[int] = None) -> bool:
    for _ in iter_matchings(pattern, host, required):
        return True
    return False


# -- materialization and DPO rewriting ------------------------------------


def materialize(m: Matching) -> tuple[StringGraph, dict[int, int], dict[Edge, Edge]]:
    """Subdivide claimed host wires until the match is a monomorphism.

    Returns (expanded host, pattern->host vertex map, pattern->host edge
    map); the expanded host is wire-homeomorphic to the original.
    """
    host = m.host
    by_wire: dict[int, dict[str, list[int]]] = {}
    for pv, hw, kind in m.claims:
        by_wire.setdefault(hw, {}).setdefault(kind, []).append(pv)

    verts = [v for v in host.vertices if v.kind == NODE]
    edges: list[Edge] = []
    first_of: dict[int, int] = {}
    last_of: dict[int, int] = {}
    vmap: dict[int, int] = {n: h for n, h in m.node_map}
    nxt = host.max_id() + 1

    for wi in sorted(host.wires, key=lambda w: w.rep):
        rep = wi.rep
        claims = by_wire.get(rep, {})
        if WHOLE in claims or CIRCLE in claims:
            kind = WHOLE if WHOLE in claims else CIRCLE
            (pv,) = claims[kind]
            if len(claims) != 1 or len(claims[kind]) != 1:
                raise InvalidMatching(f"conflicting claims on host wire {rep}")
            vmap[pv] = rep
            chain = [rep]
        else:
            heads = claims.get(HEAD, [])
            tails = claims.get(TAIL, [])
            floats = sorted(claims.get(FLOAT, []))
            if len(heads) > 1 or len(tails) > 1:
                raise InvalidMatching(f"conflicting chunk claims on host wire {rep}")
            order = heads + floats + tails
            k = max(1, len(order))
            chain = [rep] + [nxt + i for i in range(k - 1)]
            nxt += k - 1
            for pv, hv in zip(order, chain):
                vmap[pv] = hv
        for hv in chain:
            verts.append(Vertex(hv, WIRE, wi.type))
        if wi.circle:
            for a, b in zip(chain, chain[1:] + chain[:1]):
                edges.append(Edge(a, None, b, None))
        else:
            if wi.start_anchor is not None:
                n, p = wi.start_anchor
                edges.append(Edge(n, p, chain[0], None))
            if wi.end_anchor is not None:
                n, p = wi.end_anchor
                edges.append(Edge(chain[-1], None, n, p))
            for a, b in zip(chain, chain[1:]):
                edges.append(Edge(a, None, b, None))
        first_of[rep] = chain[0]
        last_of[rep] = chain[-1]

    inputs = [first_of[v] for v in host.inputs]
    outputs = [last_of[v] for v in host.outputs]
    expanded = StringGraph.build(host.sig, verts, edges, inputs, outputs,
                                 validate=False)

    emap: dict[Edge, Edge] = {}
    for e in m.pattern.edges:
        if m.pattern.is_wire(e.src) and m.pattern.is_wire(e.tgt):
            if e.src != e.tgt:
                raise InvalidMatching("reduced pattern has a wire-wire chain edge")
            hv = vmap[e.src]
            emap[e] = Edge(hv, None, hv, None)
        elif m.pattern.is_wire(e.src):
            emap[e] = Edge(vmap[e.src], None, vmap[e.tgt], e.tgt_port)
        else:
            emap[e] = Edge(vmap[e.src], e.src_port, vmap[e.tgt], None)
    have = set(expanded.edges)
    for pe, he in emap.items():
        if he not in have:
            raise InvalidMatching(f"pattern edge {pe} has no host image")
    return expanded, vmap, emap


def verify_matching_condition(m: Matching) -> None:
    """Assert the matching condition on the materialized monomorphism:
    any host edge outside the image that touches an image vertex touches
    only images of pattern boundary vertices."""
    expanded, vmap, emap = materialize(m)
    if len(set(vmap.values())) != len(vmap):
        raise InvalidMatching("materialized vertex map is not injective")
    image_edges = set(emap.values())
    boundary = set(m.pattern.inputs) | set(m.pattern.outputs)
    img_of = {h: p for p, h in vmap.items()}
    for e in expanded.edges:
        if e in image_edges:
            continue
        for end in (e.src, e.tgt):
            if end in img_of and img_of[end] not in boundary:
                raise InvalidMatching(
                    f"edge {e} touches interior image vertex {end}")


def apply_rewrite(g: StringGraph, rule: RewriteRule, m: Matching) -> StringGraph:
    """Double-pushout rewrite: delete the matched interior, glue in the
    replacement along the boundary maps, reduce wires."""
    expanded, vmap, emap = materialize(m)
    boundary = set(rule.lhs.inputs) | set(rule.lhs.outputs)
    del_verts = {vmap[v.id] for v in rule.lhs.vertices if v.id not in boundary}
    del_edges = set(emap.values())

    fresh_base = expanded.max_id() + 1
    rhs_id = {v.id: fresh_base + i
              for i, v in enumerate(sorted(rule.rhs.vertices, key=lambda v: v.id))}

    parent: dict[int, int] = {}

    def find(a: int) -> int:
        while parent.get(a, a) != a:
            parent[a] = parent.get(parent[a], parent[a])
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for (li, ri) in rule.in_map:
        union(vmap[li], rhs_id[ri])
    for (lo, ro) in rule.out_map:
        union(vmap[lo], rhs_id[ro])

    verts: dict[int, Vertex] = {}
    for v in expanded.vertices:
        if v.id in del_verts:
            continue
        rep = find(v.id)
        verts[rep] = Vertex(rep, v.kind, v.type)
    for v in rule.rhs.vertices:
        rep = find(rhs_id[v.id])
        if rep not in verts:
            verts[rep] = Vertex(rep, v.kind, v.type)

    edges: list[Edge] = []
    for e in expanded.edges:
        if e in del_edges:
            continue
        edges.append(Edge(find(e.src), e.src_port, find(e.tgt), e.tgt_port))
    for e in rule.rhs.edges:
        edges.append(Edge(find(rhs_id[e.src]), e.src_port,
                          find(rhs_id[e.tgt]), e.tgt_port))

    inputs = [find(v) for v in expanded.inputs]
    outputs = [find(v) for v in expanded.outputs]
    if len(set(inputs)) != len(inputs) or len(set(outputs)) != len(outputs):
        raise InvalidMatching("rewrite merged two boundary slots")
    glued = StringGraph.build(g.sig, verts.values(), edges, inputs, outputs,
                              validate=False)
    reduced, _ = normalize_wires_with_map(glued)
    return reduced


# -- normalization ---------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    rule_name: str
    site_digest: str
    scalar: complex


def normalize_traced(system: RewriteSystem, g: StringGraph,
                     max_steps: int = 10_000) -> tuple[StringGraph, list[TraceStep]]:
    """Apply reductions first-rule-first-matching until none fires.

    The matching picked at each step is the least under canonical host
    labels, so isomorphic inputs normalize to isomorphic outputs.
    """
    import hashlib

    trace: list[TraceStep] = []
    cur = g
    for _ in range(max_steps):
        fired = False
        for rule in system.reductions:
            ms = find_matchings(rule.lhs, cur)
            if not ms:
                continue
            m = min(ms, key=lambda x: x.sort_key())
            digest = hashlib.sha256(repr(m.sort_key()).encode()).hexdigest()[:12]
            cur = apply_rewrite(cur, rule, m)
            trace.append(TraceStep(rule.name, digest, rule.scalar))
            fired = True
            break
        if not fired:
            return cur, trace
    raise NormalizationError(
        f"no normal form within {max_steps} steps; system may not terminate")


def normalize(system: RewriteSystem, g: StringGraph) -> StringGraph:
    return normalize_traced(system, g)[0]


def is_redex_local(system: RewriteSystem, g: StringGraph, v: int) -> bool:
    """Does some reduction match g with the image claiming v's wire?

    v is the surviving plugged wire-vertex of the latest plugging; only
    matchings local to it need checking when the pre-plugging graph was
    already redex-free.
    """
    host_nodes = Counter(g.vertex_type(n) for n in g.node_vertices)
    for rule in system.reductions:
        pat_nodes = Counter(rule.lhs.vertex_type(n)
                            for n in rule.lhs.node_vertices)
        if pat_nodes - host_nodes:
            continue
        if has_matching(rule.lhs, g, required=v):
            return True
    return False


def is_redex(system: RewriteSystem, g: StringGraph) -> bool:
    """Global redex test: some reduction matches anywhere."""
    host_nodes = Counter(g.vertex_type(n) for n in g.node_vertices)
    for rule in system.reductions:
        pat_nodes = Counter(rule.lhs.vertex_type(n)
                            for n in rule.lhs.node_vertices)
        if pat_nodes - host_nodes:
            continue
        if has_matching(rule.lhs, g):
            return True
    return False
