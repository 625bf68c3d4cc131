"""Graph isomorphism, canonical forms and similar-plugging detection.

Isomorphisms preserve vertex kinds, types and port labels.  Inputs map
to inputs and outputs to outputs automatically (boundary membership is
degree-derived), but boundary *order* is deliberately ignored: graphs
differing only in boundary order are isomorphic here, and order is
handled by the tensor-level permutation classing.
"""
from __future__ import annotations

import hashlib
from collections import Counter

from .graph import NODE, WIRE, StringGraph, plug


def _refine(colors: dict[int, int], g: StringGraph) -> dict[int, int]:
    """Iterated color refinement over the port-labeled adjacency."""
    n = len(g.vertices)
    while True:
        sigs = {}
        for v in g.vertices:
            around = []
            for e in g.out_edges[v.id]:
                around.append((0, e.src_port, e.tgt_port, colors[e.tgt]))
            for e in g.in_edges[v.id]:
                around.append((1, e.tgt_port, e.src_port, colors[e.src]))
            around.sort(key=lambda t: (t[0], _pk(t[1]), _pk(t[2]), t[3]))
            sigs[v.id] = (colors[v.id], tuple(around))
        ranking = {s: i for i, s in enumerate(sorted(set(sigs.values()),
                                                     key=_sig_key))}
        new = {vid: ranking[s] for vid, s in sigs.items()}
        if len(set(new.values())) == len(set(colors.values())):
            return new
        colors = new
        if len(set(colors.values())) == n:
            return colors


def _pk(port):  # ports sort with None first
    return -1 if port is None else port


def _sig_key(s):
    base, around = s
    return (base, tuple((d, _pk(a), _pk(b), c) for (d, a, b, c) in around))


def _initial_colors(g: StringGraph) -> dict[int, int]:
    keys = {}
    for v in g.vertices:
        keys[v.id] = (v.kind, v.type,
                      len(g.in_edges[v.id]), len(g.out_edges[v.id]))
    ranking = {k: i for i, k in enumerate(sorted(set(keys.values())))}
    return {vid: ranking[k] for vid, k in keys.items()}


def _certificate(g: StringGraph, colors: dict[int, int]) -> bytes:
    """Certificate for a discrete coloring: relabel by color rank, encode."""
    order = sorted(g.vertices, key=lambda v: colors[v.id])
    label = {v.id: i for i, v in enumerate(order)}
    vpart = tuple((v.kind, v.type) for v in order)
    epart = tuple(sorted(
        (label[e.src], _pk(e.src_port), label[e.tgt], _pk(e.tgt_port))
        for e in g.edges))
    return repr((len(order), vpart, epart)).encode()


def _canonicalize(g: StringGraph) -> tuple[bytes, dict[int, int]]:
    best: list = [None, None]

    def search(colors: dict[int, int]) -> None:
        colors = _refine(colors, g)
        classes: dict[int, list[int]] = {}
        for vid, c in colors.items():
            classes.setdefault(c, []).append(vid)
        target = None
        for c in sorted(classes):
            if len(classes[c]) > 1:
                target = classes[c]
                break
        if target is None:
            cert = _certificate(g, colors)
            if best[0] is None or cert < best[0]:
                ranks = sorted(colors.values())
                best[0] = cert
                best[1] = {vid: ranks.index(c) for vid, c in colors.items()}
            return
        for vid in sorted(target):
            # individualize: vid gets its own class just before its old one
            bumped = {w: c * 2 + (0 if w == vid else 1) for w, c in colors.items()}
            search(bumped)

    if not g.vertices:
        return _certificate(g, {}), {}
    search(_initial_colors(g))
    assert best[0] is not None
    return best[0], best[1]


def canonical_form(g: StringGraph) -> bytes:
    """Deterministic, renaming-invariant encoding of g's isomorphism class.

    Partition refinement on (kind, type, degree, ports), then backtracking
    individualization over the finest partition, keeping the least
    certificate.
    """
    cached = g.__dict__.get("_canonical_form")
    if cached is not None:
        return cached
    form, labeling = _canonicalize(g)
    g.__dict__["_canonical_form"] = form
    g.__dict__["_canonical_labeling"] = labeling
    return form


def canonical_labeling(g: StringGraph) -> dict[int, int]:
    """Vertex id -> canonical index, the labeling behind canonical_form."""
    canonical_form(g)
    return g.__dict__["_canonical_labeling"]


def canonical_digest(g: StringGraph) -> str:
    """Short hex digest of the canonical form, for reports and diffing."""
    return hashlib.sha256(canonical_form(g)).hexdigest()[:16]


def is_isomorphic(g: StringGraph, h: StringGraph) -> bool:
    return canonical_form(g) == canonical_form(h)


def node_fixing_isomorphic(g: StringGraph, h: StringGraph) -> bool:
    """Is there an isomorphism g ~ h that is the identity on node-vertices?

    Requires the two graphs to carry the same node-vertex ids and types
    (as happens for pluggings of a common graph, which never touch
    node-vertices).  With every node pinned, anchored wires must match
    anchor-for-anchor with equal lengths; free wires and circles match
    by (type, length) multiset.
    """
    nodes_g = sorted((v.id, v.type) for v in g.vertices if v.kind == NODE)
    nodes_h = sorted((v.id, v.type) for v in h.vertices if v.kind == NODE)
    if nodes_g != nodes_h:
        return False

    def split(x: StringGraph):
        anchored = {}
        free: Counter = Counter()
        circles: Counter = Counter()
        for wi in x.wires:
            if wi.circle:
                circles[(wi.type, len(wi.vertices))] += 1
            elif wi.start_anchor is None and wi.end_anchor is None:
                free[(wi.type, len(wi.vertices))] += 1
            else:
                anchored[(wi.start_anchor, wi.end_anchor)] = (wi.type, len(wi.vertices))
        return anchored, free, circles

    return split(g) == split(h)


def similar_pluggings(g: StringGraph, x: int, y: int) -> set[tuple[int, int]]:
    """All pluggings (x', y') of g whose result is isomorphic to the
    result of (x, y) via an isomorphism fixing every node-vertex.

    Always contains (x, y) itself.
    """
    gxy = plug(g, x, y)
    out = {(x, y)}
    for a in g.inputs:
        for b in g.outputs:
            if (a, b) == (x, y):
                continue
            if g.vertex_type(a) != g.vertex_type(b):
                continue
            if g.vertex_type(a) != g.vertex_type(x):
                continue
            if node_fixing_isomorphic(gxy, plug(g, a, b)):
                out.add((a, b))
    return out
