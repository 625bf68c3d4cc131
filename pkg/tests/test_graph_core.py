import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgsynth.errors import (
    DuplicateVertex,
    GraphInvariantError,
    InvalidEdge,
    NotAnInput,
    NotAnOutput,
    TypeMismatch,
)
from sgsynth.graph import (
    StringGraph,
    boundary,
    check_graph,
    disjoint_union,
    multi_plug,
    normalize_wires,
    normalize_wires_with_map,
    plug,
    plug_with_vertex,
    subdivide,
)
from sgsynth.iso import canonical_form, is_isomorphic
from sgsynth.signature import generator_graph, identity_generator
from sgsynth.tensor import evaluate, tensor_product

from util import random_reduced_graph, random_plugging, random_subdivided


def wire_chain(sig, n):
    """Open chain of n wire-vertices."""
    g = identity_generator(sig, "q")
    for _ in range(n - 2):
        g = subdivide(g, sorted(g.edges, key=repr)[0])
    return g


# -- boundary -----------------------------------------------------------


def test_boundary_identity(ghzw_sig):
    g = identity_generator(ghzw_sig, "q")
    ins, outs = boundary(g)
    assert len(ins) == 1 and len(outs) == 1 and ins != outs


def test_boundary_ghz(ghzw_sig):
    g = generator_graph(ghzw_sig, "ghz_mul")
    ins, outs = boundary(g)
    assert len(ins) == 2 and len(outs) == 1


def test_boundary_isolated_vertex_in_both(ghzw_sig):
    g = normalize_wires(identity_generator(ghzw_sig, "q"))
    ins, outs = boundary(g)
    assert ins == outs and len(ins) == 1


# -- disjoint union -----------------------------------------------------


def test_union_with_empty_is_identity(ghzw_sig):
    g = generator_graph(ghzw_sig, "ghz_mul")
    u = disjoint_union(g, StringGraph.empty(ghzw_sig))
    assert is_isomorphic(u, g)
    assert u.inputs == g.inputs and u.outputs == g.outputs


def test_union_counts(ghzw_sig):
    u = disjoint_union(generator_graph(ghzw_sig, "ghz_mul"),
                       generator_graph(ghzw_sig, "w_mul"))
    assert len(u.node_vertices) == 2
    assert len(u.wire_vertices) == 6


def test_union_evaluates_to_tensor_product(ghzw_val):
    # oracle: independent Kronecker-style product of the two tensors
    sig = ghzw_val.sig
    g = generator_graph(sig, "ghz_mul")
    h = generator_graph(sig, "w_comul")
    u = disjoint_union(g, h)
    expect = tensor_product(evaluate(g, ghzw_val), evaluate(h, ghzw_val))
    got = evaluate(u, ghzw_val)
    assert got.input_dims == expect.input_dims
    assert got.output_dims == expect.output_dims
    assert np.allclose(got.array, expect.array, atol=1e-12)


# -- plug ---------------------------------------------------------------


def test_plug_two_identity_wires(ghzw_sig):
    a = identity_generator(ghzw_sig, "q")
    b = identity_generator(ghzw_sig, "q")
    u = disjoint_union(a, b)
    # plug b's input into a's output: chain of 3 wire-vertices
    g = plug(u, u.inputs[1], u.outputs[0])
    check_graph(g)
    assert len(g.wire_vertices) == 3
    assert len(g.inputs) == 1 and len(g.outputs) == 1


def test_plug_closes_identity_wire_to_circle(ghzw_sig):
    # identifying the two endpoints of one wire yields a one-vertex circle
    g = identity_generator(ghzw_sig, "q")
    closed = plug(g, g.inputs[0], g.outputs[0])
    check_graph(closed)
    assert len(closed.vertices) == 1
    assert len(closed.edges) == 1
    assert not closed.inputs and not closed.outputs


def test_plug_isolated_self_becomes_circle(ghzw_sig):
    g = normalize_wires(identity_generator(ghzw_sig, "q"))
    v = g.inputs[0]
    closed, merged = plug_with_vertex(g, v, v)
    assert merged == v
    assert len(closed.vertices) == 1 and len(closed.edges) == 1


def test_plug_identity_after_generator_is_noop_semantically(ghzw_val):
    # oracle: ordinary matrix composition, identity . GHZ = GHZ
    sig = ghzw_val.sig
    g = generator_graph(sig, "ghz_mul")
    wire = identity_generator(sig, "q")
    u = disjoint_union(g, wire)
    plugged = plug(u, u.inputs[2], u.outputs[0])
    got = evaluate(normalize_wires(plugged), ghzw_val)
    assert np.allclose(got.as_matrix(), evaluate(g, ghzw_val).as_matrix(),
                       atol=1e-12)


def test_plug_errors(ghzw_sig):
    g = generator_graph(ghzw_sig, "ghz_mul")
    with pytest.raises(NotAnInput):
        plug(g, g.outputs[0], g.outputs[0])
    with pytest.raises(NotAnOutput):
        plug(g, g.inputs[0], g.inputs[1])


def test_plug_type_mismatch():
    from sgsynth.signature import MorphismType, ObjectType, Signature

    sig = Signature(
        objects=(ObjectType("a", 2), ObjectType("b", 3)),
        morphisms=(MorphismType("f", ("a",), ("b",)),))
    g = generator_graph(sig, "f")
    with pytest.raises(TypeMismatch):
        plug(g, g.inputs[0], g.outputs[0])


def test_plug_decrements_boundary(ghzw_sig):
    rng = random.Random(4)
    for _ in range(100):
        g = random_reduced_graph(ghzw_sig, rng)
        pair = random_plugging(g, rng)
        if pair is None:
            continue
        h = plug(g, *pair)
        assert len(h.inputs) == len(g.inputs) - 1
        assert len(h.outputs) == len(g.outputs) - 1


def test_plug_of_reduced_graph_stays_reduced(ghzw_sig):
    rng = random.Random(5)
    for _ in range(200):
        g = random_reduced_graph(ghzw_sig, rng)
        pair = random_plugging(g, rng)
        if pair is None:
            continue
        assert plug(g, *pair).is_reduced()


# -- multi_plug ----------------------------------------------------------


def test_multi_plug_empty_is_union(ghzw_sig):
    g = generator_graph(ghzw_sig, "ghz_mul")
    h = generator_graph(ghzw_sig, "w_mul")
    assert is_isomorphic(multi_plug(g, h, []), disjoint_union(g, h))


def test_multi_plug_composes_two_muls(ghzw_sig):
    g = generator_graph(ghzw_sig, "ghz_mul")
    h = generator_graph(ghzw_sig, "ghz_mul")
    out = multi_plug(g, h, [(g.inputs[0], h.outputs[0])])
    check_graph(out)
    assert len(out.node_vertices) == 2
    assert len(out.inputs) == 3 and len(out.outputs) == 1


def test_multi_plug_duplicate_vertex(ghzw_sig):
    g = generator_graph(ghzw_sig, "ghz_mul")
    h = generator_graph(ghzw_sig, "ghz_mul")
    with pytest.raises(DuplicateVertex):
        multi_plug(g, h, [(g.inputs[0], h.outputs[0]),
                          (g.inputs[0], h.outputs[0])])


def test_multi_plug_order_independent(ghzw_sig):
    # oracle: canonical forms agree across permuted plugging orders
    rng = random.Random(6)
    done = 0
    while done < 100:
        g = random_reduced_graph(ghzw_sig, rng, max_components=2, max_pluggings=0)
        h = random_reduced_graph(ghzw_sig, rng, max_components=2, max_pluggings=0)
        pairs = []
        used_g, used_h = set(), set()
        for x in g.inputs:
            for y in h.outputs:
                if x in used_g or y in used_h:
                    continue
                if g.vertex_type(x) == h.vertex_type(y):
                    pairs.append((x, y))
                    used_g.add(x)
                    used_h.add(y)
        if len(pairs) < 3:
            continue
        pairs = pairs[:3]
        base = multi_plug(g, h, pairs)
        shuffled = pairs[:]
        rng.shuffle(shuffled)
        assert is_isomorphic(base, multi_plug(g, h, shuffled))
        done += 1


# -- normalize_wires -------------------------------------------------------


def test_normalize_open_chain(ghzw_sig):
    g = wire_chain(ghzw_sig, 4)
    r = normalize_wires(g)
    assert len(r.vertices) == 1 and not r.edges
    assert r.inputs == r.outputs


def test_normalize_circle(ghzw_sig):
    g = wire_chain(ghzw_sig, 3)
    closed = plug(g, g.inputs[0], g.outputs[0])
    r = normalize_wires(closed)
    assert len(r.vertices) == 1
    assert len(r.edges) == 1
    e = r.edges[0]
    assert e.src == e.tgt


def test_normalize_anchored_wire(ghzw_sig):
    g = generator_graph(ghzw_sig, "ghz_mul")
    h = generator_graph(ghzw_sig, "ghz_comul")
    u = multi_plug(g, h, [(g.outputs[0], h.inputs[0])])
    # stretch the middle wire to 3 vertices, then reduce
    stretched = u
    for _ in range(2):
        mid = next(e for e in stretched.edges
                   if stretched.is_wire(e.src) and e.tgt_port is not None
                   and stretched.vmap[e.tgt].type == "ghz_comul")
        stretched = subdivide(stretched, mid)
    r = normalize_wires(stretched)
    assert is_isomorphic(r, normalize_wires(u))
    assert len(r.wire_vertices) == len(r.wires)


def test_normalize_idempotent_and_iso_invariant(ghzw_sig):
    rng = random.Random(7)
    for _ in range(100):
        g = random_subdivided(random_reduced_graph(ghzw_sig, rng), rng)
        r = normalize_wires(g)
        assert r.is_reduced()
        assert canonical_form(normalize_wires(r)) == canonical_form(r)


def test_normalize_preserves_counts_boundary_tensor(ghzw_val):
    rng = random.Random(8)
    for _ in range(60):
        g0 = random_reduced_graph(ghzw_val.sig, rng)
        g = random_subdivided(g0, rng)
        r, vmap = normalize_wires_with_map(g)
        assert len(r.node_vertices) == len(g.node_vertices)
        assert len(r.inputs) == len(g.inputs)
        assert len(r.outputs) == len(g.outputs)
        assert [vmap[i] for i in g.inputs] == list(r.inputs)
        t_g = evaluate(g, ghzw_val)
        t_r = evaluate(r, ghzw_val)
        assert np.allclose(t_g.array, t_r.array, atol=1e-12)


# -- subdivide -------------------------------------------------------------


def test_subdivide_identity_edge(ghzw_sig):
    g = identity_generator(ghzw_sig, "q")
    s = subdivide(g, g.edges[0])
    assert len(s.wire_vertices) == 3
    assert len(s.edges) == 2


def test_subdivide_self_loop(ghzw_sig):
    g = normalize_wires(identity_generator(ghzw_sig, "q"))
    closed = plug(g, g.inputs[0], g.outputs[0])
    s = subdivide(closed, closed.edges[0])
    assert len(s.vertices) == 2
    assert len(s.edges) == 2
    assert not any(e.src == e.tgt for e in s.edges)


def test_subdivide_missing_edge(ghzw_sig):
    g = identity_generator(ghzw_sig, "q")
    from sgsynth.graph import Edge

    with pytest.raises(InvalidEdge):
        subdivide(g, Edge(41, None, 42, None))


def test_subdivide_normalize_round_trip(ghzw_sig):
    # 1,000 random (graph, edge) pairs: subdividing never changes the
    # wire-reduced form
    rng = random.Random(9)
    done = 0
    while done < 1000:
        g = random_subdivided(random_reduced_graph(ghzw_sig, rng), rng)
        if not g.edges:
            continue
        e = rng.choice(sorted(g.edges, key=repr))
        s = subdivide(g, e)
        assert canonical_form(normalize_wires(s)) == canonical_form(normalize_wires(g))
        done += 1


# -- validator --------------------------------------------------------------


def test_validator_rejects_node_to_node(ghzw_sig):
    from sgsynth.graph import Edge, Vertex

    with pytest.raises(GraphInvariantError):
        StringGraph.build(
            ghzw_sig,
            [Vertex(0, "node", "ghz_counit"), Vertex(1, "node", "ghz_unit")],
            [Edge(1, 0, 0, 0)], [], [])


def test_validator_rejects_bad_degree(ghzw_sig):
    from sgsynth.graph import Edge, Vertex

    verts = [Vertex(0, "wire", "q"), Vertex(1, "wire", "q"), Vertex(2, "wire", "q")]
    edges = [Edge(0, None, 2, None), Edge(1, None, 2, None)]
    with pytest.raises(GraphInvariantError):
        StringGraph.build(ghzw_sig, verts, edges, [0, 1], [2])


def test_validator_rejects_wrong_boundary_order(ghzw_sig):
    from sgsynth.graph import Edge, Vertex

    verts = [Vertex(0, "wire", "q"), Vertex(1, "wire", "q")]
    edges = [Edge(0, None, 1, None)]
    with pytest.raises(GraphInvariantError):
        StringGraph.build(ghzw_sig, verts, edges, [1], [0])
