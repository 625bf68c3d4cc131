"""Seeded random graph construction shared by tests."""
from __future__ import annotations

import random

from sgsynth.graph import (
    StringGraph,
    disjoint_union,
    normalize_wires,
    plug_with_vertex,
    subdivide,
)
from sgsynth.signature import Signature, generator_graph, identity_generator


def random_reduced_graph(sig: Signature, rng: random.Random,
                         max_components: int = 3,
                         max_pluggings: int = 3) -> StringGraph:
    """Random valid wire-reduced graph: a union of generators (plus
    identity wires) with random type-compatible pluggings."""
    names = [m.name for m in sig.morphisms]
    g = StringGraph.empty(sig)
    for _ in range(rng.randint(1, max_components)):
        if rng.random() < 0.2:
            comp = normalize_wires(
                identity_generator(sig, rng.choice([o.name for o in sig.objects])))
        else:
            comp = generator_graph(sig, rng.choice(names))
        g = disjoint_union(g, comp)
    for _ in range(rng.randint(0, max_pluggings)):
        pairs = [(x, y) for x in g.inputs for y in g.outputs
                 if g.vertex_type(x) == g.vertex_type(y)]
        if not pairs:
            break
        x, y = rng.choice(pairs)
        g, _ = plug_with_vertex(g, x, y)
    return g


def random_plugging(g: StringGraph, rng: random.Random):
    pairs = [(x, y) for x in g.inputs for y in g.outputs
             if g.vertex_type(x) == g.vertex_type(y)]
    return rng.choice(pairs) if pairs else None


def random_subdivided(g: StringGraph, rng: random.Random,
                      max_cuts: int = 4) -> StringGraph:
    """Wire-homeomorphic variant of g with random extra wire-vertices."""
    for _ in range(rng.randint(0, max_cuts)):
        if not g.edges:
            break
        g = subdivide(g, rng.choice(sorted(g.edges, key=repr)))
    return g
