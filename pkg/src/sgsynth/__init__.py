"""String-graph rewriting and rewrite-system synthesis against tensor models."""

from .errors import SgsynthError
from .graph import (
    Edge,
    StringGraph,
    Vertex,
    boundary,
    disjoint_union,
    multi_plug,
    normalize_wires,
    plug,
    subdivide,
)
from .iso import canonical_form, is_isomorphic, similar_pluggings
from .rewrite import (
    Matching,
    RewriteRule,
    RewriteSystem,
    apply_rewrite,
    find_matchings,
    is_redex_local,
    make_rule,
    normalize,
)
from .signature import (
    Signature,
    Valuation,
    generator_graph,
    identity_generator,
    parse_signature,
    parse_valuation,
)
from .synth import (
    SynthesisParams,
    base_graphs,
    default_schedule,
    enum_irreducible,
    mint_rules,
    reduction_measure,
    run_synthesis,
)
from .tensor import Tensor, compose_oracle, equiv_key, evaluate, scalar_match

__all__ = [
    "SgsynthError", "Edge", "StringGraph", "Vertex", "boundary",
    "disjoint_union", "multi_plug", "normalize_wires", "plug", "subdivide",
    "canonical_form", "is_isomorphic", "similar_pluggings", "Matching",
    "RewriteRule", "RewriteSystem", "apply_rewrite", "find_matchings",
    "is_redex_local", "make_rule", "normalize", "Signature", "Valuation",
    "generator_graph", "identity_generator", "parse_signature",
    "parse_valuation", "SynthesisParams", "base_graphs", "default_schedule",
    "enum_irreducible", "mint_rules", "reduction_measure", "run_synthesis",
    "Tensor", "compose_oracle", "equiv_key", "evaluate", "scalar_match",
]

__version__ = "0.1.0"
