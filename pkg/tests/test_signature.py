import json

import numpy as np
import pytest

from sgsynth import ghzw
from sgsynth.errors import (
    MissingEntry,
    ParseError,
    ShapeError,
    UnknownMorphism,
    UnknownObject,
    ValidationError,
)
from sgsynth.graph import check_graph, normalize_wires
from sgsynth.signature import (
    Signature,
    generator_graph,
    identity_generator,
    parse_signature,
    parse_valuation,
    print_signature,
    print_valuation,
)
from sgsynth.tensor import evaluate


GHZW_SIG_TEXT = print_signature(ghzw.signature())


def test_parse_ghzw_signature_counts():
    sig = parse_signature(GHZW_SIG_TEXT)
    assert len(sig.objects) == 1
    assert len(sig.morphisms) == 10
    assert sig.object("q").dimension == 2


def test_parse_objects_only():
    sig = parse_signature(json.dumps({"objects": [{"name": "q", "dimension": 2}]}))
    assert len(sig.morphisms) == 0


def test_dangling_object_reference():
    doc = {"objects": [{"name": "q", "dimension": 2}],
           "morphisms": [{"name": "f", "dom": ["r"], "cod": ["q"]}]}
    with pytest.raises(ValidationError):
        parse_signature(json.dumps(doc))


def test_duplicate_names_rejected():
    doc = {"objects": [{"name": "q", "dimension": 2},
                       {"name": "q", "dimension": 3}]}
    with pytest.raises(ValidationError):
        parse_signature(json.dumps(doc))
    doc = {"objects": [{"name": "q", "dimension": 2}],
           "morphisms": [{"name": "f", "dom": [], "cod": ["q"]},
                         {"name": "f", "dom": ["q"], "cod": []}]}
    with pytest.raises(ValidationError):
        parse_signature(json.dumps(doc))


def test_dimension_below_one_rejected():
    with pytest.raises(ValidationError):
        parse_signature(json.dumps({"objects": [{"name": "q", "dimension": 0}]}))


def test_malformed_json_is_parse_error():
    with pytest.raises(ParseError):
        parse_signature("{not json")


def test_signature_round_trip():
    sig = ghzw.signature()
    assert parse_signature(print_signature(sig)) == sig


def test_valuation_round_trip(ghzw_val):
    sig = ghzw_val.sig
    again = parse_valuation(print_valuation(ghzw_val), sig)
    for name in ghzw_val.tensors:
        assert np.array_equal(again[name].array, ghzw_val[name].array)


def test_parse_valuation_accepts_paper_matrices(ghzw_sig):
    doc = json.loads(print_valuation(ghzw.valuation()))
    val = parse_valuation(json.dumps(doc), ghzw_sig)
    assert np.array_equal(val["ghz_mul"].as_matrix(),
                          np.array([[1, 0, 0, 0], [0, 0, 0, 1]]))
    assert np.array_equal(val["w_mul"].as_matrix(),
                          np.array([[0, 1, 1, 0], [0, 0, 0, 1]]))


def test_parse_valuation_shape_error(ghzw_sig):
    doc = json.loads(print_valuation(ghzw.valuation()))
    doc["morphisms"]["ghz_mul"]["entries"] = [[1, 0]] * 6  # 2x3 matrix
    doc["morphisms"]["ghz_mul"]["input_dims"] = [3]
    with pytest.raises(ShapeError):
        parse_valuation(json.dumps(doc), ghzw_sig)


def test_parse_valuation_missing_entry(ghzw_sig):
    doc = json.loads(print_valuation(ghzw.valuation()))
    del doc["morphisms"]["zero"]
    with pytest.raises(MissingEntry):
        parse_valuation(json.dumps(doc), ghzw_sig)


def test_generator_graph_ghz_mul(ghzw_sig):
    g = generator_graph(ghzw_sig, "ghz_mul")
    check_graph(g)
    assert len(g.node_vertices) == 1
    assert len(g.wire_vertices) == 3
    assert len(g.edges) == 3
    assert len(g.inputs) == 2 and len(g.outputs) == 1
    assert g.is_reduced()


def test_generator_graph_state(ghzw_sig):
    g = generator_graph(ghzw_sig, "zero")
    assert len(g.node_vertices) == 1
    assert len(g.wire_vertices) == 1
    assert len(g.edges) == 1
    assert len(g.inputs) == 0 and len(g.outputs) == 1


def test_generator_graph_unknown_morphism(ghzw_sig):
    with pytest.raises(UnknownMorphism):
        generator_graph(ghzw_sig, "nope")


def test_generator_graph_evaluates_to_valuation_tensor(ghzw_val):
    # oracle: the generator graph contracts to exactly its own tensor
    for m in ghzw_val.sig.morphisms:
        g = generator_graph(ghzw_val.sig, m.name)
        t = evaluate(g, ghzw_val)
        assert np.allclose(t.array, ghzw_val[m.name].array, atol=1e-12)


def test_identity_generator(ghzw_sig):
    g = identity_generator(ghzw_sig, "q")
    assert len(g.wire_vertices) == 2
    assert len(g.edges) == 1
    assert len(g.inputs) == 1 and len(g.outputs) == 1


def test_identity_generator_unknown_object(ghzw_sig):
    with pytest.raises(UnknownObject):
        identity_generator(ghzw_sig, "r")


def test_identity_generator_normalizes_to_isolated_vertex(ghzw_sig):
    g = normalize_wires(identity_generator(ghzw_sig, "q"))
    assert len(g.vertices) == 1
    assert g.inputs == g.outputs


def test_identity_generator_evaluates_to_identity(ghzw_val):
    g = identity_generator(ghzw_val.sig, "q")
    assert np.allclose(evaluate(g, ghzw_val).as_matrix(), np.eye(2))
