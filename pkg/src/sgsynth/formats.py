"""JSON file formats for graphs, rules, rulesets, tensors and schedules.

Every writer targets byte-stable output (sorted keys, fixed layouts) so
re-running a pipeline on identical inputs reproduces identical files.
The rule boundary_map is a flat list of [lhs_id, rhs_id] pairs: input
pairs first (in lhs input order), then output pairs (in lhs output
order).
"""
from __future__ import annotations

import csv
import io
import json
from typing import Any

from .errors import ParseError, ValidationError
from .graph import NODE, WIRE, Edge, StringGraph, Vertex
from .rewrite import RewriteRule, RewriteSystem, make_rule
from .signature import Signature
from .synth import RunReport, SynthesisParams
from .tensor import Tensor


def _port_str(port, direction: str):
    return None if port is None else f"{direction}_{port}"


def _port_val(s, what: str):
    if s is None:
        return None
    try:
        prefix, idx = str(s).rsplit("_", 1)
        return int(idx)
    except ValueError as exc:
        raise ParseError(f"bad {what} label {s!r}") from exc


def graph_to_doc(g: StringGraph) -> dict:
    return {
        "vertices": [{"id": v.id, "kind": v.kind, "type": v.type}
                     for v in g.vertices],
        "edges": [{"src": e.src, "src_port": _port_str(e.src_port, "out"),
                   "tgt": e.tgt, "tgt_port": _port_str(e.tgt_port, "in")}
                  for e in g.edges],
        "inputs": list(g.inputs),
        "outputs": list(g.outputs),
    }


def graph_from_doc(doc: Any, sig: Signature) -> StringGraph:
    if not isinstance(doc, dict):
        raise ParseError("graph document must be a JSON object")
    try:
        verts = [Vertex(int(v["id"]), str(v["kind"]), str(v["type"]))
                 for v in doc.get("vertices", [])]
        edges = [Edge(int(e["src"]), _port_val(e.get("src_port"), "src_port"),
                      int(e["tgt"]), _port_val(e.get("tgt_port"), "tgt_port"))
                 for e in doc.get("edges", [])]
        inputs = [int(i) for i in doc.get("inputs", [])]
        outputs = [int(o) for o in doc.get("outputs", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"graph document malformed: {exc}") from exc
    return StringGraph.build(sig, verts, edges, inputs, outputs)


def parse_graph(text: str, sig: Signature) -> StringGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"graph is not valid JSON: {exc}") from exc
    return graph_from_doc(doc, sig)


def print_graph(g: StringGraph) -> str:
    return json.dumps(graph_to_doc(g), indent=2, sort_keys=True) + "\n"


def tensor_to_doc(t: Tensor) -> dict:
    return {
        "input_dims": list(t.input_dims),
        "output_dims": list(t.output_dims),
        "entries": [[z.real, z.imag] for z in t.array.ravel().tolist()],
    }


def rule_to_doc(r: RewriteRule, run: int | None = None) -> dict:
    doc = {
        "name": r.name,
        "role": r.role,
        "scalar": [r.scalar.real, r.scalar.imag],
        "lhs": graph_to_doc(r.lhs),
        "rhs": graph_to_doc(r.rhs),
        "boundary_map": [[a, b] for a, b in r.in_map + r.out_map],
    }
    if run is not None:
        doc["minted_run"] = run
    return doc


def rule_from_doc(doc: Any, sig: Signature) -> RewriteRule:
    try:
        lhs = graph_from_doc(doc["lhs"], sig)
        rhs = graph_from_doc(doc["rhs"], sig)
        pairs = [(int(a), int(b)) for a, b in doc["boundary_map"]]
        re, im = doc.get("scalar", [1.0, 0.0])
        role = str(doc.get("role", "reduction"))
        name = str(doc.get("name", ""))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"rule document malformed: {exc}") from exc
    n_in = len(lhs.inputs)
    if len(pairs) != n_in + len(lhs.outputs):
        raise ValidationError(
            f"rule {name!r}: boundary_map has {len(pairs)} pairs, "
            f"expected {n_in + len(lhs.outputs)}")
    return make_rule(lhs, rhs, pairs[:n_in], pairs[n_in:],
                     complex(re, im), role, name)


def ruleset_to_doc(system: RewriteSystem,
                   provenance: dict[str, int] | None = None) -> dict:
    return {"rules": [
        rule_to_doc(r, (provenance or {}).get(r.name)) for r in system.rules]}


def print_ruleset(system: RewriteSystem,
                  provenance: dict[str, int] | None = None) -> str:
    return json.dumps(ruleset_to_doc(system, provenance),
                      indent=2, sort_keys=True) + "\n"


def parse_ruleset(text: str, sig: Signature, validate_measure: bool = True) -> RewriteSystem:
    from .synth import validate_system_measure

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"ruleset is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("rules"), list):
        raise ParseError('ruleset document must be {"rules": [...]}')
    system = RewriteSystem(tuple(rule_from_doc(d, sig) for d in doc["rules"]))
    if validate_measure:
        validate_system_measure(system)
    return system


def parse_schedule(text: str) -> list[SynthesisParams]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"schedule is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("runs"), list):
        raise ParseError('schedule document must be {"runs": [...]}')
    out = []
    for row in doc["runs"]:
        try:
            out.append(SynthesisParams(
                n_inputs=int(row["inputs"]),
                n_outputs=int(row["outputs"]),
                max_pluggings=int(row["max_pluggings"]),
                max_nodes=int(row["max_nodes"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"schedule row malformed: {exc}") from exc
    return out


def print_schedule(schedule: list[SynthesisParams]) -> str:
    doc = {"runs": [
        {"inputs": p.n_inputs, "outputs": p.n_outputs,
         "max_pluggings": p.max_pluggings, "max_nodes": p.max_nodes}
        for p in schedule]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


RUNS_CSV_HEADER = ["m", "n", "p", "q", "enumerated", "classes",
                   "reductions", "congruences", "naive_count"]


def runs_csv(reports: list[RunReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RUNS_CSV_HEADER)
    for r in reports:
        w.writerow([
            r.params.n_inputs, r.params.n_outputs,
            r.params.max_pluggings, r.params.max_nodes,
            r.enumerated, r.classes, r.reductions, r.congruences,
            "" if r.naive_rules is None else r.naive_rules,
        ])
    return buf.getvalue()
