"""Monoidal signatures: typed objects and generators, plus their graphs.

A signature declares wire types (objects, each with a vector-space
dimension) and generator types (morphisms, each with ordered lists of
input and output object names).  Signatures are immutable and safe to
share across workers.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ParseError, UnknownMorphism, UnknownObject, ValidationError


@dataclass(frozen=True)
class ObjectType:
    name: str
    dimension: int


@dataclass(frozen=True)
class MorphismType:
    name: str
    dom: tuple[str, ...]
    cod: tuple[str, ...]


@dataclass(frozen=True)
class Signature:
    objects: tuple[ObjectType, ...]
    morphisms: tuple[MorphismType, ...]

    def __post_init__(self) -> None:
        onames = [o.name for o in self.objects]
        mnames = [m.name for m in self.morphisms]
        if len(set(onames)) != len(onames):
            raise ValidationError("duplicate object name in signature")
        if len(set(mnames)) != len(mnames):
            raise ValidationError("duplicate morphism name in signature")
        for o in self.objects:
            if o.dimension < 1:
                raise ValidationError(f"object {o.name!r} has dimension {o.dimension} < 1")
        known = set(onames)
        for m in self.morphisms:
            for ref in (*m.dom, *m.cod):
                if ref not in known:
                    raise ValidationError(
                        f"morphism {m.name!r} references undeclared object {ref!r}")

    def object(self, name: str) -> ObjectType:
        for o in self.objects:
            if o.name == name:
                return o
        raise UnknownObject(f"unknown object type {name!r}")

    def morphism(self, name: str) -> MorphismType:
        for m in self.morphisms:
            if m.name == name:
                return m
        raise UnknownMorphism(f"unknown morphism type {name!r}")

    def has_object(self, name: str) -> bool:
        return any(o.name == name for o in self.objects)

    def has_morphism(self, name: str) -> bool:
        return any(m.name == name for m in self.morphisms)

    def dimension(self, object_name: str) -> int:
        return self.object(object_name).dimension


def parse_signature(text: str) -> Signature:
    """Parse a signature from its JSON file format.

    Raises ParseError for malformed documents and ValidationError for
    duplicate names, dangling object references or dimensions < 1.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"signature is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("signature document must be a JSON object")
    try:
        objects = tuple(
            ObjectType(name=str(o["name"]), dimension=int(o["dimension"]))
            for o in doc.get("objects", []))
        morphisms = tuple(
            MorphismType(
                name=str(m["name"]),
                dom=tuple(str(x) for x in m.get("dom", [])),
                cod=tuple(str(x) for x in m.get("cod", [])))
            for m in doc.get("morphisms", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"signature document malformed: {exc}") from exc
    return Signature(objects=objects, morphisms=morphisms)


def print_signature(sig: Signature) -> str:
    """Serialize a signature; parse_signature round-trips it."""
    doc = {
        "objects": [{"name": o.name, "dimension": o.dimension} for o in sig.objects],
        "morphisms": [
            {"name": m.name, "dom": list(m.dom), "cod": list(m.cod)}
            for m in sig.morphisms],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class Valuation:
    """Concrete model: one tensor per morphism, shapes fixed by the signature."""
    sig: Signature
    tensors: "dict[str, object]"  # morphism name -> Tensor

    def __post_init__(self) -> None:
        from .errors import MissingEntry, ShapeError

        for m in self.sig.morphisms:
            t = self.tensors.get(m.name)
            if t is None:
                raise MissingEntry(f"no tensor for morphism {m.name!r}")
            want_in = tuple(self.sig.dimension(o) for o in m.dom)
            want_out = tuple(self.sig.dimension(o) for o in m.cod)
            if t.input_dims != want_in or t.output_dims != want_out:
                raise ShapeError(
                    f"tensor for {m.name!r} has dims {t.input_dims}->{t.output_dims}, "
                    f"signature requires {want_in}->{want_out}")
        extra = set(self.tensors) - {m.name for m in self.sig.morphisms}
        if extra:
            raise ShapeError(f"valuation names unknown morphisms: {sorted(extra)}")

    def __getitem__(self, name: str):
        return self.tensors[name]


def parse_valuation(text: str, sig: Signature) -> Valuation:
    """Parse a valuation from its JSON file format and check shapes."""
    from .tensor import Tensor

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"valuation is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("morphisms"), dict):
        raise ParseError('valuation document must be {"morphisms": {...}}')
    tensors = {}
    for name, spec in doc["morphisms"].items():
        try:
            in_dims = tuple(int(d) for d in spec["input_dims"])
            out_dims = tuple(int(d) for d in spec["output_dims"])
            entries = [complex(re, im) for (re, im) in spec["entries"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"tensor for {name!r} malformed: {exc}") from exc
        import numpy as np

        total = 1
        for d in in_dims + out_dims:
            total *= d
        if len(entries) != total:
            from .errors import ShapeError

            raise ShapeError(
                f"tensor for {name!r} has {len(entries)} entries, expected {total}")
        arr = np.asarray(entries, dtype=np.complex128).reshape(out_dims + in_dims)
        tensors[name] = Tensor(in_dims, out_dims, arr)
    return Valuation(sig=sig, tensors=tensors)


def print_valuation(val: Valuation) -> str:
    doc = {"morphisms": {}}
    for name in sorted(val.tensors):
        t = val.tensors[name]
        doc["morphisms"][name] = {
            "input_dims": list(t.input_dims),
            "output_dims": list(t.output_dims),
            "entries": [[z.real, z.imag] for z in t.array.ravel().tolist()],
        }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def generator_graph(sig: Signature, name: str):
    """Smallest string graph containing one node-vertex of the given type.

    One wire-vertex per dom entry feeds port in_i, one per cod entry hangs
    off port out_j; boundary order is (dom order, cod order).
    """
    from .graph import Edge, StringGraph, Vertex, NODE, WIRE

    m = sig.morphism(name)
    verts = [Vertex(0, NODE, name)]
    edges = []
    inputs = []
    outputs = []
    nxt = 1
    for i, obj in enumerate(m.dom):
        verts.append(Vertex(nxt, WIRE, obj))
        edges.append(Edge(nxt, None, 0, i))
        inputs.append(nxt)
        nxt += 1
    for j, obj in enumerate(m.cod):
        verts.append(Vertex(nxt, WIRE, obj))
        edges.append(Edge(0, j, nxt, None))
        outputs.append(nxt)
        nxt += 1
    return StringGraph.build(sig, verts, edges, inputs, outputs)


def identity_generator(sig: Signature, object_name: str):
    """Two connected wire-vertices of the given type: one input, one output."""
    from .graph import Edge, StringGraph, Vertex, WIRE

    obj = sig.object(object_name)
    verts = [Vertex(0, WIRE, obj.name), Vertex(1, WIRE, obj.name)]
    edges = [Edge(0, None, 1, None)]
    return StringGraph.build(sig, verts, edges, [0], [1])
