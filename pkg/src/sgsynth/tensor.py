"""Evaluate string graphs as complex tensor contractions.

A graph is read as one big contraction: wire-vertices are Kronecker
deltas, node-vertices are the valuation tensors of their morphism type,
and every edge is a summed index.  Boundary wire-vertices contribute
the free indices, ordered by the graph's input/output orders; circles
contribute their wire dimension as a multiplicative trace factor.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionOverflow, DimMismatch, ShapeError
from .graph import NODE, WIRE, StringGraph

DEFAULT_INDEX_CAP = 2 ** 24


@dataclass(frozen=True)
class Tensor:
    """Dense complex tensor with separated input and output index lists.

    The array has shape output_dims + input_dims (outputs first), so the
    row-major flattening runs over outputs then inputs.
    """
    input_dims: tuple[int, ...]
    output_dims: tuple[int, ...]
    array: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.array, dtype=np.complex128)
        if arr.shape != self.output_dims + self.input_dims:
            raise ShapeError(
                f"array shape {arr.shape} != dims {self.output_dims + self.input_dims}")
        if not (np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag))):
            raise ShapeError("tensor entries must be finite")
        object.__setattr__(self, "array", arr)

    @staticmethod
    def from_matrix(matrix, input_dims: Sequence[int], output_dims: Sequence[int]) -> "Tensor":
        input_dims = tuple(input_dims)
        output_dims = tuple(output_dims)
        arr = np.asarray(matrix, dtype=np.complex128).reshape(output_dims + input_dims)
        return Tensor(input_dims, output_dims, arr)

    def as_matrix(self) -> np.ndarray:
        m = int(np.prod(self.output_dims)) if self.output_dims else 1
        k = int(np.prod(self.input_dims)) if self.input_dims else 1
        return self.array.reshape(m, k)

    def is_scalar(self) -> bool:
        return not self.input_dims and not self.output_dims

    def scalar(self) -> complex:
        return complex(self.array.reshape(()))


def permute_tensor(t: Tensor, in_perm: Sequence[int], out_perm: Sequence[int]) -> Tensor:
    """Reorder boundary indices: result input k is t's input in_perm[k],
    result output j is t's output out_perm[j]."""
    n_out = len(t.output_dims)
    axes = [out_perm[j] for j in range(n_out)] + \
           [n_out + in_perm[k] for k in range(len(t.input_dims))]
    return Tensor(
        input_dims=tuple(t.input_dims[in_perm[k]] for k in range(len(t.input_dims))),
        output_dims=tuple(t.output_dims[out_perm[j]] for j in range(n_out)),
        array=np.transpose(t.array, axes) if axes else t.array)


def tensor_product(a: Tensor, b: Tensor) -> Tensor:
    """Kronecker-style product under concatenated boundary orders."""
    na, nb = len(a.output_dims), len(b.output_dims)
    ka, kb = len(a.input_dims), len(b.input_dims)
    arr = np.tensordot(a.array, b.array, axes=0)
    # current order: (a_out, a_in, b_out, b_in) -> want (a_out, b_out, a_in, b_in)
    perm = list(range(na)) + [na + ka + j for j in range(nb)] + \
        [na + k for k in range(ka)] + [na + ka + nb + k for k in range(kb)]
    return Tensor(a.input_dims + b.input_dims, a.output_dims + b.output_dims,
                  np.transpose(arr, perm) if perm else arr)


# -- graph contraction ---------------------------------------------------


def _index_layout(g: StringGraph, valuation):
    """Assign integer indices to edges and boundary slots.

    Returns (operands, out_subs, dims) where each operand is
    (subscripts, array), out_subs lists the free subscripts in
    (outputs..., inputs...) order and dims maps subscript -> dimension.
    """
    sig = g.sig
    edge_idx = {e: i for i, e in enumerate(g.edges)}
    nxt = len(g.edges)
    out_ext = {}
    for pos, vid in enumerate(g.outputs):
        out_ext[pos] = nxt
        nxt += 1
    in_ext = {}
    for pos, vid in enumerate(g.inputs):
        in_ext[pos] = nxt
        nxt += 1
    dims: dict[int, int] = {}
    for e, i in edge_idx.items():
        wv = e.src if g.is_wire(e.src) else e.tgt
        dims[i] = sig.dimension(g.vertex_type(wv))
    for pos, vid in enumerate(g.outputs):
        dims[out_ext[pos]] = sig.dimension(g.vertex_type(vid))
    for pos, vid in enumerate(g.inputs):
        dims[in_ext[pos]] = sig.dimension(g.vertex_type(vid))

    in_slot = {vid: pos for pos, vid in enumerate(g.inputs)}
    out_slot = {vid: pos for pos, vid in enumerate(g.outputs)}

    operands: list[tuple[list[int], np.ndarray]] = []
    for v in g.vertices:
        if v.kind == WIRE:
            ins = g.in_edges[v.id]
            outs = g.out_edges[v.id]
            lo = edge_idx[ins[0]] if ins else in_ext[in_slot[v.id]]
            hi = edge_idx[outs[0]] if outs else out_ext[out_slot[v.id]]
            d = sig.dimension(v.type)
            operands.append(([lo, hi], np.eye(d, dtype=np.complex128)))
        else:
            m = sig.morphism(v.type)
            subs = [edge_idx[g.node_port_edge(v.id, j, "out")] for j in range(len(m.cod))]
            subs += [edge_idx[g.node_port_edge(v.id, i, "in")] for i in range(len(m.dom))]
            operands.append((subs, valuation[v.type].array))
    out_subs = [out_ext[p] for p in range(len(g.outputs))] + \
               [in_ext[p] for p in range(len(g.inputs))]
    return operands, out_subs, dims


def _einsum(pairs: list[tuple[list[int], np.ndarray]], out: list[int]) -> np.ndarray:
    """einsum with local renumbering (numpy caps subscripts at 52)."""
    local: dict[int, int] = {}
    for subs, _ in pairs:
        for i in subs:
            if i not in local:
                local[i] = len(local)
    for i in out:
        if i not in local:
            local[i] = len(local)
    if len(local) >= 52:
        raise DimensionOverflow(f"{len(local)} contraction indices exceeds einsum range")
    args: list = []
    for subs, arr in pairs:
        args.append(arr)
        args.append([local[i] for i in subs])
    args.append([local[i] for i in out])
    return np.einsum(*args)


def evaluate(g: StringGraph, valuation, *,
             cap: int = DEFAULT_INDEX_CAP,
             index_order: Optional[Sequence[int]] = None) -> Tensor:
    """Contract g against the valuation.

    Internal indices are eliminated greedily, smallest merged tensor
    first; index_order overrides that choice for order-independence
    tests.  The value is independent of the elimination order.
    """
    tensors = valuation.tensors if hasattr(valuation, "tensors") else valuation
    operands, out_subs, dims = _index_layout(g, tensors)
    total = 1
    for d in dims.values():
        total *= d
        if total > cap:
            raise DimensionOverflow(
                f"index space {total} exceeds cap {cap}")
    internal = sorted(set(dims) - set(out_subs))
    if index_order is not None:
        order = [i for i in index_order if i in internal]
        order += [i for i in internal if i not in order]
    else:
        order = None

    work = [(list(subs), arr) for subs, arr in operands]
    remaining = set(internal)
    while remaining:
        if order is not None:
            pick = next(i for i in order if i in remaining)
        else:
            def cost(i: int) -> tuple[int, int]:
                touched = [op for op in work if i in op[0]]
                merged = set().union(*(op[0] for op in touched))
                size = 1
                for j in merged:
                    size *= dims[j]
                return (size, i)
            pick = min(remaining, key=cost)
        touched = [op for op in work if pick in op[0]]
        rest = [op for op in work if pick not in op[0]]
        merged = sorted(set().union(*(op[0] for op in touched)))
        keep = [j for j in merged
                if j in out_subs or any(j in op[0] for op in rest)]
        res = _einsum(touched, keep)
        work = rest + [(keep, res)]
        remaining -= set(merged) - set(keep)
    if work:
        arr = _einsum(work, out_subs)
    else:
        arr = np.ones((), dtype=np.complex128)
    out_dims = tuple(g.sig.dimension(g.vertex_type(v)) for v in g.outputs)
    in_dims = tuple(g.sig.dimension(g.vertex_type(v)) for v in g.inputs)
    return Tensor(in_dims, out_dims, arr.reshape(out_dims + in_dims))


def contract_bruteforce(g: StringGraph, valuation, *, cap: int = 2 ** 22) -> Tensor:
    """Independent contraction path: literal sum over all index values.

    Exponential in edge count; used to cross-check `evaluate`.
    """
    tensors = valuation.tensors if hasattr(valuation, "tensors") else valuation
    operands, out_subs, dims = _index_layout(g, tensors)
    idxs = sorted(dims)
    space = 1
    for i in idxs:
        space *= dims[i]
    if space > cap:
        raise DimensionOverflow(f"brute-force space {space} exceeds cap {cap}")
    out_dims = tuple(g.sig.dimension(g.vertex_type(v)) for v in g.outputs)
    in_dims = tuple(g.sig.dimension(g.vertex_type(v)) for v in g.inputs)
    acc = np.zeros(out_dims + in_dims, dtype=np.complex128)
    pos = {i: k for k, i in enumerate(idxs)}
    for assign in itertools.product(*(range(dims[i]) for i in idxs)):
        term = 1.0 + 0j
        for subs, arr in operands:
            term *= arr[tuple(assign[pos[i]] for i in subs)]
            if term == 0:
                break
        if term != 0:
            acc[tuple(assign[pos[i]] for i in out_subs)] += term
    return Tensor(in_dims, out_dims, acc)


# -- comparison up to scalar and boundary permutation --------------------


def scalar_match(t1: Tensor, t2: Tensor, tol: float = 1e-9) -> Optional[complex]:
    """The scalar l with t1 = l*t2 entrywise within tol, or None.

    l is fixed by the largest-magnitude entry of t2; an all-zero t2
    matches only an all-zero t1, with l = 1.
    """
    if t1.input_dims != t2.input_dims or t1.output_dims != t2.output_dims:
        raise DimMismatch(f"dims {t1.input_dims}->{t1.output_dims} vs "
                          f"{t2.input_dims}->{t2.output_dims}")
    f1 = t1.array.ravel()
    f2 = t2.array.ravel()
    if f2.size == 0 or np.max(np.abs(f2)) <= tol:
        if f1.size == 0 or np.max(np.abs(f1)) <= tol:
            return 1.0 + 0j
        return None
    p = int(np.argmax(np.abs(f2)))
    lam = f1[p] / f2[p]
    if np.allclose(f1, lam * f2, rtol=0.0, atol=tol):
        return complex(lam)
    return None


def _quantize(z: complex) -> tuple[float, float]:
    re = round(z.real, 12) + 0.0
    im = round(z.imag, 12) + 0.0
    return (re, im)


def equiv_key(t: Tensor, tol: float = 1e-9) -> bytes:
    """Class key up to nonzero scalar and independent permutations of
    the input and output index lists.

    Each permuted flattening is normalized by its own first
    largest-magnitude entry, quantized to 12 decimal digits, and the
    lexicographically least encoding wins; zero tensors get a reserved
    key per shape.
    """
    dims_tag = repr((t.output_dims, t.input_dims)).encode()
    flat = t.array.ravel()
    if flat.size == 0 or np.max(np.abs(flat)) <= tol:
        return b"zero:" + dims_tag
    best: Optional[bytes] = None
    n_in, n_out = len(t.input_dims), len(t.output_dims)
    for sigma in itertools.permutations(range(n_in)):
        for tau in itertools.permutations(range(n_out)):
            p = permute_tensor(t, sigma, tau)
            f = p.array.ravel()
            f = f / f[int(np.argmax(np.abs(f)))]
            enc = repr(((p.output_dims, p.input_dims),
                        tuple(_quantize(z) for z in f))).encode()
            if best is None or enc < best:
                best = enc
    return best


def class_scalar_permutation(t1: Tensor, t2: Tensor, tol: float = 1e-9):
    """Find (scalar, in_perm, out_perm) with t1 = scalar * permute(t2), or None."""
    for sigma in itertools.permutations(range(len(t2.input_dims))):
        for tau in itertools.permutations(range(len(t2.output_dims))):
            p = permute_tensor(t2, sigma, tau)
            if p.input_dims != t1.input_dims or p.output_dims != t1.output_dims:
                continue
            lam = scalar_match(t1, p, tol)
            if lam is not None:
                return lam, tuple(sigma), tuple(tau)
    return None


def compose_oracle(matrices: Sequence[np.ndarray]) -> np.ndarray:
    """Plain matrix-product oracle, independent of the graph engine.

    matrices[0] is applied last: the result is m0 @ m1 @ ... @ mk.
    """
    if not matrices:
        raise DimMismatch("compose_oracle needs at least one matrix")
    out = np.asarray(matrices[0], dtype=np.complex128)
    for m in matrices[1:]:
        m = np.asarray(m, dtype=np.complex128)
        if out.shape[1] != m.shape[0]:
            raise DimMismatch(f"cannot compose {out.shape} with {m.shape}")
        out = out @ m
    return out
