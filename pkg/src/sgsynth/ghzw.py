"""The GHZ/W example theory: signature and derived valuation.

Only the two multiplication matrices are primitive inputs here; the
remaining tensors are solved from the algebra axioms:

* units from the unit axiom  mul . (unit (x) id) = id  (linear solve);
* the GHZ counit/comultiplication from its Frobenius form, pinned by
  specialness  mul . comul = id;
* the W counit/comultiplication from its Frobenius form, pinned by
  requiring the induced dualiser to be an involution (sign fixed +1);
* the dualiser from cap/cup compatibility of the two algebras;
* the zero state is the zero vector.

`check_model` re-verifies every axiom numerically; the derivation
script under scripts/ regenerates and re-checks the shipped valuation
file from this module.
"""
from __future__ import annotations

import numpy as np

from .signature import MorphismType, ObjectType, Signature, Valuation
from .tensor import Tensor

GHZ_MUL = np.array([[1, 0, 0, 0],
                    [0, 0, 0, 1]], dtype=np.complex128)
W_MUL = np.array([[0, 1, 1, 0],
                  [0, 0, 0, 1]], dtype=np.complex128)


def signature() -> Signature:
    q = ("q",)
    qq = ("q", "q")
    return Signature(
        objects=(ObjectType("q", 2),),
        morphisms=(
            MorphismType("ghz_mul", dom=qq, cod=q),
            MorphismType("ghz_unit", dom=(), cod=q),
            MorphismType("ghz_comul", dom=q, cod=qq),
            MorphismType("ghz_counit", dom=q, cod=()),
            MorphismType("w_mul", dom=qq, cod=q),
            MorphismType("w_unit", dom=(), cod=q),
            MorphismType("w_comul", dom=q, cod=qq),
            MorphismType("w_counit", dom=q, cod=()),
            MorphismType("dualiser", dom=q, cod=q),
            MorphismType("zero", dom=(), cod=q),
        ))


def solve_unit(mul: np.ndarray) -> np.ndarray:
    """Solve mul . (unit (x) id) = id for the unit (least squares, then check)."""
    d = mul.shape[0]
    rows = []
    rhs = []
    for a in range(d):
        for b in range(d):
            rows.append([mul[a, d * i + b] for i in range(d)])
            rhs.append(1.0 if a == b else 0.0)
    eta, *_ = np.linalg.lstsq(np.asarray(rows, dtype=np.complex128),
                              np.asarray(rhs, dtype=np.complex128), rcond=None)
    resid = np.asarray(rows) @ eta - np.asarray(rhs)
    if np.max(np.abs(resid)) > 1e-12:
        raise ValueError("unit axiom has no solution for this multiplication")
    return eta


def form_matrix(mul: np.ndarray, counit: np.ndarray) -> np.ndarray:
    """Bilinear form B[i,j] = counit(mul(|i>, |j>))."""
    d = mul.shape[0]
    return np.array([[counit @ mul[:, d * i + j] for j in range(d)]
                     for i in range(d)])


def comul_from_form(mul: np.ndarray, counit: np.ndarray) -> np.ndarray:
    """Comultiplication (id (x) mul)(cup (x) id) with cup the inverse form."""
    d = mul.shape[0]
    binv = np.linalg.inv(form_matrix(mul, counit))
    comul = np.zeros((d * d, d), dtype=np.complex128)
    for i in range(d):
        for a in range(d):
            for b in range(d):
                acc = 0.0 + 0j
                for k in range(d):
                    acc += binv[a, k] * mul[b, d * k + i]
                comul[d * a + b, i] = acc
    return comul


def solve_ghz_counit(mul: np.ndarray) -> np.ndarray:
    """Counit making the copy algebra special: mul . comul = id."""
    d = mul.shape[0]
    for eps in _counit_candidates(d):
        b = form_matrix(mul, eps)
        if abs(np.linalg.det(b)) < 1e-9:
            continue
        comul = comul_from_form(mul, eps)
        if np.allclose(mul @ comul, np.eye(d), atol=1e-12):
            return eps
    raise ValueError("no special Frobenius counit found")


def solve_w_counit(mul_w: np.ndarray, mul_g: np.ndarray,
                   counit_g: np.ndarray) -> np.ndarray:
    """Counit for the W algebra pinned by the dualiser being an involution.

    The dualiser is bent from the W cap and the GHZ cup; requiring it to
    square to the identity fixes the W form up to sign, and +1 is taken.
    """
    d = mul_w.shape[0]
    cup_g = np.linalg.inv(form_matrix(mul_g, counit_g))
    for eps in _counit_candidates(d):
        b_w = form_matrix(mul_w, eps)
        if abs(np.linalg.det(b_w)) < 1e-9:
            continue
        dual = (b_w @ cup_g).T
        if np.allclose(dual @ dual, np.eye(d), atol=1e-12) and dual[0, 1].real > 0:
            return eps
    raise ValueError("no involution-compatible W counit found")


def _counit_candidates(d: int):
    """Small rational grid; the axioms cut it down to the unique answer."""
    vals = [0.0, 1.0, -1.0, 0.5, 2.0]
    if d != 2:
        raise ValueError("candidate grid only implemented for dimension 2")
    for x in vals:
        for y in vals:
            yield np.array([x, y], dtype=np.complex128)


def dualiser_matrix(mul_w: np.ndarray, counit_w: np.ndarray,
                    mul_g: np.ndarray, counit_g: np.ndarray) -> np.ndarray:
    """(cap_w (x) id)(id (x) cup_g): mediates between the two algebras."""
    b_w = form_matrix(mul_w, counit_w)
    cup_g = np.linalg.inv(form_matrix(mul_g, counit_g))
    return (b_w @ cup_g).T


def _snap(arr: np.ndarray) -> np.ndarray:
    """Round solver noise away; every model entry is a small integer."""
    out = np.round(arr.real, 12) + 1j * np.round(arr.imag, 12)
    return out + 0.0


def valuation() -> Valuation:
    sig = signature()
    eta_g = _snap(solve_unit(GHZ_MUL))
    eta_w = _snap(solve_unit(W_MUL))
    eps_g = solve_ghz_counit(GHZ_MUL)
    eps_w = solve_w_counit(W_MUL, GHZ_MUL, eps_g)
    comul_g = _snap(comul_from_form(GHZ_MUL, eps_g))
    comul_w = _snap(comul_from_form(W_MUL, eps_w))
    dual = _snap(dualiser_matrix(W_MUL, eps_w, GHZ_MUL, eps_g))
    zero = np.zeros(2, dtype=np.complex128)

    q2 = (2,)
    q22 = (2, 2)
    tensors = {
        "ghz_mul": Tensor.from_matrix(GHZ_MUL, q22, q2),
        "ghz_unit": Tensor.from_matrix(eta_g.reshape(2, 1), (), q2),
        "ghz_comul": Tensor.from_matrix(comul_g, q2, q22),
        "ghz_counit": Tensor.from_matrix(eps_g.reshape(1, 2), q2, ()),
        "w_mul": Tensor.from_matrix(W_MUL, q22, q2),
        "w_unit": Tensor.from_matrix(eta_w.reshape(2, 1), (), q2),
        "w_comul": Tensor.from_matrix(comul_w, q2, q22),
        "w_counit": Tensor.from_matrix(eps_w.reshape(1, 2), q2, ()),
        "dualiser": Tensor.from_matrix(dual, q2, q2),
        "zero": Tensor.from_matrix(zero.reshape(2, 1), (), q2),
    }
    return Valuation(sig=sig, tensors=tensors)


def check_model(val: Valuation, tol: float = 1e-12) -> list[str]:
    """Verify the algebra axioms numerically; returns the checked names."""
    i2 = np.eye(2)
    swap = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            swap[2 * b + a, 2 * a + b] = 1.0
    checked = []

    def mat(name):
        return val[name].as_matrix()

    def ok(name, lhs, rhs):
        if not np.allclose(lhs, rhs, atol=tol, rtol=0.0):
            raise AssertionError(f"axiom failed: {name}\n{lhs}\n!=\n{rhs}")
        checked.append(name)

    for fam in ("ghz", "w"):
        mul = mat(f"{fam}_mul")
        unit = mat(f"{fam}_unit")
        comul = mat(f"{fam}_comul")
        counit = mat(f"{fam}_counit")
        ok(f"{fam} unit", mul @ np.kron(unit, i2), i2)
        ok(f"{fam} unit (right)", mul @ np.kron(i2, unit), i2)
        ok(f"{fam} associativity", mul @ np.kron(mul, i2), mul @ np.kron(i2, mul))
        ok(f"{fam} commutativity", mul @ swap, mul)
        ok(f"{fam} counit", np.kron(counit, i2) @ comul, i2)
        ok(f"{fam} counit (right)", np.kron(i2, counit) @ comul, i2)
        ok(f"{fam} coassociativity",
           np.kron(comul, i2) @ comul, np.kron(i2, comul) @ comul)
        ok(f"{fam} cocommutativity", swap @ comul, comul)
        ok(f"{fam} frobenius",
           np.kron(i2, mul) @ np.kron(comul, i2), comul @ mul)
        ok(f"{fam} frobenius (mirror)",
           np.kron(mul, i2) @ np.kron(i2, comul), comul @ mul)
        cup = comul @ unit
        cap = counit @ mul
        ok(f"{fam} snake", np.kron(cap, i2) @ np.kron(i2, cup), i2)
    ok("ghz special", mat("ghz_mul") @ mat("ghz_comul"), i2)
    dual = mat("dualiser")
    ok("dualiser involution", dual @ dual, i2)
    cap_w = mat("w_counit") @ mat("w_mul")
    cup_g = mat("ghz_comul") @ mat("ghz_unit")
    ok("dualiser from caps", dual, np.kron(cap_w, i2) @ np.kron(i2, cup_g))
    ok("zero", mat("zero"), np.zeros((2, 1)))
    return checked
