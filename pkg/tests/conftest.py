import random

import numpy as np
import pytest

from sgsynth import ghzw
from sgsynth.graph import set_debug_validation
from sgsynth.signature import (
    MorphismType,
    ObjectType,
    Signature,
    Valuation,
    generator_graph,
    identity_generator,
)
from sgsynth.tensor import Tensor

set_debug_validation(True)


@pytest.fixture(scope="session")
def ghzw_val() -> Valuation:
    return ghzw.valuation()


@pytest.fixture(scope="session")
def ghzw_sig(ghzw_val) -> Signature:
    return ghzw_val.sig


@pytest.fixture(scope="session")
def toy_val() -> Valuation:
    """Small generic signature with seeded complex tensors, for property
    tests that should not depend on GHZ/W structure."""
    sig = Signature(
        objects=(ObjectType("a", 2),),
        morphisms=(
            MorphismType("f", ("a",), ("a",)),
            MorphismType("m", ("a", "a"), ("a",)),
            MorphismType("u", (), ("a",)),
            MorphismType("e", ("a",), ()),
            MorphismType("c", ("a",), ("a", "a")),
        ))
    rng = np.random.default_rng(20240817)

    def t(dom, cod):
        shape = tuple(2 for _ in cod) + tuple(2 for _ in dom)
        arr = rng.integers(-2, 3, size=shape) + 1j * rng.integers(-2, 3, size=shape)
        return Tensor(tuple(2 for _ in dom), tuple(2 for _ in cod),
                      arr.astype(np.complex128))

    tensors = {m.name: t(m.dom, m.cod) for m in sig.morphisms}
    return Valuation(sig=sig, tensors=tensors)


@pytest.fixture(scope="session")
def toy_sig(toy_val) -> Signature:
    return toy_val.sig
