from __future__ import annotations

import numpy as np
import pytest

from catchern.category import (
    CategoryContext,
    CatMorphism,
    HilbObject,
    adjoint,
    compose,
    sup_operator_norm,
    sup_schatten_norm,
)
from catchern.errors import CompositionError, DomainError, InputValidationError
from catchern.samplers import proj_module

from conftest import random_complex

CTX = CategoryContext(("a", "b"), (1.0, 2.0))


def obj(**dims):
    return HilbObject.from_mapping(CTX, dims)


def test_context_validation():
    with pytest.raises(InputValidationError):
        CategoryContext(())
    with pytest.raises(InputValidationError):
        CategoryContext(("a", "a"))
    with pytest.raises(InputValidationError):
        CategoryContext(("a",), (0.0,))
    assert CTX.index("b") == 1


def test_compose_identity_and_zero(rng):
    X, Y = obj(a=2, b=1), obj(a=3, b=0)
    f = CatMorphism.from_mapping(X, Y, {"a": random_complex(rng, 3, 2)})
    assert compose(CatMorphism.identity(Y), f).allclose(f)
    assert compose(f, CatMorphism.zero(X, X)).allclose(CatMorphism.zero(X, Y))


def test_compose_is_matrix_product(rng):
    X = HilbObject.from_mapping(CategoryContext(("s",)), {"s": 2})
    A, B = random_complex(rng, 2, 2), random_complex(rng, 2, 2)
    g = CatMorphism.from_mapping(X, X, {"s": A})
    f = CatMorphism.from_mapping(X, X, {"s": B})
    assert np.allclose(compose(g, f).block("s"), A @ B)


def test_compose_mismatch():
    f = CatMorphism.zero(obj(a=1, b=1), obj(a=2, b=1))
    with pytest.raises(CompositionError):
        compose(f, f)


def test_adjoint_examples(rng):
    X = HilbObject.from_mapping(CategoryContext(("s",)), {"s": 2})
    f = CatMorphism.from_mapping(X, X, {"s": [[0, 1j], [0, 0]]})
    assert np.array_equal(adjoint(f).block("s"), [[0, 0], [-1j, 0]])
    d = CatMorphism.from_mapping(X, X, {"s": np.diag([1.0, -2.0])})
    assert adjoint(d).allclose(d)
    g = CatMorphism.from_mapping(obj(a=2, b=3), obj(a=1, b=2), {"a": random_complex(rng, 1, 2), "b": random_complex(rng, 2, 3)})
    assert adjoint(adjoint(g)).allclose(g)


def test_sup_norm_examples():
    F = proj_module().f_op.to_morphism()
    assert sup_operator_norm(F) == pytest.approx(1.0)
    X = obj(a=1, b=1)
    f = CatMorphism.from_mapping(X, X, {"a": [[1.0]], "b": [[2.0]]})
    assert sup_operator_norm(f) == pytest.approx(2.0)
    assert sup_operator_norm(CatMorphism.zero(X, X)) == 0.0
    Z = obj(a=0, b=0)
    assert sup_operator_norm(CatMorphism.identity(Z)) == 0.0


def test_sup_schatten_examples():
    X = HilbObject.from_mapping(CategoryContext(("s",)), {"s": 2})
    assert sup_schatten_norm(CatMorphism.identity(X), 1) == pytest.approx(2.0)
    Y = obj(a=2, b=1)
    f = CatMorphism.from_mapping(Y, Y, {"a": np.diag([3.0, 4.0]), "b": [[5.0]]})
    assert sup_schatten_norm(f, 1) == pytest.approx(7.0)
    assert sup_schatten_norm(CatMorphism.zero(Y, Y), 3) == 0.0
    with pytest.raises(DomainError):
        sup_schatten_norm(f, 0.9)


def test_sup_operator_norm_is_submultiplicative_norm(rng):
    X = obj(a=3, b=2)
    for _ in range(20):
        f = CatMorphism.from_mapping(X, X, {"a": random_complex(rng, 3, 3), "b": random_complex(rng, 2, 2)})
        g = CatMorphism.from_mapping(X, X, {"a": random_complex(rng, 3, 3), "b": random_complex(rng, 2, 2)})
        assert sup_operator_norm(f + g) <= sup_operator_norm(f) + sup_operator_norm(g) + 1e-12
        assert sup_operator_norm(compose(g, f)) <= sup_operator_norm(g) * sup_operator_norm(f) + 1e-12
        assert sup_operator_norm(2.5 * f) == pytest.approx(2.5 * sup_operator_norm(f))
