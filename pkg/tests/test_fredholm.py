from __future__ import annotations

import numpy as np
import pytest

from catchern.category import CategoryContext
from catchern.errors import DomainError, StructuralError
from catchern.fredholm import FredholmModule, apply_rho, commutator, validate_fredholm
from catchern.graded import EVEN, MIXED, ODD, GradedHilbObject, GradedOperator
from catchern.samplers import proj_module, random_fredholm_module, random_graded_operator


def test_proj_is_valid_and_commutator_norm():
    FM = proj_module(p=3)
    rep = validate_fredholm(FM)
    assert rep.ok and max(rep.residuals.values()) == 0
    # [F, rho(e)] = [[0, -1], [1, 0]] has singular values (1, 1)
    assert rep.commutator_norms["e"] == pytest.approx(2 ** (1 / 3))
    assert np.allclose(commutator(FM.f_op, FM.rho[0]).matrix, [[0, -1], [1, 0]])


def test_scaled_f_residual():
    FM = proj_module()
    rep = validate_fredholm(FM.with_f(2 * FM.f_op))
    assert rep.f_squared == pytest.approx(3.0) and not rep.ok


def test_non_idempotent_rho_residual():
    FM = proj_module()
    bad = GradedOperator.from_blocks(FM.space, {"1": {"pp": [[2]], "mm": [[0]]}}, parity=EVEN)
    rep = validate_fredholm(FM.with_rho([bad]))
    assert rep.homomorphism == pytest.approx(2.0) and not rep.ok


def test_apply_rho_examples():
    FM = proj_module()
    assert np.array_equal(apply_rho(FM, [1]).matrix, np.diag([1, 0]))
    assert np.array_equal(apply_rho(FM, [0]).matrix, np.zeros((2, 2)))
    assert np.array_equal(apply_rho(FM, [1, 1], unital=True).matrix, np.diag([2, 1]))


def test_structural_errors():
    FM = proj_module()
    with pytest.raises(StructuralError):
        FM.with_f(FM.rho[0])
    with pytest.raises(StructuralError):
        FM.with_rho([FM.f_op])
    with pytest.raises(DomainError):
        FredholmModule(FM.space, FM.algebra, FM.rho, FM.f_op, p=0.5)


def test_graded_operator_parity_rules(rng):
    ctx = CategoryContext(("a", "b"))
    space = GradedHilbObject.from_dims(ctx, {"a": (2, 1), "b": (1, 2)})
    even = random_graded_operator(rng, space, EVEN)
    odd = random_graded_operator(rng, space, ODD)
    assert (even @ odd).parity == ODD and (odd @ odd).parity == EVEN
    mixed = even + odd
    assert mixed.parity == MIXED
    assert np.allclose(mixed.even_part().matrix, even.matrix)
    assert np.allclose(mixed.odd_part().matrix, odd.matrix)
    with pytest.raises(StructuralError):
        GradedOperator(space, odd.matrix, EVEN)
    eps = GradedOperator.grading_operator(space)
    assert np.allclose((eps @ eps).matrix, np.eye(space.size))
    # for even theta, eps theta = diag(theta_pp, -theta_mm)
    et = eps @ even
    assert np.allclose(et.block("a", "pp"), even.block("a", "pp"))
    assert np.allclose(et.block("b", "mm"), -even.block("b", "mm"))


def test_random_modules_are_homomorphisms(rng):
    for _ in range(30):
        FM = random_fredholm_module(rng)
        assert validate_fredholm(FM).ok
        c = FM.algebra.structure_constants
        x = rng.normal(size=FM.algebra.dim) + 1j * rng.normal(size=FM.algebra.dim)
        y = rng.normal(size=FM.algebra.dim) + 1j * rng.normal(size=FM.algebra.dim)
        xy = np.einsum("i,j,ijk->k", x, y, c)
        lhs = apply_rho(FM, xy).matrix
        rhs = apply_rho(FM, x).matrix @ apply_rho(FM, y).matrix
        assert np.max(np.abs(lhs - rhs)) < 1e-10
        assert commutator(FM.f_op, apply_rho(FM, x)).parity == ODD
