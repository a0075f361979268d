from __future__ import annotations

import math

import numpy as np
import pytest

from catchern.cochains import cohomologous, lambda_op
from catchern.errors import DomainError
from catchern.fredholm import FredholmModule
from catchern.graded import GradedOperator
from catchern.omega import chern_character
from catchern.periodicity import periodicity_witness, s_operator, witness_constant, witness_phi
from catchern.samplers import proj_module, random_fredholm_module


def _phi_j_brute(FM, n, idx, j):
    # Trace(eps F rho(a_j) d rho(a_{j+1}) ... d rho(a_{n+1}) d rho(a_0) ... d rho(a_{j-1}))
    F = FM.f_op.matrix
    eps = np.diag(FM.space.grading)
    R = [r.matrix for r in FM.rho]
    D = [1j * (F @ r - r @ F) for r in R]
    order = list(idx[j:]) + list(idx[:j])
    W = R[order[0]]
    for a in order[1:]:
        W = W @ D[a]
    return np.trace(eps @ F @ W)


def test_proj_phi_components_cancel():
    FM = proj_module()
    assert _phi_j_brute(FM, 0, (0, 0), 0) == pytest.approx(1j)
    assert _phi_j_brute(FM, 0, (0, 0), 1) == pytest.approx(1j)
    w = periodicity_witness(FM, 0)
    assert np.allclose(w.phi.tensor, 0) and w.residual == 0
    assert s_operator(FM, 0).tensor[0, 0, 0] == pytest.approx(2j * math.pi)


def test_witness_constant():
    assert witness_constant(0) == pytest.approx(-math.pi)
    assert witness_constant(2) == pytest.approx(2 * (1j) ** 3 * math.pi**2)
    assert witness_constant(4) == pytest.approx(4 * math.pi**3 * 2)


def test_odd_degree_rejected():
    FM = proj_module()
    for fn in (s_operator, witness_phi, periodicity_witness):
        with pytest.raises(DomainError):
            fn(FM, 1)


def test_zero_representation():
    FM = proj_module()
    zero = FM.with_rho([GradedOperator.zero(FM.space)])
    assert np.allclose(s_operator(zero, 0).tensor, 0)
    assert np.allclose(s_operator(zero, 2).tensor, 0)


@pytest.mark.parametrize("n", [0, 2])
def test_random_witness(rng, n):
    for _ in range(10):
        FM = random_fredholm_module(rng, max_algebra_dim=2)
        w = periodicity_witness(FM, n)
        assert w.residual < 1e-9 * w.scale
        assert (w.phi - lambda_op(w.phi)).sup_norm() < 1e-12 * max(1, w.phi.sup_norm())
        assert cohomologous(w.s_tau, w.tau_next)
        assert np.allclose(w.tau_next.tensor, chern_character(FM, n + 2).tensor)


def test_phi_matches_brute_force(rng):
    FM = random_fredholm_module(rng, max_algebra_dim=2)
    n = 2
    phi = witness_phi(FM, n).tensor
    d = FM.algebra.dim
    for idx in np.ndindex(*(d,) * (n + 2)):
        want = sum((-1) ** j * _phi_j_brute(FM, n, idx, j) for j in range(n + 2))
        assert abs(phi[idx] - want) < 1e-12 * max(1, abs(want))
