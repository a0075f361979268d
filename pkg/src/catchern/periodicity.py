r"""The periodicity operator on characters and its explicit coboundary witness.

For ``n = 2m`` the operator is evaluated directly on the cycle,

.. math::
    S\tau^n(a_0, \dots, a_{n+2}) = (2 i\pi)^{m+1} m! \sum_{j=0}^{n+1}
        \mathrm{Tr}_s\big(\rho(a_0)\, d\rho(a_1) \cdots d\rho(a_{j-1})\;
        \rho(a_j)\rho(a_{j+1})\; d\rho(a_{j+2}) \cdots d\rho(a_{n+2})\big),

where the ``j = 0`` word is ``rho(a0) rho(a1) d rho(a2) ... d rho(a_{n+2})``.
That word has odd degree, so its supertrace vanishes.

The witness is ``phi = sum_j (-1)^j phi_j`` with
``phi_j(a0, ..., a_{n+1}) = Trace(eps F rho(a_j) d rho(a_{j+1}) ... d rho(a_{n+1}) d rho(a0) ... d rho(a_{j-1}))``
and satisfies ``b(2^m i^(m+2) pi^(m+1) m! phi) = S tau^n - tau^(n+2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cochains import CyclicCochain, hochschild_b, residual_scale
from .errors import DomainError
from .fredholm import FredholmModule
from .omega import chern_character, cycle_constant, d_stack, rho_stack, supertrace_tensor, word_tensor

__all__ = ["s_operator", "witness_constant", "witness_phi", "periodicity_witness", "PeriodicityWitness"]


def _check_even(n: int):
    if n < 0 or n % 2:
        raise DomainError(f"degree must be even and nonnegative, got {n}")


def s_operator(FM: FredholmModule, n: int) -> CyclicCochain:
    """``S tau^n`` as a degree ``n + 2`` cochain on the basis of A."""
    _check_even(n)
    m = n // 2
    R = rho_stack(FM, unital=False)
    D = d_stack(FM, unital=False)
    total = 0
    for j in range(n + 2):
        if j == 0:
            factors, deg = [R, R] + [D] * (n + 1), n + 1
        else:
            factors, deg = [R] + [D] * (j - 1) + [R, R] + [D] * (n + 1 - j), n
        total = total + supertrace_tensor(FM, word_tensor(factors), deg)
    return CyclicCochain(FM.algebra, n + 2, 2j * math.pi * cycle_constant(m) * total)


def witness_constant(n: int) -> complex:
    """``2^m i^(m+2) pi^(m+1) m!`` for ``n = 2m``."""
    m = n // 2
    return 2**m * 1j ** (m + 2) * math.pi ** (m + 1) * math.factorial(m)


def witness_phi(FM: FredholmModule, n: int) -> CyclicCochain:
    """The alternating sum of the cyclically rotated ``phi_j`` (degree ``n + 1``)."""
    _check_even(n)
    R = rho_stack(FM, unital=False)
    D = d_stack(FM, unital=False)
    eps_f = np.diag(FM.space.grading) @ FM.f_op.matrix
    words = word_tensor([R] + [D] * (n + 1))
    base = np.einsum("ij,...ji->...", eps_f, words)
    phi = np.zeros_like(base)
    rotated = base
    for j in range(n + 2):
        # phi_j[a0, ..., a_{n+1}] = base[a_j, ..., a_{n+1}, a0, ..., a_{j-1}]
        phi = phi + (-1) ** j * rotated
        rotated = np.transpose(rotated, list(range(1, n + 2)) + [0])
    return CyclicCochain(FM.algebra, n + 1, phi)


@dataclass
class PeriodicityWitness:
    degree: int
    phi: CyclicCochain
    s_tau: CyclicCochain
    tau_next: CyclicCochain
    residual: float
    scale: float

    @property
    def scaled_phi(self) -> CyclicCochain:
        return witness_constant(self.degree) * self.phi


def periodicity_witness(FM: FredholmModule, n: int) -> PeriodicityWitness:
    """Build ``phi`` and measure ``|b(c phi) - (S tau^n - tau^(n+2))|_inf``."""
    _check_even(n)
    phi = witness_phi(FM, n)
    s_tau = s_operator(FM, n)
    tau_next = chern_character(FM, n + 2)
    tau_next = CyclicCochain(FM.algebra, n + 2, tau_next.tensor)
    lhs = hochschild_b(witness_constant(n) * phi)
    residual = (lhs - (s_tau - tau_next)).sup_norm()
    return PeriodicityWitness(n, phi, s_tau, tau_next, residual, residual_scale(s_tau, tau_next))
