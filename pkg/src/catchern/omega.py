r"""The differential graded algebra generated by a Fredholm module.

The differential is the graded commutator with ``F`` times ``i``,

.. math::
    d\theta = i\,(F\theta - (-1)^{\deg\theta}\,\theta F),

the supertrace is :math:`\mathrm{Tr}_s(\theta) = \tfrac12\,\mathrm{Trace}(\varepsilon F [F, \theta])`,
and the character of degree :math:`n = 2m` is

.. math::
    \tau^n(a_0, \dots, a_n) = (2 i \pi)^m\, m!\; \mathrm{Tr}_s\big(\rho(a_0)\, d\rho(a_1) \cdots d\rho(a_n)\big).

Word tensors are evaluated in batch: a list of operator stacks
``(k_j, N, N)`` yields every product at once as an array of shape
``(k_0, k_1, ..., N, N)``.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .category import CatMorphism
from .errors import DomainError, InputValidationError, StructuralError
from .fredholm import FredholmModule, apply_rho
from .graded import EVEN, MIXED, ODD, GradedOperator

__all__ = [
    "OmegaElement",
    "d_op",
    "omega_word",
    "total_trace",
    "supertrace",
    "cycle_integral",
    "cycle_constant",
    "chern_character",
    "rho_stack",
    "d_stack",
    "word_tensor",
    "supertrace_tensor",
]


@dataclass(frozen=True)
class OmegaElement:
    op: GradedOperator
    degree: int

    def __post_init__(self):
        if self.degree < 0:
            raise DomainError("Omega degree must be nonnegative")
        want = EVEN if self.degree % 2 == 0 else ODD
        if self.op.parity != want:
            raise StructuralError(f"degree {self.degree} element must be {want}, got {self.op.parity}")


def d_op(FM: FredholmModule, theta: GradedOperator) -> GradedOperator:
    """``i [F, theta]`` with the graded commutator, applied part by part for mixed operators."""
    F = FM.f_op
    out = None
    for deg, part in theta.homogeneous_parts():
        sign = -1.0 if deg % 2 else 1.0
        M = 1j * (F.matrix @ part.matrix - sign * (part.matrix @ F.matrix))
        term = GradedOperator(FM.space, M, ODD if deg == 0 else EVEN, check=False)
        out = term if out is None else out + term
    if theta.parity == MIXED:
        out = GradedOperator(FM.space, out.matrix, MIXED, check=False)
    return out


def _rho_any(FM: FredholmModule, x) -> GradedOperator:
    """rho on an element of A (``dim`` coordinates) or of its unitalization (``dim + 1``)."""
    x = np.asarray(x, dtype=complex)
    n = FM.algebra.dim
    if x.shape == (n,):
        return apply_rho(FM, x)
    if x.shape == (n + 1,):
        return apply_rho(FM, x, unital=True)
    raise InputValidationError(f"element needs {n} or {n + 1} coordinates, got shape {x.shape}")


def omega_word(FM: FredholmModule, a0, *rest) -> OmegaElement:
    """``rho(a0) d rho(a1) ... d rho(aj)`` as a degree-``j`` element."""
    w = _rho_any(FM, a0)
    for a in rest:
        w = w @ d_op(FM, _rho_any(FM, a))
    return OmegaElement(w, len(rest))


def total_trace(theta) -> complex:
    """Sum over simples of the matrix trace of the per-simple blocks."""
    if isinstance(theta, GradedOperator):
        return complex(np.trace(theta.matrix))
    if isinstance(theta, CatMorphism):
        if theta.source != theta.target:
            raise StructuralError("Trace needs an endomorphism")
        return complex(sum(np.trace(b) for b in theta.blocks))
    raise TypeError(f"cannot take Trace of {type(theta).__name__}")


def _supertrace_kernel(FM: FredholmModule, deg: int) -> np.ndarray:
    """Matrix K with ``Tr_s(theta) = Trace(K theta)`` for homogeneous theta of degree ``deg``.

    From ``1/2 Trace(eps F (F theta - s theta F))`` and cyclicity of Trace:
    ``K = 1/2 (eps F F - s F eps F)``.
    """
    F = FM.f_op.matrix
    eps = np.diag(FM.space.grading)
    s = -1.0 if deg % 2 else 1.0
    return 0.5 * (eps @ F @ F - s * (F @ eps @ F))


def supertrace(FM: FredholmModule, theta: GradedOperator) -> complex:
    """``1/2 Trace(eps F [F, theta])``; mixed operators are split into homogeneous parts."""
    if theta.space != FM.space:
        raise StructuralError("operator acts on a different graded object")
    eps = FM.grading
    F = FM.f_op
    total = 0j
    for deg, part in theta.homogeneous_parts():
        sign = -1.0 if deg % 2 else 1.0
        comm = F @ part - sign * (part @ F)
        total += 0.5 * total_trace(eps @ F @ comm)
    return total


def cycle_constant(m: int) -> complex:
    """``(2 i pi)^m m!``."""
    return (2j * math.pi) ** m * math.factorial(m)


def cycle_integral(FM: FredholmModule, omega: OmegaElement, m: int) -> complex:
    if m < 0:
        raise DomainError("m must be nonnegative")
    if omega.degree != 2 * m:
        raise DomainError(f"cycle of dimension {2 * m} integrates degree {2 * m} elements, got degree {omega.degree}")
    return cycle_constant(m) * supertrace(FM, omega.op)


# -- batched word tensors -------------------------------------------------------


def rho_stack(FM: FredholmModule, unital: bool = True) -> np.ndarray:
    """``rho`` on the basis of A, followed by the identity for the adjoined unit."""
    mats = [r.matrix for r in FM.rho]
    if unital:
        mats.append(np.eye(FM.space.size, dtype=complex))
    if not mats:
        return np.zeros((0, FM.space.size, FM.space.size), dtype=complex)
    return np.stack(mats)


def d_stack(FM: FredholmModule, unital: bool = True) -> np.ndarray:
    """``d rho`` on the same basis as :func:`rho_stack`; the unit maps to 0."""
    R = rho_stack(FM, unital)
    F = FM.f_op.matrix
    return 1j * (F @ R - R @ F)


def word_tensor(factors: Sequence[np.ndarray]) -> np.ndarray:
    """All products ``f0[i0] @ f1[i1] @ ...`` as an array ``(k0, k1, ..., N, N)``."""
    W = factors[0]
    for f in factors[1:]:
        W = np.einsum("...ij,bjk->...bik", W, f)
    return W


def supertrace_tensor(FM: FredholmModule, W: np.ndarray, deg: int) -> np.ndarray:
    """Entrywise supertrace of a stack of homogeneous degree-``deg`` words."""
    K = _supertrace_kernel(FM, deg)
    return np.einsum("ij,...ji->...", K, W)


def _map_first_axis(func, first: np.ndarray, parallel: bool) -> np.ndarray:
    """Evaluate ``func`` on each slice of the leading stack and reassemble."""
    if not parallel or len(first) < 2:
        return func(first)
    with ThreadPoolExecutor() as pool:
        parts = list(pool.map(lambda k: func(first[k : k + 1]), range(len(first))))
    return np.concatenate(parts, axis=0)


def chern_character(FM: FredholmModule, n: int, *, parallel: bool = False):
    """The degree-``n`` character as a :class:`~catchern.cochains.CyclicCochain`.

    The returned cochain also carries its values on the unitalized basis
    (adjoined unit acting as the identity), as needed by ``B0``.
    """
    from .cochains import CyclicCochain

    if n < 0 or n % 2:
        raise DomainError(f"character degree must be even and nonnegative, got {n}")
    if n < FM.p - 1:
        warnings.warn(
            f"degree {n} is below p - 1 = {FM.p - 1:g}; the module is only declared {FM.p:g}-summable",
            stacklevel=2,
        )
    m = n // 2
    R = rho_stack(FM)
    D = d_stack(FM)

    def evaluate(first):
        W = word_tensor([first] + [D] * n)
        return supertrace_tensor(FM, W, 0)

    values = cycle_constant(m) * _map_first_axis(evaluate, R, parallel)
    return CyclicCochain.from_unital_tensor(FM.algebra, values)
