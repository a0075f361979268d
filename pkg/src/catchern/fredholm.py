"""p-summable Fredholm modules over a finite algebra, valued in Hilb(X).

The module is a graded object ``H = H+ (+) H-``, an even representation
``rho`` of the algebra given on its basis, and an odd symmetry ``F`` with
``F o F = id``. ``F`` is built from its off-diagonal blocks
``Q : H- -> H+`` (key ``pm``) and ``P : H+ -> H-`` (key ``mp``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import FiniteAlgebra
from .category import sup_operator_norm, sup_schatten_norm
from .errors import DomainError, InputValidationError, StructuralError
from .graded import EVEN, ODD, GradedHilbObject, GradedOperator

__all__ = [
    "FredholmModule",
    "FredholmReport",
    "validate_fredholm",
    "apply_rho",
    "commutator",
]


@dataclass(frozen=True, eq=False)
class FredholmModule:
    space: GradedHilbObject
    algebra: FiniteAlgebra
    rho: tuple[GradedOperator, ...]
    f_op: GradedOperator
    p: float = 1.0

    def __post_init__(self):
        rho = tuple(self.rho)
        if len(rho) != self.algebra.dim:
            raise StructuralError(f"need one rho operator per basis element ({self.algebra.dim}), got {len(rho)}")
        for label, r in zip(self.algebra.basis, rho):
            if r.space != self.space:
                raise StructuralError(f"rho({label}) acts on a different graded object")
            if r.parity != EVEN:
                raise StructuralError(f"rho({label}) must be even, got {r.parity}")
        if self.f_op.space != self.space:
            raise StructuralError("F acts on a different graded object")
        if self.f_op.parity != ODD:
            raise StructuralError(f"F must be odd, got {self.f_op.parity}")
        if not float(self.p) >= 1:
            raise DomainError(f"summability exponent must be >= 1, got {self.p}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "p", float(self.p))

    @classmethod
    def from_blocks(
        cls,
        space: GradedHilbObject,
        algebra: FiniteAlgebra,
        rho_blocks: Mapping[str, Mapping[str, Mapping[str, object]]],
        f_blocks: Mapping[str, Mapping[str, object]],
        p: float = 1.0,
    ) -> "FredholmModule":
        """``rho_blocks[basis_label][simple] = {"pp": .., "mm": ..}``, ``f_blocks[simple] = {"pm": Q, "mp": P}``."""
        unknown = set(rho_blocks) - set(algebra.basis)
        if unknown:
            raise InputValidationError(f"rho given for unknown basis labels {sorted(unknown)}")
        rho = tuple(
            GradedOperator.from_blocks(space, rho_blocks.get(label, {}), parity=EVEN) for label in algebra.basis
        )
        f_op = GradedOperator.from_blocks(space, f_blocks, parity=ODD)
        return cls(space, algebra, rho, f_op, p)

    @property
    def ctx(self):
        return self.space.ctx

    @property
    def grading(self) -> GradedOperator:
        return GradedOperator.grading_operator(self.space)

    def with_f(self, f_op: GradedOperator) -> "FredholmModule":
        return FredholmModule(self.space, self.algebra, self.rho, f_op, self.p)

    def with_rho(self, rho: Sequence[GradedOperator]) -> "FredholmModule":
        return FredholmModule(self.space, self.algebra, tuple(rho), self.f_op, self.p)


def commutator(a: GradedOperator, b: GradedOperator) -> GradedOperator:
    """Plain commutator ``ab - ba``."""
    return a @ b - b @ a


def apply_rho(FM: FredholmModule, x, *, unital: bool = False) -> GradedOperator:
    """``rho(x)`` for ``x`` in A, or in the unitalization when ``unital`` is set.

    Unitalized elements carry one extra trailing coordinate ``l`` and map to
    ``rho(a) + l * id``.
    """
    n = FM.algebra.dim
    x = np.asarray(x, dtype=complex)
    expected = n + 1 if unital else n
    if x.shape != (expected,):
        raise InputValidationError(f"element needs {expected} coordinates, got shape {x.shape}")
    M = np.zeros((FM.space.size, FM.space.size), dtype=complex)
    for coeff, r in zip(x[:n], FM.rho):
        if coeff != 0:
            M += coeff * r.matrix
    if unital and x[n] != 0:
        M += x[n] * np.eye(FM.space.size)
    return GradedOperator(FM.space, M, EVEN, check=False)


@dataclass
class FredholmReport:
    f_squared: float
    anticommutation: float
    homomorphism: float
    commutator_norms: dict[str, float]
    p: float
    tolerance: float
    details: dict[str, float] = field(default_factory=dict)

    @property
    def residuals(self) -> dict[str, float]:
        return {
            "f_squared": self.f_squared,
            "anticommutation": self.anticommutation,
            "homomorphism": self.homomorphism,
        }

    @property
    def ok(self) -> bool:
        return all(v <= self.tolerance for v in self.residuals.values())

    def as_dict(self) -> dict:
        out = dict(self.residuals)
        for label, v in self.commutator_norms.items():
            out[f"commutator_schatten[{label}]"] = v
        return out


def validate_fredholm(FM: FredholmModule, tol: float = 1e-9) -> FredholmReport:
    """Residuals of the Fredholm-module axioms.

    Reports ``||F^2 - id||``, ``||F eps + eps F||``, the homomorphism
    residual ``max_ij ||rho(e_i) rho(e_j) - sum_k c_ijk rho(e_k)||`` (all
    sup-operator norms over simples) and, for diagnostics, the Schatten
    ``p``-norm of each commutator ``[F, rho(e_i)]``.
    """
    space = FM.space
    ident = GradedOperator.identity(space)
    eps = FM.grading
    F = FM.f_op
    f_sq = sup_operator_norm((F @ F - ident).to_morphism())
    anti = sup_operator_norm((F @ eps + eps @ F).to_morphism())

    c = FM.algebra.structure_constants
    hom = 0.0
    n = FM.algebra.dim
    for i in range(n):
        for j in range(n):
            lhs = FM.rho[i] @ FM.rho[j]
            rhs = apply_rho(FM, c[i, j])
            hom = max(hom, sup_operator_norm((lhs - rhs).to_morphism()))

    comms = {
        label: sup_schatten_norm(commutator(F, r).to_morphism(), FM.p)
        for label, r in zip(FM.algebra.basis, FM.rho)
    }
    return FredholmReport(f_sq, anti, hom, comms, FM.p, tol)
