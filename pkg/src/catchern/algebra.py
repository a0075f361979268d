"""Finite-dimensional complex associative algebras given by structure constants.

``c[i, j, k]`` is the coefficient of ``e_k`` in ``e_i e_j``. Elements are
plain complex coordinate vectors aligned with ``basis``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputValidationError

__all__ = [
    "FiniteAlgebra",
    "AlgebraReport",
    "multiply",
    "unitalize",
    "validate_algebra",
    "UNIT_LABEL",
]

UNIT_LABEL = "1"
ASSOC_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    basis: tuple[str, ...]
    structure_constants: np.ndarray
    unit: np.ndarray | None = None
    # index of the basis vector adjoined by unitalize(), if any
    adjoined_unit: int | None = field(default=None)

    def __post_init__(self):
        basis = tuple(str(b) for b in self.basis)
        if not basis:
            raise InputValidationError("an algebra needs a nonempty basis")
        if len(set(basis)) != len(basis):
            raise InputValidationError(f"duplicate basis labels in {basis}")
        n = len(basis)
        c = np.array(self.structure_constants, dtype=complex)
        if c.shape != (n, n, n):
            raise InputValidationError(f"structure constants must have shape {(n, n, n)}, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InputValidationError("structure constants must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "structure_constants", c)
        if self.unit is not None:
            u = np.array(self.unit, dtype=complex)
            if u.shape != (n,):
                raise InputValidationError("unit must be a coordinate vector aligned with the basis")
            u.setflags(write=False)
            object.__setattr__(self, "unit", u)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def basis_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[i] = 1.0
        return v

    def element(self, coords) -> np.ndarray:
        x = np.asarray(coords, dtype=complex)
        if x.shape != (self.dim,):
            raise InputValidationError(f"element needs {self.dim} coordinates, got shape {x.shape}")
        return x

    def index(self, label: str) -> int:
        try:
            return self.basis.index(label)
        except ValueError:
            raise InputValidationError(f"unknown basis label {label!r}") from None


def multiply(x, y, A: FiniteAlgebra) -> np.ndarray:
    """Bilinear product of two elements of ``A``."""
    x, y = A.element(x), A.element(y)
    return np.einsum("i,j,ijk->k", x, y, A.structure_constants)


def unitalize(A: FiniteAlgebra) -> FiniteAlgebra:
    """Adjoin a new unit: ``(a, l)(b, m) = (ab + l b + m a, l m)``.

    The new unit is never identified with an existing unit of ``A``.
    """
    n = A.dim
    c = np.zeros((n + 1, n + 1, n + 1), dtype=complex)
    c[:n, :n, :n] = A.structure_constants
    for i in range(n + 1):
        c[n, i, i] = 1.0
        c[i, n, i] = 1.0
    label = UNIT_LABEL
    while label in A.basis:
        label += "'"
    unit = np.zeros(n + 1, dtype=complex)
    unit[n] = 1.0
    return FiniteAlgebra(A.basis + (label,), c, unit=unit, adjoined_unit=n)


@dataclass
class AlgebraReport:
    associativity_residual: float
    unit_residual: float | None
    tolerance: float = ASSOC_TOL

    @property
    def ok(self) -> bool:
        if self.associativity_residual > self.tolerance:
            return False
        return self.unit_residual is None or self.unit_residual <= self.tolerance

    def as_dict(self) -> dict:
        out = {"associativity": self.associativity_residual}
        if self.unit_residual is not None:
            out["unit_law"] = self.unit_residual
        return out


def validate_algebra(A: FiniteAlgebra, tol: float = ASSOC_TOL) -> AlgebraReport:
    """Max associativity residual over all basis triples, plus the unit-law residual."""
    c = A.structure_constants
    # (e_i e_j) e_k and e_i (e_j e_k), both as (i, j, k, out) tensors
    left = np.einsum("ijm,mkl->ijkl", c, c)
    right = np.einsum("jkm,iml->ijkl", c, c)
    assoc = float(np.max(np.abs(left - right)))
    unit_res = None
    if A.unit is not None:
        lu = np.einsum("i,ijk->jk", A.unit, c)
        ru = np.einsum("j,ijk->ik", A.unit, c)
        eye = np.eye(A.dim)
        unit_res = float(max(np.max(np.abs(lu - eye)), np.max(np.abs(ru - eye))))
    return AlgebraReport(assoc, unit_res, tol)

