r"""Cyclic cochains over a finite algebra and the operators acting on them.

A degree-``k`` cochain is a dense tensor of shape ``(dim A,) * (k + 1)``:
entry ``[i0, ..., ik]`` is the value on ``e_i0 (x) ... (x) e_ik``.
Optionally a cochain also carries its values on the unitalization, a
tensor of shape ``(dim A + 1,) * (k + 1)`` whose last index is the adjoined
unit; the plain tensor is then the restriction of it.

Conventions::

    (lambda psi)(x0, ..., xk) = (-1)^k psi(x1, ..., xk, x0)
    (b psi)(x0, ..., x_{k+1}) = sum_i (-1)^i psi(..., x_i x_{i+1}, ...)
                                + (-1)^(k+1) psi(x_{k+1} x0, x1, ..., xk)
    (B0 psi)(a0, ..., a_{k-1}) = psi(1, a0, ..., a_{k-1}) - psi(a0, ..., a_{k-1}, 1)
    B = (1 + lambda + ... + lambda^(k-1)) B0
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import FiniteAlgebra, unitalize
from .errors import DomainError, InputValidationError, PreconditionError, UnsupportedOperandError

__all__ = [
    "CyclicCochain",
    "CocycleReport",
    "CohomologyDecision",
    "lambda_op",
    "cyclic_symmetrize",
    "hochschild_b",
    "b0_op",
    "big_b_op",
    "is_cyclic_cocycle",
    "cohomologous",
    "residual_scale",
]


class CyclicCochain:
    """Multilinear functional on ``A^(k+1)`` stored as a dense tensor."""

    __slots__ = ("algebra", "degree", "tensor", "unital_tensor")

    def __init__(self, algebra: FiniteAlgebra, degree: int, tensor, unital_tensor=None):
        if degree < 0:
            raise DomainError("cochain degree must be nonnegative")
        d = algebra.dim
        T = np.asarray(tensor, dtype=complex)
        if T.shape != (d,) * (degree + 1):
            raise InputValidationError(f"degree-{degree} cochain needs shape {(d,) * (degree + 1)}, got {T.shape}")
        if not np.all(np.isfinite(T)):
            raise InputValidationError("cochain entries must be finite")
        if unital_tensor is not None:
            U = np.asarray(unital_tensor, dtype=complex)
            if U.shape != (d + 1,) * (degree + 1):
                raise InputValidationError("unital tensor has the wrong shape")
            unital_tensor = U
        self.algebra = algebra
        self.degree = degree
        self.tensor = T
        self.unital_tensor = unital_tensor

    @classmethod
    def from_unital_tensor(cls, algebra: FiniteAlgebra, U) -> "CyclicCochain":
        U = np.asarray(U, dtype=complex)
        k = U.ndim - 1
        d = algebra.dim
        return cls(algebra, k, U[(slice(0, d),) * (k + 1)].copy(), U)

    @classmethod
    def zero(cls, algebra: FiniteAlgebra, degree: int, unital: bool = False) -> "CyclicCochain":
        d = algebra.dim
        U = np.zeros((d + 1,) * (degree + 1), dtype=complex) if unital else None
        return cls(algebra, degree, np.zeros((d,) * (degree + 1), dtype=complex), U)

    @property
    def has_unit_values(self) -> bool:
        return self.unital_tensor is not None

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.tensor))) if self.tensor.size else 0.0

    def _combine(self, other: "CyclicCochain", op) -> "CyclicCochain":
        if other.algebra is not self.algebra and other.algebra.basis != self.algebra.basis:
            raise InputValidationError("cochains live over different algebras")
        if other.degree != self.degree:
            raise DomainError(f"degree mismatch: {self.degree} vs {other.degree}")
        U = None
        if self.has_unit_values and other.has_unit_values:
            U = op(self.unital_tensor, other.unital_tensor)
        return CyclicCochain(self.algebra, self.degree, op(self.tensor, other.tensor), U)

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, scalar):
        U = None if self.unital_tensor is None else scalar * self.unital_tensor
        return CyclicCochain(self.algebra, self.degree, scalar * self.tensor, U)

    __rmul__ = __mul__

    def __neg__(self):
        return -1 * self

    def __repr__(self):
        return f"CyclicCochain(degree={self.degree}, dim={self.algebra.dim}, sup={self.sup_norm():.3g})"


def _rotate(T: np.ndarray) -> np.ndarray:
    # new[x0, ..., xk] = T[x1, ..., xk, x0]
    k = T.ndim - 1
    return np.transpose(T, [k] + list(range(k)))


def lambda_op(psi: CyclicCochain) -> CyclicCochain:
    """Signed cyclic rotation."""
    sign = -1.0 if psi.degree % 2 else 1.0
    U = None if psi.unital_tensor is None else sign * _rotate(psi.unital_tensor)
    return CyclicCochain(psi.algebra, psi.degree, sign * _rotate(psi.tensor), U)


def cyclic_symmetrize(psi: CyclicCochain) -> CyclicCochain:
    """``(1 + lambda + ... + lambda^k) psi``."""
    out = psi
    cur = psi
    for _ in range(psi.degree):
        cur = lambda_op(cur)
        out = out + cur
    return out


def _b_tensor(T: np.ndarray, c: np.ndarray) -> np.ndarray:
    k = T.ndim - 1
    d = c.shape[0]
    out = np.zeros((d,) * (k + 2), dtype=complex)
    for i in range(k + 1):
        # psi(..., x_i x_{i+1}, ...): contract slot i with the product index
        t = np.tensordot(T, c, axes=([i], [2]))
        out += (-1) ** i * np.moveaxis(t, [k, k + 1], [i, i + 1])
    # psi(x_{k+1} x0, x1, ..., xk); tensordot leaves axes (x1..xk, x_{k+1}, x0)
    t = np.tensordot(T, c, axes=([0], [2]))
    out += (-1) ** (k + 1) * np.moveaxis(t, k + 1, 0)
    return out


def hochschild_b(psi: CyclicCochain) -> CyclicCochain:
    """Hochschild coboundary, products expanded through the structure constants."""
    A = psi.algebra
    T = _b_tensor(psi.tensor, A.structure_constants)
    U = None
    if psi.unital_tensor is not None:
        U = _b_tensor(psi.unital_tensor, unitalize(A).structure_constants)
    return CyclicCochain(A, psi.degree + 1, T, U)


def b0_op(psi: CyclicCochain) -> CyclicCochain:
    """``psi(1, ...) - psi(..., 1)``, lowering the degree by one."""
    if psi.unital_tensor is None:
        raise UnsupportedOperandError("B0 needs the cochain's values on the adjoined unit")
    if psi.degree < 1:
        raise DomainError("B0 is defined on cochains of degree >= 1")
    U = psi.unital_tensor
    u = psi.algebra.dim
    return CyclicCochain.from_unital_tensor(psi.algebra, U[u] - U[..., u])


def big_b_op(psi: CyclicCochain) -> CyclicCochain:
    """Connes' ``B``: the cyclic symmetrization of ``B0 psi``."""
    return cyclic_symmetrize(b0_op(psi))


def residual_scale(*cochains: CyclicCochain) -> float:
    """``max(1, sup-norms)``: the scale residual tolerances are measured against."""
    return max([1.0] + [c.sup_norm() for c in cochains])


@dataclass
class CocycleReport:
    cyclic_residual: float
    b_residual: float
    scale: float
    tolerance: float

    @property
    def ok(self) -> bool:
        bound = self.tolerance * self.scale
        return self.cyclic_residual <= bound and self.b_residual <= bound

    def as_dict(self) -> dict:
        return {"cyclicity": self.cyclic_residual, "hochschild_b": self.b_residual}


def is_cyclic_cocycle(psi: CyclicCochain, tol: float = 1e-9) -> CocycleReport:
    """Sup-norm residuals of ``(1 - lambda) psi`` and ``b psi``."""
    cyc = (psi - lambda_op(psi)).sup_norm()
    bres = hochschild_b(psi).sup_norm()
    return CocycleReport(cyc, bres, residual_scale(psi), tol)


@dataclass
class CohomologyDecision:
    cohomologous: bool
    residual: float
    scale: float
    witness: CyclicCochain | None

    def __bool__(self):
        return self.cohomologous


def _cyclic_basis(A: FiniteAlgebra, degree: int) -> np.ndarray:
    """Orthonormal basis (columns) of the lambda-invariant degree-``degree`` cochains."""
    d = A.dim
    N = d ** (degree + 1)
    eye = np.eye(N, dtype=complex)
    cols = []
    for j in range(N):
        e = CyclicCochain(A, degree, eye[j].reshape((d,) * (degree + 1)))
        cols.append(cyclic_symmetrize(e).tensor.ravel() / (degree + 1))
    proj = np.array(cols).T
    U, s, _ = np.linalg.svd(proj)
    return U[:, s > 0.5]


def cohomologous(psi1: CyclicCochain, psi2: CyclicCochain, tol: float = 1e-9) -> CohomologyDecision:
    """Decide whether ``psi1 - psi2`` is ``b`` of a cyclic cochain of one degree lower.

    Least squares over the lambda-invariant subspace; the decision compares
    the sup-norm residual with ``tol * max(1, |psi1|, |psi2|)``.
    """
    if psi1.degree != psi2.degree:
        raise DomainError(f"degree mismatch: {psi1.degree} vs {psi2.degree}")
    residuals = {}
    for name, psi in (("lhs", psi1), ("rhs", psi2)):
        rep = is_cyclic_cocycle(psi, tol)
        if not rep.ok:
            residuals.update({f"{name}.{k}": v for k, v in rep.as_dict().items()})
    if residuals:
        raise PreconditionError("inputs must be cyclic cocycles", residuals)

    A = psi1.algebra
    k = psi1.degree
    scale = residual_scale(psi1, psi2)
    diff = (psi1 - psi2).tensor.ravel()
    if k == 0:
        res = float(np.max(np.abs(diff)))
        return CohomologyDecision(res <= tol * scale, res, scale, None)

    basis = _cyclic_basis(A, k - 1)
    d = A.dim
    if basis.shape[1] == 0:
        res = float(np.max(np.abs(diff)))
        witness = CyclicCochain.zero(A, k - 1)
        return CohomologyDecision(res <= tol * scale, res, scale, witness if res <= tol * scale else None)
    images = np.array(
        [hochschild_b(CyclicCochain(A, k - 1, col.reshape((d,) * k))).tensor.ravel() for col in basis.T]
    ).T
    coef, *_ = np.linalg.lstsq(images, diff, rcond=None)
    res = float(np.max(np.abs(images @ coef - diff)))
    ok = res <= tol * scale
    witness = CyclicCochain(A, k - 1, (basis @ coef).reshape((d,) * k)) if ok else None
    return CohomologyDecision(ok, res, scale, witness)
