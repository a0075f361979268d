"""Objects and morphisms of Hilb(X) stored by their values on simple objects.

A semisimple category with finitely many simples is represented by a
:class:`CategoryContext`. An object of Hilb(X) is a dimension per simple,
and a morphism is a matrix per simple. Naturality is structural.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import CompositionError, InputValidationError
from .linalg import as_matrix, operator_norm, schatten_norm

__all__ = [
    "CategoryContext",
    "HilbObject",
    "CatMorphism",
    "compose",
    "adjoint",
    "sup_operator_norm",
    "sup_schatten_norm",
]


@dataclass(frozen=True)
class CategoryContext:
    """Finite list of simple labels with optional quantum dimensions (metadata only)."""

    simples: tuple[str, ...]
    quantum_dims: tuple[float, ...] | None = None

    def __post_init__(self):
        simples = tuple(str(s) for s in self.simples)
        object.__setattr__(self, "simples", simples)
        if not simples:
            raise InputValidationError("a category context needs at least one simple")
        if len(set(simples)) != len(simples):
            raise InputValidationError(f"duplicate simple labels in {simples}")
        if self.quantum_dims is not None:
            qd = tuple(float(d) for d in self.quantum_dims)
            if len(qd) != len(simples):
                raise InputValidationError("quantum_dims must align with simples")
            if not all(np.isfinite(d) and d > 0 for d in qd):
                raise InputValidationError("quantum dimensions must be positive")
            object.__setattr__(self, "quantum_dims", qd)

    def __len__(self):
        return len(self.simples)

    def index(self, label: str) -> int:
        try:
            return self.simples.index(label)
        except ValueError:
            raise InputValidationError(f"unknown simple label {label!r}") from None


@dataclass(frozen=True)
class HilbObject:
    ctx: CategoryContext
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != len(self.ctx):
            raise InputValidationError(
                f"need one dimension per simple ({len(self.ctx)}), got {len(dims)}"
            )
        if any(d < 0 for d in dims):
            raise InputValidationError("fiber dimensions must be nonnegative")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_mapping(cls, ctx: CategoryContext, dims: Mapping[str, int]) -> "HilbObject":
        return cls(ctx, tuple(int(dims.get(s, 0)) for s in ctx.simples))

    def dim(self, label: str) -> int:
        return self.dims[self.ctx.index(label)]


@dataclass(frozen=True, eq=False)
class CatMorphism:
    """A family of matrices ``blocks[c] : source(c) -> target(c)``, one per simple."""

    source: HilbObject
    target: HilbObject
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.source.ctx != self.target.ctx:
            raise CompositionError("source and target live over different categories")
        if len(self.blocks) != len(self.source.ctx):
            raise InputValidationError("need exactly one block per simple")
        blocks = []
        for label, b, m, n in zip(
            self.source.ctx.simples, self.blocks, self.target.dims, self.source.dims
        ):
            b = np.asarray(b, dtype=complex)
            if b.size == 0:
                b = b.reshape(m, n)
            b = as_matrix(b)
            if b.shape != (m, n):
                raise InputValidationError(
                    f"block at simple {label!r} has shape {b.shape}, expected {(m, n)}"
                )
            blocks.append(b)
        object.__setattr__(self, "blocks", tuple(blocks))

    @property
    def ctx(self) -> CategoryContext:
        return self.source.ctx

    @classmethod
    def from_mapping(
        cls, source: HilbObject, target: HilbObject, blocks: Mapping[str, Sequence]
    ) -> "CatMorphism":
        ctx = source.ctx
        out = []
        for label, m, n in zip(ctx.simples, target.dims, source.dims):
            out.append(blocks[label] if label in blocks else np.zeros((m, n)))
        return cls(source, target, tuple(out))

    @classmethod
    def identity(cls, obj: HilbObject) -> "CatMorphism":
        return cls(obj, obj, tuple(np.eye(d) for d in obj.dims))

    @classmethod
    def zero(cls, source: HilbObject, target: HilbObject) -> "CatMorphism":
        return cls(source, target, tuple(np.zeros((m, n)) for m, n in zip(target.dims, source.dims)))

    def block(self, label: str) -> np.ndarray:
        return self.blocks[self.ctx.index(label)]

    def _check_parallel(self, other: "CatMorphism"):
        if self.source != other.source or self.target != other.target:
            raise CompositionError("morphisms are not parallel")

    def __add__(self, other: "CatMorphism") -> "CatMorphism":
        self._check_parallel(other)
        return CatMorphism(self.source, self.target, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "CatMorphism") -> "CatMorphism":
        self._check_parallel(other)
        return CatMorphism(self.source, self.target, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __mul__(self, scalar) -> "CatMorphism":
        return CatMorphism(self.source, self.target, tuple(scalar * b for b in self.blocks))

    __rmul__ = __mul__

    def __matmul__(self, other: "CatMorphism") -> "CatMorphism":
        return compose(self, other)

    def allclose(self, other: "CatMorphism", atol: float = 1e-12) -> bool:
        self._check_parallel(other)
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(self.blocks, other.blocks))


def compose(g: CatMorphism, f: CatMorphism) -> CatMorphism:
    """Componentwise composite ``g o f``."""
    if f.ctx != g.ctx:
        raise CompositionError("cannot compose morphisms over different categories")
    if f.target != g.source:
        raise CompositionError(
            f"target of f {f.target.dims} does not match source of g {g.source.dims}"
        )
    return CatMorphism(f.source, g.target, tuple(gb @ fb for gb, fb in zip(g.blocks, f.blocks)))


def adjoint(f: CatMorphism) -> CatMorphism:
    """Componentwise conjugate transpose."""
    return CatMorphism(f.target, f.source, tuple(b.conj().T for b in f.blocks))


def sup_operator_norm(f: CatMorphism) -> float:
    """``max_c ||f_c||``; zero-dimensional fibers contribute 0."""
    return max((operator_norm(b) for b in f.blocks), default=0.0)


def sup_schatten_norm(f: CatMorphism, p: float) -> float:
    """``max_c ||f_c||_p`` over the simple objects."""
    return max((schatten_norm(b, p) for b in f.blocks), default=0.0)
