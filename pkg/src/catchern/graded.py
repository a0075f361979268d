"""Z/2-graded objects of Hilb(X) and operators on them.

A :class:`GradedOperator` is stored as one dense block-diagonal matrix in
the layout ``[H+(c1), H-(c1), H+(c2), H-(c2), ...]``. Products, sums and
traces of block-diagonal matrices never leave that form, so the per-simple
blocks are just slices of the dense matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

import numpy as np

from .category import CatMorphism, CategoryContext, HilbObject
from .errors import StructuralError

__all__ = ["GradedHilbObject", "GradedOperator", "EVEN", "ODD", "MIXED"]

EVEN, ODD, MIXED = "even", "odd", "mixed"
_PARITIES = (EVEN, ODD, MIXED)


@dataclass(frozen=True)
class GradedHilbObject:
    plus: HilbObject
    minus: HilbObject

    def __post_init__(self):
        if self.plus.ctx != self.minus.ctx:
            raise StructuralError("H+ and H- must share a category context")

    @classmethod
    def from_dims(cls, ctx: CategoryContext, dims: Mapping[str, tuple[int, int]]) -> "GradedHilbObject":
        plus = HilbObject(ctx, tuple(int(dims.get(s, (0, 0))[0]) for s in ctx.simples))
        minus = HilbObject(ctx, tuple(int(dims.get(s, (0, 0))[1]) for s in ctx.simples))
        return cls(plus, minus)

    @property
    def ctx(self) -> CategoryContext:
        return self.plus.ctx

    @cached_property
    def total(self) -> HilbObject:
        return HilbObject(self.ctx, tuple(p + m for p, m in zip(self.plus.dims, self.minus.dims)))

    @cached_property
    def size(self) -> int:
        return sum(self.total.dims)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        return tuple(np.concatenate([[0], np.cumsum(self.total.dims)]).astype(int))

    def simple_slice(self, i: int) -> slice:
        return slice(self.offsets[i], self.offsets[i + 1])

    @cached_property
    def grading(self) -> np.ndarray:
        """Diagonal of the grading operator epsilon (+1 on H+, -1 on H-)."""
        parts = []
        for p, m in zip(self.plus.dims, self.minus.dims):
            parts += [np.ones(p), -np.ones(m)]
        return np.concatenate(parts) if parts else np.zeros(0)

    @cached_property
    def block_mask(self) -> np.ndarray:
        """True on entries inside some per-simple diagonal block."""
        mask = np.zeros((self.size, self.size), dtype=bool)
        for i in range(len(self.ctx)):
            s = self.simple_slice(i)
            mask[s, s] = True
        return mask

    @cached_property
    def even_mask(self) -> np.ndarray:
        g = self.grading
        return self.block_mask & (np.outer(g, g) > 0)

    @cached_property
    def odd_mask(self) -> np.ndarray:
        return self.block_mask & ~self.even_mask


def _product_parity(a: str, b: str) -> str:
    if MIXED in (a, b):
        return MIXED
    return EVEN if a == b else ODD


class GradedOperator:
    """Endomorphism of a graded object with declared parity ``even``/``odd``/``mixed``.

    Construction enforces the declared parity: an even operator must have
    vanishing off-diagonal (H+ <-> H-) blocks and an odd one vanishing
    diagonal blocks. Entries outside the per-simple blocks must be zero.
    """

    __slots__ = ("space", "matrix", "parity")

    def __init__(self, space: GradedHilbObject, matrix, parity: str = MIXED, *, check: bool = True):
        if parity not in _PARITIES:
            raise StructuralError(f"unknown parity {parity!r}")
        M = np.asarray(matrix, dtype=complex)
        if check:
            if M.shape != (space.size, space.size):
                raise StructuralError(f"operator has shape {M.shape}, expected {(space.size,) * 2}")
            if np.any(M[~space.block_mask]):
                raise StructuralError("operator mixes different simple objects")
            if parity == EVEN and np.any(M[space.odd_mask]):
                raise StructuralError("even operator has nonzero H+ <-> H- blocks")
            if parity == ODD and np.any(M[space.even_mask]):
                raise StructuralError("odd operator has nonzero diagonal blocks")
        self.space = space
        self.matrix = M
        self.parity = parity

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_blocks(cls, space: GradedHilbObject, blocks: Mapping[str, Mapping[str, object]], parity: str | None = None):
        """Assemble from ``{simple: {"pp"|"mm"|"pm"|"mp": matrix}}``.

        ``pm`` maps H- to H+ and ``mp`` maps H+ to H-. Missing blocks are zero.
        Parity defaults to what the supplied keys imply.
        """
        M = np.zeros((space.size, space.size), dtype=complex)
        keys = set()
        for label, parts in blocks.items():
            i = space.ctx.index(label)
            o = space.offsets[i]
            p, m = space.plus.dims[i], space.minus.dims[i]
            where = {
                "pp": (slice(o, o + p), slice(o, o + p)),
                "mm": (slice(o + p, o + p + m), slice(o + p, o + p + m)),
                "pm": (slice(o, o + p), slice(o + p, o + p + m)),
                "mp": (slice(o + p, o + p + m), slice(o, o + p)),
            }
            for key, val in parts.items():
                if key not in where:
                    raise StructuralError(f"unknown block key {key!r} at simple {label!r}")
                rows, cols = where[key]
                val = np.asarray(val, dtype=complex)
                shape = (rows.stop - rows.start, cols.stop - cols.start)
                if val.size == 0 and 0 in shape:
                    continue
                if val.shape != shape:
                    raise StructuralError(
                        f"block {key!r} at simple {label!r} has shape {val.shape}, expected {shape}"
                    )
                M[rows, cols] = val
                keys.add(key)
        if parity is None:
            has_even = bool(keys & {"pp", "mm"})
            has_odd = bool(keys & {"pm", "mp"})
            parity = MIXED if (has_even and has_odd) else (ODD if has_odd else EVEN)
        return cls(space, M, parity)

    @classmethod
    def identity(cls, space: GradedHilbObject) -> "GradedOperator":
        return cls(space, np.eye(space.size), EVEN, check=False)

    @classmethod
    def zero(cls, space: GradedHilbObject, parity: str = EVEN) -> "GradedOperator":
        return cls(space, np.zeros((space.size, space.size)), parity, check=False)

    @classmethod
    def grading_operator(cls, space: GradedHilbObject) -> "GradedOperator":
        return cls(space, np.diag(space.grading).astype(complex), EVEN, check=False)

    # -- structure ----------------------------------------------------------

    def block(self, label: str, key: str | None = None) -> np.ndarray:
        """Full per-simple block, or one of its ``pp``/``mm``/``pm``/``mp`` parts."""
        i = self.space.ctx.index(label)
        s = self.space.simple_slice(i)
        B = self.matrix[s, s]
        if key is None:
            return B
        p = self.space.plus.dims[i]
        return {"pp": B[:p, :p], "mm": B[p:, p:], "pm": B[:p, p:], "mp": B[p:, :p]}[key]

    def even_part(self) -> "GradedOperator":
        return GradedOperator(self.space, np.where(self.space.even_mask, self.matrix, 0), EVEN, check=False)

    def odd_part(self) -> "GradedOperator":
        return GradedOperator(self.space, np.where(self.space.odd_mask, self.matrix, 0), ODD, check=False)

    def homogeneous_parts(self) -> list[tuple[int, "GradedOperator"]]:
        """``[(degree mod 2, part)]`` with one entry for homogeneous operators."""
        if self.parity == EVEN:
            return [(0, self)]
        if self.parity == ODD:
            return [(1, self)]
        return [(0, self.even_part()), (1, self.odd_part())]

    def to_morphism(self) -> CatMorphism:
        """Per-simple blocks as a :class:`CatMorphism` of the total object."""
        tot = self.space.total
        slices = [self.space.simple_slice(i) for i in range(len(tot.dims))]
        return CatMorphism(tot, tot, tuple(self.matrix[s, s].copy() for s in slices))

    # -- arithmetic ---------------------------------------------------------

    def _check_space(self, other: "GradedOperator"):
        if other.space != self.space:
            raise StructuralError("operators act on different graded objects")

    def __matmul__(self, other: "GradedOperator") -> "GradedOperator":
        self._check_space(other)
        return GradedOperator(self.space, self.matrix @ other.matrix, _product_parity(self.parity, other.parity), check=False)

    def __add__(self, other: "GradedOperator") -> "GradedOperator":
        self._check_space(other)
        parity = self.parity if self.parity == other.parity else MIXED
        return GradedOperator(self.space, self.matrix + other.matrix, parity, check=False)

    def __sub__(self, other: "GradedOperator") -> "GradedOperator":
        return self + (-other)

    def __neg__(self) -> "GradedOperator":
        return GradedOperator(self.space, -self.matrix, self.parity, check=False)

    def __mul__(self, scalar) -> "GradedOperator":
        return GradedOperator(self.space, complex(scalar) * self.matrix, self.parity, check=False)

    __rmul__ = __mul__

    def adjoint(self) -> "GradedOperator":
        return GradedOperator(self.space, self.matrix.conj().T, self.parity, check=False)

    def inverse(self) -> "GradedOperator":
        return GradedOperator(self.space, np.linalg.inv(self.matrix), self.parity, check=False)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.matrix))) if self.matrix.size else 0.0

    def __repr__(self):
        return f"GradedOperator(parity={self.parity!r}, size={self.space.size})"
