r"""Paths of Fredholm modules, the transgression cochain, and homotopy checks.

A path keeps the graded object and the algebra fixed and lets the blocks of
``rho`` (and optionally of ``F``) vary with ``t`` in ``[0, l]``. Blocks are
matrix-valued polynomials, or products and inverses of them, so every
derivative is exact.

With ``F`` fixed and ``delta_t = d/dt rho_t``, the transgression density is

.. math::
    \phi_t(a_0, \dots, a_{p+1}) = \sum_{k=1}^{p+1} (-1)^{k-1}
        \mathrm{Trace}\big(\varepsilon\, \rho_t(a_0)\, d\rho_t(a_1) \cdots
        d\rho_t(a_{k-1})\, \delta_t(a_k)\, d\rho_t(a_{k+1}) \cdots d\rho_t(a_{p+1})\big)

on the unitalization (``delta_t(1) = 0``), and
``phi = (2 i pi)^m m! \int_0^l phi_t dt`` satisfies ``B0 phi = tau_l - tau_0``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import simpson

from .algebra import FiniteAlgebra
from .cochains import (
    CyclicCochain,
    b0_op,
    big_b_op,
    cohomologous,
    cyclic_symmetrize,
    residual_scale,
)
from .errors import DomainError, InputValidationError, PreconditionError, SingularityError, StructuralError
from .fredholm import FredholmModule, validate_fredholm
from .graded import EVEN, ODD, GradedHilbObject, GradedOperator
from .omega import chern_character, cycle_constant, d_stack, rho_stack, word_tensor
from .periodicity import s_operator

__all__ = [
    "MatrixPath",
    "MatrixPolynomial",
    "PiecewiseMatrixPolynomial",
    "InversePath",
    "ProductPath",
    "OperatorPath",
    "eval_path",
    "path_derivative",
    "transgression_density",
    "transgression_density_tensor",
    "transgression_cochain",
    "HomotopyReport",
    "homotopy_check",
    "normalize_conjugate",
    "grid",
    "validate_path",
    "MAX_POLY_DEGREE",
]

MAX_POLY_DEGREE = 8
CONTINUITY_TOL = 1e-10
SINGULAR_COND = 1e12


class MatrixPath:
    """A matrix-valued function of ``t`` with an exact derivative."""

    shape: tuple[int, int]

    def value(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, t: float) -> np.ndarray:
        raise NotImplementedError

    @property
    def is_constant(self) -> bool:
        return False


class MatrixPolynomial(MatrixPath):
    """``sum_k C_k t^k`` with coefficients ``(deg + 1, rows, cols)``, lowest degree first."""

    def __init__(self, coeffs):
        C = np.asarray(coeffs, dtype=complex)
        if C.ndim != 3:
            raise InputValidationError(f"polynomial coefficients need shape (deg+1, rows, cols), got {C.shape}")
        if C.shape[0] == 0:
            raise InputValidationError("polynomial needs at least one coefficient")
        if C.shape[0] - 1 > MAX_POLY_DEGREE:
            raise InputValidationError(f"polynomial degree {C.shape[0] - 1} exceeds {MAX_POLY_DEGREE}")
        if not np.all(np.isfinite(C)):
            raise InputValidationError("polynomial coefficients must be finite")
        self.coeffs = C
        self.shape = C.shape[1:]
        self._der = npoly.polyder(C, axis=0) if C.shape[0] > 1 else np.zeros_like(C)

    @classmethod
    def constant(cls, M) -> "MatrixPolynomial":
        M = np.asarray(M, dtype=complex)
        return cls(M[None])

    @classmethod
    def linear(cls, M0, M1) -> "MatrixPolynomial":
        """``(1 - t) M0 + t M1``."""
        M0 = np.asarray(M0, dtype=complex)
        return cls(np.stack([M0, np.asarray(M1, dtype=complex) - M0]))

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def is_constant(self) -> bool:
        return self.degree == 0 or not np.any(self.coeffs[1:])

    def value(self, t):
        return npoly.polyval(t, self.coeffs, tensor=False) if self.degree else self.coeffs[0].copy()

    def derivative(self, t):
        if self.degree == 0:
            return np.zeros(self.shape, dtype=complex)
        return npoly.polyval(t, self._der, tensor=False) if self._der.shape[0] > 1 else self._der[0].copy()

    def __repr__(self):
        return f"MatrixPolynomial(degree={self.degree}, shape={self.shape})"


class PiecewiseMatrixPolynomial(MatrixPath):
    """Polynomial pieces on ``[breaks[i], breaks[i+1]]``, each written in the global ``t``.

    Neighbouring pieces must agree at their common breakpoint. At a
    breakpoint the derivative of the right-hand piece is used.
    """

    def __init__(self, breaks: Sequence[float], pieces: Sequence[MatrixPolynomial]):
        breaks = np.asarray(breaks, dtype=float)
        if breaks.ndim != 1 or len(breaks) != len(pieces) + 1 or len(pieces) == 0:
            raise InputValidationError("need len(breaks) == len(pieces) + 1 and at least one piece")
        if np.any(np.diff(breaks) <= 0):
            raise InputValidationError("breakpoints must be strictly increasing")
        shapes = {piece.shape for piece in pieces}
        if len(shapes) != 1:
            raise InputValidationError(f"pieces disagree in shape: {sorted(shapes)}")
        for i in range(1, len(pieces)):
            t = breaks[i]
            gap = np.max(np.abs(pieces[i - 1].value(t) - pieces[i].value(t)), initial=0.0)
            if gap > CONTINUITY_TOL:
                raise StructuralError(f"pieces {i - 1} and {i} do not match at t = {t:g} (gap {gap:.3g})")
        self.breaks = breaks
        self.pieces = tuple(pieces)
        self.shape = pieces[0].shape

    @property
    def is_constant(self) -> bool:
        return all(piece.is_constant for piece in self.pieces)

    def _piece(self, t):
        i = int(np.searchsorted(self.breaks, t, side="right")) - 1
        return self.pieces[min(max(i, 0), len(self.pieces) - 1)]

    def value(self, t):
        return self._piece(t).value(t)

    def derivative(self, t):
        return self._piece(t).derivative(t)


class InversePath(MatrixPath):
    """``t -> inner(t)^-1``, derivative ``-Q inner'(t) Q``.

    Raises :class:`SingularityError` where ``inner(t)`` is not safely invertible.
    """

    def __init__(self, inner: MatrixPath):
        r, c = inner.shape
        if r != c:
            raise StructuralError(f"only square paths can be inverted, got {inner.shape}")
        self.inner = inner
        self.shape = (c, r)

    @property
    def is_constant(self) -> bool:
        return self.inner.is_constant

    def value(self, t):
        M = self.inner.value(t)
        if M.size == 0:
            return M.copy()
        if not np.isfinite(np.linalg.cond(M)) or np.linalg.cond(M) > SINGULAR_COND:
            raise SingularityError(f"path is not invertible at t = {t:g}", t)
        return np.linalg.inv(M)

    def derivative(self, t):
        Q = self.value(t)
        return -Q @ self.inner.derivative(t) @ Q


class ProductPath(MatrixPath):
    """Pointwise product ``f1(t) f2(t) ... fk(t)``; derivative by the product rule."""

    def __init__(self, *factors: MatrixPath):
        if not factors:
            raise InputValidationError("a product needs at least one factor")
        for a, b in zip(factors, factors[1:]):
            if a.shape[1] != b.shape[0]:
                raise StructuralError(f"factor shapes {a.shape} and {b.shape} do not chain")
        self.factors = factors
        self.shape = (factors[0].shape[0], factors[-1].shape[1])

    @property
    def is_constant(self) -> bool:
        return all(f.is_constant for f in self.factors)

    def value(self, t):
        out = self.factors[0].value(t)
        for f in self.factors[1:]:
            out = out @ f.value(t)
        return out

    def derivative(self, t):
        vals = [f.value(t) for f in self.factors]
        total = np.zeros(self.shape, dtype=complex)
        for i, f in enumerate(self.factors):
            term = None
            for j, v in enumerate(vals):
                factor = f.derivative(t) if j == i else v
                term = factor if term is None else term @ factor
            total = total + term
        return total


# -- operator paths -------------------------------------------------------------


def _zero_block(r, c):
    return MatrixPolynomial.constant(np.zeros((r, c)))


@dataclass(eq=False)
class OperatorPath:
    """A family ``t -> (rho_t, F_t)`` on a fixed graded object, ``t`` in ``[0, t_end]``.

    ``rho[label][simple] = {"pp": path, "mm": path}``. ``f`` is either
    ``None`` (the constant ``F = [[0, id], [id, 0]]``, needing ``H+ = H-``
    per simple) or ``f[simple] = {"pm": Q_t, "mp": P_t}``. Missing blocks
    are zero.
    """

    space: GradedHilbObject
    algebra: FiniteAlgebra
    rho: Mapping[str, Mapping[str, Mapping[str, MatrixPath]]]
    f: Mapping[str, Mapping[str, MatrixPath]] | None = None
    t_end: float = 1.0
    p: float = 1.0
    _blocks: dict = field(init=False, repr=False)

    def __post_init__(self):
        t_end = float(self.t_end)
        if not 0.0 <= t_end <= 1.0:
            raise DomainError(f"t_end must lie in [0, 1], got {t_end}")
        self.t_end = t_end
        space = self.space
        simples = space.ctx.simples
        unknown = set(self.rho) - set(self.algebra.basis)
        if unknown:
            raise InputValidationError(f"path given for unknown basis labels {sorted(unknown)}")
        blocks = {}
        for label in self.algebra.basis:
            per = self.rho.get(label, {})
            bad = set(per) - set(simples)
            if bad:
                raise InputValidationError(f"rho[{label}] names unknown simples {sorted(bad)}")
            for s in simples:
                np_, nm = space.plus.dim(s), space.minus.dim(s)
                given = per.get(s, {})
                for key, shape in (("pp", (np_, np_)), ("mm", (nm, nm))):
                    path = given.get(key) or _zero_block(*shape)
                    if tuple(path.shape) != shape:
                        raise InputValidationError(f"rho[{label}][{s}][{key}] has shape {path.shape}, expected {shape}")
                    blocks[(label, s, key)] = path
        if self.f is None:
            for s in simples:
                if space.plus.dim(s) != space.minus.dim(s):
                    raise StructuralError(f"constant F = antidiag(id, id) needs dim H+ = dim H- at {s}")
        else:
            bad = set(self.f) - set(simples)
            if bad:
                raise InputValidationError(f"F names unknown simples {sorted(bad)}")
            for s in simples:
                np_, nm = space.plus.dim(s), space.minus.dim(s)
                given = self.f.get(s, {})
                for key, shape in (("pm", (np_, nm)), ("mp", (nm, np_))):
                    path = given.get(key)
                    if path is None and key == "pm" and given.get("mp") is not None:
                        path = InversePath(given["mp"])
                    path = path or _zero_block(*shape)
                    if tuple(path.shape) != shape:
                        raise InputValidationError(f"F[{s}][{key}] has shape {path.shape}, expected {shape}")
                    blocks[("F", s, key)] = path
        self._blocks = blocks

    @property
    def fixed_f(self) -> bool:
        """True when ``F`` is the constant ``antidiag(id, id)``."""
        return self.f is None

    def block(self, label: str, simple: str, key: str) -> MatrixPath:
        return self._blocks[(label, simple, key)]

    def f_matrix(self, t: float) -> GradedOperator:
        space = self.space
        if self.f is None:
            blocks = {s: {"pm": np.eye(space.plus.dim(s)), "mp": np.eye(space.minus.dim(s))} for s in space.ctx.simples}
        else:
            blocks = {s: {k: self._blocks[("F", s, k)].value(t) for k in ("pm", "mp")} for s in space.ctx.simples}
        return GradedOperator.from_blocks(space, blocks, parity=ODD)

    def _rho_ops(self, t: float, deriv: bool) -> tuple[GradedOperator, ...]:
        out = []
        for label in self.algebra.basis:
            blocks = {}
            for s in self.space.ctx.simples:
                blocks[s] = {}
                for key in ("pp", "mm"):
                    path = self._blocks[(label, s, key)]
                    blocks[s][key] = path.derivative(t) if deriv else path.value(t)
            out.append(GradedOperator.from_blocks(self.space, blocks, parity=EVEN))
        return tuple(out)


def _check_t(path: OperatorPath, t: float) -> float:
    t = float(t)
    if not (-1e-12 <= t <= path.t_end + 1e-12):
        raise DomainError(f"t = {t} outside [0, {path.t_end}]")
    return min(max(t, 0.0), path.t_end)


def eval_path(path: OperatorPath, t: float, *, report: bool = False, tol: float = 1e-9):
    """The module at time ``t``; with ``report`` also its :class:`FredholmReport`."""
    t = _check_t(path, t)
    FM = FredholmModule(path.space, path.algebra, path._rho_ops(t, False), path.f_matrix(t), path.p)
    if report:
        return FM, validate_fredholm(FM, tol)
    return FM


def path_derivative(path: OperatorPath, t: float) -> tuple[GradedOperator, ...]:
    """``delta_t(e_i) = d/dt rho_t(e_i)`` for each basis element."""
    t = _check_t(path, t)
    return path._rho_ops(t, True)


def grid(path: OperatorPath, steps: int) -> np.ndarray:
    """Quadrature nodes ``0, h, ..., t_end``."""
    return np.linspace(0.0, path.t_end, steps + 1)


def _require_fixed_f(path: OperatorPath):
    if not path.fixed_f:
        raise StructuralError("transgression needs the constant F = antidiag(id, id); use normalize_conjugate first")


def _check_degree(p: int):
    if p < 0 or p % 2:
        raise DomainError(f"degree must be even and nonnegative, got {p}")


def transgression_density_tensor(path: OperatorPath, t: float, p: int) -> np.ndarray:
    """Unscaled ``phi_t`` on every unitalized basis tuple, shape ``(dim A + 1,) * (p + 2)``."""
    _require_fixed_f(path)
    _check_degree(p)
    FM = eval_path(path, t)
    R = rho_stack(FM)
    D = d_stack(FM)
    delta = np.stack([op.matrix for op in path_derivative(path, t)] + [np.zeros((FM.space.size,) * 2)])
    eps = FM.space.grading
    total = 0
    for k in range(1, p + 2):
        W = word_tensor([R] + [D] * (k - 1) + [delta] + [D] * (p + 1 - k))
        total = total + (-1) ** (k - 1) * np.einsum("i,...ii->...", eps, W)
    return total


def _tuple_indices(algebra: FiniteAlgebra, tup) -> tuple[int, ...]:
    n = algebra.dim
    out = []
    for x in tup:
        if isinstance(x, str):
            out.append(n if x == "1" and "1" not in algebra.basis else algebra.index(x))
        else:
            i = int(x)
            if not 0 <= i <= n:
                raise InputValidationError(f"index {i} outside the unitalized basis 0..{n}")
            out.append(i)
    return tuple(out)


def transgression_density(path: OperatorPath, t: float, tup: Sequence) -> complex:
    """``phi_t`` on one tuple of unitalized basis elements (labels or indices; index ``dim A`` is the unit)."""
    idx = _tuple_indices(path.algebra, tup)
    p = len(idx) - 2
    if p < 0:
        raise InputValidationError("a density tuple needs at least two entries")
    return complex(transgression_density_tensor(path, t, p)[idx])


def transgression_cochain(path: OperatorPath, p: int, steps: int = 64, *, parallel: bool = False) -> CyclicCochain:
    """``(2 i pi)^m m! * int_0^l phi_t dt`` by composite Simpson; degree ``p + 1``."""
    _require_fixed_f(path)
    _check_degree(p)
    steps = int(steps)
    if steps < 2:
        raise DomainError(f"Simpson quadrature needs at least 2 steps, got {steps}")
    steps += steps % 2
    d = path.algebra.dim + 1
    if path.t_end == 0.0:
        return CyclicCochain.from_unital_tensor(path.algebra, np.zeros((d,) * (p + 2), dtype=complex))
    nodes = grid(path, steps)

    def density(t):
        return transgression_density_tensor(path, t, p)

    if parallel:
        with ThreadPoolExecutor() as pool:
            vals = list(pool.map(density, nodes))
    else:
        vals = [density(t) for t in nodes]
    integral = simpson(np.stack(vals), x=nodes, axis=0)
    return CyclicCochain.from_unital_tensor(path.algebra, cycle_constant(p // 2) * integral)


# -- certificates ---------------------------------------------------------------


@dataclass
class HomotopyReport:
    degree: int
    steps: int
    transgression_b0: float
    transgression_big_b: float
    cohomology_residual: float
    classes_agree: bool
    scale: float
    tolerance: float
    quadrature_tolerance: float
    phi: CyclicCochain
    tau_start: CyclicCochain
    tau_end: CyclicCochain
    grid_residual: float

    @property
    def residuals(self) -> dict[str, float]:
        return {
            "b0_phi_minus_tau_difference": self.transgression_b0,
            "big_b_phi_minus_symmetrized_difference": self.transgression_big_b,
            "s_class_difference": self.cohomology_residual,
            "grid_fredholm": self.grid_residual,
        }

    @property
    def decisions(self) -> dict[str, bool]:
        bound = self.quadrature_tolerance * self.scale
        return {
            "b0_identity": self.transgression_b0 <= bound,
            "big_b_identity": self.transgression_big_b <= bound,
            "s_classes_cohomologous": self.classes_agree,
        }

    @property
    def ok(self) -> bool:
        return all(self.decisions.values())


def validate_path(path: OperatorPath, steps: int, tol: float = 1e-9) -> float:
    """Largest Fredholm residual over the quadrature grid.

    Raises :class:`PreconditionError` at the first grid point that fails.
    """
    worst = 0.0
    for t in grid(path, steps):
        _, rep = eval_path(path, t, report=True, tol=tol)
        if not rep.ok:
            raise PreconditionError(
                f"path is not a Fredholm module at t = {t:g}",
                {f"{k}@t={t:g}": v for k, v in rep.residuals.items()},
            )
        worst = max(worst, *rep.residuals.values())
    return worst


def homotopy_check(
    path: OperatorPath,
    p: int,
    steps: int = 64,
    tol: float = 1e-9,
    *,
    quadrature_tol: float = 1e-6,
    parallel: bool = False,
) -> HomotopyReport:
    """Certify the transgression identities and the invariance of ``[S tau]`` along ``path``.

    Residuals: ``|B0 phi - (tau_l - tau_0)|_inf``,
    ``|(1 + lambda + ... + lambda^p)(tau_l - tau_0) - B phi|_inf``, and the
    least-squares residual of ``S tau_l - S tau_0`` against coboundaries.
    The first two carry quadrature error and are judged against
    ``quadrature_tol``; the grid validation and the class comparison use ``tol``.
    """
    _require_fixed_f(path)
    _check_degree(p)
    steps = int(steps) + int(steps) % 2
    grid_res = validate_path(path, steps, tol)
    start, end = eval_path(path, 0.0), eval_path(path, path.t_end)
    tau0 = chern_character(start, p)
    tau_l = chern_character(end, p)
    phi = transgression_cochain(path, p, steps, parallel=parallel)
    diff = tau_l - tau0
    r_b0 = (b0_op(phi) - diff).sup_norm()
    r_big = (cyclic_symmetrize(CyclicCochain(diff.algebra, p, diff.tensor)) - big_b_op(phi)).sup_norm()
    decision = cohomologous(s_operator(end, p), s_operator(start, p), tol)
    scale = residual_scale(tau0, tau_l)
    return HomotopyReport(
        p, steps, r_b0, r_big, decision.residual, decision.cohomologous, scale, tol, quadrature_tol,
        phi, tau0, tau_l, grid_res,
    )


def normalize_conjugate(path: OperatorPath, steps: int = 64, tol: float = 1e-9) -> OperatorPath:
    """Conjugate by ``T_t = diag(id, Q_t)`` so that ``F`` becomes ``antidiag(id, id)``.

    The new ``rho`` blocks are ``rho_t^+`` and ``Q_t rho_t^- P_t``. ``Q_t P_t = id``
    is enforced on the grid; a singular ``P_t`` raises :class:`SingularityError`.
    """
    if path.f is None:
        return path
    space = path.space
    simples = space.ctx.simples
    for s in simples:
        if space.plus.dim(s) != space.minus.dim(s):
            raise StructuralError(f"normalization needs dim H+ = dim H- at {s}")
    for t in grid(path, steps):
        for s in simples:
            P = path.block("F", s, "mp").value(t)
            Q = path.block("F", s, "pm").value(t)
            if P.size and (not np.isfinite(np.linalg.cond(P)) or np.linalg.cond(P) > SINGULAR_COND):
                raise SingularityError(f"P_t is not invertible at t = {t:g} on {s}", t)
            err = np.max(np.abs(Q @ P - np.eye(P.shape[1])), initial=0.0)
            if err > tol:
                raise PreconditionError(f"Q_t P_t != id at t = {t:g} on {s}", {f"QP-id@{s},t={t:g}": float(err)})
    rho = {}
    for label in path.algebra.basis:
        rho[label] = {}
        for s in simples:
            Q = path.block("F", s, "pm")
            P = path.block("F", s, "mp")
            rho[label][s] = {
                "pp": path.block(label, s, "pp"),
                "mm": ProductPath(Q, path.block(label, s, "mm"), P),
            }
    return OperatorPath(space, path.algebra, rho, None, path.t_end, path.p)
