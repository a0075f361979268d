"""Canonical fixtures and random Fredholm modules for tests and demos.

Random algebras are drawn from the associative algebras of dimension 1
and 2 (up to isomorphism), expressed in a random basis. Representations
are direct sums of small indecomposable modules conjugated by random
invertible matrices, so the homomorphism property holds to round-off.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import FiniteAlgebra
from .category import CategoryContext
from .fredholm import FredholmModule
from .graded import EVEN, MIXED, ODD, GradedHilbObject, GradedOperator

__all__ = [
    "proj_module",
    "proj_algebra",
    "ALGEBRA_MODELS",
    "random_algebra_model",
    "random_fredholm_module",
    "random_graded_operator",
    "random_invertible",
    "constant_path",
    "proj_conjugation_path",
    "split_idempotent_module",
    "split_idempotent_path",
    "shear_conjugation_path",
]


def proj_algebra() -> FiniteAlgebra:
    """``span{e}`` with ``e e = e``, no unit."""
    return FiniteAlgebra(("e",), np.ones((1, 1, 1)))


def proj_module(p: float = 1.0) -> FredholmModule:
    """One simple, ``H+ = H- = C``, ``rho(e) = diag(1, 0)``, ``F = antidiag(1, 1)``."""
    ctx = CategoryContext(("1",), (1.0,))
    space = GradedHilbObject.from_dims(ctx, {"1": (1, 1)})
    return FredholmModule.from_blocks(
        space,
        proj_algebra(),
        {"e": {"1": {"pp": [[1]], "mm": [[0]]}}},
        {"1": {"pm": [[1]], "mp": [[1]]}},
        p=p,
    )


def random_invertible(rng: np.random.Generator, n: int, max_cond: float = 3.0) -> np.ndarray:
    """Complex Gaussian matrix with condition number below ``max_cond``.

    The result is rescaled so that its extreme singular values multiply to 1,
    which keeps both ``M`` and ``M^-1`` of moderate size.
    """
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    while True:
        M = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
        s = np.linalg.svd(M, compute_uv=False)
        if s[0] < max_cond * s[-1]:
            return M / np.sqrt(s[0] * s[-1])


def _nil(alpha):
    return np.array([[0, alpha], [0, 0]], dtype=complex)


@dataclass(frozen=True)
class AlgebraModel:
    """An associative algebra in a standard basis with a supply of small modules.

    ``modules(rng)`` returns candidate indecomposables (or the zero module),
    each an array ``(dim A, k, k)`` of matrices for the standard basis.
    """

    name: str
    constants: np.ndarray
    modules: Callable[[np.random.Generator], list]

    @property
    def dim(self) -> int:
        return self.constants.shape[0]


def _constants(dim: int, products: dict) -> np.ndarray:
    c = np.zeros((dim, dim, dim), dtype=complex)
    for (i, j), k in products.items():
        c[i, j, k] = 1.0
    return c


def _alpha(rng):
    return complex(rng.uniform(-1, 1), rng.uniform(-1, 1))


ALGEBRA_MODELS = (
    AlgebraModel("C", _constants(1, {(0, 0): 0}),
                 lambda rng: [np.ones((1, 1, 1)), np.zeros((1, 1, 1))]),
    AlgebraModel("nil1", _constants(1, {}),
                 lambda rng: [np.zeros((1, 1, 1)), np.stack([_nil(_alpha(rng))])]),
    AlgebraModel("CxC", _constants(2, {(0, 0): 0, (1, 1): 1}),
                 lambda rng: [np.array([[[1]], [[0]]]), np.array([[[0]], [[1]]]), np.zeros((2, 1, 1))]),
    AlgebraModel("dual_numbers", _constants(2, {(0, 0): 0, (0, 1): 1, (1, 0): 1}),
                 lambda rng: [np.array([[[1]], [[0]]]), np.zeros((2, 1, 1)),
                              np.stack([np.eye(2), _nil(_alpha(rng))])]),
    AlgebraModel("left_ideal", _constants(2, {(0, 0): 0, (0, 1): 1}),
                 lambda rng: [np.array([[[1]], [[0]]]), np.zeros((2, 1, 1)),
                              np.stack([np.diag([1.0, 0.0]), _nil(_alpha(rng))])]),
    AlgebraModel("right_ideal", _constants(2, {(0, 0): 0, (1, 0): 1}),
                 lambda rng: [np.array([[[1]], [[0]]]), np.zeros((2, 1, 1)),
                              np.stack([np.diag([0.0, 1.0]), _nil(_alpha(rng))])]),
    AlgebraModel("C_plus_nil", _constants(2, {(0, 0): 0}),
                 lambda rng: [np.array([[[1]], [[0]]]), np.zeros((2, 1, 1)),
                              np.stack([np.zeros((2, 2)), _nil(_alpha(rng))])]),
    AlgebraModel("truncated_poly", _constants(2, {(0, 0): 1}),
                 lambda rng: [np.zeros((2, 1, 1)), np.stack([_nil(_alpha(rng)), np.zeros((2, 2))])]),
    AlgebraModel("zero2", _constants(2, {}),
                 lambda rng: [np.zeros((2, 1, 1)), np.stack([_nil(_alpha(rng)), _nil(_alpha(rng))])]),
)


def random_algebra_model(rng: np.random.Generator, max_dim: int = 2) -> AlgebraModel:
    choices = [m for m in ALGEBRA_MODELS if m.dim <= max_dim]
    return choices[rng.integers(len(choices))]


def _random_fiber_rep(rng, model: AlgebraModel, k: int) -> np.ndarray:
    """Matrices ``(dim A, k, k)`` of a random ``k``-dimensional module."""
    blocks = []
    size = 0
    while size < k:
        cands = [M for M in model.modules(rng) if M.shape[1] <= k - size]
        M = cands[rng.integers(len(cands))]
        blocks.append(np.asarray(M, dtype=complex))
        size += M.shape[1]
    rep = np.zeros((model.dim, k, k), dtype=complex)
    o = 0
    for M in blocks:
        s = M.shape[1]
        rep[:, o : o + s, o : o + s] = M
        o += s
    S = random_invertible(rng, k)
    if k:
        rep = S @ rep @ np.linalg.inv(S)
    return rep


def random_fredholm_module(
    rng: np.random.Generator,
    *,
    max_simples: int = 3,
    max_fiber: int = 2,
    max_algebra_dim: int = 2,
    model: AlgebraModel | None = None,
    fiber_dims: tuple[int, ...] | None = None,
    p: float = 1.0,
    normalized_f: bool = False,
) -> FredholmModule:
    """A random module with ``H+(c) = H-(c)`` of dimension at most ``max_fiber``.

    The algebra is a random basis change of ``model`` (drawn at random when
    omitted); ``F`` has a random invertible ``P`` block and ``Q = P^-1``,
    or ``P = Q = id`` when ``normalized_f`` is set.
    """
    model = model or random_algebra_model(rng, max_algebra_dim)
    if fiber_dims is None:
        n_simples = int(rng.integers(1, max_simples + 1))
        fiber_dims = tuple(int(rng.integers(0, max_fiber + 1)) for _ in range(n_simples))
        if not any(fiber_dims):
            fiber_dims = (max(1, max_fiber),) + fiber_dims[1:]
    ctx = CategoryContext(tuple(f"X{i}" for i in range(len(fiber_dims))))
    space = GradedHilbObject.from_dims(ctx, {s: (k, k) for s, k in zip(ctx.simples, fiber_dims)})

    G = random_invertible(rng, model.dim)
    Gi = np.linalg.inv(G)
    c = np.einsum("ia,jb,abc,ck->ijk", G, G, model.constants, Gi)
    labels = tuple(f"a{i}" for i in range(model.dim))
    algebra = FiniteAlgebra(labels, c)

    rho_blocks = {lab: {} for lab in labels}
    f_blocks = {}
    for s, k in zip(ctx.simples, fiber_dims):
        plus = np.einsum("ia,ajk->ijk", G, _random_fiber_rep(rng, model, k))
        minus = np.einsum("ia,ajk->ijk", G, _random_fiber_rep(rng, model, k))
        for i, lab in enumerate(labels):
            rho_blocks[lab][s] = {"pp": plus[i], "mm": minus[i]}
        P = np.eye(k, dtype=complex) if normalized_f else random_invertible(rng, k)
        f_blocks[s] = {"pm": np.linalg.inv(P) if k else P, "mp": P}
    return FredholmModule.from_blocks(space, algebra, rho_blocks, f_blocks, p=p)


def random_graded_operator(rng: np.random.Generator, space: GradedHilbObject, parity: str = MIXED) -> GradedOperator:
    """Gaussian entries inside the blocks allowed by ``parity``."""
    N = space.size
    M = (rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))) / np.sqrt(2)
    mask = {EVEN: space.even_mask, ODD: space.odd_mask, MIXED: space.block_mask}[parity]
    return GradedOperator(space, np.where(mask, M, 0), parity, check=False)


# -- paths ----------------------------------------------------------------------


def constant_path(FM: FredholmModule):
    """The module ``FM`` at every ``t``; ``F`` is kept as given."""
    from .homotopy import MatrixPolynomial, OperatorPath

    space = FM.space
    rho = {
        label: {s: {k: MatrixPolynomial.constant(r.block(s, k)) for k in ("pp", "mm")} for s in space.ctx.simples}
        for label, r in zip(FM.algebra.basis, FM.rho)
    }
    f = {s: {k: MatrixPolynomial.constant(FM.f_op.block(s, k)) for k in ("pm", "mp")} for s in space.ctx.simples}
    ident = all(
        np.allclose(f[s]["pm"].coeffs[0], np.eye(space.plus.dim(s))) and np.allclose(f[s]["mp"].coeffs[0], np.eye(space.minus.dim(s)))
        for s in space.ctx.simples
        if space.plus.dim(s) == space.minus.dim(s)
    ) and all(space.plus.dim(s) == space.minus.dim(s) for s in space.ctx.simples)
    return OperatorPath(space, FM.algebra, rho, None if ident else f, 1.0, FM.p)


def _shear(s_coeffs, sign=1.0):
    """Coefficients of ``[[1, sign*s(t)], [0, 1]]`` for ``s`` given lowest degree first."""
    deg = len(s_coeffs) - 1
    C = np.zeros((max(deg, 0) + 1, 2, 2), dtype=complex)
    C[0] = np.eye(2)
    C[:, 0, 1] += sign * np.asarray(s_coeffs, dtype=complex)
    return C


def proj_conjugation_path(t_end: float = 1.0, *, vary_f: bool = True):
    """PROJ with the idempotent moved by a polynomial shear, ``H+ = H- = C^2``.

    ``rho_t(e)`` has ``pp`` block ``R_t diag(1, 0) R_t^-1`` with
    ``R_t = [[1, t + t^2/2], [0, 1]]`` (its inverse is the opposite shear, so
    the block stays polynomial) and ``mm`` block ``0``. With ``vary_f`` the
    symmetry moves too: ``P_t = (1 + t) id`` and ``Q_t = P_t^-1``.
    """
    from .homotopy import InversePath, MatrixPolynomial, OperatorPath

    ctx = CategoryContext(("1",), (1.0,))
    space = GradedHilbObject.from_dims(ctx, {"1": (2, 2)})
    s = [0.0, 1.0, 0.5]
    R = np.zeros((3, 2, 2), dtype=complex)
    # R diag(1,0) R^-1 = [[1, -s(t)], [0, 0]]
    R[0] = np.diag([1.0, 0.0])
    R[:, 0, 1] = [-x for x in s]
    rho = {"e": {"1": {"pp": MatrixPolynomial(R), "mm": MatrixPolynomial.constant(np.zeros((2, 2)))}}}
    f = None
    if vary_f:
        P = MatrixPolynomial(np.stack([np.eye(2), np.eye(2)]))
        f = {"1": {"mp": P, "pm": InversePath(P)}}
    return OperatorPath(space, proj_algebra(), rho, f, t_end, 1.0)


def split_idempotent_module() -> FredholmModule:
    """``C e1 (+) C e2`` (orthogonal idempotents) on ``H+ = H- = C^2``.

    With ``Pi`` the orthogonal projection onto ``(1, 1)``: on ``H+`` ``e1``
    acts as ``Pi`` and ``e2`` as ``id - Pi``; on ``H-`` ``e1`` acts as ``Pi``
    and ``e2`` as ``0``. ``F = antidiag(id, id)``.
    """
    ctx = CategoryContext(("1",), (1.0,))
    space = GradedHilbObject.from_dims(ctx, {"1": (2, 2)})
    algebra = FiniteAlgebra(("e1", "e2"), _constants(2, {(0, 0): 0, (1, 1): 1}))
    half = 0.5 * np.ones((2, 2))
    rho = {
        "e1": {"1": {"pp": half, "mm": half}},
        "e2": {"1": {"pp": np.eye(2) - half, "mm": np.zeros((2, 2))}},
    }
    f = {"1": {"pm": np.eye(2), "mp": np.eye(2)}}
    return FredholmModule.from_blocks(space, algebra, rho, f)


def split_idempotent_path(t_end: float = 1.0, shear=(0.0, 0.5, 0.5, 0.3)):
    """:func:`split_idempotent_module` with ``rho+`` moved by ``id + s(t) [[0, 1], [0, 0]]``.

    The character values change along the path and the transgression
    integrand has degree 5 in ``t``, so Simpson's rule converges at its
    asymptotic fourth order rather than being exact.
    """
    return shear_conjugation_path(
        split_idempotent_module(), {"1": np.array([[0.0, 1.0], [0.0, 0.0]])}, shear, t_end
    )


def shear_conjugation_path(FM: FredholmModule, E: dict, shear=(0.0, 1.0), t_end: float = 1.0):
    """Conjugate the ``H+`` part of ``rho`` by ``T_t = id + s(t) E``, ``F`` unchanged.

    ``E[simple]`` must square to zero so that ``T_t^-1 = id - s(t) E`` and the
    conjugated blocks ``T_t rho^+(a) T_t^-1`` stay polynomial (degree
    ``2 deg(s)``). ``FM`` must carry ``F = antidiag(id, id)``.
    """
    from .homotopy import MatrixPolynomial, OperatorPath

    space = FM.space
    s = np.asarray(shear, dtype=complex)
    s_sq = np.convolve(s, s)
    deg = 2 * (len(s) - 1)
    rho = {}
    for label, r in zip(FM.algebra.basis, FM.rho):
        rho[label] = {}
        for simple in space.ctx.simples:
            M = r.block(simple, "pp")
            e = np.asarray(E.get(simple, np.zeros_like(M)), dtype=complex)
            if np.max(np.abs(e @ e), initial=0.0) > 1e-12:
                raise ValueError(f"E[{simple}] must square to zero")
            # (1 + sE) M (1 - sE) = M + s (EM - ME) - s^2 EME
            C = np.zeros((deg + 1,) + M.shape, dtype=complex)
            C[0] += M
            for j, c in enumerate(s):
                C[j] += c * (e @ M - M @ e)
            for j, c in enumerate(s_sq):
                C[j] -= c * (e @ M @ e)
            rho[label][simple] = {
                "pp": MatrixPolynomial(C),
                "mm": MatrixPolynomial.constant(r.block(simple, "mm")),
            }
    return OperatorPath(space, FM.algebra, rho, None, t_end, FM.p)
