r"""Dense complex matrix kernel: singular values, Schatten and operator norms.

The Schatten :math:`p`-norm of a matrix :math:`M` is

.. math::
    \|M\|_p = \Big(\sum_i s_i(M)^p\Big)^{1/p},

where :math:`s_1 \geq s_2 \geq \dots` are the singular values, i.e. the
eigenvalues of :math:`\sqrt{M^* M}`.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, InputValidationError

__all__ = [
    "as_matrix",
    "singular_values",
    "schatten_norm",
    "operator_norm",
]


def as_matrix(M) -> np.ndarray:
    """Coerce ``M`` to a finite 2-D complex array, raising on bad input."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2:
        raise InputValidationError(f"expected a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputValidationError("matrix has non-finite entries")
    return A


def singular_values(M) -> np.ndarray:
    """Singular values of ``M`` in descending order.

    Returns ``min(rows, cols)`` nonnegative reals. Empty matrices give an
    empty spectrum.
    """
    A = as_matrix(M)
    if A.size == 0:
        return np.zeros(0)
    s = np.linalg.svd(A, compute_uv=False)
    return np.sort(np.clip(s, 0.0, None))[::-1]


def _check_exponent(p: float) -> float:
    p = float(p)
    if not p >= 1.0:
        raise DomainError(f"Schatten exponent must satisfy p >= 1, got {p}")
    return p


def schatten_norm(M, p: float) -> float:
    """Schatten ``p``-norm of ``M`` for ``p >= 1`` (``p = inf`` gives the operator norm)."""
    p = _check_exponent(p)
    s = singular_values(M)
    if s.size == 0:
        return 0.0
    if np.isinf(p):
        return float(s[0])
    # scale by s_1 so that large p does not overflow
    top = s[0]
    if top == 0.0:
        return 0.0
    return float(top * np.sum((s / top) ** p) ** (1.0 / p))


def operator_norm(M) -> float:
    """Largest singular value of ``M``; 0 for empty matrices."""
    s = singular_values(M)
    return float(s[0]) if s.size else 0.0
