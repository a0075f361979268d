"""Chern characters of finite-dimensional Fredholm modules valued in Hilb(X).

The package models Fredholm modules whose Hilbert spaces split over the
simple objects of a finite semisimple category, computes their Chern
characters as cyclic cochains, and checks the cocycle, periodicity and
homotopy-invariance identities numerically.
"""

from __future__ import annotations

from .algebra import FiniteAlgebra, multiply, unitalize, validate_algebra
from .category import CategoryContext, CatMorphism, HilbObject, adjoint, compose, sup_operator_norm, sup_schatten_norm
from .cochains import (
    CyclicCochain,
    b0_op,
    big_b_op,
    cohomologous,
    cyclic_symmetrize,
    hochschild_b,
    is_cyclic_cocycle,
    lambda_op,
)
from .errors import (
    CatchernError,
    CompositionError,
    DomainError,
    InputValidationError,
    PreconditionError,
    SingularityError,
    StructuralError,
    UnsupportedOperandError,
)
from .fredholm import FredholmModule, apply_rho, commutator, validate_fredholm
from .graded import GradedHilbObject, GradedOperator
from .homotopy import (
    InversePath,
    MatrixPolynomial,
    OperatorPath,
    PiecewiseMatrixPolynomial,
    ProductPath,
    eval_path,
    homotopy_check,
    normalize_conjugate,
    path_derivative,
    transgression_cochain,
    transgression_density,
)
from .linalg import operator_norm, schatten_norm, singular_values
from .omega import chern_character, cycle_integral, d_op, omega_word, supertrace, total_trace
from .periodicity import periodicity_witness, s_operator, witness_phi

__version__ = "0.1.0"
