"""
Exact linear algebra for the solver.

Elimination, inversion and null spaces come from ``sympy.Matrix`` over
Rationals. The rest of the package keeps numpy object arrays of
``fractions.Fraction``, so this module converts at the boundary and only the
inner product (the hot path of ratio tests) stays in plain Python.
"""

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
import sympy

ZERO = Fraction(0)


def fraction_array(values) -> np.ndarray:
    """
    Convert a (nested) sequence of numbers into an object array of Fractions.

    Args:
        values: scalars, 1-D or 2-D sequence (ints, strings or Fractions)

    Returns:
        numpy object array with the same shape
    """
    array = np.array(values, dtype=object)
    flat = array.reshape(-1)
    for i, value in enumerate(flat):
        flat[i] = Fraction(value)
    return flat.reshape(array.shape)


def zeros(shape) -> np.ndarray:
    array = np.empty(shape, dtype=object)
    array.fill(ZERO)
    return array


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    """Exact inner product; returns Fraction(0) for empty vectors."""
    total = ZERO
    for a, b in zip(u, v):
        if a and b:
            total += a * b
    return total


def to_matrix(array: np.ndarray) -> sympy.Matrix:
    """2-D (or 1-D, as a column) Fraction array to a sympy Matrix of Rationals."""
    array = np.asarray(array, dtype=object)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    rows, cols = array.shape
    entries = [sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in array.reshape(-1)]
    return sympy.Matrix(rows, cols, entries)


def from_matrix(matrix: sympy.Matrix) -> np.ndarray:
    """sympy Matrix back to a 2-D object array of Fractions."""
    array = zeros((matrix.rows, matrix.cols))
    for i in range(matrix.rows):
        for j in range(matrix.cols):
            entry = sympy.Rational(matrix[i, j])
            array[i, j] = Fraction(int(entry.p), int(entry.q))
    return array


def rref(matrix: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form.

    Args:
        matrix: 2-D object array of Fractions (not modified)

    Returns:
        (reduced copy, list of pivot column indices)
    """
    reduced, pivots = to_matrix(matrix).rref()
    return from_matrix(reduced), list(pivots)


def solve(a: np.ndarray, b: Sequence[Fraction]) -> Optional[np.ndarray]:
    """
    Solve the square system a x = b exactly.

    Args:
        a: n x n object array of Fractions
        b: length-n right-hand side

    Returns:
        solution vector, or None when a is singular
    """
    n = a.shape[0]
    augmented = to_matrix(a).row_join(to_matrix(fraction_array(list(b))))
    reduced, pivots = augmented.rref()
    if tuple(pivots) != tuple(range(n)):
        return None
    return from_matrix(reduced[:, n])[:, 0]


def inverse(a: np.ndarray) -> Optional[np.ndarray]:
    """Exact inverse of a square matrix, or None when singular."""
    try:
        return from_matrix(to_matrix(a).inv())
    except ValueError:
        # sympy's NonInvertibleMatrixError derives from ValueError
        return None


def null_vector(a: np.ndarray, n_cols: int) -> Optional[np.ndarray]:
    """
    A nonzero vector d with a d = 0.

    Args:
        a: k x n_cols object array (k may be 0)
        n_cols: number of columns, needed when a has no rows

    Returns:
        a null-space vector with a 1 in the first free column and 0 in the
        other free columns, or None if the columns of a are independent
    """
    if a.shape[0] == 0:
        d = zeros(n_cols)
        d[0] = Fraction(1)
        return d
    basis = to_matrix(a).nullspace()
    if not basis:
        return None
    return from_matrix(basis[0])[:, 0]
