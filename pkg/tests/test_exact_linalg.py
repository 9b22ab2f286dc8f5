from fractions import Fraction

from objimprove.lib import exact_linalg


def test_fraction_array_converts_every_entry():
    array = exact_linalg.fraction_array([[1, "1/2"], [Fraction(2, 3), 0]])
    assert array.shape == (2, 2)
    assert all(isinstance(x, Fraction) for x in array.reshape(-1))
    assert array[0, 1] == Fraction(1, 2)


def test_dot_of_empty_vectors_is_zero():
    assert exact_linalg.dot([], []) == 0
    assert exact_linalg.dot([Fraction(1, 2), 3], [4, Fraction(1, 3)]) == 3


def test_solve_is_exact():
    a = exact_linalg.fraction_array([[Fraction(1, 2), 0], [Fraction(-1, 2), 1]])
    x = exact_linalg.solve(a, [1, 0])
    assert list(x) == [2, 1]
    assert all(isinstance(v, Fraction) for v in x)


def test_solve_and_inverse_report_singular_matrices():
    a = exact_linalg.fraction_array([[1, 2], [2, 4]])
    assert exact_linalg.solve(a, [1, 2]) is None
    assert exact_linalg.inverse(a) is None


def test_inverse_times_matrix_is_identity():
    a = exact_linalg.fraction_array([[2, 1, 0], [1, 3, 1], [0, 1, Fraction(1, 3)]])
    inv = exact_linalg.inverse(a)
    product = a.dot(inv)
    assert all(product[i, j] == (1 if i == j else 0) for i in range(3) for j in range(3))
    assert all(isinstance(x, Fraction) for x in inv.reshape(-1))


def test_rref_pivots():
    reduced, pivots = exact_linalg.rref(exact_linalg.fraction_array([[0, 1, 2], [0, 2, 4], [1, 0, 1]]))
    assert pivots == [0, 1]
    assert list(reduced[2]) == [0, 0, 0]


def test_null_vector():
    a = exact_linalg.fraction_array([[1, -2, 0]])
    d = exact_linalg.null_vector(a, 3)
    assert list(d) == [2, 1, 0]
    assert exact_linalg.dot(a[0], d) == 0
    assert any(x != 0 for x in d)

    assert exact_linalg.null_vector(exact_linalg.fraction_array([[1, 0], [0, 2]]), 2) is None
    assert list(exact_linalg.null_vector(exact_linalg.zeros((0, 2)), 2)) == [1, 0]

