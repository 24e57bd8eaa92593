import numpy as np
import pytest

from shiftsolve.mmio import (
    MatrixMarketError,
    eigenvalue_comments,
    format_matrix,
    parse,
    read_matrix,
    read_matrix_file,
    scale_comments,
    write_matrix,
)

from conftest import crandn


def test_round_trip_exact(tmp_path, rng):
    A = crandn(rng, 10, 10) * 10.0 ** rng.integers(-300, 300, (10, 10))
    A[0, 0] = complex(np.nextafter(1, 2), -0.0)
    p = tmp_path / "a.mtx"
    write_matrix(p, A)
    B = read_matrix(p)
    np.testing.assert_array_equal(A, B)
    assert B.flags.f_contiguous and B.dtype == np.complex128


def test_one_by_one(tmp_path):
    p = tmp_path / "one.mtx"
    p.write_text("%%MatrixMarket matrix array complex general\n1 1\n2.0 0.0\n")
    np.testing.assert_array_equal(read_matrix(p), [[2]])


def test_real_promoted():
    A = parse("%%MatrixMarket matrix array real general\n% note\n2 2\n1\n2\n3\n4\n").matrix
    np.testing.assert_array_equal(A, [[1, 3], [2, 4]])
    assert A.dtype == np.complex128


def test_integer_and_symmetric():
    A = parse("%%MatrixMarket matrix array integer symmetric\n2 2\n1\n2\n3\n").matrix
    np.testing.assert_array_equal(A, [[1, 2], [2, 3]])
    H = parse("%%MatrixMarket matrix array complex hermitian\n2 2\n1 0\n2 1\n3 0\n").matrix
    np.testing.assert_array_equal(H, [[1, 2 - 1j], [2 + 1j, 3]])


def test_coordinate():
    text = ("%%MatrixMarket matrix coordinate complex general\n% c\n3 3 3\n"
            "1 1 1.5 0\n3 1 0 2\n2 3 -1 -1\n")
    A = parse(text).matrix
    want = np.zeros((3, 3), complex)
    want[0, 0], want[2, 0], want[1, 2] = 1.5, 2j, -1 - 1j
    np.testing.assert_array_equal(A, want)
    P = parse("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n2 1\n").matrix
    np.testing.assert_array_equal(P, [[0, 0], [1, 0]])


def test_comments_and_annotations(tmp_path):
    p = tmp_path / "x.mtx"
    write_matrix(p, np.eye(2), scale_comments([1, 0.5]) + eigenvalue_comments([1, 2j]))
    f = read_matrix_file(p)
    assert f.annotations("s") == [["1", "1"], ["2", "0.5"]]
    assert f.annotations("lambda") == [["1", "1", "0"], ["2", "0", "2"]]


def test_vector_written_as_column():
    assert format_matrix(np.array([1, 2j])).splitlines()[1] == "2 1"


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("%%MatrixMarket matrix array complex\n1 1\n1 0\n", 1),
    ("%%MatrixMarket matrix array quaternion general\n1 1\n1 0\n", 1),
    ("%%MatrixMarket matrix array complex general\n1\n1 0\n", 2),
    ("%%MatrixMarket matrix array complex general\n2 x\n", 2),
    ("%%MatrixMarket matrix array complex general\n1 1\n1\n", 3),
    ("%%MatrixMarket matrix array complex general\n1 2\n1 0\n1 zz\n", 4),
    ("%%MatrixMarket matrix array complex general\n2 2\n1 0\n1 0\n", 4),
    ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n", 3),
    ("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n", 3),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(MatrixMarketError) as e:
        parse(text, "f.mtx")
    assert e.value.line == line
    assert f"f.mtx:{line}:" in str(e.value)


def test_atomic_write_leaves_no_temp(tmp_path):
    p = tmp_path / "m.mtx"
    write_matrix(p, np.ones((2, 2)))
    write_matrix(p, np.zeros((3, 1)))
    assert [q.name for q in tmp_path.iterdir()] == ["m.mtx"]
    assert read_matrix(p).shape == (3, 1)
