"""Tests relating to affinetrees.zd_algebra."""
import random
import pytest
from affinetrees.exceptions import ModulusMismatchError, NonUnitError
from affinetrees.zd_algebra import (
    DiagPeriodicMatrix,
    EpSeq,
    LaurentPoly,
    Poly,
    RationalSeries,
    Residue,
    canonical_periodic,
    epseq_add,
    epseq_entry,
    epseq_shift,
    epseq_to_series,
    mat_corner,
    mat_entry,
    mat_mul,
    mat_vec,
    phi,
    psi,
    series_to_epseq,
    unit_inverse,
)
from tests import MODULI, random_epseq, random_matrix, random_poly, random_unit


def test_residue_arithmetic():
    """Given residues of Z_5, products and inverses are reduced."""
    assert int(Residue(3, 5) * Residue(2, 5)) == 1
    assert int(Residue(2, 5).inverse()) == 3
    assert int(Residue(4, 5) + 3) == 2


def test_unit_inverse_non_unit():
    """Given a zero divisor of Z_4, no inverse is returned."""
    assert unit_inverse(3, 4) == 3
    with pytest.raises(NonUnitError):
        unit_inverse(2, 4)


def test_modulus_mismatch():
    """Given polynomials over different rings, adding them fails."""
    with pytest.raises(ModulusMismatchError):
        _ = Poly((1,), 2) + Poly((1,), 3)


def test_poly_parse_and_format():
    """Given a polynomial string, it is parsed and printed back."""
    poly = Poly.parse("1+t^2", 2)
    assert poly.coefficients == (1, 0, 1)
    assert str(poly) == "1+t^2"
    assert Poly.parse("2t+1", 3).coefficients == (1, 2)


def test_poly_frobenius():
    """Given 1+t over Z_2, its square is 1+t^2."""
    one_plus_t = Poly((1, 1), 2)
    assert one_plus_t * one_plus_t == Poly((1, 0, 1), 2)
    assert one_plus_t(1) == 0


def test_laurent_division():
    """Given x^-1 + x, division by 1+x gives x^-1 + 1."""
    value = LaurentPoly.parse("x^-1+x", 2)
    quotient = value.divide_by_one_plus_x()
    assert quotient == LaurentPoly.parse("x^-1+1", 2)
    assert quotient * LaurentPoly((1, 1)) == value


def test_laurent_division_rejects_odd_weight():
    """Given a polynomial with value 1 at 1, division by 1+x fails."""
    value = LaurentPoly.parse("1+x+x^2", 2)
    assert value.at_one() == 1
    with pytest.raises(ValueError):
        value.divide_by_one_plus_x()


def test_laurent_shift():
    """Given a Laurent polynomial, shifting moves every exponent."""
    value = LaurentPoly.from_exponents([0, 2])
    assert value.shift(-3).exponents() == [-3, -1]
    assert str(value.shift(-3)) == "x^-3+x^-1"


def test_canonical_periodic():
    """Given a redundant preperiod and period, the canonical form is minimal."""
    assert canonical_periodic([1, 0, 1], [0, 1, 0, 1]) == ((), (1, 0))
    assert canonical_periodic([0, 1], [1]) == ((0,), (1,))


def test_epseq_canonical_equality():
    """Given two presentations of one sequence, they compare equal."""
    assert EpSeq((1, 0), (1, 0)) == EpSeq((), (1, 0))
    assert EpSeq((1,), (1, 0)) != EpSeq((), (1, 0))
    assert EpSeq((1,), (0,)).shift().is_zero()


def test_epseq_text():
    """Given the pre/per syntax, sequences are read and written."""
    sequence = EpSeq.from_text("pre:1|per:1,0", 2)
    assert sequence.to_text() == "pre:1|per:1,0"
    assert str(sequence) == "[1,(1,0)^inf]"
    assert sequence.prefix(5) == (1, 1, 0, 1, 0)
    assert int(epseq_entry(sequence, 3)) == 0


def test_epseq_addition():
    """Given two sequences with the same period, they add entrywise."""
    assert EpSeq((), (1, 0)) + EpSeq((), (0, 1)) == EpSeq((), (1,))
    assert EpSeq((), (1, 2), 3).scale(2) == EpSeq((), (2, 1), 3)
    assert -EpSeq((1,), (0,), 3) == EpSeq((2,), (0,), 3)


def test_series_to_epseq():
    """Given 1/(1+t), its coefficients are all ones over Z_2 and alternate over Z_3."""
    assert series_to_epseq(RationalSeries(Poly((1,), 2), Poly((1, 1), 2))) == EpSeq((), (1,))
    assert series_to_epseq(RationalSeries(Poly((1,), 3), Poly((1, 1), 3))) == EpSeq(
        (), (1, 2), 3
    )


def test_epseq_series_round_trip():
    """Given an eventually periodic sequence, its generating function recovers it."""
    for sequence in (EpSeq((1,), (0, 1)), EpSeq((0, 2), (1, 1, 2), 3), EpSeq.zero(5)):
        assert series_to_epseq(epseq_to_series(sequence)) == sequence


def test_rational_series_equality():
    """Given 1/(1+t) and (1+t)/(1+t^2) over Z_2, they are the same series."""
    first = RationalSeries(Poly((1,), 2), Poly((1, 1), 2))
    second = RationalSeries(Poly((1, 1), 2), Poly((1, 0, 1), 2))
    assert first == second
    assert first.coefficients(4) == [1, 1, 1, 1]


def test_rational_series_shift():
    """Given a polynomial series, the shift drops its constant term."""
    series = RationalSeries.polynomial(Poly((1, 1, 1), 2))
    assert series.shift().coefficients(3) == [1, 1, 0]


def test_rational_series_non_unit():
    """Given a denominator without a unit constant term, the series is rejected."""
    with pytest.raises(NonUnitError):
        RationalSeries(Poly((1,), 2), Poly((0, 1), 2))


def test_phi_psi():
    """Given monomials, psi produces the phi polynomials."""
    assert phi(3) == Poly((1, 1, 1), 2)
    assert psi(Poly((0, 0, 1), 2)) == Poly((1, 1), 2)
    assert psi(Poly((1, 0, 0, 1), 2)) == phi(3)
    assert not psi(Poly((1,), 2))


def test_matrix_canonical():
    """Given redundant base rows, the matrix is stored canonically."""
    diagonal = EpSeq((1,), (0,))
    assert DiagPeriodicMatrix((diagonal,), (diagonal,)) == DiagPeriodicMatrix.identity()
    assert mat_corner(DiagPeriodicMatrix.identity(), 3) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_matrix_non_unit_diagonal():
    """Given a zero on the diagonal, the matrix is rejected."""
    with pytest.raises(NonUnitError):
        DiagPeriodicMatrix((), (EpSeq((0,), (1,)),))


def test_matrix_rows_and_entries():
    """Given a matrix with one base row, rows are read with leading zeros."""
    matrix = DiagPeriodicMatrix((EpSeq((), (1,)),), (EpSeq((1,), (0,)),))
    assert matrix.row(1) == EpSeq((), (1,))
    assert matrix.row(3) == EpSeq((0, 0, 1), (0,))
    assert int(mat_entry(matrix, 1, 7)) == 1
    assert matrix.shift().is_identity()


def test_mat_vec_band():
    """Given e_1 and the band of 1+t, the product is the first row."""
    band = DiagPeriodicMatrix.band(EpSeq((1, 1), (0,)))
    assert mat_vec(EpSeq.basis(1), band) == EpSeq((1, 1), (0,))
    assert mat_vec(EpSeq((), (1,)), DiagPeriodicMatrix.identity()) == EpSeq((), (1,))


def test_mat_mul_bands():
    """Given constant band matrices, their product is the band of the product series."""
    band = DiagPeriodicMatrix.band(EpSeq((1, 1), (0,)))
    assert mat_mul(band, band) == DiagPeriodicMatrix.band(EpSeq((1, 0, 1), (0,)))
    assert DiagPeriodicMatrix.identity() @ band == band


def test_mat_mul_inverse_over_z3():
    """Given the band of 1-t over Z_3, the band of all ones inverts it."""
    one_minus_t = DiagPeriodicMatrix.band(EpSeq((1, 2), (0,), 3))
    ones = DiagPeriodicMatrix.band(EpSeq((), (1,), 3))
    assert mat_mul(one_minus_t, ones).is_identity()


def test_matrix_json():
    """Given a matrix, its JSON form reads back to the same matrix."""
    matrix = DiagPeriodicMatrix((EpSeq((1,), (1, 0)),), (EpSeq((1,), (1, 1, 1, 0)),))
    assert DiagPeriodicMatrix.from_json(matrix.to_json()) == matrix


def test_epseq_presentations():
    """Given random sequences, unrolled and repeated presentations compare equal."""
    rng = random.Random(19)
    for modulus in MODULI:
        for _ in range(50):
            sequence = random_epseq(rng, modulus)
            pre, per = sequence.preperiod, sequence.period
            unroll = rng.randrange(len(per) + 1)
            repeats = rng.randint(1, 3)
            other = EpSeq(pre + per[:unroll], (per[unroll:] + per[:unroll]) * repeats, modulus)
            assert other == sequence
            assert other.prefix(30) == sequence.prefix(30)


def test_epseq_shift_random():
    """Given random sequences, the shift drops exactly the first entry."""
    rng = random.Random(23)
    for modulus in MODULI:
        for _ in range(25):
            sequence = random_epseq(rng, modulus)
            shifted = epseq_shift(sequence)
            assert all(shifted.entry(i) == sequence.entry(i + 1) for i in range(1, 101))


def test_epseq_add_random():
    """Given random sequences, sums and scalings act entrywise."""
    rng = random.Random(29)
    for modulus in MODULI:
        for _ in range(25):
            left, right = random_epseq(rng, modulus), random_epseq(rng, modulus)
            factor = rng.randrange(modulus)
            total = epseq_add(left, right)
            scaled = left.scale(factor)
            for i in range(1, 61):
                assert total.entry(i) == (left.entry(i) + right.entry(i)) % modulus
                assert scaled.entry(i) == left.entry(i) * factor % modulus


def test_epseq_series_random():
    """Given random sequences, the generating function expands to the same entries."""
    rng = random.Random(31)
    for modulus in MODULI:
        for _ in range(25):
            sequence = random_epseq(rng, modulus)
            series = epseq_to_series(sequence)
            assert series.coefficients(40) == list(sequence.prefix(40))
            assert series_to_epseq(series) == sequence


def test_psi_degree_random():
    """Given random nonzero polynomials over Z_2, psi lowers the degree by one."""
    rng = random.Random(37)
    for _ in range(100):
        poly = random_poly(rng, 2, rng.randint(0, 12))
        if not poly:
            continue
        assert psi(poly).degree == poly.degree - 1


def random_series(rng, modulus):
    """A rational series with a unit constant term in its denominator."""
    tail = tuple(rng.randrange(modulus) for _ in range(rng.randint(0, 4)))
    denominator = Poly((random_unit(rng, modulus),) + tail, modulus)
    return RationalSeries(random_poly(rng, modulus, rng.randint(0, 5)), denominator)


def test_rational_series_random():
    """Given random rational series, sums and products match their expansions."""
    rng = random.Random(41)
    count = 200
    for modulus in MODULI:
        for _ in range(20):
            left, right = random_series(rng, modulus), random_series(rng, modulus)
            first, second = left.coefficients(count), right.coefficients(count)
            product = [
                sum(first[k] * second[n - k] for k in range(n + 1)) % modulus
                for n in range(count)
            ]
            assert (left * right).coefficients(count) == product
            assert (left + right).coefficients(count) == [
                (a + b) % modulus for a, b in zip(first, second)
            ]
            assert series_to_epseq(left).prefix(50) == tuple(first[:50])


def naive_product(left, right, modulus):
    """Product of two square matrices given as nested lists."""
    size = len(left)
    return [
        [sum(left[i][k] * right[k][j] for k in range(size)) % modulus for j in range(size)]
        for i in range(size)
    ]


def test_mat_mul_random():
    """Given random matrices, the product corner is the product of corners."""
    rng = random.Random(43)
    size = 40
    for modulus in MODULI:
        for _ in range(5):
            left, right = random_matrix(rng, modulus), random_matrix(rng, modulus)
            expected = naive_product(mat_corner(left, size), mat_corner(right, size), modulus)
            assert mat_corner(mat_mul(left, right), size) == expected


def test_mat_mul_associative():
    """Given random matrix triples, the exact product is associative."""
    rng = random.Random(47)
    for modulus in MODULI:
        for _ in range(3):
            first, second, third = (random_matrix(rng, modulus) for _ in range(3))
            assert mat_mul(mat_mul(first, second), third) == mat_mul(
                first, mat_mul(second, third)
            )


def test_mat_vec_random():
    """Given random vectors and matrices, the product agrees with the finite sums."""
    rng = random.Random(53)
    size = 40
    for modulus in MODULI:
        for _ in range(10):
            vector, matrix = random_epseq(rng, modulus), random_matrix(rng, modulus)
            entries = vector.prefix(size)
            expected = tuple(
                sum(entries[k - 1] * matrix.entry(k, j) for k in range(1, j + 1)) % modulus
                for j in range(1, size + 1)
            )
            assert mat_vec(vector, matrix).prefix(size) == expected
