"""Tests relating to affinetrees.affine."""
import json
import random
import pytest
from affinetrees.affine import (
    AffineAutomorphism,
    AffineRefutation,
    PowerSeriesAffine,
    affine_apply,
    affine_compose,
    affine_inverse,
    affine_power,
    affine_section,
    affine_to_automaton,
    centralizer_spot_check,
    conjugate_translation,
    cycle_divisibility_check,
    delta_element,
    detect_affine,
    from_power_series,
    is_affine_shift,
    normalizer_certificate,
    power_series_state,
    sigma_n,
)
from affinetrees.exceptions import NonUnitError
from affinetrees.lamplighter_g import T_EVEN_ROW, T_ODD_ROW, T_VECTOR
from affinetrees.mealy import (
    act_word,
    apply_boundary,
    compose,
    conjugate,
    identity,
    is_identity,
    section,
    wreath,
)
from affinetrees.zd_algebra import (
    DiagPeriodicMatrix,
    EpSeq,
    Poly,
    RationalSeries,
    is_unit,
    mat_mul,
    mat_vec,
)
from tests import (  # pylint: disable=W0611
    automaton_path,
    fixture_adding,
    fixture_group,
    fixture_lamplighter,
    load_automata,
    random_epseq,
)

ONE_PLUS_T = PowerSeriesAffine(
    RationalSeries.polynomial(Poly((1, 1), 2)), RationalSeries.polynomial(Poly((), 2))
)


def random_affine(rng: random.Random, modulus: int) -> AffineAutomorphism:
    """A small random affine automorphism with unit diagonal entries."""
    units = [value for value in range(1, modulus) if is_unit(value, modulus)]

    def row():
        period = tuple(rng.randrange(modulus) for _ in range(rng.randint(1, 2)))
        return EpSeq((rng.choice(units),), period, modulus)

    matrix = DiagPeriodicMatrix(
        tuple(row() for _ in range(rng.randint(0, 1))),
        tuple(row() for _ in range(rng.randint(1, 2))),
        modulus,
    )
    vector = EpSeq(
        tuple(rng.randrange(modulus) for _ in range(rng.randint(0, 2))),
        tuple(rng.randrange(modulus) for _ in range(rng.randint(1, 2))),
        modulus,
    )
    return AffineAutomorphism(matrix, vector)


def test_detect_identity():
    """Given the identity automorphism, the affine data is (I, 0)."""
    assert detect_affine(identity(2)) == AffineAutomorphism.identity(2)
    assert detect_affine(identity(3)) == AffineAutomorphism.identity(3)


def test_detect_t(group):
    """Given t of G, its affine data has the known vector and rows."""
    data = detect_affine(group.t)
    assert isinstance(data, AffineAutomorphism)
    assert data.vector == T_VECTOR
    assert data.matrix.period == 2
    for index in range(1, 9):
        expected = T_ODD_ROW if index % 2 else T_EVEN_ROW
        assert data.matrix.row_from_diagonal(index) == expected


def test_detect_refutes_b(group):
    """Given b = (c, c), detection returns a refutation."""
    assert isinstance(detect_affine(group.b), AffineRefutation)


def test_detect_ternary_multiplication():
    """Given the machine multiplying each letter by 2 over Z_3, A = 2I."""
    data = detect_affine(load_automata("ternary.txt")["m"])
    assert data.matrix == DiagPeriodicMatrix.band(EpSeq((2,), (0,), 3))
    assert data.vector.is_zero()


def test_power_series_to_lamplighter(lamplighter):
    """Given tau_{1+t,0}, the automaton is the lamplighter machine b = (b, c)."""
    automorphism = from_power_series(ONE_PLUS_T)
    assert automorphism.matrix == DiagPeriodicMatrix.band(EpSeq((1, 1), (0,)))
    assert affine_to_automaton(automorphism) == lamplighter["b"]


def test_power_series_state():
    """Given tau_{1+t,0}, its state at 1 has offset 1 and matches the matrix section."""
    state = power_series_state(ONE_PLUS_T, 1)
    assert state.offset == RationalSeries.polynomial(Poly((1,), 2))
    assert from_power_series(state) == affine_section(from_power_series(ONE_PLUS_T), 1)


def test_power_series_non_unit():
    """Given a factor without a unit constant term, tau is rejected."""
    with pytest.raises(NonUnitError):
        PowerSeriesAffine(RationalSeries.polynomial(Poly((0, 1), 2)), ONE_PLUS_T.offset)


def test_affine_apply_translation():
    """Given a translation, the image of zero is its vector."""
    vector = EpSeq((1,), (0, 1))
    assert affine_apply(AffineAutomorphism.translation(vector), EpSeq.zero()) == vector
    assert affine_section(AffineAutomorphism.translation(vector), 1).vector == EpSeq((), (0, 1))


def test_inverse_and_power():
    """Given tau_{1+t,0}, its inverse is the band of ones and its square the band of 1+t^2."""
    automorphism = from_power_series(ONE_PLUS_T)
    inverse = affine_inverse(automorphism)
    assert inverse.matrix == DiagPeriodicMatrix.band(EpSeq((), (1,)))
    assert affine_compose(automorphism, inverse) == AffineAutomorphism.identity(2)
    assert affine_power(automorphism, 2).matrix == DiagPeriodicMatrix.band(EpSeq((1, 0, 1), (0,)))
    assert affine_power(automorphism, -1) == inverse


def test_compose_matches_automata():
    """Given random affine pairs over Z_2 and Z_3, composition matches the automata."""
    rng = random.Random(7)
    for modulus in (2, 3):
        for _ in range(200):
            left, right = random_affine(rng, modulus), random_affine(rng, modulus)
            product = affine_compose(left, right)
            automaton = compose(affine_to_automaton(left), affine_to_automaton(right))
            assert affine_to_automaton(product) == automaton
            assert detect_affine(automaton) == product


def test_section_matches_automata():
    """Given random affine automorphisms, sections and boundary images match the automata."""
    rng = random.Random(11)
    for modulus in (2, 3):
        for _ in range(200):
            automorphism = random_affine(rng, modulus)
            automaton = affine_to_automaton(automorphism)
            assert detect_affine(automaton) == automorphism
            for letter in range(modulus):
                expected = section(automaton, (letter,))
                assert affine_to_automaton(affine_section(automorphism, letter)) == expected
            point = random_epseq(rng, modulus, 3, 4)
            assert apply_boundary(automaton, point) == affine_apply(automorphism, point)


def test_inverse_cancels():
    """Given random affine automorphisms, the inverse is pi_{A^-1, -b A^-1}."""
    rng = random.Random(5)
    for modulus in (2, 3):
        for _ in range(200):
            automorphism = random_affine(rng, modulus)
            inverse = affine_inverse(automorphism)
            assert mat_mul(automorphism.matrix, inverse.matrix).is_identity()
            assert mat_mul(inverse.matrix, automorphism.matrix).is_identity()
            assert inverse.vector == -mat_vec(automorphism.vector, inverse.matrix)
            assert is_identity(
                compose(affine_to_automaton(automorphism), affine_to_automaton(inverse))
            )


def test_detect_refutes_random(group):
    """Given affine automorphisms multiplied by b, every refutation carries a valid witness."""
    rng = random.Random(13)
    for _ in range(20):
        g = compose(affine_to_automaton(random_affine(rng, 2)), group.b)
        refutation = detect_affine(g)
        assert isinstance(refutation, AffineRefutation)
        if refutation.word is None:
            assert refutation.basis_index is not None
        else:
            candidate = affine_to_automaton(refutation.candidate)
            assert act_word(candidate, refutation.word) != act_word(g, refutation.word)
        assert normalizer_certificate(g, 4).status in ("not-affine", "inconclusive")



def test_json_fixture():
    """Given the JSON fixture, it converts to an automaton and is detected back."""
    with open(automaton_path("tau_band.json"), encoding="utf-8") as handle:
        automorphism = AffineAutomorphism.from_dict(json.load(handle))
    assert detect_affine(affine_to_automaton(automorphism)) == automorphism
    assert AffineAutomorphism.from_dict(automorphism.to_dict()) == automorphism


def test_sigma_n():
    """Given sigma^(2), only the third letter is cycled."""
    assert act_word(sigma_n(2), (0, 0, 0, 0)) == (0, 0, 1, 0)
    assert act_word(sigma_n(0, 3), (2, 2)) == (0, 2)
    assert is_affine_shift(sigma_n(5))


def test_delta_element():
    """Given 1+t, the translation adds 1 to the first two letters."""
    assert affine_to_automaton(delta_element(Poly((1, 1), 2))) == compose(sigma_n(0), sigma_n(1))


def test_is_affine_shift(group):
    """Given x and b of G, only x is an affine shift."""
    assert is_affine_shift(group.x)
    assert not is_affine_shift(group.b)


def test_conjugate_translation(group):
    """Given sigma^(0) conjugated by t, the result is (x, x)s = pi_{I, e_1 A}."""
    data = detect_affine(group.t)
    expected = conjugate_translation(EpSeq.basis(1), data)
    assert expected.vector == EpSeq((1,), (1, 0))
    assert affine_to_automaton(expected) == conjugate(sigma_n(0), group.t)
    assert conjugate(sigma_n(0), group.t) == wreath([group.x, group.x], sigma_n(0).permutation)


def test_normalizer_t(group):
    """Given t, both normalizer checks agree that it is affine."""
    report = normalizer_certificate(group.t, 8)
    assert report.status == "affine"
    assert report.detected and report.bounded_pass


def test_normalizer_b(group):
    """Given b, the bounded check fails at level 3 and detection refutes."""
    report = normalizer_certificate(group.b, 4)
    assert report.status == "not-affine"
    assert report.failed_level == 3
    assert normalizer_certificate(group.b, 2).status == "inconclusive"


def test_normalizer_adding(adding):
    """Given the adding machine, the bounded check fails at level 0."""
    report = normalizer_certificate(adding["a"], 4)
    assert report.status == "not-affine"
    assert report.failed_level == 0


def test_normalizer_random_affine():
    """Given random affine automorphisms, the certificate never reports a defect."""
    rng = random.Random(3)
    for _ in range(20):
        automaton = affine_to_automaton(random_affine(rng, 2))
        assert normalizer_certificate(automaton, 4).status == "affine"


def test_cycle_divisibility(group):
    """Given t and tau_{1+t,0}, the matrix period divides the shortest cycle."""
    report = cycle_divisibility_check(detect_affine(group.t))
    assert report.matrix_period == 2
    assert report.consistent
    band = cycle_divisibility_check(from_power_series(ONE_PLUS_T))
    assert band.has_loop and band.band and band.shortest_cycle == 1
    assert band.tau_form


def test_centralizer(group):
    """Given sigma^(0) and a, the centraliser check is consistent."""
    report = centralizer_spot_check(sigma_n(0), levels=3)
    assert report.commutes and report.level_constant
    other = centralizer_spot_check(group.a, levels=3)
    assert not other.commutes
    assert other.consistent


def test_cycle_loop_against_tau_form():
    """Given a base row before a band and a period 2 translation, loops and tau form part ways."""
    ones_then_identity = AffineAutomorphism(
        DiagPeriodicMatrix((EpSeq((1,), (1,)),), (EpSeq((1,), (0,)),)), EpSeq.zero()
    )
    report = cycle_divisibility_check(ones_then_identity)
    assert report.has_loop and report.band
    assert not report.tau_form
    translation = cycle_divisibility_check(AffineAutomorphism.translation(EpSeq((), (1, 0))))
    assert translation.tau_form
    assert not translation.has_loop
    assert translation.shortest_cycle == 2
    assert report.consistent and translation.consistent
