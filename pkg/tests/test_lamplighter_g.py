"""Tests relating to affinetrees.lamplighter_g."""
import pytest
from affinetrees.exceptions import DegreeBoundError, NotHomogeneousError
from affinetrees.lamplighter_g import (
    PQState,
    conj_power_t,
    conjugate_pq_by_a,
    degree_accounting,
    laurent_power,
    nontriviality_scan,
    pq_step,
    pq_to_automorphism,
    pq_to_automorphism_direct,
    rank_evidence,
    render_corner,
    t_affine_data,
    verify_relations,
)
from affinetrees.affine import is_affine_shift, sigma_n
from affinetrees.mealy import compose, conjugate, identity, is_spherically_homogeneous, section
from affinetrees.zd_algebra import DiagPeriodicMatrix, LaurentPoly, Poly
from tests import fixture_group  # pylint: disable=W0611

ONE = Poly((1,), 2)
ZERO = Poly((), 2)
T = Poly((0, 1), 2)


def small_states():
    """Every (p, q) of degree at most 1, both signs."""
    polys = [ZERO, ONE, T, ONE + T]
    return [PQState(p, q, sign) for p in polys for q in polys for sign in (1, -1)]


def test_relations_hold():
    """Given the automaton of G, every structural identity holds."""
    failures = [check.name for check in verify_relations(2) if not check.holds]
    assert not failures, f"Failed identities: {', '.join(failures)}"


def test_conj_power_t(group):
    """Given x, conjugating by t and back returns x."""
    assert conj_power_t(group.x, 0) == group.x
    assert conj_power_t(group.x, 1) == conjugate(group.x, group.t)
    assert conjugate(conj_power_t(group.x, 1), group.t_inv) == group.x


def test_conj_power_t_errors(group):
    """Given b or a large power, conjugation by t is refused."""
    with pytest.raises(NotHomogeneousError):
        conj_power_t(group.b, 1)
    with pytest.raises(DegreeBoundError):
        conj_power_t(group.x, 5, 4)


def test_laurent_power(group):
    """Given x and 1 + x^-1, the power is x times x^(t^-1)."""
    value = laurent_power(group.x, LaurentPoly.parse("1+x^-1", 2))
    assert value == compose(group.x, conj_power_t(group.x, -1))
    assert laurent_power(group.x, LaurentPoly()) == identity(2)


def test_pq_step_examples():
    """Given (t, 0)+ and (1, 0)-, the section steps match the recursion."""
    assert pq_step(PQState(T, ZERO, 1)) == PQState(ONE, T, -1)
    assert pq_step(PQState(ONE, ZERO, -1)) == PQState(ZERO, ONE, 1)
    assert str(PQState(ONE, T, -1)) == "(1, t)-"


def test_pq_to_automorphism_generators(group):
    """Given (1, 0)+ and (0, 1)+, the elements are x and y."""
    assert pq_to_automorphism(PQState(ONE, ZERO, 1)) == group.x
    assert pq_to_automorphism(PQState(ZERO, ONE, 1)) == group.y


def test_pq_sections_coherent():
    """Given small (p, q) states, both first level sections equal the stepped state."""
    for state in small_states():
        element = pq_to_automorphism(state)
        following = pq_to_automorphism(pq_step(state))
        assert section(element, (0,)) == following, str(state)
        assert section(element, (1,)) == following, str(state)
        assert element.permutation.is_identity() != state.swaps_root, str(state)


def test_pq_minus_sign_direct():
    """Given (p, q)- states, conjugation by a and negative powers of t agree."""
    for state in small_states():
        if state.sign == -1:
            assert pq_to_automorphism(state) == pq_to_automorphism_direct(state), str(state)


def test_conjugate_pq_by_a(group):
    """Given (1, 1)+, conjugation by a gives (1, t)-."""
    state = PQState(ONE, ONE, 1)
    conjugated = conjugate_pq_by_a(state)
    assert conjugated == PQState(ONE, T, -1)
    assert conjugate(pq_to_automorphism(state), group.a) == pq_to_automorphism(conjugated)


def test_nontriviality_scan():
    """Given degree 2, no nonzero pair gives the identity and both oracles agree."""
    report = nontriviality_scan(2, 1)
    assert report.pairs == 63
    assert report.direct_checked == 15
    assert report.all_nontrivial


def test_degree_accounting():
    """Given (t^2, 0)+, the bookkeeping ends at equal degrees."""
    account = degree_accounting(Poly((0, 0, 1), 2), ZERO)
    assert account.case == "III"
    assert account.holds
    assert account.final.p.degree == account.final.q.degree


def test_degree_accounting_small():
    """Given degrees below 2, the bookkeeping is refused."""
    with pytest.raises(ValueError):
        degree_accounting(T, ONE)


def test_rank_evidence():
    """Given conjugates of x and y by t^-2..t^2, no small relation holds."""
    evidence = rank_evidence(2)
    assert evidence.generators == 10
    assert evidence.independent


def test_t_affine_data():
    """Given t, the detected data matches its closed form."""
    report = t_affine_data(8)
    assert report.matches
    assert report.corner[0] == [1, 1, 0, 1, 0, 1, 0, 1]
    assert report.corner[1] == [0, 1, 1, 1, 1, 0, 1, 1]
    assert len(report.rendering.splitlines()) == 8


def test_render_corner():
    """Given the identity, the rendering is a diagonal of black squares."""
    assert render_corner(DiagPeriodicMatrix.identity(), 2) == "■·\n·■"


def test_conj_power_t_homogeneous(group):
    """Given x and y, their conjugates by t^1, t^-1, t^3 and t^-3 stay homogeneous."""
    for z in (group.x, group.y):
        for power in (1, -1, 3, -3):
            assert is_spherically_homogeneous(conj_power_t(z, power))


def test_t_normalizes_shifts(group):
    """Given sigma^(n) for n up to 8, its conjugates by t and t^-1 are affine shifts."""
    for level in range(9):
        assert is_affine_shift(conjugate(sigma_n(level), group.t)), level
        assert is_affine_shift(conjugate(sigma_n(level), group.t_inv)), level


def test_pq_conjugation_identities():
    """Given six sampled pairs, conjugating (x^p y^q)^(1) s and (x^p y^q)^(1) by t shifts p, q."""
    checks = verify_relations(1, samples=6, seed=17)
    sampled = [check for check in checks if check.name.startswith("((x^p y^q)^(1)")]
    assert len(sampled) == 24
    assert all(check.holds for check in sampled), [c.name for c in sampled if not c.holds]


def test_nontriviality_scan_degree_six():
    """Given degree 6, all 16383 nonzero pairs are nontrivial."""
    report = nontriviality_scan(6)
    assert report.pairs == 16383
    assert report.direct_checked == 63
    assert report.all_nontrivial
