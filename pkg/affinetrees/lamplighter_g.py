"""
This sub-module contains the 4-state automaton group G over the binary tree,

    a = (d, d)s,  b = (c, c),  c = (a, b),  d = (b, a),

its elements x = ab, y = cd, t = ac, and the polynomial bookkeeping that
shows <x, y, t> is a rank 2 lamplighter group.

For Laurent polynomials p(t) the element x^p(t) is the product of the
conjugates x^(t^i) = t^-i x t^i over the monomials of p. Pairs of
polynomials (p, q) stand for (p, q)+ = x^p(t) y^q(t) and
(p, q)- = x^p(t^-1) y^q(t^-1).

Contents:
    - `build_G()` - The group with its named elements.
    - `conj_power_t()` / `laurent_power()` - Conjugates z^(t^k) and z^r(t).
    - `PQState` / `pq_step()` / `pq_to_automorphism()` - First level sections of x^p y^q.
    - `verify_relations()` - Machine checks of the defining identities.
    - `nontriviality_scan()` / `degree_accounting()` / `rank_evidence()` - Evidence
      that no x^p y^q collapses.
    - `t_affine_data()` / `render_corner()` - The affine data of t.
"""
from __future__ import annotations

import logging
import random
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from affinetrees.affine import AffineAutomorphism, detect_affine
from affinetrees.exceptions import AffineTreesError, DegreeBoundError, NotHomogeneousError
from affinetrees.mealy import (
    Permutation,
    TreeAutomorphism,
    compose,
    conjugate,
    distinguishing_word,
    identity,
    inverse,
    is_identity,
    is_spherically_homogeneous,
    minimize,
    order_bounded,
    parse_wreath,
    wreath,
)
from affinetrees.utils import default_config, format_word
from affinetrees.zd_algebra import DiagPeriodicMatrix, EpSeq, LaurentPoly, Poly, psi

logger = logging.getLogger(__name__)

G_WREATH = """
a = (d, d) s
b = (c, c)
c = (a, b)
d = (b, a)
"""
"""Wreath recursion of the generating automaton."""

SWAP = Permutation((1, 0))


@dataclass(frozen=True)
class GGroup:
    """The generators of G and the derived elements, all canonical."""

    a: TreeAutomorphism
    b: TreeAutomorphism
    c: TreeAutomorphism
    d: TreeAutomorphism
    x: TreeAutomorphism
    y: TreeAutomorphism
    t: TreeAutomorphism
    t_inv: TreeAutomorphism

    def elements(self) -> Dict[str, TreeAutomorphism]:
        """Named elements, as used by the command line."""
        return {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "d": self.d,
            "x": self.x,
            "y": self.y,
            "t": self.t,
            "t_inv": self.t_inv,
        }


@lru_cache(maxsize=None)
def build_G() -> GGroup:  # pylint: disable=C0103
    """Parses the automaton of G and derives x = ab, y = cd and t = ac."""
    named = {name: minimize(g) for name, g in parse_wreath(G_WREATH).items()}
    a, b, c, d = named["a"], named["b"], named["c"], named["d"]
    t = compose(a, c)
    return GGroup(a, b, c, d, compose(a, b), compose(c, d), t, inverse(t))


@lru_cache(maxsize=None)
def conj_power_t(z: TreeAutomorphism, power: int, bound: int = None) -> TreeAutomorphism:
    """z^(t^power) = t^-power z t^power for spherically homogeneous z.

    Raises:
        NotHomogeneousError: z is not spherically homogeneous.
        DegreeBoundError: |power| exceeds `bound` (default `max_conj_power`).
    """
    bound = default_config["max_conj_power"] if bound is None else bound
    if abs(power) > bound:
        raise DegreeBoundError(f"Conjugation by t^{power} exceeds the bound {bound}")
    if power == 0:
        if not is_spherically_homogeneous(z):
            raise NotHomogeneousError("Only spherically homogeneous elements are conjugated by t")
        return z
    group = build_G()
    if power > 0:
        return conjugate(conj_power_t(z, power - 1, bound), group.t)
    return conjugate(conj_power_t(z, power + 1, bound), group.t_inv)


def laurent_power(z: TreeAutomorphism, exponent: LaurentPoly, bound: int = None):
    """z^r(t): the product of z^(t^i) over the monomials of r."""
    result = identity(z.degree)
    for power in exponent.exponents():
        factor = conj_power_t(z, power, bound)
        for _ in range(exponent.coefficient(power)):
            result = compose(result, factor)
    return result


def _laurent(poly: Poly) -> LaurentPoly:
    return LaurentPoly.from_poly(poly)


def _mirror(poly: Poly) -> LaurentPoly:
    """p(t^-1) as a Laurent polynomial."""
    return LaurentPoly.from_exponents([-e for e in poly.exponents()], poly.modulus)


@dataclass(frozen=True)
class PQState:
    """(p, q) with a sign: + for x^p(t) y^q(t), - for x^p(t^-1) y^q(t^-1)."""

    p: Poly
    q: Poly
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("The sign of a (p, q) state is +1 or -1")

    @property
    def degree(self) -> int:
        """max(deg p, deg q)."""
        return max(self.p.degree, self.q.degree)

    @property
    def swaps_root(self) -> bool:
        """Whether the element acts by the swap on the first letter, i.e. p(1) = 1."""
        return self.p(1) % 2 == 1

    def __str__(self):
        sign = "+" if self.sign == 1 else "-"
        return f"({self.p}, {self.q}){sign}"


def pq_step(state: PQState) -> PQState:
    """The common first level section of a (p, q) element.

    (p, q)+ -> (psi_p + q, p)- and (p, q)- -> (t psi_p + q, p)+.
    """
    if state.sign == 1:
        return PQState(psi(state.p) + state.q, state.p, -1)
    return PQState(psi(state.p).shift(1) + state.q, state.p, 1)


def conjugate_pq_by_a(state: PQState) -> PQState:
    """(p, q)+ conjugated by a, which is (p, t q)-."""
    if state.sign != 1:
        raise ValueError("Only (p, q)+ states are conjugated by a")
    return PQState(state.p, state.q.shift(1), -1)


def pq_to_automorphism(state: PQState, bound: int = None) -> TreeAutomorphism:
    """The automorphism of a (p, q) state.

    (p, q)- is built as the conjugate of x^p(t) y^(t^-1 q(t)) by a, since
    x^a = x, y^a = y^(t^-1) and t^a = t^-1.

    Raises:
        DegreeBoundError: A degree exceeds `bound`.
    """
    group = build_G()
    if state.sign == 1:
        return compose(
            laurent_power(group.x, _laurent(state.p), bound),
            laurent_power(group.y, _laurent(state.q), bound),
        )
    base = compose(
        laurent_power(group.x, _laurent(state.p), bound),
        laurent_power(group.y, _laurent(state.q).shift(-1), bound),
    )
    return conjugate(base, group.a)


def pq_to_automorphism_direct(state: PQState, bound: int = None) -> TreeAutomorphism:
    """Like `pq_to_automorphism()`, but with negative powers of t for the - sign."""
    group = build_G()
    if state.sign == 1:
        return pq_to_automorphism(state, bound)
    return compose(
        laurent_power(group.x, _mirror(state.p), bound),
        laurent_power(group.y, _mirror(state.q), bound),
    )


@dataclass(frozen=True)
class RelationCheck:
    """One machine-checked identity; `word` distinguishes the sides on failure."""

    name: str
    holds: bool
    word: Optional[Tuple[int, ...]] = None

    def to_dict(self) -> dict:
        """JSON friendly form."""
        return {
            "name": self.name,
            "holds": self.holds,
            "word": None if self.word is None else format_word(self.word),
        }


def _identity_check(name: str, left: TreeAutomorphism, right: TreeAutomorphism) -> RelationCheck:
    word = distinguishing_word(left, right)
    if word is not None:
        logger.warning("Identity %s fails on %s", name, format_word(word))
    return RelationCheck(name, word is None, word)


def _truth_check(name: str, holds: bool) -> RelationCheck:
    if not holds:
        logger.warning("Check %s fails", name)
    return RelationCheck(name, holds)


def _x_y_power(p: LaurentPoly, q: LaurentPoly) -> TreeAutomorphism:
    group = build_G()
    return compose(laurent_power(group.x, p), laurent_power(group.y, q))


def _pq_conjugation_checks(p: LaurentPoly, q: LaurentPoly) -> List[RelationCheck]:
    """Conjugates of (x^p y^q)^(1) s and (x^p y^q)^(1) by t and t^-1."""
    group = build_G()
    label = f"p={p.format('t')}, q={q.format('t')}"
    one = LaurentPoly.from_exponents([0])
    t = LaurentPoly.from_exponents([1])
    base = _x_y_power(p, q)
    swapped = wreath([base, base], SWAP)
    fixed = wreath([base, base], Permutation.identity(2))

    def swap_level(r, s):
        element = _x_y_power(r, s)
        return wreath([element, element], SWAP)

    def fixed_level(r, s):
        element = _x_y_power(r, s)
        return wreath([element, element], Permutation.identity(2))

    return [
        _identity_check(
            f"((x^p y^q)^(1) s)^t, {label}",
            conjugate(swapped, group.t),
            swap_level(p.shift(-1) + one, q.shift(-1)),
        ),
        _identity_check(
            f"((x^p y^q)^(1) s)^(t^-1), {label}",
            conjugate(swapped, group.t_inv),
            swap_level(p.shift(1) + t, q.shift(1)),
        ),
        _identity_check(
            f"((x^p y^q)^(1))^t, {label}",
            conjugate(fixed, group.t),
            fixed_level(p.shift(-1), q.shift(-1)),
        ),
        _identity_check(
            f"((x^p y^q)^(1))^(t^-1), {label}",
            conjugate(fixed, group.t_inv),
            fixed_level(p.shift(1), q.shift(1)),
        ),
    ]


def verify_relations(depth: int = None, samples: int = None, seed: int = 0) -> List[RelationCheck]:
    """Checks the identities that pin down the structure of G.

    Args:
        depth (int, optional): Largest n for the expansions of x^(t^n),
            y^(t^n), x^(t^-n) and y^(t^-n). Defaults to `relation_depth`.
        samples (int, optional): Number of random pairs (p, q) of degree <= 4
            on which conjugation of (x^p y^q)^(1) and (x^p y^q)^(1) s by t and
            t^-1 is checked. Defaults to `relation_samples`.
        seed (int): Seed of the pair sampler.

    Returns:
        list: One `RelationCheck` per identity.
    """
    depth = default_config["relation_depth"] if depth is None else depth
    samples = default_config["relation_samples"] if samples is None else samples
    group = build_G()
    a, x, y, t, t_inv = group.a, group.x, group.y, group.t, group.t_inv
    x_t = conj_power_t(x, 1)
    y_t_inv = conj_power_t(y, -1)
    sigma0 = wreath([identity(2), identity(2)], SWAP)

    def sh(g):
        return wreath([g, g], SWAP)

    def level(g):
        return wreath([g, g], Permutation.identity(2))

    checks = [
        _truth_check(
            "generators are involutions",
            all(order_bounded(g, 4) == 2 for g in (group.a, group.b, group.c, group.d)),
        ),
        _truth_check("<a,b> is a Klein four-group", group.a != group.b and order_bounded(x, 4) == 2),
        _truth_check("<c,d> is a Klein four-group", group.c != group.d and order_bounded(y, 4) == 2),
        _identity_check("x^2 = 1", compose(x, x), identity(2)),
        _identity_check("y^2 = 1", compose(y, y), identity(2)),
        _identity_check("x = y^(1) s", x, sh(y)),
        _identity_check("y = x^(1)", y, level(x)),
        _identity_check("x^a = x", conjugate(x, a), x),
        _identity_check("y^a = y^(t^-1)", conjugate(y, a), y_t_inv),
        _identity_check("t^a = t^-1", conjugate(t, a), t_inv),
        _truth_check("t^a != t", conjugate(t, a) != t),
        _identity_check(
            "t = (x^t y, y)(t^-1)^(1) s",
            t,
            wreath([compose(compose(x_t, y), t_inv), compose(y, t_inv)], SWAP),
        ),
        _identity_check(
            "t^-1 = (y^(t^-1), x y^(t^-1)) t^(1) s",
            t_inv,
            wreath([compose(y_t_inv, t), compose(compose(x, y_t_inv), t)], SWAP),
        ),
        _identity_check("x^t = (x y^(t^-1))^(1) s", x_t, sh(compose(x, y_t_inv))),
        _identity_check("y^(t^-1) = (x^t)^(1)", y_t_inv, level(x_t)),
        _identity_check("(s^(0))^t = (x, x) s", conjugate(sigma0, t), sh(x)),
        _identity_check("(s^(0))^(t^-1) = (x^t, x^t) s", conjugate(sigma0, t_inv), sh(x_t)),
    ]
    for n in range(1, depth + 1):
        backwards = LaurentPoly.from_exponents(range(0, -n, -1))
        forwards = LaurentPoly.from_exponents(range(1, n + 1))
        checks.extend(
            [
                _identity_check(
                    f"x^(t^{n}) expansion",
                    conj_power_t(x, n),
                    sh(compose(laurent_power(x, backwards), conj_power_t(y, -n))),
                ),
                _identity_check(f"y^(t^{n}) expansion", conj_power_t(y, n), level(conj_power_t(x, -n))),
                _identity_check(
                    f"x^(t^-{n}) expansion",
                    conj_power_t(x, -n),
                    sh(compose(laurent_power(x, forwards), conj_power_t(y, n))),
                ),
                _identity_check(f"y^(t^-{n}) expansion", conj_power_t(y, -n), level(conj_power_t(x, n))),
            ]
        )
    rng = random.Random(seed)
    for _ in range(samples):
        p, q = (Poly(tuple(rng.randrange(2) for _ in range(5)), 2) for _ in range(2))
        checks.extend(_pq_conjugation_checks(_laurent(p), _laurent(q)))
    passed = sum(check.holds for check in checks)
    logger.info("%d of %d relations hold", passed, len(checks))
    return checks


def _polys(degree: int):
    """All polynomials over Z_2 of degree <= `degree`, indexed by bit mask."""
    return [Poly(tuple((mask >> i) & 1 for i in range(degree + 1)), 2) for mask in range(2 ** (degree + 1))]


def _dynamics_verdicts(degree: int) -> Dict[PQState, bool]:
    """Whether each (p, q, sign) state with degree <= `degree` is nontrivial.

    A homogeneous element is trivial iff every state along its level
    sections acts trivially on the first letter. `pq_step` never raises the
    degree, so each orbit ends in a cycle of states in this finite set.
    """
    polys = _polys(degree)
    verdict = {}
    for p in polys:
        for q in polys:
            for sign in (1, -1):
                start = PQState(p, q, sign)
                if start in verdict:
                    continue
                path = []
                on_path = {}
                state = start
                while state not in verdict and state not in on_path:
                    on_path[state] = len(path)
                    path.append(state)
                    following = pq_step(state)
                    if following.degree > state.degree:
                        raise AffineTreesError(f"pq_step raised the degree of {state}")
                    state = following
                if state in verdict:
                    tail = verdict[state]
                else:
                    cycle = path[on_path[state] :]
                    tail = any(s.swaps_root for s in cycle)
                    for s in cycle:
                        verdict[s] = tail
                    path = path[: on_path[state]]
                for s in reversed(path):
                    tail = tail or s.swaps_root
                    verdict[s] = tail
    return verdict


@dataclass
class ScanReport:
    """Result of `nontriviality_scan()`.

    Attributes:
        degree (int): Largest degree scanned.
        pairs (int): Number of nonzero pairs (p, q).
        automaton_trivial (list): Pairs the automaton oracle found trivial.
        dynamics_trivial (list): Pairs the (p, q) dynamics found trivial.
        disagreements (list): Pairs on which the two oracles differ.
        direct_checked (int): Pairs also tested by a direct product.
    """

    degree: int
    pairs: int = 0
    automaton_trivial: List[Tuple[str, str]] = field(default_factory=list)
    dynamics_trivial: List[Tuple[str, str]] = field(default_factory=list)
    disagreements: List[Tuple[str, str]] = field(default_factory=list)
    direct_checked: int = 0

    @property
    def all_nontrivial(self) -> bool:
        """Both oracles agree that every pair is nontrivial."""
        return not (self.automaton_trivial or self.dynamics_trivial or self.disagreements)


def nontriviality_scan(degree: int = None, direct_degree: int = None) -> ScanReport:
    """Checks that x^p(t) y^q(t) != 1 for all nonzero (p, q) of bounded degree.

    Automaton oracle: x^p and y^q are involutions, so x^p y^q = 1 iff their
    canonical forms coincide. Pairs up to `direct_degree` are also multiplied
    out. Dynamics oracle: `_dynamics_verdicts()`.
    """
    degree = default_config["scan_degree"] if degree is None else degree
    direct_degree = default_config["scan_direct_degree"] if direct_degree is None else direct_degree
    if degree < 0:
        raise ValueError("The scan degree must be non-negative")
    group = build_G()
    polys = _polys(degree)

    x_powers = [identity(2)]
    y_powers = [identity(2)]
    for mask in range(1, len(polys)):
        top = mask.bit_length() - 1
        rest = mask & ~(1 << top)
        x_powers.append(compose(x_powers[rest], conj_power_t(group.x, top)))
        y_powers.append(compose(y_powers[rest], conj_power_t(group.y, top)))
    logger.debug("Built %d canonical powers of x and y", len(polys))

    y_index = defaultdict(set)
    for mask, element in enumerate(y_powers):
        y_index[element].add(mask)

    dynamics = _dynamics_verdicts(degree)
    report = ScanReport(degree)
    for p_mask, p in enumerate(polys):
        matches = y_index.get(x_powers[p_mask], set())
        for q_mask, q in enumerate(polys):
            if not p_mask and not q_mask:
                continue
            report.pairs += 1
            label = (str(p), str(q))
            automaton_nontrivial = q_mask not in matches
            if max(p.degree, q.degree) <= direct_degree:
                direct = not is_identity(compose(x_powers[p_mask], y_powers[q_mask]))
                report.direct_checked += 1
                if direct != automaton_nontrivial:
                    report.disagreements.append(label)
            dynamics_nontrivial = dynamics[PQState(p, q, 1)]
            if not automaton_nontrivial:
                report.automaton_trivial.append(label)
            if not dynamics_nontrivial:
                report.dynamics_trivial.append(label)
            if automaton_nontrivial != dynamics_nontrivial:
                report.disagreements.append(label)
    if report.disagreements:
        logger.error("Oracles disagree on %d pairs", len(report.disagreements))
    logger.info("Scanned %d pairs up to degree %d", report.pairs, degree)
    return report


@dataclass(frozen=True)
class DegreeAccount:
    """Degree bookkeeping that reduces (p, q) to a pair of equal degrees.

    Attributes:
        case (str): `I` (deg p < deg q), `II` (deg p = deg q + 1),
            `III` (deg p > deg q + 1) or `equal`.
        trail (tuple): The states visited, conjugation by a included.
        holds (bool): Every step changed the degrees as expected.
    """

    case: str
    trail: Tuple[PQState, ...]
    holds: bool

    @property
    def final(self) -> PQState:
        """The last state of the trail."""
        return self.trail[-1]


def _classify(state: PQState) -> str:
    p, q = state.p.degree, state.q.degree
    if p == q:
        return "equal"
    if p < q:
        return "I"
    if p == q + 1:
        return "II"
    return "III"


def degree_accounting(p: Poly, q: Poly) -> DegreeAccount:
    """Follows the section steps that turn (p, q)+ into an equal-degree pair.

    Case I takes two steps and keeps max degree; case II conjugates by a and
    takes one step, landing in case I; case III takes two steps, landing in
    case II.
    """
    state = PQState(p, q, 1)
    top = state.degree
    if top < 2:
        raise ValueError("Degree accounting needs max(deg p, deg q) >= 2")
    case = _classify(state)
    trail = [state]
    holds = True
    while _classify(state) != "equal":
        current = _classify(state)
        if current == "I":
            state = pq_step(pq_step(state))
            holds = holds and state.p.degree == top and state.q.degree == top
        elif current == "II":
            conjugated = conjugate_pq_by_a(state)
            trail.append(conjugated)
            state = pq_step(conjugated)
            holds = holds and state.p.degree < top and state.q.degree == top
        else:
            state = pq_step(pq_step(state))
            holds = holds and state.p.degree == top and state.q.degree == top - 1
        trail.append(state)
        if not holds:
            logger.warning("Degree accounting failed at %s", state)
            break
    return DegreeAccount(case, tuple(trail), holds)


@dataclass(frozen=True)
class RankEvidence:
    """Result of `rank_evidence()`.

    Attributes:
        generators (int): Number of conjugates x^(t^i), y^(t^j) used.
        involutions (bool): Each generator squares to 1.
        commuting (bool): The generators commute pairwise.
        distinct_small_products (bool): Products of at most two generators are
            pairwise distinct, i.e. no product of at most four is trivial.
        full_checked (bool): Whether all 2^n products were enumerated.
        full_distinct (bool): All 2^n products distinct (if enumerated).
    """

    generators: int
    involutions: bool
    commuting: bool
    distinct_small_products: bool
    full_checked: bool = False
    full_distinct: bool = True

    @property
    def independent(self) -> bool:
        """No relation was found among the generators."""
        return self.involutions and self.commuting and self.distinct_small_products and self.full_distinct


def rank_evidence(radius: int = 3, full: bool = False) -> RankEvidence:
    """Evidence that x^(t^i), y^(t^j) for |i|, |j| <= radius are independent."""
    group = build_G()
    generators = [conj_power_t(group.x, i) for i in range(-radius, radius + 1)]
    generators += [conj_power_t(group.y, j) for j in range(-radius, radius + 1)]
    unit = identity(2)
    involutions = all(is_identity(compose(g, g)) for g in generators)
    commuting = all(compose(g, h) == compose(h, g) for g, h in combinations(generators, 2))
    small = [unit] + generators + [compose(g, h) for g, h in combinations(generators, 2)]
    distinct = len(set(small)) == len(small)
    evidence = RankEvidence(len(generators), involutions, commuting, distinct)
    if not full:
        return evidence
    products = {unit}
    current = unit
    # Gray code order: each product differs from the previous by one generator.
    for step in range(1, 2 ** len(generators)):
        flip = (step & -step).bit_length() - 1
        current = compose(current, generators[flip])
        products.add(current)
    return RankEvidence(
        len(generators),
        involutions,
        commuting,
        distinct,
        True,
        len(products) == 2 ** len(generators),
    )


def render_corner(matrix: DiagPeriodicMatrix, size: int = None) -> str:
    """Text picture of the top left corner, a black square for each 1."""
    size = default_config["render_size"] if size is None else size
    return "\n".join(
        "".join("■" if value else "·" for value in row) for row in matrix.corner(size)
    )


T_VECTOR = EpSeq((), (1, 0, 0, 1, 1, 1, 0, 0), 2)
"""Image of 0^inf under t."""

T_ODD_ROW = EpSeq((1,), (1, 0), 2)
T_EVEN_ROW = EpSeq((1,), (1, 1, 1, 0), 2)


@dataclass
class TAffineReport:
    """Result of `t_affine_data()`.

    Attributes:
        data (AffineAutomorphism): The detected data, or `None` on refutation.
        vector_matches (bool): b = (1,0,0,1,1,1,0,0)^inf.
        row_mismatches (list): Rows among 1..8 that differ from the closed form.
        shift_invariant (bool): sigma^2(A) = A.
        corner (list): The top left corner of A as 0/1 rows.
        rendering (str): `render_corner()` of A.
    """

    data: Optional[AffineAutomorphism]
    vector_matches: bool = False
    row_mismatches: List[int] = field(default_factory=list)
    shift_invariant: bool = False
    corner: List[List[int]] = field(default_factory=list)
    rendering: str = ""

    @property
    def matches(self) -> bool:
        """Everything agrees with the closed form."""
        return (
            self.data is not None
            and self.vector_matches
            and not self.row_mismatches
            and self.shift_invariant
        )


def t_affine_data(size: int = None, rows: int = 8) -> TAffineReport:
    """Detects the affine data of t and compares it with its closed form.

    Row 2i-1 of A is [0^(2i-2), 1, (1,0)^inf] and row 2i is
    [0^(2i-1), 1, (1,1,1,0)^inf].
    """
    detected = detect_affine(build_G().t)
    if not isinstance(detected, AffineAutomorphism):
        logger.error("t was not recognised as affine: %s", detected.reason)
        return TAffineReport(None)
    matrix = detected.matrix
    mismatches = []
    for index in range(1, rows + 1):
        expected = T_ODD_ROW if index % 2 else T_EVEN_ROW
        if matrix.row_from_diagonal(index) != expected:
            logger.warning("Row %d of A is %s", index, matrix.row(index))
            mismatches.append(index)
    size = default_config["render_size"] if size is None else size
    return TAffineReport(
        detected,
        detected.vector == T_VECTOR,
        mismatches,
        matrix.shift().shift() == matrix,
        matrix.corner(size),
        render_corner(matrix, size),
    )
