"""
This sub-module contains affine automorphisms of the d-ary tree.

An affine automorphism acts on boundary points, seen as row vectors over
Z_d, by `x -> b + x A` with `A` upper triangular with unit diagonal. It is
finite-state exactly when `A`, its rows and `b` are eventually periodic,
which is what `DiagPeriodicMatrix` and `EpSeq` store.

Contents:
    - `AffineAutomorphism` / `PowerSeriesAffine` - The two parameterisations.
    - `affine_apply()` / `affine_compose()` / `affine_inverse()` / `affine_power()` - Group law.
    - `affine_section()` / `affine_to_automaton()` - States and finite automata.
    - `detect_affine()` - Recovers (A, b) from an automaton, or refutes affineness.
    - `sigma_n()` / `delta_element()` / `is_affine_shift()` - The shift group Aff_I.
    - `normalizer_certificate()` / `cycle_divisibility_check()` /
      `centralizer_spot_check()` - Reports that cross-check the theory on examples.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from affinetrees.exceptions import (
    AffineDetectionError,
    LetterRangeError,
    ModulusMismatchError,
    NonUnitError,
    StateBudgetExceeded,
)
from affinetrees.mealy import (
    MealyMachine,
    Permutation,
    TreeAutomorphism,
    apply_boundary,
    compose,
    conjugate,
    distinguishing_word,
    equal,
    inverse,
    is_spherically_homogeneous,
    minimize,
    portrait,
    sh_signature,
)
from affinetrees.utils import default_config
from affinetrees.zd_algebra import (
    DiagPeriodicMatrix,
    EpSeq,
    Poly,
    RationalSeries,
    is_unit,
    mat_mul,
    mat_vec,
    series_to_epseq,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AffineAutomorphism:
    """The automorphism pi_{A,b}: x -> b + x A.

    Attributes:
        matrix (DiagPeriodicMatrix): The matrix A.
        vector (EpSeq): The translation vector b.
    """

    matrix: DiagPeriodicMatrix
    vector: EpSeq

    def __post_init__(self):
        if self.matrix.modulus != self.vector.modulus:
            raise ModulusMismatchError(
                f"Matrix over Z_{self.matrix.modulus}, vector over Z_{self.vector.modulus}"
            )

    @property
    def modulus(self) -> int:
        """The ring Z_d, equal to the alphabet size."""
        return self.matrix.modulus

    @classmethod
    def identity(cls, modulus: int = 2) -> "AffineAutomorphism":
        """pi_{I,0}."""
        return cls(DiagPeriodicMatrix.identity(modulus), EpSeq.zero(modulus))

    @classmethod
    def translation(cls, vector: EpSeq) -> "AffineAutomorphism":
        """The affine shift pi_{I,b}."""
        return cls(DiagPeriodicMatrix.identity(vector.modulus), vector)

    def root_permutation(self) -> Permutation:
        """Action on the first letter, x -> b_1 + a_11 x."""
        shift = self.vector.entry(1)
        factor = self.matrix.entry(1, 1)
        return Permutation(tuple((shift + factor * x) % self.modulus for x in range(self.modulus)))

    def to_dict(self) -> dict:
        """JSON friendly form."""
        return {"d": self.modulus, "A": self.matrix.to_dict(), "b": self.vector.to_text()}

    @classmethod
    def from_dict(cls, data: dict) -> "AffineAutomorphism":
        """Inverse of `to_dict()`."""
        matrix = DiagPeriodicMatrix.from_dict(data["A"])
        return cls(matrix, EpSeq.from_text(data["b"], int(data["d"])))


@dataclass(frozen=True, eq=False)
class PowerSeriesAffine:
    """tau_{f,b}: g(t) -> b(t) + g(t) f(t) over Z_d[[t]].

    Raises:
        NonUnitError: The constant term of f is not a unit.
    """

    factor: RationalSeries
    offset: RationalSeries

    def __post_init__(self):
        if self.factor.modulus != self.offset.modulus:
            raise ModulusMismatchError("f and b live over different rings")
        if not is_unit(self.factor.coefficients(1)[0], self.factor.modulus):
            raise NonUnitError("The constant term of f must be a unit")

    @property
    def modulus(self) -> int:
        """The ring Z_d."""
        return self.factor.modulus


@dataclass(frozen=True)
class AffineRefutation:
    """Evidence that an automorphism is not affine.

    Attributes:
        reason (str): Short description of the failed step.
        word (tuple): A word on which the automorphism differs from the
            extracted affine candidate, if a candidate was built.
        basis_index (int): The basis vector e_i whose image broke linearity.
        position (int): The coordinate at which it broke.
        candidate (AffineAutomorphism): The extracted data that `word` refutes.
    """

    reason: str
    word: Optional[Tuple[int, ...]] = None
    basis_index: Optional[int] = None
    position: Optional[int] = None
    candidate: Optional[AffineAutomorphism] = None

    def to_dict(self) -> dict:
        """JSON friendly form; the word is a digit string."""
        return {
            "reason": self.reason,
            "word": None if self.word is None else "".join(str(x) for x in self.word),
            "basis_index": self.basis_index,
            "position": self.position,
            "candidate": None if self.candidate is None else self.candidate.to_dict(),
        }


def affine_apply(automorphism: AffineAutomorphism, point: EpSeq) -> EpSeq:
    """Image b + x A of a boundary point."""
    if point.modulus != automorphism.modulus:
        raise ModulusMismatchError("Point and automorphism live over different rings")
    return automorphism.vector + mat_vec(point, automorphism.matrix)


def affine_compose(left: AffineAutomorphism, right: AffineAutomorphism) -> AffineAutomorphism:
    """pi_{A,b} pi_{A',b'} = pi_{AA', bA' + b'} (apply the left factor first)."""
    if left.modulus != right.modulus:
        raise ModulusMismatchError("Affine automorphisms over different rings")
    return AffineAutomorphism(
        mat_mul(left.matrix, right.matrix), mat_vec(left.vector, right.matrix) + right.vector
    )


def affine_section(automorphism: AffineAutomorphism, letter: int) -> AffineAutomorphism:
    """The state at a letter: pi_{sigma(A), x sigma(row_1 A) + sigma(b)}."""
    if not 0 <= letter < automorphism.modulus:
        raise LetterRangeError(f"Letter {letter} is outside Z_{automorphism.modulus}")
    matrix = automorphism.matrix
    vector = matrix.row(1).shift().scale(letter) + automorphism.vector.shift()
    return AffineAutomorphism(matrix.shift(), vector)


def affine_to_automaton(automorphism: AffineAutomorphism, state_budget: int = None):
    """The canonical Mealy automaton of a finite-state affine automorphism.

    States are the distinct sections, found by BFS over `affine_section()`.

    Raises:
        StateBudgetExceeded: More sections than `state_budget`.
    """
    budget = default_config["state_budget"] if state_budget is None else state_budget
    d = automorphism.modulus
    index = {automorphism: 0}
    queue = deque([automorphism])
    states = [automorphism]
    transitions = []
    while queue:
        current = queue.popleft()
        row = []
        for letter in range(d):
            following = affine_section(current, letter)
            if following not in index:
                index[following] = len(index)
                if len(index) > budget:
                    raise StateBudgetExceeded(
                        f"Affine automorphism has more than {budget} distinct sections"
                    )
                states.append(following)
                queue.append(following)
            row.append(index[following])
        transitions.append(tuple(row))
    outputs = tuple(state.root_permutation() for state in states)
    logger.debug("Affine automorphism has %d distinct sections", len(states))
    return minimize(TreeAutomorphism(MealyMachine(d, tuple(transitions), outputs), 0))


def detect_affine(
    g: TreeAutomorphism, state_budget: int = None
) -> Union[AffineAutomorphism, AffineRefutation]:
    """Decides whether a finite-state automorphism is affine.

    If g = pi_{A,b} then b = g(0^inf) and the state at 0^m is
    pi_{sigma^m(A), sigma^m(b)}, whose first row is its image of e_1 minus
    its image of 0^inf. The states along the 0-path repeat, which bounds the
    preperiod and period of the candidate A. The candidate is then compared
    with g as an automaton.

    Returns:
        AffineAutomorphism or AffineRefutation: The unique affine data of g, or
        a witness that g is not affine.
    """
    g = minimize(g)
    d = g.degree
    zero = EpSeq.zero(d)
    first_basis = EpSeq.basis(1, d)
    vector = apply_boundary(g, zero)

    machine = g.machine
    path = []
    seen = {}
    state = g.start
    while state not in seen:
        seen[state] = len(path)
        path.append(state)
        state = machine.transitions[state][0]
    start = seen[state]

    rows = []
    for level, node in enumerate(path):
        section = TreeAutomorphism(machine, node)
        row = apply_boundary(section, first_basis) - apply_boundary(section, zero)
        if not is_unit(row.entry(1), d):
            logger.debug("Diagonal entry %d at level %d is not a unit", row.entry(1), level + 1)
            return AffineRefutation(
                "non-unit diagonal entry", basis_index=level + 1, position=level + 1
            )
        rows.append(row)
    logger.debug("Extraction window: preperiod %d, period %d", start, len(path) - start)

    candidate = AffineAutomorphism(
        DiagPeriodicMatrix(tuple(rows[:start]), tuple(rows[start:]), d), vector
    )
    word = distinguishing_word(affine_to_automaton(candidate, state_budget), g)
    if word is not None:
        return AffineRefutation(
            "candidate disagrees with the automaton", word=word, candidate=candidate
        )
    return candidate


def affine_inverse(automorphism: AffineAutomorphism, state_budget: int = None):
    """pi^-1, computed through its automaton and certified by A A^-1 = I.

    Raises:
        AffineDetectionError: The inverse could not be recovered or certified.
    """
    automaton = affine_to_automaton(automorphism, state_budget)
    result = detect_affine(inverse(automaton), state_budget)
    if isinstance(result, AffineRefutation):
        raise AffineDetectionError(f"Inverse of an affine automorphism refuted: {result.reason}")
    if not mat_mul(automorphism.matrix, result.matrix).is_identity():
        raise AffineDetectionError("Detected inverse matrix does not satisfy A A^-1 = I")
    if affine_compose(automorphism, result) != AffineAutomorphism.identity(automorphism.modulus):
        raise AffineDetectionError("Detected inverse does not cancel the translation")
    return result


def affine_power(automorphism: AffineAutomorphism, exponent: int, state_budget: int = None):
    """pi^exponent by repeated squaring."""
    if exponent < 0:
        automorphism, exponent = affine_inverse(automorphism, state_budget), -exponent
    result = AffineAutomorphism.identity(automorphism.modulus)
    square = automorphism
    while exponent:
        if exponent & 1:
            result = affine_compose(result, square)
        exponent >>= 1
        if exponent:
            square = affine_compose(square, square)
    return result


def from_power_series(tau: PowerSeriesAffine) -> AffineAutomorphism:
    """The matrix form of tau_{f,b}: a constant band matrix built from f."""
    return AffineAutomorphism(
        DiagPeriodicMatrix.band(series_to_epseq(tau.factor)), series_to_epseq(tau.offset)
    )


def power_series_state(tau: PowerSeriesAffine, letter: int) -> PowerSeriesAffine:
    """tau_{f,b}|_x = tau_{f, x sigma(f) + sigma(b)}."""
    if not 0 <= letter < tau.modulus:
        raise LetterRangeError(f"Letter {letter} is outside Z_{tau.modulus}")
    return PowerSeriesAffine(tau.factor, tau.factor.shift().scale(letter) + tau.offset.shift())


def sigma_n(level: int, degree: int = 2) -> TreeAutomorphism:
    """sigma^(level): the long cycle on coordinate level+1, trivial elsewhere."""
    if level < 0:
        raise ValueError("sigma^(n) is defined for n >= 0")
    identity_state = level + 1
    transitions = [(i + 1,) * degree for i in range(level + 1)]
    transitions.append((identity_state,) * degree)
    outputs = [Permutation.identity(degree)] * level
    outputs += [Permutation.long_cycle(degree), Permutation.identity(degree)]
    machine = MealyMachine(degree, tuple(transitions), tuple(outputs))
    return minimize(TreeAutomorphism(machine, 0))


def delta_element(poly: Poly) -> AffineAutomorphism:
    """Addition of a polynomial, pi_{I, coefficients of p}."""
    return AffineAutomorphism.translation(EpSeq(poly.coefficients, (0,), poly.modulus))


def is_affine_shift(g: TreeAutomorphism) -> bool:
    """Whether g lies in Aff_I: homogeneous, with powers of the long cycle on every level."""
    if not is_spherically_homogeneous(g):
        return False
    signature = sh_signature(g)
    return all(perm.is_power_of_cycle() for perm in signature.preperiod + signature.period)


def conjugate_translation(vector: EpSeq, automorphism: AffineAutomorphism) -> AffineAutomorphism:
    """The conjugate of pi_{I,b} by pi_{A,c}, which is pi_{I, bA}."""
    return AffineAutomorphism.translation(mat_vec(vector, automorphism.matrix))


@dataclass(frozen=True)
class NormalizerReport:
    """Result of `normalizer_certificate()`.

    Attributes:
        depth (int): Conjugates of sigma^(n) were checked for n = 0..depth.
        bounded_pass (bool): All of them were affine shifts.
        failed_level (int): First n whose conjugate was not, if any.
        detection (AffineAutomorphism | AffineRefutation): Result of `detect_affine()`.
        status (str): `affine`, `not-affine`, `inconclusive` or `defect`.
    """

    depth: int
    bounded_pass: bool
    failed_level: Optional[int]
    detection: Union[AffineAutomorphism, AffineRefutation]
    status: str

    @property
    def detected(self) -> bool:
        """Whether the detection procedure found affine data."""
        return isinstance(self.detection, AffineAutomorphism)


def normalizer_certificate(g: TreeAutomorphism, depth: int = None, state_budget: int = None):
    """Two independent checks that g normalises Aff_I.

    The bounded check conjugates sigma^(n) by g for n <= depth; the full check
    runs `detect_affine()`. An affine g normalises Aff_I, so a detected g with
    a failing conjugate is reported as a defect. The reverse disagreement only
    means the depth was too small.
    """
    if depth is None:
        depth = default_config["normalizer_depth"]
    failed_level = None
    for level in range(depth + 1):
        if not is_affine_shift(conjugate(sigma_n(level, g.degree), g, state_budget)):
            failed_level = level
            break
    bounded_pass = failed_level is None
    detection = detect_affine(g, state_budget)
    detected = isinstance(detection, AffineAutomorphism)
    if detected and bounded_pass:
        status = "affine"
    elif not detected and not bounded_pass:
        status = "not-affine"
    elif detected:
        status = "defect"
        logger.error("Affine automorphism fails to normalise Aff_I at level %d", failed_level)
    else:
        status = "inconclusive"
        logger.warning("Bounded check passed to depth %d but detection refuted; raise it", depth)
    return NormalizerReport(depth, bounded_pass, failed_level, detection, status)


def _shortest_cycle(machine: MealyMachine) -> int:
    best = None
    for source in range(machine.size):
        distance = {source: 0}
        queue = deque([source])
        while queue:
            state = queue.popleft()
            if best is not None and distance[state] + 1 >= best:
                break
            for target in machine.transitions[state]:
                if target == source:
                    best = distance[state] + 1
                    queue.clear()
                    break
                if target not in distance:
                    distance[target] = distance[state] + 1
                    queue.append(target)
    return best


@dataclass(frozen=True)
class CycleReport:
    """Result of `cycle_divisibility_check()`.

    Attributes:
        shortest_cycle (int): Length of the shortest cycle of the automaton.
        matrix_period (int): Period of A under the shift.
        divides (bool): Whether the period divides the cycle length.
        has_loop (bool): Whether some state is its own section.
        band (bool): Whether A is eventually a constant band (period 1).
        tau_form (bool): Whether A is a constant band from its first row, i.e.
            the automorphism is induced by an affine map of Z_d[[t]].
    """

    shortest_cycle: int
    matrix_period: int
    divides: bool
    has_loop: bool
    band: bool
    tau_form: bool

    @property
    def consistent(self) -> bool:
        """A loop forces period 1, and the period divides every cycle length."""
        return self.divides and (self.band or not self.has_loop)


def cycle_divisibility_check(automorphism: AffineAutomorphism, state_budget: int = None):
    """Compares the shortest cycle of the automaton with the period of A.

    A loop of length one makes A a constant band from the row of the looping
    state on, so `has_loop` implies `band`. Neither implies `tau_form`: a
    base row in front of a band keeps the loop, and a translation by a vector
    of period 2 is in tau form with a shortest cycle of length 2.
    """
    machine = affine_to_automaton(automorphism, state_budget).machine
    shortest = _shortest_cycle(machine)
    period = automorphism.matrix.period
    has_loop = any(state in row for state, row in enumerate(machine.transitions))
    tau_form = period == 1 and automorphism.matrix.preperiod == 0
    return CycleReport(shortest, period, shortest % period == 0, has_loop, period == 1, tau_form)


@dataclass(frozen=True)
class CentralizerReport:
    """Result of `centralizer_spot_check()`."""

    levels: int
    commutes: bool
    level_constant: bool

    @property
    def consistent(self) -> bool:
        """Commuting with sigma^(0..n) forces homogeneous cyclic levels 1..n+1."""
        return not self.commutes or self.level_constant


def centralizer_spot_check(g: TreeAutomorphism, levels: int = 6, state_budget: int = None):
    """Bounded centraliser check against sigma^(0), ..., sigma^(levels).

    If g commutes with all of them, its portrait to depth levels+1 must carry
    one power of the long cycle per level.
    """
    commutes = all(
        equal(
            compose(g, sigma_n(level, g.degree), state_budget),
            compose(sigma_n(level, g.degree), g, state_budget),
            state_budget,
        )
        for level in range(levels + 1)
    )
    view = portrait(g, levels + 1)
    level_constant = all(
        view.is_level_constant(length)
        and all(perm.is_power_of_cycle() for perm in view.level(length))
        for length in range(levels + 1)
    )
    return CentralizerReport(levels, commutes, level_constant)
