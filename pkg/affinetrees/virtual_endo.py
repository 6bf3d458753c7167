"""
This sub-module contains state-closed representations of the lamplighter
group Z_2 wr Z = <a> wr <x> on the binary tree, built from similarity pairs.

Elements are written a^p(x) x^n with p a Laurent polynomial over Z_2 and
a^(x^k) = x^-k a x^k. The index two subgroup H = A_0 <x> consists of the
elements with p(1) = 0, and the virtual endomorphism is

    f(a^((1+x) r(x)) x^n) = a^(u(x) r(x)) f(x)^n.

Every state of phi(g) is again phi of a lamplighter element, so the
representation is unfolded lazily instead of as a finite automaton.

Contents:
    - `LamplighterElement` / `ll_mul()` / `ll_inv()` - The group law.
    - `SimilarityPair` / `decompose_H()` / `apply_f()` - The virtual endomorphism.
    - `wreath_decompose()` / `act_word_rep()` / `portrait_rep()` - The representation phi.
    - `base_sh_check()` / `faithfulness_sample()` - Bounded checks on phi.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple, Union

from affinetrees.exceptions import LetterRangeError, NotInSubgroupError, SimilarityPairError
from affinetrees.mealy import Permutation, Portrait
from affinetrees.utils import default_config
from affinetrees.zd_algebra import LaurentPoly, Poly

logger = logging.getLogger(__name__)

SWAP = Permutation((1, 0))
STAY = Permutation((0, 1))


@dataclass(frozen=True)
class LamplighterElement:
    """The element a^lamp(x) x^shift of Z_2 wr Z."""

    lamp: LaurentPoly = field(default_factory=LaurentPoly)
    shift: int = 0

    def __post_init__(self):
        if self.lamp.modulus != 2:
            raise ValueError("Lamp polynomials live over Z_2")

    @classmethod
    def identity(cls) -> "LamplighterElement":
        """The identity (0, 0)."""
        return cls(LaurentPoly(), 0)

    @classmethod
    def generator_a(cls) -> "LamplighterElement":
        """The lamp generator a."""
        return cls(LaurentPoly((1,)), 0)

    @classmethod
    def generator_x(cls) -> "LamplighterElement":
        """The shift generator x."""
        return cls(LaurentPoly(), 1)

    @classmethod
    def lamps(cls, lamp: Union[str, LaurentPoly]) -> "LamplighterElement":
        """a^lamp, given as a Laurent polynomial or a string such as `1+x^-1`."""
        if isinstance(lamp, str):
            lamp = LaurentPoly.parse(lamp, 2, "x")
        return cls(lamp, 0)

    @property
    def parity(self) -> int:
        """lamp(1) over Z_2; zero exactly on H."""
        return self.lamp.at_one()

    def in_h(self) -> bool:
        """Membership in H = A_0 <x>."""
        return self.parity == 0

    def __mul__(self, other: "LamplighterElement") -> "LamplighterElement":
        return ll_mul(self, other)

    def __pow__(self, exponent: int) -> "LamplighterElement":
        base = self if exponent >= 0 else ll_inv(self)
        result = LamplighterElement.identity()
        for _ in range(abs(exponent)):
            result = ll_mul(result, base)
        return result

    def __str__(self):
        parts = []
        if self.lamp:
            parts.append(f"a^({self.lamp.format('x')})")
        if self.shift:
            parts.append(f"x^{self.shift}" if self.shift != 1 else "x")
        return "".join(parts) or "1"


def ll_mul(left: LamplighterElement, right: LamplighterElement) -> LamplighterElement:
    """(p, n)(q, m) = (p + x^-n q, n + m)."""
    return LamplighterElement(left.lamp + right.lamp.shift(-left.shift), left.shift + right.shift)


def ll_inv(element: LamplighterElement) -> LamplighterElement:
    """(p, n)^-1 = (-x^n p, -n)."""
    return LamplighterElement(-element.lamp.shift(element.shift), -element.shift)


def decompose_H(element: LamplighterElement) -> Tuple[LaurentPoly, int]:  # pylint: disable=C0103
    """Writes an element of H as a^((1+x) r) x^n.

    Returns:
        tuple: `(r, n)`.

    Raises:
        NotInSubgroupError: The lamp polynomial has an odd number of terms.
    """
    if not element.in_h():
        raise NotInSubgroupError(f"{element} is not in H: its lamp has odd weight")
    return element.lamp.divide_by_one_plus_x(), element.shift


@dataclass(frozen=True)
class SimilarityPair:
    """The pair (H, f) with H = A_0 <x> and f given by u(x) and f(x).

    Raises:
        SimilarityPairError: 1 + x divides u, or f(x) does not have shift 1.
    """

    u: LaurentPoly
    fx: LamplighterElement

    def __post_init__(self):
        u = self.u
        if isinstance(u, Poly):
            u = LaurentPoly.from_poly(u)
        if isinstance(u, str):
            u = LaurentPoly.parse(u, 2, "x")
        if u.modulus != 2:
            raise SimilarityPairError("u must be a polynomial over Z_2")
        if u.at_one() == 0:
            raise SimilarityPairError(f"1+x divides u = {u}; the pair would not be simple")
        if self.fx.shift != 1:
            raise SimilarityPairError(
                f"f(x) must have shift 1 for f to be a homomorphism on H, got {self.fx.shift}"
            )
        object.__setattr__(self, "u", u)


def apply_f(pair: SimilarityPair, element: LamplighterElement) -> LamplighterElement:
    """f(a^((1+x) r) x^n) = a^(u r) f(x)^n."""
    quotient, shift = decompose_H(element)
    return ll_mul(LamplighterElement(pair.u * quotient, 0), pair.fx**shift)


_TRANSVERSAL = (LamplighterElement.identity(), LamplighterElement.generator_a())


def wreath_decompose(pair: SimilarityPair, element: LamplighterElement):
    """First level of phi(g) for the transversal {e, a}.

    Returns:
        tuple: `(g_0, g_1, swap)` such that phi(g) = (phi(g_0), phi(g_1)) s^swap.
    """
    swap = element.parity == 1
    sections = []
    for index, coset in enumerate(_TRANSVERSAL):
        target = _TRANSVERSAL[index ^ element.parity]
        schreier = ll_mul(ll_mul(coset, element), ll_inv(target))
        sections.append(apply_f(pair, schreier))
    return sections[0], sections[1], swap


def act_word_rep(pair: SimilarityPair, element: LamplighterElement, word: Sequence[int]):
    """Image of a binary word under phi(element)."""
    output = []
    state = element
    for letter in word:
        if letter not in (0, 1):
            raise LetterRangeError(f"Letter {letter!r} is not binary")
        first, second, swap = wreath_decompose(pair, state)
        output.append(letter ^ int(swap))
        state = first if letter == 0 else second
    return tuple(output)


@dataclass
class RepPortrait:
    """A portrait of phi(g) together with the size of the state set explored."""

    portrait: Portrait
    states: int
    complete: bool


def portrait_rep(
    pair: SimilarityPair, element: LamplighterElement, depth: int = None, state_budget: int = None
) -> RepPortrait:
    """Depth-k portrait of phi(element) by memoised unfolding.

    Unfolding stops early, with `complete=False`, once more than
    `state_budget` distinct elements have been decomposed.
    """
    depth = default_config["vrep_depth"] if depth is None else depth
    budget = default_config["vrep_state_budget"] if state_budget is None else state_budget
    if depth < 0:
        raise ValueError("Portrait depth must be non-negative")
    memo: Dict[LamplighterElement, tuple] = {}
    permutations = {}
    frontier = [((), element)]
    complete = True
    for _ in range(depth):
        following = []
        for word, state in frontier:
            if state not in memo:
                if len(memo) >= budget:
                    complete = False
                    break
                memo[state] = wreath_decompose(pair, state)
            first, second, swap = memo[state]
            permutations[word] = SWAP if swap else STAY
            following.append((word + (0,), first))
            following.append((word + (1,), second))
        if not complete:
            logger.warning("Representation unfolding stopped after %d states", len(memo))
            break
        frontier = following
    return RepPortrait(Portrait(depth, 2, permutations, complete), len(memo), complete)


def _support_lamps(support: int):
    """All lamp polynomials with exponents in [-support, support]."""
    exponents = range(-support, support + 1)
    for mask in range(2 ** len(exponents)):
        yield LaurentPoly.from_exponents(e for i, e in enumerate(exponents) if mask >> i & 1)


@dataclass
class BaseHomogeneityReport:
    """Result of `base_sh_check()`.

    Attributes:
        depth (int): Portrait depth.
        support (int): Lamps range over exponents in [-support, support].
        checked (int): Number of lamp elements checked.
        failures (list): Lamps whose portrait is not level-constant on the
            levels that were fully unfolded.
        incomplete (list): Lamps whose unfolding hit the state budget.
    """

    depth: int
    support: int
    checked: int = 0
    failures: List[str] = field(default_factory=list)
    incomplete: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """Every base group element was unfolded to full depth and is level-constant."""
        return not self.failures and not self.incomplete


def base_sh_check(
    pair: SimilarityPair, depth: int = None, support: int = None, state_budget: int = None
) -> BaseHomogeneityReport:
    """Checks that phi(a^s) is level-constant to `depth` for all lamps s of bounded support."""
    depth = default_config["vrep_depth"] if depth is None else depth
    support = default_config["vrep_support"] if support is None else support
    if depth < 1:
        raise ValueError("The homogeneity check needs depth >= 1")
    report = BaseHomogeneityReport(depth, support)
    for lamp in _support_lamps(support):
        result = portrait_rep(pair, LamplighterElement(lamp, 0), depth, state_budget)
        report.checked += 1
        if not result.complete:
            report.incomplete.append(lamp.format("x"))
        levels = [
            length for length in range(depth) if len(result.portrait.level(length)) == 2**length
        ]
        if not all(result.portrait.is_level_constant(length) for length in levels):
            report.failures.append(lamp.format("x"))
    if report.incomplete:
        logger.warning(
            "%d base group elements were not unfolded to depth %d", len(report.incomplete), depth
        )
    logger.info("Checked %d base group elements to depth %d", report.checked, depth)
    return report


@dataclass
class FaithfulnessReport:
    """Result of `faithfulness_sample()`; `collisions` lists pairs with equal portraits."""

    depth: int
    support: int
    max_shift: int
    sampled: int
    collisions: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def faithful(self) -> bool:
        """No two sampled elements share a portrait."""
        return not self.collisions


def faithfulness_sample(
    pair: SimilarityPair,
    depth: Optional[int] = None,
    support: Optional[int] = None,
    max_shift: Optional[int] = None,
) -> FaithfulnessReport:
    """Compares the portraits of a^s x^n for lamps of bounded support and |n| <= max_shift.

    Defaults come from `faithfulness_depth`, `faithfulness_support` and
    `faithfulness_shift`.
    """
    depth = default_config["faithfulness_depth"] if depth is None else depth
    support = default_config["faithfulness_support"] if support is None else support
    max_shift = default_config["faithfulness_shift"] if max_shift is None else max_shift
    elements = [
        LamplighterElement(lamp, shift)
        for lamp, shift in product(_support_lamps(support), range(-max_shift, max_shift + 1))
    ]
    classes = defaultdict(list)
    for element in elements:
        permutations = portrait_rep(pair, element, depth).portrait.permutations
        classes[tuple(sorted(permutations.items()))].append(element)
    report = FaithfulnessReport(depth, support, max_shift, len(elements))
    for members in classes.values():
        report.collisions.extend((str(a), str(b)) for a, b in combinations(members, 2))
    if report.collisions:
        logger.warning("%d sampled pairs share a depth %d portrait", len(report.collisions), depth)
    return report
