"""
This sub-module contains finite invertible Mealy transducers and the tree
automorphisms they define.

Automorphisms act on the right: `compose(g, h)` is the automorphism `gh`
that applies `g` first, so `(gh)(w) = h(g(w))` and the section at a word
`v` is `g|_v * h|_{g(v)}`.

Contents:
    - `Permutation` - A permutation of the alphabet {0, ..., d-1}.
    - `MealyMachine` / `TreeAutomorphism` - Transducers and their initial states.
    - `parse_wreath()` - Reads wreath recursions such as `a=(d,d)s; b=(c,c)`.
    - `minimize()` - Canonical form; equality of automorphisms becomes structural.
    - `compose()` / `inverse()` / `power()` / `conjugate()` / `wreath()` - Group operations.
    - `equal()` / `is_identity()` / `distinguishing_word()` - The word problem.
    - `is_spherically_homogeneous()` / `sh_signature()` - Level-constant automorphisms.
    - `portrait()` / `order_bounded()` / `apply_boundary()` - Finite views of an automorphism.
"""
from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from affinetrees.exceptions import (
    AlphabetMismatchError,
    LetterRangeError,
    NotHomogeneousError,
    NotPermutationError,
    StateBudgetExceeded,
    UndefinedStateError,
    WreathSyntaxError,
)
from affinetrees.utils import default_config, format_word
from affinetrees.zd_algebra import EpSeq, canonical_periodic

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Permutation:
    """A permutation of {0, ..., d-1} given by its list of images."""

    images: Tuple[int, ...]

    def __post_init__(self):
        images = tuple(self.images)
        if sorted(images) != list(range(len(images))):
            raise NotPermutationError(f"{list(images)} is not a permutation of 0..{len(images) - 1}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        """The identity of Sym(d)."""
        return cls(tuple(range(degree)))

    @classmethod
    def long_cycle(cls, degree: int, power: int = 1) -> "Permutation":
        """A power of the long cycle x -> x + 1 mod d."""
        return cls(tuple((x + power) % degree for x in range(degree)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], degree: int) -> "Permutation":
        """Builds a permutation from disjoint cycles.

        Raises:
            NotPermutationError: A letter repeats or lies outside the alphabet.
        """
        images = list(range(degree))
        used = set()
        for cycle in cycles:
            for position, letter in enumerate(cycle):
                if not 0 <= letter < degree or letter in used:
                    raise NotPermutationError(
                        f"Cycle {tuple(cycle)} is not valid on a {degree}-letter alphabet"
                    )
                used.add(letter)
                images[letter] = cycle[(position + 1) % len(cycle)]
        return cls(tuple(images))

    @property
    def degree(self) -> int:
        """Size of the alphabet."""
        return len(self.images)

    def __call__(self, letter: int) -> int:
        return self.images[letter]

    def compose(self, other: "Permutation") -> "Permutation":
        """The product applying `self` first and then `other`."""
        return Permutation(tuple(other.images[x] for x in self.images))

    def inverse(self) -> "Permutation":
        """The inverse permutation."""
        images = [0] * len(self.images)
        for letter, image in enumerate(self.images):
            images[image] = letter
        return Permutation(tuple(images))

    def is_identity(self) -> bool:
        """Whether every letter is fixed."""
        return all(letter == image for letter, image in enumerate(self.images))

    def is_power_of_cycle(self) -> bool:
        """Whether the permutation is x -> x + c mod d for some c."""
        shift = self.images[0]
        return all(image == (x + shift) % self.degree for x, image in enumerate(self.images))

    def cycles(self):
        """Nontrivial cycles, each starting at its least letter."""
        seen = set()
        result = []
        for start in range(self.degree):
            if start in seen or self.images[start] == start:
                continue
            cycle = [start]
            seen.add(start)
            letter = self.images[start]
            while letter != start:
                cycle.append(letter)
                seen.add(letter)
                letter = self.images[letter]
            result.append(tuple(cycle))
        return result

    def __str__(self):
        separator = "" if self.degree <= 10 else ","
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join(
            "(" + separator.join(str(letter) for letter in cycle) + ")" for cycle in cycles
        )


@dataclass(frozen=True)
class MealyMachine:
    """A finite invertible Mealy transducer over the alphabet {0, ..., d-1}.

    Attributes:
        degree (int): Alphabet size d.
        transitions (tuple): `transitions[q][x]` is the state reached from `q` on `x`.
        outputs (tuple): `outputs[q]` is the `Permutation` written by state `q`.
        names (tuple): Optional state names; ignored by equality.
    """

    degree: int
    transitions: Tuple[Tuple[int, ...], ...]
    outputs: Tuple[Permutation, ...]
    names: Tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.degree < 2:
            raise ValueError(f"Alphabet size must be at least 2, got {self.degree}")
        transitions = tuple(tuple(row) for row in self.transitions)
        outputs = tuple(
            out if isinstance(out, Permutation) else Permutation(tuple(out)) for out in self.outputs
        )
        if not transitions or len(transitions) != len(outputs):
            raise ValueError("Every state needs a transition row and an output row")
        for state, (row, out) in enumerate(zip(transitions, outputs)):
            if len(row) != self.degree or out.degree != self.degree:
                raise AlphabetMismatchError(f"State {state} does not have {self.degree} letters")
            if any(not 0 <= target < len(transitions) for target in row):
                raise ValueError(f"State {state} has a transition to a missing state")
        object.__setattr__(self, "transitions", transitions)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def size(self) -> int:
        """Number of states."""
        return len(self.transitions)

    def name(self, state: int) -> str:
        """Name of a state, `q<index>` when unnamed."""
        if state < len(self.names):
            return self.names[state]
        return f"q{state}"


@dataclass(frozen=True, eq=False)
class TreeAutomorphism:
    """An initial Mealy automaton, i.e. an automorphism of the d-ary tree.

    Equality and hashing go through the canonical form, so two automorphisms
    compare equal exactly when they act identically on every word.

    Attributes:
        machine (MealyMachine): The transducer.
        start (int): The initial state.
        canonical (bool): Set on the output of `minimize()`.
    """

    machine: MealyMachine
    start: int = 0
    canonical: bool = field(default=False, compare=False)

    @property
    def degree(self) -> int:
        """Alphabet size d."""
        return self.machine.degree

    @property
    def size(self) -> int:
        """Number of states of the underlying machine."""
        return self.machine.size

    @property
    def permutation(self) -> Permutation:
        """The root permutation."""
        return self.machine.outputs[self.start]

    @property
    def name(self) -> str:
        """Name of the initial state."""
        return self.machine.name(self.start)

    def __call__(self, word: Sequence[int]):
        return act_word(self, word)

    def __mul__(self, other):
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, TreeAutomorphism):
            return NotImplemented
        return minimize(self).machine == minimize(other).machine

    def __hash__(self):
        return hash(minimize(self).machine)

    def __repr__(self):
        return f"TreeAutomorphism({self.name}, degree={self.degree}, states={self.size})"


def _budget(state_budget: Optional[int]) -> int:
    return default_config["state_budget"] if state_budget is None else state_budget


def _same_degree(g: TreeAutomorphism, h: TreeAutomorphism):
    if g.degree != h.degree:
        raise AlphabetMismatchError(
            f"Automorphisms act on trees of degree {g.degree} and {h.degree}"
        )


def _check_word(word: Sequence[int], degree: int):
    for letter in word:
        if not isinstance(letter, int) or not 0 <= letter < degree:
            raise LetterRangeError(f"Letter {letter!r} is outside the alphabet 0..{degree - 1}")


def identity(degree: int) -> TreeAutomorphism:
    """The identity automorphism of the d-ary tree."""
    machine = MealyMachine(degree, ((0,) * degree,), (Permutation.identity(degree),), ("e",))
    return TreeAutomorphism(machine, 0, canonical=True)


def _reachable(g: TreeAutomorphism):
    """States reachable from the start, in BFS order with letters ascending."""
    order = [g.start]
    seen = {g.start}
    queue = deque([g.start])
    while queue:
        state = queue.popleft()
        for target in g.machine.transitions[state]:
            if target not in seen:
                seen.add(target)
                order.append(target)
                queue.append(target)
    return order


def minimize(g: TreeAutomorphism) -> TreeAutomorphism:
    """Canonical form of an automorphism.

    Unreachable states are dropped, behaviourally equivalent states merged by
    partition refinement (initial split by output permutation, then by the
    classes of the successors) and the result renumbered in BFS order from
    the start state. Idempotent; the action on words is unchanged.
    """
    if g.canonical:
        return g
    machine = g.machine
    states = _reachable(g)

    classes = {}
    block_of = {}
    for state in states:
        block_of[state] = classes.setdefault(machine.outputs[state], len(classes))
    while True:
        signatures = {}
        refined = {}
        for state in states:
            signature = (
                block_of[state],
                tuple(block_of[target] for target in machine.transitions[state]),
            )
            refined[state] = signatures.setdefault(signature, len(signatures))
        stable = len(signatures) == len(set(block_of.values()))
        block_of = refined
        if stable:
            break

    representative = {}
    for state in states:
        representative.setdefault(block_of[state], state)
    number = {block_of[g.start]: 0}
    queue = deque([block_of[g.start]])
    order = []
    while queue:
        block = queue.popleft()
        order.append(block)
        for target in machine.transitions[representative[block]]:
            if block_of[target] not in number:
                number[block_of[target]] = len(number)
                queue.append(block_of[target])

    transitions = tuple(
        tuple(number[block_of[t]] for t in machine.transitions[representative[block]])
        for block in order
    )
    outputs = tuple(machine.outputs[representative[block]] for block in order)
    names = tuple(machine.name(representative[block]) for block in order) if machine.names else ()
    logger.debug("Minimised %d reachable states down to %d", len(states), len(order))
    return TreeAutomorphism(MealyMachine(machine.degree, transitions, outputs, names), 0, True)


def act_word(g: TreeAutomorphism, word: Sequence[int]):
    """Image of a finite word under `g`.

    Raises:
        LetterRangeError: A letter lies outside the alphabet.
    """
    word = tuple(word)
    _check_word(word, g.degree)
    machine = g.machine
    state = g.start
    output = []
    for letter in word:
        output.append(machine.outputs[state](letter))
        state = machine.transitions[state][letter]
    return tuple(output)


def section(g: TreeAutomorphism, word: Sequence[int]) -> TreeAutomorphism:
    """The section g|_word, canonicalised."""
    word = tuple(word)
    _check_word(word, g.degree)
    state = g.start
    for letter in word:
        state = g.machine.transitions[state][letter]
    return minimize(TreeAutomorphism(g.machine, state))


def compose(
    g: TreeAutomorphism, h: TreeAutomorphism, state_budget: int = None
) -> TreeAutomorphism:
    """The product gh (apply g, then h) as a minimised automorphism.

    Raises:
        AlphabetMismatchError: The automorphisms act on different trees.
        StateBudgetExceeded: The product automaton outgrows `state_budget`.
    """
    _same_degree(g, h)
    budget = _budget(state_budget)
    left, right = g.machine, h.machine
    start = (g.start, h.start)
    index = {start: 0}
    queue = deque([start])
    transitions = []
    outputs = []
    while queue:
        p, q = queue.popleft()
        row = []
        for letter in range(g.degree):
            middle = left.outputs[p](letter)
            target = (left.transitions[p][letter], right.transitions[q][middle])
            if target not in index:
                index[target] = len(index)
                if len(index) > budget:
                    raise StateBudgetExceeded(
                        f"Product automaton exceeds the budget of {budget} states"
                    )
                queue.append(target)
            row.append(index[target])
        transitions.append(tuple(row))
        outputs.append(left.outputs[p].compose(right.outputs[q]))
    machine = MealyMachine(g.degree, tuple(transitions), tuple(outputs))
    logger.debug("Composed %d x %d states into %d pairs", g.size, h.size, machine.size)
    return minimize(TreeAutomorphism(machine, 0))


def inverse(g: TreeAutomorphism) -> TreeAutomorphism:
    """The inverse automorphism: every state reads what it used to write."""
    machine = g.machine
    transitions = []
    outputs = []
    for state in range(machine.size):
        undo = machine.outputs[state].inverse()
        outputs.append(undo)
        transitions.append(tuple(machine.transitions[state][undo(y)] for y in range(g.degree)))
    return minimize(
        TreeAutomorphism(MealyMachine(g.degree, tuple(transitions), tuple(outputs)), g.start)
    )


def is_identity(g: TreeAutomorphism) -> bool:
    """Whether every reachable state writes the identity permutation."""
    return all(g.machine.outputs[state].is_identity() for state in _reachable(g))


def equal(g: TreeAutomorphism, h: TreeAutomorphism, state_budget: int = None) -> bool:
    """Whether g and h act identically on every word (g h^-1 = 1)."""
    return is_identity(compose(g, inverse(h), state_budget))


def power(g: TreeAutomorphism, exponent: int, state_budget: int = None) -> TreeAutomorphism:
    """g^exponent by repeated squaring; negative exponents use the inverse."""
    if exponent < 0:
        g, exponent = inverse(g), -exponent
    result = identity(g.degree)
    square = minimize(g)
    while exponent:
        if exponent & 1:
            result = compose(result, square, state_budget)
        exponent >>= 1
        if exponent:
            square = compose(square, square, state_budget)
    return result


def conjugate(g: TreeAutomorphism, h: TreeAutomorphism, state_budget: int = None):
    """The conjugate g^h = h^-1 g h."""
    return compose(compose(inverse(h), g, state_budget), h, state_budget)


def wreath(sections: Sequence[TreeAutomorphism], permutation: Permutation) -> TreeAutomorphism:
    """The automorphism (g_0, ..., g_{d-1}) permutation.

    It writes `permutation` at the root and continues as `g_x` below letter x.
    """
    degree = permutation.degree
    if len(sections) != degree:
        raise AlphabetMismatchError(f"Expected {degree} sections, got {len(sections)}")
    transitions = [None]
    outputs = [permutation]
    roots = []
    for item in sections:
        if item.degree != degree:
            raise AlphabetMismatchError("Sections act on trees of a different degree")
        offset = len(transitions)
        roots.append(offset + item.start)
        for state in range(item.size):
            transitions.append(tuple(offset + t for t in item.machine.transitions[state]))
            outputs.append(item.machine.outputs[state])
    transitions[0] = tuple(roots)
    return minimize(TreeAutomorphism(MealyMachine(degree, tuple(transitions), tuple(outputs)), 0))


def distinguishing_word(g: TreeAutomorphism, h: TreeAutomorphism):
    """Shortest word, least in length-lex order, on which g and h differ.

    Returns:
        tuple or None: The word, or `None` when g = h.
    """
    _same_degree(g, h)
    left, right = g.machine, h.machine
    start = (g.start, h.start)
    access = {start: ()}
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        for letter in range(g.degree):
            if left.outputs[p](letter) != right.outputs[q](letter):
                return access[(p, q)] + (letter,)
        for letter in range(g.degree):
            target = (left.transitions[p][letter], right.transitions[q][letter])
            if target not in access:
                access[target] = access[(p, q)] + (letter,)
                queue.append(target)
    return None


@dataclass(frozen=True)
class HomogeneityVerdict:
    """Result of `is_spherically_homogeneous()`; truthy when homogeneous.

    Attributes:
        homogeneous (bool): The verdict.
        witness (tuple): On failure, a word u whose section differs from the
            section at `reference`.
        reference (tuple): The all-zero word of the same length as `witness`.
    """

    homogeneous: bool
    witness: Optional[Tuple[int, ...]] = None
    reference: Optional[Tuple[int, ...]] = None

    def __bool__(self):
        return self.homogeneous


def is_spherically_homogeneous(g: TreeAutomorphism) -> HomogeneityVerdict:
    """Decides whether all sections on each level coincide.

    On a canonical machine the first-level sections are equal iff their
    states are. The check follows the single section downwards until a state
    repeats, so it stops within as many levels as there are states.
    """
    g = minimize(g)
    transitions = g.machine.transitions
    state = g.start
    prefix = ()
    visited = set()
    while state not in visited:
        visited.add(state)
        row = transitions[state]
        for letter, target in enumerate(row):
            if target != row[0]:
                return HomogeneityVerdict(False, prefix + (letter,), prefix + (0,))
        state = row[0]
        prefix += (0,)
    return HomogeneityVerdict(True)


@dataclass(frozen=True)
class LevelSignature:
    """The eventually periodic sequence of level permutations [s_1, s_2, ...]."""

    preperiod: Tuple[Permutation, ...]
    period: Tuple[Permutation, ...]

    def level(self, index: int) -> Permutation:
        """Permutation acting on coordinate `index` (1-based)."""
        if index <= len(self.preperiod):
            return self.preperiod[index - 1]
        return self.period[(index - len(self.preperiod) - 1) % len(self.period)]

    def __str__(self):
        pre = ",".join(str(p) for p in self.preperiod)
        per = ",".join(str(p) for p in self.period)
        return f"pre[{pre}] per[{per}]"


def sh_signature(g: TreeAutomorphism) -> LevelSignature:
    """Level permutations of a spherically homogeneous automorphism.

    Raises:
        NotHomogeneousError: g is not spherically homogeneous.
    """
    verdict = is_spherically_homogeneous(g)
    if not verdict:
        raise NotHomogeneousError(
            f"Sections at {format_word(verdict.witness)} and "
            f"{format_word(verdict.reference)} differ"
        )
    g = minimize(g)
    machine = g.machine
    state = g.start
    first_seen = {}
    permutations = []
    while state not in first_seen:
        first_seen[state] = len(permutations)
        permutations.append(machine.outputs[state])
        state = machine.transitions[state][0]
    start = first_seen[state]
    preperiod, period = canonical_periodic(permutations[:start], permutations[start:])
    return LevelSignature(preperiod, period)


@dataclass(frozen=True)
class Portrait:
    """First-level permutations of all sections above a given depth.

    Attributes:
        depth (int): Words of length below `depth` are listed.
        degree (int): Alphabet size.
        permutations (dict): Word -> `Permutation`.
        complete (bool): False when the portrait was truncated by a budget.
    """

    depth: int
    degree: int
    permutations: Dict[Tuple[int, ...], Permutation]
    complete: bool = True

    def level(self, length: int):
        """The permutations of the words of a given length, in lex order."""
        return [perm for word, perm in sorted(self.permutations.items()) if len(word) == length]

    def is_level_constant(self, length: int) -> bool:
        """Whether every vertex of a level carries the same permutation."""
        return len(set(self.level(length))) <= 1

    def to_dict(self) -> dict:
        """JSON friendly form keyed by digit strings."""
        return {
            "depth": self.depth,
            "degree": self.degree,
            "complete": self.complete,
            "permutations": {
                format_word(word) or "-": str(perm)
                for word, perm in sorted(self.permutations.items(), key=lambda i: (len(i[0]), i[0]))
            },
        }


def portrait(g: TreeAutomorphism, depth: int) -> Portrait:
    """The portrait of g down to (excluding) level `depth`."""
    if depth < 0:
        raise ValueError("Portrait depth must be non-negative")
    machine = g.machine
    permutations = {}
    frontier = [((), g.start)]
    for _ in range(depth):
        following = []
        for word, state in frontier:
            permutations[word] = machine.outputs[state]
            for letter in range(g.degree):
                following.append((word + (letter,), machine.transitions[state][letter]))
        frontier = following
    return Portrait(depth, g.degree, permutations)


def order_bounded(
    g: TreeAutomorphism, max_order: int = None, state_budget: int = None
) -> Optional[int]:
    """The least n <= max_order with g^n = 1.

    Every power up to the order has to be tested for the identity, so the
    powers are built by multiplying canonical forms one factor at a time
    rather than by repeated squaring. Each product is minimised, and
    `state_budget` bounds the intermediate automata.

    Returns:
        int or None: The order, or `None` when it exceeds `max_order`.

    Raises:
        StateBudgetExceeded: An intermediate power outgrows the budget.
    """
    if max_order is None:
        max_order = default_config["order_bound"]
    if max_order < 1:
        raise ValueError("The order bound must be at least 1")
    g = minimize(g)
    current = g
    for exponent in range(1, max_order + 1):
        if is_identity(current):
            return exponent
        if exponent < max_order:
            current = compose(current, g, state_budget)
    logger.debug("No order found up to %d", max_order)
    return None


def apply_boundary(g: TreeAutomorphism, point: EpSeq) -> EpSeq:
    """Exact image of an eventually periodic boundary point.

    After the preperiod the pair (state, phase in the period) determines the
    rest of the output, so the first repeated pair closes the period.
    """
    if point.modulus != g.degree:
        raise AlphabetMismatchError(
            f"Boundary point over Z_{point.modulus} for a tree of degree {g.degree}"
        )
    machine = g.machine
    state = g.start
    output = []
    for letter in point.preperiod:
        output.append(machine.outputs[state](letter))
        state = machine.transitions[state][letter]
    seen = {}
    phase = 0
    while (state, phase) not in seen:
        seen[(state, phase)] = len(output)
        letter = point.period[phase]
        output.append(machine.outputs[state](letter))
        state = machine.transitions[state][letter]
        phase = (phase + 1) % len(point.period)
    first = seen[(state, phase)]
    return EpSeq(tuple(output[:first]), tuple(output[first:]), g.degree)


_TOKEN = re.compile(
    r"(?P<comment>\#[^\n]*)|(?P<newline>\n)|(?P<space>[ \t\r]+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<digits>\d+)|(?P<punct>[=(),;])|(?P<bad>.)"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str):
    line, line_start = 1, 0
    for match in _TOKEN.finditer(text):
        kind = match.lastgroup
        column = match.start() - line_start + 1
        if kind == "newline":
            yield _Token("end", "\n", line, column)
            line, line_start = line + 1, match.end()
        elif kind == "bad":
            raise WreathSyntaxError(f"Unexpected character '{match.group()}'", line, column)
        elif kind == "punct" and match.group() == ";":
            yield _Token("end", ";", line, column)
        elif kind not in ("comment", "space"):
            yield _Token(kind, match.group(), line, column)
    yield _Token("eof", "", line, len(text) - line_start + 1)


class _WreathParser:
    """Recursive descent over the token stream of the wreath DSL."""

    def __init__(self, text: str):
        self.tokens = list(_tokenize(text))
        self.position = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.position]

    def advance(self) -> _Token:
        token = self.current
        self.position += 1
        return token

    def expect(self, kind: str, text: str = None) -> _Token:
        token = self.current
        if token.kind != kind or (text is not None and token.text != text):
            wanted = text or kind
            shown = token.text or "end of input"
            raise WreathSyntaxError(f"Expected '{wanted}', found '{shown}'", token.line, token.column)
        return self.advance()

    def definitions(self):
        """Yields `(name_token, target_tokens, cycles)` per definition."""
        while self.current.kind != "eof":
            if self.current.kind == "end":
                self.advance()
                continue
            name = self.expect("name")
            self.expect("punct", "=")
            self.expect("punct", "(")
            targets = [self.expect("name")]
            while self.current.text == ",":
                self.advance()
                targets.append(self.expect("name"))
            self.expect("punct", ")")
            cycles = self.permutation()
            if self.current.kind not in ("end", "eof"):
                token = self.current
                raise WreathSyntaxError(
                    f"Unexpected '{token.text}' after definition of '{name.text}'",
                    token.line,
                    token.column,
                )
            yield name, targets, cycles

    def permutation(self):
        """Parses an optional permutation: `s` or cycles such as `(01)(2,3)`."""
        if self.current.kind == "name" and self.current.text == "s":
            self.advance()
            return "s"
        cycles = []
        while self.current.text == "(":
            self.advance()
            cycle = []
            if self.current.kind == "digits":
                token = self.advance()
                if self.current.text == ",":
                    cycle.append(int(token.text))
                    while self.current.text == ",":
                        self.advance()
                        cycle.append(int(self.expect("digits").text))
                else:
                    cycle.extend(int(char) for char in token.text)
            self.expect("punct", ")")
            cycles.append(cycle)
        if self.current.kind == "name":
            token = self.current
            raise WreathSyntaxError(
                f"Expected a permutation, found '{token.text}'", token.line, token.column
            )
        return cycles


def _as_product(text: str, names) -> Optional[List[str]]:
    """Splits `text` into two or more defined names, if it is such a product."""
    split = {0: []}
    for end in range(1, len(text) + 1):
        for start in range(end):
            if start in split and text[start:end] in names:
                split[end] = split[start] + [text[start:end]]
                break
    parts = split.get(len(text))
    return parts if parts and len(parts) > 1 else None


def parse_machine(text: str) -> MealyMachine:
    """Parses the wreath recursion DSL into one machine.

    One definition per line or `;`: `name = (n_0, ..., n_{d-1}) perm`, where
    `perm` is omitted (identity), `s` (the long cycle x -> x+1) or cycle
    notation such as `(01)` or `(0,1)(2,3)`. `#` starts a comment.

    Raises:
        WreathSyntaxError: Malformed input, with line and column. This includes
            a section written as a product of states, such as `ba`.
        UndefinedStateError: A section names a state that is never defined.
        NotPermutationError: A cycle is not a valid permutation.
    """
    parser = _WreathParser(text)
    rows = []
    index = {}
    degree = None
    for name, targets, cycles in parser.definitions():
        if name.text in index:
            raise WreathSyntaxError(f"State '{name.text}' defined twice", name.line, name.column)
        if degree is None:
            degree = len(targets)
        elif len(targets) != degree:
            raise WreathSyntaxError(
                f"State '{name.text}' has {len(targets)} sections, expected {degree}",
                name.line,
                name.column,
            )
        if degree < 2:
            raise WreathSyntaxError("A tree needs at least two letters", name.line, name.column)
        if cycles == "s":
            output = Permutation.long_cycle(degree)
        else:
            output = Permutation.from_cycles(cycles, degree)
        index[name.text] = len(rows)
        rows.append((name, targets, output))
    if not rows:
        raise WreathSyntaxError("No definitions found", 1, 1)
    transitions = []
    for name, targets, _ in rows:
        row = []
        for target in targets:
            if target.text not in index:
                parts = _as_product(target.text, index)
                if parts:
                    raise WreathSyntaxError(
                        f"Section '{target.text}' of '{name.text}' is the product "
                        f"{'*'.join(parts)}; sections must be single states",
                        target.line,
                        target.column,
                    )
                raise UndefinedStateError(
                    f"State '{target.text}' used by '{name.text}' at line {target.line}, "
                    f"column {target.column} is not defined"
                )
            row.append(index[target.text])
        transitions.append(tuple(row))
    names = tuple(name.text for name, _, _ in rows)
    logger.debug("Parsed %d states over %d letters", len(rows), degree)
    return MealyMachine(degree, tuple(transitions), tuple(out for _, _, out in rows), names)


def parse_wreath(text: str) -> Dict[str, TreeAutomorphism]:
    """Parses the wreath DSL; every defined name becomes an automorphism.

    Example:
        ```python
        >>> group = parse_wreath("a=(d,d)s; b=(c,c); c=(a,b); d=(b,a)")
        >>> act_word(group["a"], (0, 0))
        (1, 0)

        ```
    """
    machine = parse_machine(text)
    return {name: TreeAutomorphism(machine, state) for state, name in enumerate(machine.names)}


def format_wreath(g: TreeAutomorphism) -> str:
    """Writes the reachable part of g back in the wreath DSL."""
    machine = g.machine
    lines = []
    for state in _reachable(g):
        targets = ", ".join(machine.name(t) for t in machine.transitions[state])
        output = machine.outputs[state]
        suffix = "" if output.is_identity() else f" {output}"
        lines.append(f"{machine.name(state)} = ({targets}){suffix}")
    return "\n".join(lines)


def machine_to_dict(g: TreeAutomorphism) -> dict:
    """JSON friendly description of the reachable part of g."""
    machine = g.machine
    return {
        "degree": g.degree,
        "start": machine.name(g.start),
        "states": [
            {
                "name": machine.name(state),
                "transitions": [machine.name(t) for t in machine.transitions[state]],
                "output": str(machine.outputs[state]),
            }
            for state in _reachable(g)
        ],
    }
