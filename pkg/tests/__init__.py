"""Tests used by PyTest to ensure the module is working as expected."""
import os
import sys
import pytest


# Modifies path to allow importing of module
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

# pylint: disable=C0413
from affinetrees.lamplighter_g import build_G
from affinetrees.mealy import MealyMachine, Permutation, TreeAutomorphism, parse_wreath
from affinetrees.virtual_endo import LamplighterElement, SimilarityPair
from affinetrees.zd_algebra import DiagPeriodicMatrix, EpSeq, LaurentPoly, Poly, is_unit

AUTOMATA = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "automata"))

MODULI = (2, 3, 4, 5)
"""Rings Z_d exercised by the randomised tests, one composite among them."""


def automaton_path(name: str) -> str:
    """Path of a fixture file in `automata/`."""
    return os.path.join(AUTOMATA, name)


def golden_path(name: str = "") -> str:
    """Path of an expected command line document in `automata/golden/`."""
    return os.path.join(AUTOMATA, "golden", name)


def load_automata(name: str) -> dict:
    """Named automorphisms of a wreath DSL fixture."""
    with open(automaton_path(name), encoding="utf-8") as handle:
        return parse_wreath(handle.read())


@pytest.fixture(name="group")
def fixture_group():
    """The group G with its elements x, y and t."""
    return build_G()


@pytest.fixture(name="lamplighter")
def fixture_lamplighter():
    """The 2-state lamplighter machine b = (b, c), c = (b, c)s."""
    return load_automata("lamplighter.txt")


@pytest.fixture(name="adding")
def fixture_adding():
    """The binary adding machine a = (e, a)s."""
    return load_automata("adding.txt")


@pytest.fixture(name="pair")
def fixture_pair():
    """The similarity pair with u = 1 and f(x) = x."""
    return SimilarityPair(LaurentPoly((1,)), LamplighterElement.generator_x())


def random_poly(rng, modulus: int, degree: int) -> Poly:
    """A polynomial with uniformly drawn coefficients up to `degree`."""
    return Poly(tuple(rng.randrange(modulus) for _ in range(degree + 1)), modulus)


def random_unit(rng, modulus: int) -> int:
    """A uniformly drawn unit of Z_modulus."""
    return rng.choice([value for value in range(1, modulus) if is_unit(value, modulus)])


def random_epseq(rng, modulus: int, max_preperiod: int = 3, max_period: int = 3) -> EpSeq:
    """An eventually periodic sequence with short random preperiod and period."""
    preperiod = tuple(rng.randrange(modulus) for _ in range(rng.randint(0, max_preperiod)))
    period = tuple(rng.randrange(modulus) for _ in range(rng.randint(1, max_period)))
    return EpSeq(preperiod, period, modulus)


def random_row(rng, modulus: int) -> EpSeq:
    """A matrix row read from its diagonal, which holds a unit."""
    tail = random_epseq(rng, modulus, 2, 2)
    return EpSeq((random_unit(rng, modulus),) + tail.preperiod, tail.period, modulus)


def random_matrix(rng, modulus: int, max_base: int = 2, max_templates: int = 2):
    """A diagonally periodic matrix with a few random base and template rows."""
    return DiagPeriodicMatrix(
        tuple(random_row(rng, modulus) for _ in range(rng.randint(0, max_base))),
        tuple(random_row(rng, modulus) for _ in range(rng.randint(1, max_templates))),
        modulus,
    )


def random_automorphism(rng, degree: int, max_states: int = 6) -> TreeAutomorphism:
    """An automorphism given by a random machine, start state included."""
    size = rng.randint(1, max_states)
    transitions = tuple(tuple(rng.randrange(size) for _ in range(degree)) for _ in range(size))
    outputs = tuple(Permutation(tuple(rng.sample(range(degree), degree))) for _ in range(size))
    return TreeAutomorphism(MealyMachine(degree, transitions, outputs), rng.randrange(size))
