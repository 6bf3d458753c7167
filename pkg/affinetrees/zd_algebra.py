"""
This sub-module contains exact arithmetic over the rings Z_d.

Every value is immutable and carries its modulus `d`, so operands over
different rings are rejected instead of silently reduced.

Contents:
    - `Residue` - An element of Z_d.
    - `Poly` / `LaurentPoly` - (Laurent) polynomials over Z_d.
    - `RationalSeries` - Power series p(t)/q(t) with q(0) a unit.
    - `EpSeq` - Eventually periodic infinite sequences in canonical form.
    - `DiagPeriodicMatrix` - Infinite upper triangular unit-diagonal matrices
      whose rows repeat diagonally after a preperiod.
    - `series_to_epseq()` / `epseq_to_series()` - Convert between the two views.
    - `mat_mul()` / `mat_vec()` - Exact products of the infinite objects.
    - `phi()` / `psi()` - The polynomials 1+t+...+t^(n-1) and the degree
      dropping operator built from them.
"""
from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence, Tuple

from affinetrees.exceptions import AffineTreesError, ModulusMismatchError, NonUnitError

logger = logging.getLogger(__name__)


def _check_modulus(modulus: int):
    if not isinstance(modulus, int) or modulus < 2:
        raise ValueError(f"Modulus must be an integer d >= 2, got {modulus!r}")


def _same_modulus(left, right):
    if left.modulus != right.modulus:
        raise ModulusMismatchError(
            f"Operands live over Z_{left.modulus} and Z_{right.modulus}"
        )


def is_unit(value: int, modulus: int) -> bool:
    """Whether `value` is invertible in Z_modulus."""
    return math.gcd(value % modulus, modulus) == 1


def unit_inverse(value: int, modulus: int) -> int:
    """Inverse of a unit of Z_modulus.

    Raises:
        NonUnitError: `value` is not a unit.
    """
    if not is_unit(value, modulus):
        raise NonUnitError(f"{value} is not a unit in Z_{modulus}")
    return pow(value % modulus, -1, modulus)


def canonical_periodic(preperiod: Sequence, period: Sequence):
    """Canonical form of an eventually periodic sequence of hashable items.

    The period is first shortened to its primitive root, then the preperiod is
    absorbed into the period for as long as its last item equals the last
    item of the period. The result is unique per infinite sequence.

    Returns:
        tuple: `(preperiod, period)` as tuples.

    Example:
        ```python
        >>> canonical_periodic([1, 0, 1], [0, 1, 0, 1])
        ((), (1, 0))

        ```
    """
    pre = list(preperiod)
    per = list(period)
    if not per:
        raise ValueError("The period of an eventually periodic sequence cannot be empty")
    size = len(per)
    for length in range(1, size + 1):
        if size % length == 0 and per == per[:length] * (size // length):
            per = per[:length]
            break
    while pre and pre[-1] == per[-1]:
        pre.pop()
        per = [per[-1]] + per[:-1]
    return tuple(pre), tuple(per)


@dataclass(frozen=True)
class Residue:
    """An element of Z_d."""

    value: int
    modulus: int

    def __post_init__(self):
        _check_modulus(self.modulus)
        object.__setattr__(self, "value", self.value % self.modulus)

    def _coerce(self, other):
        if isinstance(other, int):
            return Residue(other, self.modulus)
        _same_modulus(self, other)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return Residue(self.value + other.value, self.modulus)

    def __sub__(self, other):
        other = self._coerce(other)
        return Residue(self.value - other.value, self.modulus)

    def __mul__(self, other):
        other = self._coerce(other)
        return Residue(self.value * other.value, self.modulus)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return Residue(-self.value, self.modulus)

    def __int__(self):
        return self.value

    def is_unit(self) -> bool:
        """Whether the residue is invertible."""
        return is_unit(self.value, self.modulus)

    def inverse(self) -> "Residue":
        """Multiplicative inverse; raises `NonUnitError` for non-units."""
        return Residue(unit_inverse(self.value, self.modulus), self.modulus)

    def __str__(self):
        return str(self.value)


_TERM = re.compile(r"^(?:(\d+)\*?)?(?:([a-z])(?:\^\(?(-?\d+)\)?)?)?$")


def _parse_terms(text: str, variable: str):
    """Yields `(coefficient, exponent)` pairs of a `1+2x+x^-3` style string."""
    compact = text.replace(" ", "")
    if not compact:
        raise ValueError("Empty polynomial")
    for term in compact.split("+"):
        match = _TERM.match(term)
        if not term or not match or (match.group(1) is None and match.group(2) is None):
            raise ValueError(f"Cannot parse polynomial term '{term}'")
        coefficient = int(match.group(1)) if match.group(1) is not None else 1
        if match.group(2) is None:
            yield coefficient, 0
            continue
        if match.group(2) != variable:
            raise ValueError(f"Unexpected variable '{match.group(2)}' (expected '{variable}')")
        yield coefficient, int(match.group(3)) if match.group(3) is not None else 1


def _format_terms(pairs, variable: str):
    terms = []
    for exponent, coefficient in pairs:
        if coefficient == 0:
            continue
        if exponent == 0:
            monomial = ""
        elif exponent == 1:
            monomial = variable
        else:
            monomial = f"{variable}^{exponent}"
        if not monomial:
            terms.append(str(coefficient))
        elif coefficient == 1:
            terms.append(monomial)
        else:
            terms.append(f"{coefficient}{monomial}")
    return "+".join(terms) if terms else "0"


@dataclass(frozen=True)
class Poly:
    """A polynomial over Z_d, coefficients indexed from degree 0.

    Trailing zero coefficients are stripped, so the zero polynomial has no
    coefficients and degree -1.
    """

    coefficients: Tuple[int, ...] = ()
    modulus: int = 2

    def __post_init__(self):
        _check_modulus(self.modulus)
        coefficients = [c % self.modulus for c in self.coefficients]
        while coefficients and coefficients[-1] == 0:
            coefficients.pop()
        object.__setattr__(self, "coefficients", tuple(coefficients))

    @classmethod
    def monomial(cls, exponent: int, coefficient: int = 1, modulus: int = 2) -> "Poly":
        """The polynomial `coefficient * t^exponent`."""
        if exponent < 0:
            raise ValueError("Polynomials have no negative exponents; use LaurentPoly")
        return cls((0,) * exponent + (coefficient,), modulus)

    @classmethod
    def from_exponents(cls, exponents: Iterable[int], modulus: int = 2) -> "Poly":
        """Sum of `t^e` over the given exponents (repeats add up)."""
        return sum((cls.monomial(e, 1, modulus) for e in exponents), cls((), modulus))

    @classmethod
    def parse(cls, text: str, modulus: int = 2, variable: str = "t") -> "Poly":
        """Parses strings such as `"1+t^2"` or `"2t+1"`."""
        result = cls((), modulus)
        for coefficient, exponent in _parse_terms(text, variable):
            result = result + cls.monomial(exponent, coefficient, modulus)
        return result

    @property
    def degree(self) -> int:
        """Degree, with the convention that the zero polynomial has degree -1."""
        return len(self.coefficients) - 1

    def coefficient(self, index: int) -> int:
        """Coefficient of t^index (zero beyond the degree)."""
        if 0 <= index < len(self.coefficients):
            return self.coefficients[index]
        return 0

    def exponents(self):
        """Exponents carrying a nonzero coefficient, ascending."""
        return [i for i, c in enumerate(self.coefficients) if c]

    def __bool__(self):
        return bool(self.coefficients)

    def _coerce(self, other):
        if isinstance(other, int):
            return Poly((other,), self.modulus)
        _same_modulus(self, other)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        size = max(len(self.coefficients), len(other.coefficients))
        return Poly(
            tuple(self.coefficient(i) + other.coefficient(i) for i in range(size)),
            self.modulus,
        )

    __radd__ = __add__

    def __neg__(self):
        return Poly(tuple(-c for c in self.coefficients), self.modulus)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        if isinstance(other, int):
            return Poly(tuple(c * other for c in self.coefficients), self.modulus)
        _same_modulus(self, other)
        if not self or not other:
            return Poly((), self.modulus)
        product = [0] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, left in enumerate(self.coefficients):
            if left:
                for j, right in enumerate(other.coefficients):
                    product[i + j] += left * right
        return Poly(tuple(product), self.modulus)

    __rmul__ = __mul__

    def shift(self, exponent: int) -> "Poly":
        """Multiplication by t^exponent, exponent >= 0."""
        if not self:
            return self
        return Poly((0,) * exponent + self.coefficients, self.modulus)

    def __call__(self, value: int) -> int:
        return sum(c * value**i for i, c in enumerate(self.coefficients)) % self.modulus

    def format(self, variable: str = "t") -> str:
        """Human readable form such as `1+t+t^2`."""
        return _format_terms(enumerate(self.coefficients), variable)

    def __str__(self):
        return self.format()


@dataclass(frozen=True)
class LaurentPoly:
    """A Laurent polynomial over Z_d.

    Stored as the coefficient list starting at `lowest_degree`; first and last
    stored coefficients are nonzero unless the polynomial is zero, in which
    case nothing is stored and `lowest_degree` is 0.
    """

    coefficients: Tuple[int, ...] = ()
    lowest_degree: int = 0
    modulus: int = 2

    def __post_init__(self):
        _check_modulus(self.modulus)
        coefficients = [c % self.modulus for c in self.coefficients]
        lowest = self.lowest_degree
        while coefficients and coefficients[-1] == 0:
            coefficients.pop()
        while coefficients and coefficients[0] == 0:
            coefficients.pop(0)
            lowest += 1
        if not coefficients:
            lowest = 0
        object.__setattr__(self, "coefficients", tuple(coefficients))
        object.__setattr__(self, "lowest_degree", lowest)

    @classmethod
    def from_exponents(cls, exponents: Iterable[int], modulus: int = 2) -> "LaurentPoly":
        """Sum of `x^e` over the given (possibly negative) exponents."""
        result = cls((), 0, modulus)
        for exponent in exponents:
            result = result + cls((1,), exponent, modulus)
        return result

    @classmethod
    def from_poly(cls, poly: Poly) -> "LaurentPoly":
        """Views an ordinary polynomial as a Laurent polynomial."""
        return cls(poly.coefficients, 0, poly.modulus)

    @classmethod
    def parse(cls, text: str, modulus: int = 2, variable: str = "x") -> "LaurentPoly":
        """Parses strings such as `"x^-1+1+x^2"`."""
        result = cls((), 0, modulus)
        for coefficient, exponent in _parse_terms(text, variable):
            result = result + cls((coefficient,), exponent, modulus)
        return result

    @property
    def highest_degree(self) -> int:
        """Largest exponent with nonzero coefficient (undefined for zero)."""
        return self.lowest_degree + len(self.coefficients) - 1

    def coefficient(self, exponent: int) -> int:
        """Coefficient of x^exponent."""
        index = exponent - self.lowest_degree
        if 0 <= index < len(self.coefficients):
            return self.coefficients[index]
        return 0

    def exponents(self):
        """Exponents carrying a nonzero coefficient, ascending."""
        return [self.lowest_degree + i for i, c in enumerate(self.coefficients) if c]

    def __bool__(self):
        return bool(self.coefficients)

    def __add__(self, other):
        _same_modulus(self, other)
        if not self:
            return other
        if not other:
            return self
        low = min(self.lowest_degree, other.lowest_degree)
        high = max(self.highest_degree, other.highest_degree)
        return LaurentPoly(
            tuple(self.coefficient(e) + other.coefficient(e) for e in range(low, high + 1)),
            low,
            self.modulus,
        )

    def __neg__(self):
        return LaurentPoly(tuple(-c for c in self.coefficients), self.lowest_degree, self.modulus)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        _same_modulus(self, other)
        left = Poly(self.coefficients, self.modulus)
        right = Poly(other.coefficients, other.modulus)
        return LaurentPoly(
            (left * right).coefficients,
            self.lowest_degree + other.lowest_degree,
            self.modulus,
        )

    def shift(self, exponent: int) -> "LaurentPoly":
        """Multiplication by x^exponent (any sign)."""
        if not self:
            return self
        return LaurentPoly(self.coefficients, self.lowest_degree + exponent, self.modulus)

    def at_one(self) -> int:
        """Value at x = 1, i.e. the coefficient sum in Z_d."""
        return sum(self.coefficients) % self.modulus

    def divide_by_one_plus_x(self) -> "LaurentPoly":
        """Exact quotient by (1 + x).

        Raises:
            ValueError: The polynomial is not divisible by 1 + x.
        """
        if not self:
            return self
        d = self.modulus
        quotient = []
        previous = 0
        for coefficient in self.coefficients[:-1]:
            previous = (coefficient - previous) % d
            quotient.append(previous)
        if (self.coefficients[-1] - previous) % d:
            raise ValueError(f"{self} is not divisible by 1+x")
        return LaurentPoly(tuple(quotient), self.lowest_degree, d)

    def to_poly(self) -> Poly:
        """Converts to `Poly`; the lowest exponent must be non-negative."""
        if self and self.lowest_degree < 0:
            raise ValueError(f"{self} has negative exponents")
        if not self:
            return Poly((), self.modulus)
        return Poly(self.coefficients, self.modulus).shift(self.lowest_degree)

    def format(self, variable: str = "x") -> str:
        """Human readable form such as `x^-1+1+x`."""
        return _format_terms(
            ((self.lowest_degree + i, c) for i, c in enumerate(self.coefficients)), variable
        )

    def __str__(self):
        return self.format()


def _one_minus_power(exponent: int, modulus: int) -> Poly:
    return Poly((1,), modulus) - Poly.monomial(exponent, 1, modulus)


@dataclass(frozen=True, eq=False)
class RationalSeries:
    """A rational power series numerator/denominator over Z_d.

    The constant term of the denominator must be a unit, so the series has
    a well defined expansion. Equality is tested by cross multiplication.
    """

    numerator: Poly
    denominator: Poly

    def __post_init__(self):
        _same_modulus(self.numerator, self.denominator)
        if not is_unit(self.denominator.coefficient(0), self.modulus):
            raise NonUnitError("The constant term of the denominator must be a unit")

    @property
    def modulus(self) -> int:
        """The ring Z_d the series lives over."""
        return self.numerator.modulus

    @classmethod
    def polynomial(cls, poly: Poly) -> "RationalSeries":
        """The series of a polynomial."""
        return cls(poly, Poly((1,), poly.modulus))

    def coefficients(self, count: int):
        """The first `count` coefficients of the expansion."""
        d = self.modulus
        num = self.numerator.coefficients
        den = self.denominator.coefficients
        inverse = unit_inverse(den[0], d)
        values = []
        for n in range(count):
            acc = num[n] if n < len(num) else 0
            for k in range(1, min(n, len(den) - 1) + 1):
                acc -= den[k] * values[n - k]
            values.append(acc * inverse % d)
        return values

    def __add__(self, other):
        _same_modulus(self, other)
        if self.denominator == other.denominator:
            return RationalSeries(self.numerator + other.numerator, self.denominator)
        return RationalSeries(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    def __neg__(self):
        return RationalSeries(-self.numerator, self.denominator)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        _same_modulus(self, other)
        return RationalSeries(
            self.numerator * other.numerator, self.denominator * other.denominator
        )

    def scale(self, factor: int) -> "RationalSeries":
        """Multiplication by a residue."""
        return RationalSeries(self.numerator * int(factor), self.denominator)

    def shift(self) -> "RationalSeries":
        """sigma(s) = (s(t) - s(0)) / t, the series with its constant term dropped."""
        d = self.modulus
        constant = self.numerator.coefficient(0) * unit_inverse(self.denominator.coefficient(0), d)
        remainder = self.numerator - self.denominator * constant
        return RationalSeries(Poly(remainder.coefficients[1:], d), self.denominator)

    def __eq__(self, other):
        if not isinstance(other, RationalSeries) or other.modulus != self.modulus:
            return NotImplemented
        return self.numerator * other.denominator == other.numerator * self.denominator

    __hash__ = None

    def __str__(self):
        return f"({self.numerator})/({self.denominator})"


@dataclass(frozen=True)
class EpSeq:
    """An eventually periodic infinite sequence over Z_d, indexed from 1.

    Always stored in canonical form (primitive period, minimal preperiod), so
    two sequences are entrywise equal exactly when their fields are equal.
    """

    preperiod: Tuple[int, ...] = ()
    period: Tuple[int, ...] = (0,)
    modulus: int = 2

    def __post_init__(self):
        _check_modulus(self.modulus)
        pre, per = canonical_periodic(
            [v % self.modulus for v in self.preperiod],
            [v % self.modulus for v in self.period],
        )
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    @classmethod
    def zero(cls, modulus: int = 2) -> "EpSeq":
        """The all-zero sequence."""
        return cls((), (0,), modulus)

    @classmethod
    def basis(cls, index: int, modulus: int = 2) -> "EpSeq":
        """The standard basis vector e_index (1 at position `index`)."""
        if index < 1:
            raise ValueError("Basis vectors are indexed from 1")
        return cls((0,) * (index - 1) + (1,), (0,), modulus)

    @classmethod
    def from_text(cls, text: str, modulus: int = 2) -> "EpSeq":
        """Parses the `pre:1,0|per:1,1,0` syntax."""
        match = re.fullmatch(r"\s*pre:([\d,\s]*)\|per:([\d,\s]+)\s*", text)
        if not match:
            raise ValueError(f"Cannot parse eventually periodic sequence '{text}'")

        def values(chunk):
            return tuple(int(v) for v in chunk.replace(" ", "").split(",") if v != "")

        period = values(match.group(2))
        if not period:
            raise ValueError(f"Empty period in '{text}'")
        return cls(values(match.group(1)), period, modulus)

    def to_text(self) -> str:
        """Serialises to the `pre:...|per:...` syntax."""
        pre = ",".join(str(v) for v in self.preperiod)
        per = ",".join(str(v) for v in self.period)
        return f"pre:{pre}|per:{per}"

    def entry(self, index: int) -> int:
        """Value at position `index` (1-based) as a plain integer."""
        if index < 1:
            raise ValueError("Sequence positions start at 1")
        if index <= len(self.preperiod):
            return self.preperiod[index - 1]
        return self.period[(index - len(self.preperiod) - 1) % len(self.period)]

    def prefix(self, length: int):
        """The first `length` entries."""
        return tuple(self.entry(i) for i in range(1, length + 1))

    def shift(self) -> "EpSeq":
        """The sequence with its first entry removed."""
        if self.preperiod:
            return EpSeq(self.preperiod[1:], self.period, self.modulus)
        return EpSeq((), self.period[1:] + self.period[:1], self.modulus)

    def is_zero(self) -> bool:
        """Whether every entry is zero."""
        return not self.preperiod and self.period == (0,)

    def _combine(self, other, operation) -> "EpSeq":
        _same_modulus(self, other)
        start = max(len(self.preperiod), len(other.preperiod))
        length = math.lcm(len(self.period), len(other.period))
        values = [
            operation(self.entry(i), other.entry(i)) for i in range(1, start + length + 1)
        ]
        return EpSeq(values[:start], values[start:], self.modulus)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, factor: int) -> "EpSeq":
        """Entrywise multiplication by a residue."""
        factor = int(factor)
        return EpSeq(
            tuple(v * factor for v in self.preperiod),
            tuple(v * factor for v in self.period),
            self.modulus,
        )

    def __str__(self):
        period = ",".join(str(v) for v in self.period)
        items = [str(v) for v in self.preperiod] + [f"({period})^inf"]
        return "[" + ",".join(items) + "]"


def epseq_entry(sequence: EpSeq, index: int) -> Residue:
    """Entry `index` (1-based) of an eventually periodic sequence."""
    return Residue(sequence.entry(index), sequence.modulus)


def epseq_shift(sequence: EpSeq) -> EpSeq:
    """The shift sigma(s): drop the first entry."""
    return sequence.shift()


def epseq_add(left: EpSeq, right: EpSeq) -> EpSeq:
    """Pointwise sum; raises `ModulusMismatchError` across rings."""
    return left + right


def epseq_scale(sequence: EpSeq, factor) -> EpSeq:
    """Pointwise product with a residue."""
    if isinstance(factor, Residue) and factor.modulus != sequence.modulus:
        raise ModulusMismatchError("Scalar and sequence live over different rings")
    return sequence.scale(int(factor))


def _series_parts(preperiod: Sequence[int], period: Sequence[int], modulus: int) -> Poly:
    """Numerator N with s = N / (1 - t^len(period)) for the given parts."""
    head = Poly(tuple(preperiod), modulus)
    tail = Poly(tuple(period), modulus).shift(len(preperiod))
    return head * _one_minus_power(len(period), modulus) + tail


def epseq_to_series(sequence: EpSeq) -> RationalSeries:
    """The generating function sum s_i t^(i-1) as a rational series."""
    d = sequence.modulus
    return RationalSeries(
        _series_parts(sequence.preperiod, sequence.period, d),
        _one_minus_power(len(sequence.period), d),
    )


def series_to_epseq(series: RationalSeries) -> EpSeq:
    """Coefficient sequence of a rational series, in canonical form.

    Past the numerator, each coefficient is a fixed linear function of the
    previous `deg(denominator)` ones; a repeated window therefore starts the
    period. Over a finite ring such a repeat always happens.
    """
    d = series.modulus
    num = series.numerator.coefficients
    den = series.denominator.coefficients
    inverse = unit_inverse(den[0], d)
    order = len(den) - 1
    start = max(len(num), order)
    values = []
    seen = {}
    n = 0
    while True:
        if n >= start:
            window = tuple(values[n - order : n])
            if window in seen:
                first = seen[window]
                return EpSeq(tuple(values[:first]), tuple(values[first:n]), d)
            seen[window] = n
        acc = num[n] if n < len(num) else 0
        for k in range(1, min(n, order) + 1):
            acc -= den[k] * values[n - k]
        values.append(acc * inverse % d)
        n += 1


def phi(n: int) -> Poly:
    """phi_n(t) = 1 + t + ... + t^(n-1) over Z_2."""
    if n < 1:
        raise ValueError(f"phi_n is defined for n >= 1, got {n}")
    return Poly((1,) * n, 2)


def psi(poly: Poly) -> Poly:
    """psi_p = sum_{i>=1} a_i phi_i for p = sum a_i t^i; drops the degree by one."""
    result = Poly((), poly.modulus)
    for index, coefficient in enumerate(poly.coefficients):
        if index and coefficient:
            result = result + Poly((1,) * index, poly.modulus) * coefficient
    return result


@dataclass(frozen=True)
class DiagPeriodicMatrix:
    """An infinite upper triangular matrix over Z_d with unit diagonal.

    Row i is stored from its diagonal entry onwards. Rows 1..n are the
    `base_rows`; rows n+1, n+2, ... cycle through the `template_rows`. The
    sequence of rows is kept canonical exactly like an `EpSeq`, which makes
    (n, p) minimal and equality a field comparison.
    """

    base_rows: Tuple[EpSeq, ...] = ()
    template_rows: Tuple[EpSeq, ...] = ()
    modulus: int = 2

    def __post_init__(self):
        _check_modulus(self.modulus)
        if not self.template_rows:
            raise ValueError("A diagonally periodic matrix needs at least one template row")
        for row in self.base_rows + self.template_rows:
            if row.modulus != self.modulus:
                raise ModulusMismatchError(
                    f"Row over Z_{row.modulus} in a matrix over Z_{self.modulus}"
                )
            if not is_unit(row.entry(1), self.modulus):
                raise NonUnitError(f"Diagonal entry {row.entry(1)} of row {row} is not a unit")
        base, templates = canonical_periodic(self.base_rows, self.template_rows)
        object.__setattr__(self, "base_rows", base)
        object.__setattr__(self, "template_rows", templates)

    @classmethod
    def identity(cls, modulus: int = 2) -> "DiagPeriodicMatrix":
        """The infinite identity matrix I."""
        return cls((), (EpSeq((1,), (0,), modulus),), modulus)

    @classmethod
    def band(cls, row: EpSeq) -> "DiagPeriodicMatrix":
        """The constant band matrix whose every row starts with `row`."""
        return cls((), (row,), row.modulus)

    @property
    def preperiod(self) -> int:
        """Number n of base rows."""
        return len(self.base_rows)

    @property
    def period(self) -> int:
        """Number p of template rows, the least period under the shift."""
        return len(self.template_rows)

    def row_from_diagonal(self, index: int) -> EpSeq:
        """Row `index` (1-based) read from its diagonal entry onwards."""
        if index < 1:
            raise ValueError("Matrix rows are indexed from 1")
        if index <= len(self.base_rows):
            return self.base_rows[index - 1]
        return self.template_rows[(index - len(self.base_rows) - 1) % len(self.template_rows)]

    def row(self, index: int) -> EpSeq:
        """The full row `index`, leading zeros included."""
        stored = self.row_from_diagonal(index)
        return EpSeq((0,) * (index - 1) + stored.preperiod, stored.period, self.modulus)

    def entry(self, row: int, column: int) -> int:
        """Entry a_{row,column}."""
        if column < row:
            return 0
        return self.row_from_diagonal(row).entry(column - row + 1)

    def corner(self, size: int):
        """The top left `size` x `size` block as nested lists."""
        return [[self.entry(i, j) for j in range(1, size + 1)] for i in range(1, size + 1)]

    def shift(self) -> "DiagPeriodicMatrix":
        """sigma(A): drop the first row and column."""
        if self.base_rows:
            return DiagPeriodicMatrix(self.base_rows[1:], self.template_rows, self.modulus)
        rotated = self.template_rows[1:] + self.template_rows[:1]
        return DiagPeriodicMatrix((), rotated, self.modulus)

    def is_identity(self) -> bool:
        """Whether this is the identity matrix."""
        return self == DiagPeriodicMatrix.identity(self.modulus)

    def to_dict(self) -> dict:
        """JSON friendly form with rows in `pre:...|per:...` syntax."""
        return {
            "d": self.modulus,
            "base_rows": [row.to_text() for row in self.base_rows],
            "template_rows": [row.to_text() for row in self.template_rows],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DiagPeriodicMatrix":
        """Inverse of `to_dict()`."""
        modulus = int(data["d"])
        return cls(
            tuple(EpSeq.from_text(row, modulus) for row in data.get("base_rows", [])),
            tuple(EpSeq.from_text(row, modulus) for row in data["template_rows"]),
            modulus,
        )

    def to_json(self) -> str:
        """Compact deterministic JSON text."""
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DiagPeriodicMatrix":
        """Inverse of `to_json()`."""
        return cls.from_dict(json.loads(text))

    def __matmul__(self, other):
        return mat_mul(self, other)


def mat_shift(matrix: DiagPeriodicMatrix) -> DiagPeriodicMatrix:
    """sigma(A)."""
    return matrix.shift()


def mat_row(matrix: DiagPeriodicMatrix, index: int) -> EpSeq:
    """Full row `index` of the matrix."""
    return matrix.row(index)


def mat_entry(matrix: DiagPeriodicMatrix, row: int, column: int) -> Residue:
    """Entry a_{row,column}."""
    return Residue(matrix.entry(row, column), matrix.modulus)


def mat_corner(matrix: DiagPeriodicMatrix, size: int):
    """Top left `size` x `size` corner as nested lists of integers."""
    return matrix.corner(size)


def mat_vec(vector: EpSeq, matrix: DiagPeriodicMatrix) -> EpSeq:
    """The row vector product b * A, exactly.

    Row k of A contributes b_k t^(k-1) F_k(t) to the generating function of
    the result, F_k being the from-diagonal series of row k. Beyond the base
    rows the F_k cycle through the templates, so the infinite sum splits into
    one term per template: (b masked to its residue class) * (template).
    Everything is put over the denominator (1 - t^L)(1 - t^Q).
    """
    _same_modulus(vector, matrix)
    d = matrix.modulus
    rows = matrix.base_rows + matrix.template_rows
    base, templates = len(matrix.base_rows), len(matrix.template_rows)

    row_period = reduce(math.lcm, (len(row.period) for row in rows), 1)

    def lifted(row: EpSeq) -> Poly:
        # numerator of the row series over 1 - t^row_period
        factor = Poly.from_exponents(range(0, row_period, len(row.period)), d)
        return _series_parts(row.preperiod, row.period, d) * factor

    start = max(len(vector.preperiod), base)
    span = math.lcm(len(vector.period), templates)
    one_minus_span = _one_minus_power(span, d)

    finite = Poly((), d)
    for k in range(1, base + 1):
        coefficient = vector.entry(k)
        if coefficient:
            finite = finite + lifted(matrix.base_rows[k - 1]).shift(k - 1) * coefficient

    numerator = finite * one_minus_span
    for residue_class, template in enumerate(matrix.template_rows):
        mask = [
            vector.entry(k) if k > base and (k - base - 1) % templates == residue_class else 0
            for k in range(1, start + span + 1)
        ]
        if not any(mask):
            continue
        masked = _series_parts(mask[:start], mask[start:], d)
        numerator = numerator + masked * lifted(template)

    denominator = one_minus_span * _one_minus_power(row_period, d)
    return series_to_epseq(RationalSeries(numerator, denominator))


def mat_mul(left: DiagPeriodicMatrix, right: DiagPeriodicMatrix) -> DiagPeriodicMatrix:
    """The exact product of two diagonally periodic matrices.

    The shift commutes with products of upper triangular matrices, so row i of
    the product (from its diagonal) is row 1 of sigma^(i-1)(A) sigma^(i-1)(B).
    The pair of shifts repeats with preperiod max(n_A, n_B) and period
    lcm(p_A, p_B); that window is computed and the repetition is verified.
    """
    _same_modulus(left, right)
    start = max(left.preperiod, right.preperiod)
    span = math.lcm(left.period, right.period)
    rows = []
    shifted_left, shifted_right = left, right
    anchor = None
    for index in range(start + span):
        if index == start:
            anchor = (shifted_left, shifted_right)
        rows.append(mat_vec(shifted_left.row(1), shifted_right))
        shifted_left, shifted_right = shifted_left.shift(), shifted_right.shift()
    if (shifted_left, shifted_right) != anchor:
        raise AffineTreesError("Diagonal periodicity of a matrix product failed to verify")
    logger.debug("Matrix product window: preperiod %d, period %d", start, span)
    return DiagPeriodicMatrix(tuple(rows[:start]), tuple(rows[start:]), left.modulus)
