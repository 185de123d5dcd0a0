"""
Exact arithmetic kernel.

Rationals are :class:`fractions.Fraction` (always reduced, positive denominator).
Polynomials are sparse, immutable and kept in descending graded-lex order so
that every printed form is deterministic.
"""
from bisect import insort
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd, lcm
from typing import Literal

from facon_api.errors import UsageError

BigRational = Fraction
Rational = Fraction | int


class Space(str, Enum):
    """Variable space of a polynomial. The value is the printed variable prefix."""

    AMBIENT = "x"
    PARAMETER = "c"
    TARGET = "a"


@dataclass(frozen=True)
class Monomial:
    """Product of variables, stored as ``((index, power), ...)`` with increasing indices."""

    powers: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        indices = [index for index, _ in self.powers]
        if indices != sorted(set(indices)):
            raise UsageError(f"monomial indices must be strictly increasing, got {indices}")
        for index, power in self.powers:
            if index < 0 or power <= 0:
                raise UsageError(f"invalid monomial factor (index={index}, power={power})")

    @classmethod
    def from_powers(cls, powers: Mapping[int, int]) -> "Monomial":
        return cls(tuple(sorted((index, power) for index, power in powers.items() if power != 0)))

    @classmethod
    def variable(cls, index: int) -> "Monomial":
        return cls(((index, 1),))

    @property
    def degree(self) -> int:
        return sum(power for _, power in self.powers)

    @property
    def max_index(self) -> int:
        return self.powers[-1][0] if self.powers else -1

    def power(self, index: int) -> int:
        for factor, power in self.powers:
            if factor == index:
                return power
        return 0

    def indices(self) -> frozenset[int]:
        return frozenset(index for index, _ in self.powers)

    def dense(self, nvars: int) -> tuple[int, ...]:
        exponents = [0] * nvars
        for index, power in self.powers:
            exponents[index] = power
        return tuple(exponents)

    def evaluate(self, point: Sequence[Rational]) -> Fraction:
        value = Fraction(1)
        for index, power in self.powers:
            value *= Fraction(point[index]) ** power
        return value

    def to_text(self, space: Space) -> str:
        factors = []
        for index, power in self.powers:
            name = f"{space.value}{index + 1}"
            factors.append(name if power == 1 else f"{name}^{power}")
        return "*".join(factors)

    def __mul__(self, other: "Monomial") -> "Monomial":
        merged = dict(self.powers)
        for index, power in other.powers:
            merged[index] = merged.get(index, 0) + power
        return Monomial.from_powers(merged)


def grlex_key(monomial: Monomial, nvars: int) -> tuple[int, tuple[int, ...]]:
    """Sort key of the graded-lex order; larger keys come first in canonical form."""
    return monomial.degree, monomial.dense(nvars)


def monomials_up_to(nvars: int, degree: int) -> list[Monomial]:
    """All monomials of total degree <= ``degree`` in ``nvars`` variables, descending grlex."""
    if nvars == 0:
        return [Monomial()]
    result: list[Monomial] = []

    def extend(prefix: list[int], remaining: int) -> None:
        if len(prefix) == nvars - 1:
            result.append(Monomial.from_powers(dict(enumerate([*prefix, remaining]))))
            return
        for power in range(remaining, -1, -1):
            extend([*prefix, power], remaining - power)

    for total in range(degree, -1, -1):
        extend([], total)
    return result


def _format_coefficient(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class MultiPoly:
    """
    Sparse multivariate polynomial with exact rational coefficients.

    :param space: Variable space (ambient ``x``, parameter ``c`` or target ``a``).
    :param nvars: Number of variables of the space.
    :param terms: ``(monomial, coefficient)`` pairs in descending graded-lex order, no zero coefficient.
    """

    space: Space
    nvars: int
    terms: tuple[tuple[Monomial, Fraction], ...] = ()

    def __post_init__(self) -> None:
        if self.nvars < 0:
            raise UsageError(f"negative number of variables: {self.nvars}")
        keys = []
        for monomial, coefficient in self.terms:
            if coefficient == 0:
                raise UsageError("zero coefficients are never stored")
            if monomial.max_index >= self.nvars:
                raise UsageError(
                    f"variable {self.space.value}{monomial.max_index + 1} outside a space of {self.nvars} variables"
                )
            keys.append(grlex_key(monomial, self.nvars))
        if any(first <= second for first, second in zip(keys, keys[1:])):
            raise UsageError("terms are not in canonical graded-lex order")

    @classmethod
    def from_terms(
        cls,
        space: Space,
        nvars: int,
        terms: Mapping[Monomial, Rational] | Iterable[tuple[Monomial, Rational]],
    ) -> "MultiPoly":
        """Collect terms (adding repeated monomials), drop zeros and sort canonically."""
        pairs = terms.items() if isinstance(terms, Mapping) else terms
        collected: dict[Monomial, Fraction] = {}
        for monomial, coefficient in pairs:
            collected[monomial] = collected.get(monomial, Fraction(0)) + Fraction(coefficient)
        ordered = sorted(
            ((monomial, value) for monomial, value in collected.items() if value != 0),
            key=lambda term: grlex_key(term[0], nvars),
            reverse=True,
        )
        return cls(space, nvars, tuple(ordered))

    @classmethod
    def zero(cls, space: Space, nvars: int) -> "MultiPoly":
        return cls(space, nvars)

    @classmethod
    def constant(cls, space: Space, nvars: int, value: Rational) -> "MultiPoly":
        return cls.from_terms(space, nvars, [(Monomial(), value)])

    @classmethod
    def variable(cls, space: Space, nvars: int, index: int) -> "MultiPoly":
        if not 0 <= index < nvars:
            raise UsageError(f"variable index {index} outside a space of {nvars} variables")
        return cls(space, nvars, ((Monomial.variable(index), Fraction(1)),))

    # -- inspection -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not monomial.powers for monomial, _ in self.terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((monomial.degree for monomial, _ in self.terms), default=-1)

    def variables(self) -> frozenset[int]:
        used: set[int] = set()
        for monomial, _ in self.terms:
            used.update(monomial.indices())
        return frozenset(used)

    def coefficient(self, monomial: Monomial) -> Fraction:
        for candidate, value in self.terms:
            if candidate == monomial:
                return value
        return Fraction(0)

    # -- ring operations --------------------------------------------------

    def _check_compatible(self, other: "MultiPoly") -> None:
        if self.space != other.space or self.nvars != other.nvars:
            raise UsageError(
                f"space mismatch: {self.space.value}[{self.nvars}] vs {other.space.value}[{other.nvars}]"
            )

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check_compatible(other)
        return MultiPoly.from_terms(self.space, self.nvars, [*self.terms, *other.terms])

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.space, self.nvars, tuple((monomial, -value) for monomial, value in self.terms))

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other: "MultiPoly | Fraction | int") -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check_compatible(other)
        products: dict[Monomial, Fraction] = {}
        for left, left_value in self.terms:
            for right, right_value in other.terms:
                monomial = left * right
                products[monomial] = products.get(monomial, Fraction(0)) + left_value * right_value
        return MultiPoly.from_terms(self.space, self.nvars, products)

    def __rmul__(self, other: Fraction | int) -> "MultiPoly":
        return self.scale(other)

    def __pow__(self, exponent: int) -> "MultiPoly":
        if exponent < 0:
            raise UsageError("negative powers of polynomials are not polynomials")
        result = MultiPoly.constant(self.space, self.nvars, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, factor: Rational) -> "MultiPoly":
        if factor == 0:
            return MultiPoly.zero(self.space, self.nvars)
        factor = Fraction(factor)
        return MultiPoly(self.space, self.nvars, tuple((monomial, value * factor) for monomial, value in self.terms))

    # -- calculus and evaluation -------------------------------------------

    def partial(self, index: int) -> "MultiPoly":
        if not 0 <= index < self.nvars:
            raise UsageError(f"cannot differentiate with respect to variable {index + 1} of {self.nvars}")
        derived: list[tuple[Monomial, Fraction]] = []
        for monomial, value in self.terms:
            power = monomial.power(index)
            if power:
                powers = dict(monomial.powers)
                powers[index] = power - 1
                derived.append((Monomial.from_powers(powers), value * power))
        return MultiPoly.from_terms(self.space, self.nvars, derived)

    def evaluate(self, point: Sequence[Rational]) -> Fraction:
        if len(point) != self.nvars:
            raise UsageError(f"point has {len(point)} coordinates, polynomial has {self.nvars} variables")
        return sum((value * monomial.evaluate(point) for monomial, value in self.terms), Fraction(0))

    def degenerate(self, indices: Iterable[int]) -> "MultiPoly":
        """Set the given variables to zero."""
        killed = frozenset(indices)
        return MultiPoly(
            self.space,
            self.nvars,
            tuple((monomial, value) for monomial, value in self.terms if not monomial.indices() & killed),
        )

    def primitive(self) -> "MultiPoly":
        """Scale to coprime integer coefficients with a positive leading coefficient."""
        if not self.terms:
            return self
        common = lcm(*(value.denominator for _, value in self.terms))
        integers = [int(value * common) for _, value in self.terms]
        divisor = gcd(*integers)
        if integers[0] < 0:
            divisor = -divisor
        return self.scale(Fraction(common, divisor))

    # -- printing ----------------------------------------------------------

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        pieces: list[str] = []
        for position, (monomial, value) in enumerate(self.terms):
            magnitude = abs(value)
            body = monomial.to_text(self.space)
            if not body:
                text = _format_coefficient(magnitude)
            elif magnitude == 1:
                text = body
            else:
                text = f"{_format_coefficient(magnitude)}*{body}"
            if position == 0:
                pieces.append(f"-{text}" if value < 0 else text)
            else:
                pieces.append(f" - {text}" if value < 0 else f" + {text}")
        return "".join(pieces)

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class ULaurentPoly:
    """Laurent polynomial in the curve parameter ``u`` with parameter-space coefficients."""

    terms: tuple[tuple[int, MultiPoly], ...] = ()

    def __post_init__(self) -> None:
        exponents = [exponent for exponent, _ in self.terms]
        if any(first <= second for first, second in zip(exponents, exponents[1:])):
            raise UsageError("u-exponents must be strictly decreasing")
        if any(coefficient.is_zero() for _, coefficient in self.terms):
            raise UsageError("identically zero u-coefficients are never stored")

    @classmethod
    def from_terms(cls, terms: Mapping[int, MultiPoly]) -> "ULaurentPoly":
        return cls(tuple(sorted(((e, p) for e, p in terms.items() if not p.is_zero()), key=lambda t: -t[0])))

    def exponents(self) -> tuple[int, ...]:
        return tuple(exponent for exponent, _ in self.terms)

    def coefficient(self, exponent: int) -> MultiPoly | None:
        for candidate, value in self.terms:
            if candidate == exponent:
                return value
        return None

    def to_text(self) -> str:
        return "{" + ", ".join(f"u^{exponent}: {value.to_text()}" for exponent, value in self.terms) + "}"


# -- functional surface ------------------------------------------------------


def poly_arith(kind: Literal["add", "mul"], p: MultiPoly, q: MultiPoly) -> MultiPoly:
    if kind == "add":
        return p + q
    if kind == "mul":
        return p * q
    raise UsageError(f"unknown polynomial operation {kind!r}")


def poly_eval(p: MultiPoly, point: Sequence[Rational]) -> Fraction:
    return p.evaluate(point)


def poly_partial(p: MultiPoly, var: int) -> MultiPoly:
    return p.partial(var)


def primitive_vector(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries, keeping signs."""
    divisor = gcd(*v) if v else 0
    if divisor == 0:
        raise UsageError("the zero vector has no primitive representative")
    return tuple(entry // divisor for entry in v)


# -- exact linear algebra ------------------------------------------------------


def _integer_row(row: Sequence[Rational]) -> list[int]:
    values = [Fraction(entry) for entry in row]
    common = lcm(*(value.denominator for value in values)) if values else 1
    integers = [int(value * common) for value in values]
    divisor = gcd(*integers) if integers else 0
    return [entry // divisor for entry in integers] if divisor > 1 else integers


def _leading_index(row: Sequence[Rational]) -> int:
    for index, entry in enumerate(row):
        if entry:
            return index
    return -1


def _column_count(rows: Sequence[Sequence[Rational]], ncols: int | None) -> int:
    width = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    for row in rows:
        if len(row) != width:
            raise UsageError(f"ragged matrix: row of length {len(row)} in a {width}-column matrix")
    return width


class RowSpace:
    """
    Row space kept in fraction-free echelon form, built one row at a time.

    ``rows`` holds ``(pivot column, primitive integer row)`` pairs sorted by pivot;
    every row is zero left of its pivot and the pivots are distinct.
    """

    def __init__(self, ncols: int) -> None:
        self.ncols = ncols
        self.rows: list[tuple[int, list[int]]] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, row: Sequence[Rational]) -> list[int]:
        if len(row) != self.ncols:
            raise UsageError(f"row of length {len(row)} in a {self.ncols}-column matrix")
        current = _integer_row(row)
        for pivot, basis_row in self.rows:
            entry = current[pivot]
            if entry:
                lead = basis_row[pivot]
                current = _integer_row([lead * mine - entry * theirs for mine, theirs in zip(current, basis_row)])
        return current

    def add(self, row: Sequence[Rational]) -> bool:
        """Insert ``row``; returns False when it was already in the span."""
        current = self.reduce(row)
        pivot = _leading_index(current)
        if pivot < 0:
            return False
        insort(self.rows, (pivot, current))
        return True

    def __contains__(self, row: Sequence[Rational]) -> bool:
        return _leading_index(self.reduce(row)) < 0


def echelon_form(rows: Sequence[Sequence[Rational]], ncols: int | None = None) -> list[tuple[int, list[int]]]:
    """Fraction-free row echelon form as ``(pivot column, integer row)`` pairs sorted by pivot."""
    space = RowSpace(_column_count(rows, ncols))
    for row in rows:
        space.add(row)
    return space.rows


def rank_exact(m: Sequence[Sequence[Rational]]) -> int:
    return len(echelon_form(m))


def row_reduce(rows: Sequence[Sequence[Rational]], ncols: int | None = None) -> list[list[Fraction]]:
    """Reduced row echelon form without zero rows (unique for the row space)."""
    basis = echelon_form(rows, ncols)
    pivots = [pivot for pivot, _ in basis]
    reduced = [[Fraction(entry, row[pivot]) for entry in row] for pivot, row in basis]
    for lower in reversed(range(len(reduced))):
        column = pivots[lower]
        for upper in range(lower):
            factor = reduced[upper][column]
            if factor:
                reduced[upper] = [a - factor * b for a, b in zip(reduced[upper], reduced[lower])]
    return reduced


def nullspace(rows: Sequence[Sequence[Rational]], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of ``{v : M v = 0}``: one vector per non-pivot column."""
    width = _column_count(rows, ncols)
    reduced = row_reduce(rows, width)
    pivots = [_leading_index(row) for row in reduced]
    basis = []
    for free in (column for column in range(width) if column not in pivots):
        vector = [Fraction(0)] * width
        vector[free] = Fraction(1)
        for pivot, row in zip(pivots, reduced):
            vector[pivot] = -row[free]
        basis.append(vector)
    return basis


def jacobian(polys: Sequence[MultiPoly], variables: Sequence[int]) -> list[list[MultiPoly]]:
    return [[poly.partial(variable) for variable in variables] for poly in polys]


def evaluate_matrix(matrix: Sequence[Sequence[MultiPoly]], point: Sequence[Rational]) -> list[list[Fraction]]:
    return [[entry.evaluate(point) for entry in row] for row in matrix]


def determinant(matrix: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Symbolic determinant by cofactor expansion along the first row."""
    size = len(matrix)
    if size == 0 or any(len(row) != size for row in matrix):
        raise UsageError("determinant needs a non-empty square matrix")
    if size == 1:
        return matrix[0][0]
    first = matrix[0][0]
    total = MultiPoly.zero(first.space, first.nvars)
    for column, entry in enumerate(matrix[0]):
        if entry.is_zero():
            continue
        minor = [row[:column] + row[column + 1:] for row in matrix[1:]]
        cofactor = entry * determinant(minor)
        total = total + cofactor if column % 2 == 0 else total - cofactor
    return total
