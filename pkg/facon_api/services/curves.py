"""
Monomial curves to infinity.

A curve is ``x_i = c_i * u^(e_i)`` with ``u -> infinity``; substituting it into
a mapping gives Laurent polynomials in ``u`` whose coefficients are
polynomials in the symbols ``c_i``. Coefficients never cancel between
different terms of one component, so a component diverges for generic ``c``
exactly when some positive power of ``u`` survives.
"""
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple

from loguru import logger

from facon_api.errors import UsageError
from facon_api.services.algebra import (
    Monomial,
    MultiPoly,
    Rational,
    Space,
    ULaurentPoly,
    evaluate_matrix,
    jacobian,
    primitive_vector,
    rank_exact,
)
from facon_api.services.parser import PolynomialMapping


@dataclass(frozen=True)
class ExponentVector:
    """Exponents of a monomial curve; at least one coordinate must tend to infinity."""

    e: tuple[int, ...]

    def __post_init__(self) -> None:
        if not any(entry > 0 for entry in self.e):
            raise UsageError(f"exponent vector {self.e} has no positive entry")

    @property
    def n(self) -> int:
        return len(self.e)

    def scaled(self, factor: int) -> "ExponentVector":
        if factor < 1:
            raise UsageError("curves can only be reparametrized by positive integer factors")
        return ExponentVector(tuple(entry * factor for entry in self.e))

    def primitive(self) -> "ExponentVector":
        return ExponentVector(primitive_vector(self.e))


class LimitKind(str, Enum):
    DIVERGES_GENERIC = "DivergesGeneric"
    CONVERGES = "Converges"


@dataclass(frozen=True)
class LimitOutcome:
    kind: LimitKind
    value: Optional[MultiPoly] = None

    @property
    def converges(self) -> bool:
        return self.kind == LimitKind.CONVERGES


LABEL_PATTERN = re.compile(r"\(([0-9,\s]*)\)\[([0-9,\s]*)\]")


@dataclass(frozen=True)
class Facon:
    """
    Label ``(i1,...,ip)[j1,...,jq]`` of a way of tending to infinity.

    Indices are 1-based. ``infinity`` coordinates diverge, ``zero`` coordinates
    tend to 0 and ``free`` coordinates keep a point-dependent limit.
    """

    infinity: tuple[int, ...]
    zero: tuple[int, ...] = ()
    free: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not self.infinity:
            raise UsageError("a facon needs at least one coordinate tending to infinity")
        everything = [*self.infinity, *self.zero, *self.free]
        if sorted(everything) != list(range(1, len(everything) + 1)):
            raise UsageError(f"facon index sets {self.infinity}, {self.zero}, {self.free} do not partition 1..n")
        for part in (self.infinity, self.zero, self.free):
            if list(part) != sorted(part):
                raise UsageError("facon index sets must be sorted")

    @classmethod
    def from_label(cls, label: str, n: int) -> "Facon":
        match = LABEL_PATTERN.fullmatch(label.strip())
        if match is None:
            raise UsageError(f"malformed facon label {label!r}")
        infinity, zero = _indices(match.group(1)), _indices(match.group(2))
        free = tuple(index for index in range(1, n + 1) if index not in infinity and index not in zero)
        return cls(infinity, zero, free)

    @property
    def n(self) -> int:
        return len(self.infinity) + len(self.zero) + len(self.free)

    @property
    def label(self) -> str:
        return f"({','.join(map(str, self.infinity))})[{','.join(map(str, self.zero))}]"

    def sort_key(self) -> Tuple[int, tuple[int, ...], int, tuple[int, ...]]:
        return len(self.infinity), self.infinity, len(self.zero), self.zero

    def __lt__(self, other: "Facon") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return self.label


def _indices(group: str) -> tuple[int, ...]:
    return tuple(sorted(int(item) for item in group.split(",") if item.strip()))


@dataclass(frozen=True)
class DegreeTuple:
    """Rates of divergence (``infinity``) and of decay (``zero``) of a curve."""

    infinity: tuple[int, ...]
    zero: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not self.infinity or any(entry < 1 for entry in (*self.infinity, *self.zero)):
            raise UsageError(f"invalid degree tuple {self.infinity};{self.zero}")

    def primitive(self) -> "DegreeTuple":
        entries = primitive_vector((*self.infinity, *self.zero))
        split = len(self.infinity)
        return DegreeTuple(entries[:split], entries[split:])

    def is_primitive(self) -> bool:
        return self == self.primitive()

    def to_text(self) -> str:
        return f"({','.join(map(str, self.infinity))};{','.join(map(str, self.zero))})"

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class LimitMapping:
    """
    Limits of ``F`` along a family of monomial curves, as polynomials in ``c``.

    :param components: ``n`` parameter-space polynomials.
    :param constrained: 0-based indices ``i`` whose ``c_i`` must be nonzero (``e_i != 0``).
    :param unconstrained: 0-based indices with ``e_i == 0``; ``c_i`` is the point-dependent limit coordinate.
    """

    components: tuple[MultiPoly, ...]
    constrained: tuple[int, ...] = ()
    unconstrained: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        for component in self.components:
            if component.space != Space.PARAMETER or component.nvars != self.n:
                raise UsageError("limit components must be parameter polynomials in c1..cn")
        allowed = set(self.constrained) | set(self.unconstrained)
        if not self.free_params <= allowed:
            raise UsageError(f"limit uses parameters {sorted(self.free_params - allowed)} it does not declare")

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def free_params(self) -> frozenset[int]:
        used: set[int] = set()
        for component in self.components:
            used.update(component.variables())
        return frozenset(used)

    @property
    def parameters(self) -> tuple[int, ...]:
        return tuple(sorted(self.free_params))

    @property
    def genericity_constraints(self) -> tuple[MultiPoly, ...]:
        return tuple(MultiPoly.variable(Space.PARAMETER, self.n, index) for index in self.constrained)

    def is_constant(self) -> bool:
        return not self.free_params

    def degenerate(self, indices: Iterable[int]) -> "LimitMapping":
        """Set ``c_i = 0`` for the given indices."""
        killed = frozenset(indices)
        return LimitMapping(
            tuple(component.degenerate(killed) for component in self.components),
            tuple(index for index in self.constrained if index not in killed),
            tuple(index for index in self.unconstrained if index not in killed),
        )

    def evaluate(self, point: Sequence[Rational]) -> tuple[Fraction, ...]:
        return tuple(component.evaluate(point) for component in self.components)

    @cached_property
    def symbolic_jacobian(self) -> list[list[MultiPoly]]:
        return jacobian(self.components, self.parameters)

    def jacobian_rank(self, point: Sequence[Rational]) -> int:
        """Rank of the Jacobian with respect to the occurring parameters at ``point``."""
        if self.is_constant():
            return 0
        return rank_exact(evaluate_matrix(self.symbolic_jacobian, point))

    def to_texts(self) -> list[str]:
        return [component.to_text() for component in self.components]


def substitute(F: PolynomialMapping, e: ExponentVector) -> tuple[ULaurentPoly, ...]:
    """Substitute ``x_i = c_i * u^(e_i)`` into every component of ``F``."""
    if e.n != F.n:
        raise UsageError(f"exponent vector of length {e.n} for a mapping in {F.n} variables")
    substituted = []
    for component in F.components:
        grouped: Dict[int, list[tuple[Monomial, Fraction]]] = {}
        for monomial, coefficient in component.terms:
            exponent = sum(power * e.e[index] for index, power in monomial.powers)
            grouped.setdefault(exponent, []).append((monomial, coefficient))
        substituted.append(
            ULaurentPoly.from_terms(
                {exponent: MultiPoly.from_terms(Space.PARAMETER, F.n, terms) for exponent, terms in grouped.items()}
            )
        )
    return tuple(substituted)


def classify_limit(L: ULaurentPoly, nvars: Optional[int] = None) -> LimitOutcome:
    """
    Generic limit of one substituted component; an absent u^0 term means the limit is 0.

    The zero limit lives in the parameter space of ``L``'s coefficients; ``nvars`` is only
    needed when ``L`` has no terms.
    """
    if L.terms:
        nvars = L.terms[0][1].nvars
    elif nvars is None:
        raise UsageError("the number of parameters of an empty Laurent polynomial must be given")
    if any(exponent > 0 for exponent in L.exponents()):
        return LimitOutcome(LimitKind.DIVERGES_GENERIC)
    constant_term = L.coefficient(0)
    if constant_term is None:
        return LimitOutcome(LimitKind.CONVERGES, MultiPoly.zero(Space.PARAMETER, nvars))
    return LimitOutcome(LimitKind.CONVERGES, constant_term)


def limit_mapping(F: PolynomialMapping, e: ExponentVector) -> Optional[LimitMapping]:
    """Limit of ``F`` along the curve family ``e``, or ``None`` when some component diverges."""
    components = []
    for laurent in substitute(F, e):
        outcome = classify_limit(laurent, F.n)
        if not outcome.converges:
            logger.debug(f"Curve {e.e} diverges")
            return None
        components.append(outcome.value)
    return LimitMapping(
        tuple(components),
        tuple(index for index, entry in enumerate(e.e) if entry != 0),
        tuple(index for index, entry in enumerate(e.e) if entry == 0),
    )


def facon_of(F: PolynomialMapping, e: ExponentVector) -> Facon:
    if limit_mapping(F, e) is None:
        raise UsageError(f"curve {e.e} diverges, it has no facon")
    return facon_of_exponents(e)


def facon_of_exponents(e: ExponentVector) -> Facon:
    """Facon read off the sign pattern of ``e``."""
    return Facon(
        tuple(index + 1 for index, entry in enumerate(e.e) if entry > 0),
        tuple(index + 1 for index, entry in enumerate(e.e) if entry < 0),
        tuple(index + 1 for index, entry in enumerate(e.e) if entry == 0),
    )


def associated_tuple(e: ExponentVector) -> tuple[DegreeTuple, DegreeTuple]:
    """Degree tuple of the curve and its primitive class representative."""
    degrees = DegreeTuple(
        tuple(entry for entry in e.e if entry > 0),
        tuple(-entry for entry in e.e if entry < 0),
    )
    return degrees, degrees.primitive()
