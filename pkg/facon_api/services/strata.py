"""
Geometry of the asymptotic set.

Every tuple class of the catalog contributes the image of its limit mapping.
Images are measured (dimension by Jacobian rank at random rational points),
described (implicit equations by interpolation on exact sample points) and
compared (closure containment by evaluating one piece's equations on the
other's samples). The per-facon filtrations are then merged into one
stratification whose strata carry their facon and etoile labels.
"""
import hashlib
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from facon_api.config import Config
from facon_api.errors import GenericityError, UsageError
from facon_api.services.algebra import (
    MultiPoly,
    RowSpace,
    Space,
    monomials_up_to,
    nullspace,
    row_reduce,
)
from facon_api.services.curves import Facon, LimitMapping
from facon_api.services.facons import FaconCatalog, TupleClass, collect_facons, is_dominant
from facon_api.services.parser import PolynomialMapping

Point = tuple[Fraction, ...]


def subsets(indices: Iterable[int], nonempty: bool = False) -> list[tuple[int, ...]]:
    """Subsets of ``indices`` by increasing size, each sorted."""
    items = sorted(indices)
    start = 1 if nonempty else 0
    return [subset for size in range(start, len(items) + 1) for subset in combinations(items, size)]


def fingerprint(limit: LimitMapping) -> str:
    return "{};{};{}".format(
        ",".join(limit.to_texts()),
        ",".join(map(str, limit.constrained)),
        ",".join(map(str, limit.unconstrained)),
    )


@dataclass(frozen=True)
class ParameterSampler:
    """
    Seeded source of random rational parameter values.

    Each task gets its own generator derived from the seed, a purpose string and the
    limit mapping, so results do not depend on the order in which tasks run.
    """

    seed: int = Config.SEED
    numerator_range: tuple[int, int] = Config.SAMPLE_NUMERATOR_RANGE
    denominator_range: tuple[int, int] = Config.SAMPLE_DENOMINATOR_RANGE
    retries: int = Config.GENERICITY_RETRIES

    def generator(self, purpose: str, limit: LimitMapping) -> np.random.Generator:
        key = f"{self.seed}:{purpose}:{fingerprint(limit)}".encode()
        return np.random.default_rng(int.from_bytes(hashlib.sha256(key).digest(), "big"))

    def draw(self, rng: np.random.Generator, limit: LimitMapping, zeroed: Iterable[int] = ()) -> Point:
        """Random parameters with ``c_i != 0`` on the constrained indices and ``c_i = 0`` on ``zeroed``."""
        killed = frozenset(zeroed)
        required = [index for index in limit.constrained if index not in killed]
        low, high = self.numerator_range
        bottom, top = self.denominator_range
        for _ in range(self.retries):
            numerators = rng.integers(low, high, size=limit.n, endpoint=True)
            denominators = rng.integers(bottom, top, size=limit.n, endpoint=True)
            point = tuple(
                Fraction(0) if index in killed else Fraction(int(numerators[index]), int(denominators[index]))
                for index in range(limit.n)
            )
            if all(point[index] != 0 for index in required):
                return point
        raise GenericityError(
            f"no parameters with c{[index + 1 for index in required]} nonzero after {self.retries} draws"
        )


def image_dimension(
    LM: LimitMapping,
    trials: int = Config.TRIALS,
    seed: int = Config.SEED,
    sampler: Optional[ParameterSampler] = None,
) -> int:
    """Largest Jacobian rank of ``LM`` over ``trials`` random generic parameter points."""
    if trials < 1:
        raise UsageError(f"trials must be >= 1, got {trials}")
    if LM.is_constant():
        return 0
    sampler = sampler or ParameterSampler(seed)
    rng = sampler.generator("dimension", LM)
    return max(LM.jacobian_rank(sampler.draw(rng, LM)) for _ in range(trials))


def image_samples(
    LM: LimitMapping,
    count: int,
    seed: int = Config.SEED,
    sampler: Optional[ParameterSampler] = None,
    purpose: str = "samples",
) -> list[Point]:
    """``count`` random image points of ``LM`` (duplicates removed, draw order kept)."""
    sampler = sampler or ParameterSampler(seed)
    rng = sampler.generator(purpose, LM)
    points: Dict[Point, None] = {}
    for _ in range(count):
        points.setdefault(LM.evaluate(sampler.draw(rng, LM)), None)
    return list(points)


def implicitize(
    LM: LimitMapping,
    D: int,
    samples: int = Config.SAMPLES,
    seed: int = Config.SEED,
    sampler: Optional[ParameterSampler] = None,
) -> list[MultiPoly]:
    """
    Polynomials of degree <= ``D`` in ``a1..an`` vanishing on sampled image points.

    The result is the reduced echelon basis of the vanishing space (columns in
    descending graded-lex order), each scaled to primitive integer coefficients.
    At least ``samples`` points are used, and always more than there are monomials.
    """
    _, equations = _interpolate(LM, D, samples, seed, sampler)
    return equations


def _interpolate(
    LM: LimitMapping,
    D: int,
    samples: int,
    seed: int,
    sampler: Optional[ParameterSampler],
) -> Tuple[list[Point], list[MultiPoly]]:
    if D < 1:
        raise UsageError(f"implicit degree must be >= 1, got {D}")
    monomials = monomials_up_to(LM.n, D)
    points = image_samples(LM, max(samples, len(monomials) + 10), seed, sampler)
    matrix = [[monomial.evaluate(point) for monomial in monomials] for point in points]
    basis = row_reduce(nullspace(matrix, len(monomials)), len(monomials))
    equations = [MultiPoly.from_terms(Space.TARGET, LM.n, zip(monomials, row)).primitive() for row in basis]
    logger.debug(f"Image of {LM.to_texts()}: {len(points)} samples, {len(equations)} relations of degree <= {D}")
    return points, equations


def minimal_relations(equations: Sequence[MultiPoly], n: int, D: int) -> list[MultiPoly]:
    """
    Relations not generated by monomial multiples of relations of lower degree.

    ``equations`` must span the whole vanishing space in degrees <= ``D``.
    """
    monomials = monomials_up_to(n, D)
    columns = {monomial: index for index, monomial in enumerate(monomials)}

    def vector(poly: MultiPoly) -> list[Fraction]:
        row = [Fraction(0)] * len(monomials)
        for monomial, value in poly.terms:
            row[columns[monomial]] = value
        return row

    chosen: List[MultiPoly] = []
    for degree in range(1, D + 1):
        span = RowSpace(len(monomials))
        for generator in chosen:
            for multiplier in monomials_up_to(n, degree - generator.degree):
                span.add(vector(generator * MultiPoly.from_terms(Space.TARGET, n, [(multiplier, 1)])))
        for equation in equations:
            if equation.degree == degree and span.add(vector(equation)):
                chosen.append(equation)
    return chosen


@dataclass(frozen=True)
class StratumPart:
    """One parametrization of a stratum, with the tuple classes whose limits it is."""

    limit: LimitMapping
    dimension: int
    facon: Facon
    classes: tuple[TupleClass, ...]
    implicit_eqs: tuple[MultiPoly, ...]


@dataclass(eq=False)
class Stratum:
    """
    A piece of the asymptotic set.

    :param labels: ``(facon, level)`` pairs; ``level`` is the etoile index of the piece in that facon's filtration.
    :param implicit_eqs: Minimal relations of degree <= D vanishing on the stratum.
    :param sample_points: Exact image points the equations were interpolated on.
    """

    id: str
    dimension: int
    implicit_eqs: tuple[MultiPoly, ...]
    sample_points: tuple[Point, ...]
    parts: List[StratumPart] = field(default_factory=list)
    labels: set[tuple[Facon, int]] = field(default_factory=set)
    rank_profile: tuple[int, ...] = ()

    @property
    def facons(self) -> tuple[Facon, ...]:
        return tuple(sorted({facon for facon, _ in self.labels}))

    @property
    def etoile_level(self) -> int:
        return min((level for _, level in self.labels), default=0)

    @property
    def parametrizations(self) -> list[LimitMapping]:
        return [part.limit for part in self.parts]

    @property
    def primary(self) -> StratumPart:
        return self.parts[0]

    @property
    def rank_drop(self) -> bool:
        return any(rank < self.dimension for rank in self.rank_profile)

    def sorted_labels(self) -> list[tuple[Facon, int]]:
        return sorted(self.labels, key=lambda label: (label[0].sort_key(), label[1]))

    def etoile_labels(self) -> list[str]:
        return [f"{facon.label}^{{{level}*}}" for facon, level in self.sorted_labels()]

    def satisfied_by(self, points: Iterable[Point]) -> bool:
        return all(equation.evaluate(point) == 0 for point in points for equation in self.implicit_eqs)


@dataclass
class Stratification:
    strata: List[Stratum]
    containment: List[tuple[str, str]] = field(default_factory=list)
    seed: int = Config.SEED
    trials: int = Config.TRIALS

    @property
    def filtration(self) -> list[tuple[int, list[str]]]:
        """Strata ids grouped by dimension, highest dimension first."""
        dimensions = sorted({stratum.dimension for stratum in self.strata}, reverse=True)
        return [(dimension, [s.id for s in self.strata if s.dimension == dimension]) for dimension in dimensions]

    def get(self, stratum_id: str) -> Stratum:
        for stratum in self.strata:
            if stratum.id == stratum_id:
                return stratum
        raise UsageError(f"no stratum {stratum_id}")

    def contained_in(self, stratum_id: str) -> list[str]:
        return [inner for outer, inner in self.containment if outer == stratum_id]

    def without(self, stratum_ids: Iterable[str]) -> "Stratification":
        """Copy with some strata (and their containment edges) removed."""
        dropped = set(stratum_ids)
        return Stratification(
            [stratum for stratum in self.strata if stratum.id not in dropped],
            [edge for edge in self.containment if not set(edge) & dropped],
            self.seed,
            self.trials,
        )


@dataclass(frozen=True)
class FrontierReport:
    holds: bool
    violations: tuple[str, ...] = ()


def closure_contains(A: Stratum, B: Stratum) -> bool:
    """B lies in the closure of A: B's samples satisfy A's equations and dim B <= dim A."""
    return B.dimension <= A.dimension and A.satisfied_by(B.sample_points)


class ImageProbe:
    """Cached dimension and sample computations shared by the stratification steps."""

    def __init__(self, seed: int = Config.SEED, trials: int = Config.TRIALS, sampler: Optional[ParameterSampler] = None) -> None:
        self.sampler = sampler or ParameterSampler(seed)
        self.trials = trials
        self._dimensions: Dict[LimitMapping, int] = {}
        self._probes: Dict[LimitMapping, list[Point]] = {}

    def dimension(self, limit: LimitMapping) -> int:
        if limit not in self._dimensions:
            self._dimensions[limit] = image_dimension(limit, self.trials, sampler=self.sampler)
        return self._dimensions[limit]

    def probe(self, limit: LimitMapping) -> list[Point]:
        if limit not in self._probes:
            self._probes[limit] = image_samples(limit, Config.PROBE_SAMPLES, sampler=self.sampler, purpose="probe")
        return self._probes[limit]

    def lands_in(self, limit: LimitMapping, target: Stratum | StratumPart) -> bool:
        """The image of ``limit`` has the dimension of ``target`` and lies in its closure."""
        if self.dimension(limit) != target.dimension:
            return False
        return all(equation.evaluate(point) == 0 for point in self.probe(limit) for equation in target.implicit_eqs)

    def regular_at(self, limit: LimitMapping, zeroed: Sequence[int], dimension: int) -> bool:
        """Jacobian of ``limit`` keeps rank ``dimension`` at generic points with ``c_zeroed = 0``."""
        rng = self.sampler.generator(f"regular:{','.join(map(str, zeroed))}", limit)
        return any(
            limit.jacobian_rank(self.sampler.draw(rng, limit, zeroed)) >= dimension for _ in range(self.trials)
        )

    def rank_profile(self, limit: LimitMapping, count: int) -> tuple[int, ...]:
        rng = self.sampler.generator("profile", limit)
        return tuple(limit.jacobian_rank(self.sampler.draw(rng, limit)) for _ in range(count))


class StrataBuilder(ImageProbe):
    """Builds per-facon filtrations and the global stratification of one catalog."""

    def __init__(
        self,
        F: PolynomialMapping,
        catalog: FaconCatalog,
        degree: int = Config.DEGREE,
        samples: int = Config.SAMPLES,
        seed: int = Config.SEED,
        trials: int = Config.TRIALS,
        sampler: Optional[ParameterSampler] = None,
    ) -> None:
        super().__init__(seed, trials, sampler)
        if degree < 1 or samples < 1:
            raise UsageError(f"degree and samples must be >= 1, got D={degree}, samples={samples}")
        self.F = F
        self.catalog = catalog
        self.degree = degree
        self.samples = samples
        self.seed = seed
        self._descriptions: Dict[LimitMapping, Tuple[tuple[MultiPoly, ...], tuple[Point, ...]]] = {}
        self._reaching: Dict[Tuple[int, tuple[MultiPoly, ...]], frozenset[Facon]] = {}

    def describe(self, limit: LimitMapping) -> Tuple[tuple[MultiPoly, ...], tuple[Point, ...]]:
        """Minimal relations and sample points of the image of ``limit``."""
        if limit not in self._descriptions:
            points, equations = _interpolate(limit, self.degree, self.samples, self.seed, self.sampler)
            relations = minimal_relations(equations, limit.n, self.degree)
            self._descriptions[limit] = tuple(relations), tuple(points)
        return self._descriptions[limit]

    # -- facon sets --------------------------------------------------------

    def reaching_facons(self, target: Stratum) -> frozenset[Facon]:
        """
        Facons with a class whose image, possibly after setting some point-dependent
        coordinates ``c_i`` (``e_i = 0``) to zero, has the dimension of ``target`` and lies in its closure.
        """
        key = (target.dimension, target.implicit_eqs)
        if key not in self._reaching:
            found: set[Facon] = set()
            for tuple_class in self.catalog.all_classes():
                if tuple_class.facon in found:
                    continue
                for zeroed in subsets(tuple_class.limit.unconstrained):
                    if self.lands_in(tuple_class.limit.degenerate(zeroed), target):
                        found.add(tuple_class.facon)
                        break
            self._reaching[key] = frozenset(found)
        return self._reaching[key]

    # -- per-facon filtration ------------------------------------------------

    def pieces(self, facon: Facon) -> list[Stratum]:
        """Class images of ``facon`` grouped by closure, highest dimension first."""
        pieces: list[Stratum] = []
        for tuple_class in self.catalog.classes(facon):
            limit = tuple_class.limit
            host = next((piece for piece in pieces if self.lands_in(limit, piece)), None)
            if host is None:
                equations, points = self.describe(limit)
                dimension = self.dimension(limit)
                part = StratumPart(limit, dimension, facon, (tuple_class,), equations)
                pieces.append(Stratum("", dimension, equations, points, [part]))
                continue
            for index, part in enumerate(host.parts):
                if part.limit == limit:
                    host.parts[index] = replace(part, classes=(*part.classes, tuple_class))
                    break
            else:
                host.parts.append(StratumPart(limit, host.dimension, facon, (tuple_class,), host.implicit_eqs))
        return sorted(pieces, key=lambda piece: -piece.dimension)

    def absorbing_host(self, piece: Stratum, placed: Sequence[Stratum]) -> Optional[Stratum]:
        """
        A placed piece whose regular boundary contains ``piece``.

        The host must be reached by the same facons as ``piece``, and setting a nonempty set of
        its constrained parameters to zero must sweep ``piece`` while the host's Jacobian keeps full rank.
        """
        for host in placed:
            if host.dimension <= piece.dimension or not closure_contains(host, piece):
                continue
            if self.reaching_facons(piece) != self.reaching_facons(host):
                continue
            limit = host.primary.limit
            for zeroed in subsets(limit.constrained, nonempty=True):
                if self.lands_in(limit.degenerate(zeroed), piece) and self.regular_at(limit, zeroed, host.dimension):
                    return host
        return None

    def facon_filtration(self, facon: Facon) -> list[list[Stratum]]:
        pieces = self.pieces(facon)
        if not pieces:
            return []
        top = pieces[0].dimension
        levels: list[list[Stratum]] = [[piece for piece in pieces if piece.dimension == top]]
        placed = list(levels[0])
        for piece in pieces[len(placed):]:
            host = self.absorbing_host(piece, placed)
            if host is not None:
                logger.debug(f"{facon.label}: dimension {piece.dimension} piece absorbed by a dimension {host.dimension} piece")
                host.parts.extend(piece.parts)
                continue
            if not any(closure_contains(previous, piece) for previous in placed):
                logger.warning(f"{facon.label}: dimension {piece.dimension} piece lies in no closure of a higher level")
            if levels[-1][0].dimension == piece.dimension:
                levels[-1].append(piece)
            else:
                levels.append([piece])
            placed.append(piece)
        for level_index, level in enumerate(levels):
            for piece in level:
                piece.labels.add((facon, level_index))
        logger.info(f"Facon {facon.label}: level dimensions {[level[0].dimension for level in levels]}")
        return levels

    # -- global stratification ----------------------------------------------

    def stratify(self) -> Stratification:
        merged: list[Stratum] = []
        for facon in self.catalog.facons:
            for level in self.facon_filtration(facon):
                for piece in level:
                    twin = next(
                        (
                            stratum
                            for stratum in merged
                            if stratum.dimension == piece.dimension
                            and closure_contains(stratum, piece)
                            and closure_contains(piece, stratum)
                        ),
                        None,
                    )
                    if twin is None:
                        merged.append(piece)
                    else:
                        twin.parts.extend(piece.parts)
                        twin.labels |= piece.labels

        merged.sort(
            key=lambda stratum: (
                -stratum.dimension,
                min((facon.sort_key(), level) for facon, level in stratum.labels),
                [equation.to_text() for equation in stratum.implicit_eqs],
            )
        )
        for index, stratum in enumerate(merged):
            stratum.id = f"S{index}"
            stratum.rank_profile = self.rank_profile(stratum.primary.limit, self.trials)
            if stratum.rank_drop:
                logger.warning(f"Jacobian rank drops below {stratum.dimension} on stratum {stratum.id}")

        edges = {
            (outer.id, inner.id)
            for outer in merged
            for inner in merged
            if inner.dimension < outer.dimension and closure_contains(outer, inner)
        }
        changed = True
        while changed:
            extra = {(a, d) for a, b in edges for c, d in edges if b == c} - edges
            changed = bool(extra)
            edges |= extra
        order = {stratum.id: index for index, stratum in enumerate(merged)}
        containment = sorted(edges, key=lambda edge: (order[edge[0]], order[edge[1]]))
        logger.info(f"Stratification: {len(merged)} strata, filtration dimensions {[s.dimension for s in merged]}")
        return Stratification(merged, containment, self.seed, self.trials)

    def facon_partition(self, stratification: Stratification) -> list[tuple[tuple[Facon, ...], list[str]]]:
        """Strata grouped by the set of facons reaching them."""
        groups: Dict[tuple[Facon, ...], list[str]] = {}
        for stratum in stratification.strata:
            reaching = tuple(sorted(self.reaching_facons(stratum) | set(stratum.facons)))
            groups.setdefault(reaching, []).append(stratum.id)
        return list(groups.items())


def facon_filtration(
    F: PolynomialMapping,
    facon: Facon,
    catalog: FaconCatalog,
    degree: int = Config.DEGREE,
    samples: int = Config.SAMPLES,
    seed: int = Config.SEED,
    trials: int = Config.TRIALS,
) -> list[list[Stratum]]:
    """Levels of the partition of the asymptotic set defined by one facon."""
    return StrataBuilder(F, catalog, degree, samples, seed, trials).facon_filtration(facon)


def etoile_stratification(
    F: PolynomialMapping,
    catalog: FaconCatalog,
    degree: int = Config.DEGREE,
    samples: int = Config.SAMPLES,
    seed: int = Config.SEED,
    trials: int = Config.TRIALS,
) -> Stratification:
    if catalog.is_empty():
        raise UsageError("cannot stratify an empty catalog")
    return StrataBuilder(F, catalog, degree, samples, seed, trials).stratify()


def check_frontier(S: Stratification) -> FrontierReport:
    """
    Check the frontier property on sampled boundaries.

    Two strata of equal dimension must not contain one another. Every degeneration
    ``c_Z = 0`` of a parametrization that drops dimension must be a regular boundary
    point, another parametrization of the same stratum, or lie in a lower stratum.
    """
    probe = ImageProbe(S.seed, S.trials)
    violations: list[str] = []
    for outer in S.strata:
        for inner in S.strata:
            if inner is not outer and inner.dimension == outer.dimension and closure_contains(outer, inner):
                violations.append(f"{inner.id} lies in the closure of {outer.id} at the same dimension {inner.dimension}")

    for stratum in S.strata:
        for part in stratum.parts:
            for zeroed in subsets(part.limit.constrained, nonempty=True):
                boundary = part.limit.degenerate(zeroed)
                dimension = probe.dimension(boundary)
                if dimension >= part.dimension or probe.regular_at(part.limit, zeroed, part.dimension):
                    continue
                if any(probe.lands_in(boundary, other) for other in stratum.parts):
                    continue
                if any(
                    other is not stratum
                    and dimension <= other.dimension < stratum.dimension
                    and other.satisfied_by(probe.probe(boundary))
                    for other in S.strata
                ):
                    continue
                zero_names = ",".join(f"c{index + 1}" for index in zeroed)
                violations.append(
                    f"boundary {zero_names}=0 of {stratum.id} (dimension {dimension}) lies in no lower stratum"
                )
    unique = tuple(dict.fromkeys(violations))
    for violation in unique:
        logger.warning(f"Frontier violation: {violation}")
    return FrontierReport(not unique, unique)


@dataclass
class AsymptoticSetReport:
    mapping: PolynomialMapping
    dominant: bool
    catalog: FaconCatalog
    stratification: Stratification
    frontier: FrontierReport
    partition: list[tuple[tuple[Facon, ...], list[str]]]
    scope: Dict[str, int]
    warnings: List[str] = field(default_factory=list)

    @property
    def strata(self) -> List[Stratum]:
        return self.stratification.strata

    @property
    def top_dimension(self) -> Optional[int]:
        return max((stratum.dimension for stratum in self.strata), default=None)

    @property
    def hypersurface(self) -> bool:
        return self.top_dimension is None or self.top_dimension == self.mapping.n - 1


def asymptotic_set(
    F: PolynomialMapping,
    E: int = Config.MAX_EXPONENT,
    D: int = Config.DEGREE,
    seed: int = Config.SEED,
    trials: int = Config.TRIALS,
    samples: int = Config.SAMPLES,
    workers: int = Config.WORKERS,
) -> AsymptoticSetReport:
    """Full pipeline: catalog, stratification, implicit equations and frontier check."""
    warnings: list[str] = []
    dominant = is_dominant(F)
    if not dominant:
        warnings.append("mapping is not dominant (Jacobian determinant vanishes identically)")
        logger.warning(f"Analyzing non-dominant mapping {F.to_text()}")

    catalog = collect_facons(F, E, workers)
    if catalog.is_empty():
        stratification = Stratification([], [], seed, trials)
        partition: list[tuple[tuple[Facon, ...], list[str]]] = []
    else:
        builder = StrataBuilder(F, catalog, D, samples, seed, trials)
        stratification = builder.stratify()
        partition = builder.facon_partition(stratification)
    frontier = check_frontier(stratification)

    report = AsymptoticSetReport(
        mapping=F,
        dominant=dominant,
        catalog=catalog,
        stratification=stratification,
        frontier=frontier,
        partition=partition,
        scope={"E": E, "D": D, "seed": seed, "trials": trials, "samples": samples},
        warnings=warnings,
    )
    if dominant and not report.hypersurface:
        report.warnings.append(f"top dimension {report.top_dimension} differs from n-1 = {F.n - 1}")
        logger.warning(report.warnings[-1])
    logger.info(f"Asymptotic set: {len(report.strata)} strata, top dimension {report.top_dimension}")
    return report
