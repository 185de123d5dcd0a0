from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from math import comb, perm
from typing import Dict, Iterator, Optional, Tuple

from loguru import logger

from facon_api.errors import UsageError
from facon_api.services.algebra import determinant, jacobian
from facon_api.services.curves import (
    DegreeTuple,
    ExponentVector,
    Facon,
    LimitMapping,
    associated_tuple,
    facon_of_exponents,
    limit_mapping,
)
from facon_api.services.parser import PolynomialMapping


@dataclass(frozen=True)
class TupleClass:
    """One proportionality class of curves of a facon, with its smallest representative."""

    facon: Facon
    degrees: DegreeTuple
    representative: ExponentVector
    limit: LimitMapping


@dataclass(frozen=True)
class FaconCatalog:
    """Facons found in the box ``[-E, E]^n`` and the tuple classes realizing each of them."""

    n: int
    max_exponent: int
    entries: tuple[tuple[Facon, tuple[TupleClass, ...]], ...] = ()

    @property
    def facons(self) -> tuple[Facon, ...]:
        return tuple(facon for facon, _ in self.entries)

    @property
    def labels(self) -> list[str]:
        return [facon.label for facon in self.facons]

    def classes(self, facon: Facon) -> tuple[TupleClass, ...]:
        for candidate, classes in self.entries:
            if candidate == facon:
                return classes
        raise UsageError(f"facon {facon.label} is not in the catalog")

    def all_classes(self) -> Iterator[TupleClass]:
        for _, classes in self.entries:
            yield from classes

    def is_empty(self) -> bool:
        return not self.entries


def enumerate_exponents(n: int, E: int) -> list[ExponentVector]:
    """Every vector of ``[-E, E]^n`` with a positive entry, in lexicographic order."""
    if n < 1 or E < 1:
        raise UsageError(f"enumeration needs n >= 1 and E >= 1, got n={n}, E={E}")
    return [ExponentVector(entries) for entries in product(range(-E, E + 1), repeat=n) if max(entries) > 0]


def _limit_of(job: Tuple[PolynomialMapping, ExponentVector]) -> Optional[LimitMapping]:
    F, e = job
    return limit_mapping(F, e)


def collect_facons(F: PolynomialMapping, E: int, workers: int = 1) -> FaconCatalog:
    """
    Build the facon catalog of ``F`` from all monomial curves with exponents in ``[-E, E]``.

    Vectors are visited in lexicographic order, so the first vector of a class is its
    smallest representative. With ``workers > 1`` the limits are computed in a process pool;
    the merge stays in enumeration order.
    """
    if not is_dominant(F):
        logger.warning(f"Mapping {F.to_text()} is not dominant; facons are collected anyway")

    vectors = enumerate_exponents(F.n, E)
    logger.info(f"Enumerating {len(vectors)} exponent vectors (n={F.n}, E={E}, workers={workers})")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            limits = list(pool.map(_limit_of, [(F, e) for e in vectors], chunksize=max(1, len(vectors) // (4 * workers))))
    else:
        limits = [limit_mapping(F, e) for e in vectors]

    grouped: Dict[Facon, Dict[DegreeTuple, TupleClass]] = {}
    for e, limit in zip(vectors, limits):
        if limit is None:
            continue
        facon = facon_of_exponents(e)
        _, primitive = associated_tuple(e)
        classes = grouped.setdefault(facon, {})
        if primitive not in classes:
            classes[primitive] = TupleClass(facon, primitive, e, limit)
            logger.debug(f"New class {primitive.to_text()} of facon {facon.label} represented by {e.e}")

    entries = tuple(
        (facon, tuple(sorted(grouped[facon].values(), key=lambda item: item.representative.e)))
        for facon in sorted(grouped)
    )
    catalog = FaconCatalog(F.n, E, entries)
    logger.info(f"Catalog holds facons {catalog.labels}")
    return catalog


def max_facons_count(n: int) -> int:
    """Largest possible number of facons of a mapping of C^n."""
    if n < 1:
        raise UsageError(f"max_facons_count needs n >= 1, got {n}")
    full = sum(comb(n, k) for k in range(1, n + 1))
    partial = sum(comb(n, k) for k in range(1, n))
    ordered = sum(perm(n, k) for k in range(2, n))
    return full + partial + ordered


def is_dominant(F: PolynomialMapping) -> bool:
    """Dominance test: the Jacobian determinant is not identically zero."""
    return not determinant(jacobian(F.components, range(F.n))).is_zero()