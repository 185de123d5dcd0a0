"""
Floating-point oracles for the symbolic pipeline.

Nothing here feeds back into the exact computations: these checks re-derive
limits and facons numerically and report whether they agree.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import List, Optional, Sequence

import numpy as np
from loguru import logger

from facon_api.config import Config
from facon_api.errors import UsageError
from facon_api.services.curves import ExponentVector
from facon_api.services.facons import FaconCatalog, collect_facons
from facon_api.services.parser import PolynomialMapping

Number = Fraction | int | float


@dataclass(frozen=True)
class NumericCheckReport:
    """
    Deviations ``max_k |F_k(gamma(u)) - a_k| / max(1, max_k |a_k|)`` along a schedule of ``u``.

    ``passed`` iff the last deviation is below ``tolerance`` and the deviations do not
    increase over the last three schedule points.
    """

    schedule: tuple[float, ...]
    deviations: tuple[float, ...]
    passed: bool
    tolerance: float
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class ClassCheck:
    facon: str
    degrees: str
    representative: tuple[int, ...]
    coefficients: tuple[Fraction, ...]
    expected: tuple[Fraction, ...]
    report: NumericCheckReport


@dataclass(frozen=True)
class OracleReport:
    agrees: bool
    numeric_facons: tuple[str, ...]
    symbolic_facons: tuple[str, ...]
    mismatches: tuple[str, ...] = ()


@dataclass
class VerifyReport:
    class_checks: List[ClassCheck] = field(default_factory=list)
    oracle: Optional[OracleReport] = None

    @property
    def passed(self) -> bool:
        return all(check.report.passed for check in self.class_checks) and (self.oracle is None or self.oracle.agrees)


class _FloatMapping:
    """Float64 evaluation of a mapping: one (exponent matrix, coefficient vector) pair per component."""

    def __init__(self, F: PolynomialMapping) -> None:
        self.n = F.n
        self.components = []
        for component in F.components:
            exponents = np.array([monomial.dense(F.n) for monomial, _ in component.terms], dtype=np.float64)
            coefficients = np.array([float(value) for _, value in component.terms], dtype=np.float64)
            self.components.append((exponents.reshape(-1, F.n), coefficients))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        values = []
        for exponents, coefficients in self.components:
            if coefficients.size == 0:
                values.append(0.0)
                continue
            values.append(float(coefficients @ np.prod(x**exponents, axis=1)))
        return np.array(values, dtype=np.float64)

    def log_bound(self, log_x: np.ndarray) -> np.ndarray:
        """Per component, the log of the sum of absolute term values at ``exp(log_x)``; never overflows."""
        bounds = []
        for exponents, coefficients in self.components:
            if coefficients.size == 0:
                bounds.append(-np.inf)
                continue
            bounds.append(float(np.logaddexp.reduce(np.log(np.abs(coefficients)) + exponents @ log_x)))
        return np.array(bounds, dtype=np.float64)


def _curve_point(coefficients: np.ndarray, e: ExponentVector, u: float) -> np.ndarray:
    return coefficients * np.power(u, np.array(e.e, dtype=np.float64))


def numeric_curve_check(
    F: PolynomialMapping,
    e: ExponentVector,
    coeffs: Sequence[Number],
    expected: Sequence[Number],
    schedule: Sequence[float] = Config.DEFAULT_SCHEDULE,
    tol: float = Config.CONVERGENCE_TOLERANCE,
) -> NumericCheckReport:
    """Evaluate ``F`` along ``x_i = c_i u^(e_i)`` in float64 and measure the distance to ``expected``."""
    if len(coeffs) != F.n or len(expected) != F.n or e.n != F.n:
        raise UsageError(f"curve data does not match a mapping in {F.n} variables")
    if any(later <= earlier for earlier, later in zip(schedule, schedule[1:])):
        raise UsageError(f"schedule {list(schedule)} is not increasing")

    evaluate = _FloatMapping(F)
    c = np.array([float(value) for value in coeffs], dtype=np.float64)
    target = np.array([float(value) for value in expected], dtype=np.float64)
    scale = max(1.0, float(np.max(np.abs(target)))) if target.size else 1.0

    kept: list[float] = []
    deviations: list[float] = []
    notes: list[str] = []
    for u in schedule:
        try:
            with np.errstate(over="raise", invalid="raise"):
                values = evaluate(_curve_point(c, e, u))
        except FloatingPointError:
            notes.append(f"overflow at u={u:g}; dropped from the schedule")
            logger.debug(f"Overflow evaluating {F.to_text()} along {e.e} at u={u:g}")
            continue
        if not np.all(np.isfinite(values)):
            notes.append(f"non-finite value at u={u:g}; dropped from the schedule")
            continue
        deviation = float(np.max(np.abs(values - target))) / scale if target.size else 0.0
        kept.append(float(u))
        deviations.append(0.0 if deviation < 1e-12 else deviation)

    tail = deviations[-3:]
    passed = bool(deviations) and deviations[-1] < tol and all(b <= a for a, b in zip(tail, tail[1:]))
    return NumericCheckReport(tuple(kept), tuple(deviations), passed, tol, tuple(notes))


def _unit_coefficients(rng: np.random.Generator, n: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(numerator), 10) for numerator in rng.integers(5, 16, size=n))


def check_catalog(
    F: PolynomialMapping,
    catalog: FaconCatalog,
    seed: int = Config.SEED,
    schedule: Sequence[float] = Config.DEFAULT_SCHEDULE,
    tol: float = Config.CONVERGENCE_TOLERANCE,
) -> list[ClassCheck]:
    """Numeric check of every catalog class against its exact limit at the same coefficients."""
    rng = np.random.default_rng(seed)
    checks = []
    for tuple_class in catalog.all_classes():
        coefficients = _unit_coefficients(rng, F.n)
        expected = tuple_class.limit.evaluate(coefficients)
        report = numeric_curve_check(F, tuple_class.representative, coefficients, expected, schedule, tol)
        if not report.passed:
            logger.warning(
                f"Numeric check failed for {tuple_class.facon.label} class {tuple_class.degrees.to_text()}: {report.deviations}"
            )
        checks.append(
            ClassCheck(
                tuple_class.facon.label,
                tuple_class.degrees.to_text(),
                tuple_class.representative.e,
                coefficients,
                expected,
                report,
            )
        )
    return checks


def _numeric_label(e: Sequence[int]) -> str:
    infinity = [str(index + 1) for index, entry in enumerate(e) if entry > 0]
    zero = [str(index + 1) for index, entry in enumerate(e) if entry < 0]
    return f"({','.join(infinity)})[{','.join(zero)}]"


def oracle_cross_check(F: PolynomialMapping, E_small: int = Config.ORACLE_MAX_EXPONENT, seed: int = Config.SEED) -> OracleReport:
    """
    Re-derive the facon set by brute force in floating point and compare with the symbolic catalog.

    Each vector of ``[-E, E]^n`` with a positive entry is followed to ``u = ORACLE_U`` with random
    coefficients in ``[0.5, 1.5]``; the curve diverges when some component exceeds ``DIVERGENCE_THRESHOLD``.
    Magnitudes are compared in log space, so high-degree terms that overflow float64 on their
    own are still weighed against the terms that pull them back.
    """
    if not 1 <= E_small <= Config.ORACLE_MAX_EXPONENT:
        raise UsageError(f"oracle bound must be in [1, {Config.ORACLE_MAX_EXPONENT}], got {E_small}")
    evaluate = _FloatMapping(F)
    rng = np.random.default_rng(seed)
    found: set[str] = set()
    log_u = np.log(Config.ORACLE_U)
    log_threshold = np.log(Config.DIVERGENCE_THRESHOLD)
    for entries in product(range(-E_small, E_small + 1), repeat=F.n):
        if max(entries) <= 0:
            continue
        c = rng.uniform(0.5, 1.5, size=F.n)
        log_x = np.log(c) + np.array(entries, dtype=np.float64) * log_u
        if float(np.max(evaluate.log_bound(log_x))) <= log_threshold:
            found.add(_numeric_label(entries))

    symbolic = set(collect_facons(F, E_small).labels)
    mismatches = [f"only found numerically: {label}" for label in sorted(found - symbolic)]
    mismatches += [f"only found symbolically: {label}" for label in sorted(symbolic - found)]
    for mismatch in mismatches:
        logger.warning(f"Oracle mismatch for {F.to_text()}: {mismatch}")
    return OracleReport(not mismatches, tuple(sorted(found)), tuple(sorted(symbolic)), tuple(mismatches))


def verify(
    F: PolynomialMapping,
    E: int = Config.MAX_EXPONENT,
    seed: int = Config.SEED,
    workers: int = Config.WORKERS,
) -> VerifyReport:
    """Numeric checks of the catalog for bound ``E`` plus the brute-force oracle at the small bound."""
    catalog = collect_facons(F, E, workers)
    report = VerifyReport(check_catalog(F, catalog, seed), oracle_cross_check(F, min(E, Config.ORACLE_MAX_EXPONENT), seed))
    logger.info(f"Verification of {F.to_text()}: {'passed' if report.passed else 'failed'}")
    return report
