"""Report documents (plain dicts, JSON and text) built from analysis results."""
import json
from fractions import Fraction
from typing import Any, Dict, List, Sequence

from facon_api.config import Config, load_version_info
from facon_api.services.facons import FaconCatalog
from facon_api.services.strata import AsymptoticSetReport, FrontierReport, Stratification, Stratum
from facon_api.services.verify import NumericCheckReport, VerifyReport

SCOPE_NOTE = "monomial test curves only; closures certified up to the implicit degree and sample budget"


def rational_text(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def point_text(point: Sequence[Fraction]) -> List[str]:
    return [rational_text(value) for value in point]


def catalog_to_list(catalog: FaconCatalog) -> List[Dict[str, Any]]:
    return [
        {
            "label": facon.label,
            "classes": [
                {
                    "tuple": tuple_class.degrees.to_text(),
                    "representative": list(tuple_class.representative.e),
                    "limit": tuple_class.limit.to_texts(),
                }
                for tuple_class in classes
            ],
        }
        for facon, classes in catalog.entries
    ]


def stratum_to_dict(stratum: Stratum, stratification: Stratification) -> Dict[str, Any]:
    return {
        "id": stratum.id,
        "facons": [facon.label for facon in stratum.facons],
        "etoile_level": stratum.etoile_level,
        "etoile_labels": stratum.etoile_labels(),
        "dimension": stratum.dimension,
        "implicit_eqs": [equation.to_text() for equation in stratum.implicit_eqs],
        "parametrizations": [limit.to_texts() for limit in stratum.parametrizations],
        "sample_points": [point_text(point) for point in stratum.sample_points[: Config.REPORT_SAMPLES]],
        "contains": stratification.contained_in(stratum.id),
        "rank_profile": list(stratum.rank_profile),
        "rank_drop": stratum.rank_drop,
    }


def stratification_to_dict(stratification: Stratification, frontier: FrontierReport) -> Dict[str, Any]:
    return {
        "strata": [stratum_to_dict(stratum, stratification) for stratum in stratification.strata],
        "filtration": [{"dimension": dimension, "strata": ids} for dimension, ids in stratification.filtration],
        "frontier": frontier.holds,
        "frontier_violations": list(frontier.violations),
    }


def report_to_dict(report: AsymptoticSetReport) -> Dict[str, Any]:
    document = {
        "version": load_version_info().get("version", "unknown"),
        "mapping": report.mapping.to_text(),
        "n": report.mapping.n,
        "dominant": report.dominant,
        "facons": catalog_to_list(report.catalog),
        "partition": [
            {"facons": [facon.label for facon in facons], "strata": ids} for facons, ids in report.partition
        ],
        "top_dimension": report.top_dimension,
        "hypersurface": report.hypersurface,
        "scope": {**report.scope, "note": SCOPE_NOTE},
        "warnings": list(report.warnings),
    }
    document.update(stratification_to_dict(report.stratification, report.frontier))
    return document


def numeric_check_to_dict(check: NumericCheckReport) -> Dict[str, Any]:
    return {
        "schedule": list(check.schedule),
        "deviations": list(check.deviations),
        "passed": check.passed,
        "tolerance": check.tolerance,
        "notes": list(check.notes),
    }


def verify_to_dict(report: VerifyReport, mapping_text: str, scope: Dict[str, int]) -> Dict[str, Any]:
    oracle = report.oracle
    return {
        "version": load_version_info().get("version", "unknown"),
        "mapping": mapping_text,
        "passed": report.passed,
        "checks": [
            {
                "facon": check.facon,
                "tuple": check.degrees,
                "representative": list(check.representative),
                "coefficients": point_text(check.coefficients),
                "expected": point_text(check.expected),
                **numeric_check_to_dict(check.report),
            }
            for check in report.class_checks
        ],
        "oracle": None
        if oracle is None
        else {
            "agrees": oracle.agrees,
            "numeric_facons": list(oracle.numeric_facons),
            "symbolic_facons": list(oracle.symbolic_facons),
            "mismatches": list(oracle.mismatches),
        },
        "scope": dict(scope),
    }


def render_json(document: Any) -> str:
    return json.dumps(document, indent=2, sort_keys=True)


def render_text(report: AsymptoticSetReport) -> str:
    lines = [f"mapping: {report.mapping.to_text()}", f"dominant: {'yes' if report.dominant else 'no'}"]
    lines.append(f"facons ({len(report.catalog.entries)} found, E={report.scope['E']}):")
    for facon, classes in report.catalog.entries:
        lines.append(f"  {facon.label}")
        for tuple_class in classes:
            limit = ", ".join(tuple_class.limit.to_texts())
            lines.append(f"    class {tuple_class.degrees.to_text()}  e={tuple_class.representative.e}  limit ({limit})")

    lines.append("strata:" if report.strata else "strata: none (the mapping is proper on the searched curves)")
    for stratum in report.strata:
        lines.append(f"  {stratum.id}  dim {stratum.dimension}  {' '.join(stratum.etoile_labels())}")
        equations = ", ".join(equation.to_text() for equation in stratum.implicit_eqs) or "none up to the degree bound"
        lines.append(f"      equations: {equations}")
        contained = report.stratification.contained_in(stratum.id)
        if contained:
            lines.append(f"      closure contains: {', '.join(contained)}")
        if stratum.rank_drop:
            lines.append(f"      jacobian rank drops: {list(stratum.rank_profile)}")

    if report.strata:
        steps = [f"dim {dimension} {{{', '.join(ids)}}}" for dimension, ids in report.stratification.filtration]
        lines.append("filtration: S_F = " + " ⊃ ".join(steps) + " ⊃ ∅")
    for facons, ids in report.partition:
        lines.append(f"partition: {{{', '.join(facon.label for facon in facons)}}} -> {', '.join(ids)}")
    lines.append(f"top dimension: {report.top_dimension}  hypersurface: {'yes' if report.hypersurface else 'no'}")
    lines.append(f"frontier: {'true' if report.frontier.holds else 'false'}")
    for violation in report.frontier.violations:
        lines.append(f"  violation: {violation}")
    for warning in report.warnings:
        lines.append(f"warning: {warning}")
    scope = " ".join(f"{key}={value}" for key, value in report.scope.items())
    lines.append(f"scope: {scope}; {SCOPE_NOTE}")
    return "\n".join(lines) + "\n"


def render_verify_text(report: VerifyReport) -> str:
    lines = []
    for check in report.class_checks:
        status = "ok" if check.report.passed else "FAILED"
        final = check.report.deviations[-1] if check.report.deviations else float("nan")
        lines.append(f"{status:6} {check.facon} class {check.degrees} e={check.representative} final deviation {final:.3e}")
        for note in check.report.notes:
            lines.append(f"       note: {note}")
    if report.oracle is not None:
        lines.append(f"oracle: {'agrees' if report.oracle.agrees else 'disagrees'} ({', '.join(report.oracle.numeric_facons) or 'no facons'})")
        for mismatch in report.oracle.mismatches:
            lines.append(f"  {mismatch}")
    lines.append(f"verify: {'passed' if report.passed else 'failed'}")
    return "\n".join(lines) + "\n"
