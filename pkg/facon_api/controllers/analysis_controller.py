import asyncio
from typing import Any, Dict

from loguru import logger

from facon_api.controllers.utils import error_response, exception_response, success_response, validate_data
from facon_api.errors import UsageError
from facon_api.schemas.run_schema import (
    HTTP_MAX_VARIABLES,
    HTTP_MAX_VECTORS,
    AnalyzeRequestSchema,
    CountRequestSchema,
    VerifyRequestSchema,
)
from facon_api.services import report as report_service
from facon_api.services.facons import max_facons_count
from facon_api.services.parser import PolynomialMapping, parse_mapping
from facon_api.services.strata import asymptotic_set
from facon_api.services.verify import verify

# HTTP requests always enumerate in-process; the event loop thread pool provides concurrency
HTTP_WORKERS = 1


def _check_size(mapping: PolynomialMapping, E: int) -> None:
    """Reject analyses whose exponent enumeration is too large to serve."""
    if mapping.n > HTTP_MAX_VARIABLES:
        raise UsageError(f"mapping has {mapping.n} variables, at most {HTTP_MAX_VARIABLES} are analyzed over HTTP")
    vectors = (2 * E + 1) ** mapping.n
    if vectors > HTTP_MAX_VECTORS:
        raise UsageError(
            f"exponent box [-{E}, {E}]^{mapping.n} holds {vectors} vectors, at most {HTTP_MAX_VECTORS} over HTTP"
        )


def _analyze(data: AnalyzeRequestSchema) -> Dict[str, Any]:
    mapping = parse_mapping(data.mapping)
    _check_size(mapping, data.max_exponent)
    report = asymptotic_set(mapping, data.max_exponent, data.degree, data.seed, data.trials, data.samples, HTTP_WORKERS)
    return report_service.report_to_dict(report)


def _verify(data: VerifyRequestSchema) -> Dict[str, Any]:
    mapping = parse_mapping(data.mapping)
    _check_size(mapping, data.max_exponent)
    result = verify(mapping, data.max_exponent, data.seed, HTTP_WORKERS)
    scope = {"E": data.max_exponent, "seed": data.seed}
    return report_service.verify_to_dict(result, mapping.to_text(), scope)


# Full report of the asymptotic set
async def analyze(data: Dict[str, Any]) -> Dict[str, Any]:
    validated_data, error = validate_data(AnalyzeRequestSchema, data, "Analyze")

    if error:
        return validated_data

    try:
        document = await asyncio.to_thread(_analyze, validated_data)
    except Exception as e:
        return exception_response(e, "Analyze")

    return success_response("Analysis complete", 200, document)


# Strata, filtration and frontier verdict only
async def stratify(data: Dict[str, Any]) -> Dict[str, Any]:
    validated_data, error = validate_data(AnalyzeRequestSchema, data, "Stratify")

    if error:
        return validated_data

    try:
        document = await asyncio.to_thread(_analyze, validated_data)
    except Exception as e:
        return exception_response(e, "Stratify")

    keys = ("mapping", "strata", "filtration", "frontier", "frontier_violations", "scope", "version")
    return success_response("Stratification complete", 200, {key: document[key] for key in keys})


async def verify_mapping(data: Dict[str, Any]) -> Dict[str, Any]:
    validated_data, error = validate_data(VerifyRequestSchema, data, "Verify")

    if error:
        return validated_data

    try:
        document = await asyncio.to_thread(_verify, validated_data)
    except Exception as e:
        return exception_response(e, "Verify")

    if not document["passed"]:
        logger.warning(f"Verification failed for {document['mapping']}")
        return error_response("Verification found mismatches", 422, document)

    return success_response("Verification passed", 200, document)


async def count_facons(n: int) -> Dict[str, Any]:
    validated_data, error = validate_data(CountRequestSchema, {"n": n}, "Count facons")

    if error:
        return validated_data

    return success_response("Facons counted", 200, {"n": validated_data.n, "count": max_facons_count(validated_data.n)})
