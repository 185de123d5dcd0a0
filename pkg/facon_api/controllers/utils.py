from typing import Any, Dict, Optional, Tuple, Type

from loguru import logger
from pydantic import BaseModel, ValidationError

from facon_api.errors import GenericityError, ParseError, UsageError
from facon_api.schemas.utils import format_validation_error


def error_response(message: str, status: int, additional_data: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Returns a standardized error response."""
    logger.error(message)
    return {"error": message, "status": status, "data": additional_data or {}}


def success_response(message: str, status: int, additional_data: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Returns a standardized success response."""
    logger.info(message)
    return {"message": message, "status": status, "data": additional_data or {}}


def validate_data(schema: Type[BaseModel], data: Dict[str, Any], action: str = "N/A") -> Tuple[Any, bool]:
    """Validates data against a schema, logging errors if validation fails."""
    try:
        validated_data = schema(**data)
        logger.info(f"{action} data validated: {validated_data}")
        return validated_data, False
    except ValidationError as e:
        logger.error(f"Validation error in {action}: {e.errors()}")
        return error_response(format_validation_error(e), 400), True


def exception_response(error: Exception, action: str = "N/A") -> Dict[str, Any]:
    """Maps a failure of the analysis pipeline to a standardized error response."""
    if isinstance(error, ParseError):
        return error_response(f"{action} failed: {error.diagnostic()}", 400, {"line": error.line, "column": error.column})
    if isinstance(error, UsageError):
        return error_response(f"{action} failed: {error}", 400)
    if isinstance(error, GenericityError):
        return error_response(f"{action} failed: {error}", 422)
    logger.exception(error)
    return error_response(f"{action} failed unexpectedly", 500)
