import json
import os
from typing import Any, Dict

from pydantic import ValidationError

REPORT_SCHEMA_PATH = os.path.join(
    os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))), "docs", "report.schema.json"
)


def format_validation_error(error: ValidationError) -> str:
    """
    Helper function to format Pydantic validation errors into a single, readable message.

    :param error: ValidationError instance from Pydantic.
    :return: A formatted string summarizing all validation issues, e.g. "degree: Must be at least 1".
    """
    return "; ".join(
        f"{'.'.join(map(str, err['loc'])) or 'request'}: {err['msg']}" for err in error.errors()
    )


def load_report_schema() -> Dict[str, Any]:
    """JSON schema shipped in docs/ that every analysis report conforms to."""
    with open(REPORT_SCHEMA_PATH, "r") as f:
        return json.load(f)
