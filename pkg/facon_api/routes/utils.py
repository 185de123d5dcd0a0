from typing import Any, Dict, Optional

from loguru import logger


async def sanitize_request(data: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    """Strip surrounding whitespace from string fields of the request body."""
    logger.info("Sanitizing request data")
    if not data:
        return {}
    for key in data:
        if isinstance(data[key], str):
            data[key] = data[key].strip()

    return data
