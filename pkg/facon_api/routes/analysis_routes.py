from typing import Any, Dict

from loguru import logger
from quart import Blueprint, Response, jsonify, request

from facon_api.controllers import analysis_controller
from facon_api.routes.utils import sanitize_request

analysis_api = Blueprint("analysis_api", __name__)


@analysis_api.errorhandler(Exception)
async def handle_exception(e: Exception) -> Any:
    """Handle unexpected errors and log the exception."""
    if type(e).__name__ == "RateLimitExceeded":
        # Retry after
        headers = e.get_headers()
        return jsonify({"error": "Rate limit exceeded. Please try again later."}), 429, headers

    logger.error(f"Unhandled exception from {request.remote_addr}: {e}")
    return jsonify({"error": "An unexpected error occurred. Please report this immediately!"}), 500


@analysis_api.route("/analyze", methods=["POST"])
async def analyze() -> tuple[Response, int]:
    """Compute the full asymptotic set report of a mapping."""
    data = await sanitize_request(await request.get_json(silent=True))
    logger.info(f"Analyze request from {request.remote_addr}: {data.get('mapping')}")
    result: Dict[str, Any] = await analysis_controller.analyze(data)
    return jsonify(result), result.get("status", 200)


@analysis_api.route("/stratify", methods=["POST"])
async def stratify() -> tuple[Response, int]:
    """Strata, filtration and frontier verdict of a mapping."""
    data = await sanitize_request(await request.get_json(silent=True))
    logger.info(f"Stratify request from {request.remote_addr}: {data.get('mapping')}")
    result: Dict[str, Any] = await analysis_controller.stratify(data)
    return jsonify(result), result.get("status", 200)


@analysis_api.route("/verify", methods=["POST"])
async def verify() -> tuple[Response, int]:
    """Numeric convergence checks and oracle cross-check of a mapping's catalog."""
    data = await sanitize_request(await request.get_json(silent=True))
    logger.info(f"Verify request from {request.remote_addr}: {data.get('mapping')}")
    result: Dict[str, Any] = await analysis_controller.verify_mapping(data)
    return jsonify(result), result.get("status", 200)


@analysis_api.route("/facons/count/<int:n>", methods=["GET"])
async def count_facons(n: int) -> tuple[Response, int]:
    """Largest possible number of facons of a mapping of C^n."""
    result: Dict[str, Any] = await analysis_controller.count_facons(n)
    return jsonify(result), result.get("status", 200)
