from datetime import timedelta
from beartype.claw import beartype_this_package
from quart_cors import cors
from quart_rate_limiter import RateLimit, RateLimiter, remote_addr_key
beartype_this_package()

import os
from quart import Quart
from loguru import logger
from .config import INVALID_SETTINGS, Config, load_version_info
from .routes import analysis_routes

# Configure logger
if Config.LOG_DIR:
    logger.add(
        sink=os.path.join(Config.LOG_DIR, "facon-api_{time}.log"),
        rotation="1 day",
        retention="14 days",
        level=Config.LOG_LEVEL,
        enqueue=True,
    )


def create_app() -> Quart:
    app = Quart(__name__)

    # Enable CORS for all routes
    app = cors(app, allow_origin="*")

    rate_limiter = RateLimiter(app, key_function=remote_addr_key, default_limits=[
        RateLimit(10, timedelta(seconds=1)),
    ])

    logger.info("Starting Facon API")
    logger.info(f"Running in {Config.ENVIRONMENT} mode")
    for problem in INVALID_SETTINGS:
        logger.warning(f"Ignoring setting: {problem}")
    logger.info(f"Analysis defaults: E={Config.MAX_EXPONENT} D={Config.DEGREE} seed={Config.SEED} trials={Config.TRIALS}")

    # Set the logger for the app
    app.logger = logger

    # Load version info
    app.version_info = load_version_info()

    app.rate_limiter = rate_limiter

    @app.route("/version")
    async def version() -> dict:
        return app.version_info

    @app.route("/")
    async def home() -> str:
        if Config.ENVIRONMENT == "prod":
            return ":)"

        return "greetings curious one"

    # Register API routes
    app.register_blueprint(analysis_routes.analysis_api, url_prefix="/api/analysis")

    return app
