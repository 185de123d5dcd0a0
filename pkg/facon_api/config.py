import json
import os

# Malformed integer settings, reported by the entry points
INVALID_SETTINGS: list[str] = []


def env_int(name: str, default: int) -> int:
    """Integer environment setting; a malformed value falls back to the default and is recorded."""
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        INVALID_SETTINGS.append(f"{name}={raw!r} is not an integer")
        return default


class Config:
    # Production, staging, or development environment
    # prod, stage, dev
    ENVIRONMENT: str = os.getenv("ENVIRONMENT", "dev")

    # If dev/stage then port 7001
    # If prod then port 7000
    PORT: int = 7001 if ENVIRONMENT == "dev" or ENVIRONMENT == "stage" else 7000

    # Seed used when a run does not pass one explicitly
    SEED: int = env_int("FACON_SEED", 0)

    # Box [-E, E]^n searched for curve exponents
    MAX_EXPONENT: int = env_int("FACON_MAX_EXPONENT", 4)

    # Degree bound of implicit equations
    DEGREE: int = env_int("FACON_DEGREE", 4)

    # Random points used per dimension estimate
    TRIALS: int = env_int("FACON_TRIALS", 8)

    # Image points used for implicitization
    SAMPLES: int = env_int("FACON_SAMPLES", 200)

    # 1 = enumerate in-process
    WORKERS: int = env_int("FACON_WORKERS", 1)

    LOG_LEVEL: str = os.getenv("FACON_LOG_LEVEL", "INFO")

    # Empty string disables the file sink
    LOG_DIR: str = os.getenv("FACON_LOG_DIR", "logs")

    # Random rationals num/den with num in [-50, 50] and den in [1, 20]
    SAMPLE_NUMERATOR_RANGE: tuple[int, int] = (-50, 50)
    SAMPLE_DENOMINATOR_RANGE: tuple[int, int] = (1, 20)
    GENERICITY_RETRIES: int = 100

    # Points drawn on a degenerated parametrization when testing where it lands
    PROBE_SAMPLES: int = 12

    # Sample points of each stratum written to reports
    REPORT_SAMPLES: int = 3

    # Numeric oracles
    DIVERGENCE_THRESHOLD: float = 1e3
    ORACLE_U: float = 1e6
    CONVERGENCE_TOLERANCE: float = 1e-2
    DEFAULT_SCHEDULE: tuple[float, ...] = (1e3, 1e4, 1e5, 1e6)
    ORACLE_MAX_EXPONENT: int = 2


# Load version info from 'version.json'
def load_version_info() -> dict:
    try:
        with open(os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "version.json"), "r") as f:
            return json.load(f)
    except Exception as e:
        return {"version": "unknown", "error": str(e)}
