from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from facon_api.config import Config

# Upper bounds accepted over HTTP; the CLI only enforces the lower bounds
HTTP_MAX_EXPONENT = 4
HTTP_MAX_DEGREE = 6
HTTP_MAX_SAMPLES = 400
HTTP_MAX_N = 12
# Analyses over HTTP: source dimension and size of the exponent box [-E, E]^n
HTTP_MAX_VARIABLES = 6
HTTP_MAX_VECTORS = 20_000


class RunConfig(BaseModel):
    command: Literal["analyze", "stratify", "count-facons", "verify"] = Field(..., description="Pipeline to run")
    input: Optional[str] = Field(None, description="Path of the mapping description")
    n: Optional[int] = Field(None, description="Dimension for count-facons")
    max_exponent: int = Field(Config.MAX_EXPONENT, description="Exponent box bound E")
    degree: int = Field(Config.DEGREE, description="Implicit equation degree bound D")
    seed: int = Field(Config.SEED, description="Seed of every random draw")
    trials: int = Field(Config.TRIALS, description="Random points per dimension estimate")
    samples: int = Field(Config.SAMPLES, description="Image points per implicitization")
    workers: int = Field(Config.WORKERS, description="Processes used for the exponent enumeration")
    format: Literal["json", "text"] = Field("json", description="Output format")

    @field_validator("max_exponent", "degree", "trials", "samples", "workers")
    def check_positive(cls, value: int) -> int:
        """Ensure bounds and counts are at least 1."""
        if value < 1:
            raise ValueError("Must be at least 1")
        return value

    @field_validator("n")
    def check_dimension(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError("Dimension must be at least 1")
        return value

    @model_validator(mode="after")
    def check_target(self) -> "RunConfig":
        """count-facons needs n, every other command needs an input file."""
        if self.command == "count-facons" and self.n is None:
            raise ValueError("count-facons requires -n")
        if self.command != "count-facons" and not self.input:
            raise ValueError(f"{self.command} requires an input file")
        return self


class AnalyzeRequestSchema(BaseModel):
    mapping: str = Field(..., description="Mapping description, e.g. 'vars x1 x2; x1; x1*x2'")
    max_exponent: int = Field(Config.MAX_EXPONENT, description="Exponent box bound E")
    degree: int = Field(Config.DEGREE, description="Implicit equation degree bound D")
    seed: int = Field(Config.SEED, description="Seed of every random draw")
    trials: int = Field(Config.TRIALS, description="Random points per dimension estimate")
    samples: int = Field(Config.SAMPLES, description="Image points per implicitization")

    @field_validator("mapping")
    def check_mapping(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("Mapping must not be empty")
        return value

    @field_validator("max_exponent")
    def check_max_exponent(cls, value: int) -> int:
        if not 1 <= value <= HTTP_MAX_EXPONENT:
            raise ValueError(f"max_exponent must be between 1 and {HTTP_MAX_EXPONENT}")
        return value

    @field_validator("degree")
    def check_degree(cls, value: int) -> int:
        if not 1 <= value <= HTTP_MAX_DEGREE:
            raise ValueError(f"degree must be between 1 and {HTTP_MAX_DEGREE}")
        return value

    @field_validator("trials", "samples")
    def check_counts(cls, value: int) -> int:
        if not 1 <= value <= HTTP_MAX_SAMPLES:
            raise ValueError(f"Must be between 1 and {HTTP_MAX_SAMPLES}")
        return value


class VerifyRequestSchema(BaseModel):
    mapping: str = Field(..., description="Mapping description")
    max_exponent: int = Field(Config.ORACLE_MAX_EXPONENT, description="Exponent box bound E of the checked catalog")
    seed: int = Field(Config.SEED, description="Seed of the random coefficients")

    @field_validator("max_exponent")
    def check_max_exponent(cls, value: int) -> int:
        if not 1 <= value <= HTTP_MAX_EXPONENT:
            raise ValueError(f"max_exponent must be between 1 and {HTTP_MAX_EXPONENT}")
        return value


class CountRequestSchema(BaseModel):
    n: int = Field(..., description="Dimension of the source space")

    @field_validator("n")
    def check_n(cls, value: int) -> int:
        if not 1 <= value <= HTTP_MAX_N:
            raise ValueError(f"n must be between 1 and {HTTP_MAX_N}")
        return value
