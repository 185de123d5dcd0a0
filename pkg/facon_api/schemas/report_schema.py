from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class TupleClassSchema(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    degrees: str = Field(..., alias="tuple", description="Primitive degree tuple, e.g. '(1;2)'")
    representative: List[int] = Field(..., description="Smallest exponent vector of the class")
    limit: List[str] = Field(..., description="Limit components as polynomials in c1..cn")


class FaconEntrySchema(BaseModel):
    label: str = Field(..., description="Facon label, e.g. '(1,3)[2]'")
    classes: List[TupleClassSchema] = Field(..., description="Tuple classes realizing the facon")


class StratumSchema(BaseModel):
    id: str = Field(..., description="Stratum id, S0 being the highest-dimensional")
    facons: List[str] = Field(..., description="Facons whose filtrations produce the stratum")
    etoile_level: int = Field(..., description="Lowest etoile level among the labels")
    etoile_labels: List[str] = Field(..., description="Labels of the form '(3)[1,2]^{1*}'")
    dimension: int = Field(..., description="Complex dimension")
    implicit_eqs: List[str] = Field(..., description="Minimal relations in a1..an")
    parametrizations: List[List[str]] = Field(..., description="Limit mappings sweeping the stratum")
    sample_points: List[List[str]] = Field(..., description="Exact sample points")
    contains: List[str] = Field(..., description="Strata lying in the closure of this one")
    rank_profile: List[int] = Field(..., description="Jacobian ranks at random points")
    rank_drop: bool = Field(..., description="Whether a rank below the dimension was seen")

    @field_validator("dimension", "etoile_level")
    def check_non_negative(cls, value: int) -> int:
        if value < 0:
            raise ValueError("Must be non-negative")
        return value


class FiltrationLevelSchema(BaseModel):
    dimension: int = Field(..., description="Dimension of the level")
    strata: List[str] = Field(..., description="Strata of that dimension")


class PartitionEntrySchema(BaseModel):
    facons: List[str] = Field(..., description="Facons reaching the strata")
    strata: List[str] = Field(..., description="Strata with that facon set")


class ScopeSchema(BaseModel):
    E: int = Field(..., description="Exponent box bound")
    D: int = Field(..., description="Implicit degree bound")
    seed: int = Field(..., description="Seed of every random draw")
    trials: int = Field(..., description="Random points per dimension estimate")
    samples: int = Field(..., description="Image points per implicitization")
    note: str = Field(..., description="Limits of the computation")


class ReportSchema(BaseModel):
    version: str
    mapping: str = Field(..., description="Canonical mapping text")
    n: int
    dominant: bool
    facons: List[FaconEntrySchema]
    partition: List[PartitionEntrySchema]
    top_dimension: Optional[int] = Field(..., description="Null when the asymptotic set is empty")
    hypersurface: bool
    scope: ScopeSchema
    warnings: List[str]
    strata: List[StratumSchema]
    filtration: List[FiltrationLevelSchema]
    frontier: bool
    frontier_violations: List[str]


class NumericCheckSchema(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    facon: str
    degrees: str = Field(..., alias="tuple")
    representative: List[int]
    coefficients: List[str]
    expected: List[str]
    schedule: List[float]
    deviations: List[float]
    passed: bool
    tolerance: float
    notes: List[str]


class OracleSchema(BaseModel):
    agrees: bool
    numeric_facons: List[str]
    symbolic_facons: List[str]
    mismatches: List[str]


class VerifyReportSchema(BaseModel):
    version: str
    mapping: str
    passed: bool
    checks: List[NumericCheckSchema]
    oracle: Optional[OracleSchema]
    scope: dict
