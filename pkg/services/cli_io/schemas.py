"""Pydantic schemas for problem files."""

from typing import Annotated, List, Literal, Optional, Union

import numpy as np
from pydantic import (
    AllowInfNan,
    BaseModel,
    ConfigDict,
    Field,
    Strict,
    StrictInt,
    TypeAdapter,
    field_validator,
    model_validator,
)

# Finite numbers; strings and booleans are refused.
Number = Annotated[float, Strict(), AllowInfNan(False)]
Entry = Union[Number, List[Number]]
RawMatrix = List[List[Entry]]


def _check_entry(entry: Entry) -> None:
    if isinstance(entry, list) and len(entry) != 2:
        raise ValueError("complex entries must be [re, im] pairs")


def check_matrix(rows: RawMatrix) -> RawMatrix:
    """Rectangular, with well-formed [re, im] pairs."""
    if not rows:
        return rows
    width = len(rows[0])
    for index, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"ragged matrix: row {index} has {len(row)} entries, expected {width}")
        for entry in row:
            _check_entry(entry)
    return rows


def matrix_array(rows: RawMatrix, columns: Optional[int] = None) -> np.ndarray:
    """
    Convert a validated raw matrix to a float or complex array.

    Args:
        rows: Nested rows; [re, im] pairs mark complex entries
        columns: Column count used when rows is empty

    Returns:
        float64 array, or complex128 when any entry is a pair
    """
    if not rows:
        return np.zeros((0, columns or 0))
    complex_valued = any(isinstance(entry, list) for row in rows for entry in row)
    if not complex_valued:
        return np.asarray(rows, dtype=np.float64)
    return np.asarray(
        [[complex(*entry) if isinstance(entry, list) else complex(entry) for entry in row] for row in rows],
        dtype=np.complex128,
    )


class StrictModel(BaseModel):
    """Base model rejecting unknown fields."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class GeneratorSpec(StrictModel):
    """One named generator matrix."""

    name: Optional[str] = None
    matrix: RawMatrix

    @field_validator("matrix")
    @classmethod
    def check_rows(cls, v: RawMatrix) -> RawMatrix:
        return check_matrix(v)


class ActionSpec(StrictModel):
    """Commuting generators acting on K^dim."""

    dim: StrictInt = Field(..., ge=1)
    norm: Literal["l1", "l2", "linf"] = "l2"
    generators: List[GeneratorSpec] = Field(..., min_length=1)

    @model_validator(mode="after")
    def check_shapes(self) -> "ActionSpec":
        for index, generator in enumerate(self.generators):
            rows = generator.matrix
            if len(rows) != self.dim or any(len(row) != self.dim for row in rows):
                raise ValueError(f"generator {index} is not {self.dim} x {self.dim}")
        return self


class SubspaceSpec(StrictModel):
    """Column basis of a subspace (orthonormalized on load)."""

    basis: RawMatrix

    @field_validator("basis")
    @classmethod
    def check_basis(cls, v: RawMatrix) -> RawMatrix:
        return check_matrix(v)


class TableFields(StrictModel):
    """Multiplication table of a finite semigroup."""

    order: StrictInt = Field(..., ge=1)
    table: List[List[StrictInt]]

    @field_validator("table")
    @classmethod
    def check_square(cls, v: List[List[int]]) -> List[List[int]]:
        for index, row in enumerate(v):
            if len(row) != len(v):
                raise ValueError(f"ragged table: row {index} has {len(row)} entries, expected {len(v)}")
        return v

    @model_validator(mode="after")
    def check_order(self) -> "TableFields":
        if len(self.table) != self.order:
            raise ValueError(f"table has {len(self.table)} rows for order {self.order}")
        return self


class SemigroupProblem(TableFields):
    kind: Literal["semigroup"]


class MeanProblem(TableFields):
    kind: Literal["mean"]


class AffineMapSpec(StrictModel):
    """x.s = linear x + offset."""

    linear: RawMatrix
    offset: List[Number]

    @field_validator("linear")
    @classmethod
    def check_linear(cls, v: RawMatrix) -> RawMatrix:
        return check_matrix(v)


class FixedPointProblem(TableFields):
    kind: Literal["fixed-point"]
    dim: StrictInt = Field(..., ge=1)
    maps: List[AffineMapSpec]
    start: List[Number]

    @model_validator(mode="after")
    def check_maps(self) -> "FixedPointProblem":
        if len(self.maps) != self.order:
            raise ValueError(f"{len(self.maps)} maps for order {self.order}")
        if len(self.start) != self.dim:
            raise ValueError(f"start point has {len(self.start)} entries, expected {self.dim}")
        return self


class ActionProblem(ActionSpec):
    kind: Literal["action"]
    depth: Optional[StrictInt] = Field(None, ge=1)


class DecomposeProblem(StrictModel):
    kind: Literal["decompose"]
    action: ActionSpec


class ProjectionProblemFile(StrictModel):
    kind: Literal["projection"]
    action: ActionSpec
    subspace: SubspaceSpec
    q0: Optional[RawMatrix] = None

    @field_validator("q0")
    @classmethod
    def check_q0(cls, v: Optional[RawMatrix]) -> Optional[RawMatrix]:
        return v if v is None else check_matrix(v)


class IntertwineProblemFile(StrictModel):
    kind: Literal["intertwine"]
    action_a: ActionSpec = Field(..., alias="actionA")
    action_b: ActionSpec = Field(..., alias="actionB")
    subspace_e: SubspaceSpec = Field(..., alias="subspaceE")
    t0: RawMatrix

    @field_validator("t0")
    @classmethod
    def check_t0(cls, v: RawMatrix) -> RawMatrix:
        return check_matrix(v)


class IsometrizeProblemFile(StrictModel):
    kind: Literal["isometrize"]
    action: ActionSpec


class RenormProblemFile(StrictModel):
    kind: Literal["renorm"]
    action: ActionSpec
    norm_kind: Literal["averaged", "hilbertian"] = Field("averaged", alias="norm-kind")
    probes: Optional[RawMatrix] = None

    @field_validator("probes")
    @classmethod
    def check_probes(cls, v: Optional[RawMatrix]) -> Optional[RawMatrix]:
        return v if v is None else check_matrix(v)


class EnlargeProblemFile(StrictModel):
    kind: Literal["enlarge"]
    action: ActionSpec
    inverses: List[RawMatrix]
    m: Number = Field(..., gt=0)
    big_m: Number = Field(..., alias="M", gt=0)
    depth: StrictInt = Field(12, ge=1)

    @field_validator("inverses")
    @classmethod
    def check_inverses(cls, v: List[RawMatrix]) -> List[RawMatrix]:
        return [check_matrix(m) for m in v]


ProblemFile = Annotated[
    Union[
        SemigroupProblem,
        MeanProblem,
        FixedPointProblem,
        ActionProblem,
        DecomposeProblem,
        ProjectionProblemFile,
        IntertwineProblemFile,
        IsometrizeProblemFile,
        RenormProblemFile,
        EnlargeProblemFile,
    ],
    Field(discriminator="kind"),
]

PROBLEM_ADAPTER: TypeAdapter = TypeAdapter(ProblemFile)

KINDS = (
    "semigroup",
    "mean",
    "fixed-point",
    "action",
    "decompose",
    "projection",
    "intertwine",
    "isometrize",
    "renorm",
    "enlarge",
)
