"""Pydantic request/response models mirroring the JSON file schemas."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class MatrixRow(BaseModel):
    fragment: int = Field(ge=0)
    probs: list[float] = Field(min_length=9, max_length=9)


class MatrixModel(BaseModel):
    center: int = Field(ge=0)
    rows: list[MatrixRow]


class PlacementModel(BaseModel):
    fragment: int = Field(ge=0)
    position: int = Field(ge=0, le=9)


class AssignmentModel(BaseModel):
    center: Optional[int] = None
    placements: list[PlacementModel] = []
    empties: list[int] = []


class SolveOptions(BaseModel):
    theta: float = Field(default=0.05, ge=0.0, le=1.0)
    allow_outsiders: bool = True
    allow_empties: bool = True
    reorder: bool = True
    engine: Literal["auto", "graph", "dp"] = "auto"
    include_times: bool = False


class SolveRequest(BaseModel):
    matrix: MatrixModel
    options: SolveOptions = SolveOptions()


class UnknownCenterRequest(BaseModel):
    matrices: list[MatrixModel]
    options: SolveOptions = SolveOptions()


class StatsModel(BaseModel):
    nodes: int
    edges: int
    explored_nodes: int
    rescued_layers: int
    build_time: Optional[float] = None
    solve_time: Optional[float] = None


class SolutionModel(BaseModel):
    assignment: AssignmentModel
    center_hypothesis: int
    cost: float
    probability: float
    stats: StatsModel


class CountResponse(BaseModel):
    fragments: int
    positions: int
    nodes: int
    edges: int
    lower_bound: int


class GraphSizeRequest(BaseModel):
    matrix: MatrixModel
    options: SolveOptions = SolveOptions()


class GraphSizeResponse(BaseModel):
    nodes: int
    edges: int
    explored_nodes: int
    complete_paths: int


class SynthesizeRequest(BaseModel):
    truth: AssignmentModel
    accuracy: float = 0.65
    confusion: Literal["dirichlet", "neighbor"] = "dirichlet"
    seed: int = 0


class EvaluateRequest(BaseModel):
    predicted: AssignmentModel
    truth: AssignmentModel
    tau: float = 20.0


class PositionDetail(BaseModel):
    position: int
    predicted: Optional[int]
    true: Optional[int]
    match: bool
    pixel_distance: Optional[float]


class MetricReportModel(BaseModel):
    perfect: bool
    well_placed_fraction: float
    almost_perfect: bool
    per_position: list[PositionDetail]


class HealthResponse(BaseModel):
    status: str
    version: str
