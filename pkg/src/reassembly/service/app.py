"""HTTP service wrapping the core package.

Solving, counting, synthesis and evaluation are pure compute, so the
service is stateless and safe to scale horizontally. Pixel-based
almost-perfect evaluation is CLI-only (fragment files do not travel over
this API); /evaluate degrades almost-perfect to perfect.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..core import assignment_from_obj, matrix_from_obj, matrix_to_obj
from ..counting import GraphSizeQuery, edge_count, node_count, reassembly_lower_bound
from ..errors import InfeasibleError, PuzzleError
from ..graph import CutPolicy, plan_layers, predict_graph_size
from ..metrics import evaluate
from ..solver import Solution, solve_matrix, solve_unknown_center
from ..synthetic import ScorerModel, synthesize
from . import schemas


def _policy(options: schemas.SolveOptions) -> CutPolicy:
    return CutPolicy(theta=options.theta, reorder=options.reorder)


def _solution_response(solution: Solution, include_times: bool) -> dict:
    return solution.to_obj(include_times=include_times)


def create_app() -> FastAPI:
    app = FastAPI(title="reassembly", version=__version__)

    @app.exception_handler(PuzzleError)
    async def _puzzle_error(request, err: PuzzleError):
        from fastapi.responses import JSONResponse

        status = 409 if isinstance(err, InfeasibleError) else 400
        body = {"error": type(err).__name__, "detail": str(err)}
        if isinstance(err, InfeasibleError):
            body["suggested_theta"] = err.suggested_theta
        return JSONResponse(status_code=status, content=body)

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/solve", response_model=schemas.SolutionModel)
    def solve_endpoint(request: schemas.SolveRequest):
        matrix = matrix_from_obj(request.matrix.model_dump())
        solution = solve_matrix(
            matrix,
            allow_outsiders=request.options.allow_outsiders,
            allow_empties=request.options.allow_empties,
            policy=_policy(request.options),
            engine=request.options.engine,
        )
        return _solution_response(solution, request.options.include_times)

    @app.post("/solve/unknown-center", response_model=schemas.SolutionModel)
    def unknown_center_endpoint(request: schemas.UnknownCenterRequest):
        matrices = [matrix_from_obj(m.model_dump()) for m in request.matrices]
        solution = solve_unknown_center(
            matrices,
            allow_outsiders=request.options.allow_outsiders,
            allow_empties=request.options.allow_empties,
            policy=_policy(request.options),
            engine=request.options.engine,
        )
        return _solution_response(solution, request.options.include_times)

    @app.get("/count", response_model=schemas.CountResponse)
    def count_endpoint(fragments: int, positions: int, outsiders: bool = False):
        query = GraphSizeQuery(fragments, positions)
        return {
            "fragments": fragments,
            "positions": positions,
            "nodes": node_count(query),
            "edges": edge_count(query),
            "lower_bound": reassembly_lower_bound(fragments, positions, outsiders),
        }

    @app.post("/graph/size", response_model=schemas.GraphSizeResponse)
    def graph_size_endpoint(request: schemas.GraphSizeRequest):
        matrix = matrix_from_obj(request.matrix.model_dump())
        plan = plan_layers(
            matrix,
            request.options.allow_outsiders,
            request.options.allow_empties,
            _policy(request.options),
        )
        nodes, edges, complete = predict_graph_size(plan)
        return {
            "nodes": nodes,
            "edges": edges,
            "explored_nodes": nodes - 2,
            "complete_paths": complete,
        }

    @app.post("/synthesize")
    def synthesize_endpoint(request: schemas.SynthesizeRequest):
        truth = assignment_from_obj(request.truth.model_dump())
        model = ScorerModel(accuracy=request.accuracy, confusion=request.confusion, seed=request.seed)
        return matrix_to_obj(synthesize(truth, model))

    @app.post("/evaluate", response_model=schemas.MetricReportModel)
    def evaluate_endpoint(request: schemas.EvaluateRequest):
        predicted = assignment_from_obj(request.predicted.model_dump())
        truth = assignment_from_obj(request.truth.model_dump())
        return evaluate(predicted, truth, pixels=None, tau=request.tau).to_obj()

    return app


app = create_app()
