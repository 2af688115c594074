import numpy as np
import pytest
from fastapi.testclient import TestClient

from reassembly.core import matrix_to_obj, assignment_to_obj
from reassembly.graph import CutPolicy
from reassembly.service.app import create_app
from reassembly.solver import solve_matrix
from reassembly.synthetic import ScorerModel, random_truth, synthesize, synthesize_unknown_center


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


@pytest.fixture
def instance(rng):
    truth = random_truth(rng, n_missing=1, n_outsiders=1)
    matrix = synthesize(truth, ScorerModel(accuracy=0.8, seed=2), rng)
    return truth, matrix


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"


def test_solve_matches_library(client, instance):
    truth, matrix = instance
    response = client.post("/solve", json={
        "matrix": matrix_to_obj(matrix),
        "options": {"theta": 0.0},
    })
    assert response.status_code == 200
    body = response.json()
    expected = solve_matrix(matrix, policy=CutPolicy(theta=0.0))
    assert body["cost"] == pytest.approx(expected.cost, abs=1e-12)
    assert body["assignment"] == expected.to_obj()["assignment"]
    assert body["stats"]["nodes"] == expected.stats.nodes
    assert body["stats"]["build_time"] is None  # times only on request


def test_solve_unknown_center_endpoint(client, rng):
    truth = random_truth(rng)
    matrices = synthesize_unknown_center(truth, ScorerModel(accuracy=0.95, seed=5), rng)
    response = client.post("/solve/unknown-center", json={
        "matrices": [matrix_to_obj(m) for m in matrices],
        "options": {"theta": 0.0, "allow_outsiders": False},
    })
    assert response.status_code == 200
    assert 0 <= response.json()["center_hypothesis"] <= 8


def test_count_endpoint(client):
    body = client.get("/count", params={"fragments": 8, "positions": 8}).json()
    assert body["nodes"] == 1952458 and body["edges"] == 3394185


def test_graph_size_endpoint(client, instance):
    _, matrix = instance
    response = client.post("/graph/size", json={
        "matrix": matrix_to_obj(matrix),
        "options": {"theta": 0.05},
    })
    assert response.status_code == 200
    body = response.json()
    assert body["nodes"] >= 2 and body["explored_nodes"] == body["nodes"] - 2


def test_synthesize_endpoint_deterministic(client, rng):
    truth = random_truth(rng)
    payload = {"truth": assignment_to_obj(truth), "accuracy": 0.65, "seed": 9}
    a = client.post("/synthesize", json=payload).json()
    b = client.post("/synthesize", json=payload).json()
    assert a == b
    rows = np.array([r["probs"] for r in a["rows"]])
    assert np.abs(rows.sum(axis=1) - 1).max() < 1e-9


def test_evaluate_endpoint(client, rng):
    truth = random_truth(rng)
    body = client.post("/evaluate", json={
        "predicted": assignment_to_obj(truth),
        "truth": assignment_to_obj(truth),
    }).json()
    assert body["perfect"] and body["well_placed_fraction"] == 1.0


def test_validation_errors_are_422(client):
    response = client.post("/solve", json={"matrix": {"center": 0, "rows": [{"fragment": 1, "probs": [0.5]}]}})
    assert response.status_code == 422


def test_domain_errors_are_400(client):
    # row sums far from 1 pass pydantic but fail matrix validation
    response = client.post("/solve", json={"matrix": {"center": 0, "rows": [{"fragment": 1, "probs": [0.5] * 9}]}})
    assert response.status_code == 400
    assert response.json()["error"] == "FormatError"


def test_infeasible_is_409_with_suggestion(client, instance):
    _, matrix = instance
    response = client.post("/solve", json={
        "matrix": matrix_to_obj(matrix),
        "options": {"theta": 1.0},
    })
    assert response.status_code == 409
    body = response.json()
    assert body["error"] == "InfeasibleError"
    assert 0 < body["suggested_theta"] <= 1
