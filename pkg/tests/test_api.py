import os
from unittest.mock import patch

import pytest
from fastapi.testclient import TestClient

from api import app

client = TestClient(app)


def test_eval_at_four():
    response = client.post("/eval", json={"t": 4.0, "m": 2})
    assert response.status_code == 200
    body = response.json()
    assert body["a"] == 4.0 and body["b"] == 1.0
    assert body["beta_m"] == pytest.approx(2.25)
    assert body["lin_upper"] == pytest.approx(2.165216, abs=1e-6)


def test_eval_with_pair():
    response = client.post("/eval", json={"a": 8.0, "b": 2.0})
    assert response.status_code == 200
    assert response.json()["log_mean"] == pytest.approx(2 * 2.164043, abs=1e-5)


@pytest.mark.parametrize("payload", [
    {},
    {"t": 4.0, "a": 1.0},
    {"a": 1.0},
    {"t": -1.0},
    {"t": 4.0, "m": 0},
])
def test_eval_invalid(payload):
    assert client.post("/eval", json=payload).status_code == 422


def test_list_checks():
    response = client.get("/checks")
    assert response.status_code == 200
    checks = response.json()
    assert len(checks) == 20
    assert checks[0]["check_id"] == "lemma1"
    assert all(len(c["statement_hash"]) == 12 for c in checks)


def test_verify_passes():
    response = client.post("/verify", json={"seed": 7, "trials": 10, "checks": ["lemma1", "zou"]})
    assert response.status_code == 200
    body = response.json()
    assert body["passed"] is True
    assert body["failures"] == 0
    assert {row["check_id"] for row in body["rows"]} == {"lemma1", "zou"}
    assert body["meta"]["seed"] == 7


def test_verify_order_sweeps():
    response = client.post("/verify", json={"seed": 3, "trials": 2, "checks": ["lower_chain", "upper_chain"],
                                            "lower_orders": [2], "upper_orders": [3, 4]})
    assert response.status_code == 200
    options = response.json()["meta"]["options"]
    assert options["lower_orders"] == [2]
    assert options["upper_orders"] == [3, 4]


@pytest.mark.parametrize("payload", [
    {"trials": 5000},
    {"trials": 2, "lower_orders": [100]},
    {"trials": 2, "upper_orders": [1]},
    {"trials": 2, "lower_orders": []},
    {"trials": 0},
    {"trials": 2, "checks": ["nope"]},
    {"trials": 2, "x_kind": "sparse"},
    {"trials": 2, "upper_variant": "xa_plus_xb"},
    {"trials": 2, "props41_variant": "loose"},
])
def test_verify_invalid(payload):
    assert client.post("/verify", json=payload).status_code == 422


def test_min_order():
    response = client.post("/min-m", json={"t_grid": "4,1", "m_max": 100})
    assert response.status_code == 200
    body = response.json()
    assert [row["min_m"] for row in body["rows"]] == [18, 1]
    assert body["summary"]["grid_max"] == 18


def test_min_order_not_found():
    response = client.post("/min-m", json={"t_grid": "4", "m_max": 10})
    assert response.status_code == 200
    body = response.json()
    assert body["rows"][0]["min_m"] is None
    assert body["summary"]["not_found"] == 1


def test_min_order_invalid_grid():
    assert client.post("/min-m", json={"t_grid": "0:1:3"}).status_code == 422
    assert client.post("/min-m", json={"t_grid": "4", "m_max": 1}).status_code == 422


class TestApiKey:
    def test_open_without_configured_key(self):
        with patch.dict(os.environ, {}, clear=False):
            os.environ.pop("API_KEY", None)
            assert client.get("/checks").status_code == 200

    def test_missing_key_rejected(self):
        with patch.dict(os.environ, {"API_KEY": "secret"}):
            response = client.post("/eval", json={"t": 2.0})
            assert response.status_code == 401
            assert response.json()["detail"] == "Invalid or missing API key"

    def test_wrong_key_rejected(self):
        with patch.dict(os.environ, {"API_KEY": "secret"}):
            assert client.get("/checks", headers={"X-API-Key": "guess"}).status_code == 401

    def test_valid_key_accepted(self):
        with patch.dict(os.environ, {"API_KEY": "secret"}):
            assert client.get("/checks", headers={"X-API-Key": "secret"}).status_code == 200
