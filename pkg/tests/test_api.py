import pytest
from fastapi.testclient import TestClient

from src.app.api import app

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as test_client:
        yield test_client


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_run_returns_report(client, payload):
    response = client.post("/runs", json={"scenario": payload()})
    assert response.status_code == 200
    body = response.json()
    assert body["scenario"] == "small"
    assert body["passed"] is True
    assert body["frames"] == 6
    assert body["final_time"] == pytest.approx(0.05)
    assert body["output_dir"] is None
    assert any(check["name"] == "energy_estimate" for check in body["checks"])


def test_run_can_write_outputs(client, payload, tmp_path):
    scenario = payload(output_dir=str(tmp_path / "api-run"))
    response = client.post("/runs", json={"scenario": scenario, "write_outputs": True})
    assert response.status_code == 200
    assert response.json()["output_dir"] == str(tmp_path / "api-run")
    assert (tmp_path / "api-run" / "report.json").is_file()


def test_unknown_key_is_unprocessable(client, payload):
    scenario = payload(params={"rho_f": 1.0, "viscosity": 2.0})
    response = client.post("/runs", json={"scenario": scenario})
    assert response.status_code == 422


def test_body_outside_box_is_unprocessable(client, payload):
    scenario = payload(geometry={"body": [0.9, 1.2, 0.4, 0.6]})
    response = client.post("/runs", json={"scenario": scenario})
    assert response.status_code == 422
