"""HTTP surface: endpoints, error mapping, response shapes."""

import math

import pytest
from fastapi.testclient import TestClient

from faultlab.service.app import app

from conftest import noiseless_document, single_pair_document


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert "version" in body


class TestVerifyBounds:
    def test_analytic_case(self, client):
        response = client.post(
            "/verify-bounds",
            json={
                "document": single_pair_document(strength=0.1),
                "fault_sets": [[{"step": 0, "support": [0]}]],
            },
        )
        assert response.status_code == 200
        body = response.json()
        report = body["reports"][0]
        assert report["regime"] == "long_range_distinct_times"
        assert report["measured"] == pytest.approx(2 * math.sin(0.05), abs=1e-5)
        assert report["bound"] == pytest.approx(0.1, rel=1e-12)
        assert body["summary"]["violations"] == 0

    def test_multiple_fault_sets(self, client):
        response = client.post(
            "/verify-bounds",
            json={
                "document": single_pair_document(strength=0.05, n_steps=2),
                "fault_sets": [
                    [{"step": 0, "support": [0]}],
                    [{"step": 0, "support": [0]}, {"step": 1, "support": [1]}],
                ],
            },
        )
        body = response.json()
        assert body["summary"]["n_reports"] == 2
        assert [r["r"] for r in body["reports"]] == [1, 2]

    def test_invalid_model_maps_to_422_with_path(self, client):
        document = single_pair_document()
        document["pair_terms"][0]["j"] = 0
        response = client.post(
            "/verify-bounds", json={"document": document, "fault_sets": []}
        )
        assert response.status_code == 422
        body = response.json()
        assert body["error"] == "model_validation"
        assert body["path"] == "pair_terms[0]"

    def test_unknown_location_maps_to_422(self, client):
        response = client.post(
            "/verify-bounds",
            json={
                "document": single_pair_document(),
                "fault_sets": [[{"step": 0, "support": [0, 1]}]],
            },
        )
        assert response.status_code == 422

    def test_resource_guard_maps_to_400(self, client):
        response = client.post(
            "/verify-bounds",
            json={
                "document": noiseless_document(n_qubits=4, n_steps=4),
                "fault_sets": [
                    [{"step": s, "support": [q]} for s in range(4) for q in range(4)][:13]
                ],
            },
        )
        assert response.status_code == 400
        assert response.json()["error"] == "resource_limit"

    def test_deterministic_response(self, client):
        payload = {
            "document": single_pair_document(strength=0.07),
            "fault_sets": [[{"step": 0, "support": [1]}]],
        }
        first = client.post("/verify-bounds", json=payload).json()
        second = client.post("/verify-bounds", json=payload).json()
        assert first == second


class TestThreshold:
    def test_preset(self, client):
        response = client.post(
            "/threshold", json={"preset": "paper-magnitude", "epsilon": 1e-6, "levels": 4}
        )
        assert response.status_code == 200
        body = response.json()
        assert body["epsilon0"] == pytest.approx(1e-5, rel=1e-12)
        assert body["coupling_budget"] == pytest.approx(4.684e-12, rel=0.01)
        assert body["coupling_budget_constant_free"] == pytest.approx(1e-10, rel=1e-12)
        assert len(body["levels"]) == 5

    def test_explicit_gadget_with_lattice(self, client):
        response = client.post(
            "/threshold",
            json={
                "gadget": {"max_locations": 5, "correctable": 1, "constant": 1.0},
                "lattice": {"dimension": 1, "exponent": 2.0},
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["epsilon0"] == pytest.approx(0.1, rel=1e-12)
        assert body["amplitude_budget"] == pytest.approx(
            body["coupling_budget"] / (math.pi**2 / 3), rel=1e-5
        )

    def test_divergent_lattice_maps_to_400(self, client):
        response = client.post(
            "/threshold",
            json={"preset": "paper-magnitude", "lattice": {"dimension": 2, "exponent": 1.5}},
        )
        assert response.status_code == 400
        assert response.json()["error"] == "divergent_sum"

    def test_missing_params_rejected(self, client):
        response = client.post("/threshold", json={"epsilon": 0.01})
        assert response.status_code == 400


class TestDecay:
    def test_single_spec(self, client):
        response = client.post(
            "/decay-sum",
            json={"specs": [{"dimension": 1, "exponent": 2.0, "radius": 2}]},
        )
        assert response.status_code == 200
        row = response.json()["rows"][0]
        assert row["value"] == pytest.approx(2.5, abs=1e-13)
        assert row["verdict"] == "convergent"

    def test_scan_grid(self, client):
        response = client.post(
            "/decay-sum",
            json={"scan_dimensions": [1], "scan_exponents": [1.0, 2.0]},
        )
        rows = response.json()["rows"]
        assert [r["verdict"] for r in rows] == ["divergent", "convergent"]
        assert rows[0]["growth_law"] == "logarithmic"


class TestSweep:
    def test_scale_grid_margins_scale(self, client):
        response = client.post(
            "/sweep",
            json={
                "document": single_pair_document(strength=0.2),
                "scale_grid": [0.0, 0.5, 1.0],
                "fault_sets": [[{"step": 0, "support": [0]}]],
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["summary"]["n_reports"] == 3
        assert body["summary"]["violations"] == 0
        bounds = [r["report"]["bound"] for r in body["reports"]]
        assert bounds == pytest.approx([0.0, 0.1, 0.2], rel=1e-12)


class TestPhase:
    def test_stats_shape(self, client):
        response = client.post(
            "/phase-experiment",
            json={
                "document": single_pair_document(strength=0.1),
                "faults": [{"step": 0, "support": [0]}],
                "n_samples": 64,
                "seed": 5,
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["n_branches"] == 2
        assert body["coherent_norm"] == pytest.approx(2 * math.sin(0.05), abs=1e-4)
        assert body["std"] > 0
