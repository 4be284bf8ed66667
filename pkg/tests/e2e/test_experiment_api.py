"""E2E тесты для API endpoints экспериментов."""
import numpy as np
import pytest
from httpx import AsyncClient

pytestmark = pytest.mark.e2e

DICKE_RUN = {
    "name": "api-dicke",
    "engine": "dicke",
    "n_atoms": 20,
    "chi": 1.0,
    "t_final": float(np.pi),
    "sample_count": 201,
}


@pytest.mark.asyncio
class TestRunsAPI:
    """E2E тесты прогонов через API."""

    async def test_create_run(self, client: AsyncClient):
        """Прогон возвращает 201 и полную запись с рядом."""
        response = await client.post("/api/v1/experiments/runs", json=DICKE_RUN)

        assert response.status_code == 201
        data = response.json()
        assert data["status"] == "ok"
        assert data["config"]["lambda"] == 1.0
        assert len(data["series"]["tau"]) == 201
        assert data["peak"]["f_peak"] == pytest.approx(400.0, rel=1e-3)
        assert data["diagnostics"]["integrity_ok"] is True

    async def test_get_run(self, client: AsyncClient):
        created = (await client.post("/api/v1/experiments/runs", json=DICKE_RUN)).json()

        response = await client.get(f"/api/v1/experiments/runs/{created['run_id']}")

        assert response.status_code == 200
        assert response.json()["peak"] == created["peak"]

    async def test_get_missing_run_returns_404(self, client: AsyncClient):
        response = await client.get("/api/v1/experiments/runs/nope-000000000000")

        assert response.status_code == 404
        assert "nope-000000000000" in response.json()["detail"]

    async def test_invalid_config_returns_422(self, client: AsyncClient):
        """Ошибки валидации в формате [{field, message, type}]."""
        response = await client.post("/api/v1/experiments/runs", json={**DICKE_RUN, "n_atoms": 1})

        assert response.status_code == 422
        errors = response.json()["detail"]
        assert any(error["field"].endswith("n_atoms") for error in errors)
        assert all({"field", "message", "type"} <= set(error) for error in errors)

    async def test_unknown_key_returns_422(self, client: AsyncClient):
        response = await client.post("/api/v1/experiments/runs", json={**DICKE_RUN, "mu": 3.0})
        assert response.status_code == 422

    async def test_optimize_pulse_with_dicke_returns_400(self, client: AsyncClient):
        response = await client.post("/api/v1/experiments/runs/optimize-pulse", json=DICKE_RUN)

        assert response.status_code == 400
        assert response.json()["type"] == "PulseOptimizationError"


@pytest.mark.asyncio
class TestSweepsAPI:
    """E2E тесты свипов через API."""

    async def test_create_sweep(self, client: AsyncClient, tmp_path):
        """Прогоны участников пишутся в output_dir базовой конфигурации."""
        response = await client.post(
            "/api/v1/experiments/sweeps",
            json={"base": {**DICKE_RUN, "output_dir": str(tmp_path)}, "vary": "n", "values": [10, 20]},
        )

        assert response.status_code == 201
        rows = response.json()["rows"]
        assert [row["n_atoms"] for row in rows] == [10, 20]
        assert all(row["status"] == "ok" for row in rows)

    async def test_empty_values_returns_422(self, client: AsyncClient):
        response = await client.post(
            "/api/v1/experiments/sweeps",
            json={"base": DICKE_RUN, "vary": "n", "values": []},
        )
        assert response.status_code == 422


@pytest.mark.asyncio
class TestFiguresAPI:
    """E2E тесты рецептов рисунков."""

    async def test_unknown_recipe_returns_404(self, client: AsyncClient, tmp_path):
        response = await client.post("/api/v1/experiments/figures/fig99", json={"out_dir": str(tmp_path)})

        assert response.status_code == 404
        assert "fig2" in response.json()["known"]

    async def test_fig2(self, client: AsyncClient, tmp_path):
        response = await client.post("/api/v1/experiments/figures/fig2", json={"out_dir": str(tmp_path / "fig2")})

        assert response.status_code == 201
        data = response.json()
        assert data["name"] == "fig2"
        assert len(data["files"]) == 2
        assert (tmp_path / "fig2" / "fig2_exact.csv").is_file()
