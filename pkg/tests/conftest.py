from __future__ import annotations

from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from cycleflow.service import app, run_pipeline

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


@pytest.fixture(scope="session")
def quad_docs() -> tuple[str, str, str]:
    return (
        fixture_text("quad_pe.json"),
        fixture_text("quad_pe_workload.json"),
        fixture_text("quad_pe_seeds.json"),
    )


@pytest.fixture(scope="session")
def quad_run(quad_docs):
    """The reference four-actor pipeline, scheduled once per session."""
    return run_pipeline(*quad_docs)


@pytest.fixture(scope="session")
def reduction_docs() -> dict[str, str]:
    return {
        "plain": fixture_text("reduction_plain.json"),
        "augmented": fixture_text("reduction_augmented.json"),
        "workload": fixture_text("reduction_workload.json"),
        "seeds": fixture_text("reduction_seeds.json"),
    }


@pytest.fixture(scope="session")
def api() -> TestClient:
    return TestClient(app, raise_server_exceptions=False)
