from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def trace_csv() -> Path:
    return FIXTURES / "convergence_trace.csv"


@pytest.fixture
def cdf_csv() -> Path:
    return FIXTURES / "convergence_cdf.csv"


@pytest.fixture
def comparison_csv() -> Path:
    return FIXTURES / "comparison.csv"
