from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def bench_csv() -> str:
    return str(FIXTURES / "acceptance_bench.csv")


@pytest.fixture
def fitted_isg() -> str:
    return str(FIXTURES / "fitted.json")
