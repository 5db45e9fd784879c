from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures" / "mini"


@pytest.fixture(scope="session")
def mini_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def mini_config_path(mini_dir) -> Path:
    return mini_dir / "pipeline.json"
