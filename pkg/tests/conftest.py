import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def fixtures_path() -> Path:
    return REPO_ROOT / "fixtures"


@pytest.fixture
def data_dir() -> Path:
    return Path(__file__).parent / "data"
