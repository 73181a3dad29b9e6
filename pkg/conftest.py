import pytest

from sampling.streams import StreamKey


@pytest.fixture
def stream():
    return StreamKey(master_seed=0)


@pytest.fixture
def registry(tmp_path):
    return str(tmp_path / "runs.db")
