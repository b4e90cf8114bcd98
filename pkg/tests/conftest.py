import sys
from pathlib import Path

import pytest

# Add the project root to the Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))


@pytest.fixture(autouse=True)
def serial_workers(monkeypatch):
    """Commands called without --threads run in-process, whatever the developer's .env says."""
    monkeypatch.setenv("GME_THREADS", "1")
    monkeypatch.setenv("GME_PROGRESS_EVERY", "100")
