import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fuzzyid3 import data, kernels  # noqa: E402


@pytest.fixture(scope="session")
def tukutuku53():
    return data.generate_synthetic(data.TUKUTUKU, 53, seed=7)


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request):
    return kernels.available_backends()[request.param]
