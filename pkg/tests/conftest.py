import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from topofuse.fixtures import disagreeing_authors, reversal_demo_pair  # noqa: E402
from topofuse.generate import random_pair  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def demo_pair():
    return reversal_demo_pair()


@pytest.fixture
def authors():
    return disagreeing_authors()


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def corpus(n: int, seed0: int = 0, max_nodes: int = 12):
    """Seeded random DAG pairs; every density in 0.1..0.9 is exercised."""
    densities = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    for k in range(n):
        rng = random.Random(seed0 + k)
        yield seed0 + k, random_pair(rng, max_nodes=max_nodes, density=densities[k % 9])
