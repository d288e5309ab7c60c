import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dummykit.generate import random_digraph  # noqa: E402
from dummykit.labels import UNIVERSE  # noqa: E402

U = UNIVERSE


def corpus(count=1000, seed=12345, n_max=10, alphabet_max=4):
    """Seeded random weakly connected digraphs, 2 <= n <= n_max, no isolated
    vertices, label alphabets of size <= alphabet_max."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(2, n_max + 1))
        out.append(random_digraph(
            rng, n, p=float(rng.uniform(0.0, 0.6)),
            vertex_labels=int(rng.integers(1, alphabet_max + 1)),
            edge_labels=int(rng.integers(1, alphabet_max + 1)),
        ))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def small_corpus():
    return corpus(150, seed=99)
