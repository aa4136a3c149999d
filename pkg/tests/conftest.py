import numpy as np
import pytest

from selectrisk import ScoredDataset


@pytest.fixture
def four_example_dataset() -> ScoredDataset:
    # hand-enumerated: theta=0.5 accepts (0.6, loss 1) and (0.9, loss 0)
    return ScoredDataset([0.1, 0.4, 0.6, 0.9], [1, 0, 1, 0])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def random_dataset(rng: np.random.Generator, m: int, tie_prob: float = 0.3) -> ScoredDataset:
    """Random scored data; with probability tie_prob kappas are drawn from a
    small discrete grid so tie handling gets exercised."""
    if rng.random() < tie_prob:
        kappas = rng.integers(0, max(2, m // 4), size=m) / max(2, m // 4)
    else:
        kappas = rng.normal(size=m)
    losses = rng.integers(0, 2, size=m)
    return ScoredDataset(kappas, losses)
