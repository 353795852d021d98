import numpy as np
import pytest

from oqrw import catalog
from oqrw.core import KrausPair, random_kraus_pair
from oqrw.distribution import Distribution

EXAMPLE_IDS = ("ex1", "ex2", "ex3", "ex4", "ex5")


@pytest.fixture(params=EXAMPLE_IDS)
def example_pair(request) -> KrausPair:
    return catalog.build(catalog.ExampleSpec(request.param))


@pytest.fixture
def ex5_pair() -> KrausPair:
    return catalog.build(catalog.ExampleSpec("ex5"))


@pytest.fixture
def rho_half() -> np.ndarray:
    return np.eye(2, dtype=complex) / 2


def make_random_pairs(count: int, seed: int) -> list[KrausPair]:
    rng = np.random.default_rng(seed)
    return [random_kraus_pair(rng) for _ in range(count)]


def brute_force_laws(kp: KrausPair, rho0: np.ndarray, n_max: int) -> list[Distribution]:
    """Walk law at every time 0..n_max by enumerating all 2^n Kraus words.

    Each word W of length n contributes Tr(W rho0 W*) at x = (#C) - (#B).
    Exponential; intended as an independent oracle for small n only.
    """
    B, C = kp
    masses: list[dict[int, float]] = [{} for _ in range(n_max + 1)]
    masses[0][0] = float(np.trace(rho0).real)

    def descend(rho: np.ndarray, x: int, depth: int) -> None:
        if depth == n_max:
            return
        for M, dx in ((B, -1), (C, +1)):
            child = M @ rho @ M.conj().T
            tr = float(np.trace(child).real)
            bucket = masses[depth + 1]
            bucket[x + dx] = bucket.get(x + dx, 0.0) + tr
            if tr > 1e-18:  # a vanished branch stays vanished (PSD)
                descend(child, x + dx, depth + 1)

    descend(np.asarray(rho0, dtype=complex), 0, 0)
    return [Distribution({x: p for x, p in m.items() if p > 0}) for m in masses]
