import numpy as np
import pytest

import qobt


@pytest.fixture(scope="session")
def s1():
    """Scalar system: A=-1, B=1, no linear output, M=1. Every Gramian of it
    has a hand closed form."""
    return qobt.new_system([-1.0], [1.0], None, [np.array([[1.0]])],
                           require_stable=True)


@pytest.fixture(scope="session")
def small_random_set():
    """The seeded random stable systems shared by oracle / identity tests."""
    systems = []
    rng = np.random.default_rng(2024)
    for k in range(8):
        n = int(rng.integers(4, 13))
        m = int(rng.integers(1, 3))
        p = int(rng.integers(1, 3))
        card = int(rng.integers(1, max(2, n // 2)))
        systems.append(qobt.random_stable_system(n, m, p, card, seed=100 + k))
    return systems


@pytest.fixture(scope="session")
def designated_modal():
    """Order-40 modal system used by the low-rank convergence checks:
    window [0, 2] sec, band [3, 4] rad/sec, alpha = 1."""
    return qobt.modal_space_structure(
        20, 1, 1, damping_range=(0.15, 0.4), freq_range=(1.0, 6.0),
        seed=7, quad_card=4)


def rel_err(X, Y):
    return np.linalg.norm(X - Y) / max(np.linalg.norm(Y), 1e-300)
