import numpy as np
import pytest

# seeded corpus: m in 2..7, n in 1..min(4, m); more repeats at the cheap sizes
SEED_COUNTS = {2: 16, 3: 16, 4: 16, 5: 8, 6: 8, 7: 4}


def build_corpus():
    out = []
    for m in range(2, 8):
        for n in range(1, min(4, m) + 1):
            for k in range(SEED_COUNTS[m]):
                rng = np.random.default_rng((97, m, n, k))
                a = rng.standard_normal((m, n))
                # redraw the (rare) badly conditioned samples so tolerances
                # stay meaningful
                while np.linalg.svd(a, compute_uv=False)[-1] < 1e-3:
                    a = rng.standard_normal((m, n))
                out.append((f"m{m}n{n}s{k}", a))
    return out


CORPUS = build_corpus()

EDGE_CASES = {
    "golden": np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
    "golden_flipped": np.array([[1.0, 0.0], [0.0, -1.0], [-1.0, -1.0]]),
    "ones_column": np.array([[1.0], [1.0]]),
    "opposed_column": np.array([[1.0], [-1.0]]),
    "zero_row": np.array([[1.0, 0.0], [0.0, 0.0], [1.0, 1.0]]),
    "identity3": np.eye(3),
}


@pytest.fixture(scope="session")
def corpus():
    return CORPUS


@pytest.fixture(scope="session")
def edge_cases():
    return EDGE_CASES
