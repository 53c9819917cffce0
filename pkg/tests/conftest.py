import numpy as np
import pytest

import rmtlab as r


@pytest.fixture(scope="session")
def spectrum_cache():
    """Eigenvalues of W/sqrt(N), memoized per (kind, N, master, stream)."""
    cache = {}

    def get(kind: str, n: int, master: int, stream: int = 0) -> np.ndarray:
        key = (kind, n, master, stream)
        if key not in cache:
            spec = r.WignerSpec.from_kind(kind)
            w = r.sample_wigner(spec, n, r.RngSeed(master, stream))
            h = r.HermitianMatrix(n=n, entries=w.entries / np.sqrt(n),
                                  seed=w.seed)
            cache[key] = r.hermitian_eigenvalues(h).values
        return cache[key]

    return get
