import pytest

from qfock import CdfModel, GammaMap, QContext


@pytest.fixture(scope="session")
def pipeline():
    """Cached (ctx, cdf, gamma) triples keyed by q; the cdf table build is the
    expensive step and is shared across test modules."""
    cache = {}

    def get(q, n_cells=4096):
        key = (q, n_cells)
        if key not in cache:
            ctx = QContext(q)
            cdf = CdfModel(ctx, n_cells=n_cells)
            cache[key] = (ctx, cdf, GammaMap(ctx, cdf))
        return cache[key]

    return get
