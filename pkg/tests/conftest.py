import os

import pytest

from matcat import enumerate_matroids
from matcat.named import figure_rank3_7pt


def extended_enabled() -> bool:
    return os.environ.get("MATCAT_EXTENDED", "") not in ("", "0")


requires_extended = pytest.mark.skipif(
    not extended_enabled(),
    reason="extended run (hours); set MATCAT_EXTENDED=1 to enable",
)


@pytest.fixture(scope="session")
def catalogue6():
    """All matroids on up to 6 elements, as records."""
    return enumerate_matroids(6)


@pytest.fixture(scope="session")
def matroids6(catalogue6):
    return [r.matroid() for r in catalogue6]


@pytest.fixture(scope="session")
def catalogue7():
    return enumerate_matroids(7)


@pytest.fixture(scope="session")
def fig1():
    return figure_rank3_7pt()
