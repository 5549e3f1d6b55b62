import pytest

from moblike.arith import enumerate_real_characters
from moblike.sieve import checkpoint_grid, summatory_direct


@pytest.fixture(scope="session")
def chi3():
    return enumerate_real_characters(3)[0]


@pytest.fixture(scope="session")
def chi4():
    return enumerate_real_characters(4)[0]


@pytest.fixture(scope="session")
def f_series_q3_1e8(chi3):
    """Shared big run: partial sums of f (q=3) to 1e8 with sup tracking."""
    return summatory_direct(
        "f", checkpoint_grid(10**8), chi=chi3, char_id=0,
        track_extremes=(0.25, 0.5),
    )


@pytest.fixture(scope="session")
def mertens_series_1e8():
    return summatory_direct("mobius", checkpoint_grid(10**8))
