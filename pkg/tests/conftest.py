import pytest
from hypothesis import strategies as st

from zssq import satgen
from zssq.grid import Grid


def grids(max_rows: int = 6, max_cols: int = 6):
    """Strategy for arbitrary small sign grids."""

    def rows_for(nm):
        n, m = nm
        row = st.lists(st.sampled_from((-1, 1)), min_size=m, max_size=m)
        return st.lists(row, min_size=n, max_size=n)

    dims = st.tuples(st.integers(1, max_rows), st.integers(1, max_cols))
    return dims.flatmap(rows_for).map(Grid.from_rows)


@pytest.fixture(scope="session")
def backend():
    return satgen.default_backend()
