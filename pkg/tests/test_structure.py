"""Forced-entry lemma port, symmetric-pair check, balanced windows, range checks."""

import itertools
import random

import pytest

from zssq.grid import (
    Grid,
    checkerboard,
    discrepancy,
    is_zssf,
    square_sum,
    subgrid,
)
from zssq.search import forced_entry_oracle
from zssq.structure import (
    COND2,
    COND3,
    COND4,
    DIAG_BLOCK,
    BalancedWindow,
    find_balanced_submatrix,
    lemma1_forced_entries,
    min_t_bound,
    observation2_check,
    verify_claim5,
)


def region_counts(entries):
    out = {}
    for e in entries:
        out[e.region] = out.get(e.region, 0) + 1
    return out


def block_triples(p, q, s, t_prime):
    """The fixed t'-diagonal (s+1)x(s+1) submatrix at (p, q) as (i, j, v)."""
    out = []
    for di in range(s + 1):
        for dj in range(s + 1):
            v = 1 if (di + 1) + (dj + 1) <= t_prime + 1 else -1
            out.append((p + di, q + dj, v))
    return out


# --- forced-entry lemma ------------------------------------------------------------


def test_lemma1_frozen_instances():
    # cross-checked against the SAT backbone oracle when first computed
    fe = lemma1_forced_entries(7, 1, 1, 4, 4)
    assert len(fe) == 47
    assert region_counts(fe) == {DIAG_BLOCK: 36, COND2: 6, COND3: 4, COND4: 1}

    fe = lemma1_forced_entries(9, 1, 1, 5, 5)
    assert len(fe) == 73
    assert region_counts(fe) == {DIAG_BLOCK: 49, COND2: 14, COND3: 8, COND4: 2}

    # same t reached through offsets: t' + p + q - 2 = 5 both times
    shifted = lemma1_forced_entries(9, 1, 3, 6, 3)
    assert {(e.i, e.j, e.value) for e in shifted} == {(e.i, e.j, e.value) for e in fe}


def test_lemma1_block_clipped_at_n():
    # t + floor(t/2) = 9 > n = 6: the diagonal block fills the whole grid
    fe = lemma1_forced_entries(6, 1, 1, 5, 6)
    assert len(fe) == 36
    assert region_counts(fe) == {DIAG_BLOCK: 36}
    # column range empty once t + floor(t/2) >= n
    fe = lemma1_forced_entries(8, 2, 2, 5, 4)
    assert region_counts(fe) == {DIAG_BLOCK: 64}


def test_lemma1_values_and_positions():
    fe = lemma1_forced_entries(7, 1, 1, 4, 4)
    assert len({(e.i, e.j) for e in fe}) == len(fe)
    for e in fe:
        assert 1 <= e.i <= 7 and 1 <= e.j <= 7
        assert e.value in (-1, 1)
        if e.region in (COND2, COND3, COND4):
            assert e.value == -1
    t = 4  # t' + p + q - 2
    for e in fe:
        if e.region == DIAG_BLOCK:
            assert e.value == (1 if e.i + e.j <= t + 1 else -1)
    assert fe == lemma1_forced_entries(7, 1, 1, 4, 4)


@pytest.mark.parametrize(
    "n,p,q,s,t_prime",
    [
        (5, 1, 1, 3, 2),
        (6, 1, 1, 4, 3),
        (7, 1, 1, 4, 4),
    ],
)
def test_lemma1_subset_of_backbone_oracle(n, p, q, s, t_prime):
    fixed = block_triples(p, q, s, t_prime)
    forced = forced_entry_oracle(n, fixed)
    assert forced is not None, "fixed diagonal block must admit a completion"
    for e in lemma1_forced_entries(n, p, q, s, t_prime):
        assert forced.get((e.i, e.j)) == e.value, (e, forced.get((e.i, e.j)))


def test_lemma1_preconditions():
    with pytest.raises(ValueError):
        lemma1_forced_entries(0, 1, 1, 3, 2)
    with pytest.raises(ValueError):
        lemma1_forced_entries(5, 1, 1, 5, 2)  # block runs off the grid
    with pytest.raises(ValueError):
        lemma1_forced_entries(7, 1, 1, 4, 1)  # t' below 2
    with pytest.raises(ValueError):
        lemma1_forced_entries(7, 1, 1, 4, 6)  # t' above 2s-3
    with pytest.raises(ValueError):
        lemma1_forced_entries(4, 2, 2, 2, 2)  # t' > 2s-3 = 1


def test_lemma1_t_exceeding_n_rejected():
    # p = q = 4, s = 4, t' = 5 gives t = 11 > n = 8
    with pytest.raises(ValueError):
        lemma1_forced_entries(8, 4, 4, 4, 5)


# --- symmetric-pair check -------------------------------------------------------------


def test_observation2_no_violations_on_all_ones():
    g = Grid.from_rows([[1] * 4] * 4)
    assert observation2_check(g) == []


def test_observation2_finds_symmetric_negative_pair():
    rows = [[1, -1, 1], [-1, 1, 1], [1, 1, 1]]
    g = Grid.from_rows(rows)
    out = observation2_check(g)
    assert len(out) == 1
    i, j, w = out[0]
    assert (i, j) == (1, 2)
    assert (w.i, w.j, w.s) == (1, 1, 1)
    assert square_sum(g, w) == 0


def test_observation2_witnesses_are_zero_sum():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(3, 7)
        rows = [
            [1 if i == j else rng.choice((-1, 1)) for j in range(n)] for i in range(n)
        ]
        g = Grid.from_rows(rows)
        out = observation2_check(g)
        want = {
            (i, j)
            for i in range(1, n + 1)
            for j in range(i + 1, n + 1)
            if g.get(i, j) == -1 and g.get(j, i) == -1
        }
        assert {(i, j) for i, j, _ in out} == want
        for _, _, w in out:
            assert square_sum(g, w) == 0


def test_observation2_zssf_implies_no_violations():
    # exhaustive over 3x3 grids with all-ones diagonal
    off = [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]
    for bits in itertools.product((-1, 1), repeat=6):
        rows = [[1] * 3 for _ in range(3)]
        for (i, j), v in zip(off, bits):
            rows[i - 1][j - 1] = v
        g = Grid.from_rows(rows)
        if is_zssf(g):
            assert observation2_check(g) == []


def test_observation2_input_validation():
    with pytest.raises(ValueError):
        observation2_check(Grid.from_rows([[1, 1, 1], [1, 1, 1]]))
    with pytest.raises(ValueError) as exc:
        observation2_check(checkerboard(4, 4))
    assert "(1,1)" in str(exc.value)


# --- balanced submatrix -------------------------------------------------------------


def test_balanced_window_corner_hit():
    # alternating all-+1 / all--1 rows: disc 0, every corner block balanced
    rows = [[1] * 8 if i % 2 == 0 else [-1] * 8 for i in range(8)]
    g = Grid.from_rows(rows)
    w = find_balanced_submatrix(g)
    assert w == BalancedWindow(1, 1, 4, 0)


def test_balanced_window_slide_route():
    # left half +1, right half -1: all four 4x4 corners miss the bound
    # (disc +-16), horizontally adjacent corners have opposite signs, and
    # the slide lands on the centered balanced window
    rows = [[1] * 4 + [-1] * 4 for _ in range(8)]
    g = Grid.from_rows(rows)
    w = find_balanced_submatrix(g)
    assert w == BalancedWindow(1, 3, 4, 0)
    assert discrepancy(subgrid(g, 1, 4, 3, 6)) == 0


def test_balanced_window_odd_n_sizes():
    rows = [[1] * 9 if i % 2 == 0 else [-1] * 9 for i in range(9)]
    g = Grid.from_rows(rows)
    w = find_balanced_submatrix(g)
    assert w.size in (4, 5)
    assert 4 * abs(w.disc) <= w.size * w.size


def test_balanced_window_fuzz():
    rng = random.Random(20260816)
    for n in (8, 9, 11):
        sizes = {n // 2} if n % 2 == 0 else {(n - 1) // 2, (n + 1) // 2}
        found = 0
        while found < 120:
            rows = [[rng.choice((-1, 1)) for _ in range(n)] for _ in range(n)]
            g = Grid.from_rows(rows)
            if 4 * abs(discrepancy(g)) > n * n:
                continue
            found += 1
            w = find_balanced_submatrix(g)
            assert w.size in sizes
            assert 1 <= w.p <= n - w.size + 1
            assert 1 <= w.q <= n - w.size + 1
            sub = subgrid(g, w.p, w.p + w.size - 1, w.q, w.q + w.size - 1)
            assert discrepancy(sub) == w.disc
            assert 4 * abs(w.disc) <= w.size * w.size


def test_balanced_window_preconditions():
    with pytest.raises(ValueError):
        find_balanced_submatrix(Grid.from_rows([[1] * 7] * 7))  # n < 8
    with pytest.raises(ValueError):
        find_balanced_submatrix(Grid.from_rows([[1] * 9] * 8))  # not square
    with pytest.raises(ValueError):
        find_balanced_submatrix(Grid.from_rows([[1] * 8] * 8))  # disc too large


# --- integer threshold ---------------------------------------------------------------


def test_min_t_bound_anchors():
    assert [min_t_bound(k) for k in (1, 2, 3, 4, 15, 56)] == [1, 2, 3, 3, 13, 48]


def test_min_t_bound_is_least_satisfying_t():
    for n_prime in range(1, 300):
        t = min_t_bound(n_prime)
        x = 3 * n_prime * n_prime + 1
        assert (2 * t + 1) ** 2 >= x
        if t >= 1:
            assert (2 * (t - 1) + 1) ** 2 < x, n_prime


def test_min_t_bound_rejects_nonpositive():
    with pytest.raises(ValueError):
        min_t_bound(0)


# --- range check ----------------------------------------------------------------------


def test_claim5_holds_from_30():
    rep = verify_claim5(30, 200)
    assert rep.ok
    assert len(rep.rows) == 171
    assert all(status == "pass" for (_, _, _, status) in rep.rows)


def test_claim5_small_n_failures_frozen():
    rep = verify_claim5(5, 29)
    assert not rep.ok
    assert sorted({n for n, _ in rep.failures}) == [
        5, 7, 8, 9, 10, 11, 12, 13, 15, 17, 25, 27,
    ]
    for n, t in rep.failures:
        # each recorded failure really does violate the inequality
        assert 2 * t + t // 2 - 2 < n - 1


def test_claim5_tsv_shape():
    rep = verify_claim5(30, 32)
    lines = rep.to_tsv().splitlines()
    assert lines[0] == "n\tt_min\tt_max\tstatus"
    assert len(lines) == 4
    assert all(len(l.split("\t")) == 4 for l in lines[1:])


def test_claim5_input_validation():
    with pytest.raises(ValueError):
        verify_claim5(4, 10)
    with pytest.raises(ValueError):
        verify_claim5(10, 9)
