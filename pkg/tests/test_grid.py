"""Grid representation, the text format, squares, and symmetry operations."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import grids
from zssq.grid import (
    DiagonalForm,
    Grid,
    MatrixParseError,
    SquareRef,
    checkerboard,
    count_squares,
    diagonal_form,
    discrepancy,
    find_zero_sum_square,
    is_diagonal,
    is_zssf,
    iter_squares,
    make_t_diagonal,
    negate,
    orbit,
    reflect_h,
    reflect_v,
    square_sum,
    subgrid,
    transpose,
)


def all_grids(n, m):
    for bits in itertools.product((-1, 1), repeat=n * m):
        yield Grid.from_rows([bits[r * m:(r + 1) * m] for r in range(n)])


# --- construction and the text format ---------------------------------------


def test_from_rows_and_get():
    g = Grid.from_rows([[1, -1], [-1, 1], [1, 1]])
    assert (g.rows, g.cols) == (3, 2)
    assert g.get(1, 1) == 1 and g.get(1, 2) == -1
    assert g.get(3, 2) == 1


def test_from_rows_rejects_bad_values():
    with pytest.raises(ValueError):
        Grid.from_rows([[1, 0]])
    with pytest.raises(ValueError):
        Grid.from_rows([[1, 1], [1]])
    with pytest.raises(ValueError):
        Grid.from_rows([])


def test_get_bounds_checked():
    g = Grid.from_rows([[1, -1]])
    for i, j in [(0, 1), (1, 0), (2, 1), (1, 3)]:
        with pytest.raises(IndexError):
            g.get(i, j)


def test_text_round_trip_fixed():
    text = "+-+\n--+\n"
    g = Grid.from_text(text)
    assert g.to_text() == text


@given(grids())
def test_text_round_trip(g):
    assert Grid.from_text(g.to_text()) == g


def test_parse_errors_carry_position():
    with pytest.raises(MatrixParseError) as e:
        Grid.from_text("+-\n+x\n")
    assert (e.value.line, e.value.col) == (2, 2)
    with pytest.raises(MatrixParseError) as e:
        Grid.from_text("+-\n+\n")
    assert e.value.line == 2
    with pytest.raises(MatrixParseError):
        Grid.from_text("")
    with pytest.raises(MatrixParseError):
        Grid.from_text("+-\n\n--\n")
    # carriage returns are not part of the format
    with pytest.raises(MatrixParseError) as e:
        Grid.from_text("+-\r\n--\n")
    assert (e.value.line, e.value.col) == (1, 3)


def test_parse_tolerates_missing_final_newline():
    assert Grid.from_text("+-") == Grid.from_text("+-\n")


def test_equality_and_hash():
    a = Grid.from_text("+-\n-+\n")
    b = Grid.from_text("+-\n-+\n")
    c = Grid.from_text("+-\n++\n")
    assert a == b and hash(a) == hash(b)
    assert a != c
    assert a != "+-\n-+\n"


@given(grids(4, 4), grids(4, 4))
def test_lex_key_orders_like_sign_tuples(a, b):
    if (a.rows, a.cols) != (b.rows, b.cols):
        return
    ta = tuple(a.get(i, j) for i in range(1, a.rows + 1) for j in range(1, a.cols + 1))
    tb = tuple(b.get(i, j) for i in range(1, b.rows + 1) for j in range(1, b.cols + 1))
    assert (a.lex_key() < b.lex_key()) == (ta < tb)
    assert (a.lex_key() == b.lex_key()) == (ta == tb)


# --- squares -----------------------------------------------------------------


def test_square_ref_validation():
    SquareRef(1, 1, 1)
    for bad in [(0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, -2)]:
        with pytest.raises(ValueError):
            SquareRef(*bad)


def test_square_ref_corners():
    assert SquareRef(2, 3, 2).corners() == ((2, 3), (2, 5), (4, 3), (4, 5))


def test_iter_squares_count_formula():
    for n in range(1, 7):
        for m in range(1, 7):
            refs = list(iter_squares(n, m))
            want = sum(
                (n - s) * (m - s)
                for s in range(1, min(n, m))
            )
            assert len(refs) == want
            assert count_squares(n, m) == want
            assert len(set(refs)) == len(refs)
            # in-bounds, ordered by (s, i, j)
            for r in refs:
                assert 1 <= r.i and r.i + r.s <= n
                assert 1 <= r.j and r.j + r.s <= m
            assert refs == sorted(refs, key=lambda r: (r.s, r.i, r.j))


@given(grids())
def test_square_sum_range(g):
    for ref in iter_squares(g.rows, g.cols):
        v = square_sum(g, ref)
        assert v in (-4, -2, 0, 2, 4)


def test_square_sum_out_of_bounds():
    g = Grid.from_text("++\n++\n")
    with pytest.raises(IndexError):
        square_sum(g, SquareRef(1, 2, 1))


def naive_zero_sum_squares(g):
    out = []
    for ref in iter_squares(g.rows, g.cols):
        total = sum(g.get(i, j) for i, j in ref.corners())
        if total == 0:
            out.append(ref)
    return out


@given(grids())
def test_find_zero_sum_square_matches_naive(g):
    naive = naive_zero_sum_squares(g)
    got = find_zero_sum_square(g)
    if not naive:
        assert got is None
        assert is_zssf(g)
    else:
        assert got == min(naive, key=lambda r: (r.s, r.i, r.j))
        assert not is_zssf(g)


def test_two_by_two_zero_sum():
    g = Grid.from_rows([[1, 1], [-1, -1]])
    assert find_zero_sum_square(g) == SquareRef(1, 1, 1)


# --- discrepancy and constructions -------------------------------------------


@given(grids())
def test_discrepancy_is_entry_sum(g):
    assert discrepancy(g) == sum(
        g.get(i, j) for i in range(1, g.rows + 1) for j in range(1, g.cols + 1)
    )


def test_t_diagonal_entries():
    g = make_t_diagonal(4, 5, 3)
    for i in range(1, 5):
        for j in range(1, 6):
            assert g.get(i, j) == (1 if i + j <= 4 else -1)
    assert make_t_diagonal(3, 3, 0) == Grid.from_rows([[-1] * 3] * 3)
    assert make_t_diagonal(3, 3, 5) == Grid.from_rows([[1] * 3] * 3)


def test_t_diagonal_range_checked():
    make_t_diagonal(3, 4, 6)
    with pytest.raises(ValueError):
        make_t_diagonal(3, 4, 7)
    with pytest.raises(ValueError):
        make_t_diagonal(3, 4, -1)
    with pytest.raises(ValueError):
        make_t_diagonal(0, 4, 0)


def test_t_diagonals_are_zssf_exhaustive():
    # staircase splits never contain a zero-sum square
    for n in range(1, 8):
        for m in range(1, 8):
            for t in range(0, n + m):
                assert is_zssf(make_t_diagonal(n, m, t)), (n, m, t)


def test_checkerboard_pattern():
    g = checkerboard(3, 4)
    for i in range(1, 4):
        for j in range(1, 5):
            want = -1 if (i % 2 == 1 and j % 2 == 1) else 1
            assert g.get(i, j) == want


def test_checkerboard_discrepancy_formulas():
    for n in (6, 8, 10, 12):
        assert discrepancy(checkerboard(n, n)) == n * n // 2
    for n in (5, 7, 9, 11):
        assert discrepancy(checkerboard(n, n)) == (n - 1) ** 2 // 2 - 1


def test_checkerboard_zssf_and_nondiagonal():
    for n in range(5, 13):
        g = checkerboard(n, n)
        assert is_zssf(g)
        assert diagonal_form(g) is None
    # tiny sizes collapse into the staircase family
    assert diagonal_form(checkerboard(2, 2)) is not None


def test_checkerboard_rectangular():
    g = checkerboard(2, 3)
    assert is_zssf(g)
    assert discrepancy(g) == 6 - 2 * 2


# --- transforms ---------------------------------------------------------------


@given(grids())
def test_reflect_h_is_column_reversal(g):
    r = reflect_h(g)
    for i in range(1, g.rows + 1):
        for j in range(1, g.cols + 1):
            assert r.get(i, j) == g.get(i, g.cols + 1 - j)
    assert reflect_h(r) == g


@given(grids())
def test_reflect_v_is_row_reversal(g):
    r = reflect_v(g)
    for i in range(1, g.rows + 1):
        for j in range(1, g.cols + 1):
            assert r.get(i, j) == g.get(g.rows + 1 - i, j)
    assert reflect_v(r) == g


@given(grids())
def test_transpose_and_negate(g):
    tr = transpose(g)
    assert (tr.rows, tr.cols) == (g.cols, g.rows)
    for i in range(1, g.rows + 1):
        for j in range(1, g.cols + 1):
            assert tr.get(j, i) == g.get(i, j)
    assert transpose(tr) == g
    ng = negate(g)
    assert all(
        ng.get(i, j) == -g.get(i, j)
        for i in range(1, g.rows + 1)
        for j in range(1, g.cols + 1)
    )
    assert negate(ng) == g
    assert discrepancy(ng) == -discrepancy(g)


@given(grids())
def test_transforms_preserve_zssf(g):
    flag = is_zssf(g)
    for h in (reflect_h(g), reflect_v(g), transpose(g), negate(g)):
        assert is_zssf(h) == flag
        assert abs(discrepancy(h)) == abs(discrepancy(g))


@given(grids())
def test_subgrid_matches_naive(g):
    p, r = 1, (g.rows + 1) // 2
    q, s = max(1, g.cols // 2), g.cols
    sub = subgrid(g, p, r, q, s)
    assert (sub.rows, sub.cols) == (r - p + 1, s - q + 1)
    for i in range(p, r + 1):
        for j in range(q, s + 1):
            assert sub.get(i - p + 1, j - q + 1) == g.get(i, j)


def test_subgrid_bounds():
    g = checkerboard(4, 4)
    with pytest.raises(ValueError):
        subgrid(g, 2, 1, 1, 4)
    with pytest.raises(ValueError):
        subgrid(g, 1, 4, 0, 3)
    with pytest.raises(ValueError):
        subgrid(g, 1, 5, 1, 4)


# --- diagonal recognition ------------------------------------------------------


def test_diagonal_form_of_t_diagonals():
    for n, m in [(3, 3), (4, 6), (5, 5)]:
        for t in range(0, n + m):
            form = diagonal_form(make_t_diagonal(n, m, t))
            assert form is not None
            # the unreflected reading must be among the witnesses
            g = make_t_diagonal(n, m, t)
            hh = reflect_h(g) if form.flip_h else g
            vv = reflect_v(hh) if form.flip_v else hh
            assert vv == make_t_diagonal(n, m, form.t)


def test_diagonal_form_detects_reflections():
    g = make_t_diagonal(4, 4, 3)
    for h in (g, reflect_h(g), reflect_v(g), reflect_h(reflect_v(g))):
        assert diagonal_form(h) is not None
    assert is_diagonal(reflect_h(g))


def test_negated_t_diagonal_is_diagonal():
    # flipping all signs turns the staircase around: t becomes n+m-1-t
    g = negate(make_t_diagonal(5, 5, 4))
    form = diagonal_form(g)
    assert form == DiagonalForm(True, True, 5)


def test_diagonal_form_returns_least_witness():
    # all-plus grids admit several (flip_h, flip_v, t) readings; the
    # reported one must be first in (flip_h, flip_v, t) order
    form = diagonal_form(make_t_diagonal(3, 3, 5))
    assert form == DiagonalForm(False, False, 5)
    form = diagonal_form(make_t_diagonal(3, 3, 0))
    assert form == DiagonalForm(False, False, 0)


@given(grids(4, 4))
def test_is_diagonal_agrees_with_diagonal_form(g):
    assert is_diagonal(g) == (diagonal_form(g) is not None)


def test_diagonal_form_exhaustive_3x3():
    # every diagonal 3x3 grid is a reflection of some t-diagonal and
    # every non-diagonal grid is reported as such
    family = set()
    for t in range(0, 6):
        g = make_t_diagonal(3, 3, t)
        for h in (g, reflect_h(g), reflect_v(g), reflect_v(reflect_h(g))):
            family.add(h)
    for g in all_grids(3, 3):
        assert (diagonal_form(g) is not None) == (g in family)


# --- orbits --------------------------------------------------------------------


@given(grids(4, 4))
@settings(max_examples=40)
def test_orbit_closure_and_order(g):
    orb = orbit(g)
    assert g in orb
    assert len(orb) <= 8
    keys = [h.lex_key() for h in orb]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)
    members = set(orb)
    for h in orb:
        assert reflect_h(h) in members
        assert reflect_v(h) in members
        assert negate(h) in members


def test_orbit_flags():
    g = Grid.from_text("+-\n++\n")
    assert orbit(g, use_reflections=False, use_negation=False) == [g]
    with_t = orbit(g, use_transpose=True)
    assert len(with_t) <= 16
    for h in with_t:
        assert transpose(h) in set(with_t)


def test_orbit_transpose_square_only():
    # transpose is only a shape-preserving symmetry on square grids
    with pytest.raises(ValueError):
        orbit(checkerboard(2, 3), use_transpose=True)
    orb = orbit(checkerboard(3, 3), use_transpose=True)
    assert all((h.rows, h.cols) == (3, 3) for h in orb)
