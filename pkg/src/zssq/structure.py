"""Structural results as executable operations: forced entries near a
diagonal submatrix, the symmetric-pair observation, the balanced-submatrix
finder, and the numeric range checks supporting the main induction.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

from .grid import Grid, SquareRef, discrepancy, square_sum

DIAG_BLOCK = "DIAG_BLOCK"
COND2 = "COND2"
COND3 = "COND3"
COND4 = "COND4"


@dataclass(frozen=True)
class ForcedEntry:
    """One entry whose value is implied in every zssf grid meeting the
    diagonal-submatrix hypothesis, tagged by the clause that implies it."""

    i: int
    j: int
    value: int
    region: str


@dataclass(frozen=True)
class BalancedWindow:
    """A square consecutive submatrix with |disc| <= size^2/4.

    p, q are the 1-based offsets of the window's top-left cell.
    """

    p: int
    q: int
    size: int
    disc: int


def lemma1_forced_entries(
    n: int, p: int, q: int, s: int, t_prime: int
) -> list[ForcedEntry]:
    """Entries forced in every zssf n x n grid whose (s+1)x(s+1) submatrix at
    (p, q) is t'-diagonal.

    With t = t' + p + q - 2: the block N spanning rows and columns
    1..min(t + floor(t/2), n) carries exactly the t-diagonal values
    (region DIAG_BLOCK); and for each column j with
    t + floor(t/2) < j <= min(t + floor(t/2) + t - 2, n), the entries
    (i, j) and (j, i) are forced to -1 when one of these holds:

      COND2:  j - t < i <= t + floor(t/2)
      COND3:  1 <= i <= floor(t/2) - floor((j - t - floor(t/2) - 1) / 2)
      COND4:  i = j

    The -1 value and the strict lower boundary of COND2 are calibrated
    against the forced-entry oracle (search.forced_entry_oracle): the
    inclusive boundary i = j - t is not forced in general, and the three
    conditions force the sign opposite to the t-diagonal's +1 region.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if s < 1 or p < 1 or q < 1 or p + s > n or q + s > n:
        raise ValueError(
            f"submatrix at ({p},{q}) with size {s + 1} does not fit in {n}x{n}"
        )
    if not (2 <= t_prime <= 2 * s - 3):
        raise ValueError(f"t' must satisfy 2 <= t' <= 2s-3 = {2 * s - 3}, got {t_prime}")
    t = t_prime + p + q - 2
    if t > n:
        raise ValueError(f"t = t' + p + q - 2 = {t} exceeds n = {n}")

    half = t // 2
    k = min(t + half, n)
    claims: dict[tuple[int, int], ForcedEntry] = {}

    def claim(i: int, j: int, value: int, region: str):
        prev = claims.get((i, j))
        if prev is not None:
            if prev.value != value:
                raise AssertionError(
                    f"contradictory forced values at ({i},{j}): "
                    f"{prev.region}={prev.value}, {region}={value}"
                )
            return
        claims[(i, j)] = ForcedEntry(i, j, value, region)

    for i in range(1, k + 1):
        for j in range(1, k + 1):
            claim(i, j, 1 if i + j <= t + 1 else -1, DIAG_BLOCK)

    j_hi = min(t + half + t - 2, n)
    for j in range(t + half + 1, j_hi + 1):
        for i in range(j - t + 1, t + half + 1):
            claim(i, j, -1, COND2)
            claim(j, i, -1, COND2)
        hi3 = half - (j - t - half - 1) // 2
        for i in range(1, min(hi3, n) + 1):
            claim(i, j, -1, COND3)
            claim(j, i, -1, COND3)
        claim(j, j, -1, COND4)

    return list(claims.values())


def observation2_check(g: Grid) -> list[tuple[int, int, SquareRef]]:
    """Violations of "a_{i,j} + a_{j,i} >= 0" in a grid with all-ones diagonal.

    Requires a square grid with a_{i,i} = +1 for every i. Each violation
    (i, j) with i < j has a_{i,j} = a_{j,i} = -1, and the returned
    SquareRef (i, i, j-i) is a zero-sum square witnessing that such a grid
    cannot be zero-sum square free.
    """
    if g.rows != g.cols:
        raise ValueError("symmetric-pair check requires a square grid")
    for i in range(1, g.rows + 1):
        if g.get(i, i) != 1:
            raise ValueError(f"diagonal entry ({i},{i}) is -1; all must be +1")
    out = []
    for i in range(1, g.rows + 1):
        for j in range(i + 1, g.cols + 1):
            if g.get(i, j) == -1 and g.get(j, i) == -1:
                witness = SquareRef(i, i, j - i)
                assert square_sum(g, witness) == 0
                out.append((i, j, witness))
    return out


def _window_disc(g: Grid, p: int, q: int, size: int) -> int:
    mask = ((1 << size) - 1) << (q - 1)
    ones = sum((g.row_bits(i) & mask).bit_count() for i in range(p, p + size))
    return 2 * ones - size * size


def find_balanced_submatrix(g: Grid) -> BalancedWindow:
    """An n' x n' consecutive submatrix with |disc| <= n'^2/4,
    (n-1)/2 <= n' <= (n+1)/2, for any square g with n >= 8, |disc| <= n^2/4.

    Tests the four corner blocks (and, for odd n, the four overlapping
    blocks one size larger) in index order; if none qualifies, two
    side-adjacent corner blocks of opposite sign must exist, and a window
    sliding between them crosses the bound (each one-step move changes at
    most 2*size entries' worth of discrepancy).
    """
    n = g.rows
    if g.cols != n:
        raise ValueError("balanced-submatrix finder requires a square grid")
    if n < 8:
        raise ValueError(f"requires n >= 8, got {n}")
    if 4 * abs(discrepancy(g)) > n * n:
        raise ValueError(f"requires |disc| <= n^2/4 = {n * n / 4}, got {discrepancy(g)}")

    def qualifies(d: int, size: int) -> bool:
        return 4 * abs(d) <= size * size

    # corner order: top-left, top-right, bottom-left, bottom-right
    def corners(size: int) -> list[tuple[int, int]]:
        return [(1, 1), (1, n - size + 1), (n - size + 1, 1), (n - size + 1, n - size + 1)]

    sizes = [n // 2] if n % 2 == 0 else [(n - 1) // 2, (n + 1) // 2]
    blocks: list[tuple[int, int, int, int]] = []  # (p, q, size, disc)
    for size in sizes:
        for (p, q) in corners(size):
            d = _window_disc(g, p, q, size)
            if qualifies(d, size):
                return BalancedWindow(p, q, size, d)
            blocks.append((p, q, size, d))

    # no block qualifies: find a side-adjacent opposite-sign pair and slide
    for size in sizes:
        cs = corners(size)
        ds = [d for (p, q, sz, d) in blocks if sz == size]
        # adjacent index pairs: (TL,TR) and (BL,BR) slide columns;
        # (TL,BL) and (TR,BR) slide rows
        for a, b, axis in ((0, 1, "col"), (2, 3, "col"), (0, 2, "row"), (1, 3, "row")):
            if ds[a] * ds[b] >= 0:
                continue
            pa, qa = cs[a]
            prev = ds[a]
            for step in range(1, n - size + 1):
                if axis == "col":
                    p, q = pa, 1 + step
                else:
                    p, q = 1 + step, qa
                d = _window_disc(g, p, q, size)
                assert abs(d - prev) <= 2 * size, "sliding step bound violated"
                if qualifies(d, size):
                    return BalancedWindow(p, q, size, d)
                prev = d
            raise RuntimeError(
                "internal invariant violated: opposite-sign slide crossed "
                "the bound without a qualifying window"
            )
    raise RuntimeError(
        "internal invariant violated: no qualifying corner block and no "
        "opposite-sign corner pair"
    )


def min_t_bound(n_prime: int) -> int:
    """Least integer t' with t' >= (sqrt(3 n'^2 + 1) - 1) / 2, exactly.

    Uses integer square roots only: the bound equals the least k with
    (2k + 1)^2 >= 3 n'^2 + 1.
    """
    if n_prime < 1:
        raise ValueError("n' must be >= 1")
    x = 3 * n_prime * n_prime + 1
    r = isqrt(x)
    ceil_sqrt = r if r * r == x else r + 1
    return ceil_sqrt // 2


@dataclass(frozen=True)
class Claim5Report:
    """Outcome of the 2t + floor(t/2) - 2 >= n - 1 range check."""

    n_lo: int
    n_hi: int
    rows: tuple  # (n, t_min, t_max, status) per n
    failures: tuple  # (n, t) pairs where the inequality fails

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_tsv(self) -> str:
        lines = ["n\tt_min\tt_max\tstatus"]
        for n, t_min, t_max, status in self.rows:
            lines.append(f"{n}\t{t_min}\t{t_max}\t{status}")
        return "\n".join(lines) + "\n"


def verify_claim5(n_lo: int, n_hi: int) -> Claim5Report:
    """Check 2t + floor(t/2) - 2 >= n - 1 for every n in [n_lo, n_hi],
    every n' in [ceil((n-1)/2), floor((n+1)/2)], and every t with
    min_t_bound(n') <= t <= floor(2n/3)."""
    if n_lo < 5:
        raise ValueError("range must start at n >= 5")
    if n_hi < n_lo:
        raise ValueError("empty range")
    rows = []
    failures = []
    for n in range(n_lo, n_hi + 1):
        t_max = 2 * n // 3
        t_mins = []
        n_failures = []
        # ceil((n-1)/2) == n // 2 since n - 1 and n straddle one even number
        for n_prime in range(n // 2, (n + 1) // 2 + 1):
            t_min = min_t_bound(n_prime)
            t_mins.append(t_min)
            for t in range(t_min, t_max + 1):
                if 2 * t + t // 2 - 2 < n - 1:
                    n_failures.append((n, t))
        failures.extend(sorted(set(n_failures)))
        status = "fail" if n_failures else "pass"
        rows.append((n, min(t_mins), t_max, status))
    return Claim5Report(n_lo, n_hi, tuple(rows), tuple(failures))
