"""Core {-1,+1} matrix model: construction, transforms, squares, discrepancy.

Entries are 1-indexed: a(i, j) is the entry in row i (from the top) and
column j (from the left). Rows are stored bit-packed, one int per row,
with bit (j-1) set exactly when a(i, j) == +1. All operations are pure;
grids are immutable and hashable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence


def _reverse_bits(r: int, width: int) -> int:
    """Reverse the low `width` bits of r."""
    return int(f"{r:0{width}b}"[::-1], 2) if r else 0


class MatrixParseError(ValueError):
    """Raised when matrix text does not conform to the '+'/'-' row format."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class SquareRef:
    """A 2x2 square submatrix: corners (i,j), (i,j+s), (i+s,j), (i+s,j+s).

    The stride s is at least 1; a stride-0 "square" would be a single cell
    counted four times and can never sum to zero, so it is excluded.
    """

    i: int
    j: int
    s: int

    def __post_init__(self):
        if self.s < 1:
            raise ValueError(f"square stride must be >= 1, got {self.s}")
        if self.i < 1 or self.j < 1:
            raise ValueError(f"square corner ({self.i},{self.j}) must be >= (1,1)")

    def corners(self) -> tuple[tuple[int, int], ...]:
        i, j, s = self.i, self.j, self.s
        return ((i, j), (i, j + s), (i + s, j), (i + s, j + s))


@dataclass(frozen=True)
class DiagonalForm:
    """Witness that a grid is diagonal.

    Applying reflect_h (if flip_h) and reflect_v (if flip_v) to the
    witnessed grid yields exactly the t-diagonal grid of the same shape.
    """

    flip_h: bool
    flip_v: bool
    t: int


class Grid:
    """An immutable rows x cols matrix with entries in {-1, +1}."""

    __slots__ = ("rows", "cols", "_bits")

    def __init__(self, rows: int, cols: int, bits: Sequence[int]):
        """Build from bit-packed rows; prefer the from_* constructors.

        bits[i] has bit (j-1) set iff entry (i+1, j) is +1.
        """
        if rows < 1 or cols < 1:
            raise ValueError(f"grid shape must be at least 1x1, got {rows}x{cols}")
        if len(bits) != rows:
            raise ValueError(f"expected {rows} packed rows, got {len(bits)}")
        mask = (1 << cols) - 1
        for r in bits:
            if r & ~mask:
                raise ValueError("packed row has bits beyond the column count")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "_bits", tuple(bits))

    @classmethod
    def from_rows(cls, data: Sequence[Sequence[int]]) -> "Grid":
        """Create a grid from a 2D list with entries -1 or +1."""
        if not data or not data[0]:
            raise ValueError("grid data must be non-empty")
        cols = len(data[0])
        bits = []
        for r, row in enumerate(data, start=1):
            if len(row) != cols:
                raise ValueError(f"row {r} has length {len(row)}, expected {cols}")
            b = 0
            for c, v in enumerate(row):
                if v == 1:
                    b |= 1 << c
                elif v != -1:
                    raise ValueError(f"entry ({r},{c + 1}) is {v!r}, must be -1 or +1")
            bits.append(b)
        return cls(len(data), cols, bits)

    @classmethod
    def from_text(cls, text: str) -> "Grid":
        """Parse the matrix text format: one '+'/'-' line per row."""
        bits = []
        cols = None
        line_no = 0
        for line_no, line in enumerate(text.split("\n"), start=1):
            if line == "":
                continue  # trailing newline produces one empty tail entry
            if cols is None:
                cols = len(line)
            elif len(line) != cols:
                raise MatrixParseError(
                    f"row length {len(line)} differs from {cols}", line_no, len(line) + 1
                )
            b = 0
            for c, ch in enumerate(line):
                if ch == "+":
                    b |= 1 << c
                elif ch != "-":
                    raise MatrixParseError(f"invalid character {ch!r}", line_no, c + 1)
            bits.append(b)
        if cols is None:
            raise MatrixParseError("empty matrix", max(line_no, 1), 1)
        # Only the final newline may leave an empty line; interior blanks are errors.
        lines = text.split("\n")
        for k, line in enumerate(lines[:-1], start=1):
            if line == "":
                raise MatrixParseError("blank row", k, 1)
        return cls(len(bits), cols, bits)

    def to_text(self) -> str:
        """Serialize to the matrix text format (newline-terminated)."""
        out = []
        for b in self._bits:
            out.append("".join("+" if (b >> c) & 1 else "-" for c in range(self.cols)))
        return "\n".join(out) + "\n"

    def get(self, i: int, j: int) -> int:
        """Entry a(i, j), 1-indexed; -1 or +1."""
        if not (1 <= i <= self.rows and 1 <= j <= self.cols):
            raise IndexError(f"entry ({i},{j}) outside {self.rows}x{self.cols} grid")
        return 1 if (self._bits[i - 1] >> (j - 1)) & 1 else -1

    def row_bits(self, i: int) -> int:
        return self._bits[i - 1]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Grid)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._bits == other._bits
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._bits))

    def __repr__(self) -> str:
        return f"Grid({self.rows}x{self.cols}, {self._bits!r})"

    def lex_key(self) -> tuple:
        """Row-major comparison key with -1 < +1 at each entry."""
        w = self.cols
        # Pack each row with column 1 as the high bit so int order is entry order.
        return tuple(_reverse_bits(b, w) for b in self._bits)


def discrepancy(g: Grid) -> int:
    """Sum of all entries of g."""
    ones = sum(b.bit_count() for b in g._bits)
    return 2 * ones - g.rows * g.cols


def square_sum(g: Grid, sq: SquareRef) -> int:
    """Sum of the four corners of the square; one of -4, -2, 0, 2, 4."""
    i, j, s = sq.i, sq.j, sq.s
    if i + s > g.rows or j + s > g.cols:
        raise IndexError(f"square {sq} exceeds {g.rows}x{g.cols} grid")
    r1, r2 = g._bits[i - 1], g._bits[i + s - 1]
    ones = ((r1 >> (j - 1)) & 1) + ((r1 >> (j + s - 1)) & 1)
    ones += ((r2 >> (j - 1)) & 1) + ((r2 >> (j + s - 1)) & 1)
    return 2 * ones - 4


def iter_squares(rows: int, cols: int) -> Iterator[SquareRef]:
    """All valid SquareRefs, ordered by stride, then row, then column."""
    for s in range(1, min(rows, cols)):
        for i in range(1, rows - s + 1):
            for j in range(1, cols - s + 1):
                yield SquareRef(i, j, s)


def count_squares(rows: int, cols: int) -> int:
    return sum((rows - s) * (cols - s) for s in range(1, min(rows, cols)))


def find_zero_sum_square(g: Grid) -> Optional[SquareRef]:
    """First zero-sum square in (s, i, j) order, or None if g is free of them.

    A square sums to zero exactly when two of its four corner bits are set,
    i.e. the corner bits have even parity but are neither all set nor all
    clear. That test is run on whole rows at once.
    """
    bits = g._bits
    for s in range(1, min(g.rows, g.cols)):
        width_mask = (1 << (g.cols - s)) - 1
        for i0 in range(g.rows - s):
            a = bits[i0]
            c = bits[i0 + s]
            b = a >> s
            d = c >> s
            zs = ~(a ^ b ^ c ^ d) & ~(a & b & c & d) & (a | b | c | d) & width_mask
            if zs:
                j0 = (zs & -zs).bit_length() - 1
                return SquareRef(i0 + 1, j0 + 1, s)
    return None


def is_zssf(g: Grid) -> bool:
    """True when g contains no zero-sum square."""
    return find_zero_sum_square(g) is None


def make_t_diagonal(rows: int, cols: int, t: int) -> Grid:
    """The t-diagonal grid: +1 where i + j <= t + 1, -1 elsewhere."""
    if not (0 <= t <= rows + cols - 1):
        raise ValueError(f"t must be in [0, {rows + cols - 1}], got {t}")
    bits = []
    for i in range(1, rows + 1):
        k = min(cols, max(0, t + 1 - i))  # +1 entries fill columns 1..k
        bits.append((1 << k) - 1)
    return Grid(rows, cols, bits)


def checkerboard(rows: int, cols: int) -> Grid:
    """The construction with -1 exactly where both indices are odd."""
    odd_row = 0
    for j in range(1, cols + 1):
        if j % 2 == 0:
            odd_row |= 1 << (j - 1)
    full = (1 << cols) - 1
    bits = [odd_row if i % 2 == 1 else full for i in range(1, rows + 1)]
    return Grid(rows, cols, bits)


def reflect_h(g: Grid) -> Grid:
    """Left-right mirror: column j maps to column cols+1-j."""
    w = g.cols
    return Grid(g.rows, g.cols, [_reverse_bits(r, w) for r in g._bits])


def reflect_v(g: Grid) -> Grid:
    """Top-bottom mirror: row i maps to row rows+1-i."""
    return Grid(g.rows, g.cols, g._bits[::-1])


def transpose(g: Grid) -> Grid:
    bits = []
    for j in range(g.cols):
        b = 0
        for i in range(g.rows):
            if (g._bits[i] >> j) & 1:
                b |= 1 << i
        bits.append(b)
    return Grid(g.cols, g.rows, bits)


def negate(g: Grid) -> Grid:
    mask = (1 << g.cols) - 1
    return Grid(g.rows, g.cols, [b ^ mask for b in g._bits])


def subgrid(g: Grid, p: int, r: int, q: int, s: int) -> Grid:
    """Consecutive submatrix with rows p..r and columns q..s, re-indexed from 1."""
    if not (1 <= p <= r <= g.rows and 1 <= q <= s <= g.cols):
        raise ValueError(
            f"bounds [{p}:{r}, {q}:{s}] invalid for {g.rows}x{g.cols} grid"
        )
    mask = (1 << (s - q + 1)) - 1
    bits = [(g._bits[i] >> (q - 1)) & mask for i in range(p - 1, r)]
    return Grid(r - p + 1, s - q + 1, bits)


def diagonal_form(g: Grid) -> Optional[DiagonalForm]:
    """Least (flip_h, flip_v, t) making the reflected grid t-diagonal, if any."""
    diag_counts = {}
    for t in range(g.rows + g.cols):
        n_plus = sum(min(g.cols, max(0, t + 1 - i)) for i in range(1, g.rows + 1))
        diag_counts.setdefault(n_plus, []).append(t)
    for flip_h_ in (False, True):
        for flip_v_ in (False, True):
            v = g
            if flip_h_:
                v = reflect_h(v)
            if flip_v_:
                v = reflect_v(v)
            ones = sum(b.bit_count() for b in v._bits)
            for t in diag_counts.get(ones, ()):
                if v == make_t_diagonal(g.rows, g.cols, t):
                    return DiagonalForm(flip_h_, flip_v_, t)
    return None


def is_diagonal(g: Grid) -> bool:
    return diagonal_form(g) is not None


def orbit(
    g: Grid,
    use_reflections: bool = True,
    use_negation: bool = True,
    use_transpose: bool = False,
) -> list[Grid]:
    """All images of g under the selected symmetry generators, deduplicated.

    Every generator preserves zero-sum-square-freeness and |discrepancy|.
    Transpose requires a square grid.
    """
    if use_transpose and g.rows != g.cols:
        raise ValueError("transpose symmetry requires a square grid")
    seen = {g}
    frontier = [g]
    while frontier:
        nxt = []
        for h in frontier:
            images = []
            if use_reflections:
                images += [reflect_h(h), reflect_v(h)]
            if use_negation:
                images.append(negate(h))
            if use_transpose:
                images.append(transpose(h))
            for m in images:
                if m not in seen:
                    seen.add(m)
                    nxt.append(m)
        frontier = nxt
    return sorted(seen, key=Grid.lex_key)
