"""Brute-force search with symmetry reduction, certificates, forced-entry oracle.

Exhaustive backtracking over small grids (guarded by a cell budget), the
canonical-form machinery used everywhere for "up to reflections and
negation" reporting, JSON persistence of search outcomes, and the
independent oracle that computes entries common to every
zero-sum-square-free completion of a partial grid.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Sequence

from .grid import (
    Grid,
    diagonal_form,
    discrepancy,
    find_zero_sum_square,
    orbit,
)

BRUTE_FORCE = "BRUTE_FORCE"
SAT_PRODUCER = "SAT"

DEFAULT_BUDGET_CELLS = 36


class BudgetExceeded(ValueError):
    """Raised when a brute-force query is too large; route through satgen."""


@dataclass(frozen=True)
class SymmetryGroup:
    """Grid symmetries used for class counting and search reduction.

    Reflections and negation preserve zero-sum-square-freeness, |disc|,
    and diagonality; transpose preserves the first two but needs a square
    grid. Uniqueness claims use reflections+negation only.
    """

    use_reflections: bool = True
    use_negation: bool = True
    use_transpose: bool = False

    @classmethod
    def full(cls) -> "SymmetryGroup":
        return cls(True, True, False)

    @classmethod
    def trivial(cls) -> "SymmetryGroup":
        return cls(False, False, False)


def canonicalize(g: Grid, group: SymmetryGroup) -> Grid:
    """Lexicographically least grid (row-major, -1 < +1) in g's orbit."""
    if group.use_transpose and g.rows != g.cols:
        raise ValueError("transpose symmetry requires a square grid")
    return min(
        orbit(
            g,
            use_reflections=group.use_reflections,
            use_negation=group.use_negation,
            use_transpose=group.use_transpose,
        ),
        key=Grid.lex_key,
    )


def canonical_key(g: Grid, group: SymmetryGroup) -> str:
    """Stable hash of the canonical form (hex digest)."""
    c = canonicalize(g, group)
    return hashlib.sha256(c.to_text().encode()).hexdigest()


@dataclass(frozen=True)
class Certificate:
    """A persisted search outcome; every flag is recomputable from the grid."""

    grid: Grid
    disc: int
    zssf: bool
    diagonal: bool
    canonical_key: str
    producer: str
    params: dict = field(default_factory=dict)

    @classmethod
    def build(
        cls, g: Grid, producer: str, params: Optional[dict] = None,
        group: SymmetryGroup = SymmetryGroup.full(),
    ) -> "Certificate":
        return cls(
            grid=g,
            disc=discrepancy(g),
            zssf=find_zero_sum_square(g) is None,
            diagonal=diagonal_form(g) is not None,
            canonical_key=canonical_key(g, group),
            producer=producer,
            params=dict(params or {}),
        )

    def verify(self):
        """Recompute every derived field; raise on any mismatch."""
        if self.disc != discrepancy(self.grid):
            raise ValueError("certificate disc does not match its grid")
        if self.zssf != (find_zero_sum_square(self.grid) is None):
            raise ValueError("certificate zssf flag does not match its grid")
        if self.diagonal != (diagonal_form(self.grid) is not None):
            raise ValueError("certificate diagonal flag does not match its grid")

    def to_json(self) -> dict:
        lines = self.grid.to_text().split("\n")[:-1]
        return {
            "format_version": 1,
            "n": self.grid.rows,
            "m": self.grid.cols,
            "matrix": lines,
            "disc": self.disc,
            "zssf": self.zssf,
            "diagonal": self.diagonal,
            "canonical_key": self.canonical_key,
            "producer": self.producer,
            "params": self.params,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        g = Grid.from_text("\n".join(data["matrix"]) + "\n")
        if g.rows != data["n"] or g.cols != data["m"]:
            raise ValueError("certificate dimensions disagree with its matrix")
        cert = cls(
            grid=g,
            disc=data["disc"],
            zssf=data["zssf"],
            diagonal=data["diagonal"],
            canonical_key=data["canonical_key"],
            producer=data["producer"],
            params=dict(data.get("params", {})),
        )
        cert.verify()
        return cert


class CertificateStore:
    """Directory of certificate JSON files plus an index listing them."""

    INDEX = "index.json"

    def __init__(self, root: os.PathLike | str):
        self.root = Path(root)

    def _index_path(self) -> Path:
        return self.root / self.INDEX

    def _read_index(self) -> list[dict]:
        p = self._index_path()
        if not p.exists():
            return []
        data = json.loads(p.read_text())
        return data.get("entries", [])

    def _write_index(self, entries: list[dict]):
        entries = sorted(entries, key=lambda e: e["file"])
        payload = {"format_version": 1, "entries": entries}
        self._index_path().write_text(json.dumps(payload, indent=1) + "\n")

    def save(self, cert: Certificate) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        name = (
            f"{cert.grid.rows}x{cert.grid.cols}-{cert.producer.lower()}"
            f"-{cert.canonical_key[:16]}.json"
        )
        path = self.root / name
        path.write_text(json.dumps(cert.to_json(), indent=1) + "\n")
        entries = [e for e in self._read_index() if e["file"] != name]
        entries.append(
            {
                "file": name,
                "n": cert.grid.rows,
                "m": cert.grid.cols,
                "disc": cert.disc,
                "producer": cert.producer,
                "canonical_key": cert.canonical_key,
                "params": cert.params,
            }
        )
        self._write_index(entries)
        return path

    def load(self, name: str) -> Certificate:
        return Certificate.from_json(json.loads((self.root / name).read_text()))

    def entries(self) -> list[dict]:
        return self._read_index()


def _backtrack_zssf(
    n: int,
    m: int,
    prune_abs_disc: Optional[int],
    fixed: Optional[dict[tuple[int, int], int]] = None,
) -> Iterator[Grid]:
    """All zssf n x m grids (|disc| prunable), row-major cell assignment.

    Assigns cells in row-major order; after each assignment, rejects the
    branch if any square whose bottom-right corner is the new cell sums to
    zero, or if the running sum can no longer meet the discrepancy bound.
    """
    total = n * m
    bits = [0] * n

    def cell_square_zero(i: int, j: int) -> bool:
        # squares with bottom-right corner (i, j), 1-based
        for s in range(1, min(i, j)):
            r1 = bits[i - 1 - s]
            r2 = bits[i - 1]
            ones = (
                ((r1 >> (j - 1 - s)) & 1)
                + ((r1 >> (j - 1)) & 1)
                + ((r2 >> (j - 1 - s)) & 1)
                + ((r2 >> (j - 1)) & 1)
            )
            if ones == 2:
                return True
        return False

    def rec(idx: int, running: int) -> Iterator[Grid]:
        if idx == total:
            yield Grid(n, m, list(bits))
            return
        i, j = idx // m + 1, idx % m + 1
        remaining = total - idx
        want = fixed.get((i, j)) if fixed else None
        for v in (-1, 1):
            if want is not None and v != want:
                continue
            nxt = running + v
            if prune_abs_disc is not None and abs(nxt) - (remaining - 1) > prune_abs_disc:
                continue
            if v == 1:
                bits[i - 1] |= 1 << (j - 1)
            if not cell_square_zero(i, j):
                yield from rec(idx + 1, nxt)
            if v == 1:
                bits[i - 1] &= ~(1 << (j - 1))
        return

    yield from rec(0, 0)


def enumerate_zssf(
    n: int,
    m: int,
    max_abs_disc: Optional[int] = None,
    nondiagonal_only: bool = False,
    group: SymmetryGroup = SymmetryGroup.full(),
    budget_cells: int = DEFAULT_BUDGET_CELLS,
) -> Iterator[Certificate]:
    """One Certificate per symmetry class of filtered zssf grids.

    Deterministic: classes are emitted in ascending canonical-key order.
    """
    if n * m > budget_cells:
        raise BudgetExceeded(
            f"{n}x{m} has {n * m} cells, over the brute-force budget of "
            f"{budget_cells}; use the SAT route (satgen) instead"
        )
    params = {
        "n": n,
        "m": m,
        "bound": max_abs_disc,
        "nondiagonal": nondiagonal_only,
    }
    classes: dict[str, Grid] = {}
    for g in _backtrack_zssf(n, m, max_abs_disc):
        if max_abs_disc is not None and abs(discrepancy(g)) > max_abs_disc:
            continue
        if nondiagonal_only and diagonal_form(g) is not None:
            continue
        key = canonical_key(g, group)
        if key not in classes:
            classes[key] = canonicalize(g, group)
    for key in sorted(classes):
        yield Certificate.build(classes[key], BRUTE_FORCE, params, group)


def min_discrepancy(
    n: int,
    m: int,
    nondiagonal_only: bool = True,
    group: SymmetryGroup = SymmetryGroup.full(),
    budget_cells: int = DEFAULT_BUDGET_CELLS,
) -> tuple[int, list[Certificate]]:
    """Least |disc| over (non-diagonal) zssf n x m grids, with all witnesses.

    Witnesses are one Certificate per symmetry class achieving the minimum,
    canonical-key ascending. Brute force only; large sizes raise and should
    use satgen.min_disc_descent.
    """
    if n * m > budget_cells:
        raise BudgetExceeded(
            f"{n}x{m} has {n * m} cells, over the brute-force budget of "
            f"{budget_cells}; use satgen.min_disc_descent instead"
        )
    best: Optional[int] = None
    kept: list[Grid] = []
    for g in _backtrack_zssf(n, m, None):
        if nondiagonal_only and diagonal_form(g) is not None:
            continue
        d = abs(discrepancy(g))
        if best is None or d < best:
            best = d
            kept = [g]
        elif d == best:
            kept.append(g)
    if best is None:
        raise ValueError(f"no qualifying grid exists at {n}x{m}")
    params = {"n": n, "m": m, "bound": best, "nondiagonal": nondiagonal_only}
    classes: dict[str, Grid] = {}
    for g in kept:
        key = canonical_key(g, group)
        classes.setdefault(key, canonicalize(g, group))
    certs = [
        Certificate.build(classes[k], BRUTE_FORCE, params, group) for k in sorted(classes)
    ]
    return best, certs


def forced_entry_oracle(
    n: int,
    fixed: Sequence[tuple[int, int, int]],
    backend=None,
) -> Optional[dict[tuple[int, int], int]]:
    """Entries sharing one value across all zssf n x n completions of `fixed`.

    Returns None when no completion exists. Implemented as a SAT backbone
    computation: an entry is forced iff assuming its opposite value is
    unsatisfiable. Fixed entries appear in the output (they are trivially
    forced). This is the independent test oracle for the forced-entry
    lemma; it shares no logic with that lemma's implementation.
    """
    from . import satgen  # local import: grid <- search <- satgen layering

    seen: dict[tuple[int, int], int] = {}
    for i, j, v in fixed:
        if v not in (-1, 1):
            raise ValueError(f"fixed value at ({i},{j}) must be -1 or +1, got {v}")
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"fixed entry ({i},{j}) outside {n}x{n}")
        if seen.get((i, j), v) != v:
            raise ValueError(f"contradictory fixed values at ({i},{j})")
        seen[(i, j)] = v

    f, vm = satgen.encode_zssf(n, n)
    base_units = [
        vm.cell_var(i, j) if v == 1 else -vm.cell_var(i, j) for (i, j), v in seen.items()
    ]
    if backend is None:
        backend = satgen.default_backend()
    res = satgen.solve(f, backend=backend, assumptions=base_units)
    if res.status == satgen.UNSAT:
        return None
    if res.status != satgen.SAT:
        raise satgen.SolverError(f"oracle solve returned {res.status}")

    candidate: dict[tuple[int, int], int] = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            candidate[(i, j)] = 1 if res.model[vm.cell_var(i, j)] else -1
    for (i, j) in sorted(candidate):
        if (i, j) in seen:
            continue
        if (i, j) not in candidate:
            continue
        v = candidate[(i, j)]
        lit = -vm.cell_var(i, j) if v == 1 else vm.cell_var(i, j)
        res = satgen.solve(f, backend=backend, assumptions=base_units + [lit])
        if res.status == satgen.SAT:
            # every cell where this model disagrees is not forced either
            for (a, b) in list(candidate):
                got = 1 if res.model[vm.cell_var(a, b)] else -1
                if got != candidate[(a, b)]:
                    del candidate[(a, b)]
    return candidate
