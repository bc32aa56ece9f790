"""CNF encoding of zero-sum-square-free grids and the solver bridge.

Encodes "no zero-sum square" plus optional |discrepancy| <= d and
non-diagonality constraints over one boolean variable per cell
(true <=> entry +1), writes/reads DIMACS, and solves with either an
external DIMACS executable, the bundled C solver (compiled on demand),
or a pure-Python fallback. Every SAT model is re-verified against the
formula before being reported.
"""

from __future__ import annotations

import heapq
import os
import shlex
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence

from .grid import (
    Grid,
    diagonal_form,
    discrepancy,
    find_zero_sum_square,
    iter_squares,
    make_t_diagonal,
    orbit,
    reflect_h,
    reflect_v,
)

SAT = "SAT"
UNSAT = "UNSAT"
UNKNOWN = "UNKNOWN"

# bump when clause generation changes shape; stamped into cached CNF artifacts
ENCODING_VERSION = 1


class SolverError(RuntimeError):
    """Environment failure: missing backend, crash, or malformed output."""


class ModelVerificationError(RuntimeError):
    """A backend-reported model failed re-verification: encoding or solver bug."""


class CnfFormula:
    """Clausal formula: integer literals, sign = polarity, variables 1..num_vars."""

    def __init__(self, num_vars: int = 0):
        if num_vars < 0:
            raise ValueError("num_vars must be nonnegative")
        self.num_vars = num_vars
        self.clauses: list[list[int]] = []
        self.comments: list[str] = []
        self.has_empty = False

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def add_clause(self, lits: Sequence[int], allow_empty: bool = False):
        lits = list(lits)
        if not lits:
            if not allow_empty:
                raise ValueError("empty clause (use allow_empty for explicit blocking)")
            self.has_empty = True
        for l in lits:
            if l == 0 or abs(l) > self.num_vars:
                raise ValueError(f"literal {l} out of range for {self.num_vars} vars")
        self.clauses.append(lits)

    def add_comment(self, text: str):
        self.comments.append(text)

    def copy(self) -> "CnfFormula":
        f = CnfFormula(self.num_vars)
        f.clauses = [list(c) for c in self.clauses]
        f.comments = list(self.comments)
        f.has_empty = self.has_empty
        return f


@dataclass(frozen=True)
class VarMap:
    """Row-major bijection between grid cells and variables 1..n*m.

    Variables above n*m (if any) are cardinality-counter auxiliaries.
    """

    n: int
    m: int

    def cell_var(self, i: int, j: int) -> int:
        if not (1 <= i <= self.n and 1 <= j <= self.m):
            raise IndexError(f"cell ({i},{j}) outside {self.n}x{self.m}")
        return (i - 1) * self.m + j

    def cell_of(self, var: int) -> tuple[int, int]:
        if not self.is_cell(var):
            raise IndexError(f"variable {var} is not a cell variable")
        return ((var - 1) // self.m + 1, (var - 1) % self.m + 1)

    def is_cell(self, var: int) -> bool:
        return 1 <= var <= self.n * self.m

    @property
    def cell_count(self) -> int:
        return self.n * self.m


@dataclass
class SolveResult:
    status: str
    model: Optional[dict[int, bool]] = None
    stats: dict = field(default_factory=dict)
    grid: Optional[Grid] = None  # set by verify_base_case on SAT


def encode_zssf(n: int, m: int) -> tuple[CnfFormula, VarMap]:
    """Formula whose models are exactly the zero-sum-square-free n x m grids.

    For each square, six 4-literal clauses forbid each way of making
    exactly two corners +1.
    """
    if n < 1 or m < 1:
        raise ValueError("dimensions must be positive")
    vm = VarMap(n, m)
    f = CnfFormula(n * m)
    f.add_comment(f"zssf encoding {n}x{m}: true var <=> +1 entry")
    pairs = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    for sq in iter_squares(n, m):
        corners = [vm.cell_var(i, j) for i, j in sq.corners()]
        for a, b in pairs:
            clause = []
            for k, v in enumerate(corners):
                clause.append(-v if k in (a, b) else v)
            f.add_clause(clause)
    return f, vm


def _add_at_most_k(f: CnfFormula, lits: Sequence[int], k: int):
    """Sequential-counter at-most-k over the given literals (Sinz ladder)."""
    n = len(lits)
    if k >= n:
        return
    if k == 0:
        for x in lits:
            f.add_clause([-x])
        return
    # s[i][j] reads "at least j+1 of lits[0..i] are true"
    s = [[f.new_var() for _ in range(k)] for _ in range(n - 1)]
    f.add_clause([-lits[0], s[0][0]])
    for j in range(1, k):
        f.add_clause([-s[0][j]])
    for i in range(1, n - 1):
        f.add_clause([-lits[i], s[i][0]])
        f.add_clause([-s[i - 1][0], s[i][0]])
        for j in range(1, k):
            f.add_clause([-lits[i], -s[i - 1][j - 1], s[i][j]])
            f.add_clause([-s[i - 1][j], s[i][j]])
        f.add_clause([-lits[i], -s[i - 1][k - 1]])
    f.add_clause([-lits[n - 1], -s[n - 2][k - 1]])


def add_disc_bound(f: CnfFormula, vm: VarMap, d: int) -> CnfFormula:
    """Restrict models to |discrepancy| <= d.

    disc = 2k - nm for k true cells, so the bound is
    ceil((nm-d)/2) <= k <= floor((nm+d)/2), enforced by two
    sequential counters (one on the cells, one on their negations).
    """
    if d < 0:
        raise ValueError(f"discrepancy bound must be nonnegative, got {d}")
    total = vm.cell_count
    f.add_comment(f"disc bound |disc| <= {d}")
    if d >= total:
        return f  # vacuous
    cells = [vm.cell_var(i, j) for i in range(1, vm.n + 1) for j in range(1, vm.m + 1)]
    hi = (total + d) // 2
    lo = (total - d + 1) // 2
    _add_at_most_k(f, cells, hi)
    # at least lo true <=> at most total - lo false
    _add_at_most_k(f, [-v for v in cells], total - lo)
    return f


def diagonal_grids(n: int, m: int) -> list[Grid]:
    """All distinct diagonal n x m grids (4 reflection variants per t)."""
    seen = set()
    for t in range(n + m):
        g = make_t_diagonal(n, m, t)
        for h in (g, reflect_h(g), reflect_v(g), reflect_h(reflect_v(g))):
            seen.add(h)
    return sorted(seen, key=Grid.lex_key)


def add_nondiagonal(f: CnfFormula, vm: VarMap) -> CnfFormula:
    """Block every diagonal grid with one full-assignment clause each."""
    blocked = diagonal_grids(vm.n, vm.m)
    f.add_comment(f"nondiagonal: {len(blocked)} full-assignment blocking clauses")
    for g in blocked:
        clause = []
        for i in range(1, vm.n + 1):
            for j in range(1, vm.m + 1):
                v = vm.cell_var(i, j)
                clause.append(-v if g.get(i, j) == 1 else v)
        f.add_clause(clause)
    return f


def to_dimacs(f: CnfFormula) -> str:
    """Standard DIMACS CNF text; comments first, then header, then clauses."""
    out = []
    for c in f.comments:
        out.append(f"c {c}")
    out.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    for cl in f.clauses:
        out.append(" ".join(str(l) for l in cl) + " 0")
    return "\n".join(out) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF text (inverse of to_dimacs, tolerant of blank lines)."""
    f = None
    pending: list[int] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c"):
            if f is None and line.startswith("c "):
                pass
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise ValueError(f"line {line_no}: malformed DIMACS header {line!r}")
            f = CnfFormula(int(parts[2]))
            continue
        if f is None:
            raise ValueError(f"line {line_no}: clause before DIMACS header")
        try:
            nums = [int(t) for t in line.split()]
        except ValueError:
            raise ValueError(f"line {line_no}: non-integer token in {line!r}") from None
        for x in nums:
            if x == 0:
                f.add_clause(pending, allow_empty=True)
                pending = []
            else:
                pending.append(x)
    if f is None:
        raise ValueError("missing DIMACS header")
    if pending:
        raise ValueError("unterminated final clause (missing 0)")
    return f


def parse_model(output: str) -> SolveResult:
    """Parse conventional solver output: 's' status line plus 'v' value lines."""
    status = None
    model: dict[int, bool] = {}
    for line_no, line in enumerate(output.splitlines(), start=1):
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip()
            if word == "SATISFIABLE":
                status = SAT
            elif word == "UNSATISFIABLE":
                status = UNSAT
            elif word == "UNKNOWN":
                status = UNKNOWN
            else:
                raise SolverError(f"line {line_no}: unrecognized status line {line!r}")
        elif line.startswith("v ") or line == "v":
            for tok in line[1:].split():
                try:
                    lit = int(tok)
                except ValueError:
                    raise SolverError(
                        f"line {line_no}: bad literal {tok!r} in value line"
                    ) from None
                if lit != 0:
                    model[abs(lit)] = lit > 0
    if status is None:
        raise SolverError("solver output contains no 's' status line")
    if status == SAT:
        return SolveResult(SAT, model)
    return SolveResult(status, None)


def model_satisfies(f: CnfFormula, model: dict[int, bool]) -> bool:
    """Evaluate every clause under the model; absent variables read false."""
    for cl in f.clauses:
        if not any(model.get(abs(l), False) == (l > 0) for l in cl):
            return False
    return True


def grid_from_model(model: dict[int, bool], vm: VarMap) -> Grid:
    bits = []
    for i in range(1, vm.n + 1):
        b = 0
        for j in range(1, vm.m + 1):
            v = vm.cell_var(i, j)
            if v not in model:
                raise ModelVerificationError(f"model leaves cell variable {v} unassigned")
            if model[v]:
                b |= 1 << (j - 1)
        bits.append(b)
    return Grid(vm.n, vm.m, bits)


def grid_assumptions(g: Grid, vm: VarMap) -> list[int]:
    """Unit literals fixing every cell of g."""
    lits = []
    for i in range(1, g.rows + 1):
        for j in range(1, g.cols + 1):
            v = vm.cell_var(i, j)
            lits.append(v if g.get(i, j) == 1 else -v)
    return lits


# ---------------------------------------------------------------------------
# Internal solver: conflict-driven clause learning, dependency-free.


def _luby(x: int) -> int:
    """Luby restart sequence, 0-indexed: 1,1,2,1,1,2,4,1,1,2,..."""
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x %= size
    return 1 << seq


class InternalSolver:
    """Pure-Python CDCL: watched literals, activity decisions, restarts.

    Intended for small instances and as the zero-dependency fallback;
    the bundled C solver or an external executable should carry anything
    beyond roughly a thousand variables.
    """

    name = "internal"

    def solve(self, f: CnfFormula, assumptions: Sequence[int] = ()) -> SolveResult:
        t0 = time.monotonic()
        nv = f.num_vars
        clauses: list[list[int]] = []
        units: list[int] = []
        for cl in list(f.clauses) + [[a] for a in assumptions]:
            c = sorted(set(cl), key=abs)
            if any(-l in c for l in c):
                continue  # tautology
            if not c:
                return SolveResult(UNSAT, stats={"time": 0.0, "conflicts": 0})
            if len(c) == 1:
                units.append(c[0])
            else:
                clauses.append(c)

        assign = [0] * (nv + 1)  # 0 unassigned, 1 true, -1 false
        level = [0] * (nv + 1)
        reason: list[Optional[int]] = [None] * (nv + 1)
        trail: list[int] = []
        trail_lim: list[int] = []
        # watches keyed by literal encoding 2v / 2v+1 (positive / negative)
        watches: list[list[int]] = [[] for _ in range(2 * nv + 2)]
        activity = [0.0] * (nv + 1)
        var_inc = 1.0
        phase = [False] * (nv + 1)
        order: list[tuple[float, int]] = []
        conflicts = 0
        qhead = 0

        def lit_idx(l: int) -> int:
            return 2 * l if l > 0 else -2 * l + 1

        def watch(ci: int):
            cl = clauses[ci]
            watches[lit_idx(cl[0])].append(ci)
            watches[lit_idx(cl[1])].append(ci)

        for ci in range(len(clauses)):
            watch(ci)
        for v in range(1, nv + 1):
            heapq.heappush(order, (0.0, v))

        def value(l: int) -> int:
            a = assign[abs(l)]
            return a if l > 0 else -a

        def enqueue(l: int, r: Optional[int]) -> bool:
            v = abs(l)
            if assign[v] != 0:
                return value(l) > 0
            assign[v] = 1 if l > 0 else -1
            level[v] = len(trail_lim)
            reason[v] = r
            trail.append(l)
            return True

        def propagate() -> Optional[int]:
            nonlocal qhead
            while qhead < len(trail):
                l = trail[qhead]
                qhead += 1
                falsified = -l
                wl = watches[lit_idx(falsified)]
                i = 0
                while i < len(wl):
                    ci = wl[i]
                    cl = clauses[ci]
                    if cl[0] == falsified:
                        cl[0], cl[1] = cl[1], cl[0]
                    if value(cl[0]) > 0:
                        i += 1
                        continue
                    moved = False
                    for k in range(2, len(cl)):
                        if value(cl[k]) >= 0:
                            cl[1], cl[k] = cl[k], cl[1]
                            watches[lit_idx(cl[1])].append(ci)
                            wl[i] = wl[-1]
                            wl.pop()
                            moved = True
                            break
                    if moved:
                        continue
                    # clause is unit or conflicting on cl[0]
                    if value(cl[0]) < 0:
                        return ci
                    enqueue(cl[0], ci)
                    i += 1
            return None

        def bump(v: int):
            nonlocal var_inc
            activity[v] += var_inc
            if activity[v] > 1e100:
                for u in range(1, nv + 1):
                    activity[u] *= 1e-100
                var_inc *= 1e-100
            heapq.heappush(order, (-activity[v], v))

        def analyze(ci: int) -> tuple[list[int], int]:
            learned = []
            seen = [False] * (nv + 1)
            counter = 0
            p = None
            idx = len(trail) - 1
            cur = clauses[ci]
            while True:
                for l in cur:
                    v = abs(l)
                    if l == p or seen[v] or level[v] == 0:
                        continue
                    seen[v] = True
                    bump(v)
                    if level[v] == len(trail_lim):
                        counter += 1
                    else:
                        learned.append(l)
                while not seen[abs(trail[idx])]:
                    idx -= 1
                p = trail[idx]
                v = abs(p)
                seen[v] = False
                counter -= 1
                if counter == 0:
                    break
                cur = clauses[reason[v]]
                idx -= 1
            learned.insert(0, -p)
            if len(learned) == 1:
                return learned, 0
            bj = max(level[abs(l)] for l in learned[1:])
            # put a literal from the backjump level in the second watch slot
            for k in range(1, len(learned)):
                if level[abs(learned[k])] == bj:
                    learned[1], learned[k] = learned[k], learned[1]
                    break
            return learned, bj

        def backtrack(to_level: int):
            nonlocal qhead
            while len(trail_lim) > to_level:
                mark = trail_lim.pop()
                while len(trail) > mark:
                    l = trail.pop()
                    v = abs(l)
                    phase[v] = l > 0
                    assign[v] = 0
                    reason[v] = None
                    heapq.heappush(order, (-activity[v], v))
            qhead = len(trail)

        for u in units:
            if not enqueue(u, None):
                return SolveResult(UNSAT, stats={"time": time.monotonic() - t0, "conflicts": 0})
        if propagate() is not None:
            return SolveResult(UNSAT, stats={"time": time.monotonic() - t0, "conflicts": 0})

        restart_count = 0
        conflict_limit = 100 * _luby(restart_count)
        conflicts_here = 0
        max_learned = max(4000, 2 * len(clauses))
        n_input = len(clauses)
        learned_act: dict[int, float] = {}

        while True:
            ci = propagate()
            if ci is not None:
                conflicts += 1
                conflicts_here += 1
                if not trail_lim:
                    return SolveResult(
                        UNSAT, stats={"time": time.monotonic() - t0, "conflicts": conflicts}
                    )
                learned, bj = analyze(ci)
                backtrack(bj)
                var_inc /= 0.95
                if len(learned) == 1:
                    enqueue(learned[0], None)
                else:
                    clauses.append(learned)
                    nci = len(clauses) - 1
                    watch(nci)
                    learned_act[nci] = conflicts
                    enqueue(learned[0], nci)
                continue
            if conflicts_here >= conflict_limit:
                restart_count += 1
                conflict_limit = 100 * _luby(restart_count)
                conflicts_here = 0
                backtrack(0)
                if len(learned_act) > max_learned:
                    self._reduce_db(clauses, watches, reason, learned_act, n_input, lit_idx)
                continue
            # decide
            v = 0
            while order:
                _, cand = heapq.heappop(order)
                if assign[cand] == 0:
                    v = cand
                    break
            if v == 0:
                model = {u: assign[u] > 0 for u in range(1, nv + 1)}
                return SolveResult(
                    SAT, model, stats={"time": time.monotonic() - t0, "conflicts": conflicts}
                )
            trail_lim.append(len(trail))
            enqueue(v if phase[v] else -v, None)

    @staticmethod
    def _reduce_db(clauses, watches, reason, learned_act, n_input, lit_idx):
        """Drop the older half of learned clauses not currently used as reasons."""
        in_use = {r for r in reason if r is not None}
        cand = sorted((a, ci) for ci, a in learned_act.items() if ci not in in_use)
        drop = {ci for _, ci in cand[: len(cand) // 2]}
        if not drop:
            return
        for ci in drop:
            del learned_act[ci]
            clauses[ci] = None
        for wl in watches:
            wl[:] = [ci for ci in wl if clauses[ci] is not None]


def project_models(f: CnfFormula, on_vars: Sequence[int]) -> Iterator[dict[int, bool]]:
    """All assignments to on_vars extendable to a full model, in lex order.

    Branches false-before-true over on_vars in the given order; for each
    complete on_vars assignment, searches the remaining variables for any
    satisfying extension. This is a syntactic all-solutions engine used to
    cross-check encodings; it never adds blocking clauses.
    """
    import sys

    nv = f.num_vars
    if f.has_empty or any(not c for c in f.clauses):
        return
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 3 * nv + 500))
    clauses = [list(dict.fromkeys(c)) for c in f.clauses]
    clauses = [c for c in clauses if not any(-l in c for l in c)]
    occ: list[list[int]] = [[] for _ in range(2 * nv + 2)]

    def lit_idx(l: int) -> int:
        return 2 * l if l > 0 else -2 * l + 1

    for ci, cl in enumerate(clauses):
        for l in cl:
            occ[lit_idx(l)].append(ci)

    assign = [0] * (nv + 1)
    n_unsat_lits = [len(cl) for cl in clauses]  # unfalsified literal count
    sat_by = [0] * len(clauses)  # count of satisfying assigned literals
    # neg_free[ci]: negative literals on still-unassigned vars. A clause with
    # sat_by == 0 and neg_free == 0 is the only kind an all-false completion
    # of the unassigned vars can falsify; bad_count tracks how many exist.
    neg_free = [sum(1 for l in cl if l < 0) for cl in clauses]
    bad_count = sum(1 for x in neg_free if x == 0)

    def set_lit(l: int) -> bool:
        """Assign l true (updates applied in full); False when a clause dies."""
        nonlocal bad_count
        assign[abs(l)] = 1 if l > 0 else -1
        ok = True
        if l > 0:
            for ci in occ[2 * l + 1]:  # clauses holding the falsified -l
                n_unsat_lits[ci] -= 1
                if n_unsat_lits[ci] == 0 and sat_by[ci] == 0:
                    ok = False
                neg_free[ci] -= 1
                if neg_free[ci] == 0 and sat_by[ci] == 0:
                    bad_count += 1
            for ci in occ[2 * l]:
                if sat_by[ci] == 0 and neg_free[ci] == 0:
                    bad_count -= 1
                sat_by[ci] += 1
        else:
            # a clause gaining this satisfying negative literal had it free
            # beforehand (neg_free >= 1), so it was never bad
            for ci in occ[-2 * l]:  # clauses holding the falsified -l
                n_unsat_lits[ci] -= 1
                if n_unsat_lits[ci] == 0 and sat_by[ci] == 0:
                    ok = False
            for ci in occ[-2 * l + 1]:
                sat_by[ci] += 1
                neg_free[ci] -= 1
        return ok

    def unset_lit(l: int):
        nonlocal bad_count
        assign[abs(l)] = 0
        if l > 0:
            for ci in occ[2 * l + 1]:
                n_unsat_lits[ci] += 1
                if neg_free[ci] == 0 and sat_by[ci] == 0:
                    bad_count -= 1
                neg_free[ci] += 1
            for ci in occ[2 * l]:
                sat_by[ci] -= 1
                if sat_by[ci] == 0 and neg_free[ci] == 0:
                    bad_count += 1
        else:
            # freeing a negative literal can never leave its clause without
            # one, so no bad_count transition happens on this side
            for ci in occ[-2 * l]:
                n_unsat_lits[ci] += 1
            for ci in occ[-2 * l + 1]:
                sat_by[ci] -= 1
                neg_free[ci] += 1

    def propagate(queue: list[int]) -> Optional[list[int]]:
        """Assign queued literals plus unit consequences; None on conflict."""
        trail: list[int] = []
        idx = 0
        while idx < len(queue):
            l = queue[idx]
            idx += 1
            v = abs(l)
            if assign[v] != 0:
                if (assign[v] > 0) != (l > 0):
                    for t in reversed(trail):
                        unset_lit(t)
                    return None
                continue
            ok = set_lit(l)
            trail.append(l)
            if not ok:
                for t in reversed(trail):
                    unset_lit(t)
                return None
            for ci in occ[lit_idx(-l)]:
                if sat_by[ci] == 0 and n_unsat_lits[ci] == 1:
                    for u in clauses[ci]:
                        if assign[abs(u)] == 0:
                            queue.append(u)
                            break
        return trail

    on_vars = list(on_vars)
    on_set = set(on_vars)
    aux_vars = [v for v in range(1, nv + 1) if v not in on_set]

    root = propagate([cl[0] for cl in clauses if len(cl) == 1])
    if root is None:
        return

    def extend_aux(k: int) -> Optional[list[int]]:
        """Find any satisfying assignment of aux_vars[k:]; return its trail."""
        while k < len(aux_vars) and assign[aux_vars[k]] != 0:
            k += 1
        if k == len(aux_vars):
            return []
        v = aux_vars[k]
        for l in (-v, v):
            trail = propagate([l])
            if trail is None:
                continue
            rest = extend_aux(k + 1)
            if rest is not None:
                return trail + rest
            for t in reversed(trail):
                unset_lit(t)
        return None

    def walk(k: int) -> Iterator[dict[int, bool]]:
        while k < len(on_vars) and assign[on_vars[k]] != 0:
            k += 1
        if k == len(on_vars):
            if bad_count == 0:
                # assigning every remaining var false satisfies the rest, so
                # an extension exists and nothing needs to be touched
                yield {v: assign[v] > 0 for v in on_vars}
                return
            ext = extend_aux(0)
            if ext is not None:
                yield {v: assign[v] > 0 for v in on_vars}
                for t in reversed(ext):
                    unset_lit(t)
            return
        v = on_vars[k]
        for l in (-v, v):
            trail = propagate([l])
            if trail is None:
                continue
            yield from walk(k + 1)
            for t in reversed(trail):
                unset_lit(t)

    yield from walk(0)


# ---------------------------------------------------------------------------
# External solver bridge and the bundled C solver.


class ExternalSolver:
    """Runs a DIMACS-conformant executable via a command template.

    The template receives the CNF path as '{cnf}' (appended if absent) and
    must print an 's SATISFIABLE/UNSATISFIABLE' line, plus 'v' value lines
    when satisfiable.
    """

    def __init__(self, command: str, name: Optional[str] = None):
        if not command:
            raise SolverError("empty solver command")
        self.command = command
        self.name = name or shlex.split(command)[0]

    def solve(self, f: CnfFormula, assumptions: Sequence[int] = ()) -> SolveResult:
        work = f
        if assumptions:
            work = f.copy()
            for a in assumptions:
                work.add_clause([a])
        argv = shlex.split(self.command)
        path_slot = any("{cnf}" in a for a in argv)
        with tempfile.NamedTemporaryFile(
            "w", suffix=".cnf", prefix="zssq-", delete=False
        ) as tf:
            tf.write(to_dimacs(work))
            cnf_path = tf.name
        try:
            if path_slot:
                argv = [a.replace("{cnf}", cnf_path) for a in argv]
            else:
                argv = argv + [cnf_path]
            t0 = time.monotonic()
            try:
                proc = subprocess.run(argv, capture_output=True, text=True)
            except OSError as e:
                raise SolverError(f"cannot run solver {argv[0]!r}: {e}") from e
            elapsed = time.monotonic() - t0
            # conventional exit codes: 10 SAT, 20 UNSAT; others judged by output
            if proc.returncode not in (0, 10, 20):
                raise SolverError(
                    f"solver {self.name} exited with code {proc.returncode}: "
                    f"{(proc.stderr or proc.stdout).strip()[:500]}"
                )
            res = parse_model(proc.stdout)
            res.stats = {"time": elapsed, "backend": self.name}
            return res
        finally:
            os.unlink(cnf_path)


_C_SOLVER_CACHE: Optional[str] = None
_C_SOLVER_FAILED = False


def _c_solver_path() -> Optional[str]:
    """Compile the bundled CDCL solver on demand; None if no C compiler."""
    global _C_SOLVER_CACHE, _C_SOLVER_FAILED
    if _C_SOLVER_CACHE:
        return _C_SOLVER_CACHE
    if _C_SOLVER_FAILED:
        return None
    src = resources.files("zssq").joinpath("csolver/cdcl.c")
    try:
        source = src.read_text()
    except (FileNotFoundError, OSError):
        _C_SOLVER_FAILED = True
        return None
    import hashlib

    tag = hashlib.sha256(source.encode()).hexdigest()[:16]
    cache_dir = Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "zssq"
    binary = cache_dir / f"cdcl-{tag}"
    if binary.exists():
        _C_SOLVER_CACHE = str(binary)
        return _C_SOLVER_CACHE
    cc = next((c for c in ("cc", "gcc", "clang") if shutil.which(c)), None)
    if cc is None:
        _C_SOLVER_FAILED = True
        return None
    cache_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as td:
        src_path = Path(td) / "cdcl.c"
        src_path.write_text(source)
        out_path = Path(td) / "cdcl"
        try:
            subprocess.run(
                [cc, "-O2", "-std=c99", "-o", str(out_path), str(src_path)],
                check=True,
                capture_output=True,
                text=True,
            )
        except subprocess.CalledProcessError as e:
            _C_SOLVER_FAILED = True
            raise SolverError(f"bundled solver failed to compile: {e.stderr[:500]}") from e
        shutil.copy2(out_path, binary)
    binary.chmod(0o755)
    _C_SOLVER_CACHE = str(binary)
    return _C_SOLVER_CACHE


def bundled_solver() -> Optional[ExternalSolver]:
    """The compiled-on-demand bundled solver, or None without a C compiler."""
    path = _c_solver_path()
    if path is None:
        return None
    return ExternalSolver(shlex.quote(path) + " {cnf}", name="bundled-cdcl")


def default_backend(solver_command: Optional[str] = None):
    """Backend resolution: explicit command > ZSSQ_SOLVER > bundled C > internal."""
    cmd = solver_command or os.environ.get("ZSSQ_SOLVER")
    if cmd:
        return ExternalSolver(cmd)
    ext = bundled_solver()
    if ext is not None:
        return ext
    return InternalSolver()


def solve(
    f: CnfFormula, backend=None, assumptions: Sequence[int] = ()
) -> SolveResult:
    """Solve with the given backend; SAT models are re-verified clause by clause."""
    if backend is None:
        backend = default_backend()
    res = backend.solve(f, assumptions=assumptions)
    if res.status == SAT:
        if res.model is None:
            raise ModelVerificationError("backend reported SAT without a model")
        if not model_satisfies(f, res.model):
            raise ModelVerificationError(
                f"backend {getattr(backend, 'name', '?')} returned a model that "
                "violates the formula"
            )
        for a in assumptions:
            if res.model.get(abs(a), False) != (a > 0):
                raise ModelVerificationError("model violates an assumption literal")
    return res


def enumerate_models(
    f: CnfFormula,
    vm: VarMap,
    group=None,
    limit: Optional[int] = None,
    backend=None,
) -> Iterator[Grid]:
    """Stream grids decoded from models, blocking each found assignment.

    Blocking clauses range over cell variables only, so each distinct grid
    appears once regardless of counter-variable slack. With a symmetry
    group, the whole orbit of each found grid is blocked and one
    representative per class is yielded.
    """
    if backend is None:
        backend = default_backend()
    work = f.copy()
    found = 0
    while limit is None or found < limit:
        res = solve(work, backend=backend)
        if res.status == UNSAT:
            return
        if res.status != SAT:
            raise SolverError(f"enumeration stopped: solver returned {res.status}")
        g = grid_from_model(res.model, vm)
        yield g
        found += 1
        to_block = [g]
        if group is not None:
            to_block = orbit(
                g,
                use_reflections=group.use_reflections,
                use_negation=group.use_negation,
                use_transpose=group.use_transpose,
            )
        for h in to_block:
            clause = []
            for i in range(1, vm.n + 1):
                for j in range(1, vm.m + 1):
                    v = vm.cell_var(i, j)
                    clause.append(-v if h.get(i, j) == 1 else v)
            work.add_clause(clause)


def build_formula(
    n: int, m: int, max_abs_disc: Optional[int] = None, nondiagonal: bool = False
) -> tuple[CnfFormula, VarMap]:
    """zssf, optionally with a |disc| bound and non-diagonality."""
    f, vm = encode_zssf(n, m)
    if max_abs_disc is not None:
        add_disc_bound(f, vm, max_abs_disc)
    if nondiagonal:
        add_nondiagonal(f, vm)
    return f, vm


def default_bound(n: int) -> int:
    """The theorem's discrepancy threshold, floor(n^2 / 4)."""
    return n * n // 4


def verify_base_case(
    n: int, bound_fn: Callable[[int], int] = default_bound, backend=None
) -> SolveResult:
    """Decide whether some non-diagonal zssf n x n grid has |disc| <= bound.

    UNSAT confirms the zero-sum-square theorem at this size; SAT yields a
    counterexample grid, re-verified at grid level and attached to the result.
    """
    if n < 1:
        raise ValueError("n must be positive")
    d = bound_fn(n)
    f, vm = build_formula(n, n, max_abs_disc=d, nondiagonal=True)
    res = solve(f, backend=backend)
    if res.status == SAT:
        g = grid_from_model(res.model, vm)
        if find_zero_sum_square(g) is not None:
            raise ModelVerificationError("SAT model contains a zero-sum square")
        if abs(discrepancy(g)) > d:
            raise ModelVerificationError("SAT model violates the discrepancy bound")
        if diagonal_form(g) is not None:
            raise ModelVerificationError("SAT model is diagonal despite blocking")
        res.grid = g
    return res


def min_disc_descent(n: int, m: int, backend=None) -> tuple[int, Grid]:
    """Least |disc| over non-diagonal zssf n x m grids, by descending SAT calls.

    Starts from the checkerboard construction's discrepancy and lowers the
    bound in steps of 2 (discrepancy parity is fixed by n*m) until UNSAT.
    Returns the minimum and a verified witness achieving it.
    """
    from .grid import checkerboard  # local import keeps module init light

    start = checkerboard(n, m)
    if find_zero_sum_square(start) is not None or diagonal_form(start) is not None:
        raise ValueError(f"no valid starting witness at {n}x{m}")
    witness = start
    best = abs(discrepancy(start))
    while best - 2 >= 0:
        f, vm = build_formula(n, m, max_abs_disc=best - 2, nondiagonal=True)
        res = solve(f, backend=backend)
        if res.status == UNSAT:
            break
        if res.status != SAT:
            raise SolverError(f"descent stopped: solver returned {res.status}")
        g = grid_from_model(res.model, vm)
        if find_zero_sum_square(g) is not None or diagonal_form(g) is not None:
            raise ModelVerificationError("descent model fails grid-level re-check")
        d = abs(discrepancy(g))
        if d > best - 2:
            raise ModelVerificationError("descent model exceeds the requested bound")
        witness, best = g, d
    return best, witness
