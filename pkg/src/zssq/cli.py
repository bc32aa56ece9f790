"""Command-line front end.

Checks and renders matrix files, emits the known low-discrepancy
constructions, runs minimum-discrepancy and enumeration searches (brute
force or SAT, routed by size), and re-verifies the structural results.

Exit codes: 0 success/verified, 1 domain negative (zero-sum square found,
counterexample, fuzz failure), 2 usage or parse error, 3 environment error
(solver missing or misbehaving).
"""

from __future__ import annotations

import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import click

from . import satgen, search, structure
from .grid import (
    Grid,
    MatrixParseError,
    checkerboard,
    diagonal_form,
    discrepancy,
    find_zero_sum_square,
    is_zssf,
    make_t_diagonal,
    square_sum,
    subgrid,
)

# transcribed 8x8 construction with discrepancy 30 and no zero-sum squares;
# self-checked on every emit so a corrupted row cannot propagate silently
FIGURE5_ROWS = (
    "-----+++",
    "----++++",
    "---++++-",
    "--++++++",
    "-+++++++",
    "++++++++",
    "++++++++",
    "++-+++++",
)

CONFIG_KEYS = ("solver_command", "results_dir", "budget_cells", "threads", "seed")


class ParseFailure(click.ClickException):
    exit_code = 2


class EnvironmentFailure(click.ClickException):
    exit_code = 3


@dataclass
class RunConfig:
    """Shared command settings; flags > environment > config file > defaults."""

    solver_command: Optional[str] = None
    results_dir: Path = Path("results")
    budget_cells: int = search.DEFAULT_BUDGET_CELLS
    threads: int = 1
    seed: int = 0

    def validate(self):
        if self.budget_cells < 16:
            raise click.UsageError("budget_cells must be at least 16")
        if self.threads < 1:
            raise click.UsageError("threads must be at least 1")


def _read_config_file(path: Path) -> dict[str, str]:
    out: dict[str, str] = {}
    for line_no, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise click.UsageError(f"{path}:{line_no}: expected key=value")
        if key not in CONFIG_KEYS:
            raise click.UsageError(f"{path}:{line_no}: unknown key {key!r}")
        out[key] = value
    return out


def _build_config(config_path: Optional[Path], flags: dict) -> RunConfig:
    cfg = RunConfig()
    layered: dict[str, str] = {}
    if config_path is not None:
        layered.update(_read_config_file(config_path))
    if os.environ.get("ZSSQ_SOLVER"):
        layered["solver_command"] = os.environ["ZSSQ_SOLVER"]
    if os.environ.get("ZSSQ_RESULTS_DIR"):
        layered["results_dir"] = os.environ["ZSSQ_RESULTS_DIR"]
    for key, value in flags.items():
        if value is not None:
            layered[key] = value
    for key, value in layered.items():
        if key in ("budget_cells", "threads", "seed"):
            try:
                value = int(value)
            except (TypeError, ValueError):
                raise click.UsageError(f"{key} must be an integer, got {value!r}")
        elif key == "results_dir":
            value = Path(value)
        setattr(cfg, key, value)
    cfg.validate()
    return cfg


def _backend(cfg: RunConfig):
    try:
        return satgen.default_backend(cfg.solver_command)
    except satgen.SolverError as e:
        raise EnvironmentFailure(str(e))


def _read_matrix(src: str) -> Grid:
    try:
        text = sys.stdin.read() if src == "-" else Path(src).read_text()
    except OSError as e:
        raise ParseFailure(f"{src}: {e}")
    try:
        return Grid.from_text(text)
    except MatrixParseError as e:
        raise ParseFailure(f"{src}: {e}")


def _emit(text: str, output: Optional[Path]):
    if output is None:
        click.echo(text, nl=False)
    else:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text)


def _store(cfg: RunConfig) -> search.CertificateStore:
    return search.CertificateStore(cfg.results_dir)


def _write_cnf_artifact(
    cfg: RunConfig, f: satgen.CnfFormula, n: int, m: int,
    d: Optional[int], nondiagonal: bool,
) -> Path:
    f = f.copy()
    f.comments.insert(0, f"zssf grid encoding version {satgen.ENCODING_VERSION}")
    f.comments.insert(
        1, f"n={n} m={m} max_abs_disc={d} nondiagonal={nondiagonal}"
    )
    cfg.results_dir.mkdir(parents=True, exist_ok=True)
    tag = f"{n}x{m}" + (f"-d{d}" if d is not None else "") + (
        "-nondiag" if nondiagonal else ""
    )
    path = cfg.results_dir / f"{tag}.cnf"
    path.write_text(satgen.to_dimacs(f))
    return path


def _figure5() -> Grid:
    g = Grid.from_text("\n".join(FIGURE5_ROWS) + "\n")
    ok = (
        discrepancy(g) == 30
        and find_zero_sum_square(g) is None
        and diagonal_form(g) is None
    )
    if not ok:
        raise RuntimeError("embedded 8x8 construction failed its self-check")
    return g


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option(
    "--config", "config_path", metavar="FILE",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="key=value settings file ('#' comments allowed).",
)
@click.option("--results-dir", metavar="DIR", help="Certificate and artifact directory.")
@click.option(
    "--solver-command", metavar="TEMPLATE",
    help="External SAT solver command; {cnf} is replaced by the CNF path.",
)
@click.option("--budget-cells", metavar="N", help="Brute-force cell budget (min 16).")
@click.option("--threads", metavar="N", help="Parallel sub-jobs for sweeps.")
@click.option("--seed", metavar="N", help="Seed for the fuzz verifiers.")
@click.pass_context
def main(ctx, config_path, results_dir, solver_command, budget_cells, threads, seed):
    """Search and verification tools for zero-sum-square-free grids."""
    ctx.obj = _build_config(
        config_path,
        {
            "results_dir": results_dir,
            "solver_command": solver_command,
            "budget_cells": budget_cells,
            "threads": threads,
            "seed": seed,
        },
    )


@main.command()
@click.argument("matrix", type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.pass_context
def check(ctx, matrix):
    """Report dimensions, discrepancy, and the zssf/diagonal verdicts.

    Exits 0 when the grid is zero-sum square free, 1 when a square is found.
    """
    g = _read_matrix(matrix)
    click.echo(f"{g.rows}x{g.cols} disc={discrepancy(g)}")
    sq = find_zero_sum_square(g)
    if sq is None:
        click.echo("zero-sum-square-free")
    else:
        click.echo(f"zero-sum square at (i={sq.i}, j={sq.j}, s={sq.s})")
    form = diagonal_form(g)
    if form is None:
        click.echo("non-diagonal")
    else:
        flips = "".join(c for c, on in (("h", form.flip_h), ("v", form.flip_v)) if on)
        click.echo(f"diagonal t={form.t} flips={flips or 'none'}")
    if sq is not None:
        ctx.exit(1)


@main.command()
@click.argument("kind", type=click.Choice(["tdiag", "checkerboard", "figure5"]))
@click.argument("dims", nargs=-1, type=int)
@click.option(
    "-o", "--output", type=click.Path(dir_okay=False, path_type=Path),
    help="Write to a file instead of stdout.",
)
def construct(kind, dims, output):
    """Emit a known construction as matrix text.

    tdiag N M T is +1 where i+j <= t+1; checkerboard N M is -1 where i and
    j are both odd; figure5 is the fixed 8x8 grid with discrepancy 30.
    """
    try:
        if kind == "tdiag":
            if len(dims) != 3:
                raise click.UsageError("tdiag takes N M T")
            g = make_t_diagonal(*dims)
        elif kind == "checkerboard":
            if len(dims) != 2:
                raise click.UsageError("checkerboard takes N M")
            g = checkerboard(*dims)
        else:
            if dims and tuple(dims) != (8, 8):
                raise click.UsageError("figure5 is fixed at 8x8")
            g = _figure5()
    except ValueError as e:
        raise click.UsageError(str(e))
    _emit(g.to_text(), output)


@main.command("search")
@click.argument("n", type=int)
@click.argument("m", type=int)
@click.option("--min-disc", "mode", flag_value="min-disc", help="Compute f(n,m).")
@click.option("--enumerate", "mode", flag_value="enumerate", help="List symmetry classes.")
@click.option("--bound", type=int, help="Max |discrepancy| for --enumerate.")
@click.option("--nondiagonal", is_flag=True, help="Exclude diagonal grids (--enumerate).")
@click.option("--human", is_flag=True, help="Aligned table instead of TSV.")
@click.option("--no-store", is_flag=True, help="Do not persist certificates.")
@click.pass_obj
def search_cmd(cfg, n, m, mode, bound, nondiagonal, human, no_store):
    """Search n x m grids, brute force or SAT depending on size.

    --min-disc finds the least |discrepancy| over non-diagonal zssf grids
    and every symmetry class achieving it. --enumerate lists all zssf
    classes under the given filters. Certificates land in the results
    directory unless --no-store.
    """
    if mode is None:
        raise click.UsageError("pick one of --min-disc or --enumerate")
    if n < 1 or m < 1:
        raise click.UsageError("dimensions must be positive")
    group = search.SymmetryGroup.full()
    brute = n * m <= cfg.budget_cells
    try:
        if mode == "min-disc":
            if brute:
                best, certs = search.min_discrepancy(
                    n, m, nondiagonal_only=True, group=group,
                    budget_cells=cfg.budget_cells,
                )
            else:
                best, certs = _sat_min_disc(cfg, n, m, group, store=not no_store)
            header, row = ("n", "m", "f", "classes"), (n, m, best, len(certs))
        else:
            if brute:
                certs = list(
                    search.enumerate_zssf(
                        n, m, max_abs_disc=bound, nondiagonal_only=nondiagonal,
                        group=group, budget_cells=cfg.budget_cells,
                    )
                )
            else:
                if bound is None:
                    raise click.UsageError(
                        f"{n}x{m} exceeds the brute-force budget "
                        f"({cfg.budget_cells} cells); the SAT route needs --bound"
                    )
                certs = _sat_enumerate(cfg, n, m, bound, nondiagonal, group,
                                       store=not no_store)
            header = ("n", "m", "bound", "nondiagonal", "classes")
            row = (n, m, bound, nondiagonal, len(certs))
    except ValueError as e:
        raise click.ClickException(str(e))
    except satgen.SolverError as e:
        raise EnvironmentFailure(str(e))

    if not no_store:
        store = _store(cfg)
        for c in certs:
            store.save(c)
        click.echo(f"stored {len(certs)} certificate(s) in {cfg.results_dir}", err=True)
    _print_table(header, [row], human)


def _sat_min_disc(cfg, n, m, group, store):
    backend = _backend(cfg)
    best, witness = satgen.min_disc_descent(n, m, backend=backend)
    f, vm = satgen.build_formula(n, m, max_abs_disc=best, nondiagonal=True)
    if store:
        _write_cnf_artifact(cfg, f, n, m, best, True)
    params = {"n": n, "m": m, "bound": best, "nondiagonal": True}
    classes = {}
    for g in satgen.enumerate_models(f, vm, group=group, backend=backend):
        key = search.canonical_key(g, group)
        classes.setdefault(key, search.canonicalize(g, group))
    if search.canonical_key(witness, group) not in classes:
        raise satgen.ModelVerificationError(
            "descent witness missing from enumeration at its own bound"
        )
    certs = [
        search.Certificate.build(classes[k], search.SAT_PRODUCER, params, group)
        for k in sorted(classes)
    ]
    return best, certs


def _sat_enumerate(cfg, n, m, bound, nondiagonal, group, store):
    backend = _backend(cfg)
    f, vm = satgen.build_formula(n, m, max_abs_disc=bound, nondiagonal=nondiagonal)
    if store:
        _write_cnf_artifact(cfg, f, n, m, bound, nondiagonal)
    params = {"n": n, "m": m, "bound": bound, "nondiagonal": nondiagonal}
    classes = {}
    for g in satgen.enumerate_models(f, vm, group=group, backend=backend):
        key = search.canonical_key(g, group)
        classes.setdefault(key, search.canonicalize(g, group))
    return [
        search.Certificate.build(classes[k], search.SAT_PRODUCER, params, group)
        for k in sorted(classes)
    ]


def _print_table(header, rows, human):
    if human:
        cells = [tuple(str(c) for c in r) for r in [header, *rows]]
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        for r in cells:
            click.echo("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    else:
        click.echo("\t".join(str(c) for c in header))
        for r in rows:
            click.echo("\t".join(str(c) for c in r))


@main.group()
def verify():
    """Re-run the package's verification procedures."""


@verify.command("theorem")
@click.option("--n-max", type=int, required=True)
@click.option("--n-min", type=int, default=5, show_default=True)
@click.pass_context
def verify_theorem(ctx, n_max, n_min):
    """UNSAT check per size: no non-diagonal zssf grid has |disc| <= n^2/4.

    Runs sizes n_min..n_max (up to --threads at a time) and prints one row
    per size. Exits 0 only if every size is UNSAT; a SAT counterexample is
    persisted as a certificate and exits 1.
    """
    cfg = ctx.obj
    if n_min < 2 or n_max < n_min:
        raise click.UsageError("need 2 <= n-min <= n-max")
    _backend(cfg)  # fail fast on a broken solver config

    def job(n: int):
        # per-job backend: the internal fallback keeps solving state
        t0 = time.perf_counter()
        res = satgen.verify_base_case(n, backend=_backend(cfg))
        return res, time.perf_counter() - t0

    sizes = list(range(n_min, n_max + 1))
    try:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(job, sizes))
    except satgen.SolverError as e:
        raise EnvironmentFailure(str(e))

    click.echo("n\tstatus\tseconds")
    all_unsat = True
    for n, (res, secs) in zip(sizes, results):
        click.echo(f"{n}\t{res.status}\t{secs:.2f}")
        if res.status != satgen.UNSAT:
            all_unsat = False
            if res.grid is not None:
                cert = search.Certificate.build(
                    res.grid, search.SAT_PRODUCER,
                    {"n": n, "bound": satgen.default_bound(n), "nondiagonal": True},
                )
                path = _store(cfg).save(cert)
                click.echo(f"counterexample stored at {path}", err=True)
    ctx.exit(0 if all_unsat else 1)


@verify.command("claim5")
@click.option("--range", "bounds", nargs=2, type=int, required=True, metavar="LO HI")
@click.pass_context
def verify_claim5(ctx, bounds):
    """Range check: the forced-entry window covers column n-1.

    Verifies 2t + floor(t/2) - 2 >= n - 1 for every admissible (n', t)
    pair in the size range; prints one row per n.
    """
    lo, hi = bounds
    try:
        report = structure.verify_claim5(lo, hi)
    except ValueError as e:
        raise click.UsageError(str(e))
    click.echo(report.to_tsv(), nl=False)
    ctx.exit(0 if report.ok else 1)


@verify.command("lemma1")
@click.option("--fuzz", "count", type=int, required=True, metavar="K")
@click.pass_context
def verify_lemma1(ctx, count):
    """Forced-entry soundness against the SAT backbone oracle.

    Samples K random diagonal-submatrix hypotheses at n <= 7 and checks
    that every entry the lemma forces is forced (with the same value) by
    exhaustive SAT reasoning.
    """
    cfg = ctx.obj
    if count < 1:
        raise click.UsageError("fuzz count must be positive")
    backend = _backend(cfg)
    rng = random.Random(cfg.seed)
    click.echo("case\tn\tp\tq\ts\tt_prime\tforced\tstatus\tseconds")
    failures = 0
    for case in range(1, count + 1):
        n = rng.randint(4, 7)
        while True:
            s = rng.randint(3, n - 1)
            p = rng.randint(1, n - s)
            q = rng.randint(1, n - s)
            t_prime = rng.randint(2, 2 * s - 3)
            if t_prime + p + q - 2 <= n:
                break
        t0 = time.perf_counter()
        entries = structure.lemma1_forced_entries(n, p, q, s, t_prime)
        fixed = [
            (i, j, 1 if (i - p + 1) + (j - q + 1) <= t_prime + 1 else -1)
            for i in range(p, p + s + 1)
            for j in range(q, q + s + 1)
        ]
        try:
            oracle = search.forced_entry_oracle(n, fixed, backend=backend)
        except satgen.SolverError as e:
            raise EnvironmentFailure(str(e))
        ok = oracle is not None and all(
            oracle.get((e.i, e.j)) == e.value for e in entries
        )
        secs = time.perf_counter() - t0
        status = "pass" if ok else "FAIL"
        if not ok:
            failures += 1
        click.echo(
            f"{case}\t{n}\t{p}\t{q}\t{s}\t{t_prime}\t{len(entries)}\t{status}\t{secs:.2f}"
        )
    ctx.exit(0 if failures == 0 else 1)


def _random_bounded_grid(rng: random.Random, n: int) -> Grid:
    # rejection keeps |disc| <= n^2/4; acceptance is ~2 sigma, so retries are rare
    while True:
        g = Grid.from_rows(
            [[rng.choice((-1, 1)) for _ in range(n)] for _ in range(n)]
        )
        if 4 * abs(discrepancy(g)) <= n * n:
            return g


@verify.command("lemma3")
@click.option("--fuzz", "count", type=int, required=True, metavar="K")
@click.pass_context
def verify_lemma3(ctx, count):
    """Balanced-window property on K random grids per size n in 8..13.

    Every returned window must sit inside the grid, have size within
    [(n-1)/2, (n+1)/2], and have |disc| <= size^2/4, re-verified from the
    extracted submatrix. Failing grids are persisted as certificates.
    """
    cfg = ctx.obj
    if count < 1:
        raise click.UsageError("fuzz count must be positive")
    rng = random.Random(cfg.seed)
    click.echo("n\tcases\tfailures\tseconds")
    total_failures = 0
    for n in range(8, 14):
        t0 = time.perf_counter()
        failures = 0
        for _ in range(count):
            g = _random_bounded_grid(rng, n)
            try:
                w = structure.find_balanced_submatrix(g)
                sub = subgrid(g, w.p, w.p + w.size - 1, w.q, w.q + w.size - 1)
                ok = (
                    (n - 1) // 2 <= w.size <= (n + 1) // 2
                    and discrepancy(sub) == w.disc
                    and 4 * abs(w.disc) <= w.size * w.size
                )
            except (RuntimeError, AssertionError):
                ok = False
            if not ok:
                failures += 1
                path = _store(cfg).save(
                    search.Certificate.build(g, "fuzz-counterexample", {"n": n})
                )
                click.echo(f"failing grid stored at {path}", err=True)
        total_failures += failures
        click.echo(f"{n}\t{count}\t{failures}\t{time.perf_counter() - t0:.2f}")
    ctx.exit(0 if total_failures == 0 else 1)


@verify.command("obs2")
@click.option("--fuzz", "count", type=int, required=True, metavar="K")
@click.pass_context
def verify_obs2(ctx, count):
    """Symmetric-pair property on K random all-ones-diagonal grids.

    Every reported violation's witness square must sum to zero, and a grid
    that is zero-sum square free must report no violations at all.
    """
    cfg = ctx.obj
    if count < 1:
        raise click.UsageError("fuzz count must be positive")
    rng = random.Random(cfg.seed)
    t0 = time.perf_counter()
    failures = 0
    pairs = 0
    for _ in range(count):
        n = rng.randint(3, 8)
        g = Grid.from_rows(
            [
                [1 if i == j else rng.choice((-1, 1)) for j in range(n)]
                for i in range(n)
            ]
        )
        violations = structure.observation2_check(g)
        pairs += len(violations)
        bad = any(square_sum(g, sq) != 0 for _, _, sq in violations)
        if violations and is_zssf(g):
            bad = True
        if bad:
            failures += 1
            path = _store(cfg).save(
                search.Certificate.build(g, "fuzz-counterexample", {"n": n})
            )
            click.echo(f"failing grid stored at {path}", err=True)
    click.echo("cases\tviolation_pairs\tfailures\tseconds")
    click.echo(f"{count}\t{pairs}\t{failures}\t{time.perf_counter() - t0:.2f}")
    ctx.exit(0 if failures == 0 else 1)


SVG_CELL = 16
SVG_POS = "#e8e8e8"
SVG_NEG = "#1f1f1f"


def _render_svg(g: Grid) -> str:
    w, h = g.cols * SVG_CELL, g.rows * SVG_CELL
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        "<!-- grid rendering format 1 -->",
    ]
    for i in range(1, g.rows + 1):
        for j in range(1, g.cols + 1):
            fill = SVG_POS if g.get(i, j) == 1 else SVG_NEG
            parts.append(
                f'<rect x="{(j - 1) * SVG_CELL}" y="{(i - 1) * SVG_CELL}" '
                f'width="{SVG_CELL}" height="{SVG_CELL}" fill="{fill}"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


@main.command()
@click.argument("matrix", type=click.Path(exists=True, dir_okay=False, allow_dash=True))
@click.option(
    "--format", "fmt", type=click.Choice(["ascii", "svg"]), default="ascii",
    show_default=True,
)
@click.option("--color", is_flag=True, help="ANSI color (ascii only).")
@click.option(
    "-o", "--output", type=click.Path(dir_okay=False, path_type=Path),
    help="Write to a file instead of stdout.",
)
def render(matrix, fmt, color, output):
    """Render a matrix file as ascii or a deterministic SVG."""
    g = _read_matrix(matrix)
    if fmt == "ascii":
        text = g.to_text()
        if color:
            text = "".join(
                click.style(c, fg="yellow" if c == "+" else "blue")
                if c in "+-" else c
                for c in text
            )
    else:
        text = _render_svg(g)
    _emit(text, output)


if __name__ == "__main__":
    main()
