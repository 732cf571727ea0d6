"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 resource cap
exceeded, 4 hybrid scheme not applicable (overlapping supports).
"""

from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from .blocks import block_sweep
from .config import DEFAULT_CAPS, DEFAULT_TOLERANCES, PreconditionError, ResourceLimitError, ValidationError
from .configio import append_csv_row, load_source_config, sweep_csv
from .hybrid import hybrid_simulate, support_overlaps, support_profile
from .source import (
    average_purity,
    ensemble_density,
    shannon_entropy,
    signal_spectrum,
    von_neumann_entropy,
)
from .verify import SUITES, run_suites

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_RESOURCE, EXIT_HYBRID = 0, 1, 2, 3, 4


def _fail(code: int, msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _load(path):
    try:
        return load_source_config(path)
    except ValidationError as exc:
        _fail(EXIT_INPUT, str(exc))


def _parse_ints(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, _, hi = part.partition("..")
            a, b = int(lo), int(hi)
            if b < a:
                raise ValueError(f"empty range {part!r}")
            out.extend(range(a, b + 1))
        else:
            out.append(int(part))
    return out


def _parse_floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _caps(max_dense_dim, max_strings):
    caps = DEFAULT_CAPS
    if max_dense_dim is not None:
        caps = replace(caps, max_dense_dim=max_dense_dim)
    if max_strings is not None:
        caps = replace(caps, max_strings=max_strings)
    if caps.max_dense_dim < 1 or caps.max_strings < 1:
        _fail(EXIT_INPUT, "caps must be positive")
    return caps


def _g(x: float) -> str:
    return f"{x:.12g}"


config_option = click.option(
    "--config", "config_path", required=True, type=click.Path(dir_okay=False),
    help="Source configuration (JSON).",
)


@click.group(context_settings={"help_option_names": ["--help"]})
def main():
    """Noiseless coding of mixed-state quantum sources."""


@main.command()
@config_option
def entropy(config_path):
    """Entropies, purity and signal spectra of a source."""
    e = _load(config_path)
    rho = ensemble_density(e)
    click.echo(f"n = {e.dim}")
    click.echo(f"m = {len(e)}")
    if e.label:
        click.echo(f"label = {e.label}")
    click.echo(f"S(rho) = {_g(von_neumann_entropy(rho))}")
    click.echo(f"H(p) = {_g(shannon_entropy(e.probabilities))}")
    click.echo(f"average purity = {_g(average_purity(e))}")
    for a, (p, s) in enumerate(e):
        spec = signal_spectrum(s)
        weights = ", ".join(_g(w) for w in spec.weights)
        click.echo(f"signal {a}: p = {_g(p)}, spectrum = [{weights}]")


def _run_cells(e, rates, blocks, caps, method):
    try:
        return block_sweep(e, rates, blocks, caps=caps, method=method)
    except ResourceLimitError as exc:
        _fail(EXIT_RESOURCE, str(exc))
    except ValidationError as exc:
        _fail(EXIT_INPUT, str(exc))


method_option = click.option(
    "--method", type=click.Choice(["auto", "fast", "dense"]), default="auto", show_default=True,
    help="Distortion evaluation path.",
)


@main.command()
@config_option
@click.option("--rate", type=float, required=True, help="Qubits available per signal.")
@click.option("--block", type=int, required=True, help="Block length K.")
@click.option("--out", type=click.Path(dir_okay=False), help="Append the result row to this CSV.")
@click.option("--max-dense-dim", type=int, default=None)
@click.option("--max-strings", type=int, default=None)
@method_option
def compress(config_path, rate, block, out, max_dense_dim, max_strings, method):
    """Typical-subspace code for one (rate, K) cell."""
    e = _load(config_path)
    if block < 1 or rate < 0:
        _fail(EXIT_INPUT, "--block must be >= 1 and --rate >= 0")
    cell = _run_cells(e, [rate], [block], _caps(max_dense_dim, max_strings), method)[0]
    if not cell.ok:
        _fail(EXIT_RESOURCE, f"K={block}, rate={rate}: {cell.status}")
    r = cell.report
    click.echo(f"K = {cell.K}  rate = {_g(cell.rate)}  d = {cell.d}  path = {cell.method}")
    click.echo(f"xi = {_g(r.xi)}  eta = {_g(r.eta)}")
    click.echo(f"D = {_g(r.distortion)}")
    click.echo(f"bound 2xi = {_g(r.lemma1_bound)}  ({'holds' if r.lemma1_holds() else 'VIOLATED'})")
    click.echo(f"floor purity - 2eta = {_g(r.lemma2_floor)}  ({'holds' if r.lemma2_holds() else 'VIOLATED'})")
    if out:
        append_csv_row(out, cell)


@main.command()
@config_option
@click.option("--rates", required=True, help="Comma list of rates.")
@click.option("--blocks", required=True, help="Comma list or a..b range of block lengths.")
@click.option("--out", type=click.Path(dir_okay=False), help="CSV destination (stdout if omitted).")
@click.option("--max-dense-dim", type=int, default=None)
@click.option("--max-strings", type=int, default=None)
@method_option
def sweep(config_path, rates, blocks, out, max_dense_dim, max_strings, method):
    """Grid of block codes, written as CSV sorted by (rate, K)."""
    try:
        rate_list = _parse_floats(rates)
        block_list = _parse_ints(blocks)
    except ValueError as exc:
        _fail(EXIT_INPUT, f"cannot parse --rates/--blocks: {exc}")
    if not rate_list or not block_list:
        _fail(EXIT_INPUT, "--rates and --blocks must be non-empty")
    if any(r < 0 for r in rate_list) or any(k < 1 for k in block_list):
        _fail(EXIT_INPUT, "rates must be >= 0 and block lengths >= 1")
    e = _load(config_path)
    cells = _run_cells(e, rate_list, block_list, _caps(max_dense_dim, max_strings), method)
    text = sweep_csv(cells)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)
    failed = [c for c in cells if not c.ok]
    for c in failed:
        click.echo(f"warning: K={c.K}, rate={c.rate}: {c.status}", err=True)
    if len(failed) == len(cells):
        sys.exit(EXIT_RESOURCE)


@main.command()
@config_option
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trials", type=int, default=1000, show_default=True)
def hybrid(config_path, seed, trials):
    """Measure-and-relabel scheme for orthogonally supported signals."""
    e = _load(config_path)
    if seed < 0 or trials < 0:
        _fail(EXIT_INPUT, "--seed and --trials must be nonnegative")
    try:
        rep = hybrid_simulate(e, seed=seed, trials=trials)
    except PreconditionError as exc:
        ov = support_overlaps(support_profile(e))
        click.echo("orthogonal supports: no", err=True)
        click.echo(f"support overlaps Tr(P_a P_b):\n{np.array2string(ov, precision=6)}", err=True)
        _fail(EXIT_HYBRID, str(exc))
    click.echo("orthogonal supports: yes")
    click.echo(f"H(p) = {_g(rep.hybrid_rate)}  (hybrid rate, qubits/signal)")
    click.echo(f"S(rho) = {_g(rep.transposition_rate)}  (typical-subspace rate)")
    click.echo(f"gap = {_g(rep.gap)}")
    if rep.trials:
        click.echo(f"trials = {rep.trials}  identified = {rep.identified}")
        click.echo(f"empirical distortion = {_g(rep.distortion)}")
    else:
        click.echo("analytic report only (no trials)")


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trials", type=int, default=20, show_default=True, help="Instances per suite.")
@click.option("--suite", "suites", multiple=True, type=click.Choice(list(SUITES)), help="Run only these suites.")
@click.option("--inject-fault", is_flag=True, hidden=True, help="Negative control: tighten bound slack to -0.5.")
def verify(seed, trials, suites, inject_fault):
    """Run the randomised property suites."""
    if seed < 0 or trials < 1:
        _fail(EXIT_INPUT, "--seed must be >= 0 and --trials >= 1")
    tol = replace(DEFAULT_TOLERANCES, bound_slack=-0.5) if inject_fault else DEFAULT_TOLERANCES
    results = run_suites(seed, trials, tol, list(suites) or None)
    failed = False
    for r in results:
        status = "ok" if r.passed else "FAIL"
        click.echo(f"{r.name:8s} {status:4s} checks={r.checks} failures={len(r.failures)}")
        for msg in r.failures[:10]:
            click.echo(f"  {msg}")
        failed |= not r.passed
    sys.exit(EXIT_VERIFY if failed else EXIT_OK)


if __name__ == "__main__":  # pragma: no cover
    main()
