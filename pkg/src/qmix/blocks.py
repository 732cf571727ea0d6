"""Block coding of ``K``-signal strings and rate sweeps over ``(rate, K)``.

The ensemble state of a ``K``-block is ``rho`` tensored ``K`` times, whose
eigenvectors are products of the eigenvectors of ``rho``. Codes for blocks
are therefore described by index tuples into the base eigenbasis and never
need an ``n**K`` eigensolve.

Product eigenvalues are ranked best-first over multisets of base indices
(one multiset per distinct product, with multinomial multiplicity). Equal
products are one cluster; when the code boundary cuts through a cluster the
lexicographically smallest index tuples are kept.
"""

from __future__ import annotations

import heapq
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .compression import CodeReport, CompressionCode, apply_code, dimension_for_rate
from .config import (
    DEFAULT_CAPS,
    DEFAULT_TOLERANCES,
    Caps,
    QmixError,
    ResourceLimitError,
    Tolerances,
    ValidationError,
)
from .linalg import EigenDecomposition, hermitian_eigendecomposition, tensor_product_all, trace_of_square
from .source import BlockEnsemble, Ensemble, average_purity, ensemble_density

_TIE_RTOL = 1e-12


def _multinomial(counts: Sequence[int]) -> int:
    out = math.factorial(sum(counts))
    for c in counts:
        out //= math.factorial(c)
    return out


def _product(lam: Sequence[float], counts: Sequence[int]) -> float:
    return math.prod(l**c for l, c in zip(lam, counts) if c)


def _best_first(lam: Sequence[float], K: int, d: int, caps: Caps) -> list[tuple[float, tuple[int, ...]]]:
    """Distinct block eigenvalues in descending order until ``d`` are covered.

    Returns ``(value, counts)`` pairs, where ``counts[i]`` is how many factors
    of the block eigenvector use base eigenvector ``i``. Popping continues past
    ``d`` while the next value ties with the last one taken.
    """
    n = len(lam)
    start = (K,) + (0,) * (n - 1)
    heap = [(-_product(lam, start), start)]
    seen = {start}
    out: list[tuple[float, tuple[int, ...]]] = []
    covered = 0
    while heap:
        neg, counts = heap[0]
        value = -neg
        if covered >= d:
            last = out[-1][0]
            if abs(value - last) > _TIE_RTOL * max(abs(last), abs(value)):
                break
        heapq.heappop(heap)
        out.append((value, counts))
        if len(out) > caps.max_combinations:
            raise ResourceLimitError(
                f"best-first expansion visited more than {caps.max_combinations} distinct eigenvalues"
            )
        covered += _multinomial(counts)
        for i in range(n - 1):
            if counts[i]:
                nxt = list(counts)
                nxt[i] -= 1
                nxt[i + 1] += 1
                nxt = tuple(nxt)
                if nxt not in seen:
                    seen.add(nxt)
                    heapq.heappush(heap, (-_product(lam, nxt), nxt))
    return out


def _sorted_spectrum(base_eigenvalues) -> list[float]:
    lam = np.clip(np.asarray(base_eigenvalues, dtype=float), 0.0, None)
    if lam.ndim != 1 or lam.size == 0:
        raise ValidationError("base eigenvalues must be a non-empty 1-d sequence")
    return sorted(lam.tolist(), reverse=True)


def block_typical_mass(
    base_eigenvalues, K: int, d: int, caps: Caps = DEFAULT_CAPS
) -> float:
    """Sum of the ``d`` largest eigenvalues of ``rho`` tensored ``K`` times.

    Computed from the base spectrum alone: block eigenvalues are ``K``-fold
    products of base eigenvalues, counted with multinomial multiplicity.
    """
    lam = _sorted_spectrum(base_eigenvalues)
    n = len(lam)
    if K < 1:
        raise ValidationError(f"block length must be >= 1, got {K}")
    if not 1 <= d <= n**K:
        raise ValidationError(f"code dimension {d} out of range [1, {n}**{K}]")
    terms = []
    remaining = d
    for value, counts in _best_first(lam, K, d, caps):
        take = min(remaining, _multinomial(counts))
        terms.append(take * value)
        remaining -= take
        if remaining == 0:
            break
    return float(math.fsum(terms))


def _multiset_permutations(counts: Sequence[int]) -> list[tuple[int, ...]]:
    counts = list(counts)
    K = sum(counts)
    out: list[tuple[int, ...]] = []
    prefix: list[int] = []

    def rec():
        if len(prefix) == K:
            out.append(tuple(prefix))
            return
        for i, c in enumerate(counts):
            if c:
                counts[i] -= 1
                prefix.append(i)
                rec()
                prefix.pop()
                counts[i] += 1

    rec()
    return out


def typical_block_tuples(
    base_eigenvalues, K: int, d: int, caps: Caps = DEFAULT_CAPS
) -> tuple[np.ndarray, np.ndarray]:
    """Index tuples of the ``d`` block eigenvectors spanning the typical subspace.

    Returns ``(tuples, values)``: a ``(d, K)`` integer array of indices into
    the descending base spectrum, and the matching block eigenvalues.
    """
    lam = _sorted_spectrum(base_eigenvalues)
    n = len(lam)
    if not 1 <= d <= n**K:
        raise ValidationError(f"code dimension {d} out of range [1, {n}**{K}]")
    entries = _best_first(lam, K, d, caps)
    # group into tie clusters, preserving descending order
    clusters: list[list[tuple[float, tuple[int, ...]]]] = []
    for value, counts in entries:
        if clusters:
            last = clusters[-1][0][0]
            if abs(value - last) <= _TIE_RTOL * max(abs(last), abs(value)):
                clusters[-1].append((value, counts))
                continue
        clusters.append([(value, counts)])

    tuples: list[tuple[int, ...]] = []
    values: list[float] = []
    for cluster in clusters:
        need = d - len(tuples)
        if need <= 0:
            break
        members = []
        for value, counts in cluster:
            members.extend((t, value) for t in _multiset_permutations(counts))
        members.sort(key=lambda tv: tv[0])
        for t, v in members[:need]:
            tuples.append(t)
            values.append(v)
    return np.asarray(tuples, dtype=np.intp).reshape(d, K), np.asarray(values)


@dataclass(frozen=True)
class BlockCode:
    """Typical-subspace code for ``K``-blocks in the product eigenbasis of ``rho``."""

    base: EigenDecomposition
    tuples: np.ndarray
    values: np.ndarray

    @property
    def K(self) -> int:
        return self.tuples.shape[1]

    @property
    def d(self) -> int:
        return self.tuples.shape[0]

    @property
    def captured_mass(self) -> float:
        """``Tr(rho_K P)``: the block-state weight inside the code."""
        return float(math.fsum(self.values.tolist()))

    def basis_vector(self, t: Sequence[int]) -> np.ndarray:
        v = self.base.eigenvectors[:, t[0]]
        for j in t[1:]:
            v = np.kron(v, self.base.eigenvectors[:, j])
        return v

    def to_code(self, caps: Caps = DEFAULT_CAPS, tol: Tolerances = DEFAULT_TOLERANCES) -> CompressionCode:
        """Dense :class:`CompressionCode`; fiducial is the first (largest) product vector."""
        dim = len(self.base) ** self.K
        if dim > caps.max_dense_dim:
            raise ResourceLimitError(f"dense block code dimension {dim} exceeds cap {caps.max_dense_dim}")
        basis = np.column_stack([self.basis_vector(t) for t in self.tuples])
        return CompressionCode(basis, tol=tol)


def block_code(rho, K: int, d: int, caps: Caps = DEFAULT_CAPS, tol: Tolerances = DEFAULT_TOLERANCES) -> BlockCode:
    eig = hermitian_eigendecomposition(rho, tol)
    tuples, values = typical_block_tuples(eig.eigenvalues, K, d, caps)
    return BlockCode(eig, tuples, values)


def pure_block_distortion(
    states: np.ndarray, probabilities, code: BlockCode, *, chunk_elems: int = 1 << 22
) -> float:
    """Distortion of a block code on a pure source without dense matrices.

    ``states`` holds the base signal vectors as columns. For a product
    signal and a product code basis, ``Tr(Pi P)`` is a sum over code tuples
    of products of single-site overlaps, and each pure signal contributes
    ``2 (1 - Tr(Pi P))``.
    """
    p = np.asarray(probabilities, dtype=float)
    m = p.size
    K = code.K
    overlaps = np.abs(code.base.eigenvectors.conj().T @ np.asarray(states)) ** 2  # (n, m)
    overlaps = overlaps.T  # (m, n): |<e_j|a_s>|^2
    tuples = code.tuples
    n_strings = m**K
    rows = max(1, chunk_elems // max(1, code.d))
    total = []
    for start in range(0, n_strings, rows):
        idx = np.arange(start, min(start + rows, n_strings))
        strings = np.stack(np.unravel_index(idx, (m,) * K), axis=1)
        acc = np.ones((idx.size, code.d))
        prob = np.ones(idx.size)
        for k in range(K):
            acc *= overlaps[strings[:, k][:, None], tuples[:, k][None, :]]
            prob *= p[strings[:, k]]
        inside = acc.sum(axis=1)
        total.append(float(np.dot(prob, 1.0 - inside)))
    return 2.0 * math.fsum(total)


def dense_block_distortion(block: BlockEnsemble, code: CompressionCode) -> float:
    """Distortion by building every block signal and reconstruction explicitly."""
    terms = []
    for prob, signal in block:
        w = apply_code(code, signal)
        terms.append(prob * trace_of_square(signal - w))
    return float(math.fsum(terms))


@dataclass(frozen=True)
class SweepCell:
    K: int
    rate: float
    d: int | None
    report: CodeReport | None
    method: str = ""
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _pure_states(e: Ensemble) -> np.ndarray | None:
    cols = []
    for s in e.signals:
        eig = hermitian_eigendecomposition(s, e.tol)
        if abs(eig.eigenvalues[0] - 1.0) > e.tol.pure:
            return None
        cols.append(eig.eigenvectors[:, 0])
    return np.column_stack(cols)


@dataclass
class _SweepContext:
    ensemble: Ensemble
    rho: np.ndarray
    eig: EigenDecomposition
    states: np.ndarray | None
    purity: float
    caps: Caps
    tol: Tolerances = field(default=DEFAULT_TOLERANCES)


def _run_cell(ctx: _SweepContext, K: int, rate: float, method: str) -> SweepCell:
    e = ctx.ensemble
    try:
        d = dimension_for_rate(K, rate, e.dim, ctx.caps)
    except QmixError as exc:
        return SweepCell(K, rate, None, None, method, f"skipped: {exc}")
    use = method
    if use == "auto":
        use = "fast" if ctx.states is not None else "dense"
    try:
        if use == "fast" and ctx.states is None:
            raise ValidationError("fast path requires a source of pure signals")
        if len(e) ** K > ctx.caps.max_strings:
            raise ResourceLimitError(
                f"m**K = {len(e)}**{K} signal strings exceed cap {ctx.caps.max_strings}"
            )
        eta = block_typical_mass(ctx.eig.eigenvalues, K, d, ctx.caps)
        bcode = BlockCode(ctx.eig, *typical_block_tuples(ctx.eig.eigenvalues, K, d, ctx.caps))
        purity = ctx.purity**K
        if use == "fast":
            xi = 1.0 - bcode.captured_mass
            dist = pure_block_distortion(ctx.states, e.probabilities, bcode)
        elif use == "dense":
            if e.dim**K > ctx.caps.max_dense_dim:
                raise ResourceLimitError(
                    f"dense path needs dimension {e.dim}**{K} = {e.dim**K} > cap {ctx.caps.max_dense_dim}"
                )
            code = bcode.to_code(ctx.caps, ctx.tol)
            block = BlockEnsemble(e, K, ctx.caps)
            rho_k = tensor_product_all([ctx.rho] * K, ctx.caps)
            xi = 1.0 - float(np.vdot(rho_k, code.projector).real)
            dist = dense_block_distortion(block, code)
        else:
            raise ValidationError(f"unknown sweep method {method!r}")
    except QmixError as exc:
        return SweepCell(K, rate, d, None, use, f"skipped: {exc}")
    return SweepCell(K, rate, d, CodeReport(d, xi, eta, dist, purity), use)


def default_workers() -> int:
    env = os.environ.get("QMIX_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def block_sweep(
    e: Ensemble,
    rates: Iterable[float],
    Ks: Iterable[int],
    *,
    method: str = "auto",
    caps: Caps = DEFAULT_CAPS,
    workers: int | None = None,
) -> list[SweepCell]:
    """Typical-subspace block codes over a grid of rates and block lengths.

    Parameters
    ----------
    method : {"auto", "fast", "dense"}
        ``fast`` evaluates pure sources through single-site overlaps;
        ``dense`` builds every block operator and is limited by
        ``caps.max_dense_dim``. ``auto`` picks ``fast`` for pure sources.

    Returns
    -------
    list of SweepCell
        Sorted by ``(rate, K)``. Cells that exceed a cap are returned with a
        ``skipped: ...`` status instead of a report.
    """
    rates = list(rates)
    Ks = list(Ks)
    if not rates or not Ks:
        raise ValidationError("sweep needs at least one rate and one block length")
    rho = ensemble_density(e)
    ctx = _SweepContext(
        ensemble=e,
        rho=rho,
        eig=hermitian_eigendecomposition(rho, e.tol),
        states=_pure_states(e),
        purity=average_purity(e),
        caps=caps,
        tol=e.tol,
    )
    grid = sorted({(float(r), int(k)) for r in rates for k in Ks})
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(grid) == 1:
        cells = [_run_cell(ctx, k, r, method) for r, k in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(lambda rk: _run_cell(ctx, rk[1], rk[0], method), grid))
    return cells
