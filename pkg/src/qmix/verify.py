"""Randomised property suites over every module.

Each suite draws ``trials`` seeded instances and records one failure string
per violated property. Suites use independent generators derived from the
master seed, so adding a suite never changes the instances of another.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import sampling
from .blocks import block_sweep, block_typical_mass
from .compression import (
    apply_code,
    apply_code_spectral,
    code_report,
    encode_ensemble,
    lemma2_floor,
    select_typical_subspace,
)
from .config import DEFAULT_TOLERANCES, Tolerances
from .hybrid import hybrid_simulate
from .linalg import (
    hermitian_eigendecomposition,
    ket_bra,
    tensor_power,
    tensor_product,
    trace_of_square,
)
from .metrics import (
    distortion,
    distortion_terms,
    flat_distance_sq,
    naive_fidelity,
    pure_distance_sq,
)
from .source import (
    Ensemble,
    average_purity,
    ensemble_density,
    shannon_entropy,
    signal_spectrum,
    von_neumann_entropy,
)


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, seed: int, instance: int, what: str) -> None:
        self.checks += 1
        if not ok:
            self.failures.append(f"{self.name}: seed={seed} instance={instance}: {what}")


def _eigen(res: SuiteResult, rng, seed, trials, tol: Tolerances):
    for t in range(trials):
        n = int(rng.integers(2, 13))
        h = sampling.random_hermitian(n, rng)
        eig = hermitian_eigendecomposition(h, tol)
        rec = float(np.linalg.norm(eig.reconstruct() - h))
        res.check(rec < tol.reconstruction, seed, t, f"reconstruction error {rec:.3e} (n={n})")
        v = eig.eigenvectors
        gram = float(np.max(np.abs(v.conj().T @ v - np.eye(n))))
        res.check(gram < tol.reconstruction, seed, t, f"Gram defect {gram:.3e}")
        tr = float(np.trace(h).real)
        res.check(abs(eig.eigenvalues.sum() - tr) < tol.trace, seed, t, "eigenvalue sum != trace")
        res.check(
            abs(float(np.sum(eig.eigenvalues**2)) - trace_of_square(h)) < tol.reconstruction,
            seed, t, "eigenvalue square sum != Tr(H^2)",
        )
        res.check(bool(np.all(np.diff(eig.eigenvalues) <= 0)), seed, t, "eigenvalues not descending")


def _tensor(res: SuiteResult, rng, seed, trials, tol: Tolerances):
    for t in range(trials):
        na, nb = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        a = sampling.random_hermitian(na, rng)
        b = sampling.random_hermitian(nb, rng)
        prod = np.sort(np.multiply.outer(
            hermitian_eigendecomposition(a, tol).eigenvalues,
            hermitian_eigendecomposition(b, tol).eigenvalues,
        ).ravel())
        direct = np.sort(hermitian_eigendecomposition(tensor_product(a, b), tol).eigenvalues)
        err = float(np.max(np.abs(prod - direct)))
        res.check(err < tol.reconstruction, seed, t, f"tensor eigenvalue mismatch {err:.3e}")

        rho = sampling.random_density(na + 1, rng, int(rng.integers(1, na + 2)))
        sigma = sampling.random_density(nb + 1, rng)
        s_joint = von_neumann_entropy(tensor_product(rho, sigma), tol)
        s_sum = von_neumann_entropy(rho, tol) + von_neumann_entropy(sigma, tol)
        res.check(abs(s_joint - s_sum) < tol.reconstruction, seed, t,
                  f"entropy not additive: {s_joint} vs {s_sum}")


def _entropy(res: SuiteResult, rng, seed, trials, tol: Tolerances):
    for t in range(trials):
        n = int(rng.integers(1, 7))
        rho = sampling.random_density(n, rng, int(rng.integers(1, n + 1)))
        lam = hermitian_eigendecomposition(rho, tol).eigenvalues
        p = np.clip(lam, 0.0, None)
        p = p / p.sum()
        s = von_neumann_entropy(rho, tol)
        res.check(abs(s - shannon_entropy(p, tol)) < tol.trace, seed, t, "S(rho) != H(spectrum)")
        res.check(-tol.trace <= s <= np.log2(n) + tol.trace, seed, t, f"entropy {s} out of range")


def _metrics(res: SuiteResult, rng, seed, trials, tol: Tolerances):
    for t in range(trials):
        n = int(rng.integers(2, 9))
        psi, phi = sampling.random_state(n, rng), sampling.random_state(n, rng)
        diff = abs(flat_distance_sq(ket_bra(psi), ket_bra(phi)) - pure_distance_sq(psi, phi))
        res.check(diff < tol.trace, seed, t, f"flat vs Fubini-Study mismatch {diff:.3e}")

        n = int(rng.integers(2, 7))
        e = sampling.random_ensemble(n, int(rng.integers(1, 5)), rng)
        ws = [sampling.random_density(n, rng, int(rng.integers(1, n + 1))) for _ in range(len(e))]
        dist = distortion(e, ws)
        res.check(-tol.trace <= dist <= 2 + tol.trace, seed, t, f"D = {dist} outside [0, 2]")
        res.check(abs(dist - distortion_terms(e, ws)) < tol.trace, seed, t, "D expansion identity")
        res.check(abs(naive_fidelity(e, list(e.signals)) - average_purity(e)) < tol.trace,
                  seed, t, "naive fidelity at identity != average purity")
        res.check(distortion(e, list(e.signals)) < tol.trace, seed, t, "identity reconstruction D != 0")

        q = sampling.random_distribution(len(ws), rng)
        xs = [s - w for s, w in zip(e.signals, ws)]
        lhs = trace_of_square(sum(qi * x for qi, x in zip(q, xs)))
        rhs = sum(qi * trace_of_square(x) for qi, x in zip(q, xs))
        res.check(lhs <= rhs + tol.trace, seed, t, "Tr(X^2) convexity violated")


def _channel(res: SuiteResult, rng, seed, trials, tol: Tolerances):
    for t in range(trials):
        n = int(rng.integers(2, 7))
        d = int(rng.integers(1, n + 1))
        c = sampling.random_code(n, d, rng)
        pis = [sampling.random_density(n, rng, int(rng.integers(1, n + 1))) for _ in range(3)]
        w = apply_code(c, pis[0])
        res.check(trace_of_square(apply_code(c, w) - w) < tol.operator_equality, seed, t, "not idempotent")
        outside = np.eye(n) - c.projector
        res.check(trace_of_square(outside @ w @ outside) < tol.operator_equality, seed, t,
                  "output not supported on the code")
        q = sampling.random_distribution(3, rng)
        mixed = sum(qi * p for qi, p in zip(q, pis))
        lin = sum(qi * apply_code(c, p) for qi, p in zip(q, pis))
        res.check(float(np.max(np.abs(apply_code(c, mixed) - lin))) < tol.trace, seed, t, "not linear")
        spec = float(np.max(np.abs(apply_code_spectral(c, pis[0]) - w)))
        res.check(spec < tol.trace, seed, t, f"spectral route differs by {spec:.3e}")


def _lemma1(res: SuiteResult, rng, seed, trials, tol: Tolerances):
    for t in range(trials):
        n = int(rng.integers(2, 7))
        e = sampling.random_ensemble(n, int(rng.integers(1, 5)), rng)
        rho = ensemble_density(e)
        refined_p, refined_s = [], []
        for p, s in e:
            spec = signal_spectrum(s, tol)
            for q, k in zip(spec.weights, range(len(spec))):
                refined_p.append(p * q)
                refined_s.append(ket_bra(spec.states[:, k]))
        refined_p = np.array(refined_p)
        refined = Ensemble._certified(refined_p / refined_p.sum(), [np.array(s) for s in refined_s], tol=tol)
        for d in range(1, n + 1):
            c = select_typical_subspace(rho, d, tol)
            rep = code_report(c, e)
            res.check(rep.distortion <= rep.lemma1_bound + tol.bound_slack, seed, t,
                      f"typical-code bound violated: D={rep.distortion:.12g} > 2xi={rep.lemma1_bound:.12g} (n={n}, d={d})")
            res.check(abs(rep.xi - (1 - rep.eta)) < tol.reconstruction, seed, t, "xi != 1 - eta")
            d_ref = distortion(refined, encode_ensemble(c, refined))
            res.check(rep.distortion <= d_ref + tol.trace, seed, t,
                      "mixed distortion exceeds its pure refinement")


def _lemma2(res: SuiteResult, rng, seed, trials, tol: Tolerances, codes_per_dim: int = 5):
    for t in range(trials):
        n = int(rng.integers(2, 7))
        e = sampling.random_ensemble(n, int(rng.integers(1, 5)), rng)
        for d in range(1, n + 1):
            floor = lemma2_floor(e, d)
            for _ in range(codes_per_dim):
                c = sampling.random_code(n, d, rng)
                dist = distortion(e, encode_ensemble(c, e))
                res.check(dist >= floor - tol.bound_slack, seed, t,
                          f"distortion floor violated by projection code: D={dist:.12g} < {floor:.12g}")
                ws = [sampling.random_supported_density(c.basis, rng) for _ in range(len(e))]
                dist = distortion(e, ws)
                res.check(dist >= floor - tol.bound_slack, seed, t,
                          f"distortion floor violated by supported reconstruction: D={dist:.12g} < {floor:.12g}")


def _blocks(res: SuiteResult, rng, seed, trials, tol: Tolerances):
    for t in range(trials):
        n = int(rng.integers(2, 4))
        K = int(rng.integers(1, 4))
        rho = sampling.random_density(n, rng, int(rng.integers(1, n + 1)))
        dense = hermitian_eigendecomposition(tensor_power(rho, K), tol).eigenvalues
        base = hermitian_eigendecomposition(rho, tol).eigenvalues
        d = int(rng.integers(1, n**K + 1))
        err = abs(block_typical_mass(base, K, d) - float(np.sum(dense[:d])))
        res.check(err < tol.trace, seed, t, f"block typical mass off by {err:.3e} (n={n}, K={K}, d={d})")

        m = int(rng.integers(1, 4))
        e = sampling.random_ensemble(2, m, rng, mixed=False)
        K = int(rng.integers(1, 4))
        rate = float(rng.uniform(0, 1.05))
        fast = block_sweep(e, [rate], [K], method="fast", workers=1)[0]
        slow = block_sweep(e, [rate], [K], method="dense", workers=1)[0]
        diff = abs(fast.report.distortion - slow.report.distortion)
        res.check(diff < tol.reconstruction, seed, t, f"fast vs dense distortion differ by {diff:.3e}")
        res.check(fast.report.lemma1_holds(tol.bound_slack), seed, t, "block code exceeds 2xi")
        res.check(fast.report.lemma2_holds(tol.bound_slack), seed, t, "block code below purity - 2eta")


def _hybrid(res: SuiteResult, rng, seed, trials, tol: Tolerances):
    for t in range(trials):
        n = int(rng.integers(2, 7))
        m = int(rng.integers(1, n + 1))
        e = sampling.random_orthogonal_support_ensemble(n, m, rng)
        s = von_neumann_entropy(ensemble_density(e), tol)
        h = shannon_entropy(e.probabilities, tol)
        inner = sum(p * von_neumann_entropy(x, tol) for p, x in e)
        res.check(abs(s - (h + inner)) < tol.reconstruction, seed, t, "S != H + sum p S(Pi)")
        rep = hybrid_simulate(e, seed=int(rng.integers(2**31)), trials=50)
        res.check(rep.distortion == 0.0, seed, t, f"hybrid distortion {rep.distortion}")
        res.check(rep.identified == rep.trials, seed, t, "measurement misidentified a signal")
        res.check(rep.gap >= -tol.trace, seed, t, f"negative gap {rep.gap}")


SUITES: dict[str, Callable] = {
    "eigen": _eigen,
    "tensor": _tensor,
    "entropy": _entropy,
    "metrics": _metrics,
    "channel": _channel,
    "lemma1": _lemma1,
    "lemma2": _lemma2,
    "blocks": _blocks,
    "hybrid": _hybrid,
}


def run_suites(
    seed: int = 0,
    trials: int = 20,
    tol: Tolerances = DEFAULT_TOLERANCES,
    names: list[str] | None = None,
) -> list[SuiteResult]:
    out = []
    order = list(SUITES)
    for name in order if names is None else names:
        rng = np.random.default_rng([seed, order.index(name)])
        res = SuiteResult(name)
        SUITES[name](res, rng, seed, trials, tol)
        out.append(res)
    return out
