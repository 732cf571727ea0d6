"""Dense complex linear algebra for Hermitian operators.

Operators are plain ``numpy`` arrays of dtype ``complex128``. Functions that
certify an operator (``as_hermitian``, ``validate_density``) return a
read-only copy, so a certified value cannot be mutated after the fact.

The eigensolver is a cyclic complex Jacobi iteration. Its output is made
reproducible: eigenvalues are sorted in descending order, every eigenvector
has its first largest-modulus component real and nonnegative, and inside a
degenerate cluster the basis is replaced by a canonical one (the
Gram-Schmidt orthonormalisation of the standard basis vectors projected onto
the eigenspace) and then ordered lexicographically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import (
    DEFAULT_CAPS,
    DEFAULT_TOLERANCES,
    Caps,
    ResourceLimitError,
    Tolerances,
    ValidationError,
)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a finite square complex matrix (a fresh copy)."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        i, j = np.argwhere(~np.isfinite(m))[0]
        raise ValidationError(f"non-finite entry at ({i}, {j}): {m[i, j]}")
    return m


def hermiticity_defect(a: np.ndarray) -> tuple[float, tuple[int, int]]:
    """Largest per-component deviation from Hermitian symmetry and where it occurs."""
    diff = a - a.conj().T
    worst = np.maximum(np.abs(diff.real), np.abs(diff.imag))
    i, j = np.unravel_index(int(np.argmax(worst)), worst.shape)
    return float(worst[i, j]), (int(i), int(j))


def as_hermitian(a, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Validate Hermitian symmetry and return the symmetrised, read-only matrix."""
    m = as_matrix(a)
    defect, (i, j) = hermiticity_defect(m)
    if defect > tol.hermitian:
        raise ValidationError(
            f"matrix is not Hermitian: entries ({i}, {j}) = {m[i, j]} and "
            f"({j}, {i}) = {m[j, i]} differ from conjugate symmetry by {defect:.3e}"
        )
    return _readonly(0.5 * (m + m.conj().T))


def as_state(v, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Validate a unit state vector and return a read-only complex copy."""
    psi = np.array(v, dtype=np.complex128)
    if psi.ndim != 1 or psi.size < 1:
        raise ValidationError(f"expected a non-empty vector, got shape {psi.shape}")
    if not np.all(np.isfinite(psi)):
        raise ValidationError("state vector has non-finite amplitudes")
    norm_sq = float(np.vdot(psi, psi).real)
    if abs(norm_sq - 1.0) > tol.unit_norm:
        raise ValidationError(f"state vector is not normalised: squared norm {norm_sq!r}")
    return _readonly(psi)


def ket_bra(psi: np.ndarray, phi: np.ndarray | None = None) -> np.ndarray:
    """Outer product ``|psi><phi|`` (``|psi><psi|`` when ``phi`` is omitted)."""
    psi = np.asarray(psi, dtype=np.complex128)
    phi = psi if phi is None else np.asarray(phi, dtype=np.complex128)
    return np.outer(psi, phi.conj())


def projector(vectors) -> np.ndarray:
    """Orthogonal projector onto the span of orthonormal column vectors."""
    b = np.asarray(vectors, dtype=np.complex128)
    if b.ndim == 1:
        b = b[:, None]
    return b @ b.conj().T


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in descending order and the matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def vector(self, k: int) -> np.ndarray:
        return self.eigenvectors[:, k]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _jacobi(a: np.ndarray, tol: float, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=np.complex128)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a[offdiag]))
        if off < threshold:
            return np.real(np.diag(a)).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                # U = diag(1, conj(u)) . [[c, s], [-s, c]] reduces the pair to
                # the real symmetric problem [[a_pp, |a_pq|], [|a_pq|, a_qq]].
                u = apq / mag
                theta = 0.5 * math.atan2(2.0 * mag, a[q, q].real - a[p, p].real)
                c, s = math.cos(theta), math.sin(theta)
                uc = u.conjugate()

                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * uc * col_q
                a[:, q] = s * col_p + c * uc * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * u * row_q
                a[q, :] = s * row_p + c * u * row_q
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * uc * vq
                v[:, q] = s * vp + c * uc * vq
    raise ValidationError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    mod = np.abs(vec)
    k = int(np.argmax(mod >= mod.max() - 1e-9))
    return vec * (vec[k].conjugate() / mod[k])


def _canonical_basis(cluster: np.ndarray) -> np.ndarray:
    """Basis-independent orthonormal basis of the column span of ``cluster``."""
    n, r = cluster.shape
    q = cluster @ cluster.conj().T
    chosen: list[np.ndarray] = []
    for j in range(n):
        w = q[:, j].copy()
        for _ in range(2):
            for b in chosen:
                w -= np.vdot(b, w) * b
        norm = np.linalg.norm(w)
        if norm > 1e-6:
            chosen.append(w / norm)
            if len(chosen) == r:
                break
    if len(chosen) < r:  # pragma: no cover - projector of rank r always yields r vectors
        raise ValidationError("failed to canonicalise a degenerate eigenspace")
    return np.column_stack(chosen)


def _lex_key(vec: np.ndarray) -> tuple[float, ...]:
    parts = np.empty(2 * vec.size)
    parts[0::2] = np.round(vec.real, 9)
    parts[1::2] = np.round(vec.imag, 9)
    return tuple(parts.tolist())


def hermitian_eigendecomposition(
    h,
    tol: Tolerances = DEFAULT_TOLERANCES,
    caps: Caps = DEFAULT_CAPS,
) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    h : array_like
        Square Hermitian matrix. A non-Hermitian input raises
        :class:`ValidationError` naming the worst offending entry pair.

    Returns
    -------
    EigenDecomposition
        Eigenvalues sorted descending with orthonormal eigenvector columns
        under the deterministic ordering and phase convention of this module.
    """
    a = as_hermitian(h, tol)
    values, vectors = _jacobi(np.array(a), tol.jacobi_offdiag, caps.max_jacobi_sweeps)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]

    n = len(values)
    out_vecs = np.empty_like(vectors)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and values[stop - 1] - values[stop] < tol.degenerate_gap:
            stop += 1
        block = vectors[:, start:stop]
        if stop - start > 1:
            block = _canonical_basis(block)
        cols = [_fix_phase(block[:, k]) for k in range(block.shape[1])]
        cols.sort(key=_lex_key, reverse=True)
        out_vecs[:, start:stop] = np.column_stack(cols)
        start = stop
    return EigenDecomposition(_readonly(values.copy()), _readonly(out_vecs))


def eigenvalues(h, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Descending eigenvalues of a Hermitian matrix."""
    return hermitian_eigendecomposition(h, tol).eigenvalues


def tensor_product(a, b, caps: Caps = DEFAULT_CAPS) -> np.ndarray:
    """Kronecker product with block structure ``A[i, j] * B``."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    dim = a.shape[0] * b.shape[0]
    if dim > caps.max_dim:
        raise ResourceLimitError(
            f"tensor product dimension {a.shape[0]}*{b.shape[0]} = {dim} exceeds cap {caps.max_dim}"
        )
    return np.kron(a, b)


def tensor_power(a, k: int, caps: Caps = DEFAULT_CAPS) -> np.ndarray:
    """``a`` tensored with itself ``k`` times (``k >= 1``)."""
    if k < 1:
        raise ValidationError(f"tensor power needs k >= 1, got {k}")
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    if n**k > caps.max_dim:
        raise ResourceLimitError(f"tensor power dimension {n}**{k} exceeds cap {caps.max_dim}")
    out = a
    for _ in range(k - 1):
        out = np.kron(out, a)
    return out


def tensor_product_all(factors: Sequence[np.ndarray], caps: Caps = DEFAULT_CAPS) -> np.ndarray:
    out = np.asarray(factors[0], dtype=np.complex128)
    for f in factors[1:]:
        out = tensor_product(out, f, caps)
    return out


def trace_of_square(x) -> float:
    """``Tr(X^2)`` for Hermitian ``X``; equals the squared Frobenius norm."""
    x = np.asarray(x)
    return float(np.sum(x.real**2 + x.imag**2))


def validate_density(h, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Certify a density operator: Hermitian, unit trace, positive semidefinite.

    Eigenvalues in ``[-tol.negativity, 0)`` are clipped to zero and the
    operator is renormalised; anything more negative is rejected.
    """
    a = as_hermitian(h, tol)
    tr = float(np.trace(a).real)
    if abs(tr - 1.0) > tol.trace:
        raise ValidationError(f"trace of density operator is {tr!r}, expected 1")
    eig = hermitian_eigendecomposition(a, tol)
    lam_min = float(eig.eigenvalues[-1])
    if lam_min < -tol.negativity:
        raise ValidationError(f"density operator has negative eigenvalue {lam_min!r}")
    if lam_min < 0.0:
        lam = np.clip(eig.eigenvalues, 0.0, None)
        lam = lam / lam.sum()
        v = eig.eigenvectors
        fixed = (v * lam) @ v.conj().T
        return _readonly(0.5 * (fixed + fixed.conj().T))
    return a


def is_pure(rho, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    return abs(float(eigenvalues(rho, tol)[0]) - 1.0) <= tol.pure
