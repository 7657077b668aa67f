"""Dense matrix kernels: Jacobi eigensolver, simultaneous diagonalization,
and matrix logarithms of unitaries.

Matrices are plain numpy arrays (float64 / complex128).  Integer-valued
inputs stay exact throughout: sums and products of {0, +-1} entries are
exact in IEEE double, and every solver below short-circuits instead of
rotating or rescaling when the input is already in the target form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    NoConvergence,
    NotCommuting,
    NotOrthogonal,
    NotSymmetric,
    NotUnitary,
)


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds used across the pipeline.

    reconstruction: allowed Frobenius residual when a factorization is
        multiplied back together.
    orthogonality: allowed deviation of K^T K (or U* U) from the identity.
    cluster: eigenvalues closer than this are treated as equal when a
        solver branches on multiplicity.
    zero: entrywise / residual threshold for "exactly zero" decisions.
    """

    reconstruction: float = 1e-10
    orthogonality: float = 1e-10
    cluster: float = 1e-8
    zero: float = 1e-12

    def __post_init__(self):
        for name in ("reconstruction", "orthogonality", "cluster", "zero"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"tolerance field {name!r} must be positive")
        if self.cluster < self.zero:
            raise ValueError("cluster tolerance must be >= zero tolerance")


DEFAULT_TOL = Tolerance()


def frobenius(a) -> float:
    return float(np.linalg.norm(np.asarray(a), "fro"))


def commutator(a, b):
    return a @ b - b @ a


def is_real(a, tol: float) -> bool:
    a = np.asarray(a)
    if not np.iscomplexobj(a):
        return True
    return float(np.abs(a.imag).max(initial=0.0)) <= tol


def is_unitary(u, tol: float) -> bool:
    u = np.asarray(u)
    n = u.shape[0]
    return u.shape == (n, n) and frobenius(u.conj().T @ u - np.eye(n)) <= tol


def is_orthogonal(k, tol: float) -> bool:
    return is_real(k, tol) and is_unitary(k, tol)


def is_symmetric(a, tol: float) -> bool:
    return frobenius(a - np.asarray(a).T) <= tol


def is_skew(a, tol: float) -> bool:
    """Skew-Hermitian test: A* = -A."""
    a = np.asarray(a)
    return frobenius(a + a.conj().T) <= tol


def is_diagonal(a, tol: float) -> bool:
    a = np.asarray(a)
    return frobenius(a - np.diag(np.diag(a))) <= tol


def _offdiag_norm(a) -> float:
    return frobenius(a - np.diag(np.diag(a)))


def jacobi_eigh(s, tol: Tolerance = DEFAULT_TOL, max_sweeps: int = 40):
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Returns (o, lam) with o @ diag(lam) @ o.T == s, lam sorted descending.
    Columns of ``o`` are sign-normalized (first significant component
    positive) and the sort is stable, so integer inputs that are already
    diagonal come back exactly, with o an exact permutation matrix.
    """
    s = np.asarray(s)
    if not is_real(s, tol.zero):
        raise NotSymmetric("matrix has a non-real part")
    a = np.array(s.real, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise NotSymmetric("matrix is not square")
    if not is_symmetric(a, tol.zero):
        raise NotSymmetric(f"asymmetry {frobenius(a - a.T):.3e} exceeds {tol.zero:.1e}")

    o = np.eye(n)
    # rotating every pair above this keeps the final off-norm under tol.zero
    pair_gate = tol.zero / (2.0 * max(n, 2))
    for _ in range(max_sweeps):
        if _offdiag_norm(a) <= tol.zero:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= pair_gate:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0.0 else 1.0
                c = 1.0 / np.hypot(1.0, t)
                sn = t * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - sn * rq
                a[q, :] = sn * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - sn * cq
                a[:, q] = sn * cp + c * cq
                a[p, q] = a[q, p] = 0.0
                op, oq = o[:, p].copy(), o[:, q].copy()
                o[:, p] = c * op - sn * oq
                o[:, q] = sn * op + c * oq
    else:
        if _offdiag_norm(a) > tol.zero:
            raise NoConvergence(
                f"off-diagonal norm {_offdiag_norm(a):.3e} after {max_sweeps} sweeps"
            )

    lam = np.diag(a).copy()
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    o = o[:, order]
    for j in range(n):
        col = o[:, j]
        nz = np.nonzero(np.abs(col) > tol.zero)[0]
        lead = nz[0] if nz.size else int(np.argmax(np.abs(col)))
        if col[lead] < 0.0:
            o[:, j] = -col
    return o, lam


def _clusters(values, gap: float):
    """Index runs of a descending-sorted sequence, split where the gap exceeds ``gap``."""
    runs = []
    start = 0
    for i in range(1, len(values)):
        if abs(values[i - 1] - values[i]) > gap:
            runs.append(range(start, i))
            start = i
    runs.append(range(start, len(values)))
    return runs


def simultaneous_diagonalize(a, b, tol: Tolerance = DEFAULT_TOL):
    """Jointly diagonalize two commuting real symmetric matrices.

    Diagonalizes ``a`` first, then re-diagonalizes ``b`` restricted to each
    eigenvalue cluster of ``a``.  Returns (o, avals, bvals).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if not (is_real(a, tol.zero) and is_symmetric(a, tol.zero)):
        raise NotSymmetric("first matrix is not real symmetric")
    if not (is_real(b, tol.zero) and is_symmetric(b, tol.zero)):
        raise NotSymmetric("second matrix is not real symmetric")
    a = np.array(a.real, dtype=float)
    b = np.array(b.real, dtype=float)
    if frobenius(commutator(a, b)) > tol.zero * max(1.0, frobenius(a) * frobenius(b)):
        raise NotCommuting(f"commutator norm {frobenius(commutator(a, b)):.3e}")

    o, avals = jacobi_eigh(a, tol)
    for run in _clusters(avals, tol.cluster):
        if len(run) < 2:
            continue
        cols = o[:, run]
        sub = cols.T @ b @ cols
        sub = 0.5 * (sub + sub.T)
        ob, _ = jacobi_eigh(sub, tol)
        o[:, run] = cols @ ob

    bt = o.T @ b @ o
    if _offdiag_norm(bt) > max(tol.reconstruction, 1e3 * tol.zero) * max(1.0, frobenius(b)):
        raise NotCommuting(
            f"joint diagonalization failed, residual {_offdiag_norm(bt):.3e}"
        )
    return o, avals, np.diag(bt).copy()


def unitary_log(u, tol: Tolerance = DEFAULT_TOL):
    """Skew-Hermitian logarithm of a unitary matrix.

    Eigenphases are taken in (-pi, pi]; the -1 eigenvalue maps to +pi.
    """
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, tol.orthogonality):
        raise NotUnitary(f"U*U deviates from 1 by {frobenius(u.conj().T @ u - np.eye(u.shape[0])):.3e}")
    t, q = scipy.linalg.schur(u, output="complex")
    lam = np.diag(t)
    lam = lam / np.abs(lam)
    phases = np.arctan2(lam.imag, lam.real)
    phases[phases <= -np.pi + tol.zero] += 2.0 * np.pi
    h = (q * (1j * phases)) @ q.conj().T
    return 0.5 * (h - h.conj().T)


def orthogonal_log(k, tol: Tolerance = DEFAULT_TOL):
    """Real antisymmetric logarithm of a special orthogonal matrix.

    Uses the real Schur form; pairs of -1 eigenvalues are joined into
    pi-rotation planes.  Raises NotOrthogonal for det < 0 inputs, which
    have no real logarithm.
    """
    k = np.asarray(k)
    if not is_orthogonal(k, tol.orthogonality):
        raise NotOrthogonal("input is not real orthogonal")
    k = np.array(k.real, dtype=float)
    n = k.shape[0]
    t, q = scipy.linalg.schur(k, output="real")
    h = np.zeros((n, n))
    minus_ones = []
    i = 0
    while i < n:
        if i + 1 < n and abs(t[i + 1, i]) > tol.zero:
            theta = np.arctan2(t[i + 1, i], t[i, i])
            h[i, i + 1] = -theta
            h[i + 1, i] = theta
            i += 2
        else:
            if t[i, i] < 0.0:
                minus_ones.append(i)
            i += 1
    if len(minus_ones) % 2:
        raise NotOrthogonal("determinant -1 matrix has no real logarithm")
    for i, j in zip(minus_ones[0::2], minus_ones[1::2]):
        h[i, j] = -np.pi
        h[j, i] = np.pi
    out = q @ h @ q.T
    return 0.5 * (out - out.T)
