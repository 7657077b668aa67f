"""Initial factorization X = K1 A K2 with K1, K2 real orthogonal and A diagonal unitary.

The route: S = X X^T is unitary symmetric, so Re(S) and Im(S) are commuting
real symmetric matrices.  Jointly diagonalizing them gives K1 and A^2; an
entrywise principal square root (half-phases in (-pi/2, pi/2]) gives A, and
K2 = A^{-1} K1^T X is then real up to the diagonalization residual.  Realness
of K2 is verified, never assumed; a cluster-level refinement pass re-derives
the eigenvector columns of repeated eigenvalues from the rows of K1^T X when
the direct product is not real enough.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bases import BipartiteShape, as_shape
from .errors import NotUnitary, RealnessFailure
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    frobenius,
    is_unitary,
    simultaneous_diagonalize,
    _clusters,
)


@dataclass
class AITriple:
    k1: np.ndarray
    a: np.ndarray
    k2: np.ndarray
    shape: BipartiteShape

    def product(self):
        return self.k1 @ self.a @ self.k2

    def residual(self, x) -> float:
        return frobenius(self.product() - np.asarray(x, dtype=complex))


def _half_phase(d2vals):
    mod = np.abs(d2vals)
    mod[mod == 0.0] = 1.0
    z = d2vals / mod
    return np.exp(0.5j * np.arctan2(z.imag, z.real))


def ai_decompose(x, shape, tol: Tolerance = DEFAULT_TOL) -> AITriple:
    shape = as_shape(shape)
    x = np.asarray(x, dtype=complex)
    n = shape.n
    if x.shape != (n, n):
        raise NotUnitary(f"expected a {n}x{n} matrix for shape {shape}")
    if not is_unitary(x, tol.orthogonality):
        raise NotUnitary("input is not unitary within tolerance")

    s = x @ x.T
    o1, avals, bvals = simultaneous_diagonalize(s.real, s.imag, tol)
    d2vals = avals + 1j * bvals
    d = _half_phase(d2vals)

    k2_raw = (o1.T @ x) / d[:, None]
    imag_norm = frobenius(k2_raw.imag)

    if imag_norm > tol.orthogonality:
        # re-derive eigenvector columns cluster by cluster from rows of O1^T X
        order = np.lexsort((-bvals, -avals))
        inv = np.argsort(order)
        zs = d2vals[order]
        runs = [
            run
            for run in _clusters(zs.real, tol.cluster)
            for run in _split_on_imag(run, zs, tol.cluster)
        ]
        for run in runs:
            idx = order[list(run)]
            rows = np.real(k2_raw[idx, :])
            basis = _orthonormal_rows(rows)
            if basis is None:
                continue
            o1[:, idx] = np.real((x @ basis.conj().T) / d[idx][None, :])
        # re-orthonormalize the repaired columns and recompute
        o1, _ = np.linalg.qr(o1)
        k2_raw = (o1.T @ x) / d[:, None]
        imag_norm = frobenius(k2_raw.imag)
        _ = inv

    if imag_norm > 1e3 * tol.orthogonality:
        raise RealnessFailure(
            f"imaginary residual of K2 is {imag_norm:.3e} after refinement"
        )

    k1 = np.array(o1, dtype=float)
    a = np.diag(d)
    k2 = np.array(k2_raw.real, dtype=float)

    triple = AITriple(k1, a, k2, shape)
    res = triple.residual(x)
    if res > max(tol.reconstruction, 1e2 * imag_norm):
        raise RealnessFailure(f"AI reconstruction residual {res:.3e}")
    return triple


def _split_on_imag(run, zs, gap):
    if len(run) < 2:
        return [run]
    subruns = []
    start = run.start
    for i in range(run.start + 1, run.stop):
        if abs(zs[i].imag - zs[i - 1].imag) > gap:
            subruns.append(range(start, i))
            start = i
    subruns.append(range(start, run.stop))
    return subruns


def _orthonormal_rows(rows):
    out = []
    for v in rows:
        w = v.copy()
        for u in out:
            w = w - (w @ u) * u
        nrm = np.linalg.norm(w)
        if nrm < 0.5:
            return None
        out.append(w / nrm)
    return np.array(out)
