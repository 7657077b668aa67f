"""Block factorization of an orthogonal matrix into K1' A' K2' with
block-diagonal K factors and a cosine-sine torus factor.

For Xt orthogonal of size r + q (r >= q >= 1), partitioned as

    Xt = [[X11, X12], [X21, X22]],

solve X11 = K11 P K21, X12 = K11 Q K22, X21 = -K12 Q^T K21,
X22 = K12 C K22 with P = diag(1_{r-q}, C), Q = [0; S] and C, S diagonal,
C^2 + S^2 = 1.

K11 and the angle cosines come from the eigenvalue equation
X11 X11^T K11 = K11 P^2.  Every remaining block is then *derived* from one
of the four equations, choosing for each row/column the equation whose
divisor (cosine or sine) is bounded away from zero; the handful of jointly
free directions left at angles 0 or pi/2 are completed orthonormally and
their partners re-derived, which keeps all four equations consistent
without any sign search.  A final determinant pass moves residual
reflections out of the blocks (into angle shifts of pi) so that all four
K blocks land in the rotation component whenever the input determinant
allows it.

Integer inputs whose blocks are already diagonalized (the generalized-SWAP
pipeline) flow through every step exactly: no Jacobi rotation fires, every
divisor is exactly 1, and the completions pick exact basis vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadSplit, NotOrthogonal, SignReconciliationFailure
from .linalg import DEFAULT_TOL, Tolerance, frobenius, is_orthogonal, jacobi_eigh

_TAU = np.sqrt(0.5)
_FREE = 1e-8  # candidate columns shorter than this are treated as free


@dataclass
class BlockKAK:
    k11: np.ndarray
    k12: np.ndarray
    k21: np.ndarray
    k22: np.ndarray
    c: np.ndarray
    s: np.ndarray
    r: int
    q: int

    @property
    def C(self):
        return np.diag(self.c)

    @property
    def S(self):
        return np.diag(self.s)

    @property
    def P(self):
        return np.diag(np.concatenate([np.ones(self.r - self.q), self.c]))

    @property
    def Q(self):
        out = np.zeros((self.r, self.q))
        for k in range(self.q):
            out[self.r - self.q + k, k] = self.s[k]
        return out

    def left(self):
        out = np.zeros((self.r + self.q, self.r + self.q))
        out[: self.r, : self.r] = self.k11
        out[self.r :, self.r :] = self.k12
        return out

    def right(self):
        out = np.zeros((self.r + self.q, self.r + self.q))
        out[: self.r, : self.r] = self.k21
        out[self.r :, self.r :] = self.k22
        return out

    def torus(self):
        n = self.r + self.q
        out = np.zeros((n, n))
        out[: self.r, : self.r] = self.P
        out[: self.r, self.r :] = self.Q
        out[self.r :, : self.r] = -self.Q.T
        out[self.r :, self.r :] = self.C
        return out

    def angles(self):
        return np.arctan2(self.s, self.c)

    def assemble(self):
        return self.left() @ self.torus() @ self.right()

    def residual(self, xt) -> float:
        return frobenius(self.assemble() - np.asarray(xt))


def _complete_orthonormal(rows, n, count):
    """Extend a set of orthonormal n-vectors by ``count`` canonical choices."""
    have = [np.asarray(v, dtype=float) for v in rows]
    added = []
    for m in range(n):
        if len(added) == count:
            break
        w = np.zeros(n)
        w[m] = 1.0
        for u in have:
            w = w - (w @ u) * u
        nrm = np.linalg.norm(w)
        if nrm * nrm >= 0.5:
            w = w / nrm
            have.append(w)
            added.append(w)
    if len(added) < count:
        raise SignReconciliationFailure("orthonormal completion failed")
    return added


def _mgs_rows(m):
    """Re-orthonormalize rows in place (modified Gram-Schmidt, top to bottom).

    On exactly-orthonormal input this is an exact no-op: every projection
    coefficient is 0.0 and every norm is 1.0.
    """
    for i in range(m.shape[0]):
        v = m[i, :]
        for j in range(i):
            coef = v @ m[j, :]
            if coef != 0.0:
                v = v - coef * m[j, :]
        nrm = np.linalg.norm(v)
        if nrm < 0.5:
            raise SignReconciliationFailure("row collapse during orthonormalization")
        m[i, :] = v / nrm if nrm != 1.0 else v
    return m


def _det_sign(m) -> int:
    return 1 if np.linalg.det(m) > 0.0 else -1


def bdi_decompose(xt, r: int, q: int, tol: Tolerance = DEFAULT_TOL) -> BlockKAK:
    xt = np.asarray(xt)
    n = r + q
    if q < 1 or r < q or xt.shape != (n, n):
        raise BadSplit(f"invalid block sizes ({r}, {q}) for shape {xt.shape}")
    if not is_orthogonal(xt, tol.orthogonality):
        raise NotOrthogonal("input is not real orthogonal within tolerance")
    xt = np.array(xt.real, dtype=float)

    x11 = xt[:r, :r]
    x12 = xt[:r, r:]
    x21 = xt[r:, :r]
    x22 = xt[r:, r:]

    k11, lam = jacobi_eigh(x11 @ x11.T, tol)
    lam = np.clip(lam, 0.0, 1.0)
    if r > q and lam[r - q - 1] < 1.0 - 1e3 * tol.orthogonality:
        raise NotOrthogonal("X11 lacks the structural unit singular values")
    c = np.sqrt(lam[r - q :])
    s = np.sqrt(np.clip(1.0 - lam[r - q :], 0.0, 1.0))

    y1 = k11.T @ x11
    z = k11.T @ x12

    k21 = np.zeros((r, r))
    k21_known = np.zeros(r, dtype=bool)
    for i in range(r - q):
        k21[i, :] = y1[i, :]
        k21_known[i] = True
    k22 = np.zeros((q, q))
    k22_known = np.zeros(q, dtype=bool)
    for k in range(q):
        i = r - q + k
        if c[k] >= _TAU:
            k21[i, :] = y1[i, :] / c[k]
            k21_known[i] = True
        else:
            k22[k, :] = z[i, :] / s[k]
            k22_known[k] = True

    # K12 columns from whichever of the two coupled equations carries signal
    k12 = np.zeros((q, q))
    k12_known = np.zeros(q, dtype=bool)
    coupled, free = [], []
    for k in range(q):
        if c[k] >= _TAU:
            u = -(x21 @ k21[r - q + k, :])
        else:
            u = x22 @ k22[k, :]
        nrm = np.linalg.norm(u)
        if nrm >= _FREE:
            k12[:, k] = u / nrm if nrm != 1.0 else u
            k12_known[k] = True
        elif c[k] >= _TAU:
            coupled.append(k)
        else:
            free.append(k)

    # cosine-dominant rows of K22 follow from the matching K12 column
    for k in range(q):
        if c[k] >= _TAU and k12_known[k]:
            k22[k, :] = (k12[:, k] @ x22) / c[k]
            k22_known[k] = True

    if coupled:
        # residual of X22 is a near-isometry on the still-unassigned pairs
        x22r = x22.copy()
        for k in range(q):
            if k12_known[k] and k22_known[k] and c[k] > 0.0:
                x22r -= c[k] * np.outer(k12[:, k], k22[k, :])
        u_r, lam_r = jacobi_eigh(x22r @ x22r.T, tol)
        lam_r = np.clip(lam_r, 0.0, None)
        for m, k in enumerate(sorted(coupled)):
            sv = np.sqrt(lam_r[m])
            k12[:, k] = u_r[:, m]
            k12_known[k] = True
            if sv >= _TAU:
                k22[k, :] = (x22r.T @ u_r[:, m]) / sv
            else:
                k22[k, :] = _complete_orthonormal(k22[k22_known, :], q, 1)[0]
            k22_known[k] = True

    if free:
        cols = _complete_orthonormal([k12[:, k] for k in range(q) if k12_known[k]], q, len(free))
        for k, col in zip(sorted(free), cols):
            k12[:, k] = col
            k12_known[k] = True

    # sine-dominant rows of K21 follow from K12 columns
    for k in range(q):
        i = r - q + k
        if not k21_known[i]:
            k21[i, :] = -(k12[:, k] @ x21) / s[k]
            k21_known[i] = True

    _mgs_rows(k21)
    _mgs_rows(k22)
    k12 = _mgs_rows(k12.T).T

    result = BlockKAK(k11, k12, k21, k22, c, s, r, q)
    _normalize_dets(result, free_zero=[k for k in free if c[k] <= tol.zero])

    res = result.residual(xt)
    if res > max(tol.reconstruction, 1e2 * tol.zero) * max(1.0, frobenius(xt)):
        raise SignReconciliationFailure(
            f"block equations irreconcilable, best residual {res:.3e}"
        )
    return result


def _normalize_dets(b: BlockKAK, free_zero):
    """Push reflections out of the K blocks where the input determinant allows.

    Moves used (all exact, all preserving the assembled product):
      * angle shift by pi on the last pair: flips det(K21), det(K22);
      * flip of a structural (non-torus) column of K11 and the matching
        K21 row (only for r > q): flips det(K11), det(K21);
      * paired sign on the q side: flips det(K12), det(K22), one sine;
      * simultaneous flip of the leading pair columns/rows (r = q only):
        flips all four;
      * flip of an exactly-free K12 column with its derived K21 row:
        flips det(K12), det(K21).
    """
    r, q = b.r, b.q

    def shift_last_angle():
        b.c[q - 1] = -b.c[q - 1]
        b.s[q - 1] = -b.s[q - 1]
        b.k21[r - 1, :] = -b.k21[r - 1, :]
        b.k22[q - 1, :] = -b.k22[q - 1, :]

    if _det_sign(b.k11) * _det_sign(b.k21) < 0:
        shift_last_angle()

    if _det_sign(b.k11) < 0:
        if r > q:
            b.k11[:, 0] = -b.k11[:, 0]
            b.k21[0, :] = -b.k21[0, :]
        else:
            b.k11[:, 0] = -b.k11[:, 0]
            b.k21[0, :] = -b.k21[0, :]
            b.k12[:, 0] = -b.k12[:, 0]
            b.k22[0, :] = -b.k22[0, :]

    if _det_sign(b.k12) < 0:
        if r > q:
            b.s[0] = -b.s[0]
            b.k12[:, 0] = -b.k12[:, 0]
            b.k22[0, :] = -b.k22[0, :]
        elif free_zero:
            k = free_zero[0]
            b.k12[:, k] = -b.k12[:, k]
            b.k21[r - q + k, :] = -b.k21[r - q + k, :]
            shift_last_angle()
        # else: r = q with no exactly-free column; the reflection pair stays.
