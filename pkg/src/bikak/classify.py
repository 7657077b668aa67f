"""Tensor-product expansion of generators and local/entangling classification.

The product basis per subsystem is {E_jj} + {Omega_mn, m < n} + {Delta_mn,
m < n}, trace-orthogonal with squared norms 1 and 2.  A generator is local
when it lies in span{B x 1, 1 x B}; the orthogonal projection onto that
span is computed from partial traces, not from coefficient support, since
the identity is not itself a basis element.

Entangling generators are sorted into structural families by the support
pattern of their nonlocal part:

    diagonal-diagonal    E_jj x E_kk terms (diagonal torus factors)
    diagonal-rotation    E_jj x Delta_kl or Delta_kl x E_jj terms
    symmetric-pair       Delta x Omega + Omega x Delta combinations
    antisymmetric-pair   Delta x Omega - Omega x Delta combinations

plus an ``other`` bucket for anything outside these patterns.  A factor may
use several families; the inventory counts, per family, how many factors
carry weight on it, and keeps the first factor's component as the
representative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .bases import as_shape
from .errors import MissingGenerator, NotSkewHermitian
from .linalg import DEFAULT_TOL, Tolerance, frobenius, is_skew

FAMILY_DIAG_DIAG = "diagonal-diagonal"
FAMILY_DIAG_ROT = "diagonal-rotation"
FAMILY_SYM_PAIR = "symmetric-pair"
FAMILY_ANTISYM_PAIR = "antisymmetric-pair"
FAMILY_OTHER = "other"


@lru_cache(maxsize=32)
def product_basis(d: int):
    """Labelled trace-orthogonal basis of d x d real matrices.

    Labels: E<j><j> diagonal units, W<m><n> symmetric, D<m><n> antisymmetric.
    """
    from .bases import delta, elementary, omega

    def tag(m, n):
        return f"{m}{n}" if d <= 9 else f"{m},{n}"

    labels, mats = [], []
    for j in range(1, d + 1):
        labels.append("E" + tag(j, j))
        mats.append(elementary(d, j, j))
    for m in range(1, d + 1):
        for n in range(m + 1, d + 1):
            labels.append("W" + tag(m, n))
            mats.append(omega(d, m, n))
    for m in range(1, d + 1):
        for n in range(m + 1, d + 1):
            labels.append("D" + tag(m, n))
            mats.append(delta(d, m, n))
    return tuple(labels), tuple(mats)


@dataclass
class GeneratorCoefficients:
    shape: tuple
    terms: list = field(default_factory=list)  # (i1, i2, complex coefficient)
    residual: float = 0.0

    def labelled(self):
        l1 = product_basis(self.shape[0])[0]
        l2 = product_basis(self.shape[1])[0]
        return [(l1[i1], l2[i2], c) for i1, i2, c in self.terms]

    def as_dict(self):
        return {(i1, i2): c for i1, i2, c in self.terms}

    def matrix(self):
        m1 = product_basis(self.shape[0])[1]
        m2 = product_basis(self.shape[1])[1]
        n = self.shape[0] * self.shape[1]
        out = np.zeros((n, n), dtype=complex)
        for i1, i2, c in self.terms:
            out += c * np.kron(m1[i1], m2[i2])
        return out


def tensor_expand(h, shape, tol: Tolerance = DEFAULT_TOL) -> GeneratorCoefficients:
    shape = as_shape(shape)
    h = np.asarray(h, dtype=complex)
    if not is_skew(h, max(tol.zero * max(1.0, frobenius(h)), tol.zero)):
        raise NotSkewHermitian("generator is not skew-Hermitian within tolerance")
    _, m1 = product_basis(shape.d1)
    _, m2 = product_basis(shape.d2)
    cutoff = tol.zero * max(1.0, frobenius(h))
    terms = []
    rec = np.zeros_like(h)
    for i1, b1 in enumerate(m1):
        n1 = np.trace(b1 @ b1.T)
        for i2, b2 in enumerate(m2):
            b = np.kron(b1, b2)
            coef = np.trace(h @ b.T) / (n1 * np.trace(b2 @ b2.T))
            if abs(coef) > cutoff:
                terms.append((i1, i2, complex(coef)))
                rec += coef * b
    return GeneratorCoefficients((shape.d1, shape.d2), terms, frobenius(h - rec))


def local_part(h, shape):
    """Orthogonal projection onto span{X x 1, 1 x Y}."""
    shape = as_shape(shape)
    d1, d2 = shape.d1, shape.d2
    h = np.asarray(h, dtype=complex).reshape(d1, d2, d1, d2)
    tr2 = np.einsum("ijkj->ik", h)
    tr1 = np.einsum("ijik->jk", h)
    total = np.trace(np.asarray(tr2))
    out = np.kron(tr2, np.eye(d2)) / d2 + np.kron(np.eye(d1), tr1) / d1
    out -= (total / (d1 * d2)) * np.eye(d1 * d2)
    return out


def nonlocal_part(h, shape):
    return np.asarray(h, dtype=complex) - local_part(h, shape)


def is_local(h, shape, tol: Tolerance = DEFAULT_TOL) -> bool:
    h = np.asarray(h, dtype=complex)
    if not is_skew(h, max(tol.zero * max(1.0, frobenius(h)), tol.zero)):
        raise NotSkewHermitian("generator is not skew-Hermitian within tolerance")
    return frobenius(nonlocal_part(h, shape)) <= tol.zero * (1.0 + frobenius(h))


def _basis_kind(label: str) -> str:
    return label[0]  # 'E', 'W' or 'D'


def factor_families(h, shape, tol: Tolerance = DEFAULT_TOL):
    """Decompose the nonlocal part of a generator into structural families.

    Returns {family label: component matrix}; empty when the generator is local.
    """
    shape = as_shape(shape)
    hn = nonlocal_part(h, shape)
    cutoff = tol.zero * (1.0 + frobenius(np.asarray(h)))
    if frobenius(hn) <= cutoff:
        return {}
    coeffs = tensor_expand(hn, shape, tol)
    l1, m1 = product_basis(shape.d1)
    l2, m2 = product_basis(shape.d2)

    families: dict[str, np.ndarray] = {}

    def add(family, i1, i2, coef):
        block = families.setdefault(
            family, np.zeros((shape.n, shape.n), dtype=complex)
        )
        block += coef * np.kron(m1[i1], m2[i2])

    pos1 = {lab: i for i, lab in enumerate(l1)}
    pos2 = {lab: i for i, lab in enumerate(l2)}
    cdict = coeffs.as_dict()
    seen_pairs = set()
    for (i1, i2), coef in cdict.items():
        if abs(coef) <= cutoff:
            continue
        kinds = (_basis_kind(l1[i1]), _basis_kind(l2[i2]))
        if kinds == ("E", "E"):
            add(FAMILY_DIAG_DIAG, i1, i2, coef)
        elif kinds in (("E", "D"), ("D", "E")):
            add(FAMILY_DIAG_ROT, i1, i2, coef)
        elif kinds in (("D", "W"), ("W", "D")):
            # split the (Delta x Omega, Omega x Delta) pair with matching
            # indices into its symmetric and antisymmetric combinations
            flip = {"D": "W", "W": "D"}
            other1 = pos1[flip[kinds[0]] + l1[i1][1:]]
            other2 = pos2[flip[kinds[1]] + l2[i2][1:]]
            pair = tuple(sorted([(i1, i2), (other1, other2)]))
            if pair in seen_pairs:
                continue
            seen_pairs.add(pair)
            if kinds == ("D", "W"):
                dw, wd = (i1, i2), (other1, other2)
            else:
                dw, wd = (other1, other2), (i1, i2)
            x = cdict.get(dw, 0.0)
            y = cdict.get(wd, 0.0)
            sym = 0.5 * (x + y)
            antisym = 0.5 * (x - y)
            if abs(sym) > cutoff:
                add(FAMILY_SYM_PAIR, dw[0], dw[1], sym)
                add(FAMILY_SYM_PAIR, wd[0], wd[1], sym)
            if abs(antisym) > cutoff:
                add(FAMILY_ANTISYM_PAIR, dw[0], dw[1], antisym)
                add(FAMILY_ANTISYM_PAIR, wd[0], wd[1], -antisym)
        else:
            add(FAMILY_OTHER, i1, i2, coef)
    return families


@dataclass
class InventoryEntry:
    family: str
    representative: np.ndarray
    count: int


@dataclass
class HamiltonianInventory:
    entries: list

    def labels(self):
        return [e.family for e in self.entries]

    def __len__(self):
        return len(self.entries)


_FAMILY_ORDER = [
    FAMILY_DIAG_ROT,
    FAMILY_SYM_PAIR,
    FAMILY_ANTISYM_PAIR,
    FAMILY_DIAG_DIAG,
    FAMILY_OTHER,
]


def inventory(tree, tol: Tolerance = DEFAULT_TOL) -> HamiltonianInventory:
    """Group the entangling factors of a FactorTree by generator family."""
    shape = as_shape(tree.shape)
    found: dict[str, InventoryEntry] = {}
    for f in tree.factors:
        if f.generator is None:
            raise MissingGenerator(f"factor of kind {f.kind} has no generator")
        if f.locality != "entangling":
            continue
        for family, component in factor_families(f.generator, shape, tol).items():
            if family in found:
                found[family].count += 1
            else:
                found[family] = InventoryEntry(family, component, 1)
    ordered = [found[f] for f in _FAMILY_ORDER if f in found]
    return HamiltonianInventory(ordered)
