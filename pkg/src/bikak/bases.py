"""Generator bases for the bipartite factorization.

Builds elementary/Pauli matrices, the antisymmetric (k) / imaginary-symmetric
(p) / diagonal (a) spans of a bipartite system, the block-split spans k', p'
induced by a split of each subsystem, the permutation that maps them to the
standard block form, and the two families of commuting tensor-product
generators that span the Cartan subalgebras of the induced decompositions.

Index conventions on a bipartite system (d1, d2): the product basis vector
|i>|j| (i, j 1-based) sits at position (i-1)*d2 + (j-1).  A split
(r1, q1, r2, q2) sorts these into four groups

    g1 = {i <= r1, j <= r2}   g2 = {i <= r1, j > r2}
    g3 = {i > r1,  j <= r2}   g4 = {i > r1,  j > r2}

each ordered (i, j)-lexicographically, so that each group is itself a tensor
basis of shape (r1, r2), (r1, q2), (q1, r2), (q1, q2) respectively.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadSplit, IndexOutOfRange, ShapeTooSmall
from .linalg import frobenius


def elementary(n: int, m: int, k: int):
    """E_mk: single 1 at row m, column k (1-based)."""
    if not (1 <= m <= n and 1 <= k <= n):
        raise IndexOutOfRange(f"indices ({m}, {k}) outside 1..{n}")
    e = np.zeros((n, n))
    e[m - 1, k - 1] = 1.0
    return e


def delta(n: int, m: int, k: int):
    """Antisymmetric unit: E_mk - E_km."""
    return elementary(n, m, k) - elementary(n, k, m)


def omega(n: int, m: int, k: int):
    """Symmetric unit: E_mk + E_km."""
    return elementary(n, m, k) + elementary(n, k, m)


_PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
    "id": np.eye(2, dtype=complex),
}


def pauli(which: str):
    if which not in _PAULI:
        raise IndexOutOfRange(f"unknown Pauli label {which!r}")
    return _PAULI[which].copy()


@dataclass(frozen=True)
class BipartiteShape:
    d1: int
    d2: int

    def __post_init__(self):
        if self.d1 < 1 or self.d2 < 1:
            raise BadSplit("subsystem dimensions must be >= 1")

    @property
    def n(self) -> int:
        return self.d1 * self.d2

    def position(self, i: int, j: int) -> int:
        """0-based basis position of |i>|j> (i, j 1-based)."""
        return (i - 1) * self.d2 + (j - 1)


def as_shape(shape) -> BipartiteShape:
    if isinstance(shape, BipartiteShape):
        return shape
    return BipartiteShape(*shape)


@dataclass(frozen=True)
class SplitPlan:
    r1: int
    q1: int
    r2: int
    q2: int

    def __post_init__(self):
        if not (self.r1 >= self.q1 >= 1 and self.r2 >= self.q2 >= 1):
            raise BadSplit(f"split {(self.r1, self.q1, self.r2, self.q2)} violates r >= q >= 1")

    @property
    def shape(self) -> BipartiteShape:
        return BipartiteShape(self.r1 + self.q1, self.r2 + self.q2)

    @property
    def r(self) -> int:
        return self.r1 * self.r2 + self.q1 * self.q2

    @property
    def q(self) -> int:
        return self.r1 * self.q2 + self.q1 * self.r2

    @property
    def group_sizes(self):
        """Sizes of (g1, g2, g3, g4)."""
        return (self.r1 * self.r2, self.r1 * self.q2, self.q1 * self.r2, self.q1 * self.q2)


def as_split(split) -> SplitPlan:
    if isinstance(split, SplitPlan):
        return split
    return SplitPlan(*split)


@dataclass
class SubspaceBasis:
    """An orthogonal list of generator matrices with a structural role tag."""

    role: str
    elements: list = field(default_factory=list)
    shape: BipartiteShape | None = None
    split: SplitPlan | None = None

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def project(self, m):
        """Orthogonal projection of ``m`` onto the span; returns (coeffs, residual)."""
        m = np.asarray(m, dtype=complex)
        coeffs = np.zeros(len(self.elements), dtype=complex)
        rec = np.zeros_like(m)
        for i, b in enumerate(self.elements):
            b = np.asarray(b, dtype=complex)
            coeffs[i] = np.trace(m @ b.conj().T) / np.trace(b @ b.conj().T)
            rec = rec + coeffs[i] * b
        return coeffs, frobenius(m - rec)

    def residual(self, m) -> float:
        return self.project(m)[1]


def _so_basis(d: int):
    """Delta_mn, m < n: antisymmetric units of so(d)."""
    return [(m, n, delta(d, m, n)) for m in range(1, d + 1) for n in range(m + 1, d + 1)]


def _sym_basis(d: int):
    """E_jj then Omega_mn (m < n): a trace-orthogonal basis of symmetric d x d matrices."""
    out = [((j, j), elementary(d, j, j)) for j in range(1, d + 1)]
    out += [((m, n), omega(d, m, n)) for m in range(1, d + 1) for n in range(m + 1, d + 1)]
    return out


def bipartite_spans(shape):
    """The antisymmetric / imaginary-symmetric / diagonal spans of u(d1*d2).

    k: real antisymmetric matrices, spanned by (antisym x sym) and
       (sym x antisym) tensor products.
    p: i times real symmetric, spanned by i*(antisym x antisym) and
       i*(sym x sym) products; includes the scalar direction.
    a: the n matrices i * E_jj (x) E_kk.
    """
    shape = as_shape(shape)
    d1, d2 = shape.d1, shape.d2
    so1 = [m for _, _, m in _so_basis(d1)]
    so2 = [m for _, _, m in _so_basis(d2)]
    sym1 = [m for _, m in _sym_basis(d1)]
    sym2 = [m for _, m in _sym_basis(d2)]

    k_elems = [np.kron(s, t) for s in so1 for t in sym2]
    k_elems += [np.kron(s, t) for s in sym1 for t in so2]
    p_elems = [1j * np.kron(s, t) for s in so1 for t in so2]
    p_elems += [1j * np.kron(s, t) for s in sym1 for t in sym2]
    a_elems = [
        1j * np.kron(elementary(d1, j, j), elementary(d2, kk, kk))
        for j in range(1, d1 + 1)
        for kk in range(1, d2 + 1)
    ]
    return (
        SubspaceBasis("k", k_elems, shape),
        SubspaceBasis("p", p_elems, shape),
        SubspaceBasis("a", a_elems, shape),
    )


def _group_of(i: int, j: int, split: SplitPlan) -> int:
    top = i <= split.r1
    left = j <= split.r2
    if top and left:
        return 0
    if top:
        return 1
    if left:
        return 2
    return 3


def grouping_permutation(split):
    """Permutation from the natural tensor order to the (g1, g2, g3, g4) order."""
    split = as_split(split)
    shape = split.shape
    ordered = sorted(
        ((i, j) for i in range(1, shape.d1 + 1) for j in range(1, shape.d2 + 1)),
        key=lambda ij: (_group_of(ij[0], ij[1], split), ij[0], ij[1]),
    )
    g = np.zeros((shape.n, shape.n))
    for pos, (i, j) in enumerate(ordered):
        g[pos, shape.position(i, j)] = 1.0
    return g


def conjugacy_R(split):
    """The block permutation sending (g1, g2, g3, g4) order to (g1, g4, g2, g3).

    Identity blocks of sizes r1r2, q1q2, r1q2, r2q1 are placed so that the
    first r = r1r2 + q1q2 output coordinates collect the block-diagonal part
    and the last q = r1q2 + q1r2 the block-antidiagonal part.
    """
    split = as_split(split)
    s1, s2, s3, s4 = split.group_sizes
    n = s1 + s2 + s3 + s4
    starts = (0, s1, s1 + s2, s1 + s2 + s3)
    out_order = [1, 4, 2, 3]
    sizes = (s1, s2, s3, s4)
    r = np.zeros((n, n))
    row = 0
    for g in out_order:
        st = starts[g - 1]
        for off in range(sizes[g - 1]):
            r[row, st + off] = 1.0
            row += 1
    return r


def tensor_to_bdi(split):
    """Full conjugation from the natural tensor basis to the standard (r, q) block basis."""
    split = as_split(split)
    return conjugacy_R(split) @ grouping_permutation(split)


def _split_families(d: int, r: int):
    """Block-diagonal / block-antidiagonal parts of the antisymmetric and
    symmetric bases of a d-dim subsystem split as r + (d - r).

    For r = d - r = 1 the block-diagonal antisymmetric family is empty and
    everything symmetric-off-diagonal is antidiagonal; no special casing is
    needed, the enumeration produces exactly that.
    """
    same = lambda m, n: (m <= r) == (n <= r)
    sig_d = [mat for m, n, mat in _so_basis(d) if same(m, n)]
    sig_a = [mat for m, n, mat in _so_basis(d) if not same(m, n)]
    s_d = [mat for (m, n), mat in _sym_basis(d) if same(m, n)]
    s_a = [mat for (m, n), mat in _sym_basis(d) if not same(m, n)]
    return sig_d, sig_a, s_d, s_a


def prime_spans(shape, split):
    """The induced split k = k' + p' of the antisymmetric span.

    k' collects (block-diagonal x block-diagonal) and (anti x anti) tensor
    factors; p' the mixed ones.  Conjugation by tensor_to_bdi(split) maps k'
    into block-diagonal form with blocks (r, q) and p' into the
    block-antidiagonal complement.
    """
    shape = as_shape(shape)
    split = as_split(split)
    if split.shape != shape:
        raise BadSplit(f"split {split} does not partition shape {shape}")
    if shape.d1 < 2 or shape.d2 < 2:
        raise ShapeTooSmall("both subsystem dimensions must be >= 2 to split")

    sig1_d, sig1_a, s1_d, s1_a = _split_families(shape.d1, split.r1)
    sig2_d, sig2_a, s2_d, s2_a = _split_families(shape.d2, split.r2)

    kp = [np.kron(a, b) for a in sig1_d for b in s2_d]
    kp += [np.kron(a, b) for a in s1_d for b in sig2_d]
    kp += [np.kron(a, b) for a in sig1_a for b in s2_a]
    kp += [np.kron(a, b) for a in s1_a for b in sig2_a]

    pp = [np.kron(a, b) for a in sig1_a for b in s2_d]
    pp += [np.kron(a, b) for a in sig1_d for b in s2_a]
    pp += [np.kron(a, b) for a in s1_d for b in sig2_a]
    pp += [np.kron(a, b) for a in s1_a for b in sig2_d]

    return (
        SubspaceBasis("k'", kp, shape, split),
        SubspaceBasis("p'", pp, shape, split),
    )


def dprime_spans(shape, split):
    """Second-level split k' = k'' + p'' (block-diagonal vs anti on both factors)."""
    shape = as_shape(shape)
    split = as_split(split)
    sig1_d, sig1_a, s1_d, s1_a = _split_families(shape.d1, split.r1)
    sig2_d, sig2_a, s2_d, s2_a = _split_families(shape.d2, split.r2)
    kpp = [np.kron(a, b) for a in sig1_d for b in s2_d]
    kpp += [np.kron(a, b) for a in s1_d for b in sig2_d]
    ppp = [np.kron(a, b) for a in sig1_a for b in s2_a]
    ppp += [np.kron(a, b) for a in s1_a for b in sig2_a]
    return (
        SubspaceBasis("k''", kpp, shape, split),
        SubspaceBasis("p''", ppp, shape, split),
    )


def cartan_a_prime(split):
    """Commuting generators spanning a maximal abelian subspace of p'.

    (r1+q1)*q2 matrices E_jj (x) Delta_{k, r2+k} followed by (r2-q2)*q1
    matrices Delta_{f, r1+f} (x) E_ll with l in q2+1..r2.  All entries are
    exact integers and all pairwise commutators vanish identically.
    """
    split = as_split(split)
    d1, d2 = split.shape.d1, split.shape.d2
    elems = [
        np.kron(elementary(d1, j, j), delta(d2, k, split.r2 + k))
        for j in range(1, d1 + 1)
        for k in range(1, split.q2 + 1)
    ]
    elems += [
        np.kron(delta(d1, f, split.r1 + f), elementary(d2, l, l))
        for f in range(1, split.q1 + 1)
        for l in range(split.q2 + 1, split.r2 + 1)
    ]
    return SubspaceBasis("a'", elems, split.shape, split)


def _paired_indices(s: int, width: int):
    """Unique (outer, inner) with (outer-1)*width + inner == s, inner in 1..width."""
    outer = (s - 1) // width + 1
    inner = s - (outer - 1) * width
    return outer, inner


def cartan_a_dprime(split):
    """Commuting generators spanning a Cartan subalgebra of the second-level split.

    q1*q2 symmetric combinations

        N_s = Delta_{j, r1+l} (x) Omega_{m, r2+n} + Omega_{j, r1+l} (x) Delta_{m, r2+n}

    with (j-1)*r2 + m = s and (l-1)*q2 + n = s, followed by
    min(r1*q2, q1*r2) antisymmetric combinations

        M_s = Delta_{j, r1+l} (x) Omega_{m, r2+n} - Omega_{j, r1+l} (x) Delta_{m, r2+n}

    with (j-1)*q2 + n = s and (l-1)*r2 + m = s.  Each s admits a unique
    lexicographically-smallest index pair, which is what is used.
    """
    split = as_split(split)
    d1, d2 = split.shape.d1, split.shape.d2
    elems = []
    for s in range(1, split.q1 * split.q2 + 1):
        j, m = _paired_indices(s, split.r2)
        l, n = _paired_indices(s, split.q2)
        d_x_o = np.kron(delta(d1, j, split.r1 + l), omega(d2, m, split.r2 + n))
        o_x_d = np.kron(omega(d1, j, split.r1 + l), delta(d2, m, split.r2 + n))
        elems.append(d_x_o + o_x_d)
    n_m = min(split.r1 * split.q2, split.q1 * split.r2)
    for s in range(1, n_m + 1):
        j, n = _paired_indices(s, split.q2)
        l, m = _paired_indices(s, split.r2)
        d_x_o = np.kron(delta(d1, j, split.r1 + l), omega(d2, m, split.r2 + n))
        o_x_d = np.kron(omega(d1, j, split.r1 + l), delta(d2, m, split.r2 + n))
        elems.append(d_x_o - o_x_d)
    return SubspaceBasis("a''", elems, split.shape, split)


def cartan_a_dprime_counts(split) -> tuple[int, int]:
    """(symmetric-family count, antisymmetric-family count) of cartan_a_dprime."""
    split = as_split(split)
    return split.q1 * split.q2, min(split.r1 * split.q2, split.q1 * split.r2)


def pair_support(generator, tol: float = 1e-9):
    """Support pairs ((a, b), weight) of a sum of disjoint Delta_ab blocks (0-based)."""
    g = np.asarray(generator)
    pairs = []
    n = g.shape[0]
    for a in range(n):
        for b in range(a + 1, n):
            if abs(g[a, b]) > tol:
                pairs.append(((a, b), float(np.real(g[a, b]))))
    return pairs
