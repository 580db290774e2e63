"""Class functions and exact character tables.

Character tables are computed with the Dixon-Schneider method: the class
multiplication matrices are diagonalized simultaneously over a prime field
F_p with p = 1 mod exp(G), and the resulting values are lifted back to
exact cyclotomic integers through their eigenvalue multiplicities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import groups as grp
from .cyclotomic import Cyclotomic, reduce_ring
from .errors import CapExceeded, GroupMismatch
from .groups import GroupHom, GroupTable, Subgroup

CHARACTER_TABLE_CAP = 2000


# ---------------------------------------------------------------------------
# integer group-ring helpers (Z[x]/(x^N - 1)), used on hot paths


def ring_conj(a: np.ndarray) -> np.ndarray:
    """``x^k -> x^-k`` on the last axis."""
    n = a.shape[-1]
    return a[..., (-np.arange(n)) % n]


def ring_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched cyclic convolution on the last axis."""
    n = a.shape[-1]
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n  # idx[i, k] = k - i
    return np.einsum("...i,...ik->...k", a, b[..., idx])


def ring_to_cyclotomic(vec, n: int) -> Cyclotomic:
    return Cyclotomic.from_ring(n, [int(v) for v in vec])


def ring_reduce_int(vec, n: int) -> tuple[int, ...]:
    return reduce_ring([int(v) for v in vec], n)


# ---------------------------------------------------------------------------
# class functions


class ClassFunction:
    """A function on ``group`` that is constant on conjugacy classes.

    ``values[i]`` is the value on the i-th class of
    :func:`trifold.groups.conjugacy_classes`.
    """

    __slots__ = ("group", "values")

    def __init__(self, group: GroupTable, values: Sequence):
        classes = grp.conjugacy_classes(group)
        if len(values) != len(classes):
            raise ValueError("need exactly one value per conjugacy class")
        self.group = group
        self.values = tuple(Cyclotomic.coerce(v) for v in values)

    @classmethod
    def from_element_values(cls, group: GroupTable, func) -> "ClassFunction":
        """Build from a callable on elements, evaluated at class representatives."""
        return cls(group, [func(c[0]) for c in grp.conjugacy_classes(group)])

    @classmethod
    def trivial(cls, group: GroupTable) -> "ClassFunction":
        return cls(group, [1] * len(grp.conjugacy_classes(group)))

    @classmethod
    def regular(cls, group: GroupTable) -> "ClassFunction":
        k = len(grp.conjugacy_classes(group))
        return cls(group, [group.order] + [0] * (k - 1))

    def __call__(self, x: int) -> Cyclotomic:
        return self.values[grp.class_index(self.group)[x]]

    @property
    def degree(self) -> Cyclotomic:
        return self.values[0]

    def _check(self, other: "ClassFunction"):
        if not isinstance(other, ClassFunction):
            raise TypeError("expected a ClassFunction")
        if other.group is not self.group:
            raise GroupMismatch("class functions live on different groups")

    def __add__(self, other):
        if isinstance(other, ClassFunction):
            self._check(other)
            return ClassFunction(self.group, [a + b for a, b in zip(self.values, other.values)])
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, ClassFunction):
            self._check(other)
            return ClassFunction(self.group, [a - b for a, b in zip(self.values, other.values)])
        return NotImplemented

    def __neg__(self):
        return ClassFunction(self.group, [-a for a in self.values])

    def __mul__(self, other):
        if isinstance(other, ClassFunction):
            self._check(other)
            return ClassFunction(self.group, [a * b for a, b in zip(self.values, other.values)])
        return ClassFunction(self.group, [a * other for a in self.values])

    __rmul__ = __mul__

    def conj(self) -> "ClassFunction":
        return ClassFunction(self.group, [a.conj() for a in self.values])

    def real_part(self) -> "ClassFunction":
        return ClassFunction(self.group, [a.real_part() for a in self.values])

    def __eq__(self, other):
        if not isinstance(other, ClassFunction):
            return NotImplemented
        return other.group is self.group and self.values == other.values

    def __hash__(self):
        return hash((id(self.group), self.values))

    def __repr__(self):
        return f"ClassFunction({list(self.values)})"

    def translate_by_conjugation(self, t: int, embedding: GroupHom | None = None) -> "ClassFunction":
        """The class function ``g -> chi(t g t^-1)``.

        Without an embedding ``t`` is an element of the same group. With an
        embedding ``H -> A`` (``H`` the group of this function), ``t`` is an
        element of the ambient group ``A`` normalizing the image of ``H``.
        """
        H = self.group
        if embedding is None:
            return ClassFunction.from_element_values(H, lambda x: self(H.conj(t, x)))
        if embedding.source is not H:
            raise GroupMismatch("embedding does not start at this function's group")
        A = embedding.target
        back = {y: x for x, y in enumerate(embedding.images)}

        def value(x):
            y = A.conj(t, embedding.images[x])
            if y not in back:
                raise GroupMismatch("conjugating element does not normalize the subgroup")
            return self(back[y])

        return ClassFunction.from_element_values(H, value)

    def restrict(self, target) -> "ClassFunction":
        """Restrict along an embedding ``H -> G`` or to a :class:`Subgroup` of G.

        For a :class:`Subgroup` the result lives on the materialized
        subgroup table, available as ``result.group``.
        """
        if isinstance(target, Subgroup):
            if target.parent is not self.group:
                raise GroupMismatch("subgroup of a different group")
            _, target = grp.subgroup_table(self.group, target)
        if target.target is not self.group:
            raise GroupMismatch("embedding does not land in this function's group")
        return ClassFunction.from_element_values(target.source, lambda x: self(target.images[x]))

    def inflate(self, projection: GroupHom) -> "ClassFunction":
        """Pull back along a surjection ``G -> G/K`` onto this function's group."""
        if projection.target is not self.group:
            raise GroupMismatch("projection does not land in this function's group")
        return ClassFunction.from_element_values(projection.source, lambda x: self(projection.images[x]))


def inner_product(chi: ClassFunction, psi: ClassFunction) -> Fraction:
    """``(1/|G|) sum_g chi(g) conj(psi(g))``; must be rational."""
    chi._check(psi)
    G = chi.group
    total = Cyclotomic.rational(0)
    for cls, a, b in zip(grp.conjugacy_classes(G), chi.values, psi.values):
        total = total + a * b.conj() * len(cls)
    return (total / G.order).as_fraction()


# ---------------------------------------------------------------------------
# character tables


@dataclass(frozen=True, eq=False)
class CharacterTable:
    group: GroupTable
    irreducibles: tuple[ClassFunction, ...]
    degrees: tuple[int, ...]
    # values[i][c] as integer group-ring vectors of length exponent
    ring_values: np.ndarray

    def __len__(self):
        return len(self.irreducibles)

    def to_complex(self) -> np.ndarray:
        e = self.ring_values.shape[-1]
        z = np.exp(2j * np.pi * np.arange(e) / e)
        return self.ring_values @ z


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


def _primitive_root(p: int) -> int:
    factors = {q for q in range(2, p) if (p - 1) % q == 0 and _is_prime(q)}
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
    return 1


def _nullspace_mod(A: list[list[int]], p: int) -> list[list[int]]:
    rows = [r[:] for r in A]
    m = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, m) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(v * inv) % p for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-rows[i][f]) % p
        basis.append(v)
    return basis


def _charpoly_mod(A: list[list[int]], p: int) -> list[int]:
    """Characteristic polynomial mod p (low degree first) via Hessenberg form."""
    n = len(A)
    H = [[v % p for v in row] for row in A]
    for j in range(n - 2):
        piv = next((i for i in range(j + 1, n) if H[i][j]), None)
        if piv is None:
            continue
        if piv != j + 1:
            H[piv], H[j + 1] = H[j + 1], H[piv]
            for row in H:
                row[piv], row[j + 1] = row[j + 1], row[piv]
        inv = pow(H[j + 1][j], -1, p)
        for i in range(j + 2, n):
            f = (H[i][j] * inv) % p
            if f:
                H[i] = [(a - f * b) % p for a, b in zip(H[i], H[j + 1])]
                for row in H:
                    row[j + 1] = (row[j + 1] + f * row[i]) % p
    # recurrence on leading principal submatrices of the Hessenberg matrix
    polys = [[1]]
    for m in range(1, n + 1):
        prev = polys[m - 1]
        # (x - H[m-1][m-1]) * prev
        cur = [0] + prev[:]
        for i, c in enumerate(prev):
            cur[i] = (cur[i] - H[m - 1][m - 1] * c) % p
        t = 1
        for i in range(1, m):
            t = (t * H[m - i][m - i - 1]) % p
            coef = (t * H[m - i - 1][m - 1]) % p
            for k, c in enumerate(polys[m - i - 1]):
                cur[k] = (cur[k] - coef * c) % p
        polys.append(cur)
    return polys[n]


def character_table(G: GroupTable) -> CharacterTable:
    if "character_table" in G._cache:
        return G._cache["character_table"]
    if G.order > CHARACTER_TABLE_CAP:
        raise CapExceeded(f"order {G.order} exceeds the character table cap")
    n = G.order
    classes = grp.conjugacy_classes(G)
    class_of = grp.class_index(G)
    k = len(classes)
    sizes = [len(c) for c in classes]
    reps = [c[0] for c in classes]
    e = G.exponent

    # a[i, j, l] = #{x in C_i : x^-1 z_l in C_j}
    a = np.zeros((k, k, k), dtype=np.int64)
    for l, z in enumerate(reps):
        y = G.mult[G.inv, z]
        np.add.at(a[:, :, l], (class_of, class_of[y]), 1)

    p = e + 1
    bound = 2 * math.isqrt(n) + 2
    while not (_is_prime(p) and p > bound):
        p += e
    z = pow(_primitive_root(p), (p - 1) // e, p)

    vectors = _split_class_algebra(a, p)

    inverse_class = [int(class_of[G.inv[r]]) for r in reps]
    power_class = np.array([[int(class_of[G.power(r, s)]) for r in reps] for s in range(e)])
    chars = []
    for v in vectors:
        s = sum(v[l] * v[inverse_class[l]] * pow(sizes[l], -1, p) for l in range(k)) % p
        d2 = (n * pow(s, -1, p)) % p
        d = next(d for d in range(1, math.isqrt(n) + 1) if (d * d) % p == d2)
        theta = [(d * v[l] * pow(sizes[l], -1, p)) % p for l in range(k)]
        inv_e = pow(e, -1, p)
        rows = []
        for l in range(k):
            mults = []
            for kk in range(e):
                acc = 0
                for s_ in range(e):
                    acc += theta[power_class[s_][l]] * pow(z, (-kk * s_) % e, p)
                m = (acc * inv_e) % p
                if m > d:
                    raise ArithmeticError("eigenvalue multiplicity out of range")
                mults.append(m)
            if sum(mults) != d:
                raise ArithmeticError("eigenvalue multiplicities do not sum to the degree")
            rows.append(mults)
        chars.append((d, rows))

    def sort_key(item):
        d, rows = item
        vals = tuple(ring_reduce_int(r, e) for r in rows)
        trivial = all(r[0] == 1 and sum(r) == 1 for r in rows)
        return (d, not trivial, vals)

    chars.sort(key=sort_key)
    ring_values = np.array([rows for _, rows in chars], dtype=np.int64)
    irr = tuple(
        ClassFunction(G, [ring_to_cyclotomic(r, e) for r in rows]) for _, rows in chars
    )
    table = CharacterTable(G, irr, tuple(d for d, _ in chars), ring_values)

    # float shadow: column orthogonality must hold to 1e-9
    X = table.to_complex()
    gram = (X.conj().T @ X) * np.array(sizes)[None, :]
    if not np.allclose(np.diag(np.diag(gram)), gram, atol=1e-9) or not np.allclose(
        np.diag(gram) * 1.0, np.full(k, n), atol=1e-9
    ):
        raise ArithmeticError("character table failed the float orthogonality check")
    G._cache["character_table"] = table
    return table


def _rref_rows(vecs: list[list[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form of a list of independent vectors, with pivots."""
    rows = [v[:] for v in vecs]
    pivots = []
    r = 0
    ncols = len(rows[0])
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def _split_class_algebra(a: np.ndarray, p: int) -> list[list[int]]:
    """Common eigenvectors of the class matrices ``(M_i)[j][l] = a[i, j, l]``,
    normalized to first coordinate 1.

    Invariant subspaces are split by the eigenspaces of each ``M_i`` in turn
    until all are one-dimensional.
    """
    k = a.shape[0]
    mats = [a[i].tolist() for i in range(k)]
    spaces = [[[1 if i == j else 0 for i in range(k)] for j in range(k)]]
    for i in range(1, k):
        if all(len(W) == 1 for W in spaces):
            break
        M = mats[i]
        new_spaces = []
        for W in spaces:
            if len(W) == 1:
                new_spaces.append(W)
                continue
            R, piv = _rref_rows(W, p)
            w = len(R)
            images = [[sum(M[j][l] * r[l] for l in range(k)) % p for j in range(k)] for r in R]
            A = [[images[c][piv[row]] for c in range(w)] for row in range(w)]
            poly = _charpoly_mod(A, p)
            roots = [lam for lam in range(p) if _horner(poly, lam, p) == 0]
            pieces = []
            for lam in roots:
                shifted = [[(A[r_][c] - (lam if r_ == c else 0)) % p for c in range(w)] for r_ in range(w)]
                coords = _nullspace_mod(shifted, p)
                pieces.append([[sum(y[t] * R[t][l] for t in range(w)) % p for l in range(k)] for y in coords])
            if sum(len(x) for x in pieces) != w:
                raise ArithmeticError("class matrix is not diagonalizable over F_p")
            new_spaces.extend(pieces)
        spaces = new_spaces
    if any(len(W) != 1 for W in spaces):
        raise ArithmeticError("class algebra did not split into one-dimensional pieces")
    out = []
    for (v,) in spaces:
        if v[0] % p == 0:
            raise ArithmeticError("central character vanishes at the identity class")
        inv0 = pow(v[0], -1, p)
        out.append([(x * inv0) % p for x in v])
    return out


def _horner(poly: list[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(poly):
        acc = (acc * x + c) % p
    return acc
