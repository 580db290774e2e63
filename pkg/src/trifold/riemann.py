"""Branching types, generating vectors and the character on holomorphic 1-forms.

A generating vector of type ``[g'; m_1, ..., m_r]`` for ``H`` is a tuple
``(h_1, ..., h_r, a_1, b_1, ..., a_g', b_g')`` generating ``H`` with
``ord(h_j) = m_j`` and ``h_1 ... h_r [a_1, b_1] ... [a_g', b_g'] = 1``, where
``[a, b] = a b a^-1 b^-1``.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import groups as grp
from .characters import ClassFunction, character_table
from .cyclotomic import Cyclotomic, reduce_ring, root_over_one_minus_root
from .errors import GroupMismatch, IdentityElement, ParseError
from .groups import GroupHom, GroupTable


# ---------------------------------------------------------------------------
# branching types


@dataclass(frozen=True, order=True)
class BranchType:
    g_prime: int
    orders: tuple[int, ...] = ()

    def __post_init__(self):
        if self.g_prime < 0:
            raise ValueError("quotient genus must be non-negative")
        orders = tuple(sorted(int(m) for m in self.orders))
        if any(m < 2 for m in orders):
            raise ValueError("branching orders must be at least 2")
        object.__setattr__(self, "orders", orders)

    @property
    def r(self) -> int:
        return len(self.orders)

    @property
    def is_unramified(self) -> bool:
        return not self.orders

    def orbifold_term(self) -> Fraction:
        """``2g' - 2 + sum (1 - 1/m_j)``."""
        return 2 * self.g_prime - 2 + sum((1 - Fraction(1, m) for m in self.orders), Fraction(0))

    def __str__(self) -> str:
        if not self.orders:
            return f"[{self.g_prime};-]"
        parts = []
        for m, e in sorted(Counter(self.orders).items()):
            parts.append(f"{m}^{e}" if e > 1 else str(m))
        return f"[{self.g_prime};{','.join(parts)}]"

    @classmethod
    def parse(cls, text: str) -> "BranchType":
        s = text.replace(" ", "")
        m = re.fullmatch(r"\[(\d+);(.*)\]", s)
        if not m:
            raise ParseError(f"malformed branching type {text!r}")
        g = int(m.group(1))
        body = m.group(2)
        if body in ("-", ""):
            return cls(g, ())
        orders: list[int] = []
        for part in body.split(","):
            pm = re.fullmatch(r"(\d+)(?:\^(\d+))?", part)
            if not pm:
                raise ParseError(f"malformed branching order {part!r} in {text!r}")
            orders += [int(pm.group(1))] * int(pm.group(2) or 1)
        try:
            return cls(g, tuple(orders))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc


def hurwitz_genus_exact(n: int, k: int, T: BranchType) -> Fraction:
    """Genus from Hurwitz' formula for an action of ``G/K`` (|G| = n, |K| = k)."""
    if n < 1 or k < 1 or n % k:
        raise ValueError("need k | n")
    return Fraction(n, 2 * k) * T.orbifold_term() + 1


def hurwitz_genus(n: int, k: int, T: BranchType) -> int | None:
    """The Hurwitz genus, or ``None`` when it is not an integer."""
    g = hurwitz_genus_exact(n, k, T)
    return g.numerator if g.denominator == 1 else None


# ---------------------------------------------------------------------------
# generating vectors


@dataclass(frozen=True, eq=False)
class GeneratingVector:
    group: GroupTable
    type: BranchType
    elliptic: tuple[int, ...]
    hyperbolic: tuple[int, ...] = ()

    @property
    def elements(self) -> tuple[int, ...]:
        return self.elliptic + self.hyperbolic

    def relation_product(self) -> int:
        G = self.group
        acc = G.product(self.elliptic)
        hyp = self.hyperbolic
        for i in range(0, len(hyp), 2):
            acc = G.mul(acc, G.commutator(hyp[i], hyp[i + 1]))
        return acc

    def is_valid(self) -> bool:
        G = self.group
        T = self.type
        if len(self.elliptic) != T.r or len(self.hyperbolic) != 2 * T.g_prime:
            return False
        ords = G.element_orders
        if any(int(ords[h]) != m for h, m in zip(self.elliptic, T.orders)):
            return False
        return self.relation_product() == 0 and grp.generates(G, self.elements)

    @property
    def genus(self) -> int:
        g = hurwitz_genus(self.group.order, 1, self.type)
        assert g is not None
        return g

    def signature(self) -> tuple[int, ...]:
        """Sorted conjugacy-class indices of the elliptic entries.

        Two vectors with the same type and signature have the same
        stabilizer set and the same Chevalley-Weil character.
        """
        cls = grp.class_index(self.group)
        return tuple(sorted(int(cls[h]) for h in self.elliptic))

    def __repr__(self):
        return f"GeneratingVector({self.type}, {list(self.elliptic)}, {list(self.hyperbolic)})"


class _ClosureCache:
    """Memoized incremental subgroup closure keyed by member bitsets."""

    def __init__(self, G: GroupTable):
        self.G = G
        self.memo: dict[tuple[bytes, int], bytes] = {}
        self.full = np.ones(G.order, dtype=bool).tobytes()
        triv = np.zeros(G.order, dtype=bool)
        triv[0] = True
        self.trivial = triv.tobytes()

    def add(self, key: bytes, x: int) -> bytes:
        m = self.memo.get((key, x))
        if m is not None:
            return m
        mask = np.frombuffer(key, dtype=bool)
        if mask[x]:
            out = key
        else:
            members = np.flatnonzero(mask).tolist()
            out = grp.closure(self.G, members + [x]).mask.tobytes()
        self.memo[(key, x)] = out
        return out


def enumerate_generating_vectors(
    H: GroupTable, T: BranchType, first_up_to_conjugacy: bool = False
) -> Iterator[GeneratingVector]:
    """Stream every generating vector of type ``T`` for ``H``.

    Elliptic entries are drawn from per-order buckets, the last one is
    solved from the relation, and generation is tracked incrementally.
    With ``first_up_to_conjugacy`` the first elliptic entry is restricted to
    conjugacy-class minima, which still meets every simultaneous-conjugacy
    orbit (and so every signature).
    """
    ords = H.element_orders
    buckets = {m: H.elements_of_order(m) for m in set(T.orders)}
    if any(not b for b in buckets.values()):
        return
    rows = H.rows
    inv = H.inv_list
    cc = _ClosureCache(H)
    r, g = T.r, T.g_prime
    n = H.order
    if first_up_to_conjugacy and r:
        minima = {c[0] for c in grp.conjugacy_classes(H)}
        first_choices = [x for x in buckets[T.orders[0]] if x in minima]
        first_set = set(first_choices)
    else:
        first_choices = None
    comm_table = None
    if g:
        comm_table = [[rows[rows[rows[a][b]][inv[a]]][inv[b]] for b in range(n)] for a in range(n)]

    chosen: list[int] = []

    def rec_ab(i: int, comm_acc: int, key: bytes, pos_acc: int):
        # pos_acc: product of the chosen elliptic entries (all but the last when r > 0)
        if i == g:
            if r:
                # h_1..h_{r-1} * h_r * C = 1  =>  h_r = (h_1..h_{r-1})^-1 C^-1
                C = comm_acc
                hr = rows[inv[pos_acc]][inv[C]]
                if int(ords[hr]) != T.orders[r - 1]:
                    return
                if r == 1 and first_choices is not None and hr not in first_set:
                    return
                k = cc.add(key, hr)
                if k != cc.full:
                    return
                ell = tuple(chosen[: r - 1]) + (hr,)
                yield GeneratingVector(H, T, ell, tuple(chosen[r - 1:]))
            else:
                if comm_acc != 0 or key != cc.full:
                    return
                yield GeneratingVector(H, T, (), tuple(chosen))
            return
        for a in range(n):
            ka = cc.add(key, a)
            chosen.append(a)
            row = comm_table[a]
            for b in range(n):
                chosen.append(b)
                yield from rec_ab(i + 1, rows[comm_acc][row[b]], cc.add(ka, b), pos_acc)
                chosen.pop()
            chosen.pop()

    # elliptic entries h_1..h_{r-1} are chosen freely; the commutator block
    # is accumulated separately and h_r is solved at the end
    if r == 0:
        yield from rec_ab(0, 0, cc.trivial, 0)
        return

    def rec_free(pos: int, acc: int, key: bytes):
        if pos == r - 1:
            yield from rec_ab(0, 0, key, acc)
            return
        choices = first_choices if (pos == 0 and first_choices is not None) else buckets[T.orders[pos]]
        for x in choices:
            chosen.append(x)
            yield from rec_free(pos + 1, rows[acc][x], cc.add(key, x))
            chosen.pop()

    yield from rec_free(0, 0, cc.trivial)


def find_unramified_vector(H: GroupTable, g_prime: int) -> GeneratingVector | None:
    """A generating vector of type ``[g';-]`` if one exists.

    Fast path: a generating set of size ``<= g'`` (or ``<= 2g'`` for abelian
    groups) gives one directly; otherwise fall back to a search.
    """
    T = BranchType(g_prime, ())
    if g_prime == 0:
        return GeneratingVector(H, T, (), ()) if H.order == 1 else None
    gens = grp.small_generating_set(H)
    if len(gens) <= g_prime:
        hyp = []
        for i in range(g_prime):
            hyp += [gens[i] if i < len(gens) else 0, 0]
        return GeneratingVector(H, T, (), tuple(hyp))
    if H.is_abelian and len(gens) <= 2 * g_prime:
        padded = list(gens) + [0] * (2 * g_prime - len(gens))
        return GeneratingVector(H, T, (), tuple(padded))
    return next(iter(enumerate_generating_vectors(H, T)), None)


def exists_generating_vector(H: GroupTable, T: BranchType) -> bool:
    if T.is_unramified:
        return find_unramified_vector(H, T.g_prime) is not None
    return next(iter(enumerate_generating_vectors(H, T, first_up_to_conjugacy=True)), None) is not None


def vectors_by_signature(H: GroupTable, T: BranchType) -> dict[tuple[int, ...], tuple[GeneratingVector, int]]:
    """One representative per signature, with the number of vectors found.

    Counts refer to the conjugacy-reduced stream. Unramified types use the
    fast path and report a single representative.
    """
    key = ("sigs", T)
    if key in H._cache:
        return H._cache[key]
    out: dict[tuple[int, ...], tuple[GeneratingVector, int]] = {}
    if T.is_unramified:
        V = find_unramified_vector(H, T.g_prime)
        if V is not None:
            out[()] = (V, 1)
    else:
        for V in enumerate_generating_vectors(H, T, first_up_to_conjugacy=True):
            s = V.signature()
            if s in out:
                out[s] = (out[s][0], out[s][1] + 1)
            else:
                out[s] = (V, 1)
    H._cache[key] = out
    return out


# ---------------------------------------------------------------------------
# stabilizer sets


@dataclass(frozen=True, eq=False)
class StabilizerSet:
    group: GroupTable
    members: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(int(m) for m in self.members))))

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.group.order, dtype=bool)
        m[list(self.members)] = True
        return m

    def __contains__(self, x) -> bool:
        return int(x) in set(self.members)

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        return isinstance(other, StabilizerSet) and other.group is self.group and other.members == self.members

    def __hash__(self):
        return hash((id(self.group), self.members))


def stabilizer_from_elements(G: GroupTable, elliptic) -> StabilizerSet:
    classes = grp.conjugacy_classes(G)
    cls = grp.class_index(G)
    hit = {0}
    for h in elliptic:
        for i in range(G.element_orders[h]):
            hit.add(int(cls[G.power(h, i)]))
    return StabilizerSet(G, [x for c in hit for x in classes[c]])


def stabilizer_set(V: GeneratingVector) -> StabilizerSet:
    return stabilizer_from_elements(V.group, V.elliptic)


def preimage_stabilizer(pi: GroupHom, sigma: StabilizerSet) -> StabilizerSet:
    if sigma.group is not pi.target:
        raise GroupMismatch("stabilizer set does not live on the target of the map")
    mask = sigma.mask
    return StabilizerSet(pi.source, np.flatnonzero(mask[pi.array]).tolist())


def transport_stabilizer(emb: GroupHom, sigma: StabilizerSet) -> StabilizerSet:
    """Push a stabilizer set forward along an injective map (e.g. a subgroup embedding)."""
    if sigma.group is not emb.source:
        raise GroupMismatch("stabilizer set does not live on the source of the map")
    return StabilizerSet(emb.target, [emb.images[x] for x in sigma.members])


# ---------------------------------------------------------------------------
# fixed points and the Chevalley-Weil character


def _fixed_point_data(H: GroupTable, elliptic, orders) -> list[tuple[int, int, int]]:
    """Triples ``(class of h_j^t, m_j, t)`` for ``1 <= t < m_j``."""
    cls = grp.class_index(H)
    out = []
    for h, m in zip(elliptic, orders):
        for t in range(1, m):
            out.append((int(cls[H.power(h, t)]), m, t))
    return out


def fixed_point_count(H: GroupTable, V: GeneratingVector, h: int) -> int:
    if h == 0:
        raise IdentityElement("fixed points of the identity are not counted")
    if V.group is not H:
        raise GroupMismatch("vector lives on another group")
    c = int(grp.class_index(H)[h])
    cent = H.order // len(grp.conjugacy_classes(H)[c])
    total = Fraction(0)
    for cj, m, _t in _fixed_point_data(H, V.elliptic, V.type.orders):
        if cj == c:
            total += Fraction(cent, m)
    assert total.denominator == 1
    return int(total)


def chevalley_weil_ring(H: GroupTable, T: BranchType, elliptic) -> np.ndarray:
    """Integer matrix (classes x exp(H)) of the H^{1,0} character.

    Row ``c`` holds power-basis coordinates in Q(zeta_e), padded to length
    ``e`` so it can be used directly as a group-ring vector.
    """
    key = ("cw", T, tuple(sorted(int(grp.class_index(H)[h]) for h in elliptic)))
    if key in H._cache:
        return H._cache[key]
    classes = grp.conjugacy_classes(H)
    e = H.exponent
    k = len(classes)
    g = hurwitz_genus(H.order, 1, T)
    assert g is not None
    vals = [[Fraction(0)] * e for _ in range(k)]
    vals[0][0] = Fraction(g)
    for c in range(1, k):
        vals[c][0] = Fraction(1)
    for c, m, t in _fixed_point_data(H, elliptic, T.orders):
        cent = Fraction(H.order // len(classes[c]), m)
        w = root_over_one_minus_root(e, t * (e // m))
        row = vals[c]
        for i, x in enumerate(w):
            if x:
                row[i] += cent * x
    out = np.zeros((k, e), dtype=np.int64)
    for c in range(k):
        coords = reduce_ring(vals[c], e)
        for i, x in enumerate(coords):
            if x.denominator != 1:
                raise ArithmeticError("Chevalley-Weil value is not an algebraic integer")
            out[c, i] = int(x)
    out.setflags(write=False)
    H._cache[key] = out
    return out


def ring_rows_to_class_function(H: GroupTable, rows: np.ndarray) -> ClassFunction:
    e = rows.shape[1]
    return ClassFunction(H, [Cyclotomic.from_ring(e, [int(v) for v in r]) for r in rows])


def chevalley_weil(H: GroupTable, V: GeneratingVector) -> ClassFunction:
    """Character of ``H`` on the holomorphic 1-forms of the cover, Eichler trace form."""
    if V.group is not H:
        raise GroupMismatch("vector lives on another group")
    return ring_rows_to_class_function(H, chevalley_weil_ring(H, V.type, V.elliptic))


def chevalley_weil_multiplicities(H: GroupTable, V: GeneratingVector) -> list[int]:
    """Multiplicity of each irreducible (character-table order) in H^{1,0}.

    ``mu_chi = deg(chi) (g' - 1) + sum_j sum_a N_{j,a} <-a/m_j> + [chi trivial]``
    where ``N_{j,a}`` is the multiplicity of ``exp(2 pi i a/m_j)`` as an
    eigenvalue of ``rho_chi(h_j)`` and ``<x>`` is the fractional part.
    """
    table = character_table(H)
    out = []
    for idx, chi in enumerate(table.irreducibles):
        d = table.degrees[idx]
        mu = Fraction(d * (V.type.g_prime - 1)) + (1 if idx == 0 else 0)
        for h, m in zip(V.elliptic, V.type.orders):
            vals = [chi(H.power(h, s)) for s in range(m)]
            for a in range(m):
                acc = Cyclotomic.rational(0)
                for s in range(m):
                    acc = acc + vals[s] * Cyclotomic.root(m, -a * s)
                N = (acc / m).as_fraction()
                frac = Fraction(-a, m) - math.floor(Fraction(-a, m))
                mu += N * frac
        if mu.denominator != 1 or mu < 0:
            raise ArithmeticError(f"non-integral multiplicity {mu}")
        out.append(int(mu))
    return out


def chevalley_weil_via_irreducibles(H: GroupTable, V: GeneratingVector) -> ClassFunction:
    table = character_table(H)
    mults = chevalley_weil_multiplicities(H, V)
    total = ClassFunction(H, [0] * len(grp.conjugacy_classes(H)))
    for mu, chi in zip(mults, table.irreducibles):
        if mu:
            total = total + chi * mu
    return total
