"""Finite groups materialized as multiplication tables.

Elements are the integers ``0 .. order-1`` with the identity at ``0``.
Products follow the left-to-right permutation convention: for permutations
``x`` and ``y`` the product ``x*y`` first applies ``x`` and then ``y``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AxiomViolation,
    BadQuotient,
    InvalidPermutation,
    NotNormal,
    OrderExceedsCap,
)

DEFAULT_CAP = 2000


class GroupTable:
    """A finite group given by its full multiplication table.

    Instances are treated as immutable; derived data (classes, fingerprints,
    character tables) is cached on the instance.
    """

    identity = 0

    def __init__(
        self,
        mult: np.ndarray,
        generator_indices: Sequence[int] = (),
        perms: np.ndarray | None = None,
        name: str | None = None,
    ):
        mult = np.ascontiguousarray(mult, dtype=np.int32)
        n = mult.shape[0]
        if mult.shape != (n, n) or n == 0:
            raise AxiomViolation("multiplication table must be square and non-empty")
        if not (np.array_equal(mult[0], np.arange(n)) and np.array_equal(mult[:, 0], np.arange(n))):
            raise AxiomViolation("element 0 is not a two-sided identity")
        mult.setflags(write=False)
        self.mult = mult
        self.order = n
        inv = np.argmax(mult == 0, axis=1).astype(np.int32)
        if not np.all(mult[np.arange(n), inv] == 0):
            raise AxiomViolation("some element has no right inverse")
        inv.setflags(write=False)
        self.inv = inv
        self.generator_indices = tuple(int(g) for g in generator_indices)
        self.perms = perms
        self.name = name
        self._cache: dict = {}

    def __repr__(self) -> str:
        label = self.name or "GroupTable"
        return f"<{label} of order {self.order}>"

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_cache"] = {}
        state.pop("rows", None)
        return state

    @cached_property
    def rows(self) -> list[list[int]]:
        """The table as nested lists; faster than numpy for scalar lookups."""
        return self.mult.tolist()

    @cached_property
    def inv_list(self) -> list[int]:
        return self.inv.tolist()

    def mul(self, x: int, y: int) -> int:
        return self.rows[x][y]

    def product(self, elems: Iterable[int]) -> int:
        rows = self.rows
        acc = 0
        for e in elems:
            acc = rows[acc][e]
        return acc

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = self.inv_list[x], -k
        rows = self.rows
        acc, base = 0, x
        while k:
            if k & 1:
                acc = rows[acc][base]
            base = rows[base][base]
            k >>= 1
        return acc

    def conj(self, g: int, x: int) -> int:
        """Return ``g x g^-1``."""
        rows = self.rows
        return rows[rows[g][x]][self.inv_list[g]]

    def commutator(self, a: int, b: int) -> int:
        """Return ``a b a^-1 b^-1``."""
        inv = self.inv_list
        return self.product((a, b, inv[a], inv[b]))

    def power_map(self, k: int) -> np.ndarray:
        """Array whose entry ``x`` is ``x**k``."""
        key = ("pow", k)
        if key not in self._cache:
            n = self.order
            idx = np.arange(n)
            if k < 0:
                base = self.inv.astype(np.int64)
                k = -k
            else:
                base = idx.copy()
            acc = np.zeros(n, dtype=np.int64)
            while k:
                if k & 1:
                    acc = self.mult[acc, base]
                base = self.mult[base, base]
                k >>= 1
            acc = acc.astype(np.int32)
            acc.setflags(write=False)
            self._cache[key] = acc
        return self._cache[key]

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        idx = np.arange(n)
        cur = idx.copy()
        k = 1
        while True:
            fresh = (cur == 0) & (orders == 0)
            orders[fresh] = k
            if orders.all():
                break
            cur = self.mult[cur, idx]
            k += 1
        orders.setflags(write=False)
        return orders

    @cached_property
    def exponent(self) -> int:
        return int(np.lcm.reduce(self.element_orders))

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mult, self.mult.T))

    def conjugates(self, x: int) -> np.ndarray:
        """All ``g x g^-1`` as ``g`` runs over the group (with repetition)."""
        return self.mult[self.mult[:, x], self.inv]

    def elements_of_order(self, m: int) -> list[int]:
        return np.flatnonzero(self.element_orders == m).tolist()

    def check_associative(self, sample: int | None = None, seed: int = 0) -> bool:
        """Exhaustive associativity check, or a random sample of triples."""
        M = self.mult
        n = self.order
        if sample is None:
            ab = M[:, :, None]  # (a*b) indexed [a, b]
            lhs = M[ab, np.arange(n)[None, None, :]]
            rhs = M[np.arange(n)[:, None, None], M[None, :, :]]
            return bool(np.array_equal(lhs, rhs))
        rng = np.random.default_rng(seed)
        a, b, c = rng.integers(0, n, size=(3, sample))
        return bool(np.array_equal(M[M[a, b], c], M[a, M[b, c]]))


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: GroupTable
    members: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(int(m) for m in self.members)))

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and other.parent is self.parent
            and other.members == self.members
        )

    def __hash__(self):
        return hash((id(self.parent), self.members))

    def __len__(self) -> int:
        return len(self.members)

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def index(self) -> int:
        return self.parent.order // len(self.members)

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.members)] = True
        m.setflags(write=False)
        return m

    def __contains__(self, x: int) -> bool:
        return bool(self.mask[x])

    def is_subgroup(self) -> bool:
        mem = np.array(self.members)
        if 0 not in self.members or self.parent.order % len(mem):
            return False
        prods = self.parent.mult[np.ix_(mem, mem)]
        return bool(self.mask[prods].all() and self.mask[self.parent.inv[mem]].all())

    def is_normal(self) -> bool:
        G = self.parent
        mem = np.array(self.members)
        # g m g^-1 for every g and every member m
        conj = G.mult[G.mult[:, mem], G.inv[:, None]]
        return bool(self.mask[conj].all())

    def conjugate_by(self, g: int) -> "Subgroup":
        G = self.parent
        return Subgroup(G, tuple(G.conj(g, m) for m in self.members))


@dataclass(frozen=True, eq=False)
class GroupHom:
    source: GroupTable
    target: GroupTable
    images: tuple[int, ...] = field(repr=False)

    def __call__(self, x: int) -> int:
        return self.images[x]

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.images, dtype=np.int32)
        a.setflags(write=False)
        return a

    def is_homomorphism(self) -> bool:
        a = self.array
        S = self.source.mult
        return bool(np.array_equal(a[S], self.target.mult[a[:, None], a[None, :]]))

    def kernel(self) -> Subgroup:
        return Subgroup(self.source, tuple(np.flatnonzero(self.array == 0).tolist()))

    def is_injective(self) -> bool:
        return len(set(self.images)) == self.source.order

    def is_surjective(self) -> bool:
        return len(set(self.images)) == self.target.order

    def inverse(self) -> "GroupHom":
        if not (self.is_injective() and self.is_surjective()):
            raise ValueError("only bijective homomorphisms can be inverted")
        inv = [0] * self.target.order
        for x, y in enumerate(self.images):
            inv[y] = x
        return GroupHom(self.target, self.source, tuple(inv))

    def compose(self, after: "GroupHom") -> "GroupHom":
        """Return ``after o self``."""
        return GroupHom(self.source, after.target, tuple(after.images[y] for y in self.images))


def identity_hom(G: GroupTable) -> GroupHom:
    return GroupHom(G, G, tuple(range(G.order)))


# ---------------------------------------------------------------------------
# construction


def _as_perm(p: Sequence[int], degree: int) -> np.ndarray:
    arr = np.asarray(list(p), dtype=np.int64)
    if arr.ndim != 1 or not np.array_equal(np.sort(arr), np.arange(len(arr))):
        raise InvalidPermutation(f"not a bijection of 0..{len(arr) - 1}: {list(p)}")
    if len(arr) < degree:
        arr = np.concatenate([arr, np.arange(len(arr), degree)])
    return arr


def from_permutation_generators(
    gens: Sequence[Sequence[int]], cap: int = DEFAULT_CAP, name: str | None = None
) -> GroupTable:
    """Close a list of permutations under composition.

    Elements are numbered breadth-first over words in the generators, taken in
    the given order, so the numbering is reproducible.
    """
    gens = list(gens)
    if not gens:
        raise InvalidPermutation("at least one generator is required")
    degree = max(len(list(g)) for g in gens)
    perms = [_as_perm(g, degree) for g in gens]
    ident = np.arange(degree)

    seen: dict[bytes, int] = {ident.tobytes(): 0}
    elements = [ident]
    parent = [-1]
    via = [-1]
    right = [[] for _ in perms]  # right[s][x] = index of x*s
    head = 0
    while head < len(elements):
        x = elements[head]
        for s, p in enumerate(perms):
            y = p[x]
            key = y.tobytes()
            j = seen.get(key)
            if j is None:
                j = len(elements)
                if j >= cap:
                    raise OrderExceedsCap(f"closure exceeds cap {cap}")
                seen[key] = j
                elements.append(y)
                parent.append(head)
                via.append(s)
            right[s].append(j)
        head += 1

    n = len(elements)
    R = np.array(right, dtype=np.int64).reshape(len(perms), n)
    mult = np.empty((n, n), dtype=np.int64)
    mult[:, 0] = np.arange(n)
    for y in range(1, n):
        mult[:, y] = R[via[y]][mult[:, parent[y]]]
    gen_idx = []
    for p in perms:
        j = seen[p.tobytes()]
        if j != 0 and j not in gen_idx:
            gen_idx.append(j)
    return GroupTable(mult, gen_idx, perms=np.array(elements, dtype=np.int32), name=name)


def from_table(mult, generator_indices: Sequence[int] | None = None, name: str | None = None) -> GroupTable:
    """Wrap an explicit table; element 0 must be the identity."""
    G = GroupTable(np.asarray(mult), (), name=name)
    n = G.order
    M = G.mult
    for row in (M, M.T):
        if not np.all(np.sort(row, axis=1) == np.arange(n)):
            raise AxiomViolation("table is not a Latin square")
    if generator_indices is None:
        generator_indices = small_generating_set(G)
    G.generator_indices = tuple(int(g) for g in generator_indices)
    return G


def cyclic_table(n: int) -> GroupTable:
    idx = np.arange(n)
    return from_table((idx[:, None] + idx[None, :]) % n, [1] if n > 1 else [], name=f"Z{n}")


# ---------------------------------------------------------------------------
# subgroups


def closure(G: GroupTable, elems: Iterable[int]) -> Subgroup:
    """The subgroup generated by ``elems``."""
    gens = sorted({int(e) for e in elems} - {0})
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    if not gens:
        return Subgroup(G, (0,))
    frontier = np.array([0])
    g = np.array(gens)
    while frontier.size:
        new = np.unique(G.mult[frontier][:, g])
        new = new[~mask[new]]
        mask[new] = True
        frontier = new
    return Subgroup(G, tuple(np.flatnonzero(mask).tolist()))


def generates(G: GroupTable, elems: Iterable[int]) -> bool:
    return closure(G, elems).order == G.order


def small_generating_set(G: GroupTable) -> list[int]:
    """A short generating set, found greedily from high-order elements."""
    key = "small_gens"
    if key in G._cache:
        return G._cache[key]
    ords = G.element_orders
    candidates = sorted(range(1, G.order), key=lambda x: (-int(ords[x]), x))
    gens: list[int] = []
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    for x in candidates:
        if mask.all():
            break
        if not mask[x]:
            gens.append(x)
            mask = closure(G, gens).mask.copy()
    for x in list(gens):
        rest = [y for y in gens if y != x]
        if rest and generates(G, rest):
            gens = rest
    G._cache[key] = gens
    return gens


def whole(G: GroupTable) -> Subgroup:
    return Subgroup(G, tuple(range(G.order)))


def trivial(G: GroupTable) -> Subgroup:
    return Subgroup(G, (0,))


def center(G: GroupTable) -> Subgroup:
    M = G.mult
    return Subgroup(G, tuple(np.flatnonzero((M == M.T).all(axis=1)).tolist()))


def centralizer(G: GroupTable, x: int) -> Subgroup:
    M = G.mult
    return Subgroup(G, tuple(np.flatnonzero(M[:, x] == M[x, :]).tolist()))


def derived_subgroup(G: GroupTable) -> Subgroup:
    key = "derived"
    if key not in G._cache:
        M = G.mult
        inv = G.inv
        comm = M[M[M, inv[:, None]], inv[None, :]]  # a b a^-1 b^-1
        G._cache[key] = closure(G, np.unique(comm).tolist())
    return G._cache[key]


def subgroup_table(G: GroupTable, S: Subgroup) -> tuple[GroupTable, GroupHom]:
    """Materialize ``S`` as a group of its own plus the embedding into ``G``."""
    mem = np.array(S.members)
    pos = np.full(G.order, -1, dtype=np.int64)
    pos[mem] = np.arange(len(mem))
    table = pos[G.mult[np.ix_(mem, mem)]]
    H = from_table(table)
    return H, GroupHom(H, G, tuple(mem.tolist()))


# ---------------------------------------------------------------------------
# conjugacy


def conjugacy_classes(G: GroupTable) -> list[tuple[int, ...]]:
    """Classes sorted by (element order, size, smallest member)."""
    key = "classes"
    if key not in G._cache:
        seen = np.zeros(G.order, dtype=bool)
        classes = []
        for x in range(G.order):
            if seen[x]:
                continue
            cls = np.unique(G.conjugates(x))
            seen[cls] = True
            classes.append(tuple(cls.tolist()))
        ords = G.element_orders
        classes.sort(key=lambda c: (int(ords[c[0]]), len(c), c[0]))
        class_of = np.empty(G.order, dtype=np.int32)
        for i, c in enumerate(classes):
            class_of[list(c)] = i
        class_of.setflags(write=False)
        G._cache[key] = classes
        G._cache["class_of"] = class_of
    return G._cache[key]


def class_index(G: GroupTable) -> np.ndarray:
    """Array mapping each element to the index of its conjugacy class."""
    conjugacy_classes(G)
    return G._cache["class_of"]


# ---------------------------------------------------------------------------
# homomorphisms


def _extend_hom(
    G: GroupTable, H: GroupTable, gens: Sequence[int], images: Sequence[int], injective: bool
) -> dict[int, int] | None:
    """Extend generator images along the Cayley graph of ``<gens>``.

    Every edge ``x -> x*s`` is checked, which is exactly the homomorphism
    condition on the generated subgroup.
    """
    rows, hrows = G.rows, H.rows
    phi = {0: 0}
    used = {0}
    queue = [0]
    head = 0
    pairs = list(zip(gens, images))
    while head < len(queue):
        x = queue[head]
        head += 1
        px = phi[x]
        rx = rows[x]
        hx = hrows[px]
        for s, t in pairs:
            y = rx[s]
            v = hx[t]
            got = phi.get(y)
            if got is None:
                if injective and v in used:
                    return None
                phi[y] = v
                used.add(v)
                queue.append(y)
            elif got != v:
                return None
    return phi


def homomorphisms(G: GroupTable, H: GroupTable, surjective: bool = False, injective: bool = False):
    """Yield all homomorphisms ``G -> H`` (optionally only epis or monos)."""
    gens = small_generating_set(G)
    ords = G.element_orders
    hords = H.element_orders
    cands = [
        [y for y in range(H.order) if ords[s] % hords[y] == 0 and (not injective or hords[y] == ords[s])]
        for s in gens
    ]

    def rec(level: int, chosen: list[int]):
        if level == len(gens):
            phi = _extend_hom(G, H, gens, chosen, injective)
            if phi is None:
                return
            hom = GroupHom(G, H, tuple(phi[x] for x in range(G.order)))
            if surjective and not hom.is_surjective():
                return
            yield hom
            return
        for y in cands[level]:
            chosen.append(y)
            if _extend_hom(G, H, gens[: level + 1], chosen, injective) is not None:
                yield from rec(level + 1, chosen)
            chosen.pop()

    if G.order == 1:
        yield GroupHom(G, H, (0,))
        return
    yield from rec(0, [])


def fingerprint(G: GroupTable) -> tuple:
    """Isomorphism invariants used to reject non-isomorphic pairs quickly."""
    key = "fingerprint"
    if key not in G._cache:
        classes = conjugacy_classes(G)
        ords = G.element_orders
        order_hist = tuple(sorted(Counter(ords.tolist()).items()))
        class_profile = tuple(sorted(Counter((int(ords[c[0]]), len(c)) for c in classes).items()))
        D = derived_subgroup(G)
        if D.order == G.order:
            ab_hist: tuple = ((1, 1),)
        else:
            Q, _ = quotient(G, D)
            ab_hist = tuple(sorted(Counter(Q.element_orders.tolist()).items()))
        G._cache[key] = (G.order, order_hist, center(G).order, ab_hist, class_profile)
    return G._cache[key]


def isomorphism(G: GroupTable, H: GroupTable) -> GroupHom | None:
    """An isomorphism ``G -> H`` if one exists.

    Cheap invariants are compared first; only then do we backtrack over
    images of a small generating set of ``G``, matching element orders and
    centralizer orders.
    """
    if G.order != H.order or fingerprint(G) != fingerprint(H):
        return None
    if G.order == 1:
        return GroupHom(G, H, (0,))
    gens = small_generating_set(G)
    gsize = {x: len(c) for c in conjugacy_classes(G) for x in c}
    hsize = {x: len(c) for c in conjugacy_classes(H) for x in c}
    ords, hords = G.element_orders, H.element_orders
    cands = [
        [y for y in range(H.order) if hords[y] == ords[s] and hsize[y] == gsize[s]] for s in gens
    ]

    def rec(level: int, chosen: list[int]):
        if level == len(gens):
            return _extend_hom(G, H, gens, chosen, True)
        for y in cands[level]:
            chosen.append(y)
            phi = _extend_hom(G, H, gens[: level + 1], chosen, True)
            if phi is not None:
                got = rec(level + 1, chosen) if level + 1 < len(gens) else phi
                if got is not None and len(got) == G.order:
                    return got
            chosen.pop()
        return None

    phi = rec(0, [])
    if phi is None:
        return None
    return GroupHom(G, H, tuple(phi[x] for x in range(G.order)))


# ---------------------------------------------------------------------------
# normal subgroups and quotients


def quotient(G: GroupTable, N: Subgroup) -> tuple[GroupTable, GroupHom]:
    """The factor group ``G/N`` with its projection; cosets are numbered by
    their smallest element, so the identity coset is ``0``."""
    if N.parent is not G:
        raise NotNormal("subgroup belongs to a different group")
    if not N.is_normal():
        raise NotNormal("subgroup is not normal")
    mem = np.array(N.members)
    label = np.full(G.order, -1, dtype=np.int64)
    reps = []
    for x in range(G.order):
        if label[x] < 0:
            label[G.mult[x, mem]] = len(reps)
            reps.append(x)
    reps_a = np.array(reps)
    table = label[G.mult[np.ix_(reps_a, reps_a)]]
    gens = sorted({int(label[g]) for g in G.generator_indices} - {0})
    Q = from_table(table, gens or None)
    return Q, GroupHom(G, Q, tuple(label.tolist()))


_TARGETS: dict[str, GroupTable] = {}


def _target(kind: str) -> GroupTable:
    if kind not in _TARGETS:
        if kind == "S3":
            _TARGETS[kind] = from_permutation_generators([[1, 2, 0], [0, 2, 1]], name="S3")
        else:
            _TARGETS[kind] = cyclic_table(int(kind[1:]))
    return _TARGETS[kind]


def normal_subgroups_with_quotient(G: GroupTable, kind: str) -> list[Subgroup]:
    """Kernels of epimorphisms onto ``Z2``, ``Z3``, ``Z6`` or ``S3``."""
    Q = _target(kind)
    if G.order % Q.order:
        return []
    kernels = {hom.kernel().members for hom in homomorphisms(G, Q, surjective=True)}
    return [Subgroup(G, k) for k in sorted(kernels)]


def normal_subgroups_of_index(G: GroupTable, k: int) -> list[Subgroup]:
    """All normal subgroups of index exactly ``k`` for ``k`` in {2, 3, 6}."""
    if k not in (2, 3, 6):
        raise BadQuotient(f"index {k} not supported")
    if G.order % k:
        return []
    kinds = {2: ["Z2"], 3: ["Z3"], 6: ["Z6", "S3"]}[k]
    found = set()
    for kind in kinds:
        found.update(N.members for N in normal_subgroups_with_quotient(G, kind))
    out = [Subgroup(G, m) for m in sorted(found)]
    for N in out:
        if not (N.is_subgroup() and N.is_normal() and N.index == k):
            raise AssertionError("normal subgroup search produced an invalid subgroup")
    return out


def quotient_kind(G: GroupTable, N: Subgroup) -> str:
    """Name of ``G/N`` when it has order 2, 3 or 6."""
    k = N.index
    if k == 6:
        Q, _ = quotient(G, N)
        return "Z6" if Q.is_abelian else "S3"
    if k in (1, 2, 3):
        return f"Z{k}"
    raise BadQuotient(f"quotient of order {k} not supported")


def is_split_extension(G: GroupTable, N: Subgroup) -> bool:
    """Whether ``1 -> N -> G -> G/N -> 1`` splits, for ``[G:N]`` in {2, 3, 6}."""
    k = N.index
    if k not in (2, 3, 6):
        raise BadQuotient(f"index {k} not in (2, 3, 6)")
    mask = N.mask
    ords = G.element_orders
    if quotient_kind(G, N) != "S3":
        # cyclic quotient: need x of order k with no proper power inside N
        for x in np.flatnonzero((ords == k) & ~mask):
            if all(not mask[G.power(int(x), j)] for j in range(1, k)):
                return True
        return False
    rows = G.rows
    invl = G.inv_list
    threes = np.flatnonzero((ords == 3) & ~mask).tolist()
    twos = np.flatnonzero((ords == 2) & ~mask).tolist()
    for b in threes:
        binv = invl[b]
        for a in twos:
            if rows[rows[a][b]][a] == binv:
                return True
    return False
