"""Named groups, complete small-order catalogs and catalog files.

Catalog file format (UTF-8, ``#`` starts a comment line)::

    group <name> order <n> [id <order>,<index>]
    gen <k> <image of 0> <image of 1> ... <image of k-1>
    ...
    end

Every order that occurs in an imported file is treated as completely
covered by that file.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from . import groups as grp
from .errors import (
    AxiomViolation,
    BadParams,
    IncompleteOrder,
    NotAnAutomorphism,
    NotCentral,
    NotIsomorphism,
    ParseError,
    UnsupportedFamily,
)
from .groups import GroupTable, Subgroup

log = logging.getLogger(__name__)

MAX_POINTS = 10000


# ---------------------------------------------------------------------------
# generic constructions


def group_from_closure(
    gens: Sequence, mul: Callable, identity, key: Callable[[object], Hashable] = lambda x: x,
    name: str | None = None, cap: int = grp.DEFAULT_CAP,
) -> GroupTable:
    """Close abstract generators under ``mul`` and return the right regular
    permutation representation as a :class:`GroupTable`.

    The generator order is preserved, so ``generator_indices`` lines up with
    ``gens``.
    """
    elems = [identity]
    index = {key(identity): 0}
    head = 0
    while head < len(elems):
        x = elems[head]
        for s in gens:
            y = mul(x, s)
            k = key(y)
            if k not in index:
                if len(elems) >= cap:
                    raise BadParams(f"closure exceeds {cap} elements")
                index[k] = len(elems)
                elems.append(y)
        head += 1
    perms = [[index[key(mul(x, s))] for x in elems] for s in gens]
    return grp.from_permutation_generators(perms, cap=cap, name=name)


def _metacyclic(N: int, M: int, u: int, c: int, name: str) -> GroupTable:
    """``<a, x | a^N, x^M = a^c, x a x^-1 = a^u>`` via normal forms ``a^k x^j``."""
    if pow(u, M, N) != 1 % N or (u * c - c) % N:
        raise BadParams("inconsistent metacyclic parameters")

    def mul(p, q):
        k, j = p
        l, i = q
        e = k + pow(u, j, N) * l
        s = j + i
        if s >= M:
            e += c
            s -= M
        return (e % N, s)

    gens = [(1 % N, 0)] + ([(0, 1 % M)] if M > 1 else [])
    return group_from_closure(gens, mul, (0, 0), name=name)


def _perm_mul(p, q):
    """``p`` then ``q``."""
    return tuple(q[i] for i in p)


def _matrix_group_mod(mats, p: int, name: str) -> GroupTable:
    def mul(A, B):
        return tuple(
            tuple(sum(A[i][t] * B[t][j] for t in range(2)) % p for j in range(2)) for i in range(2)
        )

    ident = ((1, 0), (0, 1))
    return group_from_closure([tuple(map(tuple, m)) for m in mats], mul, ident, name=name)


def _quaternion_group(gens, name: str) -> GroupTable:
    """Finite group of unit quaternions with float coordinates (keyed after rounding)."""

    def mul(x, y):
        a1, b1, c1, d1 = x
        a2, b2, c2, d2 = y
        return (
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def key(x):
        return tuple(round(v, 6) + 0.0 for v in x)

    return group_from_closure(gens, mul, (1.0, 0.0, 0.0, 0.0), key=key, name=name)


FAMILIES = (
    "cyclic", "dihedral", "dicyclic", "semidihedral", "M16", "quaternion", "symmetric",
    "alternating", "holomorph_cyclic", "GL23", "SL23", "binary_octahedral",
)


def make_named(family: str, *params: int) -> GroupTable:
    """Build a named group from explicit permutation generators.

    ``dihedral n`` has order ``2n``; ``dicyclic`` and ``semidihedral`` take
    the group order; ``holomorph_cyclic n`` is ``Z_n : Aut(Z_n)``.
    """
    if family not in FAMILIES:
        raise UnsupportedFamily(family)

    def need(k):
        if len(params) != k or any(not isinstance(p, (int, np.integer)) for p in params):
            raise BadParams(f"{family} takes {k} integer parameter(s)")

    if family == "cyclic":
        need(1)
        (n,) = params
        if n < 1:
            raise BadParams("cyclic order must be positive")
        if n == 1:
            return grp.from_permutation_generators([[0]], name="Z1")
        return grp.from_permutation_generators([list(range(1, n)) + [0]], name=f"Z{n}")
    if family == "dihedral":
        need(1)
        (n,) = params
        if n < 1:
            raise BadParams("dihedral parameter must be positive")
        return _metacyclic(n, 2, n - 1, 0, f"D{n}")
    if family in ("dicyclic", "quaternion"):
        if family == "quaternion":
            need(0)
            order = 8
        else:
            need(1)
            (order,) = params
        if order < 8 or order % 4:
            raise BadParams("dicyclic order must be a multiple of 4, at least 8")
        n = order // 4
        return _metacyclic(2 * n, 2, 2 * n - 1, n, "Q8" if order == 8 else f"Dic{order}")
    if family == "semidihedral":
        need(1)
        (order,) = params
        m = order.bit_length() - 1
        if order != 1 << m or m < 4:
            raise BadParams("semidihedral order must be 2^m with m >= 4")
        N = order // 2
        return _metacyclic(N, 2, N // 2 - 1, 0, f"SD{order}")
    if family == "M16":
        need(0)
        return _metacyclic(8, 2, 5, 0, "M16")
    if family in ("symmetric", "alternating"):
        need(1)
        (k,) = params
        if not 1 <= k <= 4:
            raise BadParams("only degrees up to 4 are supported")
        label = ("S" if family == "symmetric" else "A") + str(k)
        if k == 1 or (family == "alternating" and k == 2):
            return grp.from_permutation_generators([[0]], name=label)
        if family == "symmetric":
            gens = [[1, 0] + list(range(2, k)), list(range(1, k)) + [0]]
        elif k == 3:
            gens = [[1, 2, 0]]
        else:
            gens = [[1, 2, 0, 3], [0, 2, 3, 1]]
        return grp.from_permutation_generators(gens, name=label)
    if family == "holomorph_cyclic":
        need(1)
        (n,) = params
        if n < 2:
            raise BadParams("holomorph needs n >= 2")
        units = [u for u in range(1, n) if math.gcd(u, n) == 1]
        gens = [[(x + 1) % n for x in range(n)]]
        gens += [[(u * x) % n for x in range(n)] for u in units if u != 1]
        return grp.from_permutation_generators(gens, name=f"Hol(Z{n})")
    if family == "GL23":
        need(0)
        return _matrix_group_mod([[[1, 1], [0, 1]], [[0, 1], [2, 0]], [[2, 0], [0, 1]]], 3, "GL(2,3)")
    if family == "SL23":
        need(0)
        return _matrix_group_mod([[[1, 1], [0, 1]], [[1, 0], [1, 1]]], 3, "SL(2,3)")
    if family == "binary_octahedral":
        need(0)
        s = 1 / math.sqrt(2)
        return _quaternion_group([(s, s, 0.0, 0.0), (0.5, 0.5, 0.5, 0.5)], "2O")
    raise UnsupportedFamily(family)  # pragma: no cover


def direct_product(G: GroupTable, H: GroupTable, name: str | None = None) -> GroupTable:
    """``G x H`` with ``(a, b)`` stored at ``a*|H| + b``."""
    m = H.order
    A = G.mult.astype(np.int64)
    B = H.mult.astype(np.int64)
    table = (A[:, None, :, None] * m + B[None, :, None, :]).reshape(G.order * m, G.order * m)
    gens = [g * m for g in G.generator_indices] + list(H.generator_indices)
    return grp.from_table(table, [x for x in gens if x] or None, name=name)


def _automorphism_map(N: GroupTable, images) -> np.ndarray:
    arr = np.asarray(images, dtype=np.int64)
    if arr.shape != (N.order,) or sorted(arr.tolist()) != list(range(N.order)):
        raise NotAnAutomorphism("images do not form a bijection")
    if not np.array_equal(arr[N.mult], N.mult[arr[:, None], arr[None, :]]):
        raise NotAnAutomorphism("images do not respect multiplication")
    return arr


def semidirect_product(N: GroupTable, H: GroupTable, action, name: str | None = None) -> GroupTable:
    """``N : H`` where ``action`` maps each generator of ``H`` to an automorphism
    of ``N`` (an image array).

    ``action`` may be a dict keyed by generator index or a sequence aligned
    with ``H.generator_indices``. The element ``(n, h)`` is stored at
    ``n*|H| + h`` and ``(n1,h1)(n2,h2) = (n1 phi_h1(n2), h1 h2)``.
    """
    gens = list(H.generator_indices) or grp.small_generating_set(H)
    if isinstance(action, dict):
        auts = {int(s): _automorphism_map(N, action[s]) for s in gens}
    else:
        action = list(action)
        if len(action) != len(gens):
            raise NotAnAutomorphism("need one automorphism per generator")
        auts = {s: _automorphism_map(N, a) for s, a in zip(gens, action)}
    # extend to a homomorphism H -> Aut(N) with phi_{xs} = phi_x o phi_s
    phi: dict[int, np.ndarray] = {0: np.arange(N.order)}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = H.mul(x, s)
                img = phi[x][auts[s]]
                if y in phi:
                    if not np.array_equal(phi[y], img):
                        raise NotAnAutomorphism("generator images do not define an action of H")
                else:
                    phi[y] = img
                    nxt.append(y)
        frontier = nxt
    if len(phi) != H.order:
        raise NotAnAutomorphism("generators do not generate H")
    m = H.order
    P = np.stack([phi[h] for h in range(m)])  # P[h, n] = phi_h(n)
    n_idx = np.arange(N.order)
    h_idx = np.arange(m)
    n1 = n_idx[:, None, None, None]
    h1 = h_idx[None, :, None, None]
    n2 = n_idx[None, None, :, None]
    h2 = h_idx[None, None, None, :]
    prod_n = N.mult[n1, P[h1, n2]]
    prod_h = H.mult[h1, h2]
    table = (prod_n * m + prod_h).reshape(N.order * m, N.order * m)
    gen_list = [g * m for g in N.generator_indices] + list(gens)
    return grp.from_table(table, [x for x in gen_list if x] or None, name=name)


def central_product(G1: GroupTable, G2: GroupTable, U1: Sequence[int], phi: dict[int, int],
                    name: str | None = None) -> GroupTable:
    """``(G1 x G2) / {(u, phi(u)^-1)}`` for central ``U1 <= G1`` and
    ``phi: U1 -> U2`` an isomorphism onto a central subgroup of ``G2``."""
    U1 = sorted(set(int(u) for u in U1))
    Z1 = set(grp.center(G1).members)
    Z2 = set(grp.center(G2).members)
    if not set(U1) <= Z1:
        raise NotCentral("U1 is not central in G1")
    if not Subgroup(G1, U1).is_subgroup():
        raise NotCentral("U1 is not a subgroup")
    if sorted(phi) != U1:
        raise NotIsomorphism("phi must be defined exactly on U1")
    U2 = sorted(set(phi.values()))
    if not set(U2) <= Z2:
        raise NotCentral("image of phi is not central in G2")
    if len(U2) != len(U1) or any(phi[G1.mul(a, b)] != G2.mul(phi[a], phi[b]) for a in U1 for b in U1):
        raise NotIsomorphism("phi is not an isomorphism")
    D = direct_product(G1, G2)
    m = G2.order
    K = Subgroup(D, [u * m + G2.inv_list[phi[u]] for u in U1])
    Q, _ = grp.quotient(D, K)
    if name:
        Q.name = name
    return Q


# ---------------------------------------------------------------------------
# catalogs


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    order: int
    group: GroupTable
    external_id: tuple[int, int] | None = None

    def id_string(self) -> str:
        return f"<{self.external_id[0]},{self.external_id[1]}>" if self.external_id else "-"


class Catalog:
    def __init__(self):
        self.entries: dict[int, list[CatalogEntry]] = {}
        self.complete_orders: set[int] = set()

    def add(self, entry: CatalogEntry) -> bool:
        """Add unless an isomorphic entry of the same order exists."""
        bucket = self.entries.setdefault(entry.order, [])
        for other in bucket:
            if grp.isomorphism(entry.group, other.group) is not None:
                log.warning("duplicate group %s is isomorphic to %s; skipped", entry.name, other.name)
                return False
        names = {e.name for o in self.entries.values() for e in o}
        name = entry.name
        k = 2
        while name in names:
            name = f"{entry.name}#{k}"
            k += 1
        if name != entry.name:
            entry = CatalogEntry(name, entry.order, entry.group, entry.external_id)
        bucket.append(entry)
        return True

    def orders(self) -> list[int]:
        return sorted(self.entries)

    def covers(self, n: int) -> bool:
        return n in self.complete_orders

    def complete(self, n: int) -> list[CatalogEntry]:
        if n not in self.complete_orders:
            raise IncompleteOrder(n)
        return list(self.entries.get(n, []))

    def identify(self, G: GroupTable) -> CatalogEntry | None:
        fp = grp.fingerprint(G)
        for e in self.entries.get(G.order, []):
            if grp.fingerprint(e.group) == fp and grp.isomorphism(G, e.group) is not None:
                return e
        return None

    def find(self, name: str) -> CatalogEntry | None:
        for bucket in self.entries.values():
            for e in bucket:
                if e.name == name:
                    return e
        return None


def _z(n):
    return make_named("cyclic", n)


def _builtin_specs() -> dict[int, list[tuple[str, tuple[int, int], Callable[[], GroupTable]]]]:
    """Groups of orders 1-16 and 27 with their small-group identifiers."""
    Z = _z
    dp = direct_product

    def z2z4_semi():
        # <a, b, c | a^4 = b^2 = c^2 = 1, [a, c] = [b, c] = 1, b a b = a c>
        N = dp(Z(2), Z(2))  # elements 2*i + j: (i, j)
        # Z4 acts by swapping the two factors' generators (i, j) -> (j, i)
        swap = [2 * (x % 2) + x // 2 for x in range(4)]
        return semidirect_product(N, Z(4), [swap])

    def z4z4_semi():
        inv4 = [(-x) % 4 for x in range(4)]
        return semidirect_product(Z(4), Z(4), [inv4])

    def d4_central_z4():
        D4 = make_named("dihedral", 4)
        z = grp.center(D4).members[1]
        Z4 = Z(4)
        return central_product(D4, Z4, [0, z], {0: 0, z: Z4.power(Z4.generator_indices[0], 2)})

    def heisenberg27():
        N = dp(Z(3), Z(3))  # 3*i + j
        # (i, j) -> (i + j, j)
        shear = [3 * ((x // 3 + x % 3) % 3) + x % 3 for x in range(9)]
        return semidirect_product(N, Z(3), [shear])

    return {
        1: [("Z1", (1, 1), lambda: Z(1))],
        2: [("Z2", (2, 1), lambda: Z(2))],
        3: [("Z3", (3, 1), lambda: Z(3))],
        4: [("Z4", (4, 1), lambda: Z(4)), ("Z2^2", (4, 2), lambda: dp(Z(2), Z(2)))],
        5: [("Z5", (5, 1), lambda: Z(5))],
        6: [("S3", (6, 1), lambda: make_named("symmetric", 3)), ("Z6", (6, 2), lambda: Z(6))],
        7: [("Z7", (7, 1), lambda: Z(7))],
        8: [
            ("Z8", (8, 1), lambda: Z(8)),
            ("Z4xZ2", (8, 2), lambda: dp(Z(4), Z(2))),
            ("D4", (8, 3), lambda: make_named("dihedral", 4)),
            ("Q8", (8, 4), lambda: make_named("quaternion")),
            ("Z2^3", (8, 5), lambda: dp(dp(Z(2), Z(2)), Z(2))),
        ],
        9: [("Z9", (9, 1), lambda: Z(9)), ("Z3^2", (9, 2), lambda: dp(Z(3), Z(3)))],
        10: [("D5", (10, 1), lambda: make_named("dihedral", 5)), ("Z10", (10, 2), lambda: Z(10))],
        11: [("Z11", (11, 1), lambda: Z(11))],
        12: [
            ("Dic12", (12, 1), lambda: make_named("dicyclic", 12)),
            ("Z12", (12, 2), lambda: Z(12)),
            ("A4", (12, 3), lambda: make_named("alternating", 4)),
            ("D6", (12, 4), lambda: make_named("dihedral", 6)),
            ("Z3xZ2^2", (12, 5), lambda: dp(Z(3), dp(Z(2), Z(2)))),
        ],
        13: [("Z13", (13, 1), lambda: Z(13))],
        14: [("D7", (14, 1), lambda: make_named("dihedral", 7)), ("Z14", (14, 2), lambda: Z(14))],
        15: [("Z15", (15, 1), lambda: Z(15))],
        16: [
            ("Z16", (16, 1), lambda: Z(16)),
            ("Z4^2", (16, 2), lambda: dp(Z(4), Z(4))),
            ("Z2^2:Z4", (16, 3), z2z4_semi),
            ("Z4:Z4", (16, 4), z4z4_semi),
            ("Z8xZ2", (16, 5), lambda: dp(Z(8), Z(2))),
            ("M16", (16, 6), lambda: make_named("M16")),
            ("D8", (16, 7), lambda: make_named("dihedral", 8)),
            ("SD16", (16, 8), lambda: make_named("semidihedral", 16)),
            ("Dic16", (16, 9), lambda: make_named("dicyclic", 16)),
            ("Z2^2xZ4", (16, 10), lambda: dp(dp(Z(2), Z(2)), Z(4))),
            ("D4xZ2", (16, 11), lambda: dp(make_named("dihedral", 4), Z(2))),
            ("Q8xZ2", (16, 12), lambda: dp(make_named("quaternion"), Z(2))),
            ("D4*Z4", (16, 13), d4_central_z4),
            ("Z2^4", (16, 14), lambda: dp(dp(Z(2), Z(2)), dp(Z(2), Z(2)))),
        ],
        27: [
            ("Z27", (27, 1), lambda: Z(27)),
            ("Z9xZ3", (27, 2), lambda: dp(Z(9), Z(3))),
            ("Z3^2:Z3", (27, 3), heisenberg27),
            ("Z9:Z3", (27, 4), lambda: _metacyclic(9, 3, 4, 0, "Z9:Z3")),
            ("Z3^3", (27, 5), lambda: dp(dp(Z(3), Z(3)), Z(3))),
        ],
    }


def _named_specs() -> list[tuple[str, tuple[int, int], Callable[[], GroupTable]]]:
    """Named groups of order > 16 that are determined by their name up to
    isomorphism.  These orders are not marked complete."""
    Z = _z
    dp = direct_product
    named = make_named

    def z3_d4():
        # the rotation inverts Z3, so the kernel is a Klein four-group;
        # the kernel Z4 gives D12 instead
        D4 = named("dihedral", 4)
        inv = [0, 2, 1]
        images = [inv if D4.element_orders[g] == 4 else list(range(3)) for g in D4.generator_indices]
        return semidirect_product(Z(3), D4, images)

    def z2sq_z8():
        swap = [2 * (x % 2) + x // 2 for x in range(4)]
        return semidirect_product(dp(Z(2), Z(2)), Z(8), [swap])

    def z4_z8():
        return semidirect_product(Z(4), Z(8), [[(-x) % 4 for x in range(4)]])

    def d8_central_z4():
        D8 = named("dihedral", 8)
        z = grp.center(D8).members[1]
        Z4 = Z(4)
        return central_product(D8, Z4, [0, z], {0: 0, z: Z4.power(Z4.generator_indices[0], 2)})

    return [
        ("Dic20", (20, 1), lambda: named("dicyclic", 20)),
        ("Z20", (20, 2), lambda: Z(20)),
        ("Hol(Z5)", (20, 3), lambda: named("holomorph_cyclic", 5)),
        ("D10", (20, 4), lambda: named("dihedral", 10)),
        ("Z2^2xZ5", (20, 5), lambda: dp(dp(Z(2), Z(2)), Z(5))),
        ("SL(2,3)", (24, 3), lambda: named("SL23")),
        ("Dic24", (24, 4), lambda: named("dicyclic", 24)),
        ("S3xZ4", (24, 5), lambda: dp(named("symmetric", 3), Z(4))),
        ("D12", (24, 6), lambda: named("dihedral", 12)),
        ("Dic12xZ2", (24, 7), lambda: dp(named("dicyclic", 12), Z(2))),
        ("Z3:D4", (24, 8), z3_d4),
        ("Z6xZ4", (24, 9), lambda: dp(Z(6), Z(4))),
        ("D4xZ3", (24, 10), lambda: dp(named("dihedral", 4), Z(3))),
        ("S4", (24, 12), lambda: named("symmetric", 4)),
        ("D6xZ2", (24, 14), lambda: dp(named("dihedral", 6), Z(2))),
        ("Z2^3xZ3", (24, 15), lambda: dp(dp(dp(Z(2), Z(2)), Z(2)), Z(3))),
        ("Z2^2:Z8", (32, 5), z2sq_z8),
        ("Z4:Z8", (32, 12), z4_z8),
        ("D4xZ4", (32, 25), lambda: dp(named("dihedral", 4), Z(4))),
        ("SD16xZ2", (32, 40), lambda: dp(named("semidihedral", 16), Z(2))),
        ("D8*Z4", (32, 42), d8_central_z4),
        ("Hol(Z8)", (32, 43), lambda: named("holomorph_cyclic", 8)),
        ("2O", (48, 28), lambda: named("binary_octahedral")),
        ("GL(2,3)", (48, 29), lambda: named("GL23")),
        ("SL(2,3)xZ2", (48, 32), lambda: dp(named("SL23"), Z(2))),
        ("D4xS3", (48, 38), lambda: dp(named("dihedral", 4), named("symmetric", 3))),
        ("S4xZ4", (96, 186), lambda: dp(named("symmetric", 4), Z(4))),
        ("GL(2,3)xZ2", (96, 189), lambda: dp(named("GL23"), Z(2))),
    ]


BUILTIN_COUNTS = {1: 1, 2: 1, 3: 1, 4: 2, 5: 1, 6: 2, 7: 1, 8: 5, 9: 2, 10: 2, 11: 1, 12: 5,
                  13: 1, 14: 2, 15: 1, 16: 14, 27: 5}


def builtin_catalog(verify: bool = True) -> Catalog:
    cat = Catalog()
    for n, specs in _builtin_specs().items():
        for name, ext, build in specs:
            G = build()
            G.name = name
            if G.order != n:
                raise AxiomViolation(f"{name} has order {G.order}, expected {n}")
            entry = CatalogEntry(name, n, G, ext)
            if verify:
                if not cat.add(entry):
                    raise AxiomViolation(f"built-in {name} duplicates another group")
            else:
                cat.entries.setdefault(n, []).append(entry)
        if len(cat.entries[n]) != BUILTIN_COUNTS[n]:
            raise AxiomViolation(f"order {n}: expected {BUILTIN_COUNTS[n]} groups")
        cat.complete_orders.add(n)
    for name, ext, build in _named_specs():
        G = build()
        G.name = name
        if G.order != ext[0]:
            raise AxiomViolation(f"{name} has order {G.order}, expected {ext[0]}")
        entry = CatalogEntry(name, ext[0], G, ext)
        if verify:
            if not cat.add(entry):
                raise AxiomViolation(f"built-in {name} duplicates another group")
        else:
            cat.entries.setdefault(ext[0], []).append(entry)
    return cat


_DEFAULT: Catalog | None = None


def default_catalog() -> Catalog:
    """The shared catalog: built-ins plus anything found in ``TRIFOLD_CATALOG_DIR``."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = builtin_catalog()
        env = os.environ.get("TRIFOLD_CATALOG_DIR")
        if env and Path(env).is_dir():
            for path in sorted(Path(env).glob("*.txt")):
                import_catalog(path, _DEFAULT)
    return _DEFAULT


def complete_catalog(n: int, catalog: Catalog | None = None) -> list[CatalogEntry]:
    return (catalog or default_catalog()).complete(n)


def identify(G: GroupTable, catalog: Catalog | None = None) -> CatalogEntry | None:
    return (catalog or default_catalog()).identify(G)


# ---------------------------------------------------------------------------
# catalog files


@dataclass
class GroupRecord:
    name: str
    order: int
    external_id: tuple[int, int] | None
    gens: list[list[int]]
    line: int


def parse_group_records(lines: Iterable[str], stop_words: tuple[str, ...] = ()) -> tuple[list[GroupRecord], list[tuple[int, list[str]]]]:
    """Parse ``group ... end`` blocks; other lines whose first word is in
    ``stop_words`` are returned untouched with their line numbers."""
    records: list[GroupRecord] = []
    extra: list[tuple[int, list[str]]] = []
    cur: GroupRecord | None = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        words = line.split()
        head = words[0]
        if head == "group":
            if cur is not None:
                raise ParseError("nested group record", lineno)
            if len(words) not in (4, 6) or words[2] != "order":
                raise ParseError("expected 'group <name> order <n> [id <order>,<index>]'", lineno)
            try:
                n = int(words[3])
            except ValueError:
                raise ParseError("order is not an integer", lineno) from None
            ext = None
            if len(words) == 6:
                if words[4] != "id":
                    raise ParseError("expected 'id'", lineno)
                try:
                    a, b = (int(t) for t in words[5].split(","))
                except ValueError:
                    raise ParseError("malformed id", lineno) from None
                ext = (a, b)
            cur = GroupRecord(words[1], n, ext, [], lineno)
        elif head == "gen":
            if cur is None:
                raise ParseError("'gen' outside a group record", lineno)
            try:
                k = int(words[1])
                img = [int(t) for t in words[2:]]
            except (ValueError, IndexError):
                raise ParseError("malformed generator", lineno) from None
            if not 1 <= k <= MAX_POINTS or len(img) != k:
                raise ParseError(f"generator must list exactly {k} images (k <= {MAX_POINTS})", lineno)
            if sorted(img) != list(range(k)):
                raise ParseError("generator is not a permutation", lineno)
            cur.gens.append(img)
        elif head == "end":
            if cur is None:
                raise ParseError("'end' without a group record", lineno)
            if not cur.gens:
                raise ParseError("group record without generators", lineno)
            records.append(cur)
            cur = None
        elif head in stop_words:
            extra.append((lineno, words))
        else:
            raise ParseError(f"unknown record {head!r}", lineno)
    if cur is not None:
        raise ParseError("unterminated group record", cur.line)
    return records, extra


def build_record(rec: GroupRecord) -> GroupTable:
    try:
        G = grp.from_permutation_generators(rec.gens, cap=max(rec.order, 1) + 1, name=rec.name)
    except grp.OrderExceedsCap:
        raise AxiomViolation(f"{rec.name}: generators produce a group larger than {rec.order}") from None
    if G.order != rec.order:
        raise AxiomViolation(f"{rec.name}: generators produce order {G.order}, declared {rec.order}")
    if not G.check_associative(sample=None if G.order <= 64 else 20000):
        raise AxiomViolation(f"{rec.name}: multiplication is not associative")
    return G


def import_catalog(path, catalog: Catalog | None = None) -> int:
    """Load a catalog file; returns the number of new entries."""
    catalog = catalog or default_catalog()
    with open(path, encoding="utf-8") as fh:
        records, _ = parse_group_records(fh)
    added = 0
    for rec in records:
        G = build_record(rec)
        if catalog.add(CatalogEntry(rec.name, rec.order, G, rec.external_id)):
            added += 1
    for rec in records:
        catalog.complete_orders.add(rec.order)
    return added


def regular_generators(G: GroupTable) -> list[list[int]]:
    """Right-regular permutations of a small generating set."""
    gens = grp.small_generating_set(G) or [0]
    return [G.mult[:, g].tolist() for g in gens]


def group_record_lines(name: str, G: GroupTable, external_id=None) -> list[str]:
    head = f"group {name} order {G.order}"
    if external_id:
        head += f" id {external_id[0]},{external_id[1]}"
    lines = [head]
    for p in regular_generators(G):
        lines.append(f"gen {len(p)} " + " ".join(map(str, p)))
    lines.append("end")
    return lines


def export_catalog(orders: Iterable[int], path, catalog: Catalog | None = None) -> int:
    catalog = catalog or default_catalog()
    lines = ["# group catalog"]
    count = 0
    for n in sorted(set(orders)):
        for e in catalog.complete(n):
            lines += group_record_lines(e.name, e.group, e.external_id)
            count += 1
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return count
