"""Hodge numbers of quotients ``(C1 x C2 x C3)/G`` of a free action.

``h^{p,q}`` is the average over ``G`` of the character of ``G`` on
``H^{p,q}`` of the product. On the diagonal subgroup that character is a
polynomial in the three Chevalley-Weil characters (Kuenneth). Elements that
permute the factors only see the invariant summands, which gives the short
list of values in :func:`chi_pq_outside`.

All sums are carried out exactly in the group ring ``Z[x]/(x^E - 1)`` with
``E = exp(G)``. A result that is not a rational integer aborts with
:class:`NonIntegralAverage`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import groups as grp
from .characters import ClassFunction, ring_conj, ring_mul
from .cyclotomic import Cyclotomic, reduce_ring
from .errors import BadParams, ElementInDiagonal, GroupMismatch, NonIntegralAverage
from .groups import GroupTable, Subgroup
from .riemann import GeneratingVector, chevalley_weil_ring

PQ = ((1, 0), (1, 1), (2, 0), (2, 1), (3, 0))


@dataclass(frozen=True)
class HodgeDiamond:
    h30: int
    h20: int
    h10: int
    h11: int
    h12: int

    def __post_init__(self):
        if min(self.as_tuple()) < 0:
            raise ValueError(f"negative Hodge number in {self.as_tuple()}")

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.h30, self.h20, self.h10, self.h11, self.h12)

    @property
    def chi(self) -> int:
        """``chi(O_X) = 1 - h10 + h20 - h30``."""
        return 1 - self.h10 + self.h20 - self.h30

    @property
    def betti(self) -> tuple[int, ...]:
        b1 = 2 * self.h10
        b2 = 2 * self.h20 + self.h11
        b3 = 2 * (self.h30 + self.h12)
        return (1, b1, b2, b3, b2, b1, 1)

    @property
    def euler(self) -> int:
        return sum((-1) ** i * b for i, b in enumerate(self.betti))

    def consistent(self) -> bool:
        """Euler number equals ``8 chi``, as for any threefold isogenous to a product."""
        return self.euler == 8 * self.chi

    def __str__(self):
        return "({},{},{},{},{})".format(*self.as_tuple())


# ---------------------------------------------------------------------------
# curve actions: a vector on G_i/K_i plus the map from G_i


@dataclass(frozen=True, eq=False)
class CurveAction:
    """The action of ``G_i <= G`` on one curve.

    ``vector`` is a generating vector of the effective quotient ``G_i/K_i``;
    ``proj[x]`` is the image of ``x in G`` in that quotient, or ``-1`` when
    ``x`` is not in ``G_i``.
    """

    vector: GeneratingVector
    proj: np.ndarray

    @property
    def quotient(self) -> GroupTable:
        return self.vector.group

    @property
    def domain_mask(self) -> np.ndarray:
        return self.proj >= 0

    @property
    def kernel_members(self) -> tuple[int, ...]:
        return tuple(int(x) for x in np.flatnonzero(self.proj == 0))

    @property
    def genus(self) -> int:
        return self.vector.genus


def factor_group(G: GroupTable, domain: Subgroup, kernel: Subgroup | None = None) -> tuple[GroupTable, np.ndarray]:
    """``domain/kernel`` as a table, with the projection written on indices of ``G``."""
    if domain.parent is not G:
        raise GroupMismatch("domain is not a subgroup of G")
    if domain.order == G.order and (kernel is None or kernel.order == 1):
        proj = np.arange(G.order, dtype=np.int64)
        proj.setflags(write=False)
        return G, proj
    H, emb = grp.subgroup_table(G, domain)
    pos = np.full(G.order, -1, dtype=np.int64)
    pos[list(emb.images)] = np.arange(H.order)
    if kernel is None or kernel.order == 1:
        Q, proj_h = H, np.arange(H.order)
    else:
        if kernel.parent is not G or not set(kernel.members) <= set(domain.members):
            raise GroupMismatch("kernel is not inside the domain")
        K = Subgroup(H, [int(pos[k]) for k in kernel.members])
        Q, pr = grp.quotient(H, K)
        proj_h = pr.array
    proj = np.full(G.order, -1, dtype=np.int64)
    proj[list(emb.images)] = proj_h
    proj.setflags(write=False)
    return Q, proj


def curve_action(vector: GeneratingVector, proj: np.ndarray) -> CurveAction:
    proj = np.asarray(proj, dtype=np.int64)
    if not vector.is_valid():
        raise BadParams(f"{vector!r} is not a generating vector")
    return CurveAction(vector, proj)


# ---------------------------------------------------------------------------
# element-wise ring arrays


def _lift(rows: np.ndarray, E: int) -> np.ndarray:
    """Re-embed Z[x]/(x^e - 1) into Z[x]/(x^E - 1) for ``e | E``."""
    e = rows.shape[-1]
    if E % e:
        raise GroupMismatch(f"exponent {e} does not divide {E}")
    out = np.zeros(rows.shape[:-1] + (E,), dtype=np.int64)
    out[..., :: E // e] = rows
    return out


def _mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    bound = float(np.abs(a).sum(axis=-1).max(initial=0)) * float(np.abs(b).max(initial=0))
    if bound >= 2.0**62:
        raise OverflowError("group-ring product would overflow int64")
    return ring_mul(a, b)


def character_array(G: GroupTable, action: CurveAction) -> np.ndarray:
    """Chevalley-Weil character of ``action`` at every element of ``G``.

    Shape ``(|G|, exp G)``; rows off the domain ``G_i`` are zero. Kernels are
    handled by inflation from the quotient.
    """
    Q = action.quotient
    V = action.vector
    rows = _lift(chevalley_weil_ring(Q, V.type, V.elliptic), G.exponent)
    cls = grp.class_index(Q)
    out = np.zeros((G.order, G.exponent), dtype=np.int64)
    mask = action.domain_mask
    out[mask] = rows[cls[action.proj[mask]]]
    return out


def _one(shape0: int, E: int) -> np.ndarray:
    out = np.zeros((shape0, E), dtype=np.int64)
    out[:, 0] = 1
    return out


def _diagonal_arrays(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> dict[tuple[int, int], np.ndarray]:
    ac, bc, cc = ring_conj(a), ring_conj(b), ring_conj(c)
    s = a + b + c
    cross = _mul(a, bc) + _mul(a, cc) + _mul(b, cc)
    ab = _mul(a, b)
    return {
        (1, 0): s,
        (1, 1): cross + ring_conj(cross) + 3 * _one(len(a), a.shape[-1]),
        (2, 0): ab + _mul(a, c) + _mul(b, c),
        (2, 1): _mul(_mul(ac, b), c) + _mul(_mul(a, bc), c) + _mul(ab, cc) + 2 * s,
        (3, 0): _mul(ab, c),
    }


def chi_pq_on_diagonal(chi1: ClassFunction, chi2: ClassFunction, chi3: ClassFunction, pq) -> ClassFunction:
    """Character on ``H^{p,q}`` of the product, restricted to the diagonal subgroup."""
    pq = tuple(pq)
    if pq not in PQ:
        raise BadParams(f"(p,q) must be one of {PQ}")
    H = chi1.group
    if chi2.group is not H or chi3.group is not H:
        raise GroupMismatch("the three characters live on different groups")
    a, b, c = chi1, chi2, chi3
    s = a + b + c
    if pq == (1, 0):
        return s
    if pq == (1, 1):
        cross = a * b.conj() + a * c.conj() + b * c.conj()
        return cross + cross.conj() + ClassFunction.trivial(H) * 3
    if pq == (2, 0):
        return a * b + a * c + b * c
    if pq == (2, 1):
        return a.conj() * b * c + a * b.conj() * c + a * b * c.conj() + s * 2
    return a * b * c


def chi_pq_outside(kind: str, pq, chi1: ClassFunction, element: int, G0: Subgroup,
                   chi2: ClassFunction | None = None, embed1=None, embed2=None) -> Cyclotomic:
    """Value of ``chi_{p,q}`` at an element of ``G`` outside the diagonal subgroup.

    ``kind`` is ``"delta"`` (index two, ``chi1`` on G, ``chi2`` on G0),
    ``"tau"`` (a 3-cycle coset, ``chi1`` on G0 or G1) or ``"f"`` (index six,
    ``f in G1 - G0``; ``chi2`` is ``x -> chi1(tau x tau^-1)`` on G0).
    ``embed1``/``embed2`` map elements of G to the groups of ``chi1``/``chi2``
    (identity when omitted).
    """
    pq = tuple(pq)
    if pq not in PQ:
        raise BadParams(f"(p,q) must be one of {PQ}")
    G = G0.parent
    if element in G0:
        raise ElementInDiagonal(f"element {element} lies in the diagonal subgroup")
    e1 = embed1 or (lambda x: x)
    e2 = embed2 or (lambda x: x)
    if kind == "tau":
        if pq != (3, 0):
            return Cyclotomic.rational(0)
        return chi1(e1(G.power(element, 3)))
    if kind not in ("delta", "f"):
        raise BadParams(f"unknown coset kind {kind!r}")
    if chi2 is None:
        raise BadParams("the transposition rows need chi2")
    x = chi1(e1(element))
    y = chi2(e2(G.mul(element, element)))
    return {
        (1, 0): x,
        (1, 1): Cyclotomic.rational(1),
        (2, 0): -y,
        (2, 1): -(x.conj() * y),
        (3, 0): -(x * y),
    }[pq]


# ---------------------------------------------------------------------------
# the diamond


def _conj_index(G: GroupTable, t: int) -> np.ndarray:
    """``x -> t x t^-1`` as an index array."""
    return G.mult[G.mult[t], G.inv[t]]


def _average(G: GroupTable, total: np.ndarray, what: str) -> int:
    coords = reduce_ring([int(v) for v in total], len(total))
    if any(coords[1:]):
        raise NonIntegralAverage(f"{what}: character sum is not rational ({coords})")
    s = int(coords[0])
    if s % G.order:
        raise NonIntegralAverage(f"{what}: sum {s} not divisible by |G| = {G.order}")
    return s // G.order


def _diamond_from_sums(G: GroupTable, sums: dict) -> HodgeDiamond:
    h = {pq: _average(G, sums[pq], f"h{pq[0]}{pq[1]}") for pq in PQ}
    return HodgeDiamond(h[(3, 0)], h[(2, 0)], h[(1, 0)], h[(1, 1)], h[(2, 1)])


def sums_unmixed(G: GroupTable, actions) -> dict:
    a, b, c = (character_array(G, act) for act in actions)
    diag = _diagonal_arrays(a, b, c)
    return {pq: diag[pq].sum(axis=0) for pq in PQ}


def diamond_unmixed(G: GroupTable, actions) -> HodgeDiamond:
    """Diamond of ``(C1 x C2 x C3)/G`` for a diagonal action."""
    return _diamond_from_sums(G, sums_unmixed(G, actions))


def sums_index2(G: GroupTable, G0: Subgroup, delta: int, act1: CurveAction, act2: CurveAction) -> dict:
    """``act1`` lives on ``G``, ``act2`` on ``G0``; the third factor is ``act2`` twisted by ``delta``."""
    m0 = G0.mask
    if m0[delta]:
        raise ElementInDiagonal("delta must lie outside the diagonal subgroup")
    A = character_array(G, act1)
    B = character_array(G, act2)
    C = B[_conj_index(G, delta)]
    d = _diagonal_arrays(A[m0], B[m0], C[m0])
    sums = {pq: d[pq].sum(axis=0) for pq in PQ}
    out = ~m0
    sq = G.mult[np.arange(G.order), np.arange(G.order)][out]
    x, y = A[out], B[sq]
    xy = _mul(x, y)
    sums[(1, 0)] = sums[(1, 0)] + x.sum(axis=0)
    sums[(1, 1)] = sums[(1, 1)] + _one(1, G.exponent)[0] * int(out.sum())
    sums[(2, 0)] = sums[(2, 0)] - y.sum(axis=0)
    sums[(2, 1)] = sums[(2, 1)] - _mul(ring_conj(x), y).sum(axis=0)
    sums[(3, 0)] = sums[(3, 0)] - xy.sum(axis=0)
    return sums


def diamond_index2(G: GroupTable, G0: Subgroup, delta: int, act1: CurveAction, act2: CurveAction) -> HodgeDiamond:
    return _diamond_from_sums(G, sums_index2(G, G0, delta, act1, act2))


def sums_index3(G: GroupTable, G0: Subgroup, tau: int, act1: CurveAction) -> dict:
    """``act1`` lives on ``G0``; the other factors are its twists by ``tau`` and ``tau^2``."""
    m0 = G0.mask
    if m0[tau]:
        raise ElementInDiagonal("tau must lie outside the diagonal subgroup")
    A = character_array(G, act1)
    B = A[_conj_index(G, tau)]
    C = A[_conj_index(G, G.mul(tau, tau))]
    d = _diagonal_arrays(A[m0], B[m0], C[m0])
    sums = {pq: d[pq].sum(axis=0) for pq in PQ}
    cubes = G.power_map(3)[~m0]
    sums[(3, 0)] = sums[(3, 0)] + A[cubes].sum(axis=0)
    return sums


def diamond_index3(G: GroupTable, G0: Subgroup, tau: int, act1: CurveAction) -> HodgeDiamond:
    return _diamond_from_sums(G, sums_index3(G, G0, tau, act1))


def sums_index6(G: GroupTable, G0: Subgroup, tau: int, h_elt: int, act1: CurveAction) -> dict:
    """``act1`` lives on ``G1 = <h, G0>``."""
    m0 = G0.mask
    if m0[tau] or m0[h_elt]:
        raise ElementInDiagonal("tau and h must lie outside the diagonal subgroup")
    m1 = act1.domain_mask
    A = character_array(G, act1)
    ct = _conj_index(G, tau)
    ct2 = _conj_index(G, G.mul(tau, tau))
    B = A[ct]
    C = A[ct2]
    d = _diagonal_arrays(A[m0], B[m0], C[m0])
    sums = {pq: d[pq].sum(axis=0) for pq in PQ}
    sq = G.power_map(2)
    cube = G.power_map(3)
    E = G.exponent
    three_cycles = np.flatnonzero(~m0 & ~m0[sq])  # x^2 not in G0 <=> image of order 3
    sums[(3, 0)] = sums[(3, 0)] + A[cube[three_cycles]].sum(axis=0)
    for x in range(G.order):
        if m0[x] or not m0[sq[x]]:
            continue
        # a transposition: move it into G1 by conjugating with a power of tau
        f = x
        if not m1[f]:
            f = int(ct[x])
            if not m1[f]:
                f = int(ct2[x])
        xf = A[f][None, :]
        yf = A[ct[sq[f]]][None, :]
        sums[(1, 0)] = sums[(1, 0)] + xf[0]
        sums[(1, 1)] = sums[(1, 1)] + _one(1, E)[0]
        sums[(2, 0)] = sums[(2, 0)] - yf[0]
        sums[(2, 1)] = sums[(2, 1)] - _mul(ring_conj(xf), yf)[0]
        sums[(3, 0)] = sums[(3, 0)] - _mul(xf, yf)[0]
    return sums


def diamond_index6(G: GroupTable, G0: Subgroup, tau: int, h_elt: int, act1: CurveAction) -> HodgeDiamond:
    return _diamond_from_sums(G, sums_index6(G, G0, tau, h_elt, act1))


def hodge_sums(datum) -> dict:
    """Un-normalized character sums ``sum_g chi_pq(g)`` as group-ring vectors
    of length ``exp(G)``; defined whether or not the action is free."""
    case = datum.case
    if case == "index2":
        return sums_index2(datum.G, datum.G0, datum.delta, datum.actions[0], datum.actions[1])
    if case == "index3":
        return sums_index3(datum.G, datum.G0, datum.tau, datum.actions[0])
    if case == "index6":
        return sums_index6(datum.G, datum.G0, datum.tau, datum.h_elt, datum.actions[0])
    if case == "unmixed":
        return sums_unmixed(datum.G, datum.actions)
    raise BadParams(f"unknown case {case!r}")


def hodge_diamond(datum) -> HodgeDiamond:
    """Diamond of the threefold attached to an algebraic datum (see :mod:`trifold.pipeline`)."""
    case = datum.case
    if case == "index2":
        return diamond_index2(datum.G, datum.G0, datum.delta, datum.actions[0], datum.actions[1])
    if case == "index3":
        return diamond_index3(datum.G, datum.G0, datum.tau, datum.actions[0])
    if case == "index6":
        return diamond_index6(datum.G, datum.G0, datum.tau, datum.h_elt, datum.actions[0])
    if case == "unmixed":
        return diamond_unmixed(datum.G, datum.actions)
    raise BadParams(f"unknown case {case!r}")


def expected_chi(G: GroupTable, genera) -> int:
    g1, g2, g3 = genera
    num = -(g1 - 1) * (g2 - 1) * (g3 - 1)
    if num % G.order:
        raise NonIntegralAverage("(g1-1)(g2-1)(g3-1) not divisible by |G|")
    return num // G.order


__all__ = [
    "HodgeDiamond", "CurveAction", "factor_group", "curve_action", "character_array",
    "chi_pq_on_diagonal", "chi_pq_outside", "hodge_diamond", "diamond_index2", "diamond_index3",
    "diamond_index6", "diamond_unmixed", "expected_chi", "hodge_sums",
]
