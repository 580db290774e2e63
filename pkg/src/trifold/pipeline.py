"""Search for algebraic data realizing admissible numerical data.

For every admissible numerical datum we run two steps:

* Step 1 is an existence filter on groups ``H`` of order ``n/2`` or
  ``n/3``. An order whose filter leaves nothing needs no groups of order
  ``n`` at all.
* Step 2 runs over the groups ``G`` of order ``n`` and the relevant normal
  subgroups ``G0``. It enumerates generating vectors up to signature, tests
  freeness, computes the Hodge diamond and aggregates rows.

Orders that need groups missing from the catalog are reported through
:class:`~trifold.errors.UnresolvedOrders` instead of being dropped.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import groups as grp
from .catalog import Catalog, CatalogEntry, default_catalog
from .errors import BadCoset, BadParams, BadShape, NotMinimal, UnresolvedOrders
from .groups import GroupTable, Subgroup
from .hodge import CurveAction, HodgeDiamond, expected_chi, factor_group, hodge_diamond
from .numdata import QUOTIENT_ORDER, NumericalDatum, admissible_numerical_data, param_count
from .riemann import BranchType, GeneratingVector, stabilizer_set, vectors_by_signature

log = logging.getLogger(__name__)

CHOICES = ("first", "last")


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True, eq=False)
class AlgebraicDatum:
    """``(G, G0, K1, K2, V1, V2)``, ``(G, G0, K1, tau, V1)`` or ``(G, G0, K1, tau, h, V1)``.

    Each curve action carries its vector on ``G_i/K_i`` and the projection
    from ``G_i``; kernels are read off the projections. The unmixed case
    holds three actions of ``G = G0``.
    """

    case: str
    G: GroupTable
    G0: Subgroup
    actions: tuple[CurveAction, ...]
    delta: int | None = None
    tau: int | None = None
    h_elt: int | None = None

    def __post_init__(self):
        expected = {"index2": 2, "index3": 1, "index6": 1, "unmixed": 3}
        if self.case not in expected:
            raise BadParams(f"unknown case {self.case!r}")
        if len(self.actions) != expected[self.case]:
            raise BadShape(f"{self.case} needs {expected[self.case]} curve action(s)")
        if self.G0.parent is not self.G:
            raise BadShape("G0 is not a subgroup of G")
        need = {"index2": ("delta",), "index3": ("tau",), "index6": ("tau", "h_elt"), "unmixed": ()}[self.case]
        for attr in need:
            if getattr(self, attr) is None:
                raise BadShape(f"{self.case} needs {attr}")

    @property
    def V1(self) -> GeneratingVector:
        return self.actions[0].vector

    @property
    def V2(self) -> GeneratingVector | None:
        return self.actions[1].vector if len(self.actions) > 1 else None

    def kernel(self, i: int) -> Subgroup:
        return Subgroup(self.G, self.actions[i].kernel_members)

    @property
    def K1(self) -> Subgroup:
        return self.kernel(0)

    @property
    def K2(self) -> Subgroup:
        return self.kernel(1) if len(self.actions) > 1 else grp.trivial(self.G)

    @property
    def genera(self) -> tuple[int, int, int]:
        g = [a.genus for a in self.actions]
        if self.case == "index2":
            return (g[0], g[1], g[1])
        if self.case == "unmixed":
            return (g[0], g[1], g[2])
        return (g[0], g[0], g[0])

    @property
    def chi(self) -> int:
        return expected_chi(self.G, self.genera)

    def is_free(self) -> bool:
        if self.case == "index2":
            return free_index2(self.G, self.G0, self.actions[0], self.actions[1], self.delta)
        if self.case == "index3":
            return free_index3(self.G, self.G0, self.tau, self.actions[0])
        if self.case == "index6":
            return free_index6(self.G, self.G0, self.tau, self.h_elt, self.actions[0])
        return free_unmixed(self.G, self.actions)

    def diamond(self) -> HodgeDiamond:
        return hodge_diamond(self)


@dataclass(frozen=True, order=True)
class ClassifiedRow:
    order: int
    position: int
    T1: BranchType
    T2: BranchType | None
    diamond: tuple[int, int, int, int, int]
    case: str = field(compare=False)
    group_name: str = field(compare=False)
    external_id: tuple[int, int] | None = field(compare=False)
    d: int = field(compare=False)
    witnesses: int = field(compare=False, default=1)

    @property
    def hodge(self) -> HodgeDiamond:
        return HodgeDiamond(*self.diamond)

    def key(self) -> tuple:
        return (self.group_name, self.T1, self.T2, self.diamond, self.d)

    def id_string(self) -> str:
        return f"<{self.external_id[0]},{self.external_id[1]}>" if self.external_id else "-"

    def as_record(self) -> dict:
        h = self.diamond
        return {
            "case": self.case, "group_name": self.group_name, "external_id": self.id_string(),
            "order": self.order, "T1": str(self.T1), "T2": str(self.T2) if self.T2 is not None else "-",
            "h30": h[0], "h20": h[1], "h10": h[2], "h11": h[3], "h12": h[4], "d": self.d,
            "witnesses": self.witnesses,
        }


# ---------------------------------------------------------------------------
# stabilizer sets on G and freeness


def sigma_mask(G: GroupTable, action: CurveAction) -> np.ndarray:
    """Stabilizer set of ``action`` pulled back to ``G_i <= G`` (boolean mask on G)."""
    st = stabilizer_set(action.vector).mask
    out = np.zeros(G.order, dtype=bool)
    dom = action.domain_mask
    out[dom] = st[action.proj[dom]]
    return out


def _conj_index(G: GroupTable, t: int) -> np.ndarray:
    return G.mult[G.mult[t], G.inv[t]]


def _twist(G: GroupTable, mask: np.ndarray, t: int) -> np.ndarray:
    """Mask of ``t S t^-1``: ``y`` is in it iff ``t^-1 y t`` is in ``S``."""
    return mask[_conj_index(G, int(G.inv[t]))]


def _trivial_meet(*masks: np.ndarray) -> bool:
    meet = np.logical_and.reduce(masks)
    return int(meet.sum()) == 1 and bool(meet[0])


def free_index2(G: GroupTable, G0: Subgroup, act1: CurveAction, act2: CurveAction, delta: int) -> bool:
    """Freeness in index two: ``S1 & S2 & delta S2 delta^-1 = {1}`` and
    ``(delta g)^2`` outside ``S2`` whenever ``delta g`` is in ``S1``."""
    m0 = G0.mask
    if m0[delta]:
        raise BadCoset("delta lies in G0")
    s1, s2 = sigma_mask(G, act1), sigma_mask(G, act2)
    if not _trivial_meet(s1, s2, _twist(G, s2, delta)):
        return False
    sq = G.power_map(2)
    return not np.any(~m0 & s1 & s2[sq])


def _index3_shape(G: GroupTable, G0: Subgroup, tau: int):
    m0 = G0.mask
    if m0[tau]:
        raise BadCoset("tau lies in G0")
    if m0[G.mul(tau, tau)]:
        raise BadShape("tau^2 lies in G0, so tau does not map to a 3-cycle")
    return m0


def free_index3(G: GroupTable, G0: Subgroup, tau: int, act1: CurveAction) -> bool:
    """Freeness in index three.

    Tests the triple intersection and, directly, that no ``(tau g)^3`` lies in
    ``S1``. When the extension does not split the second test always passes
    once the first one does.
    """
    m0 = _index3_shape(G, G0, tau)
    s1 = sigma_mask(G, act1)
    if not _trivial_meet(s1, _twist(G, s1, tau), _twist(G, s1, G.mul(tau, tau))):
        return False
    cubes = G.power_map(3)
    return not np.any(~m0 & s1[cubes])


def free_index6(G: GroupTable, G0: Subgroup, tau: int, h_elt: int, act1: CurveAction) -> bool:
    m0 = _index3_shape(G, G0, tau)
    if m0[h_elt]:
        raise BadCoset("h lies in G0")
    sq = G.power_map(2)
    if not m0[sq[h_elt]]:
        raise BadShape("h^2 is not in G0")
    g1 = act1.domain_mask
    if not g1[h_elt] or int(g1.sum()) != 2 * G0.order:
        raise BadShape("the first action must live on <h, G0>")
    s1 = sigma_mask(G, act1)
    if not _trivial_meet(s1, _twist(G, s1, tau), _twist(G, s1, G.mul(tau, tau))):
        return False
    cubes = G.power_map(3)
    if np.any(~m0 & ~m0[sq] & s1[cubes]):
        return False
    f = np.flatnonzero(g1 & ~m0 & s1)
    ct = _conj_index(G, tau)
    return not np.any(s1[ct[sq[f]]])


def free_unmixed(G: GroupTable, actions: Sequence[CurveAction]) -> bool:
    return _trivial_meet(*(sigma_mask(G, a) for a in actions))


def verify_unmixed(G: GroupTable, actions: Sequence[CurveAction]) -> tuple[bool, HodgeDiamond]:
    """Freeness flag and diamond of a diagonal action; kernels must meet pairwise trivially."""
    if len(actions) != 3:
        raise BadParams("need three curve actions")
    kernels = [a.proj == 0 for a in actions]
    for i in range(3):
        for j in range(i + 1, 3):
            if int((kernels[i] & kernels[j]).sum()) != 1:
                raise NotMinimal(f"kernels K{i + 1} and K{j + 1} intersect non-trivially")
    datum = AlgebraicDatum("unmixed", G, grp.whole(G), tuple(actions))
    return datum.is_free(), datum.diamond()


def verify_datum(datum: AlgebraicDatum) -> HodgeDiamond:
    """Re-check an algebraic datum end to end; returns its diamond.

    Raises AssertionError when the action is not free or the diamond
    contradicts the numerical invariants.
    """
    G, G0 = datum.G, datum.G0
    k = {"index2": 2, "index3": 3, "index6": 6, "unmixed": 1}[datum.case]
    if not (G0.is_subgroup() and G0.is_normal() and G0.index == k):
        raise AssertionError("G0 has the wrong index or is not normal")
    if datum.case in ("index3", "index6") and grp.is_split_extension(G, G0):
        raise AssertionError("the extension splits")
    if datum.case == "index2":
        if int((datum.K1.mask & datum.K2.mask).sum()) != 1:
            raise AssertionError("K1 and K2 meet non-trivially")
    if not all(a.vector.is_valid() for a in datum.actions):
        raise AssertionError("invalid generating vector")
    if not datum.is_free():
        raise AssertionError("the action is not free")
    D = datum.diamond()
    if D.chi != datum.chi or not D.consistent():
        raise AssertionError(f"diamond {D} contradicts chi = {datum.chi}")
    return D


# ---------------------------------------------------------------------------
# Step 1 filters


def step1_index2(H: GroupTable, T2: BranchType) -> bool:
    return bool(vectors_by_signature(H, T2))


def step1_index3(H: GroupTable, T1: BranchType) -> bool:
    """Three vectors of type ``T1`` whose stabilizer sets meet trivially."""
    sigs = vectors_by_signature(H, T1)
    masks = [stabilizer_set(V).mask for V, _ in sigs.values()]
    return any(_trivial_meet(masks[a], masks[b], masks[c])
               for a, b, c in combinations_with_replacement(range(len(masks)), 3))


def step1_index6(H: GroupTable, T1: BranchType) -> bool:
    return bool(vectors_by_signature(H, T1))


STEP1 = {"index2": lambda H, d: step1_index2(H, d.T2),
         "index3": lambda H, d: step1_index3(H, d.T1),
         "index6": lambda H, d: step1_index6(H, d.T1)}


# ---------------------------------------------------------------------------
# Step 2


def _pick(candidates: np.ndarray, choice) -> int:
    cands = sorted(int(x) for x in candidates)
    if not cands:
        raise BadCoset("empty coset")
    if choice == "first":
        return cands[0]
    if choice == "last":
        return cands[-1]
    return cands[int(choice) % len(cands)]


def coset_representatives(G: GroupTable, G0: Subgroup, case: str, choice="first") -> dict[str, int]:
    """``delta`` (index two) or ``tau``/``h`` (index three/six) chosen from the
    appropriate elements of ``G - G0`` in canonical order."""
    m0 = G0.mask
    sq = G.power_map(2)
    if case == "index2":
        return {"delta": _pick(np.flatnonzero(~m0), choice)}
    out = {"tau": _pick(np.flatnonzero(~m0 & ~m0[sq]), choice)}
    if case == "index6":
        out["h_elt"] = _pick(np.flatnonzero(~m0 & m0[sq]), choice)
    return out


def search_group(G: GroupTable, case: str, data: Sequence[NumericalDatum], choice="first",
                 collect: bool = False):
    """Step 2 for one group. Returns ``{(T1, T2, diamond): witnesses}``.

    With ``collect`` the passing :class:`AlgebraicDatum` objects are
    returned as well (one per signature combination).
    """
    hits: dict[tuple, int] = {}
    found: list[AlgebraicDatum] = []
    k = QUOTIENT_ORDER[case]
    for G0 in grp.normal_subgroups_of_index(G, k):
        if case in ("index3", "index6"):
            if case == "index6" and grp.quotient_kind(G, G0) != "S3":
                continue
            if case == "index3" and grp.quotient_kind(G, G0) != "Z3":
                continue
            if grp.is_split_extension(G, G0):
                continue
        reps = coset_representatives(G, G0, case, choice)
        if case == "index2":
            H2, p2 = factor_group(G, G0)
            H1, p1 = factor_group(G, grp.whole(G))
        elif case == "index3":
            H1, p1 = factor_group(G, G0)
        else:
            G1 = grp.closure(G, list(G0.members) + [reps["h_elt"]])
            H1, p1 = factor_group(G, G1)
        for nd in data:
            T1, T2 = nd.T1, nd.T2
            if case == "index2":
                if not step1_index2(H2, T2):
                    continue
                sig1 = vectors_by_signature(H1, T1)
                if not sig1:
                    continue
                sig2 = vectors_by_signature(H2, T2)
                pairs = [((V1, c1), (V2, c2)) for V1, c1 in sig1.values() for V2, c2 in sig2.values()]
            else:
                if not STEP1[case](H1, nd):
                    continue
                pairs = [((V1, c1), None) for V1, c1 in vectors_by_signature(H1, T1).values()]
            for (V1, c1), second in pairs:
                acts = [CurveAction(V1, p1)]
                w = c1
                if second is not None:
                    V2, c2 = second
                    acts.append(CurveAction(V2, p2))
                    w *= c2
                datum = AlgebraicDatum(case, G, G0, tuple(acts), **reps)
                if not datum.is_free():
                    continue
                D = datum.diamond()
                if D.chi != datum.chi or not D.consistent():
                    raise AssertionError(f"diamond {D} inconsistent for {G.name} {T1} {T2}")
                key = (T1, T2, D.as_tuple())
                hits[key] = hits.get(key, 0) + w
                if collect:
                    found.append(datum)
    return (hits, found) if collect else hits


def _unit(args):
    G, case, data, choice = args
    return search_group(G, case, data, choice)


# ---------------------------------------------------------------------------
# driver


@dataclass
class Plan:
    """Which orders are searched, which are settled by Step 1 and which are unresolved."""

    case: str
    data: dict[int, list[NumericalDatum]]
    settled_by_step1: list[int] = field(default_factory=list)
    unresolved: list[int] = field(default_factory=list)

    @property
    def orders(self) -> list[int]:
        return sorted(self.data)


def plan(chi: int, case: str, catalog: Catalog, min_order: int = 1, max_order: int | None = None,
         nmax: Mapping[int, int] | None = None) -> Plan:
    data = [d for d in admissible_numerical_data(chi, case, nmax=nmax, max_order=max_order) if d.n >= min_order]
    by_n: dict[int, list[NumericalDatum]] = {}
    for d in data:
        by_n.setdefault(d.n, []).append(d)
    sub = 2 if case == "index2" else 3
    out = Plan(case, {})
    for n, ds in sorted(by_n.items()):
        if catalog.covers(n // sub):
            Hs = [e.group for e in catalog.complete(n // sub)]
            ds = [d for d in ds if any(STEP1[case](H, d) for H in Hs)]
            if not ds:
                out.settled_by_step1.append(n)
                continue
        if not catalog.covers(n):
            out.unresolved.append(n)
            continue
        out.data[n] = ds
    return out


def classify(chi: int, case: str, order_range: tuple[int, int | None] = (1, None), catalog: Catalog | None = None,
             nmax: Mapping[int, int] | None = None, jobs: int = 1, choice="first") -> list[ClassifiedRow]:
    """Classified rows for one mixed case, canonically sorted.

    Raises :class:`UnresolvedOrders` (carrying the rows found so far) when
    some admissible order cannot be searched with ``catalog``.
    """
    if case not in ("index2", "index3", "index6"):
        raise BadParams(f"classify handles index2/index3/index6, not {case!r}")
    catalog = catalog or default_catalog()
    lo, hi = order_range
    pl = plan(chi, case, catalog, lo or 1, hi, nmax)
    units: list[tuple[int, CatalogEntry, list[NumericalDatum]]] = []
    for n in pl.orders:
        for pos, entry in enumerate(catalog.complete(n)):
            units.append((pos, entry, pl.data[n]))
    args = [(e.group, case, ds, choice) for _, e, ds in units]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_unit, args))
    else:
        results = [_unit(a) for a in args]
    rows = []
    for (pos, entry, _), hits in zip(units, results):
        for (T1, T2, diamond), w in hits.items():
            rows.append(ClassifiedRow(entry.order, pos, T1, T2, diamond, case=case, group_name=entry.name,
                                      external_id=entry.external_id, d=param_count(case, T1, T2), witnesses=w))
    rows.sort()
    if pl.unresolved:
        raise UnresolvedOrders(pl.unresolved, rows)
    return rows


def rows_multiset(rows: Iterable[ClassifiedRow]) -> list[tuple]:
    return sorted((r.group_name, str(r.T1), str(r.T2) if r.T2 else "-", r.diamond, r.d) for r in rows)
