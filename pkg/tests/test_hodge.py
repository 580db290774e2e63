from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np
import pytest

from trifold import groups as grp
from trifold.catalog import make_named
from trifold.characters import ClassFunction
from trifold.cli import load_datum
from trifold.errors import BadParams, ElementInDiagonal, GroupMismatch
from trifold.hodge import (
    PQ, HodgeDiamond, chi_pq_on_diagonal, chi_pq_outside, curve_action, factor_group, hodge_sums,
)
from trifold.numdata import admissible_numerical_data
from trifold.pipeline import AlgebraicDatum, search_group
from trifold.riemann import BranchType, chevalley_weil, enumerate_generating_vectors

DATA = Path(__file__).parent / "data"
T = BranchType.parse


# ---------------------------------------------------------------------------
# an independent model: each element of G acts on C1 x C2 x C3 by a permuted
# product of curve automorphisms, built from the normal-form formulas and
# composed; traces on H^{p,q} come from graded traces of the permutation


class Monomial:
    """Maps ``out[i] = (source factor, element)``; ``compose(A, B)`` applies B first."""

    def __init__(self, G):
        self.G = G

    def compose(self, A, B):
        G = self.G
        return tuple((B[j][0], int(G.mult[a, B[j][1]])) for (j, a) in A)


def monomial_model(datum):
    """Dict ``x -> ((src0, e0), (src1, e1), (src2, e2))`` and factor kinds."""
    G, G0 = datum.G, datum.G0
    M = Monomial(G)
    mul, inv = (lambda a, b: int(G.mult[a, b])), (lambda a: int(G.inv[a]))
    conj = lambda t, x: mul(mul(t, x), inv(t))
    model = {}
    if datum.case == "unmixed":
        for g in range(G.order):
            model[g] = ((0, g), (1, g), (2, g))
        return model, (0, 1, 2)
    if datum.case == "index2":
        d = datum.delta
        for g in G0.members:
            model[g] = ((0, g), (1, g), (2, conj(d, g)))
        model_d = ((0, d), (2, 0), (1, mul(d, d)))
        for g in G0.members:
            model[mul(d, g)] = M.compose(model_d, model[g])
        return model, (0, 1, 1)
    t = datum.tau
    t2 = mul(t, t)
    base = {}
    for g in G0.members:
        base[g] = ((0, g), (1, conj(t, g)), (2, conj(t2, g)))
    if datum.case == "index6":
        G1 = datum.actions[0].domain_mask
        for f in np.flatnonzero(G1):
            f = int(f)
            if f not in base:
                base[f] = ((0, f), (2, mul(mul(t, f), inv(t2))), (1, mul(mul(t2, f), inv(t))))
    model_t = ((1, 0), (2, 0), (0, mul(t2, t)))
    for y, My in base.items():
        model[y] = My
        model[mul(t, y)] = M.compose(model_t, My)
        model[mul(t2, y)] = M.compose(model_t, M.compose(model_t, My))
    return model, (0, 0, 0)


def character_values(datum):
    """Complex character of each curve action, on indices of ``G`` (nan off the domain)."""
    out = []
    for act in datum.actions:
        chi = chevalley_weil(act.quotient, act.vector)
        vals = np.full(datum.G.order, np.nan, dtype=complex)
        for x in range(datum.G.order):
            if act.proj[x] >= 0:
                vals[x] = chi(int(act.proj[x])).to_complex()
        out.append(vals)
    return out


def oracle_sums(datum, check_hom=True):
    G = datum.G
    model, kinds = monomial_model(datum)
    assert len(model) == G.order
    M = Monomial(G)
    if check_hom:
        for x, y in itertools.product(range(G.order), repeat=2):
            assert model[int(G.mult[x, y])] == M.compose(model[x], model[y])
    chars = character_values(datum)
    if datum.case == "index2":
        per_factor = [chars[0], chars[1], chars[1]]
    elif datum.case == "unmixed":
        per_factor = chars
    else:
        per_factor = [chars[0]] * 3
    sums = {pq: 0j for pq in PQ}
    for x in range(G.order):
        Mx = model[x]
        poly = {(0, 0): 1 + 0j}
        seen = set()
        for i in range(3):
            if i in seen:
                continue
            cycle = [i]
            j = Mx[i][0]
            while j != i:
                cycle.append(j)
                j = Mx[j][0]
            seen |= set(cycle)
            L = len(cycle)
            power = Mx
            for _ in range(L - 1):
                power = M.compose(power, Mx)
            assert power[i][0] == i
            c = per_factor[i][power[i][1]]
            assert not np.isnan(c)
            sign = (-1) ** (L - 1)
            factor = {(0, 0): 1, (L, 0): sign * c, (0, L): sign * np.conj(c), (L, L): 1}
            new = {}
            for (a, b), u in poly.items():
                for (p, q), v in factor.items():
                    new[(a + p, b + q)] = new.get((a + p, b + q), 0) + u * v
            poly = new
        for pq in PQ:
            sums[pq] += poly.get(pq, 0)
    return sums


def ring_sum_to_complex(vec):
    E = len(vec)
    z = np.exp(2j * np.pi * np.arange(E) / E)
    return complex(np.dot(np.asarray(vec, dtype=float), z))


def assert_matches_oracle(datum, check_hom=True):
    ours = hodge_sums(datum)
    ref = oracle_sums(datum, check_hom)
    for pq in PQ:
        assert abs(ring_sum_to_complex(ours[pq]) - ref[pq]) < 1e-6, (pq, ours[pq], ref[pq])


# ---------------------------------------------------------------------------
# data


def collected(G, case, n_max=None):
    data = [d for d in admissible_numerical_data(-1, case, max_order=G.order) if d.n == G.order]
    _, found = search_group(G, case, data, collect=True)
    return found


@pytest.fixture(scope="module")
def index2_data(small_groups):
    out = []
    for e in small_groups:
        out += collected(e.group, "index2")
    return out


@pytest.fixture(scope="module")
def z9z3_datum(catalog):
    found = collected(catalog.find("Z9:Z3").group, "index3")
    assert found
    return found[0]


def random_datum(G, G0, case, types, rng, which=0):
    """Some datum of the given shape; freeness is not required."""
    others = [x for x in range(G.order) if x not in G0.members]
    if case == "index2":
        H1, p1 = factor_group(G, grp.whole(G))
        H2, p2 = factor_group(G, G0)
        V1 = list(enumerate_generating_vectors(H1, types[0]))
        V2 = list(enumerate_generating_vectors(H2, types[1]))
        if not V1 or not V2:
            return None
        acts = (curve_action(V1[rng.integers(len(V1))], p1), curve_action(V2[rng.integers(len(V2))], p2))
        return AlgebraicDatum("index2", G, G0, acts, delta=others[rng.integers(len(others))])
    if case == "index3":
        H, p = factor_group(G, G0)
        V = list(enumerate_generating_vectors(H, types[0]))
        if not V:
            return None
        return AlgebraicDatum("index3", G, G0, (curve_action(V[rng.integers(len(V))], p),),
                              tau=others[rng.integers(len(others))])
    sq = G.power_map(2)
    taus = [x for x in others if sq[x] not in G0.members]
    hs = [x for x in others if sq[x] in G0.members]
    tau, h = taus[rng.integers(len(taus))], hs[rng.integers(len(hs))]
    G1 = grp.closure(G, list(G0.members) + [h])
    H, p = factor_group(G, G1)
    V = list(enumerate_generating_vectors(H, types[0]))
    if not V:
        return None
    return AlgebraicDatum("index6", G, G0, (curve_action(V[rng.integers(len(V))], p),), tau=tau, h_elt=h)


# ---------------------------------------------------------------------------


class TestDiamondType:
    def test_invariants(self):
        h = HodgeDiamond(5, 7, 4, 18, 24)
        assert h.chi == -1 and h.euler == -8 and h.consistent()
        assert h.betti == (1, 8, 32, 58, 32, 8, 1)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            HodgeDiamond(1, -1, 0, 0, 0)


class TestKnownDiamonds:
    def test_row_one(self):
        d = load_datum(DATA / "z2_index2.datum")
        assert d.is_free() and d.diamond().as_tuple() == (5, 7, 4, 18, 24)

    def test_rigid_unmixed(self):
        d = load_datum(DATA / "z5sq_unmixed.datum")
        assert d.genera == (6, 6, 2)
        assert d.is_free() and d.diamond().as_tuple() == (3, 1, 0, 5, 9)

    def test_z9z3(self, z9z3_datum):
        assert z9z3_datum.diamond().as_tuple() == (4, 2, 0, 5, 10)


class TestTraceFormulas:
    def test_diagonal_degenerate(self):
        G = make_named("cyclic", 1)
        one = ClassFunction.trivial(G)
        assert chi_pq_on_diagonal(one, one, one, (1, 1))(0) == 9

    def test_diagonal_degrees(self):
        G = make_named("cyclic", 5)
        vs = [next(enumerate_generating_vectors(G, T(s))) for s in ("[0;5^3]", "[1;-]", "[2;-]")]
        chis = [chevalley_weil(G, V) for V in vs]
        gs = [V.genus for V in vs]
        assert chi_pq_on_diagonal(*chis, (3, 0))(0) == gs[0] * gs[1] * gs[2]
        assert chi_pq_on_diagonal(*chis, (1, 0))(0) == sum(gs)
        with pytest.raises(BadParams):
            chi_pq_on_diagonal(*chis, (0, 0))
        with pytest.raises(GroupMismatch):
            chi_pq_on_diagonal(chis[0], chis[1], ClassFunction.trivial(make_named("cyclic", 2)), (1, 0))

    def test_outside_rows(self):
        S3 = make_named("symmetric", 3)
        (A3,) = grp.normal_subgroups_of_index(S3, 2)
        t = next(x for x in range(6) if x not in A3.members)
        V = next(enumerate_generating_vectors(S3, T("[0;2^2,3^2]")))
        chi = chevalley_weil(S3, V)
        H, emb = grp.subgroup_table(S3, A3)
        back = {int(emb(i)): i for i in range(H.order)}
        W = next(enumerate_generating_vectors(H, T("[0;3^3]")))
        chi2 = chevalley_weil(H, W)
        val = lambda pq: chi_pq_outside("delta", pq, chi, t, A3, chi2, embed2=back.__getitem__)
        assert val((1, 1)) == 1
        x, y = chi(t), chi2(back[S3.mul(t, t)])
        assert val((3, 0)) == -(x * y)
        assert val((2, 0)) == -y
        assert chi_pq_outside("tau", (2, 1), chi2, t, A3) == 0
        with pytest.raises(ElementInDiagonal):
            chi_pq_outside("delta", (1, 0), chi, A3.members[1], A3, chi2)


class TestOracle:
    def test_known_data(self, z9z3_datum):
        for d in (load_datum(DATA / "z2_index2.datum"), load_datum(DATA / "z5sq_unmixed.datum"), z9z3_datum):
            assert_matches_oracle(d)

    def test_all_index2_rows_up_to_16(self, index2_data):
        assert len(index2_data) >= 58
        for d in index2_data:
            assert_matches_oracle(d, check_hom=d.G.order <= 8)
            ref = oracle_sums(d, check_hom=False)
            h = d.diamond()
            assert h.as_tuple() == tuple(round((ref[pq] / d.G.order).real) for pq in ((3, 0), (2, 0), (1, 0), (1, 1), (2, 1)))

    def test_chi_y_relation(self, index2_data, z9z3_datum):
        # the chi_y genus at y = -1 recovers 3 chi(O_X) up to sign
        for d in index2_data + [z9z3_datum, load_datum(DATA / "z5sq_unmixed.datum")]:
            h = d.diamond()
            assert h.h10 - h.h11 + h.h12 - h.h20 == -3 * h.chi == -3 * d.chi

    @pytest.mark.parametrize("case,groups,types", [
        ("index2", [("dihedral", 4), ("quaternion",), ("dicyclic", 12), ("symmetric", 4)],
         [T("[0;2^2,4^2]"), T("[1;2]")]),
        ("index2", [("cyclic", 8), ("semidihedral", 16), ("M16",)], [T("[0;2,8^2]"), T("[0;4^3]")]),
        ("index3", [("alternating", 4), ("cyclic", 9), ("SL23",)],
         [T("[0;2^3]"), T("[0;3^3]"), T("[0;4^3]"), T("[1;-]")]),
        ("index3", [("cyclic", 9), ("alternating", 4), ("SL23",)], [T("[0;2^4]"), T("[0;3^4]"), T("[0;4^4]")]),
        ("index6", [("symmetric", 4), ("binary_octahedral",), ("GL23",), ("dihedral", 6)],
         [T("[0;2^2,4^2]"), T("[0;2^4]"), T("[0;8^2,2]")]),
        ("index6", [("symmetric", 4), ("dihedral", 6), ("dihedral", 3)], [T("[0;2^3,4]"), T("[1;2]"), T("[0;2^2]")]),
    ])
    def test_random_data(self, case, groups, types):
        rng = np.random.default_rng(11)
        k = {"index2": 2, "index3": 3, "index6": 6}[case]
        tried = 0
        for spec in groups:
            G = make_named(*spec)
            for G0 in grp.normal_subgroups_of_index(G, k):
                if case == "index6" and grp.quotient_kind(G, G0) != "S3":
                    continue
                for Ty in types:
                    for _ in range(3):
                        d = random_datum(G, G0, case, [Ty, Ty], rng)
                        if d is None:
                            continue
                        assert_matches_oracle(d)
                        tried += 1
        assert tried > 0


class TestRepresentativeIndependence:
    def test_delta(self, index2_data):
        for d in index2_data:
            ref = d.diamond()
            for delta in range(d.G.order):
                if delta in d.G0.members:
                    continue
                alt = AlgebraicDatum("index2", d.G, d.G0, d.actions, delta=delta)
                assert alt.is_free() and alt.diamond() == ref

    def test_tau(self, z9z3_datum):
        d = z9z3_datum
        for tau in range(d.G.order):
            if tau in d.G0.members:
                continue
            alt = AlgebraicDatum("index3", d.G, d.G0, d.actions, tau=tau)
            assert alt.is_free() and alt.diamond() == d.diamond()

    def test_tau_and_h_index6_sums(self):
        # no free index-six datum exists at chi = -1; compare the raw sums instead
        rng = np.random.default_rng(5)
        G = make_named("binary_octahedral")
        (G0,) = [N for N in grp.normal_subgroups_of_index(G, 6) if grp.quotient_kind(G, N) == "S3"]
        d = next(filter(None, (random_datum(G, G0, "index6", [T(s)], rng) for s in ("[0;4^2,8]", "[0;4^4]"))))
        ref = {pq: ring_sum_to_complex(v) for pq, v in hodge_sums(d).items()}
        sq = G.power_map(2)
        G1 = d.actions[0].domain_mask
        for tau in range(G.order):
            if tau in G0.members or sq[tau] in G0.members:
                continue
            for h in range(G.order):
                if G1[h] and h not in G0.members:
                    alt = AlgebraicDatum("index6", G, G0, d.actions, tau=tau, h_elt=h)
                    got = hodge_sums(alt)
                    assert all(abs(ring_sum_to_complex(got[pq]) - ref[pq]) < 1e-6 for pq in PQ)
