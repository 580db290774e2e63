from __future__ import annotations


import numpy as np
import pytest

from trifold import groups as grp
from trifold.catalog import make_named
from trifold.errors import AxiomViolation, InvalidPermutation


def perms_group(*gens):
    return grp.from_permutation_generators([list(g) for g in gens])


def brute_classes(G):
    seen, out = set(), []
    for x in range(G.order):
        if x in seen:
            continue
        c = {int(G.mult[G.mult[g, x], G.inv[g]]) for g in range(G.order)}
        seen |= c
        out.append(c)
    return out


def all_subgroups(G):
    """Every subgroup, as frozensets, by closing small generating sets."""
    subs = {frozenset([0])}
    frontier = set(subs)
    while frontier:
        nxt = set()
        for S in frontier:
            for x in range(G.order):
                if x not in S:
                    T = frozenset(grp.closure(G, list(S) + [x]).members)
                    if T not in subs:
                        subs.add(T)
                        nxt.add(T)
        frontier = nxt
    return subs


class TestConstruction:
    def test_z2(self):
        assert perms_group((1, 0)).order == 2

    def test_s3_from_two_generators(self):
        assert perms_group((1, 2, 0), (0, 2, 1)).order == 6

    def test_trivial(self):
        assert perms_group((0,)).order == 1

    def test_bad_permutation(self):
        with pytest.raises((InvalidPermutation, AxiomViolation)):
            perms_group((0, 0))

    def test_identity_is_zero(self):
        G = make_named("symmetric", 4)
        assert np.array_equal(G.mult[0], np.arange(24))
        assert all(G.mult[x, G.inv[x]] == 0 for x in range(24))


class TestClasses:
    def test_z2(self):
        assert sorted(map(len, grp.conjugacy_classes(make_named("cyclic", 2)))) == [1, 1]

    def test_s3(self):
        assert sorted(map(len, grp.conjugacy_classes(make_named("symmetric", 3)))) == [1, 2, 3]

    def test_q8(self):
        assert sorted(map(len, grp.conjugacy_classes(make_named("quaternion")))) == [1, 1, 2, 2, 2]

    def test_against_brute_force(self, small_groups):
        for e in small_groups:
            ours = sorted(map(frozenset, grp.conjugacy_classes(e.group)), key=min)
            assert ours == sorted(map(frozenset, brute_classes(e.group)), key=min), e.name
            assert all(e.order % len(c) == 0 for c in ours)


class TestCentralizer:
    def test_abelian_and_identity(self):
        Z = make_named("cyclic", 6)
        assert grp.centralizer(Z, 4).order == 6
        assert grp.centralizer(make_named("symmetric", 4), 0).order == 24

    def test_transposition(self):
        S3 = make_named("symmetric", 3)
        t = next(x for x in range(6) if S3.element_orders[x] == 2)
        assert grp.centralizer(S3, t).order == 2


class TestNormal:
    def test_z4(self):
        Z4 = make_named("cyclic", 4)
        (N,) = grp.normal_subgroups_of_index(Z4, 2)
        assert set(N.members) == {0, Z4.power(Z4.generator_indices[0], 2)}

    def test_s3(self):
        S3 = make_named("symmetric", 3)
        (N,) = grp.normal_subgroups_of_index(S3, 2)
        assert all(S3.element_orders[x] in (1, 3) for x in N.members)

    def test_not_dividing(self):
        assert grp.normal_subgroups_of_index(make_named("cyclic", 2), 3) == []

    @pytest.mark.parametrize("k", [2, 3, 6])
    def test_against_all_subgroups(self, small_groups, k):
        for e in small_groups:
            G = e.group
            if G.order % k:
                continue
            brute = set()
            for S in all_subgroups(G):
                if len(S) * k == G.order and grp.Subgroup(G, tuple(S)).is_normal():
                    brute.add(S)
            ours = {frozenset(N.members) for N in grp.normal_subgroups_of_index(G, k)}
            assert ours == brute, e.name

    def test_quotient_roundtrip(self, small_groups):
        for e in small_groups:
            for k in (2, 3):
                for N in grp.normal_subgroups_of_index(e.group, k):
                    Q, pi = grp.quotient(e.group, N)
                    assert Q.order == k
                    assert pi.is_homomorphism() and pi.is_surjective()
                    assert pi.kernel().members == N.members


class TestQuotient:
    def test_whole(self):
        G = make_named("dihedral", 4)
        Q, _ = grp.quotient(G, grp.whole(G))
        assert Q.order == 1

    def test_s3_mod_a3(self):
        S3 = make_named("symmetric", 3)
        (N,) = grp.normal_subgroups_of_index(S3, 2)
        Q, pi = grp.quotient(S3, N)
        assert Q.order == 2
        for x in range(6):
            assert (pi(x) != 0) == (S3.element_orders[x] == 2)


def complement_exists(G, N):
    want = G.order // N.order
    for S in all_subgroups(G):
        if len(S) == want and len(S & set(N.members)) == 1:
            return True
    return False


class TestSplit:
    def test_s3(self):
        S3 = make_named("symmetric", 3)
        (N,) = grp.normal_subgroups_of_index(S3, 2)
        assert grp.is_split_extension(S3, N)

    def test_z9(self):
        Z9 = make_named("cyclic", 9)
        (N,) = grp.normal_subgroups_of_index(Z9, 3)
        assert not grp.is_split_extension(Z9, N)

    def test_z9_z3(self, catalog):
        G = catalog.find("Z9:Z3").group
        nonsplit = [N for N in grp.normal_subgroups_of_index(G, 3) if not grp.is_split_extension(G, N)]
        assert nonsplit

    @pytest.mark.parametrize("k", [2, 3, 6])
    def test_against_complement_search(self, catalog, k):
        entries = [e for n in sorted(catalog.entries) if n <= 48 for e in catalog.entries[n]]
        for e in entries:
            G = e.group
            if G.order % k or G.order > 48:
                continue
            for N in grp.normal_subgroups_of_index(G, k):
                if grp.quotient_kind(G, N) not in ("Z2", "Z3", "S3"):
                    continue
                assert grp.is_split_extension(G, N) == complement_exists(G, N), e.name


class TestIsomorphism:
    def test_z4_klein(self):
        Z = make_named("cyclic", 2)
        from trifold.catalog import direct_product
        assert grp.isomorphism(make_named("cyclic", 4), direct_product(Z, Z)) is None

    def test_self(self):
        G = make_named("dihedral", 4)
        phi = grp.isomorphism(G, G)
        assert phi is not None and phi.is_homomorphism() and phi.is_injective()

    def test_d4_q8(self):
        assert grp.isomorphism(make_named("dihedral", 4), make_named("quaternion")) is None

    def test_relabelled_copy(self):
        G = make_named("GL23")
        rng = np.random.default_rng(3)
        p = np.concatenate([[0], 1 + rng.permutation(G.order - 1)])
        pinv = np.argsort(p)
        H = grp.from_table(p[G.mult[pinv][:, pinv]])
        phi = grp.isomorphism(G, H)
        assert phi is not None and phi.is_homomorphism() and phi.is_injective()
        back = phi.inverse()
        assert back.is_homomorphism()


def test_associativity(catalog):
    for n, entries in catalog.entries.items():
        if n > 64:
            continue
        for e in entries:
            assert e.group.check_associative(), e.name


def test_associativity_fails_on_bad_table():
    t = np.array([[0, 1, 2], [1, 0, 2], [2, 2, 0]])
    try:
        G = grp.GroupTable(t)
    except AxiomViolation:
        return
    assert not G.check_associative()
