"""Admissible numerical data: the combinatorial part of the search.

For ``chi = chi(O_X) <= -1`` and a case (index two, three or six) we list
the tuples ``(n, T1[, T2])`` compatible with Hurwitz' formula, the bound on
the group order and the divisibility/size constraints below, with genera
``(g1, g2, g3)`` and weights ``d_i``:

i)   k_i | (g_{i+1}-1)(g_{i+2}-1)
ii)  m_ij | (g_{i+1}-1)(g_{i+2}-1)
iii) (g_i - 1) | chi * n / k_i
iv)  r_i <= 4 d_i k_i (g_i - 1)/n - 4 g_i' + 4
v)   m_ij <= 4 g_i + 2
vi)  g_i' <= 1 - d_i k_i chi / ((g_{i+1}-1)(g_{i+2}-1))
vii) n / (k_i d_i) <= N_max(g_i)

Indices are taken mod 3. Each branching order must also divide the order of
the group acting on the curve (it is the order of an element). Only the absolutely faithful case (all k_i = 1) is
enumerated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

from .errors import BadParams, ParseError
from .riemann import BranchType, hurwitz_genus

CASES = ("index2", "index3", "index6")
ORDER_BOUND_WEIGHT = {"index2": 32, "index3": 216, "index6": 216, "unmixed": 8}
D_WEIGHTS = {"index2": (1, 2, 2), "index3": (3, 3, 3), "index6": (3, 3, 3), "unmixed": (1, 1, 1)}
QUOTIENT_ORDER = {"index2": 2, "index3": 3, "index6": 6, "unmixed": 1}


def _check_case(case: str):
    if case not in ORDER_BOUND_WEIGHT:
        raise BadParams(f"unknown case {case!r}")


@dataclass(frozen=True)
class ChernTriple:
    chi: int
    euler: int
    k_cubed: int


def chern_invariants(chi: int) -> ChernTriple:
    """``(chi, e, K^3)`` of a threefold isogenous to a product."""
    return ChernTriple(chi, 8 * chi, -48 * chi)


@dataclass(frozen=True, order=True)
class NumericalDatum:
    n: int
    T1: BranchType
    T2: BranchType | None = None
    case: str = field(default="index2", compare=False)
    k1: int = field(default=1, compare=False)
    k2: int = field(default=1, compare=False)

    def __post_init__(self):
        _check_case(self.case)
        if self.case == "index2" and self.T2 is None:
            raise BadParams("index two data need T2")
        if self.case in ("index3", "index6") and self.T2 is not None:
            raise BadParams("index three/six data carry a single type")

    @property
    def acting_orders(self) -> tuple[int, int]:
        """Orders of the groups acting on C1 and on C2."""
        if self.case == "index2":
            return self.n, self.n // 2
        q = self.n // 3
        return q, q

    @property
    def genera(self) -> tuple[int, int, int]:
        n1, n2 = self.acting_orders
        g1 = hurwitz_genus(n1, self.k1, self.T1)
        if self.case == "index2":
            g2 = hurwitz_genus(n2, self.k2, self.T2)
            return (g1, g2, g2)
        return (g1, g1, g1)

    @property
    def chi(self) -> Fraction:
        g = self.genera
        return -Fraction((g[0] - 1) * (g[1] - 1) * (g[2] - 1), self.n)

    def types_str(self) -> tuple[str, str]:
        return str(self.T1), (str(self.T2) if self.T2 is not None else "-")


# ---------------------------------------------------------------------------
# bounds


def theta_min(T: BranchType) -> Fraction:
    if T.g_prime == 0:
        return Fraction(1, 42)
    if T.g_prime == 1:
        return Fraction(1, 2)
    return Fraction(2 * T.g_prime - 2)


def max_group_order(chi: int, case: str, faithful: bool = True, types: Iterable[BranchType] | None = None,
                    kernels: Iterable[int] = (1, 1, 1)) -> int:
    """Upper bound for ``n = |G|``.

    Faithful: ``floor(42 sqrt(-42 d chi))``. Otherwise
    ``floor(sqrt(-d chi prod k_i / Theta_min(T_i)))`` over the three factors.
    """
    _check_case(case)
    if chi > -1:
        raise BadParams("chi must be <= -1")
    d = ORDER_BOUND_WEIGHT[case]
    if faithful:
        return math.isqrt(42**3 * d * (-chi))
    types = list(types or ())
    if len(types) != 3:
        raise BadParams("need the three types T1, T2, T3")
    x = Fraction(-d * chi)
    for T, k in zip(types, kernels):
        x *= Fraction(k) / theta_min(T)
    return math.isqrt(math.floor(x))


def hurwitz_bound(g: int) -> int:
    return 84 * (g - 1)


def load_nmax(path) -> dict[int, int]:
    """Read a ``g<TAB>Nmax`` file (``#`` comments allowed)."""
    table: dict[int, int] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("expected 'g<TAB>Nmax'", lineno)
        try:
            g, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError("non-integer entry", lineno) from None
        if not 2 <= g <= 301:
            raise ParseError(f"genus {g} outside 2..301", lineno)
        if v < 1 or v > hurwitz_bound(g):
            raise ParseError(f"N_max({g}) = {v} violates the Hurwitz bound", lineno)
        table[g] = v
    return table


def nmax_lookup(g: int, table: Mapping[int, int] | None = None) -> int:
    if g < 2:
        raise BadParams("N_max is defined for g >= 2")
    if table and g in table:
        return table[g]
    return hurwitz_bound(g)


# ---------------------------------------------------------------------------
# enumeration


def _divisors(x: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(x) + 1) if x % d == 0]
    return sorted(set(small + [x // d for d in small]))


def types_with_theta(theta: Fraction, g_max: int, allowed: list[int], r_max_fn) -> list[BranchType]:
    """All types with ``2g'-2+sum(1-1/m) = theta``, ``g' <= g_max``,
    branching orders from ``allowed`` and ``r <= r_max_fn(g')``."""
    out = []
    allowed = sorted(set(m for m in allowed if m >= 2))
    for gp in range(0, g_max + 1):
        rest = theta - (2 * gp - 2)
        if rest < 0:
            continue
        r_max = r_max_fn(gp)
        if r_max < 0:
            continue

        def rec(start: int, remaining: Fraction, acc: list[int]):
            if remaining == 0:
                out.append(BranchType(gp, tuple(acc)))
                return
            # every term 1 - 1/m is < 1, so the free slots must be able to absorb the rest
            if remaining >= r_max - len(acc):
                return
            for idx in range(start, len(allowed)):
                m = allowed[idx]
                term = 1 - Fraction(1, m)
                if term > remaining:
                    break
                acc.append(m)
                rec(idx, remaining - term, acc)
                acc.pop()

        rec(0, rest, [])
    return out


def _type_ok(T: BranchType, g: int, n: int, n_act: int, di: int, chi: int, other: int) -> bool:
    """Constraints ii), iv), v), vi) for one factor (k_i = 1), plus the
    Lagrange condition that every branching order divides ``n_act``.

    ``other`` is ``(g_{i+1}-1)(g_{i+2}-1)``.
    """
    if any(other % m or m > 4 * g + 2 or n_act % m for m in T.orders):
        return False
    if T.r * n > 4 * di * (g - 1) - (4 * T.g_prime - 4) * n:
        return False
    return T.g_prime * other <= other - di * chi


def _factor_types(n_act: int, g: int, n: int, di: int, chi: int, other: int) -> list[BranchType]:
    theta = Fraction(2 * (g - 1), n_act)
    g_max = 1 + (-di * chi) // other
    allowed = [m for m in _divisors(other) if 2 <= m <= 4 * g + 2]

    def r_max(gp):
        # iv) r <= 4 d (g-1)/n - 4g' + 4
        return math.floor(Fraction(4 * di * (g - 1), n)) - 4 * gp + 4

    return [T for T in types_with_theta(theta, g_max, allowed, r_max) if _type_ok(T, g, n, n_act, di, chi, other)]


def admissible_numerical_data(chi: int, case: str, nmax: Mapping[int, int] | None = None,
                              max_order: int | None = None) -> list[NumericalDatum]:
    """All admissible numerical data in the absolutely faithful case, sorted."""
    _check_case(case)
    if case == "unmixed":
        raise BadParams("numerical data are enumerated for the mixed cases only")
    if chi > -1:
        raise BadParams("chi must be <= -1")
    bound = max_group_order(chi, case)
    if max_order is not None:
        bound = min(bound, max_order)
    a_chi = -chi
    d1, d2, _ = D_WEIGHTS[case]
    out: list[NumericalDatum] = []
    if case == "index2":
        for n in range(2, bound + 1, 2):
            N = n * a_chi
            for a in _divisors(N):  # a = g1 - 1, iii) for i = 1
                sq = N // a
                b = math.isqrt(sq)
                if b * b != sq:
                    continue
                g1, g2 = a + 1, b + 1
                if N % b:  # iii) for i = 2, 3
                    continue
                if g1 < 2 or g2 < 2:
                    continue
                if n > nmax_lookup(g1, nmax) or n // 2 > nmax_lookup(g2, nmax):  # vii)
                    continue
                T1s = _factor_types(n, g1, n, d1, chi, b * b)
                if not T1s:
                    continue
                T2s = _factor_types(n // 2, g2, n, d2, chi, a * b)
                for T1 in T1s:
                    for T2 in T2s:
                        out.append(NumericalDatum(n, T1, T2, case="index2"))
    else:
        q = QUOTIENT_ORDER[case]
        c = 0
        while (c + 1) ** 3 <= bound * a_chi:
            c += 1  # c = g - 1 = cube root of n|chi|
            if c**3 % a_chi:
                continue
            n = c**3 // a_chi
            if n % q or (n * a_chi) % c:
                continue
            g = c + 1
            if n // 3 > nmax_lookup(g, nmax):
                continue
            for T in _factor_types(n // 3, g, n, d1, chi, c * c):
                out.append(NumericalDatum(n, T, None, case=case))
    out.sort()
    return out


def orders_of(data: Iterable[NumericalDatum]) -> list[int]:
    return sorted({d.n for d in data})


def param_count(case: str, T1: BranchType, T2: BranchType | None = None, T3: BranchType | None = None) -> int:
    """Dimension of the family: ``3(g1'+g2') - 6 + r1 + r2`` in index two,
    ``3g1' - 3 + r1`` in index three/six, ``3 sum g' - 9 + sum r`` unmixed."""
    _check_case(case)
    if case == "index2":
        if T2 is None:
            raise BadParams("index two needs T2")
        return 3 * (T1.g_prime + T2.g_prime) - 6 + T1.r + T2.r
    if case == "unmixed":
        if T2 is None or T3 is None:
            raise BadParams("unmixed needs three types")
        return 3 * (T1.g_prime + T2.g_prime + T3.g_prime) - 9 + T1.r + T2.r + T3.r
    return 3 * T1.g_prime - 3 + T1.r
