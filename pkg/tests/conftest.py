from __future__ import annotations

import collections
from pathlib import Path

import pytest

from trifold.catalog import builtin_catalog
from trifold.numdata import load_nmax

DATA = Path(__file__).parent / "data"


def load_table_rows(path=DATA / "index2_rows.tsv"):
    """Transcribed index-two table: list of dicts keyed by column."""
    rows = []
    for line in Path(path).read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        f = line.split("\t")
        a, b = (int(t) for t in f[1].split(","))
        rows.append({
            "no": int(f[0]), "id": (a, b), "T1": f[2], "T2": f[3],
            "diamond": tuple(int(x) for x in f[4:9]), "d": int(f[9]),
        })
    return rows


def row_key(row):
    return (row["id"][0], row["T1"], row["T2"], row["diamond"], row["d"])


@pytest.fixture(scope="session")
def catalog():
    return builtin_catalog()


@pytest.fixture(scope="session")
def nmax():
    return load_nmax(DATA / "nmax_partial.tsv")


@pytest.fixture(scope="session")
def table_rows():
    return load_table_rows()


@pytest.fixture(scope="session")
def table_by_id(table_rows):
    out = collections.defaultdict(collections.Counter)
    for r in table_rows:
        out[r["id"]][(r["T1"], r["T2"], r["diamond"], r["d"])] += 1
    return out


@pytest.fixture(scope="session")
def small_groups(catalog):
    """Every catalog group of order at most 16."""
    return [e for n in range(1, 17) for e in catalog.complete(n)]
