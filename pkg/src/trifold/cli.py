"""Command line entry point: ``trifold {numdata,classify,hodge,group}``.

Exit codes: 0 on a clean run, 2 when some group orders stay unresolved
(listed in a sidecar file), 1 on errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import groups as grp
from .catalog import (Catalog, CatalogEntry, build_record, builtin_catalog, import_catalog, make_named,
                      parse_group_records)
from .characters import character_table
from .errors import ParseError, TrifoldError, UnresolvedOrders
from .hodge import CurveAction, factor_group
from .numdata import (CASES, admissible_numerical_data, chern_invariants, load_nmax,
                      max_group_order, orders_of)
from .pipeline import AlgebraicDatum, classify, verify_unmixed
from .riemann import BranchType, GeneratingVector

log = logging.getLogger("trifold")

EXIT_OK, EXIT_ERROR, EXIT_UNRESOLVED = 0, 1, 2

ROW_COLUMNS = ("case", "group_name", "external_id", "order", "T1", "T2",
               "h30", "h20", "h10", "h11", "h12", "d", "witnesses")
NUMDATA_COLUMNS = ("case", "order", "T1", "T2", "g1", "g2", "g3")


@dataclass
class RunConfig:
    chi: int = -1
    case: str = "all"
    min_order: int = 1
    max_order: int | None = None
    catalogs: list[Path] = field(default_factory=list)
    nmax: Path | None = None
    fmt: str = "tsv"
    jobs: int = 1
    out: Path | None = None

    def cases(self) -> tuple[str, ...]:
        return CASES if self.case == "all" else (self.case,)

    def validate(self, classification: bool = True):
        if classification and self.chi > -1:
            raise ValueError("--chi must be <= -1")
        for p in self.catalogs + ([self.nmax] if self.nmax else []):
            if not p.is_file():
                raise ValueError(f"no such file: {p}")
        if self.jobs < 1:
            raise ValueError("--jobs must be positive")


def _config(args) -> RunConfig:
    cats = [Path(p) for p in (getattr(args, "catalog", None) or [])]
    env = os.environ.get("TRIFOLD_CATALOG_DIR")
    if not cats and env and Path(env).is_dir():
        cats = sorted(Path(env).glob("*.txt"))
    return RunConfig(chi=getattr(args, "chi", -1), case=getattr(args, "case", "all"),
                     min_order=getattr(args, "min_order", 1) or 1, max_order=getattr(args, "max_order", None),
                     catalogs=cats, nmax=Path(args.nmax) if getattr(args, "nmax", None) else None,
                     fmt=getattr(args, "format", "tsv"), jobs=getattr(args, "jobs", 1),
                     out=Path(args.out) if getattr(args, "out", None) else None)


def _catalog(cfg: RunConfig) -> Catalog:
    cat = builtin_catalog()
    for p in cfg.catalogs:
        n = import_catalog(p, cat)
        log.info("imported %d groups from %s", n, p)
    return cat


def render(records: list[dict], columns, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{c: r[c] for c in columns} for r in records], indent=1) + "\n"
    lines = ["\t".join(columns)]
    lines += ["\t".join(str(r[c]) for c in columns) for r in records]
    return "\n".join(lines) + "\n"


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# commands


def cmd_numdata(cfg: RunConfig) -> int:
    cfg.validate()
    nmax = load_nmax(cfg.nmax) if cfg.nmax else None
    records = []
    for case in cfg.cases():
        data = [d for d in admissible_numerical_data(cfg.chi, case, nmax=nmax, max_order=cfg.max_order)
                if d.n >= cfg.min_order]
        for d in data:
            g = d.genera
            T1, T2 = d.types_str()
            records.append({"case": case, "order": d.n, "T1": T1, "T2": T2, "g1": g[0], "g2": g[1], "g3": g[2]})
        ords = orders_of(data)
        print(f"{case}: AdNumData {len(data)}  G-Orders {len(ords)}  n_max {max(ords) if ords else '-'}"
              f"  n_theo {max_group_order(cfg.chi, case)}", file=sys.stderr)
    _emit(render(records, NUMDATA_COLUMNS, cfg.fmt), cfg.out)
    return EXIT_OK


def _sidecar(cfg: RunConfig) -> Path:
    return Path(str(cfg.out) + ".unresolved") if cfg.out else Path("trifold.unresolved")


def cmd_classify(cfg: RunConfig) -> int:
    cfg.validate()
    if cfg.case == "unmixed":
        raise ValueError("classification covers the mixed cases; use 'hodge' to verify unmixed data")
    nmax = load_nmax(cfg.nmax) if cfg.nmax else None
    cat = _catalog(cfg)
    rows, unresolved = [], []
    for case in cfg.cases():
        try:
            rows += classify(cfg.chi, case, (cfg.min_order, cfg.max_order), cat, nmax=nmax, jobs=cfg.jobs)
        except UnresolvedOrders as exc:
            rows += exc.rows
            unresolved += [(case, n) for n in exc.orders]
    _emit(render([r.as_record() for r in rows], ROW_COLUMNS, cfg.fmt), cfg.out)
    if unresolved:
        side = _sidecar(cfg)
        side.write_text("case\torder\n" + "".join(f"{c}\t{n}\n" for c, n in unresolved), encoding="utf-8")
        print(f"unresolved orders written to {side}: " + ", ".join(f"{c}:{n}" for c, n in unresolved),
              file=sys.stderr)
        return EXIT_UNRESOLVED
    return EXIT_OK


# datum files -------------------------------------------------------------

DATUM_WORDS = ("case", "vector", "kernel", "coset", "diagonal")
_WORD = re.compile(r"^g(\d+)(?:\^(-?\d+))?$")


def parse_element(G: grp.GroupTable, word: str, gens: list[int]) -> int:
    """``1``, ``g2``, ``g1^-1*g2^3`` ... in terms of the record's generators."""
    if word in ("1", "e", "id"):
        return 0
    acc = 0
    for tok in word.split("*"):
        m = _WORD.match(tok)
        if not m:
            raise ValueError(f"bad element word {word!r}")
        i = int(m.group(1)) - 1
        if not 0 <= i < len(gens):
            raise ValueError(f"generator g{i + 1} does not exist")
        acc = G.mul(acc, G.power(gens[i], int(m.group(2) or 1)))
    return acc


def _generator_elements(G: grp.GroupTable, perms: list[list[int]]) -> list[int]:
    if G.perms is None:
        raise ValueError("group has no permutation data")
    rows = {tuple(p): i for i, p in enumerate(np.asarray(G.perms).tolist())}
    return [rows[tuple(p)] for p in perms]


def load_datum(path) -> AlgebraicDatum:
    """Read a datum file: a group record plus ``case``, ``vector``, ``kernel``,
    ``coset`` and optionally ``diagonal`` lines."""
    text = Path(path).read_text(encoding="utf-8").splitlines()
    records, extra = parse_group_records(text, stop_words=DATUM_WORDS)
    if len(records) != 1:
        raise ParseError("a datum file holds exactly one group record", records[1].line if records else 1)
    G = build_record(records[0])
    gens = _generator_elements(G, records[0].gens)
    case, vectors, kernels, cosets, diag = None, {}, {}, {}, None
    for lineno, words in extra:
        try:
            head = words[0]
            if head == "case":
                case = words[1]
            elif head == "vector":
                if words[2] != "type" or words[4] != "elems":
                    raise ValueError("expected 'vector <which> type <T> elems ...'")
                vectors[int(words[1])] = (BranchType.parse(words[3]), [parse_element(G, w, gens) for w in words[5:]])
            elif head == "kernel":
                kernels[int(words[1])] = [parse_element(G, w, gens) for w in words[2:]]
            elif head == "coset":
                cosets[words[1]] = parse_element(G, words[2], gens)
            elif head == "diagonal":
                diag = [parse_element(G, w, gens) for w in words[1:]]
        except (ValueError, IndexError) as exc:
            raise ParseError(str(exc), lineno) from None
    if case not in ("index2", "index3", "index6", "unmixed"):
        raise ParseError(f"unknown or missing case {case!r}", 1)
    return _assemble(G, case, vectors, kernels, cosets, diag)


def _assemble(G, case, vectors, kernels, cosets, diag) -> AlgebraicDatum:
    n_act = {"index2": 2, "index3": 1, "index6": 1, "unmixed": 3}[case]
    if sorted(vectors) != list(range(1, n_act + 1)):
        raise ParseError(f"{case} needs vectors {list(range(1, n_act + 1))}", 1)

    def kernel(i):
        return grp.closure(G, kernels.get(i, []))

    def domain(i):
        return grp.closure(G, vectors[i][1] + list(kernel(i).members))

    doms = {i: domain(i) for i in vectors}
    if diag is not None:
        G0 = grp.closure(G, diag)
    elif case == "index2":
        G0 = doms[2]
    elif case == "index3":
        G0 = doms[1]
    elif case == "index6":
        tau = cosets.get("tau")
        if tau is None:
            raise ParseError("index6 needs 'coset tau'", 1)
        g1 = doms[1].mask
        G0 = grp.Subgroup(G, np.flatnonzero(g1 & g1[G.mult[G.mult[G.inv[tau]], tau]]).tolist())
    else:
        G0 = grp.whole(G)
    acts = []
    for i in sorted(vectors):
        T, elems = vectors[i]
        Q, proj = factor_group(G, doms[i], kernel(i))
        images = [int(proj[x]) for x in elems]
        if len(images) != T.r + 2 * T.g_prime:
            raise ParseError(f"vector {i}: type {T} needs {T.r + 2 * T.g_prime} elements", 1)
        V = GeneratingVector(Q, T, tuple(images[:T.r]), tuple(images[T.r:]))
        if not V.is_valid():
            raise ParseError(f"vector {i} is not a generating vector of type {T}", 1)
        acts.append(CurveAction(V, proj))
    m0 = G0.mask
    extra = {}
    if case == "index2":
        extra["delta"] = cosets.get("delta", int(np.flatnonzero(~m0)[0]))
    elif case in ("index3", "index6"):
        sq = G.power_map(2)
        extra["tau"] = cosets.get("tau", int(np.flatnonzero(~m0 & ~m0[sq])[0]) if (~m0).any() else 0)
        if case == "index6":
            extra["h_elt"] = cosets.get("h", int(np.flatnonzero(doms[1].mask & ~m0)[0]))
    return AlgebraicDatum(case, G, G0, tuple(acts), **extra)


def cmd_hodge(cfg: RunConfig, path) -> int:
    datum = load_datum(path)
    if datum.case == "unmixed":
        free, D = verify_unmixed(datum.G, datum.actions)
    else:
        free = datum.is_free()
        D = datum.diamond() if free else None
    chi = datum.chi
    c = chern_invariants(chi)
    rec = {"case": datum.case, "order": datum.G.order, "genera": list(datum.genera), "free": bool(free),
           "chi": c.chi, "e": c.euler, "K3": c.k_cubed,
           "diamond": list(D.as_tuple()) if D is not None else None}
    if cfg.fmt == "json":
        _emit(json.dumps(rec) + "\n", cfg.out)
    else:
        lines = [f"{k}\t{v}" for k, v in rec.items()]
        _emit("\n".join(lines) + "\n", cfg.out)
    if not free:
        print("the action is not free", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def _resolve_group(spec: str, cat: Catalog) -> tuple[grp.GroupTable, CatalogEntry | None]:
    if Path(spec).is_file():
        # datum files are accepted too; their extra lines are ignored here
        records, _ = parse_group_records(Path(spec).read_text(encoding="utf-8").splitlines(), stop_words=DATUM_WORDS)
        if not records:
            raise ValueError(f"{spec}: no group record")
        G = build_record(records[0])
        return G, cat.identify(G)
    entry = cat.find(spec)
    if entry is not None:
        return entry.group, entry
    family, _, params = spec.partition(":")
    nums = [int(p) for p in params.split(",") if p] if params else []
    G = make_named(family, *nums)
    return G, cat.identify(G)


def cmd_group(cfg: RunConfig, spec: str) -> int:
    cat = _catalog(cfg)
    G, entry = _resolve_group(spec, cat)
    classes = grp.conjugacy_classes(G)
    profile = [f"{int(G.element_orders[c[0]])}:{len(c)}" for c in classes]
    degrees = list(character_table(G).degrees) if G.order <= 2000 else None
    rec = {"order": G.order, "classes": len(classes), "profile": " ".join(profile),
           "degrees": " ".join(map(str, degrees)) if degrees else "-",
           "identified": f"{entry.name} {entry.id_string()}" if entry else "-"}
    if cfg.fmt == "json":
        _emit(json.dumps(rec) + "\n", cfg.out)
    else:
        _emit("".join(f"{k}\t{v}\n" for k, v in rec.items()), cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="trifold", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, cases=True):
        p.add_argument("--chi", type=int, default=-1)
        if cases:
            p.add_argument("--case", choices=CASES + ("unmixed", "all"), default="all")
        p.add_argument("--min-order", type=int, default=1)
        p.add_argument("--max-order", type=int, default=None)
        p.add_argument("--catalog", action="append", metavar="PATH",
                       help="group catalog file (repeatable); default: *.txt in $TRIFOLD_CATALOG_DIR")
        p.add_argument("--nmax", metavar="PATH", help="g<TAB>N_max table; default: Hurwitz bound 84(g-1)")
        p.add_argument("--format", choices=("tsv", "json"), default="tsv")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--out", metavar="PATH")

    common(sub.add_parser("numdata", help="admissible numerical data"))
    common(sub.add_parser("classify", help="search for algebraic data and Hodge numbers"))
    p = sub.add_parser("hodge", help="verify a datum file and print its Hodge diamond")
    p.add_argument("datum")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--out", metavar="PATH")
    p = sub.add_parser("group", help="describe a group (catalog name, family:params or record file)")
    p.add_argument("spec")
    p.add_argument("--catalog", action="append", metavar="PATH")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--out", metavar="PATH")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        if args.command == "numdata":
            if cfg.case == "unmixed":
                raise ValueError("numerical data are enumerated for the mixed cases")
            return cmd_numdata(cfg)
        if args.command == "classify":
            return cmd_classify(cfg)
        if args.command == "hodge":
            return cmd_hodge(cfg, args.datum)
        return cmd_group(cfg, args.spec)
    except (TrifoldError, ValueError, OSError) as exc:
        print(f"trifold: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
