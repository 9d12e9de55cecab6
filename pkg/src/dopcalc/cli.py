"""Command-line front end.

Usage: ``dopcalc COMMAND RINGFILE [options]``; ``RINGFILE`` may be ``-``
for standard input.  Reports go to stdout, diagnostics to stderr.  Exit
status is 0 on success, 1 when a verdict is inconclusive at the given
bounds and 2 on errors.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .exactalg import ParseError
from .groebner import DegreeBoundTooSmall
from .tables import Report, RunConfig, parse_ring

COMMANDS = ("dops", "svdb", "lc", "theorem-a", "horrocks", "dsimple", "frobenius",
            "torsion-scan", "depth", "leftright")

OK, INCONCLUSIVE, ERROR = 0, 1, 2


class UsageError(ValueError):
    pass


def _window(text):
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like LO:HI, got {text!r}")


def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _str_list(text):
    return tuple(x.strip() for x in text.split(",") if x.strip())


def build_parser():
    ap = argparse.ArgumentParser(prog="dopcalc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"dopcalc {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("ring", help="ring description file, or - for stdin")
    ap.add_argument("--order", type=int, default=None, help="operator order bound")
    ap.add_argument("--window", type=_window, default=(-2, 2), help="degree window LO:HI")
    ap.add_argument("--tmax", type=int, default=0, help="last power of the ideal")
    ap.add_argument("--nmax", type=int, default=0, help="last principal parts order")
    ap.add_argument("--primes", type=_int_list, default=(), help="comma-separated primes")
    ap.add_argument("--format", dest="fmt", choices=("tsv", "json"), default="tsv")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--degree-cap", type=int, default=64)
    ap.add_argument("--i", type=int, default=None, help="cohomological index")
    ap.add_argument("--e", type=int, default=1, help="Frobenius exponent")
    ap.add_argument("--imax", type=int, default=2, help="largest index for the depth probe")
    ap.add_argument("--depth", type=int, default=2, help="degree depth for dsimple")
    ap.add_argument("--method", choices=("koszul", "powers"), default="powers")
    ap.add_argument("--ideal", type=_str_list, default=(),
                    help="generators of the ideal for lc (default: all variables)")
    ap.add_argument("--quotient", type=_str_list, default=(),
                    help="use the module R/(f1,...) instead of R")
    return ap


DEFAULT_ORDER = {"horrocks": 1, "torsion-scan": 3, "frobenius": 6}
DEFAULT_I = {"horrocks": 1}


def make_config(ns):
    order = ns.order if ns.order is not None else DEFAULT_ORDER.get(ns.command, 2)
    i = ns.i if ns.i is not None else DEFAULT_I.get(ns.command, 0)
    cfg = RunConfig(order=order, window=ns.window, tmax=ns.tmax, nmax=ns.nmax,
                    primes=ns.primes, fmt=ns.fmt, workers=ns.workers,
                    degree_cap=ns.degree_cap, i=i, e=ns.e, imax=ns.imax,
                    depth=ns.depth, method=ns.method, ideal=ns.ideal,
                    quotient=ns.quotient)
    return cfg.validate()


def _module(R, cfg):
    from .graded import GradedModule, poly_to_elem

    if not cfg.quotient:
        return R.free([0])
    return GradedModule(R, [0], [poly_to_elem(R.parse(f)) for f in cfg.quotient])


def _dops_orders(args):
    from .diffops import OperatorSpace

    desc, m, lo, hi = args
    return OperatorSpace(desc.algebra(), m).table(lo, hi)


def _map(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


# ---------------------------------------------------------------------------
# commands; each fills the report and returns an exit status


def cmd_dops(desc, cfg, rep):
    lo, hi = cfg.window
    tables = _map(_dops_orders, [(desc, m, lo, hi) for m in range(cfg.order + 1)], cfg.workers)
    t = rep.table("operators", ["order", "degree", "dim"])
    for m, tab in enumerate(tables):
        for k in range(lo, hi + 1):
            t.add(m, k, tab[k])
    rep.verdict = "ok"
    return OK


def _colimit_rows(t, table, stages):
    for i, k, c in table.rows():
        t.add(i, k, [c.dims[s] for s in stages], c.status(), c.dim)


def cmd_svdb(desc, cfg, rep):
    from .cohomology import svdb

    R = desc.algebra()
    lo, hi = cfg.window
    table = svdb(R, _module(R, cfg), [cfg.i], lo, hi, cfg.nmax)
    t = rep.table("svdb", ["i", "degree", "stage_dims", "status", "dim"])
    _colimit_rows(t, table, range(0, cfg.nmax + 1))
    stable = table.all_stable()
    rep.verdict = "stable" if stable else "inconclusive"
    return OK if stable else INCONCLUSIVE


def cmd_lc(desc, cfg, rep):
    from .cohomology import local_cohomology

    R = desc.algebra()
    lo, hi = cfg.window
    J = [R.parse(f) for f in cfg.ideal] if cfg.ideal else [R.var(j) for j in range(R.nvars)]
    table = local_cohomology(R, J, _module(R, cfg), cfg.i, lo, hi, cfg.tmax, cfg.method)
    t = rep.table("local_cohomology", ["i", "degree", "stage_dims", "status", "dim"])
    _colimit_rows(t, table, range(1, cfg.tmax + 1))
    stable = table.all_stable()
    rep.verdict = "stable" if stable else "inconclusive"
    return OK if stable else INCONCLUSIVE


def _comparison_status(report):
    """``match`` when every stage cell and every comparable colimit cell agrees."""
    mism = [c for c in report.stage_cells if c.verdict != "match"]
    mism += [c for c in report.colimit_cells if c.verdict == "mismatch"]
    inc = [c for c in report.colimit_cells if c.verdict == "inconclusive"]
    if mism:
        return f"mismatch ({len(mism)} cells)", INCONCLUSIVE
    if inc:
        return f"match (stages); {len(inc)} colimit cells unstable", OK
    return "match", OK


def cmd_theorem_a(desc, cfg, rep):
    from .cohomology import theorem_a_compare

    R = desc.algebra()
    lo, hi = cfg.window
    res = theorem_a_compare(R, cfg.i, lo, hi, cfg.nmax)
    rep.notes += res.notes
    t = rep.table("stages", ["order", "degree", "lhs", "rhs", "verdict"])
    for c in res.stage_cells:
        n, k = c.key
        t.add(n, k, c.lhs, c.rhs, c.verdict)
    t = rep.table("colimit", ["degree", "lhs_status", "lhs_dim", "rhs_status", "rhs_dim",
                              "verdict"])
    for c in res.colimit_cells:
        t.add(c.key[0], c.lhs.status(), c.lhs.dim, c.rhs.status(), c.rhs.dim, c.verdict)
    rep.verdict, code = _comparison_status(res)
    return code


def cmd_horrocks(desc, cfg, rep):
    from .cohomology import horrocks_check

    R = desc.algebra()
    lo, hi = cfg.window
    res = horrocks_check(R, cfg.order, cfg.i, lo, hi, cfg.tmax)
    rep.notes += res.notes
    t = rep.table("horrocks", ["degree", "ext", "local_cohomology_stages", "status", "verdict"])
    for c in res.colimit_cells:
        t.add(c.key[0], c.lhs, [c.rhs.dims[s] for s in sorted(c.rhs.dims)], c.rhs.status(),
              c.verdict)
    vs = {c.verdict for c in res.colimit_cells}
    if vs <= {"match"}:
        rep.verdict = "match"
        return OK
    rep.verdict = "mismatch" if "mismatch" in vs else "inconclusive"
    return INCONCLUSIVE


def cmd_dsimple(desc, cfg, rep):
    from .diffops import d_simplicity_probe

    res = d_simplicity_probe(desc.algebra(), cfg.order, cfg.depth)
    t = rep.table("simplicity", ["degree", "rank", "target"])
    for k in sorted(res.cells):
        r, tgt = res.cells[k]
        t.add(k, r, tgt)
    rep.verdict = res.verdict()
    return OK


def cmd_frobenius(desc, cfg, rep):
    from .diffops import frobenius_operators, graded_piece_witness, verified_order

    R = desc.algebra()
    lo, hi = cfg.window
    tab, F = frobenius_operators(R, cfg.e, lo, hi)
    t = rep.table("frobenius", ["degree", "dim"])
    for k in range(lo, hi + 1):
        t.add(k, tab[k])
    t = rep.table("degree0", ["index", "verified_order", "image_ranks", "graded_piece_witness"])
    top = (cfg.order + 2) * max(R.weights, default=1)
    found = False
    for j, op in enumerate(F.operators(0)):
        vo = verified_order(op, R.free([0]), 0, top, cfg.order)
        w = graded_piece_witness(op, 0, top)
        ranks = [op.rank_on(d) for d in range(0, cfg.order + 1)]
        t.add(j, vo, ranks, None if w is None else list(w))
        found = found or (vo is not None and w is not None)
    rep.verdict = "degree-0 operator outside graded projections found" if found else "ok"
    return OK


def cmd_torsion_scan(desc, cfg, rep):
    from .reduction import torsion_scan

    RZ = desc.integral()
    lo, hi = cfg.window
    if not cfg.primes:
        raise UsageError("torsion-scan needs --primes")
    res = torsion_scan(RZ, cfg.primes, cfg.order, lo, hi, cfg.workers)
    rep.notes += [f"assumption: {h}" for h in res.hypotheses]
    for p in res.primes():
        for reason in res.checks[p].reasons:
            rep.notes.append(f"p={p}: {reason}")
    t = rep.table("cells", ["prime", "order", "degree", "dimQ", "dimFp", "excess", "verdict"])
    for r in res.rows:
        t.add(*r.as_tuple())
    t = rep.table("primes", ["prime", "verdict"])
    for p, v in res.summary().items():
        t.add(p, v)
    rep.verdict = ", ".join(f"{p}:{v}" for p, v in res.summary().items())
    return OK


def cmd_depth(desc, cfg, rep):
    from .cohomology import depth_probe

    R = desc.algebra()
    lo, hi = cfg.window
    res = depth_probe(R, lo, hi, cfg.imax, cfg.nmax)
    t = rep.table("svdb", ["i", "degree", "stage_dims", "status", "dim"])
    for i in sorted(res.tables):
        _colimit_rows(t, res.tables[i], range(0, cfg.nmax + 1))
    rep.verdict = res.summary()
    if res.first_nonzero is None and res.inconclusive:
        return INCONCLUSIVE
    return OK


def cmd_leftright(desc, cfg, rep):
    from .cohomology import left_right_compare

    R = desc.algebra()
    if R.is_artinian():
        res = left_right_compare(R)
    else:
        lo, hi = cfg.window
        res = left_right_compare(R, cfg.order, lo, hi)
    rep.notes.append(f"order={res.order}")
    t = rep.table("structures", ["structure", "degree", "dim", "generators"])
    for s in (res.left, res.right):
        for k in sorted(s.hilbert):
            t.add(s.name, k, s.hilbert[k], s.generators.get(k, 0))
    t = rep.table("summary", ["structure", "generator_count", "generator_degrees"])
    for s in (res.left, res.right):
        t.add(s.name, s.count, s.multiset())
    rep.verdict = "identical" if res.identical else "different"
    if not R.is_artinian():
        rep.notes.append(f"generator counts complete from degree {res.left.complete_from}")
    return OK


HANDLERS = {
    "dops": cmd_dops,
    "svdb": cmd_svdb,
    "lc": cmd_lc,
    "theorem-a": cmd_theorem_a,
    "horrocks": cmd_horrocks,
    "dsimple": cmd_dsimple,
    "frobenius": cmd_frobenius,
    "torsion-scan": cmd_torsion_scan,
    "depth": cmd_depth,
    "leftright": cmd_leftright,
}


def _join_negative(argv):
    """Let ``--window -2:2`` through argparse, which would read ``-2:2`` as a flag."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--window":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--window={nxt}")
        else:
            out.append(tok)
    return out


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        ns = ap.parse_args(_join_negative(sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as exc:
        return ERROR if exc.code else OK
    try:
        if ns.ring == "-":
            text = sys.stdin.read()
        else:
            with open(ns.ring, encoding="utf-8") as fh:
                text = fh.read()
        desc = parse_ring(text)
        cfg = make_config(ns)
        if desc.field == "ZZ" and ns.command != "torsion-scan":
            raise UsageError("'field ZZ' is only accepted by torsion-scan")
        rep = Report(ns.command, desc.to_text(), cfg.embedded(), __version__)
        code = HANDLERS[ns.command](desc, cfg, rep)
    except ParseError as err:
        print(f"dopcalc: parse error: {err}", file=stderr)
        return ERROR
    except DegreeBoundTooSmall as err:
        print(f"dopcalc: {err}; try a larger --degree-cap or window", file=stderr)
        return ERROR
    except (OSError, ValueError) as err:
        hint = ""
        name = type(err).__name__
        if name == "WindowTooNarrow":
            hint = "; widen --window"
        print(f"dopcalc: {name}: {err}{hint}", file=stderr)
        return ERROR
    stdout.write(rep.render(cfg.fmt))
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
