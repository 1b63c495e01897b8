"""Command-line entry point: ``qfinder find|verify|brackets|noether``.

Exit codes: 0 ok, 2 parse or input error, 3 unsupported dimension,
4 a produced integral failed the exact dI/dt check, 5 drift above tolerance.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from typing import Sequence, TextIO

from .catalog import bracket_identities, energy, named_set
from .constraints import Potential
from .dynamics import drift, initial_conditions, integrate_batch
from .geometry import GeometryConfig, UnsupportedDimension
from .parser import ParseError, parse_potential
from .phase import functional_independence, involution_check, total_derivative
from .qfi import QFI, noether_generator
from .search import FAMILIES, find_integrals

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_UNSOUND = 4
EXIT_DRIFT = 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _potential(args) -> Potential:
    try:
        GeometryConfig(args.dim)
    except UnsupportedDimension as e:
        raise CliError(str(e), EXIT_DIMENSION) from None
    try:
        expr = parse_potential(args.potential, args.dim)
    except ParseError as e:
        raise CliError(f"cannot parse potential:\n{e.pretty()}", EXIT_PARSE) from None
    return Potential(args.dim, expr.to_ring())


def _families(text: str) -> list[int]:
    if text.strip().lower() == "all":
        return list(FAMILIES)
    try:
        out = sorted({int(p) for p in text.split(",") if p.strip()})
    except ValueError:
        raise CliError(f"--families expects 'all' or a list like 1,3; got {text!r}", EXIT_PARSE) from None
    if not out or any(f not in FAMILIES for f in out):
        raise CliError(f"--families entries must be among 1, 2, 3; got {text!r}", EXIT_PARSE)
    return out


@contextmanager
def _output(path: str | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _dump(doc, fh: TextIO) -> None:
    json.dump(doc, fh, indent=2)
    fh.write("\n")


# -- loading integrals ------------------------------------------------------

def _load_qfis(path: str, dim: int) -> list[tuple[str, QFI]]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise CliError(f"cannot read {path}: {e}", EXIT_PARSE) from None
    records = []
    if isinstance(doc, dict) and "families" in doc:
        for fam in doc["families"]:
            records.extend(fam["qfis"])
    elif isinstance(doc, dict) and "qfis" in doc:
        records = doc["qfis"]
    elif isinstance(doc, dict) and "terms" in doc:
        records = [doc]
    elif isinstance(doc, list):
        records = doc
    else:
        raise CliError(f"{path}: expected a QFI, a list of QFIs or a find report", EXIT_PARSE)
    out = []
    for i, rec in enumerate(records):
        try:
            I = QFI.from_json(rec)
        except ParseError as e:
            raise CliError(f"{path}: record {i}: {e.pretty()}", EXIT_PARSE) from None
        except (KeyError, TypeError, ValueError) as e:
            raise CliError(f"{path}: record {i} is malformed: {e}", EXIT_PARSE) from None
        if I.dim != dim:
            raise CliError(f"{path}: record {i} has dim {I.dim}, expected {dim}", EXIT_PARSE)
        out.append((rec.get("name") or _record_name(rec, i), I))
    return out


def _record_name(rec: dict, i: int) -> str:
    fam = rec.get("family")
    return f"I{fam}.{i}" if fam else f"Q{i}"


def _auto_qfis(V: Potential) -> list[tuple[str, QFI]]:
    report = _checked_report(V, FAMILIES)
    out = []
    for r in report.results:
        for j, f in enumerate(r.found):
            out.append((f"I{r.family}.{j + 1}", f.qfi))
    return out


def _checked_report(V: Potential, families):
    report = find_integrals(V, families)
    bad = report.unsound()
    if bad:
        lines = "\n".join(f"  family {f.family}: {f.qfi}" for f in bad)
        raise CliError(f"internal verification failure, dI/dt != 0 for:\n{lines}", EXIT_UNSOUND)
    return report


# -- commands ---------------------------------------------------------------

def cmd_find(args) -> int:
    V = _potential(args)
    report = _checked_report(V, _families(args.families))
    with _output(args.out) as fh:
        if args.format == "json":
            _dump(report.to_json(), fh)
            return EXIT_OK
        print(f"potential: V = {V}  (dim {V.dim})", file=fh)
        for r in report.results:
            if r.family == 2:
                print(f"\nIntegral 2: dimension {r.dimension} "
                      f"({r.notes['killing_vector_lfis']} autonomous Killing-vector integrals, "
                      f"{r.notes['time_dependent']} time-dependent)", file=fh)
            elif r.family == 3:
                rates = r.notes["rates"]
                desc = ", ".join(f"lambda^2 = {x['lambda2']} (kernel {x['kernel']}, {x['reality']})"
                                 for x in rates) or "no critical rates"
                print(f"\nIntegral 3: dimension {r.dimension}; {desc}", file=fh)
            else:
                print(f"\nIntegral {r.family}: dimension {r.dimension}", file=fh)
            for j, f in enumerate(r.found, 1):
                extra = ""
                if "sign" in f.tags:
                    extra = f" [lambda^2 = {f.tags['lambda2']}, {'+' if f.tags['sign'] > 0 else '-'}]"
                elif f.tags.get("killing_vector_lfi"):
                    extra = " [Killing vector]"
                print(f"  {j:>3}.{extra} {f.qfi}", file=fh)
        for x in report.inexact_rates:
            print(f"\nirrational critical rate lambda^2 ~ {x.mu:.12g} (root of {x.factor}); "
                  f"numeric only, residual {x.residual:.2e}", file=fh)
    return EXIT_OK


def _qfi_source(args, V: Potential) -> list[tuple[str, QFI]]:
    if args.qfi == "auto":
        return _auto_qfis(V)
    return _load_qfis(args.qfi, V.dim)


def cmd_verify(args) -> int:
    V = _potential(args)
    qfis = _qfi_source(args, V)
    Q, W = initial_conditions(V, args.seeds, args.seed)
    trajs = integrate_batch(V, Q, W, args.t_end, args.step)
    for i, tr in enumerate(trajs):
        if tr.aborted:
            print(f"warning: initial condition {i} hit the singularity at t = {tr.times[-1]:.6g}; "
                  "drift measured on the partial trajectory", file=sys.stderr)
    rows = []
    for name, I in qfis:
        ds = [drift(I, tr) for tr in trajs]
        exact = total_derivative(I, V.hamiltonian).is_zero()
        rows.append({"name": name, "display": str(I), "exact": exact, "drifts": ds, "max": max(ds, default=0.0)})
    ok = all(r["max"] < args.tol for r in rows)
    with _output(args.out) as fh:
        if args.format == "json":
            _dump({"dim": V.dim, "potential": str(V), "t_end": args.t_end, "step": args.step,
                   "seed": args.seed, "tol": args.tol, "passed": ok, "qfis": rows}, fh)
        else:
            print(f"potential: V = {V}  (dim {V.dim}); RK4 h = {args.step}, t_end = {args.t_end}, "
                  f"{args.seeds} initial conditions (seed {args.seed})", file=fh)
            print(f"{'name':<10} {'max drift':>10}  {'exact':<5}  integral", file=fh)
            for r in rows:
                flag = "" if r["max"] < args.tol else "  <-- above tolerance"
                print(f"{r['name']:<10} {r['max']:>10.2e}  {str(r['exact']):<5}  {r['display']}{flag}", file=fh)
            print(f"\n{'all drifts below' if ok else 'drift exceeded'} tolerance {args.tol:g}", file=fh)
    return EXIT_OK if ok else EXIT_DRIFT


def cmd_brackets(args) -> int:
    V = _potential(args)
    pl = V.power_law()
    identities = []
    if args.set == "auto":
        if pl is None:
            named = [("H", energy(V.dim, V.expr))]
        else:
            k, ell = pl
            named = named_set(V.dim, k, ell)
            identities = bracket_identities(V.dim, k, ell)
    else:
        named = _load_qfis(args.set, V.dim)
    names = [n for n, _ in named]
    funcs = [I for _, I in named]
    matrix = involution_check(funcs)
    rank = functional_independence(funcs, samples=max(8, len(funcs)), seed=args.seed) if funcs else 0
    ok = all(v for _, v in identities)
    with _output(args.out) as fh:
        if args.format == "json":
            _dump({"dim": V.dim, "potential": str(V), "names": names, "involution": matrix,
                   "identities": [{"identity": s, "holds": v} for s, v in identities],
                   "rank": rank, "seed": args.seed}, fh)
        else:
            print(f"potential: V = {V}  (dim {V.dim})", file=fh)
            for n, I in named:
                print(f"  {n} = {I}", file=fh)
            if names:
                w = max(len(n) for n in names) + 1
                print("\ninvolution ({F, G} = 0):", file=fh)
                print(" " * w + "".join(f"{n:>{w}}" for n in names), file=fh)
                for n, row in zip(names, matrix):
                    print(f"{n:<{w}}" + "".join(f"{('1' if v else '.'):>{w}}" for v in row), file=fh)
            if identities:
                print("\nidentities:", file=fh)
                for s, v in identities:
                    print(f"  {'ok  ' if v else 'FAIL'} {s}", file=fh)
            print(f"\nfunctional independence rank: {rank} (seed {args.seed})", file=fh)
    return EXIT_OK if ok else EXIT_UNSOUND


def cmd_noether(args) -> int:
    V = _potential(args)
    qfis = _qfi_source(args, V)
    gens = [(name, noether_generator(I)) for name, I in qfis]
    with _output(args.out) as fh:
        if args.format == "json":
            _dump({"dim": V.dim, "potential": str(V),
                   "generators": [{"name": n, **g.to_json()} for n, g in gens]}, fh)
        else:
            print(f"potential: V = {V}  (dim {V.dim})", file=fh)
            for (name, I), (_, g) in zip(qfis, gens):
                print(f"\n{name}: {I}", file=fh)
                for a, e in enumerate(g.eta_display()):
                    print(f"  eta_{a + 1} = {e}", file=fh)
                print(f"  f     = {g.gauge_display()}", file=fh)
    return EXIT_OK


# -- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qfinder", description="Quadratic first integrals of Newtonian systems on E^2 and E^3.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, qfi: bool = False):
        sp.add_argument("--dim", type=int, required=True, help="configuration space dimension (2 or 3)")
        sp.add_argument("--potential", required=True, help='potential, e.g. "-1/r" or "1/2*r^2"')
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--seed", type=int, default=0)
        if qfi:
            sp.add_argument("--qfi", default="auto", help='JSON file with integrals, or "auto" to run the solvers')

    f = sub.add_parser("find", help="solve for all integral families")
    common(f)
    f.add_argument("--families", default="all", help="'all' or a comma list of 1, 2, 3")
    f.set_defaults(func=cmd_find)

    v = sub.add_parser("verify", help="measure numeric drift along RK4 trajectories")
    common(v, qfi=True)
    v.add_argument("--t-end", type=float, default=10.0)
    v.add_argument("--step", type=float, default=1e-3)
    v.add_argument("--seeds", type=int, default=10, help="number of initial conditions")
    v.add_argument("--tol", type=float, default=1e-8)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("brackets", help="Poisson brackets, named identities, independence rank")
    common(b)
    b.add_argument("--set", default="auto", help='"auto" for the named integrals or a JSON file')
    b.set_defaults(func=cmd_brackets)

    n = sub.add_parser("noether", help="gauged Noether generators of integrals")
    common(n, qfi=True)
    n.set_defaults(func=cmd_noether)
    return p


def _glue_values(argv: Sequence[str]) -> list[str]:
    # potentials such as "-1/r" look like flags to argparse
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--potential":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(_glue_values(argv))
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
