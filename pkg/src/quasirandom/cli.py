"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 a guaranteed inequality was
observed false.  Errors go to stderr as one ``CODE: message`` line.  Output
depends only on the flags (runtimes are left out), so reruns are
byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import irreps, productfree, setfun, solver, spectral, theorems
from .errors import CapExceededError, InputError, QuasirandomError
from .groups import DEFAULT_CAPS, conjugacy_classes, iter_table_lines, make_group
from .setfun import Subset

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"usage: {message}")


def _common(p: argparse.ArgumentParser, group=True, seed=False, trials=False):
    if group:
        p.add_argument("--group", "--type", dest="group", required=True, help="group descriptor, e.g. psl2:7, sym:4, cyclic:6*cyclic:2")
    if seed:
        p.add_argument("--seed", type=int, default=0, help="master seed (64-bit integer)")
    if trials:
        p.add_argument("--trials", type=int, default=20, help="number of seeded trials")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quasirandom", description="Quasirandom groups: spectra, characters, bounds and product-free sets.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("group", help="describe a group or export its Cayley table")
    _common(p)
    p.add_argument("--export", action="store_true", help="write the Cayley table file (n, then n rows)")
    p.add_argument("--describe", action="store_true", help="print order, kind and class sizes (default)")

    subset_help = "comma list of indices, a subset JSON file, 'all', 'empty' or random:DENSITY"
    p = sub.add_parser("spectrum", help="singular values of the bipartite Cayley graph of A")
    _common(p, seed=True)
    p.add_argument("--A", required=True, help=subset_help)
    p.add_argument("--tolerance", type=float, help="cluster tolerance (default max(1e-6 lambda_1, 1e-9))")
    p.add_argument("--cap-spectral", type=int, default=DEFAULT_CAPS.spectral)

    p = sub.add_parser("chartab", help="character table")
    _common(p)

    p = sub.add_parser("triples", help="count (a, b, c) with ab = c and check the product bounds")
    _common(p, seed=True)
    for name in ("A", "B", "C"):
        p.add_argument(f"--{name}", required=True, help=subset_help)
    p.add_argument("--k", type=int, help="minimum nontrivial irrep dimension (default: computed)")
    p.add_argument("--eta", type=float, default=0.5)

    p = sub.add_parser("quadruples", help="quadruple sum and quasirandomness constant of a function")
    _common(p, seed=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--f", help="function JSON file {group, re, im}")
    src.add_argument("--A", help=subset_help + " (uses the indicator)")

    p = sub.add_parser("verify", help="seeded verification suites")
    _common(p, seed=True, trials=True)
    p.add_argument("--suite", choices=("spectral", "bounds", "solver", "productfree"), required=True)
    p.add_argument("--k", type=int, help="minimum nontrivial irrep dimension (default: computed)")
    p.add_argument("--backtrack", type=int, default=2)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--cap-spectral", type=int, default=DEFAULT_CAPS.spectral)

    p = sub.add_parser("solve", help="run the greedy solver on a constraint-system file")
    _common(p, group=False, seed=True)
    p.add_argument("--system", required=True, help="constraint-system JSON file")
    p.add_argument("--backtrack", type=int, default=2)
    p.add_argument("--k", type=int, help="minimum nontrivial irrep dimension (default: computed if feasible)")

    p = sub.add_parser("productfree", help="product-free constructions and exact search")
    p.add_argument("--mode", choices=("exact", "coset", "erdos", "rep"), required=True)
    p.add_argument("--group", "--type", dest="group", help="group descriptor (not used by erdos)")
    p.add_argument("--generators", help="comma list of subgroup generators (coset mode)")
    p.add_argument("--X", help="comma list or JSON file of nonzero integers (erdos mode)")
    p.add_argument("--delta", type=float, default=0.05, help="cluster radius (rep mode)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="lambda_2 against its bound over a density grid (CSV)")
    _common(p, seed=True, trials=True)
    p.add_argument("--densities", default="0.1,0.3,0.5,0.7,0.9", help="comma list of densities")
    p.add_argument("--k", type=int)
    p.add_argument("--cap-spectral", type=int, default=DEFAULT_CAPS.spectral)
    p.set_defaults(format="csv")
    return parser


# -- argument helpers ---------------------------------------------------------

def parse_subset(text: str, G, rng: np.random.Generator) -> Subset:
    text = text.strip()
    if text == "all":
        return Subset.full(G.order)
    if text in ("empty", ""):
        return Subset.empty(G.order)
    if text.startswith("random:"):
        try:
            density = float(text.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad density in {text!r}") from None
        if not 0 <= density <= 1:
            raise InputError("density must lie in [0, 1]")
        return Subset.random(G.order, density, rng)
    if text.endswith(".json"):
        descriptor, A = setfun.subset_from_json(_read(text), G.order)
        return A
    return Subset.from_indices(G.order, _int_list(text))


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"expected a comma-separated list of integers, got {text!r}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _strip_runtime(d):
    if isinstance(d, dict):
        return {k: _strip_runtime(v) for k, v in d.items() if k != "runtime"}
    if isinstance(d, list):
        return [_strip_runtime(v) for v in d]
    return d


class _Out:
    """Collects JSON documents or CSV rows and writes them once at the end."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.buf = io.StringIO()
        self.writer = csv.writer(self.buf, lineterminator="\n")
        self.header_done = False

    def doc(self, d: dict, header=None, rows=None):
        if self.fmt == "json":
            self.buf.write(json.dumps(_strip_runtime(d)) + "\n")
        else:
            if header and not self.header_done:
                self.writer.writerow(header)
                self.header_done = True
            for row in rows or []:
                self.writer.writerow(row)

    def text(self, s: str):
        self.buf.write(s)

    def flush(self, path: str | None):
        data = self.buf.getvalue()
        if path:
            Path(path).write_text(data)
        else:
            sys.stdout.write(data)


_REPORT_HEADER = ["statement", "trial", "clause", "relation", "bound", "observed", "status"]


def _report_rows(r: theorems.BoundReport) -> list[list]:
    trial = r.inputs.get("trial", "")
    return [[r.statement, trial, c.name, c.relation, repr(c.bound), repr(c.observed), c.status] for c in r.clauses]


# -- commands -----------------------------------------------------------------

def cmd_group(args, out: _Out) -> int:
    G = make_group(args.group)
    if args.export:
        for line in iter_table_lines(G):
            out.text(line + "\n")
        return EXIT_OK
    d = {"group": G.descriptor, "kind": G.kind, "order": G.order, "identity": G.identity}
    try:
        cc = conjugacy_classes(G)
        d["class_count"] = len(cc)
        d["class_sizes"] = cc.sizes
    except CapExceededError:
        d["class_count"] = None
    out.doc(d, ["group", "kind", "order", "class_count"], [[d["group"], d["kind"], d["order"], d["class_count"]]])
    return EXIT_OK


def cmd_spectrum(args, out: _Out) -> int:
    G = make_group(args.group)
    A = parse_subset(args.A, G, np.random.default_rng(args.seed))
    rep = spectral.spectral_report(G, A, tau=args.tolerance, cap=args.cap_spectral)
    out.doc(rep.to_dict(), ["index", "singular_value"], [[i, repr(v)] for i, v in enumerate(rep.singular_values)])
    return EXIT_OK


def cmd_chartab(args, out: _Out) -> int:
    G = make_group(args.group)
    T = irreps.character_table(G)
    rows = [[i, d] + [f"{z.real:.10g}{z.imag:+.10g}j" for z in T.table[i]] for i, d in enumerate(T.dims)]
    out.doc(T.to_dict(), ["character", "dim"] + [f"class{r}" for r in T.representatives], rows)
    return EXIT_OK


def cmd_triples(args, out: _Out) -> int:
    G = make_group(args.group)
    rng = np.random.default_rng(args.seed)
    A, B, C = (parse_subset(getattr(args, n), G, rng) for n in ("A", "B", "C"))
    try:
        k, _ = theorems.resolve_k(G, args.k)
    except CapExceededError:
        k = None
    if k is None:
        T = setfun.count_triples(G, A, B, C)
        out.doc({"group": G.descriptor, "count": T}, ["group", "count"], [[G.descriptor, T]])
        return EXIT_OK
    rep = theorems.verify_triple_bound(G, A, B, C, k, args.eta)
    if args.k is None:
        rep.inputs["k_source"] = theorems.resolve_k(G)[1]
    d = rep.to_dict()
    d["count"] = rep.inputs["triples"]
    out.doc(d, _REPORT_HEADER, _report_rows(rep))
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def cmd_quadruples(args, out: _Out) -> int:
    G = make_group(args.group)
    if args.f:
        descriptor, f = setfun.function_from_json(_read(args.f))
        if f.n != G.order:
            raise InputError(f"function has {f.n} values but {G.descriptor} has order {G.order}")
        values = f.values
    else:
        values = parse_subset(args.A, G, np.random.default_rng(args.seed)).indicator()
    q = setfun.count_quadruples(G, values)
    d = {"group": G.descriptor, "quadruple_sum": q, "c3": q / G.order**3, "sum_zero": bool(abs(np.sum(values)) <= 1e-9 * G.order)}
    out.doc(d, list(d), [list(d.values())])
    return EXIT_OK


def _spectral_trial(G, i, seed, k, tol, cap):
    rng = np.random.default_rng(theorems.trial_seed(seed, i))
    A = Subset.random(G.order, rng.uniform(0.1, 0.9), rng)
    rep = spectral.spectral_report(G, A, tau=tol, cap=cap)
    lem = spectral.verify_lemma_3_2(G, A, k, report=rep)
    a, n = A.cardinality, G.order
    cycles = spectral.count_four_cycles(G, A)

    def close(name, observed, expected):
        ok = abs(observed - expected) <= 1e-6 * max(abs(expected), 1.0)
        return theorems.Clause(name, "==", float(expected), float(observed), "pass" if ok else "fail")

    clauses = [
        close("lambda1=|A|", rep.lambda1, a),
        close("sum lambda^2=|A|n", rep.sum_sq, a * n),
        close("sum lambda^4=4-cycles", rep.sum_4, cycles),
        theorems.Clause("lambda2", "<=", lem.bound, lem.lambda2, "pass" if lem.passed else "fail"),
        theorems.Clause(
            "multiplicity", ">=", float(k), float(lem.multiplicity),
            "n/a" if lem.multiplicity_ok is None else ("pass" if lem.multiplicity_ok else "fail"),
        ),
    ]
    return theorems.BoundReport("spectral", {"group": G.descriptor, "trial": i, "size": a, "k": k}, clauses)


def _solver_trial(G, i, seed, k, backtrack):
    rng = np.random.default_rng(theorems.trial_seed(seed, i))
    m = 2 + int(rng.integers(2))
    sets = {F: Subset.random(G.order, rng.uniform(0.2, 1.0), rng) for r in range(1, m + 1) for F in itertools.combinations(range(1, m + 1), r)}
    system = solver.ConstraintSystem.forward_products(G, m, sets)
    outcome = solver.solve(system, seed=int(rng.integers(2**32)), backtrack_depth=backtrack, k=k)
    clauses = [theorems.Clause("sound", "==", 1.0, 1.0, "pass")]  # solve re-verifies or raises
    clauses.append(
        theorems.Clause("guarantee", "==", 1.0, float(outcome.solved), "n/a" if not outcome.guaranteed else ("pass" if outcome.solved else "fail"))
    )
    if m == 2 and G.order <= 200:
        A1, A2, A12 = sets[(1,)], sets[(2,)], sets[(1, 2)]
        prods = G.mult_vec(A1.indices[:, None], A2.indices[None, :])
        solvable = bool(A12.mask[prods].any())
        clauses.append(theorems.Clause("complete", "==", float(solvable), float(outcome.solved), "pass" if solvable == outcome.solved else "fail"))
    inputs = {"group": G.descriptor, "trial": i, "m": m, "status": outcome.status, "witness": outcome.witness}
    return theorems.BoundReport("solver", inputs, clauses)


def _productfree_trial(G, i, seed):
    rng = np.random.default_rng(theorems.trial_seed(seed, i))
    clauses = []
    g = int(rng.integers(G.order))
    try:
        res = productfree.coset_product_free(G, [g])
        ok = productfree.is_product_free(G, Subset.from_indices(G.order, res.elements))
        clauses.append(theorems.Clause("coset", "==", 1.0, float(ok and res.verified), "pass" if ok and res.verified else "fail"))
    except InputError:
        clauses.append(theorems.Clause("coset", "==", 1.0, 0.0, "n/a"))  # <g> is the whole group
    if G.order <= DEFAULT_CAPS.exact_search and i == 0:
        res = productfree.max_product_free_exact(G)
        clauses.append(theorems.Clause("exact", ">=", 1.0, float(res.verified), "pass" if res.verified else "fail"))
    if G.kind in ("symmetric", "alternating") and i == 0:
        res = productfree.thm_4_6_construct(G)
        clauses.append(theorems.Clause("rep", "==", 1.0, float(res.verified), "pass" if res.verified else "fail"))
    return theorems.BoundReport("productfree", {"group": G.descriptor, "trial": i, "generator": g}, clauses)


def cmd_verify(args, out: _Out) -> int:
    G = make_group(args.group)
    if args.trials < 0:
        raise InputError("trials must be non-negative")
    if args.suite == "spectral":
        k, _ = theorems.resolve_k(G, args.k)
        reports = (_spectral_trial(G, i, args.seed, k, args.tolerance, args.cap_spectral) for i in range(args.trials))
    elif args.suite == "bounds":
        reports = theorems.bounds_trials(G, args.trials, args.seed, args.k)
    elif args.suite == "solver":
        try:
            k, _ = theorems.resolve_k(G, args.k)
        except CapExceededError:
            k = None
        reports = (_solver_trial(G, i, args.seed, k, args.backtrack) for i in range(args.trials))
    else:
        reports = (_productfree_trial(G, i, args.seed) for i in range(args.trials))
    failed = False
    for rep in reports:
        failed |= not rep.passed
        out.doc(rep.to_dict(), _REPORT_HEADER, _report_rows(rep))
    return EXIT_VIOLATION if failed else EXIT_OK


def cmd_solve(args, out: _Out) -> int:
    system = solver.system_from_json(_read(args.system))
    k = args.k
    if k is None:
        try:
            k, _ = theorems.resolve_k(system.group)
        except CapExceededError:
            k = None
    outcome = solver.solve(system, seed=args.seed, backtrack_depth=args.backtrack, k=k)
    d = outcome.to_dict()
    out.doc(d, ["status", "witness"], [[outcome.status, " ".join(map(str, outcome.witness or []))]])
    return EXIT_VIOLATION if outcome.guaranteed and not outcome.solved else EXIT_OK


def cmd_productfree(args, out: _Out) -> int:
    if args.mode == "erdos":
        if not args.X:
            raise InputError("erdos mode needs --X")
        X = json.loads(_read(args.X)) if args.X.endswith(".json") else _int_list(args.X)
        Y = productfree.erdos_sum_free(X)
        ok = productfree.is_sum_free(Y) and len(Y) >= math.ceil(len(set(X)) / 3)
        res = productfree.SearchResult("erdos", Y, ok, len(Y))
    else:
        if not args.group:
            raise InputError(f"{args.mode} mode needs --group")
        G = make_group(args.group)
        if args.mode == "exact":
            res = productfree.max_product_free_exact(G)
        elif args.mode == "coset":
            if args.generators is None:
                raise InputError("coset mode needs --generators")
            res = productfree.coset_product_free(G, _int_list(args.generators))
        else:
            res = productfree.thm_4_6_construct(G, args.delta)
    out.doc(res.to_dict(), ["method", "size", "verified", "elements"], [[res.method, res.size, res.verified, " ".join(map(str, res.elements))]])
    return EXIT_OK if res.verified else EXIT_VIOLATION


def cmd_sweep(args, out: _Out) -> int:
    G = make_group(args.group)
    k, _ = theorems.resolve_k(G, args.k)
    try:
        densities = [float(t) for t in args.densities.split(",") if t.strip()]
    except ValueError:
        raise InputError("densities must be a comma list of numbers") from None
    failed = False
    trial = 0
    for density in densities:
        for _ in range(args.trials):
            rng = np.random.default_rng(theorems.trial_seed(args.seed, trial))
            trial += 1
            A = Subset.random(G.order, density, rng)
            lem = spectral.verify_lemma_3_2(G, A, k, report=spectral.spectral_report(G, A, cap=args.cap_spectral))
            failed |= not lem.passed
            row = {"group": G.descriptor, "size": A.cardinality, "lambda2": lem.lambda2, "bound": lem.bound, "pass": lem.passed}
            out.doc(row, list(row), [[row["group"], row["size"], repr(row["lambda2"]), repr(row["bound"]), row["pass"]]])
    return EXIT_VIOLATION if failed else EXIT_OK


COMMANDS = {
    "group": cmd_group,
    "spectrum": cmd_spectrum,
    "chartab": cmd_chartab,
    "triples": cmd_triples,
    "quadruples": cmd_quadruples,
    "verify": cmd_verify,
    "solve": cmd_solve,
    "productfree": cmd_productfree,
    "sweep": cmd_sweep,
}


def run(argv: list[str] | None = None) -> int:
    """Parse ``argv``, run the command and return the exit code."""
    try:
        args = build_parser().parse_args(argv)
        if hasattr(args, "seed") and not 0 <= args.seed < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")
        out = _Out(args.format)
        code = COMMANDS[args.command](args, out)
        out.flush(args.out)
        return code
    except QuasirandomError as e:
        print(str(e).splitlines()[0], file=sys.stderr)
        return EXIT_USAGE


def main(argv: list[str] | None = None):
    try:
        code = run(argv)
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the final flush
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main()
