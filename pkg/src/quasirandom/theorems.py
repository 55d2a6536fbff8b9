"""Numerical checks of the counting bounds that quasirandomness implies.

Every check returns a BoundReport made of clauses.  A clause whose hypothesis
fails is marked "n/a" instead of passing vacuously or failing, so random
sweeps only ever report genuine violations.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import CapExceededError, InputError
from .groups import FiniteGroup
from .irreps import min_nontrivial_irrep_dim
from .setfun import GroupFunction, Subset, convolve, count_triples, inverse_set, quasirandomness_constant
from .spectral import count_four_cycles

__all__ = [
    "Clause",
    "BoundReport",
    "EquivalenceReport",
    "REL_TOL",
    "splitmix64",
    "trial_seed",
    "resolve_k",
    "verify_triple_bound",
    "lemma_5_1_bad_set",
    "equivalence_report",
    "triple_trials",
    "bad_set_trials",
    "bounds_trials",
]

REL_TOL = 1e-9
_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_K_CACHE: dict = {}  # descriptor -> computed k


def splitmix64(x: int) -> int:
    z = x & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def trial_seed(master: int, i: int) -> int:
    """Seed of trial ``i``: the ``i``-th output of a splitmix64 stream started at ``master``."""
    return splitmix64((master + (i + 1) * _GOLDEN) & _MASK)


def resolve_k(G: FiniteGroup, k: int | None = None) -> tuple[int, str]:
    """``(k, source)``: the caller's value, 1 for a nontrivial abelian group,
    the computed minimum nontrivial irrep dimension, or for psl2:q beyond the
    table cap the formula ``(q-1)/2``."""
    if k is not None:
        if k < 1:
            raise InputError("k must be a positive integer")
        return int(k), "given"
    if G.order >= 2 and G.has_table and np.array_equal(G.table, G.table.T):
        return 1, "abelian"
    if G.descriptor in _K_CACHE:
        return _K_CACHE[G.descriptor], "computed"
    try:
        _K_CACHE[G.descriptor] = min_nontrivial_irrep_dim(G)
        return _K_CACHE[G.descriptor], "computed"
    except CapExceededError:
        if G.kind == "psl2":
            return (G.params["q"] - 1) // 2, "formula"
        raise


@dataclass
class Clause:
    name: str
    relation: str  # "<=" or ">="
    bound: float
    observed: float
    status: str  # "pass", "fail" or "n/a"


def _clause(name: str, observed: float, relation: str, bound: float, applicable: bool = True) -> Clause:
    if not applicable:
        return Clause(name, relation, float(bound), float(observed), "n/a")
    slack = REL_TOL * abs(bound)
    ok = observed <= bound + slack if relation == "<=" else observed >= bound - slack
    return Clause(name, relation, float(bound), float(observed), "pass" if ok else "fail")


@dataclass
class BoundReport:
    statement: str
    inputs: dict
    clauses: list
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.clauses)

    @property
    def applicable(self) -> list:
        return [c for c in self.clauses if c.status != "n/a"]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def csv_rows(self) -> list[list]:
        return [[self.statement, c.name, c.relation, c.bound, c.observed, c.status] for c in self.clauses]


def verify_triple_bound(
    G: FiniteGroup, A: Subset, B: Subset, C: Subset, k: int | None = None, eta: float = 0.5
) -> BoundReport:
    """Count ``T = #{(a,b,c) : ab = c}`` and check it against the product bounds.

    (a) ``T >= 1`` when ``|A||B||C| > n^3/k``; (b) ``T >= (1-eta)|A||B||C|/n``
    when ``|A||B||C| >= n^3/(eta^2 k)``; (c) ``|T - |A||B||C|/n| <=
    sqrt(|A||B||C| n / k)`` unconditionally."""
    if not 0 < eta <= 1:
        raise InputError("eta must lie in (0, 1]")
    t0 = time.perf_counter()
    k, source = resolve_k(G, k)
    n = G.order
    prod = A.cardinality * B.cardinality * C.cardinality
    T = count_triples(G, A, B, C)
    clauses = [
        _clause("exists", T, ">=", 1, prod * k > n**3),
        _clause("count", T, ">=", (1 - eta) * prod / n, prod * eta * eta * k >= n**3),
        _clause("deviation", abs(T - prod / n), "<=", math.sqrt(prod * n / k)),
    ]
    inputs = {
        "group": G.descriptor,
        "sizes": [A.cardinality, B.cardinality, C.cardinality],
        "k": k,
        "k_source": source,
        "eta": eta,
        "triples": T,
    }
    return BoundReport("triples", inputs, clauses, time.perf_counter() - t0)


def lemma_5_1_bad_set(
    G: FiniteGroup,
    A: Subset,
    B: Subset,
    delta: float,
    k: int | None = None,
    ts: list[float] | None = None,
) -> tuple[Subset, BoundReport]:
    """Elements ``x`` with ``|A ∩ xB| <= (1-delta) r s n`` and the size bound.

    ``r, s`` are the densities of ``A, B``.  The bound ``|bad| <= t n`` is
    checked for each ``t`` in ``ts`` (default: the least admissible ``t``,
    ``1/(delta^2 k r s)``); ``t`` is admissible when ``r s t >= 1/(delta^2 k)``."""
    if not 0 < delta <= 1:
        raise InputError("delta must lie in (0, 1]")
    t0 = time.perf_counter()
    k, source = resolve_k(G, k)
    n = G.order
    r, s = A.density, B.density
    # |A ∩ xB| = #{b : x b in A} = (A * B^-1)(x)
    overlap = convolve(G, A, inverse_set(G, B))
    threshold = (1 - delta) * r * s * n
    bad = Subset(n, overlap <= threshold + REL_TOL * max(threshold, 1.0))
    if ts is None:
        ts = [1 / (delta * delta * k * r * s)] if r * s > 0 else [1.0]
    clauses = []
    for t in ts:
        admissible = r * s * t * delta * delta * k >= 1 - REL_TOL
        clauses.append(_clause(f"t={t:.6g}", bad.cardinality, "<=", t * n, admissible))
    inputs = {
        "group": G.descriptor,
        "sizes": [A.cardinality, B.cardinality],
        "k": k,
        "k_source": source,
        "delta": delta,
        "bad": bad.cardinality,
    }
    return bad, BoundReport("bad-translates", inputs, clauses, time.perf_counter() - t0)


@dataclass
class EquivalenceReport:
    group: str
    k: int
    k_source: str
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r["four_cycle_ok"] and r["c3_ok"] for r in self.rows)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _random_balanced(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v -= v.mean()
    return v / np.abs(v).max()


def equivalence_report(G: FiniteGroup, samples: int = 20, seed: int = 0, k: int | None = None) -> EquivalenceReport:
    """Sample subsets and balanced functions and record how the quasirandomness
    measures relate to ``k``.

    Per sample: the 4-cycle count of the bipartite Cayley graph of a random
    ``A`` against ``|A|^4 + n^2 |A|^2 / k``, and the constant ``c3`` of a
    random balanced ``f`` with ``|f| <= 1`` against ``||f||^4 / (n^2 k)``."""
    k, source = resolve_k(G, k)
    n = G.order
    report = EquivalenceReport(G.descriptor, k, source)
    for i in range(samples):
        s = trial_seed(seed, i)
        rng = np.random.default_rng(s)
        A = Subset.random(n, rng.uniform(0.1, 0.9), rng)
        cycles = count_four_cycles(G, A)
        a = A.cardinality
        cycle_bound = a**4 + n * n * a * a / k
        f = GroupFunction(n, _random_balanced(n, rng), balanced=True)
        c3 = quasirandomness_constant(G, f)
        norm_sq = float(np.sum(np.abs(f.values) ** 2))
        c3_bound = norm_sq**2 / (n * n * k)
        report.rows.append(
            {
                "trial": i,
                "seed": s,
                "size": a,
                "four_cycles": cycles,
                "four_cycle_bound": cycle_bound,
                "four_cycle_ok": cycles <= cycle_bound * (1 + REL_TOL),
                "c3": c3,
                "c3_bound": c3_bound,
                "c3_ok": c3 <= c3_bound * (1 + 1e-9) + 1e-12,
            }
        )
    return report


def triple_trials(G: FiniteGroup, trials: int, seed: int, k: int | None = None, lo: float = 0.5, hi: float = 0.9, eta: float = 0.5):
    """Seeded random ``(A, B, C)`` triples, one BoundReport each."""
    k, source = resolve_k(G, k)
    for i in range(trials):
        rng = np.random.default_rng(trial_seed(seed, i))
        A, B, C = (Subset.random(G.order, rng.uniform(lo, hi), rng) for _ in range(3))
        report = verify_triple_bound(G, A, B, C, k, eta)
        report.inputs.update(k_source=source, trial=i)
        yield report


def bad_set_trials(G: FiniteGroup, trials: int, seed: int, k: int | None = None, lo: float = 0.3, hi: float = 0.95):
    """Seeded random ``(A, B, delta)`` instances, one BoundReport each."""
    k, source = resolve_k(G, k)
    for i in range(trials):
        rng = np.random.default_rng(trial_seed(seed, i))
        A, B = (Subset.random(G.order, rng.uniform(lo, hi), rng) for _ in range(2))
        delta = float(rng.uniform(0.05, 1.0))
        report = lemma_5_1_bad_set(G, A, B, delta, k)[1]
        report.inputs.update(k_source=source, trial=i)
        yield report


def bounds_trials(G: FiniteGroup, trials: int, seed: int, k: int | None = None):
    """One combined report per trial: the triple clauses for a random
    ``(A, B, C)`` and the bad-translate clause for a random ``(A, B, delta)``."""
    k, source = resolve_k(G, k)
    for i in range(trials):
        rng = np.random.default_rng(trial_seed(seed, i))
        A, B, C = (Subset.random(G.order, rng.uniform(0.3, 0.95), rng) for _ in range(3))
        delta = float(rng.uniform(0.05, 1.0))
        t0 = time.perf_counter()
        tri = verify_triple_bound(G, A, B, C, k)
        _, bad = lemma_5_1_bad_set(G, A, B, delta, k)
        inputs = {
            "group": G.descriptor,
            "trial": i,
            "sizes": tri.inputs["sizes"],
            "k": k,
            "k_source": source,
            "delta": delta,
            "triples": tri.inputs["triples"],
            "bad": bad.inputs["bad"],
        }
        yield BoundReport("bounds", inputs, tri.clauses + bad.clauses, time.perf_counter() - t0)
