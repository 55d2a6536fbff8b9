"""Greedy solver for systems of product constraints.

A system asks for ``x_1, ..., x_m`` in a group with ``w(x) in S_w`` for a
family of words ``w``.  Variables are fixed in order.  Fixing ``x_h = g``
turns a word ``x_h^e u`` into ``u`` with the set ``g^-e S`` (and dually at
the right end); words that become equal are merged by intersecting their
sets.  A candidate ``g`` is accepted when every merged set keeps at least
``(1 - 2^-m')`` times the product of the densities feeding it, where ``m'``
is the number of free variables.  With two variables left the search is
exhaustive, so ``m = 2`` systems are solved exactly.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InadmissibleWordError, InputError
from .groups import FiniteGroup, make_group
from .setfun import Subset

__all__ = [
    "PATTERNS",
    "Constraint",
    "ConstraintSystem",
    "SolveOutcome",
    "DensityReport",
    "parse_word",
    "format_word",
    "check_density_condition",
    "check_density_condition_m3",
    "pairwise_threshold",
    "solve",
    "solve_pairwise",
    "evaluate_word",
    "system_from_json",
    "system_to_json",
]

PATTERNS = ("forward-products", "pairs", "pairs-inverse", "custom-words")

Word = tuple  # tuple of (variable, exponent) with exponent +1 or -1


def parse_word(tokens) -> Word:
    """``["x2", "x3^-1"]`` -> ``((2, 1), (3, -1))``."""
    out = []
    for tok in tokens:
        m = re.fullmatch(r"\s*x(\d+)(\^(-?1))?\s*", str(tok))
        if not m:
            raise InputError(f"bad word token {tok!r}; expected x<i> or x<i>^-1")
        out.append((int(m.group(1)), int(m.group(3) or 1)))
    if not out:
        raise InputError("empty word")
    return tuple(out)


def format_word(word: Word) -> list[str]:
    return [f"x{v}" if e == 1 else f"x{v}^-1" for v, e in word]


def _key(F) -> str:
    return ",".join(str(i) for i in sorted(F))


@dataclass(frozen=True)
class Constraint:
    key: str
    word: Word
    subset: Subset


def _strip(word: Word, h: int) -> tuple[Word, Word, Word]:
    """Split ``word`` into (leading x_h run, middle, trailing x_h run)."""
    i = 0
    while i < len(word) and word[i][0] == h:
        i += 1
    j = len(word)
    while j > i and word[j - 1][0] == h:
        j -= 1
    return word[:i], word[i:j], word[j:]


def _check_admissible(words: list[Word], m: int):
    current = list(words)
    for h in range(1, m + 1):
        nxt = []
        for w in current:
            _, mid, _ = _strip(w, h)
            if any(v == h for v, _ in mid):
                raise InadmissibleWordError(
                    f"word {' '.join(format_word(w))}: x{h} sits strictly inside the word when it is fixed"
                )
            nxt.append(mid)
        current = nxt


@dataclass
class ConstraintSystem:
    group: FiniteGroup
    m: int
    pattern: str
    constraints: list

    def __post_init__(self):
        if self.m < 2:
            raise InputError("a system needs at least two variables")
        if self.pattern not in PATTERNS:
            raise InputError(f"unknown pattern {self.pattern!r}")
        for c in self.constraints:
            if c.subset.n != self.group.order:
                raise InputError(f"set {c.key} is not over {self.group.descriptor}")
            if any(not 1 <= v <= self.m for v, _ in c.word):
                raise InputError(f"word for {c.key} uses a variable outside x1..x{self.m}")
        _check_admissible([c.word for c in self.constraints], self.m)

    @classmethod
    def forward_products(cls, G: FiniteGroup, m: int, sets: dict) -> "ConstraintSystem":
        """One constraint ``x_{i1} x_{i2} ... in A_F`` per nonempty ``F``;
        missing sets default to the whole group."""
        given = {_key(_as_index_set(F)): S for F, S in sets.items()}
        cons = []
        for size in range(1, m + 1):
            for F in itertools.combinations(range(1, m + 1), size):
                key = _key(F)
                S = given.pop(key, None)
                cons.append(Constraint(key, tuple((i, 1) for i in F), S if S is not None else Subset.full(G.order)))
        if given:
            raise InputError(f"sets for index sets outside 1..{m}: {sorted(given)}")
        return cls(G, m, "forward-products", cons)

    @classmethod
    def pairs(cls, G: FiniteGroup, m: int, sets: dict, inverse: bool = False) -> "ConstraintSystem":
        """``x_i x_j in A_ij`` (or ``x_i x_j^-1``) for ``i < j``; missing pairs
        default to the whole group."""
        given = {}
        for F, S in sets.items():
            ij = tuple(sorted(_as_index_set(F)))
            if len(ij) != 2:
                raise InputError(f"pair key {F!r} must name two variables")
            given[ij] = S
        cons = []
        for i, j in itertools.combinations(range(1, m + 1), 2):
            S = given.pop((i, j), None)
            cons.append(Constraint(_key((i, j)), ((i, 1), (j, -1 if inverse else 1)), S if S is not None else Subset.full(G.order)))
        if given:
            raise InputError(f"pairs outside 1..{m}: {sorted(given)}")
        return cls(G, m, "pairs-inverse" if inverse else "pairs", cons)

    @classmethod
    def custom(cls, G: FiniteGroup, m: int, words: list) -> "ConstraintSystem":
        """``words`` is a list of ``(word, Subset)`` with words as token lists
        or tuples of ``(variable, exponent)``."""
        cons = []
        for i, (w, S) in enumerate(words):
            word = parse_word(w) if w and isinstance(next(iter(w)), str) else tuple((int(v), int(e)) for v, e in w)
            cons.append(Constraint(" ".join(format_word(word)), word, S))
        return cls(G, m, "custom-words", cons)

    @property
    def densities(self) -> dict:
        return {c.key: c.subset.density for c in self.constraints}

    def set_for(self, F) -> Subset:
        key = _key(_as_index_set(F))
        for c in self.constraints:
            if c.key == key:
                return c.subset
        raise KeyError(key)


def _as_index_set(F) -> tuple:
    if isinstance(F, str):
        return tuple(int(t) for t in F.split(",") if t.strip())
    if isinstance(F, int):
        return (F,)
    return tuple(int(t) for t in F)


def evaluate_word(G: FiniteGroup, word: Word, values) -> np.ndarray:
    """Evaluate ``word`` with ``values[v]`` (ints or arrays) substituted for ``x_v``."""
    acc = np.int64(G.identity)
    for v, e in word:
        g = np.asarray(values[v])
        acc = G.mult_vec(acc, g if e == 1 else G.inverses[g])
    return acc


# -- sufficient conditions ---------------------------------------------------

@dataclass
class DensityReport:
    passed: bool
    threshold: float
    worst_margin: float  # min over checks of product / threshold
    failures: list = field(default_factory=list)


def check_density_condition(sys: ConstraintSystem, k: int) -> DensityReport:
    """Check ``prod_{F in A_{h,E}} p_F >= 2^{3m}/k`` for all ``h < m`` and
    nonempty ``E`` within ``{h+1..m}``, where ``A_{h,E}`` consists of the sets
    ``U ∪ V`` with ``U`` inside ``{1..h-1}`` and ``V`` one of ``{h}, E, {h} ∪ E``."""
    if sys.pattern != "forward-products":
        raise InputError("the density condition applies to forward-products systems")
    if k < 1:
        raise InputError("k must be a positive integer")
    m = sys.m
    p = sys.densities
    threshold = 2.0 ** (3 * m) / k
    failures, worst = [], math.inf
    for h in range(1, m):
        below = range(1, h)
        Us = [U for r in range(h) for U in itertools.combinations(below, r)]
        above = range(h + 1, m + 1)
        for r in range(1, m - h + 1):
            for E in itertools.combinations(above, r):
                prod = 1.0
                for U in Us:
                    for V in ((h,), E, (h,) + E):
                        prod *= p[_key(U + V)]
                margin = prod / threshold
                worst = min(worst, margin)
                if prod < threshold * (1 - 1e-12):
                    failures.append((h, list(E), prod))
    return DensityReport(not failures, threshold, worst, failures)


def check_density_condition_m3(sys: ConstraintSystem, k: int) -> DensityReport:
    """The sharper three-variable condition: four density products, each at least ``16/k``."""
    if sys.pattern != "forward-products" or sys.m != 3:
        raise InputError("the three-variable condition needs a forward-products system with m = 3")
    p = sys.densities
    groups = [
        ("1", "2", "1,2"),
        ("1", "3", "1,3"),
        ("1", "2,3", "1,2,3"),
        ("2", "3", "2,3", "1,2", "1,3", "1,2,3"),
    ]
    threshold = 16.0 / k
    failures, worst = [], math.inf
    for keys in groups:
        prod = math.prod(p[key] for key in keys)
        worst = min(worst, prod / threshold)
        if prod < threshold * (1 - 1e-12):
            failures.append((list(keys), prod))
    return DensityReport(not failures, threshold, worst, failures)


def pairwise_threshold(m: int, k: int) -> float:
    """Density above which every pairwise system on ``m`` variables is solvable: ``4 k^{-1/(2m-3)}``."""
    return 4.0 * k ** (-1.0 / (2 * m - 3))


# -- the greedy ---------------------------------------------------------------

@dataclass
class SolveOutcome:
    status: str
    witness: list | None
    trace: list = field(default_factory=list)
    guaranteed: bool | None = None  # did a sufficient condition hold
    condition: dict = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.witness is not None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _merge(merged: dict, word: Word, mask: np.ndarray, dens: float):
    if word in merged:
        old_mask, old_dens = merged[word]
        merged[word] = [old_mask & mask, old_dens * dens]
    else:
        merged[word] = [mask, dens]


class _Search:
    def __init__(self, G: FiniteGroup, m: int, rng: np.random.Generator, depth: int):
        self.G = G
        self.m = m
        self.rng = rng
        self.depth = depth
        self.trace: list = []

    def _reduce(self, cons, h, g):
        """Fix ``x_h = g``: return (ok, merged constraints without x_h, merge info)."""
        G, n = self.G, self.G.order
        g_inv = int(G.inverses[g])
        merged: dict = {}
        for word, mask, dens in cons:
            if all(v != h for v, _ in word):
                _merge(merged, word, mask, dens)
                continue
            lead, mid, tail = _strip(word, h)
            left = int(evaluate_word(G, lead, {h: g})) if lead else G.identity
            right = int(evaluate_word(G, tail, {h: g})) if tail else G.identity
            idx = np.flatnonzero(mask)
            # w = left * mid * right in S  <=>  mid in left^-1 S right^-1
            moved = G.mult_vec(G.mult_vec(G.inverses[left], idx), G.inverses[right])
            if not mid:
                if not np.any(moved == G.identity):
                    return False, None
                continue
            new = np.zeros(n, dtype=bool)
            new[moved] = True
            _merge(merged, mid, new, dens)
        return True, merged

    def _unary_mask(self, cons, h):
        """Candidates for ``x_h`` allowed by the words in ``x_h`` alone."""
        G = self.G
        allowed = np.ones(G.order, dtype=bool)
        everyone = np.arange(G.order, dtype=np.int64)
        for word, mask, _ in cons:
            if all(v == h for v, _ in word):
                allowed &= mask[evaluate_word(G, word, {h: everyone})]
        return allowed

    def run(self, cons, h) -> list | None:
        free = self.m - h + 1
        allowed = self._unary_mask(cons, h)
        rest = [c for c in cons if not all(v == h for v, _ in c[0])]
        cands = np.flatnonzero(allowed)
        cands = cands[self.rng.permutation(cands.size)]
        step = {"variable": h, "candidates": int(cands.size)}
        self.trace.append(step)
        if cands.size == 0:
            return None
        if free == 1:
            step["chosen"] = int(cands[0])
            return [int(cands[0])]
        factor = 1 - 2.0 ** (-free)
        step["threshold_factor"] = factor
        budget = None if free == 2 else 1 + self.depth  # two free variables: exhaustive
        attempts = evaluated = passing = 0
        fallback = []
        for g in cands:
            g = int(g)
            ok, merged = self._reduce(rest, h, g)
            evaluated += 1
            if not ok:
                continue
            score = float(min((mask.mean() / (dens * factor) if dens > 0 else math.inf for mask, dens in merged.values()), default=math.inf))
            residual = [(w, mask, mask.mean()) for w, (mask, _) in merged.items()]
            if score < 1 - 1e-12 and budget is not None:
                fallback.append((-score, evaluated, g, residual))
                continue
            passing += int(score >= 1 - 1e-12)
            attempts += 1
            tail = self._attempt(residual, h)
            if tail is not None:
                step.update(evaluated=evaluated, passing=passing, chosen=g)
                return [g] + tail
            if budget is not None and attempts >= budget:
                break
        step.update(evaluated=evaluated, passing=passing)
        # no passing candidate worked: best-effort by largest minimum residual ratio
        fallback.sort(key=lambda t: t[:2])
        for _, _, g, residual in fallback[: max(0, (budget or 0) - attempts)]:
            tail = self._attempt(residual, h)
            if tail is not None:
                step.update(chosen=g, fallback=True)
                return [g] + tail
        return None

    def _attempt(self, residual, h):
        if any(not mask.any() for _, mask, _ in residual):
            return None
        return self.run(residual, h + 1)


def _verify(sys: ConstraintSystem, witness: list) -> bool:
    values = {i + 1: int(x) for i, x in enumerate(witness)}
    return all(bool(c.subset.mask[int(evaluate_word(sys.group, c.word, values))]) for c in sys.constraints)


def _condition(sys: ConstraintSystem, k: int | None) -> tuple[bool | None, dict]:
    if k is None:
        return None, {"k": None}
    if sys.pattern == "forward-products":
        rep = check_density_condition(sys, k)
        return rep.passed, {"k": k, "kind": "density", "threshold": rep.threshold, "worst_margin": rep.worst_margin}
    if sys.pattern in ("pairs", "pairs-inverse"):
        p = min(sys.densities.values())
        t = pairwise_threshold(sys.m, k)
        return p > t, {"k": k, "kind": "pairwise", "threshold": t, "min_density": p}
    return None, {"k": k, "kind": "none"}


def solve(sys: ConstraintSystem, seed: int = 0, backtrack_depth: int = 2, k: int | None = None) -> SolveOutcome:
    """Search for a witness.  ``k`` (minimum nontrivial irrep dimension) is
    used only to decide whether a sufficient condition held; without it, or
    for custom words, results carry the density-warning statuses."""
    if backtrack_depth < 0:
        raise InputError("backtrack depth must be non-negative")
    guaranteed, cond = _condition(sys, k)
    prefix = "" if guaranteed else "density-warning-"
    if any(c.subset.cardinality == 0 for c in sys.constraints):
        return SolveOutcome(prefix + "exhausted", None, [], guaranteed, cond)
    cons = [(c.word, c.subset.mask, c.subset.density) for c in sys.constraints]
    search = _Search(sys.group, sys.m, np.random.default_rng(seed), backtrack_depth)
    witness = search.run(cons, 1)
    if witness is not None and not _verify(sys, witness):
        raise AssertionError("solver produced a witness that fails re-verification")
    status = prefix + ("solved" if witness is not None else "exhausted")
    return SolveOutcome(status, witness, search.trace, guaranteed, cond)


def solve_pairwise(
    G: FiniteGroup,
    sets: dict,
    m: int | None = None,
    inverse: bool = False,
    seed: int = 0,
    backtrack_depth: int = 2,
    k: int | None = None,
) -> SolveOutcome:
    """Find ``x_1..x_m`` with ``x_i x_j`` (or ``x_i x_j^-1``) in ``A_ij`` for all ``i < j``."""
    if m is None:
        m = max(max(_as_index_set(F)) for F in sets) if sets else 2
    sys = ConstraintSystem.pairs(G, m, sets, inverse)
    return solve(sys, seed, backtrack_depth, k)


# -- file format ---------------------------------------------------------------

def _subset_json(value, n: int) -> Subset:
    if isinstance(value, dict):
        value = value.get("elements")
    if not isinstance(value, list):
        raise InputError("a set must be a list of element indices or {'elements': [...]}")
    return Subset.from_indices(n, value)


def system_from_json(text: str, group: FiniteGroup | None = None) -> ConstraintSystem:
    """Parse ``{group, m, pattern, sets: {"1": [...], "1,3": [...]}, words: {...}}``.

    For custom words, ``words`` maps each set key to a token list such as
    ``["x2", "x3^-1"]``."""
    try:
        doc = json.loads(text)
        descriptor, m, pattern, sets = doc["group"], int(doc["m"]), doc["pattern"], doc["sets"]
    except (ValueError, KeyError, TypeError):
        raise InputError("constraint JSON needs group, m, pattern and sets") from None
    G = group if group is not None else make_group(descriptor)
    parsed = {key: _subset_json(v, G.order) for key, v in sets.items()}
    if pattern == "forward-products":
        return ConstraintSystem.forward_products(G, m, parsed)
    if pattern in ("pairs", "pairs-inverse"):
        return ConstraintSystem.pairs(G, m, parsed, inverse=pattern == "pairs-inverse")
    if pattern == "custom-words":
        words = doc.get("words", {})
        missing = set(parsed) - set(words)
        if missing:
            raise InputError(f"no word given for sets {sorted(missing)}")
        return ConstraintSystem.custom(G, m, [(words[key], parsed[key]) for key in parsed])
    raise InputError(f"unknown pattern {pattern!r}")


def system_to_json(sys: ConstraintSystem) -> str:
    doc = {"group": sys.group.descriptor, "m": sys.m, "pattern": sys.pattern}
    if sys.pattern == "custom-words":
        doc["sets"] = {str(i): c.subset.indices.tolist() for i, c in enumerate(sys.constraints)}
        doc["words"] = {str(i): format_word(c.word) for i, c in enumerate(sys.constraints)}
    else:
        doc["sets"] = {c.key: c.subset.indices.tolist() for c in sys.constraints}
    return json.dumps(doc)
