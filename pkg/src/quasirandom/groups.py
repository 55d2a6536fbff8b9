"""Finite groups with canonical element indexing.

Every group is a set of indices ``0..n-1`` together with a vectorised
multiplication rule and an inverse array.  Catalog groups (cyclic, dihedral,
symmetric, alternating, PSL2 over a prime field, direct products) compute the
product from a structured representation, so they never need an ``n x n``
table; a table is cached lazily when ``n`` is below ``Caps.table``.

Permutations compose as functions: ``(a*b)(i) = a(b(i))``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import CapExceededError, DescriptorError, GroupTableError
from .setfun import Subset

__all__ = [
    "Caps",
    "DEFAULT_CAPS",
    "FiniteGroup",
    "ConjugacyClasses",
    "make_group",
    "element_mult",
    "element_inv",
    "conjugacy_classes",
    "subgroup_closure",
    "element_order",
    "export_table",
    "load_table",
    "is_odd_prime",
]


@dataclass(frozen=True)
class Caps:
    """Size limits above which an operation refuses to run."""

    table: int = 4096
    classes: int = 5000
    spectral: int = 1200
    irreps: int = 5000
    irrep_classes: int = 40
    exact_search: int = 28


DEFAULT_CAPS = Caps()

MultRule = Callable[[np.ndarray, np.ndarray], np.ndarray]


class FiniteGroup:
    """An immutable finite group on the indices ``0..order-1``.

    ``mult_vec`` broadcasts over integer arrays; ``mult``/``inv`` are the scalar
    forms.  ``table`` is the full Cayley table (row ``a``, column ``b`` holds
    ``a*b``), built on first access when ``order <= table_cap``.
    """

    def __init__(
        self,
        descriptor: str,
        kind: str,
        order: int,
        mult_rule: MultRule,
        inverses: np.ndarray,
        identity: int,
        labeler: Callable[[int], str] | None = None,
        params: dict | None = None,
        table_cap: int = DEFAULT_CAPS.table,
        table: np.ndarray | None = None,
    ):
        self.descriptor = descriptor
        self.kind = kind
        self.order = int(order)
        self.identity = int(identity)
        self.params = dict(params or {})
        self.table_cap = table_cap
        self._rule = mult_rule
        self._inv = np.asarray(inverses, dtype=np.int64)
        self._inv.setflags(write=False)
        self._labeler = labeler
        self._table = table
        if table is not None:
            self._table.setflags(write=False)

    def __repr__(self):
        return f"FiniteGroup({self.descriptor!r}, order={self.order})"

    def __len__(self):
        return self.order

    @property
    def n(self) -> int:
        return self.order

    @property
    def has_table(self) -> bool:
        return self._table is not None or self.order <= self.table_cap

    @property
    def table(self) -> np.ndarray:
        if self._table is None:
            if self.order > self.table_cap:
                raise CapExceededError(
                    f"Cayley table for order {self.order} exceeds cap {self.table_cap}"
                )
            n = self.order
            idx = np.arange(n, dtype=np.int64)
            t = np.empty((n, n), dtype=np.int32)
            step = max(1, 2**18 // n)
            for lo in range(0, n, step):
                t[lo:lo + step] = self._rule(idx[lo:lo + step, None], idx[None, :])
            t.setflags(write=False)
            self._table = t
        return self._table

    @property
    def inverses(self) -> np.ndarray:
        return self._inv

    def mult_vec(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.has_table:
            return self.table[a, b].astype(np.int64)
        return self._rule(a, b)

    def mult(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        return int(self.mult_vec(a, b))

    def inv(self, a: int) -> int:
        self._check(a)
        return int(self._inv[a])

    def left_row(self, a: int) -> np.ndarray:
        """``[a*x for x in G]``."""
        if self.has_table:
            return self.table[a].astype(np.int64)
        return self._rule(np.int64(a), np.arange(self.order, dtype=np.int64))

    def right_col(self, b: int) -> np.ndarray:
        """``[x*b for x in G]``."""
        if self.has_table:
            return self.table[:, b].astype(np.int64)
        return self._rule(np.arange(self.order, dtype=np.int64), np.int64(b))

    def label(self, a: int) -> str:
        self._check(a)
        return self._labeler(a) if self._labeler else str(a)

    def _check(self, a):
        if not 0 <= int(a) < self.order:
            raise IndexError(f"element index {a} out of range for order {self.order}")

    def check_axioms(self, exhaustive_limit: int = 512, samples: int = 100_000, seed: int = 0):
        """Raise GroupTableError unless the identity, inverse, Latin-square and
        associativity laws hold.  Associativity is exhaustive up to
        ``exhaustive_limit`` and sampled on ``samples`` random triples above it."""
        n = self.order
        idx = np.arange(n, dtype=np.int64)
        e = self.identity
        if not (np.array_equal(self.mult_vec(e, idx), idx) and np.array_equal(self.mult_vec(idx, e), idx)):
            raise GroupTableError("identity law fails")
        if not np.all(self.mult_vec(idx, self._inv) == e):
            raise GroupTableError("inverse law fails")
        if self.has_table:
            _check_latin(self.table)
        if n <= exhaustive_limit:
            t = self.table if self.has_table else self._rule(idx[:, None], idx[None, :])
            for a in range(n):
                if not np.array_equal(t[t[a]], t[a][t]):
                    raise GroupTableError(f"associativity fails with left factor {a}")
        else:
            rng = np.random.default_rng(seed)
            a, b, c = rng.integers(0, n, size=(3, samples))
            lhs = self.mult_vec(self.mult_vec(a, b), c)
            rhs = self.mult_vec(a, self.mult_vec(b, c))
            if not np.array_equal(lhs, rhs):
                raise GroupTableError("associativity fails on a sampled triple")


def _check_latin(t: np.ndarray):
    n = t.shape[0]
    if t.shape != (n, n):
        raise GroupTableError("Cayley table must be square")
    if t.min() < 0 or t.max() >= n:
        raise GroupTableError("Cayley table entry out of range")
    target = np.arange(n)
    if not (np.all(np.sort(t, axis=1) == target) and np.all(np.sort(t, axis=0) == target[:, None])):
        raise GroupTableError("Cayley table is not a Latin square")


# -- scalar helpers ---------------------------------------------------------

def element_mult(G: FiniteGroup, a: int, b: int) -> int:
    return G.mult(a, b)


def element_inv(G: FiniteGroup, a: int) -> int:
    return G.inv(a)


def element_order(G: FiniteGroup, a: int) -> int:
    x, k = int(a), 1
    while x != G.identity:
        x = G.mult(x, a)
        k += 1
    return k


def is_odd_prime(q: int) -> bool:
    if q < 3 or q % 2 == 0:
        return False
    return all(q % d for d in range(3, math.isqrt(q) + 1, 2))


# -- catalog constructors ---------------------------------------------------

def _cyclic(n: int, descriptor: str, cap: int) -> FiniteGroup:
    if n < 1:
        raise DescriptorError("cyclic:n needs n >= 1")

    def rule(a, b):
        return (a + b) % n

    inv = (-np.arange(n)) % n
    return FiniteGroup(descriptor, "cyclic", n, rule, inv, 0, params={"n": n}, table_cap=cap)


def _dihedral(n: int, descriptor: str, cap: int) -> FiniteGroup:
    # index k + n*f stands for r^k s^f
    if n < 3:
        raise DescriptorError("dihedral:n needs n >= 3")

    def rule(a, b):
        ka, fa = a % n, a // n
        kb, fb = b % n, b // n
        return (ka + (1 - 2 * fa) * kb) % n + n * (fa ^ fb)

    idx = np.arange(2 * n)
    k, f = idx % n, idx // n
    inv = np.where(f == 0, (-k) % n, idx)

    def label(i):
        k, f = i % n, i // n
        return ("e" if k == 0 else f"r^{k}") if f == 0 else ("s" if k == 0 else f"r^{k} s")

    return FiniteGroup(descriptor, "dihedral", 2 * n, rule, inv, 0, label, {"n": n}, cap)


def _keyed_lookup(keys: np.ndarray, found: np.ndarray) -> np.ndarray:
    pos = np.searchsorted(keys, found)
    return pos.astype(np.int64)


def _permutation_group(m: int, even_only: bool, descriptor: str, cap: int) -> FiniteGroup:
    perms = np.array(list(itertools.permutations(range(m))), dtype=np.int64).reshape(-1, m)
    if even_only:
        perms = perms[np.array([_parity(p) == 0 for p in perms], dtype=bool)]
    weights = m ** np.arange(m - 1, -1, -1, dtype=np.int64)
    keys = perms @ weights  # lexicographic order == numeric order of keys

    def rule(a, b):
        pa, pb = perms[a], perms[b]
        pa, pb = np.broadcast_arrays(pa, pb)
        comp = np.take_along_axis(pa, pb, axis=-1)
        return _keyed_lookup(keys, comp @ weights)

    inv_perms = np.argsort(perms, axis=1)
    inv = _keyed_lookup(keys, inv_perms @ weights)
    identity = int(_keyed_lookup(keys, np.arange(m) @ weights))

    def label(i):
        return "[" + ",".join(map(str, perms[i])) + "]"

    kind = "alternating" if even_only else "symmetric"
    G = FiniteGroup(descriptor, kind, len(perms), rule, inv, identity, label, {"n": m}, cap)
    G.permutations = perms
    return G


def _parity(p: Sequence[int]) -> int:
    seen, parity = set(), 0
    for i in range(len(p)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = p[j]
            length += 1
        parity ^= (length - 1) & 1
    return parity


def _psl2(q: int, descriptor: str, cap: int) -> FiniteGroup:
    """PSL2(q), q an odd prime.  Each element is the representative of a
    +-pair of determinant-one matrices whose first nonzero entry (row-major)
    lies in 1..(q-1)/2; elements are ordered lexicographically."""
    if not (is_odd_prime(q) and q >= 5):
        raise DescriptorError(f"psl2:q needs q an odd prime >= 5, got {q}")
    half = (q - 1) // 2
    inverse_mod = np.array([0] + [pow(x, -1, q) for x in range(1, q)], dtype=np.int64)

    # a != 0 (canonical: 1 <= a <= half), b, c free, d = (1 + b c) / a
    a, b, c = np.meshgrid(np.arange(1, half + 1), np.arange(q), np.arange(q), indexing="ij")
    a, b, c = a.ravel(), b.ravel(), c.ravel()
    d = (1 + b * c) % q * inverse_mod[a] % q
    first = np.stack([a, b, c, d], axis=1)
    # a == 0 (canonical: 1 <= b <= half), c = -1/b, d free
    b2, d2 = np.meshgrid(np.arange(1, half + 1), np.arange(q), indexing="ij")
    b2, d2 = b2.ravel(), d2.ravel()
    c2 = (-inverse_mod[b2]) % q
    second = np.stack([np.zeros_like(b2), b2, c2, d2], axis=1)
    mats = np.concatenate([first, second]).astype(np.int64)
    weights = q ** np.arange(3, -1, -1, dtype=np.int64)
    order = np.argsort(mats @ weights, kind="stable")
    mats = mats[order]
    keys = mats @ weights

    def canon(m):
        lead = np.where(m[..., 0] != 0, m[..., 0], m[..., 1])
        flip = (lead > half)[..., None]
        return np.where(flip, (-m) % q, m)

    def rule(x, y):
        A, B = mats[x], mats[y]
        A, B = np.broadcast_arrays(A, B)
        prod = np.stack(
            [
                A[..., 0] * B[..., 0] + A[..., 1] * B[..., 2],
                A[..., 0] * B[..., 1] + A[..., 1] * B[..., 3],
                A[..., 2] * B[..., 0] + A[..., 3] * B[..., 2],
                A[..., 2] * B[..., 1] + A[..., 3] * B[..., 3],
            ],
            axis=-1,
        ) % q
        return _keyed_lookup(keys, canon(prod) @ weights)

    adj = np.stack([mats[:, 3], -mats[:, 1], -mats[:, 2], mats[:, 0]], axis=1) % q
    inv = _keyed_lookup(keys, canon(adj) @ weights)
    identity = int(_keyed_lookup(keys, np.array([1, 0, 0, 1]) @ weights))

    def label(i):
        w, x, y, z = mats[i]
        return f"[[{w},{x}],[{y},{z}]]"

    G = FiniteGroup(descriptor, "psl2", len(mats), rule, inv, identity, label, {"q": q}, cap)
    G.matrices = mats
    return G


def _product(G: FiniteGroup, H: FiniteGroup, descriptor: str, cap: int) -> FiniteGroup:
    m = H.order

    def rule(a, b):
        return G.mult_vec(a // m, b // m) * m + H.mult_vec(a % m, b % m)

    idx = np.arange(G.order * m)
    inv = G.inverses[idx // m] * m + H.inverses[idx % m]

    def label(i):
        return f"({G.label(i // m)}, {H.label(i % m)})"

    params = {"factors": (G.descriptor, H.descriptor)}
    P = FiniteGroup(descriptor, "direct-product", G.order * m, rule, inv, G.identity * m + H.identity, label, params, cap)
    P.factors = (G, H)
    return P


def _table_group(table: np.ndarray, descriptor: str, cap: int) -> FiniteGroup:
    table = np.asarray(table, dtype=np.int32)
    _check_latin(table)
    n = table.shape[0]
    ident = [e for e in range(n) if np.array_equal(table[e], np.arange(n))]
    if len(ident) != 1 or not np.array_equal(table[:, ident[0]], np.arange(n)):
        raise GroupTableError("table has no two-sided identity")
    e = ident[0]
    inv = np.argmax(table == e, axis=1)

    def rule(a, b):
        return table[a, b].astype(np.int64)

    G = FiniteGroup(descriptor, "table", n, rule, inv, e, table_cap=max(cap, n), table=table)
    G.check_axioms()
    return G


def _split_product(spec: str):
    depth = 0
    for i, ch in enumerate(spec):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "*" and depth == 0:
            return spec[:i], spec[i + 1:]
    return None


def make_group(spec: str, table_cap: int = DEFAULT_CAPS.table) -> FiniteGroup:
    """Build a group from a descriptor string.

    Descriptors: ``cyclic:n``, ``dihedral:n``, ``sym:n``, ``alt:n``,
    ``psl2:q``, ``table:PATH`` and ``X*Y`` for the direct product of two
    descriptors (split at the first top-level ``*``).
    """
    spec = spec.strip()
    if spec.startswith("(") and spec.endswith(")") and _split_product(spec) is None:
        spec = spec[1:-1]
    parts = _split_product(spec)
    if parts is not None:
        G, H = make_group(parts[0], table_cap), make_group(parts[1], table_cap)
        return _product(G, H, spec, table_cap)
    kind, sep, arg = spec.partition(":")
    if not sep:
        raise DescriptorError(f"malformed group descriptor {spec!r}")
    if kind == "table":
        return load_table(arg, table_cap)
    try:
        value = int(arg)
    except ValueError:
        raise DescriptorError(f"non-integer parameter in {spec!r}") from None
    if kind == "cyclic":
        return _cyclic(value, spec, table_cap)
    if kind == "dihedral":
        return _dihedral(value, spec, table_cap)
    if kind == "sym":
        if not 2 <= value <= 8:
            raise DescriptorError("sym:n supports 2 <= n <= 8")
        return _permutation_group(value, False, spec, table_cap)
    if kind == "alt":
        if not 3 <= value <= 8:
            raise DescriptorError("alt:n supports 3 <= n <= 8")
        return _permutation_group(value, True, spec, table_cap)
    if kind == "psl2":
        return _psl2(value, spec, table_cap)
    raise DescriptorError(f"unknown group kind {kind!r}")


# -- Cayley table files -----------------------------------------------------

def iter_table_lines(G: FiniteGroup) -> Iterable[str]:
    yield str(G.order)
    for a in range(G.order):
        yield " ".join(map(str, G.left_row(a).tolist()))


def export_table(G: FiniteGroup) -> str:
    """Cayley-table file text: ``n`` then ``n`` rows of ``n`` indices."""
    return "\n".join(iter_table_lines(G)) + "\n"


def parse_table(text: str) -> np.ndarray:
    tokens = text.split()
    if not tokens:
        raise GroupTableError("empty table file")
    try:
        n = int(tokens[0])
        values = np.array([int(t) for t in tokens[1:]], dtype=np.int64)
    except ValueError:
        raise GroupTableError("non-integer token in table file") from None
    if n < 1 or values.size != n * n:
        raise GroupTableError(f"expected {n * n} entries, found {values.size}")
    return values.reshape(n, n)


def load_table(path: str | Path, table_cap: int = DEFAULT_CAPS.table) -> FiniteGroup:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise GroupTableError(f"cannot read table file {path}: {exc.strerror}") from None
    return _table_group(parse_table(text), f"table:{path}", table_cap)


# -- conjugacy and subgroups -----------------------------------------------

@dataclass(frozen=True)
class ConjugacyClasses:
    classes: tuple  # tuple of sorted int arrays, ordered by least element
    class_of: np.ndarray

    def __len__(self):
        return len(self.classes)

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    @property
    def representatives(self) -> list[int]:
        return [int(c[0]) for c in self.classes]


def conjugacy_classes(G: FiniteGroup, cap: int = DEFAULT_CAPS.classes) -> ConjugacyClasses:
    n = G.order
    if n > cap:
        raise CapExceededError(f"class computation for order {n} exceeds cap {cap}")
    everyone = np.arange(n, dtype=np.int64)
    class_of = np.full(n, -1, dtype=np.int64)
    classes = []
    for x in range(n):
        if class_of[x] >= 0:
            continue
        orbit = np.unique(G.mult_vec(G.mult_vec(everyone, x), G.inverses))
        class_of[orbit] = len(classes)
        classes.append(orbit)
    class_of.setflags(write=False)
    return ConjugacyClasses(tuple(classes), class_of)


def subgroup_closure(G: FiniteGroup, generators: Iterable[int]) -> Subset:
    gens = np.array(sorted({int(g) for g in generators}), dtype=np.int64)
    for g in gens:
        G._check(g)
    member = np.zeros(G.order, dtype=bool)
    member[G.identity] = True
    member[gens] = True
    frontier = np.flatnonzero(member)
    while frontier.size and gens.size:
        products = np.unique(G.mult_vec(frontier[:, None], gens[None, :]))
        fresh = products[~member[products]]
        member[fresh] = True
        frontier = fresh
    return Subset(G.order, member)
