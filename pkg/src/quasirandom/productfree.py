"""Product-free sets: checks, constructions and exact search.

A set ``X`` is product-free when no ``x, y, z`` in ``X`` satisfy ``xy = z``.
Constructions here: the Erdős dilation argument for integer sets, nontrivial
cosets of a proper subgroup, and a construction for symmetric and alternating
groups that clusters elements by an eigenvector of their action on the
zero-sum subspace of ``C^m``.  Exact maxima come from branch and bound.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from sympy import nextprime

from .errors import CapExceededError, InputError
from .groups import DEFAULT_CAPS, FiniteGroup, subgroup_closure
from .setfun import Subset

__all__ = [
    "SearchResult",
    "is_product_free",
    "is_sum_free",
    "erdos_sum_free",
    "coset_product_free",
    "max_product_free_exact",
    "thm_4_6_construct",
    "standard_rep_trace",
]


@dataclass
class SearchResult:
    method: str
    elements: list
    verified: bool
    size: int
    certificate: dict | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def is_product_free(G: FiniteGroup, A: Subset) -> bool:
    """True iff no ``(x, y)`` in ``A x A`` has ``xy`` in ``A``."""
    idx = A.indices
    if idx.size == 0:
        return True
    chunk = max(1, 2_000_000 // idx.size)
    for start in range(0, idx.size, chunk):
        prods = G.mult_vec(idx[start : start + chunk, None], idx[None, :])
        if A.mask[prods].any():
            return False
    return True


def is_sum_free(Y) -> bool:
    """No ``x + y = z`` with ``x, y, z`` in ``Y`` (``x = y`` allowed)."""
    vals = np.array(sorted(set(int(v) for v in Y)), dtype=np.int64)
    if vals.size == 0:
        return True
    sums = (vals[:, None] + vals[None, :]).ravel()
    return not np.isin(sums, vals).any()


def erdos_sum_free(X) -> list[int]:
    """A sum-free ``Y`` inside a set ``X`` of nonzero integers with ``|Y| >= |X|/3``.

    With ``p`` the least prime above ``3 max|x|``, some dilation ``r`` puts at
    least a third of ``rX mod p`` strictly between ``p/3`` and ``2p/3``; sums of
    two such residues land outside that interval."""
    xs = np.array(sorted(set(int(v) for v in X)), dtype=np.int64)
    if xs.size == 0:
        raise InputError("X must be nonempty")
    if np.any(xs == 0):
        raise InputError("X must not contain 0")
    p = int(nextprime(3 * int(np.abs(xs).max())))
    need = math.ceil(xs.size / 3)
    residues = xs % p
    for r in range(1, p):
        res = residues * r % p
        inside = (3 * res > p) & (3 * res < 2 * p)
        if inside.sum() >= need:
            return xs[inside].tolist()
    raise AssertionError("no dilation reached a third; the averaging argument rules this out")


def coset_product_free(G: FiniteGroup, generators) -> SearchResult:
    """The coset ``gH`` of ``H = <generators>`` with ``g`` the least element outside ``H``."""
    H = subgroup_closure(G, generators)
    outside = np.flatnonzero(~H.mask)
    if outside.size == 0:
        raise InputError("the generators generate the whole group; no nontrivial coset exists")
    g = int(outside[0])
    mask = np.zeros(G.order, dtype=bool)
    mask[G.mult_vec(g, H.indices)] = True
    coset = Subset(G.order, mask)
    return SearchResult(
        "coset",
        coset.indices.tolist(),
        is_product_free(G, coset),
        coset.cardinality,
        details={"subgroup_order": H.cardinality, "g": g},
    )


def max_product_free_exact(G: FiniteGroup, cap: int = DEFAULT_CAPS.exact_search) -> SearchResult:
    """A maximum product-free subset by branch and bound over elements in index order.

    A chosen set ``S`` forbids every ``y`` that would complete a product
    triple with two members (``st``, ``s^-1 t``, ``t s^-1``) and every ``y``
    whose square lies in ``S``.  Branches are cut when the chosen size plus
    the remaining allowed elements, or ``n/2`` (``xS`` and ``S`` are disjoint
    for ``x`` in ``S``), cannot beat the incumbent."""
    n = G.order
    if n > cap:
        raise CapExceededError(f"exact search for order {n} exceeds cap {cap}")
    T = np.asarray(G.table, dtype=np.int64)
    inv = np.asarray(G.inverses)
    bit = [1 << i for i in range(n)]
    square = [int(T[a, a]) for a in range(n)]
    elems = [a for a in range(n) if a != G.identity]
    # forbid_with[a][t] = bits of the elements that may not join a set containing a and t
    forbid_with = [
        [bit[T[a, t]] | bit[T[t, a]] | bit[T[inv[a], t]] | bit[T[inv[t], a]] | bit[T[t, inv[a]]] | bit[T[a, inv[t]]] for t in range(n)]
        for a in range(n)
    ]
    suffix = [0] * (len(elems) + 1)
    for i in range(len(elems) - 1, -1, -1):
        suffix[i] = suffix[i + 1] | bit[elems[i]]
    limit = n // 2
    best = [0, 0]  # size, mask
    nodes = 0

    def allowed(a, chosen, forbidden):
        return not (forbidden >> a) & 1 and not (chosen >> square[a]) & 1 and square[a] != a

    def search(i, chosen, size, forbidden):
        nonlocal nodes
        nodes += 1
        if size > best[0]:
            best[0], best[1] = size, chosen
        if best[0] >= limit or i == len(elems):
            return
        room = bin(suffix[i] & ~forbidden).count("1")
        if size + room <= best[0]:
            return
        a = elems[i]
        if allowed(a, chosen, forbidden):
            f = forbidden | forbid_with[a][a]
            rest = chosen
            while rest:
                low = rest & -rest
                f |= forbid_with[a][low.bit_length() - 1]
                rest ^= low
            search(i + 1, chosen | bit[a], size + 1, f)
        search(i + 1, chosen, size, forbidden)

    search(0, 0, 0, 0)
    found = Subset.from_indices(n, [i for i in range(n) if (best[1] >> i) & 1])
    return SearchResult(
        "exact",
        found.indices.tolist(),
        is_product_free(G, found),
        found.cardinality,
        certificate={"optimal": True, "nodes": nodes, "upper_bound": limit},
    )


# -- construction from the standard representation ---------------------------

def standard_rep_trace(perms: np.ndarray) -> np.ndarray:
    """Trace on the zero-sum subspace of ``C^m``: fixed points minus one."""
    m = perms.shape[1]
    return (perms == np.arange(m)).sum(axis=1) - 1


def _cycles(p: np.ndarray) -> list[list[int]]:
    seen = np.zeros(p.size, dtype=bool)
    out = []
    for start in range(p.size):
        if seen[start]:
            continue
        cyc, x = [], start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = int(p[x])
        out.append(cyc)
    return out


def _eigenpair(p: np.ndarray) -> tuple[np.ndarray, complex]:
    """A unit eigenvector of the permutation matrix ``e_i -> e_{p(i)}`` in the
    zero-sum subspace, with the eigenvalue of least real part.

    On a cycle ``c_0 -> c_1 -> ...`` of length ``L``, ``v(c_t) = w^{-t}/sqrt(L)``
    with ``w = exp(2 pi i j / L)`` has eigenvalue ``w``; ``j = L // 2`` minimises
    the real part, and ``w != 1`` keeps ``v`` orthogonal to constants."""
    best = None
    for cyc in _cycles(p):
        L = len(cyc)
        if L < 2:
            continue
        lam = np.exp(2j * np.pi * (L // 2) / L)
        if best is None or lam.real < best[1].real - 1e-12:
            v = np.zeros(p.size, dtype=np.complex128)
            v[cyc] = np.conj(lam) ** np.arange(L) / math.sqrt(L)
            best = (v, lam)
    return best


def thm_4_6_construct(G: FiniteGroup, delta: float = 0.05) -> SearchResult:
    """Cluster low-trace permutations by (eigenvector, eigenvalue) and return the
    largest cluster, verified for product-freeness.

    ``X`` holds the elements whose trace on the zero-sum subspace is at most
    ``(m-1)/2``.  Clusters are grown greedily around centres at radius
    ``delta`` for vectors and ``delta/2`` for eigenvalues, so members lie
    within ``2 delta`` and ``delta`` of each other."""
    if G.kind not in ("symmetric", "alternating"):
        raise InputError("the construction needs sym:m or alt:m")
    if not 0 < delta < 0.1:
        raise InputError("delta must lie in (0, 0.1)")
    perms = G.permutations
    k = perms.shape[1] - 1
    X = np.flatnonzero(standard_rep_trace(perms) <= k / 2)
    if X.size == 0:
        return SearchResult("rep", [], True, 0, details={"X_size": 0, "k": k, "clusters": 0})
    pairs = [_eigenpair(perms[a]) for a in X]
    V = np.array([v for v, _ in pairs])
    lam = np.array([l for _, l in pairs])
    free = np.ones(X.size, dtype=bool)
    clusters = []
    while free.any():
        c = int(np.flatnonzero(free)[0])
        near = free & (np.linalg.norm(V - V[c], axis=1) <= delta) & (np.abs(lam - lam[c]) <= delta / 2)
        clusters.append(np.flatnonzero(near))
        free &= ~near
    largest = max(clusters, key=len)  # first of the largest on ties
    Y = Subset.from_indices(G.order, X[largest])
    return SearchResult(
        "rep",
        Y.indices.tolist(),
        is_product_free(G, Y),
        Y.cardinality,
        details={"X_size": int(X.size), "k": k, "clusters": len(clusters), "delta": delta},
    )
