"""Character tables by the Burnside-Dixon method.

The class sums ``K_i`` span the centre of the group algebra, with
``K_i K_j = sum_k c_ijk K_k``.  Each irreducible character gives a common
eigenvector ``w`` of the matrices ``(M_i)_{jk} = c_ijk``, with
``w_j = |C_j| chi(C_j) / chi(1)``.  The eigenvectors are found modulo a prime
``l = 1 mod exponent``, where they split into one-dimensional spaces, and the
reduced characters are lifted to complex values through the power maps.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from sympy import isprime, primitive_root

from .errors import CapExceededError, InputError, ModulusSearchError, QuasirandomError
from .groups import DEFAULT_CAPS, FiniteGroup, conjugacy_classes, element_order

__all__ = [
    "CharacterTable",
    "RepBoundReport",
    "character_table",
    "min_nontrivial_irrep_dim",
    "verify_rep_bounds",
    "MODULUS_LIMIT",
]

MODULUS_LIMIT = 10**7


@dataclass
class CharacterTable:
    group: str
    representatives: list
    sizes: list
    table: np.ndarray  # rows: irreducible characters, columns: classes
    dims: list
    modulus: int
    exponent: int

    @property
    def r(self) -> int:
        return len(self.sizes)

    @property
    def order(self) -> int:
        return int(sum(self.sizes))

    def orthogonality_residual(self) -> float:
        """Largest entry of ``|X diag(sizes) X^* - n I|``."""
        X = self.table
        gram = (X * np.asarray(self.sizes)) @ X.conj().T
        return float(np.abs(gram - self.order * np.eye(self.r)).max())

    def column_residual(self) -> float:
        """Largest entry of ``|X^* X - diag(n / sizes)|``."""
        X = self.table
        gram = X.conj().T @ X
        return float(np.abs(gram - np.diag(self.order / np.asarray(self.sizes, dtype=float))).max())

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "classes": self.representatives,
            "sizes": self.sizes,
            "dims": self.dims,
            "re": self.table.real.tolist(),
            "im": self.table.imag.tolist(),
            "modulus": self.modulus,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# -- linear algebra over F_p ------------------------------------------------
# Entries stay below p < 1e7, so products fit comfortably in int64.

def _rref(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    R = np.array(M, dtype=np.int64) % p
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        R[r] = R[r] * pow(int(R[r, c]), -1, p) % p
        others = np.flatnonzero(R[:, c])
        others = others[others != r]
        if others.size:
            R[others] = (R[others] - R[others, c][:, None] * R[r][None, :]) % p
        pivots.append(c)
        r += 1
    return R, pivots


def _nullspace(M: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning the right nullspace of ``M`` mod ``p``."""
    R, pivots = _rref(M, p)
    cols = M.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    N = np.zeros((cols, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        N[f, j] = 1
        for i, c in enumerate(pivots):
            N[c, j] = (-R[i, f]) % p
    return N


def _restrict(W: np.ndarray, Y: np.ndarray, p: int) -> np.ndarray:
    """``B`` with ``W B = Y`` for ``W`` of full column rank."""
    d = W.shape[1]
    R, pivots = _rref(np.hstack([W, Y]), p)
    if pivots[:d] != list(range(d)):
        raise QuasirandomError("subspace is not invariant under a class matrix")
    return R[:d, d:]


def _charpoly(B: np.ndarray, p: int) -> list[int]:
    """Monic characteristic polynomial, highest degree first (Faddeev-LeVerrier).

    Needs ``p > dim``, which holds because ``p > 2 sqrt(n) >= r``."""
    d = B.shape[0]
    coeffs = [1]
    Mk = np.zeros_like(B)
    eye = np.eye(d, dtype=np.int64)
    for k in range(1, d + 1):
        Mk = (B @ Mk + coeffs[-1] * eye) % p
        ck = (-int(np.trace(B @ Mk % p)) * pow(k, -1, p)) % p
        coeffs.append(ck)
    return coeffs


def _roots(coeffs: list[int], p: int) -> list[int]:
    x = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in coeffs:
        acc = (acc * x + c) % p
    return np.flatnonzero(acc == 0).tolist()


def _split(W: np.ndarray, Mi: np.ndarray, p: int) -> list[np.ndarray]:
    B = _restrict(W, Mi @ W % p, p)
    roots = _roots(_charpoly(B, p), p)
    if len(roots) == 1:
        return [W]
    d = B.shape[0]
    pieces = []
    for lam in roots:
        N = _nullspace((B - lam * np.eye(d, dtype=np.int64)) % p, p)
        pieces.append(W @ N % p)
    if sum(P.shape[1] for P in pieces) != d:
        raise QuasirandomError("class matrix does not diagonalise modulo the chosen prime")
    return pieces


# -- the algorithm ------------------------------------------------------------

def _find_modulus(exponent: int, n: int) -> int:
    floor = 2 * math.sqrt(n)
    p = exponent + 1
    while p < MODULUS_LIMIT:
        if p > floor and isprime(p):
            return p
        p += exponent
    raise ModulusSearchError(f"no prime = 1 mod {exponent} above {floor:.1f} below {MODULUS_LIMIT}")


def _class_coefficients(G: FiniteGroup, class_of: np.ndarray, reps: list[int]) -> np.ndarray:
    """``c[i, j, k] = #{x in C_i : x^-1 z_k in C_j}`` for representatives ``z_k``."""
    r = len(reps)
    xs = np.arange(G.order, dtype=np.int64)
    cx = class_of[xs]
    inv = G.inverses
    c = np.zeros((r, r, r), dtype=np.int64)
    for k, z in enumerate(reps):
        cy = class_of[G.mult_vec(inv, z)]
        c[:, :, k] = np.bincount(cx * r + cy, minlength=r * r).reshape(r, r)
    return c


def _power_classes(G: FiniteGroup, g: int, o: int, class_of: np.ndarray) -> list[int]:
    out = []
    x = G.identity
    for _ in range(o):
        out.append(int(class_of[x]))
        x = G.mult(x, g)
    return out


def character_table(G: FiniteGroup, caps=DEFAULT_CAPS) -> CharacterTable:
    """Complex character table with the trivial character first and the
    remaining rows sorted by dimension."""
    n = G.order
    if n > caps.irreps:
        raise CapExceededError(f"character table for order {n} exceeds cap {caps.irreps}")
    cc = conjugacy_classes(G, cap=caps.classes)
    r = len(cc)
    if r > caps.irrep_classes:
        raise CapExceededError(f"{r} classes exceed the cap of {caps.irrep_classes}")
    class_of = np.asarray(cc.class_of)
    reps = cc.representatives
    sizes = np.array(cc.sizes, dtype=np.int64)
    e_cls = int(class_of[G.identity])
    orders = [element_order(G, z) for z in reps]
    exponent = math.lcm(*orders)
    p = _find_modulus(exponent, n)

    coeff = _class_coefficients(G, class_of, reps) % p
    spaces = [np.eye(r, dtype=np.int64)]
    for i in range(r):
        if i == e_cls:
            continue
        if all(W.shape[1] == 1 for W in spaces):
            break
        nxt = []
        for W in spaces:
            nxt.extend([W] if W.shape[1] == 1 else _split(W, coeff[i], p))
        spaces = nxt
    if len(spaces) != r or any(W.shape[1] != 1 for W in spaces):
        raise QuasirandomError("class matrices failed to separate the characters")

    # reduce each eigenvector to a character mod p
    inv_sizes = np.array([pow(int(h), -1, p) for h in sizes], dtype=np.int64)
    inverse_class = class_of[G.inverses[reps]]
    modular = []
    for W in spaces:
        w = W[:, 0] % p
        w = w * pow(int(w[e_cls]), -1, p) % p
        # sum_i w_i w_{i'} / h_i = n / d^2
        s = int(np.sum(w * w[inverse_class] % p * inv_sizes % p) % p)
        d_sq = n * pow(s, -1, p) % p
        d = next((t for t in range(1, math.isqrt(n) + 1) if t * t % p == d_sq), None)
        if d is None:
            raise QuasirandomError("no integer degree matches the reduced character")
        modular.append(w * d % p * inv_sizes % p)

    # lift via power maps: chi(g) = sum_s m_s exp(2 pi i s / o)
    z = primitive_root(p)
    table = np.zeros((r, r), dtype=np.complex128)
    chars = np.array(modular, dtype=np.int64)
    for j, (g, o) in enumerate(zip(reps, orders)):
        pcls = _power_classes(G, g, o, class_of)
        y_inv = pow(pow(z, (p - 1) // o, p), -1, p)
        ypow = np.array([pow(y_inv, t, p) for t in range(o)], dtype=np.int64)
        ls = np.arange(o)
        E = ypow[np.outer(ls, ls) % o]  # E[l, s] = y^(-ls)
        vals = chars[:, pcls]
        if o * (p - 1) ** 2 < 2**62:
            mult = vals @ E % p
        else:
            mult = (vals.astype(object) @ E.astype(object)) % p
        mult = mult.astype(np.int64) * pow(o, -1, p) % p
        table[:, j] = mult.astype(float) @ np.exp(2j * np.pi * ls / o)
    table.real[np.abs(table.real) < 1e-12] = 0.0
    table.imag[np.abs(table.imag) < 1e-12] = 0.0

    dims_f = table[:, e_cls].real
    dims = np.rint(dims_f).astype(int)
    trivial = [bool(np.allclose(row, 1.0)) for row in table]
    order = sorted(range(r), key=lambda a: (not trivial[a], dims[a], a))
    # identity class first among the columns
    cols = [e_cls] + [j for j in range(r) if j != e_cls]
    return CharacterTable(
        group=G.descriptor,
        representatives=[int(reps[j]) for j in cols],
        sizes=[int(sizes[j]) for j in cols],
        table=table[np.ix_(order, cols)],
        dims=[int(dims[a]) for a in order],
        modulus=p,
        exponent=exponent,
    )


def min_nontrivial_irrep_dim(G: FiniteGroup, table: CharacterTable | None = None) -> int:
    """Smallest dimension of a nontrivial irreducible representation."""
    table = table if table is not None else character_table(G)
    if table.r < 2:
        raise InputError("the trivial group has no nontrivial representation")
    return min(table.dims[1:])


@dataclass
class RepBoundReport:
    group: str
    context: str
    k: int
    bound: float
    passed: bool


def verify_rep_bounds(G: FiniteGroup, context: str, k: int | None = None) -> RepBoundReport:
    """Compare the computed ``k`` with ``(q-1)/2`` (context "psl2") or with
    ``sqrt(ln n)/2`` (context "simple")."""
    if k is None:
        k = min_nontrivial_irrep_dim(G)
    if context == "psl2":
        if G.kind != "psl2":
            raise InputError("psl2 context needs a psl2:q group")
        bound = (G.params["q"] - 1) / 2
    elif context == "simple":
        bound = math.sqrt(math.log(G.order)) / 2
    else:
        raise InputError(f"unknown context {context!r}; expected psl2 or simple")
    return RepBoundReport(G.descriptor, context, int(k), bound, k >= bound)
