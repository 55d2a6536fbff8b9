"""Subsets and complex functions on a group, convolution, and the counting
quantities built from them (product triples, quadruple sums, translate
intersections)."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable

import numpy as np

from .errors import InputError

if TYPE_CHECKING:
    from .groups import FiniteGroup

__all__ = [
    "Subset",
    "GroupFunction",
    "QuasirandomnessWarning",
    "convolve",
    "count_triples",
    "count_quadruples",
    "quasirandomness_constant",
    "translate_intersection",
    "left_translate",
    "right_translate",
    "inverse_set",
    "subset_to_json",
    "subset_from_json",
    "function_to_json",
    "function_from_json",
]


class QuasirandomnessWarning(UserWarning):
    """The input to a quasirandomness functional violates its side conditions."""


@dataclass(frozen=True, eq=False)
class Subset:
    """A subset of a group of order ``n`` stored as a boolean mask."""

    n: int
    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != (self.n,):
            raise InputError(f"mask of shape {mask.shape} does not match order {self.n}")
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "cardinality", int(mask.sum()))

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "Subset":
        idx = np.fromiter((int(i) for i in indices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise InputError(f"subset index out of range for order {n}")
        mask = np.zeros(n, dtype=bool)
        mask[idx] = True
        return cls(n, mask)

    @classmethod
    def full(cls, n: int) -> "Subset":
        return cls(n, np.ones(n, dtype=bool))

    @classmethod
    def empty(cls, n: int) -> "Subset":
        return cls(n, np.zeros(n, dtype=bool))

    @classmethod
    def random(cls, n: int, density: float, rng: np.random.Generator) -> "Subset":
        """Uniform subset of size ``round(density * n)``."""
        size = int(round(density * n))
        mask = np.zeros(n, dtype=bool)
        mask[rng.choice(n, size=size, replace=False)] = True
        return cls(n, mask)

    @property
    def density(self) -> float:
        return self.cardinality / self.n

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def indicator(self) -> np.ndarray:
        return self.mask.astype(np.int64)

    def __len__(self):
        return self.cardinality

    def __contains__(self, x) -> bool:
        return bool(self.mask[int(x)])

    def __iter__(self):
        return iter(self.indices.tolist())

    def __eq__(self, other):
        return isinstance(other, Subset) and self.n == other.n and np.array_equal(self.mask, other.mask)

    def __and__(self, other: "Subset") -> "Subset":
        _same_order(self.n, other.n)
        return Subset(self.n, self.mask & other.mask)

    def __or__(self, other: "Subset") -> "Subset":
        _same_order(self.n, other.n)
        return Subset(self.n, self.mask | other.mask)

    def __repr__(self):
        shown = self.indices[:8].tolist()
        more = ", ..." if self.cardinality > 8 else ""
        return f"Subset(n={self.n}, {{{', '.join(map(str, shown))}{more}}})"


@dataclass(frozen=True, eq=False)
class GroupFunction:
    """A complex-valued function on a group of order ``n``.

    ``balanced`` asserts that the values sum to zero (within ``1e-9 * n``);
    the assertion is checked at construction."""

    n: int
    values: np.ndarray
    balanced: bool = field(default=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128).copy()
        if vals.shape != (self.n,):
            raise InputError(f"function of shape {vals.shape} does not match order {self.n}")
        if not np.all(np.isfinite(vals)):
            raise InputError("function has non-finite entries")
        if self.balanced and abs(vals.sum()) > 1e-9 * self.n:
            raise InputError("function flagged balanced but does not sum to zero")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def indicator(cls, A: Subset) -> "GroupFunction":
        return cls(A.n, A.mask.astype(np.complex128))

    @classmethod
    def delta(cls, n: int, a: int) -> "GroupFunction":
        v = np.zeros(n, dtype=np.complex128)
        v[a] = 1
        return cls(n, v)

    def is_sum_zero(self) -> bool:
        return abs(self.values.sum()) <= 1e-9 * self.n

    def max_modulus(self) -> float:
        return float(np.abs(self.values).max()) if self.n else 0.0


def _same_order(n1: int, n2: int):
    if n1 != n2:
        raise InputError(f"mismatched group orders {n1} and {n2}")


def _values(x) -> np.ndarray:
    if isinstance(x, Subset):
        return x.indicator()
    if isinstance(x, GroupFunction):
        return x.values
    return np.asarray(x)


def _rows(G: "FiniteGroup"):
    """Yield ``(u, [u*v for v in G])``."""
    for u in range(G.order):
        yield u, G.left_row(u)


def convolve(G: "FiniteGroup", f, g) -> np.ndarray:
    """``(f*g)(y) = sum over u v = y of f(u) g(v)``.

    Accepts Subsets (exact integer arithmetic), GroupFunctions or arrays."""
    fv, gv = _values(f), _values(g)
    _same_order(fv.shape[0], G.order)
    _same_order(gv.shape[0], G.order)
    exact = np.issubdtype(fv.dtype, np.integer) and np.issubdtype(gv.dtype, np.integer)
    out = np.zeros(G.order, dtype=np.int64 if exact else np.result_type(fv, gv, np.float64))
    for u in np.flatnonzero(fv):
        # row u of the table is a permutation, so fancy-index accumulation is safe
        out[G.left_row(int(u))] += fv[u] * gv
    return out


def count_triples(G: "FiniteGroup", A: Subset, B: Subset, C: Subset) -> int:
    """Number of ``(a, b, c)`` in ``A x B x C`` with ``a b = c``."""
    for S in (A, B, C):
        _same_order(S.n, G.order)
    return int(convolve(G, A, B)[C.mask].sum())


def count_quadruples(G: "FiniteGroup", f) -> float:
    """``sum_y |sum_x f(x) conj(f(y x))|^2``.

    Equal to the sum of ``f(a) conj f(b) conj f(c) f(d)`` over quadruples with
    ``a b^-1 = c d^-1``; real and non-negative."""
    fv = _values(f).astype(np.complex128)
    _same_order(fv.shape[0], G.order)
    inner = np.empty(G.order, dtype=np.complex128)
    for y, row in _rows(G):
        inner[y] = np.dot(fv, np.conj(fv[row]))
    return float(np.sum(inner.real ** 2 + inner.imag ** 2))


def quasirandomness_constant(G: "FiniteGroup", f) -> float:
    """The constant ``c`` for which ``f`` is ``c``-quasirandom: quadruple sum / n^3.

    Warns with QuasirandomnessWarning when ``f`` is not balanced or exceeds
    modulus one; the value is computed regardless."""
    fv = _values(f).astype(np.complex128)
    n = G.order
    if abs(fv.sum()) > 1e-9 * n:
        warnings.warn("function does not sum to zero", QuasirandomnessWarning, stacklevel=2)
    if fv.size and np.abs(fv).max() > 1 + 1e-12:
        warnings.warn("function exceeds modulus 1", QuasirandomnessWarning, stacklevel=2)
    return count_quadruples(G, fv) / n**3


def left_translate(G: "FiniteGroup", x: int, B: Subset) -> Subset:
    """``xB = {x b : b in B}``."""
    mask = np.zeros(G.order, dtype=bool)
    mask[G.mult_vec(x, B.indices)] = True
    return Subset(G.order, mask)


def right_translate(G: "FiniteGroup", B: Subset, x: int) -> Subset:
    """``Bx = {b x : b in B}``."""
    mask = np.zeros(G.order, dtype=bool)
    mask[G.mult_vec(B.indices, x)] = True
    return Subset(G.order, mask)


def inverse_set(G: "FiniteGroup", B: Subset) -> Subset:
    mask = np.zeros(G.order, dtype=bool)
    mask[G.inverses[B.indices]] = True
    return Subset(G.order, mask)


def translate_intersection(G: "FiniteGroup", A: Subset, B: Subset, x: int) -> int:
    """``|A ∩ xB|``."""
    _same_order(A.n, B.n)
    return int(A.mask[G.mult_vec(x, B.indices)].sum())


# -- JSON file formats ------------------------------------------------------

def subset_to_json(descriptor: str, A: Subset) -> str:
    return json.dumps({"group": descriptor, "elements": A.indices.tolist()})


def subset_from_json(text: str, n: int | None = None) -> tuple[str, Subset]:
    try:
        doc = json.loads(text)
        descriptor, elements = doc["group"], doc["elements"]
    except (ValueError, KeyError, TypeError):
        raise InputError("subset JSON needs 'group' and 'elements'") from None
    if n is None:
        from .groups import make_group

        n = make_group(descriptor).order
    return descriptor, Subset.from_indices(n, elements)


def function_to_json(descriptor: str, f: GroupFunction) -> str:
    return json.dumps({"group": descriptor, "re": f.values.real.tolist(), "im": f.values.imag.tolist()})


def function_from_json(text: str) -> tuple[str, GroupFunction]:
    try:
        doc = json.loads(text)
        vals = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc.get("im", [0.0] * len(doc["re"])), dtype=float)
        return doc["group"], GroupFunction(len(vals), vals)
    except (ValueError, KeyError, TypeError):
        raise InputError("function JSON needs 'group', 're' and 'im'") from None
