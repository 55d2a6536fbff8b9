"""Singular values of bipartite Cayley graphs.

The bipartite Cayley graph of ``A`` has two copies of the group as vertex
classes, with ``x -> y`` an edge iff ``y x^-1`` is in ``A``.  Its adjacency
operator sends ``f`` to ``A * f``.  Singular values are square roots of the
eigenvalues of the Gram matrix ``Gram(x, x') = #{y : y x^-1, y x'^-1 in A}``;
the graph is regular, so constants are an exact eigenvector and the
zero-sum part is obtained by projecting them out before the eigensolve.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import CapExceededError, InputError
from .groups import DEFAULT_CAPS, FiniteGroup
from .jacobi import jacobi_eigh
from .setfun import Subset

__all__ = [
    "SpectralReport",
    "SpectralBoundReport",
    "bipartite_cayley_matrix",
    "bipartite_cayley_gram",
    "count_four_cycles",
    "cluster_values",
    "spectral_report",
    "verify_lemma_3_2",
    "eigenspace_translation_residual",
]


def _check_cap(G: FiniteGroup, cap: int):
    if G.order > cap:
        raise CapExceededError(f"spectral computation for order {G.order} exceeds cap {cap}")


def bipartite_cayley_matrix(G: FiniteGroup, A: Subset, cap: int = DEFAULT_CAPS.spectral) -> np.ndarray:
    """0/1 matrix with ``M[x, y] = 1`` iff ``y x^-1 in A``."""
    _check_cap(G, cap)
    n = G.order
    xs = np.arange(n)
    heads = G.mult_vec(A.indices[:, None], xs[None, :])  # heads[i, x] = a_i x
    M = np.zeros((n, n), dtype=np.float64)
    M[np.broadcast_to(xs, heads.shape), heads] = 1.0
    return M


def bipartite_cayley_gram(G: FiniteGroup, A: Subset, cap: int = DEFAULT_CAPS.spectral) -> np.ndarray:
    """``Gram[x, x'] = #{y : y x^-1 in A and y x'^-1 in A}`` as a float matrix."""
    M = bipartite_cayley_matrix(G, A, cap)
    return M @ M.T


def count_four_cycles(G: FiniteGroup, A: Subset) -> int:
    """Labelled 4-cycles starting in the left class, counted combinatorially.

    The neighbourhood of ``x`` is ``A x``, and ``|Ax ∩ Ax'| = |A ∩ A g|`` with
    ``g = x' x^-1``, so the count is ``n * sum_g |A ∩ Ag|^2``."""
    idx = A.indices
    total = 0
    for g in range(G.order):
        c = int(A.mask[G.mult_vec(idx, g)].sum())
        total += c * c
    return G.order * total


def cluster_values(values, tau: float) -> list[tuple[float, int]]:
    """Group descending values into runs whose consecutive gaps are <= tau."""
    clusters: list[list[float]] = []
    for v in values:
        if clusters and clusters[-1][-1] - v <= tau:
            clusters[-1].append(float(v))
        else:
            clusters.append([float(v)])
    return [(c[0], len(c)) for c in clusters]


@dataclass
class SpectralReport:
    group: str
    order: int
    cardinality: int
    singular_values: list
    clusters: list
    lambda1: float
    lambda2: float
    lambda2_multiplicity: int
    sum_sq: float
    sum_4: float
    tolerance: float
    top_space: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("top_space")
        d["clusters"] = [list(c) for c in self.clusters]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def spectral_report(
    G: FiniteGroup,
    A: Subset,
    tau: float | None = None,
    cap: int = DEFAULT_CAPS.spectral,
    keep_vectors: bool = False,
    compiled: bool | None = None,
) -> SpectralReport:
    """Singular values, lambda_2 over zero-sum inputs, and clusters.

    ``tau`` defaults to ``max(1e-6 * lambda_1, 1e-9)``.  With ``keep_vectors``
    an orthonormal basis of the top zero-sum singular space is attached as
    ``top_space``."""
    _check_cap(G, cap)
    if A.n != G.order:
        raise InputError("subset and group orders differ")
    if tau is not None and tau <= 0:
        raise InputError("tolerance must be positive")
    n = G.order
    gram = bipartite_cayley_gram(G, A, cap)
    # project constants out: P gram P with P = I - J/n
    row = gram.mean(axis=1, keepdims=True)
    col = gram.mean(axis=0, keepdims=True)
    deflated = gram - row - col + gram.mean()
    evals, V = jacobi_eigh(deflated, vectors=True, compiled=compiled)
    const = int(np.argmax(np.abs(V.sum(axis=0))))
    top_eval = float(gram.sum() / n)  # Rayleigh quotient of the constant vector
    noise = 1e-12 * max(top_eval, float(np.abs(evals).max()) if n else 0.0)
    evals = np.where(np.abs(evals) <= noise, 0.0, evals)
    nontrivial = np.delete(evals, const)
    vecs = np.delete(V, const, axis=1)
    full = np.sort(np.concatenate([[top_eval], nontrivial]))[::-1]
    sing = np.sqrt(np.clip(full, 0.0, None))
    lambda1 = float(sing[0])
    if tau is None:
        tau = max(1e-6 * lambda1, 1e-9)
    nt_sing = np.sqrt(np.clip(nontrivial, 0.0, None))
    lambda2 = float(nt_sing[0]) if nt_sing.size else 0.0
    mult = cluster_values(nt_sing, tau)[0][1] if nt_sing.size else 0
    return SpectralReport(
        group=G.descriptor,
        order=n,
        cardinality=A.cardinality,
        singular_values=sing.tolist(),
        clusters=cluster_values(sing, tau),
        lambda1=lambda1,
        lambda2=lambda2,
        lambda2_multiplicity=mult,
        sum_sq=float(np.sum(full)),
        sum_4=float(np.sum(full**2)),
        tolerance=float(tau),
        top_space=vecs[:, :mult].copy() if keep_vectors else None,
    )


@dataclass
class SpectralBoundReport:
    k: int
    lambda2: float
    bound: float
    passed: bool
    multiplicity: int
    multiplicity_ok: bool | None  # None when lambda_2 is within tolerance of 0


def verify_lemma_3_2(
    G: FiniteGroup,
    A: Subset,
    k: int,
    report: SpectralReport | None = None,
    tau: float | None = None,
) -> SpectralBoundReport:
    """Check ``lambda_2 <= sqrt(|A| n / k)`` and that the top zero-sum singular
    space has dimension at least ``k`` whenever ``lambda_2 > tau``.

    ``k`` must be a valid lower bound for the dimension of every nontrivial
    irreducible representation of ``G``."""
    if k <= 0:
        raise InputError("k must be a positive integer")
    if report is None:
        report = spectral_report(G, A, tau)
    bound = math.sqrt(A.cardinality * G.order / k)
    passed = report.lambda2 <= bound * (1 + 1e-9)
    mult_ok = None
    if report.lambda2 > report.tolerance:
        mult_ok = report.lambda2_multiplicity >= k
    return SpectralBoundReport(k, report.lambda2, bound, passed, report.lambda2_multiplicity, mult_ok)


def eigenspace_translation_residual(G: FiniteGroup, basis: np.ndarray, g: int) -> float:
    """Largest relative residual of ``v -> (x -> v(x g))`` leaving span(basis)."""
    perm = G.right_col(g)
    worst = 0.0
    for v in basis.T:
        w = v[perm]
        resid = w - basis @ (basis.T @ w)
        worst = max(worst, float(np.linalg.norm(resid) / np.linalg.norm(w)))
    return worst
