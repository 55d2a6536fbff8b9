"""Cyclic Jacobi eigensolver for real symmetric matrices.

Rotations follow a round-robin (tournament) schedule: each round pairs every
index with one partner, so the rotations of a round touch disjoint index
pairs.  A sweep is ``n-1`` rounds (``n`` padded to even), annihilating every
off-diagonal pair once.  The schedule is fixed, so results are deterministic.

Two kernels execute the same schedule: a compiled scalar kernel (numba) and
a pure-numpy kernel that applies each round as one sparse block rotation.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import ConvergenceError

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

__all__ = ["jacobi_eigh", "round_robin_pairs", "off_norm", "HAVE_NUMBA"]

HAVE_NUMBA = numba is not None


def round_robin_pairs(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint index pairs covering every pair of ``range(n)`` once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        p, q = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                p.append(min(a, b))
                q.append(max(a, b))
        rounds.append((np.array(p, dtype=np.int64), np.array(q, dtype=np.int64)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def off_norm(A: np.ndarray) -> float:
    off = A - np.diag(np.diag(A))
    return float(np.linalg.norm(off))


def _sweep_py(A, Vt, rounds):
    n = A.shape[0]
    for p, q in rounds:
        apq = A[p, q]
        active = apq != 0
        if not active.any():
            continue
        p, q, apq = p[active], q[active], apq[active]
        theta = (A[q, q] - A[p, p]) / (2.0 * apq)
        t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
        t[theta == 0] = 1.0
        c = 1.0 / np.sqrt(t * t + 1.0)
        s = t * c
        rest = np.setdiff1d(np.arange(n), np.concatenate([p, q]), assume_unique=True)
        R = sp.csr_matrix(
            (
                np.concatenate([c, -s, s, c, np.ones(rest.size)]),
                (np.concatenate([p, p, q, q, rest]), np.concatenate([p, q, p, q, rest])),
            ),
            shape=(n, n),
        )
        # J^T A J is symmetric, so J^T (J^T A)^T gives it with row passes only
        A[...] = R @ (R @ A).T
        A[p, q] = 0.0
        A[q, p] = 0.0
        if Vt is not None:
            Vt[...] = R @ Vt


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _sweep_nb(A, Vt, P, Q, with_vectors):  # pragma: no cover - compiled
        # The pairs of a round are disjoint, so their rotations commute: all
        # angles come from the current matrix, then one row pass and one column
        # pass (walked row by row to stay cache friendly) apply the round.
        n = A.shape[0]
        m = P.shape[1]
        cs = np.zeros(m)
        sn = np.zeros(m)
        dp = np.zeros(m)
        dq = np.zeros(m)
        live = np.zeros(m, dtype=np.bool_)
        for r in range(P.shape[0]):
            for k in range(m):
                p = P[r, k]
                q = Q[r, k]
                live[k] = False
                if p < 0:
                    continue
                apq = A[p, q]
                if apq == 0.0:
                    continue
                app = A[p, p]
                aqq = A[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                cs[k] = c
                sn[k] = t * c
                dp[k] = app - t * apq
                dq[k] = aqq + t * apq
                live[k] = True
            for k in range(m):
                if not live[k]:
                    continue
                p = P[r, k]
                q = Q[r, k]
                c = cs[k]
                s = sn[k]
                for j in range(n):
                    x = A[p, j]
                    y = A[q, j]
                    A[p, j] = c * x - s * y
                    A[q, j] = s * x + c * y
                if with_vectors:
                    for j in range(n):
                        x = Vt[p, j]
                        y = Vt[q, j]
                        Vt[p, j] = c * x - s * y
                        Vt[q, j] = s * x + c * y
            for j in range(n):
                for k in range(m):
                    if not live[k]:
                        continue
                    p = P[r, k]
                    q = Q[r, k]
                    x = A[j, p]
                    y = A[j, q]
                    A[j, p] = cs[k] * x - sn[k] * y
                    A[j, q] = sn[k] * x + cs[k] * y
            for k in range(m):
                if not live[k]:
                    continue
                p = P[r, k]
                q = Q[r, k]
                A[p, p] = dp[k]
                A[q, q] = dq[k]
                A[p, q] = 0.0
                A[q, p] = 0.0


def _schedule_arrays(rounds, n):
    P = np.full((max(len(rounds), 1), n // 2 + 1), -1, dtype=np.int64)
    Q = P.copy()
    for i, (p, q) in enumerate(rounds):
        P[i, : len(p)] = p
        Q[i, : len(q)] = q
    return P, Q


def jacobi_eigh(
    S: np.ndarray,
    rel_tol: float = 1e-12,
    max_sweeps: int = 50,
    vectors: bool = True,
    compiled: bool | None = None,
):
    """Eigen-decompose a real symmetric matrix by cyclic Jacobi sweeps.

    Stops once the off-diagonal Frobenius norm is at most
    ``rel_tol * ||S||_F``.  Returns ``(values, V)``: values sorted descending,
    ``V[:, i]`` the matching unit eigenvector (None when ``vectors`` is
    false).  ``compiled`` selects the numba kernel (default: when available).
    Raises ConvergenceError after ``max_sweeps`` sweeps.
    """
    A = np.array(S, dtype=np.float64)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    scale = np.abs(A).max() if n else 1.0
    if not np.allclose(A, A.T, rtol=0, atol=1e-12 * scale):
        raise ValueError("matrix must be symmetric")
    A = np.ascontiguousarray((A + A.T) / 2)
    Vt = np.eye(n)  # rows are eigenvectors
    use_nb = HAVE_NUMBA if compiled is None else (compiled and HAVE_NUMBA)
    rounds = round_robin_pairs(n) if n > 1 else []
    if use_nb:
        P, Q = _schedule_arrays(rounds, n)
    threshold = rel_tol * np.linalg.norm(A)
    sweeps = 0
    while off_norm(A) > threshold:
        if sweeps >= max_sweeps:
            raise ConvergenceError(f"Jacobi did not converge within {max_sweeps} sweeps")
        sweeps += 1
        if use_nb:
            _sweep_nb(A, Vt, P, Q, vectors)
        else:
            _sweep_py(A, Vt if vectors else None, rounds)
    values = np.diag(A).copy()
    order = np.argsort(-values, kind="stable")
    return values[order], (Vt[order].T.copy() if vectors else None)
