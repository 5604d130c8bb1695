"""Exact solver for graph label propagation on small graphs.

Minimizes sum_{(i,j) in E} mu_ij (f_i - f_j)^2 with labeled values clamped,
by solving the Laplacian system L_uu f_u = -L_ul y_l directly. Each unlabeled
value ends up a weighted average of its neighbors, so the solution obeys the
maximum principle. This is the pedagogical oracle the trainer is checked
against, not a production path; it refuses systems above 2000 vertices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import DisconnectedUnlabeledError, SingularSystemError
from .graph import ExplicitEdges

MAX_DENSE_VERTICES = 2000


@dataclass
class PropagationProblem:
    """Explicit weighted graph plus per-vertex labels (0 = unlabeled)."""

    edges: ExplicitEdges
    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int8)
        if labels.ndim != 1:
            raise ValueError("labels must be a 1-d array")
        if not np.all(np.isin(labels, (-1, 0, 1))):
            raise ValueError("labels must be -1, 0 or +1")
        if labels.size < self.edges.n:
            raise ValueError("labels must cover every vertex")
        if not np.any(labels != 0):
            raise ValueError("at least one vertex must be labeled")
        self.labels = labels

    @property
    def n(self) -> int:
        return self.labels.size


def _check_reachability(problem: PropagationProblem) -> None:
    n = problem.n
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in zip(problem.edges.us, problem.edges.vs):
        adj[u].append(int(v))
        adj[v].append(int(u))
    seen = problem.labels != 0
    queue = deque(np.flatnonzero(seen).tolist())
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    stranded = np.flatnonzero(~seen)
    if stranded.size:
        raise DisconnectedUnlabeledError(
            f"unlabeled vertices {stranded.tolist()} are unreachable from any label"
        )


def solve_exact(problem: PropagationProblem) -> np.ndarray:
    """Return the per-vertex minimizer f with labeled entries clamped.

    Raises DisconnectedUnlabeledError when the solution would be
    underdetermined, SingularSystemError if the factorization fails or the
    residual exceeds 1e-10 relative.
    """
    n = problem.n
    if n > MAX_DENSE_VERTICES:
        raise ValueError(f"dense solver capped at {MAX_DENSE_VERTICES} vertices, got {n}")
    _check_reachability(problem)

    labeled = problem.labels != 0
    f = problem.labels.astype(np.float64)
    if labeled.all():
        return f

    W = np.zeros((n, n), dtype=np.float64)
    us, vs, ws = problem.edges.us, problem.edges.vs, problem.edges.ws
    W[us, vs] = ws
    W[vs, us] = ws
    L = np.diag(W.sum(axis=0)) - W

    uu = ~labeled
    L_uu = L[np.ix_(uu, uu)]
    rhs = -L[np.ix_(uu, labeled)] @ f[labeled]
    try:
        f_u = scipy.linalg.solve(L_uu, rhs, assume_a="pos")
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystemError(str(exc)) from exc

    residual = np.linalg.norm(L_uu @ f_u - rhs)
    scale = max(np.linalg.norm(rhs), 1.0)
    if not np.isfinite(f_u).all() or residual > 1e-10 * scale:
        raise SingularSystemError(
            f"linear solve residual {residual:.3e} exceeds tolerance"
        )
    f[uu] = f_u
    return f


def threshold_labels(f: np.ndarray) -> np.ndarray:
    """Discrete labels from real-valued scores: +1 where f >= 0, else -1."""
    f = np.asarray(f, dtype=np.float64)
    return np.where(f >= 0.0, 1, -1).astype(np.int8)
