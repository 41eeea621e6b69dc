"""Split distributions: maximum-entropy fits to a set of marginal constraints.

For a constraint node with facets ``F_1 .. F_k`` the split distribution is
the entropy maximizer among all ``q`` with ``q(F_j) = p(F_j)``.  It is
found by iterative proportional fitting started from the uniform
distribution on the *support of the solution*.

Plain IPF from the full uniform table converges only like ``1/sweeps``
when the solution has zeros that the constraints imply jointly but no
single marginal shows (the two-input And gate is the standard case).
Those cells are identified beforehand with one linear program; on the
reduced support the solution is interior and IPF converges geometrically.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .distribution import JointDistribution, _kl_arrays
from .errors import ConstraintInconsistencyError, ConvergenceError, DistributionError
from .lattice import ConstraintNode

__all__ = [
    "IpfOptions",
    "SplitCache",
    "SplitResult",
    "constraint_information",
    "split_distribution",
    "triplewise_information",
]

# entries of a split distribution below Q_FLOOR are treated as zero when
# p carries more than P_FLOOR there
Q_FLOOR = 1e-15
P_FLOOR = 1e-12


@dataclass(frozen=True)
class IpfOptions:
    tolerance: float = 1e-10
    max_sweeps: int = 100_000
    base: float = 2

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")
        if self.base == "e":
            object.__setattr__(self, "base", math.e)
        elif self.base not in (2, math.e):
            raise ValueError("base must be 2 or e")


@dataclass(frozen=True)
class SplitResult:
    distribution: JointDistribution
    sweeps_used: int
    final_gap: float


def _facet_axes(node: ConstraintNode):
    out = []
    for f in node.facets:
        keep = tuple(i for i in range(node.nvars) if f >> i & 1)
        drop = tuple(i for i in range(node.nvars) if not f >> i & 1)
        out.append((keep, drop))
    return out


def _max_entropy_support(p: np.ndarray, facets, targets) -> np.ndarray:
    """Boolean mask of cells that are positive for some ``q`` meeting the constraints.

    The maximum-entropy solution lies in the relative interior of the
    constraint polytope, so its support is exactly this set.
    """
    candidate = np.ones(p.shape, dtype=bool)
    for t in targets:
        candidate &= t > 0
    if np.array_equal(candidate, p > 0):
        return candidate

    cells = np.flatnonzero(candidate)
    m = cells.size
    coords = np.unravel_index(cells, p.shape)
    rows, cols, rhs = [], [], []
    offset = 0
    for (keep, _), t in zip(facets, targets):
        sub_shape = tuple(p.shape[i] for i in keep)
        idx = np.ravel_multi_index(tuple(coords[i] for i in keep), sub_shape) if keep else np.zeros(m, int)
        used, local = np.unique(idx, return_inverse=True)
        rows.append(offset + local)
        cols.append(np.arange(m))
        rhs.append(t.ravel()[used])
        offset += used.size
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    b = np.concatenate(rhs)
    a = sparse.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(offset, m))
    # variables: q (m), t (m), s (1);  A q - b s = 0,  t <= q,  0 <= t <= 1
    a_eq = sparse.hstack([a, sparse.csr_matrix((offset, m)), sparse.csr_matrix(-b.reshape(-1, 1))])
    eye = sparse.identity(m, format="csr")
    a_ub = sparse.hstack([-eye, eye, sparse.csr_matrix((m, 1))])
    c = np.concatenate([np.zeros(m), -np.ones(m), [0.0]])
    bounds = [(0, None)] * m + [(0, 1)] * m + [(0, None)]
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(m), A_eq=a_eq, b_eq=np.zeros(offset),
                  bounds=bounds, method="highs")
    if res.status != 0:
        raise ConstraintInconsistencyError(f"support program failed: {res.message}")
    support = np.zeros(p.size, dtype=bool)
    support[cells[res.x[m:2 * m] > 0.5]] = True
    if not np.any(support):
        raise ConstraintInconsistencyError("marginal constraints admit no distribution")
    return support.reshape(p.shape)


def split_distribution(p: JointDistribution, node: ConstraintNode, opts: IpfOptions | None = None) -> SplitResult:
    """Maximum-entropy distribution sharing ``p``'s marginals on every facet of ``node``.

    Raises :class:`ConvergenceError` if the largest L1 gap between a facet
    marginal and its target is still above ``opts.tolerance`` after
    ``opts.max_sweeps`` sweeps.
    """
    opts = opts or IpfOptions()
    if node.nvars != p.nvars:
        raise DistributionError(
            f"node is over {node.nvars} variables, distribution has {p.nvars}"
        )
    facets = _facet_axes(node)
    targets = [p.table.sum(axis=drop, keepdims=True) for _, drop in facets]

    support = _max_entropy_support(p.table, facets, targets)
    q = support / np.count_nonzero(support)

    def gap():
        return max(float(np.abs(q.sum(axis=drop, keepdims=True) - t).sum())
                   for (_, drop), t in zip(facets, targets))

    current = math.inf
    for sweep in range(1, opts.max_sweeps + 1):
        for (_, drop), t in zip(facets, targets):
            cur = q.sum(axis=drop, keepdims=True)
            q = q * np.divide(t, cur, out=np.zeros_like(cur), where=cur > 0)
        current = gap()
        if current <= opts.tolerance:
            return SplitResult(JointDistribution(p.variables, q), sweep, current)
    raise ConvergenceError(
        f"iterative scaling stopped after {opts.max_sweeps} sweeps with gap {current:.3g}",
        sweeps=opts.max_sweeps, gap=current, node=node,
    )


def constraint_information(p: JointDistribution, node: ConstraintNode, opts: IpfOptions | None = None) -> float:
    """``D(p || p_S)``: information in ``p`` beyond the constraints of ``node``."""
    opts = opts or IpfOptions()
    split = split_distribution(p, node, opts).distribution
    return _kl_arrays(p.table, split.table, opts.base, q_floor=Q_FLOOR, p_floor=P_FLOOR)


def triplewise_information(p: JointDistribution, opts: IpfOptions | None = None) -> float:
    """Information in the three-way interaction beyond all pairwise marginals."""
    if p.nvars != 3:
        raise DistributionError(f"triplewise information needs 3 variables, got {p.nvars}")
    return constraint_information(p, ConstraintNode(3, (0b011, 0b101, 0b110)), opts)


class SplitCache:
    """Split distributions of one true distribution, memoized per node.

    Safe to share between threads: a value is stored once, fully built,
    and the first stored result wins if two threads race on a key.
    """

    def __init__(self, p: JointDistribution, opts: IpfOptions | None = None):
        self.p = p
        self.opts = opts or IpfOptions()
        self._store: dict[ConstraintNode, SplitResult] = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._store)

    def __contains__(self, node):
        return node in self._store

    def split(self, node: ConstraintNode) -> SplitResult:
        hit = self._store.get(node)
        if hit is not None:
            return hit
        result = split_distribution(self.p, node, self.opts)
        with self._lock:
            return self._store.setdefault(node, result)

    def divergence(self, upper: ConstraintNode, lower: ConstraintNode) -> float:
        """``D(p_upper || p_lower)`` between two cached split distributions."""
        a = self.split(upper).distribution.table
        b = self.split(lower).distribution.table
        return _kl_arrays(a, b, self.opts.base, q_floor=Q_FLOOR, p_floor=P_FLOOR)
