"""Information contributions of every predictor, averaged over maximal chains.

Each node ``S`` of the input lattice gets the value
``v(S) = D(p_S || p_bottom)``.  Along a Hasse edge that adds face ``A`` the
gain ``v(S') - v(S)`` equals ``D(p_S' || p_S)`` by the Pythagorean
relation, and ``I_A`` is the average of those gains over all maximal
chains, i.e. the chain-count-weighted sum over the edges adding ``A``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .distribution import JointDistribution, mutual_information
from .errors import DistributionError, LatticeError
from .lattice import (
    DEFAULT_CAP,
    InputLattice,
    enumerate_lattice,
    format_face,
    sigma,
)
from .projection import IpfOptions, SplitCache

__all__ = [
    "ChainDecomposition",
    "DecompositionResult",
    "NodeValues",
    "PropertyCheck",
    "chain_decomposition",
    "information_contribution",
    "node_values",
    "verify_result",
]

NEGATIVE_SLACK = 1e-9
RESIDUAL_SLACK = 1e-7
SINGLETON_SLACK = 1e-6


def _face_key(face: int):
    return (bin(face).count("1"), [i for i in range(face.bit_length()) if face >> i & 1])


@dataclass(frozen=True)
class DecompositionResult:
    """Contributions ``I_A`` keyed by face bitmask, plus diagnostics.

    ``contributions`` holds the raw values; :meth:`clamped` zeroes float
    noise in ``[-1e-9, 0)`` for presentation.
    """

    n: int
    input_names: tuple[str, ...]
    target_name: str
    base: float
    contributions: dict[int, float]
    total_mi: float
    node_divergences: dict[int, float] = field(repr=False)
    sweeps: dict[int, int] = field(repr=False)

    @property
    def residual(self) -> float:
        return self.total_mi - sum(self.contributions.values())

    def faces(self) -> list[int]:
        """Predictors sorted by size, then lexicographically by input index."""
        return sorted(self.contributions, key=_face_key)

    def clamped(self) -> dict[int, float]:
        return {a: 0.0 if -NEGATIVE_SLACK <= v < 0 else v for a, v in self.contributions.items()}

    def label(self, face: int) -> str:
        return format_face(face, self.input_names)

    def by_label(self, clamp=True) -> dict[str, float]:
        values = self.clamped() if clamp else self.contributions
        return {self.label(a): values[a] for a in self.faces()}


@dataclass(frozen=True)
class ChainDecomposition:
    chain: tuple[int, ...]
    terms: tuple[float, ...]


@dataclass(frozen=True)
class NodeValues:
    """``D(p_S || p_bottom)`` for every lattice node, sharing one split cache."""

    lattice: InputLattice
    values: dict[int, float]
    sweeps: dict[int, int]
    cache: SplitCache


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    passed: bool
    slack: float
    detail: str = ""


def input_system(p: JointDistribution) -> tuple[tuple[int, ...], int]:
    """Positions of the inputs and of the single target."""
    t = p.target_index
    if t is None:
        raise DistributionError("distribution has no target variable")
    inputs = p.input_indices
    if not inputs:
        raise DistributionError("distribution has no input variables")
    return inputs, t


def node_values(p: JointDistribution, opts: IpfOptions | None = None, *, cache: SplitCache | None = None,
                lattice: InputLattice | None = None, workers: int = 1, cap: int = DEFAULT_CAP) -> NodeValues:
    """Project ``p`` onto every input-lattice node and measure the gain over the bottom."""
    inputs, target = input_system(p)
    n = len(inputs)
    lat = lattice or enumerate_lattice(n, cap)
    if lat.n != n:
        raise LatticeError(f"lattice is over {lat.n} inputs, distribution has {n}")
    if cache is None:
        cache = SplitCache(p, opts)
    elif cache.p is not p:
        raise ValueError("split cache belongs to a different distribution")

    nodes = {s: sigma(s, n, inputs=inputs, target=target, nvars=p.nvars) for s in lat.nodes}
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(cache.split, nodes.values()))
    bottom = nodes[lat.bottom]
    values = {s: cache.divergence(nodes[s], bottom) for s in lat.nodes}
    sweeps = {s: cache.split(nodes[s]).sweeps_used for s in lat.nodes}
    return NodeValues(lat, values, sweeps, cache)


def information_contribution(p: JointDistribution, opts: IpfOptions | None = None, *,
                             cache: SplitCache | None = None, workers: int = 1,
                             cap: int = DEFAULT_CAP) -> DecompositionResult:
    """Decompose ``I(X1..Xn; Y)`` into one non-negative term per predictor.

    Parameters
    ----------
    p : JointDistribution
        Must have exactly one variable with role ``target``.
    opts : IpfOptions, optional
        Projection tolerance, sweep limit and logarithm base.
    cache : SplitCache, optional
        Reuse split distributions (e.g. with the Shapley oracle).
    workers : int
        Threads used for node projections; results do not depend on it.
    """
    opts = cache.opts if cache is not None and opts is None else (opts or IpfOptions())
    nv = node_values(p, opts, cache=cache, workers=workers, cap=cap)
    lat, v = nv.lattice, nv.values

    by_face: dict[int, list] = {a: [] for a in lat.faces}
    for e in lat.edges:
        by_face[e.face].append(e)
    contributions = {}
    for a in lat.faces:
        total = 0.0
        for e in by_face[a]:
            total += float(lat.edge_weight(e)) * (v[e.upper] - v[e.lower])
        contributions[a] = total

    inputs, target = input_system(p)
    in_mask = sum(1 << i for i in inputs)
    total_mi = mutual_information(p, in_mask, 1 << target, nv.cache.opts.base)
    return DecompositionResult(
        n=lat.n,
        input_names=tuple(p.names[i] for i in inputs),
        target_name=p.names[target],
        base=nv.cache.opts.base,
        contributions=contributions,
        total_mi=total_mi,
        node_divergences=dict(v),
        sweeps=nv.sweeps,
    )


def chain_decomposition(p: JointDistribution, chain: Sequence[int], opts: IpfOptions | None = None, *,
                        cache: SplitCache | None = None) -> ChainDecomposition:
    """Per-step KL gains ``D(p_{S_i} || p_{S_{i-1}})`` along a chain of input complexes."""
    inputs, target = input_system(p)
    n = len(inputs)
    lat = enumerate_lattice(n, max(n, DEFAULT_CAP))
    chain = tuple(chain)
    if len(chain) < 2 or not lat.is_chain(chain):
        raise LatticeError("expected a strictly increasing sequence of at least two lattice nodes")
    if cache is None:
        cache = SplitCache(p, opts)
    nodes = [sigma(s, n, inputs=inputs, target=target, nvars=p.nvars) for s in chain]
    bottom = sigma(lat.bottom, n, inputs=inputs, target=target, nvars=p.nvars)
    v = [cache.divergence(node, bottom) for node in nodes]
    return ChainDecomposition(chain, tuple(b - a for a, b in zip(v, v[1:])))


def verify_result(r: DecompositionResult, *, singleton: bool = False) -> list[PropertyCheck]:
    """Check nonnegativity and completeness, and optionally the copy-target property.

    ``slack`` is the margin to the threshold; negative means failure.
    """
    lowest = min(r.contributions.values())
    checks = [
        PropertyCheck("nonnegativity", lowest >= -NEGATIVE_SLACK, lowest + NEGATIVE_SLACK,
                      f"min contribution {lowest:.3g}"),
        PropertyCheck("completeness", abs(r.residual) <= RESIDUAL_SLACK,
                      RESIDUAL_SLACK - abs(r.residual), f"residual {r.residual:.3g}"),
    ]
    if singleton:
        joint = [v for a, v in r.contributions.items() if bin(a).count("1") > 1]
        worst = max(joint, default=0.0)
        checks.append(PropertyCheck("singleton", worst <= SINGLETON_SLACK, SINGLETON_SLACK - worst,
                                    f"max joint-predictor contribution {worst:.3g}"))
    return checks

