"""Shapley value under precedence constraints, as an independent cross-check.

Players are all faces ``A ⊆ V`` (including ``∅``), ordered by inclusion;
feasible coalitions are the simplicial complexes plus the empty coalition.
The value of player ``C`` is

    Φ_C(v) = Σ_{T : C maximal in T} |R(T∖{C})| |R(N∖T)| / |R(N)| · (v(T) - v(T∖{C}))

where ``R(X)`` is the number of rankings (linear extensions) of ``X``.
All ranking counts come from :func:`count_linear_extensions`, never from
the lattice's chain counts, so agreement with the chain-sum decomposition
tests the combinatorics of both.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .decomposition import information_contribution
from .distribution import JointDistribution
from .errors import GameError, LatticeError
from .lattice import InputLattice, complex_faces, count_linear_extensions, enumerate_lattice, sigma
from .projection import IpfOptions, SplitCache

__all__ = [
    "ORACLE_TOLERANCE",
    "GameValueTable",
    "HierarchicalStrength",
    "OracleReport",
    "coalition_value",
    "faigle_kern_value",
    "hierarchical_strength",
    "inclusion_game",
    "information_game",
    "oracle_check",
    "shapley_values",
]

ORACLE_TOLERANCE = 1e-9
EMPTY_COALITION = 0


@dataclass(frozen=True)
class GameValueTable:
    """Coalition values keyed by complex bitset; ``0`` is the empty coalition."""

    n: int
    values: dict

    def __post_init__(self):
        if self.values.get(EMPTY_COALITION, 0) != 0:
            raise GameError("the empty coalition must have value 0")
        if EMPTY_COALITION not in self.values:
            object.__setattr__(self, "values", {EMPTY_COALITION: 0, **self.values})

    def __getitem__(self, coalition: int):
        try:
            return self.values[coalition]
        except KeyError:
            raise GameError(f"no value for coalition {coalition:#x}") from None

    def __add__(self, other: "GameValueTable") -> "GameValueTable":
        if self.values.keys() != other.values.keys():
            raise GameError("games are defined on different coalitions")
        return GameValueTable(self.n, {k: v + other.values[k] for k, v in self.values.items()})

    def scale(self, c) -> "GameValueTable":
        return GameValueTable(self.n, {k: c * v for k, v in self.values.items()})

    def is_monotone(self, lat: InputLattice, slack: float = 1e-9) -> bool:
        ok = all(self[e.upper] >= self[e.lower] - slack for e in lat.edges)
        return ok and self[lat.bottom] >= -slack


@dataclass(frozen=True)
class HierarchicalStrength:
    coalition: int
    player: int
    value: Fraction


@lru_cache(maxsize=None)
def _rankings(bits: int) -> int:
    return count_linear_extensions(complex_faces(bits))


def _all_players(n: int) -> int:
    return (1 << (1 << n)) - 1


def _coalitions(lat: InputLattice):
    return (EMPTY_COALITION,) + lat.nodes


def coalition_value(p: JointDistribution, s: int, opts: IpfOptions | None = None, *,
                    cache: SplitCache | None = None) -> float:
    """``D(p_S || p_bottom)``; zero for the empty coalition and for ``{∅}``."""
    if s == EMPTY_COALITION or s == 1:
        return 0.0
    if cache is None:
        cache = SplitCache(p, opts)
    inputs, target = p.input_indices, p.target_index
    if target is None:
        raise GameError("distribution has no target variable")
    n = len(inputs)
    node = sigma(s, n, inputs=inputs, target=target, nvars=p.nvars)
    bottom = sigma(1, n, inputs=inputs, target=target, nvars=p.nvars)
    return cache.divergence(node, bottom)


def information_game(p: JointDistribution, lat: InputLattice, opts: IpfOptions | None = None, *,
                     cache: SplitCache | None = None) -> GameValueTable:
    """The game whose coalition values are ``D(p_S || p_bottom)``."""
    if cache is None:
        cache = SplitCache(p, opts)
    return GameValueTable(lat.n, {s: coalition_value(p, s, cache=cache) for s in _coalitions(lat)})


def inclusion_game(lat: InputLattice, s: int) -> GameValueTable:
    """``ζ_S(T) = 1`` if ``S ⊆ T`` else ``0``, with exact integer values."""
    if s not in lat.chains_from_bottom:
        raise LatticeError(f"{s:#x} is not a node of the lattice")
    return GameValueTable(lat.n, {t: int(s & ~t == 0) for t in _coalitions(lat)})


def _exact(game: GameValueTable) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in game.values.values())


def faigle_kern_value(game: GameValueTable, lat: InputLattice, c: int):
    """Shapley value of player ``c`` (a face bitmask) under precedence constraints.

    Returns a ``Fraction`` when every game value is an ``int`` or
    ``Fraction``, a ``float`` otherwise.
    """
    if c < 0 or c >> lat.n:
        raise LatticeError(f"face {c:#b} out of range for {lat.n} inputs")
    everyone = _all_players(lat.n)
    total = _rankings(everyone)
    exact = _exact(game)
    acc = Fraction(0) if exact else 0.0
    for t in _coalitions(lat):
        if not t >> c & 1:
            continue
        if any(g != c and c & ~g == 0 for g in complex_faces(t)):
            continue  # c is not maximal in t
        rest = t & ~(1 << c)
        weight = Fraction(_rankings(rest) * _rankings(everyone & ~t), total)
        diff = game[t] - game[rest]
        acc += weight * diff if exact else float(weight) * diff
    return acc


def shapley_values(game: GameValueTable, lat: InputLattice, *, include_empty: bool = False) -> dict:
    """``faigle_kern_value`` for every (non-empty) face."""
    start = 0 if include_empty else 1
    return {c: faigle_kern_value(game, lat, c) for c in range(start, 1 << lat.n)}


def hierarchical_strength(lat: InputLattice, s: int, c: int) -> HierarchicalStrength:
    """Fraction of all rankings in which ``c`` is ranked last among the members of ``s``."""
    members = complex_faces(s)
    if c not in members:
        raise LatticeError("player is not a member of the coalition")
    everyone = complex_faces(_all_players(lat.n))
    count = count_linear_extensions(everyone, before=[(a, c) for a in members if a != c])
    return HierarchicalStrength(s, c, Fraction(count, _rankings(_all_players(lat.n))))


@dataclass(frozen=True)
class OracleReport:
    chain_sum: dict
    shapley: dict
    max_discrepancy: float
    tolerance: float = ORACLE_TOLERANCE

    @property
    def passed(self) -> bool:
        return self.max_discrepancy <= self.tolerance


def oracle_check(p: JointDistribution, opts: IpfOptions | None = None, *,
                 cache: SplitCache | None = None, workers: int = 1) -> OracleReport:
    """Run the chain-sum decomposition and the Shapley formula on shared split distributions."""
    if cache is None:
        cache = SplitCache(p, opts)
    result = information_contribution(p, cache=cache, workers=workers)
    lat = enumerate_lattice(result.n, result.n)
    game = information_game(p, lat, cache=cache)
    phi = shapley_values(game, lat)
    worst = max(abs(phi[a] - result.contributions[a]) for a in phi)
    return OracleReport(dict(result.contributions), phi, worst)

