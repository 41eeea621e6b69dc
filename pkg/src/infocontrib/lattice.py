"""The input lattice of simplicial complexes over ``n`` input variables.

Encoding
--------
* A *face* (predictor) is an ``int`` bitmask over input indices; ``0`` is
  the empty face.
* A *simplicial complex* over the inputs is an ``int`` bitset over the
  ``2**n`` faces: bit ``f`` is set when face ``f`` is a member.  The
  bottom of the input lattice is ``{∅}`` (bitset ``1``) and the top is the
  full power set (bitset ``2**(2**n) - 1``).  The empty coalition (bitset
  ``0``) is not a lattice node.
* A :class:`ConstraintNode` is a simplicial complex cover of all variables
  ``W``, stored by its facets (maximal faces) as bitmasks over variable
  positions.

Lattice size grows with the Dedekind numbers: 2, 5, 19, 167 and 7580 nodes
for ``n = 1 .. 5``.  Enumeration is ``O(nodes * 2**n)`` and each node later
costs one iterative-scaling run, so ``n = 5`` is the default cap.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from .errors import LatticeError, ParseError

__all__ = [
    "DEFAULT_CAP",
    "ConstraintNode",
    "HasseEdge",
    "InputLattice",
    "complex_faces",
    "complex_from_facets",
    "count_linear_extensions",
    "default_input_names",
    "enumerate_lattice",
    "face_label",
    "facets_of",
    "format_complex",
    "format_face",
    "format_node",
    "is_simplicial_complex",
    "facet_order_leq",
    "parse_complex",
    "parse_node",
    "sigma",
]

DEFAULT_CAP = 5


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _bits(x: int) -> list[int]:
    out, i = [], 0
    while x:
        if x & 1:
            out.append(i)
        x >>= 1
        i += 1
    return out


def _is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


# --------------------------------------------------------------------------
# complexes over the inputs


def complex_faces(bits: int) -> list[int]:
    """Member faces of a complex, ascending by mask."""
    return _bits(bits)


def is_simplicial_complex(bits: int, n: int) -> bool:
    """Downward closed, non-empty, and confined to faces over ``n`` inputs."""
    if bits <= 0 or bits >> (1 << n):
        return False
    for f in _bits(bits):
        for i in _bits(f):
            if not bits >> (f & ~(1 << i)) & 1:
                return False
    return True


def complex_from_facets(facets: Iterable[int], n: int) -> int:
    """Downward closure of the given faces, always containing ``∅``."""
    bits = 1
    for f in facets:
        if f < 0 or f >> n:
            raise LatticeError(f"face {f:#b} out of range for {n} inputs")
        sub = f
        while True:
            bits |= 1 << sub
            if sub == 0:
                break
            sub = (sub - 1) & f
    return bits


def facets_of(bits: int) -> list[int]:
    """Maximal faces of a complex, ascending by mask."""
    faces = _bits(bits)
    return [f for f in faces if not any(g != f and _is_subset(f, g) for g in faces)]


def facet_order_leq(s: int, t: int) -> bool:
    """``s <= t`` iff every face of ``s`` lies inside some face of ``t``."""
    t_faces = _bits(t)
    return all(any(_is_subset(a, b) for b in t_faces) for a in _bits(s))


# --------------------------------------------------------------------------
# constraint-lattice nodes over all variables


@dataclass(frozen=True)
class ConstraintNode:
    """Simplicial complex cover of ``nvars`` variables, stored by facets."""

    nvars: int
    facets: tuple[int, ...]

    def __post_init__(self):
        full = (1 << self.nvars) - 1
        union = 0
        for f in self.facets:
            if f <= 0 or f & ~full:
                raise LatticeError(f"facet {f:#b} invalid for {self.nvars} variables")
            union |= f
        if union != full:
            raise LatticeError("constraint node must cover every variable")
        if list(self.facets) != sorted(set(self.facets)):
            raise LatticeError("facets must be sorted and distinct")
        for f in self.facets:
            if any(g != f and _is_subset(f, g) for g in self.facets):
                raise LatticeError("facets must form an antichain")

    @classmethod
    def from_faces(cls, faces: Iterable[int], nvars: int) -> "ConstraintNode":
        """Node generated by arbitrary faces (their downward closure)."""
        faces = set(f for f in faces if f)
        maximal = sorted(f for f in faces if not any(g != f and _is_subset(f, g) for g in faces))
        return cls(nvars, tuple(maximal))

    def contains(self, face: int) -> bool:
        return any(_is_subset(face, f) for f in self.facets)

    def __le__(self, other: "ConstraintNode") -> bool:
        return all(other.contains(f) for f in self.facets)

    def __lt__(self, other: "ConstraintNode") -> bool:
        return self <= other and self != other


def sigma(s: int, n: int, *, inputs: Sequence[int] | None = None, target: int | None = None, nvars: int | None = None) -> ConstraintNode:
    """Embed an input complex into the constraint lattice over ``W``.

    Returns the closure of ``{V} ∪ {A ∪ {Y} : A ∈ s}``.  By default input
    ``i`` sits at variable position ``i`` and the target at position ``n``.
    """
    if not is_simplicial_complex(s, n):
        raise LatticeError(f"{s:#b} is not a simplicial complex over {n} inputs")
    inputs = tuple(range(n)) if inputs is None else tuple(inputs)
    target = n if target is None else target
    nvars = n + 1 if nvars is None else nvars
    if len(inputs) != n or target in inputs:
        raise LatticeError("inputs and target positions are inconsistent")

    def lift(face):
        return sum(1 << inputs[i] for i in _bits(face))

    faces = [lift((1 << n) - 1)] + [lift(a) | 1 << target for a in facets_of(s)]
    return ConstraintNode.from_faces(faces, nvars)


# --------------------------------------------------------------------------
# the lattice


class HasseEdge(NamedTuple):
    lower: int
    upper: int
    face: int


@dataclass(frozen=True)
class InputLattice:
    """All simplicial complexes over ``n`` inputs with Hasse edges and chain counts."""

    n: int
    nodes: tuple[int, ...]
    edges: tuple[HasseEdge, ...]
    chains_from_bottom: dict = field(repr=False)
    chains_to_top: dict = field(repr=False)
    total_chains: int

    @property
    def bottom(self) -> int:
        return 1

    @property
    def top(self) -> int:
        return (1 << (1 << self.n)) - 1

    @property
    def faces(self) -> list[int]:
        """Non-empty faces (the predictors), ascending by mask."""
        return list(range(1, 1 << self.n))

    def edges_adding(self, a: int) -> list[HasseEdge]:
        """Hasse edges whose upper node is the lower node plus face ``a``."""
        if a <= 0 or a >> self.n:
            raise LatticeError(f"face {a:#b} is not a non-empty face over {self.n} inputs")
        return [e for e in self.edges if e.face == a]

    def chains_through(self, e: HasseEdge) -> int:
        return self.chains_from_bottom[e.lower] * self.chains_to_top[e.upper]

    def edge_weight(self, e: HasseEdge) -> Fraction:
        """Fraction of maximal chains passing through ``e``."""
        if e.upper != e.lower | 1 << e.face or e.lower not in self.chains_from_bottom:
            raise LatticeError(f"{e} is not a Hasse edge of this lattice")
        return Fraction(self.chains_through(e), self.total_chains)

    def lower_covers(self, node: int) -> list[int]:
        return [e.lower for e in self.edges if e.upper == node]

    def upper_covers(self, node: int) -> list[int]:
        return [e.upper for e in self.edges if e.lower == node]

    def is_chain(self, chain: Sequence[int]) -> bool:
        """Strictly increasing sequence of lattice nodes."""
        if any(c not in self.chains_from_bottom for c in chain):
            return False
        return all(_is_subset(a, b) and a != b for a, b in zip(chain, chain[1:]))

    def maximal_chains(self):
        """Yield every maximal chain as a tuple of nodes (small ``n`` only)."""
        ups: dict[int, list[int]] = {}
        for e in self.edges:
            ups.setdefault(e.lower, []).append(e.upper)

        def walk(path):
            last = path[-1]
            if last == self.top:
                yield tuple(path)
                return
            for nxt in ups.get(last, ()):
                path.append(nxt)
                yield from walk(path)
                path.pop()

        yield from walk([self.bottom])


def _addable(bits: int, n: int) -> list[int]:
    out = []
    for f in range(1, 1 << n):
        if bits >> f & 1:
            continue
        if all(bits >> (f & ~(1 << i)) & 1 for i in _bits(f)):
            out.append(f)
    return out


@lru_cache(maxsize=8)
def _enumerate(n: int) -> InputLattice:
    bottom = 1
    seen = {bottom}
    frontier = [bottom]
    edges = []
    while frontier:
        nxt = []
        for node in frontier:
            for f in _addable(node, n):
                up = node | 1 << f
                edges.append(HasseEdge(node, up, f))
                if up not in seen:
                    seen.add(up)
                    nxt.append(up)
        frontier = nxt
    nodes = tuple(sorted(seen, key=lambda b: (_popcount(b), b)))
    edges.sort(key=lambda e: ((_popcount(e.lower), e.lower), e.face))

    down = {bottom: 1}
    for e in edges:  # ascending by lower node, so every lower count is final
        down[e.upper] = down.get(e.upper, 0) + down[e.lower]
    top = (1 << (1 << n)) - 1
    up = {top: 1}
    for e in reversed(edges):
        up[e.lower] = up.get(e.lower, 0) + up[e.upper]
    return InputLattice(n, nodes, tuple(edges), down, up, down[top])


def enumerate_lattice(n: int, cap: int = DEFAULT_CAP) -> InputLattice:
    """Build the input lattice for ``n`` inputs.

    Raises :class:`LatticeError` when ``n`` is outside ``1 .. cap``.
    """
    if not 1 <= n <= cap:
        raise LatticeError(f"input count {n} outside the supported range 1..{cap}")
    return _enumerate(n)


# --------------------------------------------------------------------------
# linear extensions


def _extension_count(below: tuple[int, ...]) -> int:
    """Linear extensions of a poset given each item's strict-predecessor mask."""
    k = len(below)
    full = (1 << k) - 1

    @lru_cache(maxsize=None)
    def count(placed: int) -> int:
        if placed == full:
            return 1
        total = 0
        for i in range(k):
            if not placed >> i & 1 and below[i] & ~placed == 0:
                total += count(placed | 1 << i)
        return total

    return count(0)


def count_linear_extensions(players: Iterable[int], *, before: Iterable[tuple[int, int]] = ()) -> int:
    """Number of total orders of ``players`` compatible with face inclusion.

    ``players`` are face bitmasks; ``A`` must precede ``B`` whenever ``A`` is
    a proper subset of ``B``.  Extra constraints ``(a, b)`` in ``before``
    force ``a`` ahead of ``b``.  The empty player set has one ranking.
    """
    items = sorted(set(players))
    pos = {f: i for i, f in enumerate(items)}
    below = [0] * len(items)
    for i, f in enumerate(items):
        for j, g in enumerate(items):
            if g != f and _is_subset(g, f):
                below[i] |= 1 << j
    for a, b in before:
        if a not in pos or b not in pos:
            raise LatticeError("ordering constraint refers to an unknown player")
        below[pos[b]] |= 1 << pos[a]
    return _cached_extension_count(tuple(below))


_cached_extension_count = lru_cache(maxsize=65536)(_extension_count)


# --------------------------------------------------------------------------
# notation


def default_input_names(n: int) -> list[str]:
    return [f"X{i + 1}" for i in range(n)]


def format_face(face: int, names: Sequence[str]) -> str:
    """``{X1,X2}`` display of a predictor."""
    return "{" + ",".join(names[i] for i in _bits(face)) + "}"


def face_label(face: int, names: Sequence[str]) -> str:
    """Concatenated member names, e.g. ``X1X2``."""
    return "".join(names[i] for i in _bits(face))


def format_complex(bits: int, names: Sequence[str]) -> str:
    """Facet notation over the inputs: ``[X1][X2]``; ``{∅}`` prints as ``[]``."""
    if bits == 0:
        return "∅"
    return "".join("[" + face_label(f, names) + "]" for f in facets_of(bits))


def format_node(node: ConstraintNode, names: Sequence[str]) -> str:
    """Facet notation over all variables: ``(X1X2)(X1Y)(X2Y)``."""
    return "".join("(" + face_label(f, names) + ")" for f in node.facets)


_GROUP = {"(": re.compile(r"\(([^()]*)\)"), "[": re.compile(r"\[([^\[\]]*)\]")}


def _split_group(body: str, names: Sequence[str]) -> list[int]:
    body = body.strip()
    if not body:
        return []
    if "," in body or any(c.isspace() for c in body):
        tokens = [t for t in re.split(r"[,\s]+", body) if t]
        try:
            return [names.index(t) for t in tokens]
        except ValueError as exc:
            raise ParseError(f"unknown variable in {body!r}") from exc
    by_length = sorted(range(len(names)), key=lambda i: -len(names[i]))

    def solve(rest):
        if not rest:
            return []
        for i in by_length:
            if rest.startswith(names[i]):
                tail = solve(rest[len(names[i]):])
                if tail is not None:
                    return [i] + tail
        return None

    out = solve(body)
    if out is None:
        raise ParseError(f"cannot split {body!r} into variable names {list(names)}")
    return out


def _parse_groups(text: str, opener: str, names: Sequence[str]) -> list[int]:
    text = text.strip()
    pattern = _GROUP[opener]
    faces, pos = [], 0
    for m in pattern.finditer(text):
        if text[pos:m.start()].strip():
            raise ParseError(f"unexpected text {text[pos:m.start()]!r} in {text!r}")
        face = 0
        for i in _split_group(m.group(1), names):
            face |= 1 << i
        faces.append(face)
        pos = m.end()
    if text[pos:].strip() or not faces:
        raise ParseError(f"cannot parse facet notation {text!r}")
    return faces


def parse_complex(text: str, names: Sequence[str]) -> int:
    """Parse ``[X1][X2]`` style notation into a complex bitset.

    ``[]``, ``{}`` and ``{∅}`` denote the bottom ``{∅}``.
    """
    if text.strip() in ("{}", "{∅}", "⊥"):
        return 1
    return complex_from_facets(_parse_groups(text, "[", names), len(names))


def parse_node(text: str, names: Sequence[str]) -> ConstraintNode:
    """Parse ``(Z1Z3)(Z2Z3)`` style notation over all variables."""
    return ConstraintNode.from_faces(_parse_groups(text, "(", names), len(names))
