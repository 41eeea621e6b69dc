"""Dense joint distributions over named finite-alphabet variables.

A :class:`JointDistribution` stores one probability per element of the
Cartesian product of the variable alphabets as an ``ndarray`` whose axes
follow the variable list (row-major).  Alphabets are the contiguous
integers ``0 .. cardinality-1``.

Sets of variables (``VarSet``) are plain ``int`` bitmasks over variable
positions: bit ``i`` selects ``variables[i]``.

Conventions used throughout: ``0 * log 0 = 0`` and ``0 / 0 = 0``.
"""

from __future__ import annotations

import io
import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AbsoluteContinuityError,
    DistributionError,
    NormalizationError,
    ParseError,
    StateSpaceTooLarge,
)

__all__ = [
    "DEFAULT_MAX_STATES",
    "INPUT",
    "TARGET",
    "JointDistribution",
    "NormalizationWarning",
    "VariableSpec",
    "conditional_mutual_information",
    "copy_target",
    "dump_distribution",
    "entropy",
    "kl_divergence",
    "load_distribution",
    "marginal",
    "mutual_information",
    "parse_distribution",
    "product",
    "varset",
]

INPUT = "input"
TARGET = "target"
DEFAULT_MAX_STATES = 10**7
STRICT_SUM_TOLERANCE = 1e-6


class NormalizationWarning(UserWarning):
    """Emitted when lenient parsing renormalizes a table."""


@dataclass(frozen=True)
class VariableSpec:
    name: str
    cardinality: int
    role: str = INPUT

    def __post_init__(self):
        if not self.name or any(c.isspace() for c in self.name):
            raise DistributionError(f"invalid variable name {self.name!r}")
        if int(self.cardinality) != self.cardinality or self.cardinality < 1:
            raise DistributionError(
                f"variable {self.name!r}: cardinality must be a positive integer"
            )
        if self.role not in (INPUT, TARGET):
            raise DistributionError(f"variable {self.name!r}: unknown role {self.role!r}")


def log_in_base(x, base):
    """Elementwise logarithm in ``base`` (2 or e)."""
    if base == 2:
        return np.log2(x)
    if base == math.e:
        return np.log(x)
    return np.log(x) / math.log(base)


class JointDistribution:
    """Immutable dense probability table.

    Parameters
    ----------
    variables : sequence of VariableSpec
        Axis order of ``table``.
    table : array_like
        Non-negative weights, either already shaped by the cardinalities or
        flat in row-major order.  Normalized once on construction.
    max_states : int, optional
        Reject systems whose full state space is larger than this.
    """

    __slots__ = ("variables", "table")

    def __init__(self, variables: Sequence[VariableSpec], table, *, max_states=DEFAULT_MAX_STATES):
        variables = tuple(variables)
        if not variables:
            raise DistributionError("a distribution needs at least one variable")
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise DistributionError(f"duplicate variable names in {names}")
        if sum(v.role == TARGET for v in variables) > 1:
            raise DistributionError("at most one variable may have role 'target'")
        shape = tuple(v.cardinality for v in variables)
        size = math.prod(shape)
        if size > max_states:
            raise StateSpaceTooLarge(
                f"state space of {size} cells exceeds the cap of {max_states}"
            )
        arr = np.array(table, dtype=float)
        if arr.size != size:
            raise DistributionError(
                f"table has {arr.size} entries, expected {size} for shape {shape}"
            )
        arr = arr.reshape(shape)
        if not np.all(np.isfinite(arr)):
            raise DistributionError("table contains non-finite entries")
        if np.any(arr < 0):
            raise DistributionError("table contains negative probabilities")
        total = arr.sum()
        if total <= 0:
            raise DistributionError("table has zero total mass")
        # already-normalized tables are left bit-identical so round trips are exact
        if abs(total - 1.0) > 1e-13:
            arr = arr / total
        arr.setflags(write=False)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "table", arr)

    def __setattr__(self, name, value):
        raise AttributeError("JointDistribution is immutable")

    def __repr__(self):
        vs = ", ".join(f"{v.name}:{v.cardinality}{'*' if v.role == TARGET else ''}" for v in self.variables)
        return f"JointDistribution([{vs}])"

    def __eq__(self, other):
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return self.variables == other.variables and np.array_equal(self.table, other.table)

    __hash__ = None

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.table.shape

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def target_index(self) -> int | None:
        for i, v in enumerate(self.variables):
            if v.role == TARGET:
                return i
        return None

    @property
    def input_indices(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.variables) if v.role == INPUT)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DistributionError(f"unknown variable {name!r}") from None

    def support_size(self) -> int:
        return int(np.count_nonzero(self.table))

    def transpose(self, order: Sequence[int]) -> "JointDistribution":
        """Return the same distribution with variables reordered."""
        order = tuple(order)
        if sorted(order) != list(range(self.nvars)):
            raise DistributionError(f"{order} is not a permutation of the variables")
        return JointDistribution(
            [self.variables[i] for i in order], np.transpose(self.table, order)
        )

    def with_target(self, name: str | None) -> "JointDistribution":
        """Return a copy where ``name`` is the target and all others are inputs."""
        if name is not None:
            self.index_of(name)
        variables = [
            VariableSpec(v.name, v.cardinality, TARGET if v.name == name else INPUT)
            for v in self.variables
        ]
        return JointDistribution(variables, self.table)


def varset(d: JointDistribution, members: Iterable[int | str]) -> int:
    """Bitmask for the given variable positions or names."""
    mask = 0
    for m in members:
        i = d.index_of(m) if isinstance(m, str) else int(m)
        if not 0 <= i < d.nvars:
            raise DistributionError(f"variable position {i} out of range")
        mask |= 1 << i
    return mask


def _positions(mask: int, nvars: int) -> tuple[int, ...]:
    if mask < 0 or mask >= 1 << nvars:
        raise DistributionError(f"VarSet {mask:#b} out of range for {nvars} variables")
    return tuple(i for i in range(nvars) if mask >> i & 1)


def marginal_table(table: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Sum out every axis not in ``keep`` (kept axes stay in order)."""
    drop = tuple(i for i in range(table.ndim) if i not in keep)
    return table.sum(axis=drop) if drop else table


def marginal(d: JointDistribution, s: int) -> JointDistribution:
    """Marginal distribution of the variables in bitmask ``s``."""
    keep = _positions(s, d.nvars)
    if not keep:
        raise DistributionError("cannot marginalize onto the empty VarSet")
    return JointDistribution([d.variables[i] for i in keep], marginal_table(d.table, keep))


def _entropy_of(arr: np.ndarray, base) -> float:
    nz = arr[arr > 0]
    return float(max(-(nz * log_in_base(nz, base)).sum(), 0.0))


def entropy(d: JointDistribution, base=2) -> float:
    """Shannon entropy, base 2 by default."""
    return _entropy_of(d.table, base)


def _kl_arrays(p: np.ndarray, q: np.ndarray, base, *, q_floor=0.0, p_floor=0.0) -> float:
    p = p.ravel()
    q = q.ravel()
    pos = p > 0
    bad = pos & (q <= q_floor)
    if np.any(bad & (p > p_floor)):
        worst = int(np.argmax(np.where(bad, p, 0)))
        raise AbsoluteContinuityError(
            f"p assigns {p[worst]:.3g} to a state where q has {q[worst]:.3g}"
        )
    use = pos & ~bad
    pu, qu = p[use], q[use]
    return float(max((pu * log_in_base(pu / qu, base)).sum(), 0.0))


def kl_divergence(p: JointDistribution, q: JointDistribution, base=2, *, q_floor=0.0, p_floor=0.0) -> float:
    """Kullback-Leibler divergence ``D(p || q)``.

    Raises :class:`AbsoluteContinuityError` when ``p(z) > p_floor`` at a
    state with ``q(z) <= q_floor``.  Entries of ``p`` at or below
    ``p_floor`` sitting on such states are dropped from the sum.
    """
    if p.names != q.names or p.shape != q.shape:
        raise DistributionError("KL divergence needs identical variable lists")
    return _kl_arrays(p.table, q.table, base, q_floor=q_floor, p_floor=p_floor)


def mutual_information(d: JointDistribution, a: int, b: int, base=2) -> float:
    """``I(A;B)`` computed as ``D(p(a,b) || p(a) p(b))``."""
    if a & b:
        raise DistributionError("mutual information needs disjoint VarSets")
    pa, pb = _positions(a, d.nvars), _positions(b, d.nvars)
    if not pa or not pb:
        raise DistributionError("mutual information needs non-empty VarSets")
    both = _positions(a | b, d.nvars)
    joint = marginal_table(d.table, both)
    ma = marginal_table(d.table, pa)
    mb = marginal_table(d.table, pb)
    # broadcast p(a) p(b) onto the axis order of `both`
    ia = [both.index(i) for i in pa]
    ib = [both.index(i) for i in pb]
    shape_a = [joint.shape[k] if k in ia else 1 for k in range(len(both))]
    shape_b = [joint.shape[k] if k in ib else 1 for k in range(len(both))]
    # sum logs instead of multiplying: p(a) p(b) can underflow where p(a, b) > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = (np.log(joint) - np.log(ma).reshape(shape_a)) - np.log(mb).reshape(shape_b)
    pos = joint > 0
    value = float((joint[pos] * log_ratio[pos]).sum()) / math.log(base)
    return max(value, 0.0)


def conditional_mutual_information(d: JointDistribution, a: int, b: int, c: int, base=2) -> float:
    """``I(A;B|C)`` from entropies of marginals."""
    if a & b or a & c or b & c:
        raise DistributionError("conditional mutual information needs disjoint VarSets")

    def h(mask):
        return entropy(marginal(d, mask), base) if mask else 0.0

    return max(h(a | c) + h(b | c) - h(a | b | c) - h(c), 0.0)


def _role_order(d: JointDistribution) -> tuple[int, ...]:
    t = d.target_index
    if t is None:
        raise DistributionError("distribution has no target variable")
    return d.input_indices + (t,)


def product(d1: JointDistribution, d2: JointDistribution) -> JointDistribution:
    """Independent product of two input/target systems.

    Input ``i`` of the result is the pair ``(X'_i, X''_i)`` and the target is
    ``(Y', Y'')``; the pair ``(a, b)`` is encoded as ``a * card'' + b``.
    Variable names are taken from ``d1``; inputs come first, target last.
    """
    o1, o2 = _role_order(d1), _role_order(d2)
    if len(o1) != len(o2):
        raise DistributionError(
            f"input counts differ: {len(o1) - 1} vs {len(o2) - 1}"
        )
    t1 = np.transpose(d1.table, o1)
    t2 = np.transpose(d2.table, o2)
    k = len(o1)
    outer = np.multiply.outer(t1, t2)
    interleave = [ax for i in range(k) for ax in (i, k + i)]
    joint = np.transpose(outer, interleave)
    variables = []
    for i in range(k):
        v1, v2 = d1.variables[o1[i]], d2.variables[o2[i]]
        variables.append(VariableSpec(v1.name, v1.cardinality * v2.cardinality, v1.role))
    return JointDistribution(variables, joint.reshape([v.cardinality for v in variables]))


def copy_target(d_inputs: JointDistribution, name: str = "Y") -> JointDistribution:
    """Append a target that is an exact copy of the joint input state.

    The target alphabet is the product of the input alphabets, indexed in
    row-major order, and ``p(x, y) = p(x) * [y == index(x)]``.
    """
    if d_inputs.target_index is not None:
        raise DistributionError("copy_target expects a distribution without a target")
    size = d_inputs.table.size
    table = np.zeros((size, size))
    table[np.arange(size), np.arange(size)] = d_inputs.table.ravel()
    variables = list(d_inputs.variables) + [VariableSpec(name, size, TARGET)]
    return JointDistribution(variables, table.reshape([v.cardinality for v in variables]))


# --------------------------------------------------------------------------
# file formats


def _parse_probability(token: str, where: str) -> float:
    try:
        value = float(Fraction(token))
    except (ValueError, ZeroDivisionError):
        try:
            value = float(token)
        except ValueError:
            raise ParseError(f"{where}: cannot parse probability {token!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"{where}: non-finite probability {token!r}")
    if value < 0:
        raise ParseError(f"{where}: negative probability {token!r}")
    return value


def _finish(variables, states, probs, strict, max_states) -> JointDistribution:
    total = math.fsum(probs)
    if abs(total - 1.0) > STRICT_SUM_TOLERANCE:
        if strict:
            raise NormalizationError(
                f"probabilities sum to {total!r}, outside 1 +/- {STRICT_SUM_TOLERANCE}"
            )
        if total <= 0:
            raise NormalizationError("probabilities sum to zero")
        warnings.warn(
            f"probabilities sum to {total!r}; renormalized", NormalizationWarning, stacklevel=3
        )
    shape = tuple(v.cardinality for v in variables)
    if math.prod(shape) > max_states:
        raise StateSpaceTooLarge(
            f"state space of {math.prod(shape)} cells exceeds the cap of {max_states}"
        )
    table = np.zeros(shape)
    for state, prob in zip(states, probs):
        table[state] = prob
    return JointDistribution(variables, table, max_states=max_states)


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _parse_tsv(text, target, strict, max_states):
    header = None
    states, probs, seen = [], [], set()
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        where = f"line {lineno}"
        if header is None:
            if len(tokens) < 2 or tokens[-1] != "p":
                raise ParseError(f"{where}: header must list variable names followed by 'p'")
            header = tokens[:-1]
            if len(set(header)) != len(header):
                raise ParseError(f"{where}: duplicate variable names in header")
            continue
        if len(tokens) != len(header) + 1:
            raise ParseError(f"{where}: expected {len(header) + 1} fields, got {len(tokens)}")
        try:
            state = tuple(int(t) for t in tokens[:-1])
        except ValueError:
            raise ParseError(f"{where}: states must be non-negative integers") from None
        if any(s < 0 for s in state):
            raise ParseError(f"{where}: states must be non-negative integers")
        if state in seen:
            raise ParseError(f"{where}: duplicate state {state}")
        seen.add(state)
        states.append(state)
        probs.append(_parse_probability(tokens[-1], where))
    if header is None:
        raise ParseError("empty distribution file")
    if not states:
        raise ParseError("distribution file has no states")
    if target is None:
        target = header[-1]
    elif target not in header:
        raise ParseError(f"unknown target variable {target!r}")
    cards = [max(s[i] for s in states) + 1 for i in range(len(header))]
    variables = [
        VariableSpec(name, card, TARGET if name == target else INPUT)
        for name, card in zip(header, cards)
    ]
    return _finish(variables, states, probs, strict, max_states)


def _parse_json(text, target, strict, max_states):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "variables" not in doc or "states" not in doc:
        raise ParseError("JSON distribution needs 'variables' and 'states'")
    variables = []
    try:
        for entry in doc["variables"]:
            role = entry.get("role", INPUT)
            if target is not None:
                role = TARGET if entry["name"] == target else INPUT
            variables.append(VariableSpec(str(entry["name"]), int(entry["cardinality"]), role))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed variable entry: {exc}") from None
    names = [v.name for v in variables]
    if len(set(names)) != len(names):
        raise ParseError("duplicate variable names")
    if target is not None and target not in names:
        raise ParseError(f"unknown target variable {target!r}")
    states, probs, seen = [], [], set()
    for k, entry in enumerate(doc["states"]):
        where = f"states[{k}]"
        try:
            state = tuple(entry["state"])
            p_raw = entry["p"]
        except (KeyError, TypeError):
            raise ParseError(f"{where}: needs 'state' and 'p'") from None
        if len(state) != len(variables):
            raise ParseError(f"{where}: state has {len(state)} entries, expected {len(variables)}")
        if not all(isinstance(s, int) and not isinstance(s, bool) for s in state):
            raise ParseError(f"{where}: states must be integers")
        for s, v in zip(state, variables):
            if not 0 <= s < v.cardinality:
                raise ParseError(f"{where}: value {s} outside alphabet of {v.name}")
        if state in seen:
            raise ParseError(f"{where}: duplicate state {state}")
        seen.add(state)
        states.append(state)
        probs.append(_parse_probability(str(p_raw), where))
    if not states:
        raise ParseError("distribution has no states")
    return _finish(variables, states, probs, strict, max_states)


def parse_distribution(source, format="tsv", *, strict=True, target=None, max_states=DEFAULT_MAX_STATES) -> JointDistribution:
    """Parse a distribution from text, bytes or a readable stream.

    Parameters
    ----------
    source : str, bytes or file-like
    format : {"tsv", "json"}
    strict : bool
        When true, probabilities must sum to 1 within 1e-6.  Otherwise the
        table is renormalized and a :class:`NormalizationWarning` is issued.
    target : str, optional
        Name of the target variable.  TSV defaults to the last column, JSON
        to the declared roles.
    """
    text = _read_text(source)
    if format == "tsv":
        return _parse_tsv(text, target, strict, max_states)
    if format == "json":
        return _parse_json(text, target, strict, max_states)
    raise ParseError(f"unknown format {format!r}")


def load_distribution(path, format=None, **kwargs) -> JointDistribution:
    """Read a distribution file; the format defaults to the file extension."""
    path = Path(path)
    if format is None:
        format = "json" if path.suffix.lower() == ".json" else "tsv"
    return parse_distribution(path.read_bytes(), format, **kwargs)


def dump_distribution(d: JointDistribution, format="tsv") -> str:
    """Serialize so that :func:`parse_distribution` restores the same table.

    TSV cannot carry roles, so the target must be passed again on parsing
    unless it is the last column.  Zero-probability states are omitted,
    except the all-maximal state, which pins the alphabet sizes.
    """
    flat = d.table.ravel()
    last = flat.size - 1
    rows = [i for i in np.flatnonzero(flat)]
    if not rows or rows[-1] != last:
        rows.append(last)
    if format == "tsv":
        lines = ["\t".join(d.names + ("p",))]
        for i in rows:
            state = np.unravel_index(i, d.shape)
            lines.append("\t".join([str(int(s)) for s in state] + [repr(float(flat[i]))]))
        return "\n".join(lines) + "\n"
    if format == "json":
        doc = {
            "variables": [
                {"name": v.name, "cardinality": v.cardinality, "role": v.role}
                for v in d.variables
            ],
            "states": [
                {"state": [int(s) for s in np.unravel_index(i, d.shape)], "p": float(flat[i])}
                for i in rows
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    raise ParseError(f"unknown format {format!r}")
