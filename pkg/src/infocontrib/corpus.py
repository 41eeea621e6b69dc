"""Built-in example distributions (two- and three-input logic gates)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distribution import INPUT, TARGET, JointDistribution, VariableSpec

__all__ = ["EXAMPLES", "Example", "get_example", "list_examples"]


@dataclass(frozen=True)
class Example:
    key: str
    title: str
    description: str
    rows: tuple  # ((x1, .., xn, y), weight)

    @property
    def arity(self) -> int:
        return len(self.rows[0][0]) - 1

    def distribution(self) -> JointDistribution:
        states = [s for s, _ in self.rows]
        k = len(states[0])
        cards = [max(s[i] for s in states) + 1 for i in range(k)]
        names = [f"X{i + 1}" for i in range(k - 1)] + ["Y"]
        roles = [INPUT] * (k - 1) + [TARGET]
        table = np.zeros(cards)
        for state, w in self.rows:
            table[state] = w
        return JointDistribution(
            [VariableSpec(n, c, r) for n, c, r in zip(names, cards, roles)], table
        )


def _uniform(states):
    return tuple((tuple(s), 1.0) for s in states)


EXAMPLES = {
    e.key: e
    for e in [
        Example("rdn", "Rdn", "both inputs and the target share one bit",
                _uniform([(0, 0, 0), (1, 1, 1)])),
        Example("xor", "Xor", "Y = X1 xor X2",
                _uniform([(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)])),
        Example("2bitcopy", "2 bit copy", "Y copies both independent input bits",
                _uniform([(0, 0, 0), (0, 1, 1), (1, 0, 2), (1, 1, 3)])),
        Example("and", "And", "Y = X1 and X2",
                _uniform([(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 1)])),
        Example("synrdn", "SynRdn", "independent combination of Xor and Rdn",
                _uniform([(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0),
                          (2, 2, 2), (2, 3, 3), (3, 2, 3), (3, 3, 2)])),
        Example("parity", "Parity", "Y = X1 xor X2 xor X3",
                _uniform([(0, 0, 0, 0), (0, 0, 1, 1), (0, 1, 0, 1), (0, 1, 1, 0),
                          (1, 0, 0, 1), (1, 0, 1, 0), (1, 1, 0, 0), (1, 1, 1, 1)])),
        Example("xormulticoal", "XorMultiCoal", "any pair of inputs determines Y, no single input does",
                _uniform([(4, 0, 4, 0), (0, 2, 2, 0), (1, 1, 0, 0), (5, 3, 6, 0),
                          (5, 1, 4, 1), (1, 3, 2, 1), (0, 0, 0, 1), (4, 2, 6, 1)])),
        Example("rboj", "RBOJ", "inputs related by xor, Y copies the input triple",
                _uniform([(0, 0, 0, 0), (0, 1, 1, 1), (1, 0, 1, 2), (1, 1, 0, 3)])),
        Example("threewayand", "three way And", "Y = X1 and X2 and X3",
                _uniform([(0, 0, 0, 0), (0, 0, 1, 0), (0, 1, 0, 0), (0, 1, 1, 0),
                          (1, 0, 0, 0), (1, 0, 1, 0), (1, 1, 0, 0), (1, 1, 1, 1)])),
    ]
}

_ALIASES = {"2-bit-copy": "2bitcopy", "copy": "2bitcopy", "three-way-and": "threewayand",
            "and3": "threewayand"}


def get_example(name: str) -> JointDistribution:
    """Distribution of a built-in example, looked up case-insensitively."""
    key = name.lower().replace(" ", "").replace("_", "")
    key = _ALIASES.get(name.lower(), key)
    try:
        return EXAMPLES[key].distribution()
    except KeyError:
        raise KeyError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}") from None


def list_examples(arity: int | None = None) -> list[Example]:
    """Built-in examples in a stable order, optionally filtered by input count."""
    return [e for e in EXAMPLES.values() if arity is None or e.arity == arity]
