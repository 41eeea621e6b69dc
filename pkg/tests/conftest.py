import numpy as np
import pytest

from infocontrib.distribution import INPUT, TARGET, JointDistribution, VariableSpec


def random_system(rng, n_inputs, max_card=3, sparsity=0.0, min_card=2):
    """Random input/target distribution; ``sparsity`` is the chance a cell is zeroed."""
    cards = [int(c) for c in rng.integers(min_card, max_card + 1, size=n_inputs + 1)]
    table = rng.dirichlet(np.ones(int(np.prod(cards)))).reshape(cards)
    if sparsity:
        mask = rng.random(table.shape) >= sparsity
        mask.flat[int(np.argmax(table))] = True
        table = table * mask
    names = [f"X{i + 1}" for i in range(n_inputs)] + ["Y"]
    roles = [INPUT] * n_inputs + [TARGET]
    return JointDistribution([VariableSpec(n, c, r) for n, c, r in zip(names, cards, roles)], table)


def random_plain(rng, cards, sparsity=0.0):
    """Random distribution over variables Z1..Zm with no designated target."""
    table = rng.dirichlet(np.ones(int(np.prod(cards)))).reshape(cards)
    if sparsity:
        mask = rng.random(table.shape) >= sparsity
        mask.flat[int(np.argmax(table))] = True
        table = table * mask
    return JointDistribution([VariableSpec(f"Z{i + 1}", c) for i, c in enumerate(cards)], table)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
