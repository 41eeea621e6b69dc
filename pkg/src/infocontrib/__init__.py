"""Decompose the mutual information between several inputs and a target
into non-negative contributions of every set of inputs."""

from .corpus import get_example, list_examples
from .decomposition import (
    ChainDecomposition,
    DecompositionResult,
    chain_decomposition,
    information_contribution,
    verify_result,
)
from .distribution import (
    JointDistribution,
    VariableSpec,
    conditional_mutual_information,
    copy_target,
    dump_distribution,
    entropy,
    kl_divergence,
    load_distribution,
    marginal,
    mutual_information,
    parse_distribution,
    product,
    varset,
)
from .errors import (
    AbsoluteContinuityError,
    ConvergenceError,
    DistributionError,
    InfoContribError,
    LatticeError,
    ParseError,
)
from .lattice import ConstraintNode, InputLattice, count_linear_extensions, enumerate_lattice, sigma
from .projection import (
    IpfOptions,
    SplitCache,
    constraint_information,
    split_distribution,
    triplewise_information,
)
from .shapley import (
    faigle_kern_value,
    hierarchical_strength,
    inclusion_game,
    information_game,
    oracle_check,
)

__all__ = [
    "AbsoluteContinuityError",
    "ChainDecomposition",
    "ConstraintNode",
    "ConvergenceError",
    "DecompositionResult",
    "DistributionError",
    "InfoContribError",
    "InputLattice",
    "IpfOptions",
    "JointDistribution",
    "LatticeError",
    "ParseError",
    "SplitCache",
    "VariableSpec",
    "chain_decomposition",
    "conditional_mutual_information",
    "constraint_information",
    "copy_target",
    "count_linear_extensions",
    "dump_distribution",
    "entropy",
    "enumerate_lattice",
    "faigle_kern_value",
    "get_example",
    "hierarchical_strength",
    "inclusion_game",
    "information_contribution",
    "information_game",
    "kl_divergence",
    "list_examples",
    "load_distribution",
    "marginal",
    "mutual_information",
    "oracle_check",
    "parse_distribution",
    "product",
    "sigma",
    "split_distribution",
    "triplewise_information",
    "varset",
    "verify_result",
]

__version__ = "0.1.0"
