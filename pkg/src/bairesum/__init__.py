"""Exact l2 and c0 Baire sum norms over tree-indexed bases."""

from .certificates import (
    BlockSequence,
    DecayCertificate,
    UnconditionalityReport,
    check_block,
    check_decay,
    forge_decaying_sequence,
    forge_plan,
    l1_probe,
    singular_witness,
    unconditionality_sample,
    upper_l2_sample,
)
from .engine import (
    NormResult,
    segment_value,
    segment_value_sq,
    t0_norm,
    t2_norm,
    t2_norm_bruteforce,
    t2_norm_dp,
    t2_norm_unrestricted,
)
from .errors import *  # noqa: F401,F403
from .generate import all_forests, full_binary_tree, random_tree
from .kernel import BatchEvaluator
from .operators import (
    Branch,
    RangeInterval,
    norm_pair,
    project_branch,
    project_interval,
    project_segment,
    range_of,
)
from .oracles import (
    BranchNormOracle,
    FunctionOracle,
    SchauderTreeBasis,
    c0_spreading,
    lp_spreading,
    parse_basis,
    validate_oracle,
)
from .tree import (
    FiniteTree,
    FullBinaryTree,
    NodeEnumeration,
    Segment,
    SegmentFamily,
    bfs_enumeration,
    build_tree,
    comparable,
    convex_hull_segment,
    dfs_enumeration,
    enumerate_incomparable_families,
    restrict_segment,
)
from .vector import TreeVector, combine

__version__ = "0.1.0"
