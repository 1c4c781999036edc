"""Concrete proof labeling schemes and the label-compression compiler."""

from .codec import lex_decode, lex_encode
from .common import TSOutput, assemble
from .compile import ExtensionBudgetExceeded, ExtensionSolver, compile_tradeoff
from .equality import (
    CommTranscript, ReductionGeometryError, equal_endpoints, equality_configuration,
    equality_pls, exhaustive_witnesses, reduce_to_eq,
)
from .share import read_shared, share_decomposition, string_share
from .spanning import (
    broken_tree, is_spanning_tree, random_tree_configuration, spanning_tree_pls, tree_configuration,
)
from .ts_const import ts_cert_const
from .ts_logn import ts_cert_logn, warmup_ts_cert
