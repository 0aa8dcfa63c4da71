"""Qualitative analysis of probabilistic automata on infinite words."""
from .classify import (
    RankFunction,
    check_lemma5_bound,
    is_chain_recurrent,
    is_hierarchical,
    is_sharp_reduction,
    is_structurally_simple,
    product,
    reduce_dfa_intersection,
    union_structure,
)
from .core import (
    Acceptance,
    Automaton,
    Budgets,
    DEFAULT_BUDGETS,
    LassoWord,
    Verdict,
    validate_automaton,
)
from .errors import BudgetExceededError, FormatError, InputError, QpaError
from .formats import DFA, parse_automaton, parse_dfa, serialize_automaton, serialize_dfa
from .linked import (
    LinkedGraph,
    border_action,
    border_chain,
    borders,
    compaction,
    concat,
    is_border,
    linked_graph_of_word,
    rec,
    rec_from,
)
from .lasso import (
    JetDecomposition,
    LassoChain,
    SupportSequence,
    build_lasso_chain,
    lasso_acceptance_probability,
    lasso_jet_decomposition,
    simulate_runs,
)
from .qualitative import (
    decide,
    decide_almost_simple,
    decide_positive_simple,
    decide_safety,
    reachable_supports,
)
from .semantics import (
    ChainAnalysis,
    chain_analysis,
    chain_parity_almost,
    make_accepting_absorbing,
    propagate,
    sharp_power,
    support_step,
    word_matrix,
)
from .supportgraph import (
    ExtendedSupportGraph,
    SupportGraph,
    build_extended_support_graph,
    build_support_graph,
    decide_limit_parity_structsimple,
    decide_limit_reach_structsimple,
    is_sharp_acyclic,
    replay_steps,
    sharp_reachable,
    synthesize_limit_word,
)

__version__ = "0.1.0"

__all__ = [
    "Acceptance",
    "Automaton",
    "BudgetExceededError",
    "Budgets",
    "ChainAnalysis",
    "DEFAULT_BUDGETS",
    "DFA",
    "ExtendedSupportGraph",
    "FormatError",
    "InputError",
    "JetDecomposition",
    "LassoChain",
    "LassoWord",
    "LinkedGraph",
    "QpaError",
    "RankFunction",
    "SupportGraph",
    "SupportSequence",
    "Verdict",
    "__version__",
    "border_action",
    "border_chain",
    "borders",
    "build_extended_support_graph",
    "build_lasso_chain",
    "build_support_graph",
    "chain_analysis",
    "chain_parity_almost",
    "check_lemma5_bound",
    "compaction",
    "concat",
    "decide",
    "decide_almost_simple",
    "decide_limit_parity_structsimple",
    "decide_limit_reach_structsimple",
    "decide_positive_simple",
    "decide_safety",
    "is_border",
    "is_chain_recurrent",
    "is_hierarchical",
    "is_sharp_acyclic",
    "is_sharp_reduction",
    "is_structurally_simple",
    "lasso_acceptance_probability",
    "lasso_jet_decomposition",
    "linked_graph_of_word",
    "make_accepting_absorbing",
    "parse_automaton",
    "parse_dfa",
    "product",
    "propagate",
    "reachable_supports",
    "rec",
    "rec_from",
    "reduce_dfa_intersection",
    "replay_steps",
    "serialize_automaton",
    "serialize_dfa",
    "sharp_power",
    "sharp_reachable",
    "simulate_runs",
    "support_step",
    "synthesize_limit_word",
    "union_structure",
    "validate_automaton",
    "word_matrix",
]
