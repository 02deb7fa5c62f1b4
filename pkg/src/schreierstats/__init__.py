"""Local statistics of finite Schreier graphs and unitary representations."""

__version__ = "0.1.0"

from .balls import BallCode, ball_code, ball_table, colored_ball_code, height_poset, refines
from .errors import BudgetExceeded, DataError, SchreierError
from .pmetric import global_k_type, hausdorff, partition_distance, simulate_profile
from .repspectra import FiniteUnitaryRep, containment_score, gram_point, sample_K
from .rules import Rule, builtin_rule, check_rule, search_rule
from .schreier import (Coloring, SchreierGraph, evaluate, from_permutations, gen_cycle,
                       gen_random_action, gen_torus, make_coloring)
from .stats import (TypeDistribution, correlation_profile, irs_sample, returning_words,
                    type_dist, type_stack, weak_metric)
from .words import Word, enumerate_words, multiply_reduce, parse_word

__all__ = [
    "BallCode", "BudgetExceeded", "Coloring", "DataError", "FiniteUnitaryRep", "Rule",
    "SchreierError", "SchreierGraph", "TypeDistribution", "Word", "ball_code", "ball_table",
    "builtin_rule", "check_rule", "colored_ball_code", "containment_score",
    "correlation_profile", "enumerate_words", "evaluate", "from_permutations", "gen_cycle",
    "gen_random_action", "gen_torus", "global_k_type", "gram_point", "hausdorff",
    "height_poset", "irs_sample", "make_coloring", "multiply_reduce", "parse_word",
    "partition_distance", "refines", "returning_words", "sample_K", "search_rule",
    "simulate_profile", "type_dist", "type_stack", "weak_metric",
]
