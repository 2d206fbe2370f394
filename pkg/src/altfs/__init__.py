"""Alternative feature selection: several high-quality, sufficiently dissimilar feature sets."""

from .altset import (AlternativesSpec, as_selection, dice, dissimilarity, is_valid_alternative,
                     is_valid_family, jaccard, max_overlap, selected_indices, selection_from_indices)
from .data import DataError, Dataset, SplitPlan, load_csv, stratified_kfold, write_csv
from .harness import RunRecord, evaluate_feature_set, normalize_run, run_grid
from .heuristics import greedy_balancing, greedy_depth, greedy_replacement
from .predict import TreeModel, feature_importance, mcc, train_tree
from .quality import (DependencyMatrix, FeatureQualities, fcbf_inputs, load_importance_scores,
                      mrmr_inputs, mutual_information, pairwise_dependencies, univariate_qualities)
from .solver import (Fcbf, Mrmr, Solution, Status, Univariate, evaluate_objective,
                     run_sequential_chain, solve_sequential, solve_simultaneous)
from .wrapper import (ExternalCommandOracle, HoldoutMCCOracle, QualityOracle, UnivariateOracle,
                      greedy_wrapper, wrapper_chain)

__version__ = "0.1.0"
