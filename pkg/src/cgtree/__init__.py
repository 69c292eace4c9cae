"""Column-generation training of fixed-depth univariate binary decision trees."""

__version__ = "0.1.0"

from .dataset import DataError, Dataset, Row, load_csv, split_train_test
from .greedy import CandidateSplits, best_gini_split, fit_greedy, threshold_sampling
from .tree import DecisionTree, Path, SplitCheck, TreeTopology, accuracy, predict

__all__ = [
    "DataError",
    "Dataset",
    "Row",
    "load_csv",
    "split_train_test",
    "CandidateSplits",
    "best_gini_split",
    "fit_greedy",
    "threshold_sampling",
    "DecisionTree",
    "Path",
    "SplitCheck",
    "TreeTopology",
    "accuracy",
    "predict",
]
