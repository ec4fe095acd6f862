"""Oblique decision trees that split on learned 1-D projections.

Split directions are found either by probabilistic coefficient sampling
over impurity-ranked feature subspaces or by an adaptive particle swarm,
and trees combine into bagged forests or gradient-boosted ensembles.
"""

from slm.dataset import Dataset, SplitSpec, generate, load_csv, save_csv, split
from slm.dft import (
    DftRanking,
    Projected1D,
    SplitRecord,
    best_split,
    candidate_edges,
    dft_loss,
    evaluate_candidates,
    node_impurity,
    rank_dimensions,
)
from slm.ensemble import BoostModel, ForestModel, fit_boost, fit_forest
from slm.io import load_model, save_model
from slm.probsearch import (
    ProbSearchParams,
    ProjectionVector,
    coefficient_range,
    sample_projection,
    select_diverse,
    selection_probability,
)
from slm.pso import (
    EvoState,
    OptimizeResult,
    Particle,
    SwarmConfig,
    adapt_coefficients,
    classify_state,
    elite_learning,
    evolutionary_factor,
    optimize,
    step_particle,
)
from slm.tree import LeafNode, SlmTree, SplitNode, TreeConfig, build

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "SplitSpec",
    "generate",
    "load_csv",
    "save_csv",
    "split",
    "DftRanking",
    "Projected1D",
    "SplitRecord",
    "best_split",
    "candidate_edges",
    "dft_loss",
    "evaluate_candidates",
    "node_impurity",
    "rank_dimensions",
    "ProbSearchParams",
    "ProjectionVector",
    "coefficient_range",
    "sample_projection",
    "select_diverse",
    "selection_probability",
    "EvoState",
    "OptimizeResult",
    "Particle",
    "SwarmConfig",
    "adapt_coefficients",
    "classify_state",
    "elite_learning",
    "evolutionary_factor",
    "optimize",
    "step_particle",
    "LeafNode",
    "SlmTree",
    "SplitNode",
    "TreeConfig",
    "build",
    "BoostModel",
    "ForestModel",
    "fit_boost",
    "fit_forest",
    "load_model",
    "save_model",
    "__version__",
]
