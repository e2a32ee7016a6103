"""From-scratch probability learners: baseline, tree, forest, boosting, kNN."""

from .io import load_model, model_from_dict, model_to_dict, save_model
from .models import (
    ConstantModel,
    DecisionTreeModel,
    GradientBoostingModel,
    KnnModel,
    RandomForestModel,
)
from .spec import (
    ImportanceReport,
    ModelSpec,
    SchemaMismatchError,
    TrainedModel,
    UnsupportedModelError,
    fit,
    importances,
    predict_proba,
)
from .tree import TreeNode, grow_classification_tree, impurity, predict_tree

__all__ = [
    "ConstantModel",
    "DecisionTreeModel",
    "GradientBoostingModel",
    "ImportanceReport",
    "KnnModel",
    "ModelSpec",
    "RandomForestModel",
    "SchemaMismatchError",
    "TrainedModel",
    "TreeNode",
    "UnsupportedModelError",
    "fit",
    "grow_classification_tree",
    "importances",
    "impurity",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "predict_proba",
    "predict_tree",
    "save_model",
]
