"""The five probability-scoring learners.

Every fit canonically re-orders training rows (lexicographic over feature
values, then label) before touching any sampler, so predictions depend on
the training multiset and the seed, never on row order.
"""

from __future__ import annotations

import numpy as np

from .tree import (
    TreeNode,
    grow_classification_tree,
    grow_regression_tree,
    predict_tree,
    presort_columns,
    sorted_column_values,
)


def canonical_order(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    keys = [y] + [X[:, j] for j in range(X.shape[1] - 1, -1, -1)]
    return np.lexsort(keys)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


class ConstantModel:
    """Constant probability; the majority baseline and the degenerate fallback."""

    tag = "constant"
    supports_importances = False

    def __init__(self, prevalence: float | None = None):
        self.prevalence = prevalence

    def fit(self, X: np.ndarray, y: np.ndarray) -> "ConstantModel":
        self.prevalence = float(np.mean(y))
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return np.full(X.shape[0], self.prevalence)

    def to_dict(self) -> dict:
        return {"prevalence": self.prevalence}

    @classmethod
    def from_dict(cls, data: dict) -> "ConstantModel":
        return cls(prevalence=data["prevalence"])


class DecisionTreeModel:
    tag = "decision_tree"
    supports_importances = True

    def __init__(self, criterion="gini", max_depth=None, min_leaf=5):
        self.criterion = criterion
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.root_: TreeNode | None = None
        self.importances_: np.ndarray | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "DecisionTreeModel":
        order = canonical_order(X, y)
        self.root_, self.importances_ = grow_classification_tree(
            X[order], y[order], criterion=self.criterion,
            max_depth=self.max_depth, min_leaf=self.min_leaf,
        )
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return predict_tree(self.root_, X)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "root": self.root_.to_dict(),
            "importances": self.importances_.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecisionTreeModel":
        model = cls(data["criterion"], data["max_depth"], data["min_leaf"])
        model.root_ = TreeNode.from_dict(data["root"])
        model.importances_ = np.asarray(data["importances"])
        return model


class RandomForestModel:
    tag = "random_forest"
    supports_importances = True

    def __init__(self, n_trees=100, criterion="gini", max_depth=None, min_leaf=5,
                 feature_subsample="sqrt", seed=0):
        self.n_trees = n_trees
        self.criterion = criterion
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.feature_subsample = feature_subsample
        self.seed = seed
        self.trees_: list[TreeNode] = []
        self.importances_: np.ndarray | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RandomForestModel":
        order = canonical_order(X, y)
        X, y = X[order], y[order]
        n = X.shape[0]
        self.trees_ = []
        self.importances_ = np.zeros(X.shape[1])
        for seq in np.random.SeedSequence(self.seed).spawn(self.n_trees):
            rng = np.random.default_rng(seq)
            counts = np.bincount(rng.integers(0, n, size=n), minlength=n).astype(np.float64)
            root, gains = grow_classification_tree(
                X, y, sample_weight=counts, criterion=self.criterion,
                max_depth=self.max_depth, min_leaf=self.min_leaf,
                feature_subsample=self.feature_subsample, rng=rng,
            )
            self.trees_.append(root)
            self.importances_ += gains
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        votes = np.zeros(X.shape[0])
        for root in self.trees_:
            votes += predict_tree(root, X)
        return votes / len(self.trees_)

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees, "criterion": self.criterion,
            "max_depth": self.max_depth, "min_leaf": self.min_leaf,
            "feature_subsample": self.feature_subsample, "seed": self.seed,
            "trees": [t.to_dict() for t in self.trees_],
            "importances": self.importances_.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RandomForestModel":
        model = cls(data["n_trees"], data["criterion"], data["max_depth"],
                    data["min_leaf"], data["feature_subsample"], data["seed"])
        model.trees_ = [TreeNode.from_dict(t) for t in data["trees"]]
        model.importances_ = np.asarray(data["importances"])
        return model


class GradientBoostingModel:
    """Logistic-loss boosting: log-odds start, one shallow regression tree per
    stage fit to the residual y - p, update scaled by the learning rate."""

    tag = "gbm"
    supports_importances = True

    def __init__(self, n_estimators=100, learning_rate=0.1, max_depth=3, min_leaf=10):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.f0_: float = 0.0
        self.trees_: list[TreeNode] = []
        self.loss_path_: list[float] = []
        self.importances_: np.ndarray | None = None

    @staticmethod
    def _mean_logistic_loss(raw: np.ndarray, y: np.ndarray) -> float:
        # softplus(raw) - y*raw, numerically stable
        return float(np.mean(np.logaddexp(0.0, raw) - y * raw))

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GradientBoostingModel":
        order = canonical_order(X, y)
        X, y = X[order], y[order].astype(np.float64)
        prevalence = float(np.mean(y))
        self.f0_ = float(np.log(prevalence / (1.0 - prevalence)))
        raw = np.full(X.shape[0], self.f0_)
        self.trees_ = []
        self.importances_ = np.zeros(X.shape[1])
        self.loss_path_ = [self._mean_logistic_loss(raw, y)]
        presorted = presort_columns(X)  # X is fixed across stages
        presorted_values = sorted_column_values(X, presorted)
        for _ in range(self.n_estimators):
            residual = y - _sigmoid(raw)
            root, gains = grow_regression_tree(
                X, residual, max_depth=self.max_depth, min_leaf=self.min_leaf,
                presorted=presorted, presorted_values=presorted_values,
            )
            self.trees_.append(root)
            self.importances_ += gains
            raw = raw + self.learning_rate * predict_tree(root, X)
            self.loss_path_.append(self._mean_logistic_loss(raw, y))
        return self

    def predict_raw(self, X: np.ndarray) -> np.ndarray:
        raw = np.full(X.shape[0], self.f0_)
        for root in self.trees_:
            raw += self.learning_rate * predict_tree(root, X)
        return raw

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self.predict_raw(X))

    def to_dict(self) -> dict:
        return {
            "n_estimators": self.n_estimators, "learning_rate": self.learning_rate,
            "max_depth": self.max_depth, "min_leaf": self.min_leaf,
            "f0": self.f0_, "trees": [t.to_dict() for t in self.trees_],
            "loss_path": self.loss_path_, "importances": self.importances_.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GradientBoostingModel":
        model = cls(data["n_estimators"], data["learning_rate"], data["max_depth"],
                    data["min_leaf"])
        model.f0_ = data["f0"]
        model.trees_ = [TreeNode.from_dict(t) for t in data["trees"]]
        model.loss_path_ = list(data["loss_path"])
        model.importances_ = np.asarray(data["importances"])
        return model


class KnnModel:
    """k nearest neighbors on z-scored features; distance ties at the k-th
    neighbor include every tied point, weighted uniformly."""

    tag = "knn"
    supports_importances = False

    def __init__(self, k=12):
        self.k = k
        self.mu_: np.ndarray | None = None
        self.sigma_: np.ndarray | None = None
        self.points_: np.ndarray | None = None
        self.labels_: np.ndarray | None = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "KnnModel":
        order = canonical_order(X, y)
        X, y = X[order], y[order]
        self.mu_ = X.mean(axis=0)
        sigma = X.std(axis=0)
        self.sigma_ = np.where(sigma > 0, sigma, 1.0)
        self.points_ = (X - self.mu_) / self.sigma_
        self.labels_ = y.astype(np.float64)
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        Q = (X - self.mu_) / self.sigma_
        out = np.empty(Q.shape[0])
        # squared distances via the expansion; chunked to bound memory
        train_sq = (self.points_**2).sum(axis=1)
        k = min(self.k, self.points_.shape[0])
        for start in range(0, Q.shape[0], 2048):
            chunk = Q[start:start + 2048]
            d2 = (chunk**2).sum(axis=1)[:, None] + train_sq[None, :] - 2.0 * chunk @ self.points_.T
            kth = np.partition(d2, k - 1, axis=1)[:, k - 1]
            within = d2 <= kth[:, None]
            out[start:start + 2048] = (within * self.labels_[None, :]).sum(axis=1) / within.sum(axis=1)
        return out

    def to_dict(self) -> dict:
        return {
            "k": self.k, "mu": self.mu_.tolist(), "sigma": self.sigma_.tolist(),
            "points": self.points_.tolist(), "labels": self.labels_.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KnnModel":
        model = cls(data["k"])
        model.mu_ = np.asarray(data["mu"])
        model.sigma_ = np.asarray(data["sigma"])
        model.points_ = np.asarray(data["points"])
        model.labels_ = np.asarray(data["labels"])
        return model


LEARNER_TYPES = {
    cls.tag: cls
    for cls in (ConstantModel, DecisionTreeModel, RandomForestModel, GradientBoostingModel, KnnModel)
}
