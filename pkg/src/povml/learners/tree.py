"""CART-style decision trees grown from scratch.

Split candidates are midpoints between consecutive distinct sorted values.
Classification scores come from exact integer (or integer-weighted) counts,
so an exhaustive scalar re-search produces bit-identical scores; ties
resolve to the lowest feature index, then the lowest threshold.

Two growth strategies, chosen for cost shape rather than semantics:
  * classification trees argsort the sampled feature columns per node
    (cheap when forests sample sqrt(p) features per split);
  * regression trees (the boosting workhorse: every feature, shallow depth)
    reuse a fit-level presort and stably partition per-column order at each
    split, so a stage costs gathers and cumulative sums, not sorts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


def impurity(labels, criterion: str) -> float:
    """Gini or entropy impurity of a binary label multiset."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise ValueError("impurity of empty labels is undefined")
    n = float(labels.size)
    pos = float(np.count_nonzero(labels))
    return float(_impurity_from_counts(np.array(n), np.array(pos), criterion))


def _impurity_from_counts(n, pos, criterion: str):
    """Vector-friendly impurity from (total, positive) counts; exact for integer counts."""
    p = pos / n
    q = (n - pos) / n
    if criterion == "gini":
        return 1.0 - p**2 - q**2
    if criterion == "entropy":
        with np.errstate(divide="ignore", invalid="ignore"):
            pl = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
            ql = np.where(q > 0, q * np.log2(np.where(q > 0, q, 1.0)), 0.0)
        return -pl - ql
    raise ValueError(f"unknown criterion {criterion!r}")


def split_score(nl, pl, nr, pr, criterion: str):
    """Weighted child impurity used to rank candidate splits (lower is better)."""
    return nl * _impurity_from_counts(nl, pl, criterion) + nr * _impurity_from_counts(nr, pr, criterion)


@dataclass
class TreeNode:
    """Either a split (feature, threshold, children) or a leaf (value, count)."""

    n_samples: float
    value: float  # positive fraction (classification) or mean target (regression)
    feature: int = -1
    threshold: float = 0.0
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"n": self.n_samples, "value": self.value}
        return {
            "n": self.n_samples,
            "value": self.value,
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TreeNode":
        node = cls(n_samples=data["n"], value=data["value"])
        if "feature" in data:
            node.feature = data["feature"]
            node.threshold = data["threshold"]
            node.left = cls.from_dict(data["left"])
            node.right = cls.from_dict(data["right"])
        return node


def predict_tree(root: TreeNode, X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0])
    stack = [(root, np.arange(X.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if idx.size == 0:
            continue
        if node.is_leaf:
            out[idx] = node.value
            continue
        go_left = X[idx, node.feature] <= node.threshold
        stack.append((node.left, idx[go_left]))
        stack.append((node.right, idx[~go_left]))
    return out


def _candidate_feature_set(rng, p: int, feature_subsample: str) -> np.ndarray:
    if feature_subsample == "all" or rng is None:
        return np.arange(p)
    if feature_subsample == "sqrt":
        k = max(1, int(np.ceil(np.sqrt(p))))
        return np.sort(rng.choice(p, size=min(k, p), replace=False))
    raise ValueError(f"unknown feature_subsample rule {feature_subsample!r}")


# --------------------------------------------------------------------------
# classification: per-node argsort over the sampled feature columns
# --------------------------------------------------------------------------

def grow_classification_tree(
    X: np.ndarray,
    y: np.ndarray,
    sample_weight: np.ndarray | None = None,
    criterion: str = "gini",
    max_depth: Optional[int] = None,
    min_leaf: int = 1,
    feature_subsample: str = "all",
    rng: Optional[np.random.Generator] = None,
) -> tuple[TreeNode, np.ndarray]:
    """Grow a tree; returns (root, per-feature impurity-decrease totals)."""
    w = np.ones(X.shape[0]) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
    keep = w > 0
    X, y, w = X[keep], y[keep], w[keep]
    if X.shape[0] == 0:
        raise ValueError("cannot grow a tree on an empty sample")
    y = y.astype(np.float64)
    wy = w * y
    importances = np.zeros(X.shape[1])

    n0 = float(w.sum())
    root = TreeNode(n_samples=n0, value=float(wy.sum()) / n0)
    stack: list[tuple[TreeNode, np.ndarray, int]] = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        wn = w[idx]
        n = wn.sum()
        pos = wy[idx].sum()
        if (max_depth is not None and depth >= max_depth) or n < 2 * min_leaf or pos in (0, n):
            continue
        feat = _candidate_feature_set(rng, X.shape[1], feature_subsample)
        found = _best_classification_split(X[idx], y[idx], wn, feat, criterion, min_leaf)
        if found is None:
            continue
        score, feature, threshold = found
        parent_score = float(n * _impurity_from_counts(np.array(n), np.array(pos), criterion))
        importances[feature] += max(parent_score - score, 0.0)

        go_left = X[idx, feature] <= threshold
        node.feature = feature
        node.threshold = threshold
        for child_idx in (idx[go_left], idx[~go_left]):
            cn = w[child_idx].sum()
            child = TreeNode(n_samples=float(cn), value=float(wy[child_idx].sum()) / float(cn))
            if node.left is None:
                node.left = child
            else:
                node.right = child
            stack.append((child, child_idx, depth + 1))
    return root, importances


def _best_classification_split(X, y, w, feat, criterion, min_leaf):
    """Best (score, feature, threshold) over `feat` columns, or None."""
    Xs = X[:, feat]
    order = np.argsort(Xs, axis=0, kind="stable")
    xs = np.take_along_axis(Xs, order, axis=0)
    ws = w[order]
    wy = (w * y)[order]
    n_total = w.sum()
    p_total = (w * y).sum()
    nl = np.cumsum(ws, axis=0)[:-1]
    pl = np.cumsum(wy, axis=0)[:-1]
    nr = n_total - nl
    pr = p_total - pl
    valid = (xs[1:] > xs[:-1]) & (nl >= min_leaf) & (nr >= min_leaf)
    if not valid.any():
        return None
    with np.errstate(invalid="ignore", divide="ignore"):
        score = split_score(nl, pl, nr, pr, criterion)
    score = np.where(valid, score, np.inf)
    # feature-major argmin: ties resolve to lowest feature, then lowest threshold
    flat = int(np.argmin(score.T))
    col, row = divmod(flat, score.shape[0])
    best = score[row, col]
    if not np.isfinite(best):
        return None
    threshold = (xs[row, col] + xs[row + 1, col]) / 2.0
    return float(best), int(feat[col]), float(threshold)


# --------------------------------------------------------------------------
# regression: fit-level presort, stable partition per split, unit weights
# --------------------------------------------------------------------------

def presort_columns(X: np.ndarray) -> np.ndarray:
    """Per-column stable sort order, transposed to (p, n) for cheap partitioning."""
    return np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T)


def sorted_column_values(X: np.ndarray, presorted: np.ndarray) -> np.ndarray:
    """(p, n) value matrix matching `presort_columns` order; cacheable per fit."""
    return X.T[np.arange(X.shape[1])[:, None], presorted]


def grow_regression_tree(
    X: np.ndarray,
    r: np.ndarray,
    max_depth: Optional[int] = 3,
    min_leaf: int = 10,
    presorted: np.ndarray | None = None,
    presorted_values: np.ndarray | None = None,
) -> tuple[TreeNode, np.ndarray]:
    if X.shape[0] == 0:
        raise ValueError("cannot grow a tree on an empty sample")
    r = r.astype(np.float64)
    cols0 = presort_columns(X) if presorted is None else presorted
    n, p = X.shape
    importances = np.zeros(p)

    # (p, m) views of the node, each row ordered by its own feature; children
    # are stable partitions of the parent, so no re-sort or re-gather below root
    xs0 = sorted_column_values(X, cols0) if presorted_values is None else presorted_values
    ts0 = r[cols0]

    root = TreeNode(n_samples=float(n), value=float(r.mean()))
    stack = [(root, cols0, xs0, ts0, 0)]
    while stack:
        node, cols, xs, ts, depth = stack.pop()
        m = cols.shape[1]
        if (max_depth is not None and depth >= max_depth) or m < 2 * min_leaf:
            continue
        rn = ts[0]
        if np.all(rn == rn[0]):
            continue
        s_total = rn.sum()
        s2_total = (rn * rn).sum()

        sl = np.cumsum(ts, axis=1)[:, :-1]
        s2l = np.cumsum(ts * ts, axis=1)[:, :-1]
        nl = np.arange(1, m, dtype=np.float64)
        nr = m - nl
        sr = s_total - sl
        s2r = s2_total - s2l
        valid = (xs[:, 1:] > xs[:, :-1]) & (nl >= min_leaf) & (nr >= min_leaf)
        if not valid.any():
            continue
        with np.errstate(invalid="ignore", divide="ignore"):
            score = (s2l - sl**2 / nl) + (s2r - sr**2 / nr)
        score = np.where(valid, score, np.inf)
        flat = int(np.argmin(score))  # feature-major, then ascending threshold
        frow, fcol = divmod(flat, score.shape[1])
        if not np.isfinite(score[frow, fcol]):
            continue
        threshold = float((xs[frow, fcol] + xs[frow, fcol + 1]) / 2.0)
        feature = int(frow)
        gain = max((s2_total - s_total**2 / m) - float(score[frow, fcol]), 0.0)
        if gain <= 0.0:
            continue
        importances[feature] += gain

        # left members are the first fcol+1 positions in the split feature's order
        flag = np.zeros(n, dtype=bool)
        flag[cols[frow, : fcol + 1]] = True
        flags = flag[cols]  # (p, m); every row holds the same member set
        m_left = fcol + 1
        left = (cols[flags].reshape(p, m_left), xs[flags].reshape(p, m_left),
                ts[flags].reshape(p, m_left))
        inv = ~flags
        right = (cols[inv].reshape(p, m - m_left), xs[inv].reshape(p, m - m_left),
                 ts[inv].reshape(p, m - m_left))

        node.feature = feature
        node.threshold = threshold
        node.left = TreeNode(n_samples=float(m_left), value=float(left[2][0].mean()))
        node.right = TreeNode(n_samples=float(m - m_left), value=float(right[2][0].mean()))
        stack.append((node.left, *left, depth + 1))
        stack.append((node.right, *right, depth + 1))
    return root, importances
