"""
Soft-margin RBF support vector machine with separate costs per class.

Dual, written in the signed variables beta_i = y_i * alpha_i:

    max  sum_i y_i beta_i - 1/2 sum_ij beta_i beta_j K_ij
    s.t. sum_i beta_i = 0,  A_i <= beta_i <= B_i

with (A_i, B_i) = (0, C+) for positives and (-C-, 0) for negatives. The
solver is SMO on maximal violating pairs: pick i with room to grow and the
largest gradient, j with room to shrink and the smallest, and move the pair
along the equality constraint.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd
from sklearn.metrics.pairwise import rbf_kernel

from practice_bus.errors import TrainingDataError

logger = logging.getLogger(__name__)

TAU = 1e-12


@dataclass(frozen=True)
class SvmParams:
    """
    Attributes:
        gamma: RBF width, K(a, b) = exp(-gamma * |a - b|^2)
        c_negative: cost C- of negative slack
        c_positive: cost C+ of positive slack; None means c_negative * #neg / #pos
        tol: stopping tolerance on the maximal KKT violation
        max_iterations: SMO pair updates before giving up
    """

    gamma: float
    c_negative: float = 1.0
    c_positive: float | None = None
    tol: float = 1e-3
    max_iterations: int = 100_000

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not self.c_negative > 0 or (self.c_positive is not None and not self.c_positive > 0):
            raise ValueError("SVM costs must be > 0")
        if not self.tol > 0 or self.max_iterations < 1:
            raise ValueError("solver tolerance and iteration cap must be positive")

    def resolve(self, n_positive: int, n_negative: int) -> "SvmParams":
        """Fill in the class-balanced C+ when it was left open."""
        if self.c_positive is not None:
            return self
        return replace(self, c_positive=self.c_negative * n_negative / n_positive)

    def unresolved(self) -> "SvmParams":
        return replace(self, c_positive=None)


class LabeledDataset:
    """
    Growing pool of labeled examples for one behavior.

    Rows keep insertion order; labels are +1 (success) or -1 (failure).
    """

    def __init__(self, behavior: str = "", n_features: int = 50):
        self.behavior = behavior
        self.n_features = n_features
        self._features: list[np.ndarray] = []
        self._points: list[np.ndarray] = []
        self._labels: list[int] = []

    def __len__(self) -> int:
        return len(self._labels)

    def add(self, features: np.ndarray, point: np.ndarray, label: int) -> None:
        features = np.asarray(features, dtype=float).ravel()
        if features.shape[0] != self.n_features:
            raise TrainingDataError(
                f"{self.behavior}: expected {self.n_features} features, got {features.shape[0]}"
            )
        if label not in (1, -1):
            raise TrainingDataError(f"labels must be +1 or -1, got {label}")
        self._features.append(features.copy())
        self._points.append(np.asarray(point, dtype=float).ravel()[:3].copy())
        self._labels.append(int(label))

    @property
    def features(self) -> np.ndarray:
        if not self._features:
            return np.empty((0, self.n_features))
        return np.vstack(self._features)

    @property
    def points(self) -> np.ndarray:
        if not self._points:
            return np.empty((0, 3))
        return np.vstack(self._points)

    @property
    def labels(self) -> np.ndarray:
        return np.asarray(self._labels, dtype=np.int64)

    @property
    def n_positive(self) -> int:
        return sum(1 for y in self._labels if y > 0)

    @property
    def n_negative(self) -> int:
        return len(self._labels) - self.n_positive

    def has_both_labels(self) -> bool:
        return self.n_positive > 0 and self.n_negative > 0

    def copy(self) -> "LabeledDataset":
        clone = LabeledDataset(self.behavior, self.n_features)
        clone._features = [f.copy() for f in self._features]
        clone._points = [p.copy() for p in self._points]
        clone._labels = list(self._labels)
        return clone

    def subset(self, rows: np.ndarray) -> "LabeledDataset":
        clone = LabeledDataset(self.behavior, self.n_features)
        for r in np.asarray(rows, dtype=np.int64):
            clone.add(self._features[r], self._points[r], self._labels[r])
        return clone

    def to_frame(self) -> pd.DataFrame:
        """Columns ``label, x, y, z, f0 .. f{k-1}``."""
        frame = pd.DataFrame(self.features, columns=[f"f{i}" for i in range(self.n_features)])
        frame.insert(0, "z", self.points[:, 2])
        frame.insert(0, "y", self.points[:, 1])
        frame.insert(0, "x", self.points[:, 0])
        frame.insert(0, "label", self.labels)
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, behavior: str = "") -> "LabeledDataset":
        feature_cols = [c for c in frame.columns if c.startswith("f")]
        data = cls(behavior, len(feature_cols))
        values = frame[feature_cols].to_numpy(dtype=float)
        points = frame[["x", "y", "z"]].to_numpy(dtype=float)
        for row, label in enumerate(frame["label"].to_numpy(dtype=np.int64)):
            data.add(values[row], points[row], int(label))
        return data


@dataclass(frozen=True, eq=False)
class SvmModel:
    """
    Trained classifier; only examples with nonzero alpha are kept.

    Attributes:
        support_vectors: (m, k)
        dual_coef: (m,) alpha_i * y_i
        bias: b in f(x) = sum_i alpha_i y_i K(x_i, x) + b
        params: parameters with C+ resolved
        support_indices: rows of the training set that became support vectors
        objective: dual objective 1/2 a^T Q a - sum(a) at the solution
        iterations: SMO pair updates used
    """

    support_vectors: np.ndarray
    dual_coef: np.ndarray
    bias: float
    params: SvmParams
    support_indices: np.ndarray
    objective: float
    iterations: int = 0

    @property
    def n_features(self) -> int:
        return int(self.support_vectors.shape[1])

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.n_features:
            raise TrainingDataError(f"expected {self.n_features} features, got {x.shape[1]}")
        kernel = rbf_kernel(x, self.support_vectors, gamma=self.params.gamma)
        return kernel @ self.dual_coef + self.bias

    def decision_value(self, x: np.ndarray) -> float:
        return float(self.decision_function(x)[0])

    def distance(self, x: np.ndarray) -> np.ndarray:
        """|f(x)|, the distance to the decision boundary used for selection."""
        return np.abs(self.decision_function(x))

    def predict(self, x: np.ndarray) -> np.ndarray:
        """+1 / -1 per row; an exactly zero decision value is negative."""
        return np.where(self.decision_function(x) > 0, 1, -1)

    def support_distance(self) -> float:
        """Smallest |f| over the support vectors."""
        return float(np.min(self.distance(self.support_vectors)))


def default_gamma(features: np.ndarray) -> float:
    """1 / (n_features * variance), the scale-aware default width."""
    features = np.asarray(features, dtype=float)
    variance = float(features.var())
    if variance <= 0:
        return 1.0 / features.shape[1]
    return 1.0 / (features.shape[1] * variance)


def bounds(labels: np.ndarray, params: SvmParams) -> tuple[np.ndarray, np.ndarray]:
    """Per-example box (A_i, B_i) for beta_i = y_i alpha_i."""
    c_pos = params.c_positive if params.c_positive is not None else params.c_negative
    positive = labels > 0
    lower = np.where(positive, 0.0, -params.c_negative)
    upper = np.where(positive, c_pos, 0.0)
    return lower, upper


def solve_dual(
    kernel: np.ndarray, labels: np.ndarray, params: SvmParams
) -> tuple[np.ndarray, float, int]:
    """
    SMO over maximal violating pairs.

    Returns:
        (beta, bias, iterations)
    """
    y = labels.astype(float)
    n = len(y)
    lower, upper = bounds(labels, params)
    beta = np.zeros(n)
    grad = y.copy()  # y_i - sum_j beta_j K_ij
    diag = np.diag(kernel)

    iterations = 0
    while True:
        up = beta < upper
        down = beta > lower
        if not up.any() or not down.any():
            break
        i = int(np.flatnonzero(up)[np.argmax(grad[up])])
        j = int(np.flatnonzero(down)[np.argmin(grad[down])])
        gap = grad[i] - grad[j]
        if gap < params.tol:
            break
        if iterations >= params.max_iterations:
            logger.warning(
                f"⚠️ SMO stopped at {iterations} iterations with KKT gap {gap:.3g} "
                f"(tol {params.tol:g})"
            )
            break
        iterations += 1

        curvature = max(diag[i] + diag[j] - 2.0 * kernel[i, j], TAU)
        room_i = upper[i] - beta[i]
        room_j = beta[j] - lower[j]
        step = min(room_i, room_j, gap / curvature)

        beta[i] = upper[i] if step == room_i else beta[i] + step
        beta[j] = lower[j] if step == room_j else beta[j] - step
        grad -= step * (kernel[i] - kernel[j])

    free = (beta > lower) & (beta < upper)
    if free.any():
        bias = float(np.mean(grad[free]))
    else:
        up, down = beta < upper, beta > lower
        hi = np.max(grad[up]) if up.any() else np.min(grad[down])
        lo = np.min(grad[down]) if down.any() else np.max(grad[up])
        bias = float((hi + lo) / 2.0)
    return beta, bias, iterations


def dual_objective(beta: np.ndarray, labels: np.ndarray, kernel: np.ndarray) -> float:
    """1/2 a^T Q a - sum(a) with Q = (y y^T) * K, in beta form."""
    return float(0.5 * beta @ kernel @ beta - labels.astype(float) @ beta)


def check_dataset(data: LabeledDataset) -> None:
    if not data.has_both_labels():
        raise TrainingDataError(
            f"{data.behavior or 'dataset'} needs both labels to train "
            f"({data.n_positive} positive, {data.n_negative} negative)"
        )
    if not np.all(np.isfinite(data.features)):
        raise TrainingDataError(f"{data.behavior or 'dataset'} has non-finite features")


def train(data: LabeledDataset, params: SvmParams) -> SvmModel:
    """
    Train from scratch on every example of ``data``.

    Raises:
        TrainingDataError: a class is missing or features are not finite
    """
    check_dataset(data)
    resolved = params.resolve(data.n_positive, data.n_negative)
    x = data.features
    labels = data.labels
    kernel = rbf_kernel(x, gamma=resolved.gamma)
    beta, bias, iterations = solve_dual(kernel, labels, resolved)

    support = np.flatnonzero(beta != 0)
    model = SvmModel(
        support_vectors=x[support],
        dual_coef=beta[support],
        bias=bias,
        params=resolved,
        support_indices=support,
        objective=dual_objective(beta, labels, kernel),
        iterations=iterations,
    )
    logger.debug(
        f"🧮 Trained {data.behavior or 'svm'}: {len(data)} examples, "
        f"{len(support)} SVs, C+={resolved.c_positive:.4g}, {iterations} iterations"
    )
    return model


def kkt_violation(model: SvmModel, data: LabeledDataset) -> float:
    """
    Largest KKT violation over the training set, measured on y_i f(x_i).

    alpha = 0 needs y f >= 1; 0 < alpha < C needs y f = 1; alpha = C needs y f <= 1.
    """
    labels = data.labels
    margins = labels * model.decision_function(data.features)
    lower, upper = bounds(labels, model.params)
    beta = np.zeros(len(data))
    beta[model.support_indices] = model.dual_coef
    at_zero = beta == 0
    at_bound = ((labels > 0) & (beta == upper)) | ((labels < 0) & (beta == lower))
    free = ~at_zero & ~at_bound

    violation = np.zeros(len(data))
    violation[at_zero] = np.maximum(0.0, 1.0 - margins[at_zero])
    violation[free] = np.abs(margins[free] - 1.0)
    violation[at_bound] = np.maximum(0.0, margins[at_bound] - 1.0)
    return float(violation.max(initial=0.0))
