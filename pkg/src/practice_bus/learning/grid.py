"""RBF hyperparameter grid search on a held-out half."""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from sklearn.metrics import balanced_accuracy_score

from practice_bus.errors import GridSearchError
from practice_bus.learning.svm import LabeledDataset, SvmParams, train

logger = logging.getLogger(__name__)

DEFAULT_GAMMAS = tuple(2.0**e for e in range(-15, 4, 2))
DEFAULT_C_SCALES = tuple(2.0**e for e in range(-5, 16, 2))


@dataclass(frozen=True, eq=False)
class GridSearchResult:
    params: SvmParams
    score: float
    table: pd.DataFrame


def split_halves(
    data: LabeledDataset, rng: np.random.Generator
) -> tuple[LabeledDataset, LabeledDataset]:
    """
    Stratified random split into train and test halves.

    Raises:
        GridSearchError: a class has fewer than two examples
    """
    labels = data.labels
    train_rows, test_rows = [], []
    for label in (1, -1):
        rows = np.flatnonzero(labels == label)
        if len(rows) < 2:
            raise GridSearchError(
                f"need at least two examples labeled {label:+d} to split, got {len(rows)}"
            )
        rows = rng.permutation(rows)
        half = len(rows) // 2
        train_rows.extend(rows[half:])
        test_rows.extend(rows[:half])
    return data.subset(np.sort(train_rows)), data.subset(np.sort(test_rows))


def grid_search(
    train_set: LabeledDataset,
    test_set: LabeledDataset,
    gammas: tuple[float, ...] = DEFAULT_GAMMAS,
    c_scales: tuple[float, ...] = DEFAULT_C_SCALES,
    tol: float = 1e-3,
) -> GridSearchResult:
    """
    Pick (gamma, C) by balanced accuracy on ``test_set``.

    C scales C- directly; C+ follows as C * #neg / #pos. Cells are scanned
    by ascending gamma then ascending C and only a strictly better score
    replaces the incumbent, so ties keep the smoother model.

    Raises:
        GridSearchError: empty grid, or a half lacks one of the labels
    """
    if not gammas or not c_scales:
        raise GridSearchError("hyperparameter grid is empty")
    for name, part in (("train", train_set), ("test", test_set)):
        if not part.has_both_labels():
            raise GridSearchError(f"{name} half needs both labels")

    rows = []
    best: tuple[float, SvmParams] | None = None
    truth = test_set.labels
    for gamma in sorted(gammas):
        for c in sorted(c_scales):
            params = SvmParams(gamma=gamma, c_negative=c, tol=tol)
            model = train(train_set, params)
            score = float(balanced_accuracy_score(truth, model.predict(test_set.features)))
            rows.append({"gamma": gamma, "c": c, "balanced_accuracy": score})
            if best is None or score > best[0]:
                best = (score, params)

    assert best is not None
    score, params = best
    logger.info(
        f"🔎 Grid search picked gamma={params.gamma:g}, C={params.c_negative:g} ({score:.3f})"
    )
    table = pd.DataFrame(rows, columns=["gamma", "c", "balanced_accuracy"])
    return GridSearchResult(params, score, table)
