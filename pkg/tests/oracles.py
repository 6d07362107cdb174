"""
Slow, obviously-correct reference implementations used as test oracles.
"""

import numpy as np
from scipy.optimize import brentq
from scipy.stats import gaussian_kde


def padded_patch(image, pixel, widths, target):
    """
    Patch vector from an edge-padded image, downsampled by exact supersampling:
    each source pixel is repeated ``target`` times per axis so every output bin
    covers exactly ``width`` x ``width`` subpixels. Rows are reduced before
    columns to keep the largest scale in memory.
    """
    half = max(widths) // 2
    padded = np.pad(image.astype(float), ((half, half), (half, half), (0, 0)), mode="edge")
    u, v = pixel
    parts = []
    for width in widths:
        h = width // 2
        crop = padded[v + half - h : v + half + h + 1, u + half - h : u + half + h + 1]
        channels = image.shape[2]
        rows = np.repeat(crop, target, axis=0).reshape(target, width, width, channels)
        rows = rows.mean(axis=1)
        bins = np.repeat(rows, target, axis=1).reshape(target, target, width, channels)
        parts.append(bins.mean(axis=2).ravel())
    return np.concatenate(parts)


def project_to_feasible(z, lower, upper):
    """Euclidean projection onto {sum(beta) = 0, lower <= beta <= upper}."""

    def total(shift):
        return float(np.clip(z - shift, lower, upper).sum())

    lo = float(np.min(z - upper))
    hi = float(np.max(z - lower))
    if total(lo) == 0.0:
        return np.clip(z - lo, lower, upper)
    if total(hi) == 0.0:
        return np.clip(z - hi, lower, upper)
    shift = brentq(total, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
    return np.clip(z - shift, lower, upper)


def dual_by_projected_gradient(kernel, labels, lower, upper, iterations=5_000, tol=1e-13):
    """
    Minimize 1/2 b^T K b - y^T b over the SVM dual box with accelerated
    projected gradient and adaptive restarts. Stops once a projected step
    moves no coordinate by more than ``tol``.

    Returns:
        (beta, objective)
    """
    y = labels.astype(float)

    def objective(b):
        return 0.5 * b @ kernel @ b - y @ b

    step = 1.0 / np.linalg.eigvalsh(kernel)[-1]
    beta = np.zeros(len(y))
    momentum = beta.copy()
    t = 1.0
    for _ in range(iterations):
        grad = kernel @ momentum - y
        nxt = project_to_feasible(momentum - step * grad, lower, upper)
        if np.max(np.abs(nxt - momentum)) < tol and objective(nxt) <= objective(beta):
            beta = nxt
            break
        if objective(nxt) > objective(beta):
            momentum, t = beta.copy(), 1.0
            continue
        t_next = (1.0 + np.sqrt(1.0 + 4.0 * t * t)) / 2.0
        momentum = nxt + (t - 1.0) / t_next * (nxt - beta)
        beta, t = nxt, t_next
    return beta, float(objective(beta))


def bias_from_gradient(beta, kernel, labels, lower, upper, eps=1e-9):
    """Offset from the free coefficients, or the middle of the feasible range."""
    grad = labels.astype(float) - kernel @ beta
    up, down = beta < upper - eps, beta > lower + eps
    free = up & down
    if free.any():
        return float(np.mean(grad[free]))
    hi = np.max(grad[up]) if up.any() else np.min(grad[down])
    lo = np.min(grad[down]) if down.any() else np.max(grad[up])
    return float((hi + lo) / 2.0)


def brute_force_pick(model, pool):
    """
    (index, distance) of the closest available candidate if it beats every
    support vector, else None. Lowest index wins ties.
    """
    sv_distance = min(
        abs(model.decision_value(sv)) for sv in model.support_vectors
    )
    best = None
    for index in range(pool.size):
        if pool.consumed[index]:
            continue
        distance = abs(model.decision_value(pool.features[index]))
        if best is None or distance < best[1]:
            best = (index, distance)
    if best is None or not best[1] < sv_distance:
        return None
    return best


def dense_grid_mode(coords, bandwidth="scott", step=0.0005, margin=0.02):
    """Argmax of a 2D Gaussian KDE over a dense lattice covering the points."""
    kde = gaussian_kde(coords.T, bw_method=bandwidth)
    lo = coords.min(axis=0) - margin
    hi = coords.max(axis=0) + margin
    xs = np.arange(lo[0], hi[0] + step, step)
    ys = np.arange(lo[1], hi[1] + step, step)
    gx, gy = np.meshgrid(xs, ys)
    grid = np.vstack([gx.ravel(), gy.ravel()])
    values = kde(grid)
    best = int(np.argmax(values))
    return grid[:, best], float(values[best]), kde
