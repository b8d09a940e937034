"""Seeded 1-D Gaussian mixture fitting by expectation-maximization.

The fit is deliberately self-contained: spread-out seeding, a variance
floor, and the full log-likelihood trajectory are all under our control,
which the clustering pipeline and its monotonicity checks rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 500
VARIANCE_FLOOR = 1e-6


class DegenerateDataError(ValueError):
    """Samples cannot support the requested number of components."""


@dataclass(frozen=True)
class GmmModel:
    """Fitted mixture with components sorted by mean ascending."""

    weights: tuple[float, ...]
    means: tuple[float, ...]
    variances: tuple[float, ...]
    log_likelihood: float
    n_iter: int
    log_likelihood_path: tuple[float, ...]

    @property
    def n_components(self) -> int:
        return len(self.weights)

    def log_pdf(self, x: np.ndarray) -> np.ndarray:
        """Per-sample log marginal density under the mixture."""
        lj = _component_log_joint(
            np.asarray(x, dtype=float),
            np.array(self.weights),
            np.array(self.means),
            np.array(self.variances),
        )
        return _logsumexp_rows(lj)


def _component_log_joint(
    x: np.ndarray, weights: np.ndarray, means: np.ndarray, variances: np.ndarray
) -> np.ndarray:
    """log(w_c * N(x; m_c, v_c)) as an (n_samples, n_components) matrix."""
    diff = x[:, None] - means[None, :]
    return (
        np.log(weights)[None, :]
        - 0.5 * np.log(2.0 * np.pi * variances)[None, :]
        - 0.5 * diff * diff / variances[None, :]
    )


def _logsumexp_rows(a: np.ndarray) -> np.ndarray:
    m = a.max(axis=1, keepdims=True)
    return (m + np.log(np.exp(a - m).sum(axis=1, keepdims=True))).ravel()


def _seed_centers(x: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Distance-weighted greedy center seeding (k-means++ style).

    Each new center is drawn from several distance-squared-weighted
    candidates, keeping the one that shrinks the total potential most.
    """
    n_candidates = 2 + int(np.ceil(np.log(max(n, 2))))
    centers = np.empty(n)
    centers[0] = x[rng.integers(len(x))]
    d2 = (x - centers[0]) ** 2
    for i in range(1, n):
        total = d2.sum()
        if total <= 0:
            # all remaining mass collapsed; spread over remaining samples
            centers[i:] = rng.choice(x, size=n - i)
            break
        cand_idx = rng.choice(len(x), size=n_candidates, p=d2 / total)
        best_pot, best_val = None, x[cand_idx[0]]
        for ci in cand_idx:
            pot = np.minimum(d2, (x - x[ci]) ** 2).sum()
            if best_pot is None or pot < best_pot:
                best_pot, best_val = pot, x[ci]
        centers[i] = best_val
        d2 = np.minimum(d2, (x - centers[i]) ** 2)
    return np.sort(centers)


def _init_params(
    x: np.ndarray, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    centers = _seed_centers(x, n, rng)
    # a few Lloyd rounds tighten the seeds before EM takes over
    assign = np.argmin(np.abs(x[:, None] - centers[None, :]), axis=1)
    for _ in range(10):
        moved = False
        for c in range(n):
            members = x[assign == c]
            if members.size:
                updated = members.mean()
                moved = moved or updated != centers[c]
                centers[c] = updated
        new_assign = np.argmin(np.abs(x[:, None] - centers[None, :]), axis=1)
        if not moved or np.array_equal(new_assign, assign):
            assign = new_assign
            break
        assign = new_assign
    weights = np.empty(n)
    means = np.empty(n)
    variances = np.empty(n)
    fallback_var = max(np.var(x), VARIANCE_FLOOR)
    for c in range(n):
        members = x[assign == c]
        if members.size == 0:
            weights[c] = 1.0 / len(x)
            means[c] = centers[c]
            variances[c] = fallback_var
        else:
            weights[c] = members.size / len(x)
            means[c] = members.mean()
            variances[c] = max(members.var(), VARIANCE_FLOOR)
    weights /= weights.sum()
    return weights, means, variances


def _em_run(
    x: np.ndarray,
    n_components: int,
    rng: np.random.Generator,
    tol: float,
    max_iter: int,
    variance_floor: float,
) -> GmmModel:
    weights, means, variances = _init_params(x, n_components, rng)
    lj = _component_log_joint(x, weights, means, variances)
    ll = _logsumexp_rows(lj).sum()
    path = [ll]
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        # E-step: responsibilities from the current joint
        log_resp = lj - _logsumexp_rows(lj)[:, None]
        resp = np.exp(log_resp)
        # M-step
        nk = resp.sum(axis=0)
        nk = np.maximum(nk, 1e-300)
        weights = nk / len(x)
        means = (resp * x[:, None]).sum(axis=0) / nk
        diff = x[:, None] - means[None, :]
        variances = np.maximum((resp * diff * diff).sum(axis=0) / nk, variance_floor)
        lj = _component_log_joint(x, weights, means, variances)
        new_ll = _logsumexp_rows(lj).sum()
        path.append(new_ll)
        if new_ll - ll < tol:
            ll = new_ll
            break
        ll = new_ll
    order = np.argsort(means)
    return GmmModel(
        weights=tuple(weights[order]),
        means=tuple(means[order]),
        variances=tuple(variances[order]),
        log_likelihood=float(ll),
        n_iter=n_iter,
        log_likelihood_path=tuple(float(v) for v in path),
    )


def fit_gmm_1d(
    samples,
    n_components: int,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    variance_floor: float = VARIANCE_FLOOR,
    n_init: int = 2,
) -> GmmModel:
    """Fit a 1-D Gaussian mixture with `n_components` components.

    Runs `n_init` independent seeded EM starts and keeps the best final
    log-likelihood.  Within a run the log-likelihood is non-decreasing up to
    the variance floor.  Raises DegenerateDataError for too few or
    all-identical samples.
    """
    x = np.asarray(list(samples), dtype=float)
    if n_components < 1:
        raise ValueError("n_components must be >= 1")
    if x.size < n_components:
        raise DegenerateDataError(
            f"{x.size} samples cannot support {n_components} components"
        )
    if np.ptp(x) == 0.0 and n_components > 1:
        raise DegenerateDataError("all samples identical")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    rng = np.random.default_rng(seed)
    best: GmmModel | None = None
    for _ in range(max(1, n_init)):
        model = _em_run(x, n_components, rng, tol, max_iter, variance_floor)
        if best is None or model.log_likelihood > best.log_likelihood:
            best = model
    assert best is not None
    return best
