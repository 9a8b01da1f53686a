"""Clustering and topic models over projected documents or count matrices.

Point methods (k-means, spherical k-means, spherical Gaussian mixture,
trimmed k-means) work on document coordinates; count methods (mixture of
unigrams, Dirichlet-multinomial mixture, LDA) work on a document-term
matrix directly.  Every stochastic choice is drawn from a generator seeded
through the multi-start policy, so a (data, config, seed) triple pins the
result exactly.

Labels are 1..k; trimmed-away points carry label 0 (``TRIMMED``).
"""

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import gammaln, logsumexp, psi

from . import kernels
from .errors import (
    AlignmentError,
    DegenerateDocumentError,
    DegenerateFitError,
    DegeneratePointError,
    OptimizationFailureError,
    ParameterError,
)
from .vectorize import DocTermMatrix

TRIMMED = 0


class Method(str, Enum):
    KMEANS = "KMEANS"
    SKMEANS = "SKMEANS"
    GMM_SPHERICAL = "GMM_SPHERICAL"
    TRIMMED_KMEANS = "TRIMMED_KMEANS"
    MOU = "MOU"
    DMM = "DMM"
    LDA = "LDA"


class Selection(str, Enum):
    MIN_OBJECTIVE = "MIN_OBJECTIVE"
    MIN_BIC = "MIN_BIC"


@dataclass(frozen=True)
class MultiStartPolicy:
    """How many random restarts to run and how to pick the winner.

    Ties on the selection key keep the lowest restart index, so adding
    restarts never changes an earlier winner retroactively.
    """

    restarts: int = 1000
    seed: int = 0
    selection: Selection = Selection.MIN_OBJECTIVE

    def __post_init__(self):
        if self.restarts < 1:
            raise ParameterError(
                f"restarts must be >= 1, got {self.restarts}")


@dataclass
class ClusterResult:
    """Hard assignment (plus optional soft memberships) for one method."""

    method: Method
    k: int
    assignment: np.ndarray
    objective: float
    seed: int
    soft: np.ndarray | None = None

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.int64)
        self.assignment = a
        if a.ndim != 1 or a.size == 0:
            raise ParameterError("assignment must be one-dimensional")
        lo = int(a.min())
        if lo < 0 or (lo == 0 and self.method is not Method.TRIMMED_KMEANS) \
                or int(a.max()) > self.k:
            raise ParameterError(
                f"labels must lie in 1..{self.k}"
                + (" (0 for trimmed)" if self.method is Method.TRIMMED_KMEANS
                   else ""))
        if not math.isfinite(self.objective):
            raise ParameterError("objective must be finite")
        if self.soft is not None:
            s = np.asarray(self.soft, dtype=np.float64)
            self.soft = s
            if s.shape != (a.shape[0], self.k):
                raise AlignmentError(
                    f"soft shape {s.shape}, expected ({a.shape[0]}, {self.k})")
            if np.any(s < 0) or not np.allclose(s.sum(axis=1), 1.0,
                                                atol=1e-8):
                raise ParameterError("soft rows must be distributions")
            if not np.array_equal(s.argmax(axis=1) + 1, a):
                raise ParameterError(
                    "assignment must be the argmax of the soft memberships")

    def to_json(self) -> str:
        labels = ["TRIMMED" if v == TRIMMED else int(v)
                  for v in self.assignment]
        payload = {"method": self.method.value, "k": self.k,
                   "seed": self.seed, "objective": self.objective,
                   "assignment": labels}
        if self.soft is not None:
            payload["soft"] = self.soft.tolist()
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "ClusterResult":
        raw = json.loads(text)
        labels = np.array([TRIMMED if v == "TRIMMED" else int(v)
                           for v in raw["assignment"]], dtype=np.int64)
        soft = None if raw.get("soft") is None else np.array(raw["soft"])
        return cls(method=Method(raw["method"]), k=int(raw["k"]),
                   assignment=labels, objective=float(raw["objective"]),
                   seed=int(raw["seed"]), soft=soft)


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _check_points(points, k) -> np.ndarray:
    pts = np.ascontiguousarray(np.asarray(points, dtype=np.float64))
    if pts.ndim != 2 or pts.shape[1] < 1:
        raise ParameterError(f"points must be (n, d), got {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ParameterError("points contain non-finite values")
    n = pts.shape[0]
    if not 1 <= k <= n:
        raise ParameterError(f"k must be in [1, {n}], got {k}")
    return pts

def _draw_init_indices(n, k, policy: MultiStartPolicy,
                       init_indices) -> np.ndarray:
    if init_indices is not None:
        idx = np.asarray(init_indices, dtype=np.int64)
        if idx.shape != (policy.restarts, k):
            raise ParameterError(
                f"init_indices shape {idx.shape}, expected "
                f"({policy.restarts}, {k})")
        if np.any(idx < 0) or np.any(idx >= n):
            raise ParameterError("init_indices out of range")
        return idx
    rng = np.random.default_rng(policy.seed)
    return np.stack([rng.choice(n, size=k, replace=False)
                     for _ in range(policy.restarts)])

def _best_restart(candidates):
    """Pick the strictly smallest key; earlier restarts win ties."""
    best = None
    for cand in candidates:
        if cand is None:
            continue
        if best is None or cand[0] < best[0]:
            best = cand
    return best


# ---------------------------------------------------------------------------
# point methods
# ---------------------------------------------------------------------------

def kmeans(points, k: int, policy: MultiStartPolicy,
           init_indices=None) -> ClusterResult:
    """Multi-start Lloyd k-means minimizing within-cluster sum of squares."""
    pts = _check_points(points, k)
    if policy.selection is not Selection.MIN_OBJECTIVE:
        raise ParameterError("k-means has no likelihood; use MIN_OBJECTIVE")
    inits = _draw_init_indices(pts.shape[0], k, policy, init_indices)

    def run():
        for idx in inits:
            labels, _, obj, _, _ = kernels.concentration_single(
                pts, pts[idx].copy(), 0, kernels.MAX_ITER_DEFAULT)
            yield obj, labels
    obj, labels = _best_restart(run())
    return ClusterResult(method=Method.KMEANS, k=k, assignment=labels + 1,
                         objective=obj, seed=policy.seed)


def trimmed_kmeans(points, k: int, alpha: float, policy: MultiStartPolicy,
                   init_indices=None) -> ClusterResult:
    """k-means that concentrates on the best-fitting (1 - alpha) fraction.

    Each Lloyd iteration discards the floor(alpha * n) points farthest from
    their centers before updating; discarded points get label 0.  With
    alpha = 0 this is exactly :func:`kmeans`, same restarts and all.
    """
    pts = _check_points(points, k)
    if policy.selection is not Selection.MIN_OBJECTIVE:
        raise ParameterError(
            "trimmed k-means has no likelihood; use MIN_OBJECTIVE")
    if not 0.0 <= alpha < 1.0:
        raise ParameterError(f"alpha must be in [0, 1), got {alpha}")
    n = pts.shape[0]
    # 1e-9 guards against a representation error in alpha * n flipping the
    # trim count across an integer boundary
    n_trim = int(math.floor(alpha * n + 1e-9))
    if math.ceil(alpha * n - 1e-9) > n - k:
        raise ParameterError(
            f"alpha = {alpha} leaves fewer than k = {k} points")
    inits = _draw_init_indices(n, k, policy, init_indices)

    def run():
        for idx in inits:
            labels, _, obj, _, _ = kernels.concentration_single(
                pts, pts[idx].copy(), n_trim, kernels.MAX_ITER_DEFAULT)
            yield obj, labels
    obj, labels = _best_restart(run())
    return ClusterResult(method=Method.TRIMMED_KMEANS, k=k,
                         assignment=labels + 1, objective=obj,
                         seed=policy.seed)


def spherical_kmeans(points, k: int, policy: MultiStartPolicy,
                     init_indices=None) -> ClusterResult:
    """k-means on directions: cosine distance, centers on the unit sphere.

    Scale-invariant in each point; zero-norm points have no direction and
    raise DegeneratePointError.
    """
    pts = _check_points(points, k)
    if policy.selection is not Selection.MIN_OBJECTIVE:
        raise ParameterError(
            "spherical k-means has no likelihood; use MIN_OBJECTIVE")
    norms = np.sqrt((pts * pts).sum(axis=1))
    if np.any(norms == 0):
        raise DegeneratePointError(
            f"point {int(np.argmin(norms))} has zero norm")
    unit = pts / norms[:, None]
    inits = _draw_init_indices(pts.shape[0], k, policy, init_indices)

    def run():
        for idx in inits:
            labels, _, obj, _, _ = kernels.spherical_single(
                unit, unit[idx].copy(), kernels.MAX_ITER_DEFAULT)
            yield obj, labels
    obj, labels = _best_restart(run())
    return ClusterResult(method=Method.SKMEANS, k=k, assignment=labels + 1,
                         objective=obj, seed=policy.seed)


# ---------------------------------------------------------------------------
# spherical Gaussian mixture
# ---------------------------------------------------------------------------

@dataclass
class GmmFit:
    """One converged EM run; ``loglik_history`` has one entry per iteration."""

    means: np.ndarray
    variances: np.ndarray
    weights: np.ndarray
    resp: np.ndarray
    loglik_history: list = field(default_factory=list)

    @property
    def loglik(self):
        return self.loglik_history[-1]


def gmm_em_single(points, mean_idx, max_iter: int = 300,
                  tol: float = 1e-8) -> GmmFit | None:
    """EM for a mixture of spherical Gaussians, one restart.

    Components share no parameters: each has its own weight, mean and
    isotropic variance.  Returns None when a component collapses (vanishing
    weight or variance), which the caller treats as a failed restart.
    """
    pts = np.asarray(points, dtype=np.float64)
    n, d = pts.shape
    k = len(mean_idx)
    means = pts[np.asarray(mean_idx)].copy()
    base_var = float(((pts - pts.mean(axis=0)) ** 2).sum() / (n * d))
    if base_var <= 0.0:
        return None
    variances = np.full(k, base_var)
    weights = np.full(k, 1.0 / k)
    floor = base_var * 1e-12
    hist: list = []

    for _ in range(max_iter):
        diff = pts[:, None, :] - means[None, :, :]
        d2 = (diff * diff).sum(axis=2)
        logp = (np.log(weights)[None, :]
                - 0.5 * (d * np.log(2.0 * np.pi * variances)[None, :]
                         + d2 / variances[None, :]))
        norm = logsumexp(logp, axis=1)
        ll = float(norm.sum())
        resp = np.exp(logp - norm[:, None])

        nk = resp.sum(axis=0)
        if np.any(nk < 1e-10):
            return None
        weights = nk / n
        means = (resp.T @ pts) / nk[:, None]
        diff = pts[:, None, :] - means[None, :, :]
        d2 = (diff * diff).sum(axis=2)
        variances = (resp * d2).sum(axis=0) / (d * nk)
        if np.any(variances < floor):
            return None

        # bool() snapshots the test: a bare `hist and ...` on an empty
        # history aliases the list, which the append below would make truthy
        done = bool(hist) and abs(ll - hist[-1]) <= tol * (1.0 + abs(ll))
        hist.append(ll)
        if done:
            break

    return GmmFit(means=means, variances=variances, weights=weights,
                  resp=resp, loglik_history=hist)


def gmm_spherical(points, k: int, policy: MultiStartPolicy,
                  max_iter: int = 300, tol: float = 1e-8,
                  init_indices=None) -> ClusterResult:
    """Multi-start spherical Gaussian mixture; soft memberships included.

    Selection uses the log-likelihood (MIN_OBJECTIVE) or BIC (MIN_BIC);
    at fixed k these rank restarts identically.  Raises DegenerateFitError
    when every restart collapsed.
    """
    pts = _check_points(points, k)
    n, d = pts.shape
    inits = _draw_init_indices(n, k, policy, init_indices)
    n_params = (k - 1) + k * d + k

    def run():
        for idx in inits:
            fit = gmm_em_single(pts, idx, max_iter=max_iter, tol=tol)
            if fit is None:
                yield None
            elif policy.selection is Selection.MIN_BIC:
                yield _bic(fit.loglik, n_params, n), fit
            else:
                yield -fit.loglik, fit

    best = _best_restart(run())
    if best is None:
        raise DegenerateFitError("every restart collapsed")
    fit = best[1]
    return ClusterResult(method=Method.GMM_SPHERICAL, k=k,
                         assignment=fit.resp.argmax(axis=1) + 1,
                         objective=fit.loglik, seed=policy.seed,
                         soft=fit.resp)


def _bic(loglik: float, n_params: int, n: int) -> float:
    return -2.0 * loglik + n_params * math.log(n)


# ---------------------------------------------------------------------------
# mixture of unigrams
# ---------------------------------------------------------------------------

@dataclass
class MouFit:
    """One converged EM run over term counts."""

    weights: np.ndarray
    topics: np.ndarray
    resp: np.ndarray
    loglik_history: list = field(default_factory=list)

    @property
    def loglik(self):
        return self.loglik_history[-1]


def _check_count_matrix(mat: DocTermMatrix) -> np.ndarray:
    x = mat.weights
    rowsums = x.sum(axis=1)
    if np.any(rowsums <= 0):
        bad = mat.doc_ids[int(np.argmin(rowsums))]
        raise DegenerateDocumentError(f"document has zero count sum: {bad}")
    return x


def _init_assignment(rng, n, k) -> np.ndarray:
    """Random hard assignment with every cluster populated."""
    labels = rng.integers(0, k, size=n)
    perm = rng.permutation(n)
    labels[perm[:k]] = np.arange(k)
    return labels


def mou_em_single(x, labels0, k: int | None = None, max_iter: int = 1000,
                  tol: float = 1e-7) -> MouFit:
    """EM for a mixture of unigrams from a hard initial assignment.

    Counts may be fractional.  Components that lose all responsibility go
    dormant (zero weight) rather than producing NaNs.
    """
    n, m = x.shape
    if k is None:
        k = int(labels0.max()) + 1
    resp = np.zeros((n, k))
    resp[np.arange(n), labels0] = 1.0
    x_pos = (x > 0).astype(np.float64)
    hist: list = []

    for _ in range(max_iter):
        nk = resp.sum(axis=0)
        weights = nk / n
        mass = resp.T @ x
        totals = mass.sum(axis=1, keepdims=True)
        topics = np.where(totals > 0, mass / np.where(totals > 0, totals, 1.0),
                          1.0 / m)

        log_w = np.full(k, -np.inf)
        log_w[weights > 0] = np.log(weights[weights > 0])
        log_t = np.where(topics > 0, np.log(np.where(topics > 0, topics, 1.0)),
                         0.0)
        logp = x @ log_t.T + log_w[None, :]
        # a cell is -inf when the document uses a term the topic rules out
        impossible = (x_pos @ (topics == 0).T.astype(np.float64)) > 0
        logp[impossible] = -np.inf

        norm = logsumexp(logp, axis=1)
        ll = float(norm.sum())
        resp = np.exp(logp - norm[:, None])

        done = bool(hist) and abs(ll - hist[-1]) <= tol
        hist.append(ll)
        if done:
            break

    return MouFit(weights=weights, topics=topics, resp=resp,
                  loglik_history=hist)


def mixtures_of_unigrams(mat: DocTermMatrix, k: int,
                         policy: MultiStartPolicy, max_iter: int = 1000,
                         tol: float = 1e-7,
                         init_assignments=None) -> ClusterResult:
    """Multi-start mixture of unigrams; restarts ranked by BIC.

    At fixed k the BIC ranking equals the log-likelihood ranking, so both
    selection modes coincide; the reported objective is the BIC.
    """
    x = _check_count_matrix(mat)
    n, m = x.shape
    if not 1 <= k <= n:
        raise ParameterError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(policy.seed)
    n_params = (k - 1) + k * (m - 1)

    def run():
        for r in range(policy.restarts):
            if init_assignments is not None:
                labels0 = np.asarray(init_assignments[r], dtype=np.int64)
            else:
                labels0 = _init_assignment(rng, n, k)
            fit = mou_em_single(x, labels0, k=k, max_iter=max_iter, tol=tol)
            yield _bic(fit.loglik, n_params, n), fit

    bic, fit = _best_restart(run())
    return ClusterResult(method=Method.MOU, k=k,
                         assignment=fit.resp.argmax(axis=1) + 1,
                         objective=bic, seed=policy.seed, soft=fit.resp)


# ---------------------------------------------------------------------------
# Dirichlet-multinomial mixture
# ---------------------------------------------------------------------------

@dataclass
class DmmFit:
    """One gradient-ascent run; history covers accepted iterations only."""

    weights: np.ndarray
    concentrations: np.ndarray
    resp: np.ndarray
    loglik_history: list = field(default_factory=list)

    @property
    def loglik(self):
        return self.loglik_history[-1]


def _dmm_loglik_resp(x, totals, log_w, log_a):
    """Mixture log-likelihood and responsibilities at (log_w, log_a)."""
    conc = np.exp(log_a)
    conc_sum = conc.sum(axis=1)
    k = log_w.shape[0]
    logp = np.empty((x.shape[0], k))
    for z in range(k):
        logp[:, z] = (log_w[z] - logsumexp(log_w)
                      + gammaln(conc_sum[z])
                      - gammaln(conc_sum[z] + totals)
                      + (gammaln(x + conc[z][None, :])
                         - gammaln(conc[z])[None, :]).sum(axis=1))
    norm = logsumexp(logp, axis=1)
    return float(norm.sum()), np.exp(logp - norm[:, None])


def dmm_ascent_single(x, labels0, k: int | None = None, max_iter: int = 100,
                      tol: float = 1e-7) -> DmmFit:
    """Gradient ascent for a Dirichlet-multinomial mixture, one restart.

    Parameters are unconstrained: softmax weights and log concentrations.
    A step is accepted only if it keeps the log-likelihood finite and
    non-decreasing; otherwise the step is halved.  Persistent non-finite
    evaluations raise OptimizationFailureError.
    """
    n, m = x.shape
    if k is None:
        k = int(labels0.max()) + 1
    totals = x.sum(axis=1)

    counts = np.zeros((k, m))
    np.add.at(counts, labels0, x)
    theta = (counts + 0.5) / (counts + 0.5).sum(axis=1, keepdims=True)
    log_a = np.log(theta * m)
    sizes = np.bincount(labels0, minlength=k).astype(np.float64)
    with np.errstate(divide="ignore"):
        log_w = np.log(sizes / n)

    ll, resp = _dmm_loglik_resp(x, totals, log_w, log_a)
    if not math.isfinite(ll):
        raise OptimizationFailureError("initial log-likelihood not finite")
    hist = [ll]
    step = 0.05

    for _ in range(max_iter):
        weights = np.exp(log_w - logsumexp(log_w))
        conc = np.exp(log_a)
        conc_sum = conc.sum(axis=1)
        g_w = resp.sum(axis=0) - n * weights
        g_a = np.empty_like(log_a)
        for z in range(k):
            per_term = (resp[:, z][:, None]
                        * (psi(x + conc[z][None, :]) - psi(conc[z])[None, :])
                        ).sum(axis=0)
            shared = float((resp[:, z]
                            * (psi(conc_sum[z]) - psi(conc_sum[z] + totals))
                            ).sum())
            g_a[z] = conc[z] * (per_term + shared)
        scale = max(np.abs(g_w).max(), np.abs(g_a).max(), 1.0)

        accepted = False
        trial = step
        new_ll = math.nan
        for _ in range(60):
            cand_w = log_w + trial * g_w / scale
            cand_a = np.clip(log_a + trial * g_a / scale, -30.0, 30.0)
            new_ll, new_resp = _dmm_loglik_resp(x, totals, cand_w, cand_a)
            if math.isfinite(new_ll) and new_ll >= ll:
                accepted = True
                break
            trial /= 2.0
        if not accepted:
            if not math.isfinite(new_ll):
                raise OptimizationFailureError(
                    "log-likelihood stayed non-finite under step halving")
            break
        log_w, log_a, resp = cand_w, cand_a, new_resp
        gain = new_ll - ll
        ll = new_ll
        hist.append(ll)
        step = min(trial * 2.0, 1.0)
        if gain <= tol:
            break

    return DmmFit(weights=np.exp(log_w - logsumexp(log_w)),
                  concentrations=np.exp(log_a), resp=resp,
                  loglik_history=hist)


def dirichlet_multinomial(mat: DocTermMatrix, k: int,
                          policy: MultiStartPolicy, max_iter: int = 100,
                          tol: float = 1e-7,
                          init_assignments=None) -> ClusterResult:
    """Multi-start Dirichlet-multinomial mixture; restarts ranked by BIC.

    The extra concentration scale per component lets it model overdispersed
    counts that a plain mixture of unigrams cannot.
    """
    x = _check_count_matrix(mat)
    n, m = x.shape
    if not 1 <= k <= n:
        raise ParameterError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(policy.seed)
    n_params = (k - 1) + k * m

    def run():
        for r in range(policy.restarts):
            if init_assignments is not None:
                labels0 = np.asarray(init_assignments[r], dtype=np.int64)
            else:
                labels0 = _init_assignment(rng, n, k)
            fit = dmm_ascent_single(x, labels0, k=k, max_iter=max_iter,
                                    tol=tol)
            yield _bic(fit.loglik, n_params, n), fit

    bic, fit = _best_restart(run())
    return ClusterResult(method=Method.DMM, k=k,
                         assignment=fit.resp.argmax(axis=1) + 1,
                         objective=bic, seed=policy.seed, soft=fit.resp)


# ---------------------------------------------------------------------------
# latent Dirichlet allocation
# ---------------------------------------------------------------------------

def lda_gibbs(mat: DocTermMatrix, k: int, iterations: int = 10000,
              burn_in: int = 5000, alpha: float = 0.1, beta: float = 0.05,
              seed: int = 0) -> ClusterResult:
    """Collapsed Gibbs LDA; documents are assigned their dominant topic.

    Real-valued cells are rounded to the nearest whole count (never below
    zero).  Topic mixtures are averaged over the post-burn-in samples; the
    objective is the joint log p(words, topics) at the final state.
    """
    if not (iterations > burn_in >= 0):
        raise ParameterError(
            f"need iterations > burn_in >= 0, got {iterations}, {burn_in}")
    if alpha <= 0 or beta <= 0:
        raise ParameterError("alpha and beta must be positive")
    counts = np.rint(mat.weights).astype(np.int64)
    counts[counts < 0] = 0
    n, m = counts.shape
    if not 1 <= k <= n:
        raise ParameterError(f"k must be in [1, {n}], got {k}")
    rowsums = counts.sum(axis=1)
    if np.any(rowsums == 0):
        bad = mat.doc_ids[int(np.argmin(rowsums))]
        raise DegenerateDocumentError(
            f"document rounds to zero tokens: {bad}")

    docs, words = np.nonzero(counts)
    reps = counts[docs, words]
    doc_of = np.repeat(docs, reps).astype(np.int64)
    word_of = np.repeat(words, reps).astype(np.int64)

    theta, n_dk, n_kw = kernels.lda_gibbs(
        doc_of, word_of, n, m, k, float(alpha), float(beta),
        int(iterations), int(burn_in), int(seed))

    objective = _lda_joint_loglik(n_dk, n_kw, alpha, beta)
    return ClusterResult(method=Method.LDA, k=k,
                         assignment=theta.argmax(axis=1) + 1,
                         objective=objective, seed=seed, soft=theta)


def _lda_joint_loglik(n_dk, n_kw, alpha: float, beta: float) -> float:
    k = n_dk.shape[1]
    m = n_kw.shape[1]
    n_d = n_dk.sum(axis=1)
    n_k = n_kw.sum(axis=1)
    ll = float((gammaln(k * alpha) - gammaln(n_d + k * alpha)
                + (gammaln(n_dk + alpha) - gammaln(alpha)).sum(axis=1)).sum())
    ll += float((gammaln(m * beta) - gammaln(n_k + m * beta)
                 + (gammaln(n_kw + beta) - gammaln(beta)).sum(axis=1)).sum())
    return ll
