"""Hot numeric loops, each in a numba and a pure-numpy variant.

The ``*_nb`` functions are compiled with ``@njit`` when numba is available;
the ``*_np`` functions are vectorized numpy.  The public module-level name
points at whichever variant :mod:`risktext.accel` selected.  Both variants
implement the same algorithm with the same tie-breaking and the same
summation order, so label outputs match across paths (the Gibbs sampler
additionally shares its random stream with the jitted build, making whole
chains reproducible either way); each path on its own is fully
deterministic.

Label convention inside this module: clusters are 0..k-1 and trimmed points
are -1.  The public API in :mod:`risktext.cluster` shifts to 1..k with 0 for
trimmed.
"""

import numpy as np

from .accel import USE_NUMBA, njit

MAX_ITER_DEFAULT = 300


# ---------------------------------------------------------------------------
# k-means / trimmed k-means (Lloyd with concentration step)
# ---------------------------------------------------------------------------

@njit(cache=True)
def concentration_single_nb(points, centers0, n_trim, max_iter):
    n, d = points.shape
    k = centers0.shape[0]
    centers = centers0.copy()
    labels = np.full(n, -2, dtype=np.int64)
    new_labels = np.empty(n, dtype=np.int64)
    d2 = np.empty(n, dtype=np.float64)
    counts = np.empty(k, dtype=np.int64)
    n_iter = 0
    converged = False

    while n_iter < max_iter:
        n_iter += 1
        # assignment: nearest center, lowest index on ties
        for i in range(n):
            best = -1
            best_d = np.inf
            for c in range(k):
                dist = 0.0
                for j in range(d):
                    diff = points[i, j] - centers[c, j]
                    dist += diff * diff
                if dist < best_d:
                    best_d = dist
                    best = c
            new_labels[i] = best
            d2[i] = best_d

        # concentration step: discard the n_trim worst-fitting points,
        # larger distance first, lower index first on ties
        for _ in range(n_trim):
            worst = -1
            worst_d = -1.0
            for i in range(n):
                if new_labels[i] != -1 and d2[i] > worst_d:
                    worst_d = d2[i]
                    worst = i
            new_labels[worst] = -1

        # repair empty clusters from the retained point farthest from its
        # center; ties resolved toward the lowest index
        for c in range(k):
            cnt = 0
            for i in range(n):
                if new_labels[i] == c:
                    cnt += 1
            if cnt == 0:
                far = -1
                far_d = -1.0
                for i in range(n):
                    if new_labels[i] != -1 and d2[i] > far_d:
                        far_d = d2[i]
                        far = i
                new_labels[far] = c
                d2[far] = 0.0
                for j in range(d):
                    centers[c, j] = points[far, j]

        same = True
        for i in range(n):
            if new_labels[i] != labels[i]:
                same = False
            labels[i] = new_labels[i]
        if same:
            converged = True
            break

        # update step: mean of assigned retained points
        for c in range(k):
            counts[c] = 0
        for c in range(k):
            for j in range(d):
                centers[c, j] = 0.0
        for i in range(n):
            c = labels[i]
            if c >= 0:
                counts[c] += 1
                for j in range(d):
                    centers[c, j] += points[i, j]
        for c in range(k):
            if counts[c] > 0:
                for j in range(d):
                    centers[c, j] /= counts[c]

    objective = 0.0
    for i in range(n):
        if labels[i] != -1:
            objective += d2[i]
    return labels, centers, objective, n_iter, converged


def concentration_single_np(points, centers0, n_trim, max_iter):
    n, d = points.shape
    k = centers0.shape[0]
    centers = centers0.copy()
    labels = np.full(n, -2, dtype=np.int64)
    idx = np.arange(n)
    n_iter = 0
    converged = False

    while n_iter < max_iter:
        n_iter += 1
        diff = points[:, None, :] - centers[None, :, :]
        dist = np.cumsum(diff * diff, axis=2)[:, :, -1]
        new_labels = dist.argmin(axis=1)
        d2 = dist[idx, new_labels]

        if n_trim > 0:
            order = np.lexsort((idx, -d2))
            new_labels[order[:n_trim]] = -1

        # count per cluster is re-checked inside the loop because a repair
        # may have stolen the sole member of a later cluster
        for c in range(k):
            if np.count_nonzero(new_labels == c) > 0:
                continue
            masked = np.where(new_labels != -1, d2, -np.inf)
            far = int(masked.argmax())
            new_labels[far] = c
            d2[far] = 0.0
            centers[c] = points[far]

        if np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels.copy()

        retained = labels >= 0
        counts = np.bincount(labels[retained], minlength=k)
        for j in range(d):
            sums = np.bincount(labels[retained], weights=points[retained, j],
                               minlength=k)
            centers[:, j] = np.where(counts > 0, sums / np.maximum(counts, 1),
                                     centers[:, j])

    objective = 0.0
    for i in range(n):
        if labels[i] != -1:
            objective += d2[i]
    return labels, centers, objective, n_iter, converged


# ---------------------------------------------------------------------------
# spherical k-means (unit vectors, cosine distance)
# ---------------------------------------------------------------------------

@njit(cache=True)
def spherical_single_nb(points, centers0, max_iter):
    n, d = points.shape
    k = centers0.shape[0]
    centers = centers0.copy()
    labels = np.full(n, -2, dtype=np.int64)
    new_labels = np.empty(n, dtype=np.int64)
    cdist = np.empty(n, dtype=np.float64)
    n_iter = 0
    converged = False

    while n_iter < max_iter:
        n_iter += 1
        for i in range(n):
            best = -1
            best_d = np.inf
            for c in range(k):
                dot = 0.0
                for j in range(d):
                    dot += points[i, j] * centers[c, j]
                dist = 1.0 - dot
                if dist < best_d:
                    best_d = dist
                    best = c
            new_labels[i] = best
            cdist[i] = best_d

        same = True
        for i in range(n):
            if new_labels[i] != labels[i]:
                same = False
            labels[i] = new_labels[i]
        if same:
            converged = True
            break

        for c in range(k):
            # mean direction of the assigned points
            norm = 0.0
            mean = np.zeros(d, dtype=np.float64)
            cnt = 0
            for i in range(n):
                if labels[i] == c:
                    cnt += 1
                    for j in range(d):
                        mean[j] += points[i, j]
            if cnt > 0:
                for j in range(d):
                    norm += mean[j] * mean[j]
                norm = np.sqrt(norm)
            if cnt == 0 or norm == 0.0:
                # empty (or fully cancelling) cluster: reseed from the point
                # farthest from its current center
                far = -1
                far_d = -1.0
                for i in range(n):
                    if cdist[i] > far_d:
                        far_d = cdist[i]
                        far = i
                for j in range(d):
                    centers[c, j] = points[far, j]
                labels[far] = c
                cdist[far] = 0.0
            else:
                for j in range(d):
                    centers[c, j] = mean[j] / norm

    objective = 0.0
    for i in range(n):
        objective += cdist[i]
    return labels, centers, objective, n_iter, converged


def spherical_single_np(points, centers0, max_iter):
    n, d = points.shape
    k = centers0.shape[0]
    centers = centers0.copy()
    labels = np.full(n, -2, dtype=np.int64)
    idx = np.arange(n)
    n_iter = 0
    converged = False

    while n_iter < max_iter:
        n_iter += 1
        dist = 1.0 - np.cumsum(points[:, None, :] * centers[None, :, :],
                               axis=2)[:, :, -1]
        new_labels = dist.argmin(axis=1)
        cdist = dist[idx, new_labels]

        if np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels.copy()

        # membership is recomputed per cluster because a repair may steal a
        # point from a cluster processed later; cumsum keeps the summation
        # order identical to the jitted loop
        for c in range(k):
            members = np.flatnonzero(labels == c)
            norm = 0.0
            if members.size > 0:
                mean = np.cumsum(points[members], axis=0)[-1]
                norm = float(np.sqrt(np.cumsum(mean * mean)[-1]))
            if members.size == 0 or norm == 0.0:
                far = int(cdist.argmax())
                centers[c] = points[far]
                labels[far] = c
                cdist[far] = 0.0
            else:
                centers[c] = mean / norm

    objective = float(np.cumsum(cdist)[-1])
    return labels, centers, objective, n_iter, converged


# ---------------------------------------------------------------------------
# collapsed Gibbs sampler for LDA
# ---------------------------------------------------------------------------

@njit(cache=True)
def lda_gibbs_nb(doc_of, word_of, n_docs, n_terms, k, alpha, beta,
                 iterations, burn_in, seed):
    np.random.seed(seed)
    total = doc_of.shape[0]
    z = np.empty(total, dtype=np.int64)
    n_dk = np.zeros((n_docs, k), dtype=np.int64)
    n_kw = np.zeros((k, n_terms), dtype=np.int64)
    n_k = np.zeros(k, dtype=np.int64)
    n_d = np.zeros(n_docs, dtype=np.int64)

    for t in range(total):
        topic = int(np.random.random() * k)
        if topic == k:
            topic = k - 1
        z[t] = topic
        n_dk[doc_of[t], topic] += 1
        n_kw[topic, word_of[t]] += 1
        n_k[topic] += 1
        n_d[doc_of[t]] += 1

    prob = np.empty(k, dtype=np.float64)
    theta_sum = np.zeros((n_docs, k), dtype=np.float64)
    mbeta = n_terms * beta
    kalpha = k * alpha
    n_samples = 0

    for it in range(iterations):
        for t in range(total):
            doc = doc_of[t]
            word = word_of[t]
            old = z[t]
            n_dk[doc, old] -= 1
            n_kw[old, word] -= 1
            n_k[old] -= 1

            acc = 0.0
            for c in range(k):
                acc += (n_dk[doc, c] + alpha) * (n_kw[c, word] + beta) \
                    / (n_k[c] + mbeta)
                prob[c] = acc
            u = np.random.random() * acc
            new = 0
            while prob[new] < u and new < k - 1:
                new += 1

            z[t] = new
            n_dk[doc, new] += 1
            n_kw[new, word] += 1
            n_k[new] += 1

        if it >= burn_in:
            n_samples += 1
            for doc in range(n_docs):
                denom = n_d[doc] + kalpha
                for c in range(k):
                    theta_sum[doc, c] += (n_dk[doc, c] + alpha) / denom

    theta = theta_sum / n_samples
    return theta, n_dk, n_kw


def lda_gibbs_np(doc_of, word_of, n_docs, n_terms, k, alpha, beta,
                 iterations, burn_in, seed):
    # Same chain as the jitted version: numba's in-kernel generator is the
    # MT19937 stream of RandomState, so draws (and therefore assignments)
    # match it bitwise.
    rs = np.random.RandomState(seed)
    total = doc_of.shape[0]
    z = np.empty(total, dtype=np.int64)
    n_dk = np.zeros((n_docs, k), dtype=np.int64)
    n_kw = np.zeros((k, n_terms), dtype=np.int64)
    n_k = np.zeros(k, dtype=np.int64)

    for t in range(total):
        topic = min(int(rs.random_sample() * k), k - 1)
        z[t] = topic
        n_dk[doc_of[t], topic] += 1
        n_kw[topic, word_of[t]] += 1
        n_k[topic] += 1
    n_d = np.bincount(doc_of, minlength=n_docs)

    prob = np.empty(k)
    theta_sum = np.zeros((n_docs, k))
    mbeta = n_terms * beta
    kalpha = k * alpha
    n_samples = 0

    for it in range(iterations):
        for t in range(total):
            doc = doc_of[t]
            word = word_of[t]
            old = z[t]
            n_dk[doc, old] -= 1
            n_kw[old, word] -= 1
            n_k[old] -= 1

            acc = 0.0
            for c in range(k):
                acc += (n_dk[doc, c] + alpha) * (n_kw[c, word] + beta) \
                    / (n_k[c] + mbeta)
                prob[c] = acc
            u = rs.random_sample() * acc
            new = 0
            while prob[new] < u and new < k - 1:
                new += 1

            z[t] = new
            n_dk[doc, new] += 1
            n_kw[new, word] += 1
            n_k[new] += 1

        if it >= burn_in:
            n_samples += 1
            theta_sum += (n_dk + alpha) / (n_d[:, None] + kalpha)

    return theta_sum / n_samples, n_dk, n_kw


# ---------------------------------------------------------------------------
# semantic adjustment of a document-term matrix
# ---------------------------------------------------------------------------

@njit(cache=True)
def semantic_adjust_nb(weights, sim):
    n, m = weights.shape
    out = weights.copy()
    nz = np.empty(m, dtype=np.int64)
    for i in range(n):
        p = 0
        for j in range(m):
            if weights[i, j] > 0.0:
                nz[p] = j
                p += 1
        if p == 0:
            continue
        for j in range(m):
            if weights[i, j] > 0.0:
                continue
            # donor = present word most similar to j; ties prefer the larger
            # original cell, then the lower column index
            best_s = 0.0
            best_v = 0.0
            best_c = -1
            for q in range(p):
                c = nz[q]
                s = sim[j, c]
                if s > best_s or (s == best_s and s > 0.0
                                  and weights[i, c] > best_v):
                    best_s = s
                    best_v = weights[i, c]
                    best_c = c
            if best_c >= 0:
                out[i, j] = weights[i, best_c] * best_s
    return out


def semantic_adjust_np(weights, sim):
    n, m = weights.shape
    out = weights.copy()
    for i in range(n):
        row = weights[i]
        nz = np.flatnonzero(row > 0.0)
        if nz.size == 0:
            continue
        zero = np.flatnonzero(row == 0.0)
        if zero.size == 0:
            continue
        s = sim[np.ix_(zero, nz)]
        best_s = s.max(axis=1)
        vals = np.where(s == best_s[:, None], row[nz][None, :], -1.0)
        best_v = vals.max(axis=1)
        donor = nz[(vals == best_v[:, None]).argmax(axis=1)]
        fill = best_s > 0.0
        out[i, zero[fill]] = row[donor[fill]] * best_s[fill]
    return out


# ---------------------------------------------------------------------------
# silhouette widths (Euclidean)
# ---------------------------------------------------------------------------

@njit(cache=True)
def silhouette_nb(points, labels, k):
    n, d = points.shape
    counts = np.zeros(k, dtype=np.int64)
    for i in range(n):
        if labels[i] >= 0:
            counts[labels[i]] += 1
    sil = np.zeros(n, dtype=np.float64)
    dsum = np.empty(k, dtype=np.float64)

    for i in range(n):
        li = labels[i]
        if li < 0 or counts[li] <= 1:
            continue
        for c in range(k):
            dsum[c] = 0.0
        for j in range(n):
            lj = labels[j]
            if lj < 0 or j == i:
                continue
            dist = 0.0
            for t in range(d):
                diff = points[i, t] - points[j, t]
                dist += diff * diff
            dsum[lj] += np.sqrt(dist)
        a = dsum[li] / (counts[li] - 1)
        b = np.inf
        for c in range(k):
            if c != li and counts[c] > 0:
                mean = dsum[c] / counts[c]
                if mean < b:
                    b = mean
        denom = a if a > b else b
        if denom > 0.0:
            sil[i] = (b - a) / denom
    return sil


def silhouette_np(points, labels, k):
    n = points.shape[0]
    counts = np.bincount(labels[labels >= 0], minlength=k)
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    sil = np.zeros(n)

    members = [np.flatnonzero(labels == c) for c in range(k)]
    for i in range(n):
        li = labels[i]
        if li < 0 or counts[li] <= 1:
            continue
        a = (dist[i, members[li]].sum()) / (counts[li] - 1)
        b = np.inf
        for c in range(k):
            if c != li and counts[c] > 0:
                b = min(b, dist[i, members[c]].sum() / counts[c])
        denom = max(a, b)
        if denom > 0.0:
            sil[i] = (b - a) / denom
    return sil


if USE_NUMBA:
    concentration_single = concentration_single_nb
    spherical_single = spherical_single_nb
    lda_gibbs = lda_gibbs_nb
    semantic_adjust_matrix = semantic_adjust_nb
    silhouette_samples = silhouette_nb
else:
    concentration_single = concentration_single_np
    spherical_single = spherical_single_np
    lda_gibbs = lda_gibbs_np
    semantic_adjust_matrix = semantic_adjust_np
    silhouette_samples = silhouette_np
