"""Independent brute-force reference implementations used only by tests.

These are written against the textbook formulations (explicit coincidence
matrix, hash-counted n-grams, full-table recursive LCS) and deliberately share
no code with the package.
"""

from __future__ import annotations

from functools import lru_cache


# --- Krippendorff's alpha via explicit coincidence matrix ------------------------

def alpha_coincidence_oracle(rows, metric="ordinal"):
    """rows: raters x items, None = missing.  Raises ZeroDivisionError when degenerate."""
    n_items = max(len(r) for r in rows)
    units = []
    for c in range(n_items):
        vals = [r[c] for r in rows if c < len(r) and r[c] is not None]
        if len(vals) >= 2:
            units.append(vals)
    if not units:
        raise ZeroDivisionError("no pairable unit")

    values = sorted({v for u in units for v in u})
    pos = {v: i for i, v in enumerate(values)}
    k = len(values)

    coincidence = [[0.0] * k for _ in range(k)]
    for unit in units:
        m = len(unit)
        for i in range(m):
            for j in range(m):
                if i != j:
                    coincidence[pos[unit[i]]][pos[unit[j]]] += 1.0 / (m - 1)

    marginals = [sum(row) for row in coincidence]
    n = sum(marginals)

    def delta2(i, j):
        if i == j:
            return 0.0
        if metric == "nominal":
            return 1.0
        if metric == "interval":
            return float(values[i] - values[j]) ** 2
        lo, hi = min(i, j), max(i, j)
        span = sum(marginals[g] for g in range(lo, hi + 1)) - (marginals[lo] + marginals[hi]) / 2.0
        return span * span

    observed = sum(coincidence[i][j] * delta2(i, j)
                   for i in range(k) for j in range(k)) / n
    expected = sum(marginals[i] * marginals[j] * delta2(i, j)
                   for i in range(k) for j in range(k) if i != j) / (n * (n - 1))
    return 1.0 - observed / expected  # ZeroDivisionError when expected == 0


# --- ROUGE via hash-counted n-grams and recursive LCS ------------------------------

def ngram_counts(tokens, n):
    counts = {}
    for i in range(len(tokens) - n + 1):
        gram = tuple(tokens[i:i + n])
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def rouge_n_oracle(candidate, reference, n):
    cand = ngram_counts(candidate, n)
    ref = ngram_counts(reference, n)
    if not cand or not ref:
        return 0.0, 0.0, 0.0
    overlap = 0
    for gram, c in cand.items():
        overlap += min(c, ref.get(gram, 0))
    p = overlap / sum(cand.values())
    r = overlap / sum(ref.values())
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def lcs_oracle(a, b):
    a, b = tuple(a), tuple(b)

    @lru_cache(maxsize=None)
    def rec(i, j):
        if i == 0 or j == 0:
            return 0
        if a[i - 1] == b[j - 1]:
            return rec(i - 1, j - 1) + 1
        return max(rec(i - 1, j), rec(i, j - 1))

    result = rec(len(a), len(b))
    rec.cache_clear()
    return result


def rouge_l_oracle(candidate, reference):
    if not candidate or not reference:
        return 0.0, 0.0, 0.0
    lcs = lcs_oracle(candidate, reference)
    p = lcs / len(candidate)
    r = lcs / len(reference)
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f
