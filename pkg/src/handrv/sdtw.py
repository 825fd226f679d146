"""Subsequence dynamic time warping over delta sequences.

``sdtw_match`` aligns a whole query sequence against the best contiguous
window of a reference sequence: the accumulation matrix gives every
reference position a free start (row 0 is all zeros) and the answer is the
cheapest cell in the last row. Local distance is the Euclidean distance
between elements, which may be 2D motion deltas or higher-dimensional
feature vectors.

``sdtw_oracle`` is an independent check: it evaluates the classical
both-ends-pinned DTW over every window ``r[s:e]`` and takes the minimum.
``sdtw_banded`` is a pruned variant for long references.

Tie handling is fixed so results are reproducible anywhere: the match end is
the smallest minimizing column, the oracle prefers the smallest end then the
smallest start, and traceback prefers the diagonal predecessor, then the
vertical one, then the horizontal one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DegeneratePathError, InfeasibleBandError


@dataclass(frozen=True)
class MatchResult:
    """Alignment cost plus the matched reference window [start, end)."""

    cost: float
    start: int
    end: int


def _as_sequence(x, name: str) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise DegeneratePathError(f"{name}: empty or malformed sequence")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name}: sequence contains non-finite values")
    return arr


def _check_pair(q, r):
    q = _as_sequence(q, "query")
    r = _as_sequence(r, "reference")
    if q.shape[1] != r.shape[1]:
        raise ValueError(
            f"element dimensions differ: query {q.shape[1]} vs reference {r.shape[1]}"
        )
    return q, r


@njit(cache=True, nogil=True)
def _dist(q, r, i, j):
    acc = 0.0
    for k in range(q.shape[1]):
        diff = q[i, k] - r[j, k]
        acc += diff * diff
    return np.sqrt(acc)


@njit(cache=True, nogil=True)
def _accumulate_free_start(q, r):
    m, n = q.shape[0], r.shape[0]
    D = np.empty((m + 1, n + 1))
    D[0, :] = 0.0
    for i in range(1, m + 1):
        D[i, 0] = np.inf
        for j in range(1, n + 1):
            best = D[i - 1, j - 1]
            if D[i - 1, j] < best:
                best = D[i - 1, j]
            if D[i, j - 1] < best:
                best = D[i, j - 1]
            D[i, j] = _dist(q, r, i - 1, j - 1) + best
    return D


@njit(cache=True, nogil=True)
def _sdtw_kernel(q, r):
    m, n = q.shape[0], r.shape[0]
    D = _accumulate_free_start(q, r)
    jstar = 1
    cost = D[m, 1]
    for j in range(2, n + 1):
        if D[m, j] < cost:
            cost = D[m, j]
            jstar = j
    # Traceback with diagonal > vertical > horizontal preference. Row 0 is
    # all zeros, so once the walk reaches row 1 the diagonal wins and the
    # window start is that column minus one.
    i, j = m, jstar
    while i > 1:
        diag = D[i - 1, j - 1]
        vert = D[i - 1, j]
        horiz = D[i, j - 1]
        best = diag
        if vert < best:
            best = vert
        if horiz < best:
            best = horiz
        if diag == best:
            i -= 1
            j -= 1
        elif vert == best:
            i -= 1
        else:
            j -= 1
    return cost, j - 1, jstar


@njit(cache=True, nogil=True)
def _dtw_full_kernel(q, r):
    m, n = q.shape[0], r.shape[0]
    D = np.empty((m + 1, n + 1))
    D[0, 0] = 0.0
    for j in range(1, n + 1):
        D[0, j] = np.inf
    for i in range(1, m + 1):
        D[i, 0] = np.inf
        for j in range(1, n + 1):
            best = D[i - 1, j - 1]
            if D[i - 1, j] < best:
                best = D[i - 1, j]
            if D[i, j - 1] < best:
                best = D[i, j - 1]
            D[i, j] = _dist(q, r, i - 1, j - 1) + best
    return D[m, n]


@njit(cache=True, nogil=True)
def _oracle_kernel(q, r):
    # For a fixed start s, one pinned-start DP over r[s:] yields the full-DTW
    # cost of every window r[s:e] as its last-row prefix values, so all
    # O(n^2) windows cost O(n) DPs instead of O(n^2).
    m, n = q.shape[0], r.shape[0]
    best_cost = np.inf
    best_s = -1
    best_e = -1
    for s in range(n):
        w = n - s
        D = np.empty((m + 1, w + 1))
        D[0, 0] = 0.0
        for j in range(1, w + 1):
            D[0, j] = np.inf
        for i in range(1, m + 1):
            D[i, 0] = np.inf
            for j in range(1, w + 1):
                best = D[i - 1, j - 1]
                if D[i - 1, j] < best:
                    best = D[i - 1, j]
                if D[i, j - 1] < best:
                    best = D[i, j - 1]
                D[i, j] = _dist(q, r, i - 1, s + j - 1) + best
        for j in range(1, w + 1):
            c = D[m, j]
            e = s + j
            if c < best_cost or (
                c == best_cost and (e < best_e or (e == best_e and s < best_s))
            ):
                best_cost = c
                best_s = s
                best_e = e
    return best_cost, best_s, best_e


@njit(cache=True, nogil=True)
def _banded_kernel(q, r, band):
    # Free-start DP where every cell carries the column its alignment entered
    # row 1 at (its anchor); cells drifting more than `band` off the anchored
    # diagonal are pruned.
    m, n = q.shape[0], r.shape[0]
    D = np.full((m + 1, n + 1), np.inf)
    A = np.full((m + 1, n + 1), -1, dtype=np.int64)
    for j in range(n + 1):
        D[0, j] = 0.0
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            best = np.inf
            anchor = -1
            # diagonal
            if i == 1:
                cand_anchor = j - 1
                if abs(i - (j - cand_anchor)) <= band:
                    best = 0.0
                    anchor = cand_anchor
            else:
                cand_anchor = A[i - 1, j - 1]
                if cand_anchor >= 0 and D[i - 1, j - 1] < best:
                    if abs(i - (j - cand_anchor)) <= band:
                        best = D[i - 1, j - 1]
                        anchor = cand_anchor
            # vertical
            if i == 1:
                cand = 0.0
                cand_anchor = j - 1
            else:
                cand = D[i - 1, j]
                cand_anchor = A[i - 1, j]
            if cand_anchor >= 0 and cand < best and abs(i - (j - cand_anchor)) <= band:
                best = cand
                anchor = cand_anchor
            # horizontal
            cand = D[i, j - 1]
            cand_anchor = A[i, j - 1]
            if cand_anchor >= 0 and cand < best and abs(i - (j - cand_anchor)) <= band:
                best = cand
                anchor = cand_anchor
            if anchor >= 0:
                D[i, j] = _dist(q, r, i - 1, j - 1) + best
                A[i, j] = anchor
    jstar = -1
    cost = np.inf
    for j in range(1, n + 1):
        if D[m, j] < cost:
            cost = D[m, j]
            jstar = j
    if jstar < 0:
        return np.inf, -1, -1
    return cost, A[m, jstar], jstar


def sdtw_match(q, r) -> MatchResult:
    """Best alignment of the whole query to any contiguous reference window.

    Args:
        q: query sequence, (m, d) array of elements (m >= 1).
        r: reference sequence, (n, d) array (n >= 1); n may be < m.

    Returns:
        MatchResult with the cumulative cost and window [start, end).
    """
    q, r = _check_pair(q, r)
    cost, start, end = _sdtw_kernel(q, r)
    return MatchResult(cost=float(cost), start=int(start), end=int(end))


def dtw_full(q, r) -> float:
    """Classical DTW cost with both endpoints pinned."""
    q, r = _check_pair(q, r)
    return float(_dtw_full_kernel(q, r))


def sdtw_oracle(q, r) -> MatchResult:
    """Exhaustive window search; slow but independent of the free-start DP.

    Evaluates ``dtw_full(q, r[s:e])`` for every ``0 <= s < e <= len(r)``
    (sharing work across windows with a common start) and returns the
    minimum, preferring the smallest end and then the smallest start.
    """
    q, r = _check_pair(q, r)
    cost, start, end = _oracle_kernel(q, r)
    return MatchResult(cost=float(cost), start=int(start), end=int(end))


def sdtw_banded(q, r, band: int) -> MatchResult:
    """Banded variant: prunes cells far from each alignment's own diagonal.

    The returned cost is >= the unconstrained cost; with
    ``band >= max(len(q), len(r))`` the constraint is inactive and the result
    is identical to :func:`sdtw_match`.

    Raises:
        InfeasibleBandError: the band admits no alignment at all (query much
            longer than the reference allows within the band).
    """
    if band < 1:
        raise ValueError(f"band must be >= 1, got {band}")
    q, r = _check_pair(q, r)
    if band >= max(q.shape[0], r.shape[0]):
        return sdtw_match(q, r)
    cost, start, end = _banded_kernel(q, r, band)
    if end < 0:
        raise InfeasibleBandError(
            f"band {band} admits no alignment of a length-{q.shape[0]} query "
            f"inside a length-{r.shape[0]} reference"
        )
    return MatchResult(cost=float(cost), start=int(start), end=int(end))
