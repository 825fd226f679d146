import itertools

import numpy as np
import pytest

from handrv.errors import DegeneratePathError, InfeasibleBandError
from handrv.sdtw import dtw_full, sdtw_banded, sdtw_match, sdtw_oracle


def enumerate_alignment_cost(q, r):
    """Brute-force reference for dtw_full: minimum over all monotone warping
    paths from (0, 0) to (m-1, n-1), enumerated recursively."""
    q = np.asarray(q, dtype=float)
    r = np.asarray(r, dtype=float)

    def dist(i, j):
        return float(np.linalg.norm(q[i] - r[j]))

    def walk(i, j):
        if i == 0 and j == 0:
            return dist(0, 0)
        best = np.inf
        if i > 0 and j > 0:
            best = min(best, walk(i - 1, j - 1))
        if i > 0:
            best = min(best, walk(i - 1, j))
        if j > 0:
            best = min(best, walk(i, j - 1))
        return dist(i, j) + best

    return walk(len(q) - 1, len(r) - 1)


def windows_by_literal_dtw(q, r):
    """Literal oracle definition: dtw_full over every window, lexicographic
    (cost, end, start) minimum."""
    n = len(r)
    best = None
    for e in range(1, n + 1):
        for s in range(e):
            key = (dtw_full(q, r[s:e]), e, s)
            if best is None or key < best:
                best = key
    return best[0], best[2], best[1]


def random_instance(rng, max_q=8, max_r=16):
    m = int(rng.integers(1, max_q + 1))
    n = int(rng.integers(1, max_r + 1))
    return rng.uniform(-1, 1, (m, 2)), rng.uniform(-1, 1, (n, 2))


class TestSdtwMatch:
    def test_self_match_distinct_deltas(self):
        q = np.array([[1.0, 0.0], [0.0, 1.0], [2.0, 2.0], [-1.0, 0.5]])
        res = sdtw_match(q, q)
        assert (res.cost, res.start, res.end) == (0.0, 0, 4)

    def test_embedded_copy_found(self):
        # oracle-computed: the smallest-end tie-break stops the zero-cost
        # window at [1, 2) because both query deltas can warp onto one
        # reference element
        q = np.array([[1.0, 0.0], [1.0, 0.0]])
        r = np.array([[0.0, 1.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        res = sdtw_match(q, r)
        assert (res.cost, res.start, res.end) == (0.0, 1, 2)
        assert sdtw_oracle(q, r) == res

    def test_single_element_query(self):
        res = sdtw_match(np.array([[3.0, 4.0]]), np.zeros((2, 2)))
        assert (res.cost, res.start, res.end) == (5.0, 0, 1)

    def test_constant_path_self_match_stops_early(self):
        q = np.zeros((3, 2))
        res = sdtw_match(q, q)
        assert (res.cost, res.start, res.end) == (0.0, 0, 1)
        assert sdtw_oracle(q, q) == res

    def test_query_longer_than_reference(self):
        q = np.array([[1.0, 0.0]] * 5)
        r = np.array([[1.0, 0.0]] * 2)
        assert sdtw_match(q, r).cost == 0.0

    def test_empty_inputs_rejected(self):
        with pytest.raises(DegeneratePathError):
            sdtw_match(np.zeros((0, 2)), np.zeros((3, 2)))
        with pytest.raises(DegeneratePathError):
            sdtw_match(np.zeros((3, 2)), np.zeros((0, 2)))

    def test_zero_cost_implies_zero_local_distances(self, rng):
        for _ in range(20):
            q, r = random_instance(rng)
            res = sdtw_match(q, r)
            assert res.cost >= 0.0
            assert 0 <= res.start < res.end <= len(r)


class TestDtwFull:
    def test_identity(self):
        q = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert dtw_full(q, q) == 0.0

    def test_single_pair(self):
        assert dtw_full(np.array([[1.0, 0.0]]), np.array([[0.0, 0.0]])) == 1.0

    def test_repeated_element_alignment(self):
        q = np.array([[1.0, 0.0], [0.0, 1.0]])
        r = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        assert dtw_full(q, r) == 0.0

    def test_matches_exhaustive_enumeration(self, rng):
        for _ in range(40):
            q = rng.uniform(-1, 1, (int(rng.integers(1, 5)), 2))
            r = rng.uniform(-1, 1, (int(rng.integers(1, 5)), 2))
            assert dtw_full(q, r) == pytest.approx(enumerate_alignment_cost(q, r), abs=1e-12)


class TestOracle:
    def test_shared_prefix_dp_equals_literal_windows(self, rng):
        # the oracle shares DP work across windows with a common start; check
        # it against the literal per-window definition on small instances
        for _ in range(30):
            q, r = random_instance(rng, max_q=5, max_r=8)
            res = sdtw_oracle(q, r)
            cost, start, end = windows_by_literal_dtw(q, r)
            assert res.cost == pytest.approx(cost, abs=1e-12)
            assert (res.start, res.end) == (start, end)

    def test_single_element_reference(self):
        res = sdtw_oracle(np.array([[1.0, 1.0]]), np.array([[1.0, 1.0]]))
        assert (res.cost, res.start, res.end) == (0.0, 0, 1)

    def test_oracle_equivalence_random(self, rng):
        for _ in range(200):
            q, r = random_instance(rng, max_q=12, max_r=30)
            a = sdtw_match(q, r)
            b = sdtw_oracle(q, r)
            assert abs(a.cost - b.cost) <= 1e-9
            assert (a.start, a.end) == (b.start, b.end)


class TestProperties:
    def test_monotone_concatenation(self, rng):
        for _ in range(30):
            q, r = random_instance(rng)
            extra = rng.uniform(-1, 1, (int(rng.integers(1, 6)), 2))
            cost_before = sdtw_match(q, r).cost
            cost_after = sdtw_match(q, np.vstack([r, extra])).cost
            assert cost_after <= cost_before

    def test_scale_equivariance_power_of_two_exact(self, rng):
        q, r = random_instance(rng, max_q=6, max_r=12)
        base = sdtw_match(q, r)
        for s in (2.0, 0.5, 4.0):
            scaled = sdtw_match(q * s, r * s)
            assert scaled.cost == base.cost * s
            assert (scaled.start, scaled.end) == (base.start, base.end)

    def test_scale_equivariance_general(self, rng):
        q, r = random_instance(rng, max_q=6, max_r=12)
        base = sdtw_match(q, r)
        for s in (1.7, 0.123, 31.4):
            scaled = sdtw_match(q * s, r * s)
            assert scaled.cost == pytest.approx(base.cost * s, rel=1e-12)


class TestBanded:
    def test_wide_band_identical(self, rng):
        for _ in range(20):
            q, r = random_instance(rng)
            band = max(len(q), len(r))
            assert sdtw_banded(q, r, band) == sdtw_match(q, r)

    def test_diagonal_fits_any_band(self):
        q = np.array([[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]])
        res = sdtw_banded(q, q, band=1)
        assert res.cost == 0.0

    def test_narrow_band_never_cheaper(self, rng):
        for _ in range(40):
            q, r = random_instance(rng)
            band = int(rng.integers(1, 4))
            free = sdtw_match(q, r).cost
            try:
                banded = sdtw_banded(q, r, band).cost
            except InfeasibleBandError:
                continue
            assert banded >= free or banded == pytest.approx(free, abs=1e-12)

    def test_adversarial_band_strictly_worse(self):
        # the cheapest alignment climbs three cells up one column, which
        # band=1 forbids; the surviving in-band detour passes the far point x
        a, b, x = [0.0, 0.0], [5.0, 5.0], [100.0, 100.0]
        q = np.array([a, a, a, b])
        r = np.array([a, x, b])
        free = sdtw_match(q, r)
        assert free.cost == sdtw_oracle(q, r).cost
        banded = sdtw_banded(q, r, band=1)
        assert banded.cost > free.cost

    def test_infeasible_band_raises(self):
        q = np.zeros((10, 2))
        r = np.ones((1, 2))
        with pytest.raises(InfeasibleBandError):
            sdtw_banded(q, r, band=1)

    def test_band_parameter_validated(self):
        with pytest.raises(ValueError):
            sdtw_banded(np.zeros((2, 2)), np.zeros((2, 2)), band=0)


class TestHigherDimensions:
    def test_feature_vectors_supported(self, rng):
        q = rng.normal(0, 1, (6, 16))
        r = np.vstack([rng.normal(0, 1, (4, 16)), q, rng.normal(0, 1, (3, 16))])
        res = sdtw_match(q, r)
        assert (res.cost, res.start, res.end) == (0.0, 4, 10)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="dimension"):
            sdtw_match(np.zeros((2, 2)), np.zeros((2, 3)))
