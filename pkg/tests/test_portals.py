import random
from fractions import Fraction

import numpy as np
import pytest

from planor.errors import EmptyCandidateSet
from planor.portals import (
    PathCandidates,
    PortalGroup,
    covering_violations,
    multipass_portals,
    thorup_portals,
)


def make_path(positions, verts=None):
    pos = np.asarray(positions, dtype=np.float64)
    if verts is None:
        verts = np.arange(len(pos), dtype=np.int64)
    return PathCandidates(pos, np.asarray(verts, dtype=np.int64))


def dominating_dists(rng, pos, anchor, max_noise=20):
    # |pos - anchor| + noise dominates pairwise path distances
    return np.array([abs(p - anchor) + rng.randint(0, max_noise) for p in pos],
                    dtype=np.float64)


def best_through_candidate(dist, pos, v_pos):
    return min(d + abs(p - v_pos) for d, p in zip(dist, pos))


def test_single_candidate_is_sole_portal():
    path = make_path([5.0], verts=[42])
    ps = thorup_portals([3.0], path, Fraction(1, 2))
    assert list(ps.verts) == [42]
    assert list(ps.dist) == [3.0]


def test_all_infinite_raises():
    path = make_path([0.0, 1.0])
    with pytest.raises(EmptyCandidateSet):
        thorup_portals([float("inf")] * 2, path, Fraction(1))


def test_source_on_unit_path():
    # source at position 4 of a 9-vertex unit path, dist = d_Q, eps = 1:
    # the threshold never fires, so portals are the source and both ends
    path = make_path(range(9))
    dist = np.abs(path.pos - 4.0)
    ps = thorup_portals(dist, path, Fraction(1))
    assert list(ps.verts) == [0, 4, 8]
    assert covering_violations(ps, path, dist, dist, Fraction(1)) == 0


def test_zero_distance_source_small_set():
    rng = random.Random(9)
    for _ in range(50):
        L = rng.randint(1, 40)
        pos = np.cumsum([rng.randint(1, 5) for _ in range(L)]).astype(float)
        a = pos[rng.randrange(L)]
        dist = np.abs(pos - a)  # dist at the anchor is 0
        ps = thorup_portals(dist, make_path(pos), Fraction(1, 4))
        assert len(ps) <= 4  # degenerate case stays constant-size


def test_size_bound_and_covering_random():
    rng = random.Random(31337)
    for eps in (Fraction(1), Fraction(1, 2), Fraction(1, 4)):
        for trial in range(60):
            L = rng.randint(1, 50)
            pos = np.cumsum([rng.randint(1, 9) for _ in range(L)]).astype(float)
            anchor = pos[rng.randrange(L)] + rng.randint(-5, 5)
            dist = dominating_dists(rng, pos, anchor)
            path = make_path(pos)
            ps = thorup_portals(dist, path, eps)
            assert len(ps) <= 4 / eps + 4
            # covering vs the best candidate route, exhaustively over Q
            for v_pos in np.linspace(pos[0], pos[-1], 40):
                best = best_through_candidate(dist, pos, v_pos)
                through = min(ps.dist[k] + abs(ps.pos[k] - v_pos)
                              for k in range(len(ps)))
                assert through <= (1 + float(eps)) * best * (1 + 1e-12)


def test_portal_positions_strictly_increase():
    rng = random.Random(4)
    for _ in range(40):
        L = rng.randint(2, 60)
        pos = np.cumsum([rng.randint(1, 4) for _ in range(L)]).astype(float)
        dist = dominating_dists(rng, pos, float(pos[0]))
        ps = thorup_portals(dist, make_path(pos), Fraction(1, 3))
        assert np.all(np.diff(ps.pos) > 0)


def split_into_groups(rng, n, k):
    idxs = list(range(n))
    rng.shuffle(idxs)
    groups = []
    at = 0
    for i in range(k):
        size = rng.randint(0, max(1, (n - at) // max(1, k - i)))
        part = sorted(idxs[at:at + size])
        at += size
        if part:
            groups.append(PortalGroup(np.array(part, dtype=np.int64)))
    rest = sorted(idxs[at:])
    if rest:
        groups.append(PortalGroup(np.array(rest, dtype=np.int64)))
    return groups


def test_multipass_single_group_singleton():
    path = make_path([3.0], verts=[7])
    got = multipass_portals([PortalGroup(np.array([0]))], [2.0], path, Fraction(1, 2))
    assert list(got.verts) == [7]


def test_multipass_equals_thorup_randomized():
    rng = random.Random(777)
    for trial in range(200):
        L = rng.randint(1, 60)
        pos = np.cumsum([rng.randint(1, 7) for _ in range(L)]).astype(float)
        anchor = pos[rng.randrange(L)] + rng.randint(-4, 4)
        dist = dominating_dists(rng, pos, anchor)
        if rng.random() < 0.2:
            dist[rng.randrange(L)] = float("inf")
        if not np.any(np.isfinite(dist)):
            continue
        path = make_path(pos)
        eps = rng.choice([Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)])
        groups = split_into_groups(rng, L, rng.randint(1, 6))
        direct = thorup_portals(dist, path, eps)
        merged = multipass_portals(groups, dist, path, eps)
        assert list(direct.idx) == list(merged.idx)


def test_multipass_pass_budget():
    rng = random.Random(12)
    for trial in range(50):
        L = rng.randint(2, 50)
        pos = np.cumsum([rng.randint(1, 6) for _ in range(L)]).astype(float)
        dist = dominating_dists(rng, pos, float(pos[-1]))
        path = make_path(pos)
        groups = split_into_groups(rng, L, 4)
        counter = []
        got = multipass_portals(groups, dist, path, Fraction(1, 2),
                                pass_counter=counter)
        assert len(counter) <= len(got) + 2
