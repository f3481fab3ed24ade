import random

import numpy as np

from planor.graph_core import REAL, EmbeddedPlanarGraph
from planor.sssp import dfs_order, shortest_path_tree, tree_distance

from conftest import build_grid, build_random_triangulation, dijkstra_reference


def bellman_ford(g, s):
    dist = [float("inf")] * g.n
    dist[s] = 0
    edges = [(g.eu[e], g.ev[e], g.ew[e]) for e in range(g.m) if g.kind[e] == REAL]
    for _ in range(g.n):
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
            if dist[v] + w < dist[u]:
                dist[u] = dist[v] + w
                changed = True
        if not changed:
            break
    return dist


def test_path_distances():
    g = EmbeddedPlanarGraph(3)
    e0 = g.add_edge(0, 1, 2, REAL)
    e1 = g.add_edge(1, 2, 3, REAL)
    g.rot[0] = [2 * e0]
    g.rot[1] = [2 * e0 + 1, 2 * e1]
    g.rot[2] = [2 * e1 + 1]
    t = shortest_path_tree(g, 0)
    assert list(t.dist) == [0, 2, 5]


def test_grid_corner_distance():
    g = build_grid(3, 3)
    t = shortest_path_tree(g, 0)
    assert t.dist[8] == 4


def test_matches_bellman_ford_on_random_planar():
    g = build_random_triangulation(500, seed=7)
    t = shortest_path_tree(g, g.s)
    bf = bellman_ford(g, g.s)
    assert list(t.dist) == bf


def test_tree_structure_invariants():
    g = build_random_triangulation(200, seed=3)
    t = shortest_path_tree(g, g.s)
    for v in range(g.n):
        if v == t.s:
            assert t.dist[v] == 0
        else:
            e = t.parent_edge[v]
            assert t.dist[v] == t.dist[t.parent[v]] + g.ew[e]
    # Dijkstra certificate: no real edge can relax
    for e in range(g.m):
        if g.kind[e] == REAL:
            u, v, w = g.eu[e], g.ev[e], g.ew[e]
            assert t.dist[v] <= t.dist[u] + w
            assert t.dist[u] <= t.dist[v] + w


def test_deterministic_rebuild():
    g = build_random_triangulation(300, seed=11)
    t1 = shortest_path_tree(g, g.s)
    t2 = shortest_path_tree(g, g.s)
    assert np.array_equal(t1.parent, t2.parent)
    assert np.array_equal(t1.tin, t2.tin)


def test_tree_distance_against_path_walk():
    g = build_random_triangulation(200, seed=5)
    t = shortest_path_tree(g, g.s)

    def walk_dist(a, b):
        pa = {}
        x, d = a, 0
        while x != -1:
            pa[x] = d
            if x == t.s:
                break
            d += g.ew[t.parent_edge[x]]
            x = t.parent[x]
        x, d = b, 0
        while x not in pa:
            d += g.ew[t.parent_edge[x]]
            x = t.parent[x]
        return d + pa[x]

    rnd = random.Random(1)
    for _ in range(300):
        a = rnd.randrange(g.n)
        b = rnd.randrange(g.n)
        assert tree_distance(t, a, b) == walk_dist(a, b)
    assert tree_distance(t, 17, 17) == 0


def test_tree_distance_ancestor_case():
    g = build_grid(4, 4)
    t = shortest_path_tree(g, 0)
    v = 15
    anc = t.parent[v]
    assert tree_distance(t, anc, v) == t.dist[v] - t.dist[anc]


def test_dfs_stamps_single_and_path():
    g = EmbeddedPlanarGraph(1)
    t = shortest_path_tree(g, 0)
    tin, tout = dfs_order(t)
    assert tin[0] == 0 and tout[0] == 1

    g = EmbeddedPlanarGraph(3)
    e0 = g.add_edge(0, 1, 1, REAL)
    e1 = g.add_edge(1, 2, 1, REAL)
    g.rot[0] = [2 * e0]
    g.rot[1] = [2 * e0 + 1, 2 * e1]
    g.rot[2] = [2 * e1 + 1]
    t = shortest_path_tree(g, 0)
    tin, _ = dfs_order(t)
    assert tin[0] < tin[1] < tin[2]


def test_ancestor_stamps_agree_with_parent_walk():
    g = build_random_triangulation(300, seed=13)
    t = shortest_path_tree(g, g.s)

    def is_anc_walk(u, v):
        while v != -1:
            if v == u:
                return True
            v = t.parent[v]
        return False

    rnd = random.Random(2)
    for _ in range(500):
        u = rnd.randrange(g.n)
        v = rnd.randrange(g.n)
        assert t.is_ancestor(u, v) == is_anc_walk(u, v)


def test_nca_against_parent_walk():
    g = build_random_triangulation(200, seed=17)
    t = shortest_path_tree(g, g.s)

    def nca_walk(a, b):
        anc = set()
        x = a
        while x != -1:
            anc.add(x)
            x = t.parent[x]
        x = b
        while x not in anc:
            x = t.parent[x]
        return x

    for a in range(0, g.n, 7):
        bs = list(range(0, g.n, 11))
        want = [nca_walk(a, b) for b in bs]
        got_many = list(t.nca_many(a, np.array(bs)))
        got_one = [t.nca(a, b) for b in bs]
        assert got_one == want
        assert got_many == want


def test_zero_weight_ties_form_valid_tree():
    g = EmbeddedPlanarGraph(4)
    e0 = g.add_edge(0, 1, 0, REAL)
    e1 = g.add_edge(1, 2, 0, REAL)
    e2 = g.add_edge(2, 3, 1, REAL)
    e3 = g.add_edge(3, 0, 1, REAL)
    for v in range(4):
        pass
    g.rot[0] = [2 * e0, 2 * e3 + 1]
    g.rot[1] = [2 * e1, 2 * e0 + 1]
    g.rot[2] = [2 * e2, 2 * e1 + 1]
    g.rot[3] = [2 * e3, 2 * e2 + 1]
    t = shortest_path_tree(g, 0)
    assert list(t.dist) == [0, 0, 0, 1]
    seen = set()
    for v in range(4):
        x = v
        steps = 0
        while x != -1:
            assert steps <= 4
            x = t.parent[x]
            steps += 1
