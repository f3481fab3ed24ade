import random

import pytest

from planor.graph_core import REAL, EmbeddedPlanarGraph


def build_grid(rows, cols, weight=lambda r, c, r2, c2: 1):
    """Grid graph with the natural planar rotation system (N, E, S, W)."""
    def vid(r, c):
        return r * cols + c

    g = EmbeddedPlanarGraph(rows * cols)
    eidx = {}
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                e = g.add_edge(vid(r, c), vid(r, c + 1), weight(r, c, r, c + 1), REAL)
                eidx[(vid(r, c), vid(r, c + 1))] = e
            if r + 1 < rows:
                e = g.add_edge(vid(r, c), vid(r + 1, c), weight(r, c, r + 1, c), REAL)
                eidx[(vid(r, c), vid(r + 1, c))] = e
    for r in range(rows):
        for c in range(cols):
            v = vid(r, c)
            ring = []
            if r > 0:
                ring.append(g.dart_of(eidx[(vid(r - 1, c), v)], v))
            if c + 1 < cols:
                ring.append(g.dart_of(eidx[(v, vid(r, c + 1))], v))
            if r + 1 < rows:
                ring.append(g.dart_of(eidx[(v, vid(r + 1, c))], v))
            if c > 0:
                ring.append(g.dart_of(eidx[(vid(r, c - 1), v)], v))
            g.rot[v] = ring
    return g


def build_triangle(weights=(1, 1, 1)):
    g = EmbeddedPlanarGraph(3)
    e0 = g.add_edge(0, 1, weights[0], REAL)
    e1 = g.add_edge(1, 2, weights[1], REAL)
    e2 = g.add_edge(2, 0, weights[2], REAL)
    g.rot[0] = [2 * e0, 2 * e2 + 1]
    g.rot[1] = [2 * e1, 2 * e0 + 1]
    g.rot[2] = [2 * e2, 2 * e1 + 1]
    return g


def build_random_triangulation(n, seed, max_w=100):
    """Combinatorial incremental point-insertion triangulation."""
    from planor.harness.generators import gen_random_planar

    return gen_random_planar(n, seed, max_w=max_w)


def dijkstra_reference(g, src):
    """Straight heap Dijkstra over real edges, used as an oracle."""
    import heapq

    dist = {src: 0}
    done = set()
    heap = [(0, src)]
    adj = g.real_adjacency()
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        for e, u in adj[v]:
            nd = d + g.ew[e]
            if nd < dist.get(u, float("inf")):
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return dist


def all_pairs_reference(g):
    return {v: dijkstra_reference(g, v) for v in range(g.n)}


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
