"""Shortest path tree from the source, DFS time stamps, and constant-time
nearest-common-ancestor queries used by every later stage."""

from __future__ import annotations

import heapq

import numpy as np

from .errors import UnreachableVertex
from .graph_core import REAL, EmbeddedPlanarGraph


class ShortestPathTree:
    """Rooted shortest path tree with distances, preorder stamps and NCA.

    parent[v] / parent_edge[v] are -1 at the root.  tin is a preorder: u is
    an ancestor of v iff tin[u] <= tin[v] < tout[u].  nca() runs on an
    Euler tour with a sparse-table range minimum, so queries are exact and
    O(1) after an O(n log n) build.
    """

    def __init__(self, s, parent, parent_edge, dist, depth, children):
        self.s = s
        self.parent = parent
        self.parent_edge = parent_edge
        self.dist = dist
        self.depth = depth
        self.children = children
        self.n = len(parent)
        self._stamp()
        self._build_rmq()

    def _stamp(self):
        n = self.n
        tin = np.zeros(n, dtype=np.int64)
        tout = np.zeros(n, dtype=np.int64)
        euler_v = []
        first = np.zeros(n, dtype=np.int64)
        clock = 0
        # iterative DFS, children in rotation order
        stack = [(self.s, 0)]
        while stack:
            v, ci = stack[-1]
            if ci == 0:
                tin[v] = clock
                clock += 1
                first[v] = len(euler_v)
                euler_v.append(v)
            if ci < len(self.children[v]):
                stack[-1] = (v, ci + 1)
                stack.append((self.children[v][ci], 0))
            else:
                tout[v] = clock
                clock += 1
                stack.pop()
                if stack:
                    euler_v.append(stack[-1][0])
        self.tin = tin
        self.tout = tout
        self._euler_v = np.asarray(euler_v, dtype=np.int64)
        self._first = first

    def _build_rmq(self):
        depth_seq = self.depth[self._euler_v]
        m = len(depth_seq)
        logt = np.zeros(m + 1, dtype=np.int64)
        for i in range(2, m + 1):
            logt[i] = logt[i >> 1] + 1
        levels = int(logt[m]) + 1 if m else 1
        table = np.empty((levels, m), dtype=np.int64)
        table[0] = np.arange(m)
        for k in range(1, levels):
            half = 1 << (k - 1)
            span = 1 << k
            prev = table[k - 1]
            left = prev[: m - span + 1]
            right = prev[half: half + m - span + 1]
            take_right = depth_seq[right] < depth_seq[left]
            table[k, : m - span + 1] = np.where(take_right, right, left)
        self._rmq = table
        self._rmq_depth = depth_seq
        self._logt = logt

    def nca(self, a, b):
        """Nearest common ancestor of a and b."""
        i, j = self._first[a], self._first[b]
        if i > j:
            i, j = j, i
        k = int(self._logt[j - i + 1])
        x = self._rmq[k, i]
        y = self._rmq[k, j - (1 << k) + 1]
        idx = x if self._rmq_depth[x] <= self._rmq_depth[y] else y
        return int(self._euler_v[idx])

    def nca_many(self, a, bs):
        """nca(a, b) for every b in the array bs."""
        bs = np.asarray(bs, dtype=np.int64)
        if bs.size == 0:
            return bs
        i0 = self._first[a]
        j0 = self._first[bs]
        lo = np.minimum(i0, j0)
        hi = np.maximum(i0, j0)
        k = self._logt[hi - lo + 1]
        x = self._rmq[k, lo]
        y = self._rmq[k, hi - (1 << k) + 1]
        idx = np.where(self._rmq_depth[x] <= self._rmq_depth[y], x, y)
        return self._euler_v[idx]

    def is_ancestor(self, u, v):
        """True iff u is an ancestor of v (or equal)."""
        return self.tin[u] <= self.tin[v] < self.tout[u]

    def root_path(self, v):
        """Vertex list s -> v along the tree."""
        path = []
        while v != -1:
            path.append(v)
            v = self.parent[v]
        path.reverse()
        return path


def shortest_path_tree(g: EmbeddedPlanarGraph, s: int) -> ShortestPathTree:
    """Dijkstra over the real edges of g, rooted at s.

    Ties are broken toward the smaller predecessor id among predecessors
    already finalized, so the tree is reproducible across runs.  Raises
    UnreachableVertex when g is disconnected over real edges.
    """
    n = g.n
    dist = [float("inf")] * n
    parent = [-1] * n
    parent_edge = [-1] * n
    done = [False] * n
    dist[s] = 0
    heap = [(0, s)]
    adj = g.real_adjacency()
    while heap:
        d, v = heapq.heappop(heap)
        if done[v] or d > dist[v]:
            continue
        done[v] = True
        for e, u in adj[v]:
            nd = d + g.ew[e]
            if nd < dist[u]:
                dist[u] = nd
                parent[u] = v
                parent_edge[u] = e
                heapq.heappush(heap, (nd, u))
            elif nd == dist[u] and not done[u] and v < parent[u]:
                parent[u] = v
                parent_edge[u] = e
    if not all(done):
        missing = done.index(False)
        raise UnreachableVertex(f"vertex {missing} unreachable from {s}")

    # children in rotation order for a deterministic DFS
    children = [[] for _ in range(n)]
    for v in range(n):
        for d in g.rot[v]:
            e = d >> 1
            u = g.dart_head(d)
            if parent[u] == v and parent_edge[u] == e:
                children[v].append(u)
    depth = _depths_from_parents(parent, s)
    return ShortestPathTree(
        s,
        np.asarray(parent, dtype=np.int64),
        np.asarray(parent_edge, dtype=np.int64),
        np.asarray(dist, dtype=np.float64),
        depth,
        children,
    )


def _depths_from_parents(parent, s):
    n = len(parent)
    depth = np.full(n, -1, dtype=np.int64)
    depth[s] = 0
    for v in range(n):
        if depth[v] >= 0:
            continue
        chain = []
        u = v
        while depth[u] < 0:
            chain.append(u)
            u = parent[u]
        d = depth[u]
        for x in reversed(chain):
            d += 1
            depth[x] = d
    return depth


def tree_distance(t: ShortestPathTree, a: int, b: int):
    """d_T(a, b) = dist[a] + dist[b] - 2 dist[nca(a, b)]."""
    c = t.nca(a, b)
    return t.dist[a] + t.dist[b] - 2.0 * t.dist[c]


def dfs_order(t: ShortestPathTree):
    """Per-vertex (tin, tout) preorder/postorder stamps."""
    return t.tin, t.tout
