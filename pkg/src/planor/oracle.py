"""Oracle assembly: the build pipeline and per-query start bookkeeping."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .combine import distance_query
from .decomposition import DecompositionTree, decompose
from .errors import UnknownVertex
from .graph_core import (
    EmbeddedPlanarGraph,
    VertexMap,
    split_to_degree_three,
    triangulate,
    validate_embedding,
)
from .phase1 import Phase1Engine, Phase1Tables, preprocess_phase1
from .phase2 import Phase2Engine, Phase2Tables, preprocess_phase2
from .sssp import ShortestPathTree, shortest_path_tree


def as_fraction(eps) -> Fraction:
    if isinstance(eps, Fraction):
        return eps
    if isinstance(eps, str):
        return Fraction(eps) if "/" in eps else Fraction(str(float(eps)))
    return Fraction(str(float(eps)))


@dataclass
class BuildArtifacts:
    """Everything shaping the oracle that does not depend on eps."""

    g: EmbeddedPlanarGraph
    g3: EmbeddedPlanarGraph
    vmap: VertexMap
    T: ShortestPathTree
    dt: DecompositionTree


def prepare(g: EmbeddedPlanarGraph) -> BuildArtifacts:
    """Validate, split to degree three, build T, triangulate, decompose."""
    validate_embedding(g)
    g3, vmap = split_to_degree_three(g)
    T = shortest_path_tree(g3, g3.s)
    gD = triangulate(g3)
    dt = decompose(gD, T)
    return BuildArtifacts(g, g3, vmap, T, dt)


class Oracle:
    """Immutable bundle of the decomposition and both phase tables.

    Queries are read-only; small per-query scratch results are memoized in
    idempotent caches, so concurrent readers stay consistent.
    """

    def __init__(self, art: BuildArtifacts, eps: Fraction,
                 p1: Phase1Tables, p2: Phase2Tables, integral: bool):
        self.g = art.g
        self.g3 = art.g3
        self.vmap = art.vmap
        self.T = art.T
        self.dt = art.dt
        self.eps = eps
        self.integral = integral
        self.p1 = p1
        self.p2 = p2
        self.e1 = Phase1Engine(art.dt, p1)
        self.e2 = Phase2Engine(art.dt, p2)
        self.start_home = {v: min(rs) for v, rs in art.dt.home.items()}
        self._leaf_graphs = {}
        self._seed_cache = {}
        self._p1_cache = {}
        self._p2_cache = {}
        self._cand_cache = {}

    # -- query start -------------------------------------------------------

    def start_region(self, u3: int) -> int:
        """R1(u): the chosen home region, or the covering leaf region."""
        rid = self.start_home.get(u3)
        if rid is not None:
            return rid
        return int(self.dt.vleaf[u3])

    def is_homed(self, u3: int) -> bool:
        return u3 in self.start_home

    def leaf_adjacency(self, rid: int):
        """Expanded unit-step adjacency of a leaf region (memoized)."""
        hit = self._leaf_graphs.get(rid)
        if hit is not None:
            return hit
        reg = self.dt.regions[rid]
        adj = {}
        for i in range(len(reg.re_u)):
            for (u, v, w) in reg.edge_steps(self.dt.walks, i):
                if not np.isfinite(w):
                    continue
                adj.setdefault(u, []).append((v, w))
                adj.setdefault(v, []).append((u, w))
        self._leaf_graphs[rid] = adj
        return adj

    def leaf_exact(self, rid: int, u3: int):
        """Exact distances from u3 inside the leaf's expanded subgraph."""
        key = (rid, u3)
        hit = self._seed_cache.get(key)
        if hit is not None:
            return hit
        adj = self.leaf_adjacency(rid)
        dist = {u3: 0.0}
        heap = [(0.0, u3)]
        done = set()
        while heap:
            d, x = heapq.heappop(heap)
            if x in done:
                continue
            done.add(x)
            for y, w in adj.get(x, ()):
                nd = d + w
                if nd < dist.get(y, np.inf):
                    dist[y] = nd
                    heapq.heappush(heap, (nd, y))
        self._seed_cache[key] = dist
        return dist

    def start_seed(self, u3: int):
        """(start region, exact boundary seed or None) for Phase I."""
        if self.is_homed(u3):
            return self.start_home[u3], None
        rid = int(self.dt.vleaf[u3])
        dist = self.leaf_exact(rid, u3)
        reg = self.dt.regions[rid]
        seed = {int(v): dist[int(v)] for v in reg.blist if int(v) in dist}
        return rid, seed

    # -- phases with memoization -------------------------------------------

    def phase1(self, u3: int, cu: int):
        key = (u3, cu)
        hit = self._p1_cache.get(key)
        if hit is None:
            start, seed = self.start_seed(u3)
            hit = self.e1.query(u3, start, cu, exact_seed=seed)
            self._p1_cache[key] = hit
        return hit

    def phase2(self, u3: int, cu: int):
        key = (u3, cu)
        hit = self._p2_cache.get(key)
        if hit is None:
            hit = self.e2.query(u3, self.phase1(u3, cu))
            self._p2_cache[key] = hit
        return hit

    # -- public query --------------------------------------------------------

    def rep(self, u_orig: int) -> int:
        if not 0 <= u_orig < self.g.n:
            raise UnknownVertex(f"vertex {u_orig} outside the graph")
        return self.vmap.rep(u_orig)

    def query(self, u_orig: int, v_orig: int):
        """(1+eps)-approximate distance between two original vertices."""
        d = distance_query(self, self.rep(u_orig), self.rep(v_orig))
        if self.integral and np.isfinite(d):
            return int(round(d))
        return d


def build_oracle(g: EmbeddedPlanarGraph, eps, art: BuildArtifacts = None) -> Oracle:
    """Full preprocessing pipeline at accuracy eps."""
    eps = as_fraction(eps)
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if art is None:
        art = prepare(g)
    integral = all(float(w).is_integer() for w in g.ew)
    seed_homes = {v: min(rs) for v, rs in art.dt.home.items()}
    p1 = preprocess_phase1(art.dt, eps, integral, seed_homes)
    p2 = preprocess_phase2(art.dt, art.g3, eps, integral)
    return Oracle(art, eps, p1, p2, integral)
