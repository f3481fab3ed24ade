"""Top-level distance queries: locate the separating cycle, run both
phases for each endpoint, project everything onto the two separator root
paths, prune dominated candidates, and take the best adjacent pairing.

All arithmetic composes weights of real walks, so the estimate never
drops below the true distance; the (1 + eps) upper bound comes from the
phase guarantees plus the fact that after dominance pruning the best
pairing over each path is attained by two consecutive candidates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomposition import DecompositionTree
from .errors import PlanorError

INF = float("inf")


@dataclass
class SeparatorRef:
    """The cycle separating the two query endpoints inside their nca region."""

    r_uv: int
    c_u: int
    c_v: int
    a: int          # tip of root path Q
    b: int          # tip of root path Q'
    closing_edge: int
    same_path: bool


@dataclass
class CandidateList:
    """Pruned, position-sorted candidates on one separator root path."""

    verts: np.ndarray
    pos: np.ndarray    # distance from the source along the path
    dist: np.ndarray   # approximate distance from the query endpoint

    def __len__(self):
        return len(self.verts)


def nca_region(dt: DecompositionTree, ru: int, rv: int) -> SeparatorRef:
    """SeparatorRef for start regions ru, rv.

    When one start region is an ancestor of the other, the separator that
    carved the upper region out of its parent is the separating cycle and
    the upper endpoint lies on it.
    """
    if dt.is_region_ancestor(rv, ru) or dt.is_region_ancestor(ru, rv):
        upper = rv if dt.is_region_ancestor(rv, ru) else ru
        parent = dt.regions[upper].parent
        sep = dt.regions[parent].split_sep
        return SeparatorRef(parent, upper, upper, sep.a, sep.b,
                            sep.closing_edge, True)
    r_uv = dt.region_nca(ru, rv)
    cu = cv = -1
    for c in dt.regions[r_uv].children:
        if dt.is_region_ancestor(c, ru):
            cu = c
        if dt.is_region_ancestor(c, rv):
            cv = c
    sep = dt.regions[r_uv].split_sep
    return SeparatorRef(r_uv, cu, cv, sep.a, sep.b, sep.closing_edge, False)


def project_to_separator(h_verts, h_dist, tips, T):
    """Map approximate distances onto the separator root paths.

    Vertices already on a path keep their distance; any other vertex w is
    replaced by its deepest ancestor on the separator, paying the tree
    detour d_T(w, w').  Returns one {vertex: dist} dict per tip path.
    """
    a, b = tips
    per_path = ({}, {})

    def offer(side, v, d):
        cur = per_path[side].get(v)
        if cur is None or d < cur:
            per_path[side][v] = d

    for v, d in zip(h_verts, h_dist):
        v, d = int(v), float(d)
        on_a = T.is_ancestor(v, a)
        on_b = T.is_ancestor(v, b)
        if on_a or on_b:
            if on_a:
                offer(0, v, d)
            if on_b:
                offer(1, v, d)
            continue
        na, nb = T.nca(v, a), T.nca(v, b)
        w = na if T.dist[na] >= T.dist[nb] else nb
        dd = d + float(T.dist[v] - T.dist[w])
        if T.is_ancestor(w, a):
            offer(0, w, dd)
        if T.is_ancestor(w, b):
            offer(1, w, dd)
    return per_path


def prune_and_sort(cands: dict, T) -> CandidateList:
    """Dominance-prune candidates on one root path, sorted by position.

    A candidate w is dropped when some other candidate w' satisfies
    d(w') + d_Q(w', w) <= d(w); one forward and one backward scan over the
    preorder-sorted list suffice.
    """
    if not cands:
        z = np.empty(0, dtype=np.int64)
        return CandidateList(z, z.astype(np.float64), z.astype(np.float64))
    verts = sorted(cands, key=lambda v: (int(T.tin[v]), v))
    pos = [float(T.dist[v]) for v in verts]
    dist = [float(cands[v]) for v in verts]

    keep = []
    best = INF  # min of d(w') - pos(w') over survivors seen so far
    for i in range(len(verts)):
        if best + pos[i] <= dist[i]:
            continue
        keep.append(i)
        best = min(best, dist[i] - pos[i])
    keep2 = []
    best = INF  # min of d(w') + pos(w') scanning backward
    for i in reversed(keep):
        if best - pos[i] <= dist[i]:
            continue
        keep2.append(i)
        best = min(best, dist[i] + pos[i])
    keep2.reverse()
    return CandidateList(
        np.array([verts[i] for i in keep2], dtype=np.int64),
        np.array([pos[i] for i in keep2]),
        np.array([dist[i] for i in keep2]),
    )


def combine_along_path(lu: CandidateList, lv: CandidateList, T=None):
    """Best d_u + d_Q + d_v over adjacent opposite pairs of the merged lists."""
    if len(lu) == 0 or len(lv) == 0:
        return INF
    iu = iv = 0
    prev = None  # (side, pos, dist)
    best = INF
    while iu < len(lu) or iv < len(lv):
        if iv >= len(lv) or (iu < len(lu) and
                             (lu.pos[iu], 0) <= (lv.pos[iv], 1)):
            cur = (0, float(lu.pos[iu]), float(lu.dist[iu]))
            iu += 1
        else:
            cur = (1, float(lv.pos[iv]), float(lv.dist[iv]))
            iv += 1
        if prev is not None and prev[0] != cur[0]:
            best = min(best, prev[2] + abs(cur[1] - prev[1]) + cur[2])
        prev = cur
    return best


def evaluate_at(lu: CandidateList, pos_v: float):
    """min d(p) + d_Q(p, v) over the pruned list; neighbors suffice."""
    if len(lu) == 0:
        return INF
    i = int(np.searchsorted(lu.pos, pos_v))
    best = INF
    for j in (i - 1, i):
        if 0 <= j < len(lu):
            best = min(best, float(lu.dist[j]) + abs(float(lu.pos[j]) - pos_v))
    return best


# -- the full query ---------------------------------------------------------


def candidate_lists(oracle, u3, cu, tips):
    """Pruned per-path candidate lists from Phase II output (memoized)."""
    key = (u3, cu)
    hit = oracle._cand_cache.get(key)
    if hit is not None:
        return hit
    out = oracle.phase2(u3, cu)
    per_path = project_to_separator(out.verts, out.dist, tips, oracle.T)
    lists = (prune_and_sort(per_path[0], oracle.T),
             prune_and_sort(per_path[1], oracle.T))
    oracle._cand_cache[key] = lists
    return lists


def distance_query(oracle, u3, v3):
    """(1 + eps)-approximate d_G between two split-graph vertices."""
    if u3 == v3:
        return 0
    dt = oracle.dt
    T = oracle.T
    if len(dt.regions) == 1:
        return oracle.leaf_exact(0, u3).get(v3, INF)

    ru = oracle.start_region(u3)
    rv = oracle.start_region(v3)
    hu = oracle.is_homed(u3)
    hv = oracle.is_homed(v3)

    best = INF
    if int(dt.vleaf[u3]) == int(dt.vleaf[v3]):
        best = oracle.leaf_exact(int(dt.vleaf[u3]), u3).get(v3, INF)

    if ru == rv and not hu and not hv:
        # both confined to one leaf: exact inside plus routes leaving it
        rid = ru
        du = oracle.leaf_exact(rid, u3)
        dv = oracle.leaf_exact(rid, v3)
        bl = [int(x) for x in dt.regions[rid].blist]
        for x in bl:
            if x not in du:
                continue
            for y in bl:
                if y not in dv:
                    continue
                mid = 0 if x == y else distance_query(oracle, x, y)
                best = min(best, du[x] + mid + dv[y])
        return best

    anc_vu = dt.is_region_ancestor(rv, ru)
    anc_uv = dt.is_region_ancestor(ru, rv)
    if anc_vu or anc_uv:
        if anc_vu and hv:
            lower, upper = u3, v3
        elif anc_uv and hu:
            lower, upper = v3, u3
        else:
            # comparable starts with a homeless upper endpoint would force
            # both into one leaf, which returned above
            raise PlanorError(f"unroutable endpoint pair {u3}, {v3}")
        ref = nca_region(dt, oracle.start_region(lower),
                         oracle.start_region(upper))
        lists = candidate_lists(oracle, lower, ref.c_u, (ref.a, ref.b))
        pos_v = float(T.dist[upper])
        if T.is_ancestor(upper, ref.a):
            best = min(best, evaluate_at(lists[0], pos_v))
        if T.is_ancestor(upper, ref.b):
            best = min(best, evaluate_at(lists[1], pos_v))
        return best

    ref = nca_region(dt, ru, rv)
    tips = (ref.a, ref.b)
    lu = candidate_lists(oracle, u3, ref.c_u, tips)
    lv = candidate_lists(oracle, v3, ref.c_v, tips)
    best = min(best, combine_along_path(lu[0], lv[0]))
    best = min(best, combine_along_path(lu[1], lv[1]))
    return best
