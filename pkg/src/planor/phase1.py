"""Phase I: per-shortcut portal tables and the region-restricted query.

For every shortcut R1 -> R2 and every vertex w that either leaves the
boundary when jumping (w in dR1 \\ dR2), anchors a boundary path there
(w in delta(R1, R2)), or starts queries at R1, the preprocessing stores a
portal set of dR2 with region-restricted distances d_R2(w, p).  The query
walks the shortcut ladder from the start region to C_u, keeping a small
portal front whose distances approximate d_Ri(u, .) within a factor that
grows by (1 + eps1)^2 per hop; the final front is compressed with the
coarser eps2 = eps/8.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse.csgraph import dijkstra as _dijkstra

from .decomposition import DecompositionTree, Region
from .errors import NotInRegion, PlanorError
from .portals import PathCandidates, PortalGroup, multipass_portals, thorup_portals


def hop_bound(height: int) -> int:
    """2 ceil(log2 height) + 2, the worst-case shortcut-hop count."""
    return 2 * math.ceil(math.log2(max(height, 2))) + 2


@dataclass
class Phase1Output:
    """Portals on the boundary of C_u with distances realized by paths in C_u."""

    cu: int
    verts: np.ndarray
    dist: np.ndarray

    def as_dict(self):
        return {int(v): float(d) for v, d in zip(self.verts, self.dist)}


class Phase1Tables:
    """Pooled per-(vertex, shortcut) portal sets over region boundaries."""

    def __init__(self, eps, eps1, eps2, k_max, integral):
        self.eps = eps
        self.eps1 = eps1
        self.eps2 = eps2
        self.k_max = k_max
        self.integral = integral
        self.index = {}  # (w, sid) -> (offset, length) into the pools
        self.p_vert = None
        self.p_dist = None
        self.p_hole = None
        self.p_run = None
        self.p_pos = None  # walk position of the portal occurrence
        self._bv, self._bd, self._bh, self._br, self._bp = [], [], [], [], []

    def add(self, w, sid, rows):
        """rows: list of (hole_idx, run, walk_pos, vert, dist), path-grouped."""
        off = len(self._bv)
        for hi, run, pos, vert, dist in rows:
            self._bh.append(hi)
            self._br.append(run)
            self._bp.append(pos)
            self._bv.append(vert)
            self._bd.append(dist)
        self.index[(w, sid)] = (off, len(rows))

    def freeze(self):
        self.p_vert = np.array(self._bv, dtype=np.int64)
        self.p_dist = np.array(self._bd, dtype=np.float64)
        self.p_hole = np.array(self._bh, dtype=np.int16)
        self.p_run = np.array(self._br, dtype=np.int8)
        self.p_pos = np.array(self._bp, dtype=np.int64)
        del self._bv, self._bd, self._bh, self._br, self._bp

    def get(self, w, sid):
        """Stored portal rows for (w, shortcut) or None."""
        loc = self.index.get((w, sid))
        if loc is None:
            return None
        off, ln = loc
        sl = slice(off, off + ln)
        return (self.p_hole[sl], self.p_run[sl], self.p_pos[sl],
                self.p_vert[sl], self.p_dist[sl])

    @property
    def entry_count(self):
        return len(self.p_vert)


def _portal_rows(reg: Region, dist_of, eps, integral):
    """Portal-compress a distance function over every boundary path of reg.

    dist_of maps candidate vertex arrays to distances; returns pooled rows
    (hole, run, walk_pos, vert, dist) ordered by path then position.
    """
    rows = []
    for hi, run in reg.run_ids():
        cands = reg.run_candidates(hi, run)
        if len(cands) == 0:
            continue
        dvec = dist_of(cands.verts)
        if not np.isfinite(dvec).any():
            continue
        ps = thorup_portals(dvec, cands, eps, integral)
        positions = reg.holes[hi].run_positions(run)
        for k in range(len(ps)):
            i = int(ps.idx[k])
            rows.append((hi, run, int(positions[i]), int(ps.verts[k]),
                         float(ps.dist[k])))
    return rows


def preprocess_phase1(dt: DecompositionTree, eps: Fraction, integral=True,
                      seed_homes=None) -> Phase1Tables:
    """Build the Phase I tables: for each shortcut R1 -> R2, a portal set
    of dR2 with d_R2 distances for each qualifying source vertex.

    eps1 = eps / (8 K_max) is fixed at build time from the worst-case hop
    count K_max, so preprocessing covers every query length.  seed_homes
    maps vertex -> its chosen start region; sources whose first shortcut
    hop leaves from there are always covered, even when the vertex stays
    on the target boundary.
    """
    k_max = hop_bound(dt.height)
    eps1 = eps / (8 * k_max)
    eps2 = eps / 8
    tables = Phase1Tables(eps, eps1, eps2, k_max, integral)
    regions = dt.regions

    by_dst = {}
    for sc in dt.shortcuts:
        by_dst.setdefault(sc.dst, []).append(sc)

    for dst in sorted(by_dst):
        r2 = regions[dst]
        if len(r2.blist) == 0:
            continue
        srcs_rows = _boundary_rows(r2)
        col_of = {int(v): i for i, v in enumerate(r2.vlist)}
        brow_of = {int(v): i for i, v in enumerate(r2.blist)}
        b2 = brow_of.keys()
        for sc in sorted(by_dst[dst], key=lambda s: s.sid):
            r1 = regions[sc.src]
            ws = set(int(x) for x in sc.delta)
            ws.update(int(v) for v in r1.blist if int(v) not in b2)
            if seed_homes is not None:
                ws.update(int(v) for v in r1.blist
                          if seed_homes.get(int(v)) == sc.src)
            for w in sorted(ws):
                ci = col_of.get(w)
                if ci is None:
                    raise PlanorError(f"source {w} missing from region {dst}")

                def dist_of(verts, _ci=ci):
                    return srcs_rows[[brow_of[int(v)] for v in verts], _ci]

                rows = _portal_rows(r2, dist_of, eps1, integral)
                tables.add(w, sc.sid, rows)
    tables.freeze()
    return tables


def _boundary_rows(reg: Region):
    """Region-restricted distances from every boundary vertex (row block)."""
    csr = reg.graph_csr()
    idx = np.searchsorted(reg.vlist, reg.blist)
    return _dijkstra(csr, indices=idx)


class Phase1Engine:
    """Executes the shortcut-ladder query over the Phase I tables."""

    def __init__(self, dt: DecompositionTree, tables: Phase1Tables):
        self.dt = dt
        self.T = dt.T
        self.tables = tables
        self.cross_check = False
        self.max_h_size = 0
        self._exact_cache = {}

    # -- exact in-region distances (used for short ladders and seeds) -----

    def region_exact_from(self, rid, u):
        key = (rid, u)
        hit = self._exact_cache.get(key)
        if hit is not None:
            return hit
        reg = self.dt.regions[rid]
        row = _dijkstra(reg.graph_csr(), indices=[reg.vindex(u)])[0]
        out = {int(v): float(d) for v, d in zip(reg.vlist, row) if np.isfinite(d)}
        self._exact_cache[key] = out
        return out

    # -- the ladder --------------------------------------------------------

    def query(self, u, start_rid, cu_rid, exact_seed=None, audit=None) -> Phase1Output:
        """Phase I for u: from its start region up to C_u.

        exact_seed carries exact distances from u to the start region's
        boundary (leaf starts); otherwise u must lie on the start boundary
        and the stored table seeds the first hop.
        """
        dt = self.dt
        eps1, eps2 = self.tables.eps1, self.tables.eps2
        if start_rid == cu_rid:
            dists = exact_seed if exact_seed is not None \
                else self.region_exact_from(cu_rid, u)
            return self._compress_output(cu_rid, dists, eps2)

        hops = dt.shortcut_hops(start_rid, cu_rid)
        front = None
        at = start_rid
        for t, sid in enumerate(hops):
            sc = dt.shortcuts[sid]
            last = t == len(hops) - 1
            if t == 0:
                if exact_seed is not None:
                    front = exact_seed
                elif len(hops) == 1:
                    # single hop: exact distances inside C_u, coarse portals
                    dists = self.region_exact_from(cu_rid, u)
                    return self._compress_output(cu_rid, dists, eps2)
                else:
                    stored = self.tables.get(u, sid)
                    if stored is None:
                        raise NotInRegion(
                            f"no stored seed for vertex {u} on shortcut {sid}")
                    front = {int(v): float(d) for v, d in
                             zip(stored[3], stored[4])}
                    if audit is not None:
                        audit.append((sc.dst, dict(front)))
                    at = sc.dst
                    continue
            front = self._hop(u, sc, front, eps2 if last else eps1)
            at = sc.dst
            if audit is not None:
                audit.append((at, dict(front)))
        verts = np.array(sorted(front), dtype=np.int64)
        dist = np.array([front[int(v)] for v in verts], dtype=np.float64)
        return Phase1Output(cu_rid, verts, dist)

    def _compress_output(self, rid, dists, eps) -> Phase1Output:
        reg = self.dt.regions[rid]

        def dist_of(verts):
            return np.array([dists.get(int(v), np.inf) for v in verts])

        rows = _portal_rows(reg, dist_of, eps, self.tables.integral)
        out = {}
        for hi, run, pos, vert, dist in rows:
            if vert not in out or dist < out[vert]:
                out[vert] = dist
        verts = np.array(sorted(out), dtype=np.int64)
        return Phase1Output(rid, verts,
                            np.array([out[int(v)] for v in verts]))

    def _hop(self, u, sc, front, eps_out):
        """One iteration of the ladder loop (Fig. 3 lines 5-10)."""
        dt = self.dt
        r2 = dt.regions[sc.dst]
        b2 = r2.blist
        tables = self.tables

        def on_b2(v):
            i = np.searchsorted(b2, v)
            return i < len(b2) and b2[i] == v

        delta_sc = [int(x) for x in sc.delta]
        front_on = [v for v in sorted(front) if on_b2(v)]
        front_off = [v for v in sorted(front) if not on_b2(v)]

        # H edges: u -> previous portals, then stored portal edges
        UU = -1
        edges = [(UU, v, front[v]) for v in sorted(front)]
        stored_groups = []  # (hole, run, pos_arr, vert_arr) per source w
        for w in sorted(set(delta_sc) | set(front_off)):
            stored = tables.get(w, sc.sid)
            if stored is None:
                if w in front_off:
                    raise PlanorError(
                        f"missing stored portal set for {w} on shortcut {sc.sid}")
                continue
            hs, rs, ps, vs, ds = stored
            for q, dq in zip(vs, ds):
                edges.append((w, int(q), float(dq)))
            stored_groups.append((w, hs, rs, ps, vs))

        # the compressed face C_i over the relevant boundary occurrences
        relevant = set(delta_sc)
        relevant.update(int(c) for c in r2.corners)
        relevant.update(front_on)
        for w, hs, rs, ps, vs in stored_groups:
            relevant.update(int(q) for q in vs)
        occ = []
        for v in sorted(relevant):
            for hi, run, pos in r2.vertex_occurrences(v):
                occ.append((hi, pos, v))
        occ.sort()
        by_hole = {}
        for hi, pos, v in occ:
            by_hole.setdefault(hi, []).append((pos, v))
        for hi, items in by_hole.items():
            walk = r2.holes[hi].walk
            L = len(walk.verts)
            for k in range(len(items)):
                p, x = items[k]
                q, y = items[(k + 1) % len(items)]
                if k + 1 < len(items):
                    w_arc = float(walk.pw[q] - walk.pw[p])
                else:
                    w_arc = float(walk.pw[L - 1] - walk.pw[p]) + \
                        float(walk.step_w[L - 1]) + float(walk.pw[q])
                if x != y and np.isfinite(w_arc):
                    edges.append((x, y, w_arc))

        # single-source distances in the small graph H
        adj = {}
        for x, y, w in edges:
            if not np.isfinite(w):
                continue
            adj.setdefault(x, []).append((y, w))
            adj.setdefault(y, []).append((x, w))
        dh = {UU: 0.0}
        heap = [(0.0, UU)]
        done = set()
        while heap:
            d, x = heapq.heappop(heap)
            if x in done:
                continue
            done.add(x)
            for y, w in adj.get(x, ()):
                nd = d + w
                if nd < dh.get(y, np.inf):
                    dh[y] = nd
                    heapq.heappush(heap, (nd, y))
        self.max_h_size = max(self.max_h_size, len(adj))

        # portal-compress onto dR2 path by path via the multipass variant
        out = {}
        singleton_verts = sorted(set(delta_sc) | set(int(c) for c in r2.corners)
                                 | set(front_on))
        for hi, run in r2.run_ids():
            singles = []
            group_rows = []
            # singleton groups: delta/corner/front-on occurrences on this run
            for v in singleton_verts:
                for hj, rj, pos in r2.vertex_occurrences(v):
                    if hj == hi and rj == run:
                        singles.append((pos, v))
            for w, hs, rs, ps, vs in stored_groups:
                mask = (hs == hi) & (rs == run)
                if mask.any():
                    group_rows.append((ps[mask], vs[mask]))
            if not singles and not group_rows:
                continue
            # canonical occurrence ordering by (pw, walk position)
            all_pos = [p for p, v in singles]
            all_vert = [v for p, v in singles]
            for ps_a, vs_a in group_rows:
                all_pos.extend(int(x) for x in ps_a)
                all_vert.extend(int(x) for x in vs_a)
            walk = r2.holes[hi].walk
            all_pos = np.array(all_pos, dtype=np.int64)
            all_vert = np.array(all_vert, dtype=np.int64)
            order = np.argsort(all_pos, kind="stable")
            all_pos = all_pos[order]
            all_vert = all_vert[order]
            pc = PathCandidates(walk.pw[all_pos], all_vert, (walk.gid, run))
            dvec = np.array([dh.get(int(v), np.inf) for v in all_vert])
            if not np.isfinite(dvec).any():
                continue
            back = np.empty(len(order), dtype=np.int64)
            back[order] = np.arange(len(order))
            groups = []
            at = 0
            for k in range(len(singles)):
                groups.append(PortalGroup(np.sort(back[at:at + 1])))
                at += 1
            for ps_a, vs_a in group_rows:
                groups.append(PortalGroup(np.sort(back[at:at + len(ps_a)])))
                at += len(ps_a)
            ps_m = multipass_portals(groups, dvec, pc, eps_out, self.tables.integral)
            if self.cross_check:
                ps_t = thorup_portals(dvec, pc, eps_out, self.tables.integral)
                if list(ps_m.idx) != list(ps_t.idx):
                    raise PlanorError("multipass and direct portal sets differ")
            for k in range(len(ps_m)):
                v = int(ps_m.verts[k])
                d = float(ps_m.dist[k])
                if v not in out or d < out[v]:
                    out[v] = d
        if not out:
            raise PlanorError(f"empty portal front after shortcut {sc.sid}")
        return out
