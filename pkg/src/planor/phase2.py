"""Phase II: global portal tables and the query extending Phase I output
from distances inside C_u to distances in the whole graph.

Step 1 stores, per vertex w and home region, a portal set of the expanded
boundary lifted onto the contracted one.  Step 2 stores type-1 sets: for
every shortcut R1 -> R2 and vertex leaving the boundary at that jump, a
portal set of delta_G R1 under true d_G distances.  Step 3 collects dual
portal sets: boundary vertices shared by both ends of a shortcut that
appear in the step-1 set of some region sandwiched inside the jump; each
member carries a type-2 portal set of delta_G R1.  Step 4 answers
successor/predecessor queries among dual members along each boundary
path; a sorted-array index replaces the vEB tree with identical answers.

The query walks shortcuts from C_u to the root keeping the shrinking
portal front P_i; vertices falling off the boundary extend through their
type-1 sets, and vertices that persist extend through the type-2 sets of
nearby dual portals, paying a tree detour d_T(p, p*).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse.csgraph import dijkstra as _dijkstra

from .decomposition import DecompositionTree, Region, csr_min
from .errors import PlanorError
from .portals import PathCandidates, thorup_portals


@dataclass
class Phase2Output:
    """Vertices reached from u with distances realized by walks in G."""

    verts: np.ndarray
    dist: np.ndarray


class SuccessorIndex:
    """Ordered positions of dual-set members along one boundary path.

    Pluggable ordered-successor structure; the default is binary search
    over a sorted array, which answers exactly like a linear scan.
    """

    __slots__ = ("pos", "verts")

    def __init__(self, pos, verts):
        order = np.argsort(pos, kind="stable")
        self.pos = np.asarray(pos)[order]
        self.verts = np.asarray(verts)[order]

    def succ(self, p):
        i = np.searchsorted(self.pos, p, side="left")
        return (int(self.verts[i]), int(self.pos[i])) if i < len(self.pos) else None

    def pred(self, p):
        i = np.searchsorted(self.pos, p, side="right") - 1
        return (int(self.verts[i]), int(self.pos[i])) if i >= 0 else None

    def members(self):
        return list(zip(self.pos.tolist(), self.verts.tolist()))


class LinearScanIndex(SuccessorIndex):
    """Reference implementation used to cross-check the sorted index."""

    def succ(self, p):
        best = None
        for q, v in zip(self.pos, self.verts):
            if q >= p and (best is None or q < best[1]):
                best = (int(v), int(q))
        return best

    def pred(self, p):
        best = None
        for q, v in zip(self.pos, self.verts):
            if q <= p and (best is None or q > best[1]):
                best = (int(v), int(q))
        return best


class _Pooled:
    """Append-only pool of (vert, dist) rows keyed by an arbitrary id."""

    def __init__(self):
        self.index = {}
        self._v, self._d = [], []
        self.verts = self.dist = None

    def add(self, key, verts, dists):
        self.index[key] = (len(self._v), len(verts))
        self._v.extend(int(x) for x in verts)
        self._d.extend(float(x) for x in dists)

    def freeze(self):
        self.verts = np.array(self._v, dtype=np.int64)
        self.dist = np.array(self._d, dtype=np.float64)
        del self._v, self._d

    def get(self, key):
        loc = self.index.get(key)
        if loc is None:
            return None
        off, ln = loc
        return self.verts[off:off + ln], self.dist[off:off + ln]

    @property
    def entry_count(self):
        return len(self.verts) if self.verts is not None else len(self._v)


class Phase2Tables:
    def __init__(self, eps, eps2, integral):
        self.eps = eps
        self.eps2 = eps2
        self.integral = integral
        self.step1 = _Pooled()   # (w, rid) -> P(w) with d_G(w, .)
        self.type1 = _Pooled()   # (u, sid) -> portal set of delta_G R1
        self.type2 = _Pooled()   # (p*, rid of R1) -> portal set of delta_G R1
        self.dual = {}           # (sid, hole_idx, run) -> SuccessorIndex
        self.dual_members = {}   # sid -> sorted member vertex array
        self.counters = {}

    def succ_index(self, sid, hi, run):
        return self.dual.get((sid, hi, run))


def _global_rows(g3, sources, block=512):
    """Yield (source, distance row) over the real edges of g3, batched."""
    n = g3.n
    kept = [e for e in range(g3.m) if np.isfinite(g3.ew[e])]
    rows = np.array([g3.eu[e] for e in kept] + [g3.ev[e] for e in kept])
    cols = np.array([g3.ev[e] for e in kept] + [g3.eu[e] for e in kept])
    data = np.array([g3.ew[e] for e in kept] * 2, dtype=np.float64)
    csr = csr_min(rows, cols, data, n)
    for at in range(0, len(sources), block):
        chunk = sources[at:at + block]
        mat = _dijkstra(csr, indices=chunk)
        for i, src in enumerate(chunk):
            yield src, mat[i]


def _expanded_portals(reg: Region, row, eps2, integral):
    """(w, G, 1+eps2)-portal rows of delta_G reg from one distance row.

    Returns (hole_idx, run, walk_pos, vert, dist) tuples over the expanded
    boundary paths.
    """
    out = []
    for hi, run in reg.run_ids():
        cands = reg.expanded_run_candidates(hi, run)
        if len(cands) == 0:
            continue
        dvec = row[cands.verts]
        ps = thorup_portals(dvec, cands, eps2, integral)
        walk = reg.holes[hi].walk
        lo = walk.idx_low
        base = 0 if run == 0 else lo
        for k in range(len(ps)):
            out.append((hi, run, base + int(ps.idx[k]), int(ps.verts[k]),
                        float(ps.dist[k])))
    return out


def _lift_to_contracted(reg: Region, rows):
    """Step-1 lift: P(w)' members kept if surviving, plus the surviving
    successor and predecessor along their boundary path."""
    lifted = {}
    for hi, run, pos, vert, dist in rows:
        h = reg.holes[hi]
        surv = h.run_positions(run)
        if len(surv) == 0:
            continue
        i = np.searchsorted(surv, pos)
        if i < len(surv) and surv[i] == pos:
            lifted.setdefault(vert, dist)
            continue
        for j in (i - 1, i):
            if 0 <= j < len(surv):
                sv = int(h.walk.verts[surv[j]])
                step = abs(float(h.walk.pw[surv[j]]) - float(h.walk.pw[pos]))
                cand = dist + step
                if sv not in lifted or cand < lifted[sv]:
                    lifted[sv] = cand
    return lifted


def preprocess_phase2(dt: DecompositionTree, g3, eps: Fraction,
                      integral=True) -> Phase2Tables:
    """Steps 1-4 of the Phase II preprocessing."""
    eps2 = eps / 8
    tables = Phase2Tables(eps, eps2, integral)
    regions = dt.regions

    # which (w, home region) pairs and (w, shortcut) pairs each source feeds
    step1_of = {w: sorted(rs) for w, rs in dt.home.items()}
    type1_of = {}
    for sc in dt.shortcuts:
        r1, r2 = regions[sc.src], regions[sc.dst]
        b2 = set(int(x) for x in r2.blist)
        for v in r1.blist:
            v = int(v)
            if v not in b2:
                type1_of.setdefault(v, []).append(sc.sid)

    sources = sorted(set(step1_of) | set(type1_of))
    step1_raw = {}
    for w, row in _global_rows(g3, sources):
        for rid in step1_of.get(w, ()):
            reg = regions[rid]
            rows = _expanded_portals(reg, row, eps2, integral)
            step1_raw[(w, rid)] = rows
            lifted = _lift_to_contracted(reg, rows)
            vs = sorted(lifted)
            tables.step1.add((w, rid), vs, [lifted[v] for v in vs])
        for sid in type1_of.get(w, ()):
            reg = regions[dt.shortcuts[sid].src]
            rows = _expanded_portals(reg, row, eps2, integral)
            tables.type1.add((w, sid), [r[3] for r in rows], [r[4] for r in rows])
    tables.step1.freeze()
    tables.type1.freeze()

    # step 3: dual portal sets per shortcut
    homes_by_region = {}
    for w, rids in dt.home.items():
        for rid in rids:
            homes_by_region.setdefault(rid, []).append(w)

    dual_sets = {}
    total_pstar = 0
    for sc in dt.shortcuts:
        r1, r2 = regions[sc.src], regions[sc.dst]
        b1 = set(int(x) for x in r1.blist)
        b2 = set(int(x) for x in r2.blist)
        corners1 = set(int(x) for x in r1.corners)
        pstar = set()
        rid = sc.src
        while rid != sc.dst:
            for w in homes_by_region.get(rid, ()):
                got = tables.step1.get((w, rid))
                if got is None:
                    continue
                for p in got[0]:
                    p = int(p)
                    if p in b1 and p in b2 and p not in corners1:
                        pstar.add(p)
            rid = regions[rid].parent
        total_pstar += len(pstar)
        bar = sorted(pstar | corners1 | set(int(x) for x in sc.delta))
        dual_sets[sc.sid] = bar

    # step 3 continued: type-2 portal sets, deduplicated by (p*, R1)
    type2_keys = {}
    for sc in dt.shortcuts:
        for p in dual_sets[sc.sid]:
            type2_keys.setdefault(p, set()).add(sc.src)
    t2_sources = sorted(type2_keys)
    for p, row in _global_rows(g3, t2_sources):
        for rid in sorted(type2_keys[p]):
            reg = regions[rid]
            rows = _expanded_portals(reg, row, eps2, integral)
            tables.type2.add((p, rid), [r[3] for r in rows], [r[4] for r in rows])
    tables.type2.freeze()

    # step 4: per-path successor indices over the dual members
    for sc in dt.shortcuts:
        r1 = regions[sc.src]
        members = dual_sets[sc.sid]
        tables.dual_members[sc.sid] = np.array(members, dtype=np.int64)
        per_path = {}
        for v in members:
            for hi, run, pos in r1.vertex_occurrences(v):
                per_path.setdefault((hi, run), []).append((pos, v))
        for (hi, run), items in per_path.items():
            items.sort()
            tables.dual[(sc.sid, hi, run)] = SuccessorIndex(
                np.array([p for p, _ in items], dtype=np.int64),
                np.array([v for _, v in items], dtype=np.int64))

    tables.counters = {
        "step1_entries": int(tables.step1.entry_count),
        "type1_entries": int(tables.type1.entry_count),
        "type2_entries": int(tables.type2.entry_count),
        "dual_members": int(sum(len(v) for v in dual_sets.values())),
        "pstar_members": int(total_pstar),
    }
    return tables


class Phase2Engine:
    """Executes Fig. 6 over the Phase II tables."""

    def __init__(self, dt: DecompositionTree, tables: Phase2Tables):
        self.dt = dt
        self.T = dt.T
        self.tables = tables

    def query(self, u, p1out) -> Phase2Output:
        dt = self.dt
        T = self.T
        tables = self.tables
        dh = {}
        for v, d in zip(p1out.verts, p1out.dist):
            v, d = int(v), float(d)
            if v not in dh or d < dh[v]:
                dh[v] = d
        front = sorted(dh)
        seed = dict(dh)

        cur = p1out.cu
        hops = dt.shortcut_hops(cur, dt.root)
        for sid in hops:
            sc = dt.shortcuts[sid]
            r1 = dt.regions[sc.src]
            r2 = dt.regions[sc.dst]
            b2 = r2.blist

            def on_b2(v):
                i = np.searchsorted(b2, v)
                return i < len(b2) and b2[i] == v

            for p in front:
                dp = seed[p]
                if not on_b2(p):
                    got = tables.type1.get((p, sid))
                    if got is not None:
                        for q, dg in zip(got[0], got[1]):
                            q, nd = int(q), dp + float(dg)
                            if q not in dh or nd < dh[q]:
                                dh[q] = nd
                for hi, run, pos in r1.vertex_occurrences(p):
                    idx = tables.succ_index(sid, hi, run)
                    if idx is None:
                        continue
                    for hit in (idx.succ(pos), idx.pred(pos)):
                        if hit is None:
                            continue
                        pstar, ppos = hit
                        got = tables.type2.get((pstar, sc.src))
                        if got is None:
                            continue
                        dts = float(T.dist[p] + T.dist[pstar]
                                    - 2 * T.dist[T.nca(p, pstar)])
                        base = dp + dts
                        for q, dg in zip(got[0], got[1]):
                            q, nd = int(q), base + float(dg)
                            if q not in dh or nd < dh[q]:
                                dh[q] = nd
            front = [p for p in front if on_b2(p)]

        verts = np.array(sorted(dh), dtype=np.int64)
        dist = np.array([dh[int(v)] for v in verts], dtype=np.float64)
        return Phase2Output(verts, dist)
