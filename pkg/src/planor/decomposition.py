"""Recursive decomposition of the triangulated graph into regions.

Every separator is a fundamental cycle of the global shortest path tree:
two root paths plus one closing non-tree edge.  Splitting alternates two
weight functions (face counts at even depth, one marker unit per hole at
odd depth with three or more holes) so that even-depth regions keep at
most three holes, odd-depth at most four, and grandchildren shrink
geometrically.  Since non-tree edges form a spanning tree of the dual, a
hole face hangs off that dual tree as a leaf through its single non-tree
boundary edge; separators therefore never cut into a hole, and nesting of
holes holds by construction without re-triangulating hole interiors.

Regions are the subgraphs the oracle stores: pseudo-edges are dropped
unless they lie on a forming separator, and maximal degree-2 chains are
contracted into superedges recording their underlying walk.  A hole's
full closed walk is recorded once at birth (head of the closing dart,
down one root path to the junction, up the other, closing edge last); a
region's view of the hole is the array of surviving stop positions, and
its boundary superedges are just the walk slices between stops.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoSeparatorFound, NotAncestor, PlanorError
from .graph_core import INFINITE, PSEUDO, REAL, EmbeddedPlanarGraph
from .portals import PathCandidates
from .sssp import ShortestPathTree

RUN_A = 0  # walk prefix: closing-dart head down to the depth minimum
RUN_B = 1  # walk suffix: depth minimum up to the closing-dart tail

CHECKS = True


def csr_min(rows, cols, data, n):
    """CSR matrix where duplicate (row, col) entries keep the minimum."""
    from scipy.sparse import csr_matrix

    if len(rows) == 0:
        return csr_matrix((n, n))
    key = rows.astype(np.int64) * n + cols
    order = np.argsort(key, kind="stable")
    k = key[order]
    w = np.asarray(data, dtype=np.float64)[order]
    first = np.ones(len(k), dtype=bool)
    first[1:] = k[1:] != k[:-1]
    idx = np.cumsum(first) - 1
    out = np.full(int(first.sum()), np.inf)
    np.minimum.at(out, idx, w)
    ku = k[first]
    return csr_matrix((out, (ku // n, ku % n)), shape=(n, n))


@dataclass
class SeparatorCycle:
    """Balanced fundamental cycle: root paths to a and b plus (a, b).

    slack_used marks the rare face-weighted splits (total = 1 mod 3) where
    no fundamental cycle of the tree meets the exact 2/3 bound and the
    tight achievable bound (2W + w_max)/3 was applied instead; marker
    splits always meet 2/3 exactly.
    """

    a: int
    b: int
    closing_edge: int
    nca: int
    side_weights: tuple
    total_weight: float
    weight_kind: str  # "faces" or "holes"
    slack_used: bool = False


class HoleWalk:
    """Closed walk bounding one hole, recorded once when the hole forms.

    verts[0] is the closing dart's head; the walk runs down one root path,
    through the depth minimum (the junction, usually s), up the other root
    path to verts[-1], and the final step is the closing edge.  pw[i] is
    the walk length from position 0 to position i over the tree steps.
    """

    __slots__ = ("gid", "verts", "step_edges", "step_w", "pw", "idx_low",
                 "closing_edge", "closing_dart", "depth")

    def __init__(self, gid, verts, step_edges, step_w, idx_low,
                 closing_edge, closing_dart, depth):
        self.gid = gid
        self.verts = verts
        self.step_edges = step_edges
        self.step_w = step_w
        self.pw = np.concatenate(([0.0], np.cumsum(step_w[:-1])))
        self.idx_low = idx_low
        self.closing_edge = closing_edge
        self.closing_dart = closing_dart
        self.depth = depth

    def __len__(self):
        return len(self.verts)


@dataclass
class RegionHole:
    """One hole as a region sees it: surviving stops on the birth walk."""

    walk: HoleWalk
    surv: np.ndarray   # ascending walk positions whose vertex is in V(R)
    cut_a: int = 0     # surv[:cut_a] lies on run A (positions <= idx_low)
    cut_b: int = 0     # surv[cut_b:] lies on run B (positions >= idx_low)

    def __post_init__(self):
        lo = self.walk.idx_low
        self.cut_a = int(np.searchsorted(self.surv, lo, side="right"))
        self.cut_b = int(np.searchsorted(self.surv, lo))

    def run_positions(self, run):
        return self.surv[: self.cut_a] if run == RUN_A else self.surv[self.cut_b:]


class Region:
    """A node of the decomposition tree in contracted representation."""

    __slots__ = ("id", "parent", "children", "depth", "nforig", "vlist",
                 "re_u", "re_v", "re_w", "re_kind", "re_path", "holes",
                 "blist", "corners", "split_sep", "shortcut_ids", "tin",
                 "tout", "_csr", "occ_vert", "occ_hole", "occ_run",
                 "occ_pos", "occ_sorted")

    def __init__(self, rid, parent, depth):
        self.id = rid
        self.parent = parent
        self.children = []
        self.depth = depth
        self.nforig = 0
        self.vlist = None
        self.re_u = self.re_v = self.re_w = self.re_kind = None
        self.re_path = None
        self.holes = []
        self.blist = None
        self.corners = None
        self.split_sep = None
        self.shortcut_ids = []
        self.tin = self.tout = 0
        self._csr = None
        self.occ_vert = self.occ_hole = self.occ_run = self.occ_pos = None
        self.occ_sorted = None

    # -- membership ----------------------------------------------------

    def in_region(self, v):
        i = np.searchsorted(self.vlist, v)
        return i < len(self.vlist) and self.vlist[i] == v

    def on_boundary(self, v):
        i = np.searchsorted(self.blist, v)
        return i < len(self.blist) and self.blist[i] == v

    def vertex_occurrences(self, v):
        """(hole_idx, run, walk_pos) triples for v on this boundary."""
        order = self.occ_sorted
        keys = self.occ_vert[order]
        lo = np.searchsorted(keys, v)
        hi = np.searchsorted(keys, v, side="right")
        return [(int(self.occ_hole[k]), int(self.occ_run[k]), int(self.occ_pos[k]))
                for k in order[lo:hi]]

    # -- boundary paths -------------------------------------------------

    def run_candidates(self, hole_idx, run):
        """Surviving stops of one boundary path as portal candidates."""
        h = self.holes[hole_idx]
        ps = h.run_positions(run)
        return PathCandidates(h.walk.pw[ps], h.walk.verts[ps], (h.walk.gid, run))

    def expanded_run_candidates(self, hole_idx, run):
        """All walk stops of one boundary path (the delta_G view)."""
        w = self.holes[hole_idx].walk
        lo = w.idx_low
        ps = np.arange(0, lo + 1) if run == RUN_A else np.arange(lo, len(w.verts))
        return PathCandidates(w.pw[ps], w.verts[ps], (w.gid, run))

    def run_ids(self):
        return [(hi, run) for hi in range(len(self.holes)) for run in (RUN_A, RUN_B)]

    def graph_csr(self):
        """Contracted region graph as scipy CSR over vlist indexing.

        Parallel superedges collapse to their minimum weight."""
        if self._csr is None:
            nv = len(self.vlist)
            ui = np.searchsorted(self.vlist, self.re_u)
            vi = np.searchsorted(self.vlist, self.re_v)
            fin = np.isfinite(self.re_w) & (ui != vi)
            data = np.concatenate([self.re_w[fin], self.re_w[fin]])
            rows = np.concatenate([ui[fin], vi[fin]])
            cols = np.concatenate([vi[fin], ui[fin]])
            self._csr = csr_min(rows, cols, data, nv)
        return self._csr

    def vindex(self, v):
        i = np.searchsorted(self.vlist, v)
        if i >= len(self.vlist) or self.vlist[i] != v:
            raise PlanorError(f"vertex {v} not in region {self.id}")
        return int(i)

    def edge_steps(self, walks, i):
        """Expand region edge i to its (u, v, w) unit steps."""
        spec = self.re_path[i]
        if spec is None:
            yield int(self.re_u[i]), int(self.re_v[i]), float(self.re_w[i])
            return
        if spec[0] == "walk":
            _, gid, p, q = spec
            w = walks[gid]
            L = len(w.verts)
            count = (q - p) % L if p != q else L  # p == q wraps the full cycle
            pos = p
            for _ in range(count):
                nxt = (pos + 1) % L
                yield (int(w.verts[pos]), int(w.verts[nxt]), float(w.step_w[pos]))
                pos = nxt
        else:
            _, vs, ws = spec
            for k in range(len(ws)):
                yield int(vs[k]), int(vs[k + 1]), float(ws[k])


@dataclass
class Shortcut:
    """Stored pointer from a region to an ancestor 2^j levels up."""

    sid: int
    src: int
    dst: int
    span: int
    delta: np.ndarray = None  # delta(R1, R2) vertices


class DecompositionTree:
    """All regions plus the shortcut system over the region tree."""

    def __init__(self, regions, walks, tree, separators):
        self.regions = regions
        self.shortcuts = []
        self.shortcut_by_pair = {}
        self.walks = walks
        self.T = tree
        self.separators = separators
        self.height = max(r.depth for r in regions)
        self.root = 0
        self.vleaf = None
        self._stamp_regions()
        self.home = self._compute_homes()

    def _stamp_regions(self):
        clock = 0
        stack = [(self.root, 0)]
        while stack:
            rid, ci = stack[-1]
            reg = self.regions[rid]
            if ci == 0:
                reg.tin = clock
                clock += 1
            if ci < len(reg.children):
                stack[-1] = (rid, ci + 1)
                stack.append((reg.children[ci], 0))
            else:
                reg.tout = clock
                clock += 1
                stack.pop()

    def _compute_homes(self):
        home = {}
        for reg in self.regions:
            par = self.regions[reg.parent] if reg.parent >= 0 else None
            for v in reg.blist:
                if par is None or not par.on_boundary(v):
                    home.setdefault(int(v), []).append(reg.id)
        return home

    def is_region_ancestor(self, a, b):
        """True iff region a is an ancestor of region b (or equal)."""
        ra, rb = self.regions[a], self.regions[b]
        return ra.tin <= rb.tin and rb.tout <= ra.tout

    def region_nca(self, a, b):
        while not self.is_region_ancestor(a, b):
            a = self.regions[a].parent
        return a

    def shortcut_hops(self, r_from, r_to):
        """Greedy longest-first shortcut route from r_from up to r_to."""
        if not self.is_region_ancestor(r_to, r_from):
            raise NotAncestor(f"region {r_to} is not an ancestor of {r_from}")
        hops = []
        cur = r_from
        target_depth = self.regions[r_to].depth
        while cur != r_to:
            allowed = self.regions[cur].depth - target_depth
            best = None
            for sid in self.regions[cur].shortcut_ids:
                sc = self.shortcuts[sid]
                if sc.span <= allowed and (best is None or sc.span > best.span):
                    best = sc
            hops.append(best.sid)
            cur = best.dst
        return hops

    def delta_set(self, sid):
        return self.shortcuts[sid].delta

    def dump(self):
        """One line per region for the structural checker."""
        lines = []
        for r in self.regions:
            corners = " ".join(str(int(c)) for c in r.corners)
            lines.append(
                f"R {r.id} {r.depth} {r.parent} {len(r.holes)} {r.nforig} {corners}".rstrip()
            )
        return "\n".join(lines) + "\n"


# -- internal build structures ---------------------------------------------


class _Delta:
    """Triangulated subgraph during recursion (uncontracted)."""

    __slots__ = ("depth", "edge_set", "rot", "faces", "forig", "fpocket",
                 "holes", "sep_edges", "nforig")

    def __init__(self, depth, edge_set, rot, faces, forig, fpocket, holes, sep_edges):
        self.depth = depth
        self.edge_set = edge_set
        self.rot = rot
        self.faces = faces
        self.forig = forig
        self.fpocket = fpocket
        self.holes = holes
        self.sep_edges = sep_edges
        self.nforig = sum(forig)


class _Pool:
    """Edge data shared by all delta regions."""

    def __init__(self, g: EmbeddedPlanarGraph, tree: ShortestPathTree):
        self.eu = np.array(g.eu, dtype=np.int64)
        self.ev = np.array(g.ev, dtype=np.int64)
        self.ew = np.array(g.ew, dtype=np.float64)
        self.kind = np.array(g.kind, dtype=np.int8)
        self.is_tree = np.zeros(g.m, dtype=bool)
        pe = tree.parent_edge[tree.parent_edge >= 0]
        self.is_tree[pe] = True
        self.m = g.m

    def dart_tail(self, d):
        return int(self.eu[d >> 1]) if d & 1 == 0 else int(self.ev[d >> 1])

    def dart_head(self, d):
        return int(self.ev[d >> 1]) if d & 1 == 0 else int(self.eu[d >> 1])


def weighted_separator(delta: _Delta, weights, pool: _Pool, tree: ShortestPathTree):
    """Pick the balanced fundamental cycle with the smallest closing edge.

    weights maps face index -> nonnegative weight.  Both open sides of the
    returned cycle weigh at most 2/3 of the total; when no fundamental
    cycle of the tree attains that (possible for face counts = 1 mod 3),
    the tight achievable bound (2W + w_max)/3 applies and the separator is
    flagged.  Returns (SeparatorCycle, inside-root face, dual parents,
    dual preorder, dart of the closing edge on the inside-root face).
    """
    faces = delta.faces
    F = len(faces)
    total = sum(weights)
    if total <= 0:
        raise NoSeparatorFound("separator requested on zero total weight")

    face_of = {}
    for fi, cyc in enumerate(faces):
        for d in cyc:
            face_of[d] = fi

    # dual tree over non-tree edges (interdigitating trees)
    dual_adj = [[] for _ in range(F)]
    ndual = 0
    seen = set()
    is_tree = pool.is_tree
    for fi, cyc in enumerate(faces):
        for d in cyc:
            e = d >> 1
            if is_tree[e] or e in seen:
                continue
            seen.add(e)
            f2 = face_of[d ^ 1]
            dual_adj[fi].append((e, f2, d))
            dual_adj[f2].append((e, fi, d ^ 1))
            ndual += 1
    if ndual != F - 1:
        raise NoSeparatorFound(f"dual graph has {ndual} non-tree edges for {F} faces")

    parent_face = [-2] * F
    parent_dedge = [-1] * F
    parent_dart = [-1] * F  # dart of the dual edge lying on this face
    order = []
    stack = [0]
    parent_face[0] = -1
    while stack:
        f = stack.pop()
        order.append(f)
        for e, f2, d in dual_adj[f]:
            if parent_face[f2] == -2:
                parent_face[f2] = f
                parent_dedge[f2] = e
                parent_dart[f2] = d ^ 1
                stack.append(f2)
    if len(order) != F:
        raise NoSeparatorFound("dual tree not spanning; embedding is broken")

    sub = [0.0] * F
    for f in reversed(order):
        sub[f] += weights[f]
        if parent_face[f] >= 0:
            sub[parent_face[f]] += sub[f]

    w_max = max(weights)
    best_e = -1
    best = None
    slack = False
    for bound in (2 * total, 2 * total + w_max):
        for f in order:
            e = parent_dedge[f]
            if e < 0:
                continue
            w_in = sub[f]
            w_out = total - w_in
            if 3 * max(w_in, w_out) <= bound and (best_e < 0 or e < best_e):
                best_e = e
                best = (w_in, w_out, f, parent_dart[f])
        if best_e >= 0:
            break
        slack = True
    if best_e < 0:
        raise NoSeparatorFound("no balanced eligible fundamental cycle")

    a, b = int(pool.eu[best_e]), int(pool.ev[best_e])
    c = tree.nca(a, b)
    sep = SeparatorCycle(a, b, best_e, c, best[:2], total, "faces",
                         slack_used=slack)
    return sep, best[2], parent_face, order, best[3]


class DecompositionBuilder:
    def __init__(self, g_tri: EmbeddedPlanarGraph, tree: ShortestPathTree):
        self.g = g_tri
        self.T = tree
        self.pool = _Pool(g_tri, tree)
        self.regions: list[Region] = []
        self.walks: list[HoleWalk] = []
        self.separators: list[SeparatorCycle] = []
        self.vleaf = np.full(g_tri.n, -1, dtype=np.int64)
        self._on_walk = np.zeros(self.pool.m, dtype=bool)
        self._consumed = np.zeros(self.pool.m, dtype=bool)

    def root_delta(self):
        rot = {v: list(self.g.rot[v]) for v in range(self.g.n) if self.g.rot[v]}
        faces = self.g.faces()
        return _Delta(0, set(range(self.pool.m)), rot, faces,
                      [True] * len(faces), [-1] * len(faces), [], set())

    def _tree_path_edges(self, v, anc):
        T = self.T
        out = []
        while v != anc:
            out.append(int(T.parent_edge[v]))
            v = int(T.parent[v])
        return out

    # -- splitting -------------------------------------------------------

    def split(self, delta: _Delta):
        use_markers = (delta.depth % 2 == 1) and len(delta.holes) >= 3
        if use_markers:
            weights = [0.0] * len(delta.faces)
            markers = {h.gid for h in delta.holes}
            for fi, gid in enumerate(delta.fpocket):
                if gid in markers:
                    weights[fi] = 1.0
        else:
            weights = [1.0 if o else 0.0 for o in delta.forig]

        sep, f_in, parent_face, order, dart_in = weighted_separator(
            delta, weights, self.pool, self.T)
        sep.weight_kind = "holes" if use_markers else "faces"
        self.separators.append(sep)

        F = len(delta.faces)
        inside = [False] * F
        kids = [[] for _ in range(F)]
        for f in order:
            if parent_face[f] >= 0:
                kids[parent_face[f]].append(f)
        stack = [f_in]
        inside[f_in] = True
        while stack:
            f = stack.pop()
            for f2 in kids[f]:
                inside[f2] = True
                stack.append(f2)

        cyc_edges = set(self._tree_path_edges(sep.a, sep.nca))
        cyc_edges.update(self._tree_path_edges(sep.b, sep.nca))
        cyc_edges.add(sep.closing_edge)
        prefix_edges = set(self._tree_path_edges(sep.nca, self.T.s))

        child_in = self._make_child(delta, sep, inside, True, cyc_edges,
                                    prefix_edges, dart_in ^ 1)
        child_out = self._make_child(delta, sep, inside, False, cyc_edges,
                                     prefix_edges, dart_in)
        return sep, child_in, child_out

    def _make_child(self, delta, sep, inside, side, cyc_edges, prefix_edges, d0):
        pool = self.pool
        side_faces = [fi for fi in range(len(delta.faces)) if inside[fi] == side]
        child_edges = set(cyc_edges) | prefix_edges
        for fi in side_faces:
            for d in delta.faces[fi]:
                child_edges.add(d >> 1)

        rot = {}
        eu, ev = pool.eu, pool.ev
        for e in child_edges:
            for v in (int(eu[e]), int(ev[e])):
                if v not in rot:
                    rot[v] = [d for d in delta.rot[v] if (d >> 1) in child_edges]

        new_hole_orbit = self._trace_orbit(rot, d0)

        faces = []
        forig = []
        fpocket = []
        gids_here = set()
        for fi in side_faces:
            faces.append(delta.faces[fi])
            forig.append(delta.forig[fi])
            gid = delta.fpocket[fi]
            fpocket.append(gid)
            if gid >= 0:
                gids_here.add(gid)

        hole_by_gid = {h.gid: h for h in delta.holes}
        holes = [hole_by_gid[g] for g in sorted(gids_here)]
        hole = self._record_hole(new_hole_orbit, sep, delta.depth + 1)
        holes.append(hole)
        faces.append(tuple(new_hole_orbit))
        forig.append(False)
        fpocket.append(hole.gid)

        return _Delta(delta.depth + 1, child_edges, rot, faces, forig, fpocket,
                      holes, (delta.sep_edges & child_edges) | cyc_edges | prefix_edges)

    def _trace_orbit(self, rot, d0):
        eu, ev = self.pool.eu, self.pool.ev
        pos = {}
        orbit = []
        d = d0
        while True:
            orbit.append(d)
            e = d >> 1
            h = int(ev[e]) if d & 1 == 0 else int(eu[e])
            ring = rot[h]
            tab = pos.get(h)
            if tab is None:
                tab = {dd: i for i, dd in enumerate(ring)}
                pos[h] = tab
            d = ring[(tab[d ^ 1] + 1) % len(ring)]
            if d == d0:
                return orbit

    def _record_hole(self, orbit, sep, depth):
        pool = self.pool
        k = next(i for i, d in enumerate(orbit) if (d >> 1) == sep.closing_edge)
        walk = list(orbit[k + 1:]) + list(orbit[:k + 1])
        closing_dart = walk[-1]
        darr = np.array(walk, dtype=np.int64)
        earr = darr >> 1
        rev = (darr & 1).astype(bool)
        verts = np.where(rev, pool.ev[earr], pool.eu[earr])
        step_w = pool.ew[earr]
        depths = self.T.depth[verts]
        idx_low = int(np.argmin(depths))
        if CHECKS:
            if not pool.is_tree[earr[:-1]].all():
                raise PlanorError("hole walk contains a non-tree interior step")
            if pool.is_tree[earr[-1]]:
                raise PlanorError("hole closing step is a tree edge")
            da = np.diff(depths[: idx_low + 1])
            db = np.diff(depths[idx_low:])
            if (idx_low and not np.all(da < 0)) or \
               (idx_low < len(verts) - 1 and not np.all(db > 0)):
                raise PlanorError("hole walk is not two monotone root-path segments")
        h = HoleWalk(len(self.walks), verts, earr, step_w, idx_low,
                     sep.closing_edge, closing_dart, depth)
        self.walks.append(h)
        return h

    # -- region formation --------------------------------------------------

    def form_region(self, delta, rid, parent_rid, child_vlists, protect):
        reg = Region(rid, parent_rid, delta.depth)
        reg.nforig = delta.nforig
        pool = self.pool

        earr = np.fromiter(delta.edge_set, dtype=np.int64, count=len(delta.edge_set))
        earr.sort()
        kept_mask = pool.kind[earr] == REAL
        if delta.sep_edges:
            sepa = np.fromiter(delta.sep_edges, dtype=np.int64, count=len(delta.sep_edges))
            kept_mask |= np.isin(earr, sepa)
        kept = earr[kept_mask]
        ku, kv = pool.eu[kept], pool.ev[kept]
        verts, inv = np.unique(np.concatenate([ku, kv]), return_inverse=True)
        deg = np.bincount(inv, minlength=len(verts))
        keep_mask = deg != 2

        def force(vals):
            vals = np.asarray(vals, dtype=np.int64)
            if not len(vals) or not len(verts):
                return
            idx = np.searchsorted(verts, vals)
            ok = idx < len(verts)
            idx, vals = idx[ok], vals[ok]
            hit = verts[idx] == vals
            keep_mask[idx[hit]] = True

        if protect:
            force(sorted(protect))
        for vl in child_vlists:
            force(vl)
        for h in delta.holes:
            member = np.searchsorted(verts, h.verts)
            on = verts.take(member, mode="clip") == h.verts
            if on.any() and not keep_mask[member[on]].any():
                keep_mask[member[on][np.argmin(h.verts[on])]] = True
        if len(verts) and not keep_mask.any():
            keep_mask[0] = True

        vlist = verts[keep_mask]
        reg.vlist = vlist

        re_u, re_v, re_w, re_kind, re_path = [], [], [], [], []

        # boundary superedges: walk slices between consecutive stops
        occ_v, occ_h, occ_r, occ_p = [], [], [], []
        bset = []
        corners = []
        on_walk = self._on_walk
        consumed = self._consumed
        touched = []
        for h in delta.holes:
            on_walk[h.step_edges] = True
            touched.append(h.step_edges)
        for hi, h in enumerate(delta.holes):
            wv = h.verts
            if len(vlist):
                surv_mask = vlist.take(np.searchsorted(vlist, wv), mode="clip") == wv
            else:
                surv_mask = np.zeros(len(wv), bool)
            surv = np.nonzero(surv_mask)[0].astype(np.int64)
            rh = RegionHole(h, surv)
            reg.holes.append(rh)
            for run in (RUN_A, RUN_B):
                ps = rh.run_positions(run)
                if len(ps) == 0:
                    continue
                vs = wv[ps]
                occ_v.append(vs)
                occ_h.append(np.full(len(ps), hi, dtype=np.int64))
                occ_r.append(np.full(len(ps), run, dtype=np.int64))
                occ_p.append(ps)
                bset.append(vs)
                corners.append(int(vs[0]))
                corners.append(int(vs[-1]))
            L = len(wv)
            ns = len(surv)
            if ns == 0:
                continue
            for i in range(ns):
                p = int(surv[i])
                q = int(surv[(i + 1) % ns])
                first_e = int(h.step_edges[p])
                if consumed[first_e]:
                    continue
                if q > p:
                    steps = h.step_edges[p:q]
                    w = float(h.pw[q] - h.pw[p])
                else:  # wrap through the closing step
                    steps = np.concatenate([h.step_edges[p:], h.step_edges[:q]])
                    w = float(h.pw[L - 1] - h.pw[p]) + float(h.step_w[L - 1]) + float(h.pw[q])
                kd = REAL if np.isfinite(w) and (pool.kind[steps] == REAL).all() else PSEUDO
                consumed[steps] = True
                re_u.append(int(wv[p]))
                re_v.append(int(wv[q]))
                re_w.append(w if kd == REAL else INFINITE)
                re_kind.append(kd)
                re_path.append(("walk", h.gid, p, q))

        # plain and chained interior edges off the walks
        nw = kept[~on_walk[kept]]
        for arr in touched:
            on_walk[arr] = False
        for h in delta.holes:
            consumed[h.step_edges] = False

        if len(nw):
            nu, nv = pool.eu[nw], pool.ev[nw]
            uk = vlist.take(np.searchsorted(vlist, nu), mode="clip") == nu
            vk = vlist.take(np.searchsorted(vlist, nv), mode="clip") == nv
            plain = uk & vk
            for e, u, v in zip(nw[plain], nu[plain], nv[plain]):
                re_u.append(int(u))
                re_v.append(int(v))
                re_w.append(float(pool.ew[e]))
                re_kind.append(int(pool.kind[e]))
                re_path.append(None)
            rest = nw[~plain]
            if len(rest):
                self._contract_interior_chains(rest, set(vlist.tolist()),
                                               re_u, re_v, re_w, re_kind, re_path)

        reg.re_u = np.array(re_u, dtype=np.int64)
        reg.re_v = np.array(re_v, dtype=np.int64)
        reg.re_w = np.array(re_w, dtype=np.float64)
        reg.re_kind = np.array(re_kind, dtype=np.int64)
        reg.re_path = re_path

        reg.blist = (np.unique(np.concatenate(bset)) if bset
                     else np.empty(0, dtype=np.int64))
        reg.corners = np.array(sorted(set(corners)), dtype=np.int64)
        if occ_v:
            reg.occ_vert = np.concatenate(occ_v)
            reg.occ_hole = np.concatenate(occ_h)
            reg.occ_run = np.concatenate(occ_r)
            reg.occ_pos = np.concatenate(occ_p)
        else:
            z = np.empty(0, dtype=np.int64)
            reg.occ_vert = reg.occ_hole = reg.occ_run = reg.occ_pos = z
        reg.occ_sorted = np.argsort(reg.occ_vert, kind="stable")

        if delta.nforig <= 2:
            # any vertex with a kept edge here can seed queries from this leaf
            for v in verts:
                v = int(v)
                if self.vleaf[v] < 0:
                    self.vleaf[v] = rid
        return reg

    def _contract_interior_chains(self, edges, keepset,
                                  re_u, re_v, re_w, re_kind, re_path):
        pool = self.pool
        adj = {}
        for e in edges:
            e = int(e)
            for x in (int(pool.eu[e]), int(pool.ev[e])):
                adj.setdefault(x, []).append(e)
        consumed = set()
        for v0 in sorted(adj):
            if v0 in keepset or len(adj[v0]) != 2:
                continue
            if any(e in consumed for e in adj[v0]):
                continue
            sides = []
            for e0 in adj[v0]:
                chain = []
                prev, e = v0, e0
                while True:
                    nxt = int(pool.ev[e]) if int(pool.eu[e]) == prev else int(pool.eu[e])
                    chain.append((e, nxt))
                    if nxt in keepset or len(adj.get(nxt, ())) != 2 or nxt == v0:
                        break
                    es = adj[nxt]
                    e = es[0] if es[0] != e else es[1]
                    prev = nxt
                sides.append(chain)
            left, right = sides
            x, y = left[-1][1], right[-1][1]
            if x == v0 or y == v0:
                continue
            chain_edges = [e for e, _ in reversed(left)] + [e for e, _ in right]
            vs = [x]
            for e in chain_edges:
                vs.append(int(pool.ev[e]) if int(pool.eu[e]) == vs[-1] else int(pool.eu[e]))
            ws = [float(pool.ew[e]) for e in chain_edges]
            kd = REAL if all(pool.kind[e] == REAL for e in chain_edges) else PSEUDO
            re_u.append(x)
            re_v.append(y)
            re_w.append(sum(ws) if kd == REAL else INFINITE)
            re_kind.append(kd)
            re_path.append(("chain", vs, ws))
            consumed.update(chain_edges)

    # -- driver --------------------------------------------------------------

    def build(self):
        # ids are assigned in preorder; regions are formed post-order so a
        # parent keeps every vertex that survived in either child
        order = []
        stack = [(self.root_delta(), -1)]
        pending = {}
        while stack:
            delta, parent_rid = stack.pop()
            rid = len(order)
            order.append(None)
            if delta.nforig > 2:
                sep, child_in, child_out = self.split(delta)
                pending[rid] = (delta, parent_rid, sep, 2, [])
                stack.append((child_out, rid))
                stack.append((child_in, rid))
            else:
                reg = self.form_region(delta, rid, parent_rid, [], set())
                order[rid] = reg
                self._bubble_up(order, pending, parent_rid, reg)
        if any(r is None for r in order):
            raise PlanorError("decomposition left unformed regions")
        self.regions = order
        for rid, reg in enumerate(self.regions):
            if reg.parent >= 0:
                self.regions[reg.parent].children.append(rid)
        return self

    def _bubble_up(self, order, pending, parent_rid, reg):
        while parent_rid >= 0:
            delta, gp, sep, waiting, vlists = pending[parent_rid]
            vlists.append(reg.vlist)
            waiting -= 1
            pending[parent_rid] = (delta, gp, sep, waiting, vlists)
            if waiting:
                return
            preg = self.form_region(delta, parent_rid, gp, vlists, {sep.a, sep.b})
            preg.split_sep = sep
            order[parent_rid] = preg
            del pending[parent_rid]
            parent_rid, reg = gp, preg


def decompose(g_tri: EmbeddedPlanarGraph, tree: ShortestPathTree) -> DecompositionTree:
    """Build the full decomposition tree with shortcuts and delta sets."""
    b = DecompositionBuilder(g_tri, tree)
    b.build()
    dt = DecompositionTree(b.regions, b.walks, tree, b.separators)
    dt.vleaf = b.vleaf
    attach_shortcuts(dt)
    return dt


def attach_shortcuts(dt: DecompositionTree):
    """Add shortcuts per the divisibility rule and compute delta sets."""
    regions = dt.regions

    def ancestor(rid, levels):
        r = rid
        for _ in range(levels):
            r = regions[r].parent
        return r

    sid = 0
    shortcuts = []
    bsets = {}
    for reg in regions:
        d = reg.depth
        if d == 0:
            continue
        i = (d & -d).bit_length() - 1  # largest i with 2^i | d
        span = 1
        for j in range(i + 1):
            dst = ancestor(reg.id, span)
            if dst not in bsets:
                bsets[dst] = set(int(x) for x in regions[dst].blist)
            sc = Shortcut(sid, reg.id, dst, span)
            sc.delta = _delta_set(reg, bsets[dst])
            shortcuts.append(sc)
            reg.shortcut_ids.append(sid)
            sid += 1
            span <<= 1
    dt.shortcuts = shortcuts
    dt.shortcut_by_pair = {(sc.src, sc.dst): sc for sc in shortcuts}
    return dt


def _delta_set(r1: Region, b2: set):
    """Last vertex from s of each boundary path of r1 still on delta r2."""
    out = set()
    for hi, run in r1.run_ids():
        h = r1.holes[hi]
        ps = h.run_positions(run)
        if len(ps) == 0:
            continue
        vs = h.walk.verts[ps]
        # run A walks tip -> junction, run B junction -> tip
        it = vs if run == RUN_A else vs[::-1]
        for v in it:
            v = int(v)
            if v in b2:
                out.add(v)
                break
    return np.array(sorted(out), dtype=np.int64)
