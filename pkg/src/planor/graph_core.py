"""Embedded planar multigraphs: rotation systems, faces, and the three
distance-preserving transformations (degree-3 split, fan triangulation,
degree-2 contraction) the decomposition is built on.

A dart is `2*e + side`: side 0 runs eu[e] -> ev[e], side 1 the reverse.
rot[v] lists the darts leaving v in clockwise order.  Faces are the orbits
of d -> rot[head(d)][pos(reverse(d)) + 1], so every dart lies on exactly
one face and Euler's formula pins the face count of a sphere embedding.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DisconnectedGraph,
    FormatError,
    NotPlanarEmbedding,
    PlanorError,
)

INFINITE = float("inf")

REAL = 0
PSEUDO = 1


class EmbeddedPlanarGraph:
    """Planar multigraph with an explicit rotation system.

    Vertices are 0..n-1.  Edge k has endpoints (eu[k], ev[k]), weight ew[k]
    (INFINITE for pseudo edges) and kind REAL or PSEUDO.  epath[k], when not
    None, is the full vertex chain a contracted edge stands for, oriented
    from eu[k] to ev[k].
    """

    def __init__(self, n, s=0):
        self.n = n
        self.s = s
        self.eu: list[int] = []
        self.ev: list[int] = []
        self.ew: list[float] = []
        self.kind: list[int] = []
        self.epath: list[list[int] | None] = []
        self.rot: list[list[int]] = [[] for _ in range(n)]

    def add_edge(self, u, v, w, kind=REAL, path=None):
        e = len(self.eu)
        self.eu.append(u)
        self.ev.append(v)
        self.ew.append(w)
        self.kind.append(kind)
        self.epath.append(path)
        return e

    @property
    def m(self):
        return len(self.eu)

    def dart_tail(self, d):
        return self.eu[d >> 1] if d & 1 == 0 else self.ev[d >> 1]

    def dart_head(self, d):
        return self.ev[d >> 1] if d & 1 == 0 else self.eu[d >> 1]

    def dart_of(self, e, tail):
        if self.eu[e] == tail:
            return 2 * e
        if self.ev[e] == tail:
            return 2 * e + 1
        raise PlanorError(f"edge {e} not incident to {tail}")

    def degree(self, v):
        return len(self.rot[v])

    def faces(self):
        """Enumerate the face orbits of the rotation system."""
        pos = {}
        for v in range(self.n):
            for i, d in enumerate(self.rot[v]):
                pos[d] = i
        seen = set()
        out = []
        for v in range(self.n):
            for d0 in self.rot[v]:
                if d0 in seen:
                    continue
                cyc = []
                d = d0
                while True:
                    cyc.append(d)
                    seen.add(d)
                    r = d ^ 1
                    ring = self.rot[self.dart_head(d)]
                    d = ring[(pos[r] + 1) % len(ring)]
                    if d == d0:
                        break
                out.append(tuple(cyc))
        return out

    def copy(self):
        g = EmbeddedPlanarGraph(self.n, self.s)
        g.eu = list(self.eu)
        g.ev = list(self.ev)
        g.ew = list(self.ew)
        g.kind = list(self.kind)
        g.epath = [p if p is None else list(p) for p in self.epath]
        g.rot = [list(r) for r in self.rot]
        return g

    def real_adjacency(self):
        """Vertex -> list of (edge, neighbor) over real edges only."""
        adj = [[] for _ in range(self.n)]
        for e in range(self.m):
            if self.kind[e] == REAL:
                adj[self.eu[e]].append((e, self.ev[e]))
                adj[self.ev[e]].append((e, self.eu[e]))
        return adj


@dataclass
class FaceList:
    """Faces of a validated embedding, one dart cycle per face."""

    faces: list[tuple[int, ...]]

    def __len__(self):
        return len(self.faces)

    def face_vertices(self, g, i):
        return [g.dart_tail(d) for d in self.faces[i]]


@dataclass
class VertexMap:
    """Tracks vertex splitting: original id <-> its copies in the split graph."""

    forward: list[list[int]]
    backward: list[int]

    def rep(self, v_orig):
        """Canonical split copy of an original vertex."""
        return self.forward[v_orig][0]

    @staticmethod
    def identity(n):
        return VertexMap([[v] for v in range(n)], list(range(n)))


def validate_embedding(g: EmbeddedPlanarGraph) -> FaceList:
    """Check that the rotation system embeds g on the sphere; return faces.

    Raises NotPlanarEmbedding when the Euler check fails and
    DisconnectedGraph when g has more than one component.
    """
    seen_darts = bytearray(2 * g.m)
    for v in range(g.n):
        for d in g.rot[v]:
            if d >= 2 * g.m or g.dart_tail(d) != v:
                raise NotPlanarEmbedding(f"dart {d} listed at wrong vertex {v}")
            if seen_darts[d]:
                raise NotPlanarEmbedding(f"dart {d} appears twice")
            seen_darts[d] = 1
    if not all(seen_darts):
        raise NotPlanarEmbedding("some dart missing from the rotation system")
    for e in range(g.m):
        if g.kind[e] == PSEUDO:
            if g.ew[e] != INFINITE:
                raise NotPlanarEmbedding(f"pseudo edge {e} must have INFINITE weight")
        elif not (0 <= g.ew[e] < INFINITE):
            raise NotPlanarEmbedding(f"real edge {e} needs finite weight >= 0")

    if _component_count(g) > 1:
        raise DisconnectedGraph("oracle requires a connected graph")

    f = len(g.faces()) if g.m else 1
    if g.n - g.m + f != 2:
        raise NotPlanarEmbedding(f"Euler check failed: n={g.n} m={g.m} f={f}")
    return FaceList(g.faces())


def _component_count(g):
    comp = [-1] * g.n
    c = 0
    for v0 in range(g.n):
        if comp[v0] >= 0:
            continue
        stack = [v0]
        comp[v0] = c
        while stack:
            v = stack.pop()
            for d in g.rot[v]:
                h = g.dart_head(d)
                if comp[h] < 0:
                    comp[h] = c
                    stack.append(h)
        c += 1
    return c


def split_to_degree_three(g: EmbeddedPlanarGraph):
    """Replace every vertex of degree d > 3 by a path of d copies joined by
    zero-weight real edges, attaching incident edges in rotation order.

    Pairwise distances between original vertices are preserved exactly.
    Returns (split graph, VertexMap).
    """
    degs = [g.degree(v) for v in range(g.n)]
    if all(d <= 3 for d in degs):
        return g.copy(), VertexMap.identity(g.n)

    n2 = g.n
    forward = [[v] for v in range(g.n)]
    backward = list(range(g.n))
    for v in range(g.n):
        if degs[v] > 3:
            extra = list(range(n2, n2 + degs[v] - 1))
            n2 += degs[v] - 1
            forward[v] = [v] + extra
            backward.extend([v] * (degs[v] - 1))

    g2 = EmbeddedPlanarGraph(n2, s=g.s)
    g2.eu = list(g.eu)
    g2.ev = list(g.ev)
    g2.ew = list(g.ew)
    g2.kind = list(g.kind)
    g2.epath = [None] * g.m
    g2.rot = [[] for _ in range(n2)]

    for v in range(g.n):
        copies = forward[v]
        if len(copies) == 1:
            g2.rot[v] = list(g.rot[v])
            continue
        darts = g.rot[v]
        for i, d in enumerate(darts):
            e = d >> 1
            if d & 1 == 0:
                g2.eu[e] = copies[i]
            else:
                g2.ev[e] = copies[i]
        links = [g2.add_edge(copies[i], copies[i + 1], 0, REAL)
                 for i in range(len(copies) - 1)]
        last = len(copies) - 1
        for i, c in enumerate(copies):
            if i == 0:
                g2.rot[c] = [darts[0], g2.dart_of(links[0], c)]
            elif i == last:
                g2.rot[c] = [g2.dart_of(links[i - 1], c), darts[i]]
            else:
                g2.rot[c] = [g2.dart_of(links[i - 1], c), darts[i],
                             g2.dart_of(links[i], c)]
    g2.s = forward[g.s][0]
    return g2, VertexMap(forward, backward)


def triangulate(g: EmbeddedPlanarGraph) -> EmbeddedPlanarGraph:
    """Fan-triangulate every face, adding INFINITE-weight pseudo edges.

    The fan anchor is the lowest-id vertex among those appearing exactly
    once on the face walk; real edge ids are preserved.
    """
    gt = g.copy()
    for walk in g.faces():
        fan_triangulate_face(gt, walk)
    return gt


def fan_triangulate_face(g, walk, kind=PSEUDO, chord_sink=None):
    """Split one face walk into triangles with chords from a fan anchor.

    `walk` must be a valid dart cycle of g's current rotation system.  New
    edge ids are appended to chord_sink when given.  Returns the dart
    triangles covering the face, or None when the walk has length <= 3.
    """
    L = len(walk)
    if L <= 3:
        return None
    verts = [g.dart_tail(d) for d in walk]
    mult = {}
    for v in verts:
        mult[v] = mult.get(v, 0) + 1
    once = [v for v, c in mult.items() if c == 1]
    if not once:
        raise PlanorError("no fan anchor: every vertex repeats on face walk")
    a = min(once)
    k = verts.index(a)
    walk = list(walk[k:]) + list(walk[:k])
    verts = verts[k:] + verts[:k]

    chi = []
    gamma_before = {}  # walk dart d_j -> gamma dart to splice just before it
    for j in range(2, L - 1):
        e = g.add_edge(a, verts[j], INFINITE, kind)
        if chord_sink is not None:
            chord_sink.append(e)
        chi.append(2 * e)
        gamma_before[walk[j]] = 2 * e + 1

    by_vertex = {}
    for dj, gam in gamma_before.items():
        by_vertex.setdefault(g.dart_tail(dj), {})[dj] = gam
    for v, table in by_vertex.items():
        ring = []
        for d in g.rot[v]:
            if d in table:
                ring.append(table[d])
            ring.append(d)
        g.rot[v] = ring

    ring = []
    for d in g.rot[a]:
        if d == walk[0]:
            ring.extend(reversed(chi))
        ring.append(d)
    g.rot[a] = ring

    tris = []
    for j in range(1, L - 1):
        left = walk[0] if j == 1 else chi[j - 2]
        right = walk[L - 1] if j == L - 2 else chi[j - 1] ^ 1
        tris.append((left, walk[j], right))
    return tris


def contract_degree_two(sub: EmbeddedPlanarGraph, keep) -> EmbeddedPlanarGraph:
    """Contract maximal chains of degree-2 vertices not in `keep`.

    Each produced edge records the full underlying vertex chain in epath,
    so distances between kept vertices are preserved exactly.  Contracted
    vertices keep their ids but lose all incident darts.
    """
    keep = set(keep)
    g = sub.copy()
    for v in range(g.n):
        if len(g.rot[v]) == 2 and v not in keep:
            _contract_chain_at(g, v, keep)
    return g


def expand_dart_path(g, d):
    """Vertex chain represented by one dart, honoring contracted epaths."""
    e = d >> 1
    seg = g.epath[e]
    if seg is None:
        return [g.dart_tail(d), g.dart_head(d)]
    return list(seg) if d & 1 == 0 else list(reversed(seg))


def _contract_chain_at(g, v0, keep):
    if len(g.rot[v0]) != 2 or v0 in keep:
        return
    sides = []
    for d0 in list(g.rot[v0]):
        darts = []
        d = d0
        while True:
            darts.append(d)
            nxt = g.dart_head(d)
            if nxt in keep or len(g.rot[nxt]) != 2 or nxt == v0:
                break
            ring = g.rot[nxt]
            d = ring[0] if ring[0] != (d ^ 1) else ring[1]
        sides.append(darts)
    left, right = sides
    x = g.dart_head(left[-1])
    y = g.dart_head(right[-1])
    if x == v0 or y == v0:
        # closed cycle of unkept degree-2 vertices; nothing to anchor on
        return

    seq = [d ^ 1 for d in reversed(left)] + right  # darts x -> ... -> y
    chain = [x]
    w = 0
    real = True
    for d in seq:
        e = d >> 1
        chain.extend(expand_dart_path(g, d)[1:])
        w += g.ew[e]
        real = real and g.kind[e] == REAL
    e_new = g.add_edge(x, y, w if real else INFINITE,
                       REAL if real else PSEUDO, path=chain)

    first = seq[0]
    last = seq[-1]
    g.rot[x][g.rot[x].index(first)] = 2 * e_new
    g.rot[y][g.rot[y].index(last ^ 1)] = 2 * e_new + 1
    for d in seq[:-1]:
        g.rot[g.dart_head(d)] = []


# -- graph text format ---------------------------------------------------
#
#   p <n> <m> <s>
#   e <u> <v> <w>        (m lines; edge ids are 0-based line order)
#   r <v> <e1> <e2> ...  (n lines; incident edge ids in clockwise order)


def parse_weight(tok: str):
    try:
        return int(tok)
    except ValueError:
        return float(tok)


def format_weight(w) -> str:
    if w == INFINITE:
        return "inf"
    if float(w).is_integer():
        return str(int(w))
    return repr(float(w))


def write_graph_text(g: EmbeddedPlanarGraph) -> str:
    lines = [f"p {g.n} {g.m} {g.s}"]
    for e in range(g.m):
        lines.append(f"e {g.eu[e]} {g.ev[e]} {format_weight(g.ew[e])}")
    for v in range(g.n):
        lines.append("r " + " ".join([str(v)] + [str(d >> 1) for d in g.rot[v]]))
    return "\n".join(lines) + "\n"


def read_graph_text(text: str) -> EmbeddedPlanarGraph:
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0][0] != "p" or len(lines[0]) != 4:
        raise FormatError("missing 'p <n> <m> <s>' header")
    n, m, s = (int(tok) for tok in lines[0][1:])
    if not 0 <= s < max(n, 1):
        raise FormatError(f"source {s} out of range")
    g = EmbeddedPlanarGraph(n, s=s)
    body = lines[1:]
    if len(body) != m + n:
        raise FormatError(f"expected {m} edge and {n} rotation lines, got {len(body)}")
    for row in body[:m]:
        if row[0] != "e" or len(row) != 4:
            raise FormatError(f"bad edge line: {' '.join(row)}")
        u, v = int(row[1]), int(row[2])
        if not (0 <= u < n and 0 <= v < n):
            raise FormatError(f"edge endpoint out of range: {' '.join(row)}")
        g.add_edge(u, v, parse_weight(row[3]), REAL)
    seen = set()
    for row in body[m:]:
        if row[0] != "r":
            raise FormatError(f"bad rotation line: {' '.join(row)}")
        v = int(row[1])
        if v in seen:
            raise FormatError(f"duplicate rotation line for vertex {v}")
        seen.add(v)
        used = set()
        for tok in row[2:]:
            e = int(tok)
            if not 0 <= e < m:
                raise FormatError(f"rotation of {v} references edge {e}")
            if g.eu[e] == v and (e, 0) not in used:
                used.add((e, 0))
                g.rot[v].append(2 * e)
            elif g.ev[e] == v and (e, 1) not in used:
                used.add((e, 1))
                g.rot[v].append(2 * e + 1)
            else:
                raise FormatError(f"edge {e} not incident to {v} (or repeated)")
    if len(seen) != n:
        raise FormatError("rotation lines missing for some vertices")
    return g
