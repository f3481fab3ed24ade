"""Deterministic planar graph generators for the test corpus."""

from __future__ import annotations

import random

from ..graph_core import REAL, EmbeddedPlanarGraph


def gen_grid(rows: int, cols: int, weight_mode: str = "unit", seed: int = 0,
             max_w: int = 100) -> EmbeddedPlanarGraph:
    """rows x cols grid with the natural embedding.

    weight_mode "unit" gives weight 1 everywhere, "random" draws integers
    from [1, max_w] with the given seed.  Byte-identical per (args, seed).
    """
    if rows < 2 or cols < 2:
        raise ValueError("grid needs rows, cols >= 2")
    rng = random.Random(seed)

    def w():
        return 1 if weight_mode == "unit" else rng.randint(1, max_w)

    def vid(r, c):
        return r * cols + c

    g = EmbeddedPlanarGraph(rows * cols)
    eidx = {}
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                eidx[(vid(r, c), vid(r, c + 1))] = g.add_edge(
                    vid(r, c), vid(r, c + 1), w(), REAL)
            if r + 1 < rows:
                eidx[(vid(r, c), vid(r + 1, c))] = g.add_edge(
                    vid(r, c), vid(r + 1, c), w(), REAL)
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


def gen_random_planar(n: int, seed: int, max_w: int = 100) -> EmbeddedPlanarGraph:
    """Random maximal planar graph by incremental point insertion.

    Starts from a triangle and repeatedly inserts the next vertex into a
    uniformly chosen face, connecting it to the three corners.  Weights are
    integers in [1, max_w].  Deterministic per seed.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    rng = random.Random(seed)

    def w():
        return rng.randint(1, max_w)

    g = EmbeddedPlanarGraph(n)
    e01 = g.add_edge(0, 1, w(), REAL)
    e12 = g.add_edge(1, 2, w(), REAL)
    e20 = g.add_edge(2, 0, w(), REAL)
    g.rot[0] = [2 * e01, 2 * e20 + 1]
    g.rot[1] = [2 * e12, 2 * e01 + 1]
    g.rot[2] = [2 * e20, 2 * e12 + 1]
    faces = [(2 * e01, 2 * e12, 2 * e20),
             (2 * e01 + 1, 2 * e20 + 1, 2 * e12 + 1)]

    pos_cache = {}

    def insert_before(v, before_dart, new_dart):
        ring = g.rot[v]
        ring.insert(ring.index(before_dart), new_dart)

    for x in range(3, n):
        fi = rng.randrange(len(faces))
        tri = faces[fi]
        corners = [g.dart_tail(d) for d in tri]
        chords = [g.add_edge(v, x, w(), REAL) for v in corners]
        # x's ring: [x->corners[0], x->corners[2], x->corners[1]]
        g.rot[x] = [2 * chords[0] + 1, 2 * chords[2] + 1, 2 * chords[1] + 1]
        for d, e in zip(tri, chords):
            insert_before(g.dart_tail(d), d, 2 * e)
        d1, d2, d3 = tri
        a, b, c = corners
        faces[fi] = (d1, g.dart_of(chords[1], b), 2 * chords[0] + 1)
        faces.append((d2, g.dart_of(chords[2], c), 2 * chords[1] + 1))
        faces.append((d3, g.dart_of(chords[0], a), 2 * chords[2] + 1))
    return g
