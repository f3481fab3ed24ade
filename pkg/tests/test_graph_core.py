import pytest

from planor.errors import DisconnectedGraph, FormatError, NotPlanarEmbedding
from planor.graph_core import (
    INFINITE,
    PSEUDO,
    REAL,
    EmbeddedPlanarGraph,
    contract_degree_two,
    read_graph_text,
    split_to_degree_three,
    triangulate,
    validate_embedding,
    write_graph_text,
)

from conftest import all_pairs_reference, build_grid, build_triangle


def test_triangle_has_two_faces():
    faces = validate_embedding(build_triangle())
    assert len(faces) == 2
    for f in faces.faces:
        assert len(f) == 3


def test_grid_3x3_faces():
    g = build_grid(3, 3)
    faces = validate_embedding(g)
    assert g.n == 9 and g.m == 12
    assert len(faces) == 5  # 4 unit squares + outer


def test_k4_bad_rotation_rejected():
    # K4 with a rotation order that embeds on the torus: f = 2 so Euler fails
    g = EmbeddedPlanarGraph(4)
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    for u, v in edges:
        g.add_edge(u, v, 1, REAL)
    good = {
        0: [(0, 1), (0, 2), (0, 3)],
        1: [(0, 1), (1, 3), (1, 2)],
        2: [(0, 2), (1, 2), (2, 3)],
        3: [(0, 3), (2, 3), (1, 3)],
    }
    for v, pairs in good.items():
        g.rot[v] = [g.dart_of(edges.index(p), v) for p in pairs]
    validate_embedding(g)  # planar rotation accepted

    bad = g.copy()
    bad.rot[3] = [bad.rot[3][1], bad.rot[3][0], bad.rot[3][2]]
    with pytest.raises(NotPlanarEmbedding):
        validate_embedding(bad)


def test_disconnected_rejected():
    g = EmbeddedPlanarGraph(4)
    e0 = g.add_edge(0, 1, 1, REAL)
    e1 = g.add_edge(2, 3, 1, REAL)
    g.rot[0] = [2 * e0]
    g.rot[1] = [2 * e0 + 1]
    g.rot[2] = [2 * e1]
    g.rot[3] = [2 * e1 + 1]
    with pytest.raises(DisconnectedGraph):
        validate_embedding(g)


def test_split_identity_when_low_degree():
    g = build_triangle()
    g2, vmap = split_to_degree_three(g)
    assert g2.n == g.n and g2.m == g.m
    assert vmap.forward == [[0], [1], [2]]


def test_split_four_star_distances():
    # center 0 with 4 unit spokes; d(leaf_i, leaf_j) = 2 before and after
    g = EmbeddedPlanarGraph(5)
    spokes = [g.add_edge(0, i, 1, REAL) for i in range(1, 5)]
    g.rot[0] = [2 * e for e in spokes]
    for i, e in enumerate(spokes, start=1):
        g.rot[i] = [2 * e + 1]
    validate_embedding(g)
    before = all_pairs_reference(g)

    g2, vmap = split_to_degree_three(g)
    validate_embedding(g2)
    assert len(vmap.forward[0]) == 4
    assert all(g2.degree(v) <= 3 for v in range(g2.n))
    after = all_pairs_reference(g2)
    for a in range(5):
        for b in range(5):
            assert after[vmap.rep(a)][vmap.rep(b)] == before[a][b]


def test_split_grid_preserves_all_distances():
    g = build_grid(4, 4, weight=lambda r, c, r2, c2: 1 + ((r + 2 * c + r2) % 5))
    before = all_pairs_reference(g)
    g2, vmap = split_to_degree_three(g)
    validate_embedding(g2)
    assert all(g2.degree(v) <= 3 for v in range(g2.n))
    after = all_pairs_reference(g2)
    for a in range(g.n):
        for b in range(g.n):
            assert after[vmap.rep(a)][vmap.rep(b)] == before[a][b]


def test_split_five_wheel_hub():
    # hub of degree 5 -> path of 5 copies, embedding still valid
    g = EmbeddedPlanarGraph(6)
    rim = list(range(1, 6))
    spoke = {}
    rim_e = {}
    for i, v in enumerate(rim):
        spoke[v] = g.add_edge(0, v, 1, REAL)
    for i, v in enumerate(rim):
        w = rim[(i + 1) % 5]
        rim_e[(v, w)] = g.add_edge(v, w, 1, REAL)
    g.rot[0] = [2 * spoke[v] for v in rim]
    for i, v in enumerate(rim):
        prv = rim[(i - 1) % 5]
        nxt = rim[(i + 1) % 5]
        g.rot[v] = [
            g.dart_of(spoke[v], v),
            g.dart_of(rim_e[(prv, v)], v),
            g.dart_of(rim_e[(v, nxt)], v),
        ]
    validate_embedding(g)
    before = all_pairs_reference(g)
    g2, vmap = split_to_degree_three(g)
    validate_embedding(g2)
    assert len(vmap.forward[0]) == 5
    after = all_pairs_reference(g2)
    for a in range(6):
        for b in range(6):
            assert after[vmap.rep(a)][vmap.rep(b)] == before[a][b]


def test_triangulate_triangle_unchanged():
    g = build_triangle()
    gt = triangulate(g)
    assert gt.m == g.m
    assert all(len(f) == 3 for f in gt.faces())


def test_triangulate_square_one_chord():
    g = build_grid(2, 2)
    gt = triangulate(g)
    pseudo = [e for e in range(gt.m) if gt.kind[e] == PSEUDO]
    assert len(pseudo) == 2  # inner square + outer square, one chord each
    validate_embedding(gt)
    assert all(len(f) == 3 for f in gt.faces())


def test_triangulate_grid_edge_count():
    g = build_grid(3, 3)
    gt = triangulate(g)
    assert gt.m == 3 * gt.n - 6
    pseudo = sum(1 for e in range(gt.m) if gt.kind[e] == PSEUDO)
    assert pseudo == (3 * 9 - 6) - 12 == 9
    validate_embedding(gt)
    assert all(len(f) == 3 for f in gt.faces())


def test_triangulate_path_multigraph():
    # path a-b-c: fan over the non-simple outer walk gives the double triangle
    g = EmbeddedPlanarGraph(3)
    e0 = g.add_edge(0, 1, 2, REAL)
    e1 = g.add_edge(1, 2, 3, REAL)
    g.rot[0] = [2 * e0]
    g.rot[1] = [2 * e0 + 1, 2 * e1]
    g.rot[2] = [2 * e1 + 1]
    gt = triangulate(g)
    validate_embedding(gt)
    assert gt.m == 3
    assert all(len(f) == 3 for f in gt.faces())


def test_triangulate_preserves_real_distances():
    g = build_grid(4, 3, weight=lambda r, c, r2, c2: 1 + (r * 3 + c) % 7)
    before = all_pairs_reference(g)
    gt = triangulate(g)
    after = all_pairs_reference(gt)
    assert before == after  # pseudo edges never relax


def test_contract_path():
    g = EmbeddedPlanarGraph(3)
    e0 = g.add_edge(0, 1, 2, REAL)
    e1 = g.add_edge(1, 2, 3, REAL)
    g.rot[0] = [2 * e0]
    g.rot[1] = [2 * e0 + 1, 2 * e1]
    g.rot[2] = [2 * e1 + 1]
    g2 = contract_degree_two(g, keep={0, 2})
    live = [e for e in range(g2.m) if g2.rot[g2.eu[e]].count(2 * e) or g2.rot[g2.ev[e]].count(2 * e + 1)]
    new = [e for e in live if {g2.eu[e], g2.ev[e]} == {0, 2}]
    assert len(new) == 1
    e = new[0]
    assert g2.ew[e] == 5
    assert g2.epath[e] in ([0, 1, 2], [2, 1, 0])
    assert g2.rot[1] == []


def test_contract_cycle_parallel_edges():
    # 4-cycle, keep two opposite vertices -> two parallel weight-2 edges
    g = EmbeddedPlanarGraph(4)
    es = [g.add_edge(i, (i + 1) % 4, 1, REAL) for i in range(4)]
    for v in range(4):
        prv = es[(v - 1) % 4]
        g.rot[v] = [g.dart_of(es[v], v), g.dart_of(prv, v)]
    validate_embedding(g)
    g2 = contract_degree_two(g, keep={0, 2})
    weights = sorted(g2.ew[d >> 1] for d in g2.rot[0])
    assert weights == [2, 2]
    assert g2.rot[1] == [] and g2.rot[3] == []
    validate_embedding_sub(g2, {0, 2})


def validate_embedding_sub(g, verts):
    # Euler check restricted to the live sub-multigraph
    live_edges = {d >> 1 for v in verts for d in g.rot[v]}
    n = len(verts)
    m = len(live_edges)
    # count faces by orbit over live darts
    pos = {}
    for v in verts:
        for i, d in enumerate(g.rot[v]):
            pos[d] = i
    seen = set()
    f = 0
    for v in verts:
        for d0 in g.rot[v]:
            if d0 in seen:
                continue
            d = d0
            while True:
                seen.add(d)
                ring = g.rot[g.dart_head(d)]
                d = ring[(pos[d ^ 1] + 1) % len(ring)]
                if d == d0:
                    break
            f += 1
    assert n - m + f == 2


def test_contract_chain_matches_dijkstra(rng):
    # random series-parallel-ish chain: contracted weight equals true distance
    for trial in range(20):
        L = rng.randint(2, 12)
        g = EmbeddedPlanarGraph(L + 1)
        ws = [rng.randint(1, 9) for _ in range(L)]
        es = [g.add_edge(i, i + 1, ws[i], REAL) for i in range(L)]
        g.rot[0] = [2 * es[0]]
        for v in range(1, L):
            g.rot[v] = [2 * es[v - 1] + 1, 2 * es[v]]
        g.rot[L] = [2 * es[-1] + 1]
        ref = all_pairs_reference(g)[0][L]
        g2 = contract_degree_two(g, keep={0, L})
        new_e = g2.m - 1
        assert {g2.eu[new_e], g2.ev[new_e]} == {0, L}
        assert g2.ew[new_e] == ref == sum(ws)
        assert g2.epath[new_e][0] == g2.eu[new_e]
        assert g2.epath[new_e][-1] == g2.ev[new_e]


def test_text_format_roundtrip():
    g = build_grid(3, 4, weight=lambda r, c, r2, c2: 1 + (r + c) % 3)
    g.s = 5
    text = write_graph_text(g)
    g2 = read_graph_text(text)
    assert g2.n == g.n and g2.m == g.m and g2.s == g.s
    assert g2.eu == g.eu and g2.ev == g.ev and g2.ew == g.ew
    assert g2.rot == g.rot
    assert write_graph_text(g2) == text


def test_text_format_rejects_garbage():
    with pytest.raises(FormatError):
        read_graph_text("x 1 2 3\n")
    with pytest.raises(FormatError):
        read_graph_text("p 2 1 0\ne 0 5 1\nr 0 0\nr 1 0\n")
