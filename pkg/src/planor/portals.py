"""Portal selection on boundary shortest paths.

Given approximate distances from a source to candidate vertices sitting on
a shortest path Q, a small portal subset covers every vertex of Q: routing
through the best portal and then along Q loses at most a (1+eps) factor.
`thorup_portals` is the direct two-directional sweep; `multipass_portals`
produces the identical set from pre-sorted candidate groups without
sorting the union, advancing one cursor per group.

Threshold tests are exact: with integer weights the strict inequality is
evaluated with integer cross-multiplication against eps = num/den; with
float weights a relative slack of 2**-40 is applied instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import EmptyCandidateSet

FLOAT_SLACK = 1.0 + 2.0 ** -40


@dataclass(frozen=True)
class PathCandidates:
    """Candidate portal sites on one boundary shortest path.

    pos is strictly increasing along the path; the same graph vertex may
    appear on two paths (or twice on a cut-open boundary) but occupies one
    position per occurrence here.
    """

    pos: np.ndarray        # non-decreasing along the path
    verts: np.ndarray
    path_id: object = None

    def __len__(self):
        return len(self.pos)


@dataclass(frozen=True)
class PortalSet:
    """Ordered portals along one path with their approximate distances."""

    idx: np.ndarray    # indices into the PathCandidates arrays, ascending
    verts: np.ndarray
    pos: np.ndarray
    dist: np.ndarray
    eps: Fraction

    def __len__(self):
        return len(self.idx)


@dataclass
class PortalGroup:
    """One pre-sorted candidate subset for the multipass construction.

    idx indexes into the shared PathCandidates arrays, ascending by
    position; cursor state is kept per direction during a run.
    """

    idx: np.ndarray
    cursor: int = 0


def _as_dist_vector(dist_h, path):
    if isinstance(dist_h, dict):
        inf = float("inf")
        return np.array([dist_h.get(int(v), inf) for v in path.verts], dtype=np.float64)
    a = np.asarray(dist_h, dtype=np.float64)
    if len(a) != len(path.verts):
        raise ValueError("dist vector must align with path candidates")
    return a


def _threshold_params(eps: Fraction, integral: bool):
    if integral:
        return float(eps.denominator), float(eps.denominator + eps.numerator), 1.0
    return 1.0, 1.0 + float(eps), FLOAT_SLACK


def _pick_p0(pos, dist, live):
    # smallest distance, ties toward smaller position
    best = -1
    for i in live:
        if best < 0 or dist[i] < dist[best] or (dist[i] == dist[best] and pos[i] < pos[best]):
            best = i
    return best


def thorup_portals(dist_h, path: PathCandidates, eps: Fraction,
                   integral: bool = True) -> PortalSet:
    """Two-directional portal sweep over one path's candidates.

    The first portal minimizes the distance; each direction then adds the
    first candidate whose distance cannot be matched by routing through
    the last portal and along the path, and the extreme candidate of each
    direction always closes the set.  |portals| <= 4/eps + 4 whenever the
    distances dominate d_G.
    """
    pos = path.pos
    dist = _as_dist_vector(dist_h, path)
    live = [i for i in range(len(pos)) if dist[i] < float("inf")]
    if not live:
        raise EmptyCandidateSet("no finite-distance candidate on path")
    den, dennum, slack = _threshold_params(eps, integral)

    i0 = _pick_p0(pos, dist, live)
    chosen = {i0}
    for direction in (1, -1):
        j = i0
        seq = [i for i in live if (pos[i] > pos[i0] if direction == 1 else pos[i] < pos[i0])]
        if direction == -1:
            seq.reverse()
        for c in seq:
            lhs = den * (dist[j] + abs(pos[c] - pos[j]))
            if lhs > dennum * dist[c] * slack:
                chosen.add(c)
                j = c
        if seq:
            chosen.add(seq[-1])  # extreme candidate is always a portal

    idx = np.array(sorted(chosen), dtype=np.int64)
    return PortalSet(idx, path.verts[idx], pos[idx], dist[idx], eps)


def multipass_portals(groups: list[PortalGroup], dist_h, path: PathCandidates,
                      eps: Fraction, integral: bool = True,
                      pass_counter: list | None = None) -> PortalSet:
    """Portal construction over pre-sorted groups, one cursor per group.

    Produces exactly the same portal set as thorup_portals applied to the
    union of the groups.  Every pass either adds a portal or finishes, so
    the number of passes is at most |portals| + 1 per direction.
    """
    pos = path.pos
    dist = _as_dist_vector(dist_h, path)
    den, dennum, slack = _threshold_params(eps, integral)

    live_groups = []
    all_live = []
    for gr in groups:
        keep = [int(i) for i in gr.idx if dist[i] < float("inf")]
        if keep:
            live_groups.append(keep)
            all_live.extend(keep)
    if not all_live:
        raise EmptyCandidateSet("no finite-distance candidate on path")

    i0 = _pick_p0(pos, dist, sorted(set(all_live)))
    chosen = {i0}

    for direction in (1, -1):
        if direction == 1:
            seqs = [[i for i in ks if pos[i] > pos[i0]] for ks in live_groups]
        else:
            seqs = [list(reversed([i for i in ks if pos[i] < pos[i0]])) for ks in live_groups]
        cursors = [0] * len(seqs)
        j = i0
        extreme = None
        ext_key = None
        for ks in seqs:
            for i in ks:
                key = (abs(pos[i] - pos[i0]), direction * i)
                if ext_key is None or key > ext_key:
                    ext_key, extreme = key, i
        while True:
            if pass_counter is not None:
                pass_counter.append(direction)
            heads = []
            for gi, ks in enumerate(seqs):
                cur = cursors[gi]
                while cur < len(ks):
                    c = ks[cur]
                    lhs = den * (dist[j] + abs(pos[c] - pos[j]))
                    if lhs > dennum * dist[c] * slack:
                        break
                    cur += 1
                cursors[gi] = cur
                if cur < len(ks):
                    # walk order breaks position ties, same as the direct sweep
                    heads.append(((abs(pos[ks[cur]] - pos[i0]), direction * ks[cur]), gi))
            if not heads:
                break
            _, gi = min(heads)
            c = seqs[gi][cursors[gi]]
            chosen.add(c)
            j = c
            cursors[gi] += 1
        if extreme is not None:
            chosen.add(extreme)

    idx = np.array(sorted(chosen), dtype=np.int64)
    return PortalSet(idx, path.verts[idx], pos[idx], dist[idx], eps)


def covering_violations(portals: PortalSet, path: PathCandidates, dist_h,
                        true_dist, factor: Fraction) -> int:
    """Count candidates v with no portal p where dist(p) + d_Q(p, v) <=
    factor * true_dist(v).  Brute force; used by tests and the verifier."""
    dist = _as_dist_vector(dist_h, path)
    bad = 0
    for i in range(len(path.pos)):
        td = true_dist[i]
        if td == float("inf"):
            continue
        ok = False
        for k in range(len(portals.idx)):
            through = portals.dist[k] + abs(portals.pos[k] - path.pos[i])
            if Fraction(through) <= factor * Fraction(td):
                ok = True
                break
        bad += 0 if ok else 1
    return bad
