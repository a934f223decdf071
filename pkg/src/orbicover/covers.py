"""Finite orbifold covering maps between orbicomplexes.

Covers are concrete combinatorial maps: graph vertices/edges map to
vertices/edge-paths (paths of length two realize the folding of an edge
over an unfolded reflection wall), pieces map with a local degree, boundary
segments map to segment paths, and cone fibers are listed explicitly.
``verify_covering`` re-checks all of it from scratch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .orbicore import (
    FREE,
    MIRROR,
    MarkedGraph,
    Orbicomplex,
    OrbicoverError,
    Piece,
    SegRef,
    all_attachment_circuits,
    _canonical_cycle,
    directed_ends,
    disk_with_cones,
    is_wall,
    local_order,
    piece_orbifold_euler,
    euler_characteristic,
    recompute_multiplicities,
    require_valid,
    rotation_from_circuits,
    surface_with_boundary,
    wall_mark,
)


class MismatchedComplexes(OrbicoverError):
    pass


class NotAPolygon(OrbicoverError):
    pass


class NotADiskOrbifold(OrbicoverError):
    pass


class NotAHomomorphism(OrbicoverError):
    pass


class NotSurjective(OrbicoverError):
    pass


class MirrorsPresent(OrbicoverError):
    pass


class UnsupportedPiece(OrbicoverError):
    pass


class BadGenus(OrbicoverError):
    pass


Step = tuple[int, int, int]  # (target circle, target segment, direction)


@dataclass
class CoveringMap:
    source: Orbicomplex
    target: Orbicomplex
    degree: int
    vertex_map: dict[str, str] = field(default_factory=dict)
    edge_map: dict[str, list[tuple[str, int]]] = field(default_factory=dict)
    piece_map: dict[str, tuple[str, int]] = field(default_factory=dict)
    segment_map: dict[SegRef, list[Step]] = field(default_factory=dict)
    cone_fibers: dict[tuple[str, int], list[tuple]] = field(default_factory=dict)


@dataclass(frozen=True)
class CheckResult:
    condition: str
    status: str
    witness: Optional[str] = None


@dataclass
class CoverReport:
    degree: int
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.status == "PASS" for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.status == "FAIL"]

    def __str__(self) -> str:
        head = "PASS" if self.passed else "FAIL"
        lines = [f"{head} degree={self.degree}"]
        for c in self.checks:
            w = f" ({c.witness})" if c.witness else ""
            lines.append(f"  {c.condition}: {c.status}{w}")
        return "\n".join(lines)


def single_piece_complex(piece: Piece) -> Orbicomplex:
    return Orbicomplex(pieces=[piece], graph=MarkedGraph(), attachments={})


def identity_covering(c: Orbicomplex) -> CoveringMap:
    """The degree-1 covering of a complex by itself."""
    f = CoveringMap(
        source=c,
        target=c,
        degree=1,
        vertex_map={v: v for v in c.graph.marks},
        edge_map={e: [(e, 1)] for e in c.graph.edges},
        piece_map={p.id: (p.id, 1) for p in c.pieces},
    )
    for p in c.pieces:
        for ci, si, _kind in p.segments():
            f.segment_map[(p.id, ci, si)] = [(ci, si, 1)]
        for j in range(len(p.cones)):
            f.cone_fibers[(p.id, j)] = [("cone", p.id, j)]
    return f


# ---------------------------------------------------------------------------
# verification


def _check_references(f: CoveringMap) -> None:
    src_pieces = set(f.source.piece_ids())
    tgt_pieces = set(f.target.piece_ids())
    for v, w in f.vertex_map.items():
        if v not in f.source.graph.marks or w not in f.target.graph.marks:
            raise MismatchedComplexes(f"vertex_map {v!r} -> {w!r}")
    for e, path in f.edge_map.items():
        if e not in f.source.graph.edges:
            raise MismatchedComplexes(f"edge_map key {e!r}")
        for te, _d in path:
            if te not in f.target.graph.edges:
                raise MismatchedComplexes(f"edge_map {e!r} -> {te!r}")
    for p, (q, _l) in f.piece_map.items():
        if p not in src_pieces or q not in tgt_pieces:
            raise MismatchedComplexes(f"piece_map {p!r} -> {q!r}")
    for (q, j) in f.cone_fibers:
        if q not in tgt_pieces or j >= len(f.target.piece(q).cones):
            raise MismatchedComplexes(f"cone_fibers key ({q!r}, {j})")


def _junctions_of_step(t: int, step: Step) -> tuple[int, int]:
    """(start, end) junction indices of a step on a circle of t segments."""
    _ci, si, d = step
    if d == 1:
        return si, (si + 1) % t
    return (si + 1) % t, si


def _junction_kinds(circle: tuple[str, ...], j: int) -> tuple[str, str]:
    return circle[(j - 1) % len(circle)], circle[j % len(circle)]


def graph_covering_violations(f: CoveringMap) -> list[str]:
    """Condition: the induced map of attaching graphs is an orbifold graph
    covering (after canonical subdivision of folded source edges).

    At a source vertex of local order k' over a target vertex of order k,
    every target half-edge must have exactly k/k' preimages in the source
    star; order-2 marked targets may unfold through unmarked bivalent
    source points (local degree 2).
    """
    out: list[str] = []
    src, tgt = f.source.graph, f.target.graph
    for v in src.vertices():
        if v not in f.vertex_map:
            out.append(f"vertex {v} has no image")
    for e in src.edge_ids():
        if e not in f.edge_map:
            out.append(f"edge {e} has no image path")
    if out:
        return out

    # star of each source vertex: target darts hit by its half-edges;
    # interior subdivision points of folded edges are extra (plain) vertices
    stars: dict[tuple, list[tuple[str, int]]] = {}

    def tgt_dart(edge: str, direction: int) -> tuple[str, int]:
        return (edge, 0 if direction == 1 else 1)

    def rev(d: tuple[str, int]) -> tuple[str, int]:
        return (d[0], 1 - d[1])

    for v in src.vertices():
        stars[("v", v)] = []
    for e in src.edge_ids():
        path = f.edge_map[e]
        u, v = src.edges[e]
        if not path:
            out.append(f"edge {e}: empty image path")
            continue
        # endpoint and concatenation consistency
        walk = [directed_ends(tgt, te, d) for te, d in path]
        if walk[0][0] != f.vertex_map[u]:
            out.append(f"edge {e}: path starts at {walk[0][0]}, not image of {u}")
        if walk[-1][1] != f.vertex_map[v]:
            out.append(f"edge {e}: path ends at {walk[-1][1]}, not image of {v}")
        for i in range(len(walk) - 1):
            if walk[i][1] != walk[i + 1][0]:
                out.append(f"edge {e}: image path broken at step {i}")
        stars[("v", u)].append(tgt_dart(*path[0]))
        stars[("v", v)].append(rev(tgt_dart(*path[-1])))
        for i in range(len(path) - 1):
            key = ("sub", e, i)
            stars[key] = [rev(tgt_dart(*path[i])), tgt_dart(*path[i + 1])]
    if out:
        return out

    fibers: dict[str, list[tuple]] = {w: [] for w in tgt.vertices()}
    for key, star in stars.items():
        if key[0] == "v":
            w = f.vertex_map[key[1]]
            order = local_order(src.marks[key[1]])
        else:
            e, i = key[1], key[2]
            te, d = f.edge_map[e][i]
            w = directed_ends(tgt, te, d)[1]
            order = 1
        fibers[w].append((key, order))
        tgt_order = local_order(tgt.marks[w])
        if tgt_order % order != 0:
            out.append(f"{key}: local order {order} does not divide target order {tgt_order}")
            continue
        local_degree = tgt_order // order
        w_darts = [d for d in tgt.darts() if tgt.dart_tail(d) == w]
        for d in w_darts:
            hits = sum(1 for x in star if x == d)
            if hits != local_degree:
                out.append(f"{key}: target dart {d} covered {hits} times, expected {local_degree}")
        if len(star) != local_degree * len(w_darts):
            out.append(f"{key}: star size {len(star)} != {local_degree * len(w_darts)}")

    for w, fiber in fibers.items():
        total = sum(
            Fraction(local_order(tgt.marks[w]), order) for _key, order in fiber
        )
        if total != f.degree:
            out.append(f"vertex {w}: fiber sum {total} != degree {f.degree}")
    # every target edge covered exactly `degree` times
    for te in tgt.edge_ids():
        hits = sum(
            sum(1 for (x, _d) in path if x == te) for path in f.edge_map.values()
        )
        if hits != f.degree:
            out.append(f"edge {te}: covered {hits} times, expected {f.degree}")
    return out


def _piece_boundary_violations(f: CoveringMap, pid: str) -> list[str]:
    out: list[str] = []
    src_piece = f.source.piece(pid)
    tgt_pid, local_degree = f.piece_map[pid]
    tgt_piece = f.target.piece(tgt_pid)

    coverage: dict[tuple[int, int], int] = {
        (ci, si): 0 for ci, si, _k in tgt_piece.segments()
    }

    for ci, circle in enumerate(src_piece.boundary):
        t = len(circle)
        steps_all: list[Step] = []
        tgt_circles = set()
        prev_end = None
        for si, kind in enumerate(circle):
            ref = (pid, ci, si)
            path = f.segment_map.get(ref)
            if not path:
                out.append(f"segment {ref}: no image path")
                return out
            for step in path:
                tci, tsi, d = step
                if tci >= len(tgt_piece.boundary) or tsi >= len(tgt_piece.boundary[tci]):
                    out.append(f"segment {ref}: step {step} out of range")
                    return out
                tgt_circles.add(tci)
                tkind = tgt_piece.boundary[tci][tsi]
                if tkind != kind:
                    out.append(f"segment {ref}: kind {kind} over {tkind}")
                coverage[(tci, tsi)] += 1
            # attachment commutation
            s_att = f.source.attachments.get(ref)
            imgs = []
            for tci, tsi, d in path:
                t_att = f.target.attachments.get((tgt_pid, tci, tsi))
                if t_att is not None:
                    imgs.append((t_att[0], t_att[1] * d))
                elif kind == FREE and s_att is not None:
                    out.append(f"segment {ref}: attached over unattached target segment")
            if s_att is not None:
                e, d = s_att
                mapped = f.edge_map.get(e)
                if mapped is None:
                    out.append(f"segment {ref}: attachment edge {e} unmapped")
                else:
                    want = mapped if d == 1 else [(x, -dd) for x, dd in reversed(mapped)]
                    if imgs != want:
                        out.append(
                            f"segment {ref}: attachment image {imgs} != edge path {want}"
                        )
            steps_all.extend(path)
        if len(tgt_circles) > 1:
            out.append(f"piece {pid} circle {ci}: image spans circles {sorted(tgt_circles)}")
            continue
        tci = next(iter(tgt_circles))
        tt = len(tgt_piece.boundary[tci])
        # continuity (with folds only at mirror-adjacent junctions) and closure
        for i, step in enumerate(steps_all):
            start, end = _junctions_of_step(tt, step)
            if prev_end is not None and start != prev_end:
                out.append(f"piece {pid} circle {ci}: walk broken before step {i}")
            nxt = steps_all[(i + 1) % len(steps_all)]
            if nxt[2] != step[2]:  # fold
                j = end
                kinds = _junction_kinds(tgt_piece.boundary[tci], j)
                if MIRROR not in kinds:
                    out.append(
                        f"piece {pid} circle {ci}: fold at plain junction {j} of {tgt_pid}"
                    )
            prev_end = end
        first_start, _ = _junctions_of_step(tt, steps_all[0])
        if prev_end != first_start:
            out.append(f"piece {pid} circle {ci}: walk does not close")
        prev_end = None

    for (ci, si), hits in sorted(coverage.items()):
        kind = tgt_piece.boundary[ci][si]
        if kind == FREE:
            if hits != local_degree:
                out.append(
                    f"target segment ({tgt_pid},{ci},{si}): covered {hits}, expected {local_degree}"
                )
        else:
            if hits > local_degree or (local_degree - hits) % 2 != 0:
                out.append(
                    f"target mirror ({tgt_pid},{ci},{si}): boundary coverage {hits} "
                    f"inconsistent with local degree {local_degree}"
                )
    return out


def verify_covering(f: CoveringMap) -> CoverReport:
    """Re-check every covering condition; PASS only if all hold.

    Conditions: (1) fiber sums over graph cells and pieces, (2) per-piece
    orbifold-Euler multiplicativity, (3) boundary compatibility of segment
    maps including attachment commutation and winding, (4) cone fibers,
    (5) the induced map of singular subspaces is an orbifold graph
    covering, (6) global Euler multiplicativity.
    """
    require_valid(f.source)
    require_valid(f.target)
    _check_references(f)
    checks: list[CheckResult] = []

    def record(condition: str, violations: list[str]) -> None:
        if violations:
            for w in violations:
                checks.append(CheckResult(condition, "FAIL", w))
        else:
            checks.append(CheckResult(condition, "PASS"))

    # (1) fiber sums over pieces (graph cells are covered inside condition 5)
    fiber_violations: list[str] = []
    by_target: dict[str, int] = {q.id: 0 for q in f.target.pieces}
    for p in f.source.pieces:
        if p.id not in f.piece_map:
            fiber_violations.append(f"piece {p.id}: no image")
            continue
        q, local_degree = f.piece_map[p.id]
        if local_degree < 1:
            fiber_violations.append(f"piece {p.id}: local degree {local_degree}")
        by_target[q] += local_degree
    for q, total in sorted(by_target.items()):
        if total != f.degree:
            fiber_violations.append(f"piece {q}: fiber sum {total} != degree {f.degree}")
    record("fiber_sums", fiber_violations)

    # (2) per-piece Euler multiplicativity
    euler_violations = []
    for p in f.source.pieces:
        if p.id not in f.piece_map:
            continue
        q, local_degree = f.piece_map[p.id]
        lhs = piece_orbifold_euler(p)
        rhs = local_degree * piece_orbifold_euler(f.target.piece(q))
        if lhs != rhs:
            euler_violations.append(f"piece {p.id}: chi {lhs} != {local_degree} * chi({q})")
    record("piece_euler", euler_violations)

    # (3) boundary compatibility
    boundary_violations = []
    for p in f.source.pieces:
        if p.id in f.piece_map:
            boundary_violations.extend(_piece_boundary_violations(f, p.id))
    record("boundary", boundary_violations)

    # (4) cone fibers
    cone_violations = []
    used: dict[str, set[int]] = {p.id: set() for p in f.source.pieces}
    for q in f.target.pieces:
        for j, m in enumerate(q.cones):
            tokens = f.cone_fibers.get((q.id, j))
            if tokens is None:
                cone_violations.append(f"cone ({q.id},{j}): no fiber data")
                continue
            per_source: dict[str, Fraction] = {}
            for tok in tokens:
                if tok[0] == "cone":
                    _kind, spid, sj = tok
                    sp = f.source.piece(spid)
                    if sj >= len(sp.cones):
                        cone_violations.append(f"cone ({q.id},{j}): bad token {tok}")
                        continue
                    mm = sp.cones[sj]
                    if m % mm != 0:
                        cone_violations.append(
                            f"cone ({q.id},{j}): order {mm} does not divide {m}"
                        )
                        continue
                    if sj in used[spid]:
                        cone_violations.append(f"cone ({q.id},{j}): source cone reused {tok}")
                    used[spid].add(sj)
                    per_source[spid] = per_source.get(spid, Fraction(0)) + Fraction(m, mm)
                elif tok[0] == "smooth":
                    spid = tok[1]
                    per_source[spid] = per_source.get(spid, Fraction(0)) + m
                else:
                    cone_violations.append(f"cone ({q.id},{j}): bad token {tok}")
            for spid, total in sorted(per_source.items()):
                if spid not in f.piece_map or f.piece_map[spid][0] != q.id:
                    cone_violations.append(f"cone ({q.id},{j}): token from foreign piece {spid}")
                    continue
                l = f.piece_map[spid][1]
                if total != l:
                    cone_violations.append(
                        f"cone ({q.id},{j}): fiber sum {total} in {spid} != local degree {l}"
                    )
            for spid, (tq, l) in f.piece_map.items():
                if tq == q.id and spid not in per_source:
                    cone_violations.append(f"cone ({q.id},{j}): no preimage in {spid}")
    for spid, seen in sorted(used.items()):
        # cones over corner reflectors of a mirror target piece are absorbed
        # by the chi bookkeeping and are not listed in cone_fibers
        if spid not in f.piece_map:
            continue
        if f.target.piece(f.piece_map[spid][0]).has_mirrors:
            continue
        n = len(f.source.piece(spid).cones)
        if len(seen) != n:
            cone_violations.append(f"piece {spid}: {n - len(seen)} source cones unaccounted")
    record("cone_fibers", cone_violations)

    # (5) induced graph covering
    record("graph_covering", graph_covering_violations(f))

    # (6) global Euler multiplicativity
    chi_s, chi_t = euler_characteristic(f.source), euler_characteristic(f.target)
    record(
        "global_euler",
        [] if chi_s == f.degree * chi_t else [f"chi {chi_s} != {f.degree} * {chi_t}"],
    )
    return CoverReport(degree=f.degree, checks=checks)


# ---------------------------------------------------------------------------
# Lemma-style doubles of single pieces


def _require_polygon(p: Piece) -> int:
    """Number of mirror segments of a branch polygon [free, mirror^n, free]."""
    if p.genus != 0 or p.cones or len(p.boundary) != 1:
        raise NotAPolygon(p.id)
    circle = p.boundary[0]
    n = len(circle) - 2
    if n < 1 or circle != (FREE,) + (MIRROR,) * n + (FREE,):
        raise NotAPolygon(p.id)
    return n


def reflection_double(p: Piece) -> tuple[Piece, CoveringMap]:
    """Unfold every mirror of a reflection polygon: the disk with n-1
    order-2 cone points double-covers the polygon with n mirror segments,
    corners descending to the cones."""
    n = _require_polygon(p)
    target = single_piece_complex(p)
    cover_piece = disk_with_cones(f"{p.id}.d", n - 1, n_segments=4)
    source = single_piece_complex(cover_piece)
    t_last = n + 1  # index of the second free segment downstairs
    segmap: dict[SegRef, list[Step]] = {
        (cover_piece.id, 0, 0): [(0, 0, 1)],
        (cover_piece.id, 0, 1): [(0, 0, -1)],
        (cover_piece.id, 0, 2): [(0, t_last, -1)],
        (cover_piece.id, 0, 3): [(0, t_last, 1)],
    }
    f = CoveringMap(
        source=source,
        target=target,
        degree=2,
        piece_map={cover_piece.id: (p.id, 2)},
        segment_map=segmap,
    )
    return cover_piece, f


def _require_cone_disk(p: Piece) -> int:
    if p.genus != 0 or len(p.boundary) != 1 or p.has_mirrors:
        raise NotADiskOrbifold(p.id)
    if any(m != 2 for m in p.cones):
        raise NotADiskOrbifold(f"{p.id}: cone orders {p.cones}")
    return len(p.cones)


def rotation_double(p: Piece) -> tuple[Piece, CoveringMap]:
    """Rotate a disk orbifold with m+1 order-2 cones by a half turn: the
    disk with 2m cones double-covers it, the fixed point descending to one
    cone (single smooth preimage), every other cone lifting twice."""
    k = _require_cone_disk(p)
    m = k - 1
    if m < 1:
        raise NotADiskOrbifold(f"{p.id}: needs at least 2 cones")
    t = len(p.boundary[0])
    target = single_piece_complex(p)
    cover_piece = disk_with_cones(f"{p.id}.r", 2 * m, n_segments=2 * t)
    source = single_piece_complex(cover_piece)
    segmap = {
        (cover_piece.id, 0, j): [(0, j % t, 1)] for j in range(2 * t)
    }
    fibers: dict[tuple[str, int], list[tuple]] = {
        (p.id, 0): [("smooth", cover_piece.id, "fix")]
    }
    for j in range(1, k):
        fibers[(p.id, j)] = [
            ("cone", cover_piece.id, 2 * (j - 1)),
            ("cone", cover_piece.id, 2 * (j - 1) + 1),
        ]
    f = CoveringMap(
        source=source,
        target=target,
        degree=2,
        piece_map={cover_piece.id: (p.id, 2)},
        segment_map=segmap,
        cone_fibers=fibers,
    )
    return cover_piece, f


# ---------------------------------------------------------------------------
# the explicit double cover of a Davis orbicomplex


def davis_double_cover(davis: Orbicomplex) -> tuple[Orbicomplex, CoveringMap]:
    """The degree-2 cover of a Davis orbicomplex in which every polygon
    unfolds to a cone disk.

    The glued star unfolds to a two-vertex banana graph (one edge per
    reflection wall); the polygon over a branch from wall a to wall z
    becomes a disk with n-1 cones whose boundary reads edge(a) then
    edge(z) reversed, double-covering the two glued half-edges.
    """
    require_valid(davis)
    hub_candidates = [v for v, m in davis.graph.marks.items() if m is None]
    walls = sorted(v for v, m in davis.graph.marks.items() if is_wall(m))
    if len(hub_candidates) != 1 or not walls:
        raise UnsupportedPiece("not a Davis orbicomplex (expected hub plus wall leaves)")
    hub = hub_candidates[0]
    wall_edge = {}
    for e, (u, v) in davis.graph.edges.items():
        leaf = u if v == hub else v
        if leaf == hub or not is_wall(davis.graph.marks[leaf]):
            raise UnsupportedPiece(f"edge {e} is not a hub-wall half-edge")
        wall_edge[leaf] = e

    graph = MarkedGraph(marks={"x": None, "y": None})
    cover_edge = {}
    for w in walls:
        cid = f"c.{davis.graph.marks[w][1]}"
        graph.edges[cid] = ("x", "y")
        cover_edge[w] = cid

    pieces: list[Piece] = []
    attachments: dict[SegRef, tuple[str, int]] = {}
    piece_map = {}
    segmap: dict[SegRef, list[Step]] = {}
    for p in davis.pieces:
        n = _require_polygon(p)
        first = davis.seg_endpoints((p.id, 0, 0))
        last = davis.seg_endpoints((p.id, 0, n + 1))
        if first is None or last is None:
            raise UnsupportedPiece(f"polygon {p.id} is not fully attached")
        wall_a, wall_z = first[1], last[0]
        cover = disk_with_cones(p.id, n - 1, n_segments=2)
        pieces.append(cover)
        attachments[(p.id, 0, 0)] = (cover_edge[wall_a], 1)
        attachments[(p.id, 0, 1)] = (cover_edge[wall_z], -1)
        piece_map[p.id] = (p.id, 2)
        segmap[(p.id, 0, 0)] = [(0, 0, 1), (0, 0, -1)]
        segmap[(p.id, 0, 1)] = [(0, n + 1, -1), (0, n + 1, 1)]

    cover_cx = Orbicomplex(pieces=pieces, graph=graph, attachments=attachments)
    recompute_multiplicities(cover_cx)
    cover_cx.rotation = derive_rotation(cover_cx)

    edge_map = {}
    for w in walls:
        e = wall_edge[w]
        u, v = davis.graph.edges[e]
        # traversing x -> y runs hub -> wall -> hub downstairs
        to_wall = -1 if u == w else 1
        edge_map[cover_edge[w]] = [(e, to_wall), (e, -to_wall)]

    f = CoveringMap(
        source=cover_cx,
        target=davis,
        degree=2,
        vertex_map={"x": hub, "y": hub},
        edge_map=edge_map,
        piece_map=piece_map,
        segment_map=segmap,
    )
    return cover_cx, f


# ---------------------------------------------------------------------------
# two-torsion labelings and generic double covers


@dataclass
class TwoTorsionLabeling:
    """A homomorphism to Z/2 given by its values on the attaching-graph
    edges (implicitly zero on a spanning forest), cone generators, and
    wall/mirror generators.  Missing keys read as 0."""

    edges: dict[str, int] = field(default_factory=dict)
    cones: dict[tuple[str, int], int] = field(default_factory=dict)
    mirrors: dict[SegRef, int] = field(default_factory=dict)
    walls: dict[str, int] = field(default_factory=dict)

    def edge(self, e: str) -> int:
        return self.edges.get(e, 0)

    def cone(self, pid: str, j: int) -> int:
        return self.cones.get((pid, j), 0)

    def mirror(self, ref: SegRef) -> int:
        return self.mirrors.get(ref, 0)

    def wall(self, label: str) -> int:
        return self.walls.get(label, 0)

    def is_surjective(self) -> bool:
        return any(
            itertools.chain(
                self.edges.values(), self.cones.values(),
                self.mirrors.values(), self.walls.values(),
            )
        )

    def key(self) -> tuple:
        return (
            tuple(sorted((k, v) for k, v in self.edges.items() if v)),
            tuple(sorted((k, v) for k, v in self.cones.items() if v)),
            tuple(sorted((k, v) for k, v in self.mirrors.items() if v)),
            tuple(sorted((k, v) for k, v in self.walls.items() if v)),
        )


def _circle_edge_parity(c: Orbicomplex, phi: TwoTorsionLabeling, pid: str, ci: int) -> int:
    parity = 0
    for si, kind in enumerate(c.piece(pid).boundary[ci]):
        if kind == FREE:
            att = c.attachments.get((pid, ci, si))
            if att is not None:
                parity ^= phi.edge(att[0])
    return parity


def _mirror_wall_pairs(c: Orbicomplex, pid: str) -> list[tuple[SegRef, str]]:
    """(mirror segment, wall label) at each attached mirror|free junction."""
    p = c.piece(pid)
    out = []
    for ci, circle in enumerate(p.boundary):
        t = len(circle)
        for si, kind in enumerate(circle):
            if kind != MIRROR:
                continue
            for nb in ((si - 1) % t, (si + 1) % t):
                if circle[nb] != FREE:
                    continue
                ends = c.seg_endpoints((pid, ci, nb))
                if ends is None:
                    continue
                junction_vertex = ends[1] if nb == (si - 1) % t else ends[0]
                mark = c.graph.marks.get(junction_vertex)
                if is_wall(mark):
                    out.append(((pid, ci, si), mark[1]))
    return out


def _fully_attached(c: Orbicomplex, pid: str) -> bool:
    return all(
        (pid, ci, si) in c.attachments
        for ci, si, kind in c.piece(pid).segments()
        if kind == FREE
    )


def labeling_violations(c: Orbicomplex, phi: TwoTorsionLabeling) -> list[str]:
    """Relator conditions a two-torsion labeling must satisfy on ``c``.

    Boundary relations only bind fully glued circles; detached boundary
    imposes nothing.
    """
    out = []
    for p in c.pieces:
        if p.has_mirrors:
            for ref, label in _mirror_wall_pairs(c, p.id):
                if phi.mirror(ref) != phi.wall(label):
                    out.append(f"mirror {ref} disagrees with wall {label!r}")
            if _fully_attached(c, p.id):
                parity = _circle_edge_parity(c, phi, p.id, 0)
                if parity != 0:
                    out.append(f"polygon {p.id}: boundary edge word has parity 1")
        elif _fully_attached(c, p.id):
            total = 0
            for ci in range(len(p.boundary)):
                total ^= _circle_edge_parity(c, phi, p.id, ci)
            cone_sum = 0
            for j in range(len(p.cones)):
                cone_sum ^= phi.cone(p.id, j)
            if total != cone_sum:
                out.append(f"piece {p.id}: boundary parity {total} != cone parity {cone_sum}")
    return out


def spanning_forest(g: MarkedGraph) -> set[str]:
    """Deterministic BFS forest from the least vertex of each component."""
    forest: set[str] = set()
    visited: set[str] = set()
    incident: dict[str, list[str]] = {v: [] for v in g.marks}
    for e in g.edge_ids():
        u, v = g.edges[e]
        incident[u].append(e)
        if v != u:
            incident[v].append(e)
    for root in g.vertices():
        if root in visited:
            continue
        visited.add(root)
        queue = [root]
        while queue:
            v = queue.pop(0)
            for e in incident[v]:
                u, w = g.edges[e]
                other = w if v == u else u
                if other not in visited:
                    visited.add(other)
                    forest.add(e)
                    queue.append(other)
    return forest


def all_ones_labeling(davis: Orbicomplex) -> TwoTorsionLabeling:
    """phi = 1 on every Coxeter generator (all walls and mirror segments)."""
    phi = TwoTorsionLabeling()
    for v, mark in davis.graph.marks.items():
        if is_wall(mark):
            phi.walls[mark[1]] = 1
    for p in davis.pieces:
        for ci, si, kind in p.segments():
            if kind == MIRROR:
                phi.mirrors[(p.id, ci, si)] = 1
    return phi


def _lift_vertex_names(c: Orbicomplex, phi: TwoTorsionLabeling) -> dict[tuple[str, int], str]:
    names = {}
    for v, mark in sorted(c.graph.marks.items()):
        if is_wall(mark) and phi.wall(mark[1]) == 1:
            names[(v, 0)] = names[(v, 1)] = f"{v}.m"
        else:
            names[(v, 0)] = f"{v}.0"
            names[(v, 1)] = f"{v}.1"
    return names


def _trace_polygon(circle: tuple[str, ...], glued: set[int]) -> list[list[tuple[int, int]]]:
    """Boundary circles of two polygon sheets glued along ``glued`` mirror
    segments, as lists of (segment index, sheet); sheet-1 stretches are
    traversed in reverse."""
    t = len(circle)
    frees = [k for k in range(t) if circle[k] == FREE]
    starts = [(k, s) for k in frees for s in (0, 1)]
    emitted: set[tuple[int, int]] = set()
    traces = []
    for start in starts:
        if start in emitted:
            continue
        walk = []
        state = start
        while True:
            walk.append(state)
            emitted.add(state)
            k, s = state
            step = 1 if s == 0 else -1
            k2 = (k + step) % t
            state = (k, 1 - s) if k2 in glued else (k2, s)
            if state == start:
                break
        traces.append(walk)
    leftovers = {
        (k, s)
        for k in range(t)
        for s in (0, 1)
        if k not in glued and (k, s) not in emitted
    }
    if leftovers:
        raise UnsupportedPiece(
            "polygon double cover has a boundary circle without free segments"
        )
    return traces


def double_cover(c: Orbicomplex, phi: TwoTorsionLabeling) -> tuple[Orbicomplex, CoveringMap]:
    """The degree-2 cover classified by a two-torsion labeling.

    Pieces must be reflection polygons or cone disks.  A piece whose
    boundary parity and cone/mirror values all vanish lifts to two disjoint
    copies; otherwise it lifts connectedly, with phi=0 cones duplicated,
    phi=1 cones smoothed, and mirrors glued across the sheets where phi=1.
    Bivalent graph vertices created by unfolded walls are smoothed away, so
    source edges map to length-two folded paths over them.
    """
    require_valid(c)
    problems = labeling_violations(c, phi)
    if problems:
        raise NotAHomomorphism("; ".join(problems))
    if not phi.is_surjective():
        raise NotSurjective("labeling is identically zero")
    for p in c.pieces:
        if p.has_mirrors:
            _require_polygon(p)
        else:
            _require_cone_disk(p)
        if not _fully_attached(c, p.id):
            raise UnsupportedPiece(f"piece {p.id} must be fully attached")

    names = _lift_vertex_names(c, phi)
    graph = MarkedGraph()
    for v, mark in sorted(c.graph.marks.items()):
        if names[(v, 0)] == names[(v, 1)]:
            graph.marks[names[(v, 0)]] = None
        else:
            for s in (0, 1):
                if is_wall(mark):
                    graph.marks[names[(v, s)]] = wall_mark(f"{mark[1]}.{s}")
                else:
                    graph.marks[names[(v, s)]] = mark
    for e, (u, v) in sorted(c.graph.edges.items()):
        for s in (0, 1):
            graph.edges[f"{e}.{s}"] = (names[(u, s)], names[(v, s ^ phi.edge(e))])

    vertex_map = {}
    for (v, s), name in names.items():
        vertex_map[name] = v
    edge_map = {f"{e}.{s}": [(e, 1)] for e in c.graph.edges for s in (0, 1)}

    def lifted_attachment(e: str, d: int, tail_sheet: int) -> tuple[str, int]:
        i = tail_sheet if d == 1 else tail_sheet ^ phi.edge(e)
        return (f"{e}.{i}", d)

    pieces: list[Piece] = []
    attachments: dict[SegRef, tuple[str, int]] = {}
    piece_map: dict[str, tuple[str, int]] = {}
    segmap: dict[SegRef, list[Step]] = {}
    cone_fibers: dict[tuple[str, int], list[tuple]] = {}

    for p in c.pieces:
        circle = p.boundary[0]
        t = len(circle)
        # sheet offset of junction j relative to junction 0
        h = [0] * (t + 1)
        for si in range(t):
            bump = 0
            if circle[si] == FREE:
                att = c.attachments.get((p.id, 0, si))
                if att is not None:
                    bump = phi.edge(att[0])
            h[si + 1] = h[si] ^ bump

        def attach_lift(si: int, sheet: int, direction: int) -> Optional[tuple[str, int]]:
            att = c.attachments.get((p.id, 0, si))
            if att is None:
                return None
            e, d = att
            tail_sheet = sheet ^ (h[si] if direction == 1 else h[si + 1])
            return lifted_attachment(e, d * direction, tail_sheet)

        if p.has_mirrors:
            glued = {
                si
                for si, kind in enumerate(circle)
                if kind == MIRROR and phi.mirror((p.id, 0, si)) == 1
            }
            if not glued:
                for s in (0, 1):
                    pid2 = f"{p.id}.{s}"
                    pieces.append(Piece(pid2, 0, (tuple(circle),), ()))
                    piece_map[pid2] = (p.id, 1)
                    for si, kind in enumerate(circle):
                        segmap[(pid2, 0, si)] = [(0, si, 1)]
                        if kind == FREE:
                            att = attach_lift(si, s, 1)
                            if att:
                                attachments[(pid2, 0, si)] = att
            else:
                traces = _trace_polygon(circle, glued)
                pid2 = f"{p.id}.01"
                boundary = []
                n_cones = sum(
                    1 for si in glued if (si + 1) % t in glued
                )
                for trace in traces:
                    kinds = []
                    idx = 0
                    entries = []  # per new segment: list of (si, sheet)
                    while idx < len(trace):
                        si, s = trace[idx]
                        if (
                            circle[si] == MIRROR
                            and idx + 1 < len(trace)
                            and trace[idx + 1][0] == si
                        ):
                            entries.append([(si, s), trace[idx + 1]])
                            kinds.append(MIRROR)
                            idx += 2
                        else:
                            entries.append([(si, s)])
                            kinds.append(circle[si])
                            idx += 1
                    boundary.append((tuple(kinds), entries))
                cover = Piece(
                    pid2,
                    0,
                    tuple(kinds for kinds, _ in boundary),
                    (2,) * n_cones,
                )
                # genus bookkeeping: two disks glued along arcs stay planar
                assert piece_orbifold_euler(cover) == 2 * piece_orbifold_euler(p), p.id
                pieces.append(cover)
                piece_map[pid2] = (p.id, 2)
                for ci2, (kinds, entries) in enumerate(boundary):
                    for si2, entry in enumerate(entries):
                        steps = [
                            (0, si, 1 if s == 0 else -1) for si, s in entry
                        ]
                        segmap[(pid2, ci2, si2)] = steps
                        if kinds[si2] == FREE:
                            si, s = entry[0]
                            att = attach_lift(si, s, 1 if s == 0 else -1)
                            if att:
                                attachments[(pid2, ci2, si2)] = att
        else:
            k = len(p.cones)
            cone_vals = [phi.cone(p.id, j) for j in range(k)]
            parity = h[t]
            if parity == 0 and not any(cone_vals):
                for s in (0, 1):
                    pid2 = f"{p.id}.{s}"
                    pieces.append(Piece(pid2, 0, (tuple(circle),), tuple(p.cones)))
                    piece_map[pid2] = (p.id, 1)
                    for si in range(t):
                        segmap[(pid2, 0, si)] = [(0, si, 1)]
                        att = attach_lift(si, s, 1)
                        if att:
                            attachments[(pid2, 0, si)] = att
                    for j in range(k):
                        cone_fibers.setdefault((p.id, j), []).append(("cone", pid2, j))
            else:
                pid2 = f"{p.id}.01"
                k0 = cone_vals.count(0)
                k1 = k - k0
                b2 = 1 if parity == 1 else 2
                genus2, rem = divmod(k1 - b2, 2)
                if rem or genus2 < 0:
                    raise NotAHomomorphism(
                        f"piece {p.id}: inconsistent lift (parity {parity}, {k1} smoothed cones)"
                    )
                if parity == 1:
                    bnd = ((FREE,) * (2 * t),)
                else:
                    bnd = ((FREE,) * t, (FREE,) * t)
                cover = Piece(pid2, genus2, bnd, (2,) * (2 * k0))
                pieces.append(cover)
                piece_map[pid2] = (p.id, 2)
                if parity == 1:
                    for lap in (0, 1):
                        for si in range(t):
                            segmap[(pid2, 0, lap * t + si)] = [(0, si, 1)]
                            att = attach_lift(si, lap, 1)
                            if att:
                                attachments[(pid2, 0, lap * t + si)] = att
                else:
                    for s in (0, 1):
                        for si in range(t):
                            segmap[(pid2, s, si)] = [(0, si, 1)]
                            att = attach_lift(si, s, 1)
                            if att:
                                attachments[(pid2, s, si)] = att
                new_cone = 0
                for j, val in enumerate(cone_vals):
                    if val == 0:
                        cone_fibers[(p.id, j)] = [
                            ("cone", pid2, new_cone),
                            ("cone", pid2, new_cone + 1),
                        ]
                        new_cone += 2
                    else:
                        cone_fibers[(p.id, j)] = [("smooth", pid2, f"c{j}")]

    cover_cx = Orbicomplex(pieces=pieces, graph=graph, attachments=attachments)
    recompute_multiplicities(cover_cx)
    f = CoveringMap(
        source=cover_cx,
        target=c,
        degree=2,
        vertex_map=vertex_map,
        edge_map=edge_map,
        piece_map=piece_map,
        segment_map=segmap,
        cone_fibers=cone_fibers,
    )
    _smooth_unfolded_walls(f)
    cover_cx.rotation = derive_rotation(cover_cx)
    return cover_cx, f


def _merge_circle_through(
    f: CoveringMap, pid: str, ci: int, v: str, remap_att
) -> bool:
    """Merge every consecutive attached segment pair of one circle whose
    shared junction sits at graph vertex v; returns True if anything merged."""
    c = f.source
    p = c.piece(pid)
    circle = p.boundary[ci]
    t = len(circle)
    starts = set()
    for si in range(t):
        r1, r2 = (pid, ci, si), (pid, ci, (si + 1) % t)
        if r1 in c.attachments and r2 in c.attachments:
            if c.seg_endpoints(r1)[1] == v:
                starts.add(si)
    if not starts:
        return False
    seconds = {(si + 1) % t for si in starts}
    offset = min(j for j in range(t) if j not in seconds)
    order = [(offset + k) % t for k in range(t)]

    new_kinds: list[str] = []
    new_steps: list[list[Step]] = []
    new_atts: list = []
    idx = 0
    while idx < t:
        cur = order[idx]
        ref = (pid, ci, cur)
        if cur in starts:
            nxt = (pid, ci, (cur + 1) % t)
            new_kinds.append(FREE)
            new_steps.append(f.segment_map[ref] + f.segment_map[nxt])
            new_atts.append(remap_att(c.attachments[ref]))
            idx += 2
        else:
            new_kinds.append(circle[cur])
            new_steps.append(f.segment_map.get(ref))
            new_atts.append(
                remap_att(c.attachments[ref]) if ref in c.attachments else None
            )
            idx += 1

    # reinstall this circle only; other circles keep their indices
    for sk in range(t):
        c.attachments.pop((pid, ci, sk), None)
        f.segment_map.pop((pid, ci, sk), None)
    new_boundary = tuple(
        tuple(new_kinds) if cj == ci else circ for cj, circ in enumerate(p.boundary)
    )
    c.pieces[c.pieces.index(p)] = Piece(pid, p.genus, new_boundary, p.cones)
    for s2 in range(len(new_kinds)):
        if new_steps[s2] is not None:
            f.segment_map[(pid, ci, s2)] = new_steps[s2]
        if new_atts[s2] is not None:
            c.attachments[(pid, ci, s2)] = new_atts[s2]
    return True


def _smooth_unfolded_walls(f: CoveringMap) -> None:
    """Remove the bivalent plain vertices a degree-2 cover creates over
    unfolded wall leaves, merging their edge pairs and the piece segments
    that cross them; the merged source edges map to folded length-2 paths."""
    c = f.source
    while True:
        candidates = [
            v
            for v in c.graph.vertices()
            if c.graph.marks[v] is None
            and v.endswith(".m")
            and c.graph.valence(v) == 2
            and len(c.graph.incident(v)) == 2
        ]
        if not candidates:
            return
        v = candidates[0]
        e1, e2 = c.graph.incident(v)
        a = c.graph.edges[e1][0] if c.graph.edges[e1][1] == v else c.graph.edges[e1][1]
        b = c.graph.edges[e2][0] if c.graph.edges[e2][1] == v else c.graph.edges[e2][1]
        new_edge = f"c.{v[:-len('.m')]}"
        d1 = 1 if c.graph.edges[e1][1] == v else -1   # e1 traversed a -> v
        d2 = 1 if c.graph.edges[e2][0] == v else -1   # e2 traversed v -> b
        path1 = f.edge_map[e1] if d1 == 1 else [(x, -d) for x, d in reversed(f.edge_map[e1])]
        path2 = f.edge_map[e2] if d2 == 1 else [(x, -d) for x, d in reversed(f.edge_map[e2])]
        c.graph.edges[new_edge] = (a, b)
        f.edge_map[new_edge] = path1 + path2

        def remap_att(att, _e1=e1, _e2=e2, _d1=d1, _d2=d2, _new=new_edge):
            e, d = att
            if e == _e1:
                return (_new, d * _d1)
            if e == _e2:
                return (_new, d * _d2)
            return att

        # merge segments while the old edges are still present for lookups
        for p in list(c.pieces):
            for ci in range(len(p.boundary)):
                while _merge_circle_through(f, p.id, ci, v, remap_att):
                    pass
        for ref, att in list(c.attachments.items()):
            c.attachments[ref] = remap_att(att)
        del c.graph.edges[e1], c.graph.edges[e2]
        c.graph.multiplicity.pop(e1, None)
        c.graph.multiplicity.pop(e2, None)
        del c.graph.marks[v]
        del f.edge_map[e1], f.edge_map[e2]
        del f.vertex_map[v]
        recompute_multiplicities(c)


def derive_rotation(c: Orbicomplex) -> Optional[dict[str, list[tuple[str, int]]]]:
    """Canonical ribbon structure whose faces are the attachment circuits,
    when one exists (each distinct circuit counted once)."""
    if not c.graph.edges:
        return None
    if len(c.attachments) != sum(
        len(circle) for p in c.pieces for circle in p.boundary
    ):
        return None
    circuits = all_attachment_circuits(c)
    distinct: dict[tuple, list[tuple[str, int]]] = {}
    for _key, walk in sorted(circuits.items()):
        distinct.setdefault(_canonical_cycle(walk), walk)
    reps = [distinct[k] for k in sorted(distinct)]
    return rotation_from_circuits(c.graph, reps)


# ---------------------------------------------------------------------------
# enumeration of the canonical double-cover family


def enumerate_double_covers(
    c: Orbicomplex,
) -> list[tuple[TwoTorsionLabeling, Orbicomplex, CoveringMap]]:
    """All connected double covers in the canonical family: every nonzero
    labeling of the non-forest edges, completed on cones by the first-cone
    rule (parity-0 circles get all-zero cones, parity-1 circles smooth
    exactly the first cone)."""
    require_valid(c)
    if any(p.has_mirrors for p in c.pieces):
        raise MirrorsPresent("canonical enumeration needs cone pieces only")
    for p in c.pieces:
        _require_cone_disk(p)
    forest = spanning_forest(c.graph)
    free_edges = [e for e in c.graph.edge_ids() if e not in forest]
    out = []
    for bits in itertools.product((0, 1), repeat=len(free_edges)):
        if not any(bits):
            continue
        phi = TwoTorsionLabeling(edges=dict(zip(free_edges, bits)))
        for p in c.pieces:
            if _circle_edge_parity(c, phi, p.id, 0) == 1:
                phi.cones[(p.id, 0)] = 1
        cover, f = double_cover(c, phi)
        out.append((phi, cover, f))
    return out


# ---------------------------------------------------------------------------
# surface towers and torsion-free covers


@dataclass
class SurfaceTower:
    surface: Piece
    annulus: Piece
    disk: Piece
    upper: CoveringMap   # surface -> annulus orbifold
    lower: CoveringMap   # annulus orbifold -> disk orbifold


def surface_over_disk_tower(genus: int) -> SurfaceTower:
    """The two rotation quotients S_{g,4} -> A(2g+2) -> D^2(g+3): first a
    half-turn pairing the four boundary circles with 2g+2 fixed points,
    then a half-turn of the annulus skewering its core in two plain points."""
    if genus < 1:
        raise BadGenus(f"needs genus >= 1, got {genus}")
    g = genus
    disk = disk_with_cones(f"disk.g{g}", g + 3)
    annulus = Piece(f"ann.g{g}", 0, ((FREE,), (FREE,)), (2,) * (2 * g + 2))
    surface = surface_with_boundary(f"surf.g{g}", g, 4)
    disk_cx = single_piece_complex(disk)
    annulus_cx = single_piece_complex(annulus)
    surface_cx = single_piece_complex(surface)

    lower = CoveringMap(
        source=annulus_cx,
        target=disk_cx,
        degree=2,
        piece_map={annulus.id: (disk.id, 2)},
        segment_map={
            (annulus.id, 0, 0): [(0, 0, 1)],
            (annulus.id, 1, 0): [(0, 0, 1)],
        },
        cone_fibers={},
    )
    for j in range(g + 1):
        lower.cone_fibers[(disk.id, j)] = [
            ("cone", annulus.id, 2 * j),
            ("cone", annulus.id, 2 * j + 1),
        ]
    for j in (g + 1, g + 2):
        lower.cone_fibers[(disk.id, j)] = [("smooth", annulus.id, f"axis{j}")]

    upper = CoveringMap(
        source=surface_cx,
        target=annulus_cx,
        degree=2,
        piece_map={surface.id: (annulus.id, 2)},
        segment_map={
            (surface.id, 0, 0): [(0, 0, 1)],
            (surface.id, 1, 0): [(0, 0, 1)],
            (surface.id, 2, 0): [(1, 0, 1)],
            (surface.id, 3, 0): [(1, 0, 1)],
        },
        cone_fibers={
            (annulus.id, j): [("smooth", surface.id, f"fix{j}")] for j in range(2 * g + 2)
        },
    )
    return SurfaceTower(surface, annulus, disk, upper, lower)


def torsion_free_cover(c: Orbicomplex) -> tuple[Orbicomplex, CoveringMap]:
    """The degree-4 cover with trivial stabilizers: the attaching graph
    lifts to four disjoint copies and each disk with k >= 4 order-2 cones
    lifts to the surface S_{k-3,4}, its four boundary circles attached to
    the four copies of the disk's attachment circuit."""
    require_valid(c)
    for p in c.pieces:
        try:
            k = _require_cone_disk(p)
        except NotADiskOrbifold as exc:
            raise UnsupportedPiece(f"piece {p.id} is not a cone disk") from exc
        if k < 4:
            raise UnsupportedPiece(f"piece {p.id}: needs >= 4 cones, has {k}")
        if any(
            c.attachments.get((p.id, 0, si)) is None for si in range(len(p.boundary[0]))
        ):
            raise UnsupportedPiece(f"piece {p.id}: boundary circle not fully attached")

    graph = MarkedGraph()
    vertex_map, edge_map = {}, {}
    for j in range(4):
        for v in c.graph.vertices():
            graph.marks[f"{v}.{j}"] = c.graph.marks[v]
            vertex_map[f"{v}.{j}"] = v
        for e in c.graph.edge_ids():
            u, v = c.graph.edges[e]
            graph.edges[f"{e}.{j}"] = (f"{u}.{j}", f"{v}.{j}")
            edge_map[f"{e}.{j}"] = [(e, 1)]

    pieces, attachments = [], {}
    piece_map, segmap, cone_fibers = {}, {}, {}
    for p in c.pieces:
        k = len(p.cones)
        t = len(p.boundary[0])
        pid2 = f"{p.id}.hat"
        cover = Piece(pid2, k - 3, tuple((FREE,) * t for _ in range(4)), ())
        pieces.append(cover)
        piece_map[pid2] = (p.id, 4)
        for j in range(4):
            for si in range(t):
                e, d = c.attachments[(p.id, 0, si)]
                attachments[(pid2, j, si)] = (f"{e}.{j}", d)
                segmap[(pid2, j, si)] = [(0, si, 1)]
        for cj in range(k):
            cone_fibers[(p.id, cj)] = [
                ("smooth", pid2, f"s{cj}.0"),
                ("smooth", pid2, f"s{cj}.1"),
            ]

    cover_cx = Orbicomplex(pieces=pieces, graph=graph, attachments=attachments)
    recompute_multiplicities(cover_cx)
    if c.rotation is not None:
        cover_cx.rotation = {
            f"{v}.{j}": [(f"{e}.{j}", end) for e, end in cyc]
            for j in range(4)
            for v, cyc in c.rotation.items()
        }
    f = CoveringMap(
        source=cover_cx,
        target=c,
        degree=4,
        vertex_map=vertex_map,
        edge_map=edge_map,
        piece_map=piece_map,
        segment_map=segmap,
        cone_fibers=cone_fibers,
    )
    return cover_cx, f


# ---------------------------------------------------------------------------
# composition


def compose(f: CoveringMap, g: CoveringMap) -> CoveringMap:
    """Composite covering map for f: A -> B and g: B -> C.

    Smooth preimage tokens pull back generically (a smooth point of B that
    is not itself a branch value of f has local-degree many preimages in
    each piece over it); verify the result when in doubt.
    """
    if f.target is not g.source and f.target != g.source:
        raise MismatchedComplexes("compose: f.target is not g.source")

    def orient(path: list[tuple[str, int]], d: int) -> list[tuple[str, int]]:
        return path if d == 1 else [(x, -dd) for x, dd in reversed(path)]

    edge_map = {}
    for e, path in f.edge_map.items():
        out: list[tuple[str, int]] = []
        for be, d in path:
            out.extend(orient(g.edge_map[be], d))
        edge_map[e] = out

    def orient_steps(steps: list[Step], d: int) -> list[Step]:
        return steps if d == 1 else [(ci, si, -dd) for ci, si, dd in reversed(steps)]

    segment_map = {}
    for ref, steps in f.segment_map.items():
        pid = ref[0]
        bpid = f.piece_map[pid][0]
        out_steps: list[Step] = []
        for (bci, bsi, d) in steps:
            out_steps.extend(orient_steps(g.segment_map[(bpid, bci, bsi)], d))
        segment_map[ref] = out_steps

    piece_map = {}
    for pid, (bpid, l1) in f.piece_map.items():
        cpid, l2 = g.piece_map[bpid]
        piece_map[pid] = (cpid, l1 * l2)

    cone_fibers: dict[tuple[str, int], list[tuple]] = {}
    for (cpid, j), b_tokens in g.cone_fibers.items():
        out_tokens: list[tuple] = []
        for tok in b_tokens:
            if tok[0] == "cone":
                _k, bpid, bj = tok
                out_tokens.extend(f.cone_fibers.get((bpid, bj), []))
            else:
                _k, bpid, tag = tok
                for apid, (bp, l) in sorted(f.piece_map.items()):
                    if bp == bpid:
                        out_tokens.extend(
                            ("smooth", apid, f"{tag}.{i}") for i in range(l)
                        )
        cone_fibers[(cpid, j)] = out_tokens

    return CoveringMap(
        source=f.source,
        target=g.target,
        degree=f.degree * g.degree,
        vertex_map={v: g.vertex_map[w] for v, w in f.vertex_map.items()},
        edge_map=edge_map,
        piece_map=piece_map,
        segment_map=segment_map,
        cone_fibers=cone_fibers,
    )
