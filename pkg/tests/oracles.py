"""Independent oracles the test suite checks the library against.

Deliberately reimplemented from first principles: a full weighted cell
decomposition for Euler characteristics, determinantal divisors for Smith
normal form, and all-permutations search for marked graph isomorphism.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from math import gcd

from orbicover.orbicore import MIRROR, MarkedGraph, Orbicomplex, RAM2


def weighted_cell_euler(c: Orbicomplex) -> Fraction:
    """Sum (-1)^dim / |stab| over an explicit cell decomposition of the
    quotient: graph cells once, piece interiors as one vertex + genus loops
    + boundary spokes + one face, cones as weighted vertices with spokes,
    and the non-glued boundary cells of each piece."""
    total = Fraction(0)
    for _v, mark in c.graph.marks.items():
        total += Fraction(1, 1 if mark is None else 2)
    total -= len(c.graph.edges)
    for p in c.pieces:
        total += 1                  # interior vertex
        total -= 2 * p.genus        # genus loops
        total -= len(p.boundary)    # one spoke per boundary circle
        total += 1                  # the single 2-cell
        for m in p.cones:
            total += Fraction(1, m) - 1   # cone vertex plus its spoke
        for ci, circle in enumerate(p.boundary):
            t = len(circle)
            for si, kind in enumerate(circle):
                attached = (p.id, ci, si) in c.attachments
                if kind == MIRROR:
                    total -= Fraction(1, 2)
                elif not attached:
                    total -= 1
                # junction vertex between segments si-1 and si
                prev_kind = circle[(si - 1) % t]
                prev_attached = (p.id, ci, (si - 1) % t) in c.attachments
                if attached or prev_attached:
                    continue  # identified with a graph vertex, counted above
                if prev_kind == MIRROR and kind == MIRROR:
                    total += Fraction(1, 4)
                elif MIRROR in (prev_kind, kind):
                    total += Fraction(1, 2)
                else:
                    total += 1
    return total


def _det(m: list[list[int]]) -> int:
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        if m[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * _det(minor)
    return total


def snf_determinantal(matrix: list[list[int]]) -> list[int]:
    """Invariant factors via determinantal divisors: d_k = gcd of all k x k
    minors, invariant factor k = d_k / d_{k-1}."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    factors = []
    prev = 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in itertools.combinations(range(rows), k):
            for cs in itertools.combinations(range(cols), k):
                g = gcd(g, _det([[matrix[i][j] for j in cs] for i in rs]))
        if g == 0:
            break
        factors.append(g // prev)
        prev = g
    return factors


def _mark_class(mark):
    if mark is None:
        return 0
    if mark == RAM2:
        return 1
    return 2


def _pair_multiset(g: MarkedGraph, u: str, v: str):
    out = []
    for e, (a, b) in g.edges.items():
        if {a, b} == {u, v} or (u == v and a == b == u):
            out.append(g.multiplicity.get(e, 0))
    return sorted(out)


def brute_force_graph_iso(g1: MarkedGraph, g2: MarkedGraph):
    """All-permutations marked graph isomorphism (small graphs only)."""
    v1, v2 = g1.vertices(), g2.vertices()
    if len(v1) != len(v2) or len(g1.edges) != len(g2.edges):
        return None
    for perm in itertools.permutations(v2):
        mapping = dict(zip(v1, perm))
        if any(_mark_class(g1.marks[a]) != _mark_class(g2.marks[mapping[a]]) for a in v1):
            continue
        ok = True
        for a, b in itertools.combinations_with_replacement(v1, 2):
            if _pair_multiset(g1, a, b) != _pair_multiset(g2, mapping[a], mapping[b]):
                ok = False
                break
        if ok:
            return mapping
    return None


def random_marked_graph(rng: random.Random, max_vertices: int = 7) -> MarkedGraph:
    n = rng.randint(1, max_vertices)
    g = MarkedGraph()
    for i in range(n):
        g.marks[f"v{i}"] = rng.choice([None, None, None, RAM2])
    n_edges = rng.randint(0, min(9, n * 2))
    for k in range(n_edges):
        u = f"v{rng.randrange(n)}"
        v = f"v{rng.randrange(n)}"
        if u == v and rng.random() < 0.5:
            v = f"v{rng.randrange(n)}"
        g.edges[f"e{k}"] = (u, v)
        g.multiplicity[f"e{k}"] = rng.randint(0, 3)
    return g


def relabeled_copy(g: MarkedGraph, rng: random.Random) -> MarkedGraph:
    verts = g.vertices()
    perm = verts[:]
    rng.shuffle(perm)
    vmap = dict(zip(verts, perm))
    out = MarkedGraph()
    for v in verts:
        out.marks[f"w_{vmap[v]}"] = g.marks[v]
    edge_ids = g.edge_ids()
    eperm = edge_ids[:]
    rng.shuffle(eperm)
    for e, e2 in zip(edge_ids, eperm):
        u, v = g.edges[e]
        out.edges[f"f_{e2}"] = (f"w_{vmap[u]}", f"w_{vmap[v]}")
        out.multiplicity[f"f_{e2}"] = g.multiplicity.get(e, 0)
    return out
