"""Right-angled Coxeter groups, branches, and reflection polygons.

A defining graph yields a presentation (one involution per vertex, one
commuting relation per edge).  Graphs whose essential vertices are joined
by long valence-2 paths decompose into branches, and each branch carries a
right-angled reflection polygon.
"""

from fractions import Fraction

from orbicover import (
    DefiningGraph,
    branch_decomposition,
    branch_polygon,
    demo_defining_graph,
    one_endedness_check,
    piece_orbifold_euler,
    racg_presentation,
)

# a small example first: the theta-shaped graph with subdivided arcs
verts = {"u", "v"}
edges = []
for k in range(3):
    mids = [f"m{k}{j}" for j in range(2)]
    verts.update(mids)
    path = ["u"] + mids + ["v"]
    edges += [(path[i], path[i + 1]) for i in range(len(path) - 1)]
theta = DefiningGraph.from_edges(verts, edges)

pres = racg_presentation(theta)
print(f"theta graph: {len(pres.generators)} generators, {len(pres.relators)} relators")
for b in branch_decomposition(theta):
    print(f"  branch {' - '.join(b.path)}  (n = {b.n})")

# each branch carries a right-angled polygon: n mirror segments plus the
# two halves of the non-reflection edge
for b in branch_decomposition(theta):
    p = branch_polygon(b)
    print(f"  polygon over {b.path[0]}..{b.path[-1]}: chi_orb = {piece_orbifold_euler(p)}")

# the built-in demo graph: three valence-4 vertices joined by six branches
gamma = demo_defining_graph()
pres = racg_presentation(gamma)
branches = branch_decomposition(gamma)
print(f"\ndemo graph: {len(gamma.vertices)} vertices, {len(gamma.edges)} edges")
print(f"  presentation: {len(pres.generators)} generators, {len(pres.relators)} relators")
print(f"  branch sizes: {sorted(b.n for b in branches)}")
print(f"  one-ended: {one_endedness_check(gamma)}")

# sanity: a 7-mirror polygon has orbifold Euler characteristic -1
seven = [b for b in branches if b.n == 7][0]
assert piece_orbifold_euler(branch_polygon(seven)) == Fraction(-1)
print("  7-mirror polygon: chi_orb = -1")
