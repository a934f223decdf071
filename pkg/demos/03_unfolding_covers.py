"""Degree-2 covers of single pieces and of the whole complex.

A polygon with n mirrors unfolds by reflection to a disk with n-1 cone
points; a disk with m+1 cone points is doubly covered by a disk with 2m
cones via a half-turn.  Unfolding every polygon of the reflection complex
at once gives its canonical double cover, whose singular subspace is a
theta graph.
"""

from orbicover import (
    Branch,
    branch_polygon,
    compose,
    davis_orbicomplex,
    demo_defining_graph,
    disk_with_cones,
    euler_characteristic,
    graph_to_dot,
    piece_orbifold_euler,
    reflection_double,
    rotation_double,
    singular_subspace,
    verify_covering,
)
from orbicover.covers import davis_double_cover

# unfold a pentagon-with-five-mirrors by reflection
polygon = branch_polygon(Branch(("a", "b", "c", "d", "e")))
cover_piece, refl = reflection_double(polygon)
print(f"reflection double of a 5-mirror polygon: disk with {len(cover_piece.cones)} cones")
print(f"  chi: {piece_orbifold_euler(cover_piece)} = 2 * {piece_orbifold_euler(polygon)}")
print(f"  verified: {verify_covering(refl).passed}")

# then quotient the resulting D^2(4) by a half-turn, from above
above, rot = rotation_double(cover_piece)
print(f"rotation double of D2(4): disk with {len(above.cones)} cones")
print(f"  verified: {verify_covering(rot).passed}")

# covering maps compose: the result is a verified degree-4 cover
tower = compose(rot, refl)
report = verify_covering(tower)
print(f"composite: degree {report.degree}, verified: {report.passed}")

# the whole reflection complex unfolds the same way
base = davis_orbicomplex(demo_defining_graph())
cover, cover_map = davis_double_cover(base)
report = verify_covering(cover_map)
print(f"\ncomplex double cover: degree {report.degree}, verified: {report.passed}")
print(f"chi: {euler_characteristic(cover)} = 2 * {euler_characteristic(base)}")
print("singular subspace of the cover:")
print(graph_to_dot(singular_subspace(cover)))
