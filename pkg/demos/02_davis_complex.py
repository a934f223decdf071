"""Building and inspecting the reflection orbicomplex.

The polygons of all branches glue along their non-reflection half-edges:
all midpoints become one hub, and each essential vertex contributes a
reflection wall at the far end of its half-edge.  The result is an
orbicomplex whose orbifold fundamental group is the right-angled Coxeter
group itself.
"""

from orbicover import (
    abelianization,
    davis_orbicomplex,
    demo_defining_graph,
    euler_characteristic,
    fundamental_group_presentation,
    graph_to_dot,
    singular_subspace,
    validate_complex,
)

complex_ = davis_orbicomplex(demo_defining_graph())
print(f"pieces: {len(complex_.pieces)}")
print(f"violations: {validate_complex(complex_)}")
print(f"orbifold Euler characteristic: {euler_characteristic(complex_)}")

# the singular subspace is a tripod whose leaves are order-2 ramification
# points (the reflection walls), every edge carrying four polygon segments
sing = singular_subspace(complex_)
print("\nsingular subspace (DOT):")
print(graph_to_dot(sing))

# the orbifold fundamental group abelianizes to (Z/2)^25, one involution
# per vertex of the defining graph
pres = fundamental_group_presentation(complex_)
print(f"pi_1 presentation: {len(pres.generators)} generators, {len(pres.relators)} relators")
print(f"abelianization: {abelianization(pres)}")
