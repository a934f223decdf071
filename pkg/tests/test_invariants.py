import random
from fractions import Fraction

import pytest

from orbicover.coxeter import DefiningGraph, GroupPresentation, racg_presentation
from orbicover.invariants import (
    AbelianInvariants,
    Disconnected,
    abelianization,
    compare_report,
    fundamental_group_presentation,
    homotopy_equivalence_certificate,
    normal_forms_isomorphic,
    planar_normal_form,
    presentation_betti,
    smith_normal_form,
    torsion_freeness,
)
from orbicover.orbicore import (
    MarkedGraph,
    Orbicomplex,
    disk_with_cones,
    euler_characteristic,
    recompute_multiplicities,
)

from oracles import snf_determinantal


def loop_complex(n_cones):
    g = MarkedGraph(marks={"v": None})
    g.edges["e"] = ("v", "v")
    c = Orbicomplex(
        pieces=[disk_with_cones("d", n_cones)],
        graph=g,
        attachments={("d", 0, 0): ("e", 1)},
    )
    recompute_multiplicities(c)
    return c


# ---------------------------------------------------------------------------
# Smith normal form


def test_snf_scalar():
    assert smith_normal_form([[2]]) == [2]


def test_snf_two_by_two():
    # d1 = gcd of entries = 2, d1*d2 = |det| = 8
    assert smith_normal_form([[2, 4], [6, 8]]) == [2, 4]


def test_snf_identity():
    assert smith_normal_form([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == [1, 1, 1]


def test_snf_zero_matrix():
    assert smith_normal_form([[0, 0], [0, 0]]) == []


def test_snf_divisibility_chain_example():
    factors = smith_normal_form([[2, 0], [0, 3]])
    assert factors == [1, 6]


def test_snf_agrees_with_determinantal_oracle():
    rng = random.Random(2024)
    for _ in range(200):
        rows = rng.randint(1, 4)
        cols = rng.randint(1, 4)
        m = [[rng.randint(-5, 5) for _ in range(cols)] for _ in range(rows)]
        got = smith_normal_form(m)
        want = snf_determinantal(m)
        assert got == want, (m, got, want)
        for a, b in zip(got, got[1:]):
            assert b % a == 0


# ---------------------------------------------------------------------------
# abelianization


def test_abelianization_involution():
    pres = GroupPresentation(("s",), ((("s", 1), ("s", 1)),))
    assert abelianization(pres) == AbelianInvariants(0, (2,))


def test_abelianization_racg_path():
    g = DefiningGraph.from_edges(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert abelianization(racg_presentation(g)) == AbelianInvariants(0, (2, 2, 2))


def test_abelianization_free_group():
    pres = GroupPresentation(tuple(f"g{i}" for i in range(9)), ())
    assert abelianization(pres) == AbelianInvariants(9, ())


# ---------------------------------------------------------------------------
# fundamental group presentations


def test_presentation_of_cone_disk_on_loop():
    c = loop_complex(3)
    pres = fundamental_group_presentation(c)
    assert len(pres.generators) == 1 + 3  # loop edge + cones
    ab = abelianization(pres)
    assert ab == AbelianInvariants(0, (2, 2, 2))


def test_presentation_of_davis_complex(chain):
    ab = abelianization(fundamental_group_presentation(chain.base))
    assert ab == AbelianInvariants(0, (2,) * 25)


def test_presentation_of_first_cover_two_rank(chain):
    ab = abelianization(fundamental_group_presentation(chain.cover1))
    assert ab.two_rank() == 24


def test_presentation_disconnected_rejected():
    c = Orbicomplex(
        pieces=[disk_with_cones("a", 1), disk_with_cones("b", 1)],
    )
    with pytest.raises(Disconnected):
        fundamental_group_presentation(c)


def test_presentation_betti_matches_euler_for_torsion_free(chain):
    # rank H1 - rank H2 of the presentation complex equals 1 - chi
    for hat in (chain.y_hat, chain.z_hat):
        pres = fundamental_group_presentation(hat)
        b1, b2 = presentation_betti(pres)
        assert b1 - b2 == 1 - euler_characteristic(hat) == 145


# ---------------------------------------------------------------------------
# planar normal forms and certificates


def test_pair_normal_forms_match_expected_incidence(chain):
    for cx in (chain.y, chain.z):
        nf = planar_normal_form(cx)
        assert nf is not None
        assert sorted(nf.components) == [(0, 6)]
        face_loads = {}
        for key, faces in nf.pieces:
            n_cones = len(key[2])
            for face in faces:
                face_loads.setdefault(face, []).append(n_cones)
        loads = sorted(tuple(sorted(v)) for v in face_loads.values())
        assert loads == [(6, 6)] * 4 + [(10, 10)] * 2


def test_pair_normal_forms_isomorphic(chain):
    ny = planar_normal_form(chain.y)
    nz = planar_normal_form(chain.z)
    assert normal_forms_isomorphic(ny, nz) is not None


def test_bad_rotation_makes_circuits_not_faces(chain):
    rot = {v: list(cyc) for v, cyc in chain.y.rotation.items()}
    v = sorted(rot)[0]
    assert len(rot[v]) == 3
    rot[v] = [rot[v][1], rot[v][0], rot[v][2]]
    out = planar_normal_form(chain.y, rot)
    assert out is None


def test_certificate_for_pair(chain):
    assert homotopy_equivalence_certificate(chain.y, chain.z) is not None


def test_certificate_for_torsion_free_pair(chain):
    assert homotopy_equivalence_certificate(chain.y_hat, chain.z_hat) is not None


def test_certificate_refuses_different_euler(chain):
    assert homotopy_equivalence_certificate(chain.base, chain.cover1) is None


def test_certificate_implies_equal_abelianizations(chain):
    for a, b in ((chain.y, chain.z), (chain.y_hat, chain.z_hat)):
        if homotopy_equivalence_certificate(a, b) is not None:
            ab_a = abelianization(fundamental_group_presentation(a))
            ab_b = abelianization(fundamental_group_presentation(b))
            assert ab_a == ab_b


# ---------------------------------------------------------------------------
# torsion-freeness


def test_torsion_freeness_of_hat(chain):
    assert torsion_freeness(chain.y_hat) is True


def test_davis_has_torsion(chain):
    assert torsion_freeness(chain.base) is False


def test_first_cover_has_torsion(chain):
    assert torsion_freeness(chain.cover1) is False


# ---------------------------------------------------------------------------
# compare reports


def test_compare_pair(chain):
    report = compare_report(chain.y, chain.z)
    assert report["euler"][0] == report["euler"][1] == Fraction(-36)
    assert report["singular_iso"] == "no"
    assert report["abelianization"][0] == report["abelianization"][1]
    assert report["homotopy_certificate"] == "present"
    assert any("not homeomorphic" in v for v in report["verdicts"])
    assert any("homotopy equivalent" in v for v in report["verdicts"])


def test_compare_relabeled_first_cover(chain):
    from orbicover import serialize

    data = serialize.orbicomplex_to_json(chain.cover1)
    text = serialize.dumps(data)
    for old, new in (("v1", "a1"), ("v2", "a2"), ("v3", "a3")):
        text = text.replace(old, new)
    import json

    relabeled = serialize.orbicomplex_from_json(json.loads(text))
    report = compare_report(chain.cover1, relabeled)
    assert report["euler"][0] == report["euler"][1]
    assert report["singular_iso"] != "no"
    assert report["abelianization"][0] == report["abelianization"][1]


def test_compare_base_and_cover_differ(chain):
    report = compare_report(chain.base, chain.cover1)
    assert report["euler"] == (Fraction(-9, 2), Fraction(-9))
    assert report["homotopy_certificate"] == "absent"
    assert any("not homotopy equivalent" in v for v in report["verdicts"])
