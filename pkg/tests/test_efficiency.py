from collections import Counter

import pytest

from dehntwist.efficiency import (
    INVISIBLE_VERTEX,
    NEGATIVE,
    NOT_MINIMAL,
    POSITIVE,
    POSITIVELY_BONDED,
    PROPER_POWER,
    UNUSED_EDGE,
    NotApplicable,
    NotSupported,
    apply_move,
    bonding,
    check_efficient,
    check_pointedly_efficient,
    corpus,
    make_efficient,
    measure,
)
from dehntwist.freegroup import Basis, FreeAutomorphism
from dehntwist.gog import (
    DehnTwistData,
    Pi1Basis,
    PathWord,
    dehn_twist,
    euler_characteristic,
    induced_automorphism,
    make_gog,
    nielsen_gog,
    stabilise,
)


def kinds(violations):
    return sorted(v.kind for v in violations)


def one_vertex(images, m, basis=("B", "b")):
    g = make_gog({"v": list(basis)}, {"e": ("v", "v", *images)}, "v")
    return g, DehnTwistData({"e": m[0], "e~": m[1]})


def test_nielsen_twist_is_efficient():
    for n in range(2, 7):
        g, d, _ = nielsen_gog(n)
        assert check_efficient(g, d) == []
        assert check_pointedly_efficient(g, d) == []


def test_unused_edge_and_proper_power():
    g, _, _ = nielsen_gog(2)
    assert kinds(check_efficient(g, DehnTwistData({"e": 1, "e~": 1}))) == [UNUSED_EDGE]
    g, d = one_vertex(("b b", "B"), (-1, 0))
    assert kinds(check_efficient(g, d)) == [PROPER_POWER]


def test_bonding_examples():
    g, d, _ = nielsen_gog(2)
    assert bonding(g, d, "e", "e~") is None
    two = make_gog(
        {"v": ["b", "c"], "u": ["y"], "w": ["z"]},
        {"e": ("v", "u", "b", "y"), "f": ("v", "w", "b", "z")},
        "v",
    )
    d = DehnTwistData({"e": 1, "e~": 0, "f": 1, "f~": 0})
    assert bonding(two, d, "e", "f") == POSITIVE
    two = make_gog(
        {"v": ["b", "c"], "u": ["y"], "w": ["z"]},
        {"e": ("v", "u", "b", "y"), "f": ("v", "w", "b^-1", "z")},
        "v",
    )
    # b^m against b^-n: conjugate only for n <= -1
    assert bonding(two, d, "e", "f") == NEGATIVE
    assert bonding(two, DehnTwistData({"e": 1, "e~": 0, "f": 1, "f~": 1}), "e", "f") is None
    with pytest.raises(ValueError):
        bonding(two, d, "e", "e~")


def test_bonding_powers_and_conjugates():
    g = make_gog(
        {"v": ["b", "c"], "u": ["y"], "w": ["z"]},
        {"e": ("v", "u", "b b", "y"), "f": ("v", "w", "c b^-1 c^-1", "z")},
        "v",
    )
    d = DehnTwistData({"e": 1, "e~": 0, "f": -1, "f~": 0})
    assert bonding(g, d, "e", "f") == POSITIVE
    assert POSITIVELY_BONDED in kinds(check_efficient(g, d))


def test_pointed_basepoint_leaf():
    g = make_gog({"v": ["x"], "u": ["y", "z"]}, {"l": ("v", "u", "x", "y z y^-1 z^-1")}, "v")
    d = DehnTwistData({"l": 1, "l~": 0})
    assert kinds(check_efficient(g, d)) == [NOT_MINIMAL]
    assert check_pointedly_efficient(g, d) == []
    assert check_efficient(stabilise(g), d) == []


def test_m5_example():
    g, d = one_vertex(("b b", "B B"), (-1, 0))
    g2, d2 = apply_move(g, d, "M5", "e")
    assert str(g2.f("e")) == "b" and str(g2.f("e~")) == "B"
    assert d2.m("e") == -2 and d2.m("e~") == 0
    assert euler_characteristic(g2) == euler_characteristic(g)
    assert check_efficient(g2, d2) == []


def test_m5_unsupported_and_not_applicable():
    g, d = one_vertex(("b b", "B"), (-1, 0))
    with pytest.raises(NotSupported):
        apply_move(g, d, "M5", "e")
    g, d, _ = nielsen_gog(2)
    with pytest.raises(NotApplicable):
        apply_move(g, d, "M5", "e")


def test_m4_two_vertex_example():
    g = make_gog({"u": ["x"], "w": ["y", "z"]}, {"e": ("u", "w", "x", "y")}, "w")
    d = DehnTwistData({"e": 0, "e~": 0})
    assert UNUSED_EDGE in kinds(check_efficient(g, d))
    g2, d2 = apply_move(g, d, "M4", "e")
    assert list(g2.graph.vertices) == ["w"] and not g2.graph.edges
    assert euler_characteristic(g2) == euler_characteristic(g) == -1


def test_m4_loop_unsupported():
    g, _, _ = nielsen_gog(2)
    with pytest.raises(NotSupported):
        apply_move(g, DehnTwistData({"e": 0, "e~": 0}), "M4", "e")
    g, d, _ = nielsen_gog(2)
    with pytest.raises(NotApplicable):
        apply_move(g, d, "M4", "e")


def nielsen_with_leaf(m_leaf):
    g = make_gog(
        {"v": ["B", "b", "c1"], "w": ["x"]},
        {"e": ("v", "v", "b", "B"), "l": ("w", "v", "x", "c1")},
        "v",
    )
    d = DehnTwistData({"e": -1, "e~": 0, "l": m_leaf[0], "l~": m_leaf[1]})
    vb, wb = g.vertex_basis["v"], g.vertex_basis["w"]
    target = Basis(["a", "b", "c1"])
    gens = (
        PathWord("v", (vb.identity(), vb.identity()), ("e",)),
        PathWord("v", (vb.gen("b"),)),
        PathWord("v", (vb.identity(), wb.gen("x"), vb.identity()), ("l", "l~")),
    )
    rewrite = {("v", "B"): target.word("a b a^-1"), ("v", "b"): target.gen("b"), ("v", "c1"): target.gen("c1"),
               ("w", "x"): target.gen("c1")}
    pb = Pi1Basis(target, gens, rewrite, {"e": target.gen("a"), "l": target.identity()})
    pb.check(g)
    return g, d, pb


def test_m1_leaf_example_is_sound():
    rho = FreeAutomorphism.from_dict(Basis(["a", "b", "c1"]), {"a": "a b"})
    for m in ((0, 0), (2, -1)):
        g, d, pb = nielsen_with_leaf(m)
        assert NOT_MINIMAL in kinds(check_efficient(g, d))
        assert induced_automorphism(dehn_twist(g, d), pb) == rho
        g2, d2 = apply_move(g, d, "M1", "w")
        assert euler_characteristic(g2) == euler_characteristic(g)
        ng, nd, npb = nielsen_gog(3)
        assert g2 == ng and d2.gamma == nd.gamma
        assert induced_automorphism(dehn_twist(g2, d2), npb) == rho


def test_m4_is_sound():
    rho = FreeAutomorphism.from_dict(Basis(["a", "b", "c1"]), {"a": "a b"})
    g, d, pb = nielsen_with_leaf((1, 1))
    assert induced_automorphism(dehn_twist(g, d), pb) == rho
    g2, d2 = apply_move(g, d, "M4", "l")
    ng, nd, npb = nielsen_gog(3)
    assert g2 == ng and d2.gamma == nd.gamma


def test_m1_pointed_refuses_basepoint():
    g = make_gog({"v": ["x"], "u": ["y", "z"]}, {"l": ("v", "u", "x", "y z y^-1 z^-1")}, "v")
    d = DehnTwistData({"l": 1, "l~": 0})
    with pytest.raises(NotApplicable):
        apply_move(g, d, "M1*", "v")
    g2, _ = apply_move(g, d, "M1", "v")
    assert list(g2.graph.vertices) == ["u"] and g2.basepoint == "u"


def test_m2_splices_negatively_bonded_vertex():
    g = make_gog(
        {"v": ["p", "q"], "w": ["x"], "u": ["r", "s"]},
        {"e1": ("w", "v", "x", "p"), "e2": ("w", "u", "x^-1", "r")},
        "v",
    )
    d = DehnTwistData({"e1": 1, "e1~": 0, "e2": 1, "e2~": 0})
    assert bonding(g, d, "e1", "e2") == NEGATIVE
    assert INVISIBLE_VERTEX in kinds(check_efficient(g, d))
    g2, d2 = apply_move(g, d, "M2", "w")
    assert "w" not in g2.graph.vertices and len(g2.graph.geometric_edges()) == 1
    assert euler_characteristic(g2) == euler_characteristic(g)
    assert measure(g2, d2) < measure(g, d)
    assert check_efficient(g2, d2) == []


def test_make_efficient_examples():
    g, d, _ = nielsen_gog(3)
    result = make_efficient(g, d)
    assert result.efficient and result.log == [] and result.gog == g
    g, d = one_vertex(("b b", "B B"), (-1, 0))
    result = make_efficient(g, d)
    assert [r.move for r in result.log] == ["M5"] and result.efficient
    g = make_gog({"u": ["x"], "w": ["y", "z"]}, {"e": ("u", "w", "x", "y")}, "w")
    result = make_efficient(g, DehnTwistData({"e": 0, "e~": 0}))
    assert [r.move for r in result.log] == ["M4"] and result.efficient


def test_make_efficient_reports_unsupported():
    g, d = one_vertex(("b b", "B"), (-1, 0))
    result = make_efficient(g, d)
    assert not result.efficient
    assert [v.kind for v in result.outstanding] == [PROPER_POWER]
    assert result.unsupported and result.unsupported[0][0] == "M5"


def test_every_successful_move_respects_invariants():
    moves = Counter()
    for g, d in corpus(80, seed=7):
        for pointed in (False, True):
            violations = check_pointedly_efficient(g, d) if pointed else check_efficient(g, d)
            for v in violations:
                move = {PROPER_POWER: "M5", UNUSED_EDGE: "M4", POSITIVELY_BONDED: "M3",
                        INVISIBLE_VERTEX: "M2", NOT_MINIMAL: "M1"}[v.kind]
                if pointed and move in ("M1", "M2"):
                    move += "*"
                loc = v.location if move == "M3" else v.location[0]
                try:
                    g2, d2 = apply_move(g, d, move, loc)
                except (NotApplicable, NotSupported):
                    continue
                moves[move] += 1
                assert euler_characteristic(g2) == euler_characteristic(g)
                assert measure(g2, d2) < measure(g, d)
    assert {"M1", "M4", "M5"} <= set(moves)


def test_corpus_terminates_and_stabilisation_lemma():
    for g, d in corpus(60, seed=0):
        for pointed in (False, True):
            result = make_efficient(g, d, pointed=pointed)
            assert euler_characteristic(result.gog) == euler_characteristic(g)
            assert all(r.chi_before == r.chi_after for r in result.log)
        assert (not check_pointedly_efficient(g, d)) == (not check_efficient(stabilise(g), d))
