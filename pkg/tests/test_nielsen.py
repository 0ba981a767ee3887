import pytest

from dehntwist.freegroup import ConjClass, FreeAutomorphism, compose, parse_word
from dehntwist.nielsen import (
    Realizer,
    Relation,
    autfk_generators,
    autfk_presentation,
    build_autfk_presentation,
    build_context,
    catalogue,
    graph_image,
    jw_presentation,
    lift_violations,
    q2_admissible,
    rho,
    rho_exponent,
    symbol_admissible,
    theorem_presentation,
    theorem_relations,
    theta,
    u_symbols,
    validate_autfk,
    verify_all,
    z_values,
)
from dehntwist.presentation import AbelianInvariants, abelianisation


def families(relations):
    return {r.label.split("[")[0] for r in relations}


def test_context_n2():
    ctx = build_context(2)
    assert sorted(ctx.catalogue) == sorted(["g(B)", "(a-;b)", "rho", "theta"])
    a = ctx.ambient
    assert ctx.rho(a.gen("a")) == parse_word(a, "a b")
    assert ctx.theta(a.gen("b")) == parse_word(a, "a b^-1 a^-1")
    assert ctx.catalogue["g(B)"](a.gen("a")) == parse_word(a, "a a b a^-1")
    assert ctx.catalogue["(a-;b)"](a.gen("a")) == parse_word(a, "b^-1 a")
    with pytest.raises(ValueError):
        build_context(1)


def test_catalogue_commutes_with_rho():
    for n in range(2, 7):
        cat = catalogue(n)
        r = rho(n)
        for name, f in cat.items():
            f.check()
            assert compose(f, r) == compose(r, f), name


def test_theta_is_involution():
    for n in range(2, 5):
        assert compose(theta(n), theta(n)).is_identity()


def test_rho_exponent():
    r = rho(3)
    assert rho_exponent(r ** 3) == 3
    assert rho_exponent(r ** -2) == -2
    assert rho_exponent(FreeAutomorphism.identity(r.basis)) == 0
    assert rho_exponent(theta(3)) is None


def test_jw_small_cases():
    jw = jw_presentation(2)
    assert sorted(jw.generators) == ["(B±;b)", "(b±;B)"]
    assert jw.relations == []
    jw = jw_presentation(3)
    q32 = [str(r) for r in jw.relations if r.label.startswith("Q3.2")]
    assert "Q3.2[y1,j=1]: (B±;c1) I1 = I1 (B±;c1)^-1" in q32


def test_jw_relations_hold():
    for n in range(2, 7):
        jw = jw_presentation(n)
        assert jw.failures() == []
        assert jw.class_violations() == []


def test_admissibility_predicates():
    us = u_symbols(4)
    zs = z_values(4)
    assert ("y", "B") in us and ("c", 2, -1) in us
    assert set(zs) == {"B", "b", "c1", "c2"}
    assert not symbol_admissible(("c", 1, 1), "c1")
    assert symbol_admissible(("c", 1, 1), "c2")
    assert not symbol_admissible(("y", "b"), "b")
    assert not q2_admissible(("c", 1, 1), "c2", ("c", 1, 1), "B")
    assert not q2_admissible(("c", 1, 1), "c2", ("c", 2, 1), "B")
    assert q2_admissible(("c", 1, 1), "B", ("c", 2, 1), "b")


def test_theorem_families():
    assert families(theorem_relations(2)) == {"R6", "R7", "R8.6"}
    big = families(theorem_relations(4))
    for fam in ("R1", "R2", "R3.1", "R3.7", "R4.3", "R5.1", "R5.2", "R7", "R8.5"):
        assert fam in big
    for n in range(2, 7):
        assert "R7" in families(theorem_relations(n))


def test_theorem_relations_hold():
    for n in range(2, 7):
        ctx = build_context(n)
        assert Realizer(ctx.ambient, ctx.catalogue).failures(theorem_relations(n)) == []


def test_r52_instance_n3():
    ctx = build_context(3)
    real = Realizer(ctx.ambient, ctx.catalogue)
    r52 = [r for r in theorem_relations(3) if r.label.startswith("R5.2")]
    assert r52 and all(real.holds(r) for r in r52)


def test_lifts_extend():
    for n in range(2, 6):
        assert lift_violations(build_context(n), jw_presentation(n)) == []


def test_autfk_static_data():
    expected = {0: AbelianInvariants(0), 1: AbelianInvariants(0, (2,)), 2: AbelianInvariants(0, (2, 2)),
                3: AbelianInvariants(0, (2,)), 4: AbelianInvariants(0, (2,))}
    for k, want in expected.items():
        p = autfk_presentation(k)
        assert abelianisation(p) == want
        validate_autfk(p, k)
    assert autfk_presentation(2) == build_autfk_presentation(2)


def test_autfk_validation_catches_bad_relator():
    p = autfk_presentation(2)
    gens = list(autfk_generators(2))
    bad = type(p)(p.generators, p.relators + (p.generators.gen(gens[0]),))
    with pytest.raises(AssertionError):
        validate_autfk(bad, 2)


def test_presentation_abelianisations():
    table = {2: AbelianInvariants(2, (2,)), 3: AbelianInvariants(1, (2, 2, 2)), 4: AbelianInvariants(0, (2, 2, 2))}
    for n, want in table.items():
        assert abelianisation(theorem_presentation(n)) == want


def test_graph_image():
    for n in range(2, 5):
        img = graph_image(n)
        assert img.order == 2 and img.elements == ["identity", "swap"]
        vb = img.witness.basis
        assert ConjClass.of(img.witness(vb.gen("b"))) == ConjClass.of(vb.gen("B"))
        assert ConjClass.of(img.witness(vb.gen("B"))) == ConjClass.of(vb.gen("b"))


def test_verify_all_passes():
    for n in range(2, 5):
        report = verify_all(n)
        assert report.ok, report.lines()


def test_verify_all_names_corrupted_relation():
    bogus = Relation("R99[bogus]", (("rho", 1),), (("theta", 1),))
    report = verify_all(3, extra_relations=[bogus])
    assert not report.ok
    assert any("R99[bogus]" in line and "FAIL" in line for line in report.lines())
