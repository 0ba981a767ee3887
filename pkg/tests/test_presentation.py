import random

import pytest
from hypothesis import given, settings, strategies as st

from dehntwist.freegroup import Basis, FreeAutomorphism
from dehntwist.presentation import (
    AbelianInvariants,
    AutomorphismGroup,
    CyclicGroup,
    FinitePresentation,
    OracleFailure,
    PresentationError,
    SesData,
    abelianisation,
    bfs_oracle,
    class_in_abelianisation,
    parse_presentation,
    relation_matrix,
    serialize_presentation,
    ses_assemble,
    smith_normal_form,
    tietze_simplify,
)


def matmul(x, y):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*y)] for row in x]


def check_snf(m):
    diag, U, V = smith_normal_form(m)
    prod = matmul(matmul(U, m), V)
    for i, row in enumerate(prod):
        for j, x in enumerate(row):
            assert x == (diag[i] if i == j else 0)
    nonzero = [d for d in diag if d]
    assert all(d > 0 for d in nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    assert diag[len(nonzero):] == [0] * (len(diag) - len(nonzero))
    return diag


def test_snf_examples():
    assert check_snf([[2, 0], [0, 3]]) == [1, 6]
    assert check_snf([[0, 0], [0, 0]]) == [0, 0]
    assert check_snf([[1, 0], [0, 1]]) == [1, 1]
    assert check_snf([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_snf_property(rows, cols, data):
    m = [[data.draw(st.integers(-9, 9)) for _ in range(cols)] for _ in range(rows)]
    check_snf(m)


def test_relation_matrix():
    assert relation_matrix(FinitePresentation.from_strings(["x"], ["x x"])) == [[2]]
    assert relation_matrix(FinitePresentation.from_strings(["x", "y"], ["x y x^-1 y^-1"])) == [[0, 0]]


def test_abelianisation_examples():
    assert abelianisation(FinitePresentation.from_strings(["x"], ["x x"])) == AbelianInvariants(0, (2,))
    assert abelianisation(FinitePresentation.from_strings(["x", "y"], ["x y x^-1 y^-1"])) == AbelianInvariants(2)
    assert abelianisation(FinitePresentation.from_strings(["x", "y"], ["x x y^3", "x^-1 y^2"])) == AbelianInvariants(0, (7,))
    assert str(AbelianInvariants(1, (2, 2, 2))) == "Z x (Z/2)^3"
    assert AbelianInvariants.parse("Z^2 x Z/2") == AbelianInvariants(2, (2,))
    assert str(AbelianInvariants(0)) == "0"


def test_class_in_abelianisation():
    p = FinitePresentation.from_strings(["x", "y"], ["x x", "x y x^-1 y^-1"])
    assert class_in_abelianisation(p, "").is_zero()
    assert class_in_abelianisation(p, "x x x").torsion[0][0] == 1
    assert class_in_abelianisation(p, "y y").free in ((2,), (-2,))


def test_tietze_examples():
    p = FinitePresentation.from_strings(["x", "y"], ["x x^-1", "y y", "y y", "y^-1 y^-1"])
    q = tietze_simplify(p)
    assert len(q.relators) == 1
    p = FinitePresentation.from_strings(["x", "y", "g"], ["g y^-1 x^-1", "g g", "x y x^-1 y^-1"])
    q = tietze_simplify(p)
    assert "g" not in q.names or len(q.names) < 3
    assert abelianisation(q) == abelianisation(p)


def random_presentation(rng):
    names = ["x", "y", "z"][: rng.randint(1, 3)]
    basis = Basis(names)
    rels = []
    for _ in range(rng.randint(0, 4)):
        length = rng.randint(1, 6)
        rels.append(" ".join(rng.choice(names) + rng.choice(("", "^-1")) for _ in range(length)))
    return FinitePresentation.from_strings(basis.names, rels)


def test_abelianisation_invariances():
    rng = random.Random(8)
    for _ in range(200):
        p = random_presentation(rng)
        a = abelianisation(p)
        assert abelianisation(tietze_simplify(p)) == a
        shuffled = list(p.relators)
        rng.shuffle(shuffled)
        assert abelianisation(FinitePresentation(p.generators, tuple(shuffled))) == a


def test_presentation_format_round_trip():
    p = FinitePresentation.from_strings(["x", "y"], ["x x", "x y^-1 x^-1 y"])
    text = serialize_presentation(p)
    assert text == "gen: x y\nrel: x x\nrel: x y^-1 x^-1 y\n"
    assert parse_presentation(text) == p
    with pytest.raises(PresentationError):
        parse_presentation("rel: x\n")
    with pytest.raises(PresentationError):
        parse_presentation("gen: x\nfoo: x\n")


def test_ses_z4():
    a = FinitePresentation.from_strings(["x"], ["x x"])
    c = FinitePresentation.from_strings(["z"], ["z z"])
    data = SesData(a, c, CyclicGroup(4), {"x": 2}, {"z": 1})
    p = ses_assemble(data)
    assert abelianisation(p) == AbelianInvariants(0, (4,))


def test_ses_integers():
    a = FinitePresentation.from_strings(["x"])
    c = FinitePresentation.from_strings(["z"], ["z z"])
    p = ses_assemble(SesData(a, c, CyclicGroup(0), {"x": 2}, {"z": 1}))
    assert abelianisation(p) == AbelianInvariants(1)


def test_ses_trivial_c():
    a = FinitePresentation.from_strings(["x"], ["x x x"])
    c = FinitePresentation.from_strings([])
    p = ses_assemble(SesData(a, c, CyclicGroup(3), {"x": 1}, {}))
    assert p.names == ("x",)
    assert [str(r) for r in p.relators] == ["x x x"]


def test_ses_trivial_a():
    a = FinitePresentation.from_strings([])
    c = FinitePresentation.from_strings(["z"], ["z z z z"])
    p = ses_assemble(SesData(a, c, CyclicGroup(4), {}, {"z": 1}, oracle=lambda element: []))
    assert p.names == ("z",)
    assert abelianisation(p) == AbelianInvariants(0, (4,))


def test_ses_oracle_failure():
    a = FinitePresentation.from_strings(["x"])
    c = FinitePresentation.from_strings(["z"], ["z z"])
    with pytest.raises(OracleFailure):
        ses_assemble(SesData(a, c, CyclicGroup(0), {"x": 10}, {"z": 1}, search_bound=1))


def test_bfs_oracle_in_automorphism_group():
    basis = Basis(["a", "b"])
    group = AutomorphismGroup(basis)
    rho = FreeAutomorphism.from_dict(basis, {"a": "a b"})
    oracle = bfs_oracle(group, {"r": rho}, bound=3)
    assert oracle(rho ** 3) == [("r", 1)] * 3
    assert oracle(rho ** -2) == [("r", -1)] * 2
    assert oracle(FreeAutomorphism.from_dict(basis, {"a": "b", "b": "a"})) is None
