from dehntwist.cli import main, parse_class_tuple, serialize_class_tuple
from dehntwist.gog import nielsen_gog, parse_gog, serialize_gog, serialize_pi1_basis


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def nielsen_file(tmp_path, n=3):
    g, d, _ = nielsen_gog(n)
    return write(tmp_path, "n.gog", serialize_gog(g, d))


def test_validate(tmp_path, capsys):
    assert main(["validate", nielsen_file(tmp_path)]) == 0
    assert "valid: true" in capsys.readouterr().out
    bad = write(tmp_path, "bad.gog", "vertex u: x\nvertex w: y\nbasepoint u\n")
    assert main(["validate", bad]) == 3
    assert "not connected" in capsys.readouterr().out


def test_parse_error(tmp_path, capsys):
    bad = write(tmp_path, "bad.gog", "vertex v: a\nnonsense\n")
    assert main(["validate", bad]) == 1
    assert main(["validate", str(tmp_path / "missing.gog")]) == 1
    assert main(["no-such-command"]) == 1
    assert main([]) == 1


def test_check_efficient(tmp_path, capsys):
    assert main(["check-efficient", nielsen_file(tmp_path)]) == 0
    assert "efficient: true" in capsys.readouterr().out
    pp = write(tmp_path, "pp.gog", "vertex v: B b\nedge e | v | v | b b | B | -1 | 0\nbasepoint v\n")
    assert main(["check-efficient", pp]) == 0
    out = capsys.readouterr().out
    assert "efficient: false" in out and "ProperPower" in out
    assert main(["check-efficient", "--pointed", nielsen_file(tmp_path)]) == 0
    assert "pointedly efficient: true" in capsys.readouterr().out


def test_make_efficient(tmp_path, capsys):
    src = write(tmp_path, "p.gog", "vertex v: B b\nedge e | v | v | b b | B B | -1 | 0\nbasepoint v\n")
    dst = tmp_path / "out.gog"
    assert main(["make-efficient", src, "-o", str(dst)]) == 0
    out = capsys.readouterr().out
    assert "move: M5 e" in out and "efficient: true" in out
    g, d = parse_gog(dst.read_text())
    assert str(g.f("e")) == "b" and d.m("e") == -2


def test_make_efficient_unsupported(tmp_path, capsys):
    src = write(tmp_path, "p.gog", "vertex v: B b\nedge e | v | v | b b | B | -1 | 0\nbasepoint v\n")
    assert main(["make-efficient", src]) == 2
    assert "not supported" in capsys.readouterr().err


def test_induced(tmp_path, capsys):
    assert main(["induced", "--nielsen", "3"]) == 0
    assert "a -> a b" in capsys.readouterr().out
    g, d, pb = nielsen_gog(2)
    gog = write(tmp_path, "n.gog", serialize_gog(g, d))
    basis = write(tmp_path, "n.basis", serialize_pi1_basis(g, pb))
    assert main(["induced", gog, "--basis", basis]) == 0
    out = capsys.readouterr().out
    assert "a -> a b" in out and "b -> b" in out
    assert main(["induced", gog]) == 1


def test_whitehead_commands(tmp_path, capsys):
    t1 = write(tmp_path, "t1", "basis: a b\nclass: a\nclass: b\n")
    t2 = write(tmp_path, "t2", "basis: a b\nclass: a\nclass: a\n")
    t3 = write(tmp_path, "t3", "basis: a b\nclass: b\nclass: b a b^-1\n")
    assert main(["whitehead-equiv", t1, t2]) == 0
    assert "equivalent: false" in capsys.readouterr().out
    assert main(["whitehead-equiv", t1, t3]) == 0
    assert "equivalent: true" in capsys.readouterr().out
    m = write(tmp_path, "m", "basis: a b\nclass: a b a^-1\n")
    assert main(["whitehead-min", m]) == 0
    assert "length: 1" in capsys.readouterr().out


def test_class_tuple_round_trip():
    t = parse_class_tuple("basis: a b\nclass: a b\nclass: b^-1\n")
    assert parse_class_tuple(serialize_class_tuple(t)) == t


def test_nielsen_command(capsys):
    assert main(["nielsen", "--n", "3", "--emit", "abelianisation"]) == 0
    assert capsys.readouterr().out.strip() == "Z x (Z/2)^3"
    assert main(["nielsen", "--n", "2", "--emit", "abelianisation", "--source", "theorem"]) == 0
    assert capsys.readouterr().out.strip() == "Z^2 x Z/2"
    assert main(["nielsen", "--n", "2", "--emit", "presentation"]) == 0
    assert capsys.readouterr().out.startswith("gen: ")
    assert main(["nielsen", "--n", "3"]) == 0
    assert "ok: true" in capsys.readouterr().out
    assert main(["nielsen", "--n", "1"]) == 1


def test_abelianize(tmp_path, capsys):
    p = write(tmp_path, "p.txt", "gen: x y\nrel: x x\nrel: x y x^-1 y^-1\n")
    assert main(["abelianize", p]) == 0
    assert capsys.readouterr().out.strip() == "Z x Z/2"
    assert main(["--abelianize", p]) == 0
    assert capsys.readouterr().out.strip() == "Z x Z/2"
    assert main(["abelianize", "--simplify", p]) == 0
    assert capsys.readouterr().out.strip() == "Z x Z/2"


def test_corpus_command(capsys):
    assert main(["--seed", "3", "corpus", "--count", "10"]) == 0
    assert "failures: 0" in capsys.readouterr().out
