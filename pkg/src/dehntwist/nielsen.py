"""Centraliser of the Nielsen automorphism ``rho: a -> ab``.

Naming of generators (all names are valid presentation tokens):

* ``P1,2``, ``I1``: permutations and inversions of the ``c_i``;
* ``(c1+;z)``, ``(c1-;z)``: ``c1 -> c1 z`` and ``c1 -> z^-1 c1``;
* vertex group only: ``(B±;z)``, ``(b±;z)`` conjugate ``B`` or ``b`` by ``z``;
* ambient group only: ``(a-;z)`` sends ``a -> z^-1 a``, ``g(z)`` is
  ``gamma_z`` (``a -> a z``, ``b -> z^-1 b z``), plus ``rho`` and ``theta``.

The label ``B`` always stands for ``a b a^-1`` in the ambient group, matching
its identification in the fundamental group of the one-loop graph of groups.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Callable, Optional

from .freegroup import (
    Basis,
    ConjClass,
    FreeAutomorphism,
    Word,
    apply,
    compose,
    invert,
)
from .presentation import (
    AbelianInvariants,
    AutomorphismGroup,
    FinitePresentation,
    PresentationError,
    SesData,
    _cyclic_key,
    abelianisation,
    bfs_oracle,
    class_in_abelianisation,
    parse_presentation,
    serialize_presentation,
    ses_assemble,
)
from .whitehead import ClassTuple, are_equivalent, maps_onto

Token = tuple[str, int]


class VerificationError(AssertionError):
    pass


# ------------------------------------------------------------------ naming


def c_gen(i: int, eps: int, z: str) -> str:
    return f"(c{i}{'+' if eps > 0 else '-'};{z})"


def p_gen(i: int, j: int) -> str:
    return f"P{i},{j}"


def i_gen(i: int) -> str:
    return f"I{i}"


def c_names(n: int) -> list[str]:
    return [f"c{i}" for i in range(1, n - 1)]


def ambient_basis(n: int) -> Basis:
    return Basis(["a", "b"] + c_names(n))


def vertex_basis(n: int) -> Basis:
    return Basis(["B", "b"] + c_names(n))


def _ambient_value(basis: Basis, z: str) -> Word:
    return basis.word("a b a^-1") if z == "B" and "B" not in basis.names else basis.gen(z)


def _transvection(basis: Basis, y: str, eps: int, z: Word) -> FreeAutomorphism:
    y_w = basis.gen(y)
    return FreeAutomorphism.from_dict(basis, {y: y_w * z if eps > 0 else z.inverse() * y_w})


def _signed_perm_gens(basis: Basis, k: int) -> dict[str, FreeAutomorphism]:
    gens = {}
    for i, j in itertools.permutations(range(1, k + 1), 2):
        gens[p_gen(i, j)] = FreeAutomorphism.from_dict(basis, {f"c{i}": f"c{j}", f"c{j}": f"c{i}"})
    for i in range(1, k + 1):
        gens[i_gen(i)] = FreeAutomorphism.from_dict(basis, {f"c{i}": f"c{i}^-1"})
    return gens


# ------------------------------------------------------------ relations


@dataclass(frozen=True)
class Relation:
    """``lhs = rhs`` as products of generator tokens, read as compositions."""

    label: str
    lhs: tuple[Token, ...]
    rhs: tuple[Token, ...] = ()

    def relator(self, basis: Basis) -> Word:
        letters = [(basis.index(g), s) for g, s in self.lhs]
        letters += [(basis.index(g), -s) for g, s in reversed(self.rhs)]
        return Word(basis, letters)

    def __str__(self):
        def side(tokens):
            return " ".join(g if s == 1 else f"{g}^-1" for g, s in tokens) or "1"

        return f"{self.label}: {side(self.lhs)} = {side(self.rhs)}"


class Realizer:
    """Evaluates generator words as automorphisms, caching inverses."""

    def __init__(self, basis: Basis, gens: dict[str, FreeAutomorphism]):
        self.basis = basis
        self.gens = gens
        self._inv: dict[str, FreeAutomorphism] = {}

    def __call__(self, tokens) -> FreeAutomorphism:
        result = FreeAutomorphism.identity(self.basis)
        for g, s in tokens:
            if s == 1:
                x = self.gens[g]
            else:
                if g not in self._inv:
                    self._inv[g] = invert(self.gens[g])
                x = self._inv[g]
            result = compose(result, x)
        return result

    def holds(self, rel: Relation) -> bool:
        return self(rel.lhs) == self(rel.rhs)

    def failures(self, relations) -> list[Relation]:
        return [r for r in relations if not self.holds(r)]


def presentation_from(names, relations) -> FinitePresentation:
    """Relators ``lhs rhs^-1``, dropping trivial ones and cyclic duplicates."""
    basis = Basis(names)
    out, seen = [], set()
    for rel in relations:
        w = rel.relator(basis)
        if not w:
            continue
        key = _cyclic_key(w)
        if not key or key in seen:
            continue
        seen.add(key)
        out.append(w)
    return FinitePresentation(basis, tuple(out))


# ------------------------------------------------------------- Aut(F_k)


def _autfk_rules(k: int) -> tuple[list[str], list[Relation]]:
    """Relations for Aut(F_k) on transvections, permutations and inversions.

    Letters are pairs ``(i, sign)``; ``E(x, y)`` is the transvection ``(c_i^e; c_j)``
    raised to the sign of ``y``.
    """
    if k == 0:
        return [], []
    if k == 1:
        return [i_gen(1)], [Relation("I^2", ((i_gen(1), 1), (i_gen(1), 1)))]
    idx = range(1, k + 1)
    letters = [(i, s) for i in idx for s in (1, -1)]

    def neg(x):
        return (x[0], -x[1])

    def E(x, y):
        return [(c_gen(x[0], x[1], f"c{y[0]}"), y[1])]

    def inv(tokens):
        return [(g, -s) for g, s in reversed(tokens)]

    def wh(x, y):
        return E(x, y) + E(y, neg(x)) + E(neg(x), neg(y))

    P = lambda i, j: [(p_gen(i, j), 1)]
    I = lambda i: [(i_gen(i), 1)]
    names = [c_gen(i, e, f"c{j}") for i in idx for e in (1, -1) for j in idx if i != j]
    names += [p_gen(i, j) for i, j in itertools.permutations(idx, 2)] + [i_gen(i) for i in idx]
    rels: list[Relation] = []

    def add(label, lhs, rhs=()):
        rels.append(Relation(label, tuple(lhs), tuple(rhs)))

    for x, y, u, v in itertools.product(letters, repeat=4):
        if x[0] == y[0] or u[0] == v[0] or x == u or v[0] == x[0] or y[0] == u[0]:
            continue
        add("commute", E(x, y) + E(u, v), E(u, v) + E(x, y))
    for x, y, z in itertools.product(letters, repeat=3):
        if len({x[0], y[0], z[0]}) == 3:
            X, Y = E(x, y), E(y, z)
            add("chain", inv(X) + inv(Y) + X + Y + E(x, z))
    for x, y in itertools.product(letters, repeat=2):
        if x[0] != y[0]:
            add("w-sym", wh(x, y), wh(neg(x), neg(y)))
            add("w^4", wh(x, y) * 4)
    for i, j in itertools.permutations(idx, 2):
        add("w=PI", wh((i, 1), (j, 1)), P(i, j) + I(j))
        add("P^2", P(i, j) * 2)
        add("P sym", P(i, j), P(j, i))
        add("PIP", P(i, j) + I(i) + P(i, j), I(j))
        for l in idx:
            if l in (i, j):
                continue
            add("PPP", P(i, j) + P(j, l) + P(i, j), P(i, l))
            add("P,I", P(i, j) + I(l), I(l) + P(i, j))
            for m in idx:
                if m not in (i, j, l):
                    add("P,P", P(i, j) + P(l, m), P(l, m) + P(i, j))
    for i in idx:
        add("I^2", I(i) * 2)
        for j in idx:
            if i != j:
                add("I,I", I(i) + I(j), I(j) + I(i))

    # conjugating a transvection by a signed permutation
    def act_perm(i, j, x):
        return ({i: j, j: i}.get(x[0], x[0]), x[1])

    def act_inv(i, x):
        return (x[0], -x[1]) if x[0] == i else x

    for x, y in itertools.product(letters, repeat=2):
        if x[0] == y[0] or y[1] != 1:
            continue
        for i, j in itertools.permutations(idx, 2):
            add("conj P", P(i, j) + E(x, y), E(act_perm(i, j, x), act_perm(i, j, y)) + P(i, j))
        for i in idx:
            add("conj I", I(i) + E(x, y), E(act_inv(i, x), act_inv(i, y)) + I(i))
    return names, rels


def _expected_autfk(k: int) -> AbelianInvariants:
    if k == 0:
        return AbelianInvariants(0, ())
    if k == 2:
        return AbelianInvariants(0, (2, 2))
    return AbelianInvariants(0, (2,))


def autfk_generators(k: int, basis: Optional[Basis] = None) -> dict[str, FreeAutomorphism]:
    """Realizations of the Aut(F_k) generators on ``basis`` (default ``c1..ck``)."""
    basis = basis or Basis([f"c{i}" for i in range(1, k + 1)])
    gens = {}
    for i, j in itertools.permutations(range(1, k + 1), 2):
        for e in (1, -1):
            gens[c_gen(i, e, f"c{j}")] = _transvection(basis, f"c{i}", e, basis.gen(f"c{j}"))
    gens.update(_signed_perm_gens(basis, k))
    return gens


def build_autfk_presentation(k: int) -> FinitePresentation:
    names, rels = _autfk_rules(k)
    return presentation_from(names, rels)


STATIC_AUTFK_MAX = 4


def validate_autfk(p: FinitePresentation, k: int) -> None:
    basis = Basis([f"c{i}" for i in range(1, k + 1)])
    realize = Realizer(basis, autfk_generators(k, basis))
    for r in p.relators:
        if not realize([(p.names[i], s) for i, s in r.letters]).is_identity():
            raise VerificationError(f"Aut(F_{k}) relator does not hold: {r}")
    got, want = abelianisation(p), _expected_autfk(k)
    if got != want:
        raise VerificationError(f"Aut(F_{k}) abelianisation is {got}, expected {want}")


@lru_cache(maxsize=None)
def autfk_presentation(k: int) -> FinitePresentation:
    """Presentation of Aut(F_k); shipped as data for k <= 4 and validated on load."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k <= STATIC_AUTFK_MAX:
        text = resources.files("dehntwist").joinpath(f"data/autfk_{k}.txt").read_text()
        p = parse_presentation(text)
    else:
        p = build_autfk_presentation(k)
    validate_autfk(p, k)
    return p


def write_autfk_data(directory) -> None:
    """Regenerate the shipped Aut(F_k) data files."""
    from pathlib import Path

    for k in range(STATIC_AUTFK_MAX + 1):
        Path(directory, f"autfk_{k}.txt").write_text(serialize_presentation(build_autfk_presentation(k)))


# ------------------------------------------------------- symbol machinery

# A "u-symbol" is ("c", j, sign) for c_j^sign or ("y", y) with y in {"B", "b"}
# for the conjugating generators.  Its letter is the basis element it moves.


def letter(u) -> str:
    return f"c{u[1]}" if u[0] == "c" else u[1]


def z_values(n: int) -> list[str]:
    return ["B", "b"] + c_names(n)


def u_symbols(n: int) -> list[tuple]:
    out = [("c", j, s) for j in range(1, n - 1) for s in (1, -1)]
    return out + [("y", "B"), ("y", "b")]


def symbol_admissible(u, z: str) -> bool:
    """Whether ``(u; z)`` denotes a generator (its inverse is ``(u; z^-1)``)."""
    return z != letter(u)


def q2_admissible(u1, z1: str, u2, z2: str) -> bool:
    """Side condition of the commutation family, comparing ``z`` with the
    letters moved by ``u1`` and ``u2``."""
    moved = {letter(u1), letter(u2)}
    return u1 != u2 and z1 not in moved and z2 not in moved


JW = "jw"
AMBIENT = "ambient"


def sym_name(u, z: str, dialect: str) -> str:
    if u[0] == "c":
        return c_gen(u[1], u[2], z)
    if dialect == JW:
        return f"({u[1]}±;{z})"
    return f"(a-;{z})" if u[1] == "B" else f"g({z})"


def _family_relations(n: int, dialect: str) -> list[Relation]:
    """Every instance of the commutation, permutation, transvection-chain and
    Q5-type families, named in the given dialect; skips instances whose
    symbols are not generators or inverses."""
    U, Z = u_symbols(n), z_values(n)
    cidx = range(1, n - 1)
    rels: list[Relation] = []
    ys = [("y", "B"), ("y", "b")]
    num = {"B": 1, "b": 2}

    def s(u, z, sign=1):
        if not symbol_admissible(u, z):
            return None
        return (sym_name(u, z, dialect), sign)

    def add(label, lhs, rhs=()):
        if any(t is None for t in lhs) or any(t is None for t in rhs):
            return
        rels.append(Relation(label, tuple(lhs), tuple(rhs)))

    def fmt(u):
        return f"c{u[1]}{'+' if u[2] > 0 else '-'}" if u[0] == "c" else f"{u[1]}±"

    seen = set()
    for u1, u2 in itertools.permutations(U, 2):
        for z1, z2 in itertools.product(Z, repeat=2):
            if not q2_admissible(u1, z1, u2, z2) or not symbol_admissible(u1, z1) or not symbol_admissible(u2, z2):
                continue
            key = frozenset([(u1, z1), (u2, z2)])
            if key in seen:
                continue
            seen.add(key)
            add(f"2[{fmt(u1)};{z1}|{fmt(u2)};{z2}]", [s(u1, z1), s(u2, z2)], [s(u2, z2), s(u1, z1)])
    for y in ys:
        i = num[y[1]]
        for j, l in itertools.permutations(cidx, 2):
            P = (p_gen(j, l), 1)
            add(f"3.1[y{i},j={j},l={l}]", [s(y, f"c{j}"), P], [P, s(y, f"c{l}")])
            for e in (1, -1):
                add(f"3.4[j={j},l={l},e={e},y{i}]", [s(("c", j, e), y[1]), P], [P, s(("c", l, e), y[1])])
        for j in cidx:
            I = (i_gen(j), 1)
            add(f"3.2[y{i},j={j}]", [s(y, f"c{j}"), I], [I, s(y, f"c{j}", -1)])
            add(f"3.5[j={j},y{i}]", [s(("c", j, 1), y[1]), I], [I, s(("c", j, -1), y[1])])
    for X in [(p_gen(j, l), 1) for j, l in itertools.permutations(cidx, 2)] + [(i_gen(j), 1) for j in cidx]:
        for Y in [s(("y", "B"), "b"), s(("y", "b"), "B")]:
            add(f"3.3[{X[0]},{Y[0]}]", [X, Y], [Y, X])
    for u in U:
        for j in cidx:
            for eta in (1, -1):
                cj = ("c", j, eta)
                for z in Z:
                    add(
                        f"4.1[{fmt(u)},j={j},eta={eta},{z}]",
                        [s(u, f"c{j}", -eta), s(cj, z), s(u, f"c{j}", eta)],
                        [s(u, z), s(cj, z)],
                    )
    for y in ys:
        i = num[y[1]]
        for z in Z:
            for e in (1, -1):
                for w in U:
                    add(
                        f"4.2[y{i},{z},e={e},{fmt(w)}]",
                        [s(y, z, -e), s(w, y[1]), s(y, z, e)],
                        [s(w, z, e), s(w, y[1]), s(w, z, -e)],
                    )
    for y in ys:
        i = num[y[1]]
        for j in cidx:
            for eta in (1, -1):
                add(
                    f"5[j={j},eta={eta},y{i}]",
                    [s(("c", j, -eta), y[1]), s(y, f"c{j}", eta)],
                    [s(y, f"c{j}", eta), s(("c", j, eta), y[1], -1)],
                )
    return rels


def _relabel(rel: Relation, prefix: str) -> Relation:
    return Relation(prefix + rel.label, rel.lhs, rel.rhs)


# ---------------------------------------------------- Jensen-Wahl data


def jw_generators(n: int) -> dict[str, FreeAutomorphism]:
    basis = vertex_basis(n)
    gens = autfk_generators(n - 2, basis)
    for u in u_symbols(n):
        for z in z_values(n):
            if not symbol_admissible(u, z):
                continue
            name = sym_name(u, z, JW)
            if name in gens:
                continue
            zw = basis.gen(z)
            if u[0] == "c":
                gens[name] = _transvection(basis, f"c{u[1]}", u[2], zw)
            else:
                y = basis.gen(u[1])
                gens[name] = FreeAutomorphism.from_dict(basis, {u[1]: zw.inverse() * y * zw})
    return dict(sorted(gens.items(), key=lambda kv: _gen_order(kv[0])))


def _gen_order(name: str):
    kinds = ["P", "I", "(c", "(B", "(b", "(a", "g", "rho", "theta"]
    for rank, prefix in enumerate(kinds):
        if name.startswith(prefix):
            return (rank, name)
    return (len(kinds), name)


@dataclass
class JwData:
    n: int
    basis: Basis
    generators: dict
    relations: list

    @property
    def presentation(self) -> FinitePresentation:
        return presentation_from(list(self.generators), self.relations)

    def failures(self) -> list[Relation]:
        return Realizer(self.basis, self.generators).failures(self.relations)

    def class_violations(self) -> list[str]:
        targets = [self.basis.gen("B"), self.basis.gen("b")]
        bad = []
        for name, f in self.generators.items():
            for t in targets:
                if ConjClass.of(apply(f, t)) != ConjClass.of(t):
                    bad.append(f"{name} moves [{t}]")
        return bad


def _q1(k: int, prefix: str) -> list[Relation]:
    p = autfk_presentation(k)
    return [
        Relation(f"{prefix}1[{idx}]", tuple((p.names[i], s) for i, s in r.letters))
        for idx, r in enumerate(p.relators)
    ]


def jw_presentation(n: int) -> JwData:
    if n < 2:
        raise ValueError("n must be >= 2")
    rels = _q1(n - 2, "Q") + [_relabel(r, "Q") for r in _family_relations(n, JW)]
    return JwData(n, vertex_basis(n), jw_generators(n), rels)


# ------------------------------------------------------------- context


def rho(n: int) -> FreeAutomorphism:
    basis = ambient_basis(n)
    return FreeAutomorphism.from_dict(basis, {"a": "a b"})


def theta(n: int) -> FreeAutomorphism:
    basis = ambient_basis(n)
    return FreeAutomorphism.from_dict(basis, {"a": "a^-1", "b": "a b^-1 a^-1"})


def gamma(basis: Basis, z: Word) -> FreeAutomorphism:
    return FreeAutomorphism.from_dict(basis, {"a": basis.gen("a") * z, "b": z.inverse() * basis.gen("b") * z})


def catalogue(n: int) -> dict[str, FreeAutomorphism]:
    """Generators of the centraliser as automorphisms of ``<a, b, c_i>``."""
    basis = ambient_basis(n)
    gens = autfk_generators(n - 2, basis)
    for u in u_symbols(n):
        for z in z_values(n):
            if not symbol_admissible(u, z):
                continue
            name = sym_name(u, z, AMBIENT)
            if name in gens:
                continue
            zw = _ambient_value(basis, z)
            if u[0] == "c":
                gens[name] = _transvection(basis, f"c{u[1]}", u[2], zw)
            elif u[1] == "B":
                gens[name] = FreeAutomorphism.from_dict(basis, {"a": zw.inverse() * basis.gen("a")})
            else:
                gens[name] = gamma(basis, zw)
    gens["rho"] = rho(n)
    gens["theta"] = theta(n)
    return dict(sorted(gens.items(), key=lambda kv: _gen_order(kv[0])))


def lift_name(jw_name: str) -> str:
    """Name of the chosen lift of a vertex-group generator."""
    if jw_name.startswith("(B±;"):
        return "(a-;" + jw_name[4:]
    if jw_name.startswith("(b±;"):
        return "g(" + jw_name[4:-1] + ")"
    return jw_name


@dataclass
class NielsenContext:
    n: int
    ambient: Basis
    vertex: Basis
    rho: FreeAutomorphism
    theta: FreeAutomorphism
    catalogue: dict

    def inclusion(self, w: Word) -> Word:
        """Vertex group into the ambient group, ``B -> a b a^-1``."""
        images = {name: _ambient_value(self.ambient, name) for name in self.vertex.names}
        return FreeAutomorphism.from_dict(self.vertex, images, self.ambient)(w)


def build_context(n: int) -> NielsenContext:
    if n < 2:
        raise ValueError("n must be >= 2")
    cat = catalogue(n)
    r, t = cat["rho"], cat["theta"]
    for name, f in cat.items():
        invert(f)
        if compose(f, r) != compose(r, f):
            raise VerificationError(f"{name} does not commute with rho")
    if not compose(t, t).is_identity():
        raise VerificationError("theta is not an involution")
    return NielsenContext(n, ambient_basis(n), vertex_basis(n), r, t, cat)


def lift_violations(ctx: NielsenContext, jw: JwData) -> list[str]:
    """Lifts must restrict to the vertex-group generators they lift."""
    bad = []
    for name, f in jw.generators.items():
        lift = ctx.catalogue[lift_name(name)]
        for x in jw.basis.gens():
            if lift(ctx.inclusion(x)) != ctx.inclusion(f(x)):
                bad.append(f"{lift_name(name)} does not extend {name}")
                break
    return bad


def rho_exponent(f: FreeAutomorphism) -> Optional[int]:
    """``k`` with ``f = rho^k``, or ``None``."""
    basis = f.basis
    if "a" not in basis.names or "b" not in basis.names or f.codomain != basis:
        return None
    ia, ib = basis.index("a"), basis.index("b")
    im = f.images[ia].letters
    if not im or im[0] != (ia, 1):
        return None
    tail = im[1:]
    if tail and (any(x != tail[0] for x in tail) or tail[0][0] != ib):
        return None
    k = len(tail) * (tail[0][1] if tail else 1)
    expected = FreeAutomorphism.from_dict(basis, {"a": basis.gen("a") * basis.gen("b") ** k})
    return k if f == expected else None


# ------------------------------------------------------ the theorem


def theorem_relations(n: int) -> list[Relation]:
    if n < 2:
        raise ValueError("n must be >= 2")
    rels = _q1(n - 2, "R")
    for r in _family_relations(n, AMBIENT):
        label = r.label
        fam, rest = label.split("[", 1)
        args = rest
        if fam == "3.1" and "y2" in args:
            fam = "3.3"
        elif fam == "3.2" and "y2" in args:
            fam = "3.4"
        elif fam == "3.3":
            fam = "3.5"
        elif fam == "3.4":
            fam = "3.6"
        elif fam == "3.5":
            fam = "3.7"
        elif fam == "4.2" and "y2" in args:
            fam = "4.3"
        lhs, rhs = r.lhs, r.rhs
        if fam == "5":
            if "y1" in args:
                fam, rhs = "5.1", rhs + (("rho", 1),)
            else:
                fam, lhs = "5.2", lhs + (("rho", 1),)
        rels.append(Relation(f"R{fam}[{args}", lhs, rhs))
    names = list(catalogue(n))
    for g in names:
        if g != "rho":
            rels.append(Relation(f"R6[{g}]", (("rho", 1), (g, 1)), ((g, 1), ("rho", 1))))
    th = ("theta", 1)
    rels.append(Relation("R7", (th, th)))
    for i, j in itertools.permutations(range(1, n - 1), 2):
        P = (p_gen(i, j), 1)
        rels.append(Relation(f"R8.1[{i},{j}]", (th, P), (P, th)))
        for e in (1, -1):
            T = (c_gen(i, e, f"c{j}"), 1)
            rels.append(Relation(f"R8.3[{i},{e},{j}]", (th, T), (T, th)))
    for i in range(1, n - 1):
        I = (i_gen(i), 1)
        rels.append(Relation(f"R8.2[{i}]", (th, I), (I, th)))
        for e in (1, -1):
            rels.append(Relation(f"R8.4[{i},{e}]", (th, (c_gen(i, e, "B"), 1)), ((c_gen(i, e, "b"), -1), th)))
        rels.append(Relation(f"R8.5[{i}]", (th, (f"g(c{i})", 1)), ((f"(a-;c{i})", 1), th)))
    rels.append(Relation("R8.6", (th, ("g(B)", 1)), (("(a-;b)", -1), th)))
    return rels


@lru_cache(maxsize=None)
def theorem_presentation(n: int) -> FinitePresentation:
    return presentation_from(list(catalogue(n)), theorem_relations(n))


# ----------------------------------------------------------- assembly


def _rho_oracle(f: FreeAutomorphism):
    k = rho_exponent(f)
    if k is None:
        return None
    return [("rho", 1 if k > 0 else -1)] * abs(k)


def step3_presentation(n: int, ctx: Optional[NielsenContext] = None) -> FinitePresentation:
    """C^0(rho) from ``1 -> <rho> -> C^0 -> Aut(G_v, C_v) -> 1``."""
    ctx = ctx or build_context(n)
    jw = jw_presentation(n)
    quotient = jw.presentation
    renamed = Basis([lift_name(g) for g in quotient.names])
    quotient = FinitePresentation(renamed, tuple(Word(renamed, r.letters) for r in quotient.relators))
    kernel = FinitePresentation(Basis(["rho"]), ())
    data = SesData(
        a=kernel,
        c=quotient,
        group=AutomorphismGroup(ctx.ambient),
        embedding={"rho": ctx.rho},
        lifts={g: ctx.catalogue[g] for g in renamed.names},
        oracle=_rho_oracle,
    )
    return ses_assemble(data)


@lru_cache(maxsize=None)
def assemble_centraliser(n: int) -> FinitePresentation:
    """C(rho) by assembling two extensions; every relator is verified."""
    if n < 2:
        raise ValueError("n must be >= 2")
    ctx = build_context(n)
    c0 = step3_presentation(n, ctx)
    image = graph_image(n)
    if image.order != 2:
        raise VerificationError("graph automorphism group image is not of order 2")
    group = AutomorphismGroup(ctx.ambient)
    embedding = {g: ctx.catalogue[g] for g in c0.names}
    data = SesData(
        a=c0,
        c=FinitePresentation.from_strings(["theta"], ["theta theta"]),
        group=group,
        embedding=embedding,
        lifts={"theta": ctx.theta},
        oracle=bfs_oracle(group, embedding, bound=1),
    )
    return ses_assemble(data)


# ---------------------------------------------------------- graph image


@dataclass
class GraphImage:
    order: int
    elements: list  # names of accepted graph automorphisms
    witness: Optional[FreeAutomorphism]  # vertex-group map for the swap


@lru_cache(maxsize=None)
def graph_image(n: int) -> GraphImage:
    """Graph automorphisms of the one-loop graph realised by the centraliser."""
    from .gog import nielsen_gog, twistor_exponent

    g, d, _ = nielsen_gog(n)
    e, ebar = "e", g.graph.bar["e"]
    accepted, witness = ["identity"], None
    if abs(twistor_exponent(d, e)) == abs(twistor_exponent(d, ebar)):
        src = ClassTuple.of([g.edge_image[e], g.edge_image[ebar]])
        dst = ClassTuple.of([g.edge_image[ebar], g.edge_image[e]])
        witness = are_equivalent(src, dst)
        if witness is not None and maps_onto(witness, src, dst):
            accepted.append("swap")
    return GraphImage(len(accepted), accepted, witness)


# -------------------------------------------------------------- report


def expected_abelianisation(n: int) -> AbelianInvariants:
    if n == 2:
        return AbelianInvariants(2, (2,))
    if n == 3:
        return AbelianInvariants(1, (2, 2, 2))
    if n == 4:
        return AbelianInvariants(0, (2, 2, 2))
    return AbelianInvariants(0, (2, 2))


def rho_class_ok(n: int, p: FinitePresentation) -> bool:
    from math import gcd

    cls = class_in_abelianisation(p, "rho")
    if n == 2:
        g = 0
        for x in cls.free:
            g = gcd(g, x)
        return g == 1
    if n == 3:
        return len(cls.free) == 1 and abs(cls.free[0]) == 2 and not any(r for r, _ in cls.torsion)
    return cls.is_zero()


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    n: int
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, passed, detail))

    def lines(self) -> list[str]:
        return [f"{c.name}: {'pass' if c.passed else 'FAIL'}" + (f" ({c.detail})" if c.detail else "") for c in self.checks]


def _run(report: Report, name: str, fn: Callable[[], tuple[bool, str]]) -> None:
    try:
        passed, detail = fn()
    except (VerificationError, PresentationError, ValueError) as exc:
        passed, detail = False, str(exc)
    report.add(name, passed, detail)


def _failure_detail(bad) -> str:
    return "; ".join(str(r) for r in bad[:5]) + (f" and {len(bad) - 5} more" if len(bad) > 5 else "")


def verify_all(n: int, extra_relations: Optional[list] = None) -> Report:
    """Every check of the pipeline for one ``n``; ``extra_relations`` are
    checked alongside the theorem relations."""
    from .efficiency import check_efficient
    from .gog import dehn_twist, induced_automorphism, nielsen_gog

    report = Report(n)
    cat = catalogue(n)

    def centralises():
        r = cat["rho"]
        bad = [name for name, f in cat.items() if compose(f, r) != compose(r, f)]
        return not bad, ", ".join(bad) if bad else f"{len(cat)} generators"

    _run(report, "catalogue commutes with rho", centralises)
    try:
        ctx = build_context(n)
    except VerificationError as exc:
        report.add("catalogue", False, str(exc))
        return report
    jw = jw_presentation(n)

    def q_relations():
        bad = jw.failures()
        return not bad, _failure_detail(bad) if bad else f"{len(jw.relations)} relations"

    def r_relations():
        rels = theorem_relations(n) + list(extra_relations or [])
        bad = Realizer(ctx.ambient, ctx.catalogue).failures(rels)
        return not bad, _failure_detail(bad) if bad else f"{len(rels)} relations"

    def classes():
        bad = jw.class_violations()
        return not bad, "; ".join(bad)

    def lifts():
        bad = lift_violations(ctx, jw)
        return not bad, "; ".join(bad)

    def twist():
        g, d, pb = nielsen_gog(n)
        eff = check_efficient(g, d)
        induced = induced_automorphism(dehn_twist(g, d), pb)
        ok = not eff and induced == ctx.rho
        return ok, f"violations: {len(eff)}"

    def abelian():
        want = expected_abelianisation(n)
        thm = abelianisation(theorem_presentation(n))
        asm_p = assemble_centraliser(n)
        asm = abelianisation(asm_p)
        ok = thm == want and asm == want
        return ok, f"theorem {thm}, assembled {asm}, expected {want}"

    def rho_class():
        thm, asm = theorem_presentation(n), assemble_centraliser(n)
        ok = rho_class_ok(n, thm) and rho_class_ok(n, asm)
        return ok, str(class_in_abelianisation(thm, "rho"))

    def graph():
        img = graph_image(n)
        return img.order == 2, f"order {img.order}"

    _run(report, "vertex generators fix [B] and [b]", classes)
    _run(report, "Q relations", q_relations)
    _run(report, "R relations", r_relations)
    _run(report, "lifts extend vertex generators", lifts)
    _run(report, "Dehn twist efficient, induces rho", twist)
    _run(report, "graph image", graph)
    _run(report, "abelianisation", abelian)
    _run(report, "class of rho", rho_class)
    return report
