"""Finite presentations, extension assembly and abelianisation.

File format::

    gen: x y z
    rel: x x
    rel: x y x^-1 y^-1

Any number of ``gen:`` lines may appear before the relators; words use the
free group token syntax.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd
from typing import Any, Callable, Hashable, Iterable, Optional, Protocol, Sequence

from .freegroup import (
    Basis,
    FreeAutomorphism,
    Word,
    compose,
    cyclic_reduce,
    format_word,
    invert,
    parse_word,
)


class PresentationError(ValueError):
    pass


class OracleFailure(PresentationError):
    pass


@dataclass(frozen=True)
class FinitePresentation:
    generators: Basis
    relators: tuple[Word, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "relators", tuple(self.relators))
        for r in self.relators:
            if r.basis != self.generators:
                raise PresentationError(f"relator {r} is over another basis")

    @classmethod
    def from_strings(cls, generators: Sequence[str], relators: Iterable[str] = ()) -> "FinitePresentation":
        basis = Basis(generators)
        return cls(basis, tuple(parse_word(basis, r) for r in relators))

    @property
    def names(self) -> tuple[str, ...]:
        return self.generators.names

    def word(self, text: str) -> Word:
        return parse_word(self.generators, text)

    def __str__(self):
        return serialize_presentation(self)


def serialize_presentation(p: FinitePresentation) -> str:
    lines = ["gen: " + " ".join(p.names)] if p.names else ["gen:"]
    lines += ["rel: " + format_word(r) for r in p.relators]
    return "\n".join(lines) + "\n"


def parse_presentation(text: str) -> FinitePresentation:
    names: list[str] = []
    rels: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tag, colon, rest = line.partition(":")
        tag = tag.strip()
        if not colon or tag not in ("gen", "rel"):
            raise PresentationError(f"line {lineno}: expected 'gen:' or 'rel:'")
        if tag == "gen":
            if rels:
                raise PresentationError(f"line {lineno}: generators must precede relators")
            names.extend(rest.split())
        else:
            rels.append(rest)
    try:
        return FinitePresentation.from_strings(names, rels)
    except (KeyError, ValueError) as exc:
        raise PresentationError(str(exc)) from exc


# ----------------------------------------------------------------- abelian


def relation_matrix(p: FinitePresentation) -> list[list[int]]:
    """Exponent-sum matrix: one row per relator, one column per generator."""
    rows = []
    for r in p.relators:
        row = [0] * p.generators.rank
        for i, s in r.letters:
            row[i] += s
        rows.append(row)
    return rows


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _snf(rows: list[list[int]], ncols: int, track_left: bool):
    """Smith normal form by unimodular row/column operations.

    Returns ``(diag, U, V)`` with ``U @ M @ V`` diagonal; ``U`` is ``None``
    unless ``track_left``.
    """
    A = [list(r) for r in rows]
    m, n = len(A), ncols
    U = _identity(m) if track_left else None
    V = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst -= q * row src
        if q:
            rs, rd = A[src], A[dst]
            for c in range(n):
                if rs[c]:
                    rd[c] -= q * rs[c]
            if U is not None:
                us, ud = U[src], U[dst]
                for c in range(m):
                    if us[c]:
                        ud[c] -= q * us[c]

    def add_col(dst, src, q):  # col dst -= q * col src
        if q:
            for row in A:
                if row[src]:
                    row[dst] -= q * row[src]
            for row in V:
                if row[src]:
                    row[dst] -= q * row[src]

    diag = []
    t = 0
    while t < min(m, n):
        # pivot of least absolute value in the remaining block
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // p)
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // p)
                    if A[t][j]:
                        dirty = True
            if dirty:
                # move the smallest leftover in row/column t into the pivot
                cands = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
                cands += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
                _, i, j = min(cands)
                if j == t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            # divisibility: every remaining entry must be a multiple of the pivot
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, -1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        diag.append(A[t][t])
        t += 1
    diag += [0] * (min(m, n) - len(diag))
    return diag, U, V


def smith_normal_form(matrix: Sequence[Sequence[int]], ncols: Optional[int] = None):
    """Exact Smith normal form.

    Returns ``(diag, U, V)`` with ``U @ matrix @ V`` equal to the diagonal
    matrix with entries ``diag`` (length ``min(rows, cols)``), each dividing
    the next, and ``U``, ``V`` unimodular.
    """
    rows = [list(map(int, r)) for r in matrix]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return _snf(rows, ncols, track_left=True)


@dataclass(frozen=True)
class AbelianInvariants:
    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        t = tuple(self.torsion)
        object.__setattr__(self, "torsion", t)
        if any(d < 2 for d in t) or any(b % a for a, b in zip(t, t[1:])):
            raise ValueError(f"torsion {t} is not an invariant factor chain")

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        for d, group in itertools.groupby(self.torsion):
            k = len(list(group))
            parts.append(f"Z/{d}" if k == 1 else f"(Z/{d})^{k}")
        return " x ".join(parts) if parts else "0"

    @classmethod
    def parse(cls, text: str) -> "AbelianInvariants":
        text = text.strip()
        if text == "0":
            return cls(0)
        free, torsion = 0, []
        for part in text.split(" x "):
            part = part.strip()
            exp = 1
            if part.startswith("("):
                inner, _, rest = part[1:].partition(")")
                part, exp = inner, int(rest.lstrip("^"))
            elif part.startswith("Z^"):
                free += int(part[2:])
                continue
            if part == "Z":
                free += exp
            elif part.startswith("Z/"):
                torsion += [int(part[2:])] * exp
            else:
                raise ValueError(f"cannot parse abelian group {text!r}")
        return cls(free, tuple(sorted(torsion)))


def _prune_rows(matrix: list[list[int]]) -> list[list[int]]:
    seen = set()
    out = []
    for row in matrix:
        if not any(row):
            continue
        key = tuple(row)
        neg = tuple(-x for x in row)
        if key in seen or neg in seen:
            continue
        seen.add(key)
        out.append(row)
    return out


def _abelian_data(p: FinitePresentation):
    rows = _prune_rows(relation_matrix(p))
    n = p.generators.rank
    diag, _, V = _snf(rows, n, track_left=False)
    diag = diag + [0] * (n - len(diag))
    return diag, V


def abelianisation(p: FinitePresentation) -> AbelianInvariants:
    diag, _ = _abelian_data(p)
    return AbelianInvariants(sum(1 for d in diag if d == 0), tuple(d for d in diag if d >= 2))


@dataclass(frozen=True)
class AbelianClass:
    """Coordinates of an element of ``Z^r + sum Z/d_i``."""

    free: tuple[int, ...]
    torsion: tuple[tuple[int, int], ...]  # (residue, modulus)

    def is_zero(self) -> bool:
        return not any(self.free) and not any(r for r, _ in self.torsion)

    def __str__(self):
        parts = [f"free ({', '.join(map(str, self.free))})"]
        parts.append("torsion (" + ", ".join(f"{r} mod {m}" for r, m in self.torsion) + ")")
        return " ".join(parts)


def class_in_abelianisation(p: FinitePresentation, w: Word | str) -> AbelianClass:
    """Image of a word in the abelianisation, in SNF coordinates."""
    if isinstance(w, str):
        w = p.word(w)
    if w.basis != p.generators:
        raise PresentationError("word is not over the presentation's generators")
    x = [0] * p.generators.rank
    for i, s in w.letters:
        x[i] += s
    diag, V = _abelian_data(p)
    y = [sum(x[k] * V[k][j] for k in range(len(x))) for j in range(len(x))]
    free = tuple(y[j] for j, d in enumerate(diag) if d == 0)
    torsion = tuple((y[j] % d, d) for j, d in enumerate(diag) if d >= 2)
    return AbelianClass(free, torsion)


# ------------------------------------------------------------------ Tietze


def _cyclic_key(w: Word):
    core, _ = cyclic_reduce(w)
    letters = core.letters
    n = len(letters)
    inv = tuple((i, -s) for i, s in reversed(letters))
    rots = [letters[k:] + letters[:k] for k in range(n)] + [inv[k:] + inv[:k] for k in range(n)]
    return min(rots) if rots else ()


def tietze_simplify(p: FinitePresentation, max_substitution: int = 12) -> FinitePresentation:
    """Drop trivial and duplicate relators and eliminate generators that occur
    exactly once in some relator, as long as the substituted word is short."""
    names = list(p.names)
    rels = [[(names[i], s) for i, s in r.letters] for r in p.relators]

    def cleanup(rels):
        basis = Basis(names)
        out, seen = [], set()
        for r in rels:
            w = Word(basis, [(names.index(g), s) for g, s in r])
            core, _ = cyclic_reduce(w)
            if not core:
                continue
            key = _cyclic_key(core)
            if key in seen:
                continue
            seen.add(key)
            out.append([(names[i], s) for i, s in core.letters])
        return out

    rels = cleanup(rels)
    changed = True
    while changed:
        changed = False
        for ri, r in enumerate(rels):
            counts: dict[str, int] = {}
            for g, _ in r:
                counts[g] = counts.get(g, 0) + 1
            for pos, (g, s) in enumerate(r):
                if counts[g] != 1 or len(r) - 1 > max_substitution:
                    continue
                # r = u g^s v  =>  g^s = u^-1 v^-1
                u, v = r[:pos], r[pos + 1 :]
                expr = [(h, -t) for h, t in reversed(u)] + [(h, -t) for h, t in reversed(v)]
                if s == -1:
                    expr = [(h, -t) for h, t in reversed(expr)]
                new_rels = []
                for rj, other in enumerate(rels):
                    if rj == ri:
                        continue
                    sub = []
                    for h, t in other:
                        if h == g:
                            sub += expr if t == 1 else [(x, -y) for x, y in reversed(expr)]
                        else:
                            sub.append((h, t))
                    new_rels.append(sub)
                names.remove(g)
                rels = cleanup(new_rels)
                changed = True
                break
            if changed:
                break
    basis = Basis(names)
    return FinitePresentation(basis, tuple(Word(basis, [(names.index(g), s) for g, s in r]) for r in rels))


# -------------------------------------------------------- computable groups


class ComputableGroup(Protocol):
    def identity(self) -> Any: ...

    def multiply(self, x: Any, y: Any) -> Any: ...

    def inverse(self, x: Any) -> Any: ...

    def key(self, x: Any) -> Hashable:
        """Hashable value, equal exactly when the elements are equal."""
        ...


class AutomorphismGroup:
    """Aut(F) acting on the left; ``multiply(f, g) = f ∘ g``."""

    def __init__(self, basis: Basis):
        self.basis = basis

    def identity(self):
        return FreeAutomorphism.identity(self.basis)

    def multiply(self, x, y):
        return compose(x, y)

    def inverse(self, x):
        return invert(x)

    def key(self, x):
        return x.key()


class CyclicGroup:
    """Integers modulo ``order``; ``order = 0`` gives the integers."""

    def __init__(self, order: int = 0):
        self.order = order

    def _norm(self, x):
        return x % self.order if self.order else x

    def identity(self):
        return 0

    def multiply(self, x, y):
        return self._norm(x + y)

    def inverse(self, x):
        return self._norm(-x)

    def key(self, x):
        return self._norm(x)


def evaluate(group: ComputableGroup, w: Word, assignment: dict[str, Any], inverses: Optional[dict[str, Any]] = None) -> Any:
    """Evaluate a word letter by letter, left to right.  ``inverses`` is an
    optional cache of inverted generator values, filled as needed."""
    result = group.identity()
    inverses = {} if inverses is None else inverses
    names = w.basis.names
    for i, s in w.letters:
        name = names[i]
        if s == 1:
            x = assignment[name]
        else:
            if name not in inverses:
                inverses[name] = group.inverse(assignment[name])
            x = inverses[name]
        result = group.multiply(result, x)
    return result


def bfs_oracle(group: ComputableGroup, generators: dict[str, Any], bound: int = 2) -> Callable[[Any], Optional[list[tuple[str, int]]]]:
    """Kernel-expression oracle that searches all words of length <= bound.

    Returns a function mapping an element to a list of ``(name, ±1)`` or
    ``None`` when no word of length <= bound represents it.
    """
    table: dict[Hashable, list[tuple[str, int]]] = {group.key(group.identity()): []}
    letters = [(name, s, x if s == 1 else group.inverse(x)) for name, x in generators.items() for s in (1, -1)]
    frontier = [([], group.identity())]
    for _ in range(bound):
        nxt = []
        for word, value in frontier:
            for name, s, x in letters:
                if word and word[-1] == (name, -s):
                    continue
                v = group.multiply(value, x)
                k = group.key(v)
                if k not in table:
                    table[k] = word + [(name, s)]
                    nxt.append((word + [(name, s)], v))
        frontier = nxt

    def oracle(element):
        found = table.get(group.key(element))
        return None if found is None else list(found)

    return oracle


@dataclass
class SesData:
    """Input for assembling a presentation of ``B`` from ``1 -> A -> B -> C -> 1``.

    ``oracle`` maps an element of ``B`` known to lie in ``ι(A)`` to a word in
    A's generators (a :class:`Word` over ``a.generators``, or a list of
    ``(name, ±1)``), or returns ``None`` if it cannot.  When omitted, words of
    length up to ``search_bound`` in ι(X) are searched.
    """

    a: FinitePresentation
    c: FinitePresentation
    group: ComputableGroup
    embedding: dict[str, Any]
    lifts: dict[str, Any]
    oracle: Optional[Callable[[Any], Any]] = None
    search_bound: int = 2
    verify: bool = True


def ses_assemble(data: SesData) -> FinitePresentation:
    """Kernel relations, lifted relations and conjugation relations."""
    a_names, c_names = data.a.names, data.c.names
    if set(a_names) & set(c_names):
        raise PresentationError(f"generator names clash: {set(a_names) & set(c_names)}")
    basis = Basis(a_names + c_names)
    group = data.group
    assignment = {**data.embedding, **data.lifts}
    oracle = data.oracle or bfs_oracle(group, data.embedding, data.search_bound)
    inverses: dict[str, Any] = {}

    def as_word(found, what) -> Word:
        if found is None:
            raise OracleFailure(f"oracle could not express {what} in the kernel")
        if isinstance(found, Word):
            pairs = [(found.basis.names[i], s) for i, s in found.letters]
        else:
            pairs = list(found)
        return Word(basis, [(basis.index(n), s) for n, s in pairs])

    def lift_word(w: Word) -> Word:
        return Word(basis, [(basis.index(w.basis.names[i]), s) for i, s in w.letters])

    relators: list[Word] = [lift_word(r) for r in data.a.relators]
    for s in data.c.relators:
        s_tilde = lift_word(s)
        w_s = as_word(oracle(evaluate(group, s_tilde, assignment, inverses)), f"lifted relator {s}")
        relators.append(s_tilde * w_s.inverse())
    for z in c_names:
        zw = basis.gen(z)
        for eps in (1, -1):
            for x in a_names:
                conj = zw ** eps * basis.gen(x) * zw ** (-eps)
                w = as_word(oracle(evaluate(group, conj, assignment, inverses)), f"conjugate {format_word(conj)}")
                relators.append(conj * w.inverse())
    result = FinitePresentation(basis, tuple(r for r in relators if r))
    if data.verify:
        ident = group.key(group.identity())
        for r in result.relators:
            if group.key(evaluate(group, r, assignment, inverses)) != ident:
                raise PresentationError(f"assembled relator {r} does not hold")
    return result
