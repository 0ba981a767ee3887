"""Whitehead's algorithm for ordered tuples of conjugacy classes."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

from .freegroup import (
    Basis,
    ConjClass,
    FreeAutomorphism,
    Word,
    apply,
    compose,
    invert,
)


@dataclass(frozen=True)
class WhiteheadAut:
    kind: str  # "I" or "II"
    # Type I: (permutation, signs); Type II: (multiplier letter, frozenset of letters)
    data: tuple
    realization: FreeAutomorphism

    def __call__(self, w: Word) -> Word:
        return apply(self.realization, w)


@dataclass(frozen=True)
class ClassTuple:
    classes: tuple[ConjClass, ...]

    @classmethod
    def of(cls, words: Iterable[Word]) -> "ClassTuple":
        return cls(tuple(ConjClass.of(w) for w in words))

    @property
    def basis(self) -> Optional[Basis]:
        return self.classes[0].core.basis if self.classes else None

    def key(self):
        return tuple(c.core.letters for c in self.classes)

    def image(self, aut: FreeAutomorphism) -> "ClassTuple":
        return ClassTuple(tuple(ConjClass.of(apply(aut, c.core)) for c in self.classes))

    def __len__(self):
        return len(self.classes)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.classes) + ")"


def total_length(t: ClassTuple) -> int:
    return sum(len(c) for c in t.classes)


def _type_two_images(basis: Basis, a, subset) -> list[Word]:
    ai, asg = a
    mult = Word(basis, [a])
    images = []
    for i in range(basis.rank):
        x = basis.gen(i)
        if i == ai:
            images.append(x)
            continue
        left = mult.inverse() if (i, -1) in subset else basis.identity()
        right = mult if (i, 1) in subset else basis.identity()
        images.append(left * x * right)
    return images


@lru_cache(maxsize=None)
def _enumerate(rank: int) -> tuple[WhiteheadAut, ...]:
    basis = Basis([f"x{i}" for i in range(rank)])
    seen = set()
    out = []
    for perm in itertools.permutations(range(rank)):
        for signs in itertools.product((1, -1), repeat=rank):
            images = [Word(basis, [(perm[i], signs[i])]) for i in range(rank)]
            aut = FreeAutomorphism(basis, images)
            if aut.key()[2] not in seen:
                seen.add(aut.key()[2])
                out.append(WhiteheadAut("I", (perm, signs), aut))
    letters = [(i, s) for i in range(rank) for s in (1, -1)]
    for a in letters:
        others = [x for x in letters if x[0] != a[0]]
        for mask in itertools.product((False, True), repeat=len(others)):
            subset = frozenset([a] + [x for x, m in zip(others, mask) if m])
            aut = FreeAutomorphism(basis, _type_two_images(basis, a, subset))
            if aut.key()[2] not in seen:
                seen.add(aut.key()[2])
                out.append(WhiteheadAut("II", (a, subset), aut))
    return tuple(out)


def enumerate_whitehead(rank: int, basis: Optional[Basis] = None) -> list[WhiteheadAut]:
    """All Whitehead automorphisms of the given rank, deduplicated, Type I first."""
    if rank < 1:
        raise ValueError("rank must be >= 1")
    if basis is None:
        return list(_enumerate(rank))
    if basis.rank != rank:
        raise ValueError("basis rank mismatch")
    return list(_enumerate_on(basis))


@lru_cache(maxsize=32)
def _enumerate_on(basis: Basis) -> tuple[WhiteheadAut, ...]:
    return tuple(
        WhiteheadAut(w.kind, w.data, FreeAutomorphism(basis, [Word(basis, im.letters) for im in w.realization.images]))
        for w in _enumerate(basis.rank)
    )


def _rebase(t: ClassTuple) -> tuple[Basis, list[WhiteheadAut]]:
    basis = t.basis
    return basis, _enumerate_on(basis) if basis.rank else ()


def minimize(t: ClassTuple) -> tuple[ClassTuple, FreeAutomorphism]:
    """Greedy length reduction by Whitehead automorphisms; returns the minimal
    tuple and an automorphism carrying ``t`` onto it."""
    if not t.classes:
        return t, None
    basis, auts = _rebase(t)
    witness = FreeAutomorphism.identity(basis)
    if basis.rank == 0:
        return t, witness
    current, length = t, total_length(t)
    improved = True
    while improved:
        improved = False
        for w in auts:
            if w.kind == "I":
                continue
            cand = current.image(w.realization)
            cl = total_length(cand)
            if cl < length:
                current, length = cand, cl
                witness = compose(w.realization, witness)
                improved = True
                break
    return current, witness


def maps_onto(phi: FreeAutomorphism, t1: ClassTuple, t2: ClassTuple) -> bool:
    return len(t1) == len(t2) and t1.image(phi).key() == t2.key()


def are_equivalent(t1: ClassTuple, t2: ClassTuple) -> Optional[FreeAutomorphism]:
    """An automorphism sending the i-th class of ``t1`` to the i-th class of
    ``t2`` for every i, or ``None`` if there is none."""
    if len(t1) != len(t2):
        return None
    if not t1.classes:
        return None
    if t1.basis != t2.basis:
        raise ValueError("tuples are over different bases")
    basis, auts = _rebase(t1)
    m1, phi1 = minimize(t1)
    m2, phi2 = minimize(t2)
    if total_length(m1) != total_length(m2):
        return None
    target_len = total_length(m1)
    # Type I automorphisms normalise the Type II set, so every path through the
    # minimal level can be rewritten as (Type I) after (Type II moves).
    targets = {}
    for w in auts:
        if w.kind == "I":
            targets.setdefault(m2.image(w.realization).key(), w.realization)

    def finish(state_aut, pi):
        pi_inv = invert(pi)
        phi = compose(invert(phi2), compose(pi_inv, compose(state_aut, phi1)))
        if not maps_onto(phi, t1, t2):
            raise AssertionError("Whitehead witness failed to verify")
        return phi

    start = FreeAutomorphism.identity(basis)
    if m1.key() in targets:
        return finish(start, targets[m1.key()])
    seen = {m1.key()}
    queue = deque([(m1, start)])
    type_two = [w for w in auts if w.kind == "II"]
    while queue:
        state, psi = queue.popleft()
        for w in type_two:
            nxt = state.image(w.realization)
            key = nxt.key()
            if key in seen or total_length(nxt) != target_len:
                continue
            seen.add(key)
            npsi = compose(w.realization, psi)
            if key in targets:
                return finish(npsi, targets[key])
            queue.append((nxt, npsi))
    return None
