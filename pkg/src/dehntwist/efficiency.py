"""Efficiency conditions for Dehn twists and the improvement moves M1-M5.

Moves are implemented for the restricted class of free vertex groups and
infinite cyclic edge groups.  A move either returns a new ``(g, d)`` or raises
:class:`NotApplicable` (its predicate fails at the location) or
:class:`NotSupported` (the general amalgam/HNN bookkeeping would be needed).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Optional

from .freegroup import (
    Basis,
    FreeAutomorphism,
    Word,
    apply,
    are_conjugate,
    exact_root,
    primitive_root,
)
from .gog import (
    BAR,
    DehnTwistData,
    GraphOfGroups,
    euler_characteristic,
    serre_graph,
    twistor_exponent,
)

NOT_MINIMAL = "NotMinimal"
INVISIBLE_VERTEX = "InvisibleVertex"
UNUSED_EDGE = "UnusedEdge"
PROPER_POWER = "ProperPower"
POSITIVELY_BONDED = "PositivelyBonded"

POSITIVE = "Positive"
NEGATIVE = "Negative"

MOVES = ("M1", "M2", "M3", "M4", "M5", "M1*", "M2*")
SCAN_ORDER = ("M5", "M4", "M3", "M2", "M1")


class MoveError(Exception):
    pass


class NotApplicable(MoveError):
    pass


class NotSupported(MoveError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str
    location: tuple

    def __str__(self):
        return f"{self.kind} at {', '.join(self.location)}"


# ------------------------------------------------------------------ checks


def bonding(g: GraphOfGroups, d: DehnTwistData, e1: str, e2: str) -> Optional[str]:
    """Whether ``f_e1(z_e1^m)`` and ``f_e2(z_e2^n)`` are conjugate for some
    ``m >= 1`` and ``n >= 1`` (Positive) or ``n <= -1`` (Negative)."""
    tau = g.graph.tau
    if tau[e1] != tau[e2]:
        raise ValueError(f"edges {e1} and {e2} end at different vertices")
    d1, d2 = twistor_exponent(d, e1), twistor_exponent(d, e2)
    if d1 == 0 or d2 == 0:
        return None
    r1, _ = primitive_root(g.edge_image[e1])
    r2, _ = primitive_root(g.edge_image[e2])
    same = (d1 > 0) == (d2 > 0)
    if are_conjugate(r1, r2) is not None:
        return POSITIVE if same else NEGATIVE
    if are_conjugate(r1, r2.inverse()) is not None:
        return NEGATIVE if same else POSITIVE
    return None


def _check(g: GraphOfGroups, d: DehnTwistData, skip: Optional[str]) -> list[Violation]:
    graph = g.graph
    out = []
    for w in graph.vertices:
        if w == skip:
            continue
        incoming = graph.incoming(w)
        if len(incoming) == 1 and g.is_surjective(incoming[0]):
            out.append(Violation(NOT_MINIMAL, (w, incoming[0])))
        if len(incoming) == 2 and all(g.is_surjective(e) for e in incoming):
            out.append(Violation(INVISIBLE_VERTEX, (w, *incoming)))
    for e in graph.geometric_edges():
        if twistor_exponent(d, e) == 0:
            out.append(Violation(UNUSED_EDGE, (e,)))
    for e in graph.edges:
        if primitive_root(g.edge_image[e])[1] > 1:
            out.append(Violation(PROPER_POWER, (e,)))
    for w in graph.vertices:
        for e1, e2 in itertools.combinations(graph.incoming(w), 2):
            if bonding(g, d, e1, e2) == POSITIVE:
                out.append(Violation(POSITIVELY_BONDED, (e1, e2)))
    return out


def check_efficient(g: GraphOfGroups, d: DehnTwistData) -> list[Violation]:
    return _check(g, d, None)


def check_pointedly_efficient(g: GraphOfGroups, d: DehnTwistData, v: Optional[str] = None) -> list[Violation]:
    """As :func:`check_efficient`, but minimality and invisibility are not
    required at the basepoint ``v``."""
    return _check(g, d, g.basepoint if v is None else v)


def measure(g: GraphOfGroups, d: DehnTwistData) -> tuple[int, int, int]:
    """Termination measure, decreased lexicographically by every move."""
    powers = sum(primitive_root(w)[1] - 1 for w in g.edge_image.values())
    return powers, len(g.graph.geometric_edges()), len(check_efficient(g, d))


# ------------------------------------------------------- editable copies


@dataclass
class _Edge:
    tau: str
    tau_bar: str
    f: Word
    f_bar: Word
    m: int
    m_bar: int


def _unpack(g: GraphOfGroups, d: DehnTwistData):
    bases = dict(g.vertex_basis)
    edges = {}
    for e in g.graph.geometric_edges():
        eb = g.graph.bar[e]
        edges[e] = _Edge(g.graph.tau[e], g.graph.tau[eb], g.edge_image[e], g.edge_image[eb], d.m(e), d.m(eb))
    return bases, edges


def _pack(bases, edges, basepoint) -> tuple[GraphOfGroups, DehnTwistData]:
    graph = serre_graph(list(bases), {name: (x.tau, x.tau_bar) for name, x in edges.items()})
    images, gamma = {}, {}
    for name, x in edges.items():
        images[name], images[name + BAR] = x.f, x.f_bar
        gamma[name], gamma[name + BAR] = x.m, x.m_bar
    return GraphOfGroups(graph, bases, images, basepoint), DehnTwistData(gamma)


def _side(edges, e: str):
    """``(geometric name, is_bar)`` for an oriented edge."""
    return (e[: -len(BAR)], True) if e.endswith(BAR) else (e, False)


def _absorb(bases, edges, gone: str, into: str, image: Word) -> None:
    """Delete rank-1 vertex ``gone``; its generator becomes ``image`` in ``into``."""
    phi = FreeAutomorphism(bases[gone], [image], codomain=bases[into])
    for x in edges.values():
        if x.tau == gone:
            x.tau, x.f = into, apply(phi, x.f)
        if x.tau_bar == gone:
            x.tau_bar, x.f_bar = into, apply(phi, x.f_bar)
    del bases[gone]


def _surjective_sign(g: GraphOfGroups, e: str) -> int:
    return g.edge_image[e].letters[0][1]


def _require(cond: bool, exc, msg: str) -> None:
    if not cond:
        raise exc(msg)


# ------------------------------------------------------------------- moves


def _m1(g, d, w, pointed):
    _require(w in g.graph.vertices, NotApplicable, f"no vertex {w}")
    _require(not (pointed and w == g.basepoint), NotApplicable, "M1* may not remove the basepoint")
    incoming = g.graph.incoming(w)
    _require(len(incoming) == 1 and g.is_surjective(incoming[0]), NotApplicable, f"{w} is not a surjective leaf")
    e = incoming[0]
    bases, edges = _unpack(g, d)
    del edges[_side(edges, e)[0]]
    del bases[w]
    base = g.graph.iota(e) if w == g.basepoint else g.basepoint
    return _pack(bases, edges, base)


def _m2(g, d, w, pointed):
    _require(w in g.graph.vertices, NotApplicable, f"no vertex {w}")
    _require(not (pointed and w == g.basepoint), NotApplicable, "M2* may not remove the basepoint")
    incoming = g.graph.incoming(w)
    _require(
        len(incoming) == 2 and all(g.is_surjective(e) for e in incoming),
        NotApplicable,
        f"{w} is not invisible",
    )
    e1, e2 = incoming
    _require(bonding(g, d, e1, e2) == NEGATIVE, NotApplicable, f"edges at {w} are not negatively bonded")
    _require(g.graph.bar[e1] != e2, NotSupported, "invisible vertex on a loop")
    s1, s2 = _surjective_sign(g, e1), _surjective_sign(g, e2)
    e1b, e2b = g.graph.bar[e1], g.graph.bar[e2]
    spliced = _Edge(
        tau=g.graph.tau[e2b],
        tau_bar=g.graph.tau[e1b],
        f=g.edge_image[e2b] ** (s1 * s2),
        f_bar=g.edge_image[e1b],
        m=d.m(e1) + s1 * s2 * (d.m(e2b) - d.m(e2)),
        m_bar=d.m(e1b),
    )
    bases, edges = _unpack(g, d)
    n1, n2 = _side(edges, e1)[0], _side(edges, e2)[0]
    name = min(n1, n2)
    del edges[n1], edges[n2]
    edges[name] = spliced
    del bases[w]
    base = g.graph.iota(e1) if w == g.basepoint else g.basepoint
    return _pack(bases, edges, base)


def _m3(g, d, pair, pointed):
    _require(isinstance(pair, (tuple, list)) and len(pair) == 2, NotApplicable, "M3 needs two edges")
    e1, e2 = pair
    graph = g.graph
    _require(e1 in graph.tau and e2 in graph.tau and e1 != e2, NotApplicable, "unknown edges")
    _require(graph.tau[e1] == graph.tau[e2], NotApplicable, "edges do not share a terminal vertex")
    _require(bonding(g, d, e1, e2) == POSITIVE, NotApplicable, "edges are not positively bonded")
    w = graph.tau[e1]
    # fold e2 onto e1, absorbing iota(e2)
    for keep, fold in ((e1, e2), (e2, e1)):
        u_keep, u_fold = graph.iota(keep), graph.iota(fold)
        fold_bar = graph.bar[fold]
        if (
            g.edge_image[keep] == g.edge_image[fold]
            and twistor_exponent(d, keep) == twistor_exponent(d, fold)
            and len({w, u_keep, u_fold}) == 3
            and g.rank(u_fold) == 1
            and g.is_surjective(fold_bar)
        ):
            target = g.edge_image[graph.bar[keep]]
            _require(primitive_root(target)[1] == 1, NotSupported, "fold would create a proper power")
            s = _surjective_sign(g, fold_bar)
            bases, edges = _unpack(g, d)
            del edges[_side(edges, fold)[0]]
            _absorb(bases, edges, u_fold, u_keep, target ** s)
            base = u_keep if g.basepoint == u_fold else g.basepoint
            return _pack(bases, edges, base)
    raise NotSupported("fold needs equal images, equal twistors and a rank-1 far vertex")


def _m4(g, d, e, pointed):
    graph = g.graph
    _require(e in graph.tau, NotApplicable, f"no edge {e}")
    _require(twistor_exponent(d, e) == 0, NotApplicable, f"edge {e} is used")
    u, w = graph.tau[e], graph.iota(e)
    _require(u != w, NotSupported, "contracting a loop gives an HNN extension")
    eb = graph.bar[e]
    if not g.is_surjective(e):
        if not g.is_surjective(eb):
            raise NotSupported("contraction gives a proper amalgam")
        e, eb, u, w = eb, e, w, u
    # G_u = <x> with f_e(a) = x^s is absorbed: x = f_eb(a)^s in G_w
    target = g.edge_image[eb]
    _require(primitive_root(target)[1] == 1, NotSupported, "contraction would create a proper power")
    s = _surjective_sign(g, e)
    bases, edges = _unpack(g, d)
    del edges[_side(edges, e)[0]]
    _absorb(bases, edges, u, w, target ** s)
    base = w if g.basepoint == u else g.basepoint
    return _pack(bases, edges, base)


def _m5(g, d, e, pointed):
    graph = g.graph
    _require(e in graph.tau, NotApplicable, f"no edge {e}")
    root, p = exact_root(g.edge_image[e])
    _require(p > 1, NotApplicable, f"f_{e} is not a proper power")
    eb = graph.bar[e]
    other, q = exact_root(g.edge_image[eb])
    _require(q % p == 0, NotSupported, "opposite image is not a power of the same degree")
    bases, edges = _unpack(g, d)
    name, is_bar = _side(edges, e)
    x = edges[name]
    new_e, new_eb = root, other ** (q // p)
    if is_bar:
        x.f, x.f_bar = new_eb, new_e
    else:
        x.f, x.f_bar = new_e, new_eb
    x.m, x.m_bar = x.m * p, x.m_bar * p
    return _pack(bases, edges, g.basepoint)


_IMPL = {"M1": _m1, "M2": _m2, "M3": _m3, "M4": _m4, "M5": _m5}


def apply_move(g: GraphOfGroups, d: DehnTwistData, move: str, location):
    """Apply one move; ``location`` is a vertex (M1, M2), an edge (M4, M5) or
    a pair of edges (M3)."""
    if move not in MOVES:
        raise ValueError(f"unknown move {move!r}")
    pointed = move.endswith("*")
    return _IMPL[move.rstrip("*")](g, d, location, pointed)


# ------------------------------------------------------------------ driver


@dataclass(frozen=True)
class MoveRecord:
    move: str
    location: tuple
    chi_before: int
    chi_after: int

    def __str__(self):
        return f"{self.move} {' '.join(self.location)} chi {self.chi_before} -> {self.chi_after}"


@dataclass
class EfficiencyResult:
    gog: GraphOfGroups
    twist: DehnTwistData
    log: list = field(default_factory=list)
    outstanding: list = field(default_factory=list)
    unsupported: list = field(default_factory=list)  # (move, location, reason)

    @property
    def efficient(self) -> bool:
        return not self.outstanding


_MOVE_FOR = {
    PROPER_POWER: "M5",
    UNUSED_EDGE: "M4",
    POSITIVELY_BONDED: "M3",
    INVISIBLE_VERTEX: "M2",
    NOT_MINIMAL: "M1",
}


def _candidates(violations, move):
    for v in violations:
        if _MOVE_FOR[v.kind] != move:
            continue
        if move == "M3":
            yield v.location
        else:
            yield v.location[0]


def make_efficient(g: GraphOfGroups, d: DehnTwistData, pointed: bool = False, max_moves: int = 1000) -> EfficiencyResult:
    """Apply moves in the order M5, M4, M3, M2, M1 until none applies."""
    check = check_pointedly_efficient if pointed else check_efficient
    log: list[MoveRecord] = []
    while True:
        violations = check(g, d)
        unsupported = []
        progressed = False
        for move in SCAN_ORDER:
            name = move + "*" if pointed and move in ("M1", "M2") else move
            for loc in _candidates(violations, move):
                try:
                    g2, d2 = apply_move(g, d, name, loc)
                except NotApplicable:
                    continue
                except NotSupported as exc:
                    unsupported.append((name, loc, str(exc)))
                    continue
                before, after = measure(g, d), measure(g2, d2)
                chi, chi2 = euler_characteristic(g), euler_characteristic(g2)
                if chi != chi2 or not after < before:
                    raise AssertionError(f"{name} at {loc} broke an invariant")
                log.append(MoveRecord(name, loc if isinstance(loc, tuple) else (loc,), chi, chi2))
                g, d = g2, d2
                progressed = True
                break
            if progressed:
                break
        if not progressed or len(log) >= max_moves:
            return EfficiencyResult(g, d, log, violations, unsupported)


# ------------------------------------------------------------------ corpus


def random_instance(rng: random.Random, max_vertices: int = 4) -> tuple[GraphOfGroups, DehnTwistData]:
    """Small graph of groups biased towards triggering every move."""
    nv = rng.randint(1, max_vertices)
    vertices = [f"v{i}" for i in range(nv)]
    letters = "xyz"
    bases = {v: Basis(letters[: rng.choice((1, 1, 2, 2, 3))]) for v in vertices}
    pairs = [(vertices[i], rng.choice(vertices[:i])) for i in range(1, nv)]
    for _ in range(rng.choice((0, 0, 1, 1, 2))):
        pairs.append((rng.choice(vertices), rng.choice(vertices)))
    remembered: dict[str, list[Word]] = {}

    def image(v: str) -> Word:
        b = bases[v]
        if remembered.get(v) and rng.random() < 0.25:
            return rng.choice(remembered[v])
        gen = b.gen(rng.randrange(b.rank)) ** rng.choice((1, -1))
        roll = rng.random()
        if b.rank == 1:
            w = gen if roll < 0.8 else gen ** 2
        elif roll < 0.4:
            w = gen
        elif roll < 0.6:
            w = gen ** 2
        else:
            other = b.gen(rng.randrange(b.rank))
            w = gen * other if (gen * other) else gen
            if rng.random() < 0.3:
                w = w ** 2
        remembered.setdefault(v, []).append(w)
        return w

    edges = {}
    for k, (t, tb) in enumerate(pairs):
        m_bar = rng.randint(-1, 1)
        m = m_bar if rng.random() < 0.25 else rng.choice([x for x in (-2, -1, 0, 1, 2) if x != m_bar])
        edges[f"e{k}"] = _Edge(t, tb, image(t), image(tb), m, m_bar)
    return _pack(bases, edges, rng.choice(vertices))


def corpus(count: int = 60, seed: int = 0) -> list[tuple[GraphOfGroups, DehnTwistData]]:
    rng = random.Random(seed)
    return [random_instance(rng) for _ in range(count)]
