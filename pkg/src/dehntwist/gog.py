"""Graphs of groups with free vertex groups and infinite cyclic edge groups.

Oriented edges come in pairs ``e`` / ``e~``; both orientations share the edge
group generator ``a_e``.  ``edge_image[e]`` is the word ``f_e(a_e)`` in the
vertex group at ``tau(e)``.

Text format (one record per line, ``#`` starts a comment)::

    vertex v: B b c1
    edge e | v | v | b | B | -1 | 0
    basepoint v

An ``edge`` line lists tau(e), tau(e~), f_e(a_e), f_e~(a_e), m_e, m_e~.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .freegroup import (
    Basis,
    FreeAutomorphism,
    Word,
    apply,
    compose,
    format_word,
    invert,
    parse_word,
    power_of,
)

BAR = "~"


class GogError(ValueError):
    pass


class CompatibilityError(GogError):
    pass


class RewriteError(GogError):
    pass


def bar_name(e: str) -> str:
    return e[: -len(BAR)] if e.endswith(BAR) else e + BAR


@dataclass(frozen=True)
class SerreGraph:
    vertices: tuple[str, ...]
    tau: dict  # oriented edge -> terminal vertex
    bar: dict  # oriented edge -> reversed edge

    def iota(self, e: str) -> str:
        return self.tau[self.bar[e]]

    @property
    def edges(self) -> tuple[str, ...]:
        return tuple(self.tau)

    def geometric_edges(self) -> list[str]:
        return [e for e in self.tau if not e.endswith(BAR)]

    def incoming(self, v: str) -> list[str]:
        return [e for e in self.tau if self.tau[e] == v]

    def valence(self, v: str) -> int:
        return len(self.incoming(v))

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = {self.vertices[0]}
        queue = deque(seen)
        while queue:
            v = queue.popleft()
            for e in self.incoming(v):
                u = self.iota(e)
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        return len(seen) == len(self.vertices)


def serre_graph(vertices: Iterable[str], edges: dict[str, tuple[str, str]]) -> SerreGraph:
    """Build from geometric edges ``name -> (tau(e), tau(e~))``."""
    tau, bar = {}, {}
    for name, (t, t_bar) in edges.items():
        if name.endswith(BAR):
            raise GogError(f"edge name {name!r} may not end with {BAR!r}")
        tau[name], tau[name + BAR] = t, t_bar
        bar[name], bar[name + BAR] = name + BAR, name
    return SerreGraph(tuple(vertices), tau, bar)


@dataclass(frozen=True)
class GraphOfGroups:
    graph: SerreGraph
    vertex_basis: dict  # vertex -> Basis
    edge_image: dict  # oriented edge -> Word in vertex_basis[tau(e)]
    basepoint: str

    def f(self, e: str) -> Word:
        return self.edge_image[e]

    def rank(self, v: str) -> int:
        return self.vertex_basis[v].rank

    def is_surjective(self, e: str) -> bool:
        """f_e onto G_tau(e): exact for free targets."""
        w = self.edge_image[e]
        return self.rank(self.graph.tau[e]) == 1 and len(w) == 1


@dataclass(frozen=True)
class DehnTwistData:
    """Exponents ``m_e`` with ``gamma_e = a_e^{m_e}``."""

    gamma: dict  # oriented edge -> int

    def m(self, e: str) -> int:
        return self.gamma.get(e, 0)


def make_gog(
    vertex_bases: dict[str, Sequence[str]],
    edges: dict[str, tuple[str, str, str, str]],
    basepoint: str,
) -> GraphOfGroups:
    """Convenience constructor: ``edges[name] = (tau_e, tau_ebar, f_e, f_ebar)`` with words as text."""
    bases = {v: Basis(names) for v, names in vertex_bases.items()}
    graph = serre_graph(bases, {name: (t, tb) for name, (t, tb, _, _) in edges.items()})
    images = {}
    for name, (t, tb, fe, feb) in edges.items():
        images[name] = parse_word(bases[t], fe)
        images[name + BAR] = parse_word(bases[tb], feb)
    return GraphOfGroups(graph, bases, images, basepoint)


def validate(g: GraphOfGroups) -> list[str]:
    problems = []
    graph = g.graph
    for e, ebar in graph.bar.items():
        if ebar == e or graph.bar.get(ebar) != e:
            problems.append(f"bar is not a fixpoint-free involution at {e}")
    for e, v in graph.tau.items():
        if v not in graph.vertices:
            problems.append(f"edge {e} ends at unknown vertex {v}")
    if not graph.is_connected():
        problems.append("not connected")
    if g.basepoint not in graph.vertices:
        problems.append(f"basepoint {g.basepoint} is not a vertex")
    for v in graph.vertices:
        if v not in g.vertex_basis:
            problems.append(f"vertex {v} has no vertex group")
    for e in graph.edges:
        w = g.edge_image.get(e)
        if w is None:
            problems.append(f"edge {e} has no edge map")
        elif not w:
            problems.append(f"edge map not injective at {e}")
        elif w.basis != g.vertex_basis.get(graph.tau[e]):
            problems.append(f"edge map of {e} is not in the vertex group at tau({e})")
    return problems


def euler_characteristic(g: GraphOfGroups) -> int:
    # sum_v (1 - rank G_v) - sum_edges (1 - 1)
    return sum(1 - g.rank(v) for v in g.graph.vertices)


def twistor_exponent(d: DehnTwistData, e: str) -> int:
    """``m_e - m_{e~}``: the twistor is ``a_e`` to this power."""
    return d.m(e) - d.m(bar_name(e))


def fresh_name(taken: Iterable[str], stem: str = "s") -> str:
    taken = set(taken)
    if stem not in taken:
        return stem
    k = 1
    while f"{stem}{k}" in taken:
        k += 1
    return f"{stem}{k}"


def stabilise(g: GraphOfGroups) -> GraphOfGroups:
    """Replace the basepoint group G_v by G_v * Z."""
    v = g.basepoint
    old = g.vertex_basis[v]
    new = Basis(old.names + (fresh_name(old.names),))
    bases = dict(g.vertex_basis)
    bases[v] = new
    images = {
        e: Word(new, w.letters) if g.graph.tau[e] == v else w for e, w in g.edge_image.items()
    }
    return GraphOfGroups(g.graph, bases, images, v)


# --------------------------------------------------------------- path group


@dataclass(frozen=True)
class PathWord:
    """``g_0 t_{e_1} g_1 ... t_{e_k} g_k`` with ``g_i`` in G_{tau(e_i)}."""

    start: str
    words: tuple  # g_0 .. g_k
    edges: tuple = ()  # e_1 .. e_k

    def __str__(self):
        parts = [format_word(self.words[0])]
        for e, w in zip(self.edges, self.words[1:]):
            parts += [f"t[{e}]", format_word(w)]
        return " ".join(p for p in parts if p != "1") or "1"


def path_end(g: GraphOfGroups, w: PathWord) -> str:
    return g.graph.tau[w.edges[-1]] if w.edges else w.start


def check_path(g: GraphOfGroups, w: PathWord) -> None:
    if len(w.words) != len(w.edges) + 1:
        raise GogError("malformed path word: need one more vertex word than edges")
    v = w.start
    if w.words[0].basis != g.vertex_basis[v]:
        raise GogError(f"g_0 is not in G_{v}")
    for e, x in zip(w.edges, w.words[1:]):
        if e not in g.graph.tau:
            raise GogError(f"unknown edge {e}")
        if g.graph.iota(e) != v:
            raise GogError(f"edge {e} does not start at {v}")
        v = g.graph.tau[e]
        if x.basis != g.vertex_basis[v]:
            raise GogError(f"vertex word after {e} is not in G_{v}")


def vertex_word(g: GraphOfGroups, v: str, text: str) -> PathWord:
    return PathWord(v, (parse_word(g.vertex_basis[v], text),))


def path(g: GraphOfGroups, start: str, *items) -> PathWord:
    """``path(g, v, "w0", "e1", "w1", ...)`` with words as text."""
    words = [parse_word(g.vertex_basis[start], items[0] if items else "1")]
    edges = []
    rest = list(items[1:])
    while rest:
        e, x = rest[0], rest[1] if len(rest) > 1 else "1"
        rest = rest[2:]
        edges.append(e)
        words.append(parse_word(g.vertex_basis[g.graph.tau[e]], x))
    pw = PathWord(start, tuple(words), tuple(edges))
    check_path(g, pw)
    return pw


def path_multiply(g: GraphOfGroups, w1: PathWord, w2: PathWord) -> PathWord:
    if path_end(g, w1) != w2.start:
        raise GogError("paths do not concatenate")
    words = w1.words[:-1] + (w1.words[-1] * w2.words[0],) + w2.words[1:]
    return PathWord(w1.start, words, w1.edges + w2.edges)


def path_inverse(g: GraphOfGroups, w: PathWord) -> PathWord:
    words = tuple(x.inverse() for x in reversed(w.words))
    edges = tuple(g.graph.bar[e] for e in reversed(w.edges))
    return PathWord(path_end(g, w), words, edges)


def britton_reduce(g: GraphOfGroups, w: PathWord) -> PathWord:
    """Remove every pinch ``t_e f_e(a)^k t_{e~}`` using ``t_e f_e(a) t_e^-1 = f_{e~}(a)``."""
    check_path(g, w)
    words = [w.words[0]]
    edges: list[str] = []
    for e, x in zip(w.edges, w.words[1:]):
        if edges and e == g.graph.bar[edges[-1]]:
            last = edges[-1]
            k = power_of(words[-1], g.edge_image[last])
            if k is not None:
                words.pop()
                edges.pop()
                words[-1] = words[-1] * g.edge_image[e] ** k * x
                continue
        edges.append(e)
        words.append(x)
    return PathWord(w.start, tuple(words), tuple(edges))


# ------------------------------------------------------------- automorphisms


@dataclass(frozen=True)
class GogAutomorphism:
    """``(H_Gamma, (H_e), (H_v), (delta(e)))`` on a fixed graph of groups.

    ``eps[e] = ±1`` encodes ``H_e: a_e -> a_{H(e)}^eps``; ``hv[v]`` maps G_v to
    G_{H(v)}; ``delta[e]`` lies in G_{tau(H(e))}.  Compatibility is checked on
    construction.
    """

    gog: GraphOfGroups
    vmap: dict
    emap: dict
    eps: dict
    hv: dict
    delta: dict

    def __post_init__(self):
        check_compatibility(self)

    def image_edge(self, e: str) -> str:
        return self.emap[e]


def check_compatibility(h: GogAutomorphism) -> None:
    g = h.gog
    graph = g.graph
    if sorted(h.vmap.values()) != sorted(graph.vertices):
        raise CompatibilityError("vertex map is not a bijection")
    if sorted(h.emap.values()) != sorted(graph.edges):
        raise CompatibilityError("edge map is not a bijection")
    for e in graph.edges:
        he = h.emap[e]
        if h.emap[graph.bar[e]] != graph.bar[he]:
            raise CompatibilityError(f"edge map does not commute with bar at {e}")
        if graph.tau[he] != h.vmap[graph.tau[e]]:
            raise CompatibilityError(f"edge map does not commute with tau at {e}")
        if h.eps[e] != h.eps[graph.bar[e]] or h.eps[e] not in (1, -1):
            raise CompatibilityError(f"edge group map at {e} is not ±1 or differs from its reverse")
    for e in graph.edges:
        v = graph.tau[e]
        he = h.emap[e]
        lhs = apply(h.hv[v], g.edge_image[e])
        dlt = h.delta[e]
        rhs = dlt * g.edge_image[he] ** h.eps[e] * dlt.inverse()
        if lhs != rhs:
            raise CompatibilityError(f"compatibility fails at edge {e}: {lhs} != {rhs}")


def identity_gog(g: GraphOfGroups) -> GogAutomorphism:
    graph = g.graph
    return GogAutomorphism(
        g,
        {v: v for v in graph.vertices},
        {e: e for e in graph.edges},
        {e: 1 for e in graph.edges},
        {v: FreeAutomorphism.identity(g.vertex_basis[v]) for v in graph.vertices},
        {e: g.vertex_basis[graph.tau[e]].identity() for e in graph.edges},
    )


def dehn_twist(g: GraphOfGroups, d: DehnTwistData) -> GogAutomorphism:
    """Trivial graph, vertex and edge maps; ``delta(e) = f_e(a_e)^{m_e}``."""
    ident = identity_gog(g)
    delta = {e: g.edge_image[e] ** d.m(e) for e in g.graph.edges}
    return GogAutomorphism(g, ident.vmap, ident.emap, ident.eps, ident.hv, delta)


def compose_gog(h: GogAutomorphism, h2: GogAutomorphism) -> GogAutomorphism:
    """The product ``H.H'`` (``h2`` acts first)."""
    if h.gog is not h2.gog and h.gog != h2.gog:
        raise GogError("automorphisms of different graphs of groups")
    g = h.gog
    graph = g.graph
    vmap = {v: h.vmap[h2.vmap[v]] for v in graph.vertices}
    emap = {e: h.emap[h2.emap[e]] for e in graph.edges}
    eps = {e: h.eps[h2.emap[e]] * h2.eps[e] for e in graph.edges}
    hv = {v: compose(h.hv[h2.vmap[v]], h2.hv[v]) for v in graph.vertices}
    delta = {
        e: apply(h.hv[h2.vmap[graph.tau[e]]], h2.delta[e]) * h.delta[h2.emap[e]] for e in graph.edges
    }
    return GogAutomorphism(g, vmap, emap, eps, hv, delta)


def invert_gog(h: GogAutomorphism) -> GogAutomorphism:
    g = h.gog
    graph = g.graph
    vinv = {w: v for v, w in h.vmap.items()}
    einv = {f: e for e, f in h.emap.items()}
    eps = {e: h.eps[einv[e]] for e in graph.edges}
    hv = {v: invert(h.hv[vinv[v]]) for v in graph.vertices}
    # (H^-1)_{tau(e)} applied to delta(H^-1(e))^-1
    delta = {e: apply(hv[graph.tau[e]], h.delta[einv[e]].inverse()) for e in graph.edges}
    return GogAutomorphism(g, vinv, einv, eps, hv, delta)


def induced_on_path_group(h: GogAutomorphism, w: PathWord) -> PathWord:
    """``g -> H_v(g)`` and ``t_e -> delta(e~) t_{H(e)} delta(e)^-1``."""
    g = h.gog
    graph = g.graph
    check_path(g, w)
    v = w.start
    words = [apply(h.hv[v], w.words[0])]
    edges = []
    for e, x in zip(w.edges, w.words[1:]):
        words[-1] = words[-1] * h.delta[graph.bar[e]]
        edges.append(h.emap[e])
        v = graph.tau[e]
        words.append(h.delta[e].inverse() * apply(h.hv[v], x))
    return PathWord(h.vmap[w.start], tuple(words), tuple(edges))


def preserves_twistors(h: GogAutomorphism, d: DehnTwistData) -> bool:
    return all(h.eps[e] * twistor_exponent(d, e) == twistor_exponent(d, h.emap[e]) for e in h.gog.graph.edges)


# ------------------------------------------------------------------ pi_1


@dataclass(frozen=True)
class Pi1Basis:
    """Identification of pi_1(G, v) with a free group on ``target``.

    ``generators[i]`` is a path word representing the i-th target generator;
    ``vertex_rewrite[(v, name)]`` and ``edge_rewrite[e]`` send vertex group
    generators and stable letters to words in the target basis.
    """

    target: Basis
    generators: tuple
    vertex_rewrite: dict
    edge_rewrite: dict

    def rewrite(self, g: GraphOfGroups, w: PathWord) -> Word:
        result = self.target.identity()
        v = w.start

        def vertex_part(v, x):
            out = self.target.identity()
            names = x.basis.names
            for i, s in x.letters:
                try:
                    im = self.vertex_rewrite[(v, names[i])]
                except KeyError:
                    raise RewriteError(f"no rewrite for {names[i]} at {v}") from None
                out = out * (im if s == 1 else im.inverse())
            return out

        result = vertex_part(v, w.words[0])
        for e, x in zip(w.edges, w.words[1:]):
            if e in self.edge_rewrite:
                t = self.edge_rewrite[e]
            elif g.graph.bar[e] in self.edge_rewrite:
                t = self.edge_rewrite[g.graph.bar[e]].inverse()
            else:
                raise RewriteError(f"no rewrite for stable letter t[{e}]")
            v = g.graph.tau[e]
            result = result * t * vertex_part(v, x)
        return result

    def check(self, g: GraphOfGroups) -> None:
        for i, pw in enumerate(self.generators):
            check_path(g, pw)
            if pw.start != g.basepoint or path_end(g, pw) != g.basepoint:
                raise RewriteError(f"generator {self.target.names[i]} is not a loop at the basepoint")
            if self.rewrite(g, pw) != self.target.gen(i):
                raise RewriteError(f"generator {self.target.names[i]} does not round-trip")


def induced_automorphism(h: GogAutomorphism, basis: Pi1Basis) -> FreeAutomorphism:
    """``H_{*v}`` written in the target basis of ``basis``."""
    g = h.gog
    if h.vmap[g.basepoint] != g.basepoint:
        raise GogError("graph automorphism does not fix the basepoint")
    images = []
    for pw in basis.generators:
        images.append(basis.rewrite(g, britton_reduce(g, induced_on_path_group(h, pw))))
    aut = FreeAutomorphism(basis.target, images)
    invert(aut)
    return aut


# ---------------------------------------------------------------- Nielsen


def nielsen_gog(n: int) -> tuple[GraphOfGroups, DehnTwistData, Pi1Basis]:
    """One vertex with group <B, b, c1..c_{n-2}> and one loop e with
    f_e(r) = b, f_e~(r) = B; twist gamma_e = r^-1, gamma_e~ = 1."""
    if n < 2:
        raise ValueError("n must be >= 2")
    cs = [f"c{i}" for i in range(1, n - 1)]
    g = make_gog({"v": ["B", "b"] + cs}, {"e": ("v", "v", "b", "B")}, "v")
    d = DehnTwistData({"e": -1, "e" + BAR: 0})
    target = Basis(["a", "b"] + cs)
    vb = g.vertex_basis["v"]
    gens = [PathWord("v", (vb.identity(), vb.identity()), ("e",))]
    gens += [PathWord("v", (vb.gen(name),)) for name in ["b"] + cs]
    rewrite = {("v", "B"): target.word("a b a^-1"), ("v", "b"): target.gen("b")}
    rewrite.update({("v", c): target.gen(c) for c in cs})
    pb = Pi1Basis(target, tuple(gens), rewrite, {"e": target.gen("a")})
    pb.check(g)
    return g, d, pb


def edge_swap(g: GraphOfGroups, edge: str, eps: int, hv: FreeAutomorphism, delta: dict) -> GogAutomorphism:
    """Graph automorphism exchanging ``edge`` and its reverse on a one-vertex loop."""
    graph = g.graph
    ebar = graph.bar[edge]
    return GogAutomorphism(
        g,
        {v: v for v in graph.vertices},
        {**{e: e for e in graph.edges}, edge: ebar, ebar: edge},
        {**{e: 1 for e in graph.edges}, edge: eps, ebar: eps},
        {v: (hv if v == graph.tau[edge] else FreeAutomorphism.identity(g.vertex_basis[v])) for v in graph.vertices},
        {e: delta.get(e, g.vertex_basis[graph.tau[e]].identity()) for e in graph.edges},
    )


# ----------------------------------------------------------------- file I/O


def serialize_gog(g: GraphOfGroups, d: Optional[DehnTwistData] = None) -> str:
    d = d or DehnTwistData({})
    lines = [f"vertex {v}: " + " ".join(g.vertex_basis[v].names) for v in g.graph.vertices]
    for e in g.graph.geometric_edges():
        eb = g.graph.bar[e]
        fields = [
            e,
            g.graph.tau[e],
            g.graph.tau[eb],
            format_word(g.edge_image[e]),
            format_word(g.edge_image[eb]),
            str(d.m(e)),
            str(d.m(eb)),
        ]
        lines.append("edge " + " | ".join(fields))
    lines.append(f"basepoint {g.basepoint}")
    return "\n".join(lines) + "\n"


def parse_gog(text: str) -> tuple[GraphOfGroups, DehnTwistData]:
    vertices: dict[str, list[str]] = {}
    edges: dict[str, tuple[str, str, str, str]] = {}
    gamma: dict[str, int] = {}
    basepoint = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        try:
            if keyword == "vertex":
                name, colon, gens = rest.partition(":")
                if not colon:
                    raise GogError("expected 'vertex NAME: gens'")
                vertices[name.strip()] = gens.split()
            elif keyword == "edge":
                fields = [f.strip() for f in rest.split("|")]
                if len(fields) != 7:
                    raise GogError("edge needs 7 '|'-separated fields")
                name, t, tb, fe, feb, me, meb = fields
                if name in edges:
                    raise GogError(f"duplicate edge {name}")
                edges[name] = (t, tb, fe, feb)
                gamma[name], gamma[name + BAR] = int(me), int(meb)
            elif keyword == "basepoint":
                basepoint = rest.strip()
            else:
                raise GogError(f"unknown record {keyword!r}")
        except (GogError, ValueError, KeyError) as exc:
            raise GogError(f"line {lineno}: {exc}") from exc
    if basepoint is None:
        raise GogError("missing basepoint")
    for name, (t, tb, _, _) in edges.items():
        for v in (t, tb):
            if v not in vertices:
                raise GogError(f"edge {name} refers to unknown vertex {v}")
    try:
        g = make_gog(vertices, edges, basepoint)
    except (KeyError, ValueError) as exc:
        raise GogError(str(exc)) from exc
    return g, DehnTwistData(gamma)


def parse_path(g: GraphOfGroups, start: str, text: str) -> PathWord:
    """Path word from tokens: ``t[e]`` for stable letters, generator tokens
    of the current vertex group otherwise."""
    v = start
    words: list[Word] = [g.vertex_basis[v].identity()]
    edges: list[str] = []
    for token in text.split():
        if token.startswith("t[") and token.endswith("]"):
            e = token[2:-1]
            if e not in g.graph.tau:
                raise GogError(f"unknown edge {e}")
            if g.graph.iota(e) != v:
                raise GogError(f"edge {e} does not start at {v}")
            edges.append(e)
            v = g.graph.tau[e]
            words.append(g.vertex_basis[v].identity())
        elif token != "1":
            words[-1] = words[-1] * parse_word(g.vertex_basis[v], token)
    return PathWord(start, tuple(words), tuple(edges))


def parse_pi1_basis(g: GraphOfGroups, text: str) -> Pi1Basis:
    """Basis file::

        target: a b c1
        gen a: t[e]
        gen b: b
        vertex v B: a b a^-1
        stable e: a
    """
    target = None
    gens: dict[str, PathWord] = {}
    vertex_rewrite: dict = {}
    edge_rewrite: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, colon, body = line.partition(":")
        if not colon:
            raise GogError(f"line {lineno}: expected 'key: value'")
        parts = head.split()
        try:
            if parts == ["target"]:
                target = Basis(body.split())
            elif target is None:
                raise GogError("'target:' must come first")
            elif parts[0] == "gen" and len(parts) == 2:
                gens[parts[1]] = parse_path(g, g.basepoint, body)
            elif parts[0] == "vertex" and len(parts) == 3:
                vertex_rewrite[(parts[1], parts[2])] = parse_word(target, body)
            elif parts[0] == "stable" and len(parts) == 2:
                edge_rewrite[parts[1]] = parse_word(target, body)
            else:
                raise GogError(f"unknown record {head!r}")
        except (KeyError, ValueError) as exc:
            raise GogError(f"line {lineno}: {exc}") from exc
    if target is None:
        raise GogError("missing 'target:' line")
    missing = [x for x in target.names if x not in gens]
    if missing:
        raise GogError(f"no path word for {', '.join(missing)}")
    pb = Pi1Basis(target, tuple(gens[x] for x in target.names), vertex_rewrite, edge_rewrite)
    pb.check(g)
    return pb


def serialize_pi1_basis(g: GraphOfGroups, pb: Pi1Basis) -> str:
    lines = ["target: " + " ".join(pb.target.names)]
    for name, pw in zip(pb.target.names, pb.generators):
        parts = []
        for i, w in enumerate(pw.words):
            if i:
                parts.append(f"t[{pw.edges[i - 1]}]")
            if w:
                parts.append(format_word(w))
        lines.append(f"gen {name}: " + (" ".join(parts) or "1"))
    for (v, x), w in pb.vertex_rewrite.items():
        lines.append(f"vertex {v} {x}: {format_word(w)}")
    for e, w in pb.edge_rewrite.items():
        lines.append(f"stable {e}: {format_word(w)}")
    return "\n".join(lines) + "\n"
