"""Finite graphs of groups with finite vertex groups.

Provides pinch (Britton-style) reduction and the word problem it decides,
membership-by-triviality across an edge, fixed-point closures of path
homomorphisms, compatible collections of normal subgroups with their
quotient graphs of groups, residual-finiteness witnesses, and the uniform
almost-malnormality constant with the acylindricity constants it yields.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .fingrp import (
    FiniteGroup,
    Homomorphism,
    SubgroupHandle,
    identity_hom,
    normal_subgroups,
    quotient,
)


@dataclass(frozen=True)
class Edge:
    """A directed edge: id, reverse id, initial vertex, edge group data."""

    eid: str
    bar: str
    src: int
    group: FiniteGroup
    incl: Homomorphism  # edge group -> vertex group at src
    ext: Optional[Homomorphism] = None  # extension G_src -> G_{i(bar)}


class GraphOfGroups:
    """A validated finite graph of groups."""

    def __init__(self, vertices: Sequence[FiniteGroup], edges: Sequence[Edge]):
        self.vertices = list(vertices)
        self.edges: Dict[str, Edge] = {}
        for e in edges:
            if e.eid in self.edges:
                raise ValueError(f"duplicate edge id {e.eid!r}")
            self.edges[e.eid] = e
        self._validate()
        self.tree_edges = self._maximal_tree()

    # -- validation ----------------------------------------------------

    def _validate(self) -> None:
        nv = len(self.vertices)
        for e in self.edges.values():
            if not 0 <= e.src < nv:
                raise ValueError(f"edge {e.eid!r} starts at missing vertex {e.src}")
            if e.bar not in self.edges:
                raise ValueError(f"edge {e.eid!r} has missing reverse {e.bar!r}")
            rev = self.edges[e.bar]
            if rev.bar != e.eid or e.bar == e.eid:
                raise ValueError(f"edge involution broken at {e.eid!r}")
            if rev.group != e.group:
                raise ValueError(f"edge pair {e.eid!r}/{e.bar!r} must share one edge group")
            if e.incl.source != e.group or e.incl.target != self.vertices[e.src]:
                raise ValueError(f"inclusion of edge {e.eid!r} has the wrong type")
            if not e.incl.is_injective():
                raise ValueError(f"inclusion of edge {e.eid!r} is not injective")
            if e.ext is not None:
                if e.ext.source != self.vertices[e.src] or e.ext.target != self.vertices[rev.src]:
                    raise ValueError(f"extension of edge {e.eid!r} has the wrong type")
                for x in e.group.elements():
                    if e.ext(e.incl(x)) != rev.incl(x):
                        raise ValueError(
                            f"extension of edge {e.eid!r} does not restrict to the edge isomorphism"
                        )
        if nv > 1:
            seen = {0}
            frontier = [0]
            while frontier:
                v = frontier.pop()
                for e in self.edges.values():
                    if e.src == v:
                        w = self.dst(e.eid)
                        if w not in seen:
                            seen.add(w)
                            frontier.append(w)
            if len(seen) != nv:
                raise ValueError("underlying graph is not connected")

    # -- basic access ---------------------------------------------------

    def dst(self, eid: str) -> int:
        return self.edges[self.edges[eid].bar].src

    def vertex_group(self, v: int) -> FiniteGroup:
        return self.vertices[v]

    def edge_image(self, eid: str) -> FrozenSet[int]:
        return frozenset(self.edges[eid].incl.images)

    def _maximal_tree(self) -> FrozenSet[str]:
        """BFS tree from vertex 0, taking lexicographically smallest edge ids."""
        tree: Set[str] = set()
        seen = {0}
        queue = [0]
        while queue:
            v = queue.pop(0)
            for eid in sorted(self.edges):
                e = self.edges[eid]
                if e.src == v and self.dst(eid) not in seen:
                    w = self.dst(eid)
                    seen.add(w)
                    tree.add(eid)
                    tree.add(e.bar)
                    queue.append(w)
        return frozenset(tree)

    def tree_path(self, u: int, v: int) -> List[str]:
        """Edge ids of the unique reduced tree path from u to v."""
        if u == v:
            return []
        parent: Dict[int, Tuple[int, str]] = {}
        seen = {u}
        queue = [u]
        while queue:
            x = queue.pop(0)
            for eid in sorted(self.tree_edges):
                e = self.edges[eid]
                if e.src == x and self.dst(eid) not in seen:
                    y = self.dst(eid)
                    parent[y] = (x, eid)
                    seen.add(y)
                    queue.append(y)
        if v not in parent:
            raise ValueError("vertices not connected in the tree")
        path = []
        x = v
        while x != u:
            px, eid = parent[x]
            path.append(eid)
            x = px
        return list(reversed(path))


@dataclass(frozen=True)
class GoGWord:
    """g_0 e_1 g_1 ... e_n g_n with closed-path typing."""

    graph: GraphOfGroups
    start: int
    g0: int
    steps: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        g = self.graph
        v = self.start
        if not 0 <= self.g0 < g.vertex_group(v).order:
            raise ValueError("g0 outside its vertex group")
        for eid, x in self.steps:
            e = g.edges[eid]
            if e.src != v:
                raise ValueError(f"edge {eid!r} does not start at vertex {v}")
            v = g.dst(eid)
            if not 0 <= x < g.vertex_group(v).order:
                raise ValueError("vertex element outside its group")
        if v != self.start:
            raise ValueError("word is not a closed path")

    @property
    def edge_length(self) -> int:
        return len(self.steps)

    def inverse(self) -> "GoGWord":
        g = self.graph
        elems = [self.g0] + [x for _, x in self.steps]
        verts = [self.start]
        for eid, _ in self.steps:
            verts.append(g.dst(eid))
        new_g0 = g.vertex_group(verts[-1]).inv(elems[-1])
        new_steps = []
        for j in range(len(self.steps) - 1, -1, -1):
            eid, _ = self.steps[j]
            new_steps.append((g.edges[eid].bar, g.vertex_group(verts[j]).inv(elems[j])))
        return GoGWord(g, self.start, new_g0, tuple(new_steps))

    def __mul__(self, other: "GoGWord") -> "GoGWord":
        if self.graph is not other.graph or self.start != other.start:
            raise ValueError("can only multiply closed words at the same base vertex")
        if not self.steps:
            G0 = self.graph.vertex_group(self.start)
            return GoGWord(self.graph, self.start, G0.mul(self.g0, other.g0), other.steps)
        last_eid, last_x = self.steps[-1]
        G_end = self.graph.vertex_group(self.graph.dst(last_eid))
        merged = self.steps[:-1] + ((last_eid, G_end.mul(last_x, other.g0)),) + other.steps
        return GoGWord(self.graph, self.start, self.g0, merged)


def britton_reduce(word: GoGWord, rng: Optional[random.Random] = None) -> GoGWord:
    """Remove pinches e x e-bar (x in the image of the reverse inclusion)
    until none remains.  The pinch picked at each step is the leftmost, or
    random under `rng`; the result's triviality verdict and edge length do
    not depend on that order."""
    g = word.graph
    elems: List[int] = [word.g0] + [x for _, x in word.steps]
    eids: List[str] = [eid for eid, _ in word.steps]
    verts: List[int] = [word.start]
    for eid in eids:
        verts.append(g.dst(eid))
    while True:
        pinches = []
        for j in range(len(eids) - 1):
            if eids[j + 1] == g.edges[eids[j]].bar:
                rev = g.edges[eids[j + 1]]
                if elems[j + 1] in set(rev.incl.images):
                    pinches.append(j)
        if not pinches:
            break
        j = pinches[0] if rng is None else pinches[rng.randrange(len(pinches))]
        e = g.edges[eids[j]]
        rev = g.edges[eids[j + 1]]
        x = rev.incl.images.index(elems[j + 1])
        val = e.incl(x)  # the same edge-group element read on the near side
        Gv = g.vertex_group(verts[j])
        elems[j] = Gv.mul(Gv.mul(elems[j], val), elems[j + 2])
        del elems[j + 1 : j + 3]
        del eids[j : j + 2]
        del verts[j + 1 : j + 3]
    return GoGWord(word.graph, word.start, elems[0], tuple(zip(eids, elems[1:])))


def is_trivial(word: GoGWord) -> bool:
    """True exactly when the word is the identity of the fundamental group."""
    reduced = britton_reduce(word)
    return reduced.edge_length == 0 and reduced.g0 == 0


def relator_instance(graph: GraphOfGroups, eid: str, x: int) -> GoGWord:
    """The loop (e-bar) iota_e(x) e iota_ebar(x)^-1 at i(e-bar): a defining
    relation instance, hence trivial."""
    e = graph.edges[eid]
    rev = graph.edges[e.bar]
    G_rev = graph.vertex_group(rev.src)
    word = GoGWord(
        graph,
        rev.src,
        0,
        ((e.bar, e.incl(x)), (eid, G_rev.inv(rev.incl(x)))),
    )
    return word


def edge_membership_test(graph: GraphOfGroups, eid: str, h: int) -> bool:
    """Decide h in iota_e(G_e) through word triviality: the element
    e phibar_e(h)^-1 e-bar h is trivial exactly on members."""
    e = graph.edges[eid]
    if e.ext is None:
        raise ValueError(f"edge {eid!r} carries no extension homomorphism")
    rev = graph.edges[e.bar]
    G_far = graph.vertex_group(rev.src)
    word = GoGWord(
        graph,
        e.src,
        0,
        ((eid, G_far.inv(e.ext(h))), (e.bar, h)),
    )
    return is_trivial(word)


# ---------------------------------------------------------------------------
# path homomorphisms and compatible collections


def path_homomorphisms(graph: GraphOfGroups, v: int, w: int) -> Set[Homomorphism]:
    """All composites of edge extensions along paths from v to w, including
    the identity for the empty path when v == w; fixed-point closure."""
    for e in graph.edges.values():
        if e.ext is None:
            raise ValueError(f"edge {e.eid!r} carries no extension homomorphism")
    found: Dict[int, Set[Homomorphism]] = {u: set() for u in range(len(graph.vertices))}
    start = identity_hom(graph.vertex_group(v))
    found[v].add(start)
    frontier = [(v, start)]
    while frontier:
        u, h = frontier.pop()
        for eid in sorted(graph.edges):
            e = graph.edges[eid]
            if e.src != u:
                continue
            target = graph.dst(eid)
            composed = e.ext.compose(h)
            if composed not in found[target]:
                found[target].add(composed)
                frontier.append((target, composed))
    return found[w]


def closed_path_endomorphisms(graph: GraphOfGroups, v: int) -> Set[Homomorphism]:
    return path_homomorphisms(graph, v, v)


@dataclass(frozen=True)
class CompatibleCollection:
    """Normal subgroups N_v whose edge preimages agree across every edge."""

    graph: GraphOfGroups
    subgroups: Tuple[SubgroupHandle, ...]  # indexed by vertex

    def __post_init__(self) -> None:
        g = self.graph
        if len(self.subgroups) != len(g.vertices):
            raise ValueError("need one subgroup per vertex")
        for v, N in enumerate(self.subgroups):
            if N.parent != g.vertex_group(v):
                raise ValueError(f"subgroup at vertex {v} lives in the wrong group")
            if not N.is_normal():
                raise ValueError(f"subgroup at vertex {v} is not normal")
        for e in g.edges.values():
            rev = g.edges[e.bar]
            near = frozenset(e.incl.preimage(self.subgroups[e.src].elements))
            far = frozenset(rev.incl.preimage(self.subgroups[rev.src].elements))
            if near != far:
                raise ValueError(f"collection is incompatible across edge {e.eid!r}")

    def edge_kernel(self, eid: str) -> SubgroupHandle:
        e = self.graph.edges[eid]
        return SubgroupHandle(e.group, e.incl.preimage(self.subgroups[e.src].elements))


def compatible_from_seed(graph: GraphOfGroups, w: int, N: SubgroupHandle) -> CompatibleCollection:
    """N_v = intersection of h^-1(N) over all path homomorphisms h: G_v -> G_w.

    The empty path at w contributes N itself, so N_w is contained in N.
    """
    if N.parent != graph.vertex_group(w):
        raise ValueError("seed subgroup must live in the seed vertex group")
    if not N.is_normal():
        raise ValueError("seed subgroup must be normal")
    subgroups = []
    for v in range(len(graph.vertices)):
        Gv = graph.vertex_group(v)
        elems = set(Gv.elements())
        for h in path_homomorphisms(graph, v, w):
            elems &= set(h.preimage(N.elements))
        subgroups.append(SubgroupHandle(Gv, tuple(sorted(elems))))
    return CompatibleCollection(graph, tuple(subgroups))


@dataclass(frozen=True)
class QuotientData:
    """A quotient graph of groups plus the projections inducing its word map."""

    graph: GraphOfGroups
    vertex_projections: Tuple[Homomorphism, ...]

    def map_word(self, word: GoGWord) -> GoGWord:
        steps = []
        v = word.start
        for eid, x in word.steps:
            v_next = word.graph.dst(eid)
            steps.append((eid, self.vertex_projections[v_next](x)))
            v = v_next
        return GoGWord(self.graph, word.start, self.vertex_projections[word.start](word.g0), tuple(steps))


def quotient_gog(coll: CompatibleCollection) -> QuotientData:
    """The quotient graph of groups along a compatible collection.

    Induced inclusions are re-checked for injectivity; a failure signals an
    incompatible seed and raises.
    """
    g = coll.graph
    vertex_data = [quotient(g.vertex_group(v), coll.subgroups[v]) for v in range(len(g.vertices))]
    new_vertices = [q for q, _ in vertex_data]
    projections = tuple(p for _, p in vertex_data)

    edge_groups: Dict[frozenset, Tuple[FiniteGroup, Homomorphism]] = {}
    new_edges = []
    for eid in sorted(g.edges):
        e = g.edges[eid]
        pair = frozenset((eid, e.bar))
        if pair not in edge_groups:
            edge_groups[pair] = quotient(e.group, coll.edge_kernel(eid))
        Qe, eproj = edge_groups[pair]
        images = [None] * Qe.order
        for x in e.group.elements():
            images[eproj(x)] = projections[e.src](e.incl(x))
        new_incl = Homomorphism(Qe, new_vertices[e.src], tuple(images))
        if not new_incl.is_injective():
            raise ValueError(f"induced inclusion on edge {eid!r} is not injective; seed incompatible")
        new_ext: Optional[Homomorphism] = None
        if e.ext is not None:
            rev = g.edges[e.bar]
            ok = all(
                projections[rev.src](e.ext(x)) == 0
                for x in coll.subgroups[e.src].elements
            )
            if ok:
                ext_images = [None] * new_vertices[e.src].order
                for x in g.vertex_group(e.src).elements():
                    ext_images[projections[e.src](x)] = projections[rev.src](e.ext(x))
                new_ext = Homomorphism(new_vertices[e.src], new_vertices[rev.src], tuple(ext_images))
        new_edges.append(Edge(eid, e.bar, e.src, Qe, new_incl, new_ext))
    return QuotientData(GraphOfGroups(new_vertices, new_edges), projections)


class WitnessSearchExhausted(RuntimeError):
    """Every seed was tried without producing a separating quotient."""


@dataclass(frozen=True)
class RFWitness:
    seed_vertex: int
    seed_subgroup: Tuple[int, ...]
    collection: CompatibleCollection
    quotient: QuotientData
    image_word: GoGWord


def rf_witness(word: GoGWord) -> RFWitness:
    """A compatible collection whose quotient keeps the word nontrivial.

    Seeds are swept deterministically: vertices in index order, normal
    subgroups of the seed vertex group by decreasing index; the first seed
    whose quotient word stays nontrivial (by pinch reduction in the
    quotient) wins.
    """
    if is_trivial(word):
        raise ValueError("word is trivial; no residual-finiteness witness exists")
    g = word.graph
    for v in range(len(g.vertices)):
        for N in sorted(normal_subgroups(g.vertex_group(v)), key=lambda s: (-s.index, s.elements)):
            coll = compatible_from_seed(g, v, N)
            try:
                qdata = quotient_gog(coll)
            except ValueError:
                continue
            image = qdata.map_word(word)
            if not is_trivial(image):
                return RFWitness(v, N.elements, coll, qdata, image)
    raise WitnessSearchExhausted("no seed produced a separating quotient")


# ---------------------------------------------------------------------------
# almost-malnormality and acylindricity constants


def malnormality_constant(graph: GraphOfGroups) -> int:
    """The largest size of iota_e(G_e) meet a conjugate of iota_f(G_f) over
    all vertices, all edge pairs at the vertex, and all conjugators --
    excluding only the diagonal case e == f with the conjugator inside the
    edge image.  Floor 1."""
    best = 1
    for v in range(len(graph.vertices)):
        Gv = graph.vertex_group(v)
        local = [e for e in sorted(graph.edges) if graph.edges[e].src == v]
        images = {e: graph.edge_image(e) for e in local}
        for e in local:
            img_e = images[e]
            for f in local:
                img_f = images[f]
                for c in Gv.elements():
                    if e == f and c in img_e:
                        continue
                    conj = {Gv.conjugate(x, c) for x in img_f}
                    best = max(best, len(img_e & conj))
    return best


def acyl_constants(D: int, eps: int) -> Tuple[int, int]:
    """(D_eps, N_eps) = (2*eps + 1, 2*D*(2*eps + 1))."""
    d_eps = 2 * eps + 1
    return d_eps, 2 * D * d_eps


# ---------------------------------------------------------------------------
# parsing and serialisation


def parse_gog_word(graph: GraphOfGroups, text: str) -> GoGWord:
    """Parse "g<v>:<idx> e<id> ..." into a closed word, inserting maximal
    tree edges (trivial in the fundamental group) wherever typing needs them.
    """
    tokens = text.split()
    items: List[Tuple[str, object]] = []
    for tok in tokens:
        if tok.startswith("g"):
            try:
                v_s, idx_s = tok[1:].split(":")
                items.append(("g", (int(v_s), int(idx_s))))
            except ValueError as exc:
                raise ValueError(f"bad vertex-element token {tok!r}") from exc
        elif tok.startswith("e"):
            eid = tok[1:]
            if eid not in graph.edges:
                raise ValueError(f"unknown edge id {eid!r}")
            items.append(("e", eid))
        else:
            raise ValueError(f"unknown token {tok!r}")

    if items and items[0][0] == "g":
        start = items[0][1][0]
    elif items:
        start = graph.edges[items[0][1]].src
    else:
        start = 0

    # flat alternating assembly with tree-path insertions
    seq: List[Tuple[str, object]] = []  # ("elem", (v, idx)) / ("edge", eid)
    current = start

    def goto(v: int) -> None:
        nonlocal current
        for eid in graph.tree_path(current, v):
            seq.append(("edge", eid))
        current = v

    for kind, value in items:
        if kind == "g":
            v, idx = value
            if not 0 <= idx < graph.vertex_group(v).order:
                raise ValueError(f"element {idx} outside vertex group {v}")
            goto(v)
            seq.append(("elem", (v, idx)))
        else:
            goto(graph.edges[value].src)
            seq.append(("edge", value))
            current = graph.dst(value)
    goto(start)

    g0 = 0
    steps: List[Tuple[str, int]] = []
    at_vertex = start
    for kind, value in seq:
        if kind == "elem":
            v, idx = value
            G = graph.vertex_group(v)
            if not steps:
                g0 = G.mul(g0, idx)
            else:
                eid, x = steps[-1]
                steps[-1] = (eid, G.mul(x, idx))
        else:
            steps.append((value, 0))
            at_vertex = graph.dst(value)
    return GoGWord(graph, start, g0, tuple(steps))


def gog_word_to_text(word: GoGWord) -> str:
    parts = []
    if word.g0 != 0 or not word.steps:
        parts.append(f"g{word.start}:{word.g0}")
    v = word.start
    for eid, x in word.steps:
        parts.append(f"e{eid}")
        v = word.graph.dst(eid)
        if x != 0:
            parts.append(f"g{v}:{x}")
    return " ".join(parts)


def graph_from_json(data: dict, resolve_group: Callable[[object], FiniteGroup]) -> GraphOfGroups:
    """Build a graph of groups from its JSON form.

    `resolve_group` maps each "group" value (inline table object or
    reference) to a FiniteGroup; edge pairs must agree on their group.
    """
    vertices = [resolve_group(v["group"]) for v in data["vertices"]]
    edges = []
    for ed in data["edges"]:
        group = resolve_group(ed["group"])
        src = int(ed["from"])
        incl = Homomorphism(group, vertices[src], tuple(int(x) for x in ed["incl"]))
        ext = None
        if ed.get("ext") is not None:
            bar_entries = [x for x in data["edges"] if x["id"] == ed["bar"]]
            if not bar_entries:
                raise ValueError(f"edge {ed['id']!r} names missing reverse {ed['bar']!r}")
            far = int(bar_entries[0]["from"])
            ext = Homomorphism(vertices[src], vertices[far], tuple(int(x) for x in ed["ext"]))
        edges.append(Edge(str(ed["id"]), str(ed["bar"]), src, group, incl, ext))
    return GraphOfGroups(vertices, edges)
