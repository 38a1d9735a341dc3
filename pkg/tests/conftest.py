"""Shared builders: standard groups, graph-of-groups generators, random words."""

from __future__ import annotations

import random
from typing import List, Optional, Tuple

from eqnoeth import fingrp, gog
from eqnoeth.words import Word


def s3_with_parity():
    """S_3 plus an independent parity map read off the permutation labels."""
    S3 = fingrp.symmetric(3)
    parity = []
    for name in S3.names:
        perm = [int(c) for c in name]
        inv = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
        parity.append(inv % 2)
    return S3, parity


def hnn_c4() -> gog.GraphOfGroups:
    """Single vertex C4, loop with edge group <a^2>, both inclusions equal,
    identity extensions."""
    C4 = fingrp.cyclic(4)
    C2 = fingrp.cyclic(2)
    incl = fingrp.Homomorphism(C2, C4, (0, 2))
    ext = fingrp.identity_hom(C4)
    return gog.GraphOfGroups(
        [C4],
        [gog.Edge("0", "1", 0, C2, incl, ext), gog.Edge("1", "0", 0, C2, incl, ext)],
    )


def s3_loop() -> gog.GraphOfGroups:
    """Single vertex S_3, loop with edge group generated by one transposition."""
    S3 = fingrp.symmetric(3)
    C2 = fingrp.cyclic(2)
    t = next(a for a in S3.elements() if S3.element_order(a) == 2)
    incl = fingrp.Homomorphism(C2, S3, (0, t))
    ext = fingrp.identity_hom(S3)
    return gog.GraphOfGroups(
        [S3],
        [gog.Edge("0", "1", 0, C2, incl, ext), gog.Edge("1", "0", 0, C2, incl, ext)],
    )


def _inner_automorphism(G: fingrp.FiniteGroup, g: int) -> fingrp.Homomorphism:
    return fingrp.Homomorphism(G, G, tuple(G.conjugate(x, g) for x in G.elements()))


def _cyclic_power_map(G: fingrp.FiniteGroup, k: int) -> fingrp.Homomorphism:
    return fingrp.Homomorphism(G, G, tuple((x * k) % G.order for x in G.elements()))


_VERTEX_POOL = [
    lambda: fingrp.cyclic(4),
    lambda: fingrp.cyclic(6),
    lambda: fingrp.cyclic(8),
    lambda: fingrp.cyclic(12),
    lambda: fingrp.klein_four(),
    lambda: fingrp.symmetric(3),
    lambda: fingrp.dihedral(4),
    lambda: fingrp.alternating(4),
]


def _trivial_edge(rng, eid, bar, u, v, Gu, Gv) -> Tuple[gog.Edge, gog.Edge]:
    T = fingrp.trivial()
    incl_u = fingrp.Homomorphism(T, Gu, (0,))
    incl_v = fingrp.Homomorphism(T, Gv, (0,))
    ext_uv = fingrp.Homomorphism(Gu, Gv, (0,) * Gu.order)
    ext_vu = fingrp.Homomorphism(Gv, Gu, (0,) * Gv.order)
    return (
        gog.Edge(eid, bar, u, T, incl_u, ext_uv),
        gog.Edge(bar, eid, v, T, incl_v, ext_vu),
    )


def _full_edge(rng, eid, bar, u, v, G) -> Tuple[gog.Edge, gog.Edge]:
    # same group at both ends; edge isomorphism is an inner automorphism
    g = rng.randrange(G.order)
    alpha = _inner_automorphism(G, g)
    alpha_inv = _inner_automorphism(G, G.inv(g))
    ident = fingrp.identity_hom(G)
    return (
        gog.Edge(eid, bar, u, G, ident, alpha),
        gog.Edge(bar, eid, v, G, alpha, alpha_inv),
    )


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _cyclic_subgroup_edge(rng, eid, bar, u, v, G) -> Optional[Tuple[gog.Edge, gog.Edge]]:
    n = G.order
    divisors = [d for d in range(2, n) if n % d == 0]
    if not divisors:
        return None
    d = rng.choice(divisors)
    units = [k for k in range(1, d + 1) if _gcd(k, d) == 1]
    k = rng.choice(units)
    k_inv = next(x for x in units if (x * k) % d == 1)
    Ce = fingrp.cyclic(d)
    step = n // d
    incl_e = fingrp.Homomorphism(Ce, G, tuple((x * step) % n for x in range(d)))
    incl_ebar = fingrp.Homomorphism(Ce, G, tuple((x * k * step) % n for x in range(d)))
    ext_e = _cyclic_power_map(G, k)
    ext_ebar = _cyclic_power_map(G, k_inv)
    return (
        gog.Edge(eid, bar, u, Ce, incl_e, ext_e),
        gog.Edge(bar, eid, v, Ce, incl_ebar, ext_ebar),
    )


def _s3_transposition_edge(rng, eid, bar, u, v, G) -> Tuple[gog.Edge, gog.Edge]:
    C2 = fingrp.cyclic(2)
    t = rng.choice([a for a in G.elements() if G.element_order(a) == 2])
    incl = fingrp.Homomorphism(C2, G, (0, t))
    ident = fingrp.identity_hom(G)
    return (
        gog.Edge(eid, bar, u, C2, incl, ident),
        gog.Edge(bar, eid, v, C2, incl, ident),
    )


def random_graph(rng: random.Random, max_vertices: int = 4, proper_images_only: bool = False) -> gog.GraphOfGroups:
    """A random connected graph of groups with every extension present.

    With proper_images_only=True every edge image is a proper subgroup of
    its vertex group, so pinch-free words can always be built.
    """
    nv = rng.randint(1, max_vertices)
    vertices: List[fingrp.FiniteGroup] = [rng.choice(_VERTEX_POOL)() for _ in range(nv)]
    edges: List[gog.Edge] = []
    next_id = 0

    def add_edge(u: int, v: int) -> None:
        nonlocal next_id
        eid, bar = str(next_id), str(next_id + 1)
        next_id += 2
        Gu, Gv = vertices[u], vertices[v]
        choices = ["trivial"]
        if u != v or True:
            pass
        if Gu is Gv or Gu == Gv:
            if not proper_images_only:
                choices.append("full")
            if Gu.is_abelian and any(Gu.order % d == 0 for d in range(2, Gu.order)):
                choices.append("cyclic_sub")
            if Gu.order == 6 and not Gu.is_abelian:
                choices.append("transposition")
        kind = rng.choice(choices)
        if kind == "full":
            pair = _full_edge(rng, eid, bar, u, v, Gu)
        elif kind == "cyclic_sub":
            pair = _cyclic_subgroup_edge(rng, eid, bar, u, v, Gu) or _trivial_edge(rng, eid, bar, u, v, Gu, Gv)
        elif kind == "transposition":
            pair = _s3_transposition_edge(rng, eid, bar, u, v, Gu)
        else:
            pair = _trivial_edge(rng, eid, bar, u, v, Gu, Gv)
        edges.extend(pair)

    for v in range(1, nv):
        add_edge(rng.randrange(v), v)
    for _ in range(rng.randint(1, 2)):
        u = rng.randrange(nv)
        v = rng.randrange(nv)
        if u == v:
            # loops need matching endpoint groups, which holds trivially
            add_edge(u, u)
        else:
            add_edge(u, v)
    return gog.GraphOfGroups(vertices, edges)


def random_closed_path(rng: random.Random, graph: gog.GraphOfGroups, length: int, avoid_full_backtrack: bool = False) -> List[str]:
    """A closed edge path from vertex of the first chosen edge, via a random
    walk closed up along the maximal tree."""
    start = rng.randrange(len(graph.vertices))
    path: List[str] = []
    current = start
    for _ in range(length):
        options = [eid for eid in sorted(graph.edges) if graph.edges[eid].src == current]
        if avoid_full_backtrack and path:
            prev = path[-1]
            filtered = []
            for eid in options:
                if eid == graph.edges[prev].bar:
                    img = graph.edge_image(eid)
                    if len(img) == graph.vertex_group(graph.edges[eid].src).order:
                        continue
                filtered.append(eid)
            options = filtered or options
        if not options:
            break
        eid = rng.choice(options)
        path.append(eid)
        current = graph.dst(eid)
    path.extend(graph.tree_path(current, start))
    return path


def random_relator_product(rng: random.Random, graph: gog.GraphOfGroups, count: int) -> gog.GoGWord:
    """A product of tree-transported relator instances: trivial by construction."""
    base = 0
    word = gog.GoGWord(graph, base, 0, ())
    for _ in range(count):
        eid = rng.choice(sorted(graph.edges))
        e = graph.edges[eid]
        x = rng.randrange(e.group.order)
        rel = gog.relator_instance(graph, eid, x)
        transport = graph.tree_path(base, rel.start)
        steps = tuple((t, 0) for t in transport)
        back = tuple((t, 0) for t in graph.tree_path(rel.start, base))
        carried = gog.GoGWord(graph, base, 0, steps + ((rel.steps and rel.steps) or ()) + back)
        # splice the relator's g0 into the junction
        if rel.g0 != 0:
            if steps:
                last_eid, last_x = steps[-1]
                G_mid = graph.vertex_group(graph.dst(last_eid))
                steps = steps[:-1] + ((last_eid, G_mid.mul(last_x, rel.g0)),)
                carried = gog.GoGWord(graph, base, 0, steps + rel.steps + back)
            else:
                carried = gog.GoGWord(graph, base, rel.g0, rel.steps + back)
        word = word * carried
    return word


def random_pinchfree_word(rng: random.Random, graph: gog.GraphOfGroups, length: int) -> Optional[gog.GoGWord]:
    """A nonempty closed word with no pinch; needs proper edge images at
    backtracking positions.  Returns None when the roll fails."""
    for _ in range(40):
        path = random_closed_path(rng, graph, length, avoid_full_backtrack=True)
        if not path:
            continue
        start = graph.edges[path[0]].src
        elems = []
        ok = True
        for j, eid in enumerate(path):
            v = graph.dst(eid)
            Gv = graph.vertex_group(v)
            if j + 1 < len(path) and path[j + 1] == graph.edges[eid].bar:
                image = graph.edge_image(path[j + 1])
                outside = [x for x in Gv.elements() if x not in image]
                if not outside:
                    ok = False
                    break
                elems.append(rng.choice(outside))
            else:
                elems.append(rng.randrange(Gv.order))
        if not ok:
            continue
        word = gog.GoGWord(graph, start, rng.randrange(graph.vertex_group(start).order), tuple(zip(path, elems)))
        return word
    return None


def random_reduced_word(rng: random.Random, n_vars: int, length: int) -> Word:
    letters = []
    last = 0
    for _ in range(length):
        v = rng.randint(1, n_vars)
        while v == last and n_vars > 1:
            v = rng.randint(1, n_vars)
        e = rng.choice([-2, -1, 1, 2])
        letters.append((v, e))
        last = v
    from eqnoeth.words import reduce as _reduce

    return _reduce(Word(n_vars, tuple(letters)))


def random_positive_word(rng: random.Random, n_vars: int, length: int) -> Word:
    letters = []
    remaining = length
    while remaining > 0:
        v = rng.randint(1, n_vars)
        e = rng.randint(1, min(2, remaining))
        letters.append((v, e))
        remaining -= e
    from eqnoeth.words import reduce as _reduce

    return _reduce(Word(n_vars, tuple(letters)))
