"""Shipped triangulations with group actions and a holonomy cocycle.

Every fixture carries a connected complex with ``H^1(X;Z) = 0``, named
finite actions by maps isotopic to the identity, an edge cocycle
``alpha`` over Q/Z and a basepoint vertex.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .simplicial import (
    Cochain,
    FiniteGroupAction,
    NotRegular,
    SimplicialAutomorphism,
    SimplicialComplex,
    barycentric_subdivide,
    bockstein,
    cohomology_group,
    is_coboundary,
    is_cocycle,
    quotient_by_free_action,
    realize_rho,
)

SCHEMA = "transgress.fixture/1"


class FixtureError(ValueError):
    pass


@dataclass
class Fixture:
    name: str
    complex: SimplicialComplex
    actions: dict
    alpha: Cochain
    basepoint: int
    rho: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def validate(self, require_nonzero=True):
        X = self.complex
        if not X.is_connected():
            raise FixtureError(f"{self.name}: complex is not connected")
        h1 = cohomology_group(X, 1)
        if not h1.is_trivial():
            raise FixtureError(f"{self.name}: H^1 = {h1}, expected 0")
        if self.alpha.complex is not X or not is_cocycle(self.alpha):
            raise FixtureError(f"{self.name}: alpha is not a cocycle")
        if require_nonzero and is_coboundary(bockstein(self.alpha)) is not None:
            raise FixtureError(f"{self.name}: Bockstein of alpha is zero")
        if self.basepoint not in X.vertices:
            raise FixtureError(f"{self.name}: basepoint is not a vertex")
        for a in self.actions.values():
            a.validate()
        return self

    def subdivide(self, times: int = 1) -> "Fixture":
        fx = self
        for _ in range(times):
            Xs, _, transfer, labels = barycentric_subdivide(fx.complex)
            idx = {s: i for i, s in enumerate(labels)}
            actions = {}
            for name, a in fx.actions.items():
                actions[name] = a.transport(
                    Xs, lambda g, i, a=a: idx[tuple(sorted(a.act(g)(v) for v in labels[i]))])
            alpha = transfer.pullback(fx.alpha)
            fx = Fixture(fx.name + "'", Xs, actions, alpha, idx[(fx.basepoint,)], dict(fx.rho),
                         dict(fx.meta, subdivisions=fx.meta.get("subdivisions", 0) + 1))
        return fx

    def to_json(self) -> dict:
        X = self.complex
        verts = list(X.vertices)
        actions = {}
        for name, a in self.actions.items():
            actions[name] = {
                "generators": [[m(v) for v in verts] for m in a.generator_maps()],
                "relations_implicit": True,
            }
        edges = X.simplices(1)
        cocycle = {json.dumps(list(e)): str(v) for e, v in zip(edges, self.alpha.values) if v}
        return {
            "schema": SCHEMA,
            "name": self.name,
            "vertices": verts,
            "facets": [list(f) for f in X.facets()],
            "actions": actions,
            "rho": {"edge_cocycle": cocycle},
            "basepoint": self.basepoint,
            "meta": self.meta,
        }

    def digest(self) -> str:
        return fixture_digest(self.to_json())


def fixture_digest(data: dict) -> str:
    blob = json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def fixture_from_json(data: dict) -> Fixture:
    if data.get("schema", SCHEMA) != SCHEMA:
        raise FixtureError(f"unsupported schema {data.get('schema')!r}")
    for key in ("vertices", "facets", "basepoint"):
        if key not in data:
            raise FixtureError(f"fixture is missing {key!r}")
    X = SimplicialComplex(data["facets"], name=data.get("name", ""))
    verts = list(data["vertices"])
    if sorted(verts) != list(X.vertices):
        raise FixtureError("vertex list does not match the facets")
    actions = {}
    for name, spec in data.get("actions", {}).items():
        gens = []
        for perm in spec["generators"]:
            if len(perm) != len(verts):
                raise FixtureError(f"action {name}: generator has wrong length")
            gens.append(dict(zip(verts, perm)))
        try:
            actions[name] = FiniteGroupAction.from_generators(X, gens, name=name)
        except ValueError as exc:
            raise FixtureError(f"action {name}: {exc}") from exc
    rho = data.get("rho", {})
    if "edge_cocycle" in rho:
        vals = {}
        for k, v in rho["edge_cocycle"].items():
            e = tuple(json.loads(k))
            if not X.has(tuple(sorted(e))):
                raise FixtureError(f"rho: {list(e)} is not an edge")
            vals[e] = Fraction(v)
        alpha = Cochain.from_dict(X, 1, "Q/Z", vals)
        if not is_cocycle(alpha):
            raise FixtureError("rho: edge cochain is not a cocycle")
    else:
        alpha, _ = realize_rho(X, {k: Fraction(v) for k, v in rho.items()})
    return Fixture(data.get("name", ""), X, actions, alpha, data["basepoint"], meta=data.get("meta", {}))


# ---------------------------------------------------------------- RP^2


RP2_FACETS = [
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
    (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5),
]


def automorphisms(X: SimplicialComplex) -> list[SimplicialAutomorphism]:
    """All vertex permutations preserving the facets (brute force on small X)."""
    facets = {tuple(sorted(f)) for f in X.facets()}
    verts = X.vertices
    out = []
    for perm in itertools.permutations(verts):
        m = dict(zip(verts, perm))
        if all(tuple(sorted(m[v] for v in f)) in facets for f in facets):
            out.append(SimplicialAutomorphism(X, m, check=False))
    return out


def _order(m: SimplicialAutomorphism) -> int:
    k, x = 1, m
    while not x.is_identity():
        x = x.compose(m)
        k += 1
    return k


def rp2_minimal() -> Fixture:
    """The 6-vertex real projective plane (antipodal quotient of the icosahedron)."""
    X = SimplicialComplex(RP2_FACETS, name="rp2_minimal")
    auts = sorted(automorphisms(X), key=lambda m: m.key)
    z5 = next(m for m in auts if _order(m) == 5 and m(0) == 0)
    invols = [m for m in auts if _order(m) == 2]
    v4 = next((a, b) for a, b in itertools.combinations(invols, 2) if a.compose(b) == b.compose(a))
    gens_a5 = [z5, next(m for m in invols if m(0) != 0)]
    actions = {
        "Z5": FiniteGroupAction.from_generators(X, [z5.vmap], name="Z5"),
        "V4": FiniteGroupAction.from_generators(X, [v4[0].vmap, v4[1].vmap], name="V4"),
        "A5": FiniteGroupAction.from_generators(X, [g.vmap for g in gens_a5], name="A5"),
    }
    alpha, _ = realize_rho(X, {"g0": Fraction(1, 2)})
    meta = {"model": "hemi-icosahedron", "identity_component": True,
            "note": "actions are icosahedral rotations descended to RP^2"}
    return Fixture("rp2_minimal", X, actions, alpha, 0, {"g0": "1/2"}, meta)


def icosahedron():
    """Boundary of the icosahedron with its antipodal involution."""
    top, bot = 0, 11
    up = [1 + i for i in range(5)]
    lo = [6 + i for i in range(5)]
    facets = []
    for i in range(5):
        j = (i + 1) % 5
        facets += [(top, up[i], up[j]), (bot, lo[i], lo[j]), (up[i], up[j], lo[i]), (lo[i], lo[j], up[j])]
    X = SimplicialComplex(facets, name="icosahedron")
    anti = {top: bot, bot: top}
    for i in range(5):
        anti[up[i]] = lo[(i + 2) % 5]
        anti[lo[(i + 2) % 5]] = up[i]
    action = FiniteGroupAction.from_generators(X, [anti], name="antipodal")
    return X, action


def is_isomorphic(X: SimplicialComplex, Y: SimplicialComplex) -> bool:
    """Backtracking search for a vertex bijection carrying facets to facets."""
    if X.f_vector() != Y.f_vector():
        return False
    fy = {frozenset(f) for f in Y.facets()}
    fx = [frozenset(f) for f in X.facets()]
    # faces of Y's facets, for pruning partial images
    partial = {frozenset(s) for f in fy for r in range(1, len(f) + 1) for s in itertools.combinations(f, r)}
    deg_x = {v: sum(v in f for f in fx) for v in X.vertices}
    deg_y = {v: sum(v in f for f in fy) for v in Y.vertices}
    order = sorted(X.vertices, key=lambda v: -deg_x[v])
    touching = {v: [f for f in fx if v in f] for v in X.vertices}
    m: dict = {}
    used: set = set()

    def consistent(v) -> bool:
        for f in touching[v]:
            img = frozenset(m[u] for u in f if u in m)
            if len(img) == len(f):
                if img not in fy:
                    return False
            elif img not in partial:
                return False
        return True

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for w in Y.vertices:
            if w in used or deg_y[w] != deg_x[v]:
                continue
            m[v] = w
            used.add(w)
            if consistent(v) and extend(i + 1):
                return True
            del m[v]
            used.discard(w)
        return False

    return extend(0)


# ---------------------------------------------------------------- lens spaces


def max_subdivisions() -> int:
    return int(os.environ.get("TRANSGRESS_MAX_SUBDIVISIONS", "2"))


def _join_of_cycles(n: int) -> SimplicialComplex:
    facets = []
    for i in range(n):
        for j in range(n):
            facets.append((i, (i + 1) % n, n + j, n + (j + 1) % n))
    return SimplicialComplex(facets)


def _cycle_map(n: int, di: int, dj: int) -> Callable[[int], int]:
    def f(v):
        return (v + di) % n if v < n else n + (v - n + dj) % n
    return f


def _subdivide_with(X: SimplicialComplex, maps: dict):
    """Barycentric subdivision carrying plain vertex maps along."""
    Xs, _, _, labels = barycentric_subdivide(X)
    idx = {s: i for i, s in enumerate(labels)}
    new = {}
    for name, f in maps.items():
        table = {i: idx[tuple(sorted(f(v) for v in labels[i]))] for i in range(len(labels))}
        new[name] = table.__getitem__
    return Xs, new


def free_quotient(X: SimplicialComplex, deck: list, extra: dict, limit: int | None = None):
    """Quotient of X by the group generated by ``deck`` maps, subdividing until regular.

    ``extra`` maps must commute with the deck group; they descend to the
    quotient.  Returns ``(Y, descended maps, subdivisions used)``.
    """
    limit = max_subdivisions() if limit is None else limit
    maps = dict(extra)
    maps.update({f"__deck{k}": f for k, f in enumerate(deck)})
    for level in range(limit + 1):
        deck_action = FiniteGroupAction.from_generators(
            X, [{v: maps[f"__deck{k}"](v) for v in X.vertices} for k in range(len(deck))], name="deck")
        try:
            Y, proj = quotient_by_free_action(X, deck_action)
        except NotRegular:
            if level == limit:
                raise
            X, maps = _subdivide_with(X, maps)
            continue
        reps = {}
        for v in X.vertices:
            reps.setdefault(proj(v), v)
        down = {}
        for name, f in maps.items():
            if name.startswith("__deck"):
                continue
            down[name] = {w: proj(f(reps[w])) for w in Y.vertices}
        return Y, down, level
    raise AssertionError("unreachable")


def lens(p: int, q: int = 1, n: int | None = None, actions: Mapping | None = None) -> Fixture:
    """L(p, q) as the free Z/p quotient of the join of two n-cycles.

    ``actions`` maps a name to a list of ``(di, dj)`` rotation generators
    on the join; each must commute with the deck rotation.  By default the
    rotations of the first circle by one and two steps are shipped, named
    ``Z<order>``.
    """
    from math import gcd

    if p < 2 or gcd(p, q) != 1:
        raise ValueError("lens space needs p >= 2 and gcd(p, q) = 1")
    if n is None:
        n = 2 * p
    if n % p:
        raise ValueError("cycle length must be a multiple of p")
    step = n // p
    J = _join_of_cycles(n)
    if actions is None:
        actions = {"rot": [(1, 0)], "rot2": [(2, 0)]}
    extra = {}
    for name, gens in actions.items():
        for k, (di, dj) in enumerate(gens):
            extra[f"{name}#{k}"] = _cycle_map(n, di, dj)
    Y, down, levels = free_quotient(J, [_cycle_map(n, step, q * step)], extra)
    Y.name = f"lens({p},{q})"
    acts = {}
    for name, gens in actions.items():
        gmaps = [down[f"{name}#{k}"] for k in range(len(gens))]
        a = FiniteGroupAction.from_generators(Y, gmaps, name=name)
        label = f"Z{a.group.order}" if name.startswith("rot") else name
        a.name = label
        acts[label] = a
    alpha, gens = realize_rho(Y, {"g0": Fraction(1, p)})
    if len(gens) != 1 or gens[0][1] != p:
        raise FixtureError(f"unexpected H_1 generators {gens}")
    meta = {"model": f"join C{n}*C{n} / Z{p}", "subdivisions": levels, "identity_component": True}
    return Fixture(f"lens({p},{q})", Y, acts, alpha, 0, {"g0": f"1/{p}"}, meta)


def rp3_join() -> Fixture:
    """RP^3 = L(2,1) from C4*C4 with cyclic rotations and a Klein four-group.

    The four-group is generated by ``diag(i, i)`` and ``diag(i, -i)`` on
    C^2; both are diagonal, so their lifts to S^3 commute.
    """
    fx = lens(2, 1, n=4, actions={"rot": [(1, 0)], "rot2": [(2, 0)], "V4": [(1, 1), (1, -1)]})
    fx.name = "rp3_join"
    fx.meta["note"] = "V4 from diagonal rotations; lifts to S^3 form an abelian group"
    return fx


def _hurwitz_units() -> list[tuple]:
    """The 24 unit Hurwitz quaternions, coordinates doubled to stay integral."""
    out = []
    for i in range(4):
        for s in (2, -2):
            v = [0, 0, 0, 0]
            v[i] = s
            out.append(tuple(v))
    for signs in itertools.product((1, -1), repeat=4):
        out.append(signs)
    return sorted(out)


def _left_mul(q: tuple) -> Callable[[tuple], tuple]:
    """``v -> q v`` in doubled coordinates (q a doubled unit quaternion)."""
    a, b, c, d = q

    def f(v):
        w, x, y, z = v
        prod = (a * w - b * x - c * y - d * z, a * x + b * w + c * z - d * y,
                a * y - b * z + c * w + d * x, a * z + b * y - c * x + d * w)
        return tuple(t // 2 for t in prod)

    return f


def _cell_poset_24():
    """Faces of the 24-cell as vertex sets: 24 + 96 + 96 + 24."""
    verts = _hurwitz_units()
    dot = lambda u, v: sum(a * b for a, b in zip(u, v))
    centers = set()
    for i, j in itertools.combinations(range(4), 2):
        for si in (1, -1):
            for sj in (1, -1):
                c = [0, 0, 0, 0]
                c[i], c[j] = si, sj
                centers.add(tuple(c))
    cells3 = [frozenset(v for v in verts if dot(v, c) == 2) for c in sorted(centers)]
    cells2, cells1 = set(), set()
    for oc in cells3:
        for tri in itertools.combinations(sorted(oc), 3):
            if all(dot(u, v) == 2 for u, v in itertools.combinations(tri, 2)):
                cells2.add(frozenset(tri))
                cells1.update(frozenset(e) for e in itertools.combinations(tri, 2))
    cells0 = [frozenset([v]) for v in verts]
    return [cells0, sorted(cells1, key=sorted), sorted(cells2, key=sorted), cells3]


def rp3_24cell() -> Fixture:
    """RP^3 from the barycentric subdivision of the 24-cell modulo -1.

    The vertices of the 24-cell are the Hurwitz units, so left
    multiplication by i and j permutes its faces; on the quotient
    SO(3) = S^3/{±1} this is the Klein four-group of left translations,
    whose lifts to S^3 form the quaternion group.
    """
    levels = _cell_poset_24()
    cells = [c for lev in levels for c in lev]
    index = {c: k for k, c in enumerate(cells)}
    facets = []
    for oc in levels[3]:
        for tri in levels[2]:
            if not tri <= oc:
                continue
            for e in itertools.combinations(sorted(tri), 2):
                e = frozenset(e)
                for v in e:
                    facets.append((index[frozenset([v])], index[e], index[tri], index[oc]))
    S3 = SimplicialComplex(facets, name="sd(24-cell)")

    def cell_map(q):
        f = _left_mul(q)
        table = [index[frozenset(f(v) for v in c)] for c in cells]
        return table.__getitem__

    deck = cell_map((-2, 0, 0, 0))
    extra = {"V4#0": cell_map((0, 2, 0, 0)), "V4#1": cell_map((0, 0, 2, 0))}
    Y, down, levels_used = free_quotient(S3, [deck], extra)
    Y.name = "rp3_24cell"
    a = FiniteGroupAction.from_generators(Y, [down["V4#0"], down["V4#1"]], name="V4")
    alpha, gens = realize_rho(Y, {"g0": Fraction(1, 2)})
    if len(gens) != 1 or gens[0][1] != 2:
        raise FixtureError(f"unexpected H_1 generators {gens}")
    meta = {"model": "sd(24-cell) / {±1}", "subdivisions": levels_used, "identity_component": True,
            "note": "V4 acts by left translation by {1, i, j, k} on SO(3)"}
    return Fixture("rp3_24cell", Y, {"V4": a}, alpha, 0, {"g0": "1/2"}, meta)


BUILTIN: dict[str, Callable[[], Fixture]] = {
    "rp2_minimal": rp2_minimal,
    "rp3_join": rp3_join,
    "rp3_24cell": rp3_24cell,
    "lens(2,1)": lambda: lens(2, 1),
    "lens(3,1)": lambda: lens(3, 1),
    "lens(5,1)": lambda: lens(5, 1),
}


def builtin(name: str) -> Fixture:
    if name.startswith("lens(") and name not in BUILTIN:
        p, q = (int(x) for x in name[5:-1].split(","))
        return lens(p, q)
    try:
        return BUILTIN[name]()
    except KeyError:
        raise FixtureError(f"unknown fixture {name!r}") from None
