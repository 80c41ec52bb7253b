"""Finite ordered simplicial complexes, their cochains, and group actions."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

from .exactcoeff import IntMatrix, frac_mod1, snf, solve_integer, solve_mod1
from .groupcoh import CohomologyGroup, CoefficientModule, FiniteGroup, NotACocycle, _solve_rational

RINGS = ("Z", "Q", "Q/Z")


class NotFree(ValueError):
    pass


class NotRegular(ValueError):
    pass


class NotSimplicial(ValueError):
    pass


def _sort_sign(vs: Sequence) -> tuple[tuple, int]:
    """Sort ``vs`` and return the permutation sign (0 if there is a repeat)."""
    vs = list(vs)
    sign = 1
    for i in range(1, len(vs)):
        j = i
        while j > 0 and vs[j - 1] > vs[j]:
            vs[j - 1], vs[j] = vs[j], vs[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(vs, vs[1:]):
        if a == b:
            return tuple(vs), 0
    return tuple(vs), sign


class SimplicialComplex:
    """A face-closed set of simplices on totally ordered vertices.

    Simplices are stored as sorted vertex tuples; ``simplices(q)`` fixes
    the basis order used by every cochain of degree q.
    """

    def __init__(self, facets: Iterable[Iterable[Hashable]], name: str = ""):
        faces: set[tuple] = set()
        for f in facets:
            f = tuple(sorted(set(f)))
            if not f:
                continue
            for k in range(1, len(f) + 1):
                faces.update(itertools.combinations(f, k))
        self.name = name
        self.dim = max((len(s) for s in faces), default=0) - 1
        self._simplices = [sorted(s for s in faces if len(s) == q + 1) for q in range(self.dim + 1)]
        self._index = [{s: i for i, s in enumerate(ss)} for ss in self._simplices]
        self.vertices = tuple(s[0] for s in self._simplices[0]) if self._simplices else ()

    def simplices(self, q: int) -> list[tuple]:
        if 0 <= q <= self.dim:
            return self._simplices[q]
        return []

    def count(self, q: int) -> int:
        return len(self.simplices(q))

    def f_vector(self) -> tuple:
        return tuple(self.count(q) for q in range(self.dim + 1))

    def index(self, simplex: Sequence) -> int:
        return self._index[len(simplex) - 1][tuple(simplex)]

    def has(self, simplex: Sequence) -> bool:
        q = len(simplex) - 1
        return 0 <= q <= self.dim and tuple(simplex) in self._index[q]

    def facets(self) -> list[tuple]:
        out = list(self.simplices(self.dim))
        for q in range(self.dim - 1, -1, -1):
            covered = {s[:i] + s[i + 1:] for s in self._simplices[q + 1] for i in range(q + 2)}
            out += [s for s in self._simplices[q] if s not in covered]
        return sorted(out)

    def components(self) -> list[list]:
        adj = {v: [] for v in self.vertices}
        for u, v in self.simplices(1):
            adj[u].append(v)
            adj[v].append(u)
        seen, comps = set(), []
        for v in self.vertices:
            if v in seen:
                continue
            comp, dq = [], deque([v])
            seen.add(v)
            while dq:
                x = dq.popleft()
                comp.append(x)
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        dq.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    @cached_property
    def _cache(self) -> dict:
        return {}

    def coboundary_matrix(self, q: int) -> IntMatrix:
        """``d: C^q -> C^{q+1}``; rows are (q+1)-simplices."""
        key = ("d", q)
        if key not in self._cache:
            rows = []
            if q < -1:
                raise ValueError
            if q == -1:
                mat = IntMatrix(self.count(0), 0, [{} for _ in range(self.count(0))])
            else:
                idx = self._index[q] if q <= self.dim else {}
                for s in self.simplices(q + 1):
                    row = {}
                    for i in range(len(s)):
                        row[idx[s[:i] + s[i + 1:]]] = -1 if i % 2 else 1
                    rows.append(row)
                mat = IntMatrix(self.count(q + 1), self.count(q), rows)
            self._cache[key] = mat
        return self._cache[key]

    def coboundary_snf(self, q: int):
        key = ("snf", q)
        if key not in self._cache:
            self._cache[key] = snf(self.coboundary_matrix(q))
        return self._cache[key]

    def __repr__(self):
        return f"SimplicialComplex({self.name or 'unnamed'}, f={self.f_vector()})"


# ---------------------------------------------------------------- cochains


def _normalize(ring: str, v):
    if ring == "Z":
        if isinstance(v, Fraction):
            if v.denominator != 1:
                raise ValueError(f"{v} is not an integer")
            return v.numerator
        return int(v)
    if ring == "Q":
        return Fraction(v)
    if ring == "Q/Z":
        return frac_mod1(getattr(v, "value", v))
    raise ValueError(f"unknown ring {ring!r}")


@dataclass(frozen=True, eq=False)
class Cochain:
    """Values on the sorted q-simplices of ``complex``; alternating by convention."""

    complex: SimplicialComplex
    degree: int
    ring: str
    values: tuple

    def __post_init__(self):
        if self.ring not in RINGS:
            raise ValueError(f"unknown ring {self.ring!r}")
        n = self.complex.count(self.degree)
        if len(self.values) != n:
            raise ValueError(f"degree-{self.degree} cochain needs {n} values, got {len(self.values)}")
        object.__setattr__(self, "values", tuple(_normalize(self.ring, v) for v in self.values))

    @classmethod
    def zero(cls, X, q, ring="Z") -> "Cochain":
        return cls(X, q, ring, (0,) * X.count(q))

    @classmethod
    def from_dict(cls, X, q, ring, data: Mapping) -> "Cochain":
        """Build from ``{vertex tuple: value}`` in any vertex order (sign applied)."""
        vals = [0] * X.count(q)
        for s, v in data.items():
            key, sign = _sort_sign(s)
            if sign == 0:
                raise ValueError(f"degenerate simplex {s}")
            vals[X.index(key)] = sign * _normalize(ring if ring != "Q/Z" else "Q", v)
        return cls(X, q, ring, tuple(vals))

    def __call__(self, *vertices):
        key, sign = _sort_sign(vertices)
        if sign == 0:
            return _normalize(self.ring, 0)
        return _normalize(self.ring, sign * self.values[self.complex.index(key)])

    def _compatible(self, other):
        if self.complex is not other.complex or self.degree != other.degree or self.ring != other.ring:
            raise ValueError("incompatible cochains")

    def __add__(self, other):
        self._compatible(other)
        return Cochain(self.complex, self.degree, self.ring, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other):
        self._compatible(other)
        return Cochain(self.complex, self.degree, self.ring, tuple(a - b for a, b in zip(self.values, other.values)))

    def __neg__(self):
        return Cochain(self.complex, self.degree, self.ring, tuple(-a for a in self.values))

    def __mul__(self, n: int):
        return Cochain(self.complex, self.degree, self.ring, tuple(n * a for a in self.values))

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            isinstance(other, Cochain)
            and self.complex is other.complex
            and self.degree == other.degree
            and self.ring == other.ring
            and self.values == other.values
        )

    def __hash__(self):
        return hash((id(self.complex), self.degree, self.ring, self.values))

    def is_zero(self) -> bool:
        return not any(self.values)

    def as_ring(self, ring: str) -> "Cochain":
        return Cochain(self.complex, self.degree, ring, self.values)

    def lift(self) -> "Cochain":
        """The Q-valued cochain of canonical [0,1) representatives."""
        if self.ring != "Q/Z":
            raise ValueError("lift applies to Q/Z cochains")
        return Cochain(self.complex, self.degree, "Q", self.values)

    def to_json(self):
        return [str(v) for v in self.values] if self.ring != "Z" else list(self.values)

    def __repr__(self):
        return f"Cochain(deg={self.degree}, ring={self.ring}, {self.values})"


def coboundary(c: Cochain) -> Cochain:
    X = c.complex
    return Cochain(X, c.degree + 1, c.ring, tuple(X.coboundary_matrix(c.degree).apply(c.values)))


def is_cocycle(c: Cochain) -> bool:
    return coboundary(c).is_zero()


def is_coboundary(z: Cochain) -> Cochain | None:
    """A primitive ``b`` with ``coboundary(b) == z`` in z's ring, or None."""
    if not is_cocycle(z):
        raise NotACocycle(f"degree-{z.degree} cochain is not closed")
    X, q = z.complex, z.degree
    if q == 0:
        return None
    dec = X.coboundary_snf(q - 1)
    if z.ring == "Z":
        x = solve_integer(dec, list(z.values))
    elif z.ring == "Q/Z":
        x = solve_mod1(dec, list(z.values))
    else:
        x = _solve_rational(dec, list(z.values))
    if x is None:
        return None
    b = Cochain(X, q - 1, z.ring, tuple(x))
    assert coboundary(b) == z
    return b


def bockstein(alpha: Cochain) -> Cochain:
    """Connecting map for 0 -> Z -> Q -> Q/Z -> 0: ``d`` of the [0,1) lift."""
    if alpha.ring != "Q/Z":
        raise ValueError("bockstein takes a Q/Z cochain")
    if not is_cocycle(alpha):
        raise NotACocycle("bockstein of a non-cocycle")
    return coboundary(alpha.lift()).as_ring("Z")


def cohomology_group(X: SimplicialComplex, q: int, ring: str = "Z") -> CohomologyGroup:
    if ring not in ("Z", "Q"):
        raise ValueError("cohomology_group supports Z and Q")
    rank_q = X.coboundary_snf(q).rank if q <= X.dim else 0
    prev = X.coboundary_snf(q - 1) if q >= 1 else None
    betti = X.count(q) - rank_q - (prev.rank if prev else 0)
    tors = tuple(d for d in prev.diagonal if d > 1) if (prev and ring == "Z") else ()
    return CohomologyGroup(betti, tors, "ℚ" if ring == "Q" else "ℤ")


# ---------------------------------------------------------------- maps and actions


class SimplicialMap:
    """A vertex map sending simplices to simplices (possibly degenerately)."""

    def __init__(self, source: SimplicialComplex, target: SimplicialComplex, vmap: Mapping, check=True):
        self.source = source
        self.target = target
        self.vmap = dict(vmap)
        if check:
            for q in range(source.dim + 1):
                for s in source.simplices(q):
                    img = tuple(sorted(set(self.vmap[v] for v in s)))
                    if not target.has(img):
                        raise NotSimplicial(f"{s} maps to non-simplex {img}")

    def __call__(self, v):
        return self.vmap[v]

    @cached_property
    def _tables(self) -> dict:
        return {}

    def simplex_table(self, q: int) -> list[tuple[int, int]]:
        """For each source q-simplex: ``(target index, sign)``; sign 0 when collapsed."""
        if q not in self._tables:
            out = []
            for s in self.source.simplices(q):
                key, sign = _sort_sign([self.vmap[v] for v in s])
                out.append((self.target.index(key) if sign else -1, sign))
            self._tables[q] = out
        return self._tables[q]

    def pullback(self, c: Cochain) -> Cochain:
        if c.complex is not self.target:
            raise ValueError("cochain lives on a different complex")
        vals = c.values
        zero = _normalize(c.ring, 0)
        new = tuple(sign * vals[j] if sign else zero for j, sign in self.simplex_table(c.degree))
        return Cochain(self.source, c.degree, c.ring, new)


class SimplicialAutomorphism(SimplicialMap):
    def __init__(self, complex: SimplicialComplex, vmap: Mapping, check=True):
        if check and sorted(vmap.values()) != sorted(complex.vertices):
            raise NotSimplicial("vertex map is not a permutation")
        super().__init__(complex, complex, vmap, check=check)
        self.complex = complex

    @cached_property
    def key(self) -> tuple:
        return tuple(self.vmap[v] for v in self.complex.vertices)

    def compose(self, other: "SimplicialAutomorphism") -> "SimplicialAutomorphism":
        """``self o other``: apply ``other`` first."""
        return SimplicialAutomorphism(self.complex, {v: self.vmap[other.vmap[v]] for v in self.complex.vertices}, check=False)

    def inverse(self) -> "SimplicialAutomorphism":
        return SimplicialAutomorphism(self.complex, {w: v for v, w in self.vmap.items()}, check=False)

    def is_identity(self) -> bool:
        return all(v == w for v, w in self.vmap.items())

    def __eq__(self, other):
        return isinstance(other, SimplicialAutomorphism) and self.complex is other.complex and self.key == other.key

    def __hash__(self):
        return hash(self.key)


def pullback(g: SimplicialMap, c: Cochain) -> Cochain:
    return g.pullback(c)


class FiniteGroupAction:
    """A finite group acting on a complex: ``element g -> automorphism``.

    Products in ``group.table`` satisfy ``act(g*h) == act(g) o act(h)``.
    """

    def __init__(self, complex: SimplicialComplex, group: FiniteGroup, maps: Sequence[SimplicialAutomorphism],
                 name: str = "", generators: Sequence[int] = (), meta: dict | None = None, check=True):
        self.complex = complex
        self.group = group
        self.maps = list(maps)
        self.name = name
        self.generators = list(generators)
        self.meta = dict(meta or {})
        if check:
            self.validate()

    def validate(self):
        G = self.group
        if not self.maps[G.identity].is_identity():
            raise ValueError("identity does not act trivially")
        for g in range(G.order):
            for h in range(G.order):
                if self.maps[G.table[g][h]] != self.maps[g].compose(self.maps[h]):
                    raise ValueError(f"action is not a homomorphism at {(g, h)}")

    @classmethod
    def from_generators(cls, complex: SimplicialComplex, generators: Sequence[Mapping], name: str = "",
                        meta=None, max_order: int = 10000) -> "FiniteGroupAction":
        gens = [SimplicialAutomorphism(complex, g) for g in generators]
        ident = SimplicialAutomorphism(complex, {v: v for v in complex.vertices}, check=False)
        elems = [ident]
        index = {ident.key: 0}
        dq = deque([0])
        while dq:
            i = dq.popleft()
            for g in gens:
                h = elems[i].compose(g)
                if h.key not in index:
                    index[h.key] = len(elems)
                    elems.append(h)
                    dq.append(index[h.key])
                    if len(elems) > max_order:
                        raise ValueError("generated group too large")
        table = [[index[a.compose(b).key] for b in elems] for a in elems]
        group = FiniteGroup(table, 0, check=False)
        gen_idx = [index[g.key] for g in gens]
        return cls(complex, group, elems, name=name, generators=gen_idx, meta=meta, check=False)

    def act(self, g: int) -> SimplicialAutomorphism:
        return self.maps[g]

    def is_free(self) -> bool:
        for g, m in enumerate(self.maps):
            if g == self.group.identity:
                continue
            for q in range(self.complex.dim + 1):
                for s in self.complex.simplices(q):
                    if tuple(sorted(m(v) for v in s)) == s:
                        return False
        return True

    def generator_maps(self) -> list[SimplicialAutomorphism]:
        return [self.maps[i] for i in self.generators]

    def transport(self, complex: SimplicialComplex, vertex_image) -> "FiniteGroupAction":
        """The same abstract group acting on ``complex`` via ``vertex_image(g, v)``."""
        maps = [SimplicialAutomorphism(complex, {v: vertex_image(g, v) for v in complex.vertices})
                for g in range(self.group.order)]
        return FiniteGroupAction(complex, self.group, maps, name=self.name, generators=self.generators,
                                 meta=self.meta, check=True)


class CochainModule(CoefficientModule):
    """Cochains of fixed degree with the right action ``c.g = g^* c``."""

    trivial_action = False

    def __init__(self, action: FiniteGroupAction, degree: int, ring: str = "Z"):
        self.action = action
        self.degree = degree
        self.ring = ring
        self.name = f"C^{degree}({ring})"

    def __eq__(self, other):
        return isinstance(other, CochainModule) and (self.action, self.degree, self.ring) == (
            other.action, other.degree, other.ring)

    def __hash__(self):
        return hash((id(self.action), self.degree, self.ring))

    def zero(self):
        return Cochain.zero(self.action.complex, self.degree, self.ring)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def act(self, a, g):
        return self.action.act(g).pullback(a)

    def normalize(self, a):
        return a

    def encode(self, a):
        return a.to_json()


# ---------------------------------------------------------------- constructions


def relabel(X: SimplicialComplex, order: Sequence | None = None, name: str = ""):
    """Copy of X on vertices ``0..n-1`` (in ``order``, default sorted); returns (Y, old->new)."""
    order = list(order) if order is not None else list(X.vertices)
    new = {v: i for i, v in enumerate(order)}
    Y = SimplicialComplex(([new[v] for v in f] for f in X.facets()), name=name or X.name)
    return Y, new


def barycentric_subdivide(X: SimplicialComplex, action: FiniteGroupAction | None = None):
    """Barycentric subdivision on vertices ``0..N-1``.

    Returns ``(X', action', transfer, labels)`` where ``labels[i]`` is the
    simplex of X that vertex i subdivides and ``transfer`` is the
    last-vertex map ``X' -> X``.
    """
    labels = [s for q in range(X.dim + 1) for s in X.simplices(q)]
    idx = {s: i for i, s in enumerate(labels)}
    facets = []
    for f in X.facets():
        for perm in itertools.permutations(f):
            chain = [idx[tuple(sorted(perm[: k + 1]))] for k in range(len(perm))]
            facets.append(chain)
    Xs = SimplicialComplex(facets, name=(X.name + "'") if X.name else "")
    transfer = SimplicialMap(Xs, X, {i: s[-1] for i, s in enumerate(labels)})
    act2 = None
    if action is not None:
        act2 = action.transport(Xs, lambda g, i: idx[tuple(sorted(action.act(g)(v) for v in labels[i]))])
    return Xs, act2, transfer, labels


def quotient_by_free_action(X: SimplicialComplex, action: FiniteGroupAction):
    """``X/Γ`` on vertices ``0..k-1`` plus the projection map.

    Raises NotFree when a simplex is stabilized and NotRegular when the
    orbit space is not a simplicial complex of the same combinatorics.
    """
    if not action.is_free():
        raise NotFree("some simplex is fixed setwise by a nontrivial element")
    orbit_of = {}
    reps = []
    for v in X.vertices:
        if v in orbit_of:
            continue
        k = len(reps)
        reps.append(v)
        for m in action.maps:
            orbit_of[m(v)] = k
    for q in range(X.dim + 1):
        images = set()
        orbits = set()
        for s in X.simplices(q):
            img = tuple(sorted(orbit_of[v] for v in s))
            if len(set(img)) != len(img):
                raise NotRegular(f"simplex {s} has two vertices in one orbit")
            images.add(img)
            orbits.add(min(tuple(sorted(m(v) for v in s)) for m in action.maps))
        if len(images) != len(orbits):
            raise NotRegular(f"distinct {q}-simplex orbits share vertex orbits")
    Y = SimplicialComplex(([orbit_of[v] for v in f] for f in X.facets()), name=(X.name + "/G") if X.name else "")
    if Y.f_vector() != tuple(X.count(q) // action.group.order for q in range(X.dim + 1)):
        raise NotRegular("quotient f-vector mismatch")
    return Y, SimplicialMap(X, Y, orbit_of)


def realize_rho(X: SimplicialComplex, values: Mapping[str, Fraction] | None = None):
    """An edge cocycle over Q/Z with prescribed holonomy on H_1 generators.

    Generators are named ``g0, g1, ...`` following the Smith form of the
    loop relations over a BFS spanning tree.  Returns ``(alpha, gens)``
    where ``gens`` lists ``(name, order)`` with order 0 for free classes.
    """
    root = X.vertices[0]
    adj = {v: [] for v in X.vertices}
    for u, v in X.simplices(1):
        adj[u].append(v)
        adj[v].append(u)
    parent = {root: None}
    dq = deque([root])
    while dq:
        x = dq.popleft()
        for y in sorted(adj[x]):
            if y not in parent:
                parent[y] = x
                dq.append(y)
    tree = {tuple(sorted((v, p))) for v, p in parent.items() if p is not None}
    nontree = [e for e in X.simplices(1) if e not in tree]
    col = {e: i for i, e in enumerate(nontree)}
    rows = []
    for a, b, c in X.simplices(2):
        row = {}
        for e, sgn in (((b, c), 1), ((a, c), -1), ((a, b), 1)):
            if e in col:
                row[col[e]] = row.get(col[e], 0) + sgn
        rows.append(row)
    R = IntMatrix(len(rows), len(nontree), rows)
    dec = snf(R)
    gens = []
    pivot_cols = set()
    for _, j, d in dec.pivots:
        pivot_cols.add(j)
        if d > 1:
            gens.append((j, d))
    gens += [(j, 0) for j in range(len(nontree)) if j not in pivot_cols]
    named = [(f"g{k}", d) for k, (_, d) in enumerate(gens)]
    values = dict(values or {})
    unknown = set(values) - {n for n, _ in named}
    if unknown:
        raise KeyError(f"unknown H_1 generators {sorted(unknown)}")
    y = [Fraction(0)] * len(nontree)
    for (j, d), (name, _) in zip(gens, named):
        v = Fraction(values.get(name, 0))
        if d and frac_mod1(d * v):
            raise ValueError(f"holonomy {v} on {name} is incompatible with its order {d}")
        y[j] = v
    a = dec.apply_right(y)
    vals = [Fraction(0)] * X.count(1)
    for e, i in col.items():
        vals[X.index(e)] = a[i]
    alpha = Cochain(X, 1, "Q/Z", tuple(vals))
    assert is_cocycle(alpha)
    return alpha, named
