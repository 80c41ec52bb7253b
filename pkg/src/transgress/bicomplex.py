"""First-quadrant double complexes and the two differentials we need.

Conventions: total differential ``D = dh + (-1)^p dv``.  For a
``dv``-closed ``z`` in ``K^{0,2}`` the zig-zag finds ``b1, b2`` with
``dv b1 = dh z`` and ``dv b2 = dh b1``; then ``x = z + b1 - b2`` has
``D x = -dh b2`` concentrated in ``K^{3,0}``, and that is the
transgression ``d3[z]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .exactcoeff import IntMatrix, snf, solve_integer
from .groupcoh import (
    QZ,
    ZZ,
    BarCochain,
    CyclicModule,
    ExtensionTable,
    FiniteGroup,
    bar_coboundary,
    connecting_delta,
    extension_class,
    is_group_coboundary,
)
from .simplicial import Cochain, CochainModule, FiniteGroupAction, coboundary


class ObstructionNonzero(ArithmeticError):
    """A zig-zag step has no solution; ``cell`` names the failing position."""

    def __init__(self, message, step=None, cell=None):
        super().__init__(message)
        self.step = step
        self.cell = cell


class NotEquivariant(ValueError):
    pass


@dataclass
class ClassComparison:
    """Two cocycle routes and a coboundary witness for their difference."""

    claim: str
    route_a: BarCochain
    route_b: BarCochain
    witness: BarCochain | None
    extras: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.witness is not None


def compare_classes(claim: str, a: BarCochain, b: BarCochain, **extras) -> ClassComparison:
    return ClassComparison(claim, a, b, is_group_coboundary(a - b), extras)


class DoubleComplex:
    """Interface: cells ``K^{p,q}`` over a base group with ``dh``, ``dv``.

    Subclasses supply ``zero``, ``dh``, ``dv``, ``add``, ``neg``,
    ``is_zero``, ``solve_v`` (a ``dv``-preimage or None) and ``to_base``
    (a ``dv``-closed bottom-row element as an integer bar cochain).
    """

    base: FiniteGroup

    def total(self, p, q, x):
        """``D x`` as ``{(p+1, q): ..., (p, q+1): ...}``."""
        v = self.dv(p, q, x)
        return {(p + 1, q): self.dh(p, q, x), (p, q + 1): v if p % 2 == 0 else self.neg(v)}

    def check_relations(self, p, q, x) -> dict:
        hh = self.dh(p + 1, q, self.dh(p, q, x))
        vv = self.dv(p, q + 1, self.dv(p, q, x))
        hv = self.dh(p, q + 1, self.dv(p, q, x))
        vh = self.dv(p + 1, q, self.dh(p, q, x))
        return {
            "dh^2": self.is_zero(hh),
            "dv^2": self.is_zero(vv),
            "commute": self.is_zero(self.add(hv, self.neg(vh))),
        }


@dataclass
class Transgression:
    cocycle: BarCochain
    b1: object
    b2: object
    raw: object


def transgress_d3(K: DoubleComplex, z, check_closed: bool = True) -> Transgression:
    """``d3^{0,2}[z]`` by zig-zag; raises ObstructionNonzero on a failed step.

    ``check_closed=False`` skips ``dv z = 0`` when the caller knows it.
    """
    if check_closed and not K.is_zero(K.dv(0, 2, z)):
        raise ObstructionNonzero("z is not vertically closed", step=0, cell=(0, 3))
    y1 = K.dh(0, 2, z)
    b1 = K.solve_v(1, 1, y1)
    if b1 is None:
        raise ObstructionNonzero("class of z is not invariant", step=1, cell=(1, 2))
    y2 = K.dh(1, 1, b1)
    b2 = K.solve_v(2, 0, y2)
    if b2 is None:
        raise ObstructionNonzero("fiber H^1 obstruction", step=2, cell=(2, 1))
    raw = K.neg(K.dh(2, 0, b2))
    return Transgression(K.to_base(raw), b1, b2, raw)


# ---------------------------------------------------------------- Borel complex


class BorelComplex(DoubleComplex):
    """``K^{p,q} = C^p(Γ; C^q(X;Z))``, right action by pullback.

    Elements are BarCochains whose module is a :class:`CochainModule`.
    """

    def __init__(self, action: FiniteGroupAction, basepoint=None):
        self.action = action
        self.base = action.group
        self.X = action.complex
        self.basepoint = self.X.vertices[0] if basepoint is None else basepoint
        self._modules = {}

    def module(self, q) -> CochainModule:
        if q not in self._modules:
            self._modules[q] = CochainModule(self.action, q, "Z")
        return self._modules[q]

    def zero(self, p, q):
        return BarCochain.zero(self.base, p, self.module(q))

    def from_cochain(self, c: Cochain) -> BarCochain:
        return BarCochain(self.base, 0, self.module(c.degree), (c,))

    def dh(self, p, q, x):
        return bar_coboundary(x)

    def dv(self, p, q, x):
        return x.map_values(self.module(q + 1), coboundary)

    def add(self, x, y):
        return x + y

    def neg(self, x):
        return -x

    def is_zero(self, x):
        return all(v.is_zero() for v in x.values)

    def solve_v(self, p, q, y):
        dec = self.X.coboundary_snf(q)
        out = []
        for c in y.values:
            sol = solve_integer(dec, list(c.values))
            if sol is None:
                return None
            out.append(Cochain(self.X, q, "Z", tuple(sol)))
        return BarCochain(self.base, p, self.module(q), tuple(out))

    def to_base(self, w) -> BarCochain:
        i = self.X.index((self.basepoint,))
        vals = []
        for c in w.values:
            if len(set(c.values)) > 1:
                raise ObstructionNonzero("bottom-row element is not constant on X", step=3, cell=(w.degree, 0))
            vals.append(c.values[i])
        return BarCochain(self.base, w.degree, ZZ, tuple(vals))


# ---------------------------------------------------------------- Hochschild-Serre complex


class HSComplex(DoubleComplex):
    """Homogeneous double complex computing the Hochschild-Serre sequence.

    ``K^{p,q} = Hom_E(Z[Γ^{p+1}] ⊗ Z[E^{q+1}], Z)`` with E acting
    diagonally (through the projection on the Γ factors).  A point is
    normalized to ``γ0 = 1`` and ``ε0 = s(g0)``, so an element is a dict
    from ``(γ1..γp)`` to a fiber vector indexed by ``(g0, ε1..εq)``.
    Column ``p = 0`` is the cochain complex of A computed with the
    E-resolution; the bottom row is ``C^p(Γ; Z)``.
    """

    def __init__(self, ext: ExtensionTable, section=None):
        self.ext = ext
        self.E = ext.total
        self.base = ext.quotient
        self.s = list(section) if section is not None else ext.canonical_section()
        ext.check_section(self.s)
        if self.s[self.base.identity] != self.E.identity:
            raise ValueError("section must send 1 to 1")
        self._fiber_cache = {}
        self._snf_cache = {}

    # -- normalization
    def _rho(self, e):
        E = self.E
        return E.table[e][E.inverse[self.s[self.ext.projection[e]]]]

    def fiber_size(self, q):
        return self.base.order * self.E.order ** q

    def fiber_index(self, eps) -> int:
        """Index of an ε-tuple already normalized to ``ε0 = s(p(ε0))``."""
        E = self.E
        i = self.ext.projection[eps[0]]
        for e in eps[1:]:
            i = i * E.order + e
        return i

    def fiber_point(self, q, idx):
        E = self.E
        rest = []
        for _ in range(q):
            idx, r = divmod(idx, E.order)
            rest.append(r)
        return (self.s[idx],) + tuple(reversed(rest))

    def canonical(self, gammas, eps):
        """Normalize a point; returns ``(γ-key, fiber index)``."""
        E, G = self.E, self.base
        T = E.table
        g0 = gammas[0]
        if g0 != G.identity:
            e1 = E.inverse[self.s[g0]]
            gi = G.inverse[g0]
            gammas = tuple(G.table[gi][g] for g in gammas)
            eps = tuple(T[e1][e] for e in eps)
        a = E.inverse[self._rho(eps[0])]
        if a != E.identity:
            eps = tuple(T[a][e] for e in eps)
        return tuple(gammas[1:]), self.fiber_index(eps)

    # -- cells
    def zero(self, p, q):
        n = self.fiber_size(q)
        return {key: [0] * n for key in self.base.tuples(p)}

    def add(self, x, y):
        return {k: [a + b for a, b in zip(x[k], y[k])] for k in x}

    def neg(self, x):
        return {k: [-a for a in v] for k, v in x.items()}

    def is_zero(self, x):
        return not any(any(v) for v in x.values())

    def fiber_matrix(self, q) -> IntMatrix:
        """``dv`` restricted to one γ-key: fiber(q) -> fiber(q+1)."""
        if q not in self._fiber_cache:
            rows = []
            for idx in range(self.fiber_size(q + 1)):
                eps = self.fiber_point(q + 1, idx)
                row = {}
                for j in range(q + 2):
                    _, col = self.canonical((self.base.identity,), eps[:j] + eps[j + 1:])
                    row[col] = row.get(col, 0) + (-1 if j % 2 else 1)
                rows.append({c: v for c, v in row.items() if v})
            self._fiber_cache[q] = IntMatrix(self.fiber_size(q + 1), self.fiber_size(q), rows)
        return self._fiber_cache[q]

    def dv(self, p, q, x):
        M = self.fiber_matrix(q)
        return {k: M.apply(v) for k, v in x.items()}

    def dh(self, p, q, x):
        G = self.base
        one = G.identity
        n = self.fiber_size(q)
        points = [self.fiber_point(q, i) for i in range(n)]
        out = {}
        for key in G.tuples(p + 1):
            full = (one,) + key
            vec = [0] * n
            for idx, eps in enumerate(points):
                acc = 0
                for i in range(p + 2):
                    k, f = self.canonical(full[:i] + full[i + 1:], eps)
                    v = x[k][f]
                    acc += -v if i % 2 else v
                vec[idx] = acc
            out[key] = vec
        return out

    def solve_v(self, p, q, y):
        if q not in self._snf_cache:
            self._snf_cache[q] = snf(self.fiber_matrix(q))
        dec = self._snf_cache[q]
        out = {}
        for k, v in y.items():
            sol = solve_integer(dec, v)
            if sol is None:
                return None
            out[k] = sol
        return out

    def to_base(self, w) -> BarCochain:
        G = self.base
        p = len(next(iter(w)))
        vals = []
        for tup in G.tuples(p):
            key, acc = [], G.identity
            for g in tup:
                acc = G.table[acc][g]
                key.append(acc)
            vec = w[tuple(key)]
            if len(set(vec)) > 1:
                raise ObstructionNonzero("bottom-row element is not fiberwise constant", step=3, cell=(p, 0))
            vals.append(vec[0])
        return BarCochain(G, p, ZZ, tuple(vals))

    def from_kernel_cocycle(self, c: Callable[[int, int], int]):
        """Place an inhomogeneous 2-cocycle on A (elements of E) into ``K^{0,2}``."""
        E = self.E
        inv, T = E.inverse, E.table

        def hom(a0, a1, a2):
            return c(T[inv[a0]][a1], T[inv[a1]][a2])

        vec = []
        for idx in range(self.fiber_size(2)):
            e0, e1, e2 = self.fiber_point(2, idx)
            vec.append(hom(self._rho(e0), self._rho(e1), self._rho(e2)))
        return {(): vec}


# ---------------------------------------------------------------- d2 and the lemmas


def _conjugation_module(ext: ExtensionTable) -> CyclicModule:
    """The kernel as a right E-module, ``a.x = x^{-1} a x``."""
    E = ext.total
    m = ext.kernel_module
    gen = next(x for x, v in ext.kernel_values.items() if v == 1)
    units = []
    for x in range(E.order):
        conj = E.table[E.table[E.inverse[x]][gen]][x]
        units.append(ext.kernel_values[conj])
    return CyclicModule(m.n, units)


def _endomorphism(ext: ExtensionTable, phi):
    m = ext.kernel_module
    if isinstance(phi, int):
        return lambda v: (phi * v) % m.n
    return phi


def check_equivariant(ext: ExtensionTable, phi) -> None:
    m = ext.kernel_module
    f = _endomorphism(ext, phi)
    for a in range(m.n):
        for b in range(m.n):
            if f(m.add(a, b)) != m.add(f(a), f(b)):
                raise NotEquivariant("phi is not a homomorphism")
        for g in range(ext.quotient.order):
            if f(m.act(a, g)) != m.act(f(a), g):
                raise NotEquivariant(f"phi does not commute with the action of {g}")


def hs_d2_01(ext: ExtensionTable, phi=1, section=None, check_inflation=None) -> BarCochain:
    """Cocycle of ``d2^{0,1}[phi]``: ``δφ_s`` read on section pairs.

    ``φ_s(F) = φ(F s(p(F))^{-1})``.  Only cyclic kernels are supported;
    ``phi`` is a multiplier or a function on exponents.  For a central
    kernel ``δφ_s`` is checked to be inflated from Γ; with a nontrivial
    action it is not, though its values on section pairs still are the
    cocycle we want.
    """
    if not isinstance(ext.kernel_module, CyclicModule):
        raise TypeError("hs_d2_01 needs a cyclic kernel module")
    check_equivariant(ext, phi)
    f = _endomorphism(ext, phi)
    E, G = ext.total, ext.quotient
    s = list(section) if section is not None else ext.canonical_section()
    ext.check_section(s)
    T, inv = E.table, E.inverse
    modE = _conjugation_module(ext)

    def phi_s(x):
        return f(ext.kernel_values[T[x][inv[s[ext.projection[x]]]]])

    d = bar_coboundary(BarCochain.from_function(E, 1, modE, phi_s))
    if check_inflation is None:
        check_inflation = ext.is_central
    if check_inflation:
        pr = ext.projection
        for x in range(E.order):
            for y in range(E.order):
                if d(x, y) != d(s[pr[x]], s[pr[y]]):
                    raise ArithmeticError("δφ_s is not inflated from the quotient")
    return BarCochain.from_function(G, 2, ext.kernel_module, lambda g, h: d(s[g], s[h]))


def lemma32_check(ext: ExtensionTable, section=None) -> ClassComparison:
    """``e(E) = -d2^{0,1}(id)``: the sum of both cocycles is a coboundary."""
    e = extension_class(ext, section)
    d2 = hs_d2_01(ext, 1, section)
    return ClassComparison("lemma32", e, -d2, is_group_coboundary(e + d2))


def kernel_bockstein_cocycle(ext: ExtensionTable, phi=1) -> Callable[[int, int], int]:
    """``δ(s_x ∘ φ)`` on A: the integer 2-cocycle of the connecting image of φ."""
    m = ext.kernel_module
    f = _endomorphism(ext, phi)
    T = ext.total.table

    def lift(x):
        return Fraction(f(ext.kernel_values[x]), m.n)

    def c(a1, a2):
        v = lift(a2) - lift(T[a1][a2]) + lift(a1)
        assert v.denominator == 1
        return v.numerator

    return c


def lemma44_check(ext: ExtensionTable, phi=1) -> ClassComparison:
    """Both routes around the square relating d2, d3 and connecting maps.

    Route A: connecting map applied to ``d2^{0,1}[φ]``.
    Route B: ``-d3^{0,2}`` of the connecting image of φ, by zig-zag in
    the Hochschild-Serre double complex.
    """
    m = ext.kernel_module
    if not ext.is_central or not m.trivial_action:
        raise ValueError("lemma44_check needs a central cyclic kernel")
    d2 = hs_d2_01(ext, phi)
    route_a = connecting_delta(d2.map_values(QZ, m.to_circle))
    K = HSComplex(ext)
    c = kernel_bockstein_cocycle(ext, phi)
    A = ext.kernel
    T = ext.total.table
    for a in A:
        for b in A:
            for d in A:
                if c(b, d) - c(T[a][b], d) + c(a, T[b][d]) - c(a, b):
                    raise ArithmeticError("kernel cochain is not a cocycle")
    # z is pulled back from a cocycle on A, so it is vertically closed
    tr = transgress_d3(K, K.from_kernel_cocycle(c), check_closed=False)
    route_b = -tr.cocycle
    return compare_classes("lemma44", route_a, route_b, transgression=tr, hs_complex=K, d2=d2)
