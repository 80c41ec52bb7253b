"""Flat principal A-bundles built from an edge cocycle, and their automorphisms.

``A = <1/N>`` is the subgroup of Q/Z generated by the values of α.  The
total complex has vertices ``(v, k)`` standing for the point ``k/N`` of
the fiber over ``v``; over a simplex ``(v0, ..., vq)`` of the base it has
the simplices ``{(v_i, k + N α(v0, v_i))}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .exactcoeff import common_denominator, frac_mod1
from .groupcoh import (
    CyclicModule,
    ExtensionTable,
    FiniteGroup,
    NotACocycle,
)
from .simplicial import (
    Cochain,
    FiniteGroupAction,
    SimplicialAutomorphism,
    SimplicialComplex,
    SimplicialMap,
    coboundary,
    is_coboundary,
    is_cocycle,
)


class ZNotLocallyConstant(ArithmeticError):
    pass


class InvalidPrimitive(ValueError):
    pass


class HolonomyNotPreserved(ValueError):
    def __init__(self, g, message=""):
        super().__init__(message or f"group element {g} does not preserve the class of alpha")
        self.g = g


@dataclass(eq=False)
class FlatBundle:
    base: SimplicialComplex
    alpha: Cochain
    order: int
    total: SimplicialComplex

    @cached_property
    def projection(self) -> SimplicialMap:
        return SimplicialMap(self.total, self.base, {w: w[0] for w in self.total.vertices}, check=False)

    def step(self, value) -> int:
        """``N * value`` as an exponent mod N; raises if value is not in A."""
        k = Fraction(value) * self.order
        if k.denominator != 1:
            raise ValueError(f"{value} is not in the structure group 1/{self.order}")
        return k.numerator % self.order

    def translate(self, w, k: int):
        return (w[0], (w[1] + k) % self.order)

    def translation(self, u) -> SimplicialAutomorphism:
        """Fiber translation ``t_u`` by ``u`` in A."""
        k = self.step(u)
        return SimplicialAutomorphism(self.total, {w: self.translate(w, k) for w in self.total.vertices}, check=False)

    @cached_property
    def pulled_alpha(self) -> Cochain:
        return self.projection.pullback(self.alpha)

    def components(self) -> list[list]:
        return self.total.components()


def build_flat_bundle(X: SimplicialComplex, alpha: Cochain) -> FlatBundle:
    if alpha.ring != "Q/Z" or alpha.degree != 1 or alpha.complex is not X:
        raise ValueError("alpha must be a Q/Z 1-cochain on X")
    if not is_cocycle(alpha):
        raise NotACocycle("alpha is not closed")
    N = common_denominator(alpha.values)
    facets = []
    for f in X.facets():
        v0 = f[0]
        offs = [0] + [int(alpha(v0, v) * N) for v in f[1:]]
        for k in range(N):
            facets.append([(v, (k + o) % N) for v, o in zip(f, offs)])
    if X.dim == 0:
        facets = [[(v, k)] for v in X.vertices for k in range(N)]
    P = SimplicialComplex(facets, name=f"P({X.name})")
    return FlatBundle(X, alpha, N, P)


def check_lemma54(B: FlatBundle) -> Cochain:
    """A Q/Z 0-cochain θ' on P with ``dθ' = p^*α``."""
    theta = is_coboundary(B.pulled_alpha)
    if theta is None:
        raise ArithmeticError("p^*alpha has no primitive on the total space")
    return theta


@dataclass(eq=False)
class ThetaData:
    y: tuple
    theta_prime: Cochain
    z: dict
    theta: Cochain

    def check(self, B: FlatBundle) -> bool:
        if coboundary(self.theta) != B.pulled_alpha:
            return False
        ty = self.theta(self.y)
        return all(
            frac_mod1(self.theta(B.translate(self.y, k)) - ty - Fraction(k, B.order)) == 0 for k in range(B.order)
        )


def build_theta(B: FlatBundle, y=None, theta_prime: Cochain | None = None) -> ThetaData:
    """Correct θ' on each component so that ``θ(y.u) = θ(y) + u``.

    ``z(u) = θ'(y) - θ'(y.u) + u`` is attached to the component of
    ``y.u``; it must agree for all u landing in the same component.
    """
    P = B.total
    if y is None:
        y = min(w for w in P.vertices if w[1] == 0)
    tp = check_lemma54(B) if theta_prime is None else theta_prime
    comp_of = {}
    for i, comp in enumerate(B.components()):
        for w in comp:
            comp_of[w] = i
    z: dict = {}
    for k in range(B.order):
        w = B.translate(y, k)
        val = frac_mod1(tp(y) - tp(w) + Fraction(k, B.order))
        c = comp_of[w]
        if c in z and z[c] != val:
            raise ZNotLocallyConstant(f"z takes two values on component {c}")
        z[c] = val
    if len(z) != len(B.components()):
        raise ZNotLocallyConstant("some component misses the fiber over the basepoint")
    theta = Cochain(P, 0, "Q/Z", tuple(tp(w) + z[comp_of[w]] for w in P.vertices))
    data = ThetaData(y, tp, z, theta)
    if not data.check(B):
        raise ZNotLocallyConstant("corrected theta fails its defining identities")
    return data


def lift_automorphism(B: FlatBundle, g: SimplicialAutomorphism, kappa: Cochain) -> SimplicialAutomorphism:
    """``φ_g(v, a) = (g v, a + κ(v))`` for ``dκ = g^*α - α``."""
    if g.complex is not B.base:
        raise ValueError("automorphism of a different complex")
    if coboundary(kappa) != g.pullback(B.alpha) - B.alpha:
        raise InvalidPrimitive("d kappa != g^*alpha - alpha")
    try:
        steps = {v: B.step(kappa(v)) for v in B.base.vertices}
    except ValueError as exc:
        raise InvalidPrimitive(str(exc)) from None
    vmap = {w: (g(w[0]), (w[1] + steps[w[0]]) % B.order) for w in B.total.vertices}
    try:
        return SimplicialAutomorphism(B.total, vmap, check=True)
    except Exception as exc:  # pragma: no cover - guarded by the primitive check
        raise InvalidPrimitive(str(exc)) from None


def build_extension(B: FlatBundle, action: FiniteGroupAction, kappas, name: str = "") -> ExtensionTable:
    """The finite group ``{φ_g t_a}`` of vertex permutations of P.

    The quotient is ``action.group`` itself, the kernel ``{t_a}`` carries
    the value ``a`` in ``Z/N`` (so ``1`` means ``1/N``), and
    ``meta["lift_section"]`` records ``g -> φ_g``.  The stored section is
    the canonical (lowest index) one, which in general differs from the
    lifts.
    """
    G = action.group
    N = B.order
    verts = B.total.vertices
    vindex = {w: i for i, w in enumerate(verts)}
    lifts = []
    for g in range(G.order):
        try:
            lifts.append(lift_automorphism(B, action.act(g), kappas[g]))
        except InvalidPrimitive as exc:
            raise HolonomyNotPreserved(g, str(exc)) from None
    perms, proj, kvals = [], [], {}
    index = {}
    for g in range(G.order):
        for k in range(N):
            key = tuple(vindex[lifts[g](B.translate(w, k))] for w in verts)
            if key in index:
                raise ArithmeticError("lifted automorphisms are not distinct")
            index[key] = len(perms)
            perms.append(key)
            proj.append(g)
    n = len(perms)
    table = [[index[tuple(a[i] for i in b)] for b in perms] for a in perms]
    ident = index[tuple(range(len(verts)))]
    labels = [f"phi{g}t{k}" for g in range(G.order) for k in range(N)]
    total = FiniteGroup(table, ident, labels=labels)
    e = G.identity
    kernel = [x for x in range(n) if proj[x] == e]
    for x in kernel:
        kvals[x] = x - e * N
    ext = ExtensionTable(total, kernel, G, proj, CyclicModule(N), kvals, name=name or f"A({action.name})",
                         meta={"lift_section": [g * N for g in range(G.order)], "permutations": perms})
    if not ext.is_central:
        raise ArithmeticError("fiber translations are not central")
    ext.section = ext.canonical_section()
    ext.check_section(ext.meta["lift_section"])
    return ext


def element_map(B: FlatBundle, ext: ExtensionTable, x: int) -> dict:
    verts = B.total.vertices
    return {w: verts[i] for w, i in zip(verts, ext.meta["permutations"][x])}


def tau(B: FlatBundle, theta: ThetaData, phi) -> Fraction:
    """``θ(φ y) - θ(y)``; ``phi`` is a vertex map (automorphism or dict)."""
    image = phi(theta.y) if callable(phi) else phi[theta.y]
    return frac_mod1(theta.theta(image) - theta.theta(theta.y))
