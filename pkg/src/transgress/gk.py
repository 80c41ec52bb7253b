"""The two-cocycle 𝔊_{x,α} of a finite action and the checks built on it."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .bicomplex import BorelComplex, ClassComparison, Transgression, compare_classes, transgress_d3
from .exactcoeff import frac_mod1
from .flatbundle import (
    FlatBundle,
    ThetaData,
    build_extension,
    build_flat_bundle,
    build_theta,
    check_lemma54,
    element_map,
    tau,
)
from .groupcoh import (
    QZ,
    BarCochain,
    ExtensionTable,
    bar_coboundary,
    connecting_delta,
    extension_class,
    is_group_cocycle,
)
from .simplicial import Cochain, FiniteGroupAction, bockstein, coboundary, is_coboundary


class ClassNotPreserved(ValueError):
    def __init__(self, g):
        super().__init__(f"group element {g} does not preserve the class of alpha")
        self.g = g


def solve_primitive(g, alpha: Cochain, basepoint=None) -> Cochain:
    """κ with ``dκ = g^*α - α``, normalized to vanish at the basepoint."""
    X = alpha.complex
    diff = g.pullback(alpha) - alpha
    k = is_coboundary(diff) if not diff.is_zero() else Cochain.zero(X, 0, "Q/Z")
    if k is None:
        raise ClassNotPreserved(g)
    if basepoint is not None:
        c = k(basepoint)
        k = Cochain(X, 0, "Q/Z", tuple(v - c for v in k.values))
    return k


def kappa_table(action: FiniteGroupAction, alpha: Cochain, basepoint) -> list[Cochain]:
    out = []
    for g in range(action.group.order):
        try:
            out.append(solve_primitive(action.act(g), alpha, basepoint))
        except ClassNotPreserved:
            raise ClassNotPreserved(g) from None
    return out


def gk_cocycle(action: FiniteGroupAction, alpha: Cochain, x, kappas=None) -> BarCochain:
    """``𝔊(g, h) = κ_g(h x) - κ_g(x)`` as a Q/Z bar cochain."""
    if kappas is None:
        kappas = kappa_table(action, alpha, x)
    hx = [action.act(h)(x) for h in range(action.group.order)]
    return BarCochain.from_function(action.group, 2, QZ, lambda g, h: kappas[g](hx[h]) - kappas[g](x))


def cocycle_identity_failures(c: BarCochain) -> list[tuple]:
    """All triples where ``δc`` is nonzero (empty for a cocycle)."""
    d = bar_coboundary(c)
    zero = c.module.zero()
    return [t for t, v in zip(c.group.tuples(3), d.values) if v != zero]


def random_zero_cochain(X, seed: int, denominator: int = 4) -> Cochain:
    """A seeded random Q/Z 0-cochain with values in ``(1/denominator)Z``."""
    rng = random.Random(seed)
    return Cochain(X, 0, "Q/Z", tuple(Fraction(rng.randrange(denominator), denominator) for _ in X.vertices))


def shifted_representative(alpha: Cochain, beta: Cochain) -> Cochain:
    """``α + dβ``, a representative of the same class."""
    return alpha + coboundary(beta)


@dataclass
class IndependenceResult:
    reference: BarCochain
    kappas: list
    comparisons: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(c.holds for _, _, c in self.comparisons)


def prop53_checks(action: FiniteGroupAction, alpha: Cochain, basepoints, alphas=()) -> IndependenceResult:
    """Compare 𝔊 over every (basepoint, representative) pair with the first.

    ``comparisons`` holds ``((x, i), κ table, ClassComparison)``.
    """
    reps = [alpha] + list(alphas)
    for a in reps[1:]:
        if is_coboundary(a - alpha) is None:
            raise ValueError("alpha representatives are not cohomologous")
    x0 = basepoints[0]
    k0 = kappa_table(action, alpha, x0)
    out = IndependenceResult(gk_cocycle(action, alpha, x0, k0), k0)
    for i, a in enumerate(reps):
        for x in basepoints:
            if i == 0 and x == x0:
                continue
            ks = kappa_table(action, a, x)
            other = gk_cocycle(action, a, x, ks)
            out.comparisons.append(((x, i), ks, compare_classes("prop53", out.reference, other)))
    return out


@dataclass(eq=False)
class BundleData:
    """Everything built from (fixture, action): κ table, bundle, θ, extension."""

    action: FiniteGroupAction
    alpha: Cochain
    basepoint: int
    kappas: list
    gk: BarCochain
    bundle: FlatBundle
    theta: ThetaData
    extension: ExtensionTable


def bundle_data(action: FiniteGroupAction, alpha: Cochain, basepoint, kappas=None) -> BundleData:
    kappas = kappas if kappas is not None else kappa_table(action, alpha, basepoint)
    G = gk_cocycle(action, alpha, basepoint, kappas)
    B = build_flat_bundle(action.complex, alpha)
    th = build_theta(B, (basepoint, 0), check_lemma54(B))
    ext = build_extension(B, action, kappas)
    return BundleData(action, alpha, basepoint, kappas, G, B, th, ext)


def tau_cochain(data: BundleData) -> BarCochain:
    ext = data.extension
    vals = [tau(data.bundle, data.theta, element_map(data.bundle, ext, x)) for x in range(ext.total.order)]
    return BarCochain(ext.total, 1, QZ, tuple(vals))


@dataclass
class TauCoboundaryResult:
    tau: BarCochain
    failures: list

    @property
    def holds(self) -> bool:
        return not self.failures


def fiber_translation_check(data: BundleData) -> bool:
    """τ on fiber translations is the inclusion ``A -> Q/Z``."""
    B, th = data.bundle, data.theta
    return all(tau(B, th, B.translation(Fraction(k, B.order))) == Fraction(k, B.order) for k in range(B.order))


def lemma56_check(data: BundleData) -> TauCoboundaryResult:
    """``-δτ(φ, ψ) = 𝔊(π φ, π ψ)`` for every pair, exactly."""
    ext = data.extension
    t = tau_cochain(data)
    dt = bar_coboundary(t)
    pr = ext.projection
    failures = []
    for (a, b), v in zip(ext.total.tuples(2), dt.values):
        if frac_mod1(-v) != data.gk(pr[a], pr[b]):
            failures.append((a, b))
    return TauCoboundaryResult(t, failures)


def extension_circle_class(ext: ExtensionTable, section=None) -> BarCochain:
    c = extension_class(ext, section)
    m = ext.kernel_module
    return c.map_values(QZ, m.to_circle)


def thm57_check(data: BundleData, section=None) -> ClassComparison:
    """``[𝔊] = e(A_Γ(P))`` in ``H^2(Γ; Q/Z)``; uses the canonical section by default."""
    e = extension_circle_class(data.extension, section)
    return compare_classes("thm57", data.gk, e)


@dataclass(eq=False)
class TransgressionComparison:
    comparison: ClassComparison
    data: BundleData
    transgression: Transgression
    c: Cochain

    @property
    def holds(self) -> bool:
        return self.comparison.holds


def e_c(action: FiniteGroupAction, alpha: Cochain, basepoint=None) -> tuple[BarCochain, Transgression, Cochain]:
    """``-d3[c]`` for ``c = bockstein(α)`` in the Borel complex of the action."""
    c = bockstein(alpha)
    K = BorelComplex(action, basepoint)
    tr = transgress_d3(K, K.from_cochain(c))
    return -tr.cocycle, tr, c


def thm13_verify(action: FiniteGroupAction, alpha: Cochain, basepoint) -> TransgressionComparison:
    """``δ[𝔊] = e_c`` restricted to Γ, with every intermediate witness."""
    data = bundle_data(action, alpha, basepoint)
    if not is_group_cocycle(data.gk):
        raise ArithmeticError("𝔊 is not a group cocycle")
    lhs = connecting_delta(data.gk)
    rhs, tr, c = e_c(action, alpha, basepoint)
    return TransgressionComparison(compare_classes("thm13", lhs, rhs), data, tr, c)
