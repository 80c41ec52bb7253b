from fractions import Fraction

import pytest

from transgress.fixtures import icosahedron, is_isomorphic
from transgress.flatbundle import (
    HolonomyNotPreserved,
    InvalidPrimitive,
    build_extension,
    build_flat_bundle,
    build_theta,
    check_lemma54,
    lift_automorphism,
    tau,
)
from transgress.gk import extension_circle_class, kappa_table, solve_primitive
from transgress.groupcoh import FiniteGroup, NotACocycle, is_group_coboundary
from transgress.simplicial import (
    Cochain,
    FiniteGroupAction,
    SimplicialAutomorphism,
    SimplicialComplex,
    coboundary,
    cohomology_group,
)

from .conftest import cached_fixture


def identity(X):
    return SimplicialAutomorphism(X, {v: v for v in X.vertices})


class TestBuild:
    def test_trivial_alpha(self):
        X = cached_fixture("rp2_minimal").complex
        B = build_flat_bundle(X, Cochain.zero(X, 1, "Q/Z"))
        assert B.order == 1 and B.total.f_vector() == X.f_vector()

    def test_rp2_is_icosahedron(self):
        fx = cached_fixture("rp2_minimal")
        B = build_flat_bundle(fx.complex, fx.alpha)
        assert B.total.f_vector() == (12, 30, 20) and B.total.is_connected()
        assert is_isomorphic(B.total, icosahedron()[0])

    def test_lens5_cover_is_a_sphere(self):
        fx = cached_fixture("lens(5,1)")
        B = build_flat_bundle(fx.complex, fx.alpha)
        assert B.order == 5 and B.total.is_connected()
        assert cohomology_group(B.total, 1).is_trivial() and cohomology_group(B.total, 2).is_trivial()

    def test_components_match_holonomy_index(self):
        # alpha valued in 1/4 but with holonomy 1/2: two components
        fx = cached_fixture("rp2_minimal")
        X = fx.complex
        beta = Cochain(X, 0, "Q/Z", tuple(Fraction(1, 4) if v == 3 else 0 for v in X.vertices))
        B = build_flat_bundle(X, fx.alpha + coboundary(beta))
        assert B.order == 4 and len(B.components()) == 2

    def test_not_a_cocycle(self):
        X = SimplicialComplex([(0, 1, 2)])
        with pytest.raises(NotACocycle):
            build_flat_bundle(X, Cochain.from_dict(X, 1, "Q/Z", {(0, 1): Fraction(1, 2)}))

    def test_edges_follow_alpha(self):
        fx = cached_fixture("rp2_minimal")
        B = build_flat_bundle(fx.complex, fx.alpha)
        for u, v in fx.complex.simplices(1):
            for k in range(B.order):
                w = (v, (k + B.step(fx.alpha(u, v))) % B.order)
                assert B.total.has(tuple(sorted([(u, k), w])))


class TestTheta:
    @pytest.mark.parametrize("name", ["rp2_minimal", "lens(5,1)"])
    def test_theta_prime_solves(self, name):
        fx = cached_fixture(name)
        B = build_flat_bundle(fx.complex, fx.alpha)
        tp = check_lemma54(B)
        assert coboundary(tp) == B.pulled_alpha

    def test_trivial_bundle(self):
        X = cached_fixture("rp2_minimal").complex
        B = build_flat_bundle(X, Cochain.zero(X, 1, "Q/Z"))
        th = build_theta(B, (0, 0), Cochain.zero(B.total, 0, "Q/Z"))
        assert th.theta.is_zero() and th.z == {0: 0}

    @pytest.mark.parametrize("name", ["rp2_minimal", "lens(5,1)"])
    def test_theta_identities(self, name):
        fx = cached_fixture(name)
        B = build_flat_bundle(fx.complex, fx.alpha)
        th = build_theta(B, (fx.basepoint, 0))
        assert th.check(B)
        for k in range(B.order):
            u = Fraction(k, B.order)
            assert tau(B, th, B.translation(u)) == u

    def test_disconnected_total_space(self):
        fx = cached_fixture("rp2_minimal")
        X = fx.complex
        beta = Cochain(X, 0, "Q/Z", tuple(Fraction(1, 4) if v == 3 else 0 for v in X.vertices))
        B = build_flat_bundle(X, fx.alpha + coboundary(beta))
        th = build_theta(B, (0, 0))
        assert len(th.z) == 2 and th.check(B)


class TestLift:
    def test_identity(self):
        fx = cached_fixture("rp2_minimal")
        B = build_flat_bundle(fx.complex, fx.alpha)
        phi = lift_automorphism(B, identity(fx.complex), Cochain.zero(fx.complex, 0, "Q/Z"))
        assert phi.is_identity()

    def test_constant_is_translation(self):
        fx = cached_fixture("rp2_minimal")
        B = build_flat_bundle(fx.complex, fx.alpha)
        half = Cochain(fx.complex, 0, "Q/Z", (Fraction(1, 2),) * 6)
        assert lift_automorphism(B, identity(fx.complex), half) == B.translation(Fraction(1, 2))

    def test_z5_generator(self):
        fx = cached_fixture("rp2_minimal")
        B = build_flat_bundle(fx.complex, fx.alpha)
        a = fx.actions["Z5"]
        g = a.act(a.generators[0])
        k = solve_primitive(g, fx.alpha, fx.basepoint)
        assert coboundary(k) == g.pullback(fx.alpha) - fx.alpha
        phi = lift_automorphism(B, g, k)
        t = B.translation(Fraction(1, 2))
        for w in B.total.vertices:
            assert phi(w)[0] == g(w[0])
            assert phi(t(w)) == t(phi(w))

    def test_invalid_primitive(self):
        fx = cached_fixture("rp2_minimal")
        B = build_flat_bundle(fx.complex, fx.alpha)
        bad = Cochain(fx.complex, 0, "Q/Z", (Fraction(1, 2),) + (0,) * 5)
        with pytest.raises(InvalidPrimitive):
            lift_automorphism(B, identity(fx.complex), bad)


class TestExtension:
    def test_trivial_group(self):
        fx = cached_fixture("rp2_minimal")
        X = fx.complex
        triv = FiniteGroupAction(X, FiniteGroup.cyclic(1), [identity(X)])
        B = build_flat_bundle(X, fx.alpha)
        ext = build_extension(B, triv, kappa_table(triv, fx.alpha, 0))
        assert ext.total.order == 2 and len(ext.kernel) == 2

    @pytest.mark.parametrize("act, order", [("Z5", 10), ("V4", 8)])
    def test_rp2(self, act, order):
        fx = cached_fixture("rp2_minimal")
        a = fx.actions[act]
        B = build_flat_bundle(fx.complex, fx.alpha)
        ext = build_extension(B, a, kappa_table(a, fx.alpha, fx.basepoint))
        assert ext.total.order == order and ext.is_central
        assert ext.kernel_module.n == 2

    def test_kappa_choice_independence(self):
        fx = cached_fixture("rp3_24cell")
        a = fx.actions["V4"]
        B = build_flat_bundle(fx.complex, fx.alpha)
        k0 = kappa_table(a, fx.alpha, fx.basepoint)
        shifted = [k if g == a.group.identity else k + Cochain(fx.complex, 0, "Q/Z", (Fraction(1, 2),) * len(k.values))
                   for g, k in enumerate(k0)]
        e0 = build_extension(B, a, k0)
        e1 = build_extension(B, a, shifted)
        c0 = extension_circle_class(e0, e0.meta["lift_section"])
        c1 = extension_circle_class(e1, e1.meta["lift_section"])
        assert c0 != c1
        assert is_group_coboundary(c0 - c1) is not None

    def test_holonomy_not_preserved(self):
        # a reflection of a 4-cycle reverses the holonomy 1/4
        n = 4
        X = SimplicialComplex([(i, (i + 1) % n) for i in range(n)])
        alpha = Cochain.from_dict(X, 1, "Q/Z", {(0, 1): Fraction(1, 4)})
        refl = FiniteGroupAction.from_generators(X, [{i: (-i) % n for i in range(n)}])
        B = build_flat_bundle(X, alpha)
        bad = [Cochain.zero(X, 0, "Q/Z")] * 2
        with pytest.raises(HolonomyNotPreserved):
            build_extension(B, refl, bad)
