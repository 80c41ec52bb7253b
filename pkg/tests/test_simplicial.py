from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transgress.fixtures import icosahedron, is_isomorphic
from transgress.groupcoh import FiniteGroup, NotACocycle
from transgress.simplicial import (
    Cochain,
    FiniteGroupAction,
    NotFree,
    NotRegular,
    SimplicialAutomorphism,
    SimplicialComplex,
    barycentric_subdivide,
    bockstein,
    coboundary,
    cohomology_group,
    is_coboundary,
    pullback,
    quotient_by_free_action,
)

from .conftest import cached_fixture

FIXTURES = ["rp2_minimal", "rp3_join", "lens(3,1)"]


def random_cochain(X, q, ring, rng_values):
    n = X.count(q)
    vals = [rng_values[i % len(rng_values)] for i in range(n)]
    if ring == "Q/Z":
        vals = [Fraction(v, 7) for v in vals]
    return Cochain(X, q, ring, tuple(vals))


class TestComplex:
    def test_triangle_subdivision(self):
        X = SimplicialComplex([(0, 1, 2)])
        Xs, _, transfer, labels = barycentric_subdivide(X)
        assert Xs.f_vector() == (7, 12, 6)
        assert len(labels) == 7

    def test_coboundary_of_vertex_function(self):
        X = SimplicialComplex([(0, 1)])
        f = Cochain(X, 0, "Z", (3, 5))
        assert coboundary(f)(0, 1) == 2
        assert coboundary(f)(1, 0) == -2

    def test_zero_cochain(self):
        X = cached_fixture("rp2_minimal").complex
        assert coboundary(Cochain.zero(X, 1)).is_zero()

    def test_alternation(self):
        X = SimplicialComplex([(0, 1, 2)])
        c = Cochain.from_dict(X, 2, "Z", {(1, 0, 2): 4})
        assert c(0, 1, 2) == -4 and c(2, 0, 1) == -4 and c(0, 0, 1) == 0

    def test_components(self):
        X = SimplicialComplex([(0, 1), (2, 3)])
        assert len(X.components()) == 2 and not X.is_connected()


@pytest.mark.parametrize("name", FIXTURES)
@given(vals=st.lists(st.integers(-3, 3), min_size=1, max_size=9))
@settings(max_examples=10, deadline=None)
def test_d_squared(name, vals):
    X = cached_fixture(name).complex
    for ring in ("Z", "Q", "Q/Z"):
        for q in range(X.dim - 1):
            c = random_cochain(X, q, ring, vals)
            assert coboundary(coboundary(c)).is_zero()


class TestCohomology:
    def test_rp2(self):
        X = cached_fixture("rp2_minimal").complex
        assert X.f_vector() == (6, 15, 10)
        assert [str(cohomology_group(X, q)) for q in range(3)] == ["ℤ", "0", "0 + ℤ/2"]
        assert str(cohomology_group(X, 2, "Q")) == "0"

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_lens(self, p):
        X = cached_fixture(f"lens({p},1)").complex
        assert cohomology_group(X, 1).is_trivial()
        assert cohomology_group(X, 2).torsion == (p,)
        assert str(cohomology_group(X, 3)) == "ℤ"

    def test_subdivision_invariance(self):
        X = cached_fixture("rp2_minimal").complex
        Xs = barycentric_subdivide(X)[0]
        for q in range(3):
            assert cohomology_group(X, q) == cohomology_group(Xs, q)


class TestPullback:
    @pytest.mark.parametrize("name, act", [("rp2_minimal", "Z5"), ("rp2_minimal", "V4"), ("lens(3,1)", "Z6")])
    def test_functoriality(self, name, act):
        fx = cached_fixture(name)
        a = fx.actions[act]
        G = a.group
        c = fx.alpha
        assert pullback(a.act(G.identity), c) == c
        for g in range(G.order):
            for h in range(G.order):
                gh = G.table[g][h]
                assert pullback(a.act(gh), c) == pullback(a.act(h), pullback(a.act(g), c))

    def test_inverse(self):
        fx = cached_fixture("rp2_minimal")
        g = fx.actions["Z5"].act(1)
        assert pullback(g.compose(g.inverse()), fx.alpha) == fx.alpha

    def test_z5_preserves_class(self):
        fx = cached_fixture("rp2_minimal")
        for g in fx.actions["Z5"].maps:
            assert is_coboundary(pullback(g, fx.alpha) - fx.alpha) is not None

    def test_bockstein_naturality(self):
        fx = cached_fixture("rp2_minimal")
        for g in fx.actions["A5"].maps:
            lhs = bockstein(pullback(g, fx.alpha))
            rhs = pullback(g, bockstein(fx.alpha))
            assert is_coboundary(lhs - rhs) is not None


class TestBockstein:
    def test_zero(self):
        X = cached_fixture("rp2_minimal").complex
        assert bockstein(Cochain.zero(X, 1, "Q/Z")).is_zero()

    def test_rp2_nonzero(self):
        fx = cached_fixture("rp2_minimal")
        c = bockstein(fx.alpha)
        assert set(fx.alpha.values) <= {0, Fraction(1, 2)}
        assert is_coboundary(c) is None
        assert is_coboundary(2 * c) is not None

    def test_not_a_cocycle(self):
        X = SimplicialComplex([(0, 1, 2)])
        a = Cochain.from_dict(X, 1, "Q/Z", {(0, 1): Fraction(1, 3)})
        with pytest.raises(NotACocycle):
            bockstein(a)

    def test_exact_lift_gives_zero(self):
        X = SimplicialComplex([(0, 1, 2)])
        f = Cochain(X, 0, "Q", (Fraction(1, 5), Fraction(2, 5), Fraction(0)))
        a = coboundary(f).as_ring("Q/Z")
        assert is_coboundary(bockstein(a)) is not None


class TestQuotient:
    def test_trivial_group(self):
        X = SimplicialComplex([(0, 1, 2), (1, 2, 3)])
        a = FiniteGroupAction(X, FiniteGroup.cyclic(1), [SimplicialAutomorphism(X, {v: v for v in X.vertices})])
        Y, p = quotient_by_free_action(X, a)
        assert Y.f_vector() == X.f_vector()

    def test_icosahedron(self):
        X, anti = icosahedron()
        Y, _ = quotient_by_free_action(X, anti)
        assert is_isomorphic(Y, cached_fixture("rp2_minimal").complex)

    def test_not_free(self):
        X = SimplicialComplex([(0, 1)])
        a = FiniteGroupAction.from_generators(X, [{0: 1, 1: 0}])
        with pytest.raises(NotFree):
            quotient_by_free_action(X, a)

    def test_not_regular(self):
        n = 4
        X = SimplicialComplex([(i, (i + 1) % n) for i in range(n)])
        a = FiniteGroupAction.from_generators(X, [{i: (i + 2) % n for i in range(n)}])
        with pytest.raises(NotRegular):
            quotient_by_free_action(X, a)


def test_action_transport_under_subdivision():
    fx = cached_fixture("rp2_minimal")
    Xs, act2, transfer, _ = barycentric_subdivide(fx.complex, fx.actions["V4"])
    act2.validate()
    a2 = transfer.pullback(fx.alpha)
    assert coboundary(a2).is_zero()
    assert is_coboundary(bockstein(a2)) is None
