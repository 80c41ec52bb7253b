"""Acceptance suite: one test per criterion, each timed against its budget.

Every test records a PASS/FAIL line in ``conftest.ACCEPTANCE`` (printed in the
pytest terminal summary) and also prints it, so ``pytest -s`` shows the lines
inline.  Criterion 9 is a stretch goal and is
reported as xfail instead of failing the run.
"""

from __future__ import annotations

import json
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from transgress import certificates as certs
from transgress.flatbundle import check_lemma54, tau
from transgress.gk import (
    bundle_data,
    cocycle_identity_failures,
    gk_cocycle,
    kappa_table,
    fiber_translation_check,
    lemma56_check,
    prop53_checks,
    random_zero_cochain,
    shifted_representative,
    thm13_verify,
    thm57_check,
)
from transgress.groupcoh import (
    FiniteGroup,
    extension_class,
    group_cohomology,
    is_group_coboundary,
    standard_corpus,
)
from transgress.simplicial import Cochain, cohomology_group

from .conftest import ACCEPTANCE, cached_fixture

CORPUS = standard_corpus()
# A5 is shipped for pullback checks only; |A5|^3 triples and its bar complex
# in degree 3 are outside the budgets below
FIXTURE_ACTIONS = {
    "rp2_minimal": ["Z5", "V4"],
    "rp3_join": ["Z4", "Z2", "V4"],
    "lens(2,1)": ["Z4", "Z2"],
    "lens(3,1)": ["Z6", "Z3"],
    "lens(5,1)": ["Z10", "Z5"],
}


class Report:
    def __init__(self, key: int, limit: float):
        self.key, self.limit = key, limit
        self.notes: list[str] = []
        self.ok = True
        self.elapsed = 0.0

    def check(self, ok: bool, note: str):
        if not ok:
            self.ok = False
            self.notes.append("FAILED " + note)

    def note(self, text: str):
        self.notes.append(text)


@contextmanager
def criterion(key: int, limit: float):
    rep = Report(key, limit)
    t0 = time.perf_counter()
    try:
        yield rep
    except Exception as exc:  # recorded, then re-raised by the assert below
        rep.check(False, f"{type(exc).__name__}: {exc}")
    rep.elapsed = time.perf_counter() - t0
    rep.check(rep.elapsed < limit, f"time {rep.elapsed:.1f}s exceeds {limit:.0f}s")
    line = f"{'; '.join(rep.notes)} [{rep.elapsed:.2f}s / {limit:.0f}s]"
    ACCEPTANCE[key] = (rep.ok, line)
    print(f"[{'PASS' if rep.ok else 'FAIL'}] criterion {key}: {line}")


def _same_class(a, b) -> bool:
    return is_group_coboundary(a - b) is not None


def test_criterion_1_cohomology_regressions():
    with criterion(1, 30) as rep:
        rp2 = cached_fixture("rp2_minimal").complex
        got = tuple(str(cohomology_group(rp2, q)) for q in range(3))
        rep.check(got == ("ℤ", "0", "0 + ℤ/2"), f"H*(RP2) = {got}")
        for name in ("rp3_join", "rp3_24cell"):
            h = cohomology_group(cached_fixture(name).complex, 2)
            rep.check(h.rank == 0 and h.torsion == (2,), f"H2({name}) = {h}")
        for p in (2, 3, 5):
            h = cohomology_group(cached_fixture(f"lens({p},1)").complex, 2)
            rep.check(h.rank == 0 and h.torsion == (p,), f"H2(L({p},1)) = {h}")
        for m in (2, 3, 5):
            got = [str(group_cohomology(FiniteGroup.cyclic(m), q)) for q in range(4)]
            rep.check(got == ["ℤ", "0", f"0 + ℤ/{m}", "0"], f"H*(Z/{m}) = {got}")
        rep.note("RP2, RP3 (two models), L(p,1) and Z/m tables exact")
    assert rep.ok, ACCEPTANCE[1][1]


def test_criterion_2_cocycle_identity():
    with criterion(2, 40) as rep:
        cases = [("rp2_minimal", "Z5"), ("rp2_minimal", "V4"), ("lens(3,1)", "Z6"), ("lens(3,1)", "Z3"),
                 ("lens(5,1)", "Z10"), ("lens(5,1)", "Z5")]
        per_fixture: dict[str, float] = {}
        triples = 0
        for name, act in cases:
            t0 = time.perf_counter()
            fx = cached_fixture(name)
            a = fx.actions[act]
            G = gk_cocycle(a, fx.alpha, fx.basepoint)
            bad = cocycle_identity_failures(G)
            rep.check(not bad, f"{name}/{act}: {len(bad)} failing triples")
            triples += a.group.order ** 3
            per_fixture[name] = per_fixture.get(name, 0.0) + time.perf_counter() - t0
        for name, t in per_fixture.items():
            rep.check(t < 10, f"{name} took {t:.1f}s (limit 10s)")
        rep.note(f"{triples} triples over {len(cases)} actions; slowest fixture {max(per_fixture.values()):.2f}s")
    assert rep.ok, ACCEPTANCE[2][1]


def test_criterion_3_basepoint_and_representative_independence():
    with criterion(3, 60) as rep:
        total = 0
        for name, acts in FIXTURE_ACTIONS.items():
            fx = cached_fixture(name)
            X = fx.complex
            alphas = [shifted_representative(fx.alpha, random_zero_cochain(X, s)) for s in range(2)]
            basepoints = list(X.vertices[:: max(1, len(X.vertices) // 3)][:3])
            for act in acts:
                res = prop53_checks(fx.actions[act], fx.alpha, basepoints, alphas)
                rep.check(res.holds, f"{name}/{act}")
                total += len(res.comparisons)
        rep.note(f"{total} certified coboundaries, 3 basepoints x 2 extra representatives per action")
    assert rep.ok, ACCEPTANCE[3][1]


def test_criterion_4_theta_tau_lemmas():
    with criterion(4, 60) as rep:
        pairs = 0
        for name in [*FIXTURE_ACTIONS, "rp3_24cell"]:
            fx = cached_fixture(name)
            acts = FIXTURE_ACTIONS.get(name, ["V4"])
            for act in acts:
                d = bundle_data(fx.actions[act], fx.alpha, fx.basepoint)
                B = d.bundle
                check_lemma54(B)
                rep.check(d.theta.check(B), f"{name}: theta normalization")
                for k in range(B.order):
                    u = Fraction(k, B.order)
                    rep.check(tau(B, d.theta, B.translation(u)) == u, f"{name}: tau(t_{u}) != {u}")
                rep.check(fiber_translation_check(d), f"{name}/{act}: tau on fiber translations")
                res = lemma56_check(d)
                rep.check(res.holds, f"{name}/{act}: {len(res.failures)} pairs violate -delta tau = pi*G")
                pairs += d.extension.total.order ** 2
        rep.note(f"theta' solved and tau checks on every fixture; {pairs} extension pairs exact")
    assert rep.ok, ACCEPTANCE[4][1]


def test_criterion_5_extension_class():
    with criterion(5, 60) as rep:
        pairs = [("rp2_minimal", "Z5"), ("rp2_minimal", "V4"), ("lens(3,1)", "Z6"), ("lens(5,1)", "Z10"),
                 ("rp3_join", "V4")]
        for name, act in pairs:
            fx = cached_fixture(name)
            cert = certs.certify_thm57(fx, act)
            rep.check(cert["verdict"] == "PASS" and certs.recheck(cert) == "PASS", f"{name}/{act}")
        rep.note(f"{len(pairs)} fixture/action pairs certified and rechecked")
    assert rep.ok, ACCEPTANCE[5][1]


def test_criterion_6_transgression_formula():
    with criterion(6, 300) as rep:
        fx = cached_fixture("rp2_minimal")
        rep.check(not group_cohomology(fx.actions["V4"].group, 3).is_trivial(), "H3(V4) should be nonzero")
        for act in ("Z5", "V4"):
            cert = certs.certify_thm13(fx, act)
            ok = cert["verdict"] == "PASS" and certs.recheck(cert) == "PASS"
            rep.check(ok, f"RP2/{act}")
            r = thm13_verify(fx.actions[act], fx.alpha, fx.basepoint)
            zero = is_group_coboundary(r.comparison.route_a) is not None
            rep.note(f"RP2/{act}: classes agree, value {'0' if zero else 'nonzero'}")
    assert rep.ok, ACCEPTANCE[6][1]


def test_criterion_7_corpus_lemmas():
    with criterion(7, 120) as rep:
        n32 = n44 = 0
        for ext in CORPUS:
            cert = certs.certify_lemma32(ext)
            rep.check(cert["verdict"] == "PASS" and certs.recheck(cert) == "PASS", f"lemma32 {ext.name}")
            n32 += 1
            if not ext.is_central:
                continue
            for phi in range(ext.kernel_module.n):
                cert = certs.certify_lemma44(ext, phi)
                rep.check(cert["verdict"] == "PASS" and certs.recheck(cert) == "PASS",
                          f"lemma44 {ext.name} phi={phi}")
                n44 += 1
        rep.note(f"{n32} lemma32 and {n44} lemma44 certificates over {len(CORPUS)} extensions")
    assert rep.ok, ACCEPTANCE[7][1]


def _subdivision_invariance(rep):
    fx = cached_fixture("rp2_minimal")
    sub = fx.subdivide(1)
    for q in range(3):
        rep.check(cohomology_group(fx.complex, q) == cohomology_group(sub.complex, q), f"H{q} under subdivision")
    for act in ("Z5", "V4"):
        r0 = thm13_verify(fx.actions[act], fx.alpha, fx.basepoint)
        r1 = thm13_verify(sub.actions[act], sub.alpha, sub.basepoint)
        rep.check(r1.holds, f"thm13 on subdivided RP2/{act}")
        rep.check(_same_class(r0.data.gk, r1.data.gk), f"[G] for {act} changes under subdivision")
        rep.check(_same_class(r0.comparison.route_a, r1.comparison.route_a), f"delta[G] for {act}")
        rep.check(_same_class(r0.comparison.route_b, r1.comparison.route_b), f"transgression for {act}")
        e1 = thm57_check(bundle_data(sub.actions[act], sub.alpha, sub.basepoint))
        rep.check(e1.holds and _same_class(e1.route_b, r0.data.gk), f"extension class for {act}")


def _section_independence(rep):
    for ext in CORPUS:
        s0 = ext.canonical_section()
        c0 = extension_class(ext, s0)
        for a in ext.kernel[1:]:
            s = [ext.total.table[a][x] if g != ext.quotient.identity else x for g, x in enumerate(s0)]
            rep.check(_same_class(extension_class(ext, s), c0), f"section shift in {ext.name}")


def _kappa_independence(rep):
    for name, acts in FIXTURE_ACTIONS.items():
        fx = cached_fixture(name)
        for act in acts:
            a = fx.actions[act]
            base = kappa_table(a, fx.alpha, fx.basepoint)
            n = len(base[0].values)
            shifted = [k if g == a.group.identity else k + Cochain(fx.complex, 0, "Q/Z", (Fraction(g, 7),) * n)
                       for g, k in enumerate(base)]
            g0 = gk_cocycle(a, fx.alpha, fx.basepoint, base)
            g1 = gk_cocycle(a, fx.alpha, fx.basepoint, shifted)
            rep.check(_same_class(g0, g1), f"kappa shift on {name}/{act}")


def _byte_identical(rep):
    runs = [
        ["verify", "rp2_minimal", "--action", "V4", "--theorem", "thm13"],
        ["verify", "corpus", "--action", "Q8_over_V4", "--theorem", "lemma44"],
        ["cohomology", "lens(5,1)"],
    ]
    for argv in runs:
        cmd = [sys.executable, "-m", "transgress.cli", *argv]
        outs = [subprocess.run(cmd, capture_output=True, check=False).stdout for _ in range(2)]
        rep.check(outs[0] == outs[1] and bool(outs[0]), f"rerun differs: {' '.join(argv)}")
    # the in-process certificate must also match the CLI bytes
    cert = certs.certify_thm13(cached_fixture("rp2_minimal"), "V4")
    text = json.dumps(cert, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    cli = subprocess.run([sys.executable, "-m", "transgress.cli", *runs[0]], capture_output=True).stdout
    rep.check(text.encode() == cli, "CLI output differs from library certificate")


def test_criterion_8_robustness():
    with criterion(8, 600) as rep:
        _subdivision_invariance(rep)
        _section_independence(rep)
        _kappa_independence(rep)
        _byte_identical(rep)
        rep.note("subdivision, section, kappa-normalization and rerun checks")
    assert rep.ok, ACCEPTANCE[8][1]


def test_criterion_9_stretch_24cell():
    with criterion(9, 900) as rep:
        fx = cached_fixture("rp3_24cell")
        a = fx.actions["V4"]
        h3 = group_cohomology(a.group, 3)
        cert = certs.certify_thm13(fx, "V4")
        rep.check(cert["verdict"] == "PASS" and certs.recheck(cert) == "PASS", "thm13 on the 24-cell model")
        r = thm13_verify(a, fx.alpha, fx.basepoint)
        nonzero = is_group_coboundary(r.comparison.route_a) is None
        rep.check(r.holds, "delta[G] and the transgression route disagree")
        rep.note(f"delta[G] is {'the nonzero class' if nonzero else 'zero'} in H3(Z/2 x Z/2; Z) = {h3}; "
                 f"transgression route agrees; lifted group abelian: {r.data.extension.total.is_abelian()}")
    if not rep.ok:
        pytest.xfail("stretch criterion 9: " + ACCEPTANCE[9][1])
