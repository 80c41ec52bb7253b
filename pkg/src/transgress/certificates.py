"""Self-contained JSON certificates and an independent re-checker.

A certificate embeds its inputs (a fixture or an extension table), their
digest, the two cocycles being compared and every intermediate witness.
:func:`recheck` rebuilds the inputs, evaluates each witness equation by
direct substitution and never calls a linear solver.
"""

from __future__ import annotations

import time
from fractions import Fraction

from .bicomplex import (
    BorelComplex,
    HSComplex,
    hs_d2_01,
    kernel_bockstein_cocycle,
    lemma32_check,
    lemma44_check,
)
from .exactcoeff import frac_mod1
from .fixtures import Fixture, fixture_digest, fixture_from_json
from .flatbundle import build_extension, build_flat_bundle
from .gk import (
    bundle_data,
    extension_circle_class,
    gk_cocycle,
    fiber_translation_check,
    lemma56_check,
    prop53_checks,
    random_zero_cochain,
    shifted_representative,
    thm13_verify,
    thm57_check,
)
from .groupcoh import (
    QZ,
    ZZ,
    BarCochain,
    CyclicModule,
    ExtensionTable,
    bar_coboundary,
    connecting_delta,
    extension_class,
)
from .simplicial import Cochain, bockstein, coboundary

SCHEMA = "transgress.certificate/1"
CLAIMS = ("thm13", "thm57", "lemma56", "prop53", "lemma32", "lemma44")


class WitnessInvalid(ValueError):
    def __init__(self, equation: str, detail: str = ""):
        super().__init__(f"{equation}: {detail}" if detail else equation)
        self.equation = equation


# ---------------------------------------------------------------- encoding


def _module_json(m) -> str:
    return m.name


def _module_from(name: str, like=None):
    if name == "Z":
        return ZZ
    if name == "Q/Z":
        return QZ
    if name.startswith("Z/"):
        if like is not None and getattr(like, "name", None) == name:
            return like
        return CyclicModule(int(name[2:]))
    raise WitnessInvalid("encoding", f"unknown module {name!r}")


def bar_json(c: BarCochain | None):
    if c is None:
        return None
    return {"degree": c.degree, "module": _module_json(c.module), "values": c.to_json()}


def bar_from(data, group, like=None) -> BarCochain:
    m = _module_from(data["module"], like)
    return BarCochain(group, data["degree"], m, tuple(m.decode(v) for v in data["values"]))


def cochain_json(c: Cochain):
    return c.to_json()


def cochain_from(X, q, ring, values) -> Cochain:
    return Cochain(X, q, ring, tuple(Fraction(v) if ring != "Z" else int(v) for v in values))


def _check(ok: bool, equation: str, detail: str = ""):
    if not ok:
        raise WitnessInvalid(equation, detail)


def _finish(claim, inputs, a, b, witness, witnesses, elapsed=None, extra=None) -> dict:
    cert = {
        "schema": SCHEMA,
        "claim": claim,
        "inputs": inputs,
        "digest": fixture_digest(inputs),
        "verdict": "PASS" if witness is not None else "FAIL",
        "route_a_cocycle": bar_json(a),
        "route_b_cocycle": bar_json(b),
        "coboundary_witness": bar_json(witness),
        "witnesses": witnesses,
    }
    if extra:
        cert.update(extra)
    if elapsed is not None:
        cert["timing"] = {"seconds": round(elapsed, 3)}
    return cert


def _canonical_fixture(fx: Fixture) -> tuple[Fixture, dict]:
    data = fx.to_json()
    return fixture_from_json(data), data


def _action(fx: Fixture, name: str):
    try:
        return fx.actions[name]
    except KeyError:
        raise KeyError(f"fixture {fx.name!r} has no action {name!r}; available: {sorted(fx.actions)}") from None


def _kappa_json(kappas):
    return [cochain_json(k) for k in kappas]


def _theta_json(th):
    return {"y": list(th.y), "theta": cochain_json(th.theta)}


# ---------------------------------------------------------------- fixture claims


def certify_thm13(fx: Fixture, action: str, timing=False) -> dict:
    t0 = time.perf_counter()
    fx, data = _canonical_fixture(fx)
    a = _action(fx, action)
    r = thm13_verify(a, fx.alpha, fx.basepoint)
    tr = r.transgression
    wit = {
        "kappa": _kappa_json(r.data.kappas),
        "theta": _theta_json(r.data.theta),
        "zigzag_b1": [cochain_json(c) for c in tr.b1.values],
        "zigzag_b2": [cochain_json(c) for c in tr.b2.values],
        "gk_cocycle": bar_json(r.data.gk),
    }
    cmp = r.comparison
    return _finish("thm13", {"fixture": data, "action": action}, cmp.route_a, cmp.route_b, cmp.witness, wit,
                   time.perf_counter() - t0 if timing else None)


def certify_thm57(fx: Fixture, action: str, timing=False) -> dict:
    t0 = time.perf_counter()
    fx, data = _canonical_fixture(fx)
    d = bundle_data(_action(fx, action), fx.alpha, fx.basepoint)
    cmp = thm57_check(d)
    wit = {"kappa": _kappa_json(d.kappas), "extension_order": d.extension.total.order}
    return _finish("thm57", {"fixture": data, "action": action}, cmp.route_a, cmp.route_b, cmp.witness, wit,
                   time.perf_counter() - t0 if timing else None)


def certify_lemma56(fx: Fixture, action: str, timing=False) -> dict:
    t0 = time.perf_counter()
    fx, data = _canonical_fixture(fx)
    d = bundle_data(_action(fx, action), fx.alpha, fx.basepoint)
    res = lemma56_check(d)
    ext = d.extension
    lhs = -bar_coboundary(res.tau)
    rhs = BarCochain.from_function(ext.total, 2, QZ, lambda x, y: d.gk(ext.projection[x], ext.projection[y]))
    witness = BarCochain.zero(ext.total, 1, QZ) if res.holds else None
    wit = {
        "kappa": _kappa_json(d.kappas),
        "theta": _theta_json(d.theta),
        "fiber_translations": fiber_translation_check(d),
        "failing_pairs": [list(p) for p in res.failures[:10]],
    }
    return _finish("lemma56", {"fixture": data, "action": action}, lhs, rhs, witness, wit,
                   time.perf_counter() - t0 if timing else None)


def prop53_inputs(fx: Fixture, nbase=3, nalpha=2, seed=0):
    """Deterministic basepoints spread over the vertex list, and shifts β."""
    verts = fx.complex.vertices
    step = max(1, len(verts) // nbase)
    basepoints = [fx.basepoint] + [v for v in verts[step::step] if v != fx.basepoint][: nbase - 1]
    betas = [random_zero_cochain(fx.complex, seed + i) for i in range(nalpha - 1)]
    return basepoints, betas


def certify_prop53(fx: Fixture, action: str, nbase=3, nalpha=2, seed=0, timing=False) -> dict:
    t0 = time.perf_counter()
    fx, data = _canonical_fixture(fx)
    a = _action(fx, action)
    basepoints, betas = prop53_inputs(fx, nbase, nalpha, seed)
    alphas = [shifted_representative(fx.alpha, b) for b in betas]
    res = prop53_checks(a, fx.alpha, basepoints, alphas)
    comps = []
    for (x, i), ks, c in res.comparisons:
        comps.append({"basepoint": x, "alpha_index": i, "kappa": _kappa_json(ks),
                      "route_b_cocycle": bar_json(c.route_b), "coboundary_witness": bar_json(c.witness)})
    first = res.comparisons[0][2]
    inputs = {"fixture": data, "action": action, "basepoints": basepoints,
              "betas": [cochain_json(b) for b in betas]}
    witness = first.witness if res.holds else None
    wit = {"kappa": _kappa_json(res.kappas), "comparisons": comps}
    return _finish("prop53", inputs, first.route_a, first.route_b, witness, wit,
                   time.perf_counter() - t0 if timing else None)


# ---------------------------------------------------------------- extension claims


def _canonical_extension(ext: ExtensionTable) -> tuple[ExtensionTable, dict]:
    data = ext.to_json()
    return ExtensionTable.from_json(data), data


def certify_lemma32(ext: ExtensionTable, timing=False) -> dict:
    t0 = time.perf_counter()
    ext, data = _canonical_extension(ext)
    r = lemma32_check(ext)
    return _finish("lemma32", {"extension": data}, r.route_a, r.route_b, r.witness, {},
                   time.perf_counter() - t0 if timing else None)


def _hs_json(x: dict):
    return [[list(k), v] for k, v in x.items()]


def _hs_from(data):
    return {tuple(k): list(v) for k, v in data}


def certify_lemma44(ext: ExtensionTable, phi: int = 1, timing=False) -> dict:
    t0 = time.perf_counter()
    ext, data = _canonical_extension(ext)
    r = lemma44_check(ext, phi)
    tr = r.extras["transgression"]
    wit = {"zigzag_b1": _hs_json(tr.b1), "zigzag_b2": _hs_json(tr.b2), "d2_cocycle": bar_json(r.extras["d2"])}
    return _finish("lemma44", {"extension": data, "phi": phi}, r.route_a, r.route_b, r.witness, wit,
                   time.perf_counter() - t0 if timing else None)


# ---------------------------------------------------------------- re-checking


def _check_kappas(fx: Fixture, a, kappa_data, alpha=None) -> list[Cochain]:
    X = fx.complex
    alpha = fx.alpha if alpha is None else alpha
    _check(len(kappa_data) == a.group.order, "kappa", "wrong number of entries")
    out = []
    for g, vals in enumerate(kappa_data):
        k = cochain_from(X, 0, "Q/Z", vals)
        _check(coboundary(k) == a.act(g).pullback(alpha) - alpha, "d kappa_g = g^*alpha - alpha", f"g={g}")
        out.append(k)
    return out


def _check_theta(fx: Fixture, theta_data):
    B = build_flat_bundle(fx.complex, fx.alpha)
    theta = cochain_from(B.total, 0, "Q/Z", theta_data["theta"])
    y = tuple(theta_data["y"])
    _check(coboundary(theta) == B.pulled_alpha, "d theta = p^*alpha")
    ty = theta(y)
    for k in range(B.order):
        u = Fraction(k, B.order)
        _check(frac_mod1(theta(B.translate(y, k)) - ty - u) == 0, "theta(y.u) = theta(y) + u", f"u={u}")
    return B, theta, y


def _check_witness(a: BarCochain, b: BarCochain, w: BarCochain | None):
    if w is None:
        return
    _check(bar_coboundary(w).values == (a - b).values, "delta(witness) = route_a - route_b")


def recheck(cert: dict) -> str:
    """Return the certified verdict after validating every stored equation."""
    if cert.get("schema") != SCHEMA:
        raise WitnessInvalid("schema", f"unsupported schema {cert.get('schema')!r}")
    claim = cert.get("claim")
    if claim not in CLAIMS:
        raise WitnessInvalid("claim", f"unknown claim {claim!r}")
    inputs = cert["inputs"]
    _check(fixture_digest(inputs) == cert.get("digest"), "digest", "inputs do not match the recorded digest")
    wit = cert.get("witnesses", {})
    if claim in ("lemma32", "lemma44"):
        ext = ExtensionTable.from_json(inputs["extension"])
        G = ext.quotient
        a = bar_from(cert["route_a_cocycle"], G, ext.kernel_module)
        b = bar_from(cert["route_b_cocycle"], G, ext.kernel_module)
        w = bar_from(cert["coboundary_witness"], G, ext.kernel_module) if cert["coboundary_witness"] else None
        if claim == "lemma32":
            _check(a.values == extension_class(ext).values, "route_a = extension class")
            _check(b.values == (-hs_d2_01(ext, 1)).values, "route_b = -d2(id)")
        else:
            _recheck_lemma44(ext, inputs.get("phi", 1), a, b, wit)
        _check_witness(a, b, w)
        return cert["verdict"]
    fx = fixture_from_json(inputs["fixture"])
    act = fx.actions[inputs["action"]]
    G = act.group
    if claim == "prop53":
        _recheck_prop53(fx, act, inputs, cert)
        return cert["verdict"]
    if claim == "lemma56":
        _recheck_lemma56(fx, act, cert)
        return cert["verdict"]
    a = bar_from(cert["route_a_cocycle"], G)
    b = bar_from(cert["route_b_cocycle"], G)
    w = bar_from(cert["coboundary_witness"], G) if cert["coboundary_witness"] else None
    kappas = _check_kappas(fx, act, wit["kappa"])
    gk = gk_cocycle(act, fx.alpha, fx.basepoint, kappas)
    if claim == "thm57":
        _check(a.values == gk.values, "route_a = G_{x,alpha}")
        B = build_flat_bundle(fx.complex, fx.alpha)
        ext = build_extension(B, act, kappas)
        _check(b.values == extension_circle_class(ext).values, "route_b = extension class of A(P)")
    else:
        _check_theta(fx, wit["theta"])
        _check(a.values == connecting_delta(gk).values, "route_a = delta G_{x,alpha}")
        _recheck_borel(fx, act, b, wit)
    _check_witness(a, b, w)
    return cert["verdict"]


def _recheck_borel(fx: Fixture, act, b: BarCochain, wit):
    K = BorelComplex(act, fx.basepoint)
    X = fx.complex
    z = K.from_cochain(bockstein(fx.alpha))
    b1 = BarCochain(act.group, 1, K.module(1), tuple(cochain_from(X, 1, "Z", v) for v in wit["zigzag_b1"]))
    b2 = BarCochain(act.group, 2, K.module(0), tuple(cochain_from(X, 0, "Z", v) for v in wit["zigzag_b2"]))
    _check(K.dv(1, 1, b1).values == K.dh(0, 2, z).values, "d_v b1 = delta_h z")
    _check(K.dv(2, 0, b2).values == K.dh(1, 1, b1).values, "d_v b2 = delta_h b1")
    _check(b.values == K.to_base(K.dh(2, 0, b2)).values, "route_b = delta_h b2 at the basepoint")


def _recheck_lemma44(ext, phi, a, b, wit):
    m = ext.kernel_module
    _check(a.values == connecting_delta(hs_d2_01(ext, phi).map_values(QZ, m.to_circle)).values,
           "route_a = delta d2(phi)")
    K = HSComplex(ext)
    z = K.from_kernel_cocycle(kernel_bockstein_cocycle(ext, phi))
    b1, b2 = _hs_from(wit["zigzag_b1"]), _hs_from(wit["zigzag_b2"])
    _check(K.dv(1, 1, b1) == K.dh(0, 2, z), "d_v b1 = delta_h z")
    _check(K.dv(2, 0, b2) == K.dh(1, 1, b1), "d_v b2 = delta_h b1")
    _check(b.values == K.to_base(K.dh(2, 0, b2)).values, "route_b = -d3 = delta_h b2")


def _recheck_lemma56(fx, act, cert):
    wit = cert["witnesses"]
    kappas = _check_kappas(fx, act, wit["kappa"])
    B, theta, y = _check_theta(fx, wit["theta"])
    _check(y == (fx.basepoint, 0), "theta basepoint")
    gk = gk_cocycle(act, fx.alpha, fx.basepoint, kappas)
    ext = build_extension(B, act, kappas)
    E = ext.total
    verts = B.total.vertices
    perms = ext.meta["permutations"]
    iy = B.total.vertices.index(y)
    t = BarCochain(E, 1, QZ, tuple(frac_mod1(theta(verts[perms[x][iy]]) - theta(y)) for x in range(E.order)))
    lhs = -bar_coboundary(t)
    rhs = BarCochain.from_function(E, 2, QZ, lambda x, z: gk(ext.projection[x], ext.projection[z]))
    a = bar_from(cert["route_a_cocycle"], E)
    b = bar_from(cert["route_b_cocycle"], E)
    _check(a.values == lhs.values, "route_a = -delta tau")
    _check(b.values == rhs.values, "route_b = pi^* G_{x,alpha}")
    if cert["coboundary_witness"] is not None:
        _check(a.values == b.values, "-delta tau = pi^* G_{x,alpha} exactly")


def _recheck_prop53(fx, act, inputs, cert):
    G = act.group
    X = fx.complex
    reps = [fx.alpha] + [shifted_representative(fx.alpha, cochain_from(X, 0, "Q/Z", b)) for b in inputs["betas"]]
    wit = cert["witnesses"]
    x0 = inputs["basepoints"][0]
    ref = gk_cocycle(act, fx.alpha, x0, _check_kappas(fx, act, wit["kappa"], fx.alpha))
    a = bar_from(cert["route_a_cocycle"], G)
    _check(a.values == ref.values, "route_a = G at the reference point")
    for comp in wit["comparisons"]:
        al = reps[comp["alpha_index"]]
        ks = _check_kappas(fx, act, comp["kappa"], al)
        b = bar_from(comp["route_b_cocycle"], G)
        _check(b.values == gk_cocycle(act, al, comp["basepoint"], ks).values,
               "route_b = G at another point", str(comp["basepoint"]))
        w = comp["coboundary_witness"]
        if w is not None:
            _check_witness(a, b, bar_from(w, G))
    if cert["verdict"] == "PASS":
        _check(all(c["coboundary_witness"] is not None for c in wit["comparisons"]), "every comparison certified")
