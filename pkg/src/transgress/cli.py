"""``transgress`` command line: cohomology, verification, re-checking, fixtures.

Exit codes: 0 pass, 1 claim fails, 2 invalid input, 3 internal obstruction.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import certificates as certs
from .bicomplex import NotEquivariant, ObstructionNonzero
from .fixtures import BUILTIN, Fixture, FixtureError, builtin, fixture_from_json
from .flatbundle import HolonomyNotPreserved, InvalidPrimitive, ZNotLocallyConstant
from .gk import ClassNotPreserved, bundle_data
from .groupcoh import GroupTableError, NotACocycle, corpus_from_json, corpus_to_json, standard_corpus
from .simplicial import NotFree, NotRegular, cohomology_group

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
FIXTURE_CLAIMS = ("thm13", "thm57", "lemma56", "prop53")
EXTENSION_CLAIMS = ("lemma32", "lemma44")


class InputError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"{path}: no such file or builtin fixture") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None


def load_source(name: str):
    """A builtin name, ``corpus``, or a JSON file (fixture or extension corpus)."""
    if name == "corpus":
        return standard_corpus()
    if name in BUILTIN or name.startswith("lens("):
        try:
            return builtin(name)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    data = _read_json(name)
    if isinstance(data, dict) and str(data.get("schema", "")).startswith("transgress.extensions"):
        try:
            return corpus_from_json(data)
        except (KeyError, ValueError, NotImplementedError) as exc:
            raise InputError(f"{name}: {exc}") from None
    try:
        return fixture_from_json(data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{name}: malformed fixture ({exc})") from None


def cmd_cohomology(args) -> int:
    src = load_source(args.fixture)
    if not isinstance(src, Fixture):
        raise InputError("cohomology needs a fixture, not an extension corpus")
    X = src.complex
    if args.subdivide:
        X = src.subdivide(args.subdivide).complex
    degrees = [args.degree] if args.degree is not None else list(range(X.dim + 1))
    for q in degrees:
        h = cohomology_group(X, q, args.ring)
        print(str(h) if args.degree is not None else f"H^{q} = {h}")
    return EXIT_PASS


def _fixture_certificate(fx: Fixture, args) -> dict:
    if args.action is None:
        raise InputError(f"--action is required; available: {', '.join(sorted(fx.actions))}")
    if args.action not in fx.actions:
        raise InputError(f"no action {args.action!r}; available: {', '.join(sorted(fx.actions))}")
    if args.subdivide:
        fx = fx.subdivide(args.subdivide)
    if args.theorem in EXTENSION_CLAIMS:
        ext = bundle_data(fx.actions[args.action], fx.alpha, fx.basepoint).extension
        return _extension_certificate(ext, args)
    fn = {
        "thm13": certs.certify_thm13,
        "thm57": certs.certify_thm57,
        "lemma56": certs.certify_lemma56,
        "prop53": certs.certify_prop53,
    }[args.theorem]
    return fn(fx, args.action, timing=args.timing)


def _extension_certificate(ext, args) -> dict:
    if args.theorem == "lemma32":
        return certs.certify_lemma32(ext, timing=args.timing)
    if args.theorem == "lemma44":
        return certs.certify_lemma44(ext, args.phi, timing=args.timing)
    raise InputError(f"{args.theorem} needs a fixture, not an extension")


def cmd_verify(args) -> int:
    src = load_source(args.source)
    if isinstance(src, Fixture):
        cert = _fixture_certificate(src, args)
    else:
        by_name = {e.name: e for e in src}
        if args.action not in by_name:
            raise InputError(f"no extension {args.action!r}; available: {', '.join(by_name)}")
        cert = _extension_certificate(by_name[args.action], args)
    text = _dump(cert)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(f"{cert['claim']}: {cert['verdict']}", file=sys.stderr if not args.out else sys.stdout)
    return EXIT_PASS if cert["verdict"] == "PASS" else EXIT_FAIL


def cmd_recheck(args) -> int:
    cert = _read_json(args.certificate)
    if not isinstance(cert, dict):
        raise InputError("certificate must be a JSON object")
    try:
        verdict = certs.recheck(cert)
    except certs.WitnessInvalid as exc:
        print(f"FAIL: witness invalid ({exc})")
        return EXIT_FAIL
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed certificate ({exc})") from None
    print(f"{cert['claim']}: {verdict}")
    return EXIT_PASS if verdict == "PASS" else EXIT_FAIL


def cmd_fixtures(args) -> int:
    if args.what == "list":
        for name in BUILTIN:
            print(name)
        print("corpus")
        return EXIT_PASS
    if not args.name:
        raise InputError("fixtures emit needs a NAME")
    if args.name == "corpus":
        sys.stdout.write(_dump(corpus_to_json(standard_corpus())))
        return EXIT_PASS
    src = load_source(args.name)
    sys.stdout.write(_dump(src.to_json()))
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="transgress", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cohomology", help="integral or rational cohomology of a fixture")
    c.add_argument("fixture", help="builtin fixture name or fixture JSON file")
    c.add_argument("--degree", type=int)
    c.add_argument("--ring", choices=("Z", "Q"), default="Z")
    c.add_argument("--subdivide", type=int, default=0)
    c.set_defaults(func=cmd_cohomology)

    v = sub.add_parser("verify", help="build and emit a certificate")
    v.add_argument("source", help="builtin fixture, fixture JSON, 'corpus' or an extension corpus JSON")
    v.add_argument("--action", help="action name (fixtures) or extension name (corpus)")
    v.add_argument("--theorem", required=True, choices=FIXTURE_CLAIMS + EXTENSION_CLAIMS)
    v.add_argument("--phi", type=int, default=1, help="endomorphism multiplier for lemma44")
    v.add_argument("--subdivide", type=int, default=0)
    v.add_argument("--out", help="write the certificate here instead of stdout")
    v.add_argument("--timing", action="store_true", help="record wall time (makes output run-dependent)")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("recheck", help="re-validate a certificate without solving")
    r.add_argument("certificate")
    r.set_defaults(func=cmd_recheck)

    f = sub.add_parser("fixtures", help="list or emit builtin fixtures")
    f.add_argument("what", choices=("list", "emit"))
    f.add_argument("name", nargs="?")
    f.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FixtureError, GroupTableError, NotACocycle, ClassNotPreserved, NotEquivariant,
            HolonomyNotPreserved, InvalidPrimitive) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NotRegular, NotFree, ObstructionNonzero, ZNotLocallyConstant, NotImplementedError) as exc:
        stage = f" (step {exc.step}, cell {exc.cell})" if isinstance(exc, ObstructionNonzero) else ""
        print(f"internal obstruction{stage}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
