import copy
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from transgress import certificates as certs
from transgress.cli import main
from transgress.groupcoh import standard_corpus

from .conftest import cached_fixture

CORPUS = {e.name: e for e in standard_corpus()}


@pytest.fixture(scope="module")
def thm13_cert():
    return certs.certify_thm13(cached_fixture("rp2_minimal"), "V4")


@pytest.mark.parametrize("claim", ["thm13", "thm57", "lemma56", "prop53"])
def test_fixture_roundtrip(claim):
    fn = getattr(certs, f"certify_{claim}")
    cert = fn(cached_fixture("rp2_minimal"), "Z5")
    assert cert["verdict"] == "PASS"
    again = json.loads(json.dumps(cert))
    assert certs.recheck(again) == "PASS"


@pytest.mark.parametrize("name", ["Q8_over_V4", "S3_split"])
def test_extension_d2_roundtrip(name):
    cert = certs.certify_lemma32(CORPUS[name])
    assert certs.recheck(json.loads(json.dumps(cert))) == "PASS"


def test_pulled_back_d3_roundtrip():
    cert = certs.certify_lemma44(CORPUS["Z4_over_Z2"], 1)
    assert cert["verdict"] == "PASS"
    assert certs.recheck(json.loads(json.dumps(cert))) == "PASS"


def test_timing_is_opt_in():
    fx = cached_fixture("rp2_minimal")
    assert "timing" not in certs.certify_thm57(fx, "Z5")
    assert "timing" in certs.certify_thm57(fx, "Z5", timing=True)


def _bump(value):
    return str(Fraction(value) + Fraction(1, 2))


class TestTamper:
    def test_digest_mismatch(self, thm13_cert):
        bad = copy.deepcopy(thm13_cert)
        bad["inputs"]["fixture"]["basepoint"] = 1
        with pytest.raises(certs.WitnessInvalid) as err:
            certs.recheck(bad)
        assert err.value.equation == "digest"

    def test_route_a(self, thm13_cert):
        bad = copy.deepcopy(thm13_cert)
        bad["route_a_cocycle"]["values"][5] += 1
        with pytest.raises(certs.WitnessInvalid):
            certs.recheck(bad)

    def test_zigzag_b1(self, thm13_cert):
        bad = copy.deepcopy(thm13_cert)
        b1 = bad["witnesses"]["zigzag_b1"]
        b1[1][3] += 1
        with pytest.raises(certs.WitnessInvalid):
            certs.recheck(bad)

    def test_zigzag_b2(self, thm13_cert):
        bad = copy.deepcopy(thm13_cert)
        bad["witnesses"]["zigzag_b2"][3][0] += 1
        with pytest.raises(certs.WitnessInvalid):
            certs.recheck(bad)

    def test_kappa(self, thm13_cert):
        bad = copy.deepcopy(thm13_cert)
        k = bad["witnesses"]["kappa"][1]
        k[0] = _bump(k[0])
        with pytest.raises(certs.WitnessInvalid):
            certs.recheck(bad)

    def test_schema(self, thm13_cert):
        bad = dict(thm13_cert, schema="other/1")
        with pytest.raises(certs.WitnessInvalid):
            certs.recheck(bad)

    def test_hs_zigzag_witness(self):
        cert = certs.certify_lemma44(CORPUS["Q8_over_V4"], 1)
        bad = copy.deepcopy(cert)
        bad["witnesses"]["zigzag_b1"][1][1][3] += 1
        with pytest.raises(certs.WitnessInvalid):
            certs.recheck(bad)


# ---------------------------------------------------------------- CLI


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_cohomology(capsys):
    code, out, _ = run(["cohomology", "rp2_minimal", "--degree", "2"], capsys)
    assert code == 0 and out.strip() == "0 + ℤ/2"
    code, out, _ = run(["cohomology", "lens(3,1)"], capsys)
    assert code == 0 and "H^2 = 0 + ℤ/3" in out


def test_cli_rational(capsys):
    code, out, _ = run(["cohomology", "rp2_minimal", "--degree", "2", "--ring", "Q"], capsys)
    assert out.strip() == "0"


def test_cli_verify_and_recheck(tmp_path, capsys):
    path = tmp_path / "c.json"
    code, out, _ = run(["verify", "rp2_minimal", "--action", "Z5", "--theorem", "thm13", "--out", str(path)], capsys)
    assert code == 0 and "thm13: PASS" in out
    code, out, _ = run(["recheck", str(path)], capsys)
    assert code == 0 and out.strip() == "thm13: PASS"
    cert = json.loads(path.read_text())
    cert["witnesses"]["zigzag_b1"][1][0] += 3
    path.write_text(json.dumps(cert))
    code, out, _ = run(["recheck", str(path)], capsys)
    assert code == 1 and out.startswith("FAIL")


def test_cli_corpus(capsys):
    code, out, err = run(["verify", "corpus", "--action", "D4_over_V4", "--theorem", "lemma44"], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "PASS"


def test_cli_fixture_extension(capsys):
    code, out, _ = run(["verify", "rp2_minimal", "--action", "V4", "--theorem", "lemma32"], capsys)
    assert code == 0


@pytest.mark.parametrize("argv", [
    ["verify", "rp2_minimal", "--action", "Z7", "--theorem", "thm13"],
    ["verify", "rp2_minimal", "--theorem", "thm13"],
    ["verify", "nope.json", "--action", "Z5", "--theorem", "thm13"],
    ["verify", "corpus", "--action", "Nope", "--theorem", "lemma32"],
    ["cohomology", "lens(4,2)"],
    ["fixtures", "emit"],
])
def test_cli_input_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err.startswith("error:")


def test_cli_malformed_json(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{ not json")
    code, _, err = run(["cohomology", str(p)], capsys)
    assert code == 2 and "invalid JSON" in err


def test_cli_fixture_json_roundtrip(tmp_path, capsys):
    code, out, _ = run(["fixtures", "emit", "lens(3,1)"], capsys)
    p = tmp_path / "lens.json"
    p.write_text(out)
    code, out, _ = run(["cohomology", str(p), "--degree", "2"], capsys)
    assert code == 0 and out.strip() == "0 + ℤ/3"


def test_cli_fixtures_list(capsys):
    code, out, _ = run(["fixtures", "list"], capsys)
    names = out.split()
    assert code == 0 and "rp2_minimal" in names and "corpus" in names


def test_cli_output_is_byte_stable():
    cmd = [sys.executable, "-m", "transgress.cli", "verify", "rp2_minimal", "--action", "V4", "--theorem", "thm13"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
