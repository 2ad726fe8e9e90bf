#!/usr/bin/env python3
"""
Tests for the command line, configuration, model store and certificates
"""

import contextlib
import io
import json
import os
import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import pytest

from certificates import Certificate, list_certificates, save_certificate
from exactkernel import InputError
from fanocheck import CASES, GOLDEN, GROUP_TYPES, FanoCheck, flatten_report, parse_pairs, parse_vector
from fanocheck import main as cli_main
from modelstore import ModelStore, file_digest

ROOT = Path(__file__).parent
MODELS = ROOT / "models"


@contextlib.contextmanager
def workspace(models: Path = MODELS, **settings):
    """Temporary config and certificate directory; yields the config path"""
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        config = {
            "paths": {"models": str(models), "certificates": str(tmp / "certificates"),
                      "log_file": str(tmp / "logs" / "fanocheck.log")},
            "flagdelta": {"validation_points": 10},
        }
        for section, values in settings.items():
            config.setdefault(section, {}).update(values)
        path = tmp / "config.json"
        path.write_text(json.dumps(config))
        yield path


@contextlib.contextmanager
def environment(**variables):
    saved = {k: os.environ.get(k) for k in variables}
    os.environ.update(variables)
    try:
        yield
    finally:
        for k, v in saved.items():
            if v is None:
                os.environ.pop(k, None)
            else:
                os.environ[k] = v


def run(config: Path, *argv):
    """Exit code and parsed stdout of one CLI invocation"""
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = cli_main(["--config", str(config), *argv])
    text = out.getvalue()
    try:
        return code, json.loads(text)
    except json.JSONDecodeError:
        return code, text


def test_volume_command():
    with workspace() as config:
        code, cert = run(config, "volume", "--model", "bl2p2", "--divisor", "3,-2,-2")
    assert code == 0
    assert cert["results"]["volume"] == "2"
    assert cert["results"]["chamber"] == "P"
    assert cert["verdicts"]["chamber formula"] is True
    assert cert["models"]["bl2p2.json"] == file_digest(MODELS / "bl2p2.json")


def test_zariski_command():
    with workspace() as config:
        code, cert = run(config, "zariski", "--model", "dp4", "--divisor", "3,1,-1,-1,-1,-1")
    assert code == 0
    assert cert["results"]["negative"] == {"L2": "1"}
    assert cert["results"]["volume"] == "5"


def test_cox_command():
    with workspace() as config:
        code, cert = run(config, "cox-zariski", "--degrees", "1,0;0,1;0,1;1,3", "--divisor", "2,5")
    assert code == 0
    assert cert["results"]["mu"] == ["1/3", "0", "0", "0"]
    assert cert["results"]["wP"] == ["5/3", "5"]


def test_discriminant_command():
    with workspace() as config:
        code, cert = run(config, "discriminant", "--pencil", "pencil_example", "--point", "2,1,1",
                         "--audit", "audit_example")
    assert code == 0
    assert cert["results"]["fiber type"] == "two_lines"
    assert cert["results"]["singular"] is False
    assert cert["results"]["discriminant"]["constant"] == "-2"
    assert cert["verdicts"]["k-stability"] == "K-stable"


def test_delta_table():
    with workspace() as config:
        code, text = run(config, "delta", "--case", "nonreduced-fiber", "--table")
    assert code == 0
    assert "22/31" in text
    assert "inconclusive" in text


def test_delta_certificate_anchors():
    with workspace() as config:
        code, cert = run(config, "delta", "--case", "dp4-quotient-smooth")
    assert code == 0
    assert cert["results"]["bound"] == "176/161"
    assert cert["anchors"]["gamma, smooth fiber off E"] == "176/161"
    assert cert["verdicts"]["conclusive"] is True


def test_aut_commands():
    with workspace() as config:
        code, cert = run(config, "aut", "verify", "--row", "smooth-01234-C5")
        assert code == 0
        assert cert["verdicts"] == {"smooth-01234-C5": "pass"}
        assert run(config, "aut", "verify")[0] == 2
        assert run(config, "aut", "verify", "--row", "no-such-row")[0] == 2
        code, cert = run(config, "aut", "classify", "--b", "1,-1,2,-2,0")
    assert code == 0
    assert [s["c"] for s in cert["results"]["symmetries"]] == ["1", "-1"]


def test_exit_codes():
    with workspace() as config:
        code, error = run(config, "volume", "--model", "bl2p2", "--divisor", "1,2")
        assert code == 2
        assert error["error"] == "InputError"
        code, error = run(config, "volume", "--model", "nowhere", "--divisor", "1")
        assert code == 2
        code, error = run(config, "volume", "--model", "bl2p2", "--divisor=-1,0,0")
        assert code == 1
        assert error["error"] == "NotPseudoEffectiveError"
        with pytest.raises(SystemExit) as exit_info:
            with contextlib.redirect_stdout(io.StringIO()):
                cli_main(["--config", str(config), "delta", "--case", "no-such-case"])
        assert exit_info.value.code == 2


def test_manifest_refusal_and_unchecked():
    with tempfile.TemporaryDirectory() as tmp:
        models = Path(tmp) / "models"
        shutil.copytree(MODELS, models)
        shutil.copy(models / "bl2p2.json", models / "extra.json")
        with workspace(models) as config:
            assert run(config, "volume", "--model", "extra", "--divisor", "3,-2,-2")[0] == 2
            code, cert = run(config, "--unchecked", "volume", "--model", "extra", "--divisor", "3,-2,-2")
            assert code == 0
            assert cert["results"]["volume"] == "2"
            with open(models / "bl2p2.json", "a") as f:
                f.write("\n")
            assert run(config, "volume", "--model", "bl2p2", "--divisor", "3,-2,-2")[0] == 2


def test_external_pencil_needs_unchecked():
    with tempfile.TemporaryDirectory() as tmp:
        pencil = Path(tmp) / "my_pencil.json"
        shutil.copy(MODELS / "pencil_example.json", pencil)
        with workspace() as config:
            assert run(config, "discriminant", "--pencil", str(pencil))[0] == 2
            code, cert = run(config, "--unchecked", "discriminant", "--pencil", str(pencil))
    assert code == 0
    assert str(pencil) in cert["models"]


def test_model_store():
    store = ModelStore(MODELS)
    assert "dp4" in store.names()
    assert store.names("aut_") == ["aut_control", "aut_singular", "aut_smooth"]
    store.resolve("dp4")
    assert store.used == {"dp4.json": file_digest(MODELS / "dp4.json")}
    assert store.load("f2")["name"] == "f2"
    with pytest.raises(InputError):
        store.resolve("missing")
    manifest = json.loads((MODELS / "MANIFEST.json").read_text())["models"]
    for name, digest in manifest.items():
        assert file_digest(MODELS / name) == digest, name


def test_config_and_environment():
    with workspace(autcheck={"sample_range": 2}) as config:
        app = FanoCheck(str(config))
        assert app.setting("autcheck", "sample_range") == 2
        assert app.setting("autcheck", "closure_cap") == 4096
        with environment(FANOCHECK_CLOSURE_CAP="17", FANOCHECK_WORKERS="two"):
            app = FanoCheck(str(config))
            assert app.setting("autcheck", "closure_cap") == 17
            assert app.setting("golden", "workers") == 4
    app = FanoCheck("no-such-config.json")
    assert app.setting("flagdelta", "random_seed") == 2016


def test_certificates():
    cert = Certificate(command="volume")
    cert.add_result("volume", 2)
    cert.models["bl2p2.json"] = "abc"
    later = Certificate.from_json(cert.to_json())
    later.timestamp = "2030-01-01T00:00:00"
    assert later.digest == cert.digest
    later.add_result("volume", 3)
    assert later.digest != cert.digest
    with tempfile.TemporaryDirectory() as tmp:
        older = Certificate(command="zariski", timestamp="2020-01-01T00:00:00")
        save_certificate(older, tmp)
        path = save_certificate(cert, tmp)
        assert path is not None and path.exists()
        (Path(tmp) / "broken.json").write_text("{")
        entries = list_certificates(tmp)
    assert [e["command"] for e in entries] == ["volume", "zariski"]
    assert entries[0]["digest"] == cert.digest


def test_certificate_digest_is_reproducible():
    with workspace() as config:
        first = run(config, "volume", "--model", "bl2p2", "--divisor", "3,-2,-2")[1]
        second = run(config, "volume", "--model", "bl2p2", "--divisor", "3,-2,-2")[1]
        code, listing = run(config, "certs")
    assert Certificate.from_json(json.dumps(first)).digest == Certificate.from_json(json.dumps(second)).digest
    assert code == 0
    assert listing and all(entry["command"] == "volume" for entry in listing)


def test_golden_table():
    anchors = [entry.anchor for entry in GOLDEN]
    assert len(anchors) == len(set(anchors))
    keys = [(entry.source, entry.key) for entry in GOLDEN]
    assert len(keys) == len(set(keys))
    with workspace() as config:
        sources = FanoCheck(str(config)).golden_sources()
    assert {entry.source for entry in GOLDEN} == set(sources)
    assert {f"delta:{name}" for name in CASES} <= set(sources)
    assert len(GROUP_TYPES) == 12


def test_golden_suite():
    with workspace() as config:
        code, cert = run(config, "golden")
    assert code == 0, [k for k, v in cert["verdicts"].items() if v != "pass"]
    assert cert["results"]["passed"] == f"{len(GOLDEN)}/{len(GOLDEN)}"


def test_helpers():
    assert parse_vector("3, -2,1/2") == [3, -2, Fraction(1, 2)]
    assert parse_pairs("0,1;1,-1") == [[0, 1], [1, -1]]
    with pytest.raises(InputError):
        parse_pairs("0,1;1")
    with pytest.raises(InputError):
        parse_vector("1,x")
    flat = flatten_report({"bound": "2", "values": {"a": "1"},
                           "subcases": [{"name": "p", "bound": "3", "values": {"b": "4"}}]})
    assert flat == {"bound": "2", "a": "1", "p/bound": "3", "p/b": "4"}


def main():
    """Run all tests"""
    print("🔍 Fanocheck Command Line Tests")
    print("=" * 40)

    tests = [(name, func) for name, func in globals().items() if name.startswith("test_")]
    passed = 0
    for name, func in tests:
        try:
            func()
            print(f"✅ PASS {name}")
            passed += 1
        except Exception as e:
            print(f"❌ FAIL {name}: {e}")

    print(f"\nPassed: {passed}/{len(tests)} tests")
    sys.exit(0 if passed == len(tests) else 1)


if __name__ == "__main__":
    main()
