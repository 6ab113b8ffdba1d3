"""Command line interface: exit codes, output formats, stability."""

import json
import os

import pytest

from nmdekl.cli import (
    EXIT_IO, EXIT_OK, EXIT_PARSE, EXIT_TOTALITY, EXIT_TYPE,
    EXIT_UNTRANSLATABLE, main,
)
from conftest import CORPUS, negative_files, tutorial_file


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


CHAIN = os.path.join(CORPUS, "chain.json")
INSTANCE = os.path.join(CORPUS, "instance.json")


def test_check_tutorial_succeeds(capsys):
    code, out, _ = run(capsys, "check", tutorial_file())
    assert code == EXIT_OK
    assert out.count(": ok") == 12


def test_check_machine_format_is_stable(capsys):
    code1, out1, _ = run(capsys, "check", tutorial_file(), "--format",
                         "machine")
    code2, out2, _ = run(capsys, "check", tutorial_file(), "--format",
                         "machine")
    assert code1 == code2 == EXIT_OK
    assert out1 == out2
    for line in out1.strip().splitlines():
        label, status, kind = line.split()
        assert status == "ok" and kind == "ok"


def test_check_type_error_exit_code(capsys):
    path = [p for p in negative_files() if "unguarded_cofix." in p][0]
    code, out, _ = run(capsys, "check", path)
    assert code == EXIT_TYPE
    assert "unguarded-cofix" in out


def test_check_missing_file_is_io_error(capsys):
    with pytest.raises(SystemExit) as e:
        run(capsys, "check", "/no/such/file.nmdekl")
    assert e.value.code == EXIT_IO


def test_check_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.nmdekl"
    bad.write_text("axiom : :\n")
    code, _, err = run(capsys, "check", str(bad))
    assert code == EXIT_PARSE
    assert "parse error" in err


def test_normalize_applies_the_functor_laws(capsys):
    code, out, _ = run(capsys, "normalize", "restrict(ext_id(t), k)")
    assert code == EXIT_OK
    assert out.strip() == "k"


def test_normalize_beta(capsys):
    code, out, _ = run(capsys, "normalize", "(fun (x : Nat) => f x x) n")
    assert code == EXIT_OK
    assert out.strip() == "f n n"


def test_normalize_reports_fuel_exhaustion(capsys):
    term = ("(fun (g : (x : Nat) -> Nat) => fun (x : Nat) => g (g x)) "
            "((fun (g : (x : Nat) -> Nat) => fun (x : Nat) => g (g x)) f0)")
    code, out, _ = run(capsys, "normalize", term, "--fuel", "1")
    assert code == EXIT_OK
    assert out.startswith("FUEL-EXHAUSTED")


def test_fuel_environment_variable(capsys, monkeypatch):
    term = ("(fun (g : (x : Nat) -> Nat) => fun (x : Nat) => g (g x)) "
            "((fun (g : (x : Nat) -> Nat) => fun (x : Nat) => g (g x)) f0)")
    monkeypatch.setenv("NMDEKL_FUEL", "1")
    code, out, _ = run(capsys, "normalize", term)
    assert code == EXIT_OK and out.startswith("FUEL-EXHAUSTED")
    monkeypatch.setenv("NMDEKL_FUEL", "10000")
    code, out, _ = run(capsys, "normalize", term)
    assert code == EXIT_OK and not out.startswith("FUEL-EXHAUSTED")


def test_mc_mu_formula(capsys):
    code, out, _ = run(capsys, "mc", CHAIN, "mu X . p \\/ dia X")
    assert code == EXIT_OK
    assert out.strip() == "s0 s1"


def test_mc_state_flag(capsys):
    code, out, _ = run(capsys, "mc", CHAIN, "p", "--state", "s1")
    assert (code, out.strip()) == (EXIT_OK, "true")
    code, out, _ = run(capsys, "mc", CHAIN, "p", "--state", "s0")
    assert (code, out.strip()) == (EXIT_OK, "false")


def test_mc_ctl_formula(capsys):
    code, out, _ = run(capsys, "mc", CHAIN, "AF p")
    assert code == EXIT_OK
    assert out.strip() == "s0 s1"


def test_mc_ctl_totality_error(tmp_path, capsys):
    partial = tmp_path / "partial.json"
    partial.write_text(json.dumps({
        "states": ["s0", "s1"], "transitions": [["s0", "s1"]],
        "valuation": {}}))
    code, _, err = run(capsys, "mc", str(partial), "EF top")
    assert code == EXIT_TOTALITY
    assert "totality" in err


def test_mc_parse_error(capsys):
    code, _, err = run(capsys, "mc", CHAIN, "mu X .")
    assert code == EXIT_PARSE


def test_translate_enc(capsys):
    code, out, _ = run(capsys, "translate", "enc", "dia p")
    assert code == EXIT_OK
    assert out.strip() == "dia p_at(s)"


def test_translate_dec_round_trip(capsys):
    code, out, _ = run(capsys, "translate", "enc",
                       "mu X . p \\/ dia X")
    assert code == EXIT_OK
    encoded = out.strip()
    code, out, _ = run(capsys, "translate", "dec", encoded)
    assert code == EXIT_OK
    assert out.strip() == "mu X . p \\/ dia X"


def test_translate_dec_untranslatable(capsys):
    code, _, err = run(capsys, "translate", "dec",
                       "forall (s : State) . p_at(s)")
    assert code == EXIT_UNTRANSLATABLE
    assert "untranslatable" in err


def test_sem_eval_values(capsys):
    code, out, _ = run(capsys, "sem-eval", INSTANCE, "bot")
    assert (code, out.strip()) == (EXIT_OK, "false")
    code, out, _ = run(capsys, "sem-eval", INSTANCE, "State")
    assert (code, out.strip()) == (EXIT_OK, "{s0, s1}")
    code, out, _ = run(capsys, "sem-eval", INSTANCE,
                       "KF(step(nil(s0), go, s1))")
    assert (code, out.strip()) == (EXIT_OK, "{*}")


def test_sem_eval_fragment_error(capsys):
    code, _, err = run(capsys, "sem-eval", INSTANCE, "Uc0")
    assert code == EXIT_TYPE
    assert "fragment" in err


def test_sep_demo_output(capsys):
    code, out, _ = run(capsys, "sep-demo", "--format", "machine")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "underlying_equal: yes"
    assert lines[1] == "phi: M1=false M2=true"
    assert lines[2] == "sampled mu-agreement: 200/200"
