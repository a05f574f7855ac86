import json
import os

import pytest

from hypineq import cli
from hypineq.corpus import bubble_corpus, write_corpus
from hypineq.rearrangement import write_profile

N4P = "2.6666666666666665"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- constants ------------------------------------------------------


def test_constants_table(capsys, tmp_path):
    code, out, _ = run(capsys, "constants", "--n", "4", "--p", N4P)
    assert code == 0
    assert "sobolev" in out
    assert "n/a" in out  # morrey needs p > n here
    code, _, _ = run(capsys, "constants", "--n", "4", "--p", N4P,
                     "--out", str(tmp_path))
    assert code == 0
    payload = json.loads((tmp_path / "constants.json").read_text())
    assert payload["morrey"] is None
    assert float(payload["sobolev"]) > 0.0


def test_constants_no_applicable(capsys):
    # p = n admits neither the subcritical nor the supercritical family
    code, _, err = run(capsys, "constants", "--n", "2", "--p", "2.0")
    assert code == 2
    assert "no constant" in err


# -- lemma ----------------------------------------------------------


def test_lemma_verify_writes_artifacts(capsys, tmp_path):
    code, _, _ = run(capsys, "lemma", "verify", "--n", "4", "--p", "3.0",
                     "--out", str(tmp_path))
    assert code == 0
    csv = (tmp_path / "lemma-verify-n4-p3.csv").read_text()
    assert csv.startswith("t,F,margin")
    payload = json.loads((tmp_path / "lemma-verify-n4-p3.json").read_text())
    assert payload["passed"] is True


def test_lemma_verify_out_of_range(capsys):
    code, _, err = run(capsys, "lemma", "verify", "--n", "4", "--p", "2.0")
    assert code == 2
    assert "error" in err


def test_lemma_violate(capsys):
    code, out, _ = run(capsys, "lemma", "violate", "--n", "4", "--p", "2.5")
    assert code == 0
    assert json.loads(out)["violation_margin"] < 0.0
    code, _, _ = run(capsys, "lemma", "violate", "--n", "4", "--p", "3.5")
    assert code == 2


# -- verify ---------------------------------------------------------


def test_verify_builtin_corpus(capsys):
    code, out, _ = run(capsys, "verify", "--inequality", "key_comparison",
                       "--n", "4", "--p", N4P, "--format", "csv")
    assert code == 0
    assert out.count("\n") == 21  # header + 20 profiles


def test_verify_scaled_constant_fails_on_bubbles(capsys, tmp_path):
    for v in bubble_corpus():
        write_profile(str(tmp_path / f"{v.label}.txt"), v)
    base = ("verify", "--inequality", "poincare_sobolev", "--n", "4",
            "--p", N4P, "--corpus", str(tmp_path))
    code, _, _ = run(capsys, *base)
    assert code == 0
    code, _, _ = run(capsys, *base, "--constant-scale", "1.1")
    assert code == 1


def test_verify_constant_scale_rejected_for_comparison(capsys):
    code, _, err = run(capsys, "verify", "--inequality", "key_comparison",
                       "--n", "4", "--p", N4P, "--constant-scale", "1.1")
    assert code == 2
    assert "constant-free" in err


def test_verify_missing_corpus_dir(capsys, tmp_path):
    code, _, _ = run(capsys, "verify", "--inequality", "key_comparison",
                     "--n", "4", "--p", N4P,
                     "--corpus", str(tmp_path / "nope"))
    assert code == 2


# -- sweep ----------------------------------------------------------


def test_sweep_deterministic_artifact(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ("sweep", "--inequality", "key_comparison", "--n-list", "4,5",
            "--p-list", "2.7,3.0", "--format", "csv")
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b))[0] == 0
    fa = (a / "sweep-key_comparison.csv").read_bytes()
    fb = (b / "sweep-key_comparison.csv").read_bytes()
    assert fa == fb
    assert len(fa) > 0


# -- sharpness ------------------------------------------------------


def test_sharpness_sweep_passes(capsys, tmp_path):
    code, _, _ = run(capsys, "sharpness", "--n", "4", "--p", N4P,
                     "--out", str(tmp_path))
    assert code == 0
    lines = (tmp_path / "sharpness-sweep.csv").read_text().strip().split("\n")
    assert lines[0] == "lambda,T,ratio,gap"
    gaps = [float(l.split(",")[3]) for l in lines[1:]]
    assert all(g > 0.0 for g in gaps)
    assert gaps == sorted(gaps, reverse=True)


def test_sharpness_unreachable_gap_is_inconclusive(capsys):
    code, _, _ = run(capsys, "sharpness", "--n", "4", "--p", N4P,
                     "--lambdas", "1.0,0.1,0.01", "--gap-max", "1e-9")
    assert code == 3


def test_sharpness_single_evaluation(capsys):
    code, out, _ = run(capsys, "sharpness", "--n", "4", "--p", N4P,
                       "--no-optimize", "--lambda", "0.01")
    assert code == 0
    assert float(out) > 0.0
    code, _, _ = run(capsys, "sharpness", "--n", "4", "--p", N4P,
                     "--no-optimize")
    assert code == 2


def test_sharpness_optimizer(capsys, tmp_path):
    code, _, _ = run(capsys, "sharpness", "--n", "4", "--p", N4P,
                     "--optimize", "--max-iter", "30", "--out", str(tmp_path))
    assert code == 0
    trace = (tmp_path / "sharpness-trace.csv").read_text()
    assert trace.startswith("iteration,lambda,T,ratio,gap")


# -- config files ---------------------------------------------------


def test_config_supplies_defaults_and_flags_win(capsys, tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("# comment\np = 2.0\n")
    # config alone puts p out of range -> usage error
    code, _, _ = run(capsys, "lemma", "verify", "--n", "4",
                     "--config", str(cfgfile))
    assert code == 2
    # the explicit flag overrides the config value
    code, _, _ = run(capsys, "lemma", "verify", "--n", "4", "--p", "3.0",
                     "--config", str(cfgfile))
    assert code == 0


def test_config_rejects_unknown_key(capsys, tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("frobnicate=1\n")
    code, _, err = run(capsys, "lemma", "verify", "--n", "4", "--p", "3.0",
                       "--config", str(cfgfile))
    assert code == 2
    assert "unknown key" in err


def test_config_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "lemma", "verify", "--n", "4", "--p", "3.0",
                     "--config", str(tmp_path / "absent.cfg"))
    assert code == 2


def test_atomic_write_leaves_no_temp_files(capsys, tmp_path):
    run(capsys, "constants", "--n", "4", "--p", N4P, "--out", str(tmp_path))
    leftovers = [f for f in os.listdir(tmp_path) if f.startswith(".tmp-")]
    assert leftovers == []
