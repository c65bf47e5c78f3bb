import subprocess
import sys

import pytest

from autoseq import dfao as D
from autoseq import proofs as P
from autoseq.characters import build_unit_group, compile_character, enumerate_characters
from autoseq.cli import RunConfig, UsageError, run, sweep_automata
from autoseq.values import ONE


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def chi4_file(tmp_path):
    path = tmp_path / "chi4.dfao"
    path.write_text(D.dumps(compile_character(enumerate_characters(build_unit_group(4))[1], 2)))
    return str(path)


def test_classify_builtin(capsys):
    code, out, _ = call(capsys, "classify", "char:4:1", "--q", "2", "--N", "10000", "--Qmax", "100", "--P", "1000")
    assert code == 0
    assert "verdict: CharacterMatch" in out and "conductor: 4" in out
    assert "N=10000" in out and "Qmax=100" in out and "P=1000" in out


def test_infer_liouville(capsys):
    code, out, _ = call(capsys, "infer", "liouville", "--q", "2", "--depth", "7", "--prefix", "4096")
    assert code == 1
    assert "not closed, 6 depth levels strictly increasing" in out
    assert "depth=7" in out and "prefix=4096" in out


def test_infer_closed_prints_candidate(capsys):
    code, out, _ = call(capsys, "infer", "char:3:1", "--depth", "8", "--prefix", "4096")
    assert code == 0 and "closed at depth" in out and "\nq 2\n" in out


def test_bad_inputs_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.dfao"
    bad.write_text("q 2\nstates 1\nt 0 0 0\n")
    code, _, err = call(capsys, "eval", str(bad), "3")
    assert code == 2 and err.strip().count("\n") == 0 and err
    assert call(capsys, "eval", "nonexistent-thing", "3")[0] == 2
    assert call(capsys, "classify", "liouville", "--bogus")[0] == 2
    assert call(capsys, "classify", "liouville", "--N", "0")[0] == 2
    assert call(capsys, "eval", "liouville", "--q", "1", "3")[0] == 2
    assert call(capsys)[0] == 2


def test_eval(capsys, chi4_file):
    assert call(capsys, "eval", chi4_file, "7")[1] == "n: 7\nvalue: W:1/2\n"
    assert call(capsys, "eval", "liouville", "12")[1] == "n: 12\nvalue: W:1/2\n"


def test_kernel_minimize_k0(capsys, chi4_file):
    code, out, _ = call(capsys, "kernel", chi4_file)
    assert code == 0 and "size: 5" in out and "positive_depth_size: 4" in out
    code, out, _ = call(capsys, "minimize", chi4_file)
    assert D.loads(out) == D.load(chi4_file)
    assert call(capsys, "k0", chi4_file)[1] == "k0: 1\n"


def test_reverse_and_equiv(capsys, chi4_file, tmp_path):
    code, out, _ = call(capsys, "reverse", chi4_file)
    assert code == 0 and "reading msd" in out
    rev = tmp_path / "rev.dfao"
    rev.write_text(out)
    code, out, _ = call(capsys, "equiv", chi4_file, str(rev))
    assert code == 0 and "equivalent: yes" in out
    ones = tmp_path / "ones.dfao"
    ones.write_text(D.dumps(D.constant(ONE)))
    code, out, _ = call(capsys, "equiv", chi4_file, str(ones))
    assert code == 1 and "witness: 0" in out


def test_compile_char(capsys):
    code, out, _ = call(capsys, "compile-char", "--Q", "4", "--index", "1", "--q", "2")
    assert code == 0 and out.startswith("# char Q=4 e=[1] conductor 4\n")
    assert D.loads(out).state_count == 5
    assert call(capsys, "compile-char", "--Q", "4", "--index", "7")[0] == 2


def test_classify_negative_and_not_multiplicative(capsys, tmp_path):
    code, out, _ = call(capsys, "classify", "liouville", "--Qmax", "10")
    assert code == 1 and "NotClassified" in out and "Q=10:" in out
    tm = tmp_path / "tm.dfao"
    tm.write_text("q 2\nstates 2\nt 0 0 0\nt 0 1 1\nt 1 0 1\nt 1 1 0\no 0 1\no 1 -1\n")
    code, out, _ = call(capsys, "classify", str(tm), "--N", "100")
    assert code == 1 and "NotCompletelyMultiplicative" in out


def test_cm_spec_file(capsys, tmp_path):
    f = tmp_path / "f.cm"
    f.write_text("cm\ntable-bound 7\ndefault Z\np 2 1\np 3 1\n")
    code, out, _ = call(capsys, "classify", str(f))
    assert code == 0 and "EventuallyZero" in out and "bound: 3" in out


def test_tabular_format(capsys):
    code, out, _ = call(capsys, "eval", "liouville", "12", "--format", "tabular")
    assert out == "n\tvalue\n12\tW:1/2\n"


def test_demo_and_verify_cert(capsys, tmp_path, chi4_file):
    out_path = tmp_path / "certs.txt"
    code, out, _ = call(capsys, "demo", "key2", "--out", str(out_path))
    assert code == 0 and out.count("verified: yes") == 3
    code, out, _ = call(capsys, "verify-cert", str(out_path))
    assert code == 0 and out.count("verified: yes") == 3
    text = out_path.read_text().replace("gamma: ", "gamma: 1", 1)
    out_path.write_text(text)
    code, out, _ = call(capsys, "verify-cert", str(out_path))
    assert code == 1 and "verified: no" in out

    for argv in (["demo", "key1", "--dfao", chi4_file], ["demo", "key"],
                 ["demo", "hb", "--u", "3", "--v", "4", "--limit", "10000"],
                 ["demo", "zero-prop", "--f", "char:5:2", "--r", "83"]):
        code, out, _ = call(capsys, *argv)
        assert code == 0 and "verified: yes" in out, argv


def test_demo_negative_paths(capsys):
    assert call(capsys, "demo", "key", "--k0", "3", "--primes", "5,7")[0] == 1
    assert call(capsys, "demo", "hb", "--u", "83", "--v", "240", "--count", "50", "--limit", "2000")[0] == 1
    assert call(capsys, "demo", "zero-prop", "--f", "liouville", "--r", "83")[0] == 1
    assert call(capsys, "demo", "hb")[0] == 2


def test_resource_limit_exit_3(capsys, tmp_path):
    f = tmp_path / "f.cm"
    f.write_text("cm\ntable-bound 2\ndefault W:1/400\n")
    assert call(capsys, "eval", str(f), "3")[0] == 2  # token rejected at parse time
    f.write_text("cm\ntable-bound 3\ndefault 1\np 2 W:1/360\np 3 W:1/359\n")
    assert call(capsys, "eval", str(f), "6")[0] == 3


def test_sweep_small(capsys):
    code, out, _ = call(capsys, "sweep", "--q", "2", "--max-states", "2", "--N", "2000")
    assert code == 0 and "NotClassified" not in out
    assert "multiplicative:" in out


def test_determinism(capsys, monkeypatch):
    argv = ["demo", "key2", "--seed", "5"]
    first = call(capsys, *argv)
    monkeypatch.setenv("AUTOSEQ_THREADS", "1")
    assert call(capsys, *argv) == first
    argv = ["sweep", "--max-states", "2", "--N", "2000"]
    monkeypatch.setenv("AUTOSEQ_THREADS", "4")
    parallel = call(capsys, *argv)
    monkeypatch.setenv("AUTOSEQ_THREADS", "1")
    assert call(capsys, *argv) == parallel


def test_threads_env_validation(capsys, monkeypatch):
    monkeypatch.setenv("AUTOSEQ_THREADS", "many")
    assert call(capsys, "eval", "liouville", "3")[0] == 2


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig("eval", q=1)
    with pytest.raises(UsageError):
        RunConfig("eval", prefix=0)
    with pytest.raises(UsageError):
        RunConfig("eval", fmt="json")


def test_sweep_automata_are_minimal_and_distinct():
    autos = sweep_automata(2, 2)
    assert len(set(autos)) == len(autos)
    assert all(D.minimize(a) == a for a in autos)


def test_console_script_module():
    res = subprocess.run([sys.executable, "-m", "autoseq.cli", "eval", "liouville", "12"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "n: 12\nvalue: W:1/2\n"


def test_certificate_file_written_matches_loader(capsys, tmp_path):
    out_path = tmp_path / "c.txt"
    call(capsys, "demo", "key", "--out", str(out_path))
    (cert,) = P.loads(out_path.read_text())
    assert cert.r == 83 and cert.verify() == []
